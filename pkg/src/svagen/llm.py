"""LLM provider abstraction: remote chat-completion HTTP backends and
deterministic mocks for closed-loop testing.

Mock outputs are pure functions of (prompt, config, seed).  The mocks read
the target RTL back out of the prompt text itself, so they exercise the
same contract a live model sees.
"""

from __future__ import annotations

import abc
import json
import random
import threading
import time
import zlib
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from .errors import AuthError, EmptyInput, ProviderError, RateLimited, Timeout
from .kb import parse_rtl_block
from .paths import enumerate_path_conditions
from .prompting import extract_path_count, extract_target_rtl

_BACKOFF_BASE = 0.25


@dataclass(frozen=True)
class GenerationConfig:
    temperature: float = 0.0
    max_tokens: int = 1024
    model_id: str = ""
    timeout: float = 30.0
    retries: int = 2

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


class LlmProvider(abc.ABC):
    @property
    @abc.abstractmethod
    def id(self) -> str: ...

    @abc.abstractmethod
    def complete(self, prompt: str, config: GenerationConfig) -> str: ...


def complete(
    provider: LlmProvider,
    prompt: str,
    config: GenerationConfig,
    sleeper: Callable[[float], None] = time.sleep,
) -> str:
    """Call the provider with exponential backoff on transient failures.

    Total attempts never exceed config.retries + 1.  Authentication errors
    are terminal immediately.
    """
    if not prompt:
        raise EmptyInput("prompt is empty")
    attempt = 0
    while True:
        try:
            return provider.complete(prompt, config)
        except AuthError:
            raise
        except (RateLimited, Timeout) as exc:
            if attempt >= config.retries:
                raise
            last = exc
        except ProviderError as exc:
            if exc.status < 500 or attempt >= config.retries:
                raise
            last = exc
        sleeper(_BACKOFF_BASE * (2 ** attempt))
        attempt += 1


class MockProvider(LlmProvider):
    """Deterministic stand-in for a live model.

    Modes:
      perfect    — one valid property per execution path, antecedent equal
                   to the path condition text
      lossy(p)   — perfect output minus assertions dropped each with
                   probability p
      garbled(p) — each assertion gains an extra ')' with probability p,
                   the classic unbalanced-parenthesis defect
    """

    def __init__(self, mode: str = "perfect", p: float = 0.0, seed: int = 0):
        if mode not in ("perfect", "lossy", "garbled"):
            raise ValueError(f"unknown mock mode {mode!r}")
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must be in [0, 1]")
        self.mode = mode
        self.p = p
        self.seed = seed

    @property
    def id(self) -> str:
        if self.mode == "perfect":
            return "mock-perfect"
        return f"mock-{self.mode}-{self.p}"

    def complete(self, prompt: str, config: GenerationConfig) -> str:
        target_rtl = extract_target_rtl(prompt)
        declared = extract_path_count(prompt)
        block = parse_rtl_block(target_rtl)
        conds = enumerate_path_conditions(block.block.body)
        # honor the prompt's own claim if it disagrees (it should not)
        conds = conds[:declared] if declared < len(conds) else conds

        sens = block.block.sensitivity.entries
        clock = ""
        for entry in sens:
            if entry.edge in ("posedge", "negedge"):
                clock = f"@({entry.edge} {entry.signal}) "
                break

        rng = random.Random((self.seed << 32) ^ zlib.crc32(prompt.encode("utf-8")))
        props: List[str] = []
        for i, cond in enumerate(conds):
            if self.mode == "lossy" and rng.random() < self.p:
                continue
            antecedent = f"({cond.description})"
            if self.mode == "garbled" and rng.random() < self.p:
                antecedent = f"({cond.description}))"
            props.append(
                f"property gen_p{i};\n"
                f"  {clock}{antecedent} |-> (1'b1);\n"
                f"endproperty"
            )
        body = "\n\n".join(props)
        return f"Here are the assertions for the target RTL:\n\n```systemverilog\n{body}\n```\n"


def _requests_chat_transport(
    url: str,
    payload: dict,
    headers: dict,
    timeout: float,
) -> Tuple[int, str]:
    import requests

    try:
        response = requests.post(url, json=payload, headers=headers, timeout=timeout)
    except requests.Timeout:
        raise Timeout(f"request to {url} timed out after {timeout}s") from None
    except requests.RequestException as exc:
        raise ProviderError(0, str(exc)) from None
    return response.status_code, response.text


class RemoteProvider(LlmProvider):
    """Chat-completion HTTP backend (single user message per request)."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: Optional[str] = None,
        timeout: float = 30.0,
        transport: Callable[[str, dict, dict, float], Tuple[int, str]] = _requests_chat_transport,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.transport = transport

    @property
    def id(self) -> str:
        return f"remote:{self.model}"

    def complete(self, prompt: str, config: GenerationConfig) -> str:
        payload = {
            "model": config.model_id or self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": config.temperature,
            "max_tokens": config.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        status, body = self.transport(
            f"{self.base_url}/chat/completions", payload, headers, config.timeout or self.timeout
        )
        if status in (401, 403):
            raise AuthError(status, body)
        if status == 429:
            raise RateLimited(status, body)
        if status >= 500:
            raise ProviderError(status, body)
        if status != 200:
            raise ProviderError(status, body)
        try:
            parsed = json.loads(body)
            return parsed["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError):
            raise ProviderError(status, f"malformed completion body: {body[:200]}") from None


class RateLimiter:
    """Token-bucket-free simple limiter: at most rps calls per second."""

    def __init__(self, rps: float):
        if rps <= 0:
            raise ValueError("rps must be positive")
        self._interval = 1.0 / rps
        self._lock = threading.Lock()
        self._next_slot = 0.0

    def acquire(self, sleeper: Callable[[float], None] = time.sleep, clock: Callable[[], float] = time.monotonic) -> None:
        with self._lock:
            now = clock()
            wait = self._next_slot - now
            start = max(now, self._next_slot)
            self._next_slot = start + self._interval
        if wait > 0:
            sleeper(wait)
