"""Chat request/response types and the adapter contract."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Protocol, Union


class AdapterError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


@dataclass(frozen=True)
class TextPart:
    text: str


@dataclass(frozen=True)
class ImagePart:
    data: bytes
    media_type: str = "image/png"


Part = Union[TextPart, ImagePart]


@dataclass(frozen=True)
class OracleContext:
    """Ground truth handed to the mock oracle beside the prompt, never inside it.

    init/goal are the states stage 3 was asked to encode (None when the
    earlier stage failed to parse); gt_init/gt_goal are the scenario truth.
    """

    scenario_id: str
    domain: str
    gt_init: Any = None
    gt_goal: Any = None
    init: Any = None
    goal: Any = None
    goal_text: str | None = None


@dataclass(frozen=True)
class ChatRequest:
    system_text: str
    user_parts: tuple[Part, ...]
    temperature: float = 0.0
    max_output_tokens: int = 2048
    stage: int = 0
    repair: bool = False
    context: OracleContext | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "user_parts", tuple(self.user_parts))
        if not self.user_parts:
            raise ValueError("a request needs at least one user part")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")

    @property
    def images(self) -> tuple[ImagePart, ...]:
        return tuple(p for p in self.user_parts if isinstance(p, ImagePart))


@dataclass(frozen=True)
class ChatResponse:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    latency: float = 0.0


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_base: float = 0.5

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.backoff_base < 0:
            raise ValueError("backoff_base must be >= 0")


@dataclass(frozen=True)
class AdapterConfig:
    endpoint: str = ""
    model: str = "gpt-4o"
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 60.0
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    max_in_flight: int = 4
    transcript_path: str | None = None


class Adapter(Protocol):
    name: str
    supports_vision: bool

    def complete(self, req: ChatRequest) -> ChatResponse: ...
