"""Chat-model adapters, the ground-truth oracle and stage prompts."""

from .faults import ALIASES, KINDS, Fault, FaultSpec, FaultSpecError, parse_fault
from .http import HttpAdapter
from .oracle import MockOracleAdapter
from .prompts import PromptError, build_prompt, template_hash
from .types import (
    Adapter,
    AdapterConfig,
    AdapterError,
    ChatRequest,
    ChatResponse,
    ImagePart,
    OracleContext,
    RetryPolicy,
    TextPart,
)

__all__ = [
    "ALIASES",
    "KINDS",
    "Adapter",
    "AdapterConfig",
    "AdapterError",
    "ChatRequest",
    "ChatResponse",
    "Fault",
    "FaultSpec",
    "FaultSpecError",
    "HttpAdapter",
    "ImagePart",
    "MockOracleAdapter",
    "OracleContext",
    "PromptError",
    "RetryPolicy",
    "TextPart",
    "build_prompt",
    "parse_fault",
    "template_hash",
]
