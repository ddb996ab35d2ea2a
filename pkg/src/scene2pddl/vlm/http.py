"""OpenAI-compatible chat-completions client with retries."""

from __future__ import annotations

import base64
import hashlib
import json
import os
import threading
import time
from typing import Callable

import httpx

from .types import AdapterConfig, AdapterError, ChatRequest, ChatResponse, TextPart

RETRY_STATUS = frozenset({429, 500, 502, 503, 504})


def request_body(model: str, req: ChatRequest) -> dict:
    content = []
    for part in req.user_parts:
        if isinstance(part, TextPart):
            content.append({"type": "text", "text": part.text})
        else:
            url = f"data:{part.media_type};base64,{base64.b64encode(part.data).decode('ascii')}"
            content.append({"type": "image_url", "image_url": {"url": url}})
    return {
        "model": model,
        "messages": [
            {"role": "system", "content": req.system_text},
            {"role": "user", "content": content},
        ],
        "temperature": req.temperature,
        "max_tokens": req.max_output_tokens,
    }


def _redact(body: dict) -> dict:
    """Replace inline images with their digest for transcripts."""
    out = json.loads(json.dumps(body))
    for msg in out["messages"]:
        if isinstance(msg["content"], list):
            for part in msg["content"]:
                if part.get("type") == "image_url":
                    url = part["image_url"]["url"]
                    part["image_url"]["url"] = f"sha256:{hashlib.sha256(url.encode()).hexdigest()}"
    return out


def completions_url(endpoint: str) -> str:
    endpoint = endpoint.rstrip("/")
    return endpoint if endpoint.endswith("/chat/completions") else endpoint + "/chat/completions"


class HttpAdapter:
    supports_vision = True

    def __init__(self, config: AdapterConfig, transport: httpx.BaseTransport | None = None,
                 sleep: Callable[[float], None] = time.sleep):
        if not config.endpoint:
            raise AdapterError("CONFIG", "http adapter needs an endpoint URL")
        key = os.environ.get(config.api_key_env)
        if not key:
            raise AdapterError("AUTH_FAILED", f"environment variable {config.api_key_env} is not set")
        self.config = config
        self.name = f"http:{config.model}"
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max(1, config.max_in_flight))
        self._log_lock = threading.Lock()
        self._client = httpx.Client(
            timeout=config.timeout,
            transport=transport,
            headers={"Authorization": f"Bearer {key}", "Content-Type": "application/json"},
        )

    def close(self) -> None:
        self._client.close()

    def _log(self, record: dict) -> None:
        if not self.config.transcript_path:
            return
        with self._log_lock, open(self.config.transcript_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    def complete(self, req: ChatRequest) -> ChatResponse:
        body = request_body(self.config.model, req)
        url = completions_url(self.config.endpoint)
        policy = self.config.retry
        last = AdapterError("TIMEOUT", "no attempt made")
        with self._slots:
            for attempt in range(policy.max_attempts):
                if attempt:
                    self._sleep(policy.backoff_base * 2 ** (attempt - 1))
                start = time.monotonic()
                try:
                    resp = self._client.post(url, json=body)
                except httpx.TimeoutException as exc:
                    last = AdapterError("TIMEOUT", str(exc) or "request timed out")
                    continue
                except httpx.TransportError as exc:
                    last = AdapterError("TRANSPORT", str(exc))
                    continue
                latency = time.monotonic() - start
                if resp.status_code in (401, 403):
                    raise AdapterError("AUTH_FAILED", f"HTTP {resp.status_code}")
                if resp.status_code in RETRY_STATUS:
                    code = "RATE_LIMITED" if resp.status_code == 429 else "SERVER_ERROR"
                    last = AdapterError(code, f"HTTP {resp.status_code} after {attempt + 1} attempt(s)")
                    continue
                if resp.status_code >= 400:
                    raise AdapterError("HTTP_ERROR", f"HTTP {resp.status_code}: {resp.text[:200]}")
                out = self._parse(resp)
                out = ChatResponse(out.text, out.prompt_tokens, out.completion_tokens, latency)
                self._log({"stage": req.stage, "request": _redact(body), "response": resp.json(), "latency": latency})
                return out
        raise last

    @staticmethod
    def _parse(resp: httpx.Response) -> ChatResponse:
        try:
            data = resp.json()
            text = data["choices"][0]["message"]["content"]
            usage = data.get("usage") or {}
            return ChatResponse(text or "", int(usage.get("prompt_tokens", 0)), int(usage.get("completion_tokens", 0)))
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise AdapterError("MALFORMED_RESPONSE", f"unexpected response body: {exc}") from exc
