"""Recovering a PDDL form from chat-model output."""

from __future__ import annotations

import re

from .diagnostics import PddlError, error

_DEFINE = re.compile(r"\(\s*define\b", re.IGNORECASE)
_FENCE_LINE = re.compile(r"^\s*(```|~~~)[\w+-]*\s*$")


def _matching_close(text: str, start: int) -> int | None:
    depth = 0
    i = start
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == ";":
            nl = text.find("\n", i)
            if nl == -1:
                return None
            i = nl
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return i
        i += 1
    return None


def strip_markup(text: str) -> str:
    """Cut the first ``(define ...)`` form out of fenced or chatty output.

    If the form is never closed, everything after ``(define`` is kept except
    trailing fence lines, so the parser can report the imbalance itself.
    """
    m = _DEFINE.search(text)
    if m is None:
        raise PddlError([error("NO_PDDL_FOUND", "no (define ...) form in output")])
    start = m.start()
    end = _matching_close(text, start)
    if end is not None:
        return text[start : end + 1]
    lines = text[start:].splitlines()
    while lines and (not lines[-1].strip() or _FENCE_LINE.match(lines[-1])):
        lines.pop()
    return "\n".join(lines)
