"""Minimal s-expression reader for solver responses."""

from typing import Dict, List, Optional, Union

SExpr = Union[str, List["SExpr"]]


def tokenize(text: str) -> List[str]:
    tokens: List[str] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append(ch)
            i += 1
        elif ch == '"':
            j = i + 1
            while j < n:
                if text[j] == '"':
                    # "" is an escaped quote inside SMT-LIB strings
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            tokens.append(text[i: j + 1])
            i = j + 1
        elif ch == "|":
            j = text.index("|", i + 1)
            tokens.append(text[i + 1: j])
            i = j + 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '()";':
                j += 1
            tokens.append(text[i:j])
            i = j
    return tokens


def parse(text: str) -> List[SExpr]:
    """All top-level expressions in text."""
    out: List[SExpr] = []
    stack: List[List[SExpr]] = []
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if not stack:
                raise ValueError("unbalanced ')' in solver output")
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                out.append(done)
        elif stack:
            stack[-1].append(tok)
        else:
            out.append(tok)
    if stack:
        raise ValueError("unbalanced '(' in solver output")
    return out


def balance(text: str) -> int:
    """Open minus close parentheses, ignoring string literals."""
    depth = 0
    in_string = False
    for ch in text:
        if ch == '"':
            in_string = not in_string
        elif not in_string:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
    return depth


def bv_value(expr: SExpr) -> Optional[int]:
    """Value of a bitvector literal: #x.., #b.. or (_ bvN W)."""
    if isinstance(expr, str):
        if expr.startswith("#x"):
            return int(expr[2:], 16)
        if expr.startswith("#b"):
            return int(expr[2:], 2)
        return None
    if len(expr) == 3 and expr[0] == "_" and isinstance(expr[1], str) and expr[1].startswith("bv"):
        return int(expr[1][2:])
    return None


def model_values(text: str) -> Dict[str, int]:
    """Constants assigned in a `(get-model)` response; functions with arguments are skipped."""
    values: Dict[str, int] = {}
    for top in parse(text):
        if not isinstance(top, list):
            continue
        entries = top[1:] if top and top[0] == "model" else top
        for entry in entries:
            if not isinstance(entry, list) or len(entry) != 5 or entry[0] != "define-fun":
                continue
            _, name, params, _sort, body = entry
            if params:
                continue
            value = bv_value(body)
            if value is not None and isinstance(name, str):
                values[name] = value
    return values
