"""Line-oriented frame specifications for the ``classify`` command.

A spec is ``kind key=value ...``; pairs may continue on later lines and
``#`` starts a comment.  Values are expressions in ``s`` built from numbers,
the imaginary unit ``i`` (also as a suffix, ``2i``), ``+ - * / ^``,
parentheses and ``exp sin cos sinh cosh``.

Kinds and their keys::

    diagonal  a b            diag(e^{(a+ib)s}, e^{-(a+ib)s})
    case11    G f c          diag(e^{(1+ic)G}, ...) P(f / 2c)
    case12    A B1 B2        P(B1 + i B2) diag(e^{iA}, e^{-iA})
    case21    A B1 c2        P(B1 + i c2 A) diag(e^{A/2}, e^{-A/2})
    constant  alpha beta gamma   exp(s [[alpha, beta], [gamma, -alpha]])
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from . import calculus as C
from . import classifier
from .errors import ParseError

FUNCS = {"exp": C.exp, "sin": C.sin, "cos": C.cos, "sinh": C.sinh, "cosh": C.cosh}

KINDS = {
    "diagonal": (("a", "b"), ()),
    "case11": (("c",), ("G", "f")),
    "case12": ((), ("A", "B1", "B2")),
    "case21": (("c2",), ("A", "B1")),
    "constant": (("alpha", "beta", "gamma"), ()),
}

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][-+]?\d+)?i?|\.\d+(?:[eE][-+]?\d+)?i?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", line, col0 + pos + (len(text[pos:]) - len(text[pos:].lstrip())))
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), col0 + m.start(kind)))
        pos = m.end()
    return out


class _Parser:
    """Recursive descent; builds a closure ``s -> value``."""

    def __init__(self, text: str, line: int, col0: int):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line
        self.end_col = col0 + len(text)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def err(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col if tok else self.end_col)

    def take(self, text=None):
        tok = self.peek()
        if tok is None or (text is not None and tok.text != text):
            self.err(f"expected {text!r}" if text else "unexpected end of expression")
        self.i += 1
        return tok

    def parse(self) -> Callable:
        if not self.toks:
            self.err("empty expression")
        f = self.expr()
        if self.peek() is not None:
            self.err(f"unexpected {self.peek().text!r}")
        return f

    def expr(self):
        f = self.term()
        while self.peek() is not None and self.peek().text in "+-":
            op = self.take().text
            g = self.term()
            f = (lambda f, g: lambda s: f(s) + g(s))(f, g) if op == "+" else (lambda f, g: lambda s: f(s) - g(s))(f, g)
        return f

    def term(self):
        f = self.factor()
        while self.peek() is not None and self.peek().text in "*/":
            op = self.take().text
            g = self.factor()
            f = (lambda f, g: lambda s: f(s) * g(s))(f, g) if op == "*" else (lambda f, g: lambda s: f(s) / g(s))(f, g)
        return f

    def factor(self):
        tok = self.peek()
        if tok is not None and tok.text in "+-":
            self.take()
            f = self.factor()
            return f if tok.text == "+" else (lambda s: -f(s))
        return self.power()

    def power(self):
        f = self.atom()
        if self.peek() is not None and self.peek().text == "^":
            self.take()
            tok = self.take()
            if tok.kind != "num" or not tok.text.isdigit():
                self.err("exponent must be a non-negative integer", tok)
            n = int(tok.text)

            def pw(s, f=f, n=n):
                v = f(s)
                out = 1.0
                for _ in range(n):
                    out = v * out
                return out

            return pw
        return f

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            v = complex(0, float(tok.text[:-1])) if tok.text.endswith("i") else float(tok.text)
            return lambda s, v=v: v
        if tok.kind == "name":
            if tok.text == "s":
                return lambda s: s
            if tok.text == "i":
                return lambda s: 1j
            if tok.text in FUNCS:
                self.take("(")
                g = self.expr()
                self.take(")")
                fn = FUNCS[tok.text]
                return lambda s, fn=fn, g=g: fn(g(s))
            self.err(f"unknown name {tok.text!r}", tok)
        if tok.text == "(":
            g = self.expr()
            self.take(")")
            return g
        self.err(f"unexpected {tok.text!r}", tok)


def _const(fn: Callable, line: int, col: int) -> complex:
    try:
        v = complex(fn(0.0))
        if v != complex(fn(1.0)):
            raise ParseError("value must not depend on s", line, col)
    except ZeroDivisionError:
        raise ParseError("division by zero", line, col) from None
    return v


@dataclass(frozen=True)
class FrameSpec:
    kind: str
    params: dict
    frame: Callable


def parse_frame_spec(text: str) -> FrameSpec:
    kind, kind_pos, pairs = None, None, {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        for m in re.finditer(r"\S+", body):
            word, col = m.group(), m.start() + 1
            if kind is None:
                if word not in KINDS:
                    raise ParseError(f"unknown frame kind {word!r}", ln, col)
                kind, kind_pos = word, (ln, col)
                continue
            if "=" not in word:
                raise ParseError(f"expected key=value, got {word!r}", ln, col)
            key, val = word.split("=", 1)
            consts, funcs = KINDS[kind]
            if key not in consts + funcs:
                raise ParseError(f"unknown key {key!r} for {kind}", ln, col)
            if key in pairs:
                raise ParseError(f"duplicate key {key!r}", ln, col)
            vcol = col + len(key) + 1
            fn = _Parser(val, ln, vcol).parse()
            pairs[key] = (fn, val, ln, vcol)
    if kind is None:
        raise ParseError("empty frame spec", 1, 1)
    consts, funcs = KINDS[kind]
    missing = [k for k in consts + funcs if k not in pairs]
    if missing:
        raise ParseError(f"missing keys for {kind}: {', '.join(missing)}", *kind_pos)
    c = {k: _const(pairs[k][0], pairs[k][2], pairs[k][3]) for k in consts}
    f = {k: pairs[k][0] for k in funcs}
    shown = {k: pairs[k][1] for k in consts + funcs}

    def real(k):
        if abs(c[k].imag) > 0:
            raise ParseError(f"{k} must be real", pairs[k][2], pairs[k][3])
        return c[k].real

    if kind == "diagonal":
        frame = classifier.diagonal_frame(real("a"), real("b"))
    elif kind == "case11":
        frame = classifier.case11_frame(f["G"], f["f"], real("c"))
    elif kind == "case12":
        frame = classifier.case12_frame(f["A"], f["B1"], f["B2"])
    elif kind == "case21":
        frame = classifier.case21_frame(f["A"], f["B1"], real("c2"))
    else:
        Om = [[c["alpha"], c["beta"]], [c["gamma"], -c["alpha"]]]
        frame = classifier.constant_frame(Om)
    return FrameSpec(kind, shown, frame)
