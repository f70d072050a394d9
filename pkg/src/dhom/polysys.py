"""Complex multivariate polynomial systems.

A system is stored densely: every term carries a full exponent vector.
The systems handled here have a handful of variables and a few dozen
terms, so the dense layout keeps evaluation and differentiation to a
couple of vectorised numpy calls.

The text format accepted by :func:`parse_system` is::

    vars: x y z;
    x^2 + y^2 - 1;
    (x + 0.5)^2 + y^2 + z^2 - 1;

with ``i`` reserved for the imaginary unit and ``#`` starting a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Monomial",
    "Polynomial",
    "PolySystem",
    "PolyParseError",
    "parse_system",
    "format_system",
    "evaluate",
    "jacobian",
    "combine",
    "combine_rows",
    "linear_part",
]


class PolyParseError(ValueError):
    """Raised for malformed system text; carries a 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class Monomial(NamedTuple):
    coefficient: complex
    exponents: tuple[int, ...]


@dataclass(frozen=True)
class Polynomial:
    """Sum of monomials over a fixed number of variables."""

    coefficients: np.ndarray  # (T,) complex
    exponents: np.ndarray  # (T, n) int

    @classmethod
    def from_terms(cls, terms: dict[tuple[int, ...], complex], num_vars: int) -> "Polynomial":
        items = [(e, c) for e, c in terms.items() if c != 0]
        coeffs = np.array([c for _, c in items], dtype=complex)
        exps = np.array([e for e, _ in items], dtype=np.int64).reshape(len(items), num_vars)
        return cls(coeffs, exps)

    @property
    def num_vars(self) -> int:
        return self.exponents.shape[1]

    @property
    def degree(self) -> int:
        if len(self.coefficients) == 0:
            return 0
        return int(self.exponents.sum(axis=1).max())

    def terms(self) -> Iterator[Monomial]:
        for c, e in zip(self.coefficients, self.exponents):
            yield Monomial(complex(c), tuple(int(v) for v in e))

    def __len__(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True, eq=False)
class PolySystem:
    """An immutable list of polynomials in ``num_vars`` complex variables."""

    variable_names: tuple[str, ...]
    polynomials: tuple[Polynomial, ...]
    _table: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.variable_names)
        if n < 1:
            raise ValueError("a system needs at least one variable")
        if len(set(self.variable_names)) != n:
            raise ValueError("variable names must be distinct")
        for p in self.polynomials:
            if p.exponents.shape[1] != n:
                raise ValueError(
                    f"monomial exponent length {p.exponents.shape[1]} != {n} variables"
                )
            if not np.all(np.isfinite(p.coefficients)):
                raise ValueError("polynomial coefficients must be finite")
            if np.any(p.exponents < 0):
                raise ValueError("exponents must be nonnegative")
        object.__setattr__(self, "_table", _build_table(self.polynomials, n))

    @property
    def num_vars(self) -> int:
        return len(self.variable_names)

    @property
    def num_polys(self) -> int:
        return len(self.polynomials)

    @property
    def degrees(self) -> list[int]:
        return [p.degree for p in self.polynomials]

    def evaluate(self, point) -> np.ndarray:
        return evaluate(self, point)

    def jacobian(self, point) -> np.ndarray:
        return jacobian(self, point)

    def evaluate_and_jacobian(self, point) -> tuple[np.ndarray, np.ndarray]:
        x = _check_point(self, point)
        tab = self._table
        pw = _power_table(x, tab["maxdeg"])
        vals = tab["coeffs"] * np.prod(pw[tab["var_idx"], tab["exps"]], axis=1)
        dvals = tab["dcoeffs"] * np.prod(pw[tab["var_idx"], tab["dexps"]], axis=2)
        return tab["scatter"] @ vals, tab["scatter"] @ dvals.T

    def subsystem(self, rows: Sequence[int]) -> "PolySystem":
        return PolySystem(self.variable_names, tuple(self.polynomials[r] for r in rows))

    def __str__(self) -> str:
        return format_system(self)


def _build_table(polys: Sequence[Polynomial], n: int) -> dict:
    # Flatten all terms into one table so that evaluation is a single gather.
    if polys:
        coeffs = np.concatenate([p.coefficients for p in polys])
        exps = np.concatenate([p.exponents for p in polys]).reshape(-1, n)
    else:
        coeffs = np.zeros(0, dtype=complex)
        exps = np.zeros((0, n), dtype=np.int64)
    owner = np.concatenate([np.full(len(p), r) for r, p in enumerate(polys)]) if polys else []
    scatter = np.zeros((len(polys), len(coeffs)))
    scatter[np.asarray(owner, dtype=int), np.arange(len(coeffs))] = 1.0
    # dexps[j] holds the exponents of d/dx_j of every term.
    dexps = np.repeat(exps[None, :, :], n, axis=0)
    dcoeffs = np.empty((n, len(coeffs)), dtype=complex)
    for j in range(n):
        dcoeffs[j] = coeffs * exps[:, j]
        dexps[j, :, j] = np.maximum(exps[:, j] - 1, 0)
    return {
        "coeffs": coeffs,
        "exps": exps,
        "dcoeffs": dcoeffs,
        "dexps": dexps,
        "scatter": scatter,
        "var_idx": np.arange(n),
        "maxdeg": int(exps.max()) if exps.size else 0,
    }


def _power_table(x: np.ndarray, maxdeg: int) -> np.ndarray:
    pw = np.empty((len(x), maxdeg + 1), dtype=complex)
    pw[:, 0] = 1.0
    for e in range(1, maxdeg + 1):
        pw[:, e] = pw[:, e - 1] * x
    return pw


def _check_point(sys: PolySystem, point) -> np.ndarray:
    x = np.asarray(point, dtype=complex).reshape(-1)
    if x.shape[0] != sys.num_vars:
        raise ValueError(f"point has length {x.shape[0]}, system has {sys.num_vars} variables")
    return x


def evaluate(sys: PolySystem, point) -> np.ndarray:
    """Value of every polynomial of ``sys`` at ``point``."""
    x = _check_point(sys, point)
    tab = sys._table
    pw = _power_table(x, tab["maxdeg"])
    vals = tab["coeffs"] * np.prod(pw[tab["var_idx"], tab["exps"]], axis=1)
    return tab["scatter"] @ vals


def jacobian(sys: PolySystem, point) -> np.ndarray:
    """Analytic Jacobian, shape ``(num_polys, num_vars)``."""
    x = _check_point(sys, point)
    tab = sys._table
    pw = _power_table(x, tab["maxdeg"])
    dvals = tab["dcoeffs"] * np.prod(pw[tab["var_idx"], tab["dexps"]], axis=2)
    return tab["scatter"] @ dvals.T


def combine(f_A: PolySystem, f_B: PolySystem, M, N) -> PolySystem:
    """Randomized product system ``[M f_A(u); N f_B(v)]`` on ``w = (u, v)``.

    The result lives in ``2k`` variables named ``u0..u{k-1}, v0..v{k-1}``;
    the first ``k`` coordinates are always the ``u`` block.
    """
    k = f_A.num_vars
    if f_B.num_vars != k:
        raise ValueError("f_A and f_B must share the ambient dimension")
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    N = np.atleast_2d(np.asarray(N, dtype=complex))
    if M.shape[1] != f_A.num_polys:
        raise ValueError(f"M has {M.shape[1]} columns, f_A has {f_A.num_polys} polynomials")
    if N.shape[1] != f_B.num_polys:
        raise ValueError(f"N has {N.shape[1]} columns, f_B has {f_B.num_polys} polynomials")
    names = tuple(f"u{i}" for i in range(k)) + tuple(f"v{i}" for i in range(k))
    zeros = (0,) * k
    polys = []
    for mat, sys, left in ((M, f_A, True), (N, f_B, False)):
        for row in mat:
            acc: dict[tuple[int, ...], complex] = {}
            for weight, p in zip(row, sys.polynomials):
                for c, e in p.terms():
                    key = e + zeros if left else zeros + e
                    acc[key] = acc.get(key, 0) + weight * c
            polys.append(Polynomial.from_terms(acc, 2 * k))
    return PolySystem(names, tuple(polys))


def combine_rows(sys: PolySystem, weights) -> PolySystem:
    """The system ``weights @ sys`` in the same variables."""
    weights = np.atleast_2d(np.asarray(weights, dtype=complex))
    if weights.shape[1] != sys.num_polys:
        raise ValueError(f"weights have {weights.shape[1]} columns, system has {sys.num_polys} polynomials")
    polys = []
    for row in weights:
        acc: dict[tuple[int, ...], complex] = {}
        for weight, p in zip(row, sys.polynomials):
            for c, e in p.terms():
                acc[e] = acc.get(e, 0) + weight * c
        polys.append(Polynomial.from_terms(acc, sys.num_vars))
    return PolySystem(sys.variable_names, tuple(polys))


def linear_part(sys: PolySystem) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(R, r)`` with ``sys(x) = R x + r`` for an affine-linear system."""
    n = sys.num_vars
    R = np.zeros((sys.num_polys, n), dtype=complex)
    r = np.zeros(sys.num_polys, dtype=complex)
    for row, p in enumerate(sys.polynomials):
        for c, e in p.terms():
            total = sum(e)
            if total == 0:
                r[row] += c
            elif total == 1:
                R[row, e.index(1)] += c
            else:
                raise ValueError(f"polynomial {row} is not linear (degree {p.degree})")
    return R, r


# --------------------------------------------------------------------------
# text format

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*^();:,])
    """,
    re.VERBOSE,
)


class _Token(NamedTuple):
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise PolyParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    # Polynomials are built as dicts exponent-tuple -> coefficient.

    def __init__(self, tokens: list[_Token], names: Sequence[str] | None):
        self.toks = tokens
        self.pos = 0
        self.names = list(names) if names is not None else None

    @property
    def cur(self) -> _Token:
        return self.toks[self.pos]

    def error(self, msg: str, tok: _Token | None = None):
        tok = tok or self.cur
        raise PolyParseError(msg, tok.line, tok.col)

    def eat(self, text: str) -> _Token:
        tok = self.cur
        if tok.text != text or tok.kind not in ("op", "ident"):
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        self.pos += 1
        return tok

    def parse(self) -> PolySystem:
        if self.cur.kind == "ident" and self.cur.text == "vars":
            self.pos += 1
            self.eat(":")
            header = []
            while self.cur.kind == "ident" or self.cur.text == ",":
                tok = self.cur
                self.pos += 1
                if tok.text == ",":
                    continue
                if tok.text == "i":
                    self.error("'i' is reserved for the imaginary unit", tok)
                if tok.text in header:
                    self.error(f"duplicate variable {tok.text!r}", tok)
                header.append(tok.text)
            self.eat(";")
            if not header:
                self.error("empty variable list")
            if self.names is not None and list(self.names) != header:
                self.error("header variables differ from the supplied variable list")
            self.names = header
        if self.names is None:
            self.error("missing 'vars:' header")
        self.n = len(self.names)
        polys = []
        while self.cur.kind != "eof":
            poly = self.expr()
            self.eat(";")
            polys.append(Polynomial.from_terms(poly, self.n))
        if not polys:
            self.error("empty system")
        return PolySystem(tuple(self.names), tuple(polys))

    def expr(self) -> dict:
        sign = 1
        if self.cur.text in "+-" and self.cur.kind == "op":
            sign = -1 if self.cur.text == "-" else 1
            self.pos += 1
        acc = _scale(self.term(), sign)
        while self.cur.kind == "op" and self.cur.text in ("+", "-"):
            sign = -1 if self.cur.text == "-" else 1
            self.pos += 1
            acc = _add(acc, _scale(self.term(), sign))
        return acc

    def term(self) -> dict:
        acc = self.power()
        while self.cur.kind == "op" and self.cur.text == "*":
            self.pos += 1
            acc = _mul(acc, self.power())
        return acc

    def power(self) -> dict:
        base = self.atom()
        if self.cur.kind == "op" and self.cur.text == "^":
            self.pos += 1
            tok = self.cur
            if tok.kind != "num" or not tok.text.isdigit():
                self.error("exponent must be a nonnegative integer", tok)
            self.pos += 1
            result = {(0,) * self.n: 1.0 + 0j}
            for _ in range(int(tok.text)):
                result = _mul(result, base)
            return result
        return base

    def atom(self) -> dict:
        tok = self.cur
        if tok.kind == "num":
            self.pos += 1
            return {(0,) * self.n: complex(float(tok.text))}
        if tok.kind == "ident":
            self.pos += 1
            if tok.text == "i":
                return {(0,) * self.n: 1j}
            if tok.text not in self.names:
                self.error(f"undeclared variable {tok.text!r}", tok)
            e = [0] * self.n
            e[self.names.index(tok.text)] = 1
            return {tuple(e): 1.0 + 0j}
        if tok.kind == "op" and tok.text == "(":
            self.pos += 1
            inner = self.expr()
            self.eat(")")
            return inner
        if tok.kind == "op" and tok.text == "-":
            self.pos += 1
            return _scale(self.power(), -1)
        self.error(f"unexpected {tok.text or 'end of input'!r}")


def _scale(p: dict, s) -> dict:
    return {e: s * c for e, c in p.items()}


def _add(p: dict, q: dict) -> dict:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + c
    return out


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return out


def parse_system(text: str, variables: Sequence[str] | None = None) -> PolySystem:
    """Parse system text.

    ``variables`` may stand in for the ``vars:`` header; when both are
    present they must agree.
    """
    return _Parser(_tokenize(text), variables).parse()


def _format_coeff(c: complex) -> str:
    if c.imag == 0:
        return repr(float(c.real))
    return f"({c.real!r} + {c.imag!r}*i)"


def format_system(sys: PolySystem) -> str:
    """Inverse of :func:`parse_system`; coefficients are printed exactly."""
    lines = ["vars: " + " ".join(sys.variable_names) + ";"]
    for p in sys.polynomials:
        parts = []
        for c, e in p.terms():
            factors = [_format_coeff(c)]
            for name, k in zip(sys.variable_names, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            parts.append("*".join(factors))
        lines.append((" + ".join(parts) if parts else "0") + ";")
    return "\n".join(lines) + "\n"
