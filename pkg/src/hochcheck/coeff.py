"""Coefficient ring: polynomials in the dimension ``N`` over Q[eps]/(eps^2 - 1).

A coefficient is stored as a mapping ``(power of N, power of eps) -> Fraction``
with the eps power reduced to 0 or 1. Zero is the empty mapping.
"""

from __future__ import annotations

import re
from fractions import Fraction


class Coefficient:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for (n, e), c in terms.items():
                c = Fraction(c)
                if c:
                    clean[(int(n), int(e) % 2)] = c
        self._terms = clean
        self._hash = None

    # constructors

    @classmethod
    def const(cls, value) -> "Coefficient":
        return cls({(0, 0): value})

    @classmethod
    def N(cls) -> "Coefficient":
        return cls({(1, 0): 1})

    @classmethod
    def eps(cls) -> "Coefficient":
        return cls({(0, 1): 1})

    @staticmethod
    def coerce(x) -> "Coefficient":
        if isinstance(x, Coefficient):
            return x
        return Coefficient.const(x)

    # ring operations

    def __add__(self, other):
        other = Coefficient.coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return Coefficient(out)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-Coefficient.coerce(other))

    def __rsub__(self, other):
        return Coefficient.coerce(other) - self

    def __mul__(self, other):
        other = Coefficient.coerce(other)
        out = {}
        for (n1, e1), c1 in self._terms.items():
            for (n2, e2), c2 in other._terms.items():
                k = (n1 + n2, (e1 + e2) % 2)
                out[k] = out.get(k, 0) + c1 * c2
        return Coefficient(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Coefficient):
            try:
                other = Coefficient.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def has_eps(self) -> bool:
        return any(e for _, e in self._terms)

    def has_N(self) -> bool:
        return any(n for n, _ in self._terms)

    def bind(self, N=None, eps=None) -> "Coefficient":
        """Substitute a value for ``N`` and/or ``eps``; unbound symbols stay."""
        out = {}
        for (n, e), c in self._terms.items():
            if N is not None:
                c = c * Fraction(N) ** n
                n = 0
            if eps is not None and e:
                c = c * eps
                e = 0
            out[(n, e)] = out.get((n, e), 0) + c
        return Coefficient(out)

    def value(self, N=None, eps=None) -> Fraction:
        b = self.bind(N=N, eps=eps)
        if any(k != (0, 0) for k in b._terms):
            raise ValueError(f"coefficient {b} is not a constant after binding")
        return b._terms.get((0, 0), Fraction(0))

    # text

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (n, e) in sorted(self._terms, key=lambda k: (-k[0], -k[1])):
            c = self._terms[(n, e)]
            sym = []
            if n == 1:
                sym.append("N")
            elif n > 1:
                sym.append(f"N^{n}")
            if e:
                sym.append("eps")
            mag = abs(c)
            if sym and mag == 1:
                body = "*".join(sym)
            else:
                body = "*".join([str(mag)] + sym)
            parts.append(("-" if c < 0 else "+", body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for s, body in parts[1:]:
            out += f" {s} {body}"
        return out

    def __repr__(self):
        return f"Coefficient({str(self)!r})"

    _MONO = re.compile(r"^(?:(\d+(?:/\d+)?))?((?:\*?(?:N(?:\^\d+)?|eps))*)$")

    @classmethod
    def parse(cls, text: str) -> "Coefficient":
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty coefficient")
        if s[0] not in "+-":
            s = "+" + s
        out = cls()
        for sign, body in re.findall(r"([+-])([^+-]+)", s):
            m = cls._MONO.match(body)
            if not m or not body:
                raise ValueError(f"bad coefficient monomial {body!r}")
            c = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            n, e = 0, 0
            for tok in re.findall(r"N(?:\^\d+)?|eps", m.group(2)):
                if tok == "eps":
                    e += 1
                elif tok == "N":
                    n += 1
                else:
                    n += int(tok[2:])
            if sign == "-":
                c = -c
            out = out + cls({(n, e): c})
        return out
