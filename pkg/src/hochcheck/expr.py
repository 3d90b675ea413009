"""Abstract-index noncommutative expressions over matrix coefficients.

Indices are either *free* (``str``; digit strings such as ``"1"`` stand for
concrete basis labels) or *summed* (``int``, Einstein convention: every summed
index occurs in exactly two slots of its term).

A term is ``coeff * scalars * (w_0 | w_1 | ... | w_d)``:

* ``scalars`` is a multiset of commuting atoms ``(kind, row, col)`` with kind
  ``d`` (Kronecker delta), ``E``, ``Einv`` (the bilinear form and its inverse)
  or ``F1``/``F2``/``F3`` (derivation matrices);
* each ``w_p`` is a word of letters ``("v", i, j)`` or ``("u", i, j)``, where
  ``u[i,j]`` is the antipode of ``v[i,j]``, i.e. the ``(i,j)`` entry of
  ``v^-1``. The empty word is the unit.

Textual grammar (used by ``render``/``parse``)::

    expr   := "0" | term (" + " term)*
    term   := ["sum{" idx ("," idx)* "} "] "(" coeff ")" (" * " atom)* " * " tensor
    tensor := factor (" | " factor)*
    factor := "1" | letter (" " letter)*
    atom   := ("d" | "E" | "Einv" | "F1" | "F2" | "F3") "[" idx "," idx "]"
    letter := ("v" | "u") "[" idx "," idx "]"
    idx    := "_" digits          (summed)
            | [A-Za-z0-9]+        (free)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .coeff import Coefficient

SCALAR_KINDS = ("d", "E", "Einv", "F1", "F2", "F3")
LETTER_KINDS = ("v", "u")
KIND_ORDER = {k: n for n, k in enumerate(SCALAR_KINDS + LETTER_KINDS)}
DER_KINDS = {1: "F1", 2: "F2", 3: "F3"}

MAX_STEPS = 100_000


class StructuralError(ValueError):
    """Malformed index structure (a summed index not occurring exactly twice)."""


# ---------------------------------------------------------------------------
# atoms and helpers


def v(i, j):
    return ("v", i, j)


def u(i, j):
    return ("u", i, j)


def delta(i, j):
    return ("d", i, j)


def E(i, j):
    return ("E", i, j)


def Einv(i, j):
    return ("Einv", i, j)


def F(slot, i, j):
    return (DER_KINDS[slot], i, j)


def _ikey(x):
    return (0, x) if isinstance(x, str) else (1, x)


def _akey(atom):
    return (KIND_ORDER[atom[0]], _ikey(atom[1]), _ikey(atom[2]))


def _is_concrete(x) -> bool:
    return isinstance(x, str) and x.isdigit()


@dataclass(frozen=True)
class RuleSet:
    """Which rewrite rule groups ``normalize`` may use.

    ``contract`` (delta elimination, antipode contraction, E*Einv contraction)
    is always on. ``sym`` treats ``E`` and ``Einv`` as eps-symmetric;
    ``epsilon`` optionally binds eps to +1 or -1.
    """

    subst: bool = False
    sym: bool = False
    colin: bool = False
    epsilon: int | None = None
    contract: bool = True

    def __post_init__(self):
        if not self.contract:
            raise ValueError("CONTRACT rules cannot be disabled")
        if self.epsilon not in (None, 1, -1):
            raise ValueError("epsilon must be None, +1 or -1")
        if self.sym and not self.subst and self.epsilon is None:
            raise ValueError("SYM requires SUBST or an explicit epsilon binding")


CONTRACT = RuleSet()


# ---------------------------------------------------------------------------
# terms


def _indices(scalars, factors):
    for _, r, c in scalars:
        yield r
        yield c
    for w in factors:
        for _, r, c in w:
            yield r
            yield c


def check_indices(scalars, factors):
    counts = {}
    for x in _indices(scalars, factors):
        if isinstance(x, int):
            counts[x] = counts.get(x, 0) + 1
        elif not isinstance(x, str):
            raise StructuralError(f"index {x!r} is neither free (str) nor summed (int)")
    bad = {k: n for k, n in counts.items() if n != 2}
    if bad:
        raise StructuralError(f"summed indices must occur exactly twice, got {bad}")


def _canonical(scalars, factors, sym):
    """Rename summed indices canonically.

    Letters fix names by first occurrence (factors left to right). Dummies
    living only in scalar atoms are named by a tie-branching search for the
    smallest sorted scalar tuple. Deltas are always unordered; under ``sym``
    ``E``/``Einv`` are reoriented too, each flip counted.

    Returns ``(scalars, factors, flips)``.
    """
    mapping = {}
    for w in factors:
        for _, r, c in w:
            for x in (r, c):
                if isinstance(x, int) and x not in mapping:
                    mapping[x] = len(mapping)

    def symmetric(kind):
        return kind == "d" or (sym and kind in ("E", "Einv"))

    def final(mp):
        out, flips = [], 0
        for kind, r, c in scalars:
            r2 = mp[r] if isinstance(r, int) else r
            c2 = mp[c] if isinstance(c, int) else c
            if symmetric(kind) and _ikey(c2) < _ikey(r2):
                r2, c2 = c2, r2
                if kind != "d":
                    flips += 1
            out.append((kind, r2, c2))
        out.sort(key=_akey)
        return tuple(out), flips

    if all(not isinstance(x, int) or x in mapping for x in _indices(scalars, ())):
        sc, flips = final(mapping)
    else:
        best = [None]

        def pkey(x, mp):
            if isinstance(x, int):
                return (1, mp[x]) if x in mp else (2, 0)
            return (0, x)

        def search(remaining, mp):
            if not remaining:
                sc, flips = final(mp)
                k = tuple(_akey(a) for a in sc)
                if best[0] is None or k < best[0][0]:
                    best[0] = (k, sc, flips)
                return
            opts = []
            for n, (kind, r, c) in enumerate(remaining):
                orients = [(r, c), (c, r)] if symmetric(kind) and r != c else [(r, c)]
                for rr, cc in orients:
                    opts.append(((KIND_ORDER[kind], pkey(rr, mp), pkey(cc, mp)), n, rr, cc))
            m = min(o[0] for o in opts)
            seen = set()
            for key, n, rr, cc in opts:
                if key != m:
                    continue
                mp2 = dict(mp)
                for x in (rr, cc):
                    if isinstance(x, int) and x not in mp2:
                        mp2[x] = len(mp2)
                sig = (n, tuple(sorted(mp2.items())))
                if sig in seen:
                    continue
                seen.add(sig)
                search(remaining[:n] + remaining[n + 1:], mp2)

        search(list(scalars), dict(mapping))
        _, sc, flips = best[0]

    fac = tuple(
        tuple((k, mapping.get(r, r), mapping.get(c, c)) for k, r, c in w) for w in factors
    )
    return sc, fac, flips


@dataclass(frozen=True)
class Term:
    coeff: Coefficient
    scalars: tuple
    factors: tuple

    @property
    def key(self):
        return (self.scalars, self.factors)

    @property
    def degree(self) -> int:
        return len(self.factors) - 1

    @property
    def dummies(self) -> list:
        return sorted({x for x in _indices(self.scalars, self.factors) if isinstance(x, int)})

    @property
    def free(self) -> list:
        seen = []
        for x in _indices(self.scalars, self.factors):
            if isinstance(x, str) and x not in seen:
                seen.append(x)
        return seen

    def has_letters(self) -> bool:
        return any(self.factors)


def make_term(coeff, scalars=(), factors=((),), summed=()) -> Term:
    """Build a term from named indices; names listed in ``summed`` become dummies."""
    if isinstance(summed, str):
        summed = tuple(summed)
    names = {name: n for n, name in enumerate(summed)}

    def idx(x):
        return names.get(x, x) if isinstance(x, str) else x

    sc = tuple((k, idx(r), idx(c)) for k, r, c in scalars)
    fac = tuple(tuple((k, idx(r), idx(c)) for k, r, c in w) for w in factors)
    for k, _, _ in sc:
        if k not in SCALAR_KINDS:
            raise StructuralError(f"unknown scalar atom {k!r}")
    for w in fac:
        for k, _, _ in w:
            if k not in LETTER_KINDS:
                raise StructuralError(f"unknown letter {k!r}")
    return Term(Coefficient.coerce(coeff), sc, fac)


# ---------------------------------------------------------------------------
# expressions


class Expr:
    """Formal linear combination of canonical terms sharing one degree.

    Degree 0 expressions are algebra elements; degree ``n`` expressions are
    Hochschild ``n``-chains (``n + 1`` tensor factors).
    """

    __slots__ = ("degree", "_terms")

    def __init__(self, degree=0, terms=None):
        self.degree = degree
        self._terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def from_terms(cls, terms: Iterable[Term], degree=None, sym=False) -> "Expr":
        acc = {}
        for t in terms:
            if degree is None:
                degree = t.degree
            if t.degree != degree:
                raise StructuralError(f"term of degree {t.degree} in a degree {degree} sum")
            check_indices(t.scalars, t.factors)
            sc, fac, flips = _canonical(t.scalars, t.factors, sym)
            c = t.coeff * (Coefficient.eps() if flips % 2 else 1)
            acc[(sc, fac)] = acc.get((sc, fac), Coefficient()) + c
        return cls(0 if degree is None else degree, acc)

    @classmethod
    def zero(cls, degree=0) -> "Expr":
        return cls(degree)

    @classmethod
    def one(cls, coeff=1) -> "Expr":
        return cls.from_terms([make_term(coeff)])

    def terms(self) -> list[Term]:
        return [Term(c, sc, fac) for (sc, fac), c in self._items()]

    def _items(self):
        return sorted(self._terms.items(), key=lambda kv: _term_sort_key(kv[0]))

    def __iter__(self):
        return iter(self.terms())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def _check(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        if other.degree != self.degree:
            raise StructuralError("cannot add expressions of different degree")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, Coefficient()) + c
        return Expr(self.degree, acc)

    def __neg__(self):
        return Expr(self.degree, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Expr":
        c = Coefficient.coerce(c)
        return Expr(self.degree, {k: v * c for k, v in self._terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, Expr):
            return NotImplemented
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self):
        return hash((self.degree, frozenset(self._terms.items())))

    def has_letters(self) -> bool:
        return any(any(fac) for _, fac in self._terms)

    def free_indices(self) -> set:
        out = set()
        for t in self.terms():
            out.update(t.free)
        return out

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Expr(degree={self.degree}, {render(self)!r})"


def _term_sort_key(key):
    sc, fac = key
    return (
        tuple(tuple(_akey(a) for a in w) for w in fac),
        tuple(_akey(a) for a in sc),
    )


def expr(*terms: Term) -> Expr:
    return Expr.from_terms(terms)


# ---------------------------------------------------------------------------
# rendering and parsing


def _iname(x):
    return f"_{x}" if isinstance(x, int) else x


def render_term(t: Term) -> str:
    out = ""
    if t.dummies:
        out += "sum{" + ",".join(_iname(d) for d in t.dummies) + "} "
    out += f"({t.coeff})"
    for k, r, c in t.scalars:
        out += f" * {k}[{_iname(r)},{_iname(c)}]"
    facs = []
    for w in t.factors:
        facs.append(" ".join(f"{k}[{_iname(r)},{_iname(c)}]" for k, r, c in w) or "1")
    return out + " * " + " | ".join(facs)


def render(x: Expr) -> str:
    if x.is_zero():
        return "0"
    return " + ".join(render_term(t) for t in x.terms())


_ATOM = re.compile(r"^(d|E|Einv|F1|F2|F3|v|u)\[([A-Za-z0-9_]+),([A-Za-z0-9_]+)\]$")


def _pidx(s):
    return int(s[1:]) if s.startswith("_") else s


def _parse_atom(s):
    m = _ATOM.match(s.strip())
    if not m:
        raise ValueError(f"bad atom {s!r}")
    return (m.group(1), _pidx(m.group(2)), _pidx(m.group(3)))


def parse_term(text: str) -> Term:
    s = text.strip()
    if s.startswith("sum{"):
        s = s[s.index("}") + 1:].strip()
    if not s.startswith("("):
        raise ValueError(f"term must start with a coefficient: {text!r}")
    close = s.index(")")
    coeff = Coefficient.parse(s[1:close])
    parts = [p.strip() for p in s[close + 1:].split(" * ")]
    if parts[0]:
        raise ValueError(f"bad term {text!r}")
    parts = parts[1:]
    if not parts:
        raise ValueError(f"term has no tensor part: {text!r}")
    scalars = tuple(_parse_atom(p) for p in parts[:-1])
    factors = []
    for f in parts[-1].split(" | "):
        f = f.strip()
        factors.append(() if f == "1" else tuple(_parse_atom(a) for a in f.split()))
    for k, _, _ in scalars:
        if k not in SCALAR_KINDS:
            raise ValueError(f"{k!r} is not a scalar atom")
    for w in factors:
        for k, _, _ in w:
            if k not in LETTER_KINDS:
                raise ValueError(f"{k!r} is not a letter")
    return Term(coeff, scalars, tuple(factors))


def parse(text: str, degree=None, sym=False) -> Expr:
    s = text.strip()
    if s == "0":
        return Expr.zero(degree or 0)
    chunks = re.split(r"\s\+\s(?=sum\{|\()", s)
    return Expr.from_terms([parse_term(c) for c in chunks], degree=degree, sym=sym)


# ---------------------------------------------------------------------------
# rewriting


class _Work:
    __slots__ = ("coeff", "scalars", "factors", "zero", "fresh")

    def __init__(self, t: Term):
        self.coeff = t.coeff
        self.scalars = list(t.scalars)
        self.factors = [list(w) for w in t.factors]
        self.zero = False
        ints = [x for x in _indices(t.scalars, t.factors) if isinstance(x, int)]
        self.fresh = max(ints, default=-1) + 1

    def new(self):
        self.fresh += 1
        return self.fresh - 1

    def replace(self, old, new):
        """Replace the (single remaining) occurrence of summed index ``old``."""

        def sub(a):
            k, r, c = a
            return (k, new if r == old else r, new if c == old else c)

        self.scalars = [sub(a) for a in self.scalars]
        self.factors = [[sub(a) for a in w] for w in self.factors]


def _r1_delta(w: _Work) -> bool:
    for n, (k, r, c) in enumerate(w.scalars):
        if k != "d":
            continue
        if r == c:
            del w.scalars[n]
            if isinstance(r, int):
                w.coeff = w.coeff * Coefficient.N()
            return True
        if isinstance(r, int) or isinstance(c, int):
            old, new = (r, c) if isinstance(r, int) else (c, r)
            del w.scalars[n]
            w.replace(old, new)
            return True
        if _is_concrete(r) and _is_concrete(c):
            w.zero = True
            return True
    return False


def _r3_form(w: _Work, sym: bool) -> bool:
    sc = w.scalars
    for a, (ka, ra, ca) in enumerate(sc):
        if ka != "E":
            continue
        for b, (kb, rb, cb) in enumerate(sc):
            if kb != "Einv":
                continue
            hit = None
            if isinstance(ca, int) and ca == rb:
                hit = (ra, cb, 0)
            elif isinstance(ra, int) and ra == cb:
                hit = (rb, ca, 0)
            elif sym and isinstance(ra, int) and ra == rb:
                hit = (ca, cb, 1)
            elif sym and isinstance(ca, int) and ca == cb:
                hit = (ra, rb, 1)
            if hit is None:
                continue
            x, y, flip = hit
            for n in sorted((a, b), reverse=True):
                del sc[n]
            sc.append(("d", x, y))
            if flip:
                w.coeff = w.coeff * Coefficient.eps()
            return True
    return False


def _r2_antipode(w: _Work) -> bool:
    for word in w.factors:
        for p in range(len(word) - 1):
            (ka, ra, ca), (kb, rb, cb) = word[p], word[p + 1]
            if ka != kb and isinstance(ca, int) and ca == rb:
                del word[p:p + 2]
                w.scalars.append(("d", ra, cb))
                return True
    return False


def _r6_colinear(w: _Work, sym: bool) -> bool:
    for word in w.factors:
        for p in range(len(word) - 1):
            (ka, i, j), (kb, r, s) = word[p], word[p + 1]
            if ka != "v" or kb != "v" or not (isinstance(i, int) and isinstance(r, int)):
                continue
            for n, (k, x, y) in enumerate(w.scalars):
                if k != "E":
                    continue
                if (x, y) == (i, r):
                    flip = 0
                elif sym and (x, y) == (r, i):
                    flip = 1
                else:
                    continue
                del word[p:p + 2]
                del w.scalars[n]
                w.scalars.append(("E", j, s))
                if flip:
                    w.coeff = w.coeff * Coefficient.eps()
                return True
    return False


def _r4_subst(w: _Work) -> bool:
    for word in w.factors:
        for p, (k, i, j) in enumerate(word):
            if k != "u":
                continue
            kk, ll = w.new(), w.new()
            word[p] = ("v", ll, kk)
            w.scalars.append(("Einv", i, kk))
            w.scalars.append(("E", ll, j))
            return True
    return False


def reduce_term(t: Term, rules: RuleSet = CONTRACT):
    """Rewrite one term to a fixed point of ``rules``.

    Returns ``(term or None, steps)``; ``None`` means the term vanished.
    """
    check_indices(t.scalars, t.factors)
    w = _Work(t)
    steps = 0
    while True:
        changed = (
            _r1_delta(w)
            or _r3_form(w, rules.sym)
            or _r2_antipode(w)
            or (rules.colin and _r6_colinear(w, rules.sym))
            or (rules.subst and _r4_subst(w))
        )
        if w.zero:
            return None, steps + 1
        if not changed:
            break
        steps += 1
        if steps > MAX_STEPS:
            raise RuntimeError("rewrite step bound exceeded")
    coeff = w.coeff
    if rules.epsilon is not None:
        coeff = coeff.bind(eps=rules.epsilon)
    return Term(coeff, tuple(w.scalars), tuple(tuple(x) for x in w.factors)), steps


def normalize(x, rules: RuleSet = CONTRACT) -> Expr:
    """Canonical fixed point of the enabled rewrite rules."""
    if isinstance(x, Term):
        x = Expr(x.degree, {}) + _single(x)
    acc = {}
    for t in x.terms():
        r, _ = reduce_term(t, rules)
        if r is None or not r.coeff:
            continue
        sc, fac, flips = _canonical(r.scalars, r.factors, rules.sym)
        c = r.coeff
        if flips % 2:
            c = c * (rules.epsilon if rules.epsilon is not None else Coefficient.eps())
        acc[(sc, fac)] = acc.get((sc, fac), Coefficient()) + c
    return Expr(x.degree, acc)


def _single(t: Term) -> Expr:
    check_indices(t.scalars, t.factors)
    return Expr(t.degree, {(t.scalars, t.factors): t.coeff})


# ---------------------------------------------------------------------------
# algebra operations


def _shift(t: Term, offset: int, summed: dict):
    def idx(x):
        if isinstance(x, int):
            return x + offset
        return summed.get(x, x)

    sc = tuple((k, idx(r), idx(c)) for k, r, c in t.scalars)
    fac = tuple(tuple((k, idx(r), idx(c)) for k, r, c in w) for w in t.factors)
    return sc, fac


def multiply(x: Expr, y: Expr, summed=()) -> Expr:
    """Product in the algebra; free names in ``summed`` are contracted between x and y."""
    if x.degree or y.degree:
        raise StructuralError("multiply is defined on degree 0 expressions")
    if isinstance(summed, str):
        summed = tuple(summed)
    out = []
    for a in x.terms():
        top = max(a.dummies, default=-1) + 1
        names = {s: top + n for n, s in enumerate(summed)}
        sa, fa = _shift(a, 0, names)
        for b in y.terms():
            sb, fb = _shift(b, top + len(summed), names)
            out.append(Term(a.coeff * b.coeff, sa + sb, (fa[0] + fb[0],)))
    return normalize(Expr.from_terms(out, degree=0), CONTRACT)


def counit(x: Expr) -> Expr:
    """Apply the counit: every letter ``v[i,j]`` / ``u[i,j]`` becomes ``d[i,j]``."""
    if x.degree:
        raise StructuralError("counit is defined on degree 0 expressions")
    out = []
    for t in x.terms():
        deltas = tuple(("d", r, c) for w in t.factors for _, r, c in w)
        out.append(Term(t.coeff, t.scalars + deltas, ((),)))
    return normalize(Expr.from_terms(out, degree=0), CONTRACT)


def specialize_identity(x: Expr) -> Expr:
    """Set ``E = Einv = I`` (the orthogonal case)."""
    out = []
    for t in x.terms():
        sc = tuple(("d", r, c) if k in ("E", "Einv") else (k, r, c) for k, r, c in t.scalars)
        out.append(Term(t.coeff, sc, t.factors))
    return normalize(Expr.from_terms(out, degree=x.degree), CONTRACT)


# ---------------------------------------------------------------------------
# grounding


def contract_term(t: Term, operand, N: int, free_values=None, dtype=object):
    """Einstein-sum one term (coefficient excluded).

    ``operand(atom, factor_position)`` returns the matrix standing for a scalar
    atom (``factor_position is None``) or a letter. Free indices are fixed by
    ``free_values`` or, for digit names, by their 1-based value.
    """
    labels = {}

    def lab(x):
        if x not in labels:
            labels[x] = len(labels)
        return labels[x]

    ops = []
    for atom in t.scalars:
        ops += [operand(atom, None), [lab(atom[1]), lab(atom[2])]]
    for pos, w in enumerate(t.factors):
        for atom in w:
            ops += [operand(atom, pos), [lab(atom[1]), lab(atom[2])]]
    for x in list(labels):
        if isinstance(x, str):
            if free_values and x in free_values:
                val = free_values[x]
            elif _is_concrete(x):
                val = int(x) - 1
            else:
                raise ValueError(f"free index {x!r} has no value")
            if not 0 <= val < N:
                raise ValueError(f"index value {x}={val + 1} outside 1..{N}")
            e = np.zeros(N, dtype=dtype)
            e[val] = 1
            ops += [e, [labels[x]]]
    if not ops:
        return dtype(1) if dtype is not object else Fraction(1)
    optimize = "greedy" if dtype is not object else False
    return np.einsum(*ops, [], optimize=optimize)


def as_fraction_matrix(m) -> np.ndarray:
    arr = np.array(m, dtype=object)
    if arr.ndim != 2:
        raise ValueError("expected a matrix")
    out = np.empty(arr.shape, dtype=object)
    for idx, val in np.ndenumerate(arr):
        if isinstance(val, float):
            raise TypeError("exact evaluation does not accept floats")
        out[idx] = Fraction(val)
    return out


def detect_epsilon(E) -> int | None:
    Em = np.asarray(E, dtype=object)
    if (Em.T == Em).all():
        return 1
    if (Em.T == -Em).all():
        return -1
    return None


def evaluate_scalar_network(x: Expr, bindings: dict, N: int, free_values=None) -> Fraction:
    """Exact value of a letter-free expression under concrete matrix bindings.

    ``bindings`` maps ``"E"``, ``"Einv"``, ``"F1"``.. ``"F3"`` to exact rational
    matrices; ``"eps"`` optionally fixes eps (otherwise it is read off ``E``).
    """
    if x.degree:
        raise StructuralError("scalar networks have degree 0")
    if x.has_letters():
        raise StructuralError("scalar network contains letters; apply counit first")
    mats = {k: as_fraction_matrix(m) for k, m in bindings.items() if k != "eps"}
    for k, m in mats.items():
        if k not in SCALAR_KINDS[1:]:
            raise ValueError(f"unknown binding {k!r}")
        if m.shape != (N, N):
            raise ValueError(f"binding {k} has shape {m.shape}, expected {(N, N)}")
    if "E" in mats and "Einv" in mats:
        if not ((mats["E"] @ mats["Einv"]) == np.identity(N, dtype=int)).all():
            raise ValueError("binding for Einv is not the inverse of E")
    eps = bindings.get("eps")
    if eps is None and "E" in mats:
        eps = detect_epsilon(mats["E"])
    ident = np.array([[Fraction(int(a == b)) for b in range(N)] for a in range(N)], dtype=object)

    def operand(atom, _pos):
        k = atom[0]
        if k == "d":
            return ident
        if k not in mats:
            raise ValueError(f"no binding for atom kind {k!r}")
        return mats[k]

    total = Fraction(0)
    for t in x.terms():
        c = t.coeff.value(N=N, eps=eps) if t.coeff.has_eps() else t.coeff.value(N=N)
        if not c:
            continue
        if free_values is None:
            for name in t.free:
                if not _is_concrete(name):
                    raise ValueError(f"free index {name!r} present; network is not closed")
        total += c * Fraction(contract_term(t, operand, N, free_values))
    return total
