"""Random generators shared by the property tests."""

import random
from fractions import Fraction

import numpy as np

from hochcheck.coeff import Coefficient
from hochcheck.expr import Expr, Term
from hochcheck.forms import BilinearFormSpec, so_E_basis
from hochcheck import linalg as la

FREE_NAMES = ("a", "b", "c", "1", "2")


def _motif(rng, scalar_kinds, letters_only):
    """One small building block; ``None`` marks a slot still to be filled."""
    k = "#"  # placeholder for a fresh shared dummy
    choices = ["letter", "letter", "pair"]
    if not letters_only:
        choices += ["scalar", "scalar", "formpair", "colin"]
    kind = rng.choice(choices)
    if kind == "letter":
        return [], [(rng.choice("vu"), None, None)]
    if kind == "pair":
        a, b = rng.choice([("u", "v"), ("v", "u")])
        return [], [(a, None, k), (b, k, None)]
    if kind == "scalar":
        return [(rng.choice(scalar_kinds), None, None)], []
    if kind == "formpair":
        x = ("E", None, k) if rng.random() < 0.5 else ("E", k, None)
        y = ("Einv", k, None) if rng.random() < 0.5 else ("Einv", None, k)
        return [x, y], []
    return [("E", k, "#2")], [("v", k, None), ("v", "#2", None)]


def random_term(rng, degree=0, max_motifs=4, closed=False, letters_only=False,
                scalar_kinds=("d", "E", "Einv", "F1", "F2", "F3"), coeff=None):
    scalars, factors = [], [[] for _ in range(degree + 1)]
    fresh = 0
    for _ in range(rng.randint(0, max_motifs)):
        sc, lets = _motif(rng, scalar_kinds, letters_only)
        names = {"#": fresh, "#2": fresh + 1}
        fresh += 2

        def sub(a):
            return (a[0],) + tuple(names.get(x, x) if isinstance(x, str) else x for x in a[1:])

        scalars += [sub(a) for a in sc]
        pos = rng.randrange(degree + 1)
        w = factors[pos]
        at = rng.randint(0, len(w))
        factors[pos] = w[:at] + [sub(a) for a in lets] + w[at:]
    # fill open slots
    slots = []
    for n, (kk, r, c) in enumerate(scalars):
        slots += [("s", n, 1)] if r is None else []
        slots += [("s", n, 2)] if c is None else []
    for p, w in enumerate(factors):
        for n, (kk, r, c) in enumerate(w):
            slots += [("f", (p, n), 1)] if r is None else []
            slots += [("f", (p, n), 2)] if c is None else []
    rng.shuffle(slots)
    fill = {}
    if closed:
        if len(slots) % 2:
            return random_term(rng, degree, max_motifs, closed, letters_only, scalar_kinds, coeff)
        for a, b in zip(slots[::2], slots[1::2]):
            fill[a] = fill[b] = fresh
            fresh += 1
    else:
        n_pairs = rng.randint(0, len(slots) // 2)
        for m in range(n_pairs):
            fill[slots[2 * m]] = fill[slots[2 * m + 1]] = fresh
            fresh += 1
        for s in slots[2 * n_pairs:]:
            fill[s] = rng.choice(FREE_NAMES)

    def done(a, key):
        kk, r, c = a
        return (kk, fill.get(key + (1,), r), fill.get(key + (2,), c))

    sc = tuple(done(a, ("s", n)) for n, a in enumerate(scalars))
    fac = tuple(tuple(done(a, ("f", (p, n))) for n, a in enumerate(w)) for p, w in enumerate(factors))
    if coeff is None:
        coeff = Coefficient.const(Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 3)))
    return Term(coeff, sc, fac)


def random_expr(rng, degree=0, terms=3, **kw) -> Expr:
    return Expr.from_terms([random_term(rng, degree, **kw) for _ in range(rng.randint(1, terms))],
                           degree=degree)


def random_form(rng, N) -> BilinearFormSpec:
    """Identity, standard symplectic (even N) or a random invertible symmetric form."""
    options = ["I", "S"] + (["J"] if N % 2 == 0 else [])
    pick = rng.choice(options)
    if pick == "I":
        return BilinearFormSpec.identity(N)
    if pick == "J":
        return BilinearFormSpec.symplectic(N)
    while True:
        A = [[rng.randint(-2, 2) for _ in range(N)] for _ in range(N)]
        S = [[A[i][j] + A[j][i] + (3 if i == j else 0) for j in range(N)] for i in range(N)]
        try:
            return BilinearFormSpec(S)
        except la.SingularMatrixError:
            continue


def random_so(rng, form, basis=None):
    """Random integer combination of an so(E) basis, exact."""
    if basis is None:
        basis = so_E_basis(form).basis
    N = form.N
    out = la.zeros((N, N))
    for b in basis:
        out = out + Fraction(rng.randint(-3, 3)) * b
    return out


def to_float(m):
    return np.array(m, dtype=float)
