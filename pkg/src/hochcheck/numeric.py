"""Floating-point grounding at points of the isometry group of E.

A point ``g`` sends ``v[i,j] -> g[i,j]`` and ``u[i,j] -> (g^-1)[i,j]``. A chain
of degree ``n`` is evaluated through one point per tensor factor, which is a
linear functional on ``A^(n+1)``; a single shared point is also accepted.
Nothing here is ever reported as a proof.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .expr import Expr, contract_term
from .forms import BilinearFormSpec, so_E_basis
from .report import VerificationReport

DEFAULT_TOL = 1e-9
DEFAULT_SAMPLES = 100


@dataclass(frozen=True)
class GroupPoint:
    g: np.ndarray
    ginv: np.ndarray
    form: BilinearFormSpec
    residual: float


def _as_form(E_) -> BilinearFormSpec:
    return E_ if isinstance(E_, BilinearFormSpec) else BilinearFormSpec(E_)


def _float(m) -> np.ndarray:
    return np.array(m, dtype=float)


def _so_float_basis(form):
    return [_float(b) for b in so_E_basis(form).basis]


def random_group_point(E_, seed, basis=None, group="isometry") -> GroupPoint:
    """``g = exp(tF)`` for random ``F`` and ``t`` in [-1, 1].

    ``group="isometry"`` draws ``F`` from so(E); ``group="general"`` draws it
    from all of gl(N), i.e. evaluates in the coordinate ring of GL(N), where
    no self-duality relation holds.
    """
    form = _as_form(E_)
    N = form.N
    rng = np.random.default_rng(seed)
    Einv = _float(form.inverse)
    if group == "general":
        X = rng.normal(size=(N, N))
        g = scipy.linalg.expm(rng.uniform(-1.0, 1.0) * X / np.abs(X).max())
        residual = float(np.abs(g @ Einv @ g.T - Einv).max())
        return GroupPoint(g, np.linalg.inv(g), form, residual)
    if group != "isometry":
        raise ValueError("group must be 'isometry' or 'general'")
    if basis is None:
        basis = _so_float_basis(form)
    if basis:
        F = sum(c * b for c, b in zip(rng.normal(size=len(basis)), basis))
        F = F / max(np.abs(F).max(), 1e-300)
        g = scipy.linalg.expm(rng.uniform(-1.0, 1.0) * F)
    else:
        g = np.eye(N)
    residual = float(np.abs(g @ Einv @ g.T - Einv).max())
    if residual >= 1e-10:
        raise ArithmeticError(f"group point drifted off the isometry group: {residual:.3e}")
    return GroupPoint(g, np.linalg.inv(g), form, residual)


def evaluate_chain(x: Expr, points, bindings=None, free_values=None) -> float:
    """Evaluate a closed chain; ``points`` is one GroupPoint or one per factor."""
    bindings = dict(bindings or {})
    if isinstance(points, GroupPoint):
        points = [points] * (x.degree + 1)
    points = list(points)
    if len(points) != x.degree + 1:
        raise ValueError(f"need {x.degree + 1} group points, got {len(points)}")
    form = points[0].form
    N = form.N
    mats = {"d": np.eye(N), "E": _float(form.matrix), "Einv": _float(form.inverse)}
    for k, m in bindings.items():
        if k == "eps":
            continue
        mats[k] = _float(m)
        if mats[k].shape != (N, N):
            raise ValueError(f"binding {k} has the wrong shape")
    eps = bindings.get("eps", form.epsilon)

    def operand(atom, pos):
        k = atom[0]
        if pos is not None:
            p = points[pos]
            return p.g if k == "v" else p.ginv
        if k not in mats:
            raise ValueError(f"no binding for atom kind {k!r}")
        return mats[k]

    total = 0.0
    for t in x.terms():
        if t.coeff.has_eps() and eps is None:
            raise ValueError("coefficient involves eps but E has no symmetry")
        c = float(t.coeff.value(N=N, eps=eps))
        if free_values is None:
            for name in t.free:
                if not name.isdigit():
                    raise ValueError(f"free index {name!r} present; expression is not closed")
        total += c * float(contract_term(t, operand, N, free_values, dtype=float))
    return total


def sample_points(E_, count: int, seed: int, group="isometry"):
    """Deterministic stream of points, one child seed per point."""
    form = _as_form(E_)
    basis = _so_float_basis(form) if group == "isometry" else None
    seqs = np.random.SeedSequence(seed).spawn(count)
    return [random_group_point(form, s, basis, group) for s in seqs]


def numeric_zero_check(x: Expr, E_, samples=DEFAULT_SAMPLES, tol=DEFAULT_TOL, seed=0,
                       bindings=None, group="isometry") -> VerificationReport:
    """Falsification oracle: evaluate at independent points per tensor factor."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    t0 = time.perf_counter()
    form = _as_form(E_)
    k = x.degree + 1
    pts = sample_points(form, samples * k, seed, group)
    values = []
    for s in range(samples):
        values.append(evaluate_chain(x, pts[s * k:(s + 1) * k], bindings))
    residuals = [abs(val) for val in values]
    worst = int(np.argmax(residuals))
    if residuals[worst] < tol:
        rep = VerificationReport("numeric-check", f"N={form.N}", "numerically-zero",
                                 value=residuals[worst])
    else:
        rep = VerificationReport(
            "numeric-check", f"N={form.N}", "nonzero-witness", passed=False, value=values[worst],
            witnesses=[{
                "sample": worst,
                "value": values[worst],
                "points": [p.g for p in pts[worst * k:(worst + 1) * k]],
            }],
        )
    rep.details = {"samples": samples, "tol": tol, "seed": seed, "group": group,
                   "max_residuals": residuals}
    rep.runtime_ms = (time.perf_counter() - t0) * 1000
    return rep
