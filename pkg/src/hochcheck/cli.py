"""Command-line entry point: ``hochcheck <command> [options]``.

Exit status: 0 when every check passed, 1 when a check failed, 2 on usage or
input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from . import linalg as la
from .expr import RuleSet, normalize
from .forms import (
    AsymmetricFormError,
    BilinearFormSpec,
    DegenerateFormError,
    NotSemisimpleError,
    read_matrix,
    total_pairing,
    verify_selfdual_equivalence,
)
from .hochschild import (
    DerivationCompatibilityError,
    boundary,
    build_cV,
    hh0_commutator_check,
    pairing_symbolic,
    verify_cycle,
)
from .numeric import DEFAULT_SAMPLES, DEFAULT_TOL, numeric_zero_check
from .report import VerificationReport, encode_value


class InputError(Exception):
    pass


def _positive_int(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _dimension(text):
    if text == "generic":
        return text
    try:
        return _positive_int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("N must be a positive integer or 'generic'") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hochcheck", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    concrete = argparse.ArgumentParser(add_help=False)
    concrete.add_argument("--E", dest="E", default="identity",
                          help="identity | symplectic | path to a JSON matrix file")
    concrete.add_argument("--N", type=_dimension, default=None)

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--samples", type=_positive_int, default=DEFAULT_SAMPLES)
    sampling.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sampling.add_argument("--seed", type=int, default=0)

    sub = p.add_subparsers(dest="command", required=True)
    vc = sub.add_parser("verify-cycle", parents=[common], help="symbolic check that b_3 c_V = 0")
    vc.add_argument("--epsilon", choices=("+1", "-1", "generic"), default="generic")
    vc.add_argument("--generic-E", action="store_true",
                    help="disable the symmetry rule and report the residual")
    vc.add_argument("--N", type=_dimension, default="generic")

    sub.add_parser("selfdual", parents=[common], help="replay the self-duality equivalence")

    pr = sub.add_parser("pair", parents=[common, concrete], help="cap pairing for three F matrices")
    pr.add_argument("--F", action="append", required=True, metavar="FILE",
                    help="matrix file; give exactly three times")

    sub.add_parser("casimir-pairing", parents=[common, concrete],
                   help="total pairing over the Casimir decomposition")

    hh = sub.add_parser("hh0", parents=[common, sampling], help="counit kills commutators")
    hh.add_argument("--N", type=_positive_int, default=3)

    nc = sub.add_parser("numeric-check", parents=[common, concrete, sampling],
                        help="floating-point falsification oracle")
    nc.add_argument("--target", choices=("cycle", "generic-residual"), default="cycle")
    nc.add_argument("--group", choices=("isometry", "general"), default="isometry")
    nc.add_argument("--expect", choices=("zero", "nonzero"), default=None)
    return p


def load_form(source: str, N) -> BilinearFormSpec:
    if N == "generic":
        raise InputError("this command needs a concrete N")
    if source == "identity":
        if N is None:
            raise InputError("--N is required with --E identity")
        return BilinearFormSpec.identity(N)
    if source == "symplectic":
        if N is None:
            raise InputError("--N is required with --E symplectic")
        if N % 2:
            raise InputError("--E symplectic requires even N")
        return BilinearFormSpec.symplectic(N)
    try:
        m = read_matrix(source)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read matrix file {source}: {exc}") from None
    if N is not None and m.shape[0] != N:
        raise InputError(f"matrix in {source} is {m.shape[0]}x{m.shape[0]}, but --N {N}")
    try:
        return BilinearFormSpec(m)
    except la.SingularMatrixError as exc:
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(f"{source}: {exc}") from None


def _failed(check, mode, exc, t0):
    return VerificationReport(check, mode, "failed", passed=False,
                              details={"diagnostic": str(exc)},
                              runtime_ms=(time.perf_counter() - t0) * 1000)


def run(args) -> list[VerificationReport]:
    cmd = args.command
    if cmd == "verify-cycle":
        return [verify_cycle("generic-E" if args.generic_E else args.epsilon)]
    if cmd == "selfdual":
        return [verify_selfdual_equivalence("forward"), verify_selfdual_equivalence("backward")]
    if cmd == "hh0":
        return [hh0_commutator_check(args.samples, args.N, args.seed)]

    form = load_form(args.E, args.N)
    if cmd == "pair":
        if len(args.F) != 3:
            raise InputError("pair needs exactly three --F files")
        Fs = []
        for path in args.F:
            try:
                Fs.append(read_matrix(path))
            except (OSError, ValueError) as exc:
                raise InputError(f"cannot read matrix file {path}: {exc}") from None
        t0 = time.perf_counter()
        try:
            val = pairing_symbolic(Fs, form)
        except DerivationCompatibilityError as exc:
            return [_failed("pair", f"N={form.N}", exc, t0)]
        oracle = -la.trace(Fs[0] @ Fs[1] @ Fs[2])
        ok = val == oracle
        return [VerificationReport("pair", f"N={form.N}", "passed" if ok else "failed", passed=ok,
                                   value=val, details={"minus_trace_F1F2F3": oracle},
                                   runtime_ms=(time.perf_counter() - t0) * 1000)]
    if cmd == "casimir-pairing":
        t0 = time.perf_counter()
        try:
            _, rep = total_pairing(form)
        except (NotSemisimpleError, DegenerateFormError, AsymmetricFormError) as exc:
            return [_failed("casimir-pairing", f"N={form.N}", exc, t0)]
        return [rep]
    if cmd == "numeric-check":
        b = boundary(build_cV())
        if args.target == "cycle":
            x, expect = b, args.expect or "zero"
        else:
            x, expect = normalize(b, RuleSet(subst=True)), args.expect or "nonzero"
        rep = numeric_zero_check(x, form, args.samples, args.tol, args.seed, group=args.group)
        rep.mode = f"{args.target}, N={form.N}, group={args.group}"
        rep.passed = (rep.status == "numerically-zero") == (expect == "zero")
        rep.details["expected"] = expect
        return [rep]
    raise InputError(f"unknown command {cmd}")


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("format",)}


def render_text(reports) -> str:
    lines = []
    for r in reports:
        tag = "PASS" if r.passed else "FAIL"
        line = f"[{tag}] {r.check} ({r.mode}): {r.status}"
        if r.value is not None:
            line += f"  value={encode_value(r.value)}"
        lines.append(line)
        if r.residual_form:
            lines.append(f"    residual: {r.residual_form}")
        for key in ("diagnostic", "verdict"):
            if key in r.details:
                lines.append(f"    {key}: {r.details[key]}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        reports = run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.format == "json":
        doc = {
            "tool_version": __version__,
            "command": args.command,
            "config": encode_value(_config(args)),
            "checks": [r.to_dict() for r in reports],
        }
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        print(render_text(reports))
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
