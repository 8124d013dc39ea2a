"""Command-line entry point: run jobs, audit schemes, emit rate tables,
serve as a worker.

Every failure path prints a single machine-greppable line starting with
``smm-error:`` and exits nonzero (2 = missing input file, 3 = audit
budget exceeded, 4 = worker bind failure, 1 = anything else).  The
scheme is always chosen explicitly; the tool never downgrades between
security models on its own.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import audit as audit_mod
from . import harness, linalg, rates
from .errors import AuditBudgetError, SmmError
from .field import DEFAULT_MODULUS, PrimeField
from .schemes import (
    ALIGNED,
    FULLY_SECURE,
    ONE_SIDED,
    SchemePlan,
    plan_aligned_8_1,
    plan_fully_secure,
    plan_one_sided,
    plan_to_text,
    r_ceil,
    r_floor,
)

_SCHEME_ALIASES = {
    "one-sided": ONE_SIDED,
    "fully": FULLY_SECURE,
    "fully-secure": FULLY_SECURE,
    "aligned": ALIGNED,
}

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_MISSING_FILE = 2
EXIT_BUDGET = 3
EXIT_BIND = 4


class _CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_FAIL):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse that reports flag problems on the common error path."""

    def error(self, message):
        raise _CliError(message)


def _resolve_modulus(flag_value) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get("SMM_MODULUS")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise _CliError(f"SMM_MODULUS={env!r} is not an integer")
    return DEFAULT_MODULUS


def _read_matrix(path: str, binary: bool) -> linalg.FieldMatrix:
    p = Path(path)
    if not p.exists():
        raise _CliError(f"input file not found: {path}", EXIT_MISSING_FILE)
    if binary:
        m, offset = linalg.from_bytes(p.read_bytes())
        return m
    with p.open() as fh:
        return linalg.read_text(fh)


def _write_matrix(m: linalg.FieldMatrix, path: str, binary: bool):
    p = Path(path)
    if binary:
        p.write_bytes(linalg.to_bytes(m))
    else:
        with p.open("w") as fh:
            linalg.write_text(m, fh)


def _build_plan(scheme: str, n, ell, field: PrimeField, r_override,
                strict_paper_r: bool, audit_scale: bool = False) -> SchemePlan:
    kind = _SCHEME_ALIASES.get(scheme)
    if kind is None:
        raise _CliError(f"unknown scheme {scheme!r}")
    if kind == ONE_SIDED:
        if n is None or ell is None:
            raise _CliError("one-sided scheme needs -N and -l")
        return plan_one_sided(n, ell, field, allow_repeated_points=audit_scale)
    if kind == ALIGNED:
        if (n is not None and n != 8) or (ell is not None and ell != 1):
            raise _CliError("the aligned scheme is fixed at N=8, l=1")
        return plan_aligned_8_1(field, allow_repeated_points=audit_scale)
    if n is None or ell is None:
        raise _CliError("fully-secure scheme needs -N and -l")
    if r_override is None:
        rc, rf = r_ceil(n, ell), r_floor(n, ell)
        if rc != rf:
            msg = (f"split count ceil(sqrt(N))-l = {rc} needs {(rc + ell) ** 2} "
                   f"answers but N={n}; using feasible r={rf}")
            if strict_paper_r:
                raise _CliError(msg)
            print(f"smm-warning: {msg}", file=sys.stderr)
    return plan_fully_secure(n, ell, field, r_override=r_override,
                             allow_repeated_points=audit_scale)


# -- subcommands -------------------------------------------------------------


def cmd_run(args) -> int:
    field = PrimeField(_resolve_modulus(args.modulus))
    a = _read_matrix(args.a, args.binary)
    b = _read_matrix(args.b, args.binary)
    for name, m in (("A", a), ("B", b)):
        if m.field != field:
            raise _CliError(
                f"matrix {name} has modulus {m.field.modulus}, "
                f"job uses {field.modulus}"
            )
    plan = _build_plan(args.scheme, args.N, args.l, field, args.r,
                       args.strict_paper_r)
    job = harness.JobSpec(plan=plan, a=a, b=b, seed=args.seed)
    if args.registry:
        registry = harness.WorkerRegistry.from_file(args.registry)
        product, log = harness.run_distributed(job, registry)
    else:
        product, log = harness.run_local(job)
    _write_matrix(product, args.out, args.binary)
    if args.plan_out:
        Path(args.plan_out).write_text(plan_to_text(plan))
    sys.stdout.write(log.summary())
    return EXIT_OK


def _parse_shape(text: str) -> tuple[int, int]:
    try:
        r, c = text.lower().split("x")
        return int(r), int(c)
    except ValueError:
        raise _CliError(f"bad shape {text!r}, expected ROWSxCOLS")


def cmd_audit(args) -> int:
    field = PrimeField(_resolve_modulus(args.modulus))
    plan = _build_plan(args.scheme, args.N, args.l, field, None, False,
                       audit_scale=True)
    if args.a_shape:
        a_shape = _parse_shape(args.a_shape)
    else:
        a_shape = (plan.a_parts, 1)
    b_shape = None
    if plan.kind != ONE_SIDED:
        b_shape = _parse_shape(args.b_shape) if args.b_shape else (1, plan.b_parts)
    try:
        report = audit_mod.audit_plan(plan, a_shape, b_shape, budget=args.budget)
        boundary = audit_mod.audit_collusion_count_boundary(
            plan, a_shape, b_shape, budget=args.budget
        )
    except AuditBudgetError as exc:
        raise _CliError(
            f"{exc}; try --modulus 2 or 3 and 1x1 blocks", EXIT_BUDGET
        )
    text = report.to_text() + boundary.to_text()
    records = report.to_records() + boundary.to_records()
    Path(args.out).write_text(text + "\n" + records)
    sys.stdout.write(text)
    ok = report.passed() and boundary.passed()
    return EXIT_OK if ok else EXIT_FAIL


def cmd_rates(args) -> int:
    if (args.fix_l is None) == (args.fix_n is None):
        raise _CliError("choose exactly one of --fix-l or --fix-n")
    if args.fix_l is not None:
        if args.n_from is None or args.n_to is None:
            raise _CliError("--fix-l needs --n-from and --n-to")
        points = rates.sweep_table(rates.FIX_ELL, args.fix_l, args.n_from, args.n_to)
    else:
        if args.l_from is None or args.l_to is None:
            raise _CliError("--fix-n needs --l-from and --l-to")
        points = rates.sweep_table(rates.FIX_N, args.fix_n, args.l_from, args.l_to)
    csv = rates.to_csv(points)
    if args.out:
        Path(args.out).write_text(csv)
    else:
        sys.stdout.write(csv)
    return EXIT_OK


def cmd_worker(args) -> int:
    def job_log(line: str):
        print(line, flush=True)

    try:
        server = harness.WorkerServer(args.host, args.port, job_log=job_log)
    except OSError as exc:
        raise _CliError(f"cannot bind {args.host}:{args.port}: {exc}", EXIT_BIND)
    host, port = server.address
    print(f"listening on {host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="smm",
        description="Secure distributed matrix multiplication over prime fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="encode, dispatch, and decode one job")
    run.add_argument("--scheme", required=True,
                     choices=sorted(_SCHEME_ALIASES))
    run.add_argument("-N", type=int, help="number of servers")
    run.add_argument("-l", type=int, help="collusion bound")
    run.add_argument("--modulus", type=int, help="prime field modulus")
    run.add_argument("--a", required=True, help="matrix A file")
    run.add_argument("--b", required=True, help="matrix B file")
    run.add_argument("--out", default="product.txt", help="product output file")
    run.add_argument("--plan-out", help="also write the resolved plan record")
    run.add_argument("--seed", type=int, help="deterministic key generation")
    run.add_argument("--registry", help="worker registry file (host:port per line)")
    run.add_argument("--binary", action="store_true",
                     help="matrix files use the binary wire format")
    run.add_argument("--r", type=int, help="override the fully-secure split count")
    run.add_argument("--strict-paper-r", action="store_true",
                     help="error instead of falling back when "
                          "ceil(sqrt(N))-l is infeasible")
    run.set_defaults(func=cmd_run)

    aud = sub.add_parser("audit", help="exhaustive leakage audit at desk scale")
    aud.add_argument("--scheme", required=True, choices=sorted(_SCHEME_ALIASES))
    aud.add_argument("-N", type=int)
    aud.add_argument("-l", type=int)
    aud.add_argument("--modulus", type=int)
    aud.add_argument("--a-shape", help="A dims, e.g. 2x1 (default: blocks of 1x1)")
    aud.add_argument("--b-shape", help="B dims, e.g. 1x2")
    aud.add_argument("--budget", type=int, default=audit_mod.DEFAULT_BUDGET,
                     help="max enumerated states per collusion set")
    aud.add_argument("--out", default="audit_report.txt")
    aud.set_defaults(func=cmd_audit)

    rat = sub.add_parser("rates", help="rate/capacity comparison tables")
    rat.add_argument("--fix-l", type=int, help="fix l and sweep N")
    rat.add_argument("--n-from", type=int)
    rat.add_argument("--n-to", type=int)
    rat.add_argument("--fix-n", type=int, help="fix N and sweep l")
    rat.add_argument("--l-from", type=int)
    rat.add_argument("--l-to", type=int)
    rat.add_argument("--out", help="CSV output file (default stdout)")
    rat.set_defaults(func=cmd_rates)

    wrk = sub.add_parser("worker", help="serve the wire protocol")
    wrk.add_argument("--host", default="127.0.0.1")
    wrk.add_argument("--port", type=int, default=0)
    wrk.set_defaults(func=cmd_worker)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _CliError as exc:
        print(f"smm-error: {exc}", file=sys.stderr)
        return exc.code
    except (SmmError, ValueError, OSError) as exc:
        print(f"smm-error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
