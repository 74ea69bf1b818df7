"""Command-line interface: height jobs, certificate verification, the
rational-double-point table harness, family strata, and batch runs.

Exit codes: 0 for every computed verdict (including Infinite and a failed
verification, which are answers), 2 when the Groebner step budget aborts a
computation, 1 for input errors (bad polynomials, bad primes, bad files).
The rdp-table command additionally exits 1 when a computed height disagrees
with the expected closed form.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .rings import (
    Grading,
    HomogeneityError,
    ParseError,
    Polynomial,
    PolynomialRing,
    PrimeField,
    RingError,
    check_homogeneous,
)
from .groebner import Budget, BudgetExceededError, Ideal
from .criteria import (
    FINITE,
    INFINITE,
    UNKNOWN,
    certificate_to_json,
    enclosure_closure,
    fedder_fsplit,
    height,
    qfs_decide,
    product_witness,
    result_to_json,
    verify_certificate,
    verify_infinity_certificate,
    verify_witness_chain,
)
from .criteria import height_graded_cy
from .strata import FamilyContext, search_height, strata_polynomials


class InputError(Exception):
    """User-facing input problem; maps to exit code 1."""


@dataclass
class Job:
    """One validated unit of work."""

    command: str
    p: int
    variables: tuple[str, ...]
    polynomials: tuple[str, ...] = ()
    grading: Optional[Grading] = None
    options: dict[str, Any] = field(default_factory=dict)

    def ring(self) -> PolynomialRing:
        return PolynomialRing(PrimeField(self.p), self.variables)

    def parsed(self) -> list[Polynomial]:
        ring = self.ring()
        out = []
        for text in self.polynomials:
            try:
                out.append(ring.parse(text))
            except ParseError as exc:
                raise InputError(f"bad polynomial {text!r}: {exc}") from exc
        if self.grading is not None:
            for f in out:
                try:
                    check_homogeneous(f, self.grading)
                except HomogeneityError as exc:
                    raise InputError(str(exc)) from exc
        return out


def _require_prime(p: int) -> int:
    if p < 2 or any(p % d == 0 for d in range(2, int(math.isqrt(p)) + 1)):
        raise InputError(f"{p} is not prime")
    return p


def _split_polys(chunks: Sequence[str]) -> tuple[str, ...]:
    out = []
    for chunk in chunks:
        out.extend(s.strip() for s in chunk.split(";") if s.strip())
    return tuple(out)


def parse_grading(text: str, nvars: int) -> Grading:
    """Rows separated by '|' or ';', entries by commas."""
    rows = []
    for row in text.replace("|", ";").split(";"):
        row = row.strip()
        if not row:
            continue
        try:
            rows.append(tuple(int(v) for v in row.split(",")))
        except ValueError as exc:
            raise InputError(f"bad grading row {row!r}") from exc
    if not rows:
        raise InputError("empty grading")
    for r in rows:
        if len(r) != nvars:
            raise InputError(
                f"grading row has {len(r)} entries for {nvars} variables"
            )
    return Grading(tuple(rows))


def _auto_n_max(polys: Sequence[Polynomial]) -> int:
    # chain length grows like log2 of the degree in the worst families seen
    deg = max((f.total_degree() for f in polys if f), default=1)
    return max(10, deg.bit_length() + 2)


def _budget(args) -> Budget:
    limit = getattr(args, "budget", None)
    return Budget(limit) if limit else Budget()


def _job_from_args(args, command: str) -> Job:
    p = _require_prime(args.p)
    variables = tuple(v.strip() for v in args.vars.split(",") if v.strip())
    if len(set(variables)) != len(variables) or not variables:
        raise InputError(f"bad variable list {args.vars!r}")
    polys = _split_polys(args.poly or [])
    grading = None
    if getattr(args, "weights", None):
        grading = parse_grading(args.weights, len(variables))
    if getattr(args, "grading", None):
        grading = parse_grading(args.grading, len(variables))
    options = {
        "n_max": getattr(args, "n_max", None),
        "budget": getattr(args, "budget", None),
        "verify": bool(getattr(args, "verify", False)),
        "strategy": getattr(args, "strategy", "auto"),
    }
    return Job(command, p, variables, polys, grading, options)


def _regular_sequence_caveat(job: Job) -> None:
    if len(job.polynomials) > 1:
        print(
            "note: generators are assumed to form a regular sequence; "
            "this is not verified.",
            file=sys.stderr,
        )


# ---------------------------------------------------------------------------
# command handlers: each returns (payload, exit_code)
# ---------------------------------------------------------------------------


def _run_height(job: Job) -> tuple[dict, int]:
    polys = job.parsed()
    if not polys:
        raise InputError("height needs at least one polynomial")
    _regular_sequence_caveat(job)
    n_max = job.options.get("n_max") or _auto_n_max(polys)
    budget = Budget(job.options.get("budget")) if job.options.get("budget") else Budget()
    res = height(
        polys,
        grading=job.grading,
        n_max=n_max,
        strategy=job.options.get("strategy", "auto"),
        budget=budget,
    )
    payload = result_to_json(res)
    code = 2 if res.verdict == UNKNOWN else 0
    if job.options.get("verify") and res.certificate is not None and code == 0:
        reasons: list[str] = []
        ok = verify_certificate(
            Ideal(polys[0].ring, polys), res.certificate,
            grading=job.grading, reasons=reasons,
        )
        payload["verified"] = ok
        if reasons:
            payload["verify_reasons"] = reasons
    return payload, code


def _run_fsplit(job: Job) -> tuple[dict, int]:
    polys = job.parsed()
    if not polys:
        raise InputError("fsplit needs at least one polynomial")
    _regular_sequence_caveat(job)
    return {"fsplit": fedder_fsplit(polys)}, 0


def _run_qfs(job: Job) -> tuple[dict, int]:
    polys = job.parsed()
    if not polys:
        raise InputError("qfs needs at least one polynomial")
    _regular_sequence_caveat(job)
    budget = Budget(job.options.get("budget")) if job.options.get("budget") else Budget()
    I = Ideal(polys[0].ring, polys)
    is_qfs, cert = qfs_decide(I, budget)
    payload = {
        "qfs": is_qfs,
        "verdict": "QuasiFSplit" if is_qfs else INFINITE,
        "certificate": certificate_to_json(cert),
    }
    if job.options.get("verify") and not is_qfs:
        J = Ideal(I.ring, [I.ring.parse(s) for s in payload["certificate"]["data"]["generators"]])
        reasons: list[str] = []
        payload["verified"] = verify_infinity_certificate(I, J, reasons=reasons)
        if reasons:
            payload["verify_reasons"] = reasons
    return payload, 0


def _run_verify_chain(job: Job, chain_texts: Sequence[str]) -> tuple[dict, int]:
    polys = job.parsed()
    ring = polys[0].ring
    try:
        chain = [ring.parse(t) for t in chain_texts]
    except ParseError as exc:
        raise InputError(f"bad chain element: {exc}") from exc
    if not chain:
        raise InputError("empty chain")
    reasons: list[str] = []
    ok = verify_witness_chain(Ideal(ring, polys), chain, reasons=reasons)
    payload = {"verified": ok, "chain_length": len(chain)}
    if reasons:
        payload["reasons"] = reasons
    return payload, 0


def _run_verify_infty(
    job: Job, trap_texts: Sequence[str], close: bool
) -> tuple[dict, int]:
    polys = job.parsed()
    ring = polys[0].ring
    try:
        trap = [ring.parse(t) for t in trap_texts]
    except ParseError as exc:
        raise InputError(f"bad trap ideal generator: {exc}") from exc
    if not trap:
        raise InputError("empty trap ideal")
    I = Ideal(ring, polys)
    payload: dict[str, Any] = {}
    J = Ideal(ring, trap)
    if close:
        J = enclosure_closure(I, trap)
        payload["closure_generators"] = [str(g) for g in J.gens]
    reasons: list[str] = []
    ok = verify_infinity_certificate(I, J, reasons=reasons)
    payload["verified"] = ok
    if reasons:
        payload["reasons"] = reasons
    return payload, 0


def _run_product(args) -> tuple[dict, int]:
    p = _require_prime(args.p)
    xvars = tuple(v.strip() for v in args.x_vars.split(",") if v.strip())
    yvars = tuple(v.strip() for v in args.y_vars.split(",") if v.strip())
    rx = PolynomialRing(PrimeField(p), xvars)
    ry = PolynomialRing(PrimeField(p), yvars)
    try:
        gs = [rx.parse(t) for t in _split_polys([args.chain])]
        h = ry.parse(args.splitting)
        fx = rx.parse(args.x_poly) if args.x_poly else None
        fy = ry.parse(args.y_poly) if args.y_poly else None
    except ParseError as exc:
        raise InputError(str(exc)) from exc
    try:
        ws = product_witness(gs, h, len(gs), fx=fx, fy=fy)
    except RingError as exc:
        raise InputError(str(exc)) from exc
    payload = {"witnesses": [str(w) for w in ws], "n": len(ws)}
    if fx is not None and fy is not None:
        joint = ws[0].ring
        joint_ideal = Ideal(
            joint, [joint.parse(args.x_poly), joint.parse(args.y_poly)]
        )
        reasons: list[str] = []
        payload["verified"] = verify_witness_chain(joint_ideal, ws, reasons=reasons)
        if reasons:
            payload["reasons"] = reasons
    return payload, 0


def _run_strata(args) -> tuple[dict, int]:
    p = _require_prime(args.p)
    ctx = FamilyContext.create(p, args.nvars)
    strata = strata_polynomials(ctx, args.h_max, _budget(args))
    return {
        "p": p,
        "nvars": args.nvars,
        "monomials": len(ctx.monomials),
        "coefficients": list(ctx.coefficient_names),
        "b": [str(b) for b in strata.polynomials],
    }, 0


def _run_search(args) -> tuple[dict, int]:
    p = _require_prime(args.p)
    ctx = FamilyContext.create(p, args.nvars)
    witness = search_height(
        ctx,
        args.target,
        samples=args.samples,
        smoothness_check=not args.no_smoothness,
        restrict=args.restrict,
        seed=args.seed,
        budget=_budget(args),
    )
    if witness is None:
        return {"found": False, "samples": args.samples}, 0
    res = height_graded_cy(
        [witness], Grading.standard(args.nvars), n_max=args.target
    )
    return {
        "found": True,
        "witness": str(witness),
        "report": result_to_json(res),
    }, 0


# ---------------------------------------------------------------------------
# the rational double point table
# ---------------------------------------------------------------------------

# E-type rows: (p, label, equation, expected height)
RDP_E_ROWS: tuple[tuple[int, str, str, int], ...] = (
    (2, "E6^0", "z^2 + x^3 + y^2*z", 2),
    (2, "E6^1", "z^2 + x^3 + y^2*z + x*y*z", 1),
    (2, "E7^0", "z^2 + x^3 + x*y^3", 4),
    (2, "E7^1", "z^2 + x^3 + x*y^3 + x^2*y*z", 3),
    (2, "E7^2", "z^2 + x^3 + x*y^3 + y^3*z", 2),
    (2, "E7^3", "z^2 + x^3 + x*y^3 + x*y*z", 1),
    (2, "E8^0", "z^2 + x^3 + y^5", 4),
    (2, "E8^1", "z^2 + x^3 + y^5 + x*y^3*z", 4),
    (2, "E8^2", "z^2 + x^3 + y^5 + x*y^2*z", 3),
    (2, "E8^3", "z^2 + x^3 + y^5 + y^3*z", 2),
    (2, "E8^4", "z^2 + x^3 + y^5 + x*y*z", 1),
    (3, "E6^0", "z^2 + x^3 + y^4", 2),
    (3, "E6^1", "z^2 + x^3 + y^4 + x^2*y^2", 1),
    (3, "E7^0", "z^2 + x^3 + x*y^3", 2),
    (3, "E7^1", "z^2 + x^3 + x*y^3 + x^2*y^2", 1),
    (3, "E8^0", "z^2 + x^3 + y^5", 3),
    (3, "E8^1", "z^2 + x^3 + y^5 + x^2*y^3", 2),
    (3, "E8^2", "z^2 + x^3 + y^5 + x^2*y^2", 1),
    (5, "E8^0", "z^2 + x^3 + y^5", 2),
    (5, "E8^1", "z^2 + x^3 + y^5 + x*y^4", 1),
)


def rdp_rows(p_set: Sequence[int], n_bound: int) -> list[dict[str, Any]]:
    """Every table row as {p, type, f, expected}: the two D-families at p = 2
    (coindex r = 0..n−1, 2 ≤ n ≤ n_bound) and the E-rows for p ∈ {2,3,5}."""
    rows: list[dict[str, Any]] = []
    if 2 in p_set:
        for n in range(2, n_bound + 1):
            for r in range(0, n):
                expected = math.ceil(math.log2(n - r)) + 1
                tail = f" + x*y^{n - r}*z" if r else ""
                rows.append(
                    {
                        "p": 2,
                        "type": f"D{2 * n}^{r}",
                        "f": f"z^2 + x^2*y + x*y^{n}" + tail,
                        "expected": expected,
                    }
                )
                rows.append(
                    {
                        "p": 2,
                        "type": f"D{2 * n + 1}^{r}",
                        "f": f"z^2 + x^2*y + y^{n}*z" + tail,
                        "expected": expected,
                    }
                )
    for p, label, f, expected in RDP_E_ROWS:
        if p in p_set:
            rows.append({"p": p, "type": label, "f": f, "expected": expected})
    return rows


def rdp_compute_row(row: dict[str, Any]) -> dict[str, Any]:
    ring = PolynomialRing(PrimeField(row["p"]), ("x", "y", "z"))
    f = ring.parse(row["f"])
    res = height(f, n_max=max(10, row["expected"] + 2))
    computed = res.n if res.verdict == FINITE else res.verdict
    out = dict(row)
    out["computed"] = computed
    out["match"] = computed == row["expected"]
    return out


def _run_rdp_table(args) -> tuple[dict, int]:
    p_set = sorted({int(v) for v in args.primes.split(",")})
    bad = [p for p in p_set if p not in (2, 3, 5)]
    if bad:
        raise InputError(f"no table rows for p = {bad}; choose among 2,3,5")
    rows = [rdp_compute_row(r) for r in rdp_rows(p_set, args.n_bound)]
    mismatches = [r for r in rows if not r["match"]]
    payload = {
        "rows": rows,
        "total": len(rows),
        "mismatches": len(mismatches),
    }
    return payload, (1 if mismatches else 0)


def _format_rdp_table(payload: dict, fmt: str) -> str:
    rows = payload["rows"]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p", "type", "f", "expected", "computed", "match"])
        for r in rows:
            writer.writerow(
                [r["p"], r["type"], r["f"], r["expected"], r["computed"], r["match"]]
            )
        return buf.getvalue()
    lines = [
        "| p | type | f | expected | computed | match |",
        "|---|------|---|----------|----------|-------|",
    ]
    for r in rows:
        lines.append(
            f"| {r['p']} | {r['type']} | {r['f']} | {r['expected']}"
            f" | {r['computed']} | {'yes' if r['match'] else 'NO'} |"
        )
    lines.append(
        f"\n{payload['total']} rows, {payload['mismatches']} mismatches"
    )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# batch mode
# ---------------------------------------------------------------------------


def _job_from_record(record: dict[str, Any]) -> Job:
    try:
        command = record["command"]
        p = _require_prime(int(record["p"]))
        variables = tuple(record["vars"])
    except KeyError as exc:
        raise InputError(f"job record missing field {exc}") from exc
    polys = tuple(record.get("polys", ()))
    grading = None
    if record.get("grading"):
        grading = Grading(tuple(tuple(row) for row in record["grading"]))
        if grading.nvars != len(variables):
            raise InputError("grading width disagrees with variable count")
    options = dict(record.get("options", ()))
    return Job(command, p, variables, polys, grading, options)


def run_batch_record(record: dict[str, Any]) -> tuple[dict, int]:
    """One batch entry; errors are captured, not raised (isolation)."""
    try:
        job = _job_from_record(record)
        if job.command == "height":
            return _run_height(job)
        if job.command == "fsplit":
            return _run_fsplit(job)
        if job.command == "qfs":
            return _run_qfs(job)
        raise InputError(f"unsupported batch command {job.command!r}")
    except InputError as exc:
        return {"error": str(exc)}, 1
    except (ParseError, RingError, HomogeneityError) as exc:
        return {"error": str(exc)}, 1
    except BudgetExceededError as exc:
        return {"error": f"budget exhausted after {exc.steps} steps"}, 2


def _run_batch(args) -> tuple[dict, int]:
    try:
        with open(args.jobfile) as fh:
            records = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read job file: {exc}") from exc
    if not isinstance(records, list):
        raise InputError("job file must contain a JSON list")
    if not records:
        return {"jobs": [], "exit": 0}, 0
    if args.serial or len(records) == 1:
        results = [run_batch_record(r) for r in records]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(run_batch_record, records))
    reports = [
        {"index": i, "exit": code, "report": payload}
        for i, (payload, code) in enumerate(results)
    ]
    worst = max(code for _, code in results)
    return {"jobs": reports, "exit": worst}, worst


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


def _add_common(sub, with_poly=True):
    sub.add_argument("--p", type=int, required=True, help="prime characteristic")
    sub.add_argument("--vars", required=True, help="comma-separated variables")
    if with_poly:
        sub.add_argument(
            "--poly",
            action="append",
            help="generator polynomial (repeatable; ';' separates within one flag)",
        )
    sub.add_argument("--grading", help="grading rows 'a,b,c|d,e,f' (or ';')")
    sub.add_argument("--weights", help="single-row grading shortcut 'w1,...,wN'")
    sub.add_argument("--n-max", dest="n_max", type=int, help="chain length cutoff")
    sub.add_argument("--budget", type=int, help="Groebner step budget")
    sub.add_argument(
        "--verify", action="store_true", help="re-verify certificates before printing"
    )
    sub.add_argument(
        "--format", choices=("text", "json"), default="text", help="report format"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfsplit",
        description="quasi-F-split heights of hypersurfaces and complete intersections",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("height", help="compute the quasi-F-split height")
    _add_common(sp)
    sp.add_argument(
        "--strategy",
        choices=("auto", "graded", "local", "qfs"),
        default="auto",
        help="force a computation route",
    )

    sp = subs.add_parser("fsplit", help="Fedder F-splitting test")
    _add_common(sp)

    sp = subs.add_parser("qfs", help="decide quasi-F-splitness via the fixed point")
    _add_common(sp)

    sp = subs.add_parser("verify-chain", help="check a strict θ-chain certificate")
    _add_common(sp)
    sp.add_argument("--chain", required=True, help="';'-separated chain elements")

    sp = subs.add_parser("verify-infty", help="check a trap ideal certifying height ∞")
    _add_common(sp)
    sp.add_argument("--trap", required=True, help="';'-separated trap ideal generators")
    sp.add_argument(
        "--close",
        action="store_true",
        help="close the trap ideal under θ(F_*·∩Ker u) before checking",
    )

    sp = subs.add_parser("product", help="combine witnesses for a fiber product")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--x-vars", dest="x_vars", required=True)
    sp.add_argument("--y-vars", dest="y_vars", required=True)
    sp.add_argument("--chain", required=True, help="chain for the first factor")
    sp.add_argument("--splitting", required=True, help="splitting element for the second")
    sp.add_argument("--x-poly", dest="x_poly", help="first factor equation (enables exact chain + verify)")
    sp.add_argument("--y-poly", dest="y_poly", help="second factor equation")
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = subs.add_parser("strata", help="stratum polynomials of the degree-N family")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--nvars", type=int, required=True, help="N (= degree)")
    sp.add_argument("--h-max", dest="h_max", type=int, default=3)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = subs.add_parser("search", help="search the family for a prescribed height")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--nvars", type=int, required=True)
    sp.add_argument("--target", type=int, required=True)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--restrict", action="store_true", help="x1-subfamily only")
    sp.add_argument("--no-smoothness", action="store_true")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = subs.add_parser("rdp-table", help="reproduce the double-point height table")
    sp.add_argument("--primes", default="2,3,5", help="subset of 2,3,5")
    sp.add_argument("--n-bound", dest="n_bound", type=int, default=8)
    sp.add_argument("--format", choices=("md", "csv", "json"), default="md")

    sp = subs.add_parser("batch", help="run a JSON list of jobs")
    sp.add_argument("jobfile")
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--serial", action="store_true")
    sp.add_argument("--format", choices=("text", "json"), default="json")
    return parser


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    for key, value in payload.items():
        if isinstance(value, (dict, list)):
            print(f"{key}: {json.dumps(value, sort_keys=True)}")
        else:
            print(f"{key}: {value}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "height":
            payload, code = _run_height(_job_from_args(args, "height"))
        elif args.command == "fsplit":
            payload, code = _run_fsplit(_job_from_args(args, "fsplit"))
        elif args.command == "qfs":
            payload, code = _run_qfs(_job_from_args(args, "qfs"))
        elif args.command == "verify-chain":
            job = _job_from_args(args, "verify-chain")
            payload, code = _run_verify_chain(job, _split_polys([args.chain]))
        elif args.command == "verify-infty":
            job = _job_from_args(args, "verify-infty")
            payload, code = _run_verify_infty(
                job, _split_polys([args.trap]), args.close
            )
        elif args.command == "product":
            payload, code = _run_product(args)
        elif args.command == "strata":
            payload, code = _run_strata(args)
        elif args.command == "search":
            payload, code = _run_search(args)
        elif args.command == "rdp-table":
            payload, code = _run_rdp_table(args)
            if args.format in ("md", "csv"):
                print(_format_rdp_table(payload, args.format))
                return code
            print(json.dumps(payload, indent=2, sort_keys=True))
            return code
        elif args.command == "batch":
            payload, code = _run_batch(args)
        else:  # pragma: no cover - argparse enforces the choices
            raise InputError(f"unknown command {args.command!r}")
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ParseError, RingError, HomogeneityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceededError as exc:
        print(f"error: budget exhausted after {exc.steps} steps", file=sys.stderr)
        return 2
    _emit(payload, getattr(args, "format", "text"))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
