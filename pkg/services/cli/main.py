import argparse
import csv
import io
import logging
import sys
import time
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from services.worker.tasks import run_sweep_rows
from shared.chern_ring import intersection_table_x2, load_surface, symbolic_surface
from shared.config import get_settings
from shared.euler_rr import (
    TwistClass,
    chi_e2m,
    chi_e2m_quasi_polynomial,
    chi_sym,
    leading_coeff_chi_e2m,
    leading_coeff_chi_sym,
    noether_chi,
    p3_surface,
    rank_e2m,
)
from shared.logging import configure_logging
from shared.nadel import (
    CapacityError,
    fermat_deformation,
    fermat_pole_candidate,
    h0_sym_cotangent_p3,
    nadel_exclusion_budget,
    pole_divisor,
    smoothness_criterion,
    solve_connection,
)
from shared.polyalg import InvariantViolation
from shared.schemas import Report, to_jsonable
from shared.thresholds import SWEEP_COLUMNS, ThresholdError, certify_degree, cutoffs, row_values


logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_INVARIANT = 4


class UsageError(ValueError):
    pass


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from exc


def _composition(text: str) -> List[int]:
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected four comma-separated integers, got {text!r}") from exc
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected four comma-separated integers, got {text!r}")
    return parts


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    return {key: value for key, value in sorted(vars(args).items()) if key not in ("handler", "command")}


def _emit_report(args: argparse.Namespace, results: Any, provenance: Sequence[str]) -> None:
    report = Report(
        command=args.command,
        parameters=to_jsonable(_parameters(args)),
        results=results,
        provenance=list(provenance),
        tool_version=get_settings().tool_version,
    )
    sys.stdout.write(report.render() + "\n")


def _emit_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([to_jsonable(value) for value in row])
    sys.stdout.write(buffer.getvalue())


def cmd_ring_table(args: argparse.Namespace) -> int:
    """Nine top intersection numbers on X2."""
    if args.symbolic:
        surface = symbolic_surface()
    elif args.surface:
        surface = load_surface(args.surface)
    else:
        surface = p3_surface(args.d)
    table = intersection_table_x2(surface)
    divisor = "F" if "F" in surface.pic_basis else surface.pic_basis[0]
    if args.format == "csv":
        _emit_csv(("monomial", "value"), [(name, value) for name, value in table.items()])
        return 0
    _emit_report(
        args,
        {"surface": surface.label, "divisor": divisor, "table": table},
        [
            "Semple tower relations u1^2 + c1 u1 + c2 = 0 and u2^2 + c1(V1) u2 + c2(V1) = 0",
            "integration along the two projective line fibrations X2 -> X1 -> X",
        ],
    )
    return 0


def cmd_chi(args: argparse.Namespace) -> int:
    """Euler characteristic of S^m T* or E_{2,m} T*, optionally twisted by t K_X."""
    surface = p3_surface(args.d)
    twist = TwistClass.canonical(surface, args.twist) if args.twist is not None else None
    results: Dict[str, Any] = {"chi_o": noether_chi(surface)}
    provenance = ["Hirzebruch-Riemann-Roch on a surface with Noether's formula"]
    if args.m is None and not args.asymptotic:
        raise UsageError("chi needs --m or --asymptotic")
    if args.m is not None:
        if args.bundle == "sym":
            results["chi"] = chi_sym(surface, args.m, twist)
            results["rank"] = args.m + 1
        else:
            results["chi"] = chi_e2m(surface, args.m, twist)
            results["rank"] = rank_e2m(args.m)
            provenance.append("graded pieces S^(m-3j) T* (x) K^j of E_2,m T*")
    if args.asymptotic:
        if args.bundle == "sym":
            results["leading_degree"] = 3
            results["leading_coefficient"] = leading_coeff_chi_sym(surface, twist)
            provenance.append("exact interpolation, m^3 coefficient (c1^2 - c2)/6")
        else:
            results["leading_degree"] = 4
            results["leading_coefficient"] = leading_coeff_chi_e2m(surface, twist)
            results["quasi_polynomial"] = chi_e2m_quasi_polynomial(surface, twist).classes
            provenance.append("exact interpolation per residue of m mod 3, m^4 coefficient (13c1^2 - 9c2)/648")
    _emit_report(args, results, provenance)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cap = get_settings().sweep_max_degree
    if args.dmax > cap:
        raise ThresholdError(f"dmax {args.dmax} exceeds the configured cap {cap}")
    rows = run_sweep_rows(args.dmin, args.dmax)
    if args.format == "csv":
        _emit_csv(SWEEP_COLUMNS, [[row_values(row)[column] for column in SWEEP_COLUMNS] for row in rows])
        return 0
    _emit_report(
        args,
        {"rows": [row_values(row) for row in rows], "cutoffs": cutoffs(rows)},
        [
            "Chern numbers c1^2 = d(d-4)^2, c2 = d(d^2-4d+6) of a smooth surface in P^3",
            "theta1 in [1/(d-4), 2/(d-4)]",
            "theta2 >= -1/6 + 1/(2(d-4)) for very generic surfaces, d >= 6",
            "13c1^2 - 9c2 > 0 implies theta2 < 0",
            "lifted multi-foliation quadratics 4c1^2 - 3c2 and 5c1^2 - 3c2",
            "chern ratio criterion c1^2/c2 > 9/(13 + 12 theta2)",
        ],
    )
    return 0


def cmd_connection(args: argparse.Namespace) -> int:
    """Nadel partial connection of the deformed Fermat family."""
    if args.d < 5:
        raise UsageError(f"connection needs d >= 5, got {args.d}")
    family = fermat_deformation(args.d, args.k)
    candidate = fermat_pole_candidate(args.d, args.k)
    if args.a is not None:
        family = family.specialize(args.a)
        candidate = candidate.substitute({"a": args.a})
    gamma = solve_connection(family)
    residuals = gamma.residuals(family)
    unsatisfied = [key for key, value in residuals.items() if not value.is_zero()]
    if unsatisfied:
        raise InvariantViolation(f"connection misses {len(unsatisfied)} defining equations, first {unsatisfied[0]}")
    divisor = pole_divisor(gamma, [candidate])
    smoothness = smoothness_criterion(args.d, args.k, args.a)
    results: Dict[str, Any] = {
        "christoffel": {f"G^{k}_{i}{j}": entry for (i, j, k), entry in gamma.entries() if not entry.is_zero()},
        "equations_checked": len(residuals),
        "homogeneous_degree_minus_one": gamma.is_homogeneous_of_degree(-1),
        "pole_divisor": {
            "support": divisor.support,
            "total_degree": divisor.total_degree,
            "coordinate_powers": divisor.coordinate_powers,
            "unmatched_residual": divisor.unmatched,
            "ratio_to_canonical": divisor.ratio_to_canonical(args.d),
        },
        "smoothness": {
            "relation": smoothness.relation(),
            "critical_a_power": smoothness.critical_a_power,
            "nonsingular": smoothness.nonsingular,
        },
    }
    if args.d >= 6:
        results["exclusion_budget"] = nadel_exclusion_budget(args.d)
    _emit_report(
        args,
        results,
        [
            "linear system sum_k G^k_ij ds_l/dz_k = d2 s_l/dz_i dz_j",
            "pole divisor from the common denominator of the reduced symbols",
            "singular members: a^d prod k_i^k_i = (-d)^d",
        ],
    )
    return 0


def cmd_h0p3(args: argparse.Namespace) -> int:
    dimension = h0_sym_cotangent_p3(args.m, args.k)
    in_range = args.k <= 2 * args.m - 1
    if in_range and dimension:
        raise InvariantViolation(f"h0(S^{args.m} Omega(k={args.k})) = {dimension} inside the vanishing range")
    _emit_report(
        args,
        {"dimension": dimension, "in_vanishing_range": in_range},
        ["kernel of contraction with the Euler field on P^3"],
    )
    return 0


def cmd_certify(args: argparse.Namespace) -> int:
    _emit_report(
        args,
        certify_degree(args.d),
        [
            "theta1 and theta_2,m bounds for very generic surfaces in P^3",
            "chern ratio criterion with the certified theta2 lower bound",
        ],
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypercert",
        description="Exact certification of jet-differential criteria for surfaces in P^3.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    ring = subparsers.add_parser("ring-table", help="Intersection table of the Semple tower X2")
    source = ring.add_mutually_exclusive_group(required=True)
    source.add_argument("--d", type=int, help="Degree of a smooth surface in P^3")
    source.add_argument("--symbolic", action="store_true", help="Keep Chern numbers as symbols")
    source.add_argument("--surface", help="JSON surface document")
    ring.add_argument("--format", choices=("json", "csv"), default="json")
    ring.set_defaults(handler=cmd_ring_table)

    chi = subparsers.add_parser("chi", help="Riemann-Roch Euler characteristics")
    chi.add_argument("--d", type=int, required=True)
    chi.add_argument("--m", type=int)
    chi.add_argument("--bundle", choices=("sym", "e2m"), default="sym")
    chi.add_argument("--twist", type=_rational, help="Twist by t K_X, t given as p/q")
    chi.add_argument("--asymptotic", action="store_true", help="Report the certified leading coefficient")
    chi.set_defaults(handler=cmd_chi)

    sweep = subparsers.add_parser("sweep", help="Criterion margins over a range of degrees")
    sweep.add_argument("--dmin", type=int, required=True)
    sweep.add_argument("--dmax", type=int, required=True)
    sweep.add_argument("--format", choices=("json", "csv"), default="json")
    sweep.set_defaults(handler=cmd_sweep)

    connection = subparsers.add_parser("connection", help="Nadel connection of a deformed Fermat surface")
    connection.add_argument("--d", type=int, required=True)
    connection.add_argument("--k", type=_composition, required=True, help="k0,k1,k2,k3 summing to d")
    connection.add_argument("--a", type=_rational, help="Specialize the deformation parameter")
    connection.add_argument("--out", choices=("json",), default="json")
    connection.set_defaults(handler=cmd_connection)

    h0p3 = subparsers.add_parser("h0p3", help="dim H^0(P^3, S^m Omega(k))")
    h0p3.add_argument("--m", type=int, required=True)
    h0p3.add_argument("--k", type=int, required=True)
    h0p3.set_defaults(handler=cmd_h0p3)

    certify = subparsers.add_parser("certify", help="Certified record for one degree")
    certify.add_argument("--d", type=int, required=True)
    certify.set_defaults(handler=cmd_certify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        code = args.handler(args)
    except InvariantViolation as exc:
        logger.exception("internal invariant violated", extra={"command": args.command})
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVARIANT
    except CapacityError as exc:
        logger.error("%s", exc, extra={"command": args.command})
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAPACITY
    except ValueError as exc:
        logger.error("%s", exc, extra={"command": args.command})
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    logger.info(
        "%s finished",
        args.command,
        extra={"command": args.command, "elapsed_ms": int((time.perf_counter() - started) * 1000)},
    )
    return code


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
