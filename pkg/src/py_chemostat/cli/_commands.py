"""
Subcommands. Each is registered with ``@command(name)``, takes the raw config
document plus the parsed command-line namespace, writes its artifacts under
``--out`` and returns the process exit code.
"""

import argparse
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Any

from .. import dynamics, equilibria, hopf, stability
from ..export import export_document, export_rows
from ..helpers import NormalizedDict, registry_decorator
from ..responses import Parameters
from . import _verify
from ._config import RunConfig, parse_config, with_overrides

logger = logging.getLogger(__name__)

SCAN_COLUMNS = ["mu", "N", "Z", "re_pair", "im_pair", "alpha", "discriminant", "classification"]
TRAJECTORY_COLUMNS = ["t", "N", "P", "Z"]

_COMMANDS: NormalizedDict[str, Callable[[dict, argparse.Namespace], int]] = NormalizedDict()
command = registry_decorator(_COMMANDS, "command_name")


def commands() -> NormalizedDict:
    return _COMMANDS


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "rel_tol": args.rel_tol,
        "abs_tol": args.abs_tol,
        "t_end": args.t_end,
        "seed": args.seed,
        "workers": args.workers,
    }


def _config(document: dict, args: argparse.Namespace) -> RunConfig:
    return with_overrides(parse_config(document), **_overrides(args))


def _written(path: Path) -> None:
    logger.info("wrote %s", path)
    print(f"Wrote {path}")


def _equilibrium_entry(params: Parameters, name: str, point: equilibria.Point) -> dict:
    if name == "E2":
        coeffs = stability.char_coeffs_e2(params, point)
        eigs = stability.eigenvalues(coeffs)
        classification = stability.routh_hurwitz(coeffs)
    else:
        eigs = stability.boundary_eigenvalues(params, name)
        classification = stability.classify_spectrum(eigs)
    generic = stability.eigenvalues(stability.char_coeffs(stability.jacobian(params, point)))
    gap = max(min(abs(g - e) for g in generic) for e in eigs)
    if gap > 1e-7 * max(1.0, max(abs(e) for e in eigs)):
        logger.warning("%s: closed-form and Jacobian spectra differ by %.3g", name, gap)
    return {
        "name": name,
        "point": {"N": point.n, "P": point.p, "Z": point.z},
        "eigenvalues": list(eigs),
        "classification": classification,
    }


@command("analyze")
def cmd_analyze(document: dict, args: argparse.Namespace) -> int:
    """Break-even levels, equilibria and their stability at one mu."""
    params = _config(document, args).scalar_parameters()
    found = equilibria.equilibrium_set(params)
    entries = [_equilibrium_entry(params, name, point)
               for name, point in found.present().items()]
    report = {
        "parameters": params,
        "lambda_p": found.lambda_p,
        "lambda_z": found.lambda_z,
        "mu_c1": found.mu_c1,
        "equilibria": entries,
    }
    print(f"lambda_P={found.lambda_p:.10g} lambda_Z={found.lambda_z:.10g} "
          f"mu_c1={found.mu_c1:.10g}")
    for entry in entries:
        point = entry["point"]
        print(f"  {entry['name']}: ({point['N']:.8g}, {point['P']:.8g}, {point['Z']:.8g}) "
              f"{entry['classification']}")
    _written(export_document(report, Path(args.out) / "analyze.json"))
    return 0


@command("scan")
def cmd_scan(document: dict, args: argparse.Namespace) -> int:
    """Pair real part, real eigenvalue and discriminant over a mu range (CSV)."""
    config = _config(document, args)
    mu_range = config.require_range()
    curve = hopf.scan_curve(config.parameters, mu_range.lo, mu_range.hi, mu_range.n,
                            workers=config.options.workers)
    for crossing in curve.sign_changes():
        print(f"  pair real part {'rises' if crossing.rising else 'falls'} through 0 in "
              f"[{crossing.mu_lo:.6g}, {crossing.mu_hi:.6g}]")
    _written(export_rows(curve.rows(), Path(args.out) / "scan.csv", columns=SCAN_COLUMNS))
    return 0


@command("hopf")
def cmd_hopf(document: dict, args: argparse.Namespace) -> int:
    """Locate and certify the Hopf crossing mu_c2 (JSON)."""
    config = _config(document, args)
    if config.options.bracket is not None:
        certificate = hopf.find_hopf(config.parameters, config.options.bracket)
    else:
        certificate = hopf.locate_hopf(config.parameters, workers=config.options.workers)
    print(f"mu_c2={certificate.mu_c2:.10g} slope={certificate.re_slope:.6g} "
          f"omega={certificate.imag_at_crossing:.6g} alpha={certificate.alpha_at_crossing:.6g}")
    _written(export_document(certificate, Path(args.out) / "hopf.json"))
    return 0


def default_init(params: Parameters) -> tuple[float, float, float]:
    """Start 1% off the coexistence equilibrium, or near washout when it is absent."""
    point = equilibria.coexistence(params)
    if point is not None:
        return 1.01 * point.n, 1.01 * point.p, 1.01 * point.z
    return max(params.mu, 0.1), 0.1, 0.1


@command("simulate")
def cmd_simulate(document: dict, args: argparse.Namespace) -> int:
    """Integrate one trajectory and classify its attractor."""
    config = _config(document, args)
    params = config.scalar_parameters()
    options = config.options
    init = options.init if options.init is not None else default_init(params)
    traj = dynamics.integrate(params, init, options.t_end, rel_tol=options.rel_tol,
                              abs_tol=options.abs_tol, sample_dt=options.sample_dt)
    cycle = dynamics.detect_cycle(traj, params, transient_fraction=options.transient_fraction,
                                  min_crossings=options.min_crossings,
                                  amp_floor=options.amp_floor)
    persistence = dynamics.persistence_check(traj)
    print(f"{cycle.classification}: amplitude={cycle.amplitude:.6g} period={cycle.period}")

    out = Path(args.out)
    _written(export_rows(traj.rows(), out / "trajectory.csv", columns=TRAJECTORY_COLUMNS))
    _written(export_document(
        {"init": list(init), "cycle": cycle, "persistence": persistence, "stats": traj.stats},
        out / "cycle.json",
    ))
    return 0


@command("verify")
def cmd_verify(document: dict, args: argparse.Namespace) -> int:
    """Run the invariant and consistency checks; exit 1 on any failure."""
    results = _verify.run_checks(document, _overrides(args))
    width = max(len(r.name) for r in results)
    for result in results:
        status = "skip" if result.skipped else ("pass" if result.passed else "FAIL")
        print(f"  {result.name:<{width}}  {status}  {result.detail}")
    _written(export_document({"checks": results, "passed": _verify.all_passed(results)},
                             Path(args.out) / "verify.json"))
    return 0 if _verify.all_passed(results) else 1
