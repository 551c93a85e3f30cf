"""Command-line entry point.

Usage::

    ncmaxwell <scenario> --config PATH [--output PATH] [--seed N]

Exit codes: 0 success, 1 check failure, 2 numerical blow-up, 3 I/O error,
4 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .brackets import DENSE_LIMIT, CanonicalLayout, run_audit
from .config import SCENARIOS, RunConfig, load_config
from .dynamics import DiagnosticsRecord, evolve, make_initial_state
from .errors import BadParams, FitFailure, NonFinite, ParseError, SingularBlock, ValidationError
from .scenarios import (
    format_number,
    legendre_sweep,
    measure_dispersion,
    random_fields,
    relative_spread,
    theta_ladder,
)

log = logging.getLogger("ncmaxwell")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BLOWUP = 2
EXIT_IO = 3
EXIT_CONFIG = 4

SIMULATE_COLUMNS = DiagnosticsRecord.FIELDS
LEGENDRE_COLUMNS = ("theta", "max_residual", "residual_over_theta_sq")
DISPERSION_COLUMNS = ("k", "omega", "omega_over_k", "theta_dot_B_background")

LEGENDRE_TOLERANCE = 0.05
MAX_DISPERSION_AMPLITUDE = 1e-3


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _initial_params(cfg: RunConfig) -> dict:
    params = dict(cfg.initial_params)
    if cfg.initial_kind == "random_transverse":
        params.setdefault("seed", cfg.seed)
    return params


def cmd_simulate(cfg: RunConfig) -> int:
    lattice = cfg.lattice
    try:
        state = make_initial_state(cfg.initial_kind, _initial_params(cfg), lattice, cfg.theta, cfg.gauge)
    except BadParams as exc:
        log.error("bad initial parameters: %s", exc)
        return EXIT_CONFIG
    if cfg.dt > 0.5 * lattice.spacing:
        log.warning("dt = %g exceeds 0.5 h; the run may be unstable", cfg.dt)
    with open(cfg.output_path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(SIMULATE_COLUMNS)

        def sink(rec: DiagnosticsRecord):
            w.writerow([format_number(v) for v in rec.as_tuple()])
            fh.flush()

        try:
            evolve(state, cfg.n_steps, cfg.dt, cfg.theta, cfg.gauge, sink=sink, diag_stride=cfg.diag_stride)
        except NonFinite as exc:
            log.error("numerical blow-up: %s", exc)
            return EXIT_BLOWUP
    return EXIT_OK


def cmd_legendre_check(cfg: RunConfig) -> int:
    opts = cfg.legendre
    try:
        thetas = theta_ladder(
            float(opts.get("theta_max", 1e-1)),
            float(opts.get("theta_min", 1e-4)),
            float(opts.get("factor", 0.5)),
        )
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    tol = float(opts.get("tolerance", LEGENDRE_TOLERANCE))
    E, B = random_fields(cfg.lattice, cfg.seed, float(opts.get("field_scale", 1.0)))
    direction = np.asarray(cfg.theta, dtype=float)
    if not np.any(direction):
        direction = np.random.default_rng(cfg.seed).standard_normal(3)
    rows = legendre_sweep(E, B, direction, thetas)
    with open(cfg.output_path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(LEGENDRE_COLUMNS)
        for r in rows:
            w.writerow([format_number(r.theta), format_number(r.max_residual),
                        format_number(r.residual_over_theta_sq)])
    bottom = [r.residual_over_theta_sq for r in rows[len(rows) // 2:]]
    spread = relative_spread(bottom)
    log.info("residual/theta^2 spread over the lower half of the ladder: %.3e", spread)
    return EXIT_OK if spread < tol else EXIT_CHECK_FAILED


def audit_document(cfg: RunConfig, results) -> dict:
    lat = cfg.lattice
    return {
        "checks": [r.as_dict() for r in results],
        "conventions": {
            "bracket_measure": "{A_mu(x), pi_nu(y)} = delta_mu_nu delta_xy / h^3",
            "derivative": "central difference (f(x+h) - f(x-h)) / 2h, periodic",
            "laplacian_symbol": "-sum_i sin^2(k_i h) / h^2",
            "null_sector": "modes with sin(k_i h) = 0 for all i (constant and Nyquist)",
            "projector_symbol": "delta_ij - kappa_i kappa_j / |kappa|^2, kappa_i = sin(k_i h)/h; identity where kappa = 0",
        },
        "lattice": {
            "dims": list(lat.dims),
            "spacing": lat.spacing,
            "n_sites": lat.n_sites,
            "null_modes": int(np.count_nonzero(lat.null_modes)),
        },
        "passed": all(r.passed for r in results),
        "version": __version__,
    }


def cmd_bracket_audit(cfg: RunConfig) -> int:
    opts = cfg.audit
    limit = int(opts.get("dense_limit", DENSE_LIMIT))
    if cfg.lattice.n_sites > limit:
        log.error("lattice has %d sites, above the dense limit %d", cfg.lattice.n_sites, limit)
        return EXIT_CONFIG
    layout = CanonicalLayout(cfg.lattice)
    try:
        results = run_audit(
            layout,
            corrupt=bool(opts.get("corrupt_constraint", False)),
            tol=float(opts.get("tolerance", 1e-10)),
            seed=cfg.seed,
            dense_limit=limit,
        )
    except SingularBlock as exc:
        log.error("singular constraint block: %s", exc)
        return EXIT_CHECK_FAILED
    doc = audit_document(cfg, results)
    with open(cfg.output_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for r in results:
        if not r.passed:
            log.error("check %s failed: deviation %.3e (tolerance %.1e)", r.name, r.max_deviation, r.tolerance)
    return EXIT_OK if doc["passed"] else EXIT_CHECK_FAILED


def cmd_dispersion(cfg: RunConfig) -> int:
    if cfg.initial_kind != "plane_wave":
        log.error("dispersion needs initial kind plane_wave")
        return EXIT_CONFIG
    params = dict(cfg.initial_params)
    amp = abs(float(params.get("amplitude", MAX_DISPERSION_AMPLITUDE)))
    if amp > MAX_DISPERSION_AMPLITUDE:
        log.error("dispersion amplitude must be <= %g", MAX_DISPERSION_AMPLITUDE)
        return EXIT_CONFIG
    params["amplitude"] = amp
    bg = np.asarray(params.pop("background_B", (0.0, 0.0, 0.0)), dtype=float)
    scales = cfg.dispersion.get("background_scales", [1.0])
    scales = scales if isinstance(scales, list) else [scales]
    rows = []
    try:
        for s in scales:
            p = dict(params, background_B=tuple(float(s) * bg))
            rows.append(measure_dispersion(cfg.lattice, cfg.theta, p, cfg.dt, cfg.n_steps, cfg.gauge))
    except (BadParams, ValueError) as exc:
        log.error("bad dispersion parameters: %s", exc)
        return EXIT_CONFIG
    except FitFailure as exc:
        log.error("frequency fit failed: %s", exc)
        return EXIT_CHECK_FAILED
    except NonFinite as exc:
        log.error("numerical blow-up: %s", exc)
        return EXIT_BLOWUP
    with open(cfg.output_path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(DISPERSION_COLUMNS)
        for r in rows:
            w.writerow([format_number(v) for v in (r.k, r.omega, r.omega_over_k, r.theta_dot_B_background)])
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "legendre-check": cmd_legendre_check,
    "bracket-audit": cmd_bracket_audit,
    "dispersion": cmd_dispersion,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ncmaxwell",
        description="Lattice simulator and bracket auditor for theta-deformed Maxwell theory.",
    )
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--config", required=True, help="path to the key = value config file")
    p.add_argument("--output", help="override output_path from the config")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_IO
    except (ParseError, ValidationError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    if cfg.scenario != args.scenario:
        log.error("config scenario %r does not match command %r", cfg.scenario, args.scenario)
        return EXIT_CONFIG
    if args.output:
        cfg = replace(cfg, output_path=args.output)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            log.error("seed must be a 64-bit non-negative integer")
            return EXIT_CONFIG
        cfg = replace(cfg, seed=args.seed)
    try:
        return COMMANDS[args.scenario](cfg)
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
