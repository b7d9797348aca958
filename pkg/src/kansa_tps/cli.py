"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 numerically singular system
(solve only), 3 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import __version__, linalg
from .assembly import RhsSpec
from .config import SUBCOMMANDS, ConfigError, RunConfig, build_density, build_domain
from .experiments import (
    StudyConfig, convergence_csv, convergence_medians, convergence_study, probe_csv,
    singular_probe, unisolvence_study,
)
from .expression import ExpressionError, parse_expression
from .kernel import TpsKernel
from .sampling import GENERATOR_NAME, PointSampler, SeededGenerator
from .solver import MANUFACTURED, solve_poisson

EXIT_OK, EXIT_CONFIG, EXIT_SINGULAR, EXIT_INTERNAL = 0, 1, 2, 3

_FLAGS = {"seed": "seed", "nu": "nu", "n": "n", "m": "m", "trials": "trials", "out": "out",
          "domain": "domain"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kansa-tps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int)
        p.add_argument("--nu", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--domain", help="disk, ellipse:a:b, star3 or a JSON curve file")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    for flag, key in _FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            setattr(cfg, key, value)
    cfg.validate(args.command)
    return cfg


def _meta(cfg: RunConfig, command: str) -> str:
    return f"# command={command} seed={cfg.seed} generator={GENERATOR_NAME} version={__version__}"


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _rhs(cfg: RunConfig) -> RhsSpec:
    if cfg.f is not None and cfg.g is not None:
        f, g = parse_expression(cfg.f), parse_expression(cfg.g)
        return RhsSpec(lambda x, y: f.evaluate(x, y), lambda x, y: g.evaluate(x, y), "expression")
    if cfg.case not in MANUFACTURED:
        raise ConfigError(f"unknown manufactured case {cfg.case!r}; choose from {sorted(MANUFACTURED)}")
    return MANUFACTURED[cfg.case].rhs


def cmd_solve(cfg: RunConfig, out: Path) -> int:
    domain = build_domain(cfg.domain)
    interior = build_density(cfg.interior_density, domain, "interior")
    boundary = build_density(cfg.boundary_density, domain, "boundary")
    try:
        sol = solve_poisson(domain, TpsKernel(cfg.nu), cfg.n, cfg.m, _rhs(cfg), cfg.seed, interior, boundary)
    except linalg.SingularSystemError as exc:
        print(f"solve: {exc}")
        return EXIT_SINGULAR
    out.mkdir(parents=True, exist_ok=True)
    sol.to_csv(out / "solution.csv")
    dg = sol.diagnostics
    line = f"solve: n={cfg.n} m={cfg.m} logdet={dg.logdet:.6g} cond={dg.cond:.3e} residual={dg.residual:.2e}"
    if cfg.f is None and cfg.case in MANUFACTURED:
        from .solver import grid_error

        mx, rms = grid_error(sol, MANUFACTURED[cfg.case], domain, cfg.resolution)
        line += f" max_err={mx:.3e} rms_err={rms:.3e}"
    print(line)
    return EXIT_OK


def cmd_unisolvence(cfg: RunConfig, out: Path) -> int:
    study = StudyConfig(cfg.domain, cfg.nu, cfg.n, cfg.m, cfg.policy, cfg.p_interior,
                        cfg.interior_density, cfg.boundary_density, cfg.seed)
    # fail fast on bad domain or density specs before spawning trials
    domain = build_domain(cfg.domain)
    build_density(cfg.interior_density, domain, "interior")
    build_density(cfg.boundary_density, domain, "boundary")
    report = unisolvence_study(study, cfg.trials, cfg.parallelism)
    _write(out, "unisolvence_trials.csv", report.trials_csv())
    _write(out, "unisolvence_summary.csv", report.summary_csv())
    last = report.summary()[-1]
    print(f"unisolvence: trials={cfg.trials} steps={len(report.records)} flagged={len(report.flagged)} "
          f"min_ratio@N={last['N']}={last['min_ratio']:.3e}")
    return EXIT_OK


def cmd_probe(cfg: RunConfig, out: Path) -> int:
    report = singular_probe(TpsKernel(cfg.nu))
    _write(out, "probe.csv", probe_csv(report))
    at_root = report["cases"]["interior-pair"][0]
    print(f"probe: nu={cfg.nu} |det| at critical radius={abs(at_root['det']):.3e} "
          f"(scale {at_root['kernel_scale_sq']:.3e})")
    return EXIT_OK


def cmd_convergence(cfg: RunConfig, out: Path) -> int:
    domain = build_domain(cfg.domain)
    rows = convergence_study(domain, TpsKernel(cfg.nu), cfg.case, cfg.ladder,
                             [cfg.seed + i for i in range(cfg.seeds)], cfg.boundary_fraction,
                             cfg.resolution)
    _write(out, "convergence.csv", convergence_csv(rows, _meta(cfg, "convergence")))
    med = convergence_medians(rows)
    print("convergence: " + " ".join(f"N={N}:median_max_err={e:.3e},flagged={k}" for N, (e, k) in med.items()))
    return EXIT_OK


def cmd_sample(cfg: RunConfig, out: Path) -> int:
    domain = build_domain(cfg.domain)
    sampler = PointSampler(domain, SeededGenerator(cfg.seed),
                           build_density(cfg.interior_density, domain, "interior"),
                           build_density(cfg.boundary_density, domain, "boundary"))
    buf = io.StringIO()
    buf.write(_meta(cfg, "sample") + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "x", "y", "t"])
    pts: list = []
    for _ in range(cfg.n):
        p = sampler.interior_point(pts)
        pts.append(p)
        w.writerow(["interior", repr(p[0]), repr(p[1]), ""])
    for _ in range(cfg.m):
        t = sampler.boundary_abscissa(pts)
        qx, qy = domain.boundary.eval(t)
        pts.append((float(qx), float(qy)))
        w.writerow(["boundary", repr(float(qx)), repr(float(qy)), repr(t)])
    _write(out, "samples.csv", buf.getvalue())
    print(f"sample: wrote {cfg.n} interior and {cfg.m} boundary points")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "unisolvence": cmd_unisolvence, "probe": cmd_probe,
            "convergence": cmd_convergence, "sample": cmd_sample}


def run_subcommand(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = resolve_config(args)
        out = Path(cfg.out)
        _write(out, "config.json", cfg.to_json())
        return COMMANDS[args.command](cfg, out)
    except (ConfigError, ExpressionError) as exc:
        print(f"{args.command}: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - mapped to the documented exit code
        print(f"{args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run_subcommand())

