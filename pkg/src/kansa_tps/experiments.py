"""Monte Carlo unisolvence trials, singular-circle probes and convergence
studies."""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .assembly import CollocationSet, KansaMatrix, assemble, extend_boundary, extend_interior
from .geometry import Domain, builtin_curve
from .kernel import TpsKernel
from .sampling import GENERATOR_NAME, DensitySpec, PointSampler, SeededGenerator
from .solver import MANUFACTURED, ManufacturedCase, grid_error, sample_set, solve_on_set

POLICIES = ("alternate", "random", "interior-first", "boundary-first")

TRIAL_COLUMNS = ["trial", "seed", "N", "n", "m", "added", "sign", "logdet", "smin", "smax", "ratio", "flagged"]
SUMMARY_COLUMNS = ["N", "trials", "min_ratio", "median_ratio", "flagged"]
CONVERGENCE_COLUMNS = ["N", "seed", "max_err", "rms_err", "logdet", "smin", "smax", "cond", "flagged"]


@dataclass(frozen=True)
class GrowthPolicy:
    n: int
    m: int
    rule: str = "alternate"
    p_interior: float = 0.5

    def __post_init__(self):
        if self.rule not in POLICIES:
            raise ValueError(f"unknown growth rule {self.rule!r}; choose from {POLICIES}")
        if self.n < 0 or self.m < 0 or self.n + self.m < 2:
            raise ValueError("growth target needs n, m >= 0 and n + m >= 2")

    def next_kind(self, n: int, m: int, gen: SeededGenerator) -> str:
        if n >= self.n:
            return "boundary"
        if m >= self.m:
            return "interior"
        if self.rule == "interior-first":
            return "interior"
        if self.rule == "boundary-first":
            return "boundary"
        if self.rule == "alternate":
            return "interior" if (n + m) % 2 == 0 else "boundary"
        return "interior" if gen.uniform() < self.p_interior else "boundary"


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    N: int
    n: int
    m: int
    added: str
    sign: int
    logdet: float
    smin: float
    smax: float
    wall_time: float = field(compare=False)

    @property
    def ratio(self) -> float:
        return self.smin / self.smax if self.smax > 0 else 0.0

    @property
    def flagged(self) -> bool:
        return self.ratio <= linalg.SINGULAR_RATIO

    def row(self) -> list:
        return [self.trial, self.seed, self.N, self.n, self.m, self.added, self.sign,
                _fmt(self.logdet), _fmt(self.smin), _fmt(self.smax), _fmt(self.ratio), int(self.flagged)]


def _fmt(v: float) -> str:
    return repr(float(v))


def matrix_diagnostics(km: KansaMatrix):
    lu = linalg.lu_factor(km.data)
    det = linalg.log_abs_det(lu)
    sig = linalg.sigma_extremes(km.data, lu)
    return det, sig


def closed_form_det(kernel: TpsKernel, cset: CollocationSet) -> float:
    """Determinant of the 2x2 matrix from the two-point base cases."""
    if cset.size != 2:
        raise ValueError("closed forms exist for two-point sets only")
    a, b = cset.points
    r = float(np.hypot(a[0] - b[0], a[1] - b[1]))
    if cset.n == 2:
        return -float(kernel.lap_phi(r)) ** 2
    if cset.m == 2:
        return -float(kernel.phi(r)) ** 2
    return -float(kernel.phi(r)) * float(kernel.lap_phi(r))


def unisolvence_trial(domain: Domain, kernel: TpsKernel, policy: GrowthPolicy,
                      gen: SeededGenerator, interior: DensitySpec | None = None,
                      boundary: DensitySpec | None = None, trial: int = 0,
                      keep_sets: bool = False):
    """Grow a random collocation set one point at a time.

    Returns one TrialRecord per size N >= 2; with ``keep_sets`` also the
    final matrix and set.
    """
    if kernel.nu < 2:
        raise ValueError("unisolvence trials need nu >= 2")
    sampler = PointSampler(domain, gen, interior, boundary)
    cset = CollocationSet.build(domain)
    km = KansaMatrix(np.zeros((0, 0)), 0, 0)
    records = []
    while cset.n < policy.n or cset.m < policy.m:
        kind = policy.next_kind(cset.n, cset.m, gen)
        start = time.perf_counter()
        existing = cset.points
        if kind == "interior":
            km, cset = extend_interior(km, kernel, domain, cset, sampler.interior_point(existing))
        else:
            km, cset = extend_boundary(km, kernel, domain, cset, sampler.boundary_abscissa(existing))
        if cset.size < 2:
            continue
        det, sig = matrix_diagnostics(km)
        records.append(TrialRecord(trial, gen.seed, cset.size, cset.n, cset.m, kind, det.sign,
                                   det.logabs, sig.smin, sig.smax, time.perf_counter() - start))
    if keep_sets:
        return records, km, cset
    return records


@dataclass(frozen=True)
class StudyConfig:
    """Picklable description of a unisolvence study; densities are spec strings
    or dicts understood by ``kansa_tps.config.build_density``."""

    domain: str | dict = "disk"
    nu: int = 2
    n: int = 25
    m: int = 15
    policy: str = "alternate"
    p_interior: float = 0.5
    interior_density: str | dict | None = None
    boundary_density: str | dict | None = None
    seed: int = 0


def _build(cfg: StudyConfig):
    from .config import build_density, build_domain

    domain = build_domain(cfg.domain)
    interior = build_density(cfg.interior_density, domain, "interior")
    boundary = build_density(cfg.boundary_density, domain, "boundary")
    return domain, TpsKernel(cfg.nu), interior, boundary


_WORKER: dict = {}


def _run_trial(args):
    cfg, index = args
    if _WORKER.get("cfg") != cfg:
        _WORKER["cfg"] = cfg
        _WORKER["built"] = _build(cfg)
    domain, kernel, interior, boundary = _WORKER["built"]
    gen = SeededGenerator(cfg.seed).child(index)
    policy = GrowthPolicy(cfg.n, cfg.m, cfg.policy, cfg.p_interior)
    return unisolvence_trial(domain, kernel, policy, gen, interior, boundary, trial=index)


@dataclass
class StudyReport:
    config: StudyConfig
    trials: int
    records: list

    @property
    def flagged(self) -> list:
        return [r for r in self.records if r.flagged]

    @property
    def flagged_seeds(self) -> list:
        return sorted({r.trial for r in self.flagged})

    def summary(self) -> list[dict]:
        by_n: dict[int, list] = {}
        for r in self.records:
            by_n.setdefault(r.N, []).append(r)
        rows = []
        for n_pts in sorted(by_n):
            ratios = np.array([r.ratio for r in by_n[n_pts]])
            rows.append({"N": n_pts, "trials": len(ratios), "min_ratio": float(ratios.min()),
                         "median_ratio": float(np.median(ratios)),
                         "flagged": int(np.count_nonzero(ratios <= linalg.SINGULAR_RATIO))})
        return rows

    def metadata(self) -> str:
        return (f"# master_seed={self.config.seed} generator={GENERATOR_NAME} "
                f"domain={self.config.domain} nu={self.config.nu} n={self.config.n} m={self.config.m} "
                f"policy={self.config.policy} trials={self.trials}")

    def trials_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.metadata() + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        for r in self.records:
            w.writerow(r.row())
        return buf.getvalue()

    def summary_csv(self) -> str:
        buf = io.StringIO()
        buf.write(self.metadata() + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in self.summary():
            w.writerow([row["N"], row["trials"], _fmt(row["min_ratio"]), _fmt(row["median_ratio"]),
                        row["flagged"]])
        return buf.getvalue()


def unisolvence_study(cfg: StudyConfig, trials: int, parallelism: int = 1) -> StudyReport:
    """Run ``trials`` independent growth trials; the result does not depend on
    ``parallelism`` because each trial owns a child generator."""
    if trials < 1:
        raise ValueError("need at least one trial")
    jobs = [(cfg, i) for i in range(trials)]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(_run_trial, jobs, chunksize=max(1, trials // (4 * parallelism))))
    else:
        results = [_run_trial(job) for job in jobs]
    records = [r for trial in results for r in trial]
    return StudyReport(cfg, trials, records)


# Singular-circle probes


def _two_point_matrix(kernel: TpsKernel, domain: Domain, cset: CollocationSet) -> np.ndarray:
    return assemble(kernel, domain, cset, validate=False).data


def singular_probe(kernel: TpsKernel, deltas=(1e-2, 1e-4, 1e-6)) -> dict:
    """Place two points on the circle where the Laplacian kernel vanishes.

    Case ``interior-pair``: P1 = (0, 0), P2 = (r, 0). Case ``mixed``:
    Q1 = (1, 0) on the unit circle and P1 = (1 - r, 0). Each is also run at
    radius r + delta for the given deltas.
    """
    domain = Domain(builtin_curve("disk"))
    rc = kernel.critical_radius()
    report = {"nu": kernel.nu, "critical_radius": rc, "cases": {}}

    def interior_pair(r):
        return CollocationSet(np.array([[0.0, 0.0], [r, 0.0]]), np.zeros(0), np.zeros((0, 2)))

    def mixed(r):
        return CollocationSet(np.array([[1.0 - r, 0.0]]), np.array([0.0]), np.array([[1.0, 0.0]]))

    for name, make in (("interior-pair", interior_pair), ("mixed", mixed)):
        rows = []
        for delta in (0.0,) + tuple(deltas):
            cset = make(rc + delta)
            if kernel.nu >= 2:
                k2 = _two_point_matrix(kernel, domain, cset)
                det, max_sq = float(np.linalg.det(k2)), float(np.max(np.abs(k2))) ** 2
            else:
                # no assembled matrix for nu = 1; only the closed form is reported
                det = max_sq = math.nan
            rows.append({
                "delta": delta,
                "det": det,
                "closed_form": closed_form_det(kernel, cset),
                "max_entry_sq": max_sq,
                "kernel_scale_sq": (4 * kernel.nu * rc ** (2 * kernel.nu - 2)) ** 2,
            })
        report["cases"][name] = rows
    return report


def probe_csv(report: dict) -> str:
    buf = io.StringIO()
    buf.write(f"# nu={report['nu']} critical_radius={_fmt(report['critical_radius'])}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "delta", "det", "closed_form", "max_entry_sq", "kernel_scale_sq"])
    for name, rows in report["cases"].items():
        for r in rows:
            w.writerow([name, _fmt(r["delta"]), _fmt(r["det"]), _fmt(r["closed_form"]),
                        _fmt(r["max_entry_sq"]), _fmt(r["kernel_scale_sq"])])
    return buf.getvalue()


# Convergence


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    seed: int
    max_err: float
    rms_err: float
    logdet: float
    smin: float
    smax: float
    flagged: bool

    @property
    def cond(self) -> float:
        return self.smax / self.smin if self.smin > 0 else math.inf

    def row(self) -> list:
        return [self.N, self.seed, _fmt(self.max_err), _fmt(self.rms_err), _fmt(self.logdet),
                _fmt(self.smin), _fmt(self.smax), _fmt(self.cond), int(self.flagged)]


def split_size(N: int, boundary_fraction: float) -> tuple[int, int]:
    m = max(1, int(round(N * boundary_fraction)))
    return N - m, m


def convergence_study(domain: Domain, kernel: TpsKernel, case: ManufacturedCase | str, ladder,
                      seeds, boundary_fraction: float = 0.25, resolution: int = 50) -> list[ConvergenceRow]:
    if isinstance(case, str):
        case = MANUFACTURED[case]
    ladder = list(ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("N ladder must be increasing")
    rows = []
    for N in ladder:
        n, m = split_size(N, boundary_fraction)
        for seed in seeds:
            cset = sample_set(domain, n, m, SeededGenerator(seed))
            try:
                sol = solve_on_set(domain, kernel, cset, case.rhs, seed=seed)
            except linalg.SingularSystemError as exc:
                dg = exc.diagnostics["diagnostics"]
                rows.append(ConvergenceRow(N, seed, math.nan, math.nan, dg.logdet, dg.smin, dg.smax, True))
                continue
            mx, rms = grid_error(sol, case, domain, resolution)
            dg = sol.diagnostics
            rows.append(ConvergenceRow(N, seed, mx, rms, dg.logdet, dg.smin, dg.smax, False))
    return rows


def convergence_medians(rows) -> dict[int, tuple[float, int]]:
    """N -> (median max-error over non-flagged solves, flagged count)."""
    out = {}
    for N in sorted({r.N for r in rows}):
        sel = [r for r in rows if r.N == N]
        good = [r.max_err for r in sel if not r.flagged]
        out[N] = (float(np.median(good)) if good else math.nan, sum(r.flagged for r in sel))
    return out


def convergence_csv(rows, metadata: str = "") -> str:
    buf = io.StringIO()
    if metadata:
        buf.write(metadata + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONVERGENCE_COLUMNS)
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()
