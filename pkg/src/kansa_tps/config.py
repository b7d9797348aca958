"""Run configuration: JSON schema, validation and builders for domains and
densities."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import Domain, builtin_curve, curve_from_dict
from .sampling import (
    DensitySpec, boundary_probe, certify, constant_density, expression_density, gaussian_bump,
    interior_probe, uniform_density,
)

SUBCOMMANDS = ("solve", "unisolvence", "probe", "convergence", "sample")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    domain: str | dict = "disk"
    nu: int = 2
    n: int = 25
    m: int = 15
    policy: str = "alternate"
    p_interior: float = 0.5
    interior_density: str | dict | None = None
    boundary_density: str | dict | None = None
    seed: int = 0
    trials: int = 10
    parallelism: int = 1
    out: str = "out"
    # solve / convergence
    case: str | None = "quadratic"
    f: str | None = None
    g: str | None = None
    ladder: list = field(default_factory=lambda: [40, 80, 160])
    seeds: int = 20
    boundary_fraction: float = 0.25
    resolution: int = 50

    def validate(self, command: str) -> None:
        if command not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {command!r}")
        if not isinstance(self.nu, int) or self.nu < 1:
            raise ConfigError("nu must be a positive integer")
        if command in ("solve", "unisolvence", "convergence") and self.nu < 2:
            raise ConfigError("nu >= 2 is required: the collocation matrix needs the kernel "
                              "Laplacian at its own center, which diverges for nu = 1")
        if command in ("solve", "unisolvence", "sample") and (self.n < 0 or self.m < 0 or self.n + self.m < 2):
            raise ConfigError("need n, m >= 0 and n + m >= 2")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.seeds < 1:
            raise ConfigError("seeds must be >= 1")
        if not 0 < self.boundary_fraction < 1:
            raise ConfigError("boundary_fraction must lie in (0, 1)")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if command == "solve" and self.case is None and (self.f is None or self.g is None):
            raise ConfigError("solve needs a manufactured case or both f and g expressions")
        if command == "convergence" and self.case is None:
            raise ConfigError("convergence needs a manufactured case")
        if command == "convergence" and any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
            raise ConfigError("ladder must be increasing")

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)


def build_domain(spec: str | dict) -> Domain:
    """Built-in name (disk, ellipse:a:b, star3), path to a JSON curve file, or
    a dict of Fourier coefficient arrays."""
    try:
        if isinstance(spec, dict):
            return Domain(curve_from_dict(spec))
        if Path(spec).suffix == ".json" and Path(spec).exists():
            return Domain(curve_from_dict(json.loads(Path(spec).read_text())))
        return Domain(builtin_curve(spec))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_density(spec, domain: Domain, support: str) -> DensitySpec | None:
    """Density from a spec string or dict; None means the default law.

    Strings: ``uniform``, ``arclength`` (boundary default), ``constant:v``,
    ``gaussian-bump[:cx:cy:width]``, ``expr:<expression>``. Dicts carry a
    ``kind`` key plus the same parameters by name, and an optional ``bound``.
    """
    if spec is None or spec == "arclength" or (spec == "uniform" and support == "interior"):
        return None
    if isinstance(spec, str):
        kind, _, rest = spec.partition(":")
        params = {}
        if kind == "constant":
            params = {"value": float(rest)}
        elif kind == "gaussian-bump" and rest:
            cx, cy, w = (float(v) for v in rest.split(":"))
            params = {"center": [cx, cy], "width": w}
        elif kind == "expr":
            params = {"text": rest}
        spec = {"kind": kind, **params}
    spec = dict(spec)
    kind = spec.pop("kind", None)
    probe = interior_probe(domain) if support == "interior" else boundary_probe(domain.boundary)
    try:
        if kind == "uniform":
            density = uniform_density()
        elif kind == "constant":
            density = constant_density(spec["value"], spec.get("bound", 1.0))
        elif kind == "gaussian-bump":
            density = gaussian_bump(spec.get("center", (0.0, 0.0)), spec.get("width", 0.3))
        elif kind in ("expr", "expression"):
            density = expression_density(spec["text"], spec.get("bound"), probe)
        else:
            raise ConfigError(f"unknown density kind {kind!r}")
        certify(density, probe)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad {support} density {spec!r}: {exc}") from exc
    return density
