"""Experiment runner: boundary-approach sweeps, scaling sweeps, oracles and reports.

Rows of a sweep are computed concurrently and written in index order.  CSV
values carry 17 significant digits; a JSON sidecar next to the CSV records
the configuration, the targets and the extrapolation model.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import PseudoconvexityError
from .geometry import BERGMAN, KOBAYASHI_FUKS, curvature_data
from .kernels import (
    KernelProvider,
    ReinhardtKernel,
    ReinhardtSpec,
    _as_point,
    ball_kernel,
    choose_truncation,
    polydisc_kernel,
    reinhardt_kernel,
    reinhardt_moment,
    reinhardt_moment_quad,
    siegel_kernel,
)
from .scaling import (
    DomainModel,
    b_star,
    ball_model,
    ellipsoid_model,
    levi_check,
    levi_form,
    make_scaling_step,
    nearest_boundary_point,
    siegel_model,
    tangent_basis,
    tangent_split,
)
from .tolerances import BALL_ORACLE_RTOL, MOMENT_QUAD_RTOL

log = logging.getLogger(__name__)

ASYMPTOTIC_QUANTITIES = ("a", "b", "c", "d", "e", "f")
SCALING_QUANTITIES = ("K", "g", "beta", "ds2", "R", "Ric")
SERIES_DOMAINS = ("ellipsoid",)
EXACT_DOMAINS = ("ball", "siegel", "polydisc")
ERROR_MODELS = {"delta": 1.0, "sqrt": 0.5}
# absolute floor under which an error counts as roundoff in monotonicity checks
MONOTONE_ABS_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# configuration


def parse_complex(text: str) -> complex:
    """``a+bi`` style literal (``i`` or ``j`` accepted)."""
    s = text.strip().replace(" ", "").replace("I", "j").replace("i", "j")
    if s.endswith("j") and s[:-1] in ("", "+", "-"):
        s = s[:-1] + "1j"
    return complex(s)


def parse_vector(text) -> np.ndarray:
    if isinstance(text, str):
        parts = [t for t in text.replace(",", " ").replace(";", " ").split() if t]
        return np.array([parse_complex(t) for t in parts], dtype=complex)
    return np.asarray(text, dtype=complex)


def _format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


@dataclass
class ExperimentConfig:
    domain: str = "ball"
    n: int = 2
    p: tuple = ()
    N: int | None = None  # None: chosen per point so the tail flag stays clear
    point: np.ndarray | None = None
    vector: object = "mixed"  # explicit array or "normal" | "tangent" | "mixed"
    delta0: float | None = None
    kappa: float = 0.5
    m: int | None = None
    quantities: tuple = ()
    output: str | None = None
    kind: str = KOBAYASHI_FUKS
    extrapolation: str = "delta"
    raw_rtol: float | None = None
    raw_delta: float | None = None
    extrap_rtol: float | None = None
    final_rtol: float | None = None
    monotone_slack: float = 0.05
    check_monotone: bool = True
    workers: int = 4

    _INT = ("n", "N", "m", "workers")
    _FLOAT = ("delta0", "kappa", "raw_rtol", "raw_delta", "extrap_rtol", "final_rtol", "monotone_slack")

    def __post_init__(self):
        self.domain = self.domain.strip().lower()
        if self.domain not in SERIES_DOMAINS + EXACT_DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.domain == "ellipsoid":
            if not self.p:
                self.p = (1.0, 2.0)
            self.p = tuple(float(x) for x in self.p)
            self.n = len(self.p)
        if self.n < 1:
            raise ValueError("n must be positive")
        series = self.domain in SERIES_DOMAINS
        if self.delta0 is None:
            self.delta0 = 0.04 if series else 0.1
        if self.m is None:
            self.m = 4 if series else 8
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must lie in (0, 1)")
        if self.m < 1 or self.delta0 <= 0:
            raise ValueError("schedule needs m >= 1 and delta0 > 0")
        if self.extrapolation not in ERROR_MODELS:
            raise ValueError(f"extrapolation model must be one of {sorted(ERROR_MODELS)}")
        if self.point is not None:
            self.point = parse_vector(self.point)
            if self.point.size != self.n:
                raise ValueError("point has the wrong dimension")
        if isinstance(self.vector, str) and self.vector.strip().lower() in ("normal", "tangent", "mixed"):
            self.vector = self.vector.strip().lower()
        else:
            self.vector = parse_vector(self.vector)
            if self.vector.size != self.n:
                raise ValueError("vector has the wrong dimension")
        self.quantities = tuple(self.quantities)

    @property
    def schedule(self) -> list[float]:
        return [self.delta0 * self.kappa**j for j in range(self.m)]

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        kw = {}
        names = {f for f in cls.__dataclass_fields__ if not f.startswith("_")}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in names:
                raise ValueError(f"line {lineno}: unknown key {key!r}")
            kw[key] = cls._coerce(key, value)
        return cls(**kw)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def _coerce(cls, key: str, value: str):
        low = value.lower()
        if low in ("none", "auto", ""):
            return None
        if key in cls._INT:
            return int(value)
        if key in cls._FLOAT:
            return float(value)
        if key == "check_monotone":
            return low in ("1", "true", "yes", "on")
        if key == "p":
            return tuple(float(t) for t in value.replace(",", " ").split())
        if key == "quantities":
            return tuple(t for t in value.replace(",", " ").split())
        if key == "point":
            return parse_vector(value)
        if key == "vector":
            return low if low in ("normal", "tangent", "mixed") else parse_vector(value)
        return value

    def to_dict(self) -> dict:
        out = {}
        for k in self.__dataclass_fields__:
            if k.startswith("_"):
                continue
            v = getattr(self, k)
            if isinstance(v, np.ndarray):
                v = [_format_complex(x) for x in v]
            elif isinstance(v, tuple):
                v = list(v)
            out[k] = v
        return out


# ---------------------------------------------------------------------------
# domains


def default_point(config: ExperimentConfig) -> np.ndarray:
    n = config.n
    if config.point is not None:
        return config.point
    if config.domain == "ellipsoid":
        return np.array([n ** (-1.0 / (2 * pi)) for pi in config.p], dtype=complex)
    p = np.zeros(n, dtype=complex)
    if config.domain == "ball":
        p[-1] = 1.0
    return p


def domain_model(config: ExperimentConfig, N: int | None = None) -> DomainModel:
    if config.domain == "ball":
        return ball_model(config.n)
    if config.domain == "siegel":
        return siegel_model(config.n)
    if config.domain == "ellipsoid":
        return ellipsoid_model(ReinhardtSpec(config.p, N or config.N or 40))
    raise PseudoconvexityError(f"{config.domain} has no strictly pseudoconvex smooth boundary to approach")


def series_model(config: ExperimentConfig, points, D: int = 6) -> tuple[DomainModel, bool]:
    """Model whose series kernel is truncated so the tail flag is clear at ``points``."""
    if config.domain not in SERIES_DOMAINS:
        return domain_model(config), True
    spec = ReinhardtSpec(config.p, config.N or 40)
    if config.N is None:
        spec = choose_truncation(spec, points, D)
    model = ellipsoid_model(spec)
    prov = model.provider
    trusted = all(not prov.series_info(z, D).flagged for z in points)
    return model, trusted


def provider_for(domain: str, n: int, p=(), N: int | None = None) -> KernelProvider:
    domain = domain.lower()
    if domain == "ball":
        return ball_kernel(n)
    if domain == "polydisc":
        return polydisc_kernel(n)
    if domain == "siegel":
        return siegel_kernel(n)
    if domain == "ellipsoid":
        return reinhardt_kernel(ReinhardtSpec(tuple(p) or (1.0, 2.0), N or 40))
    raise ValueError(f"unknown domain {domain!r}")


def direction(config: ExperimentConfig, model: DomainModel, p0) -> np.ndarray:
    X = config.vector
    if not isinstance(X, str):
        return X
    g = model.grad_zbar(p0)
    nu = g / np.linalg.norm(g)
    tang = tangent_basis(model, p0)
    if X == "normal":
        return nu
    if tang.shape[0] == 0:
        return nu
    if X == "tangent":
        return tang[0]
    return nu + tang[0]


# ---------------------------------------------------------------------------
# rows and reports


def richardson(f_coarse: float, f_fine: float, kappa: float, order: float) -> float:
    """Two-point limit estimate assuming ``f(delta) = L + c delta^order``."""
    k = kappa**order
    return (f_fine - k * f_coarse) / (1.0 - k)


def rel_err(value: float, target: float) -> float:
    if target == 0:
        return abs(value)
    return abs(value - target) / abs(target)


@dataclass
class ExperimentRow:
    j: int
    delta: float
    eta: float
    values: dict
    targets: dict
    rel_errors: dict = field(default_factory=dict)
    extrapolated: dict = field(default_factory=dict)
    extrap_errors: dict = field(default_factory=dict)
    trusted: bool = True
    N: int | None = None
    extras: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    name: str
    quantities: tuple
    rows: list
    targets: dict
    checks: dict
    metadata: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def csv_header(self) -> list[str]:
        head = ["j", "delta", "eta", "N", "trusted"]
        for q in self.quantities:
            head += [q, f"{q}_target", f"{q}_rel_err", f"{q}_extrap", f"{q}_extrap_rel_err"]
        return head

    def csv_rows(self):
        fmt = lambda x: "" if x is None else format(float(x), ".17g")
        for r in self.rows:
            out = [str(r.j), fmt(r.delta), fmt(r.eta), "" if r.N is None else str(r.N), str(int(r.trusted))]
            for q in self.quantities:
                out += [fmt(r.values[q]), fmt(r.targets[q]), fmt(r.rel_errors[q]),
                        fmt(r.extrapolated.get(q)), fmt(r.extrap_errors.get(q))]
            yield out

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(self.csv_header())
            w.writerows(self.csv_rows())
        meta = dict(self.metadata, name=self.name, targets=self.targets, checks=self.checks, passed=self.passed)
        path.with_suffix(path.suffix + ".json").write_text(json.dumps(meta, indent=2, default=_json_default), encoding="utf-8")
        return path

    def summary(self) -> str:
        lines = [f"{self.name}:"]
        last = self.rows[-1]
        for q in self.quantities:
            ex = last.extrapolated.get(q)
            ex_s = "" if ex is None else f"  extrap {ex:.12g} (rel {last.extrap_errors[q]:.3g})"
            lines.append(f"  {q:>5}: raw {last.values[q]:.12g}  target {last.targets[q]:.12g}  rel {last.rel_errors[q]:.3g}{ex_s}")
        for k, ok in self.checks.items():
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] {k}")
        return "\n".join(lines)


def _json_default(x):
    if isinstance(x, np.ndarray):
        return [_format_complex(v) for v in x]
    if isinstance(x, (complex, np.complexfloating)):
        return _format_complex(x)
    if isinstance(x, np.generic):
        return x.item()
    return str(x)


def _fill_errors(rows: list[ExperimentRow], quantities, kappa: float, models: dict) -> None:
    for i, r in enumerate(rows):
        for q in quantities:
            r.rel_errors[q] = rel_err(r.values[q], r.targets[q])
            if i > 0:
                prev = rows[i - 1]
                k = r.delta / prev.delta
                ex = richardson(prev.values[q], r.values[q], k, ERROR_MODELS[models[q]])
                r.extrapolated[q] = ex
                r.extrap_errors[q] = rel_err(ex, r.targets[q])


def _monotone(errors: list[float], slack: float) -> bool:
    return all(b <= a * (1 + slack) + MONOTONE_ABS_FLOOR for a, b in zip(errors, errors[1:]))


def _run_rows(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# boundary limits along the inward normal


def asymptotic_targets(n: int, XN_norm: float, levi: float) -> dict:
    c = (n + 1) ** n * (n + 2) ** n
    return {
        "a": c / 2 ** (n + 1),
        "b": 0.5 * math.sqrt((n + 1) * (n + 2)) * XN_norm,
        "c": math.sqrt(0.5 * (n + 1) * (n + 2) * levi),
        "d": c * math.pi**n / math.factorial(n),
        "e": -2.0 / ((n + 1) * (n + 2)),
        "f": -1.0 / (n + 2),
    }


def run_asymptotics(config: ExperimentConfig) -> ExperimentReport:
    """Approach ``p0`` along the inward normal and record the six boundary quantities."""
    n = config.n
    base = domain_model(config)
    p0 = default_point(config)
    if abs(base.r(p0)) > 1e-12:
        raise ValueError("point is not on the boundary")
    levi_eigs = levi_check(base, p0)
    levi_det = float(np.prod(levi_eigs)) if levi_eigs.size else 1.0
    X = direction(config, base, p0)
    split0 = tangent_split(base, p0, X, foot=p0)
    levi0 = levi_form(base, p0, split0.X_H) if np.any(split0.X_H) else 0.0
    targets = asymptotic_targets(n, float(np.linalg.norm(split0.X_N)), levi0)
    quantities = config.quantities or ASYMPTOTIC_QUANTITIES
    g0 = base.grad_zbar(p0)
    nu = g0 / np.linalg.norm(g0)

    def row(jd):
        j, d = jd
        zeta = p0 - d * nu
        model, trusted = series_model(config, [zeta])
        foot, dist = nearest_boundary_point(model, zeta)
        cd = curvature_data(model.provider, zeta, config.kind)
        sp = tangent_split(model, zeta, X, foot=foot)
        vals = {
            "a": dist ** (n + 1) * cd.volume,
            "b": dist * cd.length(sp.X_N),
            "c": math.sqrt(dist) * cd.length(sp.X_H),
            "d": cd.beta,
            "e": cd.hsc(X),
            "f": cd.ricci(X),
        }
        N = model.provider.spec.N if isinstance(model.provider, ReinhardtKernel) else None
        return ExperimentRow(j, dist, dist * float(np.linalg.norm(model.grad_zbar(foot))),
                             {q: vals[q] for q in quantities}, {q: targets[q] for q in quantities},
                             trusted=trusted, N=N, extras={"foot": foot})

    rows = _run_rows(row, list(enumerate(config.schedule)), config.workers)
    models = {q: config.extrapolation for q in quantities}
    _fill_errors(rows, quantities, config.kappa, models)

    series = config.domain in SERIES_DOMAINS
    raw_rtol = config.raw_rtol if config.raw_rtol is not None else (0.05 if series else 0.01)
    extrap_rtol = config.extrap_rtol if config.extrap_rtol is not None else (None if series else 1e-6)
    raw_delta = config.raw_delta if config.raw_delta is not None else rows[-1].delta
    checked = [r for r in rows if r.delta <= raw_delta * (1 + 1e-9)]
    checks = {"all rows trusted (series tail clear)": all(r.trusted for r in rows)}
    for q in quantities:
        checks[f"{q}: raw rel err <= {raw_rtol:g} for delta <= {raw_delta:g}"] = all(
            r.rel_errors[q] <= raw_rtol for r in checked
        )
        if extrap_rtol is not None and len(rows) > 1:
            checks[f"{q}: extrapolated rel err <= {extrap_rtol:g}"] = rows[-1].extrap_errors[q] <= extrap_rtol
        if config.check_monotone and len(rows) > 1:
            checks[f"{q}: error decreasing along schedule"] = _monotone([r.rel_errors[q] for r in rows], config.monotone_slack)

    a_levi = asymptotic_targets(n, 0.0, 0.0)["a"] * levi_det
    meta = {
        "config": config.to_dict(),
        "p0": p0,
        "X": X,
        "X_H_p0": split0.X_H,
        "X_N_p0": split0.X_N,
        "levi_form_X_H": levi0,
        "levi_eigenvalues": levi_eigs.tolist(),
        "a_target_times_levi_det": a_levi,
        "error_model": models,
        "extrapolation": "two-point Richardson on consecutive rows, f = L + c*delta^q",
    }
    return ExperimentReport(f"asymptotics[{config.domain} n={n}]", quantities, rows, targets, checks, meta)


# ---------------------------------------------------------------------------
# scaled kernels at b*


def siegel_targets(n: int, X, kind: str = KOBAYASHI_FUKS) -> dict:
    prov = siegel_kernel(n)
    bs = b_star(n)
    cd = curvature_data(prov, bs, kind)
    return {
        "K": prov.evaluate(bs).real,
        "g": cd.volume,
        "beta": cd.beta,
        "ds2": cd.length_sq(X),
        "R": cd.hsc(X),
        "Ric": cd.ricci(X),
    }


def run_scaling(config: ExperimentConfig) -> ExperimentReport:
    """Scaled kernels and invariants at ``b*`` against the Siegel values."""
    n = config.n
    base = domain_model(config)
    p0 = default_point(config)
    levi_check(base, p0)
    X = config.vector if not isinstance(config.vector, str) else _scaling_direction(config.vector, n)
    targets = siegel_targets(n, X, config.kind)
    quantities = config.quantities or SCALING_QUANTITIES
    g0 = base.grad_zbar(p0)
    nu = g0 / np.linalg.norm(g0)
    bs = b_star(n)

    def row(jd):
        j, d = jd
        model, trusted = series_model(config, [p0 - d * nu])
        step = make_scaling_step(model, p0, d, index=j)
        prov = step.provider
        cd = curvature_data(prov, bs, config.kind)
        vals = {
            "K": prov.evaluate(bs).real,
            "g": cd.volume,
            "beta": cd.beta,
            "ds2": cd.length_sq(X),
            "R": cd.hsc(X),
            "Ric": cd.ricci(X),
        }
        N = model.provider.spec.N if isinstance(model.provider, ReinhardtKernel) else None
        return ExperimentRow(j, step.delta, step.eta, {q: vals[q] for q in quantities},
                             {q: targets[q] for q in quantities}, trusted=trusted, N=N,
                             extras={"residuals": step.residuals, "Q_minus_I": float(np.linalg.norm(step.Q - np.eye(n), 2))})

    rows = _run_rows(row, list(enumerate(config.schedule)), config.workers)
    models = {q: config.extrapolation for q in quantities}
    _fill_errors(rows, quantities, config.kappa, models)
    final_rtol = config.final_rtol if config.final_rtol is not None else 1e-3
    checks = {"all rows trusted (series tail clear)": all(r.trusted for r in rows)}
    for q in quantities:
        if config.check_monotone and len(rows) > 1:
            checks[f"{q}: error decreasing along schedule"] = _monotone([r.rel_errors[q] for r in rows], config.monotone_slack)
        checks[f"{q}: final raw rel err <= {final_rtol:g}"] = rows[-1].rel_errors[q] <= final_rtol
    meta = {
        "config": config.to_dict(),
        "p0": p0,
        "X": X,
        "error_model": models,
        "residuals": [r.extras["residuals"] for r in rows],
        "Q_minus_I": [r.extras["Q_minus_I"] for r in rows],
    }
    return ExperimentReport(f"scaling[{config.domain} n={n}]", quantities, rows, targets, checks, meta)


def _scaling_direction(kind: str, n: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    if kind == "normal" or n == 1:
        e[-1] = 1.0
    elif kind == "tangent":
        e[0] = 1.0
    else:
        e[0] = 1.0
        e[-1] = 1.0
    return e


# ---------------------------------------------------------------------------
# closed-form oracles


@dataclass
class OracleReport:
    name: str
    max_rel_errors: dict
    tolerance: float
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(e <= self.tolerance for e in self.max_rel_errors.values())

    def summary(self) -> str:
        lines = [f"{self.name}:"]
        for k, e in self.max_rel_errors.items():
            lines.append(f"  [{'PASS' if e <= self.tolerance else 'FAIL'}] {k}: max rel err {e:.3g} (tol {self.tolerance:g})")
        return "\n".join(lines)


def sample_ball_points(n: int, count: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / (2 * n))
    return v * r[:, None]


def run_ball_oracle(n: int, count: int = 25, radius: float = 0.8, seed: int = 0) -> OracleReport:
    import time

    if not 1 <= n <= 3:
        raise ValueError("n must be 1, 2 or 3")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    pts = sample_ball_points(n, count, radius, rng)
    dirs = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    K = ball_kernel(n)
    c = (n + 1) ** n * (n + 2) ** n
    errs = {"g": 0.0, "beta": 0.0, "R": 0.0, "Ric": 0.0}
    for z, X in zip(pts, dirs):
        cd = curvature_data(K, z, KOBAYASHI_FUKS)
        rho = 1 - float(np.vdot(z, z).real)
        errs["g"] = max(errs["g"], rel_err(cd.volume, c * rho ** -(n + 1)))
        errs["beta"] = max(errs["beta"], rel_err(cd.beta, c * math.pi**n / math.factorial(n)))
        errs["R"] = max(errs["R"], rel_err(cd.hsc(X), -2.0 / ((n + 1) * (n + 2))))
        errs["Ric"] = max(errs["Ric"], rel_err(cd.ricci(X), -1.0 / (n + 2)))
    return OracleReport(f"ball-oracle n={n}", errs, BALL_ORACLE_RTOL, time.perf_counter() - t0)


def run_polydisc_oracle(n: int, count: int = 25, radius: float = 0.8, seed: int = 0, tol: float = 1e-9) -> OracleReport:
    rng = np.random.default_rng(seed)
    pts = (radius * np.sqrt(rng.random((count, n)))) * np.exp(2j * math.pi * rng.random((count, n)))
    K = polydisc_kernel(n)
    err_diag = 0.0
    err_off = 0.0
    for z in pts:
        G = curvature_data(K, z, KOBAYASHI_FUKS).G
        want = 2 * (n + 2) / (1 - np.abs(z) ** 2) ** 2
        err_diag = max(err_diag, float(np.max(np.abs(np.diag(G).real - want) / want)))
        err_off = max(err_off, float(np.max(np.abs(G - np.diag(np.diag(G)))) / np.max(want)))
    return OracleReport(f"polydisc-oracle n={n}", {"diag": err_diag, "offdiag": err_off}, tol)


# ---------------------------------------------------------------------------
# moments and point evaluation


@dataclass
class MomentRow:
    alpha: tuple
    c: float
    c_quad: float

    @property
    def rel_err(self) -> float:
        return rel_err(self.c, self.c_quad)


def run_moments(p, max_degree: int = 4, tol: float = MOMENT_QUAD_RTOL) -> tuple[list[MomentRow], bool]:
    """Closed-form moments for ``|alpha| <= max_degree`` checked against quadrature."""
    from .kernels import _multi_indices

    p = tuple(float(x) for x in p)
    rows = [MomentRow(tuple(a), reinhardt_moment(p, a), reinhardt_moment_quad(p, a))
            for a in _multi_indices(len(p), max_degree)]
    return rows, all(r.rel_err <= tol for r in rows)


def write_moments(path, rows: list[MomentRow]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = len(rows[0].alpha) if rows else 0
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"alpha{i + 1}" for i in range(n)] + ["c", "c_quad", "rel_err"])
        for r in rows:
            w.writerow([*r.alpha, format(r.c, ".17g"), format(r.c_quad, ".17g"), format(r.rel_err, ".17g")])
    return path


def evaluate_point(provider: KernelProvider, z, X=None) -> dict:
    """Kernel, both metrics, canonical invariants and curvatures at ``z``."""
    z = _as_point(z)
    n = z.size
    X = np.eye(n, dtype=complex)[0] if X is None else _as_point(X)
    b = curvature_data(provider, z, BERGMAN)
    kf = curvature_data(provider, z, KOBAYASHI_FUKS)
    return {
        "K": provider.evaluate(z).real,
        "G_b": b.G,
        "G_kf": kf.G,
        "beta_b": b.beta,
        "beta_kf": kf.beta,
        "R_b": b.hsc(X),
        "R_kf": kf.hsc(X),
        "Ric_b": b.ricci(X),
        "Ric_kf": kf.ricci(X),
    }


__all__ = [
    "ExperimentConfig", "ExperimentRow", "ExperimentReport", "OracleReport", "MomentRow",
    "run_asymptotics", "run_scaling", "run_ball_oracle", "run_polydisc_oracle", "run_moments",
    "write_moments", "evaluate_point", "richardson", "asymptotic_targets", "siegel_targets",
    "provider_for", "parse_complex", "parse_vector",
]
