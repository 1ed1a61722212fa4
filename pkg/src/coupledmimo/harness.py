"""Deterministic Monte-Carlo sweeps and CSV output.

Every grid point draws its trials from the same per-trial streams, seeded by
``(seed, scenario)`` only.  Points therefore share common random numbers, are
independent of each other's presence and of execution order, and a run is
byte-for-byte reproducible for any worker count.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from itertools import product
from pathlib import Path

import numpy as np

from coupledmimo.array import ArrayGeometry, grid_for_count
from coupledmimo.coupling import DipoleParams
from coupledmimo.errors import SingularSystemError, UnsupportedConfigurationError
from coupledmimo.metrics import (
    QosParams,
    draw_realization,
    effective_capacity_bootstrap,
    max_rate_closed_form,
    receive_snr,
    shannon_rate,
    trial_generators,
)
from coupledmimo.precoding import (
    default_detection_matrix,
    optimal_detection_matrix,
    optimal_precoder,
    zf_precoder,
)

SCENARIOS = (
    "gd_vs_spacing",
    "gm_vs_count",
    "ec_vs_count_snr",
    "ec_vs_theta_spacing",
    "rate_feq_vs_zf",
    "ec_vs_theta_bound",
    "ec_vs_directions",
)

# columns after ``scenario`` in the CSV, per scenario
SWEPT = {
    "gd_vs_spacing": ("snr_db", "spacing"),
    "gm_vs_count": ("snr_db", "M", "m", "n"),
    "ec_vs_count_snr": ("snr_db", "M", "m", "n"),
    "ec_vs_theta_spacing": ("snr_db", "spacing", "theta"),
    "rate_feq_vs_zf": ("snr_db", "M", "m", "n"),
    "ec_vs_theta_bound": ("snr_db", "theta"),
    "ec_vs_directions": ("snr_db", "P"),
}

RATIO2_GRIDS = ((4, 2), (6, 3), (8, 4), (12, 6), (16, 8))


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    snr_db_list: tuple = (0.0, 5.0, 10.0)
    antenna_counts: tuple = ((16, 8),)
    spacings: tuple = (0.5,)
    theta_list: tuple = (0.01,)
    P_list: tuple = (70,)
    N: int = 4
    N_s: int = 1
    trials: int = 500
    seed: int = 0
    T: float = 1e-3
    B: float = 1e6
    Z_L: complex = 50.0
    dipole_length: float = 0.5
    dipole_diameter: float = 0.001
    d_min: float = 0.1
    beta: float = 1.0
    n_boot: int = 200

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        for name in ("snr_db_list", "antenna_counts", "spacings", "theta_list", "P_list"):
            value = tuple(getattr(self, name))
            if not value:
                raise ValueError(f"{name} must be nonempty")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "antenna_counts", tuple(tuple(int(x) for x in g) for g in self.antenna_counts))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.N < 1 or self.N_s < 1:
            raise ValueError("N and N_s must be >= 1")

    @property
    def dipole(self) -> DipoleParams:
        return DipoleParams.from_diameter(self.dipole_length, self.dipole_diameter, self.Z_L)


@dataclass(frozen=True)
class SweepRow:
    scenario: str
    params: dict = field(hash=False)
    metric: str
    value: float
    stderr: float
    trials: int
    seed: int


def default_config(scenario, **overrides) -> ExperimentConfig:
    """Scenario defaults: 16x8 array, 0.1 wavelength minimum spacing, P = 70, 50 Ohm loads."""
    spacing_grid = tuple(round(0.1 * k, 1) for k in range(1, 11))
    theta_grid = (0.001, 0.01, 0.1, 1.0)
    base = dict(scenario=scenario)
    if scenario == "gd_vs_spacing":
        base.update(antenna_counts=((1, 1),), spacings=spacing_grid)
    elif scenario == "gm_vs_count":
        base.update(antenna_counts=((1, 1),) + RATIO2_GRIDS, spacings=(0.1,))
    elif scenario == "ec_vs_count_snr":
        base.update(antenna_counts=RATIO2_GRIDS, spacings=(0.5,), theta_list=(0.01,))
    elif scenario == "ec_vs_theta_spacing":
        base.update(antenna_counts=((16, 8),), spacings=(0.1, 0.25, 0.5, 0.75, 1.0),
                    theta_list=theta_grid, snr_db_list=(10.0,))
    elif scenario == "rate_feq_vs_zf":
        base.update(antenna_counts=tuple(grid_for_count(M) for M in (8, 32, 72, 128)),
                    spacings=(0.5,), N=1, N_s=1)
    elif scenario == "ec_vs_theta_bound":
        base.update(antenna_counts=((16, 8),), spacings=(0.5,), theta_list=theta_grid)
    elif scenario == "ec_vs_directions":
        base.update(antenna_counts=((16, 8),), spacings=(0.5,), P_list=(10, 30, 50, 70, 90, 110))
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    base.update(overrides)
    return ExperimentConfig(**base)


def _stream_seed(cfg: ExperimentConfig):
    return np.random.SeedSequence([cfg.seed, SCENARIOS.index(cfg.scenario)])


def monte_carlo(cfg: ExperimentConfig, geometry: ArrayGeometry, P, snr, metrics=("rate",)):
    """Per-trial samples at one grid point.

    ``metrics`` picks from ``rate`` (optimal precoder, closed form), ``rate_eq21``
    (optimal precoder and detector through the matrix formula), ``rate_zf``,
    ``xi`` (receive SNR), ``trace`` (``||A^T K||_F^2``) and ``rank``.
    """
    out = {name: np.empty(cfg.trials) for name in metrics}
    for t, rng in enumerate(trial_generators(_stream_seed(cfg), cfg.trials)):
        real = draw_realization(geometry, cfg.dipole, cfg.N, P, rng, cfg.beta)
        prec = optimal_precoder(real, cfg.N_s, snr)
        for name in metrics:
            if name == "rate":
                val = max_rate_closed_form(real.singular_values, prec.f_sq, cfg.N_s, snr)
            elif name == "rate_eq21":
                W = optimal_detection_matrix(real, cfg.N_s).W_eq
                val = shannon_rate(real.H_eq, prec.F_eq, W, snr, cfg.N_s)
            elif name == "rate_zf":
                F = zf_precoder(real.H_eq, cfg.N_s)
                W = default_detection_matrix(real.N, cfg.N_s).W_eq
                val = shannon_rate(real.H_eq, F, W, snr, cfg.N_s)
            elif name == "xi":
                val = receive_snr(real, prec.F_eq, snr)
            elif name == "trace":
                val = np.linalg.norm(real.A.T @ real.K) ** 2
            elif name == "rank":
                val = real.r
            else:
                raise ValueError(f"unknown metric {name!r}")
            out[name][t] = val
    return out


def _mean_se(x):
    x = np.asarray(x, dtype=float)
    se = x.std(ddof=1) / math.sqrt(x.size) if x.size > 1 else math.nan
    return float(x.mean()), float(se)


def _bootstrap_rng(cfg):
    return np.random.default_rng([cfg.seed, SCENARIOS.index(cfg.scenario), 1])


def _ec_rows(cfg, rates, thetas, params):
    rows = []
    for theta in thetas:
        est = effective_capacity_bootstrap(rates, QosParams(theta, cfg.T, cfg.B), cfg.n_boot, rng=_bootstrap_rng(cfg))
        rows.append((dict(params, theta=theta), "ec", est.value, est.stderr))
    return rows


def upper_bound_estimate(cfg, traces, ranks, snr, P):
    """Bound value and delta-method standard error from per-trial traces."""
    r = int(np.bincount(np.asarray(ranks, dtype=int)).argmax())
    tr, tr_se = _mean_se(traces)
    inner = (cfg.N_s / r**2) * (cfg.N_s + r / snr) * (tr + P * r)
    value = cfg.B * (r * math.log2(snr / cfg.N_s) + r * math.log2(inner))
    se = cfg.B * r / math.log(2) * tr_se / (tr + P * r) if math.isfinite(tr_se) else math.nan
    return value, se


def _point_rows(cfg: ExperimentConfig, point):
    """Rows for one task; a task covers every QoS exponent of its grid point."""
    s = cfg.scenario
    snr_db = point["snr_db"]
    snr = 10 ** (snr_db / 10)
    P = point.get("P", cfg.P_list[0])
    if s == "gd_vs_spacing":
        m, n = cfg.antenna_counts[0]
        a = monte_carlo(cfg, ArrayGeometry(m, n, point["spacing"]), P, snr, ("xi",))["xi"]
        b = monte_carlo(cfg, ArrayGeometry(m, n, cfg.d_min), P, snr, ("xi",))["xi"]
        return [(point, "G_d", *_mean_se(a - b))]
    if s == "gm_vs_count":
        geo = ArrayGeometry(point["m"], point["n"], cfg.d_min)
        a = monte_carlo(cfg, geo, P, snr, ("xi",))["xi"]
        b = monte_carlo(cfg, ArrayGeometry(1, 1, cfg.d_min), P, snr, ("xi",))["xi"]
        return [(point, "G_M", *_mean_se(a - b))]
    if s == "rate_feq_vs_zf":
        geo = ArrayGeometry(point["m"], point["n"], cfg.spacings[0])
        mc = monte_carlo(cfg, geo, P, snr, ("rate_eq21", "rate_zf"))
        return [(point, "rate_feq", *_mean_se(mc["rate_eq21"])), (point, "rate_zf", *_mean_se(mc["rate_zf"]))]
    if s == "ec_vs_count_snr":
        geo = ArrayGeometry(point["m"], point["n"], cfg.spacings[0])
        rates = monte_carlo(cfg, geo, P, snr)["rate"]
        return _ec_rows(cfg, rates, cfg.theta_list[:1], point)
    if s == "ec_vs_theta_spacing":
        m, n = cfg.antenna_counts[0]
        rates = monte_carlo(cfg, ArrayGeometry(m, n, point["spacing"]), P, snr)["rate"]
        return _ec_rows(cfg, rates, cfg.theta_list, point)
    if s == "ec_vs_theta_bound":
        m, n = cfg.antenna_counts[0]
        geo = ArrayGeometry(m, n, cfg.spacings[0])
        mc = monte_carlo(cfg, geo, P, snr, ("rate", "trace", "rank"))
        bound = upper_bound_estimate(cfg, mc["trace"], mc["rank"], snr, P)
        rows = []
        for params, metric, value, se in _ec_rows(cfg, mc["rate"], cfg.theta_list, point):
            rows.append((params, metric, value, se))
            rows.append((params, "ec_upper_bound", *bound))
        return rows
    if s == "ec_vs_directions":
        m, n = cfg.antenna_counts[0]
        rates = monte_carlo(cfg, ArrayGeometry(m, n, cfg.spacings[0]), P, snr)["rate"]
        return _ec_rows(cfg, rates, cfg.theta_list[:1], point)
    raise ValueError(f"unknown scenario {s!r}")  # pragma: no cover


def grid_points(cfg: ExperimentConfig):
    """Task-level grid in sweep order; the QoS exponent is expanded inside each task."""
    s = cfg.scenario
    snrs = cfg.snr_db_list
    if s == "gd_vs_spacing":
        return [dict(snr_db=a, spacing=d) for a, d in product(snrs, cfg.spacings)]
    if s in ("gm_vs_count", "ec_vs_count_snr", "rate_feq_vs_zf"):
        return [dict(snr_db=a, M=m * n, m=m, n=n) for a, (m, n) in product(snrs, cfg.antenna_counts)]
    if s == "ec_vs_theta_spacing":
        return [dict(snr_db=a, spacing=d) for a, d in product(snrs, cfg.spacings)]
    if s == "ec_vs_theta_bound":
        return [dict(snr_db=a) for a in snrs]
    if s == "ec_vs_directions":
        return [dict(snr_db=a, P=int(p)) for a, p in product(snrs, cfg.P_list)]
    raise ValueError(f"unknown scenario {s!r}")  # pragma: no cover


_METRICS = {
    "gd_vs_spacing": ("G_d",),
    "gm_vs_count": ("G_M",),
    "ec_vs_count_snr": ("ec",),
    "ec_vs_theta_spacing": ("ec",),
    "rate_feq_vs_zf": ("rate_feq", "rate_zf"),
    "ec_vs_theta_bound": ("ec", "ec_upper_bound"),
    "ec_vs_directions": ("ec",),
}


def _error_code(exc):
    if isinstance(exc, UnsupportedConfigurationError):
        return "streams_exceed_rank"
    if isinstance(exc, SingularSystemError):
        return "singular"
    return type(exc).__name__


def _run_point(cfg, point):
    try:
        return _point_rows(cfg, point)
    except (UnsupportedConfigurationError, SingularSystemError, np.linalg.LinAlgError) as exc:
        code = _error_code(exc)
        thetas = cfg.theta_list if cfg.scenario in ("ec_vs_theta_spacing", "ec_vs_theta_bound") else [None]
        rows = []
        for theta in thetas:
            params = point if theta is None else dict(point, theta=theta)
            for metric in _METRICS[cfg.scenario]:
                rows.append((params, f"{metric}:error:{code}", math.nan, math.nan))
        return rows


def run_scenario(cfg: ExperimentConfig, workers=1):
    """Run every grid point of ``cfg`` and return rows in sweep order."""
    points = grid_points(cfg)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda p: _run_point(cfg, p), points))
    else:
        chunks = [_run_point(cfg, p) for p in points]
    columns = SWEPT[cfg.scenario]
    rows = []
    for chunk in chunks:
        for params, metric, value, se in chunk:
            ordered = {c: params[c] for c in columns}
            rows.append(SweepRow(cfg.scenario, ordered, metric, float(value), float(se), cfg.trials, cfg.seed))
    return rows


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def emit_csv(rows, destination):
    """Write rows as UTF-8 CSV with 17-significant-digit floats."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows to write")
    columns = list(rows[0].params)
    header = ["scenario", *columns, "metric", "value", "stderr", "trials", "seed"]
    path = Path(destination)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            if list(row.params) != columns:
                raise ValueError("rows mix different swept-parameter columns")
            writer.writerow([row.scenario, *(_fmt(row.params[c]) for c in columns), row.metric,
                             _fmt(row.value), _fmt(row.stderr), _fmt(row.trials), _fmt(row.seed)])
    return path


# ---------------------------------------------------------------------------
# key = value config files


def _parse_scalar(text, kind):
    text = text.strip()
    if kind is int:
        return int(text)
    if kind is float:
        return float(text)
    if kind is complex:
        return complex(text.replace(" ", ""))
    return text


def _parse_grid(text):
    m, _, n = text.strip().lower().partition("x")
    if not n:
        return grid_for_count(int(m))
    return (int(m), int(n))


_LIST_KINDS = {
    "snr_db_list": float,
    "spacings": float,
    "theta_list": float,
    "P_list": int,
}


def parse_config_text(text, scenario=None) -> ExperimentConfig:
    """Parse ``key = value`` lines (``#`` comments, comma-separated lists).

    ``antenna_counts`` entries are ``MxN`` grids, or a bare total count which is
    mapped to the closest ratio-2 grid.  Keys absent from the file keep the
    scenario defaults.
    """
    values = {}
    kinds = {f.name for f in fields(ExperimentConfig)}
    scalar_kinds = {"N": int, "N_s": int, "trials": int, "seed": int, "n_boot": int, "T": float, "B": float,
                    "Z_L": complex, "dipole_length": float, "dipole_diameter": float, "d_min": float,
                    "beta": float, "scenario": str}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in kinds:
            raise ValueError(f"line {lineno}: expected 'key = value' with a known key, got {raw!r}")
        items = [v for v in value.split(",") if v.strip()]
        if key == "antenna_counts":
            values[key] = tuple(_parse_grid(v) for v in items)
        elif key in _LIST_KINDS:
            values[key] = tuple(_parse_scalar(v, _LIST_KINDS[key]) for v in items)
        else:
            values[key] = _parse_scalar(value, scalar_kinds[key])
    scenario = values.pop("scenario", scenario)
    if scenario is None:
        raise ValueError("config does not name a scenario")
    return default_config(scenario, **values)


def load_config(path, scenario=None) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), scenario)


def with_overrides(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kwargs.items() if v is not None})
