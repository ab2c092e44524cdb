"""Dataset construction and the desk-scale experiment pipelines.

Three pipelines feed the figure plots: a kernel-convergence sweep for plain
gradient descent (fig1), the same sweep for surrogate gradient learning
(fig2), and trained sign-activation ensembles compared against the
surrogate-kernel GP prediction (fig3).  Each pipeline is a pure function of
its configuration and seeds, so rerunning writes byte-identical CSV.

``validate`` runs the internal oracle suite (closed forms vs quadrature vs
Monte Carlo, Jacobians vs finite differences, exact depth-1 kernels,
paired-ensemble covariances, near-diagonal blow-up exponents) and reports one
pass/fail line per check.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .activations import (
    SurrogateSpec,
    make_erf_m,
    make_sign,
    parse_activation,
    parse_surrogate,
)
from .analytic_kernels import (
    KIND_CROSS_NNGP,
    KIND_NNGP,
    KIND_NTK,
    KIND_SG_NTK,
    Divergent,
    KernelSpec,
    erf_spec,
    is_divergent,
    kernel_matrix,
    sign_spec,
    singular_exponent,
)
from .dual_expectations import Cov2, gh_expect, mc_expect, t_erf, tdot_erf
from .empirical_kernels import empirical_ntk, quasi_jacobian
from .errors import PreconditionViolated, SchemaMismatch
from .gp_regression import gp_posterior, posterior_mean, posterior_std
from .network import NetworkConfig, Network, ensemble_statistics, forward, init
from .rng import derive_seed, substream
from .tableio import DIVERGENT_CELL, write_csv
from .training import TrainConfig, ensemble_outputs, init_ensemble, train, train_ensemble

GEOMETRY_SPHERE = "sphere"
GEOMETRY_FREEFORM = "freeform"


def csv_schema() -> dict:
    """The shipped CSV column documentation, keyed by table kind."""
    from importlib import resources

    text = resources.files("sgntk").joinpath("data/csv_schema.json").read_text("utf-8")
    return json.loads(text)

#: Hidden-layer count + 1 used by all figure pipelines (two hidden layers).
EXPERIMENT_DEPTH = 3
SIGMA_W = 1.0
SIGMA_B = 0.1
#: Angle-grid resolutions recorded in every report's metadata.
GRID_KERNEL_FIGS = 128
GRID_ENSEMBLE_FIG = 256

_SPHERE_TOL = 1e-12


# ---------------------------------------------------------------------------
# datasets


def target_polynomial(points) -> np.ndarray:
    """The regression target 4xy^2 - 0.8x^3 + 1.2y^2 - 0.8x^2 y."""
    pts = np.asarray(points, dtype=float)
    x, y = pts[..., 0], pts[..., 1]
    return 4.0 * x * y**2 - 0.8 * x**3 + 1.2 * y**2 - 0.8 * x**2 * y


@dataclass(frozen=True)
class Dataset:
    """Training inputs and targets, with a geometry tag for sphere data."""

    inputs: np.ndarray
    targets: np.ndarray
    geometry: str = GEOMETRY_FREEFORM
    radius: float | None = None

    def __post_init__(self):
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        targets = np.asarray(self.targets, dtype=float)
        if targets.ndim == 1:
            targets = targets[:, None]
        if inputs.shape[0] != targets.shape[0]:
            raise PreconditionViolated(
                f"{inputs.shape[0]} inputs but {targets.shape[0]} targets"
            )
        if self.geometry not in (GEOMETRY_SPHERE, GEOMETRY_FREEFORM):
            raise PreconditionViolated(f"unknown geometry tag {self.geometry!r}")
        if self.geometry == GEOMETRY_SPHERE:
            if self.radius is None or not (self.radius > 0):
                raise PreconditionViolated("sphere geometry needs a positive radius")
            norms = np.linalg.norm(inputs, axis=1)
            off = np.abs(norms - self.radius).max()
            if off > _SPHERE_TOL:
                raise PreconditionViolated(
                    f"input norms deviate from the sphere radius by {off:.2e}"
                )
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return self.inputs.shape[0]


def sphere_points(angles, radius: float = 1.0) -> np.ndarray:
    angles = np.asarray(angles, dtype=float)
    return radius * np.stack([np.cos(angles), np.sin(angles)], axis=-1)


def make_sphere_dataset(count: int, seed: int) -> Dataset:
    """Uniform-angle points on the unit circle with polynomial targets."""
    if count < 1:
        raise PreconditionViolated(f"need at least one point, got {count}")
    gen = substream(seed, "dataset", "angles")
    angles = gen.uniform(0.0, 2.0 * np.pi, int(count))
    pts = sphere_points(angles)
    return Dataset(
        inputs=pts,
        targets=target_polynomial(pts)[:, None],
        geometry=GEOMETRY_SPHERE,
        radius=1.0,
    )


def dataset_angles(data: Dataset) -> np.ndarray:
    """Angles of 2-d inputs in [0, 2pi), for table output."""
    return np.mod(np.arctan2(data.inputs[:, 1], data.inputs[:, 0]), 2.0 * np.pi)


# ---------------------------------------------------------------------------
# kernel curves over the angle grid


def angle_grid(count: int) -> np.ndarray:
    """``count`` evenly spaced angles in [0, 2pi); index 0 is the reference."""
    if count < 2:
        raise PreconditionViolated(f"need at least two grid angles, got {count}")
    return np.arange(int(count)) * (2.0 * np.pi / int(count))


def analytic_curve(spec: KernelSpec, angles, ref_angle: float = 0.0) -> list:
    """Kernel values K(x(angle), x(ref_angle)); entries may be divergent."""
    pts = sphere_points(angles)
    ref = sphere_points([ref_angle])
    gram = kernel_matrix(spec, pts, ref)
    return [
        Divergent() if gram.divergent_mask[i, 0] else float(gram.values[i, 0])
        for i in range(pts.shape[0])
    ]


def empirical_curve(net: Network, angles, ref_angle: float = 0.0,
                    surrogate=None) -> np.ndarray:
    """Empirical tangent-kernel curve K(x(angle), x(ref_angle)).

    The reference-point slot runs the backward sweep with ``surrogate`` (None
    keeps the true derivative), matching the kernel that drives surrogate
    gradient updates.  Only single-output networks are supported here.
    """
    pts = sphere_points(np.asarray(angles, dtype=float))
    ref = sphere_points([ref_angle])[0]
    j_ref = quasi_jacobian(net, surrogate, ref).matrix
    return np.array(
        [(quasi_jacobian(net, None, p).matrix @ j_ref.T).item() for p in pts]
    )


def _cell(value):
    return DIVERGENT_CELL if is_divergent(value) else float(value)


def kernel_table(spec: KernelSpec, grid_size: int,
                 ref_angle: float = 0.0) -> tuple[list[str], list[list]]:
    """CSV-ready (header, rows) of one kernel curve; divergent cells say DIV."""
    angles = angle_grid(grid_size)
    values = analytic_curve(spec, angles, ref_angle)
    return ["angle", "value"], [
        [float(a), _cell(v)] for a, v in zip(angles, values)
    ]


# ---------------------------------------------------------------------------
# reports


@dataclass
class ExperimentReport:
    """Named tables plus a metadata block echoed to JSON.

    Every table must carry a ``seed`` column so each row records the seed it
    came from.
    """

    name: str
    metadata: dict
    tables: dict[str, tuple[list[str], list[list]]] = field(default_factory=dict)

    def add_table(self, table: str, header: list[str], rows: list[list]) -> None:
        if "seed" not in header:
            raise SchemaMismatch(f"table {table!r} lacks the seed column: {header}")
        width = len(header)
        for row in rows:
            if len(row) != width:
                raise SchemaMismatch(
                    f"table {table!r} row has {len(row)} cells, header has {width}"
                )
        self.tables[table] = (header, rows)

    def table(self, name: str) -> tuple[list[str], list[list]]:
        return self.tables[name]


def version_string(payload: dict) -> str:
    """Package version plus a short config digest, e.g. ``0.1.0+run.1a2b3c4``."""
    digest = hashlib.sha256(
        json.dumps(payload, sort_keys=True, default=str).encode("utf-8")
    ).hexdigest()[:7]
    return f"{__version__}+run.{digest}"


def write_report(report: ExperimentReport, out_dir) -> dict[str, Path]:
    """Write one CSV per table plus ``<name>_report.json``; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}
    doc_tables = {}
    for table, (header, rows) in sorted(report.tables.items()):
        path = out / f"{report.name}_{table}.csv"
        write_csv(path, header, rows)
        paths[table] = path
        doc_tables[table] = {"file": path.name, "columns": header}
    doc = {"experiment": report.name, "metadata": report.metadata, "tables": doc_tables}
    json_path = out / f"{report.name}_report.json"
    json_path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    paths["report"] = json_path
    return paths


# ---------------------------------------------------------------------------
# figure pipelines


def _coerce_sur(surrogate) -> SurrogateSpec | None:
    if surrogate is None or isinstance(surrogate, SurrogateSpec):
        return surrogate
    return parse_surrogate(str(surrogate))


def _experiment_config(width: int, activation, seed: int, depth: int,
                       kappa: float = 1.0) -> NetworkConfig:
    widths = (2, *([int(width)] * (depth - 1)), 1)
    return NetworkConfig(
        widths=widths, sigma_w=SIGMA_W, sigma_b=SIGMA_B,
        activation=activation, seed=seed, kappa=kappa,
    )


def _kernel_convergence(name: str, widths, m_values, seeds, steps: int, *,
                        surrogate, eta: float, depth: int, grid_size: int,
                        train_count: int, data_seed: int) -> ExperimentReport:
    sur = _coerce_sur(surrogate)
    steps = int(steps)
    data = make_sphere_dataset(train_count, data_seed)
    angles = angle_grid(grid_size)
    curve_header = ["seed", "width", "m", "angle", "empirical_init"]
    if steps:
        curve_header.append("empirical_trained")
    curve_header += ["analytic_finite", "analytic_limit"]
    curve_rows: list[list] = []
    mse_rows: list[list] = []
    rule = "gradient-descent" if sur is None else "surrogate-gradient"
    for m in (float(v) for v in m_values):
        if sur is None:
            spec_m = erf_spec(KIND_NTK, depth, m)
            spec_limit = sign_spec(KIND_NTK, depth)
        else:
            spec_m = erf_spec(KIND_SG_NTK, depth, m, surrogate2=sur)
            spec_limit = sign_spec(KIND_SG_NTK, depth, surrogate2=sur)
        finite_curve = np.array([float(v) for v in analytic_curve(spec_m, angles)])
        limit_curve = analytic_curve(spec_limit, angles)
        for width in widths:
            for seed in seeds:
                net_seed = derive_seed(seed, "kernel-conv", int(width), m)
                net = init(_experiment_config(width, make_erf_m(m), net_seed, depth))
                stages = {"init": empirical_curve(net, angles, surrogate=sur)}
                if steps:
                    trace = train(
                        net, data,
                        TrainConfig(eta=eta, steps=steps, rule=rule, surrogate=sur),
                    )
                    stages["trained"] = empirical_curve(trace.network, angles, surrogate=sur)
                for i, angle in enumerate(angles):
                    row = [seed, int(width), m, float(angle), float(stages["init"][i])]
                    if steps:
                        row.append(float(stages["trained"][i]))
                    row += [float(finite_curve[i]), _cell(limit_curve[i])]
                    curve_rows.append(row)
                for stage, values in stages.items():
                    mse = float(np.mean((values - finite_curve) ** 2))
                    mse_rows.append([seed, int(width), m, stage, mse])
    metadata = {
        "widths": [int(w) for w in widths],
        "m_values": [float(v) for v in m_values],
        "seeds": [int(s) for s in seeds],
        "steps": steps,
        "eta": eta,
        "depth": depth,
        "surrogate": None if sur is None else sur.name,
        "grid_size": int(grid_size),
        "train_count": int(train_count),
        "data_seed": int(data_seed),
    }
    metadata["version"] = version_string(metadata)
    report = ExperimentReport(name=name, metadata=metadata)
    report.add_table("curves", curve_header, curve_rows)
    report.add_table("mse", ["seed", "width", "m", "stage", "mse"], mse_rows)
    return report


def run_fig1(widths, m_values, seeds, steps, *, eta: float = 0.1,
             depth: int = EXPERIMENT_DEPTH, grid_size: int = GRID_KERNEL_FIGS,
             train_count: int = 15, data_seed: int = 3) -> ExperimentReport:
    """Width sweep of empirical vs analytic tangent kernels under plain GD."""
    return _kernel_convergence(
        "fig1", widths, m_values, seeds, steps, surrogate=None, eta=eta,
        depth=depth, grid_size=grid_size, train_count=train_count,
        data_seed=data_seed,
    )


def run_fig2(widths, m_values, seeds, steps, *, surrogate="derf",
             eta: float = 0.1, depth: int = EXPERIMENT_DEPTH,
             grid_size: int = GRID_KERNEL_FIGS, train_count: int = 15,
             data_seed: int = 3) -> ExperimentReport:
    """As run_fig1 with surrogate gradient learning and surrogate kernels.

    With ``surrogate=None`` the generalized kernel collapses to the plain
    tangent kernel and the run reproduces run_fig1's numbers exactly.
    """
    return _kernel_convergence(
        "fig2", widths, m_values, seeds, steps, surrogate=surrogate, eta=eta,
        depth=depth, grid_size=grid_size, train_count=train_count,
        data_seed=data_seed,
    )


def run_fig3(width: int, count: int, steps: int, kappa: float = 1.0, *,
             surrogate="derf", eta: float = 0.1, depth: int = EXPERIMENT_DEPTH,
             grid_size: int = GRID_ENSEMBLE_FIG, train_count: int = 15,
             data_seed: int = 3, seed: int = 0) -> ExperimentReport:
    """Trained sign-activation ensemble against the surrogate-kernel GP.

    Tables: ``band`` with the ensemble mean/spread, the GP mean and standard
    deviation (already scaled by kappa), and the plain covariance-kernel
    regression baseline; ``members`` with every network's output curve; and
    ``train_points``.  With ``count=1`` the spread columns are left empty.
    """
    sur = _coerce_sur(surrogate)
    if sur is None:
        raise PreconditionViolated("sign-activation training needs a surrogate")
    data = make_sphere_dataset(train_count, data_seed)
    angles = angle_grid(grid_size)
    grid = sphere_points(angles)

    net_cfg = _experiment_config(
        width, make_sign(), derive_seed(seed, "fig3", "ensemble"), depth, kappa
    )
    state = init_ensemble(net_cfg, int(count))
    if int(steps):
        train_ensemble(
            state, data,
            TrainConfig(eta=eta, steps=int(steps), rule="surrogate-gradient", surrogate=sur),
        )
    outputs = ensemble_outputs(state, grid)[:, :, 0]
    ens_mean = outputs.mean(axis=0)
    ens_std = outputs.std(axis=0, ddof=1) if int(count) > 1 else None

    gp = gp_posterior(sign_spec(KIND_SG_NTK, depth, surrogate2=sur), data)
    gp_mean = posterior_mean(gp, grid)[:, 0]
    gp_std = float(kappa) * posterior_std(gp, grid)
    baseline = gp_posterior(sign_spec(KIND_NNGP, depth), data)
    base_mean = posterior_mean(baseline, grid)[:, 0]

    band_rows = [
        [seed, int(width), float(a), float(ens_mean[i]),
         "" if ens_std is None else float(ens_std[i]),
         float(gp_mean[i]), float(gp_std[i]), float(base_mean[i])]
        for i, a in enumerate(angles)
    ]
    member_rows = [
        [seed, member, float(a), float(outputs[member, i])]
        for member in range(int(count))
        for i, a in enumerate(angles)
    ]
    train_rows = [
        [seed, float(a), float(t)]
        for a, t in zip(dataset_angles(data), data.targets[:, 0])
    ]
    metadata = {
        "width": int(width),
        "count": int(count),
        "steps": int(steps),
        "kappa": float(kappa),
        "eta": eta,
        "depth": depth,
        "surrogate": sur.name,
        "grid_size": int(grid_size),
        "train_count": int(train_count),
        "data_seed": int(data_seed),
        "seed": int(seed),
    }
    metadata["version"] = version_string(metadata)
    report = ExperimentReport(name="fig3", metadata=metadata)
    report.add_table(
        "band",
        ["seed", "width", "angle", "ensemble_mean", "ensemble_std",
         "gp_mean", "gp_std", "nngp_mean"],
        band_rows,
    )
    report.add_table("members", ["seed", "member", "angle", "value"], member_rows)
    report.add_table("train_points", ["seed", "angle", "target"], train_rows)
    return report


def run_train_ensemble(width: int, count: int, steps: int, *, activation="sign",
                       surrogate="derf", eta: float = 0.1,
                       depth: int = EXPERIMENT_DEPTH, kappa: float = 1.0,
                       seed: int = 0, grid_size: int = 64,
                       train_count: int = 15, data_seed: int = 3,
                       loss_samples: int = 101) -> ExperimentReport:
    """Train one ensemble and collect final outputs plus a loss trace.

    The ``outputs`` table holds every member's value on the test angle grid;
    the ``losses`` table holds per-member loss curves subsampled to at most
    ``loss_samples`` step marks (the first and last step are always kept).
    """
    act = activation if not isinstance(activation, str) else parse_activation(activation)
    sur = _coerce_sur(surrogate)
    rule = "gradient-descent" if sur is None else "surrogate-gradient"
    data = make_sphere_dataset(train_count, data_seed)
    angles = angle_grid(grid_size)

    net_cfg = _experiment_config(
        width, act, derive_seed(seed, "train-ensemble"), depth, kappa
    )
    state = init_ensemble(net_cfg, int(count))
    result = train_ensemble(
        state, data,
        TrainConfig(eta=eta, steps=int(steps), rule=rule, surrogate=sur),
    )
    outputs = ensemble_outputs(state, sphere_points(angles))[:, :, 0]

    marks = np.unique(
        np.linspace(0, int(steps), min(int(loss_samples), int(steps) + 1)).astype(int)
    )
    output_rows = [
        [seed, member, float(a), float(outputs[member, i])]
        for member in range(int(count))
        for i, a in enumerate(angles)
    ]
    loss_rows = [
        [seed, member, int(mark), float(result.losses[member, mark])]
        for member in range(int(count))
        for mark in marks
    ]
    metadata = {
        "width": int(width),
        "count": int(count),
        "steps": int(steps),
        "activation": act.name,
        "surrogate": None if sur is None else sur.name,
        "rule": rule,
        "eta": eta,
        "kappa": float(kappa),
        "depth": depth,
        "grid_size": int(grid_size),
        "train_count": int(train_count),
        "data_seed": int(data_seed),
        "seed": int(seed),
    }
    metadata["version"] = version_string(metadata)
    report = ExperimentReport(name="ensemble", metadata=metadata)
    report.add_table("outputs", ["seed", "member", "angle", "value"], output_rows)
    report.add_table("losses", ["seed", "member", "step", "loss"], loss_rows)
    return report


# ---------------------------------------------------------------------------
# validation suite


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str


@dataclass
class ValidationReport:
    checks: list[ValidationCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [
            f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}"
            for c in self.checks
        ]


def _random_cov(gen) -> Cov2:
    """Well-conditioned 2x2 covariance: moderate variances, |rho| <= 0.8.

    Inside this region order-64 quadrature resolves the slope-1 pair
    expectations to better than 1e-8, so the cross-check bound is meaningful.
    """
    s11, s22 = gen.uniform(0.25, 2.0, 2)
    rho = gen.uniform(-0.8, 0.8)
    return Cov2(float(s11), float(s22), float(rho * math.sqrt(s11 * s22)))


def _check_level1(seed: int) -> ValidationCheck:
    gen = substream(seed, "validate", "level1")
    worst = 0.0
    for trial in range(20):
        cfg = NetworkConfig(
            widths=(2, 3), sigma_w=SIGMA_W, sigma_b=SIGMA_B,
            activation=make_erf_m(2.0), seed=derive_seed(seed, "level1", trial),
        )
        net = init(cfg)
        x, y = gen.normal(size=(2, 2))
        expected = (SIGMA_W**2 / 2.0 * float(x @ y) + SIGMA_B**2) * np.eye(3)
        worst = max(worst, float(np.abs(empirical_ntk(net, x, y) - expected).max()))
    return ValidationCheck("level1-exactness", worst <= 1e-12, f"max gap {worst:.2e}")


def _check_quadrature(seed: int, t_erf_shift: float) -> ValidationCheck:
    gen = substream(seed, "validate", "quadrature")
    act = make_erf_m(1.0)
    worst = 0.0
    for _ in range(25):
        cov = _random_cov(gen)
        gap_t = abs(t_erf(cov) + t_erf_shift - gh_expect(cov, act.fn, act.fn))
        gap_td = abs(tdot_erf(cov) - gh_expect(cov, act.deriv, act.deriv))
        worst = max(worst, gap_t, gap_td)
    return ValidationCheck(
        "closed-form-vs-quadrature", worst <= 1e-8, f"max gap {worst:.2e}"
    )


def _check_monte_carlo(seed: int, samples: int) -> ValidationCheck:
    gen = substream(seed, "validate", "mc")
    act = make_erf_m(1.0)
    worst_ratio = 0.0
    for trial in range(5):
        cov = _random_cov(gen)
        est, se = mc_expect(
            cov, act.fn, act.fn, samples, derive_seed(seed, "mc", trial)
        )
        worst_ratio = max(worst_ratio, abs(est - t_erf(cov)) / (4.0 * se))
    return ValidationCheck(
        "monte-carlo", worst_ratio <= 1.0, f"worst |gap|/4SE {worst_ratio:.3f}"
    )


def _flat_params(net: Network) -> np.ndarray:
    parts = []
    for w, b in zip(net.weights, net.biases):
        parts.append(w.ravel())
        parts.append(b)
    return np.concatenate(parts)


def _set_flat_params(net: Network, vec: np.ndarray) -> None:
    offset = 0
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        net.weights[layer] = vec[offset : offset + w.size].reshape(w.shape)
        offset += w.size
        net.biases[layer] = vec[offset : offset + b.size].copy()
        offset += b.size


def _check_jacobian(seed: int) -> ValidationCheck:
    cfg = NetworkConfig(
        widths=(2, 16, 16, 1), sigma_w=SIGMA_W, sigma_b=SIGMA_B,
        activation=make_erf_m(2.0), seed=derive_seed(seed, "fd-jac"),
    )
    net = init(cfg)
    x = np.array([0.6, 0.8])
    exact = quasi_jacobian(net, None, x).matrix
    theta = _flat_params(net)
    step = 1e-5
    fd = np.empty_like(exact)
    for p in range(theta.size):
        bumped = theta.copy()
        bumped[p] = theta[p] + step
        _set_flat_params(net, bumped)
        up, _ = forward(net, x)
        bumped[p] = theta[p] - step
        _set_flat_params(net, bumped)
        down, _ = forward(net, x)
        fd[:, p] = (up - down) / (2 * step)
    scale = np.abs(exact).max()
    worst = float(np.abs(exact - fd).max() / scale)
    return ValidationCheck("jacobian-vs-fd", worst <= 1e-6, f"max rel gap {worst:.2e}")


def _check_pair_covariance(seed: int, count: int) -> ValidationCheck:
    pts = sphere_points([0.3, 1.7, 4.1])
    cfg = NetworkConfig(
        widths=(2, 512, 1), sigma_w=SIGMA_W, sigma_b=SIGMA_B,
        activation=make_erf_m(2.0), seed=derive_seed(seed, "pair-cov"),
    )
    stats = ensemble_statistics(cfg, count, pts, activation2=make_erf_m(5.0))
    spec = KernelSpec(
        kind=KIND_CROSS_NNGP, depth=2, sigma_w=SIGMA_W, sigma_b=SIGMA_B,
        activation1=make_erf_m(2.0), activation2=make_erf_m(5.0),
    )
    analytic = kernel_matrix(spec, pts).require_finite()
    # width-512 bias: allow a small absolute slack on top of the sampling band
    ratio = np.abs(stats.cov[0] - analytic) / (4.0 * stats.cov_se[0] + 5e-3)
    worst = float(ratio.max())
    return ValidationCheck(
        "pair-covariance", worst <= 1.0, f"worst |gap|/band {worst:.3f}"
    )


def _check_exponent() -> ValidationCheck:
    worst = 0.0
    for level in (2, 3, 4):
        target = 1.0 - 0.5 ** (level - 1)
        fitted = singular_exponent(sign_spec(KIND_NTK, level))
        worst = max(worst, abs(fitted - target) / target)
    return ValidationCheck("blowup-exponent", worst <= 0.05, f"worst rel gap {worst:.3f}")


def validate(*, seed: int = 0, mc_samples: int = 200_000,
             ensemble_count: int = 400, t_erf_shift: float = 0.0) -> ValidationReport:
    """Cross-check the numerical core; ``t_erf_shift`` injects a fault.

    A nonzero shift perturbs the closed-form pair expectation before the
    quadrature comparison, which must then fail; this keeps the suite honest
    about actually exercising the cross-check.
    """
    runners = [
        lambda: _check_level1(seed),
        lambda: _check_quadrature(seed, t_erf_shift),
        lambda: _check_monte_carlo(seed, mc_samples),
        lambda: _check_jacobian(seed),
        lambda: _check_pair_covariance(seed, ensemble_count),
        lambda: _check_exponent(),
    ]
    checks = []
    for run in runners:
        try:
            checks.append(run())
        except Exception as exc:  # surface, do not hide, broken checks
            checks.append(ValidationCheck(run.__qualname__, False, repr(exc)))
    return ValidationReport(checks=checks)
