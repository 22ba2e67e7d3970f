"""Adaptive threshold selection for shot-boundary score streams.

Pipeline: Gaussian-kernel KDE over the scores, bimodal peak/valley analysis,
a two-component Gaussian mixture refined by EM, and a final threshold at the
mixture intersection that minimizes the expected misclassification mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput

AUTO = "auto"

VARIANCE_FLOOR = 1e-8
DEFAULT_EM_TOL = 1e-6
DEFAULT_EM_MAX_ITER = 500


@dataclass(frozen=True)
class ScoreSeries:
    """Per-frame transition-probability stream."""

    values: tuple[float, ...]
    source_label: str = ""

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("ScoreSeries must be non-empty")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("ScoreSeries values must be finite")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class KdeConfig:
    bandwidth: float | str = AUTO
    grid_points: int = 512

    def __post_init__(self):
        if self.bandwidth != AUTO and not (
            isinstance(self.bandwidth, (int, float)) and self.bandwidth > 0
        ):
            raise ValueError("bandwidth must be positive or AUTO")
        if self.grid_points < 16:
            raise ValueError("grid_points must be >= 16")


@dataclass(frozen=True)
class DensityCurve:
    xs: np.ndarray
    ys: np.ndarray
    bandwidth: float

    def __post_init__(self):
        if len(self.xs) != len(self.ys):
            raise ValueError("xs and ys must have equal length")


@dataclass(frozen=True)
class ModeAnalysis:
    m1: float = math.nan
    m2: float = math.nan
    valley: float = math.nan
    found: bool = False


@dataclass(frozen=True)
class MixtureComponent:
    weight: float
    mean: float
    sigma: float


@dataclass(frozen=True)
class MixtureModel:
    """Two-component Gaussian mixture, components ordered by mean."""

    components: tuple[MixtureComponent, MixtureComponent]
    log_likelihood: float = math.nan
    iterations: int = 0

    @property
    def low(self) -> MixtureComponent:
        return self.components[0]

    @property
    def high(self) -> MixtureComponent:
        return self.components[1]


@dataclass(frozen=True)
class ThresholdResult:
    threshold: float
    mixture: MixtureModel
    log_likelihood: float
    iterations: int
    fallback_used: bool
    trace: tuple[float, ...] = field(default=())


def silverman_bandwidth(values: np.ndarray) -> float:
    """Silverman's rule of thumb: 0.9 * min(sigma, IQR/1.34) * N^(-1/5)."""
    n = len(values)
    if n < 2:
        raise DegenerateInput("AUTO bandwidth needs at least 2 samples")
    sigma = float(np.std(values, ddof=1))
    q75, q25 = np.percentile(values, [75, 25])
    iqr = float(q75 - q25)
    if sigma <= 1e-12 * max(1.0, abs(float(np.mean(values)))):
        raise DegenerateInput("zero sample spread; cannot choose bandwidth")
    spread = min(sigma, iqr / 1.34) if iqr > 0.0 else sigma
    return 0.9 * spread * n ** (-0.2)


def kde_density(scores: ScoreSeries, cfg: KdeConfig = KdeConfig()) -> DensityCurve:
    """Gaussian-kernel KDE evaluated on an even grid spanning [min-3h, max+3h]."""
    p = np.asarray(scores.values, dtype=np.float64)
    if cfg.bandwidth == AUTO:
        h = silverman_bandwidth(p)
    else:
        h = float(cfg.bandwidth)
    xs = np.linspace(p.min() - 3.0 * h, p.max() + 3.0 * h, cfg.grid_points)
    z = (xs[:, None] - p[None, :]) / h
    ys = np.exp(-0.5 * z * z).sum(axis=1) / (len(p) * h * math.sqrt(2.0 * math.pi))
    return DensityCurve(xs=xs, ys=ys, bandwidth=h)


# a dip this much below the lower of the two peaks is required for the curve
# to count as bimodal; rejects sampling ripples on an essentially unimodal KDE
MIN_VALLEY_DEPTH = 0.05
MIN_PEAK_HEIGHT = 0.05


def find_modes(curve: DensityCurve) -> ModeAnalysis:
    """Locate the two highest strict local maxima and the valley between them."""
    ys, xs = curve.ys, curve.xs
    peaks = [
        i
        for i in range(1, len(ys) - 1)
        if ys[i] > ys[i - 1] and ys[i] > ys[i + 1]
    ]
    if len(peaks) < 2:
        return ModeAnalysis(found=False)
    # two highest by density; ties broken by smaller abscissa
    top = sorted(peaks, key=lambda i: (-ys[i], xs[i]))[:2]
    i1, i2 = sorted(top)
    # a sampling ripple in a tail is not a mode: the lesser peak must carry
    # a non-trivial fraction of the dominant peak's density
    if min(ys[i1], ys[i2]) < MIN_PEAK_HEIGHT * max(ys[i1], ys[i2]):
        return ModeAnalysis(found=False)
    valley_i = i1 + 1 + int(np.argmin(ys[i1 + 1 : i2]))
    if ys[valley_i] > (1.0 - MIN_VALLEY_DEPTH) * min(ys[i1], ys[i2]):
        return ModeAnalysis(found=False)
    return ModeAnalysis(
        m1=float(xs[i1]), m2=float(xs[i2]), valley=float(xs[valley_i]), found=True
    )


def _log_mixture_pdf(p: np.ndarray, w, mu, sigma) -> np.ndarray:
    # log sum_k w_k N(p | mu_k, sigma_k^2), stable via logaddexp
    comps = []
    for k in range(2):
        comps.append(
            math.log(w[k])
            - math.log(sigma[k])
            - 0.5 * math.log(2.0 * math.pi)
            - 0.5 * ((p - mu[k]) / sigma[k]) ** 2
        )
    return np.logaddexp(comps[0], comps[1])


def em_fit(
    scores: ScoreSeries,
    init: tuple[MixtureComponent, MixtureComponent],
    tol: float = DEFAULT_EM_TOL,
    max_iter: int = DEFAULT_EM_MAX_ITER,
) -> tuple[MixtureModel, list[float]]:
    """EM refinement of a two-component mixture from the given initialization.

    Returns the fitted model (components reordered by mean) and the
    per-iteration log-likelihood trace, which is non-decreasing.
    """
    if len(scores) < 4:
        raise DegenerateInput("need at least 4 scores to fit a mixture")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    p = np.asarray(scores.values, dtype=np.float64)
    n = len(p)
    w = np.array([init[0].weight, init[1].weight], dtype=np.float64)
    w = w / w.sum()
    mu = np.array([init[0].mean, init[1].mean], dtype=np.float64)
    var = np.maximum(
        np.array([init[0].sigma, init[1].sigma], dtype=np.float64) ** 2,
        VARIANCE_FLOOR,
    )

    trace: list[float] = []
    iterations = 0
    prev_ll = -math.inf
    for _ in range(max_iter):
        sigma = np.sqrt(var)
        log_joint = np.stack(
            [
                np.log(w[k])
                - np.log(sigma[k])
                - 0.5 * math.log(2.0 * math.pi)
                - 0.5 * ((p - mu[k]) / sigma[k]) ** 2
                for k in range(2)
            ],
            axis=1,
        )
        log_norm = np.logaddexp(log_joint[:, 0], log_joint[:, 1])
        ll = float(log_norm.sum())
        trace.append(ll)
        iterations += 1

        gamma = np.exp(log_joint - log_norm[:, None])
        nk = gamma.sum(axis=0)
        nk = np.maximum(nk, 1e-300)
        w = nk / n
        mu = (gamma * p[:, None]).sum(axis=0) / nk
        var = (gamma * (p[:, None] - mu[None, :]) ** 2).sum(axis=0) / nk
        var = np.maximum(var, VARIANCE_FLOOR)

        if prev_ll > -math.inf:
            denom = max(abs(prev_ll), 1e-12)
            if abs(ll - prev_ll) / denom < tol:
                break
        prev_ll = ll

    sigma = np.sqrt(var)
    order = [0, 1] if mu[0] <= mu[1] else [1, 0]
    comps = tuple(
        MixtureComponent(weight=float(w[k]), mean=float(mu[k]), sigma=float(sigma[k]))
        for k in order
    )
    final_ll = float(_log_mixture_pdf(p, w, mu, sigma).sum())
    model = MixtureModel(components=comps, log_likelihood=final_ll, iterations=iterations)
    return model, trace


def gaussian_intersections(m: MixtureModel) -> list[float]:
    """Closed-form roots of w1*phi1(x) = w2*phi2(x) within [mu_low, mu_high]."""
    c1, c2 = m.low, m.high
    w1, mu1, s1 = c1.weight, c1.mean, c1.sigma
    w2, mu2, s2 = c2.weight, c2.mean, c2.sigma
    lo, hi = min(mu1, mu2), max(mu1, mu2)

    # log equality: quadratic a x^2 + b x + c = 0
    a = 0.5 / s2**2 - 0.5 / s1**2
    b = mu1 / s1**2 - mu2 / s2**2
    c = (
        0.5 * mu2**2 / s2**2
        - 0.5 * mu1**2 / s1**2
        + math.log(w1 * s2)
        - math.log(w2 * s1)
    )

    if abs(a) < 1e-14:
        if abs(b) < 1e-300:
            return []
        roots = [-c / b]
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0:
            return []
        sq = math.sqrt(disc)
        roots = [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)]

    eps = 1e-12 * max(1.0, abs(lo), abs(hi))
    return sorted({r for r in roots if lo - eps <= r <= hi + eps})


def _phi(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def expected_error(m: MixtureModel, t: float) -> float:
    """Mixture-weighted misclassification mass of a threshold classifier at t."""
    lo, hi = m.low, m.high
    return lo.weight * (1.0 - _phi((t - lo.mean) / lo.sigma)) + hi.weight * _phi(
        (t - hi.mean) / hi.sigma
    )


def _region_init(p: np.ndarray, split: float) -> tuple[MixtureComponent, MixtureComponent]:
    c1 = p[p <= split]
    c2 = p[p > split]
    n = len(p)
    comps = []
    for region in (c1, c2):
        if len(region) == 0:
            # degenerate split: seed from the global sample
            region = p
        weight = max(len(region) / n, 1e-6)
        mean = float(np.mean(region))
        sigma = float(np.std(region))
        sigma = max(sigma, math.sqrt(VARIANCE_FLOOR))
        comps.append(MixtureComponent(weight=weight, mean=mean, sigma=sigma))
    total = comps[0].weight + comps[1].weight
    comps = [
        MixtureComponent(weight=c.weight / total, mean=c.mean, sigma=c.sigma)
        for c in comps
    ]
    return comps[0], comps[1]


def solve_threshold(
    scores: ScoreSeries,
    cfg: KdeConfig = KdeConfig(),
    em_tol: float = DEFAULT_EM_TOL,
    em_max_iter: int = DEFAULT_EM_MAX_ITER,
) -> ThresholdResult:
    """Full pipeline: KDE, mode analysis, region-initialized EM, intersection pick."""
    if len(scores) < 4:
        raise DegenerateInput("need at least 4 scores")
    p = np.asarray(scores.values, dtype=np.float64)

    curve = kde_density(scores, cfg)
    modes = find_modes(curve)
    if modes.found:
        split = modes.valley
        fallback = False
    else:
        split = float(np.median(p))
        fallback = True

    init = _region_init(p, split)
    model, trace = em_fit(scores, init, tol=em_tol, max_iter=em_max_iter)

    candidates = gaussian_intersections(model)
    if not candidates:
        candidates = [model.low.mean, model.high.mean]
    theta = min(candidates, key=lambda t: (expected_error(model, t), t))
    # clamp into the inter-mean interval (roots can carry fp slack at the edges)
    theta = min(max(theta, model.low.mean), model.high.mean)

    return ThresholdResult(
        threshold=float(theta),
        mixture=model,
        log_likelihood=model.log_likelihood,
        iterations=model.iterations,
        fallback_used=fallback,
        trace=tuple(trace),
    )


def read_score_file(path) -> ScoreSeries:
    """Parse a score file: one `<score>` or `<frame_index>,<score>` per line, # comments."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            values.append(float(parts[-1]))
    if not values:
        raise DegenerateInput(f"no scores found in {path}")
    return ScoreSeries(values=tuple(values), source_label=str(path))
