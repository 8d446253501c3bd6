"""Monte-Carlo estimates for fractional Brownian motion suprema.

Paths are generated in pairs: pair ``j`` owns a Philox stream keyed by
``(seed, j)`` and yields paths ``2j`` and ``2j + 1`` (the real and imaginary
parts of one circulant-embedding draw). Work is split into fixed-size chunks
whose partial moments are merged in chunk order, so results are bit-identical
for any number of workers.
"""

from __future__ import annotations

import functools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bounds import Hurst, HurstLike, _h
from .errors import DomainError, SamplerError

CIRCULANT = "circulant"
CHOLESKY = "cholesky"
CHOLESKY_MAX_STEPS = 1 << 10
EIGEN_REL_TOL = 1e-10

DEFAULT_PATHS = 2000
DEFAULT_STEPS = 1 << 15
DEFAULT_BASE_HORIZON = 4.0

# floats held per chunk; chunk sizes depend on `steps` only
_CHUNK_BUDGET = 1 << 21


def _is_pow2(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class SamplerSpec:
    h: Hurst
    steps: int
    dt: float
    method: str = CIRCULANT

    def __post_init__(self):
        object.__setattr__(self, "h", Hurst(_h(self.h)))
        if not (isinstance(self.steps, (int, np.integer)) and _is_pow2(int(self.steps))):
            raise DomainError(f"steps must be a power of two >= 2, got {self.steps!r}")
        object.__setattr__(self, "steps", int(self.steps))
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if self.method not in (CIRCULANT, CHOLESKY):
            raise DomainError(f"unknown sampler method {self.method!r}")
        if self.method == CHOLESKY and self.steps > CHOLESKY_MAX_STEPS:
            raise DomainError(f"cholesky sampling is limited to {CHOLESKY_MAX_STEPS} steps")


@dataclass
class McResult:
    estimate: float
    std_error: float
    paths: int
    steps: int
    horizon: float
    seed: int
    meta: dict = field(default_factory=dict)

    def interval(self, k: float = 3.0) -> tuple[float, float]:
        return self.estimate - k * self.std_error, self.estimate + k * self.std_error


# ---------------------------------------------------------------------------
# streaming moments
# ---------------------------------------------------------------------------

@dataclass
class Moments:
    """count / mean / sum of squared deviations; two summaries merge exactly."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, values: np.ndarray) -> "Moments":
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return cls()
        mean = float(values.mean())
        return cls(int(values.size), mean, float(((values - mean) ** 2).sum()))

    def merge(self, other: "Moments") -> "Moments":
        if other.count == 0:
            return Moments(self.count, self.mean, self.m2)
        if self.count == 0:
            return Moments(other.count, other.mean, other.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return Moments(n, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def std_error(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 0 else math.inf


# ---------------------------------------------------------------------------
# fractional Gaussian noise
# ---------------------------------------------------------------------------

def fgn_autocovariance(h: float, lags: np.ndarray, dt: float = 1.0) -> np.ndarray:
    """Cov(X_0, X_k) = 1/2 (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}) dt^{2H}."""
    k = np.abs(np.asarray(lags, dtype=float))
    two_h = 2.0 * h
    return 0.5 * ((k + 1.0) ** two_h + np.abs(k - 1.0) ** two_h - 2.0 * k ** two_h) * dt ** two_h


@functools.lru_cache(maxsize=32)
def _circulant_scale(h: float, steps: int, dt: float) -> np.ndarray:
    r = fgn_autocovariance(h, np.arange(steps + 1), dt)
    row = np.concatenate([r, r[-2:0:-1]])
    eig = np.fft.fft(row).real
    top = float(eig.max())
    if eig.min() < -EIGEN_REL_TOL * top:
        raise SamplerError(
            f"circulant embedding has eigenvalue {eig.min():.3e} (max {top:.3e}) for H={h}, n={steps}"
        )
    eig = np.clip(eig, 0.0, None)
    scale = np.sqrt(eig / row.size)
    scale.setflags(write=False)
    return scale


@functools.lru_cache(maxsize=8)
def _cholesky_factor(h: float, steps: int, dt: float) -> np.ndarray:
    r = fgn_autocovariance(h, np.arange(steps), dt)
    idx = np.arange(steps)
    cov = r[np.abs(idx[:, None] - idx[None, :])]
    factor = np.linalg.cholesky(cov)
    factor.setflags(write=False)
    return factor


def pair_generator(seed: int, pair_index: int) -> np.random.Generator:
    """Counter-based substream for path pair ``pair_index``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(pair_index),))))


def _fgn_pair(spec: SamplerSpec, pair_index: int, seed: int) -> np.ndarray:
    n = spec.steps
    rng = pair_generator(seed, pair_index)
    h = spec.h.value
    if spec.method == CHOLESKY:
        z = rng.standard_normal((2, n))
        return z @ _cholesky_factor(h, n, spec.dt).T
    if h == 0.5:
        # flat spectrum: the embedding reduces to independent N(0, dt) draws
        return rng.standard_normal((2, n)) * math.sqrt(spec.dt)
    scale = _circulant_scale(h, n, spec.dt)
    z = rng.standard_normal((2, 2 * n))
    w = np.fft.fft(scale * (z[0] + 1j * z[1]))
    return np.stack([w.real[:n], w.imag[:n]])


def fgn_batch(spec: SamplerSpec, first_path: int, count: int, seed: int) -> np.ndarray:
    """Increments of paths ``first_path .. first_path + count - 1``, shape (count, steps)."""
    if count <= 0:
        return np.empty((0, spec.steps))
    first_pair, last_pair = first_path // 2, (first_path + count - 1) // 2
    rows = np.concatenate([_fgn_pair(spec, j, seed) for j in range(first_pair, last_pair + 1)])
    offset = first_path - 2 * first_pair
    return rows[offset:offset + count]


def sample_fgn(spec: SamplerSpec, path_index: int, seed: int) -> np.ndarray:
    """``spec.steps`` fGn increments for one path, determined by (seed, path_index)."""
    if path_index < 0:
        raise DomainError("path_index must be nonnegative")
    return fgn_batch(spec, path_index, 1, seed)[0]


def sample_fbm(spec: SamplerSpec, path_index: int, seed: int) -> np.ndarray:
    """B_H on the grid dt, 2 dt, ..., steps * dt (B_H(0) = 0 omitted)."""
    return np.cumsum(sample_fgn(spec, path_index, seed))


# ---------------------------------------------------------------------------
# chunked execution
# ---------------------------------------------------------------------------

def _chunk_size(steps: int) -> int:
    size = max(2, min(512, _CHUNK_BUDGET // steps))
    return size - (size % 2)


def _run_chunks(kernel: Callable, paths: int, steps: int, workers: int) -> list:
    if paths < 2:
        raise DomainError("at least 2 paths are needed for a standard error")
    size = _chunk_size(steps)
    starts = list(range(0, paths, size))
    counts = [min(size, paths - s) for s in starts]
    if workers > 1 and len(starts) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(kernel, starts, counts))
    else:
        parts = [kernel(s, c) for s, c in zip(starts, counts)]
    merged = [Moments() for _ in parts[0]]
    for part in parts:
        merged = [m.merge(p) for m, p in zip(merged, part)]
    return merged


def _sup_drift_kernel(spec: SamplerSpec, seed: int, c: float, split: Optional[int], first: int, count: int):
    x = fgn_batch(spec, first, count, seed)
    np.cumsum(x, axis=1, out=x)
    x -= c * spec.dt * np.arange(1, spec.steps + 1)
    full = np.maximum(x.max(axis=1), 0.0)
    out = [Moments.of(full)]
    if split is not None:
        part = np.maximum(x[:, :split].max(axis=1), 0.0)
        out += [Moments.of(part), Moments.of(full - part)]
    return out


def _sup_moment_kernel(spec: SamplerSpec, seed: int, alpha: float, first: int, count: int):
    x = fgn_batch(spec, first, count, seed)
    np.cumsum(x, axis=1, out=x)
    top = np.maximum(x.max(axis=1), 0.0)
    return [Moments.of(top ** alpha), Moments.of(x[:, -1])]


def _timechanged_kernel(h: float, u: float, horizon: float, steps: int, seed: int, first: int, count: int):
    t = horizon / steps * np.arange(steps + 1)
    sd = np.sqrt(np.diff(t ** (2.0 * h)))
    first_pair, last_pair = first // 2, (first + count - 1) // 2
    z = np.concatenate([pair_generator(seed, j).standard_normal((2, steps)) for j in range(first_pair, last_pair + 1)])
    z = z[first - 2 * first_pair:first - 2 * first_pair + count]
    x = np.cumsum(z * sd, axis=1) - t[1:]
    hit = (x.max(axis=1) > u).astype(float)
    return [Moments.of(hit)]


def _result(m: Moments, paths: int, steps: int, horizon: float, seed: int, **meta) -> McResult:
    return McResult(
        estimate=m.mean,
        std_error=m.std_error,
        paths=paths,
        steps=steps,
        horizon=horizon,
        seed=int(seed),
        meta=meta,
    )


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

def estimate_sup_drift(
    h: HurstLike,
    c: float = 1.0,
    horizon: float = DEFAULT_BASE_HORIZON,
    steps: int = DEFAULT_STEPS,
    paths: int = DEFAULT_PATHS,
    seed: int = 0,
    method: str = CIRCULANT,
    workers: int = 1,
) -> McResult:
    """Mean of max(0, max_k B_H(t_k) - c t_k) on t_k = k horizon/steps.

    Biased low against E sup_{t>=0}: the grid misses excursions between
    points and the horizon truncates the search.
    """
    if not c > 0.0:
        raise DomainError(f"drift must be positive, got {c!r}")
    if not horizon > 0.0:
        raise DomainError(f"horizon must be positive, got {horizon!r}")
    spec = SamplerSpec(Hurst(_h(h)), steps, horizon / steps, method)
    kernel = functools.partial(_sup_drift_kernel, spec, seed, float(c), None)
    (m,) = _run_chunks(kernel, paths, steps, workers)
    return _result(m, paths, steps, horizon, seed, h=spec.h.value, drift=float(c), bias="low: grid and horizon truncation")


def estimate_mu_moment(
    h: HurstLike,
    alpha: float = 1.0,
    steps: int = DEFAULT_STEPS,
    paths: int = DEFAULT_PATHS,
    seed: int = 0,
    method: str = CIRCULANT,
    workers: int = 1,
) -> McResult:
    """Mean of (max_k B_H(k/steps))^alpha over the grid on [0, 1], B_H(0) = 0 included."""
    if not alpha >= 1.0:
        raise DomainError(f"alpha must be >= 1, got {alpha!r}")
    spec = SamplerSpec(Hurst(_h(h)), steps, 1.0 / steps, method)
    kernel = functools.partial(_sup_moment_kernel, spec, seed, float(alpha))
    m, end = _run_chunks(kernel, paths, steps, workers)
    return _result(
        m, paths, steps, 1.0, seed,
        h=spec.h.value, alpha=float(alpha), bias="low: grid",
        endpoint_mean=end.mean, endpoint_variance=end.variance, endpoint_count=end.count,
    )


def estimate_timechanged_tail(
    h: HurstLike,
    u: float,
    horizon: float = 50.0,
    steps: int = DEFAULT_STEPS,
    paths: int = DEFAULT_PATHS,
    seed: int = 0,
    workers: int = 1,
) -> McResult:
    """P(sup_{t>=0} B(t^{2H}) - t > u) from independent increments N(0, t_k^{2H} - t_{k-1}^{2H})."""
    hv = _h(h)
    if not u > 0.0:
        raise DomainError(f"u must be positive, got {u!r}")
    if not horizon > 0.0:
        raise DomainError(f"horizon must be positive, got {horizon!r}")
    if steps < 2:
        raise DomainError("steps must be >= 2")
    kernel = functools.partial(_timechanged_kernel, hv, float(u), float(horizon), int(steps), seed)
    (m,) = _run_chunks(kernel, paths, steps, workers)
    return _result(m, paths, steps, horizon, seed, h=hv, u=float(u), bias="low: grid and horizon truncation")


def adaptive_horizon(
    h: HurstLike,
    c: float = 1.0,
    base_horizon: float = DEFAULT_BASE_HORIZON,
    steps_per_unit: int = DEFAULT_STEPS // 4,
    paths: int = DEFAULT_PATHS,
    seed: int = 0,
    max_doublings: int = 8,
    rel_change: float = 0.1,
    method: str = CIRCULANT,
    workers: int = 1,
) -> McResult:
    """:func:`estimate_sup_drift` with the horizon doubled until the estimate settles.

    At horizon T the same paths give the estimate on [0, T/2] and on [0, T];
    the search stops once their paired mean difference is below
    ``rel_change`` standard errors. The grid spacing stays 1/steps_per_unit.
    Failure to settle within ``max_doublings`` is reported in ``meta``.
    """
    if not base_horizon > 0.0:
        raise DomainError(f"base_horizon must be positive, got {base_horizon!r}")
    if not c > 0.0:
        raise DomainError(f"drift must be positive, got {c!r}")
    base_steps = steps_per_unit * base_horizon
    if base_steps != int(base_steps) or not _is_pow2(int(base_steps)):
        raise DomainError("steps_per_unit * base_horizon must be a power of two")
    hv = _h(h)
    history = []
    for k in range(max_doublings + 1):
        horizon = base_horizon * 2 ** k
        steps = int(base_steps) << k
        spec = SamplerSpec(Hurst(hv), steps, horizon / steps, method)
        kernel = functools.partial(_sup_drift_kernel, spec, seed, float(c), steps // 2)
        full, _, diff = _run_chunks(kernel, paths, steps, workers)
        history.append({"horizon": horizon, "estimate": full.mean, "std_error": full.std_error, "gain": diff.mean})
        if diff.mean < rel_change * full.std_error:
            converged = True
            break
    else:
        converged = False
    return _result(
        full, paths, steps, horizon, seed,
        h=hv, drift=float(c), converged=converged, doublings=k, history=history,
        bias="low: grid and horizon truncation",
    )


def estimate_sup_auto(
    h: HurstLike,
    c: float = 1.0,
    steps: int = DEFAULT_STEPS,
    paths: int = DEFAULT_PATHS,
    seed: int = 0,
    base_horizon: float = DEFAULT_BASE_HORIZON,
    pilot_steps_per_unit: int = 256,
    method: str = CIRCULANT,
    workers: int = 1,
) -> McResult:
    """Pick the horizon with a coarse :func:`adaptive_horizon` pilot, then run
    :func:`estimate_sup_drift` with ``steps`` grid points on that horizon.

    The pilot uses an independent stream (``seed + 1``).
    """
    pilot = adaptive_horizon(
        h, c, base_horizon, pilot_steps_per_unit, paths, seed + 1, method=method, workers=workers
    )
    result = estimate_sup_drift(h, c, pilot.horizon, steps, paths, seed, method=method, workers=workers)
    result.meta.update(pilot_converged=pilot.meta["converged"], pilot_history=pilot.meta["history"])
    return result
