"""Simulated jump fields: Poisson jump sets, box noise values, truncation.

A jump set is one realization of the marked Poisson field on a space-time
window, restricted to jump moduli above a cutoff.  Box values are plain jump
sums below the stability threshold alpha = 1 and compensated sums above it;
the omitted sub-cutoff jumps bias the mean by at most
volume * alpha/(1-alpha) * cutoff**(1-alpha) when alpha < 1 and contribute
variance at most volume * alpha/(2-alpha) * cutoff**(2-alpha) when alpha > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .boxes import Box, SpaceTimeBox
from .stable import LevyMeasure

__all__ = [
    "NoiseConfig",
    "JumpSet",
    "CompensatorBand",
    "compensator_band",
    "simulate_jumps",
    "simulate_jumps_partitioned",
    "noise_of_box",
    "truncate",
    "truncated_noise_of_box",
    "first_large_jump_time",
    "sample_noise_values",
    "sample_large_jump_flags",
    "sample_weighted_sums",
    "save_jumps_csv",
    "load_jumps_csv",
]

DEFAULT_COUNT_GUARD = 1e8


@dataclass(frozen=True)
class NoiseConfig:
    """Window and cutoff for one simulated jump field.

    The expected jump count is horizon * |domain| * cutoff**(-alpha); requests
    above `count_guard` are rejected before any allocation happens.
    `gaussian_small_jumps` is reserved for a diffusion correction of the
    omitted sub-cutoff jumps and is currently unsupported.
    """

    measure: LevyMeasure
    horizon: float
    domain: Box
    cutoff: float = 1e-3
    count_guard: float = DEFAULT_COUNT_GUARD
    gaussian_small_jumps: bool = False

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if self.domain.dim not in (1, 2):
            raise ValueError("domain dimension must be 1 or 2")
        if self.cutoff <= 0:
            raise ValueError("cutoff must be positive")
        if self.gaussian_small_jumps:
            raise NotImplementedError("diffusion correction for small jumps is reserved")
        if not math.isfinite(self.expected_jump_count):
            raise ValueError("expected jump count must be finite")

    @property
    def expected_jump_count(self):
        return self.horizon * self.domain.volume * self.cutoff ** (-self.measure.alpha)

    @property
    def window(self):
        return SpaceTimeBox(0.0, self.horizon, self.domain) if self.horizon > 0 else None


@dataclass(frozen=True)
class JumpSet:
    """One realization of the jump field: times, locations, signed sizes.

    Records are ordered by timestamp, ties broken by insertion index.  Every
    size has modulus above the cutoff and every (time, location) lies in the
    simulation window.
    """

    times: np.ndarray
    locations: np.ndarray
    sizes: np.ndarray
    horizon: float
    domain: Box
    cutoff: float
    seed_info: str = ""

    def __post_init__(self):
        if self.times.shape[0] != self.sizes.shape[0] or self.locations.shape[0] != self.times.shape[0]:
            raise ValueError("times, locations and sizes must have equal length")
        if self.times.size and np.any(np.diff(self.times) < 0):
            raise ValueError("timestamps must be nondecreasing")

    @property
    def n(self):
        return self.times.shape[0]

    @property
    def dim(self):
        return self.locations.shape[1] if self.locations.ndim == 2 else 1

    def window_box(self):
        return SpaceTimeBox(0.0, self.horizon, self.domain)


@dataclass(frozen=True)
class CompensatorBand:
    """First moment of the jump measure over a modulus band (lower, upper]."""

    lower: float
    upper: float
    value: float


def compensator_band(measure: LevyMeasure, lower, upper) -> CompensatorBand:
    """Integral of z over the band lower < |z| <= upper against the jump measure.

    Closed form beta * alpha/(alpha-1) * (lower**(1-alpha) - upper**(1-alpha)),
    reading inf**(1-alpha) as 0 when alpha > 1 and 0**(1-alpha) as 0 when
    alpha < 1.  Divergent combinations are rejected.
    """
    a, b = measure.alpha, measure.beta
    if lower < 0 or not upper > lower:
        raise ValueError("band must satisfy 0 <= lower < upper")
    if math.isinf(upper) and a < 1:
        raise ValueError("band integral diverges at infinity for alpha < 1")
    if lower == 0 and a > 1:
        raise ValueError("band integral diverges at zero for alpha > 1")
    if b == 0.0:
        return CompensatorBand(lower, upper, 0.0)
    lo_term = 0.0 if lower == 0 else lower ** (1.0 - a)
    hi_term = 0.0 if math.isinf(upper) else upper ** (1.0 - a)
    value = b * a / (a - 1.0) * (lo_term - hi_term)
    return CompensatorBand(lower, upper, value)


def _draw_magnitudes(alpha, cutoff, rng, n):
    # inverse cdf of the modulus above the cutoff: cutoff * V**(-1/alpha), V in (0,1]
    v = 1.0 - rng.random(n)
    return cutoff * v ** (-1.0 / alpha)


def _draw_signs(p, rng, n):
    return np.where(rng.random(n) < p, 1.0, -1.0)


def simulate_jumps(config: NoiseConfig, rng, seed_info="") -> JumpSet:
    """Simulate one jump set as a homogeneous marked Poisson field.

    Count ~ Poisson(horizon * |domain| * cutoff**(-alpha)); times uniform on
    the horizon, locations uniform on the domain, moduli inverse-cdf above the
    cutoff, signs positive with probability p.
    """
    lam = config.expected_jump_count
    if lam > config.count_guard:
        raise ValueError(f"expected jump count {lam:.3g} exceeds guard {config.count_guard:.3g}")
    d = config.domain.dim
    if config.horizon == 0:
        return JumpSet(np.empty(0), np.empty((0, d)), np.empty(0), config.horizon, config.domain, config.cutoff, seed_info)
    n = int(rng.poisson(lam))
    times = rng.uniform(0.0, config.horizon, n)
    locs = config.domain.sample(rng, n)
    sizes = _draw_magnitudes(config.measure.alpha, config.cutoff, rng, n) * _draw_signs(config.measure.p, rng, n)
    order = np.argsort(times, kind="stable")
    return JumpSet(times[order], locs[order], sizes[order], config.horizon, config.domain, config.cutoff, seed_info)


def simulate_jumps_partitioned(config: NoiseConfig, rng, n_space_cells=4, ring_ratio=2.0, seed_info="") -> JumpSet:
    """Alternative generator: per-cell, per-modulus-ring exponential clocks.

    Splits the domain into `n_space_cells` slabs along the first axis and the
    modulus range into geometric rings (cutoff, ..., 1, inf); each (ring, cell)
    pair runs an independent Poisson clock with rate |cell| * ring mass.
    Equal in law to `simulate_jumps`; kept as a cross-check generator.
    """
    if config.horizon == 0:
        return simulate_jumps(config, rng, seed_info)
    a, p = config.measure.alpha, config.measure.p
    lo, hi = config.domain.lows[0], config.domain.highs[0]
    edges = np.linspace(lo, hi, n_space_cells + 1)
    rings = [math.inf]
    r = 1.0
    while r > config.cutoff:
        rings.append(r)
        r /= ring_ratio
    rings.append(config.cutoff)
    rings = np.array(rings)[::-1]  # increasing, cutoff ... 1, inf
    times, locs, sizes = [], [], []
    for j in range(len(rings) - 1):
        r_lo, r_hi = rings[j], rings[j + 1]
        mass = r_lo ** (-a) - (0.0 if math.isinf(r_hi) else r_hi ** (-a))
        for k in range(n_space_cells):
            cell = Box(
                (edges[k],) + config.domain.lows[1:],
                (edges[k + 1],) + config.domain.highs[1:],
            )
            rate = cell.volume * mass
            t = 0.0
            arrivals = []
            while True:
                t += rng.exponential(1.0 / rate)
                if t > config.horizon:
                    break
                arrivals.append(t)
            m = len(arrivals)
            if m == 0:
                continue
            times.append(np.array(arrivals))
            locs.append(cell.sample(rng, m))
            # modulus inverse-cdf restricted to the ring
            v = rng.random(m)
            hi_term = 0.0 if math.isinf(r_hi) else r_hi ** (-a)
            mags = (r_lo ** (-a) - v * (r_lo ** (-a) - hi_term)) ** (-1.0 / a)
            sizes.append(mags * _draw_signs(p, rng, m))
    if not times:
        d = config.domain.dim
        return JumpSet(np.empty(0), np.empty((0, d)), np.empty(0), config.horizon, config.domain, config.cutoff, seed_info)
    t_all = np.concatenate(times)
    x_all = np.vstack(locs)
    z_all = np.concatenate(sizes)
    order = np.argsort(t_all, kind="stable")
    return JumpSet(t_all[order], x_all[order], z_all[order], config.horizon, config.domain, config.cutoff, seed_info)


def _require_inside_window(jumps: JumpSet, box: SpaceTimeBox):
    eps = 1e-12
    if box.t_start < -eps or box.t_end > jumps.horizon + eps:
        raise ValueError("box time range exceeds the simulated window")
    if not jumps.domain.encloses(box.space):
        raise ValueError("box spatial range exceeds the simulated domain")


def noise_of_box(jumps: JumpSet, box: SpaceTimeBox, config: NoiseConfig) -> float:
    """Noise value of a space-time box under the simulated field.

    Plain jump sum for alpha < 1; for alpha > 1 the sum is compensated by
    volume times the band integral over (cutoff, inf).
    """
    _require_inside_window(jumps, box)
    mask = box.contains(jumps.times, jumps.locations)
    total = float(jumps.sizes[mask].sum())
    if config.measure.alpha > 1:
        total -= box.volume * compensator_band(config.measure, jumps.cutoff, math.inf).value
    return total


def truncate(jumps: JumpSet, level) -> JumpSet:
    """Retain exactly the jumps with modulus <= level (inclusive boundary)."""
    if level <= jumps.cutoff:
        raise ValueError("truncation level must exceed the simulation cutoff")
    keep = np.abs(jumps.sizes) <= level
    return replace(
        jumps,
        times=jumps.times[keep],
        locations=jumps.locations[keep],
        sizes=jumps.sizes[keep],
    )


def truncated_noise_of_box(jumps: JumpSet, box: SpaceTimeBox, level, config: NoiseConfig) -> float:
    """Noise value of a box with jumps above `level` removed.

    For alpha > 1 the compensation band shrinks to (cutoff, level].
    """
    if level <= jumps.cutoff:
        raise ValueError("truncation level must exceed the simulation cutoff")
    _require_inside_window(jumps, box)
    mask = box.contains(jumps.times, jumps.locations) & (np.abs(jumps.sizes) <= level)
    total = float(jumps.sizes[mask].sum())
    if config.measure.alpha > 1:
        total -= box.volume * compensator_band(config.measure, jumps.cutoff, level).value
    return total


def first_large_jump_time(jumps: JumpSet, space: Box, level) -> float:
    """Earliest time a jump with modulus above `level` lands in `space`; inf if none."""
    if level <= jumps.cutoff:
        raise ValueError("level must exceed the simulation cutoff")
    mask = (np.abs(jumps.sizes) > level) & space.contains(jumps.locations)
    if not mask.any():
        return math.inf
    return float(jumps.times[mask].min())


# ---------------------------------------------------------------------------
# Replicate farms.  These sample scalar functionals of many independent jump
# sets without materializing coordinates, in chunked flat arrays; they follow
# exactly the same construction as `simulate_jumps`.  Positive and negative
# jumps are drawn as two independent Poisson streams (thinning), which avoids
# a per-jump sign stream.
# ---------------------------------------------------------------------------


def _chunk_sizes(n, lam, max_draws):
    per = max(1, int(max_draws / max(lam, 1.0)))
    out = []
    start = 0
    while start < n:
        out.append(min(per, n - start))
        start += per
    return out


def _segment_sums(values, counts):
    """Per-replicate sums of a flat draw array split by `counts`."""
    r = counts.shape[0]
    total = values.shape[0]
    if total == 0:
        return np.zeros(r)
    if np.any(counts == 0):
        idx = np.repeat(np.arange(r), counts)
        return np.bincount(idx, weights=values, minlength=r)
    offsets = np.empty(r, dtype=np.intp)
    offsets[0] = 0
    np.cumsum(counts[:-1], out=offsets[1:])
    return np.add.reduceat(values, offsets)


def _one_sided_sums(rate, alpha, cutoff, truncation, r, rng):
    counts = rng.poisson(rate, r) if rate > 0 else np.zeros(r, dtype=np.int64)
    total = int(counts.sum())
    mags = _draw_magnitudes(alpha, cutoff, rng, total)
    if truncation is not None:
        mags = np.where(mags <= truncation, mags, 0.0)
    return _segment_sums(mags, counts)


def sample_noise_values(
    measure: LevyMeasure,
    volume,
    cutoff,
    n,
    rng,
    truncation=None,
    count_guard=DEFAULT_COUNT_GUARD,
    max_chunk_draws=20_000_000,
    workers=1,
):
    """Draw `n` independent box noise values for a region of given volume.

    The law of a box value depends on the region only through its space-time
    volume, so the farm never materializes coordinates.  `truncation` removes
    jumps above that modulus (and shrinks the compensation band for
    alpha > 1).  `workers` threads split the replicate chunks; results do not
    depend on the worker count.
    """
    a = measure.alpha
    lam = volume * cutoff ** (-a)
    if lam > count_guard:
        raise ValueError(f"expected jump count {lam:.3g} exceeds guard {count_guard:.3g}")
    comp = 0.0
    if a > 1:
        upper = math.inf if truncation is None else truncation
        comp = volume * compensator_band(measure, cutoff, upper).value
    chunks = _chunk_sizes(int(n), lam, max_chunk_draws)
    child_rngs = rng.spawn(len(chunks))

    def run_chunk(i):
        r = chunks[i]
        crng = child_rngs[i]
        pos = _one_sided_sums(lam * measure.p, a, cutoff, truncation, r, crng)
        neg = _one_sided_sums(lam * measure.q, a, cutoff, truncation, r, crng)
        return pos - neg

    out = np.empty(int(n))
    if workers > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, range(len(chunks))))
    else:
        results = [run_chunk(i) for i in range(len(chunks))]
    start = 0
    for r, res in zip(chunks, results):
        out[start : start + r] = res
        start += r
    return out - comp


def sample_large_jump_flags(measure, volume, cutoff, threshold, n, rng, max_chunk_draws=20_000_000):
    """Boolean draws: does some jump of modulus above `threshold` occur?

    One draw per replicate over a region of the given space-time volume,
    simulated above `cutoff` (< threshold required).
    """
    if threshold <= cutoff:
        raise ValueError("threshold must exceed the cutoff")
    a = measure.alpha
    lam = volume * cutoff ** (-a)
    out = np.empty(int(n), dtype=bool)
    start = 0
    for r in _chunk_sizes(int(n), lam, max_chunk_draws):
        counts = rng.poisson(lam, r)
        total = int(counts.sum())
        mags = _draw_magnitudes(a, cutoff, rng, total)
        idx = np.repeat(np.arange(r), counts)
        hits = np.bincount(idx, weights=(mags > threshold).astype(float), minlength=r)
        out[start : start + r] = hits > 0
        start += r
    return out


def sample_weighted_sums(
    config: NoiseConfig,
    weight,
    n,
    rng,
    truncation=None,
    weight_integral=None,
    max_chunk_draws=20_000_000,
):
    """Draw `n` values of the jump sum weighted by a deterministic function.

    weight(times, locations) must be vectorized; locations have shape (m, d).
    For alpha > 1 a compensator `weight_integral` (the space-time integral of
    the weight over the window) must be supplied.
    """
    a = config.measure.alpha
    lam = config.expected_jump_count
    if lam > config.count_guard:
        raise ValueError("expected jump count exceeds guard")
    comp = 0.0
    if a > 1:
        if weight_integral is None:
            raise ValueError("weight_integral is required when alpha > 1")
        upper = math.inf if truncation is None else truncation
        comp = compensator_band(config.measure, config.cutoff, upper).value * weight_integral
    out = np.empty(int(n))
    start = 0
    for r in _chunk_sizes(int(n), lam, max_chunk_draws):
        counts = rng.poisson(lam, r)
        total = int(counts.sum())
        times = rng.uniform(0.0, config.horizon, total)
        locs = config.domain.sample(rng, total)
        z = _draw_magnitudes(a, config.cutoff, rng, total)
        if truncation is not None:
            keep = z <= truncation
        z *= _draw_signs(config.measure.p, rng, total)
        if truncation is not None:
            z = np.where(keep, z, 0.0)
        vals = np.asarray(weight(times, locs), dtype=float) * z
        idx = np.repeat(np.arange(r), counts)
        out[start : start + r] = np.bincount(idx, weights=vals, minlength=r)
        start += r
    return out - comp


# ---------------------------------------------------------------------------
# CSV serialization: header `t,x1[,x2],z`, 17 significant digits, bit-exact
# round trip.  Comment lines carry provenance and window metadata.
# ---------------------------------------------------------------------------


def save_jumps_csv(jumps: JumpSet, path, header_comment=None):
    d = jumps.dim
    cols = ["t"] + [f"x{i + 1}" for i in range(d)] + ["z"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        lows = ",".join("%.17g" % v for v in jumps.domain.lows)
        highs = ",".join("%.17g" % v for v in jumps.domain.highs)
        fh.write(
            "# window horizon=%.17g lows=%s highs=%s cutoff=%.17g seed_info=%s\n"
            % (jumps.horizon, lows, highs, jumps.cutoff, jumps.seed_info or "-")
        )
        fh.write(",".join(cols) + "\n")
        for i in range(jumps.n):
            row = [jumps.times[i]] + list(np.atleast_1d(jumps.locations[i])) + [jumps.sizes[i]]
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def load_jumps_csv(path) -> JumpSet:
    meta = {}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# window"):
                    for item in line[len("# window") :].split():
                        key, _, val = item.partition("=")
                        meta[key] = val
                continue
            if line.startswith("t,"):
                continue
            rows.append([float(v) for v in line.split(",")])
    data = np.array(rows, dtype=float) if rows else np.empty((0, 3))
    d = data.shape[1] - 2 if rows else len(meta.get("lows", "0").split(","))
    lows = tuple(float(v) for v in meta["lows"].split(","))
    highs = tuple(float(v) for v in meta["highs"].split(","))
    seed_info = meta.get("seed_info", "-")
    return JumpSet(
        times=data[:, 0].copy(),
        locations=data[:, 1 : 1 + d].copy().reshape(-1, d),
        sizes=data[:, 1 + d].copy(),
        horizon=float(meta["horizon"]),
        domain=Box(lows, highs),
        cutoff=float(meta["cutoff"]),
        seed_info="" if seed_info == "-" else seed_info,
    )
