"""Band-limited signals: representation, metric, sampling, spectral checks.

A signal is a finite node/coefficient expansion against a shift-invariant
kernel, optionally modulated by a global carrier: the value at t is

    sum_k coeffs[k] * kernel(t - nodes[k]) * e^(2 pi i carrier t)

with an optional final real-part projection (see realify). The kernel
descriptor fixes the nominal band: a kernel of spectral halfwidth h under
carrier c gives content inside [c - h, c + h].

Band membership is certified numerically, by grid sups and by windowed
oscillatory quadrature of the spectrum (band_check); nothing here does
symbolic complex analysis. The metric is the standard weighted sum of sups
over growing intervals, truncated at a configurable depth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .interpolation import bump_transform
from .numutil import cispi, composite_gauss, cospi, sinpi

GRID_STEP = 1.0 / 64.0
GRID_RADIUS = 64.0


@dataclass(frozen=True)
class Band:
    """Frequency interval [lo, hi] in cycles per unit time."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"band needs lo < hi, got [{self.lo}, {self.hi}]")

    def carrier(self) -> float:
        return (self.lo + self.hi) / 2.0

    def contains(self, freq: float) -> bool:
        return self.lo <= freq <= self.hi


class ConstantKernel:
    """kernel(u) = 1. Spectral halfwidth 0 (pure carrier line)."""

    halfwidth = 0.0

    def eval(self, u):
        return np.ones_like(np.asarray(u, dtype=float))

    def to_json(self) -> dict:
        return {"kind": "constant"}

    def __eq__(self, other):
        return isinstance(other, ConstantKernel)


class ToneKernel:
    """kernel(u) = sin(2 pi f u) or cos(2 pi f u), exact at quarter periods.

    Argument reduction makes sin vanish identically on (1/(2f))Z in closed
    form, which is what the Nyquist counterexample needs.
    """

    def __init__(self, freq: float, form: str = "sin"):
        if freq <= 0:
            raise ValueError("tone frequency must be positive")
        if form not in ("sin", "cos"):
            raise ValueError(f"unknown tone form {form!r}")
        self.freq = float(freq)
        self.form = form
        self.halfwidth = float(freq)

    def eval(self, u):
        x = 2.0 * self.freq * np.asarray(u, dtype=float)
        return sinpi(x) if self.form == "sin" else cospi(x)

    def to_json(self) -> dict:
        return {"kind": "tone", "freq": self.freq, "form": self.form}

    def __eq__(self, other):
        return (isinstance(other, ToneKernel) and other.freq == self.freq
                and other.form == self.form)


class SincKernel:
    """kernel(u) = sinc(2 c u): the ideal low-pass kernel for band [-c, c]."""

    def __init__(self, halfwidth: float):
        if halfwidth <= 0:
            raise ValueError("sinc halfwidth must be positive")
        self.halfwidth = float(halfwidth)

    def eval(self, u):
        return np.sinc(2.0 * self.halfwidth * np.asarray(u, dtype=float))

    def to_json(self) -> dict:
        return {"kind": "sinc", "halfwidth": self.halfwidth}

    def __eq__(self, other):
        return isinstance(other, SincKernel) and other.halfwidth == self.halfwidth


class BumpKernel:
    """Transform of the normalized smooth bump on (-tau/2, tau/2): spectral
    support exactly [-tau/2, tau/2], so halfwidth tau/2."""

    def __init__(self, tau: float):
        if tau <= 0:
            raise ValueError("bump support must be positive")
        self.tau = float(tau)
        self.halfwidth = float(tau) / 2.0

    def eval(self, u):
        return bump_transform(self.tau, np.asarray(u, dtype=float))

    def to_json(self) -> dict:
        return {"kind": "bump", "tau": self.tau}

    def __eq__(self, other):
        return isinstance(other, BumpKernel) and other.tau == self.tau


_KERNEL_KINDS = {
    "constant": lambda d: ConstantKernel(),
    "tone": lambda d: ToneKernel(d["freq"], d.get("form", "sin")),
    "sinc": lambda d: SincKernel(d["halfwidth"]),
    "bump": lambda d: BumpKernel(d["tau"]),
}


def kernel_from_json(d: dict):
    kind = d.get("kind")
    if kind not in _KERNEL_KINDS:
        raise ValueError(f"unknown kernel descriptor {kind!r}")
    return _KERNEL_KINDS[kind](d)


@dataclass(frozen=True)
class BandSignal:
    """Finite kernel expansion, optionally carrier-modulated.

    real_part=True means the signal is the pointwise real part of the
    expansion (the realification map); evaluation stays complex-typed.
    """

    nodes: tuple
    coeffs: tuple
    kernel: object = field(default_factory=ConstantKernel)
    carrier_freq: float = 0.0
    real_part: bool = False

    def __post_init__(self):
        nodes = tuple(float(n) for n in self.nodes)
        coeffs = tuple(complex(c) for c in self.coeffs)
        if len(nodes) != len(coeffs):
            raise ValueError("nodes and coeffs must have equal length")
        if any(b <= a for a, b in zip(nodes, nodes[1:])):
            raise ValueError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "coeffs", coeffs)

    def eval(self, t):
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        ts = np.atleast_1d(t_arr).ravel()
        if self.nodes:
            offs = ts[:, None] - np.array(self.nodes)[None, :]
            vals = self.kernel.eval(offs).astype(complex) @ np.array(self.coeffs)
        else:
            vals = np.zeros(ts.size, dtype=complex)
        if self.carrier_freq != 0.0:
            vals = vals * cispi(2.0 * self.carrier_freq * ts)
        if self.real_part:
            vals = vals.real.astype(complex)
        if scalar:
            return complex(vals[0])
        return vals.reshape(t_arr.shape)

    def nominal_band(self) -> Band:
        """Band implied by kernel halfwidth and carrier. Halfwidth-zero
        kernels (pure carrier lines) get a hair of nominal width."""
        h = max(self.kernel.halfwidth, 2.0 ** -20)
        if self.real_part:
            hi = abs(self.carrier_freq) + h
            return Band(-hi, hi)
        return Band(self.carrier_freq - h, self.carrier_freq + h)

    def to_json(self) -> dict:
        out = {
            "nodes": list(self.nodes),
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
            "kernel": self.kernel.to_json(),
            "carrier": self.carrier_freq,
        }
        if self.real_part:
            out["real"] = True
        return out

    @classmethod
    def from_json(cls, d: dict) -> "BandSignal":
        return cls(nodes=tuple(d["nodes"]),
                   coeffs=tuple(complex(re, im) for re, im in d["coeffs"]),
                   kernel=kernel_from_json(d["kernel"]),
                   carrier_freq=float(d.get("carrier", 0.0)),
                   real_part=bool(d.get("real", False)))


@dataclass(frozen=True)
class SampleTrack:
    """Values of a signal on k*step for k in a contiguous integer window
    starting at `offset`."""

    step: float
    offset: int
    values: tuple

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        object.__setattr__(self, "values",
                           tuple(complex(v) for v in self.values))

    def times(self) -> np.ndarray:
        return (self.offset + np.arange(len(self.values))) * self.step

    def to_json(self) -> dict:
        return {"step": self.step, "offset": self.offset,
                "values": [[v.real, v.imag] for v in self.values]}

    @classmethod
    def from_json(cls, d: dict) -> "SampleTrack":
        return cls(step=float(d["step"]), offset=int(d["offset"]),
                   values=tuple(complex(re, im) for re, im in d["values"]))


def constant_signal(value: complex) -> BandSignal:
    if value == 0:
        return BandSignal((), ())
    return BandSignal((0.0,), (complex(value),))


def tone_signal(freq: float, form: str = "sin") -> BandSignal:
    """sin(2 pi f t) or cos(2 pi f t) as a single-node expansion."""
    return BandSignal((0.0,), (1.0 + 0.0j,), ToneKernel(freq, form))


def metric_d(s1: BandSignal, s2: BandSignal, depth: int = 40,
             grid_step: float = GRID_STEP) -> float:
    """Truncated weighted metric: sum_{n=1}^{depth} 2^-n sup_{[-n,n]}|s1-s2|,
    sups taken over a grid of the given pitch."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    count = int(math.floor(depth / grid_step + 1e-9))
    ts = np.arange(-count, count + 1) * grid_step
    diff = np.abs(s1.eval(ts) - s2.eval(ts))
    order = np.argsort(np.abs(ts), kind="stable")
    sorted_abs = np.abs(ts)[order]
    running = np.maximum.accumulate(diff[order])
    total = 0.0
    for n in range(1, depth + 1):
        idx = int(np.searchsorted(sorted_abs, n + 1e-12, side="right")) - 1
        total += 2.0 ** -n * float(running[idx])
    return total


def grid_sup(s: BandSignal, radius: float = GRID_RADIUS,
             step: float = GRID_STEP) -> float:
    """Sup of |s| over the default certification grid; membership in the
    unit ball means grid_sup <= 1."""
    count = int(math.floor(radius / step + 1e-9))
    ts = np.arange(-count, count + 1) * step
    return float(np.max(np.abs(s.eval(ts))))


@dataclass(frozen=True)
class BandCheckReport:
    leakage: tuple
    tol: float
    passed: bool
    half_window: float
    edge_fraction: float
    window_short: bool


def band_check(s: BandSignal, band: Band, probe_freqs, tol: float = 1e-3,
               half_window: float = 64.0) -> BandCheckReport:
    """Estimate spectral leakage at probe frequencies outside the band.

    Computes |F(s * taper)(xi)| / integral(taper) with a Hann taper on
    [-T, T] by composite Gauss quadrature, at least 8 nodes per period of
    the fastest oscillation present. A slowly decaying signal still large
    near the window edge degrades the estimate; that is reported as
    window_short rather than silently passed.
    """
    probes = [float(f) for f in probe_freqs]
    for f in probes:
        if band.contains(f):
            raise ValueError(f"probe frequency {f} lies inside the band")
    T = float(half_window)
    fmax = max([abs(f) for f in probes]
               + [abs(band.lo), abs(band.hi), abs(s.carrier_freq)] + [1.0])
    # composite panels: 24-node Gauss resolves ~7 periods comfortably; use
    # panel width <= 3 / fmax for >= 8 nodes per period
    panels = max(8, int(math.ceil(2.0 * T * fmax / 3.0)))
    ts, qw = composite_gauss(-T, T, panels, 24)
    taper = np.cos(np.pi * ts / (2.0 * T)) ** 2
    norm = T  # closed-form integral of the Hann taper over [-T, T]
    vals = s.eval(ts) * taper
    leakage = []
    for f in probes:
        est = np.sum(vals * qw * cispi(-2.0 * f * ts)) / norm
        leakage.append((f, float(abs(est))))
    # edge diagnostic: signal mass in the outer 20% of the window
    grid = np.linspace(-T, T, 513)
    mag = np.abs(s.eval(grid))
    overall = float(np.max(mag))
    outer = float(np.max(mag[np.abs(grid) >= 0.8 * T]))
    edge_fraction = outer / overall if overall > 0 else 0.0
    window_short = edge_fraction > 0.3
    passed = all(v <= tol for _, v in leakage)
    return BandCheckReport(leakage=tuple(leakage), tol=tol, passed=passed,
                           half_window=T, edge_fraction=edge_fraction,
                           window_short=window_short)


def realify(s: BandSignal) -> BandSignal:
    """Pointwise real part: the projection of V[a,b] into the real signals
    of band [-hi, hi]. Idempotent."""
    return BandSignal(s.nodes, s.coeffs, s.kernel, s.carrier_freq,
                      real_part=True)


def sample(s: BandSignal, step: float, window) -> SampleTrack:
    """values[k] = s(k*step) for k in the inclusive integer window."""
    k_lo, k_hi = int(window[0]), int(window[1])
    if k_hi < k_lo:
        raise ValueError("empty sample window")
    ks = np.arange(k_lo, k_hi + 1)
    vals = s.eval(ks * float(step))
    return SampleTrack(step=float(step), offset=k_lo,
                       values=tuple(complex(v) for v in np.atleast_1d(vals)))


def write_signal_csv(s: BandSignal, ts, fp) -> None:
    """Rows of t, re, im for plotting."""
    vals = s.eval(np.asarray(ts, dtype=float))
    fp.write("t,re,im\n")
    for t, v in zip(np.asarray(ts, dtype=float), np.atleast_1d(vals)):
        fp.write(f"{float(t)!r},{v.real!r},{v.imag!r}\n")


def _random_lowpass_signal(halfwidth: float, rng, node_slots: int = 16,
                           max_nodes: int = 8) -> BandSignal:
    """Random expansion against the ideal low-pass kernel for [-c, c]:
    nodes on the (1/(2c)) grid, complex normal coefficients."""
    count = int(rng.integers(2, max_nodes + 1))
    slots = rng.choice(np.arange(-node_slots, node_slots + 1), size=count,
                       replace=False)
    nodes = np.sort(slots) / (2.0 * halfwidth)
    coeffs = rng.normal(size=count) + 1j * rng.normal(size=count)
    return BandSignal(tuple(nodes), tuple(coeffs), SincKernel(halfwidth))


@dataclass(frozen=True)
class StressReport:
    halfwidth: float
    step: float
    trials: int
    violations: tuple
    min_ratio: float | None
    counterexample: dict | None

    @property
    def passed(self) -> bool:
        return not self.violations and self.counterexample is None


def sampling_injectivity_stress(halfwidth: float, denominator: int,
                                trials: int, seed: int = 0,
                                sample_radius: float = 32.0,
                                grid_step: float = 0.25) -> StressReport:
    """Monte-Carlo check that sampling at step 1/N is injective on signals
    band-limited in [-c, c] when c < N/2.

    Each trial draws two random low-pass signals and compares the sampled
    sup gap to the continuous grid-sup gap; a violation is a sampled gap
    below 1e-9 against a continuous gap above 1e-6. At or beyond the
    boundary c >= N/2 the classical counterexample sin(2 pi (N/2) t), which
    vanishes identically on (1/N)Z, is injected and witnessed exactly.
    """
    if halfwidth <= 0:
        raise ValueError("band halfwidth must be positive")
    if denominator < 1:
        raise ValueError("sampling denominator must be a positive integer")
    if trials < 0:
        raise ValueError("trials must be >= 0")
    step = 1.0 / denominator
    rng = np.random.default_rng(seed)
    k_max = int(round(sample_radius * denominator))
    ks = np.arange(-k_max, k_max + 1)
    grid_count = int(math.floor(sample_radius / grid_step + 1e-9))
    grid = np.arange(-grid_count, grid_count + 1) * grid_step
    violations = []
    min_ratio = None
    for trial in range(trials):
        for _ in range(20):
            s1 = _random_lowpass_signal(halfwidth, rng)
            s2 = _random_lowpass_signal(halfwidth, rng)
            cont = float(np.max(np.abs(s1.eval(grid) - s2.eval(grid))))
            if cont > 1e-12:
                break
        sampled = float(np.max(np.abs(s1.eval(ks * step) - s2.eval(ks * step))))
        ratio = sampled / cont
        if min_ratio is None or ratio < min_ratio:
            min_ratio = ratio
        if sampled < 1e-9 and cont > 1e-6:
            violations.append(trial)
    counterexample = None
    if trials >= 1 and halfwidth >= denominator / 2.0:
        tone = tone_signal(denominator / 2.0, "sin")
        track = sample(tone, step, (-k_max, k_max))
        sampled_sup = max(abs(v) for v in track.values)
        cont = float(np.max(np.abs(tone.eval(grid))))
        counterexample = {
            "tone_freq": denominator / 2.0,
            "sampled_sup": sampled_sup,
            "continuous_sup": cont,
            "exact_zero": all(v == 0 for v in track.values),
        }
    return StressReport(halfwidth=halfwidth, step=step, trials=trials,
                        violations=tuple(violations), min_ratio=min_ratio,
                        counterexample=counterexample)
