"""Backflow-region detection and parameter scans.

Detection is two stage: a coarse grid brackets every sign change of the
longitudinal current, then bisection refines each boundary to tolerance.
The same machinery locates the onset weight at which a family first
develops backflow, and a vectorized grid evaluates the nonrelativistic
velocity / quantum-potential region masks over (a, x).
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, TextIO

import numpy as np
from scipy.optimize import minimize_scalar

from .case_catalog import CaseSpec, build_case
from .currents import (
    CurrentSample,
    SuperpositionState,
    current_grid,
    current_samples_grid,
    evaluate_state,
    evaluate_state_grid,
)
from .dirac_states import DEFAULT_PARAMS, PhysicalParams

__all__ = [
    "BackflowRegion",
    "NoSignChange",
    "RegionGrid",
    "ResolutionTooCoarse",
    "ScanGrid",
    "backflow_threshold",
    "find_backflow_regions",
    "iter_region_rows",
    "region_grid",
    "scan_current",
    "write_grid_csv",
    "write_samples_csv",
]

DEFAULT_TOL = 1e-10
_POINTS_PER_PERIOD = 16  # coarse samples per half oscillation period pi/k


class NoSignChange(ArithmeticError):
    """The scanned quantity never changes sign in the bracket."""


class ResolutionTooCoarse(UserWarning):
    """Coarse sampling may skip oscillations shorter than twice the spacing."""


@dataclass(frozen=True)
class ScanGrid:
    """Uniform 1D scan axis [lo, hi] with n points, evaluated at time t."""

    lo: float
    hi: float
    n: int
    t: float = 0.0

    def __post_init__(self) -> None:
        if not (self.hi > self.lo):
            raise ValueError(f"degenerate range [{self.lo}, {self.hi}]")
        if self.n < 2:
            raise ValueError(f"resolution must be at least 2, got {self.n}")

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


def scan_current(state: SuperpositionState, grid: ScanGrid) -> list[CurrentSample]:
    """Evaluate density/current/velocity samples on a scan grid."""
    return current_samples_grid(state, grid.points(), grid.t)


@dataclass(frozen=True)
class BackflowRegion:
    """Disjoint ordered intervals on which the scanned quantity is negative."""

    axis: str
    intervals: tuple[tuple[float, float], ...]
    tol: float

    def as_dict(self) -> dict:
        return {
            "axis": self.axis,
            "intervals": [list(iv) for iv in self.intervals],
            "tol": self.tol,
        }


def _jz_function(state: SuperpositionState, t: float) -> Callable[[float], float]:
    def jz(z: float) -> float:
        psi = evaluate_state(state, z, t)
        return float(current_grid(psi[None, :], state.params)[0, 2])

    return jz


def _bisect_boundary(
    f: Callable[[float], float], lo: float, hi: float, lo_negative: bool, tol: float
) -> float:
    """Shrink a sign-change bracket below tol; returns its midpoint."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) < 0.0) == lo_negative:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _default_coarse_n(lo: float, hi: float, k_max: float) -> int:
    if k_max <= 0.0:
        return 65
    per_length = _POINTS_PER_PERIOD * k_max / math.pi
    return max(33, int(math.ceil((hi - lo) * per_length)) + 1)


def find_backflow_regions(
    state: SuperpositionState,
    z_range: tuple[float, float],
    t: float = 0.0,
    tol: float = DEFAULT_TOL,
    coarse_n: int | None = None,
) -> BackflowRegion:
    """Locate the intervals of z on which the longitudinal current is negative.

    Parameters
    ----------
    state : superposition to scan
    z_range : (lo, hi) scan window
    t : evaluation time
    tol : bisection width for the interval boundaries
    coarse_n : override for the coarse grid size; the default places 16
        points per half period pi/k_max, enough to bracket every sign
        change of the sinusoidal closed forms.
    """
    lo, hi = map(float, z_range)
    if not hi > lo:
        raise ValueError(f"degenerate z range [{lo}, {hi}]")
    if not tol > 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    k_max = state.max_wavenumber
    n = coarse_n if coarse_n is not None else _default_coarse_n(lo, hi, k_max)
    if n < 2:
        raise ValueError(f"coarse resolution must be at least 2, got {n}")
    spacing = (hi - lo) / (n - 1)
    if k_max > 0.0 and spacing > 0.5 * math.pi / k_max:
        warnings.warn(
            f"coarse spacing {spacing:.3g} exceeds half the shortest period "
            f"{math.pi / k_max:.3g}; sign changes may be missed",
            ResolutionTooCoarse,
            stacklevel=2,
        )

    zs = np.linspace(lo, hi, n)
    jz_values = current_grid(evaluate_state_grid(state, zs, t), state.params)[:, 2]
    negative = jz_values < 0.0
    f = _jz_function(state, t)

    intervals: list[tuple[float, float]] = []
    start = lo if negative[0] else None
    for i in range(1, n):
        if negative[i] == negative[i - 1]:
            continue
        boundary = _bisect_boundary(f, float(zs[i - 1]), float(zs[i]), bool(negative[i - 1]), tol)
        if negative[i]:
            start = boundary
        else:
            intervals.append((start, boundary))
            start = None
    if start is not None:
        intervals.append((start, hi))

    confirmed = tuple(iv for iv in intervals if f(0.5 * (iv[0] + iv[1])) < 0.0)
    return BackflowRegion(axis="z", intervals=confirmed, tol=tol)


def _min_jz_over_period(state: SuperpositionState, k_ref: float, t: float) -> float:
    """Minimum longitudinal current over one spatial period 2 pi / k_ref."""
    period = 2.0 * math.pi / k_ref
    zs = np.linspace(0.0, period, 257)
    values = current_grid(evaluate_state_grid(state, zs, t), state.params)[:, 2]
    i = int(np.argmin(values))
    window = (float(zs[max(i - 1, 0)]), float(zs[min(i + 1, len(zs) - 1)]))
    f = _jz_function(state, t)
    refined = minimize_scalar(f, bounds=window, method="bounded", options={"xatol": 1e-12})
    return min(float(values[i]), float(refined.fun))


def backflow_threshold(
    spec: CaseSpec,
    bracket: tuple[float, float],
    free_param: str = "a",
    t: float = 0.0,
    tol: float = DEFAULT_TOL,
    samples: int = 17,
) -> float:
    """Bisect the weight at which min_z jz crosses zero for a family instance.

    The bracket is first sampled to confirm a single sign change (the
    scanned minimum must be monotone or single-crossing); bisection then
    refines the crossing to tol.
    """
    if free_param != "a":
        raise ValueError(f"only the weight 'a' can be scanned, got {free_param!r}")
    lo, hi = map(float, bracket)
    if not (0.0 <= lo < hi):
        raise ValueError(f"invalid bracket [{lo}, {hi}]")

    def g(a: float) -> float:
        return _min_jz_over_period(build_case(replace(spec, a=a)), spec.k, t)

    grid = np.linspace(lo, hi, samples)
    signs = np.array([g(a) < 0.0 for a in grid])
    changes = int(np.sum(signs[1:] != signs[:-1]))
    if changes == 0:
        raise NoSignChange(f"min_z jz does not change sign for a in [{lo}, {hi}]")
    if changes > 1:
        raise ValueError("multiple sign changes in bracket; shrink it to isolate one onset")
    i = int(np.argmax(signs[1:] != signs[:-1])) + 1
    return _bisect_boundary(g, float(grid[i - 1]), float(grid[i]), bool(signs[i - 1]), tol)


@dataclass(frozen=True)
class RegionGrid:
    """Velocity and quantum-potential fields over (a, x) with sign masks."""

    a: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    mask_v: np.ndarray = field(repr=False)
    mask_Q: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        expected = (self.a.size, self.x.size)
        for name in ("v", "Q", "mask_v", "mask_Q"):
            if getattr(self, name).shape != expected:
                raise ValueError(f"grid field {name} has shape {getattr(self, name).shape}, expected {expected}")


def _resolution_pair(resolution: int | tuple[int, int]) -> tuple[int, int]:
    if isinstance(resolution, int):
        pair = (resolution, resolution)
    else:
        pair = (int(resolution[0]), int(resolution[1]))
    if pair[0] < 2 or pair[1] < 2:
        raise ValueError(f"resolution must be at least 2 per axis, got {pair}")
    return pair


def iter_region_rows(
    a_range: tuple[float, float] = (0.0, 1.0),
    x_range: tuple[float, float] = (-6.0, 6.0),
    resolution: int | tuple[int, int] = 400,
    params: PhysicalParams = DEFAULT_PARAMS,
    k: float = 1.0,
    phi: float = 0.0,
) -> Iterator[tuple[float, np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Stream (a, x, v, Q, mask_v, mask_Q) one weight row at a time.

    Rows are constant memory, so arbitrarily fine grids can be exported
    without holding the full field. Singular points (zero denominator,
    only reachable at a = 1 with cos(kx + phi) = -1) yield NaN and are
    excluded from both masks.
    """
    na, nx = _resolution_pair(resolution)
    a_values = np.linspace(a_range[0], a_range[1], na)
    x_values = np.linspace(x_range[0], x_range[1], nx)
    cos_term = np.cos(k * x_values + phi)
    v_scale = params.hbar * k / params.mass
    q_scale = params.hbar * params.hbar * k * k / (2.0 * params.mass)
    for a in a_values:
        denominator = 1.0 + a * a + 2.0 * a * cos_term
        safe = np.abs(denominator) > 1e-12
        denom = np.where(safe, denominator, 1.0)
        v = np.where(safe, a * v_scale * (a + cos_term) / denom, np.nan)
        q = np.where(safe, a * q_scale * (1.0 + a * cos_term) * (a + cos_term) / (denom * denom), np.nan)
        yield float(a), x_values, v, q, safe & (v < 0.0), safe & (q > 0.0)


def region_grid(
    a_range: tuple[float, float] = (0.0, 1.0),
    x_range: tuple[float, float] = (-6.0, 6.0),
    resolution: int | tuple[int, int] = 400,
    params: PhysicalParams = DEFAULT_PARAMS,
    k: float = 1.0,
    phi: float = 0.0,
) -> RegionGrid:
    """Assemble the full (a, x) region grid; see iter_region_rows for the fields."""
    rows = list(iter_region_rows(a_range, x_range, resolution, params, k, phi))
    a_values = np.array([row[0] for row in rows])
    x_values = rows[0][1]

    def stacked(idx: int) -> np.ndarray:
        return np.stack([row[idx] for row in rows])

    return RegionGrid(
        a=a_values,
        x=x_values,
        v=stacked(2),
        Q=stacked(3),
        mask_v=stacked(4),
        mask_Q=stacked(5),
    )


def _fmt(value: float) -> str:
    return format(value, ".17g")


def write_samples_csv(samples: Iterable[CurrentSample], fh: TextIO) -> None:
    """Write scan samples as CSV rows (z, t, rho, jx, jy, jz, vz, flag_node)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["z", "t", "rho", "jx", "jy", "jz", "vz", "flag_node"])
    for s in samples:
        vz = float("nan") if s.v is None else float(s.v[2])
        writer.writerow(
            [_fmt(s.z), _fmt(s.t), _fmt(s.rho)]
            + [_fmt(float(c)) for c in s.j]
            + [_fmt(vz), int(s.node)]
        )


def write_grid_csv(
    fh: TextIO,
    a_range: tuple[float, float] = (0.0, 1.0),
    x_range: tuple[float, float] = (-6.0, 6.0),
    resolution: int | tuple[int, int] = 400,
    params: PhysicalParams = DEFAULT_PARAMS,
    k: float = 1.0,
    phi: float = 0.0,
) -> None:
    """Stream the region grid as CSV rows (a, x, v, Q, mask_v, mask_Q)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["a", "x", "v", "Q", "mask_v", "mask_Q"])
    for a, xs, v, q, mask_v, mask_q in iter_region_rows(a_range, x_range, resolution, params, k, phi):
        for j in range(xs.size):
            writer.writerow(
                [_fmt(a), _fmt(float(xs[j])), _fmt(float(v[j])), _fmt(float(q[j])),
                 int(mask_v[j]), int(mask_q[j])]
            )
