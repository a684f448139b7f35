"""Post-processing of spectra: peaks, splittings, and the feeding factor.

The feeding factor F gives the fraction of a detuned two-level line's
integrated emission that appears at the cavity energy when dephasing
broadens the line: cavity and line intensities stand in the ratio
F : (1 - F).  Summed over the detuned optically active lines it
predicts the bare-cavity peak intensity without rerunning the model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .params import ModelParams
from .spectra import SpectrumSeries


class PeaksNotFound(RuntimeError):
    """The requested peak structure is absent from the series."""


@dataclass(frozen=True)
class Peak:
    center: float
    height: float
    hwhm: float
    intensity: float
    label: str = "unassigned"


@dataclass(frozen=True)
class PeakSet:
    peaks: tuple[Peak, ...]

    def __post_init__(self):
        centers = [p.center for p in self.peaks]
        if centers != sorted(centers):
            raise ValueError("peaks must be sorted by center")

    def __len__(self):
        return len(self.peaks)

    def __iter__(self):
        return iter(self.peaks)

    def labeled(self, label: str) -> Peak | None:
        for p in self.peaks:
            if p.label == label:
                return p
        return None

    def relabel(self, labels: dict[int, str]) -> "PeakSet":
        new = [
            Peak(p.center, p.height, p.hwhm, p.intensity, labels.get(i, p.label))
            for i, p in enumerate(self.peaks)
        ]
        return PeakSet(tuple(new))


def f_factor(params: ModelParams, delta_omega: float) -> float:
    """Fraction of a detuned line's emission redirected to the cavity.

    `delta_omega` is the line's detuning from the cavity in ueV.  Uses
    the total pure-dephasing half rate (electron plus hole) and the
    configured coupling; requires a nonzero coupling.
    """
    g = params.g
    if g <= 0:
        raise ValueError("f_factor requires a positive coupling")
    gs = params.gamma_spon
    gp = params.gamma_phase
    gc = params.gamma_cav
    num = gs + gp
    den = gs * (delta_omega / g) ** 2 + gc + gs + gp
    return num / den


def predict_cavity_intensity(
    params: ModelParams, active_state_lines: list[tuple[float, float]]
) -> float:
    """Sum of F(detuning) * intensity over the supplied lines.

    Each entry is (detuning from the cavity in ueV, integrated line
    intensity).  The caller chooses which lines participate; a line that
    is resonant with the cavity (forming a hybridized doublet) must be
    excluded since the feeding picture does not apply to it.
    """
    return float(sum(f_factor(params, d) * i for d, i in active_state_lines))


def _interp_crossing(x0, y0, x1, y1, level):
    # linear interpolation of the x where y crosses `level` between two samples
    if y1 == y0:
        return x0
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def _half_width(omegas, values, peak_idx, left_bound, right_bound):
    """Interpolated half-height half-widths inside the watershed region."""
    half = 0.5 * values[peak_idx]
    left = None
    for i in range(peak_idx, left_bound, -1):
        if values[i - 1] < half <= values[i]:
            left = _interp_crossing(omegas[i - 1], values[i - 1], omegas[i], values[i], half)
            break
    right = None
    for i in range(peak_idx, right_bound):
        if values[i + 1] < half <= values[i]:
            right = _interp_crossing(omegas[i], values[i], omegas[i + 1], values[i + 1], half)
            break
    center = omegas[peak_idx]
    if left is None and right is None:
        return 0.0
    if left is None:
        return right - center
    if right is None:
        return center - left
    return 0.5 * (right - left)


def _refine_center(omegas, values, idx):
    """Quadratic three-point refinement of a local maximum position."""
    if idx == 0 or idx == len(values) - 1:
        return float(omegas[idx])
    y0, y1, y2 = values[idx - 1], values[idx], values[idx + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0:
        return float(omegas[idx])
    shift = 0.5 * (y0 - y2) / denom
    shift = float(np.clip(shift, -1.0, 1.0))
    return float(omegas[idx] + shift * (omegas[1] - omegas[0]))


def find_peaks(series: SpectrumSeries, min_prominence: float) -> PeakSet:
    """Local maxima with at least `min_prominence` * max(values) prominence.

    Peak extents are watershed regions bounded by the minima between
    adjacent peaks (series edges otherwise); integrated intensity is the
    trapezoid over that region and the width is the interpolated
    half-height half-width.
    """
    if not 0.0 < min_prominence < 1.0:
        raise ValueError("min_prominence must lie in (0, 1)")
    values = series.values
    omegas = series.grid.omegas
    peak = values.max(initial=0.0)
    if peak <= 0.0:
        return PeakSet(())
    idx, _ = scipy.signal.find_peaks(values, prominence=min_prominence * peak)
    if idx.size == 0:
        return PeakSet(())

    bounds = [0]
    for a, b in zip(idx[:-1], idx[1:]):
        bounds.append(a + int(np.argmin(values[a:b + 1])))
    bounds.append(len(values) - 1)

    peaks = []
    for n, i in enumerate(idx):
        lo, hi = bounds[n], bounds[n + 1]
        intensity = float(np.trapezoid(values[lo:hi + 1], omegas[lo:hi + 1]))
        peaks.append(
            Peak(
                center=_refine_center(omegas, values, i),
                height=float(values[i]),
                hwhm=float(_half_width(omegas, values, i, lo, hi)),
                intensity=intensity,
            )
        )
    return PeakSet(tuple(peaks))


def vrs_splitting(series: SpectrumSeries, expected_center: float,
                  min_prominence: float = 0.02) -> float:
    """Separation of the two dominant peaks bracketing `expected_center` (ueV)."""
    peaks = find_peaks(series, min_prominence)
    left = [p for p in peaks if p.center < expected_center]
    right = [p for p in peaks if p.center > expected_center]
    if not left or not right:
        raise PeaksNotFound(
            f"no doublet brackets {expected_center}: "
            f"{len(left)} peak(s) below, {len(right)} above"
        )
    lo = max(left, key=lambda p: p.height)
    hi = max(right, key=lambda p: p.height)
    return hi.center - lo.center


def classify_triplet(series: SpectrumSeries, cavity_position: float = 0.0,
                     min_prominence: float = 0.02) -> PeakSet:
    """Label hybridized doublet peaks R-/R+ and a bare-cavity peak between them.

    The dominant peaks on either side of `cavity_position` become R- and
    R+; the peak nearest the cavity position is labeled "center" only if
    it lies strictly between them.  Everything else stays unassigned.
    """
    peaks = find_peaks(series, min_prominence)
    if len(peaks) < 2:
        return peaks
    left = [(i, p) for i, p in enumerate(peaks) if p.center < cavity_position]
    right = [(i, p) for i, p in enumerate(peaks) if p.center > cavity_position]
    if not left or not right:
        return peaks
    i_lo, p_lo = max(left, key=lambda t: t[1].height)
    i_hi, p_hi = max(right, key=lambda t: t[1].height)
    labels = {i_lo: "R-", i_hi: "R+"}
    i_near = min(range(len(peaks)),
                 key=lambda i: abs(peaks.peaks[i].center - cavity_position))
    if i_near not in (i_lo, i_hi):
        p = peaks.peaks[i_near]
        if p_lo.center < p.center < p_hi.center:
            labels[i_near] = "center"
    return peaks.relabel(labels)
