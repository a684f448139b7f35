"""Numerical studies: single spectra, parameter sweeps, field averaging.

Every command writes plot-ready CSV plus a plain-text manifest with the
fully resolved parameters, solver residuals and timing.  Spectrum files
carry ``omega_ueV, lambda_nm, intensity``; sweep maps carry
``sweep_value, omega_ueV, intensity``.  Output is a pure function of
the configuration and seed: reruns produce byte-identical files.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import classify_triplet, f_factor, find_peaks
from .config import RunConfig, apply_sweep_value
from .hamiltonian import transition_energies, tune_cavity_to
from .hilbert import HilbertSpace, enumerate_basis
from .liouvillian import DensityMatrix, SuperOperator, assemble_liouvillian, block_decompose
from .params import ModelParams
from .spectra import FrequencyGrid, ResolventEngine, SpectrumSeries, s_cav, s_total, s_x, s_y, s_L, s_R
from .steady_state import charge_populations, solve_steady, solve_steady_block

_CHANNEL_FUNCS = {"cav": s_cav, "x": s_x, "y": s_y, "L": s_L, "R": s_R, "total": s_total}

# Spectral resolution conventions for the canonical studies: runs without
# pure dephasing get 2*hbar*gamma_reso = 30 ueV of artificial broadening
# (the physical lines would otherwise be tens of neV wide), runs with
# dephasing are already broad and get none.
RESO_FOR_SHARP_LINES = 30.0


@dataclass
class ModelRun:
    """Assembled generator, steady state and a shared resolvent engine."""

    params: ModelParams
    space: HilbertSpace
    liouvillian: SuperOperator
    rho: DensityMatrix
    engine: ResolventEngine
    steady_residual: float
    steady_min_eig: float


def build_run(params: ModelParams, method: str = "auto", use_blocks: bool = False,
              check_unique: bool = False) -> ModelRun:
    space = enumerate_basis(params.p_max)
    liouv = assemble_liouvillian(space, params)
    blocks = None
    if use_blocks:
        blocks = block_decompose(liouv)
        if blocks.trivial:
            blocks = None
    if blocks is not None:
        rho = solve_steady_block(blocks)
        if check_unique:
            from .steady_state import check_uniqueness
            check_uniqueness(liouv)
    else:
        rho = solve_steady(liouv, check_unique=check_unique)
    engine = ResolventEngine(liouv, rho, method=method, blocks=blocks)
    residual = float(np.abs(liouv.matrix @ rho.matrix.reshape(-1, order="F")).max())
    return ModelRun(
        params=params, space=space, liouvillian=liouv, rho=rho, engine=engine,
        steady_residual=residual, steady_min_eig=rho.min_eigenvalue(),
    )


def compute_channels(run: ModelRun, grid: FrequencyGrid, channels,
                     gamma_reso: float | None = None) -> dict[str, SpectrumSeries]:
    out = {}
    for ch in channels:
        fn = _CHANNEL_FUNCS[ch]
        out[ch] = fn(run.liouvillian, run.rho, run.params, grid,
                     gamma_reso=gamma_reso, engine=run.engine)
    return out


def default_grid(config: RunConfig) -> FrequencyGrid:
    if config.grid is not None:
        return FrequencyGrid.linspace(config.grid.omega_min, config.grid.omega_max,
                                      config.grid.points)
    return FrequencyGrid.linspace(-3000.0, 3000.0, 1200)


# ----------------------------------------------------------------------
# File output

def _fmt(x: float) -> str:
    return f"{x:.12e}"


def write_spectrum_csv(path: Path, params: ModelParams, series: SpectrumSeries) -> None:
    lam = params.wavelength_nm(series.grid.omegas)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("omega_ueV,lambda_nm,intensity\n")
        for w, l, v in zip(series.grid.omegas, lam, series.values):
            fh.write(f"{_fmt(w)},{_fmt(l)},{_fmt(v)}\n")


def write_map_csv(path: Path, rows) -> None:
    """rows: iterable of (sweep_value, omegas array, values array)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("sweep_value,omega_ueV,intensity\n")
        for sweep_value, omegas, values in rows:
            for w, v in zip(omegas, values):
                fh.write(f"{_fmt(sweep_value)},{_fmt(w)},{_fmt(v)}\n")


def write_manifest(path: Path, sections: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in sections.items():
            fh.write(f"{key} = {value}\n")


def _manifest_base(params: ModelParams, seed: int, extra: dict | None = None) -> dict:
    out = {"qdcav_version": __version__, "seed": seed}
    out.update({k: v for k, v in sorted(params.to_dict().items())})
    if extra:
        out.update(extra)
    return out


# ----------------------------------------------------------------------
# Convergence diagnostic: rerun one cutoff higher and compare.  Uses the
# invariant-block solver when the generator decomposes (it always does
# for this model; verified per run by the scan inside block_decompose)
# so the diagnostic stays cheap even at the larger cutoff.

def pmax_convergence_delta(params: ModelParams, grid: FrequencyGrid,
                           gamma_reso: float | None = None) -> float:
    lo = build_run(params, use_blocks=True)
    hi = build_run(params.replace(p_max=params.p_max + 1), use_blocks=True)
    s_lo = compute_channels(lo, grid, ("total",), gamma_reso)["total"]
    s_hi = compute_channels(hi, grid, ("total",), gamma_reso)["total"]
    scale = float(np.abs(s_lo.values).max())
    if scale == 0.0:
        return 0.0
    return float(np.abs(s_hi.values - s_lo.values).max() / scale)


# ----------------------------------------------------------------------
# Commands

def run_spectrum(config: RunConfig, out_dir, workers: int = 1, method: str = "auto",
                 use_blocks: bool = False, check_unique: bool = False,
                 convergence_check: bool = True) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    params = config.params
    run = build_run(params, method=method, use_blocks=use_blocks, check_unique=check_unique)
    grid = default_grid(config)
    series = compute_channels(run, grid, config.channels)
    paths = {}
    for ch, s in series.items():
        path = out / f"spectrum_{ch}.csv"
        write_spectrum_csv(path, params, s)
        paths[ch] = path

    pops = charge_populations(run.rho)
    dominant = max(pops.items(), key=lambda kv: kv[1])
    extra = {
        "steady_residual": _fmt(run.steady_residual),
        "steady_min_eigenvalue": _fmt(run.steady_min_eig),
        "dominant_charge_state": dominant[0].label(),
        "dominant_charge_population": _fmt(dominant[1]),
        "grid_omega_min": _fmt(grid.omegas[0]),
        "grid_omega_max": _fmt(grid.omegas[-1]),
        "grid_points": len(grid),
        "channels": ",".join(config.channels),
        "solver_method": method,
        "block_solver": use_blocks,
    }
    if convergence_check:
        delta = pmax_convergence_delta(params, grid)
        extra["pmax_convergence_delta"] = _fmt(delta)
        extra["pmax_convergence_cutoffs"] = f"{params.p_max},{params.p_max + 1}"
    extra["wall_seconds"] = f"{time.perf_counter() - t0:.3f}"
    write_manifest(out / "manifest.txt", _manifest_base(params, config.seed, extra))
    return paths


def _sweep_map(values, point_fn, workers: int):
    """Evaluate point_fn over sweep values, preserving input order."""
    if workers <= 1:
        return [point_fn(v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(point_fn, values))


def sweep_detuning(config: RunConfig, out_dir, workers: int = 1, method: str = "auto",
                   use_blocks: bool = False) -> dict:
    """Detuning maps of the total spectrum, with and without dephasing.

    The dephasing-free variant is broadened by 2*hbar*gamma_reso = 30
    ueV so its lines are visible; the dephased variant (total
    2*hbar*gamma_phase = 30 ueV) is emitted unbroadened.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    base = config.params
    if config.sweep is not None and config.sweep.parameter == "delta_omega_BX":
        values = config.sweep.values
    else:
        center = tune_cavity_to(base, "BX0_y").delta_omega_BX
        values = tuple(np.linspace(center - 3000.0, center + 3000.0, 61))
    grid = default_grid(config)

    variants = (
        ("nophase", 0.0, 0.5 * RESO_FOR_SHARP_LINES),
        ("phase30", 30.0, 0.0),
    )
    paths = {}
    for tag, two_gp, gamma_reso in variants:
        def point(value, _two_gp=two_gp, _reso=gamma_reso):
            p = apply_sweep_value(base, "delta_omega_BX", float(value))
            p = apply_sweep_value(p, "two_hbar_gamma_phase", _two_gp)
            run = build_run(p, method=method, use_blocks=use_blocks)
            s = compute_channels(run, grid, ("total",), gamma_reso=_reso)["total"]
            return s.values

        rows = _sweep_map(values, point, workers)
        path = out / f"detuning_map_{tag}.csv"
        write_map_csv(path, [(v, grid.omegas, vals) for v, vals in zip(values, rows)])
        paths[tag] = path

    extra = {
        "sweep_parameter": "delta_omega_BX",
        "sweep_values": ",".join(_fmt(v) for v in values),
        "wall_seconds": f"{time.perf_counter() - t0:.3f}",
    }
    write_manifest(out / "manifest.txt", _manifest_base(base, config.seed, extra))
    return paths


# Optically active lines that can feed the cavity for a y-polarized
# cavity mode: the y components of the neutral lines plus both circular
# components of the charged ones.
_FEEDING_LINES = (
    ("BX0_y", ("y", "cav")),
    ("XX0_y", ("y", "cav")),
    ("X_plus", ("L", "R", "cav")),
    ("X_minus", ("L", "R", "cav")),
)


def measure_line_intensity(run: ModelRun, center: float, channels,
                           half_span: float = 150.0, points: int = 121,
                           gamma_reso: float = 0.0, min_prominence: float = 0.05) -> float:
    """Integrated intensity of the emission feature nearest `center`.

    Sums the requested channels on a window around the expected line and
    integrates the watershed region of the closest peak.  The intensity
    at a line's energy must include the cavity channel: a detuned state
    radiates through the cavity tail at its own transition energy.
    """
    grid = FrequencyGrid.around(center, half_span, points)
    series = None
    for ch in channels:
        s = _CHANNEL_FUNCS[ch](run.liouvillian, run.rho, run.params, grid,
                               gamma_reso=gamma_reso, engine=run.engine)
        series = s if series is None else series + s
    peaks = find_peaks(series, min_prominence)
    if len(peaks) == 0:
        return 0.0
    best = min(peaks, key=lambda p: abs(p.center - center))
    return best.intensity


def aze_prediction(run: ModelRun, exclude: tuple[str, ...] = (),
                   gamma_reso: float = 0.0) -> float:
    """Feeding-factor prediction of the bare-cavity intensity.

    Measures each active line's intensity at its own energy, converts it
    to the state's total emission with the line's share 1 - F, and sums
    the cavity shares F.  Lines in `exclude` (e.g. one that is resonant
    with the cavity and hybridizes instead of feeding) are skipped.
    """
    lines = transition_energies(run.params)
    total = 0.0
    for name, channels in _FEEDING_LINES:
        if name in exclude:
            continue
        det = lines[name]
        i_line = measure_line_intensity(run, det, channels, gamma_reso=gamma_reso)
        f = f_factor(run.params, det)
        total += f * (i_line / (1.0 - f))
    return total


def sweep_dephasing(config: RunConfig, out_dir, workers: int = 1, method: str = "auto",
                    use_blocks: bool = False) -> dict:
    """Dephasing dependence of the bare-cavity intensity vs the prediction.

    Scenario "detuned": cavity 2.5 meV above the y bright line, all
    lines feed.  Scenario "resonant": cavity on the y bright line, which
    hybridizes (measured as the center peak of the triplet) while the
    other lines feed.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    base = config.params
    if config.sweep is not None and config.sweep.parameter == "two_hbar_gamma_phase":
        values = config.sweep.values
    else:
        values = (5.0, 15.0, 30.0, 50.0)

    on_resonance = tune_cavity_to(base, "BX0_y")
    scenarios = (
        ("detuned", on_resonance.delta_omega_BX - 2500.0),
        ("resonant", on_resonance.delta_omega_BX),
    )

    rows = []
    for scenario, d_omega in scenarios:
        def point(two_gp, _scenario=scenario, _dw=d_omega):
            p = base.replace(
                delta_omega_BX=_dw,
                two_hbar_gamma_phase_e=0.5 * two_gp,
                two_hbar_gamma_phase_h=0.5 * two_gp,
            )
            run = build_run(p, method=method, use_blocks=use_blocks)
            if _scenario == "detuned":
                direct = measure_line_intensity(run, 0.0, ("cav", "x", "y"))
                predicted = aze_prediction(run)
                r_minus = r_plus = 0.0
            else:
                grid = FrequencyGrid.around(0.0, 450.0, 121)
                s = compute_channels(run, grid, ("cav", "y"), gamma_reso=0.0)
                triplet = classify_triplet(s["cav"] + s["y"])
                center = triplet.labeled("center")
                direct = 0.0 if center is None else center.intensity
                rm, rp = triplet.labeled("R-"), triplet.labeled("R+")
                r_minus = 0.0 if rm is None else rm.intensity
                r_plus = 0.0 if rp is None else rp.intensity
                predicted = aze_prediction(run, exclude=("BX0_y",))
            return (_scenario, two_gp, direct, predicted, r_minus, r_plus)

        rows.extend(_sweep_map(values, point, workers))

    path = Path(out) / "dephasing_sweep.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("scenario,two_hbar_gamma_phase_ueV,direct_cavity_intensity,"
                 "predicted_cavity_intensity,r_minus_intensity,r_plus_intensity\n")
        for scenario, two_gp, direct, predicted, r_minus, r_plus in rows:
            fh.write(f"{scenario},{_fmt(two_gp)},{_fmt(direct)},{_fmt(predicted)},"
                     f"{_fmt(r_minus)},{_fmt(r_plus)}\n")
    extra = {
        "sweep_parameter": "two_hbar_gamma_phase",
        "sweep_values": ",".join(_fmt(v) for v in values),
        "wall_seconds": f"{time.perf_counter() - t0:.3f}",
    }
    write_manifest(out / "manifest.txt", _manifest_base(base, config.seed, extra))
    return {"sweep": path}


def sweep_injection(config: RunConfig, out_dir, workers: int = 1, method: str = "auto",
                    use_blocks: bool = False) -> dict:
    """Injection-rate dependence of the spectrum around the y bright line.

    Pure dephasing is forced off; each rate's cav+y spectrum is emitted
    normalized to its own maximum (the x channel is left out to keep the
    uncoupled x-polarized line out of the picture).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    base = tune_cavity_to(config.params, "BX0_y").replace(
        two_hbar_gamma_phase_e=0.0, two_hbar_gamma_phase_h=0.0
    )
    if config.sweep is not None and config.sweep.parameter == "two_hbar_P":
        values = config.sweep.values
    else:
        values = (33.0, 330.0, 3300.0)
    grid = (FrequencyGrid.linspace(config.grid.omega_min, config.grid.omega_max, config.grid.points)
            if config.grid is not None else FrequencyGrid.around(0.0, 450.0, 181))

    def point(two_p):
        p = apply_sweep_value(base, "two_hbar_P", float(two_p))
        run = build_run(p, method=method, use_blocks=use_blocks)
        s = compute_channels(run, grid, ("cav", "y"), gamma_reso=0.5 * RESO_FOR_SHARP_LINES)
        values_cy = (s["cav"] + s["y"]).values
        peak = values_cy.max()
        return values_cy / peak if peak > 0 else values_cy

    rows = _sweep_map(values, point, workers)
    path = out / "injection_map.csv"
    write_map_csv(path, [(v, grid.omegas, vals) for v, vals in zip(values, rows)])
    extra = {
        "sweep_parameter": "two_hbar_P",
        "sweep_values": ",".join(_fmt(v) for v in values),
        "normalization": "per-rate maximum",
        "two_hbar_gamma_reso_used": _fmt(RESO_FOR_SHARP_LINES),
        "wall_seconds": f"{time.perf_counter() - t0:.3f}",
    }
    write_manifest(out / "manifest.txt", _manifest_base(base, config.seed, extra))
    return {"map": path}


def overhauser_study(config: RunConfig, out_dir, workers: int = 1, method: str = "auto",
                     use_blocks: bool = False) -> dict:
    """Fine detuning maps around the y bright line with and without the field.

    In monte_carlo mode the with-field map is the mean over Gaussian
    field samples (per-axis RMS from the configuration) and a standard
    error map is emitted alongside.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    base = config.params
    spec = config.overhauser
    if config.sweep is not None and config.sweep.parameter == "delta_omega_BX":
        values = config.sweep.values
    else:
        center = tune_cavity_to(base, "BX0_y").delta_omega_BX
        values = tuple(np.linspace(center - 400.0, center + 400.0, 17))
    grid = (FrequencyGrid.linspace(config.grid.omega_min, config.grid.omega_max, config.grid.points)
            if config.grid is not None else FrequencyGrid.linspace(-600.0, 600.0, 241))

    if spec.mode == "monte_carlo":
        rng = np.random.default_rng(config.seed)
        fields = rng.normal(0.0, 1.0, size=(spec.samples, 3)) * np.asarray(spec.rms_mT)
    else:
        fields = np.array([[base.B_Nx, base.B_Ny, base.B_Nz]])

    def spectrum_at(value, field):
        p = apply_sweep_value(base, "delta_omega_BX", float(value))
        p = p.replace(B_Nx=float(field[0]), B_Ny=float(field[1]), B_Nz=float(field[2]))
        run = build_run(p, method=method, use_blocks=use_blocks)
        return compute_channels(run, grid, ("total",), gamma_reso=None)["total"].values

    def point(value):
        zero = spectrum_at(value, (0.0, 0.0, 0.0))
        samples = np.array([spectrum_at(value, f) for f in fields])
        mean = samples.mean(axis=0)
        stderr = (samples.std(axis=0, ddof=1) / np.sqrt(len(fields))
                  if len(fields) > 1 else np.zeros_like(mean))
        return zero, mean, stderr

    rows = _sweep_map(values, point, workers)
    paths = {}
    for tag, pick in (("nofield", 0), ("field", 1), ("field_stderr", 2)):
        path = out / f"overhauser_map_{tag}.csv"
        write_map_csv(path, [(v, grid.omegas, r[pick]) for v, r in zip(values, rows)])
        paths[tag] = path

    lines0 = transition_energies(base.replace(delta_omega_BX=0.0))
    extra = {
        "sweep_parameter": "delta_omega_BX",
        "sweep_values": ",".join(_fmt(v) for v in values),
        "overhauser_mode": spec.mode,
        "overhauser_rms_mT": ",".join(_fmt(r) for r in spec.rms_mT),
        "overhauser_samples": len(fields),
        # line offsets: absolute position = delta_omega_BX + offset
        "DX0_sym_offset_ueV": _fmt(lines0["DX0_sym"]),
        "DX0_asym_offset_ueV": _fmt(lines0["DX0_asym"]),
        "BX0_y_offset_ueV": _fmt(lines0["BX0_y"]),
        "wall_seconds": f"{time.perf_counter() - t0:.3f}",
    }
    write_manifest(out / "manifest.txt", _manifest_base(base, config.seed, extra))
    return paths
