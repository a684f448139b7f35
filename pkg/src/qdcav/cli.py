"""Command-line interface.

Exit codes: 0 success, 1 configuration error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import __version__
from ._kernels import SingularShiftError
from .config import ConfigError, RunConfig, parse_config
from .params import ModelParams
from .experiments import (
    overhauser_study,
    run_spectrum,
    sweep_dephasing,
    sweep_detuning,
    sweep_injection,
)
from .spectra import EigenDecompositionError, SingularResolventError, StepInstabilityError
from .steady_state import NonUniqueSteadyState, SolveFailure
from .validation import run_invariant_suite

_SOLVER_ERRORS = (
    SolveFailure,
    NonUniqueSteadyState,
    SingularResolventError,
    SingularShiftError,
    EigenDecompositionError,
    StepInstabilityError,
)

_UNITS_EPILOG = """\
configuration keys (one `key = value` per line, `#` comments):
  J_ee, J_hh, J_eh                  Coulomb charging energies [meV]
  delta0, delta1, delta2            exchange parameters [ueV]
  two_hbar_Gamma_cav                cavity damping 2*hbar*rate [ueV]
  two_hbar_Gamma_spon               free-space emission 2*hbar*rate [neV]
  two_hbar_gamma_phase_e/_h         pure dephasing 2*hbar*rate [ueV]
  two_hbar_gamma_phase              total dephasing, split equally [ueV]
  two_hbar_P                        injection 2*hbar*rate per channel [neV]
  two_hbar_g                        coupling 2*hbar*g [ueV]
  theta_cav                         cavity polarization angle [rad]
  delta_omega_BX                    bare-pair detuning from the cavity [ueV]
  B_Nx, B_Ny, B_Nz                  nuclear field [mT];  g_e  electron g-factor
  two_hbar_gamma_reso               spectral resolution [ueV]
  p_max                             photon-number cutoff
  lambda_ref                        reference wavelength for the nm axis [nm]
  omega_min, omega_max, omega_points    spectrum grid [ueV]
  channels                          comma list of cav,x,y,L,R,total
  sweep_parameter, sweep_values     sweep axis and comma-separated values
  overhauser_mode                   fixed | monte_carlo
  overhauser_rms_x/_y/_z            Gaussian RMS per axis [mT]
  overhauser_samples, seed          Monte Carlo controls
"""


def _add_common(sub):
    sub.add_argument("--config", default=None, help="run configuration file")
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument("--workers", type=int, default=1, help="concurrent sweep points")
    sub.add_argument("--seed", type=int, default=None, help="override the config seed")
    sub.add_argument("--method", default="auto",
                     choices=("auto", "direct", "hessenberg", "eig"),
                     help="resolvent strategy")
    sub.add_argument("--blocks", action="store_true",
                     help="solve on the invariant dK blocks (faster; validated against the full solve)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdcav",
        description="Steady-state emission spectra of a nanocavity coupled to "
                    "quantum-dot exciton complexes.",
        epilog=_UNITS_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"qdcav {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("spectrum", help="single steady-state spectrum, one CSV per channel")
    _add_common(sp)
    sp.add_argument("--check-unique", action="store_true",
                    help="verify steady-state uniqueness (expensive SVD)")
    sp.add_argument("--no-convergence-check", action="store_true",
                    help="skip the photon-cutoff convergence diagnostic")

    for name, fn_help in (
        ("sweep-detuning", "detuning maps with and without pure dephasing"),
        ("sweep-dephasing", "bare-cavity intensity vs dephasing, with the feeding-factor prediction"),
        ("sweep-injection", "injection-rate dependence around the y bright line"),
        ("overhauser", "nuclear-field study around the y bright line"),
    ):
        s = subs.add_parser(name, help=fn_help)
        _add_common(s)

    subs.add_parser("validate", help="run the structural invariant suite")
    return parser


def _load_config(args) -> RunConfig:
    if args.config is None:
        config = RunConfig(params=ModelParams())
    else:
        config = parse_config(args.config)
    if getattr(args, "seed", None) is not None:
        config = dataclasses.replace(config, seed=args.seed)
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "validate":
        results = run_invariant_suite()
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
        return 0 if all(r.passed for r in results) else 2

    try:
        config = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    kwargs = dict(out_dir=args.out, workers=args.workers,
                  method=args.method, use_blocks=args.blocks)
    try:
        if args.command == "spectrum":
            run_spectrum(config, check_unique=args.check_unique,
                         convergence_check=not args.no_convergence_check, **kwargs)
        elif args.command == "sweep-detuning":
            sweep_detuning(config, **kwargs)
        elif args.command == "sweep-dephasing":
            sweep_dephasing(config, **kwargs)
        elif args.command == "sweep-injection":
            sweep_injection(config, **kwargs)
        elif args.command == "overhauser":
            overhauser_study(config, **kwargs)
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
