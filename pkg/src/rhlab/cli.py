"""Command-line front end.

Every subcommand assembles a config dict and hands it to
:func:`rhlab.commands.run`, which writes a reproducible output bundle.
Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 resource guard.
"""

import argparse
import json
import sys

import numpy as np

from .commands import FIGURE_RECIPES, run
from .errors import (ChainUnstableError, ConfigError, DimensionBudgetError,
                     NonEquilibriumModelError, SingularModeError)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_RESOURCE = 4


def _add_common(parser):
    parser.add_argument("--out", help="output directory (default: derived "
                                      "from the config hash)")
    parser.add_argument("--seed", type=int, default=0)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rhlab",
        description="Numerical laboratory for the trapped-ion Rabi-Hubbard "
                    "model")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chain", help="derive motional and model parameters "
                                     "from a chain spec file")
    p.add_argument("--spec", required=True, help="chain spec JSON file")
    _add_common(p)

    p = sub.add_parser("calibrate", help="fit ion spacings to a measured "
                                         "mode spectrum")
    p.add_argument("--spectrum", required=True,
                   help="CSV of measured mode frequencies in MHz, ascending")
    p.add_argument("--trap-freq", type=float,
                   help="trap frequency in MHz (default: top mode)")
    p.add_argument("--symmetric", action="store_true", default=None,
                   help="fit only mirror-independent spacings")
    p.add_argument("--init", help="CSV of initial spacings in um")
    _add_common(p)

    p = sub.add_parser("meanfield", help="mean-field scan over the coupling")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--g-scan", default="0:8:0.25", metavar="START:STOP:STEP",
                   help="coupling scan in kHz")
    _add_common(p)

    p = sub.add_parser("ground", help="exact ground state in a parity sector")
    p.add_argument("--model", required=True)
    p.add_argument("--g", type=float, help="coupling in kHz")
    p.add_argument("--cutoff", default="10",
                   help="phonon cutoff (int or comma list)")
    p.add_argument("--representation", default="local",
                   choices=["local", "collective"])
    p.add_argument("--parity", default="even",
                   choices=["even", "odd", "full"])
    _add_common(p)

    p = sub.add_parser("dynamics", help="exact time evolution from the "
                                        "all-up vacuum")
    p.add_argument("--model", required=True)
    p.add_argument("--g", type=float, help="coupling in kHz")
    p.add_argument("--t-max", type=float, default=400.0, help="duration in us")
    p.add_argument("--samples", type=int, default=81)
    p.add_argument("--cutoff", default="6")
    p.add_argument("--representation", default="local",
                   choices=["local", "collective"])
    p.add_argument("--parity", default="even",
                   choices=["even", "odd", "full"])
    p.add_argument("--observables", default="sz,entropy,phonons",
                   help="comma list out of sz, entropy, phonons")
    _add_common(p)

    p = sub.add_parser("quench", help="slow coupling ramp from the g=0 "
                                      "ground state")
    p.add_argument("--model", required=True)
    p.add_argument("--gmax", type=float, required=True,
                   help="ramp target coupling in kHz")
    p.add_argument("--tau", type=float, default=1.0,
                   help="ramp time constant in ms")
    p.add_argument("--reverse", action="store_true",
                   help="append the mirrored ramp back to zero")
    p.add_argument("--t-total", type=float,
                   help="total schedule duration in ms (default 5 tau per "
                        "ramp)")
    p.add_argument("--cutoff", default="10")
    p.add_argument("--samples", type=int, default=50)
    _add_common(p)

    p = sub.add_parser("hp", help="linearized dynamics and stability")
    p.add_argument("--model", required=True)
    p.add_argument("--g", type=float, help="coupling in kHz")
    p.add_argument("--t-max", type=float, default=400.0, help="duration in us")
    p.add_argument("--samples", type=int, default=81)
    p.add_argument("--stability-scan", metavar="G0:G1:STEP",
                   help="coupling scan in kHz")
    _add_common(p)

    p = sub.add_parser("measure", help="phase-scan correlation extraction "
                                       "on a saved state")
    p.add_argument("--trajectory", required=True,
                   help="dynamics/quench bundle directory or .npz state file")
    p.add_argument("--pair", default="0,1", help="ion pair, e.g. 0,1")
    p.add_argument("--phases", type=int, default=12)
    p.add_argument("--shots", type=int, default=0,
                   help="shots per phase (0 = exact probabilities)")
    p.add_argument("--eps-c", type=float, default=0.0,
                   help="nearest-neighbour crosstalk probability")
    p.add_argument("--eps-0", type=float, default=0.0,
                   help="independent flip probability")
    _add_common(p)

    p = sub.add_parser("estimate", help="Hilbert-space size and cutoff "
                                        "suggestions")
    p.add_argument("--n-ions", type=int)
    p.add_argument("--cutoff", help="uniform cutoff or comma list")
    p.add_argument("--model", help="model JSON (for occupancy estimates)")
    p.add_argument("--g", type=float, help="coupling in kHz")
    p.add_argument("--target-error", type=float, default=1e-3)
    _add_common(p)

    p = sub.add_parser("reproduce", help="desk-scale analogues of the "
                                         "figure pipelines")
    p.add_argument("figure", choices=sorted(FIGURE_RECIPES))
    _add_common(p)
    return parser


def _config_from_args(args):
    cfg = {"command": args.command, "seed": args.seed}
    if args.out:
        cfg["out"] = args.out
    c = args.command
    if c == "chain":
        cfg["chain"] = args.spec
    elif c == "calibrate":
        cfg["spectrum_csv"] = args.spectrum
        if args.trap_freq is not None:
            cfg["trap_freq_mhz"] = args.trap_freq
        if args.symmetric is not None:
            cfg["symmetric"] = args.symmetric
        if args.init:
            from .commands import _read_column
            cfg["init_spacings_um"] = _read_column(args.init).tolist()
    elif c == "meanfield":
        cfg.update(model=args.model, g_scan=args.g_scan)
    elif c == "ground":
        cfg.update(model=args.model, cutoff=args.cutoff,
                   representation=args.representation, parity=args.parity)
        if args.g is not None:
            cfg["g_khz"] = args.g
    elif c == "dynamics":
        cfg.update(model=args.model, cutoff=args.cutoff,
                   representation=args.representation, parity=args.parity,
                   t_max_us=args.t_max, samples=args.samples,
                   observables=args.observables.split(","))
        if args.g is not None:
            cfg["g_khz"] = args.g
    elif c == "quench":
        cfg.update(model=args.model, g_max_khz=args.gmax, tau_ms=args.tau,
                   reverse=args.reverse, cutoff=args.cutoff,
                   samples=args.samples)
        if args.t_total is not None:
            cfg["t_total_ms"] = args.t_total
    elif c == "hp":
        cfg.update(model=args.model, t_max_us=args.t_max,
                   samples=args.samples)
        if args.g is not None:
            cfg["g_khz"] = args.g
        if args.stability_scan:
            cfg["stability_scan"] = args.stability_scan
    elif c == "measure":
        cfg.update(trajectory=args.trajectory, pair=args.pair,
                   phases=args.phases, shots=args.shots,
                   eps_c=args.eps_c, eps_0=args.eps_0)
    elif c == "estimate":
        if args.model:
            cfg["model"] = args.model
            if args.g is not None:
                cfg["g_khz"] = args.g
            cfg["target_error"] = args.target_error
        if args.n_ions:
            cfg["n_ions"] = args.n_ions
        if args.cutoff:
            cfg["cutoffs"] = args.cutoff
    elif c == "reproduce":
        cfg["figure"] = args.figure
    return cfg


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    config = _config_from_args(args)
    try:
        bundle = run(config)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DimensionBudgetError, MemoryError) as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ChainUnstableError, NonEquilibriumModelError, SingularModeError,
            ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in bundle.outputs:
        print(path)
    print(f"ok: bundle {bundle.hash} in {bundle.out_dir} "
          f"({bundle.wall_time:.2f} s)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
