"""Command-line entry point: ``toa run | validate | demo``.

Exit codes: 0 success, 1 configuration error, 2 computation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ScenarioKind, load_config
from .errors import ComputationError, ConfigError
from .runner import run_scenario, write_csv

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_IO = 0, 1, 2, 3

_GAUSSIAN = """\
[constants]
hbar = 1
mass = 1

[packet]
direction = 1

[component.main]
weight = 1
center = 1
spread = 0.05
origin = -10
"""

_TWO_PACKET = """\
[constants]
hbar = 1
mass = 1

[packet]
direction = 1

[component.slow]
weight = 3
center = 1
spread = 0.1
origin = 0

[component.fast]
weight = 1
center = 10
spread = 0.1
origin = 0
"""

DEMOS: dict[str, str] = {
    "density": "[scenario]\nkind = density\ndetector = 0\n\n" + _GAUSSIAN
    + "\n[tau]\nlo = -90\nhi = 110\ncount = 4001\n",
    "currents": "[scenario]\nkind = currents\ndetector = 0\n\n" + _GAUSSIAN
    + "\n[tau]\nlo = -90\nhi = 110\ncount = 4001\n",
    "means": "[scenario]\nkind = means\ndetector = 0\n\n" + _GAUSSIAN
    + "\n[tau]\nlo = -90\nhi = 110\ncount = 4001\n",
    "negative_flux": "[scenario]\nkind = negative_flux\ndetector = 0\n\n" + _TWO_PACKET
    + "\n[negative_flux]\nmargin = 3\nperiods = 1\ncount = 201\n",
    "semiclassical": "[scenario]\nkind = semiclassical\ndetector = 0\n\n" + _GAUSSIAN
    + "\n[semiclassical]\ntau = 10\nscales = 1, 0.5, 0.25, 0.125\n",
    "barrier": "[scenario]\nkind = barrier\ndetector = 5\n\n" + _GAUSSIAN
    + "\n[barrier]\nmodel = delta\nstrength = 0.5\n\n[tau]\nlo = -90\nhi = 120\ncount = 4001\n",
    "wigner_check": "[scenario]\nkind = wigner_check\ndetector = 0\n\n" + _GAUSSIAN
    + "\n[wigner]\ntaus = 5, 10, 15\n",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toa", description="Quantum time-of-arrival scenarios")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file and write its CSV")
    run.add_argument("config", type=Path)
    run.add_argument("--out", type=Path, default=Path("."), help="output directory")
    run.add_argument("--threads", type=int, default=1, help="worker threads for the tau sweep")

    val = sub.add_parser("validate", help="parse and validate a scenario file")
    val.add_argument("config", type=Path)

    demo = sub.add_parser("demo", help="print a ready-to-run scenario file")
    demo.add_argument("kind", choices=[k.value for k in ScenarioKind])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "demo":
        sys.stdout.write(DEMOS[args.kind])
        return EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.command == "validate":
            print(f"{args.config}: ok ({cfg.scenario.kind.value}, "
                  f"{len(cfg.components)} component(s))")
            return EXIT_OK
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        result = run_scenario(cfg, workers=args.threads)
        name = cfg.scenario.output or f"{cfg.scenario.kind.value}.csv"
        path = write_csv(args.out / name, result)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ComputationError as exc:
        print(f"computation error in {cfg.scenario.kind.value} scenario {args.config}: {exc}",
              file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
