"""Command-line front end.

    cavity-eit spectrum --config spectrum.json --out results/
    cavity-eit sweep --long-pulse
    cavity-eit figure fig3 --out fig3/

Without ``--config`` a scenario runs the built-in preset of the figure it
belongs to.  The output directory is taken from ``--out``, else from
``$CAVITY_EIT_OUTPUT_DIR``, else from the config.  Failures print a JSON
error document on stderr, also saved as ``error.json`` in the output
directory, and exit nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import __version__
from .config import SCENARIOS, VARIANTS, load_config, parse_config
from .errors import CavityEITError, ConfigError
from .figures import FIGURES, PRESETS, emit_figure_bundle
from .output import write_json
from .runner import run

OUTPUT_ENV = "CAVITY_EIT_OUTPUT_DIR"

# preset used when a scenario is run without --config
DEFAULT_PRESET = {"spectrum": "fig2", "pulse": "fig3", "store": "fig4", "gate": "fig5", "sweep": "fig5"}

EXIT_CONFIG = 2
EXIT_RUN = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavity-eit", description="Cavity-EIT photonic phase gate simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (overrides $%s and the config)" % OUTPUT_ENV)
        p.add_argument("--variant", choices=VARIANTS, help="amplitude-equation variant")

    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--long-pulse", action="store_true", help="use a quasi-monochromatic pulse, FWHM = 20/kappa")
        common(p)
    p = sub.add_parser("figure", help="regenerate the data and plot scripts of one figure")
    p.add_argument("figure", choices=FIGURES)
    common(p)
    return parser


def _resolve_out(args, fallback) -> Path:
    return Path(args.out or os.environ.get(OUTPUT_ENV) or fallback)


def _config_for(args):
    if args.config:
        cfg = load_config(args.config, scenario=args.command)
    else:
        doc = {k: v for k, v in PRESETS[DEFAULT_PRESET[args.command]].items() if k != "scenario"}
        cfg = parse_config(doc, scenario=args.command)
    changes = {}
    if args.variant:
        changes["variant"] = args.variant
    if args.long_pulse:
        changes["long_pulse"] = True
    return dataclasses.replace(cfg, **changes) if changes else cfg


def _fail(exc, out: Path | None, code: int) -> int:
    if isinstance(exc, CavityEITError):
        doc = exc.to_dict()
    else:
        doc = {"error": type(exc).__name__, "module": "cli-io", "operation": "run", "message": str(exc), "context": {}}
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
            write_json(out / "error.json", doc)
        except OSError:
            pass
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = None
    try:
        if args.command == "figure":
            out = _resolve_out(args, "out")
            summary = emit_figure_bundle(args.figure, out, args.variant or "standard")
        else:
            out = _resolve_out(args, "out")
            cfg = _config_for(args)
            out = _resolve_out(args, cfg.output_dir)
            summary = run(cfg, out)
    except (ConfigError, OSError) as exc:
        return _fail(exc, out, EXIT_CONFIG)
    except (CavityEITError, ValueError, ArithmeticError) as exc:
        return _fail(exc, out, EXIT_RUN)
    print(json.dumps({"output_dir": str(out), "results": sorted(summary["results"])}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
