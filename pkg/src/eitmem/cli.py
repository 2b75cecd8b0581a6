"""Command-line scenario runner.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.  Errors are
reported as a JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .config import ConfigError, Scenario, load_config
from .estimation import FitError
from .fwm import PoleError
from .maxwell_bloch import ResolutionError
from .presets import get_preset, list_presets
from .propagation import WindowError
from .runners import DEFAULT_MODES, run
from .spectra import BandwidthError, SingularityError
from .storage import ThresholdError
from .units import ParameterError, SizingError

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
NUMERICAL = (SizingError, ResolutionError, WindowError, FitError, PoleError, BandwidthError, SingularityError,
             ThresholdError, ArithmeticError, np.linalg.LinAlgError)


class CliError(Exception):
    def __init__(self, code, kind, message, field=None):
        super().__init__(message)
        self.code, self.kind, self.field = code, kind, field


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return {"re": _jsonable(x.real), "im": _jsonable(x.imag)}
    return x


def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(columns, arr) -> str:
    lines = [",".join(columns)]
    for row in np.atleast_2d(arr):
        lines.append(",".join(f"{v:.12g}" for v in row))
    return "\n".join(lines) + "\n"


def write_outputs(scn: Scenario, out, out_dir: Path) -> dict:
    files = []
    for name, (cols, arr) in sorted(out.tables.items()):
        path = out_dir / f"{name}.csv"
        atomic_write(path, csv_text(cols, arr))
        files.append(path.name)
    summary = {
        "tool": "eitmem",
        "version": __version__,
        "scenario": scn.to_dict(),
        "resolved": out.resolved,
        "summary": out.summary,
        "files": files,
    }
    if scn.figure:
        summary["figure"] = scn.figure
    atomic_write(out_dir / "summary.json", json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")
    return summary


def _parse_set(items):
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError("--set", f"expected KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        val = yaml.safe_load(v)
        if isinstance(val, str):
            # YAML 1.1 reads 1e-4 as a string
            try:
                val = float(val)
            except ValueError:
                pass
        out[k.strip()] = val
    return out


def _scenario_from_args(args) -> Scenario:
    if args.command == "preset":
        try:
            scn = get_preset(args.name)
        except KeyError:
            raise ConfigError("preset", f"unknown preset {args.name!r}; see list-presets") from None
    elif args.config:
        scn = load_config(args.config)
        if scn.command != args.command:
            raise ConfigError("command", f"config is for {scn.command!r}, not {args.command!r}")
    else:
        scn = Scenario(name=args.command, command=args.command)
    overrides = _parse_set(getattr(args, "set", None))
    for flag, key in SPECIFIC_FLAGS.get(args.command, {}).items():
        val = getattr(args, flag, None)
        if val is not None and val is not False:
            overrides[key] = val
    if getattr(args, "fix", None):
        overrides["fix"] = {**(scn.params.get("fix") or {}), **_parse_set(args.fix)}
    scn.params.update(overrides)
    if getattr(args, "mode", None):
        scn.mode = args.mode
    if args.seed is not None:
        scn.seed = args.seed
    if args.jobs is not None:
        if args.jobs < 1:
            raise ConfigError("--jobs", "must be >= 1")
        scn.jobs = args.jobs
    return scn


SPECIFIC_FLAGS = {
    "store": {"t_off": "t_off_ns", "t_on": "t_on_ns", "ramp": "ramp", "tau_us": "tau_us"},
    "fwm": {"theta_deg": "theta_deg", "exact_k": "exact_k", "literal_dk": "literal_dk"},
    "fit": {"scheme": "scheme", "spectrum_csv": "spectrum_csv", "trace_csv": "trace_csv"},
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, default=None, help="random seed for synthetic data")
    common.add_argument("--jobs", type=int, default=None, help="worker threads for sweeps")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--config", help="YAML or JSON scenario file")
    scen.add_argument("--mode", help="runner mode (see README)")
    scen.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a parameter")

    p = argparse.ArgumentParser(prog="eitmem", description="EIT slow light, storage and FWM scenarios")
    p.add_argument("--version", action="version", version=f"eitmem {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "slowlight"):
        sub.add_parser(name, parents=[common, scen], help=f"{name} scenario")
    st = sub.add_parser("store", parents=[common, scen], help="storage scenario")
    st.add_argument("--t-off", dest="t_off", type=float, help="switch-off time after the pulse peak (ns)")
    st.add_argument("--t-on", dest="t_on", type=float, help="switch-on time after the pulse peak (ns)")
    st.add_argument("--ramp", choices=("smooth", "step"))
    st.add_argument("--tau-us", dest="tau_us", type=float, help="motional coherence time (us)")
    fw = sub.add_parser("fwm", parents=[common, scen], help="four-wave mixing scenario")
    fw.add_argument("--theta-deg", dest="theta_deg", type=float)
    fw.add_argument("--exact-k", dest="exact_k", action="store_true", help="use exact wavenumbers")
    fw.add_argument("--literal-dk", dest="literal_dk", action="store_true",
                    help="phase mismatch with k_i sin(theta)")
    fi = sub.add_parser("fit", parents=[common, scen], help="parameter fit")
    fi.add_argument("--scheme", choices=("LambdaD1", "NTypeD2", "D1", "D2"))
    fi.add_argument("--spectrum-csv", dest="spectrum_csv")
    fi.add_argument("--trace-csv", dest="trace_csv")
    fi.add_argument("--fix", action="append", metavar="NAME=VALUE", help="hold a parameter fixed")
    pr = sub.add_parser("preset", parents=[common], help="run a built-in scenario")
    pr.add_argument("name")
    pr.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a parameter")
    sub.add_parser("list-presets", help="print the preset catalog as JSON")
    return p


def _classify(exc) -> CliError:
    if isinstance(exc, CliError):
        return exc
    if isinstance(exc, NUMERICAL):
        return CliError(EXIT_NUMERICAL, type(exc).__name__, str(exc))
    if isinstance(exc, ParameterError):
        return CliError(EXIT_INVALID, type(exc).__name__, str(exc), getattr(exc, "field", None))
    if isinstance(exc, (ValueError, FloatingPointError)):
        return CliError(EXIT_NUMERICAL, type(exc).__name__, str(exc))
    raise exc


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    if args.command == "list-presets":
        print(json.dumps(list_presets(), indent=2))
        return EXIT_OK
    try:
        scn = _scenario_from_args(args)
        if scn.command not in DEFAULT_MODES:
            raise ConfigError("command", f"unknown command {scn.command!r}")
        out = run(scn)
        summary = write_outputs(scn, out, Path(args.out))
    except Exception as exc:  # noqa: BLE001 - every failure becomes a JSON error report
        err = _classify(exc)
        report = {"error": err.kind, "message": str(err), "exit_code": err.code}
        if err.field:
            report["field"] = err.field
        print(json.dumps(report), file=sys.stderr)
        return err.code
    print(json.dumps(_jsonable({"out": str(args.out), "files": summary["files"], "summary": out.summary}),
                     indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
