"""Command-line front end.

Every command reads one JSON config (``--config``). Exit codes: 0 success,
1 verification failure, 2 config or parse error, 3 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .cicf import CIcf, evaluate as evaluate_cicf, fit_coefficients
from .expr import EvaluationError, ParseError, eval_at, parse
from .fraction import BreakdownError
from .functional import DegeneracyWarning, NodeSystem
from .grid import DEFAULT_CELLS
from .iicf import (
    KernelSet,
    compute_kernels,
    kernel_table_csv,
    reduce_to_cicf,
    residual_csv,
    sidecar,
    verify_interpolation,
)

log = logging.getLogger("cfinterp")

MODES = ("fit-fn", "eval-fn", "fit-functional", "verify", "reduce-check")
EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_BREAKDOWN = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class JobConfig:
    mode: str
    f: str | None = None
    nodes: list = field(default_factory=list)
    values: list | None = None
    model: CIcf | None = None
    at: list[float] = field(default_factory=list)
    n_cells: int = DEFAULT_CELLS
    tolerance: float = 1e-6
    output: Path | None = None
    plot_output: Path | None = None


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _require(doc: dict, key: str, mode: str):
    if key not in doc:
        raise ConfigError(f"{mode}: config is missing required field {key!r}")
    return doc[key]


def load_config(mode: str, path: Path, grid: int | None = None, tol: float | None = None,
                out: Path | None = None, at: str | None = None) -> JobConfig:
    """Read and validate a job config; CLI flags override config fields."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if doc.get("mode", mode) != mode:
        raise ConfigError(f"config mode {doc['mode']!r} does not match command {mode!r}")

    cfg = JobConfig(mode=mode)
    cfg.n_cells = int(grid if grid is not None else doc.get("n_cells", DEFAULT_CELLS))
    cfg.tolerance = float(tol if tol is not None else doc.get("tolerance", 1e-6))
    output = out if out is not None else doc.get("output")
    cfg.output = Path(output) if output else None
    if doc.get("plot_output"):
        cfg.plot_output = Path(doc["plot_output"])
    cfg.f = doc.get("f")

    if mode == "fit-fn":
        cfg.nodes = [float(v) for v in _require(doc, "nodes", mode)]
        if "values" in doc:
            cfg.values = [float(v) for v in doc["values"]]
        elif cfg.f is not None:
            fx = parse(cfg.f, "s")
            cfg.values = [eval_at(fx, v) for v in cfg.nodes]
        else:
            raise ConfigError("fit-fn: give either 'values' or 'f'")
        if len(cfg.values) != len(cfg.nodes) or not cfg.nodes:
            raise ConfigError("fit-fn: 'nodes' and 'values' must be non-empty and equally long")
    elif mode == "eval-fn":
        model = doc.get("model", doc)
        if isinstance(model, str):
            model_path = Path(model)
            if not model_path.is_absolute():
                model_path = Path(path).parent / model_path
            try:
                model = json.loads(model_path.read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read model {model_path}: {exc}") from None
        try:
            cfg.model = CIcf(model["nodes"], model["coefficients"])
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"eval-fn: malformed model document ({exc})") from None
        if at is not None:
            cfg.at = [float(v) for v in at.split(",") if v.strip()]
        else:
            cfg.at = [float(v) for v in doc.get("at", [])]
        if not cfg.at:
            raise ConfigError("eval-fn: no evaluation points (use --at or 'at')")
    else:
        if cfg.f is None:
            raise ConfigError(f"{mode}: config is missing required field 'f'")
        parse(cfg.f, "s")
        cfg.nodes = [str(v) for v in _require(doc, "nodes", mode)]
        if len(cfg.nodes) < 2:
            raise ConfigError(f"{mode}: need at least two node functions (n >= 1)")
        for text in cfg.nodes:
            parse(text, "z")
    return cfg


def _system(cfg: JobConfig) -> NodeSystem:
    try:
        return NodeSystem.from_expressions(cfg.nodes, cfg.f, cfg.n_cells)
    except (ValueError, EvaluationError) as exc:
        raise ConfigError(str(exc)) from None


def _write(path: Path | None, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)


def emit_plot_data(ks: KernelSet, path, report=None) -> Path:
    """Write ``xi, a1..an, r0..rn`` for external plotting."""
    if report is None:
        report = verify_interpolation(ks)
    path = Path(path)
    _write(path, kernel_table_csv(ks, report))
    return path


def run(cfg: JobConfig) -> int:
    """Execute one job; returns the exit status."""
    if cfg.mode == "fit-fn":
        model = fit_coefficients(cfg.nodes, cfg.values)
        _write(cfg.output, model.to_json())
        return EXIT_OK

    if cfg.mode == "eval-fn":
        for x in cfg.at:
            print(f"{_fmt(x)} {_fmt(evaluate_cicf(cfg.model, x))}")
        return EXIT_OK

    system = _system(cfg)
    ks = compute_kernels(system)

    if cfg.mode == "fit-functional":
        _write(cfg.output, kernel_table_csv(ks))
        meta = json.dumps(sidecar(ks), indent=2) + "\n"
        if cfg.output is not None:
            _write(cfg.output.with_suffix(".json"), meta)
        else:
            sys.stdout.write(meta)
        if cfg.plot_output is not None:
            emit_plot_data(ks, cfg.plot_output)
        return EXIT_OK

    if cfg.mode == "verify":
        report = verify_interpolation(ks)
        if cfg.output is not None:
            _write(cfg.output, residual_csv(report))
        if cfg.plot_output is not None:
            emit_plot_data(ks, cfg.plot_output, report)
        if report.failed:
            k, j = report.failed[0]
            print(f"breakdown while evaluating level {k} at xi={_fmt(j / ks.n_cells)}", file=sys.stderr)
            return EXIT_BREAKDOWN
        print(f"max residual {_fmt(report.max_residual)}")
        return EXIT_OK if report.max_residual <= cfg.tolerance else EXIT_VERIFY

    # reduce-check
    try:
        rep = reduce_to_cicf(system, ks)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(rep.table())
    return EXIT_OK if rep.max_discrepancy <= cfg.tolerance else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfinterp",
        description="Continued C-fraction interpolation of functions and integral functionals.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "fit-fn": "fit a C-fraction to scalar nodes/values and write the model JSON",
        "eval-fn": "evaluate a fitted C-fraction model at points",
        "fit-functional": "compute the integral fraction kernels and write the kernel CSV",
        "verify": "check the interpolation conditions on all continual nodes",
        "reduce-check": "compare integrated kernels with the scalar C-fraction (constant nodes)",
    }
    for name in MODES:
        cmd = sub.add_parser(name, help=helps[name])
        cmd.add_argument("--config", type=Path, required=True)
        cmd.add_argument("--out", type=Path, default=None)
        cmd.add_argument("--grid", type=int, default=None)
        cmd.add_argument("--tol", type=float, default=None)
        if name == "eval-fn":
            cmd.add_argument("--at", type=str, default=None, help="comma-separated points")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.command, args.config, args.grid, args.tol, args.out,
                          getattr(args, "at", None))
    except (ConfigError, ParseError, EvaluationError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", DegeneracyWarning)
            warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
            return run(cfg)
    except BreakdownError as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except (ConfigError, ParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EvaluationError as exc:
        print(f"numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN


if __name__ == "__main__":
    sys.exit(main())
