"""Command-line front end: ``minkpaf frame|evolve|verify``.

Exit codes: 0 success, 1 config or usage error, 2 frame construction error
or initial constraint violation, 3 integrator blowup, 4 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import TOL_FRAME, TOL_NULL, Signature
from .curves import CurveSpec
from .errors import IntegratorBlowup, MinkError
from .evolution import TOL_CONSTRAINT, CaseKind, EvolutionCase, admissible_field, evolve, uniform_grid
from .paf import TOL_DEN, FrameField, paf_trace
from .verify import Settings, run_battery

EXIT_OK, EXIT_CONFIG, EXIT_CONSTRUCTION, EXIT_BLOWUP, EXIT_VERIFY = 0, 1, 2, 3, 4

LEG_NAMES = {"frenet": ("T", "N", "B"), "paf2": ("H", "N", "D"), "paf3": ("P", "F", "B")}
APPARATUS_NAMES = {"frenet": ("kappa", "tau"), "paf2": ("p1", "p2", "p3"), "paf3": ("n1", "n2", "n3")}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    curve: CurveSpec | None = None
    frame: str = "frenet"
    case: EvolutionCase | None = None
    grid: tuple[float, float, float] | None = None
    E0: list | dict | None = None
    tolerances: dict = field(default_factory=lambda: {
        "tol_null": TOL_NULL, "tol_frame": TOL_FRAME, "tol_constraint": TOL_CONSTRAINT, "tol_den": TOL_DEN})
    output_path: str | None = None
    output_format: str = "csv"


def parse_config(doc: dict) -> RunConfig:
    """Build a RunConfig from a JSON document; raises ConfigError."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    cfg = RunConfig()
    try:
        if "curve" in doc:
            cfg.curve = CurveSpec.from_dict(doc["curve"])
        cfg.frame = doc.get("frame", cfg.frame)
        if "case" in doc and doc["case"] is not None:
            c = doc["case"]
            cfg.case = EvolutionCase(CaseKind(str(c["kind"])), float(c.get("parameter", 0.0)))
        if "grid" in doc:
            g = doc["grid"]
            g = (g["s_min"], g["s_max"], g["h"]) if isinstance(g, dict) else g
            cfg.grid = tuple(float(v) for v in g)
        cfg.E0 = doc.get("E0")
        cfg.tolerances.update({k: float(v) for k, v in doc.get("tolerances", {}).items()})
        out = doc.get("output", {})
        cfg.output_path = out.get("path")
        cfg.output_format = out.get("format", cfg.output_format)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    if cfg.frame not in LEG_NAMES:
        raise ConfigError(f"unknown frame {cfg.frame!r}")
    return cfg


def _grid(cfg: RunConfig) -> np.ndarray:
    if cfg.curve is None:
        raise ConfigError("config has no curve")
    if cfg.grid is None:
        raise ConfigError("config has no grid")
    s_min, s_max, h = cfg.grid
    if not s_min < s_max:
        raise ConfigError("grid needs s_min < s_max")
    lo, hi = cfg.curve.domain
    if s_min < lo or s_max > hi:
        raise ConfigError(f"grid [{s_min}, {s_max}] leaves the curve domain [{lo}, {hi}]")
    try:
        return uniform_grid((s_min, s_max), h)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------- formatting


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def signature_code(sig: Signature | None) -> str:
    return "" if sig is None else "".join("+" if e > 0 else "-" for e in sig)


def to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with 17 significant digits for every float."""
    pad, inner_pad = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner_pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        return "[" + ", ".join(to_json(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt(x) if math.isfinite(x) else json.dumps(fmt(x))
    return json.dumps(str(obj))


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands


def frame_table(cfg: RunConfig) -> tuple[list[str], list[list]]:
    s = _grid(cfg)
    tol = cfg.tolerances
    trace = paf_trace(cfg.curve, s, cfg.frame, tol["tol_den"], tol_null=tol["tol_null"],
                      tol_frame=tol["tol_frame"])
    legs = LEG_NAMES[cfg.frame]
    header = ["s"] + [f"{leg}_{i}" for leg in legs for i in (1, 2, 3)] + list(APPARATUS_NAMES[cfg.frame])
    if cfg.frame == "frenet":
        app = trace.apparatus[:, [0, 2]]
    else:
        app = trace.apparatus
        header.append("phi")
    header.append("signature")
    code = signature_code(trace.signature)
    rows = []
    for i in range(len(trace)):
        row = [trace.s[i], *trace.legs[i].ravel(), *app[i]]
        if cfg.frame != "frenet":
            row.append(trace.phi[i])
        rows.append(row + [code])
    return header, rows


def cmd_frame(cfg: RunConfig) -> int:
    header, rows = frame_table(cfg)
    if cfg.output_format == "json":
        text = to_json({"frame": cfg.frame, "columns": header,
                        "rows": rows}) + "\n"
    else:
        text = csv_text(header, rows)
    emit(text, cfg.output_path)
    return EXIT_OK


def _initial_field(cfg: RunConfig, field_: FrameField, s0: float) -> np.ndarray:
    if cfg.E0 is None:
        raise ConfigError("evolve needs E0")
    if isinstance(cfg.E0, dict):
        u, v = (float(x) for x in cfg.E0["plane"])
        return admissible_field(cfg.case, field_(np.array([s0])).legs[0], u, v)
    E0 = np.asarray(cfg.E0, dtype=float)
    if E0.shape != (3,) or not np.all(np.isfinite(E0)):
        raise ConfigError("E0 must be three finite numbers or {\"plane\": [u, v]}")
    return E0


def cmd_evolve(cfg: RunConfig) -> int:
    if cfg.case is None:
        raise ConfigError("evolve needs a case")
    _grid(cfg)
    s_min, s_max, h = cfg.grid
    tol = cfg.tolerances
    kind = cfg.case.layout.frame
    field_ = FrameField(cfg.curve, kind, tol["tol_den"], tol_null=tol["tol_null"], tol_frame=tol["tol_frame"])
    E0 = _initial_field(cfg, field_, s_min)
    tr = evolve(cfg.case, field_, E0, h, (s_min, s_max), tol_constraint=tol["tol_constraint"])
    legs = LEG_NAMES[kind]
    header = ["s", "E_1", "E_2", "E_3"] + [f"E_{leg}" for leg in legs] + ["pseudo_norm", "theta", "constraint"]
    rows = [[tr.s[i], *tr.E[i], *tr.components[i], tr.pseudo_norm[i], tr.theta[i], tr.constraint[i]]
            for i in range(len(tr))]
    summary = {"case": cfg.case.kind.value, "parameter": float(cfg.case.parameter), "h": h,
               "n_steps": len(tr) - 1, "signature": signature_code(tr.signature),
               "max_constraint": tr.max_constraint, "max_pseudo_norm_drift": tr.max_drift,
               "final_theta": float(tr.theta[-1])}
    if cfg.output_format == "json":
        text = to_json({"summary": summary, "columns": header, "rows": rows}) + "\n"
    else:
        text = csv_text(header, rows)
    emit(text, cfg.output_path)
    print(to_json(summary), file=sys.stderr)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, seed: int, h: float | None) -> int:
    settings = Settings(seed=seed, tol_frame=cfg.tolerances["tol_frame"],
                        tol_constraint=cfg.tolerances["tol_constraint"], h=h if h is not None else 1e-3)
    report = run_battery(settings)
    doc = report.to_dict()
    if cfg.output_format == "csv":
        rows = [[k, str(c["passed"]).lower(), str(c["asserted"]).lower(),
                 c["value"] if isinstance(c["value"], float) else to_json(c["value"]),
                 c["tolerance"] if isinstance(c["tolerance"], float) else to_json(c["tolerance"])]
                for k, c in doc["checks"].items()]
        text = csv_text(["check", "passed", "asserted", "value", "tolerance"], rows)
    else:
        text = to_json(doc) + "\n"
    emit(text, cfg.output_path)
    for name in report.failed:
        print(f"verify: check failed: {name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


# ---------------------------------------------------------------- entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="minkpaf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (("frame", "tabulate a frame along the grid"),
                            ("evolve", "integrate an evolution case"),
                            ("verify", "run the invariant battery on the bundled fixtures")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, required=name != "verify")
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--case", choices=[k.value for k in CaseKind])
        p.add_argument("--h", type=float)
    return parser


def load_config(args) -> RunConfig:
    if args.config is None:
        cfg = RunConfig(output_format="json")
    else:
        try:
            doc = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        cfg = parse_config(doc)
        if args.command == "verify" and "output" not in doc:
            cfg.output_format = "json"
    if args.out:
        cfg.output_path = args.out
    if args.format:
        cfg.output_format = args.format
    if args.case:
        param = cfg.case.parameter if cfg.case else 0.0
        cfg.case = EvolutionCase(CaseKind(args.case), param)
    if args.h is not None and cfg.grid is not None:
        cfg.grid = (cfg.grid[0], cfg.grid[1], args.h)
    if args.command == "evolve" and (cfg.case is None) != (cfg.E0 is None):
        raise ConfigError("E0 and case must be given together")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "frame":
            return cmd_frame(cfg)
        if args.command == "evolve":
            return cmd_evolve(cfg)
        return cmd_verify(cfg, args.seed, args.h)
    except ConfigError as exc:
        print(f"minkpaf: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegratorBlowup as exc:
        print(f"minkpaf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except MinkError as exc:
        print(f"minkpaf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION


if __name__ == "__main__":
    sys.exit(main())
