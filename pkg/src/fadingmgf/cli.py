"""Command-line front end.

``fadingmgf <command> [options]`` with commands ``pdf``, ``mgf``, ``fit``,
``ser``, ``sweep`` and ``validate``. Output is CSV (default) or JSON on
stdout or in ``--out``. Exit codes: 0 success, 1 validation failure, 2 user
or configuration error, 3 fit-quality failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import errorrates, expfit, mgf, models, presets, validation
from .mgf import InapplicableStrategyError, MgfStrategy

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_FIT_QUALITY = 3

COMMANDS = ("pdf", "mgf", "fit", "ser", "sweep", "validate")
FORMATS = ("csv", "json")
DEFAULT_FIT_ALPHA_BARS = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0)


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 2."""


def _default_fit_store() -> Path:
    env = os.environ.get("FADINGMGF_FIT_STORE")
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "fadingmgf" / "expfit.txt"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fadingmgf",
        description="Fading-channel densities, MGFs and symbol error rates.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with run settings; flags override it")
    p.add_argument("--model", help="model record, e.g. family=alpha_mu,alpha=3,mu=2,gbar-db=10")
    p.add_argument("--scheme", help="mpsk, mdpsk, mpam or mqam")
    p.add_argument("--order", type=int, help="modulation order M")
    p.add_argument("--strategy", help="auto, exact, approx or numeric (comma list for mgf)")
    p.add_argument("--sweep", help="mean-SNR grid start:stop:step in dB")
    p.add_argument("--s", dest="s_values", help="comma-separated MGF arguments (mgf)")
    p.add_argument("--alpha-bar", dest="alpha_bar", help="comma-separated inner exponents (fit)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    p.add_argument("--fit-store", dest="fit_store", help="fit-store file")
    p.add_argument("--jobs", type=int, help="concurrent sweep points")
    p.add_argument("--preset", choices=sorted(presets.PRESETS), help="figure recipe")
    p.add_argument("--quick", action="store_true", default=None,
                   help="smaller samples for validate")
    p.add_argument("--fail-fast", dest="fail_fast", action="store_true", default=None,
                   help="stop validate at the first failing check")
    return p


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {"command", "model", "scheme", "order", "strategy", "sweep", "s", "alpha_bar",
                "out", "format", "fit_store", "jobs", "preset", "quick", "fail_fast"}


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config: invalid JSON in {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config: top level must be a JSON object")
    unknown = set(cfg) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"config: unknown keys {sorted(unknown)}")
    return cfg


def parse_model_flag(text: str) -> dict:
    """``family=alpha_mu,alpha=3,mu=2,gbar-db=10`` -> record dict."""
    rec = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in item:
            raise UsageError(f"model: expected key=value, got {item!r}")
        key, value = (x.strip() for x in item.split("=", 1))
        key = {"gbar-db": "gbar_db", "lam": "lambda"}.get(key, key)
        rec[key] = value
    return rec


def _model_from(record) -> models.FadingModel:
    if not isinstance(record, dict):
        raise UsageError("model: expected a key=value record")
    try:
        model = models.from_record(record)
    except ValueError as exc:
        raise UsageError(f"model: {exc}") from None
    problems = models.validate(model)
    if problems:
        raise UsageError("model: invalid parameters\n  " + "\n  ".join(problems))
    return model


def parse_sweep(text) -> list[float]:
    """``start:stop:step`` (or a dict with start_db/stop_db/step_db) -> inclusive grid."""
    if isinstance(text, dict):
        try:
            start, stop, step = (float(text[k]) for k in ("start_db", "stop_db", "step_db"))
        except (KeyError, TypeError, ValueError):
            raise UsageError("sweep: expected start_db, stop_db and step_db numbers") from None
    else:
        parts = str(text).split(":")
        if len(parts) != 3:
            raise UsageError(f"sweep: expected start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(x) for x in parts)
        except ValueError:
            raise UsageError(f"sweep: not numbers: {text!r}") from None
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)):
        raise UsageError("sweep: values must be finite")
    if not step > 0:
        raise UsageError(f"sweep: step must be > 0 (got {step:g})")
    if stop < start:
        raise UsageError("sweep: stop must not be below start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def _float_list(text, what: str) -> list[float]:
    if isinstance(text, (list, tuple)):
        items = text
    else:
        items = [t for t in str(text).split(",") if t.strip()]
    try:
        return [float(x) for x in items]
    except (TypeError, ValueError):
        raise UsageError(f"{what}: expected comma-separated numbers") from None


def _strategies(text) -> list[MgfStrategy]:
    items = text if isinstance(text, (list, tuple)) else str(text).split(",")
    try:
        return [MgfStrategy.parse(x) for x in items if str(x).strip()]
    except ValueError as exc:
        raise UsageError(f"strategy: {exc}") from None


def resolve(args: argparse.Namespace) -> dict:
    cfg = _load_config(args.config)
    flags = {
        "model": parse_model_flag(args.model) if args.model else None,
        "scheme": args.scheme, "order": args.order, "strategy": args.strategy,
        "sweep": args.sweep, "s": args.s_values, "alpha_bar": args.alpha_bar, "out": args.out,
        "format": args.format, "fit_store": args.fit_store, "jobs": args.jobs,
        "preset": args.preset, "quick": args.quick, "fail_fast": args.fail_fast,
    }
    merged = dict(cfg)
    merged.update({k: v for k, v in flags.items() if v is not None})
    merged["command"] = args.command
    fmt = merged.get("format", "csv")
    if fmt not in FORMATS:
        raise UsageError(f"format: expected one of {list(FORMATS)}, got {fmt!r}")
    merged["format"] = fmt
    jobs = merged.get("jobs", 1)
    if not isinstance(jobs, int) or jobs < 1:
        raise UsageError("jobs: expected a positive integer")
    merged["jobs"] = jobs
    return merged


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _num(x: float) -> str:
    return repr(float(x))


def _csv(header: list[str], rows, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _json(obj: dict) -> str:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        if isinstance(v, np.floating):
            return clean(float(v))
        return v
    return json.dumps(clean({"schema": errorrates.JSON_SCHEMA, **obj}), indent=2, sort_keys=True) + "\n"


def _emit(cfg: dict, text: str) -> None:
    out = cfg.get("out")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require_model(cfg: dict) -> models.FadingModel:
    if "model" not in cfg:
        raise UsageError("model: required (use --model or the config 'model' key)")
    return _model_from(cfg["model"])


def _setup_fits(cfg: dict) -> expfit.FitCache:
    store = cfg.get("fit_store") or _default_fit_store()
    try:
        return expfit.set_default_store(store)
    except (OSError, ValueError) as exc:
        raise UsageError(f"fit-store: {exc}") from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_pdf(cfg: dict) -> int:
    model = _require_model(cfg)
    g = np.logspace(math.log10(1e-3 * model.gbar), math.log10(10.0 * model.gbar), 200)
    f = models.pdf(model, g)
    if cfg["format"] == "json":
        _emit(cfg, _json({"command": "pdf", "model": models.to_record(model),
                          "rows": [{"gamma": float(a), "pdf": float(b)} for a, b in zip(g, f)]}))
    else:
        _emit(cfg, _csv(["gamma", "pdf"], ((float(a), float(b)) for a, b in zip(g, f))))
    return EXIT_OK


def cmd_mgf(cfg: dict) -> int:
    model = _require_model(cfg)
    _setup_fits(cfg)
    strategies = _strategies(cfg.get("strategy", "auto"))
    try:
        resolved = [mgf.resolve_strategy(model, s) for s in strategies]
    except InapplicableStrategyError as exc:
        raise UsageError(f"strategy: {exc}") from None
    resolved = list(dict.fromkeys(resolved))
    s_values = (_float_list(cfg["s"], "s") if cfg.get("s") is not None
                else list(np.logspace(-2.0, 2.0, 60)))
    if any(not s >= 0 for s in s_values):
        raise UsageError("s: MGF arguments must be >= 0")
    columns = [r.value for r in resolved]
    has_numeric = MgfStrategy.NUMERIC_ORACLE in resolved
    others = [r for r in resolved if r is not MgfStrategy.NUMERIC_ORACLE]
    diff_cols = []
    if has_numeric and others:
        diff_cols = (["rel_diff_vs_numeric"] if len(others) == 1
                     else [f"rel_diff_vs_numeric_{r.value}" for r in others])
    rows = []
    for s in s_values:
        vals = {r: mgf.mgf(model, s, r) for r in resolved}
        row = [float(s)] + [vals[r] for r in resolved]
        if diff_cols:
            num = vals[MgfStrategy.NUMERIC_ORACLE]
            row += [abs(vals[r] - num) / num if num else abs(vals[r]) for r in others]
        rows.append(row)
    header = ["s"] + columns + diff_cols
    if cfg["format"] == "json":
        _emit(cfg, _json({"command": "mgf", "model": models.to_record(model),
                          "rows": [dict(zip(header, r)) for r in rows]}))
    else:
        _emit(cfg, _csv(header, rows))
    return EXIT_OK


def cmd_fit(cfg: dict) -> int:
    cache = _setup_fits(cfg)
    alpha_bars = (_float_list(cfg["alpha_bar"], "alpha-bar") if cfg.get("alpha_bar") is not None
                  else list(DEFAULT_FIT_ALPHA_BARS))
    rows, failed = [], False
    for ab in alpha_bars:
        if not expfit.ADMISSIBLE_RANGE[0] <= ab <= expfit.ADMISSIBLE_RANGE[1]:
            raise UsageError(f"alpha-bar: {ab!r} outside {list(expfit.ADMISSIBLE_RANGE)}")
        before = cache.cached(ab)
        fit = cache.get(ab, strict=False)
        status = "cached" if before is not None else ("exact" if fit.optimizer_runs == 0 else "fitted")
        ok = fit.meets_gate
        failed |= not ok
        rows.append([ab, status, "pass" if ok else "fail", fit.max_abs_err, *fit.a, *fit.B])
    header = ["alpha_bar", "status", "gate", "max_abs_err", "a1", "a2", "a3", "a4",
              "B1", "B2", "B3", "B4"]
    if cfg["format"] == "json":
        _emit(cfg, _json({"command": "fit", "gate": expfit.QUALITY_GATE,
                          "fit_store": str(cache.store) if cache.store else None,
                          "fits": [dict(zip(header, r)) for r in rows]}))
    else:
        _emit(cfg, _csv(header, rows))
    if failed:
        bad = ", ".join(f"{r[0]:g} ({r[3]:.2e})" for r in rows if r[2] == "fail")
        print(f"fadingmgf: fit-quality gate {expfit.QUALITY_GATE:g} exceeded for alpha_bar {bad}",
              file=sys.stderr)
        return EXIT_FIT_QUALITY
    return EXIT_OK


def _scheme(cfg: dict) -> errorrates.ModulationSpec:
    try:
        return errorrates.modulation_spec(cfg.get("scheme", "mpsk"), cfg.get("order", 2))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _curve_strategy(model, cfg) -> MgfStrategy:
    strategies = _strategies(cfg.get("strategy", "auto"))
    if len(strategies) != 1:
        raise UsageError("strategy: ser and sweep take a single strategy")
    try:
        return mgf.resolve_strategy(model, strategies[0])
    except InapplicableStrategyError as exc:
        raise UsageError(f"strategy: {exc}") from None


def cmd_ser(cfg: dict) -> int:
    model = _require_model(cfg)
    _setup_fits(cfg)
    spec = _scheme(cfg)
    strategy = _curve_strategy(model, cfg)
    curve = errorrates.aser_sweep(model, [model.gbar_db], spec, strategy)
    curve = errorrates.SerCurve(models.to_record(model), spec, curve.strategy, curve.points)
    _emit(cfg, curve.to_json() if cfg["format"] == "json" else curve.to_csv())
    return EXIT_OK


def _preset_output(cfg: dict) -> int:
    pr = presets.preset(cfg["preset"])
    grid = parse_sweep(cfg["sweep"]) if cfg.get("sweep") is not None else parse_sweep(
        ":".join(repr(x) for x in presets.DEFAULT_SWEEP))
    spec = errorrates.modulation_spec(pr.scheme, pr.order)
    curves = []
    for label, template in pr.curves:
        strategy = _curve_strategy(template, cfg)
        curves.append((label, errorrates.aser_sweep(template, grid, spec, strategy,
                                                    jobs=cfg["jobs"])))
    header = [f"preset {pr.name}: {pr.title}"]
    if pr.fixed:
        header.append(f"fixed by the figure: {pr.fixed}")
    header.append(f"chosen here: {pr.chosen}")
    if cfg["format"] == "json":
        _emit(cfg, _json({"command": "sweep", "preset": pr.name, "title": pr.title,
                          "fixed": pr.fixed, "chosen": pr.chosen,
                          "curves": [dict(c.to_json_dict(), label=label) for label, c in curves]}))
    else:
        rows = [[label, p.gbar_db, p.ser, c.strategy, p.quad_error]
                for label, c in curves for p in c.points]
        _emit(cfg, _csv(["curve", "gbar_db", "ser", "strategy", "quad_error"], rows, header))
    return EXIT_OK


def cmd_sweep(cfg: dict) -> int:
    _setup_fits(cfg)
    if cfg.get("preset"):
        return _preset_output(cfg)
    model = _require_model(cfg)
    if cfg.get("sweep") is None:
        raise UsageError("sweep: required (use --sweep start:stop:step or --preset)")
    grid = parse_sweep(cfg["sweep"])
    spec = _scheme(cfg)
    strategy = _curve_strategy(model, cfg)
    curve = errorrates.aser_sweep(model, grid, spec, strategy, jobs=cfg["jobs"])
    _emit(cfg, curve.to_json() if cfg["format"] == "json" else curve.to_csv())
    return EXIT_OK


def cmd_validate(cfg: dict) -> int:
    _setup_fits(cfg)
    report = validation.run_suite(quick=bool(cfg.get("quick")),
                                  fail_fast=bool(cfg.get("fail_fast")),
                                  progress=lambda c: print(c.line(), file=sys.stderr))
    verdict = "PASS" if report.passed else "FAIL"
    print(f"validate: {verdict} ({report.info['seconds']} s)", file=sys.stderr)
    data = report.to_dict()
    data["info"] = {k: v for k, v in data["info"].items() if k != "seconds"}
    if cfg["format"] == "json":
        _emit(cfg, _json(data))
    else:
        rows = [[c.name, "pass" if c.passed else "fail", "yes" if c.gating else "no",
                 float(c.worst), float(c.tolerance), c.cases] for c in report.checks]
        _emit(cfg, _csv(["check", "result", "gating", "worst", "tolerance", "cases"], rows))
    return EXIT_OK if report.passed else EXIT_VALIDATION


HANDLERS = {"pdf": cmd_pdf, "mgf": cmd_mgf, "fit": cmd_fit, "ser": cmd_ser,
            "sweep": cmd_sweep, "validate": cmd_validate}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = resolve(args)
        return HANDLERS[args.command](cfg)
    except UsageError as exc:
        print(f"fadingmgf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (models.ModelValidationError, InapplicableStrategyError) as exc:
        print(f"fadingmgf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except expfit.FitQualityError as exc:
        print(f"fadingmgf: {exc}", file=sys.stderr)
        return EXIT_FIT_QUALITY


if __name__ == "__main__":
    sys.exit(main())
