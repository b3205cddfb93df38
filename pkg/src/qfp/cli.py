"""Command-line front end.

Subcommands: recipe, gen-code, fingerprint, error-scan, leakage,
extract, classical, smp, one-way, validate-bounds. Long-name flags
only; a JSON config file may supply defaults that explicit flags
override; QFP_SEED is the seed fallback.

Reports are byte-identical for identical config and seed at any
--threads value: floats are serialized with 17 significant digits,
keys are sorted, and wall-clock duration goes to stderr rather than
into the report.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

from . import __version__
from . import bounds as bounds_mod
from . import classical as classical_mod
from . import codes as codes_mod
from . import fingerprint as fp_mod
from . import leakage as leakage_mod
from . import protocols as protocols_mod
from .rng import master_stream, resolve_seed

USAGE_ERROR = 1
VALIDATION_FAILURE = 2


def _format_value(v):
    if hasattr(v, "item") and not isinstance(v, (str, bytes)):
        v = v.item()  # numpy scalars
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return json.dumps(v)
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return json.dumps(None)
        return format(v, ".17g")
    raise TypeError(f"unsupported report value {type(v)}")


def dumps_report(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, 17-significant-digit floats."""
    pad = " " * indent
    if isinstance(obj, dict):
        items = [f'{pad}  {json.dumps(str(k))}: {dumps_report(v, indent + 2).lstrip()}'
                 for k, v in sorted(obj.items())]
        return pad + "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        items = [dumps_report(v, indent + 2) for v in obj]
        return pad + "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return pad + _format_value(obj)


def _flatten(prefix: str, obj, out: dict):
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}{k}." if prefix else f"{k}.", obj[k], out)
        return
    key = prefix[:-1]
    if isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _flatten(f"{key}[{i}].", v, out)
        return
    out[key] = _format_value(obj).strip('"')


def dumps_csv(report: dict) -> str:
    flat: dict = {}
    _flatten("", report, flat)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(flat.keys())
    writer.writerow(flat.values())
    return buf.getvalue()


def _write_output(text: str, path: str | None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _load_code(path: str) -> codes_mod.QuasiLinearCode:
    with open(path) as fh:
        return codes_mod.code_from_json(json.load(fh))


def _parse_bits(text: str) -> codes_mod.BitString:
    if set(text) - {"0", "1"}:
        raise ValueError(f"bit string must be 0/1 characters: {text!r}")
    return codes_mod.BitString.from_bits(int(ch) for ch in text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfp", description=__doc__)
    parser.add_argument("--config", help="JSON file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv"), default=None)
        return p

    p = add("recipe", help="parameter recipe values and a desk profile")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--pure", action="store_true")

    p = add("gen-code", help="sample a quasi-linear code")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--distinct-columns", action="store_true")

    p = add("fingerprint", help="fingerprint one input")
    p.add_argument("--code", required=True)
    p.add_argument("--input", required=True, help="bit string, e.g. 01101")
    p.add_argument("--k", type=int, default=None)

    p = add("error-scan", help="worst-case error probabilities")
    p.add_argument("--code", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--budget", type=int, default=None)

    p = add("leakage", help="functional maximization and extraction")
    p.add_argument("--code", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--bases", type=int, default=None)

    p = add("extract", help="random-basis extraction attack")
    p.add_argument("--code", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--bases", type=int, default=None)

    p = add("classical", help="classical hash-scheme leakage report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)

    p = add("smp", help="SMP equality with the swap test")
    p.add_argument("--code", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--shots", type=int, default=None)

    p = add("one-way", help="one-way equality via the mixed scheme")
    p.add_argument("--code", required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = add("validate-bounds", help="run the Monte Carlo bound suites")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--chernoff-trials", type=int, default=None)
    p.add_argument("--haar-samples", type=int, default=None)

    return parser


_SENTINEL = object()

_DEFAULTS = {
    "format": "json",
    "shots": 1,
    "restarts": 64,
    "iters": 200,
    "bases": 100,
    "samples": 10 ** 6,
    "chernoff_trials": 10 ** 4,
    "haar_samples": 10 ** 5,
}


def _apply_config(args: argparse.Namespace):
    """Fill unset flags from the config file, then from built-in defaults.

    Explicit flags always win; an absent store_true flag (False) can be
    switched on by the config.
    """
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
        for key, value in overrides.items():
            attr = key.replace("-", "_")
            current = getattr(args, attr, _SENTINEL)
            if current is _SENTINEL:
                raise ValueError(f"unknown config key {key!r}")
            if current is None or current is False:
                setattr(args, attr, value)
    for attr, value in _DEFAULTS.items():
        if getattr(args, attr, _SENTINEL) is None:
            setattr(args, attr, value)


def _resolve_k(args, code) -> int:
    return code.params.k if args.k is None else args.k


def _cmd_recipe(args, seed):
    asym = codes_mod.parameter_recipe(args.n, args.c, pure=args.pure)
    desk = codes_mod.desk_profile(args.n, pure=args.pure)
    return {
        "asymptotic": {"k": asym.k, "d": asym.d, "r": asym.r,
                       "feasible": asym.feasible, "violation": asym.violation},
        "desk": {"k": desk.k, "d": desk.d, "r": desk.r},
    }, True


def _cmd_gen_code(args, seed):
    params = codes_mod.CodeParams(args.n, args.k, args.r, args.d)
    rng = master_stream(seed)
    if args.distinct_columns:
        code = codes_mod.sample_distinct_column_code(params, rng, seed=seed)
    else:
        code = codes_mod.sample_code(params, rng, seed=seed)
    return codes_mod.code_to_json(code), True


def _cmd_fingerprint(args, seed):
    code = _load_code(args.code)
    k = _resolve_k(args, code)
    bits = _parse_bits(args.input)
    if k == 0 and bits.length == code.params.message_bits:
        fp = fp_mod.pure_fingerprint(code, bits)
    else:
        fp = fp_mod.mixed_fingerprint(code, bits, k)
    return fp_mod.fingerprint_to_json(fp), True


def _cmd_error_scan(args, seed):
    code = _load_code(args.code)
    k = _resolve_k(args, code)
    if args.exhaustive or args.budget is None:
        report = fp_mod.error_scan(code, k, "exhaustive")
    else:
        report = fp_mod.error_scan(code, k, "sampled", budget=args.budget,
                                   rng=master_stream(seed))
    return report.to_json(), True


def _cmd_leakage(args, seed):
    code = _load_code(args.code)
    k = _resolve_k(args, code)
    _, best = leakage_mod.functional_max(code, k, args.restarts, args.iters,
                                         seed, threads=args.threads)
    extraction = leakage_mod.extraction_attack(
        leakage_mod.scheme_states(code, k), args.bases, seed,
        threads=args.threads)
    report = leakage_mod.LeakageReport(
        functional_max_nats=best, restarts=args.restarts,
        iacc_bound_nats=best, extraction_mi_bits=extraction.mean_bits,
        bases=args.bases, seed=seed)
    return report.to_json(), True


def _cmd_extract(args, seed):
    code = _load_code(args.code)
    k = _resolve_k(args, code)
    result = leakage_mod.extraction_attack(
        leakage_mod.scheme_states(code, k), args.bases, seed,
        threads=args.threads)
    return {"extraction_mi_bits": result.mean_bits, "bases": args.bases,
            "seed": seed}, True


def _cmd_classical(args, seed):
    scheme = classical_mod.HashScheme(args.n, args.m, family_seed=seed)
    report = classical_mod.classical_report(scheme)
    return report.to_json(), True


def _cmd_smp(args, seed):
    code = _load_code(args.code)
    transcript = protocols_mod.smp_equality(
        code, _parse_bits(args.x), _parse_bits(args.y), args.shots,
        master_stream(seed))
    out = transcript.to_json()
    out["cost_qubits"] = protocols_mod.protocol_cost(transcript)
    return out, True


def _cmd_one_way(args, seed):
    code = _load_code(args.code)
    k = _resolve_k(args, code)
    transcript = protocols_mod.one_way_equality(
        code, k, _parse_bits(args.x), _parse_bits(args.y), master_stream(seed))
    out = transcript.to_json()
    out["cost_qubits"] = protocols_mod.protocol_cost(transcript)
    return out, True


def _cmd_validate_bounds(args, seed):
    results = bounds_mod.run_validation_suites(
        seed, samples=args.samples, chernoff_trials=args.chernoff_trials,
        haar_samples=args.haar_samples)
    ok = all(r.passed for r in results if r.status == "ok")
    return {"suites": [r.to_json() for r in results]}, ok


_COMMANDS = {
    "recipe": _cmd_recipe,
    "gen-code": _cmd_gen_code,
    "fingerprint": _cmd_fingerprint,
    "error-scan": _cmd_error_scan,
    "leakage": _cmd_leakage,
    "extract": _cmd_extract,
    "classical": _cmd_classical,
    "smp": _cmd_smp,
    "one-way": _cmd_one_way,
    "validate-bounds": _cmd_validate_bounds,
}

_RAW_SCHEMA_COMMANDS = {"gen-code", "fingerprint"}  # pinned file formats


def _config_dict(args) -> dict:
    skip = {"command", "config", "seed", "threads", "out", "format"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code else 0
    try:
        _apply_config(args)
        seed = resolve_seed(args.seed)
        start = time.perf_counter()
        results, ok = _COMMANDS[args.command](args, seed)
        if args.command in _RAW_SCHEMA_COMMANDS:
            report = results
        else:
            report = {
                "tool": "qfp",
                "version": __version__,
                "command": args.command,
                "config": _config_dict(args),
                "seed": seed,
                "results": results,
            }
        if args.format == "csv":
            text = dumps_csv(report)
        else:
            text = dumps_report(report) + "\n"
        _write_output(text, args.out)
        duration = time.perf_counter() - start
        print(f"qfp {args.command}: {duration:.3f}s", file=sys.stderr)
        return 0 if ok else VALIDATION_FAILURE
    except (ValueError, OSError, KeyError) as exc:
        print(f"qfp: error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
