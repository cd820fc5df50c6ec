"""
brickqec command line.

stdout carries data (code text, CSV, JSON); everything else goes to stderr.
Exit codes: 0 success, 2 usage error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import yaml

from brickqec.errors import BrickQECError, ResourceLimitError
from brickqec.utils.libw import verr

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3


# --------------------------------------------------------------------------- #
# 1.  Argument types
# --------------------------------------------------------------------------- #
def parse_values(text: str, cast=float) -> list:
    """``"0.1,0.2"`` or ``"a:b:step"`` (b excluded) -> list of values."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range must look like a:b:step, got {text!r}")
        a, b, step = (float(x) for x in parts)
        if step <= 0 or b <= a:
            raise argparse.ArgumentTypeError(f"empty or descending range {text!r}")
        count = math.ceil((b - a) / step - 1e-9)
        return [cast(round(a + i * step, 12)) for i in range(count)]
    try:
        return [cast(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _float_list(text: str) -> list:
    return parse_values(text, float)


def _int_list(text: str) -> list:
    return parse_values(text, lambda v: int(round(float(v))))


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from e
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"probability must lie in [0, 1], got {v}")
    return v


# --------------------------------------------------------------------------- #
# 2.  Parser
# --------------------------------------------------------------------------- #
def _add_code_args(sp, depth_list: bool = False, need_n: bool = False):
    sp.add_argument("--rate", required=True, help="code rate r = k/n, e.g. 1/5 or 0.2 (1/r integral)")
    if depth_list:
        sp.add_argument("--depths", required=True, type=_int_list, help="circuit depths, e.g. 3,4,5")
    else:
        sp.add_argument("--depth", required=True, type=_positive_int, help="circuit depth d")
    sp.add_argument("--n", type=_positive_int, required=need_n, help="qubits before padding (default: sized for a bulk)")
    sp.add_argument("--variant", choices=("standard", "greedy"), default="standard")


def _add_run_args(sp):
    sp.add_argument("--trials", type=_positive_int, default=None, help="trials per point (default: config)")
    sp.add_argument("--seed", type=int, required=True, help="master seed")
    sp.add_argument("--backend", choices=("grid", "explicit", "chain", "brute"), default="grid")
    sp.add_argument("--resample", choices=("fresh", "fixed"), default="fresh",
                    help="new random code per trial (fresh) or one code for all trials (fixed)")
    sp.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    from brickqec import __version__

    p = argparse.ArgumentParser(prog="brickqec",
                                description="Random brickwork stabilizer codes and tensor-network decoding")
    p.add_argument("--version", action="version", version=f"brickqec {__version__}")
    p.add_argument("--quiet", action="store_true", help="no progress bars")
    p.add_argument("--workers", type=int, default=None, help="worker processes (0 = physical cores)")
    p.add_argument("-v", "--verbose", action="store_true", help="diagnostics on stderr")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("gen", help="sample an encoded code and write it in text form")
    sp.add_argument("--n", type=_positive_int, required=True, help="qubits before padding")
    sp.add_argument("--rate", required=True)
    sp.add_argument("--depth", type=_positive_int, required=True)
    sp.add_argument("--variant", choices=("standard", "greedy"), default="standard")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", default=None)

    sp = sub.add_parser("decode", help="marginal ML decoding of one syndrome")
    sp.add_argument("--code", required=True, help="code file written by 'gen'")
    sp.add_argument("--syndrome", required=True, help="0/1 string, one bit per check")
    noise = sp.add_mutually_exclusive_group(required=True)
    noise.add_argument("--p", type=_probability, help="depolarizing probability")
    noise.add_argument("--noise", help="biased IID channel px,py,pz")
    sp.add_argument("--backend", choices=("grid", "explicit", "chain", "brute"), default="grid")
    sp.add_argument("--no-cache", action="store_true", help="contract every class from scratch")

    sp = sub.add_parser("sweep", help="bulk failure rate over a (depth, p) grid -> CSV")
    _add_code_args(sp, depth_list=True)
    sp.add_argument("--ps", required=True, type=_float_list, help="p values: list or a:b:step")
    _add_run_args(sp)

    sp = sub.add_parser("fit", help="critical-exponent threshold fit of a sweep CSV -> JSON")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--resamples", type=int, default=None, help="bootstrap resamples (default: config)")
    sp.add_argument("--seed", type=int, default=0, help="bootstrap seed")
    sp.add_argument("--crossings", action="store_true", help="also report pairwise curve crossings")

    sp = sub.add_parser("profile", help="failure rate per logical qubit -> CSV")
    _add_code_args(sp)
    sp.add_argument("--p", type=_probability, required=True)
    _add_run_args(sp)

    sp = sub.add_parser("correlate", help="conditional failure correlations -> CSV")
    _add_code_args(sp)
    sp.add_argument("--p", type=_probability, required=True)
    _add_run_args(sp)

    sp = sub.add_parser("alpha", help="any-logical failure rate with d = log2(k)/alpha -> CSV")
    sp.add_argument("--rate", required=True)
    sp.add_argument("--p", type=_probability, required=True)
    sp.add_argument("--alphas", required=True, type=_float_list)
    sp.add_argument("--ns", required=True, type=_int_list, help="pre-padding sizes: list or a:b:step")
    sp.add_argument("--variant", choices=("standard", "greedy"), default="standard")
    _add_run_args(sp)

    sp = sub.add_parser("decay", help="fit ln p_L' against depth -> JSON")
    _add_code_args(sp, depth_list=True)
    sp.add_argument("--p", type=_probability, required=True)
    _add_run_args(sp)

    sp = sub.add_parser("compare", help="greedy vs standard bulk rate at one point -> CSV")
    sp.add_argument("--rate", required=True)
    sp.add_argument("--depth", type=_positive_int, required=True)
    sp.add_argument("--n", type=_positive_int, default=None)
    sp.add_argument("--p", type=_probability, required=True)
    _add_run_args(sp)

    sp = sub.add_parser("hashing", help="hashing-bound threshold or rate")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--rate", help="print the depolarizing p at which the hashing rate equals RATE")
    g.add_argument("--p", type=_probability, help="print the hashing rate of depolarizing p")

    sp = sub.add_parser("config", help="show, validate or change the user configuration")
    csub = sp.add_subparsers(dest="config_cmd", required=True)
    csub.add_parser("show")
    csub.add_parser("validate")
    cs = csub.add_parser("set")
    cs.add_argument("key")
    cs.add_argument("value")
    return p


# --------------------------------------------------------------------------- #
# 3.  Commands
# --------------------------------------------------------------------------- #
def _trials(args) -> int:
    if args.trials is not None:
        return args.trials
    from brickqec.core.config import get_config
    return int(get_config().default_trials)


def _run_kwargs(args) -> dict:
    return {
        "workers": args.workers,
        "backend": args.backend,
        "resample_code": args.resample,
        "progress": False if args.quiet else None,
    }


def _manifest(args, command: str):
    from brickqec.core.manifest import RunManifest

    skip = {"cmd", "quiet", "verbose", "func", "out"}
    params = {k: v for k, v in vars(args).items() if k not in skip}
    return RunManifest(command, params, getattr(args, "seed", None))


def _warn_trials(args, manifest, trials: int):
    from brickqec.core.config import get_config

    target = get_config().paper_trials
    if trials < target:
        manifest.log_entry(f"{trials} trials per point (reference studies used at least {target})")


def cmd_gen(args) -> int:
    from brickqec.core.codes import CodeParams, dumps_code, sample_code
    from brickqec.utils.seeding import STREAM_CODE, rng_for

    params = CodeParams(args.n, args.rate, args.depth, args.variant, args.seed)
    code, _ = sample_code(params, rng_for(args.seed, STREAM_CODE))
    header = _manifest(args, "gen").header_line(deterministic=True)
    text = header + "\n" + dumps_code(code)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_decode(args) -> int:
    from brickqec.core.codes import read_code
    from brickqec.core.noise import NoiseModel, Syndrome, depolarizing
    from brickqec.core.tn_decoder import Decoder

    code = read_code(args.code)
    noise = depolarizing(args.p) if args.p is not None else NoiseModel.from_string(args.noise)
    s = Syndrome.from_text(args.syndrome)
    if len(s) != code.n_checks:
        raise ValueError(f"syndrome has {len(s)} bits, code has {code.n_checks} checks")
    result = Decoder(code, noise, args.backend, use_cache=not args.no_cache).decode(s)
    print(json.dumps(result.to_json()))
    return EXIT_OK


def cmd_sweep(args) -> int:
    from brickqec.core.experiments import sweep
    from brickqec.utils.results import SWEEP_FIELDS, write_rows

    trials = _trials(args)
    manifest = _manifest(args, "sweep")
    _warn_trials(args, manifest, trials)
    points = sweep(args.rate, args.depths, args.ps, trials, args.seed, n=args.n, variant=args.variant,
                   **_run_kwargs(args))
    invalid = sum(pt.invalid for pt in points)
    if invalid:
        manifest.log_entry(f"{invalid} trials excluded for exceeding resource caps")
    manifest.finish()
    write_rows([pt.row() for pt in points], SWEEP_FIELDS, args.out, manifest)
    return EXIT_OK


def cmd_fit(args) -> int:
    from brickqec.core.fitting import crossing_points, threshold_fit
    from brickqec.utils.results import read_rows

    source_manifest, rows = read_rows(args.infile)
    fit = threshold_fit(rows, resamples=args.resamples, seed=args.seed)
    out = fit.to_json()
    if args.crossings:
        out["crossings"] = [{"d1": a, "d2": b, "p": p} for a, b, p in crossing_points(rows)]
    manifest = _manifest(args, "fit")
    manifest.finish()
    out["manifest"] = manifest.as_dict()
    if source_manifest is not None:
        out["source_manifest"] = source_manifest
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _params(args, d: Optional[int] = None):
    from brickqec.core.codes import CodeParams, as_rate
    from brickqec.core.experiments import default_size

    d = args.depth if d is None else d
    n = args.n if args.n is not None else default_size(as_rate(args.rate), d)
    return CodeParams(n, args.rate, d, args.variant, args.seed)


def cmd_profile(args) -> int:
    from brickqec.core.experiments import failure_profile
    from brickqec.utils.results import write_rows

    manifest = _manifest(args, "profile")
    prof = failure_profile(_params(args), args.p, _trials(args), args.seed, **_run_kwargs(args))
    manifest.log_entry(f"any-logical failure rate p_L={prof.p_L:.6g} over {prof.trials} trials")
    manifest.finish()
    write_rows(prof.rows(), ("index", "x", "position", "failures", "trials", "rate", "stderr"), args.out, manifest)
    return EXIT_OK


def cmd_correlate(args) -> int:
    from dataclasses import asdict

    from brickqec.core.experiments import correlations
    from brickqec.utils.results import write_rows

    manifest = _manifest(args, "correlate")
    curve = correlations(_params(args), args.p, _trials(args), args.seed, **_run_kwargs(args))
    manifest.finish()
    write_rows([asdict(c) for c in curve],
               ("separation", "distance", "x", "value", "sigma", "events", "low_stats"), args.out, manifest)
    return EXIT_OK


def cmd_alpha(args) -> int:
    from dataclasses import asdict

    from brickqec.core.experiments import alpha_scaling
    from brickqec.utils.results import write_rows

    manifest = _manifest(args, "alpha")
    pts = alpha_scaling(args.rate, args.p, args.alphas, args.ns, _trials(args), args.seed,
                        variant=args.variant, **_run_kwargs(args))
    manifest.finish()
    write_rows([asdict(pt) for pt in pts], ("alpha", "n", "k", "d", "n_phys", "p_L", "stderr", "trials"),
               args.out, manifest)
    return EXIT_OK


def cmd_decay(args) -> int:
    from brickqec.core.experiments import decay

    manifest = _manifest(args, "decay")
    points, fit = decay(args.rate, args.p, args.depths, _trials(args), args.seed, n=args.n,
                        variant=args.variant, **_run_kwargs(args))
    manifest.finish()
    out = fit.to_json()
    out["points"] = [pt.row() for pt in points]
    out["manifest"] = manifest.as_dict()
    text = json.dumps(out, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_compare(args) -> int:
    from brickqec.core.experiments import compare_variants
    from brickqec.utils.results import SWEEP_FIELDS, write_rows

    manifest = _manifest(args, "compare")
    res = compare_variants(args.rate, args.depth, args.p, _trials(args), args.seed, n=args.n,
                           **_run_kwargs(args))
    manifest.finish()
    write_rows([pt.row() for pt in res.values()], SWEEP_FIELDS, args.out, manifest)
    return EXIT_OK


def cmd_hashing(args) -> int:
    from fractions import Fraction

    from brickqec.core.noise import depolarizing, hashing_rate, hashing_threshold

    if args.rate is not None:
        print(f"{hashing_threshold(float(Fraction(args.rate))):.6f}")
    else:
        print(f"{hashing_rate(depolarizing(args.p)):.6f}")
    return EXIT_OK


def cmd_config(args) -> int:
    from brickqec.core.config import get_config

    cfg = get_config()
    if args.config_cmd == "show":
        cfg.print_summary()
    elif args.config_cmd == "validate":
        cfg.validate()
    else:
        cfg.set(args.key, yaml.safe_load(args.value))
        cfg.save()
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen, "decode": cmd_decode, "sweep": cmd_sweep, "fit": cmd_fit, "profile": cmd_profile,
    "correlate": cmd_correlate, "alpha": cmd_alpha, "decay": cmd_decay, "compare": cmd_compare,
    "hashing": cmd_hashing, "config": cmd_config,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    if args.verbose:
        os.environ["BRICKQEC_VERBOSE"] = "1"
    try:
        return COMMANDS[args.cmd](args)
    except ResourceLimitError as e:
        verr(f"[brickqec] resource limit: {e}")
        return EXIT_RESOURCE
    except (ValueError, KeyError, FileNotFoundError, BrickQECError) as e:
        verr(f"[brickqec] error: {e}")
        return EXIT_USAGE
