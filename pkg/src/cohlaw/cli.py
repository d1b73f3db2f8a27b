"""Command-line front end.

One executable, ``cohlaw``, with a subcommand per task: sample matrices,
measure coherence, evaluate exact and limiting laws, run the Poisson
approximation, test independence, audit sensing matrices, and drive the
Monte Carlo harness.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from enum import Enum

import numpy as np

from .errors import CohlawError, ParameterError
from .exact import CorrLaw, cdf as law_cdf_exact, pdf as law_pdf, tail_prob
from .harness import DEFAULT_BUDGET, ExperimentConfig, run, verify_suite
from .inference import TestMethod, independence_test, make_sensing_matrix, mip_report
from .kernel import coherence
from .limits import (
    LawSpec,
    Regime,
    classify_regime,
    exp_cdf,
    lln_prediction,
    subexp_cdf,
    superexp_cdf,
    transitional_cdf,
)
from .matio import read_matrix, write_matrix
from .poisson import poisson_approx
from .sampling import Gaussian, MultivariateT, ScaleMixture, sample_matrix

__all__ = ["main"]


def _json_default(obj):
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return dataclasses.asdict(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def _print_json(obj) -> None:
    print(json.dumps(obj, default=_json_default, indent=2))


def _to_float(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f"{what} must be a number, got {text!r}") from None


def _to_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParameterError(f"{what} must be an integer, got {text!r}") from None


def parse_dist(text: str):
    """Parse a distribution token: gaussian:SIGMA, mixture:W,..:S,.., or t:DF."""
    kind, _, rest = text.partition(":")
    if kind == "gaussian":
        return Gaussian(sigma=_to_float(rest, "sigma") if rest else 1.0)
    if kind == "mixture":
        w_part, _, s_part = rest.partition(":")
        if not w_part or not s_part:
            raise ParameterError("mixture needs weights and scales: mixture:w1,w2:s1,s2")
        weights = tuple(_to_float(v, "mixture weight") for v in w_part.split(","))
        scales = tuple(_to_float(v, "mixture scale") for v in s_part.split(","))
        return ScaleMixture(weights=weights, scales=scales)
    if kind == "t":
        return MultivariateT(df=_to_int(rest, "degrees of freedom"))
    raise ParameterError(f"unknown distribution {text!r}; expected gaussian:SIGMA, mixture:..., or t:DF")


def _parse_regime_token(text: str):
    """Parse sub | trans[:ALPHA] | exp[:BETA] | super into (Regime, parameter)."""
    kind, _, param = text.partition(":")
    mapping = {
        "sub": Regime.SUBEXP,
        "trans": Regime.TRANSITIONAL,
        "exp": Regime.EXPONENTIAL,
        "super": Regime.SUPEREXP,
    }
    if kind not in mapping:
        raise ParameterError(f"unknown regime {text!r}; expected sub, trans:ALPHA, exp:BETA, or super")
    return mapping[kind], (_to_float(param, "regime parameter") if param else None)


def _cmd_sample(args) -> int:
    matrix = sample_matrix(parse_dist(args.dist), args.n, args.p, args.seed)
    write_matrix(matrix, args.out, fmt=args.format)
    print(f"wrote {args.n}x{args.p} matrix (seed {args.seed}) to {args.out} [{args.format}]")
    return 0


def _cmd_coherence(args) -> int:
    matrix = read_matrix(args.infile)
    result = coherence(matrix, centered=not args.uncentered)
    if args.json:
        _print_json(result)
    else:
        mode = "uncentered" if args.uncentered else "centered"
        print(
            f"coherence {result.value:.12g} pair ({result.pair[0]}, {result.pair[1]}) "
            f"t_stat {result.t_stat:.12g} [{mode}, n={result.n}, p={result.p}]"
        )
    return 0


def _cmd_dist(args) -> int:
    law = CorrLaw(args.n, centered=not args.uncentered)
    if args.action == "table":
        if args.grid < 2:
            raise ParameterError("need a grid of at least 2 points")
        if not args.out:
            raise ParameterError("dist table needs --out CSV")
        rho = np.linspace(-1.0, 1.0, args.grid)
        interior = np.abs(rho) < 1.0
        dens = np.full(rho.shape, np.nan)
        dens[interior] = law_pdf(law, rho[interior])
        cumulative = law_cdf_exact(law, rho)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("rho,pdf,cdf\n")
            for r, d, c in zip(rho, dens, cumulative):
                fh.write(f"{r:.17g},{d:.17g},{c:.17g}\n")
        print(f"wrote {args.grid}-row law table to {args.out}")
        return 0
    if args.x is None:
        raise ParameterError(f"dist {args.action} needs --x")
    if args.action == "pdf":
        print(f"{law_pdf(law, args.x):.17g}")
    elif args.action == "cdf":
        print(f"{law_cdf_exact(law, args.x):.17g}")
    else:
        print(f"{tail_prob(law, args.x):.17g}")
    return 0


def _cmd_law(args) -> int:
    if args.action == "cdf":
        if not args.regime or args.y is None:
            raise ParameterError("law cdf needs --regime and --y")
        regime, param = _parse_regime_token(args.regime)
        y = args.y
        if regime is Regime.SUBEXP:
            value = subexp_cdf(y)
        elif regime is Regime.TRANSITIONAL:
            if param is None:
                raise ParameterError("transitional law needs trans:ALPHA")
            value = transitional_cdf(y, param)
        elif regime is Regime.EXPONENTIAL:
            if param is None:
                raise ParameterError("exponential law needs exp:BETA")
            value = exp_cdf(y, param)
        else:
            value = superexp_cdf(y)
        print(f"{value:.17g}")
        return 0
    # law predict --n N --p P
    if args.n is None or args.p is None:
        raise ParameterError("law predict needs --n and --p")
    decision = classify_regime(args.n, args.p)
    spec = LawSpec(decision.regime, args.n, args.p)
    prediction = lln_prediction(spec)
    lp = math.log(args.p)
    n = args.n
    report = {
        "regime": decision.regime.value,
        "alpha_hat": decision.alpha_hat,
        "beta_hat": decision.beta_hat,
        "ambiguous": decision.ambiguous,
        "candidates": [c.value for c in decision.candidates],
        "note": decision.note,
        "lln_coherence": prediction.coherence,
        "log_complement_ratio": prediction.log_complement_ratio,
        "pivotal_centerings": {
            "subexp_and_exp": 4.0 * lp - math.log(lp),
            "transitional": -4.0 * lp + math.log(lp),
            "superexp_centered": (4.0 * n / (n - 2.0)) * lp - math.log(n) if n > 2 else None,
            "superexp_uncentered": (4.0 * n / (n - 1.0)) * lp - math.log(n),
        },
    }
    _print_json(report)
    return 0


def _cmd_approx(args) -> int:
    _print_json(poisson_approx(args.n, args.p, args.t, centered=not args.uncentered))
    return 0


def _cmd_test(args) -> int:
    matrix = read_matrix(args.infile)
    regime = None
    if args.regime:
        regime, _ = _parse_regime_token(args.regime)
    method = TestMethod.CHEN_STEIN_FINITE_N if args.finite_n else TestMethod.ASYMPTOTIC_LAW
    report = independence_test(matrix, args.alpha, method=method, regime=regime, use_uncentered=args.uncentered)
    if args.json:
        _print_json(report)
    else:
        spec = report.regime
        verdict = "reject" if report.reject else "fail to reject"
        print(
            f"coherence {report.coherence_value:.6g}; regime {spec.regime.value} "
            f"(alpha-hat {spec.alpha_hat:.4g}, beta-hat {spec.beta_hat:.4g})"
        )
        print(
            f"statistic {report.statistic:.6g} vs threshold {report.threshold:.6g} "
            f"({report.rejection_side} tail, {report.method.value})"
        )
        interval = ""
        if report.p_value_interval is not None:
            interval = f" (bracket [{report.p_value_interval[0]:.4g}, {report.p_value_interval[1]:.4g}])"
        print(f"p-value {report.p_value:.6g}{interval} -> {verdict} at level {report.level}")
    return 0


def _cmd_mip(args) -> int:
    matrix = read_matrix(args.infile)
    ks = [_to_int(k, "sparsity level") for k in args.k.split(",")] if args.k else None
    _print_json(mip_report(matrix, ks=ks))
    return 0


def _cmd_sensing(args) -> int:
    matrix = make_sensing_matrix(args.n, args.p, args.seed)
    write_matrix(matrix, args.out, fmt="bin")
    print(f"wrote {args.n}x{args.p} sensing matrix (entry variance 1/{args.n}) to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    report = verify_suite(args.suite, budget=args.budget)
    _print_json(report)
    return 0 if report["passed"] else 1


def _read_config_file(path: str) -> dict:
    pairs = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
            pairs[key.strip()] = value.strip()
    return pairs


_CONFIG_KEYS = frozenset(
    {"dist", "n", "p", "replicates", "seed", "statistic", "out", "out_format", "budget"}
)


def _cmd_experiment(args) -> int:
    kv = _read_config_file(args.config)
    unknown = set(kv) - _CONFIG_KEYS
    if unknown:
        raise ParameterError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        config = ExperimentConfig(
            dist=parse_dist(kv.get("dist", "gaussian:1.0")),
            n=_to_int(kv["n"], "n"),
            p=_to_int(kv["p"], "p"),
            replicates=_to_int(kv.get("replicates", "1"), "replicates"),
            seed=_to_int(kv.get("seed", "0"), "seed"),
            statistic=kv.get("statistic", "L"),
            out=kv.get("out"),
            out_format=kv.get("out_format", "csv"),
        )
    except KeyError as exc:
        raise ParameterError(f"config file is missing required key {exc.args[0]!r}") from None
    budget = _to_float(kv.get("budget", str(DEFAULT_BUDGET)), "budget")
    dist = run(config, budget=budget)
    samples = dist.samples
    if config.out:
        if config.out_format == "csv":
            with open(config.out, "w", encoding="utf-8") as fh:
                fh.write(config.statistic.value + "\n")
                for value in samples:
                    fh.write(f"{value:.17g}\n")
        else:
            with open(config.out, "w", encoding="utf-8") as fh:
                json.dump({config.statistic.value: samples.tolist()}, fh)
    report = {
        "statistic": config.statistic.value,
        "n": config.n,
        "p": config.p,
        "replicates": config.replicates,
        "kept": int(samples.size),
        "flags": dist.flags,
        "mean": float(samples.mean()) if samples.size else None,
        "sd": float(samples.std(ddof=1)) if samples.size > 1 else None,
        "min": float(samples[0]) if samples.size else None,
        "median": float(np.median(samples)) if samples.size else None,
        "max": float(samples[-1]) if samples.size else None,
        "out": config.out,
    }
    _print_json(report)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohlaw", description="Coherence laws of random matrices: sampling, exact and limiting distributions, tests.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="sample a matrix with i.i.d. spherical columns")
    p_sample.add_argument("--dist", default="gaussian:1.0", help="gaussian:SIGMA | mixture:w1,..:s1,.. | t:DF")
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--p", type=int, required=True)
    p_sample.add_argument("--seed", type=int, required=True)
    p_sample.add_argument("--out", required=True)
    p_sample.add_argument("--format", choices=("bin", "csv"), default="bin")
    p_sample.set_defaults(func=_cmd_sample)

    p_coh = sub.add_parser("coherence", help="largest absolute column correlation of a stored matrix")
    p_coh.add_argument("--in", dest="infile", required=True)
    p_coh.add_argument("--uncentered", action="store_true")
    p_coh.add_argument("--json", action="store_true")
    p_coh.set_defaults(func=_cmd_coherence)

    p_dist = sub.add_parser("dist", help="exact finite-sample correlation law")
    p_dist.add_argument("action", choices=("pdf", "cdf", "tail", "table"))
    p_dist.add_argument("--n", type=int, required=True)
    p_dist.add_argument("--uncentered", action="store_true")
    p_dist.add_argument("--x", type=float)
    p_dist.add_argument("--grid", type=int, default=1001)
    p_dist.add_argument("--out", help="output CSV (table action)")
    p_dist.set_defaults(func=_cmd_dist)

    p_law = sub.add_parser("law", help="limiting laws and regime prediction")
    p_law.add_argument("action", choices=("cdf", "predict"))
    p_law.add_argument("--regime", help="sub | trans:ALPHA | exp:BETA | super")
    p_law.add_argument("--y", type=float)
    p_law.add_argument("--uncentered", action="store_true")
    p_law.add_argument("--n", type=int)
    p_law.add_argument("--p", type=int)
    p_law.set_defaults(func=_cmd_law)

    p_approx = sub.add_parser("approx", help="Poisson approximation of P(coherence <= t)")
    p_approx.add_argument("--n", type=int, required=True)
    p_approx.add_argument("--p", type=int, required=True)
    p_approx.add_argument("--t", type=float, required=True)
    p_approx.add_argument("--uncentered", action="store_true")
    p_approx.set_defaults(func=_cmd_approx)

    p_test = sub.add_parser("test", help="coherence-based independence test")
    p_test.add_argument("--in", dest="infile", required=True)
    p_test.add_argument("--alpha", type=float, default=0.05)
    p_test.add_argument("--regime", help="override: sub | trans | exp | super")
    p_test.add_argument("--finite-n", dest="finite_n", action="store_true", help="use the finite-n threshold")
    p_test.add_argument("--uncentered", action="store_true")
    p_test.add_argument("--json", action="store_true")
    p_test.set_defaults(func=_cmd_test)

    p_mip = sub.add_parser("mip", help="mutual-incoherence sparsity audit")
    p_mip.add_argument("--in", dest="infile", required=True)
    p_mip.add_argument("--k", help="comma-separated sparsities to check, e.g. 1,2,4,8")
    p_mip.set_defaults(func=_cmd_mip)

    p_sensing = sub.add_parser("sensing", help="write a Gaussian sensing matrix with entry variance 1/n")
    p_sensing.add_argument("--n", type=int, required=True)
    p_sensing.add_argument("--p", type=int, required=True)
    p_sensing.add_argument("--seed", type=int, required=True)
    p_sensing.add_argument("--out", required=True)
    p_sensing.set_defaults(func=_cmd_sensing)

    p_verify = sub.add_parser("verify", help="run a named verification suite")
    p_verify.add_argument("--suite", required=True)
    p_verify.add_argument("--budget", type=float, default=DEFAULT_BUDGET, help="pair-flop budget")
    p_verify.set_defaults(func=_cmd_verify)

    p_exp = sub.add_parser("experiment", help="run a replicated experiment from a key=value config file")
    p_exp.add_argument("--config", required=True)
    p_exp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CohlawError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
