"""Command-line front end.

Every subcommand validates its parameters before doing any work; a config
that fails validation exits with status 1 and writes nothing.  Status 2
means the computation ran but a checked property came out false.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import addcomb, fourier, goldbach, selberg, transfer
from .arithcore import InvalidResidueError, _check_residue, is_squarefree, primorial
from .reports import csv_text, dumps, ndjson_lines

OUTPUT_DIR_ENV = "VINOLAB_OUTPUT_DIR"
SUBCOMMANDS = ("weights", "majorant", "fourier", "arcs", "popsum", "transfer", "goldbach", "sweep")
CSV_CAPABLE = {"majorant", "fourier", "arcs", "transfer"}

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    seed: int = 0

    def get(self, key, default=None):
        v = self.params.get(key)
        return default if v is None else v


@dataclass
class Outcome:
    text: str
    violations: list[str] = field(default_factory=list)
    extension: str = "json"


def _wheel(cfg: RunConfig) -> int:
    if cfg.get("W") is not None:
        return cfg.get("W")
    return primorial(cfg.get("w_cutoff", 1))


def _z(cfg: RunConfig, N: int | None = None):
    if cfg.get("z") is not None:
        return cfg.get("z")
    return float(N) ** cfg.get("z_exponent", goldbach.Z_EXPONENT)


# ---------------------------------------------------------------------------
# validation


def _check_open_unit(cfg: RunConfig, key: str, out: list[str]) -> None:
    v = cfg.get(key)
    if v is not None and not 0 < v < 1:
        out.append(f"{key} must lie in (0, 1)")


def _validate_sieve(cfg: RunConfig, out: list[str], need_N: bool) -> None:
    W = cfg.get("W")
    if W is not None and cfg.get("w_cutoff") is not None:
        out.append("give either W or w-cutoff, not both")
    if W is not None and (W < 1 or not is_squarefree(W)):
        out.append("W must be a squarefree positive integer")
    wc = cfg.get("w_cutoff")
    if wc is not None and wc > 100:
        out.append("w-cutoff must be at most 100")
    N = cfg.get("N")
    if need_N:
        if N is None:
            out.append("N is required")
        elif N < 1:
            out.append("N must be positive")
    elif cfg.get("z") is None:
        out.append("z is required")
    z = cfg.get("z")
    if z is not None and not z > 1:
        out.append("z must exceed 1")
    ze = cfg.get("z_exponent")
    if ze is not None and not 0 < ze < 0.5:
        out.append("z-exponent must lie in (0, 1/2)")
    if need_N and N is not None and N >= 1 and z is None and N ** cfg.get("z_exponent", 0.49) <= 1:
        out.append("z = N**z-exponent must exceed 1")
    if need_N and not out:
        try:
            _check_residue(_wheel(cfg), cfg.get("b", 1))
        except InvalidResidueError as exc:
            out.append(str(exc))


def _validate_goldbach(cfg: RunConfig, out: list[str]) -> None:
    M = cfg.get("M")
    if M is None:
        out.append("M is required")
    elif M % 2 == 0:
        out.append("M must be odd")
    elif M < 7:
        out.append("M must be at least 7")
    w = cfg.get("w", 2)
    if not 0 < w <= 100:
        out.append("w must lie in (0, 100]")
    _check_open_unit(cfg, "epsilon", out)
    q = cfg.get("q")
    if q is not None and not 2 < q < 3:
        out.append("q must lie in (2, 3)")
    _check_open_unit(cfg, "delta", out)


def _validate_popsum(cfg: RunConfig, out: list[str]) -> None:
    check = cfg.get("check", "pop")
    beta = cfg.get("beta")
    if check == "pop":
        if beta is None:
            out.append("beta is required")
        elif not 0 < beta < Fraction(1, 6):
            out.append("beta < 1/6 required")
        if cfg.get("sweep") is None:
            if cfg.get("N") is None or cfg.get("N") < 1:
                out.append("N must be positive")
            if cfg.get("kappa") is None or cfg.get("kappa") < 0:
                out.append("kappa must be nonnegative")
    if check == "gr" and cfg.get("sweep") is None:
        G = cfg.get("G")
        if G is None or G < 1:
            out.append("G must be positive")
        if cfg.get("K") is None or cfg.get("K") <= 0:
            out.append("K must be positive")
    if cfg.get("sweep") is None and check in ("gr", "freiman", "pop"):
        for key in ("A1", "A2"):
            if cfg.get(key) is None:
                out.append(f"{key} is required")
            elif check == "freiman" and not cfg.get(key):
                out.append(f"{key} must be nonempty")
    if check == "pop" and cfg.get("sweep") is None and cfg.get("N") is not None:
        for key in ("A1", "A2"):
            if any(not 1 <= x <= cfg.get("N") for x in cfg.get(key, [])):
                out.append(f"{key} must lie in [1, N]")
    count = cfg.get("count")
    if count is not None and count < 0:
        out.append("count must be nonnegative")


def validate(cfg: RunConfig) -> list[str]:
    """Every violated precondition, as a message naming the parameter."""
    out: list[str] = []
    if cfg.subcommand not in SUBCOMMANDS:
        return [f"unknown subcommand {cfg.subcommand!r}"]
    if cfg.format not in ("json", "csv"):
        out.append("format must be json or csv")
    elif cfg.format == "csv" and cfg.subcommand not in CSV_CAPABLE:
        out.append(f"{cfg.subcommand} has no csv output")
    sub = cfg.subcommand
    if sub == "weights":
        _validate_sieve(cfg, out, need_N=False)
    elif sub in ("majorant", "fourier"):
        _validate_sieve(cfg, out, need_N=True)
        if sub == "fourier" and cfg.get("q") is not None and cfg.get("q") <= 0:
            out.append("q must be positive")
    elif sub == "arcs":
        N, Q, R = cfg.get("N"), cfg.get("Q"), cfg.get("R")
        if N is None or N < 1:
            out.append("N must be positive")
        elif (Q is None) != (R is None):
            out.append("give both Q and R, or neither")
        elif Q is not None and not 1 <= Q <= R <= N:
            out.append("need 1 <= Q <= R <= N")
        _check_open_unit(cfg, "delta", out)
    elif sub == "popsum":
        _validate_popsum(cfg, out)
    elif sub in ("transfer", "goldbach"):
        _validate_goldbach(cfg, out)
    elif sub == "sweep":
        path = cfg.get("config")
        if path is None:
            out.append("config is required")
        else:
            try:
                goldbach.ExperimentConfig.from_dict(json.loads(Path(path).read_text("utf-8")))
            except (OSError, ValueError, TypeError, KeyError) as exc:
                out.append(f"config: {exc}")
    return out


# ---------------------------------------------------------------------------
# commands


def _cmd_weights(cfg: RunConfig) -> Outcome:
    w = selberg.build_weights(cfg.get("z"), _wheel(cfg))
    return Outcome(dumps(selberg.weights_to_dict(w), indent=2))


def _majorant(cfg: RunConfig) -> selberg.MajorantTable:
    N = cfg.get("N")
    return selberg.build_majorant(selberg.SieveParams(N, _z(cfg, N), _wheel(cfg), cfg.get("b", 1)))


def _cmd_majorant(cfg: RunConfig) -> Outcome:
    m = _majorant(cfg)
    if cfg.format == "csv":
        rows = ((n, str(c), repr(float(v))) for n, c, v in zip(range(1, m.params.N + 1), m.core, m.values))
        return Outcome(csv_text(["n", "core", "nu"], rows), extension="csv")
    return Outcome(dumps(selberg.majorant_to_dict(m), indent=2))


def _cmd_fourier(cfg: RunConfig) -> Outcome:
    m = _majorant(cfg)
    nu = fourier.DensityFunction.from_majorant(m)
    if cfg.format == "csv":
        Q, R = fourier.arc_parameters(m.params.N, cfg.get("delta", fourier.DEFAULT_DELTA))
        return Outcome(fourier.spectrum_csv(nu, fourier.arc_dissect(m.params.N, Q, R)), extension="csv")
    rec = fourier.pseudorandomness_record(m)
    q = cfg.get("q", 2.5)
    rec["q"] = q
    rec["lq_norm"] = fourier.lq_norm(nu, q)
    rec["lq_ratio"] = rec["lq_norm"] / m.params.N ** (1 - 1 / q)
    return Outcome(dumps(rec, indent=2))


def _cmd_arcs(cfg: RunConfig) -> Outcome:
    N = cfg.get("N")
    if cfg.get("Q") is None:
        Q, R = fourier.arc_parameters(N, cfg.get("delta", fourier.DEFAULT_DELTA))
    else:
        Q, R = cfg.get("Q"), cfg.get("R")
    d = fourier.arc_dissect(N, Q, R)
    rows = [(r, "minor" if c is None else "major", "" if c is None else c.q, "" if c is None else c.a)
            for r, c in enumerate(d.classification)]
    if cfg.format == "csv":
        return Outcome(csv_text(["r", "classification", "q", "a"], rows), extension="csv")
    doc = {"N": N, "Q": Q, "R": R,
           "arcs": [{"r": r, "classification": k, "q": q or None, "a": a if q else None}
                    for r, k, q, a in rows]}
    return Outcome(dumps(doc, indent=2))


def _popsum_records(cfg: RunConfig):
    check, sweep, seed = cfg.get("check", "pop"), cfg.get("sweep"), cfg.seed
    if sweep:
        if check == "gr":
            return addcomb.green_ruzsa_sweep(cfg.get("G", 24), cfg.get("count", 500), seed)
        if check == "freiman":
            return addcomb.freiman_sweep(cfg.get("count", 10_000), cfg.get("max_element", 50), seed)
        seeds = range(seed, seed + cfg.get("count", 100))
        return addcomb.pop_theorem_sweep(cfg.get("N", 1000), seeds, beta=cfg.get("beta"))
    A1, A2 = cfg.get("A1"), cfg.get("A2")
    if check == "gr":
        return [addcomb.green_ruzsa_check(cfg.get("G"), A1, A2, cfg.get("K"))]
    if check == "freiman":
        return [addcomb.freiman_check(A1, A2)]
    N = cfg.get("N")
    S1, S2 = addcomb.IntegerSet.interval(N, A1), addcomb.IntegerSet.interval(N, A2)
    return [addcomb.pop_theorem_check(S1, S2, cfg.get("beta"), cfg.get("kappa"))]


def _cmd_popsum(cfg: RunConfig) -> Outcome:
    recs = [r.to_dict() for r in _popsum_records(cfg)]
    bad = [f"{r['check']} fails (instance_seed={r['instance_seed']})" for r in recs if r["holds"] is False]
    return Outcome("".join(ndjson_lines(recs)), bad, extension="ndjson")


def _cmd_transfer(cfg: RunConfig) -> Outcome:
    t = goldbach.build_instance(cfg.get("M"), cfg.get("w", 2), cfg.get("delta", fourier.DEFAULT_DELTA))
    eps, q = cfg.get("epsilon", 0.1), cfg.get("q", 2.5)
    ds, reports = [], []
    kappa = goldbach.kappa_estimate(t)
    for a, nu in zip(t.a_i, t.nu_i):
        d = transfer.decompose(a, eps)
        ds.append(d)
        eta = fourier.pseudorandomness_eta(nu).eta
        reports.append(transfer.decomposition_report(d, fourier.DensityFunction.from_majorant(nu),
                                                     eta, q, kappa, t.delta / 50))
    if cfg.format == "csv":
        parts = []
        for i, d in enumerate(ds, 1):
            body = transfer.decomposition_csv(d).split("\r\n", 1)[1]
            parts.append(body.replace("\r\n", f",{i}\r\n") if body else "")
        return Outcome("n,a,a_struct,a_unif,index\r\n" + "".join(parts), extension="csv")
    gap = transfer.holder_gap(*ds, q, t.N)
    bad = []
    for i, r in enumerate(reports, 1):
        if not (r.dominance_struct and r.dominance_unif):
            bad.append(f"dominance fails for a_{i}")
        if not r.majorized:
            bad.append(f"a_{i} is not majorized")
    if not gap.contract_holds:
        bad.append("holder gap contract fails")
    doc = {"M": t.M, "W": t.W, "b": list(t.b), "N": t.N, "epsilon": eps, "q": q,
           "decomposition": reports, "holder": gap, "contract_holds": gap.contract_holds}
    return Outcome(dumps(doc, indent=2), bad)


def _record_violations(rec: dict) -> list[str]:
    bad = []
    if rec.get("direct_count") is not None and rec["direct_count"] <= 0:
        bad.append(f"M={rec['M']}: no three-prime representation")
    if rec.get("positivity_agreement") is False:
        bad.append(f"M={rec['M']}: witness disagrees with the triple count")
    hyp = rec.get("hypotheses")
    if hyp and not all(hyp["majorized"]):
        bad.append(f"M={rec['M']}: majorization fails")
    return bad


def _cmd_goldbach(cfg: RunConfig) -> Outcome:
    econf = goldbach.ExperimentConfig(
        M=(cfg.get("M"),), w=(cfg.get("w", 2),), epsilon=cfg.get("epsilon", 0.1),
        q=cfg.get("q", 2.5), delta=cfg.get("delta", fourier.DEFAULT_DELTA),
        decompose=not cfg.get("no_decompose", False),
    )
    rec = next(goldbach.run_experiment(econf))
    if "error" in rec:
        raise ValueError(rec["error"])
    return Outcome(dumps(rec, indent=2), _record_violations(rec))


def _cmd_sweep(cfg: RunConfig) -> Outcome:
    doc = json.loads(Path(cfg.get("config")).read_text("utf-8"))
    recs = list(goldbach.run_experiment(goldbach.ExperimentConfig.from_dict(doc)))
    bad = [v for r in recs for v in _record_violations(r)]
    return Outcome("".join(ndjson_lines(recs)), bad, extension="ndjson")


COMMANDS: dict[str, Callable[[RunConfig], Outcome]] = {
    "weights": _cmd_weights, "majorant": _cmd_majorant, "fourier": _cmd_fourier,
    "arcs": _cmd_arcs, "popsum": _cmd_popsum, "transfer": _cmd_transfer,
    "goldbach": _cmd_goldbach, "sweep": _cmd_sweep,
}


def _destination(cfg: RunConfig, ext: str) -> Path | None:
    if cfg.output and cfg.output != "-":
        return Path(cfg.output)
    if cfg.output is None and os.environ.get(OUTPUT_DIR_ENV):
        return Path(os.environ[OUTPUT_DIR_ENV]) / f"{cfg.subcommand}.{ext}"
    return None


def dispatch(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    problems = validate(cfg)
    if problems:
        for msg in problems:
            print(f"error: {msg}", file=stderr)
        return EXIT_INVALID
    try:
        outcome = COMMANDS[cfg.subcommand](cfg)
    except (ValueError, OverflowError, selberg.ResourceBudgetError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    text = outcome.text if outcome.text.endswith("\n") or not outcome.text else outcome.text + "\n"
    dest = _destination(cfg, outcome.extension)
    if dest is None:
        stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        tmp = dest.with_name(dest.name + ".tmp")
        with open(tmp, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, dest)
    for msg in outcome.violations:
        print(f"violation: {msg}", file=stderr)
    return EXIT_VIOLATION if outcome.violations else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()] if s else []


def _number(s: str):
    """Integers stay integers so that ``--z 7`` round-trips as ``7``."""
    try:
        return int(s)
    except ValueError:
        return float(s)


class _Parser(argparse.ArgumentParser):
    """Usage errors are validation failures: exit 1, not argparse's 2."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", "-o", help="output file, '-' for stdout "
                        f"(default: ${OUTPUT_DIR_ENV}/<subcommand>.<ext> if set, else stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)

    sieve = _Parser(add_help=False)
    sieve.add_argument("--z", type=_number)
    sieve.add_argument("--z-exponent", type=float, help="z = N**z_exponent when --z is absent")
    wheel = sieve.add_mutually_exclusive_group()
    wheel.add_argument("--w-cutoff", type=float, help="W is the product of primes <= this")
    wheel.add_argument("--W", type=int)
    sieve.add_argument("--N", type=int)
    sieve.add_argument("--b", type=int)

    ternary = _Parser(add_help=False)
    ternary.add_argument("--M", type=int)
    ternary.add_argument("--w", type=float)
    ternary.add_argument("--epsilon", type=float)
    ternary.add_argument("--q", type=float)
    ternary.add_argument("--delta", type=float)

    p = _Parser(prog="vinolab", description="Three-primes transference toolkit")
    sub = p.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("weights", parents=[common, sieve], help="exact sieve weights")
    sub.add_parser("majorant", parents=[common, sieve], help="tabulate the majorant")
    f = sub.add_parser("fourier", parents=[common, sieve], help="pseudorandomness and spectrum")
    f.add_argument("--q", type=float)
    f.add_argument("--delta", type=float)
    a = sub.add_parser("arcs", parents=[common], help="major/minor arc classification")
    a.add_argument("--N", type=int)
    a.add_argument("--Q", type=int)
    a.add_argument("--R", type=int)
    a.add_argument("--delta", type=float)
    ps = sub.add_parser("popsum", parents=[common], help="popular-sum inequality checks")
    ps.add_argument("--check", choices=("gr", "freiman", "pop"), default="pop")
    ps.add_argument("--sweep", action="store_true", default=None, help="seeded random sweep")
    ps.add_argument("--A1", type=_int_list)
    ps.add_argument("--A2", type=_int_list)
    ps.add_argument("--N", type=int)
    ps.add_argument("--G", type=int)
    ps.add_argument("--K", type=float)
    ps.add_argument("--beta", type=float)
    ps.add_argument("--kappa", type=float)
    ps.add_argument("--count", type=int)
    ps.add_argument("--max-element", type=int)
    sub.add_parser("transfer", parents=[common, ternary], help="dense-model decomposition")
    g = sub.add_parser("goldbach", parents=[common, ternary], help="one ternary instance")
    g.add_argument("--no-decompose", action="store_true", default=None)
    s = sub.add_parser("sweep", parents=[common], help="experiment grid from a JSON config")
    s.add_argument("--config")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(ns).items()
              if k not in ("subcommand", "output", "format", "seed") and v is not None}
    return RunConfig(ns.subcommand, params, ns.output, ns.format, ns.seed)


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    return dispatch(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
