"""Command-line front end: ``digitprime <command> [options]``.

Every run writes a header record (version and config) followed by data
records, as JSON lines (default) or CSV.  Exit status is 0 on success,
2 on invalid arguments and 3 when the memory budget would be exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__
from .arith import DEFAULT_SEGMENT, N_MAX_DENSE, Kind, chebyshev_psi, prime_count, sieve_table, stream_windows
from .boolfn import apply_noise
from .budget import ENV_VAR, BudgetExceeded, check_alloc, default_max_mem, parse_size
from .digitclass import central_moment, digit_class_sums, max_central_class
from .expsum import (BilinearSumConfig, bilinear_sum, coefficient_preset, exp_sum, exp_sum_direct,
                     rational_scan, walsh_char_fourier_magnitude)
from .fitlab import (ExperimentRecord, fourier_decay_scan, majority_levels, spectral_decay_scan,
                     tails_scan, theorem1_scan, theorem2_scan)
from .walsh import fwht, level_weights, walsh_coefficient_streaming

EXIT_OK, EXIT_USAGE, EXIT_BUDGET = 0, 2, 3
FORMATS = ("json", "jsonl", "csv")


class UsageError(ValueError):
    pass


# --- argument parsing helpers -------------------------------------------------

def parse_int_list(text: str) -> list[int]:
    """``15,17,19`` or the inclusive range ``15:25:2``."""
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if ":" in part:
            bits = [int(b, 0) for b in part.split(":")]
            lo, hi, step = (bits + [1])[:3]
            out.extend(range(lo, hi + 1, step))
        elif part:
            out.append(int(part, 0))
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer list {text!r}")
    return out


def _float_token(tok: str) -> float:
    tok = tok.strip().lower()
    sign = -1.0 if tok.startswith("-") else 1.0
    tok = tok.lstrip("+-")
    if tok.endswith("pi"):
        head = tok[:-2].rstrip("*")
        return sign * (float(head) if head else 1.0) * math.pi
    return sign * float(tok)


def parse_float_list(text: str) -> list[float]:
    try:
        vals = [_float_token(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse number list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError(f"empty number list {text!r}")
    return vals


def _size(text: str) -> int:
    try:
        return parse_size(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", "--out", dest="format", choices=FORMATS, default="jsonl",
                        help="record format; json and jsonl both mean JSON lines")
    common.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")
    common.add_argument("--max-mem", type=_size, default=None,
                        help=f"memory budget in bytes (suffixes K/M/G); env {ENV_VAR}, default 4G")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--segment", type=int, default=DEFAULT_SEGMENT, help="sieve window size (power of 2)")
    common.add_argument("--plotdata", default=None, help="also write a whitespace table here")
    common.add_argument("--columns", default=None, help="comma-separated columns for --plotdata")

    p = _Parser(prog="digitprime", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"digitprime {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, helptext: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=helptext)

    c = add("sieve-stats", "psi, prime counts and Moebius statistics")
    c.add_argument("--n", type=parse_int_list, required=True)
    c.add_argument("--kind", default="vonMangoldt")

    c = add("spectrum", "Walsh coefficients of Lambda or mu")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--kind", default="vonMangoldt")
    c.add_argument("--masks", type=parse_int_list, default=None, help="default: every level-1 mask")
    c.add_argument("--rho", type=float, default=1.0, help="noise parameter applied as rho**|S|")
    c.add_argument("--stream", action="store_true", help="never build the dense table")

    c = add("levels", "level weights W_k")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--source", choices=("majority", "vonMangoldt", "moebius"), default="majority")
    c.add_argument("--k-max", type=int, default=None)

    c = add("classes", "digit-class sums s_k")
    c.add_argument("--n", type=int, required=True)

    c = add("tails", "tail mass beyond delta*sqrt(n) and central moments")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--delta", type=parse_float_list, default=[1.0, 1.5, 2.0, 2.5])
    c.add_argument("--moments", type=parse_int_list, default=None, help="central moment orders R")
    c.add_argument("--window", type=float, default=None, help="also report the max central class")
    c.add_argument("--fit", action="store_true")

    c = add("expsum", "S(lambda) = sum Lambda(x) exp(i lambda s(x))")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--lambda", dest="lam", type=parse_float_list, required=True)
    c.add_argument("--direct", action="store_true", help="also evaluate by a second streaming pass")

    c = add("ufourier", "max over xi of |U_lambda_hat(xi)|")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--lambda", dest="lam", type=parse_float_list, required=True)
    c.add_argument("--exhaustive", action="store_true")
    c.add_argument("--budget", type=int, default=1 << 20, help="sample budget when not exhaustive")

    c = add("type1", "Type-I / Type-II bilinear sums")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m1", type=int, required=True)
    c.add_argument("--lambda", dest="lam", type=parse_float_list, required=True)
    c.add_argument("--mode", choices=("typeI", "typeII"), default="typeI")
    c.add_argument("--preset", choices=("ones", "mu-lambda"), default="ones")

    c = add("rational", "best rational approximation of r / 2**m")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--r", type=parse_int_list, required=True)
    c.add_argument("--Q", type=int, required=True)
    c.add_argument("--mask", type=lambda s: int(s, 0), default=None,
                   help="also report |w_S hat(r)| for this Walsh mask")

    c = add("theorem1", "correlation of Lambda with majority")
    c.add_argument("--n", type=parse_int_list, required=True)
    c.add_argument("--fit", action="store_true")

    c = add("theorem2", "primes with prescribed low digits")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--r", type=parse_int_list, required=True)

    c = add("decay", "low-level Walsh decay of Lambda")
    c.add_argument("--n", type=parse_int_list, required=True)
    c.add_argument("--level-max", type=int, default=3)
    c.add_argument("--fit", action="store_true")
    return p


# --- commands ------------------------------------------------------------------

def _rec(experiment: str, params: dict, results: dict, wall: float = 0.0) -> ExperimentRecord:
    return ExperimentRecord(experiment, params, results, wall)


def _fit_record(experiment: str, fit) -> ExperimentRecord:
    if fit is None:
        return _rec(experiment, {}, {"model": None, "A": None, "exponent": None, "r2": None})
    d = fit.to_dict()
    d.pop("points")
    return _rec(experiment, {}, d)


def cmd_sieve_stats(a) -> list[ExperimentRecord]:
    kind = Kind.parse(a.kind)
    out = []
    for n in a.n:
        seg = min(a.segment, 1 << n)
        if kind is Kind.VON_MANGOLDT:
            psi = chebyshev_psi(n, seg, a.threads)
            out.append(_rec("sieve-stats", {"n": n, "kind": kind.value},
                            {"psi": psi, "psi_over_N": psi / (1 << n), "prime_count": prime_count(n, seg)}))
        else:
            nz, tot = stream_windows(
                n, kind, seg, lambda w: np.array([np.count_nonzero(w.values), w.values.sum()]),
                workers=a.threads)
            out.append(_rec("sieve-stats", {"n": n, "kind": kind.value},
                            {"squarefree_count": int(nz), "mertens": int(round(tot))}))
    return out


def cmd_spectrum(a) -> list[ExperimentRecord]:
    kind = Kind.parse(a.kind)
    if not 0.0 <= a.rho <= 1.0:
        raise UsageError("--rho must lie in [0, 1]")
    masks = a.masks if a.masks is not None else [1 << j for j in range(a.n)]
    for m in masks:
        if not 0 <= m < (1 << a.n):
            raise UsageError(f"mask {m} out of range for n={a.n}")
    if a.stream or a.n > N_MAX_DENSE:
        vals = {m: walsh_coefficient_streaming(a.n, kind, m, a.segment, a.threads) for m in masks}
        noised = {m: v * a.rho ** m.bit_count() for m, v in vals.items()}
        source = "stream"
    else:
        check_alloc(24 * (1 << a.n), a.max_mem, "dense spectrum")
        spec = fwht(sieve_table(a.n, kind, a.max_mem).values, a.max_mem)
        smooth = apply_noise(spec, a.rho)
        vals = {m: float(spec.coeffs[m]) for m in masks}
        noised = {m: float(smooth.coeffs[m]) for m in masks}
        source = "dense"
    return [_rec("spectrum", {"n": a.n, "kind": kind.value, "mask": m, "rho": a.rho},
                 {"level": m.bit_count(), "coeff": v, "noised": noised[m], "source": source})
            for m, v in vals.items()]


def cmd_levels(a) -> list[ExperimentRecord]:
    if a.source == "majority":
        return majority_levels(a.n, a.k_max)
    table = sieve_table(a.n, a.source, a.max_mem)
    W = level_weights(fwht(table.values, a.max_mem)).W
    k_max = a.n if a.k_max is None else min(a.k_max, a.n)
    return [_rec("levels", {"n": a.n, "k": k, "source": a.source},
                 {"weight": float(W[k]), "scaled": float(W[k]) * k ** 1.5}) for k in range(k_max + 1)]


def cmd_classes(a) -> list[ExperimentRecord]:
    sums = digit_class_sums(a.n, segment_size=a.segment, workers=a.threads)
    return [_rec("classes", {"n": a.n, "k": k},
                 {"s_k": float(sums.s[k]), "symmetrized": float(sums.s[k]) / math.comb(a.n, k)})
            for k in range(a.n + 1)]


def cmd_tails(a) -> list[ExperimentRecord]:
    sums = digit_class_sums(a.n, segment_size=a.segment, workers=a.threads)
    records, fit = tails_scan(sums, a.delta)
    for R in a.moments or []:
        m = central_moment(sums, R)
        records.append(_rec("moment", {"n": a.n, "R": R}, {"moment": m, "scaled": m / (a.n ** R * (1 << a.n))}))
    if a.window is not None:
        v = max_central_class(sums, a.window)
        records.append(_rec("central", {"n": a.n, "delta_window": a.window},
                            {"max_class": v, "scaled": v * math.sqrt(a.n)}))
    if a.fit:
        records.append(_fit_record("tails-fit", fit))
    return records


def cmd_expsum(a) -> list[ExperimentRecord]:
    sums = digit_class_sums(a.n, segment_size=a.segment, workers=a.threads)
    out = []
    for lam in a.lam:
        z = exp_sum(a.n, lam, sums)
        res = {"re": z.real, "im": z.imag, "abs": abs(z), "normalized": abs(z) / sums.psi}
        if a.direct:
            d = exp_sum_direct(a.n, lam, a.segment)
            res.update(direct_re=d.real, direct_im=d.imag)
        out.append(_rec("expsum", {"n": a.n, "lambda": lam}, res))
    return out


def cmd_ufourier(a) -> list[ExperimentRecord]:
    budget = max(1 << a.n, 1 << 12) if a.exhaustive else a.budget
    if a.exhaustive:
        check_alloc(64 * min(1 << a.n, 1 << 18), a.max_mem, "ufourier chunk")
    records, rho = fourier_decay_scan(a.n, a.lam, budget)
    for r in records:
        r.results["spearman_log_max_vs_lambda_sq"] = rho if len(records) > 1 else None
    return records


def cmd_type1(a) -> list[ExperimentRecord]:
    if a.mode == "typeII":
        ca, cb = coefficient_preset(a.n, a.m1, a.preset)
        cfg = BilinearSumConfig(a.n, a.m1, "typeII", ca, cb)
    else:
        cfg = BilinearSumConfig(a.n, a.m1)
    out = []
    for lam in a.lam:
        res = bilinear_sum(cfg, lam, a.max_mem)
        out.append(_rec("type1", {"n": a.n, "m1": a.m1, "lambda": lam, "mode": a.mode,
                                  "preset": a.preset if a.mode == "typeII" else None},
                        {"raw": res.raw, "normalized": res.normalized}))
    return out


def cmd_rational(a) -> list[ExperimentRecord]:
    out = []
    for r in a.r:
        if not 0 <= r < (1 << a.m):
            raise UsageError(f"r={r} out of range for m={a.m}")
        ra = rational_scan(a.m, r, a.Q)
        res: dict[str, Any] = {"a": ra.a, "q": ra.q, "theta": ra.theta}
        if a.mask is not None:
            res["walsh_magnitude"] = walsh_char_fourier_magnitude(a.m, a.mask, r)
        out.append(_rec("rational", {"m": a.m, "r": r, "Q": a.Q}, res))
    return out


def cmd_theorem1(a) -> list[ExperimentRecord]:
    records, fit = theorem1_scan(a.n, a.segment, a.threads)
    if a.fit:
        records.append(_fit_record("theorem1-fit", fit))
    return records


def cmd_theorem2(a) -> list[ExperimentRecord]:
    return [theorem2_scan(a.n, r, a.segment) for r in a.r]


def cmd_decay(a) -> list[ExperimentRecord]:
    records, fit = spectral_decay_scan(a.n, a.level_max, a.segment)
    if a.fit:
        records.append(_fit_record("decay-fit", fit))
    return records


COMMANDS = {
    "sieve-stats": cmd_sieve_stats, "spectrum": cmd_spectrum, "levels": cmd_levels,
    "classes": cmd_classes, "tails": cmd_tails, "expsum": cmd_expsum, "ufourier": cmd_ufourier,
    "type1": cmd_type1, "rational": cmd_rational, "theorem1": cmd_theorem1,
    "theorem2": cmd_theorem2, "decay": cmd_decay,
}


# --- output ---------------------------------------------------------------------

def _clean(v: Any) -> Any:
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def config_of(args: argparse.Namespace) -> dict[str, Any]:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",)}
    if cfg.get("max_mem") is None:
        cfg["max_mem"] = default_max_mem()
    return _clean(dict(sorted(cfg.items())))


def header_record(config: dict[str, Any]) -> dict[str, Any]:
    return {"record": "header", "version": __version__, "command": config["command"], "config": config}


def write_jsonl(records: Sequence[dict], config: dict, stream) -> None:
    stream.write(json.dumps(header_record(config)) + "\n")
    for r in records:
        stream.write(json.dumps({"record": "data", **_clean(r), "config": config}) + "\n")


def write_csv(records: Sequence[dict], config: dict, stream) -> None:
    """CSV rows; the header record (with the config) sits on a leading '#' line."""
    stream.write("# " + json.dumps(header_record(config)) + "\n")
    columns: list[str] = []
    for r in records:
        columns.extend(k for k in r if k not in columns)
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(columns)
    for r in records:
        w.writerow(["" if r.get(c) is None else r.get(c) for c in columns])


def read_records(lines: Iterable[str]) -> list[dict]:
    """Data records back from JSON lines (header lines are skipped)."""
    out = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        if rec.get("record") != "header":
            out.append(rec)
    return out


def emit_plotdata(records: Sequence[dict], columns: Sequence[str], stream) -> None:
    """Whitespace table of ``columns`` with a '#'-prefixed header line.

    Raises KeyError when a record lacks a requested column.
    """
    stream.write("# " + " ".join(columns) + "\n")
    for r in records:
        missing = [c for c in columns if c not in r]
        if missing:
            raise KeyError(f"record has no column(s) {', '.join(missing)}")
        stream.write(" ".join("nan" if r[c] is None else repr(_clean(r[c])) for c in columns) + "\n")


def _open(path: str):
    """(stream, close) for the output path; stdout is re-wrapped as UTF-8 with LF endings."""
    if path != "-":
        fh = open(path, "w", encoding="utf-8", newline="\n")
        return fh, fh.close
    buffer = getattr(sys.stdout, "buffer", None)
    if buffer is None:
        return sys.stdout, sys.stdout.flush
    wrapper = io.TextIOWrapper(buffer, encoding="utf-8", newline="\n", write_through=True)
    return wrapper, wrapper.detach


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.max_mem is None:
            args.max_mem = default_max_mem()
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        columns = [c.strip() for c in args.columns.split(",")] if args.columns else None
        if args.plotdata and not columns:
            raise UsageError("--plotdata needs --columns")
        records = [r.to_dict() for r in COMMANDS[args.command](args)]
        if args.plotdata:
            buf = io.StringIO()
            emit_plotdata(records, columns, buf)
        config = config_of(args)
        out, close = _open(args.output)
        try:
            (write_csv if args.format == "csv" else write_jsonl)(records, config, out)
        finally:
            close()
        if args.plotdata:
            with open(args.plotdata, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(buf.getvalue())
    except BudgetExceeded as exc:
        print(f"digitprime: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, ValueError, KeyError) as exc:
        parser.print_usage(sys.stderr)
        print(f"digitprime: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
