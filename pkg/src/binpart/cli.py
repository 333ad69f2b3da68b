"""Command-line driver: ``binpart generate | solve | lb | bench``.

Exit status is 0 on success, 2 for bad flags or unreadable input and 3 when
a solver produces a packing that fails validation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bounds import bound_report
from .core import Instance, format_size, read_bpx, to_fraction, write_bpx
from .cover import Packing, ScaleExceeded, validate_packing
from .generators import GenSpec, corpus_seeds
from .solvers import BASELINES, algorithm_b, bfd, exact_min_packing, ffd, heuristic_c

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3

ALGOS = ("nf", "ff", "bf", "nfd", "ffd", "bfd", "exact", "algob", "heurc")
NEEDS_EPS = ("algob", "heurc")

FIELDS = (
    "instance_id",
    "family",
    "n",
    "k",
    "algo",
    "epsilon",
    "seed",
    "bins",
    "lb_size",
    "lb_waste",
    "ratio",
    "c_star",
    "delta_star",
    "n_configs_used",
    "escalations",
    "fallback_flag",
    "runtime_ms",
    "error",
)

MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


class InvalidPacking(Exception):
    pass


# --- running one solver -------------------------------------------------

def _decimal(x: Fraction, places: int = 6) -> str:
    """Exact half-up rounding of a non-negative rational to fixed decimals."""
    scaled = (x.numerator * 10**places * 2 + x.denominator) // (2 * x.denominator)
    whole, rest = divmod(scaled, 10**places)
    return f"{whole}.{rest:0{places}d}"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return _decimal(x).rstrip("0")
    return str(x)


def run_solver(inst: Instance, algo: str, epsilon: Fraction | None, seed: int):
    """Solve and return ``(packing, diagnostics or None)``.

    Raises :class:`InvalidPacking` if the result does not validate.
    """
    try:
        if algo in BASELINES:
            p = BASELINES[algo](inst)
            if not validate_packing(inst, p).ok:
                raise InvalidPacking(f"{algo} produced an invalid packing")
            return p, None
        if algo == "exact":
            p = exact_min_packing(inst)
            if not validate_packing(inst, p).ok:
                raise InvalidPacking("exact produced an invalid packing")
            return p, None
        if algo == "algob":
            return algorithm_b(inst, epsilon)
        if algo == "heurc":
            return heuristic_c(inst, epsilon, seed=seed)
    except RuntimeError as exc:
        # the partitioning solvers validate internally
        raise InvalidPacking(str(exc)) from exc
    raise UsageError(f"unknown algorithm {algo!r}")


def make_record(instance_id: str, inst: Instance, algo: str, epsilon, seed: int, timing: bool) -> tuple[dict, Packing | None]:
    row = dict.fromkeys(FIELDS, "")
    row.update(
        instance_id=instance_id,
        family=inst.meta.get("family", ""),
        n=inst.n,
        k=inst.k,
        algo=algo,
        epsilon=_fmt(epsilon) if algo in NEEDS_EPS else "",
        seed=seed,
    )
    b = bound_report(inst)
    row.update(lb_size=b.lb_size, lb_waste=b.lb_waste)
    t0 = time.perf_counter()
    try:
        packing, diag = run_solver(inst, algo, epsilon, seed)
    except ScaleExceeded as exc:
        row["error"] = f"scale: {exc}"
        return row, None
    elapsed = time.perf_counter() - t0
    row["bins"] = packing.n_bins
    best = max(b.lb_size, b.lb_waste)
    row["ratio"] = _decimal(Fraction(packing.n_bins, best)) if best else ""
    if diag is not None:
        row.update(
            c_star=_fmt(diag.c_star),
            delta_star=_fmt(diag.delta_star),
            n_configs_used=_fmt(diag.n_configs_used),
            escalations=diag.escalations if algo == "heurc" else "",
            fallback_flag=_fmt(diag.fallback) if algo == "heurc" else "",
        )
    if timing:
        row["runtime_ms"] = f"{elapsed * 1000:.3f}"
    return row, packing


# --- output -------------------------------------------------------------

def _csv_text(rows: list[dict], fields=FIELDS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({f: r.get(f, "") for f in fields})
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _packing_text(p: Packing) -> str:
    lines = []
    for j in range(p.n_bins):
        items = " ".join(format_size(s) for s in p.bin_items(j))
        lines.append(f"{j}\t{format_size(p.fills()[j])}\t{items}")
    return "\n".join(lines) + ("\n" if lines else "")


def _load(path: str) -> Instance:
    try:
        return read_bpx(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _epsilon(args) -> Fraction | None:
    if args.epsilon is None:
        return None
    try:
        eps = to_fraction(args.epsilon)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad epsilon {args.epsilon!r}") from None
    if not 0 < eps < Fraction(1, 2):
        raise UsageError("epsilon must lie in (0, 1/2)")
    return eps


# --- subcommands --------------------------------------------------------

def cmd_generate(args) -> int:
    if args.family == "h":
        n = args.groups if args.groups is not None else args.n
        if n is None or args.l is None:
            raise UsageError("family h needs --l and --groups (or --n)")
        params = {"l": args.l}
    else:
        n = args.n
        if n is None or args.k is None:
            raise UsageError("family r needs --n and --k")
        params = {"k": args.k}
    if args.count < 0:
        raise UsageError("--count must be non-negative")
    out = Path(args.out) if args.out else None
    if out is None:
        raise UsageError("generate needs --out DIR")
    try:
        GenSpec(args.family, n, 0, **params).build()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out.mkdir(parents=True, exist_ok=True)
    seeds = corpus_seeds(args.seed, args.count)
    tag = f"{args.family}-{'l' if args.family == 'h' else 'k'}{next(iter(params.values()))}-n{n}"
    entries = []
    for i, s in enumerate(seeds):
        inst = GenSpec(args.family, n, s, **params).build()
        name = f"{tag}-{i:04d}.bpx"
        write_bpx(inst, str(out / name))
        entry = {"id": name[:-4], "file": name, "family": args.family, "n": n, **params, "seed": s}
        if "opt" in inst.meta:
            entry["opt"] = inst.meta["opt"]
        entries.append(entry)
    manifest = {"master_seed": args.seed, "count": args.count, "instances": entries}
    with open(out / MANIFEST, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_json_text(manifest))
    print(f"wrote {len(entries)} instances to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_solve(args) -> int:
    eps = _epsilon(args)
    if args.algo in NEEDS_EPS and eps is None:
        raise UsageError(f"--algo {args.algo} needs --epsilon")
    inst = _load(args.instance)
    row, packing = make_record(Path(args.instance).stem, inst, args.algo, eps, args.seed, args.timing)
    if args.emit_packing and packing is not None:
        with open(args.emit_packing, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_packing_text(packing))
    _emit(_json_text(row) if args.format == "json" else _csv_text([row]), args.out)
    if row["error"]:
        print(f"binpart solve: {row['error']}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_lb(args) -> int:
    inst = _load(args.instance)
    b = bound_report(inst)
    row = {
        "instance_id": Path(args.instance).stem,
        "n": inst.n,
        "k": inst.k,
        "total": _fmt(inst.total),
        "lb_size": b.lb_size,
        "f_max": _fmt(b.f_max),
        "lb_waste": b.lb_waste,
        "witness": " ".join(map(str, b.witness)),
    }
    if args.format == "json":
        _emit(_json_text(row), args.out)
    else:
        _emit(_csv_text([row], tuple(row)), args.out)
    return EXIT_OK


@dataclass(frozen=True)
class _Job:
    instance_id: str
    path: str
    algo: str
    epsilon: Fraction | None
    seed: int
    timing: bool


def _run_job(job: _Job) -> dict:
    try:
        inst = read_bpx(job.path)
    except (OSError, ValueError) as exc:
        row = dict.fromkeys(FIELDS, "")
        row.update(instance_id=job.instance_id, algo=job.algo, seed=job.seed, error=f"input: {exc}")
        return row
    try:
        row, _ = make_record(job.instance_id, inst, job.algo, job.epsilon, job.seed, job.timing)
    except InvalidPacking as exc:
        row = dict.fromkeys(FIELDS, "")
        row.update(instance_id=job.instance_id, algo=job.algo, seed=job.seed, error=f"invalid: {exc}")
    opt = inst.meta.get("opt")
    row["_opt"] = int(opt) if opt not in (None, "") else None
    if job.algo not in ("ffd", "bfd"):
        row["_ffd"] = ffd(inst).n_bins
        row["_bfd"] = bfd(inst).n_bins
    return row


def _corpus(path: str) -> list[tuple[str, str]]:
    root = Path(path)
    if root.is_file():
        return [(root.stem, str(root))]
    if not root.is_dir():
        raise UsageError(f"no such corpus: {path}")
    mf = root / MANIFEST
    if mf.exists():
        try:
            data = json.loads(mf.read_text(encoding="utf-8"))
            return [(e["id"], str(root / e["file"])) for e in data["instances"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"bad manifest {mf}: {exc}") from None
    return [(p.stem, str(p)) for p in sorted(root.glob("*.bpx"))]


def _quantile(sorted_vals, q):
    if not sorted_vals:
        return None
    i = min(len(sorted_vals) - 1, max(0, round(q * (len(sorted_vals) - 1))))
    return sorted_vals[i]


def summarize(rows: list[dict], target=Fraction(11, 10)) -> str:
    """Plain-text aggregate per algorithm."""
    lines = []
    for algo in sorted({r["algo"] for r in rows}):
        mine = [r for r in rows if r["algo"] == algo]
        good = [r for r in mine if not r["error"]]
        lines.append(f"[{algo}] runs={len(mine)} ok={len(good)} errors={len(mine) - len(good)}")
        if not good:
            continue
        ratios = sorted(Fraction(r["ratio"]) for r in good if r["ratio"] != "")
        qs = ", ".join(f"{q}:{float(_quantile(ratios, q)):.4f}" for q in (0, 0.25, 0.5, 0.75, 1))
        lines.append(f"  ratio quantiles  {qs}")
        hit = 0
        for r in good:
            ref = r.get("_opt") or max(r["lb_size"], r["lb_waste"])
            hit += r["bins"] <= target * ref
        lines.append(f"  bins <= {float(target):g} x reference  {hit}/{len(good)} ({hit / len(good):.1%})")
        if algo in NEEDS_EPS:
            cs = Counter(r["c_star"] for r in good)
            ns = Counter(r["n_configs_used"] for r in good)
            lines.append("  c_star  " + " ".join(f"{c}:{cs[c]}" for c in sorted(cs, key=_sort_key)))
            lines.append("  n_configs_used  " + " ".join(f"{c}:{ns[c]}" for c in sorted(ns, key=_sort_key)))
        if algo == "heurc":
            fb = sum(r["fallback_flag"] == "1" for r in good)
            lines.append(f"  fallback  {fb}/{len(good)}")
        for ref in ("ffd", "bfd"):
            key = f"_{ref}"
            if algo == ref or any(key not in r for r in good):
                continue
            w = sum(r["bins"] < r[key] for r in good)
            t = sum(r["bins"] == r[key] for r in good)
            lines.append(f"  vs {ref}  wins={w} ties={t} losses={len(good) - w - t}")
    return "\n".join(lines) + ("\n" if lines else "")


def _sort_key(v):
    return (v == "", int(v) if str(v).isdigit() else 0, str(v))


def cmd_bench(args) -> int:
    eps = _epsilon(args)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGOS:
            raise UsageError(f"unknown algorithm {a!r}")
        if a in NEEDS_EPS and eps is None:
            raise UsageError(f"{a} needs --epsilon")
    jobs = [_Job(iid, path, a, eps, args.seed, args.timing) for iid, path in _corpus(args.corpus) for a in algos]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_run_job, jobs))
    else:
        rows = [_run_job(j) for j in jobs]
    public = [{f: r.get(f, "") for f in FIELDS} for r in rows]
    _emit(_json_text(public) if args.format == "json" else _csv_text(public), args.out)
    text = summarize(rows)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    return EXIT_OK


# --- argument parsing ---------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (generate: output directory)")

    p = argparse.ArgumentParser(prog="binpart", description="Near-identical partitioning bin packing.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a random instance corpus")
    g.add_argument("--family", choices=("h", "r"), required=True)
    g.add_argument("--l", type=int, help="pieces per unit interval (family h)")
    g.add_argument("--groups", type=int, help="unit intervals per instance (family h)")
    g.add_argument("--n", type=int, help="items per instance (family r); alias of --groups for h")
    g.add_argument("--k", type=int, help="maximum distinct sizes (family r)")
    g.add_argument("--count", type=int, default=20, help="number of instances (default 20)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", parents=[common], help="solve one instance")
    s.add_argument("instance")
    s.add_argument("--algo", choices=ALGOS, required=True)
    s.add_argument("--epsilon")
    s.add_argument("--emit-packing", metavar="FILE", help="write the bins, one per line")
    s.add_argument("--timing", action="store_true", help="fill runtime_ms (not reproducible)")
    s.set_defaults(func=cmd_solve)

    lb = sub.add_parser("lb", parents=[common], help="lower bounds for one instance")
    lb.add_argument("instance")
    lb.set_defaults(func=cmd_lb)

    b = sub.add_parser("bench", parents=[common], help="run algorithms over a corpus")
    b.add_argument("corpus", help="directory with a manifest or .bpx files")
    b.add_argument("--algos", default="heurc,ffd,bfd")
    b.add_argument("--epsilon", default="0.1", help="for algob and heurc (default 0.1)")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--summary", metavar="FILE", help="write the summary here instead of stderr")
    b.add_argument("--timing", action="store_true", help="fill runtime_ms (not reproducible)")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"binpart {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidPacking as exc:
        print(f"binpart {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
