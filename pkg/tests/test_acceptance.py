"""Acceptance checks, one test per criterion.

Each test prints a single ``CRITERION n: PASS|FAIL`` line (visible even
under output capture) before asserting.  Run directly with
``python tests/test_acceptance.py`` for just the seven lines.
"""

from __future__ import annotations

import contextlib
import io
import sys
import time
from fractions import Fraction as F
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from binpart import cli  # noqa: E402
from binpart.bounds import bound_report  # noqa: E402
from binpart.configs import build_kpg, delta_feasible, enumerate_configs, prune_useless, sample_configs  # noqa: E402
from binpart.core import SizeGrid, build_instance, distribution_vector, segment  # noqa: E402
from binpart.cover import CoverError, Demand, min_cover, validate_packing  # noqa: E402
from binpart.generators import corpus_seeds, generate_h, generate_r  # noqa: E402
from binpart.solvers import (  # noqa: E402
    algorithm_b,
    best_fit,
    bfd,
    exact_min_packing,
    ffd,
    first_fit,
    heuristic_c,
    next_fit,
    nfd,
)
from oracles import configs_oracle, min_cover_oracle, opt_bins_oracle  # noqa: E402

EPS = F(1, 10)
BASELINES = {"nf": next_fit, "ff": first_fit, "bf": best_fit, "nfd": nfd, "ffd": ffd, "bfd": bfd}


def report(request, n: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    capman = request.config.pluginmanager.getplugin("capturemanager") if request else None
    ctx = capman.global_and_fixture_disabled() if capman else contextlib.nullcontext()
    with ctx:
        print("\n" + line, flush=True)


def example1():
    return build_instance([("0.21", 1200), ("0.27", 600), ("0.29", 600), ("0.52", 600)])


def example2():
    return build_instance([("0.60", 1000), ("0.65", 1000), ("0.75", 1000)])


# --- shared corpora ------------------------------------------------------

@lru_cache(maxsize=None)
def h_corpus():
    """20 instances per l in {3, 4, 5}, 100 unit intervals each."""
    out = []
    for l in (3, 4, 5):
        for i, s in enumerate(corpus_seeds(20260 + l, 20)):
            out.append((f"h{l}-{i:02d}", generate_h(100, l, s)))
    return tuple(out)


@lru_cache(maxsize=None)
def r_corpus():
    out = []
    for i, s in enumerate(corpus_seeds(7070, 20)):
        k = 6 + i % 10
        out.append((f"r{k}-{i:02d}", generate_r(300, k, s)))
    return tuple(out)


@lru_cache(maxsize=None)
def small_corpus():
    """100 random instances of at most 12 items on the 1/20 grid."""
    rng = np.random.default_rng(4242)
    out = []
    for i in range(100):
        n = int(rng.integers(1, 13))
        units = rng.integers(1, 21, size=n)
        out.append((f"s{i:03d}", build_instance([(F(int(x), 20), 1) for x in units], SizeGrid(20))))
    return tuple(out)


@lru_cache(maxsize=None)
def heuristic_runs():
    return tuple((iid, inst, heuristic_c(inst, EPS, seed=0)) for iid, inst in h_corpus())


# --- criteria ------------------------------------------------------------

def test_criterion_1_example1(request):
    inst = example1()
    d = distribution_vector(inst)
    seg = segment(d, 15)
    golden = (
        d.components == (252, 162, 174, 312)
        and d.length == 900
        and seg.components == (F("4.2"), F("2.7"), F("2.9"), F("5.2"))
        and d.length / 15 == 60
    )
    t0 = time.perf_counter()
    pb, _ = algorithm_b(inst, EPS)
    slowest = time.perf_counter() - t0
    hc = []
    for seed in range(10):
        t0 = time.perf_counter()
        p, _ = heuristic_c(inst, EPS, seed=seed)
        slowest = max(slowest, time.perf_counter() - t0)
        hc.append(p.n_bins)
    good = sum(b <= 990 for b in hc)
    ok = golden and pb.n_bins == 900 and good >= 9 and slowest < 10
    report(request, 1, ok, f"golden={golden} algob={pb.n_bins} heurc<=990 on {good}/10 seeds {hc} slowest={slowest:.2f}s")
    assert ok


def test_criterion_2_example2(request):
    inst = example2()
    d = distribution_vector(inst)
    sizes = ["0.60", "0.65", "0.75"]
    empty = all(len(enumerate_configs(sizes, x)) == 0 for x in ("0.1", "0.2"))
    feas = (not delta_feasible(sizes, "0.3")) and delta_feasible(sizes, "0.4")
    p, diag = heuristic_c(inst, EPS, seed=0)
    b = bound_report(inst)
    ok = (
        d.components == (600, 650, 750)
        and d.length == 2000
        and empty
        and feas
        and p.n_bins == 3000
        and diag.delta_star == F(2, 5)
        and b.lb_waste == 2667
        and b.lb_size == 2000
    )
    report(
        request, 2, ok,
        f"|d|={d.length} e_0.1,e_0.2 empty={empty} infeasible@0.3/feasible@0.4={feas} "
        f"heurc={p.n_bins} delta*={diag.delta_star} lb_waste={b.lb_waste} lb_size={b.lb_size}",
    )
    assert ok


def test_criterion_3_oracle_equivalence(request):
    rng = np.random.default_rng(3)
    kpg_bad = 0
    for _ in range(200):
        k = int(rng.integers(1, 5))
        units = sorted(rng.choice(np.arange(1, 21), size=k, replace=False).tolist())
        counts = [int(c) for c in rng.integers(1, 6, size=k)]
        inst = build_instance([(F(u, 20), c) for u, c in zip(units, counts)], SizeGrid(20))
        for x in range(1, 6):
            delta = F(x, 10)
            got = prune_useless(build_kpg(inst, delta)).configurations().as_set()
            kpg_bad += got != configs_oracle(list(inst.sizes), list(inst.caps), delta)

    exact_bad = 0
    for _, inst in small_corpus():
        items = [s for s, c in zip(inst.sizes, inst.counts) for _ in range(c)]
        p = exact_min_packing(inst)
        exact_bad += (not validate_packing(inst, p).ok) or p.n_bins != opt_bins_oracle(items)

    cover_bad = 0
    sizes = ["0.15", "0.25", "0.35", "0.45", "0.6"]
    g = prune_useless(build_kpg(sizes, "0.2"))
    done = 0
    crng = np.random.default_rng(33)
    while done < 50:
        cs = sample_configs(g, int(crng.integers(3, 9)), crng, weighted=True)
        q = [int(x) for x in crng.integers(0, 3, size=len(sizes))]
        want = min_cover_oracle(q, cs.count_vectors(), 6)
        try:
            got = min_cover(Demand.from_counts(sizes, q), cs).size
        except CoverError:
            got = None
        if want is None and (got is None or got > 6):
            continue  # beyond the oracle's reach; not counted
        cover_bad += got != want
        done += 1
    ok = kpg_bad == exact_bad == cover_bad == 0
    report(request, 3, ok, f"kpg mismatches={kpg_bad}/1000 exact mismatches={exact_bad}/100 cover mismatches={cover_bad}/50")
    assert ok


def test_criterion_4_hard_instances(request):
    runs = heuristic_runs()
    within = sum(p.n_bins <= 110 for _, _, (p, _) in runs)
    ok_runs = [d for _, _, (_, d) in runs if not d.fallback]
    diag_ok = all(d.c_star is not None and d.c_star <= 20 and d.n_configs_used <= 25 for d in ok_runs)
    small = sum(d.c_star < 10 and d.n_configs_used < 10 for d in ok_runs)
    per_l = {}
    for iid, _, (p, _) in runs:
        per_l.setdefault(iid[:2], []).append(p.n_bins <= 110)
    frac = within / len(runs)
    ok = frac >= 0.8 and diag_ok
    detail = " ".join(f"l={k[1]}:{sum(v)}/{len(v)}" for k, v in sorted(per_l.items()))
    report(
        request, 4, ok,
        f"bins<=110 on {within}/{len(runs)} ({frac:.0%}) [{detail}] fallback={len(runs) - len(ok_runs)} "
        f"c*<=20,N<=25 on all non-fallback runs={diag_ok} (c<10 and N<10: {small}, reported only)",
    )
    assert ok


def test_criterion_5_baselines(request):
    viol = 0
    checked = 0
    invalid = 0
    below = 0
    for _, inst in small_corpus():
        opt = exact_min_packing(inst).n_bins
        for f in (ffd, bfd):
            checked += 1
            viol += f(inst).n_bins > F(11, 9) * opt + 1
    for _, inst in h_corpus():
        opt = 100  # by construction
        for f in (ffd, bfd):
            checked += 1
            viol += f(inst).n_bins > F(11, 9) * opt + 1
    for _, inst in small_corpus() + h_corpus() + r_corpus():
        lb = bound_report(inst).lb_waste
        for f in BASELINES.values():
            p = f(inst)
            invalid += not validate_packing(inst, p).ok
            below += p.n_bins < lb
    ok = viol == invalid == below == 0
    report(request, 5, ok, f"11/9 OPT+1 violations={viol}/{checked} invalid baseline packings={invalid} below lb_waste={below}")
    assert ok


def test_criterion_6_bound_validity(request):
    viol = 0
    rows = 0
    cached = {iid: res for iid, _, res in heuristic_runs()}
    for iid, inst in small_corpus() + h_corpus() + r_corpus():
        b = bound_report(inst)
        viol += b.lb_waste < b.lb_size
        results = [f(inst).n_bins for f in BASELINES.values()]
        results.append(algorithm_b(inst, EPS)[0].n_bins)
        results.append((cached[iid] if iid in cached else heuristic_c(inst, EPS, seed=0))[0].n_bins)
        if inst.n <= 60:
            results.append(exact_min_packing(inst).n_bins)
        rows += len(results)
        viol += sum(r < b.lb_waste for r in results)
    ok = viol == 0
    report(request, 6, ok, f"violations={viol} over {rows} solver runs on {len(small_corpus() + h_corpus() + r_corpus())} instances")
    assert ok


def _cli_bytes(argv, out_path: Path | None = None) -> bytes:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = cli.main(argv)
    assert code == 0, argv
    if out_path is not None:
        return out_path.read_bytes()
    return buf.getvalue().encode()


def _tree_bytes(root: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


def test_criterion_7_determinism(request, tmp_path):
    same = []
    for fam in (["--family", "h", "--l", "4", "--groups", "50"], ["--family", "r", "--n", "500", "--k", "8"]):
        a, b = tmp_path / f"{fam[1]}a", tmp_path / f"{fam[1]}b"
        _cli_bytes(["generate", *fam, "--count", "4", "--seed", "11", "--out", str(a)])
        _cli_bytes(["generate", *fam, "--count", "4", "--seed", "11", "--out", str(b)])
        same.append(_tree_bytes(a) == _tree_bytes(b))
    corpus = tmp_path / "ha"
    bench = ["bench", str(corpus), "--algos", "heurc,algob,ffd,bfd,nf", "--epsilon", "0.1", "--seed", "2"]
    for fmt in ("csv", "json"):
        x = _cli_bytes(bench + ["--format", fmt])
        y = _cli_bytes(bench + ["--format", fmt])
        same.append(x == y and len(x) > 0)
    inst_file = str(sorted(corpus.glob("*.bpx"))[0])
    for argv in (["solve", inst_file, "--algo", "heurc", "--epsilon", "0.1", "--seed", "5"], ["lb", inst_file]):
        same.append(_cli_bytes(argv) == _cli_bytes(argv))
    ok = all(same)
    report(request, 7, ok, f"identical outputs on {sum(same)}/{len(same)} repeated commands")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
