"""Pinned-seed calibration runs whose outputs are frozen into the test suite.

Run once with ``python scripts/calibrate.py [name ...]``; prints one JSON line per run.
"""
from __future__ import annotations

import json
import math
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from oracles import naive_crossing  # noqa: E402

from hexiso import boundary_norm, cheeger, fpp, lattice, nearcrit, percolation, wulff


def run_sample():
    cfg = percolation.sample((0, 0, 64, 64), 0.7, 1)
    return {"open_count": int(cfg.bits.sum())}


def run_proxy():
    n, ok = 128, 0
    window = cheeger.cheeger_window(n)
    for s in range(100):
        try:
            percolation.infinite_cluster_proxy(percolation.sample(window, 0.7, s), lattice.square(n))
            ok += 1
        except percolation.ProxyUndefined:
            pass
    return {"successes": ok, "trials": 100}


def run_theta():
    e = percolation.theta_estimate(0.7, 128, 50, seed=0)
    return {"mean": e.mean, "stderr": e.stderr, "reps": 50}


def run_crossing():
    e = percolation.crossing_probability(0.5, 32, 2000, color=False, seed=0)
    window = percolation.window_for(0, 32, 0, 32, pad=2)
    hits = []
    for r in range(2000):
        cfg = percolation.sample(window, 0.5, 0, r)
        hits.append(naive_crossing(cfg.bits, cfg.x0, cfg.y0, 32, 32))
    agree = int(sum(int(a) == int(b) for a, b in zip(e.samples, hits)))
    return {"mean": e.mean, "stderr": e.stderr, "naive_mean": float(np.mean(hits)), "per_sample_agree": agree}


def run_mu():
    ns = fpp.mu_estimate(0.7, 0.0, 256, 200, 0)
    return {"mean": ns.mean, "stderr": ns.stderr}


def run_bypass():
    n, ok, bs = 400, 0, []
    window = boundary_norm.beta_window(n, 4)
    outcomes = []
    for s in range(100):
        cfg = percolation.sample(window, 0.8, s)
        try:
            r = boundary_norm.b_upper_bypass(cfg, n)
            ok += 1
            bs.append(r.b)
            outcomes.append(1)
        except (boundary_norm.EventFailure, percolation.ProxyUndefined):
            outcomes.append(0)
    return {"successes": ok, "trials": 100, "b_mean": float(np.mean(bs)), "outcomes": outcomes}


def run_cheeger_stability():
    cfg = percolation.sample(cheeger.cheeger_window(128), 0.8, 0, 0)
    proxy, _ = cheeger.box_cluster(cfg, 128)
    vals = [float(cheeger.cheeger_anneal(cfg, 128, proxy, seed=s).value) * 128 for s in range(4)]
    return {"scaled_values": vals, "rel_spread": (max(vals) - min(vals)) / min(vals)}


def run_cheeger_prediction():
    p, n = 0.8, 128
    th = percolation.theta_estimate(p, n, 20, seed=0)
    row = [fpp.mu_estimate(p, t, n, 50, 0).mean for t in nearcrit.sector_grid(3)]
    phi = wulff.phi_from_norm(wulff.DirectionalNorm.from_sector(row))
    pred = phi / (math.sqrt(2.0) * th.mean)
    cfg = percolation.sample(cheeger.cheeger_window(n), p, 0, 0)
    val = float(cheeger.cheeger_anneal(cfg, n, seed=0).value) * n
    return {"theta": th.mean, "mu_row": row, "phi": phi, "prediction": pred, "scaled": val,
            "factor": val / pred}


RUNS = {"sample": run_sample, "proxy": run_proxy, "theta": run_theta, "crossing": run_crossing,
        "mu": run_mu, "cheeger_stability": run_cheeger_stability,
        "cheeger_prediction": run_cheeger_prediction, "bypass": run_bypass}


if __name__ == "__main__":
    for name in sys.argv[1:] or list(RUNS):
        t0 = time.perf_counter()
        out = RUNS[name]()
        out["name"] = name
        out["seconds"] = round(time.perf_counter() - t0, 1)
        print(json.dumps(out), flush=True)
