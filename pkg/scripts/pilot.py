"""Seed pilot for the stochastic acceptance bands.

Runs the full pipeline (RGARCH data -> training -> rollout -> statistics) for
a range of seeds and writes one row per seed to pilot/pilot_results.csv.

    python scripts/pilot.py --seeds 20
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from qclvol import io, mfdfa, model, optim, preprocess, rgarch, stats

COLUMNS = [
    "seed",
    "c2_neg_1_20", "c2_mean_1_10", "tau_org", "r2_org",
    "sym_frac_in_band",
    "train_corr", "train_loss", "train_below_all_initial",
    "qcl_neg_1_10", "tau_qcl", "r2_qcl", "clamps",
    "h2_mean_org", "h2_mean_qcl", "acf1_org", "acf1_qcl",
    "dh_org", "width_org", "dh_qcl", "width_qcl",
]


def run(seed: int) -> list:
    n = 100_000
    org = rgarch.simulate(rgarch.PAPER_PARAMS, "exponential", n, seed=seed)
    cc = stats.cross_correlation(org.r, org.sigma2, 2, -100, 100)
    fit = stats.fit_exp_decay(cc, 1, 60)

    sym = rgarch.simulate(rgarch.RGarchParams(0.005, 0.11, 0.85, 0.0), "exponential", n, seed=seed)
    cs = stats.cross_correlation(sym.r, sym.sigma2, 2, -100, 100)
    in_band = float(np.mean(np.abs(cs.values) <= 3 / np.sqrt(n)))

    train = rgarch.simulate(rgarch.PAPER_PARAMS, "exponential", 1095, seed=seed)
    scaled, factors = preprocess.rescale(train)
    rep = optim.minimize(model.make_objective(scaled), optim.OptimConfig(seed=seed))
    fitted = model.fitted(rep.best_params, scaled)
    corr = float(np.corrcoef(fitted, scaled.sigma2[1:])[0, 1])
    below = all(rep.best_value < r.initial_value for r in rep.restarts)

    x0 = model.ModelInput(scaled.r[-1], scaled.sigma2[-1])
    pred = model.rollout(rep.best_params, x0, n, seed, scale=factors)
    cq = stats.cross_correlation(pred.rp, pred.v, 2, -100, 100)
    try:
        fq = stats.fit_exp_decay(cq, 1, 60)
        tau_q, r2_q = fq.tau, fq.r_squared
    except Exception:
        tau_q, r2_q = float("nan"), float("nan")

    row = [seed, int(np.sum(cc.window(1, 20) < 0)), float(cc.window(1, 10).mean()), fit.tau, fit.r_squared,
           in_band, corr, rep.best_value, below,
           int(np.sum(cq.window(1, 10) < 0)), tau_q, r2_q, pred.clamp_count]
    hs, acfs, mf = [], [], []
    for v in (org.sigma2, pred.v):
        dv = preprocess.log_increments(np.maximum(v, model.LOG_FLOOR))
        hs.append(float(np.mean([h for _, h in mfdfa.rolling_hurst(dv, 1095, 100)])))
        acfs.append(float(stats.autocorrelation(dv, 1)[1]))
        res = mfdfa.hurst(dv[:1095])
        mf += [res.h(-5) - res.h(5), res.alpha_width]
    return row + hs + acfs + mf


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--first", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "pilot" / "pilot_results.csv")
    ap.add_argument("--workers", type=int, default=4)
    args = ap.parse_args()
    seeds = list(range(args.first, args.first + args.seeds))
    with ProcessPoolExecutor(args.workers) as pool:
        rows = list(pool.map(run, seeds))
    io.write_csv(args.out, COLUMNS, [list(c) for c in zip(*rows)])
    arr = np.array([[float(x) for x in r] for r in rows])
    for i, name in enumerate(COLUMNS[1:], start=1):
        col = arr[:, i]
        print(f"{name:>24s}  min {np.nanmin(col):9.4f}  median {np.nanmedian(col):9.4f}  max {np.nanmax(col):9.4f}")


if __name__ == "__main__":
    main()
