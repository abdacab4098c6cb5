#!/usr/bin/env python3
"""Generate the frozen closed-form oracle grid.

Evaluates the value function, probability weighting function, binary-prospect
utility, and choice probability at 50 decimal digits with mpmath on a seeded
random grid, and writes the inputs together with the high-precision expected
values to crates/cli/tests/data/closed_form_oracle.json.

Sampling is constrained so that a correct double-precision implementation can
match the oracle to 1e-12 relative error: outcome magnitudes are modest and
near-cancelling utilities are rejection-sampled away. Regenerating with the
same seed reproduces the file byte for byte.
"""

import json
import random
from pathlib import Path

from mpmath import mp, mpf, exp, power

mp.dps = 50

SEED = 20260824
N_VALUE = 300
N_WEIGHT = 300
N_UTILITY = 250
N_CHOICE = 150

PARAM_MIN, PARAM_MAX = 0.01, 4.0


def fmt(v):
    return mp.nstr(v, 50, strip_zeros=False)


def value(x, sigma, lam):
    x, sigma, lam = mpf(x), mpf(sigma), mpf(lam)
    if x == 0:
        return mpf(0)
    if x > 0:
        return power(x, sigma)
    return -lam * power(-x, sigma)


def weight(p, gamma):
    p, gamma = mpf(p), mpf(gamma)
    if p == 0:
        return mpf(0)
    if p == 1:
        return mpf(1)
    pg = power(p, gamma)
    return pg / power(pg + power(1 - p, gamma), 1 / gamma)


def canonical(x, p, y, q):
    """Match the implementation's branch ordering: mixed signs put the loss
    first; same signs put the larger magnitude first (zero counts as gain)."""
    neg_x, neg_y = x < 0, y < 0
    if neg_x != neg_y:
        return (x, p, y, q) if neg_x else (y, q, x, p)
    return (x, p, y, q) if abs(x) > abs(y) else (y, q, x, p)


def utility(x, p, y, q, sigma, lam, gamma):
    x, p, y, q = canonical(x, p, y, q)
    vx, vy = value(x, sigma, lam), value(y, sigma, lam)
    if x < 0 <= y:
        return weight(p, gamma) * vx + weight(q, gamma) * vy
    return vy + weight(p, gamma) * (vx - vy)


def choice_probability(k, u, sigma, lam, gamma):
    d = utility(*k, sigma, lam, gamma) - utility(*u, sigma, lam, gamma)
    return 1 / (1 + exp(-d))


def sample_outcome(rng, lo, hi):
    mag = rng.uniform(lo, hi)
    return mag if rng.random() < 0.5 else -mag


def sample_prospect(rng, lo, hi):
    while True:
        x = sample_outcome(rng, lo, hi)
        y = sample_outcome(rng, lo, hi)
        # reject same-sign ties, which the implementation refuses
        if (x < 0) == (y < 0) and abs(abs(x) - abs(y)) < 1e-6:
            continue
        p = rng.uniform(0.02, 0.98)
        return canonical(x, p, y, 1.0 - p)


def main():
    rng = random.Random(SEED)
    grid = {
        "digits": 50,
        "seed": SEED,
        "value": [],
        "weight": [],
        "utility": [],
        "choice_probability": [],
    }

    for _ in range(N_VALUE):
        x = sample_outcome(rng, 0.05, 60.0)
        if rng.random() < 0.02:
            x = 0.0
        sigma = rng.uniform(PARAM_MIN, PARAM_MAX)
        lam = rng.uniform(PARAM_MIN, PARAM_MAX)
        grid["value"].append(
            {"x": x, "sigma": sigma, "lambda": lam, "expected": fmt(value(x, sigma, lam))}
        )

    for _ in range(N_WEIGHT):
        p = rng.uniform(0.005, 0.995)
        gamma = rng.uniform(PARAM_MIN + 0.09, PARAM_MAX)
        grid["weight"].append({"p": p, "gamma": gamma, "expected": fmt(weight(p, gamma))})

    made = 0
    while made < N_UTILITY:
        x, p, y, q = sample_prospect(rng, 0.5, 40.0)
        sigma = rng.uniform(0.1, 1.5)
        lam = rng.uniform(0.1, PARAM_MAX)
        gamma = rng.uniform(0.2, 3.0)
        u = utility(x, p, y, q, sigma, lam, gamma)
        scale = abs(value(x, sigma, lam)) + abs(value(y, sigma, lam))
        # near-total cancellation would make 1e-12 relative unreachable
        if scale > 0 and abs(u) < mpf("1e-2") * scale:
            continue
        grid["utility"].append(
            {
                "x": x,
                "p": p,
                "y": y,
                "q": q,
                "sigma": sigma,
                "lambda": lam,
                "gamma": gamma,
                "expected": fmt(u),
            }
        )
        made += 1

    made = 0
    while made < N_CHOICE:
        k = sample_prospect(rng, 0.5, 20.0)
        u = sample_prospect(rng, 0.5, 20.0)
        sigma = rng.uniform(0.2, 1.2)
        lam = rng.uniform(0.3, PARAM_MAX)
        gamma = rng.uniform(0.3, 2.5)
        pr = choice_probability(k, u, sigma, lam, gamma)
        grid["choice_probability"].append(
            {
                "option_k": list(k),
                "option_u": list(u),
                "sigma": sigma,
                "lambda": lam,
                "gamma": gamma,
                "expected": fmt(pr),
            }
        )
        made += 1

    out = Path(__file__).resolve().parent.parent / "crates/cli/tests/data/closed_form_oracle.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(grid, indent=1) + "\n")
    total = sum(len(grid[k]) for k in ("value", "weight", "utility", "choice_probability"))
    print(f"wrote {out} ({total} points)")


if __name__ == "__main__":
    main()
