"""Time the compiled kernels against the pure-numpy fallback.

Builds one realistic input per kernel, runs both backends on identical
pre-drawn randomness, and prints a small table. Usage:

    python3 benchmarks/bench_kernels.py [--steps 20000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from rollmc._kernels import _pykernels

try:
    from rollmc._kernels import _ckernels
except ImportError:
    _ckernels = None

from rollmc.config import RunConfig
from rollmc.harness import build_synthetic_football_run
from rollmc.models.lgm import LgmModel, desk_spec, lgm_simulate, reveal_schedule


def best_of(repeat, fn, *args):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def interval_sum_inputs(rng):
    n = 200_000
    return rng.exponential(size=n), rng.standard_normal((n, 4)), 50.0


def football_inputs(steps, rng):
    cfg = RunConfig().overridden(synth_teams=10, synth_seasons=2, synth_seed=5)
    model, events, _ = build_synthetic_football_run(cfg)
    for step, payload in events:
        model.advance(step, payload)
    value = model.initial_value(rng)
    pack = model._build_pack()
    nx = model.strength_count
    x = np.ascontiguousarray(value[:nx], dtype=float)
    theta = np.ascontiguousarray(value[nx:], dtype=float)
    draws = (
        rng.random(steps),
        rng.random(steps),
        rng.standard_normal((steps, pack["max_block"])),
        rng.standard_normal((steps, 2)),
        np.log(rng.random(steps)),
    )
    args = (
        pack["offsets"], pack["m_start"], pack["m_home"], pack["m_away"],
        pack["m_hg"], pack["m_ag"], pack["r_start"], pack["r_prev"],
        pack["r_cur"], pack["p_start"], pack["p_cur"], pack["prior"],
        pack["scales"],
    )
    loglik_args = (
        x, 0.0, 0.0,
        pack["m_home"], pack["m_away"],
        pack["m_hg"].astype(float), pack["m_ag"].astype(float), 0.0,
    )
    return x, theta, args, draws, loglik_args


def gibbs_inputs(steps, rng):
    spec = desk_spec()
    data_rng = np.random.default_rng(7)
    _, obs = lgm_simulate(spec, data_rng)
    model = LgmModel(spec)
    for step, payload in reveal_schedule(spec, obs):
        model.advance(step, payload)
    chol, mprev, mnext, cvecs = model._build_factors()
    traj = model.initial_value(rng).reshape(model.n_states, spec.dim)
    u_pick = rng.random(steps)
    z = rng.standard_normal((steps, spec.dim))
    return traj, chol, mprev, mnext, cvecs, u_pick, z


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=20_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled backend not built; showing the fallback alone")
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    rng = np.random.default_rng(0)

    w, g, b = interval_sum_inputs(rng)
    x0, th0, mh_args, draws, ll_args = football_inputs(args.steps, rng)
    gibbs = gibbs_inputs(args.steps, rng)

    cases = [
        ("batch_interval_sums", lambda k: k.batch_interval_sums(w, g, b)),
        ("football_loglik", lambda k: k.football_loglik(*ll_args)),
        (
            f"football_mh_chain ({args.steps} steps)",
            lambda k: k.football_mh_chain(x0.copy(), th0.copy(), *mh_args, *draws),
        ),
        (
            f"lgm_gibbs_chain ({args.steps} steps)",
            lambda k: k.lgm_gibbs_chain(gibbs[0].copy(), *gibbs[1:]),
        ),
    ]

    width = max(len(name) for name, _ in cases)
    header = f"{'kernel':<{width}}  " + "  ".join(f"{n:>10}" for n, _ in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    for name, call in cases:
        times = [best_of(args.repeat, call, impl) for _, impl in backends]
        row = f"{name:<{width}}  " + "  ".join(f"{t * 1e3:>8.2f}ms" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
