"""Transform oracles for every sampler, plus the logarithmic shot-noise truncation check."""

import argparse
import math

from stgneiting import distributions as dist
from stgneiting import oracles
from stgneiting.rng import RngStream


def truncation_check(a: float, lam: float, eps: float, n: int, seed: int) -> str:
    n0 = dist.truncation_order(lam, eps)
    gen = RngStream(seed, 1).generator()
    t = dist.sample_poisson_times_logintensity(a, lam, eps, gen, size=n)
    var = gen.laplace(0.0, 1.0 / t).sum(axis=1).var()
    want = lam / a ** 2 * (1 - (lam / (lam + 2)) ** n0)
    return f"a={a:g} lam={lam:g} eps={eps:g}: n0={n0} var={var:.5f} predicted={want:.5f} ({var / want - 1:+.2%})"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--draws", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cases = oracles.full_suite(args.draws, args.seed)
    print(oracles.summarize(cases), end="")
    print(f"tolerance 4/sqrt(n) = {4 / math.sqrt(args.draws):.5f}; all passed: {oracles.suite_passed(cases)}")
    for lam in (1.0, 5.0):
        print(truncation_check(2.06, lam, 0.01, args.draws, args.seed))


if __name__ == "__main__":
    main()
