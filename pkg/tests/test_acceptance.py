"""Acceptance criteria, one test each, each printing a PASS/FAIL line.

Run standalone with ``python3 tests/test_acceptance.py``; under pytest the
lines are repeated in the terminal summary.
"""

import time

import pytest

from meanlab import batteries

CRITERIA = [
    ("cesaro-geometric", "series-cesaro-geometric",
     "|beta_n - 1/(1-a)| <= 4/((n+1)|1-a|^2) at n = 10^4, a in {-1, i, exp(2 pi i/7)}"),
    ("abel-extrapolation", "series-abel-extrapolation",
     "Abel sums 1/2 (1e-6), 1/4 (1e-5), 2 (1e-9)"),
    ("abel-cauchy-product", "series-abel-cauchy",
     "|Abel(c) - Abel(a)Abel(b)| <= 1e-5 on 100 random pairs and the geometric(-1) pair"),
    ("neumann-inversion", "spectral-neumann",
     "residual <= 1e-10 and tail bound on 200 contractions; nilpotent termination"),
    ("spectral-radius", "spectral-radius",
     "|gelfand - eigen radius| <= max(1e-2, 5/512) on 100 matrices; normal matrices exact"),
    ("operator-average", "spectral-operator-average",
     "||A_n|| <= 2||(I-x)^-1||/(n+1) for n <= 1000 on 50 unitaries; monotone after burn-in"),
    ("mean-ergodic", "spectral-mean-ergodic",
     "cyclic unitaries up to size 12: error <= 2||v|| size/(n+1) at n = 10^2, 10^3, 10^4"),
    ("weak-type-constant", "maximal-weak-type",
     "worst |{f*>lam}| lam / sum|f| <= 2 on 500 x 20, and Bernoulli transference n <= 8"),
    ("lp-constant", "maximal-lp",
     "worst sum f*^p / sum|f|^p <= 4p 2^(p-1)/(p-1), p in {1.5, 2, 3}; some ratio > 1"),
    ("covering-lemmas", "maximal-covering",
     "multiplicity <= 2 with union preserved; Vitali disjoint with 3B cover (1-D, 2-D, ultra)"),
    ("fejer-uniform", "fourier-fejer",
     "|sin| on m = 2048: sup error(256) <= 0.02 and <= sup error(16); Fejer(z, 9) = 0.9 z"),
    ("krylov-bogolyubov", "ergodic-krylov-bogolyubov",
     "defect <= 2/(n+1) on 100 systems; defect 0 for periodic starts at n+1 = 0 mod q"),
    ("dimension-scaling", "metric-dimension",
     "box dimension 1.00 +- 0.05 (|A| = 2, rho = 1/2, depths 8-16), 2.00 +- 0.10 at a = 1/2"),
    ("counting-measure", "ergodic-counting-measure",
     "L1 mass of the n-average = 1 and sup = 1/(n+1) exactly for n <= 1000"),
]

RESULTS: list[str] = []


def run_criterion(label, battery, claim):
    t0 = time.perf_counter()
    rep = batteries.run_battery(battery)
    dt = time.perf_counter() - t0
    status = "PASS" if rep.passed else "FAIL"
    line = f"{status} {label}: {claim} [{battery}, {len(rep.checks)} checks, {dt:.1f}s]"
    for c in rep.failures:
        line += f"\n    failed: {c.name}: {c.lhs!r} {c.rel} {c.rhs!r}"
    print(line, flush=True)
    RESULTS.append(line)
    return rep


@pytest.mark.parametrize("label,battery,claim", CRITERIA, ids=[c[0] for c in CRITERIA])
def test_acceptance(label, battery, claim):
    rep = run_criterion(label, battery, claim)
    assert rep.passed, "\n".join(f"{c.name}: {c.lhs!r} {c.rel} {c.rhs!r}" for c in rep.failures)


if __name__ == "__main__":
    import sys

    reps = [run_criterion(*c) for c in CRITERIA]
    n_pass = sum(r.passed for r in reps)
    print(f"{n_pass}/{len(reps)} acceptance criteria passed")
    sys.exit(0 if n_pass == len(reps) else 1)
