"""Shared test helpers."""

from rocsbb.core import ThreeGroupSample

# PASS/FAIL lines from the acceptance suite, printed in the terminal summary.
ACCEPTANCE_LINES = []


def random_sample(rng, max_n=10, ties=False):
    sizes = rng.integers(1, max_n + 1, size=3)
    if ties:
        return ThreeGroupSample(*(rng.integers(0, 6, size=n).astype(float) for n in sizes))
    return ThreeGroupSample(*(rng.normal(loc=k, size=n) for k, n in enumerate(sizes)))
