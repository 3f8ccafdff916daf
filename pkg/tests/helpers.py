import numpy as np

from pelemma import LtiSystem, delay_input
from pelemma.sweep import RandomModelSpec, generate_system


def random_system(seed, n=3, m=2, p=2, **kw) -> LtiSystem:
    return generate_system(RandomModelSpec(n, m, p, **kw), seed)


def random_dims(rng, n_max=5, mp_max=3, reachable=True):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, mp_max + 1))
    p = int(rng.integers(1, mp_max + 1))
    if reachable:
        p = min(p, m * (n + 1))
    return n, m, p


def relative_degree_system(rng, r, n0_max=3, mp_max=3):
    """Generic system with feedthrough, behind an r-step input delay."""
    n0 = int(rng.integers(1, n0_max + 1))
    m = int(rng.integers(1, mp_max + 1))
    p = int(rng.integers(1, mp_max + 1))
    p = min(p, m * (n0 + 1))
    base = generate_system(RandomModelSpec(n0, m, p, zero_feedthrough_prob=0.0), rng)
    return delay_input(base, r)


def multisine(rng, m, N, modes):
    """Sum of ``modes`` exponential modes (sinusoid pairs plus a constant when
    odd) with random vector amplitudes; its Hankel rank saturates at ``modes``."""
    t = np.arange(N)
    u = np.zeros((N, m))
    pairs = modes // 2
    freqs = np.linspace(0.3, 2.8, pairs) if pairs else []
    for w in freqs:
        u += np.outer(np.cos(w * t), rng.standard_normal(m))
        u += np.outer(np.sin(w * t), rng.standard_normal(m))
    if modes % 2:
        u += rng.standard_normal(m)
    return u
