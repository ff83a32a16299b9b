"""Shared helpers for the test suite: seeded samplers and context factories."""

from __future__ import annotations

import cmath
import random

from elliptica.theta import Nome, ThetaContext


def make_ctx(p=0.0, *, p_max=0.9, truncation_eps=1e-18, guard_eps=1e-12):
    return ThetaContext(Nome(complex(p), p_max), truncation_eps, guard_eps)


def sample_annulus(rng: random.Random, lo=0.5, hi=2.0) -> complex:
    """Uniform modulus in [lo, hi], uniform phase."""
    r = rng.uniform(lo, hi)
    phi = rng.uniform(0.0, 2.0 * cmath.pi)
    return r * cmath.exp(1j * phi)


def sample_nome(rng: random.Random, max_mod=0.5) -> complex:
    r = rng.uniform(0.0, max_mod)
    phi = rng.uniform(0.0, 2.0 * cmath.pi)
    return r * cmath.exp(1j * phi)
