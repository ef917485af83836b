"""Ready-made model instances.

``reference_system`` is the workhorse configuration used across the test
suite and the demos: mild expansion (mu = 1.02, so eps = 0.02), contraction
lam = 0.3, unit cubic coefficient and a flat seed arc at height 1/2.  The
other factories are small variations that exercise specific behaviours
(seed tilt, different modulus, gate violations).
"""

from __future__ import annotations

from .leaves import SeedArc
from .model import ModelSystem, SaddleSpec, TransitionSpec

__all__ = [
    "make_system",
    "reference_system",
    "tilted_system",
    "slow_system",
    "wide_expansion_system",
    "gate_breaker_system",
]


def make_system(
    *,
    lam: float = 0.3,
    mu: float = 1.02,
    a: float = 1.0,
    b: float = -1.0,
    c: float = 1.0,
    d: float = -1.0,
    e: float = 0.0,
    m0: int = 1,
    h1_terms=(),
    h2_terms=(),
    seed_coeffs=(0.5,),
    seed_domain=(-2.0, 2.0),
    chart_half_width: float = 2.0,
    uq_half_width: float = 0.3,
    ur_half_width: float = 0.3,
) -> ModelSystem:
    """Assemble a model instance; defaults give :func:`reference_system`."""
    return ModelSystem(
        SaddleSpec(lam, mu),
        TransitionSpec(a, b, c, d, e, m0, tuple(h1_terms), tuple(h2_terms)),
        SeedArc(tuple(seed_domain), tuple(seed_coeffs)),
        chart_half_width,
        uq_half_width,
        ur_half_width,
    )


def reference_system() -> ModelSystem:
    """The standard instance: lam = 0.3, mu = 1.02, flat seed at 1/2."""
    return make_system()


def tilted_system(tilt: float = 0.3) -> ModelSystem:
    """Standard instance with seed 0.5 * (1 + tilt * x).

    The tilt decays out of the return data only like |mu|^-n, so the c_n
    series approaches 1 very slowly; see the modulus tests.
    """
    return make_system(seed_coeffs=(0.5, 0.5 * tilt))


def slow_system() -> ModelSystem:
    """Same transition, weaker contraction (lam = 0.5): different modulus."""
    return make_system(lam=0.5)


def wide_expansion_system() -> ModelSystem:
    """mu = 1.2: the recurrence-time bound tau_1 * eps is no longer small,
    so the cascade refuses to start even though the expansion gate holds.
    The U(q) chart is widened so the eps = 0.2 return rectangle fits and the
    bound can actually be evaluated."""
    return make_system(mu=1.2, uq_half_width=1.0)


def gate_breaker_system() -> ModelSystem:
    """lam = 0.9, mu = 1.3: violates |mu|^(3/2) * |lam| < 1, the gate for
    every small-expansion construction."""
    return make_system(lam=0.9, mu=1.3)
