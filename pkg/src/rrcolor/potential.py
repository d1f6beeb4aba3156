"""Potential function over index states and its drift constants.

All quantities are exact :class:`~fractions.Fraction` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .state import IndexState


class GuaranteeUndefined(ValueError):
    """The closed-form drift constant has a zero denominator for this (k, max degree)."""


def _alpha(k: int, max_degree: int) -> Fraction:
    return Fraction(k - 1, max_degree)


def _eps_parts(k: int, max_degree: int) -> tuple[Fraction, Fraction]:
    D = max_degree
    a = _alpha(k, D)
    num = 2 * D * a * a - 7 * D * a - D + 3 * a - 1
    den = 3 * D * D * a - 3 * D * D + 2 * D * a * a - 4 * D * a - D + 3 * a + 2
    return num, den


def epsilon_bound(k: int, max_degree: int) -> Fraction:
    """Closed-form lower bound on the expected potential decrease per step."""
    if max_degree < 1 or k < 2:
        raise GuaranteeUndefined(f"need max degree >= 1 and k >= 2, got k={k}, max degree={max_degree}")
    num, den = _eps_parts(k, max_degree)
    if den == 0:
        raise GuaranteeUndefined(f"guarantee formula undefined for k={k}, max degree={max_degree}")
    return num / den


def guarantee_applies(k: int, max_degree: int) -> bool:
    """True when the linear expected run time bound is in force.

    Requires both parts of the epsilon quotient to be positive; for small
    alpha both are negative and the quotient's sign carries no meaning.
    """
    if max_degree == 0:
        return True
    if k < 2:
        return False
    num, den = _eps_parts(k, max_degree)
    return num > 0 and den > 0


def above_asymptotic_threshold(k: int, max_degree: int) -> bool:
    """Exact test of ``2*alpha**2 - 7*alpha - 1 > 0``, i.e. alpha above (7 + sqrt 57)/4."""
    if max_degree == 0:
        return True
    a = _alpha(k, max_degree)
    return 2 * a * a - 7 * a - 1 > 0


@dataclass(frozen=True)
class PotentialParams:
    k: int
    max_degree: int
    alpha: Fraction | None
    epsilon: Fraction
    w1: Fraction
    w2: Fraction

    @classmethod
    def for_graph(cls, k: int, max_degree: int) -> "PotentialParams":
        if max_degree == 0:
            # No edges: only ignored nodes ever occur and each step removes one.
            return cls(k, 0, None, Fraction(1), Fraction(1), Fraction(1))
        eps = epsilon_bound(k, max_degree)
        D = max_degree
        a = _alpha(k, D)
        w2 = Fraction(2, 3 * D - 1) * (a - 1 - eps * (a + 1))
        w1 = 1 + D * w2 + eps
        return cls(k, D, a, eps, w1, w2)

    def potential(self, xs: IndexState) -> Fraction:
        n_for, n_froz, n_ig, _ = xs.counts()
        return self.w1 * n_froz + self.w2 * n_for + n_ig


def potential(xs: IndexState, params: PotentialParams) -> Fraction:
    return params.potential(xs)
