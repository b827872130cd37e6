"""Analytic error bounds for general nested (multi-qubit) sequences.

For ``m`` protected qubits all ``gamma = 4^m - 1`` non-identity coupling
channels are collapsed onto a single norm scale ``J1`` (their maximum), which
trades channel resolution for a closed two-parameter theory.  The sum of all
error-word weights is bounded by the entire function

    S_K(T) = gamma * e^(J0 T) * (e^(gamma J1 T) - e^(-J1 T)) / (gamma + 1),

whose Taylor tail past the sequence's minimum suppression order bounds the
total error-channel norm; the trace-norm distance bound is then
``Delta^2 + Delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .qdd_bounds import default_eps_grid
from .series import exp_series_tail

__all__ = [
    "NuddCouplings",
    "NuddBoundReport",
    "NuddSweepConfig",
    "gamma_factor",
    "d_min_for_orders",
    "s_error_sum",
    "s_identity_sum",
    "nudd_taylor_coeff",
    "nudd_g",
    "nudd_leading_term",
    "nudd_delta",
    "nudd_distance_bound",
    "nudd_eps_window",
    "nudd_sweep",
    "nudd_sweep_row",
    "preset_nudd_cells",
    "NUDD_SWEEP_COLUMNS",
]

_MAX_M = 31

NUDD_SWEEP_COLUMNS = ("epsilon", "m", "d_min", "eta", "Delta", "D_bound", "D_leading")


def gamma_factor(m: int) -> int:
    """Number of non-identity channels, 4^m - 1, as an exact integer.

    Rejects m outside 1..31: beyond that 4^m exceeds any simulable regime and
    would silently lose integer exactness in downstream floats.
    """
    if not 1 <= m <= _MAX_M:
        raise ValueError(f"qubit count m must be in 1..{_MAX_M}")
    return 4**m - 1


def d_min_for_orders(orders) -> int:
    """Guaranteed minimum suppression order of a nested schedule.

    This is the minimum of the *requested* per-level orders.  Levels with odd
    order carry an appended frame-closing pulse (an even pulse count), but the
    appended pulse sits at the interval end and cannot raise the suppression
    order: the guaranteed order of an odd-N level is still N.
    """
    orders = tuple(int(n) for n in orders)
    if not orders or any(n < 0 for n in orders):
        raise ValueError("orders must be a nonempty sequence of integers >= 0")
    if len(orders) % 2:
        raise ValueError("orders must pair a z and an x level per qubit")
    return min(orders)


@dataclass(frozen=True)
class NuddCouplings:
    """Dimensionful coupling summary: bath norm J0, collapsed error norm J1.

    ``epsilon = J0*T`` and ``eta = J1/J0`` are the dimensionless inputs of the
    bound; ``gamma = 4^m - 1`` counts the collapsed error channels.
    """

    m: int
    J0: float
    J1: float
    T: float

    def __post_init__(self) -> None:
        gamma_factor(self.m)
        if not (self.J0 > 0.0 and math.isfinite(self.J0)):
            raise ValueError("J0 must be finite and > 0")
        if not (self.J1 >= 0.0 and math.isfinite(self.J1)):
            raise ValueError("J1 must be finite and >= 0")
        if not (self.T >= 0.0 and math.isfinite(self.T)):
            raise ValueError("T must be finite and >= 0")

    @property
    def gamma(self) -> int:
        return gamma_factor(self.m)

    @property
    def epsilon(self) -> float:
        return self.J0 * self.T

    @property
    def eta(self) -> float:
        return self.J1 / self.J0


@dataclass(frozen=True)
class NuddBoundReport:
    """Distance-bound evaluation at one (m, d_min, epsilon, eta) point."""

    m: int
    d_min: int
    epsilon: float
    eta: float
    delta: float
    distance_bound: float
    leading_term: float


def s_error_sum(T: float, J0: float, J1: float, m: int) -> float:
    """Total error-weight bound S_K(T); zero at T = 0 and when J1 = 0."""
    g = gamma_factor(m)
    if T < 0:
        raise ValueError("T must be >= 0")
    return g * math.exp(J0 * T) * (math.exp(g * J1 * T) - math.exp(-J1 * T)) / (g + 1)


def s_identity_sum(T: float, J0: float, J1: float, m: int) -> float:
    """Identity-channel bound S_0(T); S_0 + S_K = exp((J0 + gamma*J1) T)."""
    g = gamma_factor(m)
    if T < 0:
        raise ValueError("T must be >= 0")
    return math.exp(J0 * T) * (math.exp(g * J1 * T) + g * math.exp(-J1 * T)) / (g + 1)


def nudd_taylor_coeff(k: int, J0: float, J1: float, m: int) -> float:
    """k-th Taylor coefficient p_k of S_K in T.

    p_k = gamma/(gamma+1) * ((J0 + gamma*J1)^k - (J0 - J1)^k) / k!; p_0 = 0
    and p_1 = gamma*J1.  Nonnegative for every k whenever gamma >= 1, since
    J0 + gamma*J1 >= |J0 - J1|.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    g = gamma_factor(m)
    c = g / (g + 1)
    return c * ((J0 + g * J1) ** k - (J0 - J1) ** k) / math.factorial(k)


def nudd_g(l: int, eta: float, m: int) -> float:
    """Dimensionless Taylor coefficient of S_K in epsilon.

    g_l = (1 - 4^-m) * ((1 + gamma*eta)^l - (1 - eta)^l) / l!; g_1 collapses
    to gamma*eta.  For large l at large gamma*eta prefer
    ``nudd_leading_term``, which folds epsilon into the powers before they
    can overflow.
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    g = gamma_factor(m)
    c = g / (g + 1)
    return c * ((1.0 + g * eta) ** l - (1.0 - eta) ** l) / math.factorial(l)


def nudd_leading_term(d_min: int, epsilon: float, eta: float, m: int) -> float:
    """Leading tail term g_{d_min+1} * eps^(d_min+1), evaluated overflow-safely."""
    g = gamma_factor(m)
    c = g / (g + 1)
    l = d_min + 1
    a = epsilon * (1.0 + g * eta)
    b = epsilon * (1.0 - eta)
    return c * (a**l - b**l) / math.factorial(l)


def nudd_delta(
    d_min: int, epsilon: float, eta: float, m: int, rel_tol: float = 1e-15
) -> float:
    """Tail Delta_{d_min} = sum_{l > d_min} g_l(eta, m) * eps^l, term by term."""
    if d_min < 0:
        raise ValueError("d_min must be >= 0")
    if epsilon < 0 or eta < 0:
        raise ValueError("epsilon and eta must be >= 0")
    if not 0.0 < rel_tol <= 1e-6:
        raise ValueError("rel_tol must be in (0, 1e-6]")
    if epsilon == 0.0 or eta == 0.0:
        return 0.0
    g = gamma_factor(m)
    c = g / (g + 1)
    rates = (epsilon * (1.0 + g * eta), epsilon * (1.0 - eta))
    weights = (c, -c)
    return exp_series_tail(rates, weights, d_min, rel_tol)


def nudd_distance_bound(
    d_min: int, epsilon: float, eta: float, m: int, rel_tol: float = 1e-15
) -> NuddBoundReport:
    """Trace-norm distance bound Delta^2 + Delta for a nested sequence."""
    delta = nudd_delta(d_min, epsilon, eta, m, rel_tol)
    return NuddBoundReport(
        m=m,
        d_min=d_min,
        epsilon=epsilon,
        eta=eta,
        delta=delta,
        distance_bound=delta * delta + delta,
        leading_term=nudd_leading_term(d_min, epsilon, eta, m),
    )


@dataclass(frozen=True)
class NuddSweepConfig:
    """Grid for a nested-bound sweep: epsilon grid x (m, d_min, eta) cells."""

    eps_grid: tuple[float, ...]
    cells: tuple[tuple[int, int, float], ...]
    rel_tol: float = 1e-15


def nudd_eps_window(
    eta: float, m: int, lo: float = 1e-4, hi: float = 1.0, points: int = 41
) -> tuple[float, ...]:
    """Epsilon grid rescaled into the representable regime for (eta, m).

    The tail sum behaves like exp(eps * (1 + gamma * eta)); for m = 10 and
    large eta that overflows doubles well before eps reaches 1.  Dividing the
    base grid by (1 + gamma * eta) keeps every cell of a preset sweep finite
    while preserving the grid shape, so curves for different eta panels stay
    comparable after rescaling the axis.
    """
    scale = 1.0 + gamma_factor(m) * eta
    return tuple(e / scale for e in default_eps_grid(lo, hi, points))


def preset_nudd_cells(name: str = "fig5") -> tuple[tuple[int, int, float], ...]:
    """Preset grid (fig5): m=10, eta panels {1e-4,1e-2,1,1e2}, d_min {5,10,20,40}."""
    if name != "fig5":
        raise ValueError(f"unknown preset {name!r}; expected fig5")
    return tuple(
        (10, d, eta) for eta in (1e-4, 1e-2, 1.0, 1e2) for d in (5, 10, 20, 40)
    )


def nudd_sweep_row(
    m: int, d_min: int, eps: float, eta: float, rel_tol: float = 1e-15
) -> dict:
    """One grid point of a nested-bound sweep, keyed by ``NUDD_SWEEP_COLUMNS``."""
    rep = nudd_distance_bound(d_min, eps, eta, m, rel_tol)
    return {
        "epsilon": eps,
        "m": m,
        "d_min": d_min,
        "eta": eta,
        "Delta": rep.delta,
        "D_bound": rep.distance_bound,
        "D_leading": rep.leading_term,
    }


def nudd_sweep(config: NuddSweepConfig) -> list[dict]:
    """Evaluate the nested bound over a grid; CSV-ready rows (NUDD_SWEEP_COLUMNS)."""
    return [
        nudd_sweep_row(m, d_min, eps, eta, config.rel_tol)
        for m, d_min, eta in config.cells
        for eps in config.eps_grid
    ]
