"""Exact nested integrals of switching-function products, and order certification.

Every term of the time-ordered expansion of the toggling-frame evolution is
indexed by a word over the letters {0, x, y, z}; its scalar coefficient is the
nested integral

    f_word = int_0^1 ds_n f_{a_n}(s_n) int_0^{s_n} ds_{n-1} f_{a_{n-1}} ... ,

with the first letter innermost.  Since every switching function is piecewise
+-1 the integrand at each stage is a piecewise polynomial, which this module
integrates stage by stage in exact arithmetic.  A word's error channel is
fixed by the parities of its x/y/z letter counts; a sequence's claimed
suppression order for a channel is certified by showing every word of that
channel up to the order integrates to zero.

Two arithmetic backends: exact ``Fraction`` rationals whenever every
breakpoint is rational (inner/outer orders <= 2), and 50-digit ``mpmath``
otherwise ("zero" then means below a threshold, default 1e-25).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath as mp

from .qdd_bounds import DecouplingOrders, decoupling_orders
from .sequences import _nested_pulse_times

__all__ = [
    "LETTERS",
    "Word",
    "word_parities",
    "word_channel",
    "PiecewisePoly",
    "QddProfiles",
    "qdd_profiles",
    "word_integral",
    "verify_orders",
    "OrderCertification",
    "parity_class_counts",
    "DEFAULT_MAX_DEPTH",
    "DEFAULT_ZERO_TOL",
    "DEFAULT_WITNESS_TOL",
]

LETTERS = ("0", "x", "y", "z")
Word = tuple[str, ...]

DEFAULT_MAX_DEPTH = 6
DEFAULT_ZERO_TOL = 1e-25
DEFAULT_WITNESS_TOL = 1e-12
DEFAULT_DPS = 50

_CHANNEL_OF_PARITY = {
    (0, 0, 0): "identity",
    (0, 0, 1): "z",
    (0, 1, 0): "y",
    (0, 1, 1): "x",
    (1, 0, 0): "x",
    (1, 0, 1): "y",
    (1, 1, 0): "z",
    (1, 1, 1): "identity",
}

# sin^2(j*pi/(2N+2)) is rational only for orders 0..2; exact table by (N, j).
_RATIONAL_SIN_SQ = {
    0: (Fraction(0), Fraction(1)),
    1: (Fraction(0), Fraction(1, 2), Fraction(1)),
    2: (Fraction(0), Fraction(1, 4), Fraction(3, 4), Fraction(1)),
}


def word_parities(word: Sequence[str]) -> tuple[int, int, int]:
    """Letter-count parities (p_x, p_y, p_z); the letter '0' never counts."""
    for a in word:
        if a not in LETTERS:
            raise ValueError(f"invalid letter {a!r}; expected one of {LETTERS}")
    return (
        sum(1 for a in word if a == "x") % 2,
        sum(1 for a in word if a == "y") % 2,
        sum(1 for a in word if a == "z") % 2,
    )


def word_channel(word: Sequence[str]) -> str:
    """Error channel ('identity', 'x', 'y', 'z') a word contributes to.

    Determined by the parity triple alone: equal parities give the identity;
    otherwise the unique Pauli whose conjugation signature matches.
    """
    return _CHANNEL_OF_PARITY[word_parities(word)]


def parity_class_counts(n: int) -> dict[str, int]:
    """Number of length-n words over the four letters mapping to each channel."""
    counts = {(0, 0, 0): 1}
    for _ in range(n):
        nxt: dict[tuple[int, int, int], int] = {}
        for par, c in counts.items():
            for flip in ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)):
                key = tuple(p ^ f for p, f in zip(par, flip))
                nxt[key] = nxt.get(key, 0) + c
        counts = nxt
    out = {"identity": 0, "x": 0, "y": 0, "z": 0}
    for par, c in counts.items():
        out[_CHANNEL_OF_PARITY[par]] += c
    return out


def _sin_sq_rational(j: int, n: int) -> Fraction:
    try:
        return _RATIONAL_SIN_SQ[n][j]
    except KeyError:
        raise ValueError(
            f"rational backend supports orders <= 2 only (got order {n})"
        ) from None


def _sin_sq_mp(j: int, n: int):
    if j == 0:
        return mp.mpf(0)
    if j == n + 1:
        return mp.mpf(1)
    return mp.sin(mp.pi * j / (2 * n + 2)) ** 2


@dataclass(frozen=True)
class _ExactProfile:
    """Piecewise +-1 switching function with backend-typed breakpoints."""

    points: tuple
    signs: tuple[int, ...]


@dataclass(frozen=True)
class PiecewisePoly:
    """Piecewise polynomial on [0, 1]: global-variable coefficients per interval.

    ``coeffs[i]`` are ascending-power coefficients valid on
    ``[points[i], points[i+1])``; after each integration stage the pieces are
    continuous across interior breakpoints.
    """

    points: tuple
    coeffs: tuple[tuple, ...]


@dataclass(frozen=True)
class QddProfiles:
    """The four switching functions of a quadratic sequence, exact breakpoints."""

    backend: str
    n1: int
    n2: int
    channels: Mapping[str, _ExactProfile]
    zero: object
    one: object
    dps: int = DEFAULT_DPS


def _alternating(nflips: int) -> tuple[int, ...]:
    return tuple(1 - 2 * (k % 2) for k in range(nflips + 1))


def _profile_from_flips(flips: Sequence, zero, one) -> _ExactProfile:
    return _ExactProfile((zero, *flips, one), _alternating(len(flips)))


def _product_profile(pa: _ExactProfile, pb: _ExactProfile) -> _ExactProfile:
    """Pointwise product; breakpoints are the exact-equality union."""
    merged = _merge_points(pa.points, pb.points)
    signs = []
    ia = ib = 0
    for a in merged[:-1]:
        while pa.points[ia + 1] <= a:
            ia += 1
        while pb.points[ib + 1] <= a:
            ib += 1
        signs.append(pa.signs[ia] * pb.signs[ib])
    return _ExactProfile(merged, tuple(signs))


def _merge_points(p1: Sequence, p2: Sequence) -> tuple:
    out = []
    i = j = 0
    while i < len(p1) or j < len(p2):
        if j >= len(p2) or (i < len(p1) and p1[i] <= p2[j]):
            v = p1[i]
            i += 1
            if j < len(p2) and p2[j] == v:
                j += 1
        else:
            v = p2[j]
            j += 1
        out.append(v)
    return tuple(out)


def qdd_profiles(
    n1: int,
    n2: int,
    backend: str = "auto",
    dps: int = DEFAULT_DPS,
) -> QddProfiles:
    """Build exact-arithmetic switching functions for the quadratic sequence.

    ``backend="auto"`` picks exact rationals when both orders are <= 2 and
    50-digit floats otherwise.
    """
    if n1 < 0 or n2 < 0:
        raise ValueError("orders must be >= 0")
    if backend == "auto":
        backend = "rational" if max(n1, n2) <= 2 else "mp"
    if backend == "rational":
        sin_sq = _sin_sq_rational
        zero, one = Fraction(0), Fraction(1)
        events = _nested_pulse_times((n1, n2), sin_sq, zero, one)
    elif backend == "mp":
        sin_sq = _sin_sq_mp
        with mp.workdps(dps):
            zero, one = mp.mpf(0), mp.mpf(1)
            events = _nested_pulse_times((n1, n2), sin_sq, zero, one)
    else:
        raise ValueError("backend must be 'rational', 'mp', or 'auto'")
    z_flips = sorted(t for t, level in events if level == 1 and t < one)
    x_flips = sorted(t for t, level in events if level == 2 and t < one)
    f_0 = _ExactProfile((zero, one), (1,))
    f_x = _profile_from_flips(z_flips, zero, one)
    f_z = _profile_from_flips(x_flips, zero, one)
    f_y = _product_profile(f_x, f_z)
    return QddProfiles(
        backend=backend,
        n1=n1,
        n2=n2,
        channels={"0": f_0, "x": f_x, "y": f_y, "z": f_z},
        zero=zero,
        one=one,
        dps=dps,
    )


def _poly_eval(coeffs: Sequence, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _integrate_stage(g: PiecewisePoly, f: _ExactProfile, zero):
    """One nested-integral step: G'(s) = int_0^s f(u) G(u) du.

    Returns the new piecewise polynomial and its value at s = 1.
    """
    pts = _merge_points(g.points, f.points)
    out_coeffs = []
    acc = zero
    gi = fi = 0
    for idx in range(len(pts) - 1):
        a = pts[idx]
        b = pts[idx + 1]
        while g.points[gi + 1] <= a:
            gi += 1
        while f.points[fi + 1] <= a:
            fi += 1
        sign = f.signs[fi]
        anti = [zero]
        for k, c in enumerate(g.coeffs[gi]):
            anti.append(sign * c / (k + 1))
        va = _poly_eval(anti, a)
        vb = _poly_eval(anti, b)
        const = acc - va
        out_coeffs.append((const, *anti[1:]))
        acc = acc + (vb - va)
    return PiecewisePoly(pts, tuple(out_coeffs)), acc


def _unit_poly(profiles: QddProfiles) -> PiecewisePoly:
    return PiecewisePoly((profiles.zero, profiles.one), ((profiles.one,),))


def word_integral(
    word: Sequence[str],
    profiles: QddProfiles,
    max_depth: int = DEFAULT_MAX_DEPTH,
):
    """Exact nested integral of a word's switching-function product.

    The first letter is innermost (acts earliest).  Returns a ``Fraction``
    (rational backend) or an ``mpmath.mpf``.  Words longer than ``max_depth``
    are rejected: cost grows with the full 4^n enumeration this feeds.
    """
    word = tuple(word)
    if not 1 <= len(word) <= max_depth:
        raise ValueError(f"word length must be in 1..{max_depth}")
    for a in word:
        if a not in LETTERS:
            raise ValueError(f"invalid letter {a!r}")
    if profiles.backend == "mp":
        with mp.workdps(profiles.dps):
            return _word_integral_inner(word, profiles)
    return _word_integral_inner(word, profiles)


def _word_integral_inner(word: Word, profiles: QddProfiles):
    g = _unit_poly(profiles)
    value = profiles.zero
    for letter in word:
        g, value = _integrate_stage(g, profiles.channels[letter], profiles.zero)
    return value


@dataclass(frozen=True)
class OrderCertification:
    """Result of exhaustively checking word integrals against claimed orders.

    ``rows`` carries one entry per (channel, word length) with the maximum
    absolute integral over that class; classes at or below the channel's
    claimed order are ``expected_zero`` and any nonzero value there lands in
    ``violations``.  At length d+1 a channel's first clearly nonzero word is
    kept as a saturation ``witness`` ("found" / "inconclusive" /
    "not-checked").
    """

    n1: int
    n2: int
    backend: str
    mode: str
    n_max: int
    zero_tol: float
    witness_tol: float
    orders: DecouplingOrders
    rows: tuple[dict, ...]
    witness_status: Mapping[str, str]
    violations: tuple[dict, ...]
    certified: bool

    def to_jsonable(self) -> dict:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "backend": self.backend,
            "mode": self.mode,
            "n_max": self.n_max,
            "zero_tol": self.zero_tol,
            "witness_tol": self.witness_tol,
            "orders": {
                "d_x": self.orders.d_x,
                "d_y": self.orders.d_y,
                "d_z": self.orders.d_z,
            },
            "rows": list(self.rows),
            "witness_status": dict(self.witness_status),
            "violations": list(self.violations),
            "certified": self.certified,
        }


def verify_orders(
    n1: int,
    n2: int,
    n_max: int,
    backend: str = "auto",
    mode: str = "analytic",
    zero_tol: float = DEFAULT_ZERO_TOL,
    witness_tol: float = DEFAULT_WITNESS_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
    dps: int = DEFAULT_DPS,
) -> OrderCertification:
    """Certify claimed suppression orders by exhaustive word enumeration.

    Walks all words up to length ``n_max`` depth-first, sharing integral
    prefixes, and checks that every error-channel word at or below the
    channel's claimed order integrates to zero (exactly, or below
    ``zero_tol`` on the mp backend).  Absence of a nonzero witness at length
    d+1 is reported as "inconclusive", never as failure.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > max_depth:
        raise ValueError(
            f"n_max={n_max} exceeds max depth {max_depth} (4^n words explode)"
        )
    profiles = qdd_profiles(n1, n2, backend, dps)
    orders = decoupling_orders(n1, n2, mode)
    d_of = {"x": orders.d_x, "y": orders.d_y, "z": orders.d_z}
    exact = profiles.backend == "rational"

    stats: dict[tuple[str, int], dict] = {}
    witness: dict[str, dict | None] = {"x": None, "y": None, "z": None}
    violations: list[dict] = []

    def record(word: Word, value) -> None:
        channel = word_channel(word)
        if channel == "identity":
            return
        n = len(word)
        a = abs(value)
        a_float = float(a)
        key = (channel, n)
        row = stats.setdefault(
            key,
            {
                "channel": channel,
                "n": n,
                "expected_zero": n <= d_of[channel],
                "words": 0,
                "max_abs": 0.0,
                "max_word": None,
            },
        )
        row["words"] += 1
        if a_float > row["max_abs"]:
            row["max_abs"] = a_float
            row["max_word"] = "".join(word)
        if row["expected_zero"]:
            nonzero = (value != 0) if exact else (a_float > zero_tol)
            if nonzero:
                violations.append(
                    {
                        "word": "".join(word),
                        "channel": channel,
                        "n": n,
                        "value": str(value),
                        "abs": a_float,
                    }
                )
        elif n == d_of[channel] + 1 and a_float > witness_tol:
            best = witness[channel]
            if best is None or a_float > best["abs"]:
                witness[channel] = {
                    "word": "".join(word),
                    "abs": a_float,
                    "value": str(value),
                }

    def walk(word: Word, g: PiecewisePoly) -> None:
        for letter in LETTERS:
            g2, value = _integrate_stage(g, profiles.channels[letter], profiles.zero)
            new_word = word + (letter,)
            record(new_word, value)
            if len(new_word) < n_max:
                walk(new_word, g2)

    if profiles.backend == "mp":
        with mp.workdps(dps):
            walk((), _unit_poly(profiles))
    else:
        walk((), _unit_poly(profiles))

    status = {}
    for ch, d in d_of.items():
        if n_max <= d:
            status[ch] = "not-checked"
        elif witness[ch] is not None:
            status[ch] = "found"
        else:
            status[ch] = "inconclusive"
    rows = tuple(
        dict(stats[k], witness=witness[k[0]] if k[1] == d_of[k[0]] + 1 else None)
        for k in sorted(stats, key=lambda t: (t[1], t[0]))
    )
    return OrderCertification(
        n1=n1,
        n2=n2,
        backend=profiles.backend,
        mode=mode,
        n_max=n_max,
        zero_tol=zero_tol,
        witness_tol=witness_tol,
        orders=orders,
        rows=rows,
        witness_status=status,
        violations=tuple(violations),
        certified=not violations,
    )
