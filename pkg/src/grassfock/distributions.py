"""Weighted norms ||f||_{-p}, Vage constants and power series in H_{-p}.

Weights are ``c_a = exp(sum_{n in a} phi(n))`` and every computation is
carried out on ``log c_a`` so that large generator ids and large orders do
not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .core import INVERT_EPS, GrassmannElement, gens_from_mask, multiply
from .errors import (
    BoundDiverges,
    CapExceeded,
    ConvergencePreconditionFailed,
    InvalidOrder,
    NotInvertible,
    TruncationOverflow,
)

__all__ = [
    "WeightSystem",
    "VageReport",
    "PowerSeries",
    "weighted_norm",
    "weighted_norms_dense",
    "norm_limit_check",
    "vage_constant",
    "growth_threshold",
    "check_vage",
    "power_series_eval",
    "invert_distribution",
    "SERIES_CAP",
    "SERIES_TOL",
]

SERIES_CAP = 64
SERIES_TOL = 1e-12


@dataclass(frozen=True)
class WeightSystem:
    """Multiplicative weight family built from a growth function ``phi``.

    Parameters
    ----------
    phi
        Non-decreasing on the non-negative integers with ``phi(0) == 0``.
    lambda_min
        A lower growth rate: ``phi(n) >= lambda_min * n`` for all
        ``1 <= n <= g_max``.  It feeds the closed-form tail bound.
    g_max
        Number of generators the truncated constants account for.
    """

    phi: Callable[[int], float]
    lambda_min: float
    g_max: int = 64
    name: str = "custom"
    _table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.g_max < 1:
            raise ValueError("g_max must be positive")
        table = np.array([float(self.phi(n)) for n in range(self.g_max + 1)])
        if table[0] != 0:
            raise ValueError(f"phi(0) must be 0, got {table[0]}")
        if np.any(np.diff(table) < 0):
            raise ValueError("phi must be non-decreasing")
        n = np.arange(self.g_max + 1)
        if np.any(table[1:] < self.lambda_min * n[1:] - 1e-12):
            raise ValueError("phi(n) >= lambda_min * n is violated")
        table.setflags(write=False)
        object.__setattr__(self, "_table", table)

    @classmethod
    def linear(cls, lam: float = 1.0, g_max: int = 64) -> "WeightSystem":
        lam = float(lam)
        return cls(lambda n: lam * n, lambda_min=lam, g_max=g_max, name="linear")

    @classmethod
    def from_config(cls, cfg: Mapping) -> "WeightSystem":
        kind = cfg.get("phi", "linear")
        if kind != "linear":
            raise ValueError(f"unknown weight family {kind!r}")
        return cls.linear(cfg.get("lambda", 1.0), int(cfg.get("G_max", 64)))

    def to_config(self) -> dict:
        return {"phi": self.name, "lambda": self.lambda_min, "G_max": self.g_max}

    def phi_at(self, n: int) -> float:
        if n <= self.g_max:
            return float(self._table[n])
        return float(self.phi(n))

    def log_weight(self, mask: int) -> float:
        return math.fsum(self.phi_at(n) for n in gens_from_mask(mask))

    def weight(self, mask: int) -> float:
        return math.exp(self.log_weight(mask))

    def log_weights(self, n: int) -> np.ndarray:
        """``log c`` for every mask of Lambda_n, in bit-pattern order."""
        if n > self.g_max:
            raise TruncationOverflow(f"{n} generators exceed G_max={self.g_max}")
        out = np.zeros(1 << n)
        for k in range(n):
            out[1 << k : 1 << (k + 1)] = out[: 1 << k] + self._table[k + 1]
        return out


def weighted_norm(f: GrassmannElement, p: int, w: WeightSystem) -> float:
    """``(sum_a |f_a|^2 c_a^(-2p))^(1/2)``; negative ``p`` gives H_{+|p|}."""
    if int(p) != p:
        raise ValueError(f"p must be an integer, got {p}")
    if f.is_zero:
        return 0.0
    logs = [
        2.0 * math.log(abs(c)) - 2.0 * p * w.log_weight(m) for m, c in f.items()
    ]
    return math.exp(0.5 * logsumexp(logs))


def weighted_norms_dense(z: np.ndarray, p: float, log_c: np.ndarray, squared_abs: bool = False) -> np.ndarray:
    """Batched ``weighted_norm`` for dense arrays (last axis = basis).

    With ``squared_abs`` the input already holds ``|z|^2``, which lets a
    caller reuse it across several orders.
    """
    a2 = np.asarray(z) if squared_abs else np.abs(z) ** 2
    e = -2.0 * p * np.asarray(log_c)
    if e.size and np.abs(e).max() < 600.0:
        return np.sqrt(a2 @ np.exp(e))
    with np.errstate(divide="ignore"):
        logs = np.log(a2) + e
    return np.exp(0.5 * logsumexp(logs, axis=-1))


def norm_limit_check(
    f: GrassmannElement, w: WeightSystem, p_sequence: Iterable[int]
) -> np.ndarray:
    """Norms along ``p_sequence``; they decrease towards ``|body(f)|``."""
    if w.g_max >= 1 and w.phi_at(1) <= 0:
        raise ValueError("the limit needs c_a > 1 for every non-empty index")
    return np.array([weighted_norm(f, p, w) for p in p_sequence])


def growth_threshold(d: int) -> float:
    """Smallest admissible growth rate for order gap ``d``: ln(2)/(2d)."""
    return math.log(2.0) / (2.0 * d)


def vage_constant(d: int, w: WeightSystem, mode: str = "truncated") -> float:
    """Constant ``C_d`` of the product inequality.

    ``truncated`` evaluates ``sqrt(sum_{a in {1..G}} c_a^(-2d))`` via the
    product ``prod_n (1 + exp(-2 d phi(n)))``; ``tail_bounded`` returns
    the geometric upper bound ``sqrt(1 + 1/(exp(2 d xi) - 2))``.
    """
    if d < 1 or int(d) != d:
        raise ValueError(f"d must be a positive integer, got {d}")
    thr = growth_threshold(d)
    if w.lambda_min <= thr:
        raise BoundDiverges(
            f"weight growth condition violated: need xi > ln(2)/(2d) = {thr:.6g} "
            f"for d={d}, got xi = {w.lambda_min:.6g}"
        )
    if mode == "truncated":
        s = math.fsum(math.log1p(math.exp(-2.0 * d * w.phi_at(n))) for n in range(1, w.g_max + 1))
        return math.exp(0.5 * s)
    if mode == "tail_bounded":
        # exp(2 d xi) - 2 == 2 * expm1(2 d xi - ln 2), kept accurate near the threshold
        return math.sqrt(1.0 + 0.5 / math.expm1(2.0 * d * w.lambda_min - math.log(2.0)))
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class VageReport:
    lhs: float
    rhs: float
    constant: float
    holds: bool

    def to_json_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "constant": self.constant, "holds": self.holds}


def check_vage(
    f: GrassmannElement,
    g: GrassmannElement,
    p: int,
    q: int,
    w: WeightSystem,
    swapped: bool = False,
) -> VageReport:
    """Compare ``||fg||_{-p}`` with ``C_{p-q} ||f||_{-q} ||g||_{-p}``.

    With ``swapped`` the roles of the orders move to the right factor:
    ``C_{p-q} ||f||_{-p} ||g||_{-q}``.
    """
    if p <= q:
        raise InvalidOrder(f"need p > q, got p={p}, q={q}")
    for x in (f, g):
        if x.max_generator > w.g_max:
            raise TruncationOverflow(
                f"operand uses generator {x.max_generator} beyond G_max={w.g_max}"
            )
    c = vage_constant(p - q, w, "truncated")
    lhs = weighted_norm(multiply(f, g), p, w)
    if swapped:
        rhs = c * weighted_norm(f, p, w) * weighted_norm(g, q, w)
    else:
        rhs = c * weighted_norm(f, q, w) * weighted_norm(g, p, w)
    return VageReport(lhs, rhs, c, lhs <= rhs + 1e-9 * rhs)


@dataclass(frozen=True)
class PowerSeries:
    """``F(x) = sum_n coeff(n) x^n`` with radius of convergence ``radius``."""

    coeff: Callable[[int], complex]
    radius: float = math.inf
    degree: int | None = None

    @classmethod
    def geometric(cls) -> "PowerSeries":
        return cls(lambda n: 1.0, 1.0)

    @classmethod
    def exponential(cls) -> "PowerSeries":
        return cls(lambda n: 1.0 / math.factorial(n), math.inf)

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[complex], radius: float = math.inf):
        coeffs = list(coeffs)
        return cls(lambda n: coeffs[n] if n < len(coeffs) else 0.0, radius, len(coeffs) - 1)


def power_series_eval(
    series: PowerSeries,
    f: GrassmannElement,
    p: int,
    w: WeightSystem,
    tol: float = SERIES_TOL,
    cap: int = SERIES_CAP,
) -> GrassmannElement:
    """Evaluate ``F(f)`` by partial sums measured in H_{-p-2}.

    Only the body has to lie inside ``R / C_2``; nilpotency of the soul
    makes every soul correction terminate.  Summation stops when a power
    of ``f`` vanishes, or (for ``f`` with a non-zero body) when a term with
    a non-zero coefficient adds less than ``tol`` in the H_{-p-2} norm.
    """
    c2 = vage_constant(2, w, "truncated")
    if not abs(f.body) < series.radius / c2:
        raise ConvergencePreconditionFailed(
            f"|body| = {abs(f.body):.6g} is not below R/C_2 = {series.radius / c2:.6g}"
        )
    nilpotent = f.body == 0
    total = GrassmannElement({0: series.coeff(0)})
    power = GrassmannElement({0: 1})
    # the cap only governs the scalar series; nilpotent sums always finish
    limit = max(cap, f.support.bit_count() + 1) if nilpotent else cap
    for n in range(1, limit + 1):
        if series.degree is not None and n > series.degree:
            return total
        power = multiply(power, f)
        if power.is_zero:
            return total
        a = complex(series.coeff(n))
        if a == 0:
            continue
        term = power.scale(a)
        total = total + term
        # a bodiless argument is nilpotent, so its series is a finite sum:
        # run it to the end rather than trusting a heavily down-weighted norm
        if nilpotent:
            continue
        if weighted_norm(term, p + 2, w) < tol:
            return total
    raise CapExceeded(f"series did not settle within {cap} terms")


def invert_distribution(
    f: GrassmannElement, p: int, w: WeightSystem, eps: float = INVERT_EPS
) -> GrassmannElement:
    """Inverse via the Neumann series of ``1 - f/f_0``."""
    b = f.body
    if abs(b) <= eps:
        raise NotInvertible(f"body {b!r} has magnitude <= {eps:g}")
    # 1 - f/b has an exactly zero body; build it from the soul so rounding
    # in b * (1/b) cannot leave a spurious scalar behind
    h = f.soul.scale(-1 / b)
    return power_series_eval(PowerSeries.geometric(), h, p, w).scale(1 / b)
