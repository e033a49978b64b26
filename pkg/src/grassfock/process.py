"""Grassmann analog of processes with stationary increments.

Fourier convention: ``F f(u) = int f(x) exp(-iux) dx`` with inverse factor
``1/(2 pi)``.  Under it ``F xi_n = sqrt(2 pi) (-i)^n xi_n``, so the
multiplier ``S_m`` (Fourier multiplication by ``sqrt(m)``) applied to a
Hermite function needs one inverse integral only:

    S_m xi_n(x) = (2/sqrt(2 pi)) s_n int_0^inf sqrt(m(u)) xi_n(u) k_n(u x) du

with ``k_n = cos`` for even ``n``, ``sin`` for odd ``n`` and
``s_n = (-1)^floor(n/2)``.  Integrating in ``x`` from 0 to ``t`` replaces
the kernel by ``sin(ut)/u`` or ``(1 - cos(ut))/u``, which gives the
coefficients ``f_n(t) = int_0^t S_m xi_n`` in closed form on the same
spectral rule.  Derivatives, Riemann sums and covariances are therefore
mutually consistent: they only differ by the time discretisation under
test.

Coefficient ``n`` (0-based Hermite order) is attached to generator
``i_{n+1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import nnls
from scipy.special import gamma, roots_jacobi, roots_legendre

from .core import DEFAULT_G_MAX, GrassmannElement
from .distributions import WeightSystem, weighted_norm
from .errors import (
    GridExceeded,
    IntegralDiverges,
    QuadratureUnderResolved,
    TruncationOverflow,
)
from .fock import t_apply
from .hermite import hermite_functions, iter_hermite_blocks

__all__ = [
    "SpectralDensity",
    "ProcessModel",
    "DerivativeBoundParams",
    "apply_sm",
    "f_coeffs",
    "x_apply",
    "w_apply",
    "covariance_series",
    "covariance_matrix",
    "increment_norm",
    "covariance_oracle",
    "fbm_closed_form",
    "gamma_h",
    "fitted_scale",
    "pettis_integral",
    "fit_bound_params",
    "SELF_TEST_TOL",
]

SELF_TEST_TOL = 1e-6
_SQRT_2PI = math.sqrt(2 * math.pi)


# --------------------------------------------------------------------------
# spectral densities


@dataclass(frozen=True)
class SpectralDensity:
    """Even spectral density ``m(u)`` with growth parameters ``(K, b, N)``.

    ``m(u) <= K |u|^-b`` on ``|u| <= 1`` and ``m(u) <= K |u|^(2N)`` beyond.
    """

    form: str
    H: float | None = None
    grid_u: tuple[float, ...] | None = None
    grid_m: tuple[float, ...] | None = None
    K: float = 1.0
    b: float = 0.0
    N: int = 0

    def __post_init__(self):
        if self.form == "power_law":
            if self.H is None or not 0.0 < self.H < 1.0:
                raise ValueError(f"power-law exponent H must lie in (0, 1), got {self.H}")
        elif self.form == "tabulated":
            if self.grid_u is None or self.grid_m is None or len(self.grid_u) != len(self.grid_m):
                raise ValueError("tabulated density needs matching grid_u and grid_m")
            if any(m < 0 for m in self.grid_m):
                raise ValueError("density values must be non-negative")
        elif self.form != "constant":
            raise ValueError(f"unknown density form {self.form!r}")
        if self.b >= 2:
            raise ValueError("growth parameter b must be < 2")

    @classmethod
    def constant(cls) -> "SpectralDensity":
        return cls("constant", K=1.0, b=0.0, N=0)

    @classmethod
    def power_law(cls, H: float) -> "SpectralDensity":
        expo = 1.0 - 2.0 * H
        return cls(
            "power_law",
            H=float(H),
            K=1.0,
            b=max(0.0, 2.0 * H - 1.0),
            N=max(0, math.ceil(expo / 2.0)),
        )

    @classmethod
    def tabulated(cls, u: Sequence[float], m: Sequence[float], K: float, b: float, N: int):
        order = np.argsort(np.abs(u))
        u = tuple(float(abs(u[i])) for i in order)
        m = tuple(float(m[i]) for i in order)
        return cls("tabulated", grid_u=u, grid_m=m, K=K, b=b, N=N)

    @classmethod
    def from_config(cls, cfg: Mapping) -> "SpectralDensity":
        form = cfg.get("form", "power_law")
        if form in ("bm", "brownian", "constant"):
            return cls.constant()
        if form == "power_law":
            return cls.power_law(float(cfg["H"]))
        if form == "tabulated":
            return cls.tabulated(cfg["u"], cfg["m"], cfg.get("K", 1.0), cfg.get("b", 0.0), cfg.get("N", 0))
        raise ValueError(f"unknown density form {form!r}")

    def to_config(self) -> dict:
        if self.form == "power_law":
            return {"form": "power_law", "H": self.H}
        if self.form == "tabulated":
            return {"form": "tabulated", "u": list(self.grid_u), "m": list(self.grid_m),
                    "K": self.K, "b": self.b, "N": self.N}
        return {"form": "constant"}

    @property
    def sqrt_exponent(self) -> float:
        """Exponent ``beta`` with ``sqrt(m(u)) = u^beta`` near the origin."""
        if self.form == "power_law":
            return 0.5 - self.H
        return 0.0

    def __call__(self, u):
        a = np.abs(np.asarray(u, dtype=float))
        if self.form == "constant":
            return np.ones_like(a)
        if self.form == "power_law":
            with np.errstate(divide="ignore"):
                return a ** (1.0 - 2.0 * self.H)
        return np.interp(a, self.grid_u, self.grid_m)

    def growth_bound(self, u):
        a = np.abs(np.asarray(u, dtype=float))
        with np.errstate(divide="ignore"):
            return np.where(a <= 1.0, self.K * a ** (-self.b), self.K * a ** (2 * self.N))

    def satisfies_growth(self, u) -> bool:
        u = np.asarray(u, dtype=float)
        u = u[u != 0]
        return bool(np.all(self(u) <= self.growth_bound(u) * (1 + 1e-12)))

    def integrability(self) -> float:
        """``int m(u) / (u^2 + 1) du`` over the real line."""
        f = lambda u: float(self(u)) / (u * u + 1.0)
        with np.errstate(all="ignore"):
            lo, e1 = integrate.quad(f, 0.0, 1.0, limit=200)
            hi, e2 = integrate.quad(f, 1.0, np.inf, limit=200)
        val = 2.0 * (lo + hi)
        if not np.isfinite(val) or e1 > 1e-3 * max(abs(lo), 1) or e2 > 1e-3 * max(abs(hi), 1):
            raise IntegralDiverges("int m(u)/(u^2+1) du does not converge")
        return val


# --------------------------------------------------------------------------
# quadrature rule on the half line


def _spectral_rule(U: float, panels: int, nodes: int, beta: float, density: SpectralDensity):
    """Nodes ``u`` in (0, U] and weights for ``int_0^U g(u) sqrt(m(u)) du``.

    Composite Gauss-Legendre, except for the first panel where a
    Gauss-Jacobi rule absorbs the ``u^beta`` singularity of ``sqrt(m)``.
    """
    x, w = roots_legendre(nodes)
    h = U / panels
    left = np.arange(panels) * h
    u = (left[:, None] + 0.5 * h * (x + 1.0)).ravel()
    wt = np.tile(0.5 * h * w, panels) * np.sqrt(density(u))
    if beta != 0.0:
        xj, wj = roots_jacobi(nodes, 0.0, beta)
        u0 = 0.5 * h * (xj + 1.0)
        # sqrt(m(u)) / u^beta is constant for a pure power law; keep it general
        ratio = np.sqrt(density(u0)) / u0 ** beta
        u[:nodes] = u0
        wt[:nodes] = (0.5 * h) ** (beta + 1.0) * wj * ratio
    return u, wt


def _hermite_signs(n: np.ndarray) -> np.ndarray:
    return np.where((n // 2) % 2 == 0, 1.0, -1.0)


# --------------------------------------------------------------------------
# process model


@dataclass(frozen=True)
class DerivativeBoundParams:
    """Grid-fitted envelope constants for the Hermite images and their slopes."""

    D1: float
    D2: float
    D3: float
    D4: float
    N: int
    max_violation: float
    value_exponent: float
    lipschitz_exponent: float

    @property
    def exponents_consistent(self) -> bool:
        return (
            self.value_exponent <= (self.N + 1) / 2 + 1e-9
            and self.lipschitz_exponent <= (self.N + 2) / 2 + 1e-9
        )

    def to_json_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {
            "exponents_consistent": self.exponents_consistent
        }


@dataclass(frozen=True)
class ProcessModel:
    """Truncated spectral model of ``X_m(t) = T_{f_m(t)}``.

    Parameters
    ----------
    density
        The spectral density ``m``.
    n_max
        Number of Hermite functions kept.
    U
        Requested half-width of the frequency window.  It is widened to
        ``sqrt(2 n_max + 1) + 8`` when that is larger so that the highest
        Hermite function is not clipped.
    M
        Node count over the full window ``[-U, U]`` at the requested ``U``;
        the node density is preserved when the window is widened.
    t_max
        Largest ``|t|`` that may be queried.
    g_max
        Generator budget for operator application (``x_apply`` and
        friends use the first ``min(n_max, g_max)`` coefficients).
    """

    density: SpectralDensity
    n_max: int = 400
    U: float = 40.0
    M: int = 16384
    t_max: float = 4.0
    g_max: int = DEFAULT_G_MAX
    panel_nodes: int = 16
    self_test: bool = True
    _rule: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be positive")
        if self.M < 2 * self.panel_nodes:
            raise ValueError("M too small for one panel")
        u_eff = max(float(self.U), math.sqrt(2 * self.n_max + 1) + 8.0)
        panels = max(1, math.ceil(self.M / (2 * self.panel_nodes) * u_eff / self.U))
        rule = _spectral_rule(u_eff, panels, self.panel_nodes, self.density.sqrt_exponent, self.density)
        object.__setattr__(self, "_rule", (u_eff, panels) + rule)
        if self.self_test:
            err = self.self_test_error()
            if err > SELF_TEST_TOL:
                raise QuadratureUnderResolved(
                    f"identity-multiplier self-test deviates by {err:.3g} > {SELF_TEST_TOL:g}; "
                    "increase M or U"
                )

    @classmethod
    def from_config(cls, cfg: Mapping, **overrides) -> "ProcessModel":
        kw = dict(
            density=SpectralDensity.from_config(cfg.get("density", {"form": "constant"})),
        )
        for key in ("n_max", "U", "M", "t_max", "g_max"):
            if key in cfg:
                kw[key] = cfg[key]
        kw.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kw)

    def to_config(self) -> dict:
        return {"density": self.density.to_config(), "n_max": self.n_max, "U": self.U,
                "M": self.M, "t_max": self.t_max}

    @property
    def window(self) -> float:
        return self._rule[0]

    @property
    def nodes(self) -> np.ndarray:
        return self._rule[2]

    @property
    def weights(self) -> np.ndarray:
        return self._rule[3]

    @property
    def n_ops(self) -> int:
        """Number of coefficients that enter operator application."""
        return min(self.n_max, self.g_max)

    # core projection -------------------------------------------------------

    def _project(self, even_kernel, odd_kernel, weights=None, nodes=None, n_rows=None):
        """``c s_n int_0^U w(u) xi_n(u) k_n(u) du`` for every row ``n``.

        ``even_kernel`` / ``odd_kernel`` have shape ``(J, T)``.
        """
        u = self.nodes if nodes is None else nodes
        w = self.weights if weights is None else weights
        n_rows = self.n_max if n_rows is None else n_rows
        ke = w[:, None] * even_kernel
        ko = w[:, None] * odd_kernel
        out = np.empty((n_rows, ke.shape[1]))
        for start, rows in iter_hermite_blocks(n_rows, u):
            stop = start + rows.shape[0]
            first_even = start % 2
            # rows with even global order
            out[start + first_even : stop : 2] = rows[first_even::2] @ ke
            out[start + 1 - first_even : stop : 2] = rows[1 - first_even :: 2] @ ko
        n = np.arange(n_rows)
        return out * (_hermite_signs(n) * 2.0 / _SQRT_2PI)[:, None]

    def _check_times(self, ts):
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if np.any(np.abs(ts) > self.t_max + 1e-12):
            raise GridExceeded(f"|t| exceeds t_max={self.t_max}")
        return ts

    def sm_table(self, xs, n_rows: int | None = None) -> np.ndarray:
        """``S_m xi_n(x)`` for all rows and all ``x``: shape ``(n, len(xs))``."""
        xs = self._check_times(xs)
        ux = np.outer(self.nodes, xs)
        return self._project(np.cos(ux), np.sin(ux), n_rows=n_rows)

    def f_table(self, ts, n_rows: int | None = None) -> np.ndarray:
        """``f_n(t) = int_0^t S_m xi_n``: shape ``(n, len(ts))``."""
        ts = self._check_times(ts)
        u = self.nodes[:, None]
        ut = u * ts[None, :]
        even = np.sin(ut) / u
        odd = 2.0 * np.sin(0.5 * ut) ** 2 / u
        return self._project(even, odd, n_rows=n_rows)

    def self_test_error(self) -> float:
        """Max deviation of the identity multiplier from ``xi_n`` on probe points."""
        u_eff, panels = self._rule[:2]
        const = SpectralDensity.constant()
        u, w = _spectral_rule(u_eff, panels, self.panel_nodes, 0.0, const)
        xs = np.linspace(-self.t_max, self.t_max, 9)
        rows = sorted({0, 1, self.n_max // 2, self.n_max - 1})
        ux = np.outer(u, xs)
        got = self._project(np.cos(ux), np.sin(ux), weights=w, nodes=u, n_rows=self.n_max)[rows]
        want = hermite_functions(self.n_max, xs)[rows]
        return float(np.max(np.abs(got - want)))

    # elements --------------------------------------------------------------

    def _as_element(self, coeffs) -> GrassmannElement:
        return GrassmannElement({1 << n: float(c) for n, c in enumerate(coeffs)})

    def process_element(self, t: float) -> GrassmannElement:
        """``f_m(t)`` truncated to the operator generator budget."""
        return self._as_element(self.f_table([t], n_rows=self.n_ops)[:, 0])

    def derivative_element(self, t: float) -> GrassmannElement:
        """``d f_m / dt`` at ``t``, i.e. ``sum_n S_m xi_n(t) i_{n+1}``."""
        return self._as_element(self.sm_table([t], n_rows=self.n_ops)[:, 0])

    def _check_operand(self, g: GrassmannElement):
        if g.max_generator > self.n_ops:
            raise TruncationOverflow(
                f"operand uses generator {g.max_generator}; operators are truncated at {self.n_ops}"
            )

    # grid data for the envelope fit -----------------------------------------

    @cached_property
    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, 401)

    @cached_property
    def sm_grid(self) -> np.ndarray:
        tab = self.sm_table(self.time_grid)
        tab.setflags(write=False)
        return tab


# --------------------------------------------------------------------------
# operations


def apply_sm(model: ProcessModel, n: int, x: float) -> float:
    if not 0 <= n < model.n_max:
        raise ValueError(f"order {n} outside 0..{model.n_max - 1}")
    return float(model.sm_table([x], n_rows=n + 1)[n, 0])


def f_coeffs(model: ProcessModel, t: float) -> np.ndarray:
    return model.f_table([t])[:, 0]


def x_apply(model: ProcessModel, t: float, g: GrassmannElement) -> GrassmannElement:
    model._check_operand(g)
    return t_apply(model.process_element(t), g)


def w_apply(model: ProcessModel, t: float, g: GrassmannElement) -> GrassmannElement:
    model._check_operand(g)
    return t_apply(model.derivative_element(t), g)


def covariance_series(model: ProcessModel, t: float, s: float) -> float:
    tab = model.f_table([t, s])
    return float(tab[:, 0] @ tab[:, 1])


def covariance_matrix(model: ProcessModel, ts, ss=None) -> np.ndarray:
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    ss = ts if ss is None else np.atleast_1d(np.asarray(ss, dtype=float))
    ft = model.f_table(ts)
    fs = ft if ss is ts else model.f_table(ss)
    return ft.T @ fs


def covariance_oracle(density: SpectralDensity, t: float, s: float) -> float:
    """``(1/2pi) int (e^{iut}-1)(e^{-ius}-1) u^-2 m(u) du`` by adaptive quadrature.

    ``m`` is even, so the imaginary part cancels identically and the real
    part is ``(1/pi) int_0^inf (1 - cos ut - cos us + cos u(t-s)) m(u)/u^2 du``.
    The part on ``[0, 1]`` is integrated as one piece (the bracket is
    ``O(u^2)``); on ``[1, inf)`` each cosine is a Fourier integral handled
    by QUADPACK's QAWF.
    """
    density.integrability()
    t, s = float(t), float(s)
    if t == 0.0 or s == 0.0:
        return 0.0

    def head(u):
        num = 2.0 * (np.sin(0.5 * u * t) ** 2 + np.sin(0.5 * u * s) ** 2
                     - np.sin(0.5 * u * (t - s)) ** 2)
        return num / (u * u) * float(density(u))

    tail = lambda u: float(density(u)) / (u * u)
    with np.errstate(all="ignore"):
        total, _ = integrate.quad(head, 0.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-12)
        base, _ = integrate.quad(tail, 1.0, np.inf, limit=400, epsabs=1e-13, epsrel=1e-12)
        total += base
        for omega, sign in ((t, -1.0), (s, -1.0), (t - s, 1.0)):
            if omega == 0.0:
                total += sign * base
            else:
                val, _ = integrate.quad(tail, 1.0, np.inf, weight="cos", wvar=abs(omega), limlst=200)
                total += sign * val
    if not np.isfinite(total):
        raise IntegralDiverges("kernel integral is not finite")
    return total / math.pi


def gamma_h(H: float) -> float:
    if not 0.0 < H < 1.0:
        raise ValueError(f"H must lie in (0, 1), got {H}")
    if H == 0.5:
        return math.pi
    return math.cos(math.pi * H) * gamma(2.0 - 2.0 * H) / ((1.0 - 2.0 * H) * H)


def fbm_closed_form(t: float, s: float, H: float) -> float:
    g = gamma_h(H)
    return g * (abs(t) ** (2 * H) + abs(s) ** (2 * H) - abs(t - s) ** (2 * H))


def fitted_scale(density: SpectralDensity, ts, ss) -> np.ndarray:
    """Ratio ``covariance_oracle / fbm_closed_form`` at every grid pair."""
    H = 0.5 if density.form == "constant" else density.H
    if H is None:
        raise ValueError("closed form is only defined for power-law densities")
    out = np.empty((len(ts), len(ss)))
    for i, t in enumerate(ts):
        for j, s in enumerate(ss):
            out[i, j] = covariance_oracle(density, t, s) / fbm_closed_form(t, s, H)
    return out


def pettis_integral(
    model: ProcessModel,
    Y: Callable[[float], GrassmannElement],
    g: GrassmannElement,
    a: float,
    b: float,
    steps: int,
) -> GrassmannElement:
    """Midpoint Riemann sum of ``Y(t) W_m(t) g`` over ``[a, b]``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    model._check_operand(g)
    dt = (b - a) / steps
    mids = a + dt * (np.arange(steps) + 0.5)
    if dt == 0:
        return GrassmannElement()
    table = model.sm_table(mids, n_rows=model.n_ops)
    acc = GrassmannElement()
    for k, t in enumerate(mids):
        wg = t_apply(model._as_element(table[:, k]), g)
        acc = acc + Y(float(t)) * wg
    return acc.scale(dt)


def fit_bound_params(model: ProcessModel) -> DerivativeBoundParams:
    """Envelope constants for ``|S_m xi_n| <= D1 n^((N+1)/2) + D2`` and the
    matching Lipschitz bound with exponent ``(N+2)/2``, fitted on the
    model's time grid.

    Slopes come from a non-negative least-squares fit; the intercepts are
    then raised until the envelopes cover every sample, so the reported
    ``max_violation`` is at most zero.
    """
    N = model.density.N
    tab = model.sm_grid
    ts = model.time_grid
    amp = np.max(np.abs(tab), axis=1)
    lip = np.max(np.abs(np.diff(tab, axis=1)) / np.diff(ts)[None, :], axis=1)
    n = np.arange(model.n_max, dtype=float)

    def envelope(vals, expo):
        x = n ** expo
        (d1, d2), _ = nnls(np.column_stack([x, np.ones_like(x)]), vals)
        d2 = max(d2, float(np.max(vals - d1 * x)))
        return d1, d2, float(np.max(vals - d1 * x - d2))

    d1, d2, v1 = envelope(amp, (N + 1) / 2)
    d3, d4, v2 = envelope(lip, (N + 2) / 2)
    k = n >= 1
    value_exp = float(np.polyfit(np.log(n[k]), np.log(amp[k]), 1)[0]) if k.sum() > 1 else 0.0
    lip_exp = float(np.polyfit(np.log(n[k]), np.log(lip[k]), 1)[0]) if k.sum() > 1 else 0.0
    return DerivativeBoundParams(d1, d2, d3, d4, N, max(v1, v2), value_exp, lip_exp)


def increment_norm(
    x: GrassmannElement, y: GrassmannElement, p: int, weights: WeightSystem
) -> float:
    return weighted_norm(x - y, p, weights)
