"""Randomized property suites over the algebra, norms and operators.

Every check reports a *margin*: non-negative means the invariant held on
all samples, and the number says by how much it held at the worst sample
(relative slack for inequalities, ``tol - error`` for identities).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import (
    ConjugationId,
    GrassmannElement,
    MultiIndex,
    compose_conjugations,
    conjugate,
    element,
    index_product,
    multiply,
)
from .dense import (
    dense_conjugate,
    dense_left_derivative,
    dense_multiply,
    from_dense,
    popcounts,
    random_dense,
)
from .distributions import (
    WeightSystem,
    check_vage,
    growth_threshold,
    invert_distribution,
    vage_constant,
    weighted_norms_dense,
)
from .errors import BoundDiverges
from .fock import OperatorExpr, berezin_integral, operator_matrix
from .oracles import naive_sign_sort

__all__ = ["InvariantResult", "CheckReport", "SUITES", "run_suite", "run_checks"]

SUITES = ("algebra", "conjugations", "norms", "vage", "operators")
REL_SLACK = 1e-9
CHUNK = 2500


@dataclass(frozen=True)
class InvariantResult:
    suite: str
    name: str
    samples: int
    worst_margin: float
    passed: bool


@dataclass
class CheckReport:
    seed: int
    samples: int
    results: list[InvariantResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "samples": self.samples,
            "passed": self.passed,
            "invariants": [asdict(r) for r in self.results],
        }


def _ineq(suite, name, lhs, rhs, slack=REL_SLACK) -> InvariantResult:
    lhs = np.asarray(lhs, dtype=float).ravel()
    rhs = np.asarray(rhs, dtype=float).ravel()
    margin = (rhs - lhs) / np.maximum(np.abs(rhs), np.finfo(float).tiny)
    worst = float(margin.min()) if margin.size else 0.0
    return InvariantResult(suite, name, int(lhs.size), worst, worst >= -slack)


def _ident(suite, name, err, tol, samples) -> InvariantResult:
    err = float(np.max(err)) if np.size(err) else 0.0
    return InvariantResult(suite, name, int(samples), tol - err, err <= tol)


def _chunks(samples):
    done = 0
    while done < samples:
        k = min(CHUNK, samples - done)
        yield k
        done += k


def _int_dense(rng, n, size, odd=False, soul=False):
    """Small-integer dense samples: every product stays exact in floating point."""
    z = rng.integers(-3, 4, (size, 1 << n)) + 1j * rng.integers(-3, 4, (size, 1 << n))
    if odd:
        z = z * (popcounts(n) % 2 == 1)
    if soul:
        z[:, 0] = 0
    return z


def _pnorms(z, orders):
    """Several coefficient p-norms sharing one pass over ``|z|``."""
    a = np.abs(z)
    a2 = a * a
    out = {}
    for p in orders:
        if p == 1:
            out[p] = a.sum(axis=-1)
        elif p == 2:
            out[p] = np.sqrt(a2.sum(axis=-1))
        elif p % 2 == 0:
            out[p] = np.sum(a2 ** (p // 2), axis=-1) ** (1.0 / p)
        else:
            out[p] = np.sum(a**p, axis=-1) ** (1.0 / p)
    return out


# --------------------------------------------------------------------------
# algebra


def _algebra(rng, samples):
    out = []
    n = 8
    err = []
    for k in _chunks(samples):
        z, w, r = (random_dense(rng, n, k) for _ in range(3))
        lhs = dense_multiply(dense_multiply(z, w), r)
        rhs = dense_multiply(z, dense_multiply(w, r))
        scale = 1.0 + np.abs(lhs).max(axis=1)
        err.append(np.abs(lhs - rhs).max(axis=1) / scale)
    out.append(_ident("algebra", "associativity", np.concatenate(err), 1e-12, samples))

    worst = 0.0
    pairs = 0
    for a in range(1, 11):
        for b in range(1, 11):
            ia = GrassmannElement({1 << (a - 1): 1})
            ib = GrassmannElement({1 << (b - 1): 1})
            s = multiply(ia, ib) + multiply(ib, ia)
            worst = max(worst, max((abs(c) for _, c in s.items()), default=0.0))
            pairs += 1
    out.append(_ident("algebra", "anticommutation", worst, 0.0, pairs))

    bad = 0
    for a in range(16):
        for b in range(16):
            A = MultiIndex(a)
            B = MultiIndex(b)
            got = index_product(A, B)
            sign, gens = naive_sign_sort(A.gens + B.gens)
            want = (sign, None if gens is None else MultiIndex.from_gens(gens))
            bad += (got.sign, got.index) != want
    out.append(_ident("algebra", "sign_oracle", bad, 0, 256))

    v = _int_dense(rng, 8, samples, odd=True)
    sq = dense_multiply(v, v)
    out.append(_ident("algebra", "odd_square_zero", np.abs(sq).max(), 0.0, samples))

    n = 5
    prod = _int_dense(rng, n, samples, soul=True)
    for _ in range(n):
        prod = dense_multiply(prod, _int_dense(rng, n, samples, soul=True))
    out.append(_ident("algebra", "soul_nilpotency", np.abs(prod).max(), 0.0, samples))

    out.extend(norm_inequalities(rng, samples))
    return out


def norm_inequalities(rng, samples, n=10, orders=(1, 2, 3)):
    """Coefficient p-norm product bounds on random pairs in Lambda_n.

    ``||zw||_1 <= ||z||_1 ||w||_1`` and, for ``p >= 2``,
    ``||zw||_p^p <= ||z||_1^p ||w||_{2^(p-1)} prod_{k<p} ||w||_{2^k}``
    together with the variant that swaps the roles of ``z`` and ``w``.
    """
    lhs = {p: [] for p in orders}
    rhs = {p: [] for p in orders}
    lhs_s = {p: [] for p in orders}
    rhs_s = {p: [] for p in orders}

    need = {1} | {2**k for p in orders for k in range(1, p)}

    def bound(nx, ny, p):
        if p == 1:
            return nx[1] * ny[1]
        r = nx[1] ** p * ny[2 ** (p - 1)]
        for k in range(1, p):
            r = r * ny[2**k]
        return r

    for k in _chunks(samples):
        z = random_dense(rng, n, k)
        w = random_dense(rng, n, k)
        nzw = _pnorms(dense_multiply(z, w), orders)
        nz, nw = _pnorms(z, need), _pnorms(w, need)
        for p in orders:
            val = nzw[1] if p == 1 else nzw[p] ** p
            lhs[p].append(val)
            rhs[p].append(bound(nz, nw, p))
            lhs_s[p].append(val)
            rhs_s[p].append(bound(nw, nz, p))
    res = []
    for p in orders:
        res.append(_ineq("algebra", f"norm_product_p{p}", np.concatenate(lhs[p]), np.concatenate(rhs[p])))
        res.append(
            _ineq("algebra", f"norm_product_p{p}_swapped", np.concatenate(lhs_s[p]), np.concatenate(rhs_s[p]))
        )
    return res


# --------------------------------------------------------------------------
# conjugations


def _conjugations(rng, samples):
    out = []
    n = 6
    z = random_dense(rng, n, samples)
    w = random_dense(rng, n, samples)
    ids = list(ConjugationId)

    err = max(np.abs(dense_conjugate(dense_conjugate(z, c), c) - z).max() for c in ids)
    out.append(_ident("conjugations", "involution", err, 0.0, samples * len(ids)))

    zw = dense_multiply(z, w)
    err = 0.0
    for c in (ConjugationId.D1, ConjugationId.D7):
        rhs = dense_multiply(dense_conjugate(w, c), dense_conjugate(z, c))
        err = max(err, np.abs(dense_conjugate(zw, c) - rhs).max())
    out.append(_ident("conjugations", "antihomomorphism_1_7", err, 1e-12, samples * 2))

    err = 0.0
    for c in (ConjugationId.D2, ConjugationId.D3):
        rhs = dense_multiply(dense_conjugate(z, c), dense_conjugate(w, c))
        err = max(err, np.abs(dense_conjugate(zw, c) - rhs).max())
    out.append(_ident("conjugations", "homomorphism_2_3", err, 1e-12, samples * 2))

    # the table must be an elementary abelian group of order 8 and must
    # agree with the action on random elements
    bad = 0
    zs = z[: min(samples, 64)]
    for a, b in itertools.product(ids, ids):
        ab = compose_conjugations(a, b)
        bad += ab != compose_conjugations(b, a)
        bad += compose_conjugations(ab, ab) != ConjugationId.I
        seq = dense_conjugate(dense_conjugate(zs, a), b)
        bad += not np.array_equal(seq, dense_conjugate(zs, ab))
    bad += len({compose_conjugations(a, b) for a in ids for b in ids}) != 8
    out.append(_ident("conjugations", "composition_table", bad, 0, 64))

    c3 = dense_conjugate(z, ConjugationId.D3)
    err = np.abs(dense_multiply(z, c3) - dense_multiply(c3, z)).max()
    out.append(_ident("conjugations", "grade_conjugate_commutes", err, 1e-12, samples))

    zz = element({(1, 2, 3): 1, (4,): -1})
    ww = element({(1,): 1j, (3,): 1})
    rr = element({(): 1, (1, 2): 1, (3,): 1})
    worked = [
        (multiply(zz, conjugate(zz, 1)), element({(1, 2, 3, 4): 2})),
        (multiply(ww, conjugate(ww, 2)), element({(1, 3): 2j})),
        (multiply(rr, conjugate(rr, 3)), element({(): 1, (1, 2): 2})),
    ]
    bad = sum(a != b for a, b in worked)
    out.append(_ident("conjugations", "worked_examples", bad, 0, len(worked)))
    return out


# --------------------------------------------------------------------------
# norms


def _norms(rng, samples, weights: WeightSystem):
    out = []
    err = 0.0
    cases = 0
    for d in (1, 2, 3):
        for g in range(1, 16):
            ws = WeightSystem(weights.phi, weights.lambda_min, g_max=g)
            direct = math.fsum(np.exp(-2.0 * d * ws.log_weights(g)))
            product = math.prod(1.0 + math.exp(-2.0 * d * ws.phi_at(k)) for k in range(1, g + 1))
            err = max(err, abs(direct - product) / product)
            cases += 1
    out.append(_ident("norms", "weight_sum_product", err, 1e-12, cases))

    n = 8
    log_c = weights.log_weights(n)
    z = random_dense(rng, n, samples)
    ps = np.arange(0, 8)
    norms = np.stack([weighted_norms_dense(z, p, log_c) for p in ps], axis=1)
    out.append(_ineq("norms", "monotone_in_p", norms[:, 1:], norms[:, :-1]))

    z0 = np.abs(z[:, 0])
    has_body = z0 > 0
    deep = weighted_norms_dense(z[has_body], 60, log_c)
    err = np.abs(deep - z0[has_body]) / np.maximum(z0[has_body], 1e-300)
    out.append(_ident("norms", "limit_is_body", err, 1e-9, int(has_body.sum())))

    c2 = vage_constant(2, weights)
    m = max(1, samples // 10)
    f = random_dense(rng, 6, m)
    log6 = weights.log_weights(6)
    lhs, rhs = [], []
    for p in (0, 1, 2):
        base = weighted_norms_dense(f, p, log6)
        power = f
        for k in range(2, 7):
            power = dense_multiply(power, f)
            lhs.append(weighted_norms_dense(power, p + 2, log6))
            rhs.append(c2 ** (k - 1) * base**k)
    out.append(_ineq("norms", "power_bound", np.concatenate(lhs), np.concatenate(rhs)))

    err = 0.0
    k = max(1, samples // 50)
    for row in random_dense(rng, 5, k):
        row[0] = 1.0 + rng.random()
        f = from_dense(row)
        # keep the normalized soul small so the geometric series converges
        f = f.body + f.soul.scale(0.1 / max(1.0, abs(row[1:]).max()))
        inv = invert_distribution(f, 1, weights)
        resid = multiply(f, inv) - 1
        err = max(err, max((abs(c) for _, c in resid.items()), default=0.0))
    out.append(_ident("norms", "distribution_inverse", err, 1e-10, k))
    return out


# --------------------------------------------------------------------------
# Vage


def vage_inequalities(rng, samples, weights: WeightSystem, n=8, orders=((1, 0), (2, 1), (3, 1))):
    """``||fg||_{-p} <= C_{p-q} ||f||_{-q} ||g||_{-p}`` and the swapped form."""
    for p, q in orders:
        thr = growth_threshold(p - q)
        if weights.lambda_min <= thr:
            raise BoundDiverges(
                f"weight growth condition violated: need lambda > ln(2)/(2d) = {thr:.6g} "
                f"for d={p - q}, got {weights.lambda_min:.6g}"
            )
    log_c = weights.log_weights(n)
    consts = {pq: vage_constant(pq[0] - pq[1], weights) for pq in orders}
    lhs = {pq: [] for pq in orders}
    rhs = {pq: [] for pq in orders}
    rhs_s = {pq: [] for pq in orders}
    for k in _chunks(samples):
        f = random_dense(rng, n, k)
        g = random_dense(rng, n, k)
        fg = dense_multiply(f, g)
        f2, g2, fg2 = (np.abs(x) ** 2 for x in (f, g, fg))
        used = {x for pq in orders for x in pq}
        nf = {p: weighted_norms_dense(f2, p, log_c, squared_abs=True) for p in used}
        ng = {p: weighted_norms_dense(g2, p, log_c, squared_abs=True) for p in used}
        for p, q in orders:
            c = consts[p, q]
            lhs[p, q].append(weighted_norms_dense(fg2, p, log_c, squared_abs=True))
            rhs[p, q].append(c * nf[q] * ng[p])
            rhs_s[p, q].append(c * nf[p] * ng[q])
    res = []
    for p, q in orders:
        left = np.concatenate(lhs[p, q])
        res.append(_ineq("vage", f"vage_p{p}_q{q}", left, np.concatenate(rhs[p, q])))
        res.append(_ineq("vage", f"vage_p{p}_q{q}_swapped", left, np.concatenate(rhs_s[p, q])))
    return res


def _vage(rng, samples, weights):
    out = vage_inequalities(rng, samples, weights)
    # the sparse path must agree with the batched one on a few samples
    ok = 0
    k = min(samples, 20)
    for _ in range(k):
        f = from_dense(random_dense(rng, 6, 1)[0])
        g = from_dense(random_dense(rng, 6, 1)[0])
        ok += check_vage(f, g, 2, 1, weights).holds and check_vage(f, g, 2, 1, weights, swapped=True).holds
    out.append(_ident("vage", "vage_report_sparse", k - ok, 0, k))
    return out


# --------------------------------------------------------------------------
# operators


def _inner(x, y):
    return np.sum(x * np.conj(y), axis=-1)


def _operators(rng, samples, weights):
    out = []
    n = 8
    f, g, h = (random_dense(rng, n, samples) for _ in range(3))
    lhs = _inner(dense_left_derivative(f, g), h)
    rhs = _inner(g, dense_multiply(f, h))
    err = np.abs(lhs - rhs) / (1.0 + np.abs(lhs))
    out.append(_ident("operators", "adjoint_identity", err, 1e-12, samples))

    bad = 0
    for k in range(1, 7):
        f6 = from_dense(random_dense(rng, k, 1)[0])
        lm = operator_matrix(OperatorExpr.left_mul(f6), k)
        ld = operator_matrix(OperatorExpr.left_deriv(f6), k)
        bad += not np.array_equal(ld, lm.conj().T)
    out.append(_ident("operators", "matrix_transpose_oracle", bad, 0, 6))

    worst = 0.0
    m = min(samples, 200)
    for row in random_dense(rng, 6, m):
        k = int(rng.integers(1, 7))
        bit = 1 << (k - 1)
        row = np.where((np.arange(64) & bit) == 0, row, 0)
        r = berezin_integral(MultiIndex(bit), from_dense(row))
        worst = max(worst, max((abs(c) for _, c in r.items()), default=0.0))
    out.append(_ident("operators", "berezin_annihilation", worst, 0.0, m))

    f = random_dense(rng, n, samples)
    g = random_dense(rng, n, samples)
    f[:, 0] = 0
    g[:, 0] = 0
    # with zero body, T_f 1 = f + M*_f 1 = f
    one = np.zeros(1 << n, dtype=complex)
    one[0] = 1
    tf = dense_multiply(f, one) + dense_left_derivative(f, one)
    tg = dense_multiply(g, one) + dense_left_derivative(g, one)
    lhs = _inner(tf, tg)
    rhs = _inner(f, g)
    out.append(_ident("operators", "t_vacuum_inner_product", np.abs(lhs - rhs) / (1 + np.abs(rhs)), 1e-12, samples))

    log_c = weights.log_weights(n)
    f = random_dense(rng, n, samples)
    g = random_dense(rng, n, samples)
    tfg = dense_multiply(f, g) + dense_left_derivative(f, g)
    lhs, rhs = [], []
    for p, q in ((1, 0), (2, 1), (3, 1)):
        c = vage_constant(p - q, weights)
        lhs.append(weighted_norms_dense(tfg, p, log_c))
        rhs.append(2 * c * weighted_norms_dense(f, q, log_c) * weighted_norms_dense(g, -p, log_c))
    out.append(_ineq("operators", "t_operator_bound", np.concatenate(lhs), np.concatenate(rhs)))
    return out


# --------------------------------------------------------------------------


def run_suite(name: str, rng: np.random.Generator, samples: int, weights: WeightSystem):
    if name == "algebra":
        return _algebra(rng, samples)
    if name == "conjugations":
        return _conjugations(rng, samples)
    if name == "norms":
        return _norms(rng, samples, weights)
    if name == "vage":
        return _vage(rng, samples, weights)
    if name == "operators":
        return _operators(rng, samples, weights)
    raise ValueError(f"unknown suite {name!r}")


def run_checks(suites, seed: int = 0, samples: int = 1000, weights: WeightSystem | None = None) -> CheckReport:
    if isinstance(suites, str):
        suites = SUITES if suites == "all" else (suites,)
    weights = weights or WeightSystem.linear(1.0)
    report = CheckReport(seed, samples)
    for i, name in enumerate(suites):
        # each suite gets its own stream so results do not depend on suite order
        rng = np.random.default_rng([seed, SUITES.index(name) if name in SUITES else i])
        report.results.extend(run_suite(name, rng, samples, weights))
    return report
