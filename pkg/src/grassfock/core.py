"""Finite Grassmann algebra arithmetic.

A basis monomial ``i_a1 i_a2 ... i_at`` (with ``a1 < a2 < ... < at``) is
encoded as a Python ``int`` bit set: generator ``n`` lives in bit ``n - 1``.
Python integers are arbitrary precision, so the 64-generator default is a
validation limit rather than a storage limit.

Elements are sparse ``{mask: complex}`` maps wrapped in an immutable
:class:`GrassmannElement`.  All arithmetic is exact up to floating point
round-off of the coefficients; exact zeros are dropped after every
operation.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Union

from .errors import NotInvertible

__all__ = [
    "DEFAULT_G_MAX",
    "INVERT_EPS",
    "MultiIndex",
    "SignedIndex",
    "ZERO",
    "GrassmannElement",
    "ConjugationId",
    "gen",
    "scalar",
    "element",
    "index_product",
    "multiply",
    "linear_combine",
    "conjugate",
    "compose_conjugations",
    "p_norm",
    "inner_product",
    "invert",
    "grade_split",
    "prune",
    "configure",
    "g_max",
]

DEFAULT_G_MAX = 64
INVERT_EPS = 1e-12

_g_max = DEFAULT_G_MAX


def configure(g_max: int | None = None) -> None:
    """Set the run-wide generator budget used to validate new indices."""
    global _g_max
    if g_max is not None:
        if g_max < 1:
            raise ValueError(f"g_max must be positive, got {g_max}")
        _g_max = int(g_max)


def g_max() -> int:
    return _g_max


# --------------------------------------------------------------------------
# index arithmetic on raw masks


def mask_from_gens(gens: Iterable[int]) -> int:
    mask = 0
    for n in gens:
        n = int(n)
        if n < 1:
            raise ValueError(f"generator ids start at 1, got {n}")
        if n > _g_max:
            raise ValueError(f"generator {n} exceeds G_max={_g_max}")
        bit = 1 << (n - 1)
        if mask & bit:
            raise ValueError(f"duplicate generator {n}")
        mask |= bit
    return mask


def gens_from_mask(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


def swap_parity(a: int, b: int) -> int:
    """Parity of #{(x, y): x in a, y in b, x > y} for disjoint masks."""
    parity = 0
    while b:
        low = b & -b
        parity ^= (a >> low.bit_length()).bit_count() & 1
        b ^= low
    return parity


def mask_sign(a: int, b: int) -> int:
    """Sign of ``i_a i_b`` in the canonical basis, 0 when they share a generator."""
    if a & b:
        return 0
    return -1 if swap_parity(a, b) else 1


# --------------------------------------------------------------------------
# public index types


@dataclass(frozen=True, order=True)
class MultiIndex:
    """Strictly increasing tuple of generator ids, stored as a bit set.

    The empty index (``bits == 0``) is the body index.
    """

    bits: int = 0

    @classmethod
    def of(cls, *gens: int) -> "MultiIndex":
        return cls(mask_from_gens(gens))

    @classmethod
    def from_gens(cls, gens: Iterable[int]) -> "MultiIndex":
        return cls(mask_from_gens(gens))

    @property
    def gens(self) -> tuple[int, ...]:
        return gens_from_mask(self.bits)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __repr__(self) -> str:
        return f"MultiIndex{self.gens}"


@dataclass(frozen=True)
class SignedIndex:
    """Result of multiplying two basis monomials.

    ``sign`` is +1 or -1; the annihilated product is the :data:`ZERO`
    marker with ``sign == 0`` and ``index is None``.
    """

    sign: int
    index: MultiIndex | None

    @property
    def is_zero(self) -> bool:
        return self.sign == 0


ZERO = SignedIndex(0, None)


def index_product(alpha: MultiIndex, beta: MultiIndex) -> SignedIndex:
    s = mask_sign(alpha.bits, beta.bits)
    if s == 0:
        return ZERO
    return SignedIndex(s, MultiIndex(alpha.bits | beta.bits))


# --------------------------------------------------------------------------
# elements

Number = Union[int, float, complex]


def _clean(terms: Mapping[int, complex]) -> dict[int, complex]:
    return {int(m): complex(c) for m, c in terms.items() if c != 0}


class GrassmannElement:
    """Immutable finitely supported supernumber ``sum_a z_a i_a``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Number] | None = None):
        self._terms = _clean(terms or {})
        self._hash = None

    # construction ---------------------------------------------------------

    @classmethod
    def _raw(cls, terms: dict[int, complex]) -> "GrassmannElement":
        # trusted path: caller already dropped zeros
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def from_gens(cls, terms: Mapping[tuple[int, ...], Number]) -> "GrassmannElement":
        """Build from ``{(1, 3): 0.5, (): 2}`` style mappings."""
        acc: dict[int, complex] = {}
        for gens, c in terms.items():
            if isinstance(gens, int):
                gens = (gens,)
            m = mask_from_gens(gens)
            acc[m] = acc.get(m, 0) + complex(c)
        return cls(acc)

    # views ------------------------------------------------------------------

    @property
    def terms(self) -> Mapping[int, complex]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, index: MultiIndex | Iterable[int] | int = ()) -> complex:
        if isinstance(index, MultiIndex):
            m = index.bits
        elif isinstance(index, int):
            m = mask_from_gens((index,))
        else:
            m = mask_from_gens(index)
        return self._terms.get(m, 0j)

    @property
    def body(self) -> complex:
        return self._terms.get(0, 0j)

    @property
    def soul(self) -> "GrassmannElement":
        return GrassmannElement._raw({m: c for m, c in self._terms.items() if m})

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def support(self) -> int:
        """Union of all generator bits that appear in any term."""
        s = 0
        for m in self._terms:
            s |= m
        return s

    @property
    def max_generator(self) -> int:
        return self.support.bit_length()

    def __len__(self) -> int:
        return len(self._terms)

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, GrassmannElement):
            return linear_combine(1, self, 1, other)
        if isinstance(other, (int, float, complex)):
            return linear_combine(1, self, other, _ONE)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GrassmannElement):
            return linear_combine(1, self, -1, other)
        if isinstance(other, (int, float, complex)):
            return linear_combine(1, self, -other, _ONE)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, float, complex)):
            return linear_combine(-1, self, other, _ONE)
        return NotImplemented

    def __neg__(self):
        return GrassmannElement._raw({m: -c for m, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, GrassmannElement):
            return multiply(self, other)
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(1 / other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are defined")
        out = _ONE
        base = self
        while n:
            if n & 1:
                out = multiply(out, base)
            n >>= 1
            if n:
                base = multiply(base, base)
        return out

    def scale(self, a: Number) -> "GrassmannElement":
        a = complex(a)
        return GrassmannElement({m: a * c for m, c in self._terms.items()})

    # comparison -------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, GrassmannElement):
            return self._terms == other._terms
        if isinstance(other, (int, float, complex)):
            return self._terms == _clean({0: other})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def allclose(self, other: "GrassmannElement", atol: float = 1e-12) -> bool:
        if not isinstance(other, GrassmannElement):
            other = scalar(other)
        keys = self._terms.keys() | other._terms.keys()
        return all(
            abs(self._terms.get(k, 0) - other._terms.get(k, 0)) <= atol for k in keys
        )

    def __repr__(self) -> str:
        if not self._terms:
            return "GrassmannElement(0)"
        parts = []
        for m in sorted(self._terms, key=lambda k: (k.bit_count(), gens_from_mask(k))):
            c = self._terms[m]
            cs = f"{c.real:g}" if c.imag == 0 else f"({c.real:g}{c.imag:+g}j)"
            mono = "".join(f"i{n}" for n in gens_from_mask(m))
            parts.append(cs if not mono else f"{cs}*{mono}")
        return "GrassmannElement(" + " + ".join(parts) + ")"

    # serialization ----------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "terms": [
                {"gens": list(gens_from_mask(m)), "re": c.real, "im": c.imag}
                for m, c in sorted(self._terms.items())
            ]
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "GrassmannElement":
        if not isinstance(data, Mapping) or "terms" not in data:
            raise ValueError("element JSON must be an object with a 'terms' list")
        acc: dict[int, complex] = {}
        for term in data["terms"]:
            gens = [int(g) for g in term.get("gens", [])]
            if any(b <= a for a, b in zip(gens, gens[1:])):
                raise ValueError(f"generators must be strictly ascending: {gens}")
            m = mask_from_gens(gens)
            if m in acc:
                raise ValueError(f"duplicate index entry {gens}")
            acc[m] = complex(float(term.get("re", 0.0)), float(term.get("im", 0.0)))
        return cls(acc)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "GrassmannElement":
        return cls.from_json_dict(json.loads(text))


_ONE = GrassmannElement._raw({0: 1 + 0j})


def gen(n: int) -> GrassmannElement:
    """The generator ``i_n``."""
    return GrassmannElement._raw({mask_from_gens((n,)): 1 + 0j})


def scalar(c: Number) -> GrassmannElement:
    return GrassmannElement({0: c})


def element(terms: Mapping[tuple[int, ...], Number]) -> GrassmannElement:
    return GrassmannElement.from_gens(terms)


# --------------------------------------------------------------------------
# operations


def multiply(z: GrassmannElement, w: GrassmannElement) -> GrassmannElement:
    acc: dict[int, complex] = {}
    witems = list(w._terms.items())
    for a, za in z._terms.items():
        for b, wb in witems:
            if a & b:
                continue
            v = za * wb
            if swap_parity(a, b):
                v = -v
            m = a | b
            acc[m] = acc.get(m, 0) + v
    return GrassmannElement._raw({m: c for m, c in acc.items() if c != 0})


def linear_combine(
    a: Number, z: GrassmannElement, b: Number, w: GrassmannElement
) -> GrassmannElement:
    acc = {m: a * c for m, c in z._terms.items()}
    for m, c in w._terms.items():
        acc[m] = acc.get(m, 0) + b * c
    return GrassmannElement(acc)


def prune(z: GrassmannElement, threshold: float = 0.0) -> GrassmannElement:
    """Drop terms whose magnitude is ``<= threshold`` (exact zeros at 0)."""
    if threshold <= 0:
        return z
    return GrassmannElement._raw(
        {m: c for m, c in z._terms.items() if abs(c) > threshold}
    )


class ConjugationId(enum.Enum):
    """The seven conjugations plus the identity.

    The value is a 3-bit flag word: bit 0 toggles the reversal sign
    ``(-1)^(|a| + |a|(|a|-1)/2)``, bit 1 complex-conjugates coefficients,
    bit 2 toggles the grade sign ``(-1)^|a|``.
    """

    I = 0
    D1 = 1
    D2 = 2
    D3 = 4
    D4 = 3  # D1 then D2
    D5 = 6  # D2 then D3
    D6 = 5  # D3 then D1
    D7 = 7  # D1, D2, D3

    @classmethod
    def of(cls, k: "int | str | ConjugationId") -> "ConjugationId":
        if isinstance(k, ConjugationId):
            return k
        if isinstance(k, str):
            return cls[k.upper()] if k.upper() in cls.__members__ else cls.of(int(k))
        if k == 0:
            return cls.I
        if 1 <= k <= 7:
            return cls[f"D{k}"]
        raise ValueError(f"no conjugation numbered {k}")


def compose_conjugations(first: ConjugationId, then: ConjugationId) -> ConjugationId:
    return ConjugationId(first.value ^ then.value)


def conjugation_sign(mask: int, cid: ConjugationId) -> int:
    k = mask.bit_count()
    e = 0
    if cid.value & 1:
        e += k + k * (k - 1) // 2
    if cid.value & 4:
        e += k
    return -1 if e & 1 else 1


def conjugate(z: GrassmannElement, c: ConjugationId | int | str) -> GrassmannElement:
    cid = ConjugationId.of(c)
    cc = bool(cid.value & 2)
    out = {}
    for m, v in z._terms.items():
        if cc:
            v = v.conjugate()
        out[m] = -v if conjugation_sign(m, cid) < 0 else v
    return GrassmannElement._raw(out)


def p_norm(z: GrassmannElement, p: int) -> float:
    if int(p) != p or p < 1:
        raise ValueError(f"p must be a positive integer, got {p}")
    p = int(p)
    if p == 1:
        return math.fsum(abs(c) for c in z._terms.values())
    if p == 2:
        return math.hypot(*(abs(c) for c in z._terms.values()))
    return math.fsum(abs(c) ** p for c in z._terms.values()) ** (1.0 / p)


def inner_product(z: GrassmannElement, w: GrassmannElement) -> complex:
    """``<z, w> = sum_a z_a conj(w_a)``: linear in ``z``, antilinear in ``w``."""
    if len(w._terms) < len(z._terms):
        return sum((c.conjugate() * z._terms[m] for m, c in w._terms.items() if m in z._terms), 0j)
    return sum((c * w._terms[m].conjugate() for m, c in z._terms.items() if m in w._terms), 0j)


def invert(z: GrassmannElement, eps: float = INVERT_EPS) -> GrassmannElement:
    """Inverse through the terminating series ``b^-1 sum_k (-b^-1 s)^k``."""
    b = z.body
    if abs(b) <= eps:
        raise NotInvertible(f"body {b!r} has magnitude <= {eps:g}")
    x = z.soul.scale(-1 / b)
    out = _ONE
    power = _ONE
    # the soul is nilpotent: at most one factor per generator survives
    for _ in range(x.support.bit_count() + 1):
        power = multiply(power, x)
        if power.is_zero:
            break
        out = out + power
    return out.scale(1 / b)


def grade_split(z: GrassmannElement) -> tuple[GrassmannElement, GrassmannElement]:
    even, odd = {}, {}
    for m, c in z._terms.items():
        (odd if m.bit_count() & 1 else even)[m] = c
    return GrassmannElement._raw(even), GrassmannElement._raw(odd)
