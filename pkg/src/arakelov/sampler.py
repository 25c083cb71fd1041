"""Random bundles of fixed determinant.

The sampler follows the Hecke-point recipe: reduce a random hyperplane coset
mod a large prime p to the sublattice {x : a.x = 0 mod p}, then rescale so
the determinant is trivial.  As p grows these points equidistribute toward
the invariant measure on the space of unimodular lattices; p is echoed in
every report so escalation studies are possible.  Randomness comes from
counter-based Philox streams split per trial index, which makes serial and
parallel runs agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .bundle import ArakelovBundle, degree, make_bundle, scale
from .errors import InvalidCosetError, NoSplitPrimeError
from .intlinalg import ok_gcd
from .lattice import apply_transform, lll_transform
from .numberfield import NumberField, QuadElement

__all__ = [
    "DEFAULT_PRIME",
    "RandomLatticeSpec",
    "hecke_unimodular",
    "random_bundle",
    "trial_rng",
]

DEFAULT_PRIME = 1000003

SPLIT_PRIME_BOUND = 10000


@dataclass(frozen=True)
class RandomLatticeSpec:
    """Parameters of one sampling family: rank, congruence prime, base seed,
    and the field the bundles live over."""

    n: int
    p: int
    seed: int
    field: NumberField

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("rank must be at least 2")
        if not sympy.isprime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Philox stream for one trial; streams are independent across trials
    and identical regardless of evaluation order."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
    return np.random.Generator(np.random.Philox(seq))


def _congruence_rows(n: int, coset, modulus: int) -> tuple[int, list]:
    """Row basis of {x : sum coset_i x_i = 0 mod modulus} as multiplier data:
    returns (pivot index j, multipliers c_i) so the rows are m*e_j and
    e_i - c_i e_j."""
    coset = [int(x) % modulus for x in coset]
    pivot = next((i for i, x in enumerate(coset) if x), None)
    if pivot is None:
        raise InvalidCosetError("coset vector is zero mod the prime")
    inv = pow(coset[pivot], -1, modulus)
    mults = [(coset[i] * inv) % modulus for i in range(n)]
    return pivot, mults


def hecke_integer_gram(spec: RandomLatticeSpec, a) -> list[list[int]]:
    """Reduced integer Gram of the index-p congruence sublattice of Z^n,
    rows sorted by decreasing squared length; covolume is exactly p."""
    n = spec.n
    pivot, mults = _congruence_rows(n, a, spec.p)
    rows = []
    for i in range(n):
        if i == pivot:
            rows.append([spec.p if j == pivot else 0 for j in range(n)])
        else:
            r = [1 if j == i else 0 for j in range(n)]
            r[pivot] = -mults[i]
            rows.append(r)
    gram = [[sum(u[k] * v[k] for k in range(n)) for v in rows] for u in rows]
    U = lll_transform([[Fraction(x) for x in row] for row in gram])
    red = apply_transform(U, gram)
    order = sorted(range(n), key=lambda i: (-red[i][i], i))
    return [[int(red[i][j]) for j in order] for i in order]


def hecke_unimodular(spec: RandomLatticeSpec, a) -> ArakelovBundle:
    """Bundle over Q from the congruence lattice mod p, rescaled by p^(-1/n)
    so the degree is zero (exactly for n = 2, else to float precision)."""
    if not spec.field.is_rational():
        raise ValueError("hecke_unimodular samples bundles over Q")
    n = spec.n
    gram = hecke_integer_gram(spec, a)
    if n == 2:
        unit = Fraction(1, spec.p)
    else:
        unit = Fraction(spec.p ** (-2.0 / n))
    return make_bundle(spec.field,
                       [[unit * x for x in row] for row in gram])


def _draw_coset(rng: np.random.Generator, n: int, modulus: int) -> list[int]:
    while True:
        a = [int(x) for x in rng.integers(0, modulus, size=n)]
        if any(x % modulus for x in a):
            return a


def _split_prime_generator(field: NumberField) -> tuple[int, QuadElement]:
    """A rational split prime q and a generator of one prime above it."""
    q = 2
    while q < SPLIT_PRIME_BOUND:
        if field.splitting(q) == "split":
            root = field.primes_above(q)[0]["root"]
            w = field.element(0, 1)
            pi = ok_gcd(field, field.element(q),
                        field.sub(w, field.element(root)))
            if abs(field.norm(pi)) == q:
                return q, pi
        q = sympy.nextprime(q)
    raise NoSplitPrimeError(
        f"no split prime generator below {SPLIT_PRIME_BOUND} "
        f"for {field.descriptor}")


def _quadratic_congruence_bundle(field: NumberField, n: int,
                                 rng: np.random.Generator) -> ArakelovBundle:
    q, pi = _split_prime_generator(field)
    a = _draw_coset(rng, n, q)
    pivot, mults = _congruence_rows(n, a, q)
    one, zero = field.element(1), field.element(0)
    rows = []
    for i in range(n):
        if i == pivot:
            rows.append([pi if j == pivot else zero for j in range(n)])
        else:
            r = [one if j == i else zero for j in range(n)]
            r[pivot] = field.element(-mults[i])
            rows.append(r)
    grams = []
    for k in range(field.real_places):
        emb = [[field.embed(x, k) for x in row] for row in rows]
        g = [[math.fsum(emb[i][m] * emb[j][m] for m in range(n))
              for j in range(n)] for i in range(n)]
        grams.append([[(g[i][j] + g[j][i]) / 2.0 for j in range(n)]
                      for i in range(n)])
    for k in range(field.complex_places):
        emb = [[field.embed(x, field.real_places + k) for x in row]
               for row in rows]
        h = [[sum(emb[i][m].conjugate() * emb[j][m] for m in range(n))
              for j in range(n)] for i in range(n)]
        herm = [[(h[i][j] + h[j][i].conjugate()) / 2.0 for j in range(n)]
                for i in range(n)]
        for i in range(n):
            herm[i][i] = complex(herm[i][i].real, 0.0)
        grams.append(herm)
    return make_bundle(field, grams)


def random_bundle(field: NumberField, n: int, target_slope: float,
                  spec: RandomLatticeSpec,
                  rng: np.random.Generator | None = None) -> ArakelovBundle:
    """One random bundle of rank n with slope target_slope (degree matched
    to n*target_slope within float rounding, well inside 1e-9).

    Over Q this is a rescaled Hecke point; over a quadratic field a
    congruence submodule mod a split prime ideal, a heuristic stand-in with
    no equidistribution claim.
    """
    if spec.n != n or spec.field != field:
        raise ValueError("spec disagrees with the requested field or rank")
    if rng is None:
        rng = trial_rng(spec.seed, 0)
    if field.is_rational():
        base = hecke_unimodular(spec, _draw_coset(rng, n, spec.p))
    else:
        base = _quadratic_congruence_bundle(field, n, rng)
    d = field.degree
    t = math.exp((degree(base) - n * target_slope) / (n * d))
    return scale(base, t)
