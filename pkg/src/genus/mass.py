"""Exact Smith-Minkowski-Siegel mass of a definite genus (Conway-Sloane local recipe).

mass = std(n, D) * prod_{p | 2 det} m_p / std_p, with every factor exact in sympy.
"""
import logging
from typing import Union

from sympy import Integer, Rational, bernoulli, factorint, gamma, pi, sqrt, symbols, zeta
from sympy.ntheory import jacobi_symbol, legendre_symbol

from src.genus.descriptor import GenusDescriptor
from src.genus.padic import JordanConstituent, dense_constituents, jordan_decomposition
from src.lattice.gram_lattice import GramLattice
from src.utils.exceptions import InvariantViolation, LatticeInputError

logger = logging.getLogger(__name__)

_x = symbols("x")


def _squarefree_part(n: int) -> int:
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            out *= p
    return sign * out


def fundamental_discriminant(D: int) -> int:
    m = _squarefree_part(D)
    return m if m % 4 == 1 else 4 * m


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n) for n > 0."""
    result = 1
    while n % 2 == 0:
        n //= 2
        if d % 2 == 0:
            return 0
        result *= 1 if d % 8 in (1, 7) else -1
    if n == 1:
        return result
    return result * jacobi_symbol(d % n, n)


def _generalized_bernoulli(k: int, d: int):
    """B_{k, chi_d} for the primitive real character of conductor |d|."""
    f = abs(d)
    if f == 1:
        return bernoulli(k, _x).subs(_x, 1) if k != 1 else Rational(1, 2)
    if k == 1:
        return Rational(sum(kronecker(d, a) * a for a in range(1, f + 1)), f)
    poly = bernoulli(k, _x)
    total = sum(kronecker(d, a) * poly.subs(_x, Rational(a, f)) for a in range(1, f + 1))
    return Integer(f) ** (k - 1) * total


def dirichlet_l_value(k: int, d: int):
    """L(k, chi_d) exactly, for k >= 1 of the same parity as chi_d (chi_d(-1) = sign d)."""
    delta = 0 if d > 0 else 1
    if (k - delta) % 2:
        raise InvariantViolation(f"L({k}, chi_{d}) is not a rational multiple of a power of pi")
    f = abs(d)
    sign = (-1) ** (1 + (k - delta) // 2)
    return sign * sqrt(f) / 2 * (2 * pi / f) ** k * _generalized_bernoulli(k, d) / gamma(k + 1)


def _species_factor(species: int, p: int):
    """Diagonal factor M(f_q) for a constituent of the given (signed) species."""
    if species == 0:
        return Integer(1)
    n = abs(species)
    s = (n + 1) // 2
    out = Integer(2)
    for k in range(1, s):
        out *= 1 - Rational(1, p ** (2 * k))
    if n % 2 == 0:
        out *= 1 - (1 if species > 0 else -1) * Rational(1, p**s)
    return 1 / out


def _odd_species(c: JordanConstituent) -> int:
    n = c.dimension
    if n % 2:
        return n
    square_class = legendre_symbol((-1) ** (n // 2) % c.p, c.p)
    return n if c.sign == square_class else -n


def _two_adic_species(dense, i: int) -> int:
    c = dense[i]
    n = c.dimension
    bound = any(0 <= j < len(dense) and dense[j].type_one for j in (i - 1, i + 1))
    if c.type_one and n % 2 == 0:
        t = n // 2 - 1
    else:
        t = n // 2
    if not bound:
        if c.octane in (0, 1, 7):
            return 2 * t
        if c.octane in (3, 4, 5):
            return -2 * t
    return 2 * t + 1


def _cross_term(constituents, p: int):
    exponent = Rational(0)
    for i, a in enumerate(constituents):
        for b in constituents[i + 1:]:
            exponent += Rational((b.scale - a.scale) * a.dimension * b.dimension, 2)
    return Integer(p) ** exponent


def local_mass(L: GramLattice, p: int):
    """m_p(L), the p-mass of L."""
    constituents = [c for c in jordan_decomposition(L, p) if c.dimension]
    out = _cross_term(constituents, p)
    if p != 2:
        for c in constituents:
            out *= _species_factor(_odd_species(c), p)
        return out
    dense = dense_constituents(constituents, 2)
    for i in range(len(dense)):
        out *= _species_factor(_two_adic_species(dense, i), 2)
    n_type_two = sum(c.dimension for c in dense if not c.type_one)
    n_adjacent_odd = sum(1 for a, b in zip(dense, dense[1:]) if a.type_one and b.type_one)
    return out * Integer(2) ** (n_adjacent_odd - n_type_two)


def _standard_p_mass(n: int, p: int):
    s = (n + 1) // 2
    out = Integer(2)
    for k in range(1, s):
        out *= 1 - Rational(1, p ** (2 * k))
    return 1 / out


def standard_mass(n: int, det: int):
    """std(L) for a positive definite lattice of rank n >= 2 and determinant det."""
    s = (n + 1) // 2
    out = 2 * pi ** Rational(-n * (n + 1), 4)
    for j in range(1, n + 1):
        out *= gamma(Rational(j, 2))
    for k in range(1, s):
        out *= zeta(2 * k)
    if n % 2 == 0:
        D = (-1) ** s * det
        d = fundamental_discriminant(D)
        value = dirichlet_l_value(s, d)
        # Euler factors at primes dividing 2 det are removed
        for p in factorint(2 * abs(det)):
            value *= 1 - kronecker(d, p) * Rational(1, p**s)
        out *= value
    return out


def mass(target: Union[GramLattice, GenusDescriptor]) -> Rational:
    """Exact mass sum 1/|O(L)| over the genus of a definite lattice.

    A descriptor is evaluated on its representative.

    Raises:
        LatticeInputError: indefinite input or a descriptor without a representative.
        InvariantViolation: the product fails to simplify to a rational.
    """
    L = target.representative if isinstance(target, GenusDescriptor) else target
    if L is None:
        raise LatticeInputError("mass needs a lattice in the genus")
    if not (L.is_positive_definite() or L.is_negative_definite()):
        raise LatticeInputError(f"mass is defined for definite lattices only, got signature {L.signature()}")
    n = L.rank
    if n == 0:
        return Rational(1)
    if n == 1:
        return Rational(1, 2)
    det = abs(L.det)
    value = standard_mass(n, det)
    for p in sorted(factorint(2 * det)):
        value *= local_mass(L, p) / _standard_p_mass(n, p)
    value = value.simplify() if not value.is_Rational else value
    if not value.is_Rational:
        raise InvariantViolation(f"mass did not reduce to a rational number: {value}")
    logger.debug(f"mass({L}) = {value}")
    return Rational(value)
