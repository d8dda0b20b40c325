from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from lie.rootdata import RootSystem, Weight, is_dominant_integral

DEFAULT_ORDER = 40


class QSeries:
    """Power series in q with integer coefficients, known for q^0 ... q^(order-1).

    Coefficients are Python ints, so Euler products never overflow.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int], order: Optional[int] = None):
        coeffs = [int(c) for c in coeffs]
        if order is not None:
            coeffs = (coeffs + [0] * max(order, 0))[:max(order, 0)]
        if not coeffs:
            raise ValueError("QSeries needs order >= 1")
        self.coeffs = tuple(coeffs)

    @classmethod
    def one(cls, order: int) -> "QSeries":
        return cls([1], order)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __mul__(self, other: "QSeries") -> "QSeries":
        n = min(self.order, other.order)
        out = [0] * n
        for i, a in enumerate(self.coeffs[:n]):
            if a:
                for j, b in enumerate(other.coeffs[:n - i]):
                    out[i + j] += a * b
        return QSeries(out)

    def __truediv__(self, other: "QSeries") -> "QSeries":
        if other.coeffs[0] != 1:
            raise ZeroDivisionError("QSeries division needs a divisor with constant term 1")
        n = min(self.order, other.order)
        out: List[int] = []
        for k in range(n):
            out.append(self.coeffs[k] - sum(other.coeffs[j] * out[k - j] for j in range(1, k + 1)))
        return QSeries(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, QSeries) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def first_difference(self, other: "QSeries") -> Optional[int]:
        """Lowest power of q where the two series differ (within the common order)."""
        for k, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return k
        return None

    @property
    def is_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def to_json(self) -> dict:
        return {"order": self.order, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, payload: dict) -> "QSeries":
        return cls(payload["coeffs"], int(payload["order"]))

    def __repr__(self) -> str:
        terms = [f"{c}q^{k}" if k else str(c) for k, c in enumerate(self.coeffs) if c]
        return (" + ".join(terms) or "0") + f" + O(q^{self.order})"


# ------------------------------------------------------------- products
def euler_product(order: int, exponents: Iterable[int]) -> QSeries:
    """prod_n (1 - q^n)^-1 over a multiset of positive exponents, truncated at q^order."""
    if order < 1:
        raise ValueError(f"Order must be positive, got {order}")
    coeffs = [1] + [0] * (order - 1)
    for n in exponents:
        if n <= 0:
            raise ValueError(f"Euler factor exponent must be positive, got {n}")
        if n >= order:
            continue
        for k in range(n, order):
            coeffs[k] += coeffs[k - n]
    return QSeries(coeffs)


def finite_product(exponents: Iterable[int], order: Optional[int] = None) -> QSeries:
    """prod_n (1 - q^n) as a polynomial (truncated at q^order when given)."""
    if order is not None and order < 1:
        raise ValueError(f"Order must be positive, got {order}")
    exponents = list(exponents)
    degree = sum(exponents) + 1
    size = degree if order is None else order
    coeffs = [1] + [0] * (size - 1)
    for n in exponents:
        for k in range(size - 1, n - 1, -1):
            coeffs[k] -= coeffs[k - n]
    return QSeries(coeffs)


def _check_dominant(rs: RootSystem, weight: Weight):
    rs.check_member(weight)
    if not is_dominant_integral(weight):
        raise ValueError(f"Weight {weight.to_json()} is not dominant integral")


def shifted_pairings(rs: RootSystem, weight: Weight) -> List[int]:
    """<alpha_check, weight + rho> over the positive coroots."""
    _check_dominant(rs, weight)
    return [int(p) for p in rs.coroot_weight_pairings(weight + rs.rho)]


def _all_positive(order: int, start: int = 1) -> range:
    return range(start, max(order, start))


# ----------------------------------------------------------- characters
def char_z_reg(rs: RootSystem, weight: Weight, order: int = DEFAULT_ORDER) -> QSeries:
    """Character of functions on lambda-regular opers.

    Expanded from prod_{n>0} (1 - q^n)^-l * prod_{alpha_check} (1 - q^<alpha_check, lambda + rho>),
    which equals the exponent form after the exponent identity.
    """
    factors = [n for n in _all_positive(order) for _ in range(rs.rank)]
    return euler_product(order, factors) * finite_product(shifted_pairings(rs, weight), order)


def char_operator_space(rs: RootSystem, weight: Weight, order: int = DEFAULT_ORDER) -> QSeries:
    factors = [n for n in _all_positive(order) for _ in range(rs.rank)]
    factors += [n + p for p in shifted_pairings(rs, weight) for n in _all_positive(order) if n + p < order]
    return euler_product(order, factors)


def char_conjugated_N(rs: RootSystem, weight: Weight, order: int = DEFAULT_ORDER) -> QSeries:
    factors = [n + p for p in shifted_pairings(rs, weight) for n in range(order) if n + p < order]
    return euler_product(order, factors)


def char_z_reg_via_quotient(rs: RootSystem, weight: Weight, order: int = DEFAULT_ORDER) -> QSeries:
    """Operator-space character divided by the character of the conjugated N(O)."""
    return char_operator_space(rs, weight, order) / char_conjugated_N(rs, weight, order)


def principal_dimension_polynomial(rs: RootSystem, weight: Weight) -> List[int]:
    """prod (1 - q^<alpha_check, lambda + rho>) / (1 - q^<alpha_check, rho>) as an exact polynomial."""
    numerator = list(finite_product(shifted_pairings(rs, weight)).coeffs)
    for k in (sum(c) for c in rs.positive_coroots):
        # divide by (1 - q^k): r_n = p_n + r_{n-k}
        quotient = [0] * (len(numerator) - k)
        for n in range(len(quotient)):
            quotient[n] = numerator[n] + (quotient[n - k] if n >= k else 0)
        product = quotient + [0] * k
        for n, r in enumerate(quotient):
            product[n + k] -= r
        if product != numerator:
            raise ArithmeticError(f"(1 - q^{k}) does not divide the principal character numerator")
        numerator = quotient
    return numerator


def q_dim(rs: RootSystem, weight: Weight, order: int = DEFAULT_ORDER) -> QSeries:
    return QSeries(principal_dimension_polynomial(rs, weight), order)


def weyl_dimension(rs: RootSystem, weight: Weight) -> int:
    """Weyl dimension formula prod <alpha_check, lambda + rho> / <alpha_check, rho>."""
    value = Fraction(1)
    for p, coroot in zip(shifted_pairings(rs, weight), rs.positive_coroots):
        value *= Fraction(p, sum(coroot))
    return int(value)


def char_V_a_minus(rs: RootSystem, order: int = DEFAULT_ORDER) -> QSeries:
    factors = [m for d in rs.exponents for m in _all_positive(order, d + 1)]
    return euler_product(order, factors)


def exponent_identity_check(rs: RootSystem) -> bool:
    """prod over positive coroots of (1 - q^height) equals prod_i prod_{m <= d_i} (1 - q^m)."""
    left = finite_product(sum(c) for c in rs.positive_coroots)
    right = finite_product(m for d in rs.exponents for m in range(1, d + 1))
    return left == right


def theorem_si_coh_check(rs: RootSystem, weight: Weight, order: int = DEFAULT_ORDER) -> bool:
    """q_dim(lambda) * ch V(a_-) equals the lambda-regular oper character to q^order."""
    return q_dim(rs, weight, order) * char_V_a_minus(rs, order) == char_z_reg(rs, weight, order)


# ------------------------------------------------------ weight multiplicities
def _weight_root_coords(rs: RootSystem, coords: Sequence) -> Tuple[Fraction, ...]:
    # lambda_j = sum_i x_i A_ij, so x = (A^T)^-1 lambda
    inverse = rs.cartan_inverse
    return tuple(sum((inverse[j][i] * Fraction(c) for j, c in enumerate(coords)), Fraction(0)) for i in range(rs.rank))


def weight_multiplicities(rs: RootSystem, weight: Weight) -> Dict[Tuple[int, ...], int]:
    """Freudenthal multiplicities of V_lambda, keyed by lambda - mu in simple-root coordinates."""
    _check_dominant(rs, weight)
    top = _weight_root_coords(rs, weight.coords)
    rho = _weight_root_coords(rs, rs.rho.coords)
    shifted = tuple(a + b for a, b in zip(top, rho))
    norm_top = rs.inner(shifted, shifted)
    depth_max = int(2 * sum(top))
    mult: Dict[Tuple[int, ...], int] = {(0,) * rs.rank: 1}
    levels: List[List[Tuple[int, ...]]] = [[(0,) * rs.rank]]
    for depth in range(1, depth_max + 1):
        candidates = sorted({tuple(b + int(i == j) for j, b in enumerate(beta))
                             for beta in levels[-1] for i in range(rs.rank)})
        level = []
        for beta in candidates:
            mu = tuple(t - b for t, b in zip(top, beta))
            total = Fraction(0)
            for root in rs.positive_roots:
                k = 1
                while True:
                    above = tuple(b - k * r for b, r in zip(beta, root))
                    if any(c < 0 for c in above):
                        break
                    m = mult.get(above, 0)
                    if m:
                        point = tuple(x + k * r for x, r in zip(mu, root))
                        total += m * rs.inner(point, root)
                    k += 1
            mu_rho = tuple(a + b for a, b in zip(mu, rho))
            gap = norm_top - rs.inner(mu_rho, mu_rho)
            if gap == 0:
                continue
            value = 2 * total / gap
            if value:
                if value.denominator != 1 or value < 0:
                    raise ArithmeticError(f"Non-integral multiplicity {value} at lambda - {beta}")
                mult[beta] = int(value)
                level.append(beta)
        if not level:
            break
        levels.append(level)
    return mult


def principal_character_from_weights(rs: RootSystem, weight: Weight) -> List[int]:
    """sum over weights mu of mult(mu) q^height(lambda - mu)."""
    mult = weight_multiplicities(rs, weight)
    degree = max(sum(beta) for beta in mult)
    coeffs = [0] * (degree + 1)
    for beta, m in mult.items():
        coeffs[sum(beta)] += m
    return coeffs
