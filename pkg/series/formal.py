from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Optional, Union

Scalar = Union[int, Fraction]


class PrecisionError(ArithmeticError):
    """Raised when a result would need coefficients beyond the tracked precision."""


def _min_precision(*precisions: Optional[int]) -> Optional[int]:
    finite = [p for p in precisions if p is not None]
    return min(finite) if finite else None


class LaurentSeries:
    """Truncated formal Laurent series in t with exact rational coefficients.

    A series stores the coefficients of t^valuation ... t^(precision-1); every
    higher power is unknown. ``precision=None`` marks an exact Laurent
    polynomial (all higher coefficients are zero).

    Normalization trims leading zeros. A series that is zero up to its
    precision p is stored as a single zero coefficient at t^(p-1); the exact
    zero has no stored coefficients.
    """

    __slots__ = ("valuation", "coeffs", "precision")

    def __init__(self, valuation: int = 0, coeffs: Iterable[Scalar] = (), precision: Optional[int] = None):
        coeffs = [Fraction(c) for c in coeffs]
        if precision is not None:
            coeffs = coeffs[:max(precision - valuation, 0)]
        start = 0
        while start < len(coeffs) and coeffs[start] == 0:
            start += 1
        coeffs = coeffs[start:]
        valuation += start
        if precision is None:
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
            if not coeffs:
                valuation = 0
        elif not coeffs:
            valuation = precision - 1
            coeffs = [Fraction(0)]
        else:
            coeffs.extend([Fraction(0)] * (precision - valuation - len(coeffs)))
        self.valuation = valuation
        self.coeffs = tuple(coeffs)
        self.precision = precision

    # ---------------------------------------------------------------- builders
    @classmethod
    def from_terms(cls, terms: Mapping[int, Scalar], precision: Optional[int] = None) -> "LaurentSeries":
        nonzero = {n: Fraction(c) for n, c in terms.items() if c and (precision is None or n < precision)}
        if not nonzero:
            return cls.zero(precision)
        low = min(nonzero)
        high = precision if precision is not None else max(nonzero) + 1
        return cls(low, [nonzero.get(n, 0) for n in range(low, high)], precision)

    @classmethod
    def zero(cls, precision: Optional[int] = None) -> "LaurentSeries":
        return cls(0, (), precision)

    @classmethod
    def constant(cls, c: Scalar, precision: Optional[int] = None) -> "LaurentSeries":
        return cls(0, [c], precision)

    @classmethod
    def monomial(cls, c: Scalar, degree: int, precision: Optional[int] = None) -> "LaurentSeries":
        return cls(degree, [c], precision)

    @classmethod
    def coerce(cls, value) -> "LaurentSeries":
        if isinstance(value, LaurentSeries):
            return value
        if isinstance(value, Rational):
            return cls.constant(value)
        raise TypeError(f"Cannot interpret {value!r} as a Laurent series")

    # -------------------------------------------------------------- inspection
    @property
    def is_exact(self) -> bool:
        return self.precision is None

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def order(self) -> Optional[int]:
        """Lower bound for the true valuation; None for the exact zero."""
        if self.is_zero:
            return self.precision
        return self.valuation

    def terms(self) -> Dict[int, Fraction]:
        return {self.valuation + i: c for i, c in enumerate(self.coeffs) if c}

    def coefficient(self, n: int) -> Fraction:
        if self.precision is not None and n >= self.precision:
            raise PrecisionError(f"Coefficient of t^{n} requested, series known below t^{self.precision}")
        index = n - self.valuation
        if 0 <= index < len(self.coeffs):
            return self.coeffs[index]
        return Fraction(0)

    def residue_coefficient(self) -> Fraction:
        return self.coefficient(-1)

    # -------------------------------------------------------------- arithmetic
    def __add__(self, other) -> "LaurentSeries":
        try:
            other = LaurentSeries.coerce(other)
        except TypeError:
            return NotImplemented
        terms = self.terms()
        for n, c in other.terms().items():
            terms[n] = terms.get(n, 0) + c
        return LaurentSeries.from_terms(terms, _min_precision(self.precision, other.precision))

    __radd__ = __add__

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.valuation, [-c for c in self.coeffs], self.precision)

    def __sub__(self, other) -> "LaurentSeries":
        try:
            other = LaurentSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentSeries":
        return LaurentSeries.coerce(other) - self

    def __mul__(self, other) -> "LaurentSeries":
        try:
            other = LaurentSeries.coerce(other)
        except TypeError:
            return NotImplemented
        if (self.is_exact and self.is_zero) or (other.is_exact and other.is_zero):
            return LaurentSeries.zero()
        bounds = []
        if self.precision is not None:
            bounds.append(self.precision + other.order)
        if other.precision is not None:
            bounds.append(other.precision + self.order)
        precision = min(bounds) if bounds else None
        terms: Dict[int, Fraction] = {}
        right = other.terms()
        for n, a in self.terms().items():
            for m, b in right.items():
                if precision is None or n + m < precision:
                    terms[n + m] = terms.get(n + m, 0) + a * b
        return LaurentSeries.from_terms(terms, precision)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LaurentSeries":
        if isinstance(other, Rational):
            if other == 0:
                raise ZeroDivisionError("Division of a Laurent series by zero")
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, LaurentSeries):
            return self * other.invert()
        return NotImplemented

    def invert(self, precision: Optional[int] = None) -> "LaurentSeries":
        """Multiplicative inverse.

        Args:
            precision (int, optional): absolute precision for the inverse of an exact
                series that is not a monomial (its inverse is an infinite series).

        Raises:
            ZeroDivisionError: the leading coefficient is zero (series zero up to precision).
            PrecisionError: exact non-monomial input and no precision given.
        """
        if self.is_zero:
            raise ZeroDivisionError("Leading coefficient is zero, series is not invertible")
        v = self.valuation
        if self.is_exact and len(self.coeffs) == 1:
            return LaurentSeries.monomial(1 / self.coeffs[0], -v)
        if self.precision is not None:
            target = self.precision - 2 * v
        elif precision is not None:
            target = precision
        else:
            raise PrecisionError("Inverse of an exact non-monomial series needs an explicit precision")
        length = target + v
        if length <= 0:
            raise PrecisionError("Not enough tracked coefficients to invert")
        lead = self.coeffs[0]
        inverse = [1 / lead]
        for n in range(1, length):
            acc = Fraction(0)
            for k in range(1, min(n, len(self.coeffs) - 1) + 1):
                acc += self.coeffs[k] * inverse[n - k]
            inverse.append(-acc / lead)
        return LaurentSeries(-v, inverse, target)

    # ------------------------------------------------------------- operations
    def derivative(self) -> "LaurentSeries":
        terms = {n - 1: n * c for n, c in self.terms().items() if n}
        precision = None if self.precision is None else self.precision - 1
        return LaurentSeries.from_terms(terms, precision)

    def euler_derivative(self) -> "LaurentSeries":
        """t * d/dt; keeps the precision."""
        return LaurentSeries.from_terms({n: n * c for n, c in self.terms().items()}, self.precision)

    def dilate(self, scale: Scalar) -> "LaurentSeries":
        """Substitution t -> scale * t."""
        scale = Fraction(scale)
        if scale == 0:
            raise ValueError("Dilation scale must be nonzero")
        return LaurentSeries.from_terms({n: c * scale ** n for n, c in self.terms().items()}, self.precision)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiplication by t^k."""
        precision = None if self.precision is None else self.precision + k
        return LaurentSeries.from_terms({n + k: c for n, c in self.terms().items()}, precision)

    def truncate(self, precision: int) -> "LaurentSeries":
        return LaurentSeries.from_terms(self.terms(), _min_precision(self.precision, precision))

    def agrees_with(self, other) -> bool:
        """Equality up to the smaller of the two precisions."""
        other = LaurentSeries.coerce(other)
        precision = _min_precision(self.precision, other.precision)
        if precision is None:
            return self == other
        return self.truncate(precision) == other.truncate(precision)

    # ------------------------------------------------------------ comparisons
    def __eq__(self, other) -> bool:
        if isinstance(other, Rational):
            other = LaurentSeries.constant(other)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self.precision == other.precision and self.terms() == other.terms()

    def __hash__(self) -> int:
        return hash((self.precision, tuple(sorted(self.terms().items()))))

    def __repr__(self) -> str:
        parts = []
        for n, c in sorted(self.terms().items()):
            if n == 0:
                parts.append(str(c))
            else:
                parts.append(f"{c}*t^{n}")
        body = " + ".join(parts) if parts else "0"
        if self.precision is not None:
            body += f" + O(t^{self.precision})"
        return body

    # ------------------------------------------------------------------- json
    def to_json(self) -> dict:
        return {"valuation": self.valuation,
                "precision": self.precision,
                "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, payload: dict) -> "LaurentSeries":
        try:
            return cls(int(payload.get("valuation", 0)),
                       [Fraction(c) for c in payload["coeffs"]],
                       None if payload.get("precision") is None else int(payload["precision"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Malformed Laurent series payload {payload!r}: {e}") from e
