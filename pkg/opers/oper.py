import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import sympy

from lie.chevalley import (LieBasis, LieElement, LieStructureError, LoopElement, build_lie_basis,
                           gauge_by_cocharacter, gauge_by_exponent)
from lie.rootdata import (Coweight, RootSystem, RootSystemError, build_root_system, harish_chandra_equal,
                          is_dominant_integral)
from series.formal import LaurentSeries, PrecisionError, Scalar

DEFAULT_WORKING_PRECISION = 12
DEFAULT_BOUND = 4


class IrregularSingularityError(ValueError):
    pass


def _fraction(x) -> Fraction:
    return Fraction(str(x))


def _primitive(vector) -> List[Fraction]:
    entries = [_fraction(x) for x in vector]
    scale = 1
    for x in entries:
        scale = scale * x.denominator // gcd(scale, x.denominator)
    common = 0
    for x in entries:
        common = gcd(common, int(x * scale))
    return [x * scale / common for x in entries]


class GradeBlock:
    """Linear algebra of one principal grade g >= 0.

    ``lower`` indexes b_g (h for g = 0), ``upper`` indexes n_{g+1}. The block
    solves v = M y + P c, where M = ad(p_-) : n_{g+1} -> b_g and the columns of
    P span ker ad(p_+) in b_g.
    """

    def __init__(self, grade: int, lower: List[int], upper: List[int], inverse, slice_vectors: List[LieElement]):
        self.grade = grade
        self.lower = lower
        self.upper = upper
        self.inverse = inverse
        self.slice_vectors = slice_vectors

    def solve(self, values: Dict[int, object]):
        zero = None
        out = []
        for row in self.inverse:
            acc = zero
            for coef, a in zip(row, self.lower):
                value = values.get(a)
                if not coef or value is None:
                    continue
                term = value * coef
                acc = term if acc is None else acc + term
            out.append(acc)
        y = {b: z for b, z in zip(self.upper, out[:len(self.upper)]) if z is not None}
        c = out[len(self.upper):]
        return y, c


class PrincipalSlice:
    """Principal grading data and the Kostant slice ker ad(p_+) inside n.

    p_- = sum_i f_i and p_+ = sum_i c_i e_i, with sum_i c_i h_i = 2 rho_check,
    form the principal sl2-triple. The slice basis p_1, ..., p_l is ordered by
    grade (the exponents) and, within a grade, by nullspace order.
    """

    def __init__(self, basis: LieBasis):
        rs = basis.rs
        self.basis = basis
        self.p_minus = LieElement({basis.simple_f(i): 1 for i in range(rs.rank)})
        two_rho_check = [2 * x for x in rs.coweight_to_cartan_coords(rs.rho_check)]
        self.p_plus = LieElement({basis.simple_e(i): c for i, c in enumerate(two_rho_check)})
        self.blocks: List[GradeBlock] = []
        self.slice_vectors: List[LieElement] = []
        self.slice_grades: List[int] = []
        for g in range(rs.max_height + 1):
            block = self._block(g)
            if len(block.slice_vectors) != (rs.exponents.count(g) if g else 0):
                raise LieStructureError(f"Slice at grade {g} has {len(block.slice_vectors)} vectors, "
                                        f"exponents {rs.exponents} require {rs.exponents.count(g)}")
            self.blocks.append(block)
            self.slice_vectors.extend(block.slice_vectors)
            self.slice_grades.extend([g] * len(block.slice_vectors))

    def _block(self, g: int) -> GradeBlock:
        basis = self.basis
        lower = basis.indices_of_grade(g)
        upper = basis.indices_of_grade(g + 1)
        columns = []
        for b in upper:
            image = basis.bracket(self.p_minus, LieElement.basis_vector(b))
            columns.append(sympy.Matrix([sympy.Rational(str(image.coefficient(a))) for a in lower]))
        if upper:
            K = sympy.zeros(len(upper), len(lower))
            for col, a in enumerate(lower):
                image = basis.bracket(self.p_plus, LieElement.basis_vector(a))
                for row, b in enumerate(upper):
                    K[row, col] = sympy.Rational(str(image.coefficient(b)))
            kernel = [_primitive(v) for v in K.nullspace()]
        else:
            kernel = [[Fraction(int(row == j)) for row in range(len(lower))] for j in range(len(lower))]
        columns += [sympy.Matrix([sympy.Rational(str(x)) for x in v]) for v in kernel]
        Q = sympy.Matrix.hstack(*columns)
        if Q.shape != (len(lower), len(lower)):
            raise LieStructureError(f"Grade {g} block is not square: {Q.shape}")
        inverse = Q.inv()
        inverse = tuple(tuple(_fraction(inverse[r, c]) for c in range(len(lower))) for r in range(len(lower)))
        slice_vectors = [LieElement({a: _fraction(v[row]) for row, a in enumerate(lower)}) for v in kernel]
        return GradeBlock(g, lower, upper, inverse, slice_vectors)

    @property
    def rank(self) -> int:
        return len(self.slice_vectors)


@lru_cache(maxsize=None)
def principal_slice(basis: LieBasis) -> PrincipalSlice:
    return PrincipalSlice(basis)


# ----------------------------------------------------------------- values
@dataclass(frozen=True)
class NotMember:
    """Outcome of a failed membership test: the first obstructing t-degree and why."""
    degree: int
    reason: str
    precision: Optional[int] = None

    def to_json(self) -> dict:
        return {"member": False, "degree": self.degree, "reason": self.reason, "precision": self.precision}


class OperOperator:
    """The operator d/dt + sum_i f_i + v(t) with v a b-valued Laurent series."""

    def __init__(self, rs: RootSystem, v: LoopElement = None):
        self.rs = rs
        self.basis = build_lie_basis(rs)
        self.v = v if v is not None else LoopElement()
        outside = [self.basis.labels[a] for a in self.v.terms if not self.basis.is_borel(a)]
        if outside:
            raise ValueError(f"Oper part must lie in the Borel subalgebra, got components {outside}")

    def connection(self) -> LoopElement:
        """p_- + v."""
        return principal_slice(self.basis).p_minus.to_loop() + self.v

    @classmethod
    def from_connection(cls, rs: RootSystem, A: LoopElement) -> "OperOperator":
        basis = build_lie_basis(rs)
        for i in range(rs.rank):
            if A.component(basis.simple_f(i)) != 1:
                raise ValueError(f"Coefficient of f{i + 1} must be exactly 1")
        return cls(rs, A - principal_slice(basis).p_minus.to_loop())

    @property
    def precision(self) -> Optional[int]:
        return self.v.precision

    def to_json(self) -> dict:
        return {"type": self.rs.label, "v": self.v.to_json(self.basis)}

    @classmethod
    def from_json(cls, payload: dict) -> "OperOperator":
        rs = build_root_system(payload["type"])
        return cls(rs, LoopElement.from_json(payload.get("v", {}), build_lie_basis(rs)))

    def __eq__(self, other) -> bool:
        return isinstance(other, OperOperator) and self.rs == other.rs and self.v == other.v

    def __repr__(self) -> str:
        return f"OperOperator({self.rs.label}, {self.v})"


@dataclass(frozen=True)
class CanonicalOper:
    """Coordinates v_1, ..., v_l of an oper along the slice basis; v_j has dilation weight d_j + 1."""
    rs: RootSystem
    coords: Tuple[LaurentSeries, ...]

    def __post_init__(self):
        coords = tuple(LaurentSeries.coerce(s) for s in self.coords)
        if len(coords) != self.rs.rank:
            raise ValueError(f"{self.rs.label} opers have {self.rs.rank} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    @property
    def precision(self) -> Optional[int]:
        finite = [s.precision for s in self.coords if s.precision is not None]
        return min(finite) if finite else None

    def agrees_with(self, other: "CanonicalOper") -> bool:
        return self.rs == other.rs and all(a.agrees_with(b) for a, b in zip(self.coords, other.coords))

    def to_json(self) -> dict:
        return {"type": self.rs.label, "coords": [s.to_json() for s in self.coords]}

    @classmethod
    def from_json(cls, payload: dict) -> "CanonicalOper":
        rs = build_root_system(payload["type"])
        return cls(rs, tuple(LaurentSeries.from_json(s) for s in payload["coords"]))


@dataclass(frozen=True)
class LambdaNilpotentForm:
    """d/dt + sum_i t^<alpha_i, coweight> f_i + b_part(t) + nilpotent_residue / t."""
    coweight: Coweight
    b_part: LoopElement = field(compare=False)
    nilpotent_residue: LieElement = field(compare=False)
    precision: Optional[int] = None

    @property
    def rs(self) -> RootSystem:
        return build_root_system(self.coweight.system)

    def connection(self) -> LoopElement:
        basis = build_lie_basis(self.rs)
        terms = {basis.simple_f(i): LaurentSeries.monomial(1, int(c)) for i, c in enumerate(self.coweight.coords)}
        residue = {a: LaurentSeries.monomial(c, -1) for a, c in self.nilpotent_residue.terms.items()}
        return LoopElement(terms) + self.b_part + LoopElement(residue)

    def to_operator(self) -> OperOperator:
        """The oper d/dt + p_- + ... obtained by the torus gauge t^coweight."""
        A = gauge_by_cocharacter(build_lie_basis(self.rs), self.connection(), self.coweight)
        return OperOperator.from_connection(self.rs, A)

    def to_json(self) -> dict:
        basis = build_lie_basis(self.rs)
        return {"member": True,
                "type": self.rs.label,
                "coweight": self.coweight.to_json(),
                "b_part": self.b_part.to_json(basis),
                "nilpotent_residue": self.nilpotent_residue.to_json(basis),
                "precision": self.precision}


@dataclass(frozen=True)
class ResidueClass:
    """Weyl-orbit class of a residue, identified by Kostant slice coordinates of p_- + residue."""
    system: str
    token: Tuple[Fraction, ...]
    representative: Optional[Coweight] = field(default=None, compare=False)

    def contains(self, coweight: Coweight) -> bool:
        rs = build_root_system(self.system)
        if self.representative is not None:
            return harish_chandra_equal(self.representative, coweight, rs)
        return residue_class_of_coweight(rs, coweight).token == self.token

    def to_json(self) -> dict:
        return {"type": self.system,
                "token": [str(c) for c in self.token],
                "representative": None if self.representative is None else self.representative.to_json()}


# ------------------------------------------------------------- reduction
def _reduce_loop(sl: PrincipalSlice, A: LoopElement, euler: bool = False) -> List[object]:
    coords: List[object] = []
    for block in sl.blocks:
        y, c = block.solve({a: A.component(a) for a in block.lower})
        coords.extend(LaurentSeries.zero() if x is None else x for x in c)
        X = LoopElement(y)
        if X.terms:
            A = gauge_by_exponent(sl.basis, A, X, euler=euler)
    return coords


def reduce_to_canonical(op: OperOperator, precision: Optional[int] = None) -> CanonicalOper:
    """Slice representative of the N(K)-gauge class of ``op``.

    Grade by grade, the non-slice part of the grade-g component is removed by
    a gauge exp(X) with X in n_{g+1}; lower grades are left unchanged.

    Raises:
        PrecisionError: some coordinate is known to less than ``precision``.
    """
    sl = principal_slice(op.basis)
    coords = _reduce_loop(sl, op.connection())
    if precision is not None:
        short = [s.precision for s in coords if s.precision is not None and s.precision < precision]
        if short:
            raise PrecisionError(f"Canonical coordinates known only below t^{min(short)}, requested t^{precision}")
        coords = [s.truncate(precision) for s in coords]
    return CanonicalOper(op.rs, tuple(coords))


def embed_canonical(c: CanonicalOper) -> OperOperator:
    sl = principal_slice(build_lie_basis(c.rs))
    v = LoopElement()
    for series, vector in zip(c.coords, sl.slice_vectors):
        v = v + vector.to_loop() * series
    return OperOperator(c.rs, v)


def kostant_slice_coordinates(basis: LieBasis, element: LieElement) -> Tuple[Fraction, ...]:
    """Slice coordinates of the constant element p_- + element, element in b.

    Two such elements are N-conjugate iff their coordinates agree; for
    element = h in the Cartan subalgebra the coordinates depend only on W h.
    """
    if any(not basis.is_borel(a) for a in element.terms):
        raise ValueError("Kostant coordinates need an element of the Borel subalgebra")
    sl = principal_slice(basis)
    coords = _reduce_loop(sl, (sl.p_minus + element).to_loop())
    return tuple(s.coefficient(0) for s in coords)


def dilate_oper(c: CanonicalOper, a: Scalar) -> CanonicalOper:
    """t -> a t on canonical coordinates: v_j(t) -> a^(d_j + 1) v_j(a t)."""
    a = Fraction(a)
    if a == 0:
        raise ValueError("Dilation scale must be nonzero")
    sl = principal_slice(build_lie_basis(c.rs))
    return CanonicalOper(c.rs, tuple(s.dilate(a) * a ** (d + 1) for s, d in zip(c.coords, sl.slice_grades)))


def dilate_operator(op: OperOperator, a: Scalar) -> OperOperator:
    """Dilation on an arbitrary oper operator; e_alpha carries weight ht(alpha) + 1, h weight 1."""
    a = Fraction(a)
    if a == 0:
        raise ValueError("Dilation scale must be nonzero")
    basis = op.basis
    return OperOperator(op.rs, op.v.map_indexed(lambda k, s: s.dilate(a) * a ** (basis.grades[k] + 1)))


def sample_operator(rs: RootSystem, rng: np.random.Generator, low: int = -2, high: int = 3, spread: int = 2,
                    precision: Optional[int] = None) -> OperOperator:
    """Oper operator with random integer Laurent polynomials t^low ... t^high on every Borel component."""
    basis = build_lie_basis(rs)
    terms = {}
    for a in range(basis.dim):
        if basis.is_borel(a):
            coeffs = [int(c) for c in rng.integers(-spread, spread + 1, size=high - low + 1)]
            terms[a] = LaurentSeries(low, coeffs, precision)
    return OperOperator(rs, LoopElement(terms))


# -------------------------------------------------- lambda-nilpotent forms
def _as_canonical(op: Union[OperOperator, CanonicalOper]) -> CanonicalOper:
    return op if isinstance(op, CanonicalOper) else reduce_to_canonical(op)


def _twisted_form(c: CanonicalOper) -> Union[LoopElement, NotMember]:
    """The t d/dt form p_- - rho_check + sum_j t^(d_j + 1) v_j p_j, or NotMember if irregular."""
    rs = c.rs
    basis = build_lie_basis(rs)
    sl = principal_slice(basis)
    rho = rs.coweight_to_cartan_coords(rs.rho_check)
    S = sl.p_minus.to_loop() + LoopElement({basis.h(i): LaurentSeries.constant(-x) for i, x in enumerate(rho)})
    for series, vector, d in zip(c.coords, sl.slice_vectors, sl.slice_grades):
        twisted = series.shift(d + 1)
        if not twisted.is_zero and twisted.valuation < 0:
            return NotMember(twisted.valuation, "irregular", c.precision)
        S = S + vector.to_loop() * twisted
    return S


def _check_coweight(rs: RootSystem, coweight: Coweight):
    rs.check_member(coweight)
    if not is_dominant_integral(coweight):
        raise RootSystemError(f"Coweight {coweight.coords} is not dominant integral")


def _nilpotent_form_from_twisted(rs: RootSystem, S: LoopElement, coweight: Coweight,
                                working_precision: int = DEFAULT_WORKING_PRECISION):
    basis = build_lie_basis(rs)
    sl = principal_slice(basis)
    mu = coweight + rs.rho_check
    mu_cartan = rs.coweight_to_cartan_coords(mu)
    pairings = [int(p) for p in rs.root_coweight_pairings(mu)]
    top = max(pairings)
    precision = S.precision
    if precision is not None and precision < 1:
        raise PrecisionError("Constant term of the twisted oper is not tracked")

    # degree 0: bring the constant term to p_- - mu
    target = {basis.h(i): -x for i, x in enumerate(mu_cartan)}
    A = S
    for block in sl.blocks:
        values = {a: A.component(a).coefficient(0) - target.get(a, 0) for a in block.lower}
        y, c = block.solve(values)
        if any(x for x in c if x is not None):
            return NotMember(0, "residue", precision)
        X = LoopElement({b: LaurentSeries.constant(x) for b, x in y.items() if x})
        if X.terms:
            A = gauge_by_exponent(basis, A, X, euler=True)

    # decided at t^top; exact inputs need no slack
    needed = top + working_precision
    if precision is not None and precision <= needed:
        raise PrecisionError(f"Decision at t^{top} needs the twisted oper through t^{needed}, "
                             f"known below t^{precision}")

    # degree k: kill e_gamma t^k whenever <gamma, mu> > k
    lowering = {}
    for gamma in range(basis.num_roots):
        for i in range(rs.rank):
            up = basis.root_shift(gamma, i, +1)
            if up is not None:
                lowering.setdefault(gamma, []).append((up, int(basis.ad[basis.simple_f(i)][gamma, up])))
    residue: Dict[int, Fraction] = {}
    for k in range(1, top + 1):
        X: Dict[int, Fraction] = {}
        for gamma in sorted((g for g in range(basis.num_roots) if pairings[g] > k), key=lambda g: (-pairings[g], g)):
            lowered = sum((X.get(up, 0) * n for up, n in lowering.get(gamma, ())), Fraction(0))
            X[gamma] = (A.component(gamma).coefficient(k) - lowered) / (k - pairings[gamma])
        gauge = LoopElement({gamma: LaurentSeries.monomial(x, k) for gamma, x in X.items() if x})
        if gauge.terms:
            A = gauge_by_exponent(basis, A, gauge, euler=True)
        for alpha in range(basis.num_roots):
            if pairings[alpha] == k:
                residue[alpha] = A.component(alpha).coefficient(k)

    # undo the twist by mu(t) and the factor t
    b_terms = {}
    for i in range(rs.rank):
        b_terms[basis.h(i)] = (A.component(basis.h(i)) + mu_cartan[i]).shift(-1)
    for alpha in range(basis.num_roots):
        shifted = A.component(alpha).shift(-pairings[alpha]) - residue[alpha]
        b_terms[alpha] = shifted.shift(-1)
    b_part = LoopElement(b_terms)
    return LambdaNilpotentForm(coweight, b_part, LieElement(residue), b_part.precision)


def _check_working_precision(working_precision: int):
    if working_precision < 0:
        raise ValueError(f"Working precision must be nonnegative, got {working_precision}")


def to_lambda_nilpotent(op: Union[OperOperator, CanonicalOper], coweight: Coweight,
                        working_precision: int = DEFAULT_WORKING_PRECISION) -> Union[LambdaNilpotentForm, NotMember]:
    """Bring an oper to the lambda-nilpotent shape for the dominant coweight, if possible.

    Works in the t d/dt frame twisted by (coweight + rho_check)(t). The only
    obstructions are an irregular singularity and a mismatch of the constant
    term (the residue class); past degree 0 the elimination always succeeds.
    A truncated oper must be known ``working_precision`` degrees past the
    decision degree (the largest <alpha, coweight + rho_check>).

    Raises:
        RootSystemError: coweight not dominant integral.
        PrecisionError: the tracked precision ends before decision degree + working_precision.
    """
    _check_working_precision(working_precision)
    c = _as_canonical(op)
    _check_coweight(c.rs, coweight)
    S = _twisted_form(c)
    if isinstance(S, NotMember):
        return S
    return _nilpotent_form_from_twisted(c.rs, S, coweight, working_precision)


def is_lambda_regular(form: LambdaNilpotentForm) -> bool:
    return not form.nilpotent_residue


def dominant_coweights(rs: RootSystem, bound: int):
    for coords in itertools.product(range(bound + 1), repeat=rs.rank):
        yield rs.coweight(coords)


def classify_monodromy_free(c: Union[OperOperator, CanonicalOper], bound: int = DEFAULT_BOUND,
                            working_precision: int = DEFAULT_WORKING_PRECISION) -> Optional[Coweight]:
    """The dominant coweight (coordinates <= bound) whose lambda-regular locus contains c, or None."""
    if bound < 0:
        raise ValueError("Bound must be nonnegative")
    _check_working_precision(working_precision)
    c = _as_canonical(c)
    S = _twisted_form(c)
    if isinstance(S, NotMember):
        return None
    for coweight in dominant_coweights(c.rs, bound):
        outcome = _nilpotent_form_from_twisted(c.rs, S, coweight, working_precision)
        if isinstance(outcome, LambdaNilpotentForm) and is_lambda_regular(outcome):
            return coweight
    return None


# ---------------------------------------------------------------- residues
def residue_class_of_coweight(rs: RootSystem, coweight: Coweight) -> ResidueClass:
    """Class of the residue coweight: slice coordinates of p_- + coweight (in the h basis)."""
    basis = build_lie_basis(rs)
    cartan = rs.coweight_to_cartan_coords(coweight)
    token = kostant_slice_coordinates(basis, LieElement({basis.h(i): x for i, x in enumerate(cartan)}))
    return ResidueClass(rs.label, token, coweight)


def residue_class(x: Union[OperOperator, CanonicalOper, LambdaNilpotentForm]) -> ResidueClass:
    """Weyl-orbit class of the residue of a regular-singular oper.

    For a lambda-nilpotent form with coweight lambda the class is that of
    -lambda - rho_check.

    Raises:
        IrregularSingularityError: the oper does not have a regular singularity.
    """
    if isinstance(x, LambdaNilpotentForm):
        rs = x.rs
        return residue_class_of_coweight(rs, -(x.coweight + rs.rho_check))
    c = _as_canonical(x)
    S = _twisted_form(c)
    if isinstance(S, NotMember):
        raise IrregularSingularityError(f"Oper has an irregular singularity (twisted degree {S.degree})")
    basis = build_lie_basis(c.rs)
    constant = LieElement({a: s.coefficient(0) for a, s in S.terms.items() if basis.is_borel(a)})
    return ResidueClass(c.rs.label, kostant_slice_coordinates(basis, constant))
