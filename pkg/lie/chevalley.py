from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from lie.rootdata import Coweight, RootSystem, RootSystemError, build_root_system
from series.formal import LaurentSeries, PrecisionError, Scalar


class LieStructureError(AssertionError):
    pass


class LieBasis:
    """Chevalley basis e_alpha, f_alpha (alpha > 0), h_i with integer structure constants.

    Basis indices: e_k -> k, f_k -> N + k, h_i -> 2N + i, where k runs over
    ``rs.positive_roots``. ``ad[a]`` is the matrix of ad(x_a), so
    ``ad[a][c, b]`` is the coefficient of x_c in [x_a, x_b].
    """

    def __init__(self, rs: RootSystem, self_check: bool = True):
        self.rs = rs
        self.num_roots = N = rs.num_positive_roots
        self.rank = rs.rank
        self.dim = 2 * N + rs.rank
        self.labels = tuple([self._root_label("e", r) for r in rs.positive_roots]
                            + [self._root_label("f", r) for r in rs.positive_roots]
                            + [f"h{i + 1}" for i in range(rs.rank)])
        self.label_index = {label: a for a, label in enumerate(self.labels)}
        self.grades = tuple(list(rs.heights) + [-h for h in rs.heights] + [0] * rs.rank)

        self.decomposition, self.string_length = self._decompositions()
        f_coef, e_coef = self._weyl_basis_action()
        scale = self._chevalley_scale()
        self.ad = self._adjoint_matrices(f_coef, e_coef, scale)
        self.ad.setflags(write=False)
        self.structure = self._sparse_structure()
        if self_check:
            self.verify()

    @staticmethod
    def _root_label(prefix: str, root: Sequence[int]) -> str:
        return f"{prefix}[{','.join(str(c) for c in root)}]"

    # ------------------------------------------------------------ indices
    def e(self, k: int) -> int:
        return k

    def f(self, k: int) -> int:
        return self.num_roots + k

    def h(self, i: int) -> int:
        return 2 * self.num_roots + i

    def is_positive(self, a: int) -> bool:
        return a < self.num_roots

    def is_cartan(self, a: int) -> bool:
        return a >= 2 * self.num_roots

    def is_borel(self, a: int) -> bool:
        return self.is_positive(a) or self.is_cartan(a)

    def index(self, label: str) -> int:
        try:
            return self.label_index[label.replace(" ", "")]
        except KeyError:
            raise ValueError(f"Unknown basis label {label!r} for {self.rs.label}") from None

    def simple_e(self, i: int) -> int:
        return self.rs.simple_root_index(i)

    def simple_f(self, i: int) -> int:
        return self.f(self.rs.simple_root_index(i))

    def indices_of_grade(self, g: int) -> List[int]:
        return [a for a, grade in enumerate(self.grades) if grade == g]

    # --------------------------------------------------------- construction
    def _decompositions(self):
        """xi = alpha_i + beta with i minimal, and the alpha_i-string length p below beta."""
        rs = self.rs
        decomposition: Dict[int, Tuple[int, int]] = {}
        string_length: Dict[int, int] = {}
        for k, xi in enumerate(rs.positive_roots):
            if sum(xi) == 1:
                continue
            for i in range(rs.rank):
                beta = tuple(c - int(i == j) for j, c in enumerate(xi))
                if beta in rs.root_index:
                    decomposition[k] = (i, rs.root_index[beta])
                    p = 0
                    while tuple(c - (p + 1) * int(i == j) for j, c in enumerate(beta)) in rs.root_index:
                        p += 1
                    string_length[k] = p
                    break
        return decomposition, string_length

    def root_shift(self, k: int, i: int, sign: int) -> Optional[int]:
        root = tuple(c + sign * int(i == j) for j, c in enumerate(self.rs.positive_roots[k]))
        return self.rs.root_index.get(root)

    def _weyl_basis_action(self):
        """Brackets of simple root vectors with the vectors w_xi = [e_i, w_beta].

        Root spaces are one-dimensional, so [f_j, w_xi] = F[j, xi] w_{xi - alpha_j}
        and [e_m, w_beta] = E[m, beta] w_{beta + alpha_m} are single scalars. Both
        tables are filled height by height from [f_j, e_i] = -delta_ij h_i.
        """
        rs = self.rs
        F: Dict[Tuple[int, int], Fraction] = {}
        E: Dict[Tuple[int, int], Fraction] = {}

        def f_after_e(j: int, m: int, beta: int) -> Fraction:
            # coefficient of [f_j, [e_m, w_beta]] along w_{beta + alpha_m - alpha_j}
            if j == m:
                value = Fraction(-rs.coroot_pairing(rs.positive_roots[beta], m))
                gamma = self.root_shift(beta, m, -1)
                if gamma is not None:
                    value += F[(m, beta)] * E.get((m, gamma), Fraction(0))
                return value
            if rs.heights[beta] == 1 and rs.positive_roots[beta][j] == 1:
                return Fraction(int(rs.cartan[m, j]))
            gamma = self.root_shift(beta, j, -1)
            if gamma is None:
                return Fraction(0)
            return F[(j, beta)] * E.get((m, gamma), Fraction(0))

        by_height: Dict[int, List[int]] = {}
        for k, height in enumerate(rs.heights):
            by_height.setdefault(height, []).append(k)

        for height in range(2, rs.max_height + 1):
            for xi in by_height[height]:
                i, beta = self.decomposition[xi]
                for j in range(rs.rank):
                    if self.root_shift(xi, j, -1) is not None:
                        F[(j, xi)] = f_after_e(j, i, beta)
            for beta in by_height[height - 1]:
                for m in range(rs.rank):
                    xi = self.root_shift(beta, m, +1)
                    if xi is None:
                        continue
                    if self.decomposition[xi] == (m, beta):
                        E[(m, beta)] = Fraction(1)
                        continue
                    for j in range(rs.rank):
                        if F.get((j, xi)):
                            E[(m, beta)] = f_after_e(j, m, beta) / F[(j, xi)]
                            break
                    else:
                        raise LieStructureError(f"Root vector {self.labels[xi]} is annihilated by every f_j")
        return F, E

    def _chevalley_scale(self) -> List[Fraction]:
        # e_xi = [e_i, e_beta] / (p + 1), so e_xi = K_xi w_xi with K_xi = K_beta / (p + 1)
        scale = [Fraction(1)] * self.num_roots
        for xi in sorted(self.decomposition, key=lambda k: self.rs.heights[k]):
            i, beta = self.decomposition[xi]
            scale[xi] = scale[beta] / (self.string_length[xi] + 1)
        return scale

    def _swap(self) -> np.ndarray:
        N, d = self.num_roots, self.dim
        P = np.zeros((d, d), dtype=np.int64)
        for k in range(N):
            P[N + k, k] = P[k, N + k] = 1
        for i in range(self.rank):
            P[2 * N + i, 2 * N + i] = 1
        return P

    def _adjoint_matrices(self, F, E, scale) -> np.ndarray:
        rs, N, d = self.rs, self.num_roots, self.dim
        ad = np.zeros((d, d, d), dtype=np.int64)

        def as_int(value: Fraction, what: str) -> int:
            if value.denominator != 1:
                raise LieStructureError(f"Non-integral structure constant {value} in {what}")
            return int(value)

        for i in range(rs.rank):
            a = rs.simple_root_index(i)
            M = ad[self.e(a)]
            for beta in range(N):
                up = self.root_shift(beta, i, +1)
                if up is not None:
                    M[self.e(up), self.e(beta)] = as_int(E.get((i, beta), Fraction(0)) * scale[beta] / scale[up],
                                                         f"[e{i + 1}, {self.labels[beta]}]")
                down = self.root_shift(beta, i, -1)
                # [e_i, f_beta] = theta([f_i, e_beta])
                if down is not None:
                    M[self.f(down), self.f(beta)] = -as_int(F[(i, beta)] * scale[beta] / scale[down],
                                                            f"[f{i + 1}, {self.labels[beta]}]")
            M[self.h(i), self.f(a)] = 1
            for j in range(rs.rank):
                M[self.e(a), self.h(j)] = -int(rs.cartan[i, j])

        P = self._swap()
        for j in range(rs.rank):
            for k, root in enumerate(rs.positive_roots):
                n = rs.coroot_pairing(root, j)
                ad[self.h(j)][self.e(k), self.e(k)] = n
                ad[self.h(j)][self.f(k), self.f(k)] = -n

        for xi in sorted(self.decomposition, key=lambda k: rs.heights[k]):
            i, beta = self.decomposition[xi]
            a = rs.simple_root_index(i)
            commutator = ad[a] @ ad[beta] - ad[beta] @ ad[a]
            p1 = self.string_length[xi] + 1
            if (commutator % p1).any():
                raise LieStructureError(f"ad({self.labels[xi]}) is not integral")
            ad[self.e(xi)] = commutator // p1
        # f_alpha = -theta(e_alpha) and theta = -P
        for k in range(N):
            ad[self.f(k)] = -P @ ad[self.e(k)] @ P
        return ad

    def _sparse_structure(self) -> Dict[Tuple[int, int], Tuple[Tuple[int, int], ...]]:
        structure = {}
        for a in range(self.dim):
            cols = np.nonzero(self.ad[a].any(axis=0))[0]
            for b in cols:
                rows = np.nonzero(self.ad[a][:, b])[0]
                structure[(a, int(b))] = tuple((int(c), int(self.ad[a][c, b])) for c in rows)
        return structure

    # ------------------------------------------------------------ checks
    def verify(self):
        """Structure-constant self-check; raises LieStructureError on the first violation."""
        rs, N, ad = self.rs, self.num_roots, self.ad
        C = np.transpose(ad, (0, 2, 1))  # C[a, b, c]: coefficient of x_c in [x_a, x_b]
        if (C + np.transpose(C, (1, 0, 2))).any():
            raise LieStructureError("Bracket table is not antisymmetric")
        for i in range(rs.rank):
            a = rs.simple_root_index(i)
            expected = np.zeros(self.dim, dtype=np.int64)
            expected[self.h(i)] = 1
            if not np.array_equal(C[self.e(a), self.f(a)], expected):
                raise LieStructureError(f"[e{i + 1}, f{i + 1}] != h{i + 1}")
            for j in range(rs.rank):
                b = rs.simple_root_index(j)
                if C[self.h(i), self.e(b), self.e(b)] != rs.cartan[j, i]:
                    raise LieStructureError(f"[h{i + 1}, e{j + 1}] != A_{j + 1}{i + 1} e{j + 1}")
                if i != j:
                    power = np.linalg.matrix_power(ad[self.e(a)], 1 - int(rs.cartan[j, i]))
                    if power[:, self.e(b)].any():
                        raise LieStructureError(f"Serre relation fails for (e{i + 1}, e{j + 1})")
        for k in range(N):
            coroot = np.zeros(self.dim, dtype=np.int64)
            coroot[2 * N:] = rs.positive_coroots[k]
            if not np.array_equal(C[self.e(k), self.f(k)], coroot):
                raise LieStructureError(f"[{self.labels[k]}, {self.labels[self.f(k)]}] is not the coroot")
        # Jacobi identity in the form ad([x, y]) = [ad x, ad y]
        lhs = np.tensordot(C, ad, axes=([2], [0]))
        products = np.transpose(np.tensordot(ad, ad, axes=([2], [1])), (0, 2, 1, 3))
        if not np.array_equal(lhs, products - np.transpose(products, (1, 0, 2, 3))):
            raise LieStructureError("Jacobi identity fails")

    # ---------------------------------------------------------- elements
    def theta(self, a: int) -> Tuple[int, int]:
        """Chevalley involution on a basis vector: (image index, sign)."""
        N = self.num_roots
        if a < N:
            return N + a, -1
        if a < 2 * N:
            return a - N, -1
        return a, -1

    def bracket_terms(self, x: Mapping[int, object], y: Mapping[int, object]) -> Dict[int, object]:
        """Bracket of two finitely supported coefficient maps (scalars or series)."""
        out: Dict[int, object] = {}
        for a, xa in x.items():
            for b, yb in y.items():
                entries = self.structure.get((a, b))
                if not entries:
                    continue
                product = xa * yb
                for c, n in entries:
                    term = n * product
                    out[c] = out[c] + term if c in out else term
        return out

    def bracket(self, x: "LieElement", y):
        if isinstance(x, LoopElement) or isinstance(y, LoopElement):
            return LoopElement(self.bracket_terms(_series_terms(x), _series_terms(y)))
        return LieElement(self.bracket_terms(x.terms, y.terms))

    def __repr__(self) -> str:
        return f"LieBasis({self.rs.label}, dim={self.dim})"


@lru_cache(maxsize=None)
def _cached_basis(label: str) -> LieBasis:
    return LieBasis(build_root_system(label))


def build_lie_basis(rs: RootSystem) -> LieBasis:
    try:
        standard = build_root_system(rs.label)
    except RootSystemError:
        standard = None
    if rs == standard:
        return _cached_basis(rs.label)
    return LieBasis(rs)


class LieElement:
    """Finitely supported element of g with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Scalar] = None):
        self.terms = {int(a): Fraction(c) for a, c in (terms or {}).items() if c}

    @classmethod
    def basis_vector(cls, a: int, c: Scalar = 1) -> "LieElement":
        return cls({a: c})

    def __add__(self, other: "LieElement") -> "LieElement":
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0) + c
        return LieElement(terms)

    def __neg__(self) -> "LieElement":
        return LieElement({a: -c for a, c in self.terms.items()})

    def __sub__(self, other: "LieElement") -> "LieElement":
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> "LieElement":
        return LieElement({a: c * scalar for a, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, LieElement) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, a: int) -> Fraction:
        return self.terms.get(a, Fraction(0))

    def to_loop(self) -> "LoopElement":
        return LoopElement({a: LaurentSeries.constant(c) for a, c in self.terms.items()})

    def to_json(self, basis: LieBasis) -> dict:
        return {basis.labels[a]: str(c) for a, c in sorted(self.terms.items())}

    @classmethod
    def from_json(cls, payload: Mapping, basis: LieBasis) -> "LieElement":
        return cls({basis.index(label): Fraction(c) for label, c in payload.items()})

    def __repr__(self) -> str:
        return f"LieElement({self.terms})"


class LoopElement:
    """g-valued Laurent series: basis index -> LaurentSeries; a missing index is an exact zero.

    Components that are zero only up to a finite precision are kept, since they
    still record how far the value is known.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, LaurentSeries] = None):
        self.terms = {}
        for a, s in (terms or {}).items():
            s = LaurentSeries.coerce(s)
            if not (s.is_exact and s.is_zero):
                self.terms[int(a)] = s

    @property
    def precision(self) -> Optional[int]:
        """Common precision floor of all components (None when every component is exact)."""
        finite = [s.precision for s in self.terms.values() if s.precision is not None]
        return min(finite) if finite else None

    @property
    def valuation(self) -> Optional[int]:
        nonzero = [s.valuation for s in self.terms.values() if not s.is_zero]
        return min(nonzero) if nonzero else None

    def component(self, a: int) -> LaurentSeries:
        return self.terms.get(a, LaurentSeries.zero())

    def support(self) -> List[int]:
        return sorted(a for a, s in self.terms.items() if not s.is_zero)

    def map(self, fn: Callable[[LaurentSeries], LaurentSeries]) -> "LoopElement":
        return LoopElement({a: fn(s) for a, s in self.terms.items()})

    def map_indexed(self, fn: Callable[[int, LaurentSeries], LaurentSeries]) -> "LoopElement":
        return LoopElement({a: fn(a, s) for a, s in self.terms.items()})

    def restrict(self, indices: Iterable[int]) -> "LoopElement":
        keep = set(indices)
        return LoopElement({a: s for a, s in self.terms.items() if a in keep})

    def truncate(self, precision: int) -> "LoopElement":
        return self.map(lambda s: s.truncate(precision))

    def __add__(self, other: "LoopElement") -> "LoopElement":
        terms = dict(self.terms)
        for a, s in _series_terms(other).items():
            terms[a] = terms[a] + s if a in terms else s
        return LoopElement(terms)

    def __neg__(self) -> "LoopElement":
        return self.map(lambda s: -s)

    def __sub__(self, other: "LoopElement") -> "LoopElement":
        return self + (-LoopElement(_series_terms(other)))

    def __mul__(self, scalar) -> "LoopElement":
        return self.map(lambda s: s * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LoopElement):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(self.component(a) == other.component(a) for a in keys)

    def agrees_with(self, other: "LoopElement") -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(self.component(a).agrees_with(other.component(a)) for a in keys)

    def to_json(self, basis: LieBasis) -> dict:
        return {basis.labels[a]: s.to_json() for a, s in sorted(self.terms.items())}

    @classmethod
    def from_json(cls, payload: Mapping, basis: LieBasis) -> "LoopElement":
        return cls({basis.index(label): LaurentSeries.from_json(s) for label, s in payload.items()})

    def __repr__(self) -> str:
        return f"LoopElement({self.terms})"


def _series_terms(x) -> Dict[int, LaurentSeries]:
    if isinstance(x, LoopElement):
        return x.terms
    if isinstance(x, LieElement):
        return {a: LaurentSeries.constant(c) for a, c in x.terms.items()}
    raise TypeError(f"Expected a Lie or loop element, got {type(x).__name__}")


def _nonzero(terms: Dict[int, LaurentSeries]) -> Dict[int, LaurentSeries]:
    return {a: s for a, s in terms.items() if not (s.is_exact and s.is_zero)}


def _check_nilpotent(basis: LieBasis, X):
    terms = X.terms
    bad = [basis.labels[a] for a in terms if not basis.is_positive(a)]
    if bad:
        raise ValueError(f"exp(ad X) needs X supported on positive root vectors, got {bad}")


def exp_ad(basis: LieBasis, X: Union[LieElement, LoopElement], Y: Union[LieElement, LoopElement]) -> LoopElement:
    """exp(ad X) Y = sum_k ad_X^k(Y) / k!, finite because X is nilpotent."""
    _check_nilpotent(basis, X)
    x_terms = _series_terms(X)
    term = _series_terms(Y)
    total = LoopElement(term)
    # ad X raises the principal grade by at least one
    for k in range(1, 2 * basis.rs.max_height + 2):
        term = _nonzero({a: s * Fraction(1, k) for a, s in basis.bracket_terms(x_terms, term).items()})
        if not term:
            break
        total = total + LoopElement(term)
    return total


def gauge_by_exponent(basis: LieBasis, A: LoopElement, X: LoopElement, euler: bool = False) -> LoopElement:
    """Gauge action of g = exp(X), X in n(K), on D + A with D = d/dt (or t d/dt when ``euler``).

    Returns Ad_g(A) - (D g) g^{-1}, where (D g) g^{-1} = sum_k ad_X^k(D X) / (k+1)!.
    """
    _check_nilpotent(basis, X)
    derivative = X.map(lambda s: s.euler_derivative() if euler else s.derivative())
    x_terms = _series_terms(X)
    term = derivative.terms
    correction = LoopElement({a: s for a, s in term.items()})
    for k in range(1, 2 * basis.rs.max_height + 2):
        term = _nonzero({a: s * Fraction(1, k + 1) for a, s in basis.bracket_terms(x_terms, term).items()})
        if not term:
            break
        correction = correction + LoopElement(term)
    return exp_ad(basis, X, A) - correction


class UnipotentGauge:
    """Product exp(x_1 e_{alpha_1}) ... exp(x_n e_{alpha_n}) of root-vector exponentials.

    Factors are (positive-root index, LaurentSeries). ``ordered`` builds the
    canonical product (each root at most once, height-then-lexicographic
    order); ``compose`` concatenates and so may leave that order.
    """

    def __init__(self, factors: Iterable[Tuple[int, LaurentSeries]] = ()):
        self.factors = tuple((int(k), LaurentSeries.coerce(x)) for k, x in factors)

    @classmethod
    def ordered(cls, coefficients: Mapping[int, LaurentSeries]) -> "UnipotentGauge":
        return cls(sorted(coefficients.items()))

    @property
    def is_ordered(self) -> bool:
        roots = [k for k, _ in self.factors]
        return roots == sorted(set(roots))

    def compose(self, other: "UnipotentGauge") -> "UnipotentGauge":
        """The product self * other; acting by it equals acting by other, then by self."""
        return UnipotentGauge(self.factors + other.factors)

    def inverse(self) -> "UnipotentGauge":
        return UnipotentGauge((k, -x) for k, x in reversed(self.factors))

    def to_json(self, basis: LieBasis) -> list:
        return [{"root": list(basis.rs.positive_roots[k]), "x": x.to_json()} for k, x in self.factors]

    def __len__(self) -> int:
        return len(self.factors)


def gauge_transform(basis: LieBasis, A: LoopElement, g: UnipotentGauge, euler: bool = False) -> LoopElement:
    """Coefficient of g (d/dt + A) g^{-1}; the last factor of g acts first."""
    floor = A.valuation
    for k, x in reversed(g.factors):
        if k >= basis.num_roots:
            raise ValueError(f"Gauge factor index {k} is not a positive root")
        A = gauge_by_exponent(basis, A, LoopElement({basis.e(k): x}), euler=euler)
    precision = A.precision
    if precision is not None and floor is not None and precision <= floor:
        raise PrecisionError(f"Gauge transformation exhausted the tracked precision (t^{precision})")
    return A


def gauge_by_cocharacter(basis: LieBasis, A: LoopElement, coweight: Coweight) -> LoopElement:
    """Gauge action of mu(t) = t^mu for a coweight mu on d/dt + A.

    e_alpha components are multiplied by t^<alpha, mu>, f_alpha components by
    t^-<alpha, mu>; then mu / t (in the h_i basis) is subtracted.
    """
    rs = basis.rs
    pairings = rs.root_coweight_pairings(coweight)
    for n in pairings:
        if n.denominator != 1:
            raise ValueError(f"Coweight {coweight.coords} does not pair integrally with the roots")

    def twist(a: int, s: LaurentSeries) -> LaurentSeries:
        if basis.is_positive(a):
            return s.shift(int(pairings[a]))
        if not basis.is_cartan(a):
            return s.shift(-int(pairings[a - basis.num_roots]))
        return s

    cartan = rs.coweight_to_cartan_coords(coweight)
    shift = LoopElement({basis.h(i): LaurentSeries.monomial(-x, -1) for i, x in enumerate(cartan) if x})
    return A.map_indexed(twist) + shift


def sample_gauge(basis: LieBasis, rng: np.random.Generator, degree: int = 3, spread: int = 2) -> UnipotentGauge:
    """Random element of N(O): one factor per positive root, polynomial coefficients of degree <= ``degree``."""
    coefficients = {}
    for k in range(basis.num_roots):
        coeffs = [int(c) for c in rng.integers(-spread, spread + 1, size=degree + 1)]
        coefficients[k] = LaurentSeries(0, coeffs)
    return UnipotentGauge.ordered(coefficients)
