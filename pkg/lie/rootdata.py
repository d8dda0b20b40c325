import re
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import sympy

RANK_CAP = 4
# |W(F4)| = 1152 is the largest Weyl group within the cap
MAX_ORBIT_SIZE = 2000
LABEL_PATTERN = re.compile(r"^([A-G])(\d+)$")
SUPPORTED_RANKS = {
    "A": range(1, RANK_CAP + 1),
    "B": range(2, RANK_CAP + 1),
    "C": range(2, RANK_CAP + 1),
    "D": range(4, RANK_CAP + 1),
    "F": (4,),
    "G": (2,),
}


class RootSystemError(ValueError):
    pass


def _fractions(coords: Iterable) -> Tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in coords)


def _json_number(c: Fraction):
    return int(c) if c.denominator == 1 else str(c)


@dataclass(frozen=True)
class Root:
    """Root in simple-root coordinates."""
    system: str
    coords: Tuple[int, ...]

    @property
    def height(self) -> int:
        return sum(self.coords)


@dataclass(frozen=True)
class Coroot:
    """Coroot in simple-coroot coordinates."""
    system: str
    coords: Tuple[int, ...]

    @property
    def height(self) -> int:
        return sum(self.coords)


@dataclass(frozen=True)
class Weight:
    """Weight in fundamental-weight coordinates (rational coordinates allowed for residues)."""
    system: str
    coords: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", _fractions(self.coords))

    def __add__(self, other: "Weight") -> "Weight":
        _check_same_system(self, other)
        return type(self)(self.system, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Weight":
        return type(self)(self.system, tuple(-a for a in self.coords))

    def __sub__(self, other: "Weight") -> "Weight":
        return self + (-other)

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def to_json(self) -> list:
        return [_json_number(c) for c in self.coords]


@dataclass(frozen=True)
class Coweight(Weight):
    """Coweight in fundamental-coweight coordinates."""


def _check_same_system(a, b):
    if a.system != b.system:
        raise RootSystemError(f"Mismatched root systems: {a.system} vs {b.system}")


def pair(x: Union[Root, Coroot], y: Union[Weight, Coweight]) -> Fraction:
    """Natural pairing <root, coweight> or <coroot, weight>.

    Simple (co)root coordinates are dual to fundamental (co)weight coordinates,
    so the pairing is the plain dot product of the stored coordinates.
    """
    _check_same_system(x, y)
    if isinstance(x, Root) and not isinstance(y, Coweight):
        raise RootSystemError("Roots pair with coweights, not with weights")
    if isinstance(x, Coroot) and isinstance(y, Coweight):
        raise RootSystemError("Coroots pair with weights, not with coweights")
    if len(x.coords) != len(y.coords):
        raise RootSystemError("Rank mismatch in pairing")
    return sum((Fraction(a) * b for a, b in zip(x.coords, y.coords)), Fraction(0))


def is_dominant_integral(x: Weight) -> bool:
    return x.is_integral and all(c >= 0 for c in x.coords)


def cartan_matrix(series: str, rank: int) -> np.ndarray:
    """Cartan matrix with entries A_ij = <alpha_i, alpha_j^vee> (Bourbaki numbering)."""
    A = 2 * np.eye(rank, dtype=np.int64)
    if series in "ABCD" and rank > 1:
        A[range(rank - 1), range(1, rank)] = -1
        A[range(1, rank), range(rank - 1)] = -1
    if series == "B":
        # last root short
        A[-2, -1] = -2
    elif series == "C":
        # last root long
        A[-1, -2] = -2
    elif series == "D":
        A[-2, -1] = A[-1, -2] = 0
        A[-3, -1] = A[-1, -3] = -1
    elif series == "F":
        A[0, 1] = A[1, 0] = -1
        A[1, 2] = -2
        A[2, 1] = -1
        A[2, 3] = A[3, 2] = -1
    elif series == "G":
        # alpha_1 short
        A[0, 1] = -1
        A[1, 0] = -3
    return A


def parse_label(label: str) -> Tuple[str, int]:
    match = LABEL_PATTERN.match(str(label).strip())
    if match is None:
        raise RootSystemError(f"Unknown root system label {label!r}")
    series, rank = match.group(1), int(match.group(2))
    if series == "E":
        raise RootSystemError(f"Type {label} is above the supported rank cap {RANK_CAP}")
    if rank > RANK_CAP and series in "ABCD":
        raise RootSystemError(f"Rank {rank} of {label} is above the supported cap {RANK_CAP}")
    if rank not in SUPPORTED_RANKS[series]:
        raise RootSystemError(f"Unknown root system label {label!r}")
    return series, rank


class RootSystem:
    """Finite-type root data generated from a Cartan matrix.

    Positive roots are stored in simple-root coordinates and sorted by height,
    then lexicographically; ``positive_coroots[k]`` is the coroot of
    ``positive_roots[k]``.
    """

    def __init__(self, label: str, cartan):
        A = np.array(cartan, dtype=np.int64)
        A.setflags(write=False)
        self._validate(A)
        self.label = label
        self.series = label[0]
        self.rank = A.shape[0]
        self.cartan = A
        self.simple_lengths = self._simple_lengths(A)
        self.positive_roots: Tuple[Tuple[int, ...], ...] = self._close_under_reflections()
        self.root_index: Dict[Tuple[int, ...], int] = {r: k for k, r in enumerate(self.positive_roots)}
        self.heights = tuple(sum(r) for r in self.positive_roots)
        self.positive_coroots = tuple(self._coroot(r) for r in self.positive_roots)
        self.exponents = self._exponents()
        self.rho = Weight(label, (1,) * self.rank)
        self.rho_check = Coweight(label, (1,) * self.rank)
        inverse = sympy.Matrix(A.tolist()).inv()
        self.cartan_inverse = tuple(tuple(Fraction(int(x.p), int(x.q)) for x in inverse.row(i)) for i in range(self.rank))

    @staticmethod
    def _validate(A: np.ndarray):
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise RootSystemError("Cartan matrix must be square and nonempty")
        if A.shape[0] > RANK_CAP:
            raise RootSystemError(f"Rank {A.shape[0]} is above the supported cap {RANK_CAP}")
        if any(A[i, i] != 2 for i in range(A.shape[0])):
            raise RootSystemError("Cartan matrix diagonal must be 2")
        off = A - 2 * np.eye(A.shape[0], dtype=np.int64)
        if (off > 0).any() or ((off == 0) != (off.T == 0)).any():
            raise RootSystemError("Cartan matrix off-diagonal entries must be nonpositive with symmetric zero pattern")

    @staticmethod
    def _simple_lengths(A: np.ndarray) -> Tuple[Fraction, ...]:
        # squared lengths up to a common factor: A_ij r_j = A_ji r_i
        lengths: List = [None] * A.shape[0]
        for start in range(A.shape[0]):
            if lengths[start] is not None:
                continue
            lengths[start] = Fraction(1)
            queue = deque([start])
            while queue:
                i = queue.popleft()
                for j in range(A.shape[0]):
                    if j != i and A[i, j] != 0 and lengths[j] is None:
                        lengths[j] = Fraction(int(A[j, i])) * lengths[i] / int(A[i, j])
                        queue.append(j)
        return tuple(lengths)

    def coroot_pairing(self, root: Sequence[int], i: int) -> int:
        """<beta, alpha_i^vee> for beta in simple-root coordinates."""
        return int(sum(int(b) * int(self.cartan[j, i]) for j, b in enumerate(root)))

    def _close_under_reflections(self) -> Tuple[Tuple[int, ...], ...]:
        simple = [tuple(int(i == j) for j in range(self.rank)) for i in range(self.rank)]
        found = set(simple)
        queue = deque(simple)
        while queue:
            beta = queue.popleft()
            for i in range(self.rank):
                n = self.coroot_pairing(beta, i)
                image = tuple(b - n * int(i == j) for j, b in enumerate(beta))
                if all(c >= 0 for c in image) and any(image) and image not in found:
                    found.add(image)
                    queue.append(image)
        return tuple(sorted(found, key=lambda r: (sum(r), r)))

    def inner(self, a: Sequence, b: Sequence) -> Fraction:
        """W-invariant form on simple-root coordinates, (alpha_i, alpha_i) = simple_lengths[i]."""
        total = Fraction(0)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                if x and y:
                    total += Fraction(x) * y * int(self.cartan[i, j]) * self.simple_lengths[j] / 2
        return total

    def _coroot(self, root: Tuple[int, ...]) -> Tuple[int, ...]:
        length = self.inner(root, root)
        coords = [a * self.simple_lengths[i] / length for i, a in enumerate(root)]
        assert all(c.denominator == 1 for c in coords), "Coroot coordinates must be integral"
        return tuple(int(c) for c in coords)

    def _exponents(self) -> Tuple[int, ...]:
        counts = Counter(self.heights)
        exponents = []
        for m in range(1, max(counts) + 1):
            exponents += [m] * (counts[m] - counts.get(m + 1, 0))
        return tuple(exponents)

    # ------------------------------------------------------------ accessors
    @property
    def num_positive_roots(self) -> int:
        return len(self.positive_roots)

    @property
    def max_height(self) -> int:
        return max(self.heights)

    def root(self, k: int) -> Root:
        return Root(self.label, self.positive_roots[k])

    def coroot(self, k: int) -> Coroot:
        return Coroot(self.label, self.positive_coroots[k])

    def simple_root_index(self, i: int) -> int:
        return self.root_index[tuple(int(i == j) for j in range(self.rank))]

    def weight(self, coords: Sequence) -> Weight:
        self._check_rank(coords)
        return Weight(self.label, tuple(coords))

    def coweight(self, coords: Sequence) -> Coweight:
        self._check_rank(coords)
        return Coweight(self.label, tuple(coords))

    def _check_rank(self, coords: Sequence):
        if len(coords) != self.rank:
            raise RootSystemError(f"{self.label} expects {self.rank} coordinates, got {len(coords)}")

    def check_member(self, x):
        if x.system != self.label or len(x.coords) != self.rank:
            raise RootSystemError(f"{x!r} does not belong to {self.label}")

    # -------------------------------------------------------------- pairings
    def root_coweight_pairings(self, coweight: Coweight) -> Tuple[Fraction, ...]:
        """<alpha, mu^vee> for every positive root, in root order."""
        self.check_member(coweight)
        return tuple(pair(self.root(k), coweight) for k in range(self.num_positive_roots))

    def coroot_weight_pairings(self, weight: Weight) -> Tuple[Fraction, ...]:
        """<alpha^vee, lambda> for every positive coroot, in root order."""
        self.check_member(weight)
        return tuple(pair(self.coroot(k), weight) for k in range(self.num_positive_roots))

    def coweight_to_cartan_coords(self, coweight: Coweight) -> Tuple[Fraction, ...]:
        """Coordinates of a coweight in the simple-coroot (h_i) basis."""
        self.check_member(coweight)
        return tuple(sum((self.cartan_inverse[i][j] * y for j, y in enumerate(coweight.coords)), Fraction(0))
                     for i in range(self.rank))

    def cartan_coords_to_coweight(self, coords: Sequence) -> Coweight:
        """Inverse of coweight_to_cartan_coords: y = A x."""
        self._check_rank(coords)
        return Coweight(self.label, tuple(sum((int(self.cartan[j, i]) * Fraction(x) for i, x in enumerate(coords)), Fraction(0))
                                          for j in range(self.rank)))

    # ---------------------------------------------------------------- Weyl
    def reflect(self, i: int, x: Weight) -> Weight:
        """Simple reflection s_i on a weight (row i of A) or coweight (column i of A)."""
        shift = self.cartan[:, i] if isinstance(x, Coweight) else self.cartan[i, :]
        c = x.coords[i]
        return type(x)(x.system, tuple(a - c * int(s) for a, s in zip(x.coords, shift)))

    def weyl_orbit(self, x: Weight, max_size: int = MAX_ORBIT_SIZE) -> List[Weight]:
        self.check_member(x)
        orbit = {x}
        queue = deque([x])
        ordered = [x]
        while queue:
            y = queue.popleft()
            for i in range(self.rank):
                z = self.reflect(i, y)
                if z not in orbit:
                    if len(orbit) >= max_size:
                        raise RootSystemError(f"Weyl orbit of {x.coords} exceeds {max_size} elements")
                    orbit.add(z)
                    ordered.append(z)
                    queue.append(z)
        return ordered

    def dominant_representative(self, x: Weight) -> Weight:
        """The unique orbit element with all coordinates >= 0."""
        self.check_member(x)
        for _ in range(MAX_ORBIT_SIZE):
            negative = [i for i, c in enumerate(x.coords) if c < 0]
            if not negative:
                return x
            x = self.reflect(negative[0], x)
        raise RootSystemError("Dominant representative search did not terminate")

    # -------------------------------------------------------------- dunder
    def __eq__(self, other) -> bool:
        if not isinstance(other, RootSystem):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.cartan, other.cartan)

    def __hash__(self) -> int:
        return hash((self.label, self.cartan.tobytes()))

    def __repr__(self) -> str:
        return f"RootSystem({self.label}, positive_roots={self.num_positive_roots}, exponents={self.exponents})"


@lru_cache(maxsize=None)
def build_root_system(label: str) -> RootSystem:
    series, rank = parse_label(label)
    return RootSystem(f"{series}{rank}", cartan_matrix(series, rank))


def langlands_dual(rs: RootSystem) -> RootSystem:
    label = {"B": "C", "C": "B"}.get(rs.series, rs.series) + str(rs.rank)
    return RootSystem(label, rs.cartan.T)


def harish_chandra_equal(mu: Weight, nu: Weight, rs: RootSystem = None) -> bool:
    """True iff nu lies in the Weyl orbit of mu (equality of their images in h*/W)."""
    _check_same_system(mu, nu)
    if type(mu) is not type(nu):
        raise RootSystemError("Cannot compare a weight with a coweight")
    rs = rs if rs is not None else build_root_system(mu.system)
    if nu == mu:
        return True
    return nu in set(rs.weyl_orbit(mu))


def dual_partition_check(rs: RootSystem) -> bool:
    """Coroot heights form the dual partition of the exponents."""
    heights = Counter(sum(c) for c in rs.positive_coroots)
    exponents = rs.exponents
    return all(heights.get(m, 0) == sum(1 for d in exponents if d >= m) for m in range(1, max(exponents) + 2))
