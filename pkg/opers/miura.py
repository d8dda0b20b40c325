from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from lie.chevalley import LoopElement, build_lie_basis
from lie.rootdata import Coweight, RootSystem, build_root_system, is_dominant_integral
from opers.oper import (DEFAULT_WORKING_PRECISION, CanonicalOper, LambdaNilpotentForm, OperOperator, is_lambda_regular,
                        reduce_to_canonical, to_lambda_nilpotent)
from series.formal import LaurentSeries, Scalar

MAX_POLE_ORDER = 16


class ConnectionResidueError(ValueError):
    pass


@dataclass(frozen=True)
class CartanConnection:
    """d/dt + u(t) with u an h-valued Laurent series, components in the h_i basis."""
    rs: RootSystem
    u: Tuple[LaurentSeries, ...]

    def __post_init__(self):
        u = tuple(LaurentSeries.coerce(s) for s in self.u)
        if len(u) != self.rs.rank:
            raise ValueError(f"{self.rs.label} connections have {self.rs.rank} components, got {len(u)}")
        for s in u:
            if not s.is_zero and s.valuation < -MAX_POLE_ORDER:
                raise ConnectionResidueError(f"Pole order {-s.valuation} exceeds the cap {MAX_POLE_ORDER}")
        object.__setattr__(self, "u", u)

    def loop(self) -> LoopElement:
        basis = build_lie_basis(self.rs)
        return LoopElement({basis.h(i): s for i, s in enumerate(self.u)})

    def __add__(self, other: "CartanConnection") -> "CartanConnection":
        return CartanConnection(self.rs, tuple(a + b for a, b in zip(self.u, other.u)))

    def to_json(self) -> dict:
        return {"type": self.rs.label, "u": [s.to_json() for s in self.u]}

    @classmethod
    def from_json(cls, payload: dict) -> "CartanConnection":
        return cls(build_root_system(payload["type"]), tuple(LaurentSeries.from_json(s) for s in payload["u"]))


def miura_transform(conn: CartanConnection, precision: Optional[int] = None) -> CanonicalOper:
    """Oper class of d/dt + p_- + u(t)."""
    return reduce_to_canonical(OperOperator(conn.rs, conn.loop()), precision)


def connection_residue(conn: CartanConnection) -> Tuple[Fraction, ...]:
    """t^-1 coefficients of u in the h_i basis."""
    for i, s in enumerate(conn.u):
        if not s.is_zero and s.valuation < -1:
            raise ConnectionResidueError(f"Component h{i + 1} has a pole of order {-s.valuation}")
    return tuple(s.residue_coefficient() for s in conn.u)


def check_miura_image(conn: CartanConnection, coweight: Coweight,
                      working_precision: int = DEFAULT_WORKING_PRECISION) -> bool:
    """True iff the Miura image of a connection with residue -coweight is coweight-regular.

    Raises:
        ConnectionResidueError: the residue is not -coweight for a dominant integral coweight.
        PrecisionError: precision ran out during reduction or membership.
    """
    rs = conn.rs
    rs.check_member(coweight)
    if not is_dominant_integral(coweight):
        raise ConnectionResidueError(f"Coweight {coweight.coords} is not dominant integral")
    residue = connection_residue(conn)
    expected = tuple(-x for x in rs.coweight_to_cartan_coords(coweight))
    if residue != expected:
        raise ConnectionResidueError(f"Residue {[str(r) for r in residue]} differs from -coweight {[str(e) for e in expected]}")
    outcome = to_lambda_nilpotent(miura_transform(conn), coweight, working_precision)
    return isinstance(outcome, LambdaNilpotentForm) and is_lambda_regular(outcome)


def residue_coweight(conn: CartanConnection) -> Coweight:
    """The coweight lambda with connection residue -lambda."""
    return conn.rs.cartan_coords_to_coweight([-x for x in connection_residue(conn)])


def dilate_connection(conn: CartanConnection, a: Scalar) -> CartanConnection:
    """u(t) -> a u(a t)."""
    a = Fraction(a)
    if a == 0:
        raise ValueError("Dilation scale must be nonzero")
    return CartanConnection(conn.rs, tuple(s.dilate(a) * a for s in conn.u))


def sample_connection(rs: RootSystem, coweight: Coweight, rng: np.random.Generator, precision: int = 16,
                      spread: int = 3, exact: bool = False) -> CartanConnection:
    """Connection with residue -coweight and a random regular part with integer coefficients in [-spread, spread]."""
    residue = rs.coweight_to_cartan_coords(coweight)
    u = []
    for i in range(rs.rank):
        regular = [int(c) for c in rng.integers(-spread, spread + 1, size=max(precision, 0))]
        series = LaurentSeries(-1, [-residue[i]] + regular, None if exact else precision)
        u.append(series)
    return CartanConnection(rs, tuple(u))
