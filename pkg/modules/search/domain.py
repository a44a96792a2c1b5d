"""
Domain types for the search engine.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Optional, Tuple

from modules.coding.domain import CapacityValue, Certificate, Witness
from modules.networks.domain import Network


class Status(str, Enum):
    FEASIBLE = 'feasible'
    INFEASIBLE = 'infeasible'
    TIMEOUT = 'timeout'


@dataclass(frozen=True)
class SearchOptions:
    """
    Restrictions and limits for one decision or capacity run.

    ``supersource`` is tri-state: None applies the transform only when
    |out(S)| > mu.
    """

    routing_fix: bool = False
    symmetry_break: bool = True
    linear_only: bool = False
    time_limit: Optional[float] = None
    workers: int = 1
    supersource: Optional[bool] = None
    ascending: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SearchOutcome:
    """Result of one decision run; a certificate is present iff the status is FEASIBLE."""

    status: Status
    certificate: Optional[Certificate] = None
    nodes: int = 0
    wall_ms: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == Status.FEASIBLE


@dataclass(frozen=True)
class CapacityResult:
    """
    Largest code size found, with a proof flag.

    When ``proven`` is False the true maximum lies in [lower, upper].
    """

    network: Network = field(repr=False)
    q: int
    lower: int
    upper: int
    proven: bool
    certificate: Optional[Certificate] = field(default=None, repr=False)
    nodes: int = 0
    wall_ms: int = 0
    linear: bool = False
    supersource_applied: bool = False
    options: Optional[SearchOptions] = None

    @property
    def m_star(self) -> Optional[int]:
        return self.lower if self.proven else None

    @property
    def capacity(self) -> Optional[CapacityValue]:
        return CapacityValue(self.lower, self.q) if self.proven else None

    @property
    def status(self) -> str:
        return 'proven' if self.proven else 'bounds'


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of re-simulating a certificate."""

    valid: bool
    size: int
    reasons: Tuple[str, ...] = ()
    witness: Optional[Witness] = None
    linear: Optional[bool] = None

    def __bool__(self):
        return self.valid


@dataclass(frozen=True)
class OracleResult:
    feasible: bool
    certificate: Optional[Certificate] = None
    checks: int = 0
