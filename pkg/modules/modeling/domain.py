"""
Domain types for the binary feasibility model.

Variables and constraints are plain immutable records; a model is only ever
extended by building a new one.
"""

import re
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Tuple

from modules.networks.domain import EdgeOrder, Network

LE, EQ, GE = '<=', '=', '>='

VARIABLE_KINDS = ('x', 'y', 'z', 'w')
CONSTRAINT_TAGS = ('C1', 'C2', 'C3', 'C4', 'C5', 'MC', 'C6', 'C7', 'FIX', 'SYM')

TOLERANCE = 1e-6

_UNSAFE = re.compile(r'[^A-Za-z0-9_]')


def sanitize_token(identifier: str) -> str:
    """Replace every character outside [A-Za-z0-9_] by an underscore."""
    return _UNSAFE.sub('_', identifier)


@dataclass(frozen=True)
class Variable:
    """
    Binary decision variable.

    ``codeword`` is 1-based and None for z; ``inputs`` / ``outputs`` are the
    mixed-radix indices m and m' (whichever the kind uses).
    """

    name: str
    kind: str
    vertex: str
    codeword: Optional[int] = None
    inputs: Optional[int] = None
    outputs: Optional[int] = None


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    tag: str
    terms: Tuple[Tuple[int, str], ...]
    sense: str
    rhs: int

    def __post_init__(self):
        names = [variable for _, variable in self.terms]
        if len(set(names)) != len(names):
            raise ValueError(f"Constraint {self.name} repeats a variable")
        if any(coefficient == 0 for coefficient, _ in self.terms):
            raise ValueError(f"Constraint {self.name} has a zero coefficient")

    def lhs(self, values: Mapping[str, float]) -> float:
        return sum(coefficient * values.get(variable, 0) for coefficient, variable in self.terms)

    def satisfied(self, values: Mapping[str, float]) -> bool:
        lhs = self.lhs(values)
        if self.sense == LE:
            return lhs <= self.rhs + TOLERANCE
        if self.sense == GE:
            return lhs >= self.rhs - TOLERANCE
        return abs(lhs - self.rhs) <= TOLERANCE

    def __str__(self):
        body = ' '.join(
            f"{'+' if coefficient > 0 else '-'} {abs(coefficient)} {variable}"
            for coefficient, variable in self.terms
        )
        return f"{self.name}: {body} {self.sense} {self.rhs}"


@dataclass(frozen=True)
class ModelOptions:
    routing_fix: bool = False
    symmetry_break: bool = False

    @property
    def suffix(self) -> str:
        return ('_rf' if self.routing_fix else '') + ('_sym' if self.symmetry_break else '')


@dataclass(frozen=True)
class FeasibilityModel:
    """
    Variables, constraints and metadata; the objective is constantly zero.

    ``vertex_tokens`` and ``edge_tokens`` map ids to the format-safe tokens
    used in variable and constraint names.
    """

    network: Network = field(repr=False)
    order: EdgeOrder = field(repr=False)
    q: int
    code_size: int
    options: ModelOptions
    variables: Tuple[Variable, ...] = field(repr=False)
    constraints: Tuple[LinearConstraint, ...] = field(repr=False)
    vertex_tokens: Mapping[str, str] = field(repr=False, compare=False)
    edge_tokens: Mapping[str, str] = field(repr=False, compare=False)

    @cached_property
    def variable_map(self) -> Dict[str, Variable]:
        return {variable.name: variable for variable in self.variables}

    @property
    def name(self) -> str:
        label = sanitize_token(self.network.name or 'network')
        return f"{label}_q{self.q}_M{self.code_size}{self.options.suffix}"

    def variables_of(self, kind: str) -> List[Variable]:
        return [variable for variable in self.variables if variable.kind == kind]

    def constraints_tagged(self, tag: str) -> List[LinearConstraint]:
        return [constraint for constraint in self.constraints if constraint.tag == tag]

    def extended(self, constraints, **option_changes) -> 'FeasibilityModel':
        """A copy with extra constraints and updated options."""
        return replace(
            self,
            constraints=self.constraints + tuple(constraints),
            options=replace(self.options, **option_changes),
        )

    def violations(self, values: Mapping[str, float]) -> List[LinearConstraint]:
        """
        Constraints violated by an assignment; missing variables count as 0.

        Raises:
            ValueError: a value is not binary or names an unknown variable
        """
        for name, value in values.items():
            if name not in self.variable_map:
                raise ValueError(f"Unknown variable {name}")
            if min(abs(value), abs(value - 1)) > TOLERANCE:
                raise ValueError(f"Variable {name} = {value} is not binary")
        return [constraint for constraint in self.constraints if not constraint.satisfied(values)]

    def __str__(self):
        return f"{self.name} ({len(self.variables)} variables, {len(self.constraints)} constraints)"
