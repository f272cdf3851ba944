"""Exception hierarchy shared by all modules.

Every checker failure carries a ``witness`` tuple of identifiers naming the
offending data (a morphism, a pair, a cone, ...), so callers can render a
minimal counterexample instead of a bare boolean.
"""

from __future__ import annotations


class FibError(Exception):
    """Base class; ``witness`` is a tuple of identifier-like values."""

    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness

    @property
    def code(self) -> str:
        return type(self).__name__


# -- table validation -------------------------------------------------------

class MissingComposite(FibError):
    pass


class AssociativityViolation(FibError):
    pass


class IdentityViolation(FibError):
    pass


class UnknownObject(FibError):
    pass


class UnknownMorphism(FibError):
    pass


class CompositionDomainError(FibError):
    """Lookup of a composite on a non-composable pair: a programming error."""


class SizeBudgetExceeded(FibError):
    pass


# -- fibration analysis ------------------------------------------------------

class NotAFibration(FibError):
    pass


class NotAnOpFibration(FibError):
    pass


class NoFactorization(FibError):
    pass


class NonUniqueFactorization(FibError):
    pass


class NonUniquePairing(FibError):
    pass


# -- product / equality structure --------------------------------------------

class FiberNotFP(FibError):
    pass


class TerminalNotStable(FibError):
    pass


class ProductNotStable(FibError):
    pass


class NoDiagonalLift(FibError):
    pass


class FrobeniusFails(FibError):
    pass


class StabilityFails(FibError):
    pass


class IllFormedInstance(FibError):
    pass


class NoFiniteLimits(FibError):
    pass


# -- synthesizer --------------------------------------------------------------

class NotParallel(FibError):
    pass


class NotComposable(FibError):
    pass


class OracleContractViolation(FibError):
    pass


class AxiomFailure(FibError):
    def __init__(self, law: str, witness: tuple = ()):
        super().__init__(f"2-category axiom failed: {law}", witness)
        self.law = law


class CellBudgetExceeded(FibError):
    pass


class NoTransport(FibError):
    pass


# -- groupoid instance ---------------------------------------------------------

class EndpointMismatch(FibError):
    pass


class FamilyNotClosed(FibError):
    pass


class ClosureBudgetExceeded(FibError):
    pass


class CorrespondenceFailure(FibError):
    pass


# -- text formats ---------------------------------------------------------------

class FormatSyntaxError(FibError):
    def __init__(self, line: int, col: int, expected: str):
        super().__init__(
            f"syntax error at line {line}, column {col}: expected {expected}",
            (str(line), str(col), expected),
        )
        self.line = line
        self.col = col
        self.expected = expected


class DanglingReference(FibError):
    def __init__(self, name: str, line: int | None = None):
        at = f" (line {line})" if line is not None else ""
        super().__init__(f"reference to undeclared name {name!r}{at}", (name,))
        self.name = name
