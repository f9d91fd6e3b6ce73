"""Exception hierarchy shared across the designer and simulation layers."""


class XRelayError(Exception):
    """Base class for all domain errors raised by this package."""


class InfeasibleRegime(XRelayError):
    """The antenna configuration does not admit the requested operation."""


class AlignmentInfeasible(InfeasibleRegime):
    """A channel-subspace intersection is smaller than the requested stream count."""


class ReducedInfeasible(InfeasibleRegime):
    """The relay-side nulling scheme cannot satisfy its integer stream budget."""


class RankDeficient(XRelayError):
    """A generically full-rank matrix failed its numerical rank assertion.

    Indicates a numerically degenerate channel draw; callers running Monte
    Carlo loops should redraw, deterministic callers should surface it.
    """


class DesignInvalid(XRelayError):
    """A transceiver design violates its structural invariants."""
