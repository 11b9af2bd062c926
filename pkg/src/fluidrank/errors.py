"""Exception hierarchy shared across the package.

Domain errors derive from FluidrankError so the CLI can map them to a
distinct exit code. Usage errors (bad flags) stay with the CLI framework.
"""


class FluidrankError(Exception):
    """Base class for all domain-level failures."""


class InvalidNetlist(FluidrankError):
    """A netlist failed validation; carries the violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"netlist is invalid: {lines}")


class InvalidSchedule(FluidrankError):
    """A source schedule does not cover the simulation window or targets a non-source node."""


class NonConvergence(FluidrankError):
    """A simulated chamber pressure ran away, indicating a faulty circuit."""


class UnsupportedWidth(FluidrankError):
    """Demultiplexer synthesis requested outside the supported 2-4 input range."""


class WidthMismatch(FluidrankError):
    """An input code does not match the circuit's input count."""


class SupplyTooLow(FluidrankError):
    """Logic supply pressure does not exceed the valve snap-through threshold."""


class InsufficientModalities(FluidrankError):
    """Fewer modalities available than configuration channels requested."""


class MissingPreference(FluidrankError):
    """A perception profile has no preference entry for a configuration channel."""


class InvalidStudyConfig(FluidrankError):
    """A study configuration violates its invariants (e.g. zero trials)."""


class UnknownIdentifier(FluidrankError):
    """A configuration, task, or run id was not found in the active catalog/store."""
