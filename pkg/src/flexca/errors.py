"""Exception hierarchy shared across the simulator.

Every error the library raises derives from FlexCaError so the CLI can map
failure classes onto distinct exit codes.
"""


class FlexCaError(Exception):
    """Base class for all simulator errors."""


class ParseError(FlexCaError):
    """Scenario file could not be read or is not well-formed."""


class ValidationFailed(FlexCaError):
    """Scenario parsed but violates model invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


# -- spectrum model ----------------------------------------------------------

class InvalidCharacter(FlexCaError):
    """Slot pattern text contains a character outside {D, S, U}."""


class InvalidSplit(FlexCaError):
    """Special-slot symbol split does not sum to 14 symbols."""


class UnknownCarrier(FlexCaError):
    """A cell references a carrier id absent from the catalog."""


# -- cell lifecycle ----------------------------------------------------------

class SettingViolation(FlexCaError):
    """Configuration plan breaks the rules of its chosen setting."""


class TagConstraintViolation(FlexCaError):
    """UL-only activation attempted without an active DL-bearing TAG sibling."""


class UnknownCell(FlexCaError):
    """Directive references a cell id that was never configured."""


class NoSchedulerAvailable(FlexCaError):
    """No active DL-bearing cell can carry control for a scheduled cell."""


# -- SSB-less checks ---------------------------------------------------------

class PCellTarget(FlexCaError):
    """SSB-less operation requested for a PCell, which always carries SSB."""


# -- PDCCH -------------------------------------------------------------------

class PolarCapExceeded(FlexCaError):
    """DCI payload would exceed the 140-bit Polar encoder limit."""


class NoFeasibleAL(FlexCaError):
    """No aggregation level up to 16 meets the required code rate."""


# -- Tx switching ------------------------------------------------------------

class NotF2(FlexCaError):
    """Pair indication is only defined for the indicated-pair framework."""


class PairNotConfigured(FlexCaError):
    """Indicated band pair is not a subset of the configured bands."""


# -- energy ------------------------------------------------------------------

class RuUnreachable(FlexCaError):
    """Traffic calibration cannot reach the requested resource utilization."""


# -- engine / CLI ------------------------------------------------------------

class ScenarioInvalid(FlexCaError):
    """End-to-end scenario validation failed; carries aggregated diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


class AxisMismatch(FlexCaError):
    """Sweep axis does not apply to the experiment named in the scenario."""
