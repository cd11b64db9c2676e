"""
Errors Module
Exception hierarchy shared by every chartforge package.
"""


class ChartForgeError(Exception):
    """Base class for all domain errors raised by chartforge."""


class ParseError(ChartForgeError):
    """Malformed chart, template or rulebase text."""

    def __init__(self, message: str, line_no: int = 0):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no else ""
        super().__init__(f"{prefix}{message}")


class DanglingReference(ChartForgeError):
    """A dart, vertex or edge id is used but never declared."""


class InvalidChart(ChartForgeError):
    """An operation needs a structurally valid chart and did not get one."""


class LabelOutOfRange(ChartForgeError):
    """A label query outside 1..n-1."""


class NotIncident(ChartForgeError):
    """A strand or dart is not incident to the vertex it was queried at."""


class NotCellular(ChartForgeError):
    """Some complementary region of a component is not an open disk."""


class StaleSite(ChartForgeError):
    """A move site was discovered on a different chart value."""


class InvalidResult(ChartForgeError):
    """A move produced an invalid chart or violated its declared effect."""


class BlockedPath(ChartForgeError):
    """A black vertex cannot be pushed across an edge of a nearby label."""


class BudgetExceeded(ChartForgeError):
    """A search or enumeration was asked to go beyond its configured bound."""


class RulebaseIncomplete(ChartForgeError):
    """A verification branch neither closes nor matches any rule."""

    def __init__(self, message: str, open_branches: int = 0):
        self.open_branches = open_branches
        super().__init__(message)


class DegenerateLayout(ChartForgeError):
    """The barycentric layout system is singular."""
