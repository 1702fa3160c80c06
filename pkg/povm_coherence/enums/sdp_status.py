try:
    from enum import StrEnum
except ImportError:
    from strenum import StrEnum


class SdpStatus(StrEnum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    MAX_ITERATIONS = "max_iterations"


class Sense(StrEnum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class ChannelClass(StrEnum):
    """Feasible set searched by the conversion-fidelity SDP."""
    PIC = "pic"
    CPTP = "cptp"
