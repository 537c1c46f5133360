"""Exception hierarchy for the SU(1,1) interferometer toolkit."""


class SU11Error(Exception):
    """Base class for every error raised by this package."""


class DimensionError(SU11Error, ValueError):
    pass


class InvalidAmplitude(SU11Error, ValueError):
    """Coherent-state amplitude outside the open unit disk."""


class TailTooLarge(SU11Error):
    """Truncation cannot hold the state to the requested tail tolerance."""


class TruncationLeak(SU11Error):
    """Evolved state pushed too much probability towards the basis edge."""


class BranchMismatch(SU11Error, ValueError):
    pass


class DegenerateState(SU11Error):
    pass


class IndeterminatePoint(SU11Error):
    """Phase derivative of the output signal vanishes (0/0 point)."""


class ZeroGain(SU11Error, ValueError):
    pass


class NonpositiveVariance(SU11Error, ValueError):
    pass


class InfeasibleBudget(SU11Error, ValueError):
    """Photon budget too small to realize any nonzero mixer gain."""


class NonpositivePhotons(SU11Error, ValueError):
    pass
