"""Exceptions raised by the reduction toolkit.

Each class carries the process exit code the CLI uses when it escapes to
the top level. Failed checks are not exceptions (see verifier.CheckResult).
"""


class LatticeToolkitError(Exception):
    """Base class for all toolkit errors"""

    exit_code = 2


class RankDeficientError(LatticeToolkitError):
    """Basis columns are linearly dependent"""


class BlockRangeError(LatticeToolkitError):
    """Block range outside [1, n]"""


class ParameterDomainError(LatticeToolkitError):
    """Parameters outside the domain an algorithm accepts"""


class BasisParseError(LatticeToolkitError):
    """Malformed basis file or configuration"""


class OracleBudgetExceeded(LatticeToolkitError):
    """Enumeration requested on a block above the rank cap"""

    exit_code = 3

    def __init__(self, rank: int, max_rank: int):
        super().__init__(f"Enumeration rank {rank} exceeds max_rank={max_rank}")
        self.rank = rank
        self.max_rank = max_rank
