"""Exception hierarchy for the aeds_compress package

Every error raised on purpose by the package derives from AedsError, so the
CLI and the web service can tell data errors apart from internal failures.
Argument errors also derive from ValueError.
"""


from typing import Any


class AedsError(Exception):
    """Base class for all package errors"""


class DegenerateAlphabet(AedsError, ValueError):
    """Fewer than two symbols with positive weight"""


class InvalidWeight(AedsError, ValueError):
    """Negative weight, or a probability list not summing to one"""


class AlphabetMismatch(AedsError, ValueError):
    """Two objects that must share an alphabet do not"""


class UnknownSymbol(AedsError, ValueError):
    """A symbol to encode is not in the table alphabet"""

    def __init__(self, position: int, symbol: Any) -> None:
        super().__init__(f"symbol {symbol!r} at position {position} is not in the alphabet")
        self.position = position
        self.symbol = symbol


class PrefixViolation(AedsError):
    """Two decoding codewords of one state are in a prefix relation"""

    def __init__(self, state: int, first: str, second: str) -> None:
        super().__init__(f"state {state}: codeword '{first}' is a prefix of '{second}'")
        self.state = state
        self.first = first
        self.second = second


class InconsistentTables(AedsError):
    """Encoder and decoder maps do not mirror each other"""

    def __init__(self, state: int, symbol: Any, reason: str = "") -> None:
        message = f"encoder entry ({state}, {symbol!r}) has no matching decoder entry"
        if reason:
            message = f"{message}: {reason}"
        super().__init__(message)
        self.state = state
        self.symbol = symbol


class MissingSymbol(AedsError):
    """The encoder of a state is not defined on the full alphabet"""

    def __init__(self, state: int, symbol: Any) -> None:
        super().__init__(f"encoder of state {state} is missing symbol {symbol!r}")
        self.state = state
        self.symbol = symbol


class NotErgodic(AedsError):
    """The encoding chain is reducible or periodic"""


class NoConvergence(AedsError):
    """Power iteration stopped before reaching the requested residual"""

    def __init__(self, residual: float) -> None:
        super().__init__(f"power iteration did not converge (residual {residual:.3e})")
        self.residual = residual


class TruncatedStream(AedsError):
    """The stream ended before all declared symbols were decoded"""


class UnmatchedCodeword(AedsError):
    """The payload holds a bit sequence that no decoding codeword matches"""

    def __init__(self, state: int, prefix: str) -> None:
        super().__init__(f"no codeword of state {state} starts with '{prefix}'")
        self.state = state
        self.prefix = prefix


class TrailingGarbage(AedsError):
    """Non-zero padding or extra bytes after the payload"""


class VersionMismatch(AedsError):
    """A stream or table was written by an unsupported format version"""


class HashMismatch(AedsError):
    """Content hash does not match the table in use"""


class MalformedTable(AedsError):
    """Serialized table bytes cannot be parsed"""


class TooFewStates(AedsError, ValueError):
    """Requested state count is too small for the construction"""


class NotPowerOfTwo(AedsError, ValueError):
    """Construction requires a power-of-two state count"""


class NonIntegerRatio(AedsError, ValueError):
    """N / N_s is not an integer for some symbol"""

    def __init__(self, symbol: Any, total: int, count: int) -> None:
        super().__init__(f"N / N_s = {total} / {count} is not an integer for {symbol!r}")
        self.symbol = symbol


class StateBudgetExceeded(AedsError, ValueError):
    """Construction needs more states than the configured budget"""


class DegenerateSingleSymbol(AedsError, ValueError):
    """A single symbol owns every state"""


class KindMismatch(AedsError, ValueError):
    """Analysis asked for a table of a different construction kind"""


class UnknownFigure(AedsError, ValueError):
    """Figure identifier is not known"""


class InvalidPartition(AedsError, ValueError):
    """State subsets or forward sets break the state-divided conditions"""


class MalformedStream(AedsError):
    """Stream header is not an encoded stream of this package"""


class EmptySample(AedsError, ValueError):
    """A sampling run was asked for fewer than one symbol"""
