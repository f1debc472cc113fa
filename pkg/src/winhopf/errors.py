"""Exception types raised by the library.

Every error carries a stable string ``code`` (``E_NOT_INVERTIBLE`` and so on)
so callers such as the command line front end can report it verbatim.
"""


class WinHopfError(Exception):
    code = "E_GENERIC"

    def __init__(self, message="", code=None):
        if code is not None:
            self.code = code
        super().__init__(f"{self.code}: {message}" if message else self.code)


class NotInvertibleError(WinHopfError):
    code = "E_NOT_INVERTIBLE"


class RootMarginError(WinHopfError):
    code = "E_ROOT_MARGIN"


class UnboundedSymbolError(WinHopfError):
    code = "E_UNBOUNDED"


class NotMatchingError(WinHopfError):
    code = "E_NOT_MATCHING"


class NotUnimodularAtZeroError(WinHopfError):
    code = "E_NOT_UNIMODULAR_AT_0"


class NotStrictlyProperError(WinHopfError):
    code = "E_NOT_STRICTLY_PROPER"


class BackendUnsupportedError(WinHopfError):
    code = "E_BACKEND_UNSUPPORTED"


class ShiftOffGridError(WinHopfError):
    code = "E_SHIFT_OFF_GRID"


class BackendMismatchError(WinHopfError):
    code = "E_BACKEND_MISMATCH"


class PreconditionError(WinHopfError):
    code = "E_PRECONDITION"


class RankAmbiguousError(WinHopfError):
    code = "E_RANK_AMBIGUOUS"


class SchemaError(WinHopfError):
    code = "E_SCHEMA"
