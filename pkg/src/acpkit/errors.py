class AcpError(Exception):
    """Base class for all workbench errors."""


class DeclarationError(AcpError):
    pass


class VariantError(AcpError):
    pass


class DepthCapError(AcpError):
    pass


class ParseError(AcpError):
    def __init__(self, msg: str, pos: int | None = None):
        self.pos = pos
        super().__init__(msg if pos is None else f"{msg} at position {pos}")


class UnguardedError(AcpError):
    pass


class RequiresUnfoldingError(AcpError):
    pass


class AcyclicityError(AcpError):
    """Raised when a construction needs an acyclic system or a depth bound."""


class OracleBoundError(AcpError):
    pass
