"""Exception hierarchy shared by every layer of the toolkit."""

from __future__ import annotations


class TeleoError(Exception):
    pass


class TermSyntaxError(TeleoError):
    """Malformed term text. ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int, text: str = ""):
        # callers pass a character index; report bytes of the UTF-8 encoding
        self.offset = len(text[:offset].encode("utf-8", "surrogatepass")) if text else offset
        self.text = text
        super().__init__(f"{message} at offset {self.offset}")


class ProgramSyntaxError(TeleoError):
    def __init__(self, message: str, line: int, col: int):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class UnsupportedFeature(ProgramSyntaxError):
    """A TeleoR construct this interpreter deliberately does not implement."""

    def __init__(self, feature: str, line: int, col: int):
        self.feature = feature
        super().__init__(f"unsupported TeleoR feature: {feature}", line, col)


class DuplicateDefinition(TeleoError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name = name
        self.line = line
        self.col = col
        super().__init__(f"duplicate definition of {name!r}")


class UndefinedType(TeleoError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"undefined type {name!r}")


class InvalidTypeDefinition(TeleoError):
    pass


class InternalError(TeleoError):
    pass


class EvalError(TeleoError):
    """A condition or expression that cannot be evaluated."""


class EngineError(TeleoError):
    code = "engine-error"


class ExceededRecursionDepth(EngineError):
    code = "exceeded-recursion-depth"


class NoFirableRule(EngineError):
    code = "no-firable-rule"


class UnboundAction(EngineError):
    code = "unbound-action"


class TransportError(TeleoError):
    pass


class HandshakeError(TransportError):
    pass
