"""Exception types shared across the workbench."""

from __future__ import annotations


class CovrlError(Exception):
    """Base class for all workbench errors."""


class HdlSyntaxError(CovrlError):
    """Source text violates the supported grammar."""

    def __init__(self, line: int, col: int, token: str, message: str = ""):
        self.line = line
        self.col = col
        self.token = token
        detail = message or f"unexpected {token!r}"
        super().__init__(f"line {line}, col {col}: {detail}")


class UnsupportedConstruct(CovrlError):
    """Source uses a construct outside the supported subset."""

    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name = name
        self.line = line
        self.col = col
        where = f" at line {line}, col {col}" if line else ""
        super().__init__(f"unsupported construct {name!r}{where}")


class CombinationalCycle(CovrlError):
    def __init__(self, signal: str):
        self.signal = signal
        super().__init__(f"combinational cycle through signal {signal!r}")


class UndeclaredSignal(CovrlError):
    def __init__(self, name: str, line: int = 0):
        self.name = name
        where = f" at line {line}" if line else ""
        super().__init__(f"reference to undeclared signal {name!r}{where}")


class MultipleClocks(CovrlError):
    def __init__(self, clocks):
        self.clocks = sorted(clocks)
        super().__init__(f"design uses more than one clock: {', '.join(self.clocks)}")


class WidthMismatch(CovrlError):
    def __init__(self, port: str, expected: int, got: int):
        self.port = port
        self.expected = expected
        self.got = got
        super().__init__(f"port {port!r} expects {expected} bits, got {got}")


class UnknownPort(CovrlError):
    def __init__(self, name: str, detail: str = ""):
        self.name = name
        super().__init__(detail or f"unknown port {name!r}")


class MissingPort(CovrlError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"input port {name!r} missing from stimulus")


class ActionSpaceTooLarge(CovrlError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"action space of {size} exceeds cap {cap}")


class ClockAsActionPort(CovrlError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"clock port {name!r} cannot be an action port")


class EpisodeFinished(CovrlError):
    def __init__(self):
        super().__init__("episode is done; reset the environment")


class IndexOutOfRange(CovrlError):
    def __init__(self, index: int, size: int):
        self.index = index
        self.size = size
        super().__init__(f"action index {index} outside [0, {size})")


class InvalidHyperparameter(CovrlError):
    pass


class ShapeMismatch(CovrlError):
    pass


class DiscreteActionRequired(CovrlError):
    """Raised when a policy that only supports discrete actions is bound to a continuous space."""

    def __init__(self, policy: str):
        self.policy = policy
        super().__init__(f"{policy} supports only discrete action spaces")


class ProtocolViolation(CovrlError):
    def __init__(self, phase: str, got: str):
        self.phase = phase
        self.got = got
        super().__init__(f"protocol violation in phase {phase!r}: got {got!r}")


class MalformedFrame(CovrlError):
    def __init__(self, excerpt: str):
        self.excerpt = excerpt[:80]
        super().__init__(f"malformed frame: {self.excerpt!r}")


class UnresolvedPlaceholder(CovrlError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"template placeholder {name!r} does not resolve")


class EmptyPortSet(CovrlError):
    def __init__(self, design: str):
        self.design = design
        super().__init__(f"design {design!r} has no ports to drive")


class ConfigError(CovrlError):
    pass


class IntegrityError(CovrlError):
    """A corpus golden no longer regenerates from its source."""
