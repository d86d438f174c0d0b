"""Exception hierarchy shared by every globcat module."""


def _tail(detail):
    return f" ({detail})" if detail else ""


class GlobcatError(Exception):
    """Base class; the CLI maps these to exit code 2."""


class InvalidCategory(GlobcatError):
    pass


class MissingComposite(InvalidCategory):
    def __init__(self, g, f, detail=""):
        self.pair = (g, f)
        super().__init__(f"MissingComposite: ({g}, {f}) is composable but has no valid composite{_tail(detail)}")


class InvalidMonoid(GlobcatError):
    pass


class NonAssociative(InvalidCategory, InvalidMonoid):
    """Raised for categories and for monoid tables (a monoid being a one-object category)."""

    def __init__(self, h, g, f):
        self.triple = (h, g, f)
        super().__init__(f"NonAssociative: ({h} o {g}) o {f} != {h} o ({g} o {f})")


class BadIdentity(InvalidCategory):
    def __init__(self, obj, detail=""):
        self.object = obj
        super().__init__(f"BadIdentity at object {obj}{_tail(detail)}")


class InvalidFunctor(GlobcatError):
    pass


class InvalidNatTransformation(GlobcatError):
    pass


class InvalidSimplicialSet(GlobcatError):
    pass


class SizeLimitExceeded(GlobcatError):
    def __init__(self, what, limit):
        self.what = what
        self.limit = limit
        super().__init__(f"SizeLimitExceeded: {what} exceeds cap {limit}")


class NotFinite(GlobcatError):
    def __init__(self, bound):
        self.bound = bound
        super().__init__(f"NotFinite: congruence closure did not stabilize within word length {bound}")


class InsufficientTruncation(GlobcatError):
    def __init__(self, have, need):
        self.have = have
        self.need = need
        super().__init__(f"InsufficientTruncation: bound {have} given, bound >= {need} required")


class ActionNotFree(GlobcatError):
    def __init__(self, obj, element):
        self.object = obj
        self.element = element
        super().__init__(f"ActionNotFree: object {obj} is fixed by {element}")


class NotStronglyConnected(GlobcatError):
    def __init__(self, x, y):
        self.pair = (x, y)
        super().__init__(f"NotStronglyConnected: no morphism {x} -> {y}")


class ConditionsFailed(GlobcatError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"ConditionsFailed: {self.violations[:3]}")


class ComplexViolation(GlobcatError):
    kind = "ComplexViolation"

    def __init__(self, chain, detail=""):
        self.chain = tuple(chain)
        super().__init__(f"{self.kind} at {self.chain}{': ' + detail if detail else ''}")


class UnitalityViolation(ComplexViolation):
    kind = "UnitalityViolation"


class LaxFunctorialityViolation(ComplexViolation):
    kind = "LaxFunctorialityViolation"


class CocycleViolation(ComplexViolation):
    kind = "CocycleViolation"
