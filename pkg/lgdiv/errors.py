class LgdivError(ValueError):
    pass


class ModulusError(LgdivError):
    pass


class ModulusMismatch(LgdivError):
    pass


class NotASubmodule(LgdivError):
    pass


class NotASubgroup(LgdivError):
    pass


class NotNormal(LgdivError):
    pass


class ValuesNotFixed(LgdivError):
    pass


class NotReductionKernel(LgdivError):
    pass


class SylowNotNormal(LgdivError):
    pass


class CapExceeded(LgdivError, RuntimeError):
    def __init__(self, what, cap):
        super().__init__(f"{what} exceeds cap {cap}")
        self.what = what
        self.cap = cap


class BudgetExceeded(LgdivError, RuntimeError):
    pass


class ParseError(LgdivError):
    def __init__(self, message, token=None, line=None):
        where = f"line {line}: " if line is not None else ""
        near = f" (near {token!r})" if token is not None else ""
        super().__init__(f"{where}{message}{near}")
        self.token = token
        self.line = line


class UsageError(LgdivError):
    pass
