class WarpToolsError(Exception):
    pass

class ExprSyntaxError(WarpToolsError, ValueError):
    def __init__(self, message, source, offset):
        super().__init__('{} at offset {}'.format(message, offset))
        self.source = source
        self.offset = offset

class UnknownVariableError(WarpToolsError, ValueError):
    def __init__(self, name, coords):
        super().__init__('unknown variable {!r}, expected one of {}'.format(name, ', '.join(coords) or '(none)'))
        self.name = name

class ExprDomainError(WarpToolsError, ArithmeticError):
    def __init__(self, message, subexpression):
        super().__init__('{}: {}'.format(message, subexpression))
        self.subexpression = subexpression

class NonDifferentiableError(ExprDomainError):
    pass

class SingularMetricError(WarpToolsError, ArithmeticError):
    pass

class DegeneratePlaneError(WarpToolsError, ArithmeticError):
    pass

class NonpositiveWarpingError(WarpToolsError, ValueError):
    def __init__(self, value, point):
        super().__init__('warping function is not positive ({!r}) at {}'.format(value, point))
        self.value = value
        self.point = point

class SignatureUnsupportedError(WarpToolsError, ValueError):
    pass

class SplitFieldError(WarpToolsError, ValueError):
    pass

class SamplingDomainError(WarpToolsError, ValueError):
    pass

class ScenarioError(WarpToolsError, ValueError):
    def __init__(self, message, location=None):
        super().__init__('{}: {}'.format(location, message) if location else message)
        self.location = location
