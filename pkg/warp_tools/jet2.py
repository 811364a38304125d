import numpy as np

def _sym_outer(u, v):
    c = np.outer(u, v)
    return c + c.T

class Jet2:
    """
    Value, gradient and Hessian of a scalar at a point.

    The arithmetic propagates the second-order truncated Taylor expansion,
    so derivatives are exact up to rounding. Every operation builds the
    Hessian from symmetric pieces; a jet built from symmetric inputs
    stays exactly symmetric.
    """

    __slots__ = ('value', 'grad', 'hess')

    def __init__(self, value, grad, hess):
        self.value = value
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value, n):
        return cls(value, np.zeros(n), np.zeros((n, n)))

    @classmethod
    def variable(cls, value, index, n):
        grad = np.zeros(n)
        grad[index] = 1.0
        return cls(value, grad, np.zeros((n, n)))

    @property
    def dim(self):
        return self.grad.shape[0]

    def __repr__(self):
        return 'Jet2(value={!r}, grad={}, hess={})'.format(self.value, self.grad.tolist(), self.hess.tolist())

    def __add__(self, other):
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    def __sub__(self, other):
        return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __mul__(self, other):
        a, b = self, other
        return Jet2(
            a.value * b.value,
            a.value * b.grad + b.value * a.grad,
            a.value * b.hess + b.value * a.hess + _sym_outer(a.grad, b.grad))

    def __truediv__(self, other):
        q = self.value / other.value
        grad = (self.grad - q * other.grad) / other.value
        hess = (self.hess - q * other.hess - _sym_outer(grad, other.grad)) / other.value
        return Jet2(q, grad, hess)

    def chain(self, value, d1, d2):
        """Compose with a scalar function whose value and first two derivatives at self.value are given."""
        return Jet2(value, d1 * self.grad, d1 * self.hess + d2 * np.outer(self.grad, self.grad))

    def symmetrized(self):
        return Jet2(self.value, self.grad, 0.5 * (self.hess + self.hess.T))

    def along(self, u):
        """First directional derivative along u."""
        return float(self.grad @ u)

    def along2(self, u, v):
        return float(u @ self.hess @ v)
