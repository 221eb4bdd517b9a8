"""Plain-numpy geometry stubs that drive the CG restart logic into
constructed corner cases without any electronic-structure machinery.

Points and tangent vectors are 1-D numpy arrays; the energy, gradient and
transport maps are chosen so that the Polak-Ribiere coefficient, the Powell
ratio and the line-search rejection count take exact prescribed values.
"""

import numpy as np


class StubGeometry:
    """Linear energy c.x with a controllable transport scaling factor.

    With a constant gradient c the Polak-Ribiere numerator reduces to
    (1 - t)|c|^2 where t is the transport factor, so beta and the Powell
    ratio are dialed in exactly.
    """

    def __init__(self, slope, transport_factor):
        self.slope = np.asarray(slope, dtype=float)
        self.transport_factor = float(transport_factor)

    def energy(self, x):
        return float(self.slope @ x)

    def gradient(self, x):
        return self.slope.copy(), None

    def precondition(self, x, g, a):
        return g

    def transport(self, x_new, v):
        return self.transport_factor * v

    def retract(self, x, v, alpha):
        return x + alpha * v

    def inner(self, u, v):
        return float(u @ v)

    def norm(self, v):
        return float(np.linalg.norm(v))

    def negate(self, v):
        return -v

    def combine(self, a, u, b, v):
        return a * u + b * v

    def update_norm(self, x_old, x_new):
        return float(np.max(np.abs(x_new - x_old)))


class BarrierGeometry(StubGeometry):
    """Linear energy with a hard wall at x < -1, forcing Armijo rejections.

    Gradient stays the constant slope, so once the backtracked step is
    accepted the Polak-Ribiere coefficient is exactly zero and the only
    possible restart source is the rejection flag.
    """

    def __init__(self):
        super().__init__(slope=[1.0], transport_factor=1.0)

    def energy(self, x):
        if float(x[0]) < -1.0:
            return 10.0
        return float(x[0])
