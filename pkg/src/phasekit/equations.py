"""Test equations on [-1, 1], each parameterized by a frequency k.

Coefficients are in monic form: the ODE is y^(n) + q_{n-1} y^(n-1) + ...
+ q_0 y = 0 and ``coeffs(k)`` returns q_0..q_{n-1}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coefficients import CoefficientField
from .errors import InvalidArgumentError
from .phase_basis import ConditionSet


@dataclass(frozen=True)
class Equation:
    name: str
    n: int
    title: str
    _coeffs: object
    _conditions: object = None
    kmax_exponent: int = 20

    def coeffs(self, k):
        k = float(k)
        return CoefficientField(self.n, lambda t: self._coeffs(t, k))

    def conditions(self, k):
        return None if self._conditions is None else ConditionSet(self._conditions(float(k)))

    def residual_scale(self, k):
        # every term of the Riccati residual is O(k^n)
        return float(k) ** self.n

    @property
    def has_reference(self):
        return self._conditions is not None


def _exp1(t, k):
    return [k**3 * (1 + np.cos(t) ** 2) / (1 + k * np.exp(t)), -1j * k / (1 + t**4)]


def _exp2(t, k):
    return [
        -(k**2) * (2 + np.exp(1j * t)) / (1 + t**2),
        k**2 * (1 + np.sin(3 * t) ** 2),
        -(np.cos(6 * t) ** 2 + 2),
    ]


def _exp3(t, k):
    return [
        -2j * k**3 / (1 + t**2),
        k**2 * (1 + t**2),
        -2j * k * (1 + t**2) / (1 + t**4),
    ]


def _exp5(t, k):
    z = np.zeros_like(t)
    return [k**4 * (2 + np.cos(7 * t) ** 2) / (1 + t**4), z, z, z]


def _exp6(t, k):
    return [1j * k * np.log(1.5 + t), (2 + t) / (1 + t**2), -1j * k * (1 + t**2)]


REGISTRY = {
    "exp1": Equation(
        "exp1", 2, "second order IVP",
        _exp1, lambda k: [(0.0, 0, 1.0), (0.0, 1, 1j * k)],
    ),
    "exp2": Equation(
        "exp2", 3, "third order IVP",
        _exp2, lambda k: [(0.0, 0, 1.0), (0.0, 1, -1j * k), (0.0, 2, -(k**2))],
    ),
    "exp3": Equation(
        "exp3", 3, "third order BVP",
        _exp3, lambda k: [(-1.0, 0, 1.0), (1.0, 0, 1.0), (-1.0, 1, 0.0)],
    ),
    "exp5": Equation(
        "exp5", 4, "fourth order, eigenvalues with large real parts (residual only)",
        _exp5, None, kmax_exponent=18,
    ),
    "exp6": Equation(
        "exp6", 3, "third order, eigenvalues of small magnitude",
        _exp6, lambda k: [(0.0, 0, 1.0), (0.0, 1, -1j * k), (0.0, 2, -(k**2))],
    ),
}


def registry():
    return dict(REGISTRY)


def get_equation(name):
    try:
        return REGISTRY[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown equation id {name!r}; known: {sorted(REGISTRY)}") from None
