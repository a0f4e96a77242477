from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError


class CoefficientField:
    """Evaluator for the coefficients q_0..q_{n-1} of

        y^(n) + q_{n-1} y^(n-1) + ... + q_1 y' + q_0 y = 0.

    ``func`` takes a 1-d array of points and returns a sequence of n arrays
    (or an (n, npts) array).  Scalars are broadcast.
    """

    def __init__(self, n, func):
        if int(n) != n or n < 2:
            raise InvalidArgumentError(f"equation order must be >= 2, got {n!r}")
        self.n = int(n)
        self.func = func

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        vals = self.func(t)
        if len(vals) != self.n:
            raise InvalidArgumentError(f"coefficient function returned {len(vals)} rows, expected {self.n}")
        out = np.empty((self.n, t.size), dtype=complex)
        for j, v in enumerate(vals):
            out[j] = np.broadcast_to(np.asarray(v, dtype=complex), t.shape)
        return out

    @classmethod
    def constant(cls, q):
        q = np.asarray(q, dtype=complex)
        return cls(q.size, lambda t: [np.full(t.shape, v) for v in q])
