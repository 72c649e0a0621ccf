"""Compensated (Neumaier) summation, vectorised over trailing axes.

All quadrature-type reductions in the package go through these helpers so
that the same terms reduced in the same order give bit-identical results.
"""

import numpy as np


class NeumaierAccumulator:
    """Running compensated sum of arrays with a fixed shape."""

    def __init__(self, shape):
        self.total = np.zeros(shape)
        self.carry = np.zeros(shape)

    def add(self, x, where=None):
        if where is None:
            s = self.total
            t = s + x
            self.carry += np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
            self.total = t
            return
        s = self.total[where]
        t = s + x
        self.carry[where] += np.where(np.abs(s) >= np.abs(x), (s - t) + x, (x - t) + s)
        self.total[where] = t

    def result(self):
        return self.total + self.carry


def compensated_sum(terms, axis=0):
    """Sum ``terms`` along ``axis`` in index order with Neumaier compensation.

    Returns a Python float when the result is a scalar.
    """
    a = np.moveaxis(np.asarray(terms, dtype=float), axis, 0)
    if a.ndim == 1:
        # same arithmetic as the array path, without per-term numpy overhead
        total = carry = 0.0
        for x in a.tolist():
            t = total + x
            carry += (total - t) + x if abs(total) >= abs(x) else (x - t) + total
            total = t
        return total + carry
    acc = NeumaierAccumulator(a.shape[1:])
    for x in a:
        acc.add(x)
    out = acc.result()
    return float(out) if out.ndim == 0 else out
