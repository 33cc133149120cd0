"""
Summation Module
Compensated accumulation for reproducible long sums of complex terms
"""

from typing import Iterable, Union

import numpy as np


def _two_sum(u: float, v: float):
    # Error free transformation: u + v == s + t exactly
    s = u + v
    up = s - v
    vpp = s - up
    up -= u
    vpp -= v
    return s, -(up + vpp)


class NeumaierSum:
    """Running Neumaier sum, real and imaginary parts carried separately"""

    def __init__(self, value: Union[complex, float] = 0.0):
        value = complex(value)
        self._re, self._re_c = value.real, 0.0
        self._im, self._im_c = value.imag, 0.0
        self.count = 0

    def add(self, value: Union[complex, float]) -> None:
        value = complex(value)
        self._re, t = _two_sum(self._re, value.real)
        self._re_c += t
        self._im, t = _two_sum(self._im, value.imag)
        self._im_c += t
        self.count += 1

    def extend(self, values: Iterable) -> None:
        """
        Add values one at a time, in iteration order

        Args:
            values: Iterable of numbers (a numpy array is iterated as given)
        """
        for value in np.asarray(values, dtype=complex).ravel():
            self.add(value)

    @property
    def value(self) -> complex:
        return complex(self._re + self._re_c, self._im + self._im_c)

    def __iadd__(self, value):
        if isinstance(value, NeumaierSum):
            self.add(complex(value._re, value._im))
            self.add(complex(value._re_c, value._im_c))
            self.count += value.count - 2
        else:
            self.add(value)
        return self


def neumaier_sum(values: Iterable) -> complex:
    """Compensated sum of values in the given order"""
    acc = NeumaierSum()
    acc.extend(values)
    return acc.value
