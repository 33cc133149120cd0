"""
Characters Module
Kronecker and Jacobi symbols, scalar and vectorized over numpy arrays
"""

import numpy as np
import sympy

from utils.errors import DomainError

# (m/2) for odd m, indexed by m mod 8
_KRONECKER_TWO = (0, 1, 0, -1, 0, -1, 0, 1)


def kronecker(m: int, n: int) -> int:
    """
    Kronecker symbol (m/n), defined for every pair except (0, 0)

    Args:
        m (int): Top argument
        n (int): Bottom argument

    Returns:
        int: -1, 0 or 1
    """
    m, n = int(m), int(n)
    if m == 0 and n == 0:
        raise DomainError("Kronecker symbol (0/0) is undefined")
    if n == 0:
        return 1 if abs(m) == 1 else 0
    if m % 2 == 0 and n % 2 == 0:
        return 0

    result = 1
    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos % 2:
        result = _KRONECKER_TWO[m & 7]
    if n < 0:
        n = -n
        if m < 0:
            result = -result
    if n == 1:
        return result
    return int(result * sympy.jacobi_symbol(m % n, n))


def jacobi_array(a, n) -> np.ndarray:
    """
    Jacobi symbol (a/n) elementwise, n odd and positive

    Args:
        a: Integer array (or scalar) of top arguments
        n: Integer array (or scalar) of odd positive moduli

    Returns:
        np.ndarray: int64 array of -1, 0, 1
    """
    a, n = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(n, dtype=np.int64))
    n = n.copy()
    if np.any(n < 1) or np.any(n % 2 == 0):
        raise DomainError("Jacobi symbol needs odd positive moduli")
    a = np.mod(a, n)
    result = np.ones(a.shape, dtype=np.int64)

    while True:
        active = a != 0
        if not np.any(active):
            break
        while True:
            even = active & ((a & 1) == 0)
            if not np.any(even):
                break
            a = np.where(even, a >> 1, a)
            n_mod_8 = n & 7
            result = np.where(even & ((n_mod_8 == 3) | (n_mod_8 == 5)), -result, result)
        flip = active & ((a & 3) == 3) & ((n & 3) == 3)
        result = np.where(flip, -result, result)
        a, n = np.where(active, n, a), np.where(active, a, n)
        a = np.mod(a, n)

    return np.where(n == 1, result, 0)


def kronecker_array(m: int, n) -> np.ndarray:
    """
    Kronecker symbol (m/n) for a fixed m over an array of positive n

    Args:
        m (int): Top argument
        n: Array of positive integers

    Returns:
        np.ndarray: int64 array of -1, 0, 1
    """
    m = int(m)
    n = np.asarray(n, dtype=np.int64)
    if np.any(n < 1):
        raise DomainError("kronecker_array expects positive n")

    twos = np.zeros(n.shape, dtype=np.int64)
    odd = n.copy()
    while True:
        even = (odd & 1) == 0
        if not np.any(even):
            break
        odd = np.where(even, odd >> 1, odd)
        twos += even

    if m % 2 == 0:
        two_part = np.where(twos > 0, 0, 1)
    else:
        two_part = np.where(twos % 2 == 1, _KRONECKER_TWO[m & 7], 1)
    if -(2**63) <= m < 2**63:
        top = np.mod(np.int64(m), odd)
    else:
        top = np.vectorize(lambda k: m % int(k), otypes=[np.int64])(odd)
    return two_part * jacobi_array(top, odd)


def quadratic_character(d: int, n) -> np.ndarray:
    """Values of chi^(8d)(n) = (8d/n) over an array of positive n"""
    return kronecker_array(8 * int(d), n)
