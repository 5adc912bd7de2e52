from inspect import isfunction
import numpy as np


def exists(val):
    return val is not None


def default(val, d):
    if exists(val):
        return val
    return d() if isfunction(d) else d


def valuations(arr, p, n):
    """
    Elementwise p-adic valuation of an integer array reduced mod p^n.
    Zero entries get valuation n.
    """
    arr = np.asarray(arr, dtype=np.int64)
    out = np.zeros(arr.shape, dtype=np.int64)
    x = arr.copy()
    for _ in range(n):
        divisible = (x % p == 0)
        out += divisible
        x = np.where(divisible, x // p, x)
    return out


def unit_inverse(u, q):
    return pow(int(u) % q, -1, q)


def shape_to_str(x):
    return "x".join(str(s) for s in x.shape)
