"""JSON helpers for complex scalars and matrices stored as ``[re, im]`` pairs."""

import numpy as np


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair):
    return complex(pair[0], pair[1])


def matrix_to_json(m):
    m = np.asarray(m, dtype=complex)
    return [[complex_to_json(x) for x in row] for row in m]


def matrix_from_json(data):
    return np.array([[complex_from_json(x) for x in row] for row in data], dtype=complex)
