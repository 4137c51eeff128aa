"""Shared oracle utilities for the test suite.

Everything in here is deliberately independent of the package's own
machinery: closed forms, brute-force kron products and Haar sampling, used
to freeze expected values.
"""
import numpy as np

KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)


def kron_all(*vecs):
    out = np.ones(1, dtype=complex)
    for v in vecs:
        out = np.kron(out, np.asarray(v, dtype=complex))
    return out


def haar_unitary(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def haar_state(dim, rng):
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def ghz_amplitudes(n):
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return amps


def w_amplitudes(n):
    amps = np.zeros(2**n, dtype=complex)
    for j in range(n):
        amps[1 << (n - 1 - j)] = 1 / np.sqrt(n)
    return amps


def cluster_amplitudes(n):
    amps = np.empty(2**n, dtype=complex)
    for x in range(2**n):
        bits = [(x >> (n - 1 - j)) & 1 for j in range(n)]
        sign = sum(bits[j] * bits[j + 1] for j in range(n - 1))
        amps[x] = (-1.0) ** sign
    return amps / 2 ** (n / 2)


def schmidt_rank(amps, left_qubits, n, tol=1e-10):
    m = np.asarray(amps).reshape(2**left_qubits, 2 ** (n - left_qubits))
    return int((np.linalg.svd(m, compute_uv=False) > tol).sum())
