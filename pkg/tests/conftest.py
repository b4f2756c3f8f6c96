"""Shared independent oracles used across the test suite.

These deliberately avoid the library's own fast paths: polynomial
multiplication is schoolbook shift-and-xor, rank is plain GF(2) Gaussian
elimination, the QAM error-rate reference enumerates decision regions with
Q-functions, and the DFT reference is the literal O(N^2) sum.
"""

import numpy as np
import pytest
from scipy.stats import norm


def gf_mul_oracle(a: int, b: int, poly: int, m: int) -> int:
    """Carry-less multiply then reduce modulo the field polynomial."""
    p = 0
    for i in range(b.bit_length()):
        if (b >> i) & 1:
            p ^= a << i
    d = p.bit_length() - 1
    while d >= m:
        p ^= poly << (d - m)
        d = p.bit_length() - 1
    return p


def gf2_rank(mat) -> int:
    """Rank of a binary matrix over GF(2) by Gaussian elimination."""
    a = np.array(mat, dtype=np.uint8) & 1
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        pivots = np.nonzero(a[rank:, c])[0]
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        a[[rank, p]] = a[[p, rank]]
        hits = np.nonzero(a[:, c])[0]
        hits = hits[hits != rank]
        a[hits] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def naive_dft(x: np.ndarray) -> np.ndarray:
    """Direct DFT sum with unitary 1/sqrt(N) scaling."""
    n = len(x)
    k = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return w @ np.asarray(x, dtype=complex) / np.sqrt(n)


def qam_awgn_ber(modem, ebn0_db: float) -> float:
    """Exact bit error rate of Gray M-QAM over AWGN at a given Eb/N0.

    Enumerates per-axis PAM decision regions: for transmitted level i the
    probability of deciding level j is a difference of Q-functions at the
    midpoint thresholds, weighted by the Hamming distance of the axis labels.
    Noise per axis follows the textbook convention sigma^2 = N0/2 with
    Es = log2(M) * Eb.
    """
    bps = modem.bits_per_symbol
    half = bps // 2
    la = 1 << half
    levels = (2 * np.arange(la) - (la - 1)) * modem.norm
    labels = [i ^ (i >> 1) for i in range(la)]

    ebn0 = 10.0 ** (ebn0_db / 10.0)
    sigma = np.sqrt(1.0 / (2.0 * bps * ebn0))  # per-axis with Es = 1

    edges = np.concatenate(([-np.inf], (levels[:-1] + levels[1:]) / 2, [np.inf]))
    bit_err = 0.0
    for i in range(la):
        for j in range(la):
            p_ij = norm.cdf((edges[j + 1] - levels[i]) / sigma) - norm.cdf(
                (edges[j] - levels[i]) / sigma
            )
            bit_err += p_ij * bin(labels[i] ^ labels[j]).count("1")
    return bit_err / (la * half)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
