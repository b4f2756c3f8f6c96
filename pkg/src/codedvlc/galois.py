"""Arithmetic over the binary extension fields GF(2^m) via exp/log tables.

Elements are plain ints in [0, 2^m) whose bits are polynomial coefficients
over GF(2), LSB = constant term. Addition is XOR; multiplication goes
through discrete exp/log tables built from a primitive polynomial, with
alpha = 2 (the polynomial x) as the generator.
"""

from __future__ import annotations

import numpy as np

# Conventional primitive polynomials (bitmask, LSB = constant term).
DEFAULT_PRIMITIVE_POLYS = {
    3: 0b1011,       # x^3 + x + 1
    4: 0b10011,      # x^4 + x + 1
    5: 0b100101,     # x^5 + x^2 + 1
    6: 0b1000011,    # x^6 + x + 1
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
}


class GaloisField:
    """GF(2^m) with O(1) table-driven multiply, divide and inverse.

    The exp table is stored doubled (period q-1 repeated twice) so that
    sums of two logs index it without a modular reduction, which keeps the
    hot decoding kernels branch-free.
    """

    def __init__(self, m: int, primitive_poly: int | None = None):
        if m < 2:
            raise ValueError("field degree must be at least 2")
        if primitive_poly is None:
            try:
                primitive_poly = DEFAULT_PRIMITIVE_POLYS[m]
            except KeyError:
                raise ValueError(f"no default primitive polynomial for m={m}") from None
        if primitive_poly >> m != 1:
            raise ValueError(f"primitive polynomial must have degree exactly {m}")
        if not primitive_poly & 1:
            raise ValueError("primitive polynomial must have a nonzero constant term")

        self.m = m
        self.q = 1 << m
        self.primitive_poly = primitive_poly

        exp = np.zeros(2 * (self.q - 1), dtype=np.int32)
        log = np.full(self.q, -1, dtype=np.int32)
        x = 1
        for i in range(self.q - 1):
            if log[x] >= 0:
                # walked back into a previous power before exhausting the
                # multiplicative group: alpha is not a generator
                raise ValueError(
                    f"polynomial {primitive_poly:#x} is not primitive over GF(2): "
                    f"alpha has order {i}"
                )
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & self.q:
                x ^= primitive_poly
        if x != 1:
            raise ValueError(f"polynomial {primitive_poly:#x} is not primitive over GF(2)")
        exp[self.q - 1:] = exp[: self.q - 1]
        self.exp = exp
        self.log = log

    def add(self, a, b):
        """Field addition (= subtraction): XOR of coefficient masks."""
        return a ^ b

    def mul(self, a, b):
        """Multiply field elements; accepts scalars or ndarrays."""
        if np.isscalar(a) and np.isscalar(b):
            if a == 0 or b == 0:
                return 0
            return int(self.exp[self.log[a] + self.log[b]])
        a = np.asarray(a)
        b = np.asarray(b)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        """Multiplicative inverse; a must be nonzero."""
        if np.isscalar(a):
            if a == 0:
                raise ZeroDivisionError("inverse of 0 in a Galois field")
            return int(self.exp[(self.q - 1) - self.log[a]])
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of 0 in a Galois field")
        return self.exp[(self.q - 1) - self.log[a]]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        """a raised to an arbitrary integer exponent (a != 0 for e < 0)."""
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of 0 in a Galois field")
            return 0 if e else 1
        return int(self.exp[(self.log[a] * e) % (self.q - 1)])

    def alpha_pow(self, e: int) -> int:
        """Power of the generator element alpha = 2."""
        return int(self.exp[e % (self.q - 1)])

    def __eq__(self, other):
        return (
            isinstance(other, GaloisField)
            and other.m == self.m
            and other.primitive_poly == self.primitive_poly
        )

    def __hash__(self):
        return hash((self.m, self.primitive_poly))

    def __repr__(self):
        return f"GaloisField(m={self.m}, primitive_poly={self.primitive_poly:#x})"


def build_field(m: int, primitive_poly: int | None = None) -> GaloisField:
    """Construct GF(2^m); rejects non-primitive polynomials."""
    return GaloisField(m, primitive_poly)
