"""Gray-mapped square M-QAM with exact per-bit LLR demapping.

Each axis carries half of the symbol's bits through a reflected-Gray map of
the PAM levels {..., -3, -1, +1, +3, ...}, scaled so the constellation has
unit average energy. A symbol label packs the I-axis bits (MSB half) above
the Q-axis bits, which makes labels directly usable as GF(2^m) symbols on
the Reed-Solomon path.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp


class QamModem:
    def __init__(self, m_order: int):
        bps = int(np.log2(m_order))
        if 2 ** bps != m_order or bps % 2 != 0 or bps < 2:
            raise ValueError(f"modulation order {m_order} is not square M-QAM")
        self.m_order = m_order
        self.bits_per_symbol = bps
        half = bps // 2
        la = 1 << half

        levels = 2 * np.arange(la) - (la - 1)
        self.norm = 1.0 / np.sqrt(2.0 * np.mean(levels.astype(float) ** 2))

        gray = np.array([i ^ (i >> 1) for i in range(la)])
        level_of_label = np.empty(la, dtype=np.int64)
        level_of_label[gray] = np.arange(la)

        labels = np.arange(m_order)
        i_axis = levels[level_of_label[labels >> half]]
        q_axis = levels[level_of_label[labels & (la - 1)]]
        self.points = (i_axis + 1j * q_axis) * self.norm

        shifts = np.arange(bps - 1, -1, -1)
        self.point_bits = ((labels[:, None] >> shifts[None, :]) & 1).astype(np.uint8)

        # per-bit label partitions for the LLR sums
        self._bit0_idx = [np.nonzero(self.point_bits[:, b] == 0)[0] for b in range(bps)]
        self._bit1_idx = [np.nonzero(self.point_bits[:, b] == 1)[0] for b in range(bps)]

    # --- mapping ----------------------------------------------------------

    def map_labels(self, labels) -> np.ndarray:
        labels = np.asarray(labels)
        if labels.size and (labels.min() < 0 or labels.max() >= self.m_order):
            raise ValueError("symbol label outside the constellation")
        return self.points[labels]

    def map_bits(self, bits) -> np.ndarray:
        bits = np.asarray(bits)
        if bits.size % self.bits_per_symbol:
            raise ValueError(
                f"bit count {bits.size} not divisible by {self.bits_per_symbol}"
            )
        groups = bits.reshape(-1, self.bits_per_symbol).astype(np.int64)
        weights = 1 << np.arange(self.bits_per_symbol - 1, -1, -1)
        return self.points[groups @ weights]

    # --- hard decisions ----------------------------------------------------

    def hard_labels(self, received) -> np.ndarray:
        """Nearest constellation point; ties resolve to the lower label."""
        received = np.asarray(received, dtype=complex)
        d2 = np.abs(received[:, None] - self.points[None, :]) ** 2
        return np.argmin(d2, axis=1)

    def hard_bits(self, received) -> np.ndarray:
        return self.point_bits[self.hard_labels(received)].reshape(-1)

    # --- soft demapping -----------------------------------------------------

    def llrs(self, received, noise_var: float, max_log: bool = False) -> np.ndarray:
        """Per-bit LLRs, positive when bit 0 is more likely.

        noise_var is the total complex noise variance per symbol after
        equalization. The exact form marginalizes over all M points with
        log-sum-exp stabilization; max_log keeps only the nearest point of
        each hypothesis.
        """
        if noise_var <= 0:
            raise ValueError("noise_var must be positive")
        received = np.asarray(received, dtype=complex)
        metric = -np.abs(received[:, None] - self.points[None, :]) ** 2 / noise_var
        out = np.empty((received.size, self.bits_per_symbol))
        for b in range(self.bits_per_symbol):
            m0 = metric[:, self._bit0_idx[b]]
            m1 = metric[:, self._bit1_idx[b]]
            if max_log:
                out[:, b] = m0.max(axis=1) - m1.max(axis=1)
            else:
                out[:, b] = logsumexp(m0, axis=1) - logsumexp(m1, axis=1)
        return out.reshape(-1)

    def __repr__(self):
        return f"QamModem(m_order={self.m_order})"
