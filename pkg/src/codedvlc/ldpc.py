"""LDPC codes: seeded sparse construction, systematic encoding, flooding
sum-product decoding, and alist import/export.

Construction samples near-regular columns (weight w, rows balanced to the
lowest current degree) while refusing to reuse any row pair, which keeps the
Tanner graph free of 4-cycles whenever the parameters allow it. Columns are
then permuted into systematic order [information | parity] by GF(2)
elimination, so the information bits are codeword positions 0..k-1 and
puncturing the tail can never touch them.

LLR convention: positive means bit 0 is more likely; an exact zero encodes
"no information" (punctured position).
"""

from __future__ import annotations

import numpy as np

_ATANH_EPS = 1e-12


def _systematize(h):
    """Column permutation + parity map so that H[:, perm] checks [m | P@m].

    Pivots are chosen right-to-left so a matrix already in systematic order
    keeps its layout (alist round trips are exact). Raises on rank deficiency.
    """
    hw = h.copy()
    m_rows, n = hw.shape
    pivot_cols = []
    r = 0
    for col in range(n - 1, -1, -1):
        hits = np.nonzero(hw[r:, col])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            hw[[r, p]] = hw[[p, r]]
        others = np.nonzero(hw[:, col])[0]
        others = others[others != r]
        if others.size:
            hw[others] ^= hw[r]
        pivot_cols.append(col)
        r += 1
        if r == m_rows:
            break
    if r < m_rows:
        raise ValueError("parity-check matrix is rank deficient")
    pivot_cols = np.sort(np.asarray(pivot_cols))
    info_cols = np.setdiff1d(np.arange(n), pivot_cols)
    perm = np.concatenate([info_cols, pivot_cols])
    pivot_rows = [int(np.nonzero(hw[:, c])[0][0]) for c in pivot_cols]
    p_mat = hw[np.ix_(pivot_rows, info_cols)].astype(np.uint8)
    return h[:, perm], perm, p_mat


def _sample_parity_check(n, m_rows, w, rng, strict):
    """Random column-weight-w matrix with balanced rows and no repeated row
    pair (hence girth >= 6). Returns None if strict and a column cannot be
    placed without reusing a pair."""
    row_deg = np.zeros(m_rows, dtype=np.int64)
    used = set()
    col_rows = np.empty((n, w), dtype=np.int64)
    for c in range(n):
        placed = False
        best_rows = None
        best_pairs = None
        best_coll = w * w
        for _ in range(64):
            keys = row_deg + rng.random(m_rows)
            rows = np.sort(np.argpartition(keys, w - 1)[:w])
            pairs = [
                (int(rows[i]), int(rows[j])) for i in range(w) for j in range(i + 1, w)
            ]
            coll = sum(p in used for p in pairs)
            if coll == 0:
                col_rows[c] = rows
                used.update(pairs)
                row_deg[rows] += 1
                placed = True
                break
            if coll < best_coll:
                best_coll, best_rows, best_pairs = coll, rows, pairs
        if not placed:
            if strict:
                return None
            col_rows[c] = best_rows
            used.update(best_pairs)
            row_deg[best_rows] += 1
    h = np.zeros((m_rows, n), dtype=np.uint8)
    h[col_rows.ravel(), np.repeat(np.arange(n), w)] = 1
    return h


class LdpcCode:
    """Binary LDPC code defined by a full-rank parity-check matrix.

    Codewords are laid out [information bits | parity bits]; ``h`` is stored
    in that column order and every encoded word satisfies h @ c = 0 (mod 2).
    """

    def __init__(self, parity_check, seed=None, col_weight=None):
        h = np.ascontiguousarray(np.asarray(parity_check, dtype=np.uint8) & 1)
        if h.ndim != 2 or h.shape[0] >= h.shape[1]:
            raise ValueError("parity-check matrix must be (n-k) x n with n > n-k")
        if np.unique(h, axis=0).shape[0] != h.shape[0]:
            raise ValueError("parity-check matrix has repeated rows")
        h_sys, perm, p_mat = _systematize(h)
        self.h = h_sys
        self.h.flags.writeable = False
        self.encode_perm = perm
        self.seed = seed
        self.col_weight = col_weight
        self.m_rows, self.n = h_sys.shape
        self.k = self.n - self.m_rows
        # float32 keeps GF(2) sums exact (counts <= k << 2^24) and hits BLAS
        self._p_f32 = p_mat.astype(np.float32)

        rows, cols = np.nonzero(h_sys)
        self._edge_row = rows.astype(np.int32)
        self._edge_col = cols.astype(np.int32)

    @classmethod
    def construct(cls, n, k, col_weight=3, seed=1, max_restarts=60):
        """Deterministic seeded construction; resamples on rank deficiency.

        Pair-disjoint (4-cycle-free) placement is attempted first; for tiny
        codes where that is combinatorially impossible the later attempts
        relax to minimal pair reuse.
        """
        if not 0 < k < n:
            raise ValueError(f"need 0 < k < n, got n={n}, k={k}")
        if col_weight < 2:
            raise ValueError("column weight must be at least 2")
        if col_weight > n - k:
            raise ValueError(f"column weight {col_weight} exceeds check count {n - k}")
        for attempt in range(max_restarts):
            rng = np.random.default_rng([int(seed), attempt])
            strict = attempt < max_restarts // 2
            h = _sample_parity_check(n, n - k, col_weight, rng, strict)
            if h is None:
                continue
            try:
                return cls(h, seed=seed, col_weight=col_weight)
            except ValueError:
                continue
        raise RuntimeError(f"LDPC construction failed for (n={n}, k={k}, w={col_weight})")

    # --- encoding -------------------------------------------------------

    def encode(self, bits) -> np.ndarray:
        """Systematic encode: codeword = [bits | parity]."""
        bits = np.asarray(bits)
        if bits.shape != (self.k,):
            raise ValueError(f"message must have length {self.k}")
        return self.encode_many(bits.reshape(1, -1))[0]

    def encode_many(self, messages) -> np.ndarray:
        messages = np.asarray(messages)
        if messages.ndim != 2 or messages.shape[1] != self.k:
            raise ValueError(f"messages must be (batch, {self.k})")
        if messages.size and (messages.min() < 0 or messages.max() > 1):
            raise ValueError("message bits must be 0/1")
        m32 = messages.astype(np.float32)
        parity = (m32 @ self._p_f32.T) % 2
        out = np.empty((messages.shape[0], self.n), dtype=np.uint8)
        out[:, : self.k] = messages
        out[:, self.k:] = parity
        return out

    def syndrome(self, codeword) -> np.ndarray:
        cw = np.asarray(codeword, dtype=np.int64)
        return (self.h.astype(np.int64) @ cw) & 1

    # --- puncturing -----------------------------------------------------

    def puncture_positions(self, n_symbols, bits_per_symbol) -> np.ndarray:
        nbits = n_symbols * bits_per_symbol
        if nbits > self.n - self.k:
            raise ValueError(
                f"puncturing {nbits} bits would remove information bits "
                f"(only {self.n - self.k} parity bits)"
            )
        return np.arange(self.n - nbits, self.n)

    def puncture(self, codeword, n_symbols, bits_per_symbol):
        """Drop the last n_symbols groups of bits_per_symbol bits.

        The unit is one modulation symbol so each punctured group empties
        exactly one OFDM subcarrier. Returns (shortened, positions).
        """
        pos = self.puncture_positions(n_symbols, bits_per_symbol)
        cw = np.asarray(codeword)
        if cw.shape[-1] != self.n:
            raise ValueError(f"codeword must have length {self.n}")
        return cw[..., : self.n - pos.size].copy(), pos

    # --- decoding -------------------------------------------------------

    def decode(self, llr, max_iters=50):
        """Flooding sum-product decoding with the exact tanh rule.

        Punctured positions must carry exact-zero LLRs. Stops early once the
        hard decision satisfies every check and no posterior is still exactly
        zero (an all-zero input therefore never "converges"). Returns
        (hard bits, converged, iterations); never raises on non-convergence.
        """
        llr = np.asarray(llr, dtype=np.float64)
        if llr.shape != (self.n,):
            raise ValueError(f"llr must have length {self.n}")
        if not np.all(np.isfinite(llr)):
            raise ValueError("llr values must be finite")

        er, ec = self._edge_row, self._edge_col
        r_msg = np.zeros(er.size)
        bits = np.zeros(self.n, dtype=np.uint8)
        converged = False
        iters = 0
        for iters in range(1, max_iters + 1):
            col_sum = np.bincount(ec, weights=r_msg, minlength=self.n)
            q = llr[ec] + col_sum[ec] - r_msg

            t = np.tanh(0.5 * q)
            np.clip(t, -1.0 + _ATANH_EPS, 1.0 - _ATANH_EPS, out=t)
            neg = t < 0.0
            mag = np.abs(t)
            zero = mag == 0.0
            logs = np.zeros_like(mag)
            np.log(mag, out=logs, where=~zero)

            row_log = np.bincount(er, weights=logs, minlength=self.m_rows)
            row_neg = np.bincount(er, weights=neg, minlength=self.m_rows)
            row_zero = np.bincount(er, weights=zero, minlength=self.m_rows)

            # exclusive product over the row, handling exact zeros separately
            other_zeros = row_zero[er] - zero
            sign = 1.0 - 2.0 * ((row_neg[er] - neg).astype(np.int64) & 1)
            prod = sign * np.exp(row_log[er] - logs)
            prod[other_zeros > 0.5] = 0.0
            np.clip(prod, -1.0 + _ATANH_EPS, 1.0 - _ATANH_EPS, out=prod)
            r_msg = 2.0 * np.arctanh(prod)

            total = llr + np.bincount(ec, weights=r_msg, minlength=self.n)
            bits = (total < 0.0).astype(np.uint8)
            check = np.bincount(er, weights=bits[ec], minlength=self.m_rows)
            if not (check.astype(np.int64) & 1).any() and not (total == 0.0).any():
                converged = True
                break
        return bits, converged, iters

    # --- alist ----------------------------------------------------------

    def to_alist(self, path):
        """Write the parity-check matrix in the standard alist text format."""
        col_lists = [
            np.nonzero(self.h[:, c])[0] + 1 for c in range(self.n)
        ]
        row_lists = [np.nonzero(self.h[r, :])[0] + 1 for r in range(self.m_rows)]
        max_c = max(len(x) for x in col_lists)
        max_r = max(len(x) for x in row_lists)
        lines = [
            f"{self.n} {self.m_rows}",
            f"{max_c} {max_r}",
            " ".join(str(len(x)) for x in col_lists),
            " ".join(str(len(x)) for x in row_lists),
        ]
        for lst in col_lists:
            padded = list(lst) + [0] * (max_c - len(lst))
            lines.append(" ".join(str(v) for v in padded))
        for lst in row_lists:
            padded = list(lst) + [0] * (max_r - len(lst))
            lines.append(" ".join(str(v) for v in padded))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_alist(cls, path):
        """Load an externally constructed code from an alist file."""
        with open(path) as fh:
            tokens = fh.read().split()
        it = iter(tokens)
        n = int(next(it))
        m_rows = int(next(it))
        max_c = int(next(it))
        int(next(it))  # max row degree
        col_deg = [int(next(it)) for _ in range(n)]
        [int(next(it)) for _ in range(m_rows)]  # row degrees
        h = np.zeros((m_rows, n), dtype=np.uint8)
        for c in range(n):
            entries = [int(next(it)) for _ in range(max_c)]
            for e in entries[: col_deg[c]]:
                if not 1 <= e <= m_rows:
                    raise ValueError(f"alist row index {e} out of range")
                h[e - 1, c] = 1
        return cls(h)

    def __repr__(self):
        return f"LdpcCode(n={self.n}, k={self.k}, col_weight={self.col_weight}, seed={self.seed})"
