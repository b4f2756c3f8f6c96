"""Systematic Reed-Solomon codec over GF(2^m) with parity puncturing and
errors-and-erasures decoding.

Conventions: codeword index i holds the coefficient of x^(n-1-i), so the
message occupies the first k positions and parity the last n-k. The
generator polynomial has the consecutive roots alpha^b .. alpha^(b+n-k-1)
with b = first_root. Position i has locator X_i = alpha^(n-1-i).

Decoding: syndromes -> erasure locator -> Forney (modified) syndromes ->
Berlekamp-Massey -> Chien search -> Forney value computation, followed by
a syndrome recheck of the corrected word so miscorrections are reported as
failures instead of silently returned. The hot kernels are numba-compiled
and batched; a Monte Carlo sweep decodes every codeword of a frame in one
call.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from .galois import GaloisField


@njit(cache=True)
def _encode_kernel(msgs, gen_hat, exp, log, out):
    # gen_hat: generator coefficients x^(2t-1)..x^0 (leading term dropped)
    nb, k = msgs.shape
    twot = gen_hat.shape[0]
    for t in range(nb):
        for i in range(k):
            out[t, i] = msgs[t, i]
        for j in range(twot):
            out[t, k + j] = 0
        for i in range(k):
            fb = msgs[t, i] ^ out[t, k]
            for j in range(twot - 1):
                out[t, k + j] = out[t, k + j + 1]
            out[t, k + twot - 1] = 0
            if fb != 0:
                lfb = log[fb]
                for j in range(twot):
                    g = gen_hat[j]
                    if g != 0:
                        out[t, k + j] ^= exp[log[g] + lfb]


@njit(cache=True, inline="always")
def _accumulate_syndromes(syn, value, position, n, twot, b, qm1, exp, log):
    # XOR value * alpha^((b+j) * (n-1-position)) into syn[j] for all j.
    # The exponent advances additively, so the gathers are independent.
    base = (n - 1 - position) % qm1
    idx = (log[value] + b * base) % qm1
    for j in range(twot):
        syn[j] ^= exp[idx]
        idx += base
        if idx >= qm1:
            idx -= qm1


@njit(cache=True, parallel=True)
def _decode_kernel(received, gamma, k, b, qm1, exp, log, out_msg, out_ok):
    nb, n = received.shape
    twot = n - k
    f = gamma.shape[0] - 1
    for t in prange(nb):
        r = received[t]
        for i in range(k):
            out_msg[t, i] = r[i]
        out_ok[t] = False

        syn = np.zeros(twot, dtype=np.int32)
        for i in range(n):
            ri = r[i]
            if ri != 0:
                _accumulate_syndromes(syn, ri, i, n, twot, b, qm1, exp, log)
        allzero = True
        for j in range(twot):
            if syn[j] != 0:
                allzero = False
                break
        if allzero:
            # valid codeword as received; erasure fills were already correct
            out_ok[t] = True
            continue
        if f > twot:
            continue

        # Forney syndromes: coefficients f..2t-1 of S(x) * Gamma(x)
        nu = twot - f
        fs = np.zeros(nu, dtype=np.int32)
        for idx in range(nu):
            j = f + idx
            acc = 0
            for u in range(f + 1):
                su = j - u
                if 0 <= su < twot:
                    g = gamma[u]
                    s = syn[su]
                    if g != 0 and s != 0:
                        acc ^= exp[log[g] + log[s]]
            fs[idx] = acc

        # Berlekamp-Massey for the error locator
        lam = np.zeros(twot + 1, dtype=np.int32)
        bpoly = np.zeros(twot + 1, dtype=np.int32)
        lam[0] = 1
        bpoly[0] = 1
        big_l = 0
        shift = 1
        bcoef = 1
        for ri in range(nu):
            delta = 0
            for j in range(big_l + 1):
                if ri - j < 0:
                    break
                lj = lam[j]
                u = fs[ri - j]
                if lj != 0 and u != 0:
                    delta ^= exp[log[lj] + log[u]]
            if delta == 0:
                shift += 1
                continue
            lcoef = log[exp[(log[delta] - log[bcoef]) % qm1]]
            if 2 * big_l <= ri:
                tmp = lam.copy()
                for j in range(twot + 1 - shift):
                    bj = bpoly[j]
                    if bj != 0:
                        lam[j + shift] ^= exp[lcoef + log[bj]]
                bpoly = tmp
                bcoef = delta
                big_l = ri + 1 - big_l
                shift = 1
            else:
                for j in range(twot + 1 - shift):
                    bj = bpoly[j]
                    if bj != 0:
                        lam[j + shift] ^= exp[lcoef + log[bj]]
                shift += 1
        if 2 * big_l > nu:
            continue

        # errata locator psi = lam * gamma
        psi = np.zeros(twot + 1, dtype=np.int32)
        for i1 in range(big_l + 1):
            li = lam[i1]
            if li == 0:
                continue
            lli = log[li]
            for i2 in range(f + 1):
                g = gamma[i2]
                if g != 0 and i1 + i2 <= twot:
                    psi[i1 + i2] ^= exp[lli + log[g]]
        deg_psi = 0
        for j in range(twot, -1, -1):
            if psi[j] != 0:
                deg_psi = j
                break

        # Chien search: position i has inverse locator alpha^(i+1) because
        # n = q - 1, so stepping i->i+1 advances each term's exponent by its
        # degree. psi[0] = lam[0]*gamma[0] = 1 always.
        nnz = 0
        cdeg = np.empty(twot + 1, dtype=np.int32)
        cacc = np.empty(twot + 1, dtype=np.int32)
        for j in range(1, deg_psi + 1):
            if psi[j] != 0:
                cdeg[nnz] = j
                cacc[nnz] = (log[psi[j]] + j) % qm1
                nnz += 1
        nroots = 0
        root_pos = np.empty(twot, dtype=np.int32)
        for i in range(n):
            v = psi[0]
            for u in range(nnz):
                a = cacc[u]
                v ^= exp[a]
                a += cdeg[u]
                if a >= qm1:
                    a -= qm1
                cacc[u] = a
            if v == 0:
                if nroots < twot:
                    root_pos[nroots] = i
                nroots += 1
        if nroots != deg_psi or nroots > twot:
            continue

        # omega = S * psi mod x^2t
        omega = np.zeros(twot, dtype=np.int32)
        for i1 in range(twot):
            s = syn[i1]
            if s == 0:
                continue
            ls = log[s]
            for i2 in range(deg_psi + 1):
                if i1 + i2 >= twot:
                    break
                p = psi[i2]
                if p != 0:
                    omega[i1 + i2] ^= exp[ls + log[p]]

        corr_pos = np.empty(twot, dtype=np.int32)
        corr_val = np.empty(twot, dtype=np.int32)
        ncorr = 0
        consistent = True
        for ridx in range(nroots):
            i = root_pos[ridx]
            e_inv = (qm1 - (n - 1 - i) % qm1) % qm1
            num = 0
            for j in range(twot):
                o = omega[j]
                if o != 0:
                    num ^= exp[(log[o] + e_inv * j) % qm1]
            den = 0
            for j in range(1, deg_psi + 1, 2):
                p = psi[j]
                if p != 0:
                    den ^= exp[(log[p] + e_inv * (j - 1)) % qm1]
            if den == 0:
                consistent = False
                break
            if num != 0:
                lx = (n - 1 - i) % qm1
                corr_pos[ncorr] = i
                corr_val[ncorr] = exp[(log[num] - log[den] + lx * (1 - b)) % qm1]
                ncorr += 1
        if not consistent:
            continue

        # miscorrection guard: the fixed word must be a codeword. By
        # linearity, S(corrected) = S(received) ^ S(correction pattern).
        for c in range(ncorr):
            _accumulate_syndromes(syn, corr_val[c], corr_pos[c], n, twot, b, qm1, exp, log)
        ok = True
        for j in range(twot):
            if syn[j] != 0:
                ok = False
                break
        if ok:
            for c in range(ncorr):
                p = corr_pos[c]
                if p < k:
                    out_msg[t, p] ^= corr_val[c]
            out_ok[t] = True


class RsCode:
    """RS(n, k) over GF(2^m) with n = 2^m - 1.

    ``v_s`` is the default number of punctured parity symbols per codeword;
    puncturing always removes the tail of the parity block, so positions are
    fixed and known to both ends.
    """

    def __init__(
        self,
        n: int,
        k: int,
        field: GaloisField | None = None,
        first_root: int = 1,
        v_s: int = 0,
    ):
        m = n.bit_length()
        if n != (1 << m) - 1:
            raise ValueError(f"codeword length {n} is not 2^m - 1")
        if field is None:
            field = GaloisField(m)
        if field.q - 1 != n:
            raise ValueError(f"field GF({field.q}) does not match n={n}")
        if not 0 < k < n:
            raise ValueError(f"need 0 < k < n, got k={k}, n={n}")
        if not 0 <= v_s <= n - k:
            raise ValueError(f"v_s={v_s} outside [0, n-k={n - k}]")
        self.n = n
        self.k = k
        self.field = field
        self.first_root = first_root
        self.v_s = v_s

        gen = [1]
        for i in range(n - k):
            root = field.alpha_pow(first_root + i)
            nxt = [0] * (len(gen) + 1)
            for j, c in enumerate(gen):
                nxt[j] ^= field.mul(c, root)
                nxt[j + 1] ^= c
            gen = nxt
        self._gen = np.array(gen, dtype=np.int32)          # ascending degree
        self._gen_hat = self._gen[:-1][::-1].copy()        # x^(2t-1)..x^0

    @property
    def n_parity(self) -> int:
        return self.n - self.k

    def correctable(self, v_s: int | None = None) -> int:
        """Correctable symbol errors per codeword with v_s punctured."""
        v = self.v_s if v_s is None else v_s
        if not 0 <= v <= self.n - self.k:
            raise ValueError(f"v_s={v} outside [0, n-k={self.n - self.k}]")
        return (self.n - self.k - v) // 2

    def _check_symbols(self, arr):
        arr = np.asarray(arr, dtype=np.int32)
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.q):
            raise ValueError("symbol values outside the field")
        return arr

    def encode(self, message) -> np.ndarray:
        """Systematic encode of one k-symbol message."""
        return self.encode_many(np.asarray(message).reshape(1, -1))[0]

    def encode_many(self, messages) -> np.ndarray:
        messages = self._check_symbols(messages)
        if messages.ndim != 2 or messages.shape[1] != self.k:
            raise ValueError(f"messages must be (batch, {self.k})")
        out = np.empty((messages.shape[0], self.n), dtype=np.int32)
        _encode_kernel(
            np.ascontiguousarray(messages), self._gen_hat, self.field.exp, self.field.log, out
        )
        return out

    def puncture_positions(self, v_s: int | None = None) -> np.ndarray:
        v = self.v_s if v_s is None else v_s
        if not 0 <= v <= self.n - self.k:
            raise ValueError(f"cannot puncture {v} symbols: only {self.n - self.k} parity")
        return np.arange(self.n - v, self.n)

    def puncture(self, codewords, v_s: int | None = None) -> np.ndarray:
        """Drop the last v_s parity symbols (identity for v_s = 0)."""
        v = self.v_s if v_s is None else v_s
        self.puncture_positions(v)
        cw = np.asarray(codewords)
        return cw[..., : self.n - v].copy()

    def restore_punctured(self, punctured, v_s: int | None = None):
        """Re-inflate punctured words with zero fills; returns (full, erasures)."""
        v = self.v_s if v_s is None else v_s
        pos = self.puncture_positions(v)
        p = np.asarray(punctured, dtype=np.int32)
        if p.shape[-1] != self.n - v:
            raise ValueError(f"expected {self.n - v} symbols, got {p.shape[-1]}")
        full = np.zeros(p.shape[:-1] + (self.n,), dtype=np.int32)
        full[..., : self.n - v] = p
        return full, pos

    def _erasure_locator(self, erasures) -> np.ndarray:
        pos = np.asarray(sorted(set(int(e) for e in erasures)), dtype=np.int64)
        if pos.size and (pos.min() < 0 or pos.max() >= self.n):
            raise ValueError("erasure position outside the codeword")
        gf = self.field
        gamma = [1]
        for p in pos:
            x = gf.alpha_pow(self.n - 1 - int(p))
            nxt = [0] * (len(gamma) + 1)
            for j, c in enumerate(gamma):
                nxt[j] ^= c
                nxt[j + 1] ^= gf.mul(c, x)
            gamma = nxt
        return np.array(gamma, dtype=np.int32)

    def decode(self, received, erasures=()):
        """Errors-and-erasures decode; returns (message, ok).

        Succeeds whenever 2e + f <= n - k. On failure the systematic part of
        the received word is returned unchanged with ok = False, so callers
        can still count residual bit errors.
        """
        msgs, ok = self.decode_many(np.asarray(received).reshape(1, -1), erasures)
        return msgs[0], bool(ok[0])

    def decode_many(self, received, erasures=()):
        received = self._check_symbols(received)
        if received.ndim != 2 or received.shape[1] != self.n:
            raise ValueError(f"received must be (batch, {self.n})")
        gamma = self._erasure_locator(erasures)
        out_msg = np.empty((received.shape[0], self.k), dtype=np.int32)
        out_ok = np.zeros(received.shape[0], dtype=np.bool_)
        _decode_kernel(
            np.ascontiguousarray(received),
            gamma,
            self.k,
            self.first_root,
            self.field.q - 1,
            self.field.exp,
            self.field.log,
            out_msg,
            out_ok,
        )
        return out_msg, out_ok

    def __repr__(self):
        return f"RsCode(n={self.n}, k={self.k}, m={self.field.m}, v_s={self.v_s})"
