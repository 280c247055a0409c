"""Pure numpy versions of the compiled kernels (same signatures, same results up to rounding)."""

import numpy as np


def _bitrev_index(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _fft_batch(a, tw, inverse):
    rows, n = a.shape
    a = a[:, _bitrev_index(n)]
    size = 2
    while size <= n:
        half = size // 2
        w = tw[:: n // size][:half]
        if inverse:
            w = w.conj()
        a = a.reshape(rows, n // size, size)
        u = a[..., :half]
        v = a[..., half:] * w
        a = np.concatenate((u + v, u - v), axis=-1)
        size *= 2
    a = a.reshape(rows, n)
    if inverse:
        a = a * (1.0 / n)
    return a


def fft_rows(a, tw, inverse):
    a[...] = _fft_batch(np.asarray(a), np.asarray(tw), inverse)


def synthesize_rows(z, amp, tw, out):
    z = np.asarray(z)
    rows, m = z.shape
    h = m // 2
    y = np.empty((rows, m), dtype=complex)
    y[:, 0] = amp[0] * z[:, 0]
    y[:, 1:h] = amp[1:h] * (z[:, 1 : m - 1 : 2] + 1j * z[:, 2 : m - 1 : 2])
    y[:, h] = amp[h] * z[:, m - 1]
    y[:, h + 1 :] = y[:, h - 1 : 0 : -1].conj()
    out[...] = _fft_batch(y, np.asarray(tw), True)[:, : out.shape[1]].real


def lagged_sums(xi, lags, out):
    xi = np.asarray(xi)
    t = xi.shape[1]
    for l, lag in enumerate(lags):
        out[:, l] = np.einsum("ij,ij->i", xi[:, : t - lag], xi[:, lag:])


def cumulative_rows(xi, out):
    out[:, 0] = 0.0
    np.cumsum(xi, axis=1, out=out[:, 1:])
