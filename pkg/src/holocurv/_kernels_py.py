"""Reference implementations of the numeric kernels (no compiled code).

Every function here has a twin with the same signature in ``_kernels.pyx``.
"""
import numpy as np

_SCATTER = {}


def _scatter_matrix(K):
    # maps the flattened outer product of two triangular (K+1)x(K+1) arrays
    # onto the flattened truncated product
    S = _SCATTER.get(K)
    if S is None:
        n = K + 1
        S = np.zeros((n * n * n * n, n * n))
        for i in range(n):
            for j in range(n - i):
                for k in range(n - i - j):
                    for l in range(n - i - j - k):
                        row = (i * n + j) * n * n + (k * n + l)
                        S[row, (i + k) * n + (j + l)] = 1.0
        _SCATTER[K] = S
    return S


def mul1(a, b):
    """Truncated product of two 1-variable coefficient arrays of equal length."""
    n = a.shape[0]
    return np.convolve(a, b)[:n]


def mul2(a, b):
    """Truncated product of two square coefficient arrays (total degree <= K)."""
    K = a.shape[0] - 1
    outer = np.multiply.outer(a, b).reshape(-1)
    return (outer @ _scatter_matrix(K)).reshape(a.shape)


def horner(coeffs, x):
    """Value and first derivative of sum(coeffs[k] * x**k)."""
    p = 0j
    dp = 0j
    for k in range(coeffs.shape[0] - 1, -1, -1):
        dp = dp * x + p
        p = p * x + coeffs[k]
    return p, dp


def aberth_sweep(coeffs, roots):
    """One Gauss-Seidel Aberth-Ehrlich pass over ``roots`` (updated in place).

    Returns the largest correction relative to max(1, |root|).
    """
    n = roots.shape[0]
    worst = 0.0
    for i in range(n):
        z = roots[i]
        p, dp = horner(coeffs, z)
        if p == 0:
            continue
        ratio = p / dp if dp != 0 else complex(1e-3, 1e-3)
        s = 0j
        for j in range(n):
            if j != i:
                d = z - roots[j]
                if d != 0:
                    s += 1.0 / d
        denom = 1.0 - ratio * s
        step = ratio / denom if denom != 0 else ratio
        roots[i] = z - step
        rel = abs(step) / max(1.0, abs(z))
        if rel > worst:
            worst = rel
    return worst
