"""Reference computations that share no code with the package.

Pure Python loops and mpmath at high precision; slow but transparent.
"""
import itertools
import math

import mpmath

mpmath.mp.dps = 40


def j0_series(z):
    """J0 by its power series, summed at 40 significant digits."""
    z = mpmath.mpf(z)
    total, term, k = mpmath.mpf(0), mpmath.mpf(1), 0
    while abs(term) > mpmath.mpf(10) ** -35 or k < 5:
        total += term
        k += 1
        term *= -(z * z / 4) / (k * k)
    return float(total)


def igamc(a, x):
    return float(mpmath.gammainc(a, x, mpmath.inf, regularized=True))


def erfc(x):
    return float(mpmath.erfc(x))


def frequency_p(bits):
    s = sum(1 if b else -1 for b in bits)
    return erfc(abs(s) / math.sqrt(len(bits)) / math.sqrt(2))


def block_frequency_p(bits, M):
    N = len(bits) // M
    chi2 = 0.0
    for i in range(N):
        block = bits[i * M:(i + 1) * M]
        chi2 += (sum(block) / M - 0.5) ** 2
    chi2 *= 4 * M
    return igamc(N / 2, chi2 / 2)


def runs_p(bits):
    n = len(bits)
    pi = sum(bits) / n
    if abs(pi - 0.5) >= 2 / math.sqrt(n):
        return 0.0
    v = 1 + sum(1 for k in range(n - 1) if bits[k] != bits[k + 1])
    return erfc(abs(v - 2 * n * pi * (1 - pi)) / (2 * math.sqrt(2 * n) * pi * (1 - pi)))


def longest_run_p(bits):
    """Only the M=8 table (128 <= n < 6272)."""
    probs = [0.2148, 0.3672, 0.2305, 0.1875]
    N = len(bits) // 8
    counts = [0, 0, 0, 0]
    for i in range(N):
        block = "".join(str(b) for b in bits[i * 8:(i + 1) * 8])
        longest = max(len(r) for r in block.split("0"))
        counts[min(max(longest, 1), 4) - 1] += 1
    chi2 = sum((c - N * p) ** 2 / (N * p) for c, p in zip(counts, probs))
    return igamc(1.5, chi2 / 2)


def _psi2(bits, m):
    if m == 0:
        return 0.0
    n = len(bits)
    ext = list(bits) + list(bits[:m - 1])
    counts = {}
    for i in range(n):
        key = tuple(ext[i:i + m])
        counts[key] = counts.get(key, 0) + 1
    return 2**m / n * sum(c * c for c in counts.values()) - n


def serial_p(bits, m):
    p0, p1, p2 = _psi2(bits, m), _psi2(bits, m - 1), _psi2(bits, m - 2)
    return igamc(2 ** (m - 2), (p0 - p1) / 2), igamc(2 ** (m - 3), (p0 - 2 * p1 + p2) / 2)


def lfsr_generates(taps, bits):
    L = len(taps)
    return all(
        bits[i] == sum(taps[j] * bits[i - 1 - j] for j in range(L)) % 2
        for i in range(L, len(bits))
    )


def linear_complexity_brute(bits):
    """Smallest L such that some length-L LFSR reproduces the sequence."""
    for L in range(len(bits) + 1):
        for taps in itertools.product((0, 1), repeat=L):
            if lfsr_generates(taps, bits):
                return L
    raise AssertionError("unreachable: L = n always works")


def linear_complexity_p(bits, M):
    """LinearComplexity p-value using brute-force-free textbook BM on lists."""
    N = len(bits) // M
    mu = M / 2 + (9 + (-1) ** (M + 1)) / 36 - (M / 3 + 2 / 9) / 2**M
    probs = [0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833]
    counts = [0] * 7
    for i in range(N):
        L = bm_textbook(bits[i * M:(i + 1) * M])
        t = (-1) ** M * (L - mu) + 2 / 9
        edges = [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]
        counts[sum(1 for e in edges if t > e)] += 1
    chi2 = sum((c - N * p) ** 2 / (N * p) for c, p in zip(counts, probs))
    return igamc(3, chi2 / 2)


def bm_textbook(bits):
    """Berlekamp-Massey with explicit coefficient lists (Massey 1969)."""
    n = len(bits)
    c, b = [1] + [0] * n, [1] + [0] * n
    L, m = 0, -1
    for N in range(n):
        d = bits[N]
        for i in range(1, L + 1):
            d ^= c[i] & bits[N - i]
        if d:
            t = c[:]
            for j in range(n - N + m + 1):
                c[N - m + j] ^= b[j]
            if 2 * L <= N:
                L, m, b = N + 1 - L, N, t
    return L


def complex_gaussian_mi_bits(corr):
    """I(X;Y) for unit-variance jointly circular Gaussians with correlation corr."""
    return -math.log2(1 - abs(corr) ** 2)


def best_subset_value(gains, m):
    """Largest sum over all m-subsets, by enumeration."""
    return max(sum(gains[i] for i in subset) for subset in itertools.combinations(range(len(gains)), m))


def hazen_percentile(values, q):
    """Percentile with order statistic k (1-based) placed at (k - 0.5)/n."""
    xs = sorted(values)
    n = len(xs)
    pos = q / 100 * n + 0.5  # 1-based fractional rank
    if pos <= 1:
        return xs[0]
    if pos >= n:
        return xs[-1]
    lo = int(math.floor(pos))
    frac = pos - lo
    return xs[lo - 1] + frac * (xs[lo] - xs[lo - 1])


def constant_bits(const, n):
    """First ``n`` bits of the binary expansion of an mpmath constant in [2, 4)."""
    with mpmath.workprec(n + 100):
        value = int(mpmath.floor(const() * mpmath.mpf(2) ** (n - 2)))
    text = bin(value)[2:]
    assert len(text) == n
    return [int(c) for c in text]
