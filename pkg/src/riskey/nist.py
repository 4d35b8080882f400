"""Six NIST SP 800-22 statistical tests for key bit streams.

Frequency, BlockFrequency, Runs, LongestRuns, Serial and LinearComplexity,
each returning p-values and a pass flag at significance 0.01.
"""
from __future__ import annotations

import csv
import enum
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc

from .errors import InsufficientDataError, InvalidParameterError

ALPHA = 0.01

BLOCK_FREQUENCY_LEN = 128
SERIAL_M = 3
LINEAR_COMPLEXITY_LEN = 500
LINEAR_COMPLEXITY_RECOMMENDED = 1_000_000
LINEAR_COMPLEXITY_MIN = 10_000


class TestKind(str, enum.Enum):
    FREQUENCY = "Frequency"
    BLOCK_FREQUENCY = "BlockFrequency"
    RUNS = "Runs"
    LONGEST_RUNS = "LongestRuns"
    SERIAL = "Serial"
    LINEAR_COMPLEXITY = "LinearComplexity"

    __test__ = False  # not a pytest class


SUITE_ORDER = tuple(TestKind)


@dataclass(frozen=True)
class TestResult:
    kind: TestKind
    n: int
    params: dict
    p_values: tuple[float, ...]

    __test__ = False

    @property
    def p_value(self) -> float:
        return min(self.p_values)

    @property
    def passed(self) -> bool:
        return self.p_value > ALPHA

    def params_text(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.params.items())


@dataclass
class TestReport:
    entries: list[TestResult] = field(default_factory=list)

    __test__ = False

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_rows(self):
        return [
            {
                "test_kind": e.kind.value,
                "n": e.n,
                "params": e.params_text(),
                "p_value": f"{e.p_value:.6f}",
                "pass": str(e.passed).lower(),
            }
            for e in self.entries
        ]

    def to_csv(self, header=True) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, ["test_kind", "n", "params", "p_value", "pass"], lineterminator="\n")
        if header:
            writer.writeheader()
        writer.writerows(self.to_rows())
        return buf.getvalue()


def as_bits(bits) -> np.ndarray:
    bits = getattr(bits, "bits", bits)
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if np.any(arr > 1):
        raise InvalidParameterError("bits must be 0 or 1")
    return arr


def igamc(a, x):
    """Regularized upper incomplete gamma ``Q(a, x)``."""
    return float(gammaincc(a, x))


def _require(test, n, minimum, enforce):
    if enforce and n < minimum:
        raise InsufficientDataError(test.value, n, minimum)


def frequency(bits, enforce_minimum=True) -> TestResult:
    eps = as_bits(bits)
    n = len(eps)
    _require(TestKind.FREQUENCY, n, 100, enforce_minimum)
    s_n = 2 * int(eps.sum()) - n
    p = math.erfc(abs(s_n) / math.sqrt(2 * n))
    return TestResult(TestKind.FREQUENCY, n, {}, (p,))


def block_frequency(bits, block_len=BLOCK_FREQUENCY_LEN, enforce_minimum=True) -> TestResult:
    eps = as_bits(bits)
    n = len(eps)
    _require(TestKind.BLOCK_FREQUENCY, n, 100, enforce_minimum)
    n_blocks = n // block_len
    if n_blocks < 1:
        raise InsufficientDataError(TestKind.BLOCK_FREQUENCY.value, n, block_len)
    props = eps[: n_blocks * block_len].reshape(n_blocks, block_len).mean(axis=1)
    chi2 = 4.0 * block_len * float(np.sum((props - 0.5) ** 2))
    p = igamc(n_blocks / 2.0, chi2 / 2.0)
    return TestResult(TestKind.BLOCK_FREQUENCY, n, {"M": block_len}, (p,))


def runs(bits, enforce_minimum=True) -> TestResult:
    eps = as_bits(bits)
    n = len(eps)
    _require(TestKind.RUNS, n, 100, enforce_minimum)
    pi = eps.mean()
    # frequency prerequisite: a badly biased sequence fails outright
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return TestResult(TestKind.RUNS, n, {}, (0.0,))
    v_obs = 1 + int(np.count_nonzero(eps[1:] != eps[:-1]))
    spread = 2.0 * n * pi * (1.0 - pi)
    p = math.erfc(abs(v_obs - spread) / (2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)))
    return TestResult(TestKind.RUNS, n, {}, (p,))


# (block length, class lower bound, class upper bound, class probabilities)
_LONGEST_RUN_TABLES = (
    (750_000, 10_000, 10, 16, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6_272, 128, 4, 9, (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (0, 8, 1, 4, (0.2148, 0.3672, 0.2305, 0.1875)),
)


def _longest_ones(blocks):
    """Length of the longest run of ones in each row."""
    best = np.zeros(len(blocks), dtype=int)
    current = np.zeros(len(blocks), dtype=int)
    for col in blocks.T:
        current = (current + 1) * col
        np.maximum(best, current, out=best)
    return best


def longest_runs(bits, enforce_minimum=True) -> TestResult:
    eps = as_bits(bits)
    n = len(eps)
    _require(TestKind.LONGEST_RUNS, n, 128, enforce_minimum)
    for min_n, block_len, lo, hi, probs in _LONGEST_RUN_TABLES:
        if n >= min_n:
            break
    n_blocks = n // block_len
    if n_blocks < 1:
        raise InsufficientDataError(TestKind.LONGEST_RUNS.value, n, block_len)
    blocks = eps[: n_blocks * block_len].reshape(n_blocks, block_len)
    classes = np.clip(_longest_ones(blocks), lo, hi) - lo
    counts = np.bincount(classes, minlength=len(probs))
    expected = n_blocks * np.asarray(probs)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    p = igamc((len(probs) - 1) / 2.0, chi2 / 2.0)
    return TestResult(TestKind.LONGEST_RUNS, n, {"M": block_len}, (p,))


def _psi2(eps, m):
    if m <= 0:
        return 0.0
    n = len(eps)
    ext = np.concatenate([eps, eps[: m - 1]]).astype(np.int64)
    codes = np.zeros(n, dtype=np.int64)
    for k in range(m):
        codes = (codes << 1) | ext[k : k + n]
    counts = np.bincount(codes, minlength=2**m)
    return float(2**m / n * np.sum(counts.astype(float) ** 2) - n)


def serial(bits, m=SERIAL_M, enforce_minimum=True) -> TestResult:
    """Both serial p-values; the reported ``p_value`` is their minimum."""
    eps = as_bits(bits)
    n = len(eps)
    if m < 2:
        raise InvalidParameterError("serial test needs m >= 2")
    _require(TestKind.SERIAL, n, 2 ** (m + 2), enforce_minimum)
    psi_m, psi_m1, psi_m2 = _psi2(eps, m), _psi2(eps, m - 1), _psi2(eps, m - 2)
    del1 = psi_m - psi_m1
    del2 = psi_m - 2.0 * psi_m1 + psi_m2
    p1 = igamc(2 ** (m - 2), del1 / 2.0)
    p2 = igamc(2 ** (m - 3), del2 / 2.0)
    return TestResult(TestKind.SERIAL, n, {"m": m}, (p1, p2))


def berlekamp_massey(bits) -> int:
    """Linear complexity over GF(2): length of the shortest generating LFSR.

    Polynomials and the reversed input window are Python ints used as bit
    sets, so the discrepancy is a single AND plus popcount.
    """
    eps = as_bits(bits)
    conn, prev = 1, 1
    length, shift = 0, 1
    window = 0
    for i, bit in enumerate(eps.tolist()):
        window = (window << 1) | bit
        if (conn & window).bit_count() & 1 == 0:
            shift += 1
        elif 2 * length <= i:
            conn, prev = conn ^ (prev << shift), conn
            length = i + 1 - length
            shift = 1
        else:
            conn ^= prev << shift
            shift += 1
    return length


_LC_PROBS = (0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833)


def linear_complexity(bits, block_len=LINEAR_COMPLEXITY_LEN, enforce_minimum=True) -> TestResult:
    eps = as_bits(bits)
    n = len(eps)
    _require(TestKind.LINEAR_COMPLEXITY, n, LINEAR_COMPLEXITY_MIN, enforce_minimum)
    if enforce_minimum and n < LINEAR_COMPLEXITY_RECOMMENDED:
        warnings.warn(
            f"LinearComplexity on {n} bits; {LINEAR_COMPLEXITY_RECOMMENDED} are recommended",
            stacklevel=2,
        )
    n_blocks = n // block_len
    if n_blocks < 1:
        raise InsufficientDataError(TestKind.LINEAR_COMPLEXITY.value, n, block_len)
    M = block_len
    mu = M / 2.0 + (9.0 + (-1) ** (M + 1)) / 36.0 - (M / 3.0 + 2.0 / 9.0) / 2.0**M
    blocks = eps[: n_blocks * M].reshape(n_blocks, M)
    complexity = np.array([berlekamp_massey(b) for b in blocks], dtype=float)
    t = (-1) ** M * (complexity - mu) + 2.0 / 9.0
    classes = np.digitize(t, [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5], right=True)
    counts = np.bincount(classes, minlength=7)
    expected = n_blocks * np.asarray(_LC_PROBS)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    p = igamc(3.0, chi2 / 2.0)
    return TestResult(TestKind.LINEAR_COMPLEXITY, n, {"M": M}, (p,))


def run_nist_test(kind, bits, block_len=None, enforce_minimum=True) -> TestResult:
    """Dispatch one test by kind; ``block_len`` is ``M`` (or ``m`` for Serial)."""
    kind = TestKind(kind)
    if kind is TestKind.FREQUENCY:
        return frequency(bits, enforce_minimum)
    if kind is TestKind.BLOCK_FREQUENCY:
        return block_frequency(bits, block_len or BLOCK_FREQUENCY_LEN, enforce_minimum)
    if kind is TestKind.RUNS:
        return runs(bits, enforce_minimum)
    if kind is TestKind.LONGEST_RUNS:
        return longest_runs(bits, enforce_minimum)
    if kind is TestKind.SERIAL:
        return serial(bits, block_len or SERIAL_M, enforce_minimum)
    return linear_complexity(bits, block_len or LINEAR_COMPLEXITY_LEN, enforce_minimum)


def run_suite(bits, block_frequency_len=BLOCK_FREQUENCY_LEN, serial_m=SERIAL_M,
              linear_complexity_len=LINEAR_COMPLEXITY_LEN) -> TestReport:
    """All six tests, Frequency first."""
    eps = as_bits(bits)
    lengths = {
        TestKind.BLOCK_FREQUENCY: block_frequency_len,
        TestKind.SERIAL: serial_m,
        TestKind.LINEAR_COMPLEXITY: linear_complexity_len,
    }
    return TestReport([run_nist_test(kind, eps, lengths.get(kind)) for kind in SUITE_ORDER])
