"""Two-bit gray-code quantization of CSI and key agreement metrics."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateQuantizerError, InvalidParameterError

GRAY_CODEBOOK = ((0, 0), (0, 1), (1, 1), (1, 0))


class Party(str, enum.Enum):
    ALICE = "alice"
    BOB = "bob"


@dataclass(frozen=True)
class BitSequence:
    bits: np.ndarray
    source: Party = Party.ALICE

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise InvalidParameterError("bit sequence must be one-dimensional")
        if np.any(bits > 1):
            raise InvalidParameterError("bits must be 0 or 1")
        if len(bits) % 2:
            raise InvalidParameterError("gray-coded key material has even length")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "source", Party(self.source))

    def __len__(self):
        return len(self.bits)

    def to_text(self) -> str:
        return "".join("01"[b] for b in self.bits)


@dataclass(frozen=True)
class QuantizerSpec:
    thresholds: tuple[float, float, float]
    codebook: tuple[tuple[int, int], ...] = GRAY_CODEBOOK

    def __post_init__(self):
        t = self.thresholds
        if len(t) != 3 or not t[0] < t[1] < t[2]:
            raise DegenerateQuantizerError(f"thresholds must be strictly ascending, got {t}")
        if len(self.codebook) != 4:
            raise InvalidParameterError("codebook needs four two-bit words")
        for lo, hi in zip(self.codebook, self.codebook[1:]):
            if sum(a != b for a, b in zip(lo, hi)) != 1:
                raise InvalidParameterError("adjacent codewords must differ in exactly one bit")


def csi_feature(h):
    """Scalar feature quantized into key bits: the real part of the CSI."""
    return np.real(np.asarray(h))


def fit_quantizer(features) -> QuantizerSpec:
    """Quartile thresholds with the midpoint (Hazen) percentile rule.

    Order statistic ``k`` (1-based) sits at probability ``(k - 0.5) / n``
    and percentiles interpolate linearly between neighbours, so
    ``[-3, -1, 1, 3]`` yields thresholds ``(-2, 0, 2)``.
    """
    features = np.asarray(features, dtype=float).ravel()
    if len(features) < 4:
        raise InvalidParameterError(f"need at least 4 samples, got {len(features)}")
    q = np.percentile(features, [25, 50, 75], method="hazen")
    if not (q[0] < q[1] < q[2]):
        raise DegenerateQuantizerError(f"input too concentrated for quartile bins: {tuple(q)}")
    return QuantizerSpec(thresholds=tuple(float(v) for v in q))


def gray_quantize(features, spec: QuantizerSpec, source=Party.ALICE) -> BitSequence:
    """Map every feature to the codeword of its bin (2 bits per sample).

    A feature equal to a threshold falls into the upper bin.
    """
    features = np.asarray(features, dtype=float).ravel()
    bins = np.searchsorted(np.asarray(spec.thresholds), features, side="right")
    words = np.asarray(spec.codebook, dtype=np.uint8)[bins]
    return BitSequence(words.ravel(), source)


def unmatched_key_rate(a: BitSequence, b: BitSequence) -> float:
    """Fraction of positions where the two parties' bits disagree."""
    if len(a) != len(b):
        raise InvalidParameterError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise InvalidParameterError("empty key sequences")
    return float(np.mean(a.bits != b.bits))


def quantize_pair(h_a, h_b):
    """Each party fits its own quantizer on its own observations."""
    fa, fb = csi_feature(h_a), csi_feature(h_b)
    alice = gray_quantize(fa, fit_quantizer(fa), Party.ALICE)
    bob = gray_quantize(fb, fit_quantizer(fb), Party.BOB)
    return alice, bob


def write_key_file(path, bits: BitSequence):
    """One line of ASCII '0'/'1' characters."""
    path = Path(path)
    path.write_text(bits.to_text() + "\n", encoding="ascii")
    return path


def read_key_bits(path) -> np.ndarray:
    """Read a '0'/'1' key file; whitespace is ignored."""
    text = "".join(Path(path).read_text(encoding="ascii").split())
    if set(text) - {"0", "1"}:
        raise InvalidParameterError(f"{path}: key files may contain only '0' and '1'")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
