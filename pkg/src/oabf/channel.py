"""Complex Rayleigh channel generation with reproducible, splittable randomness.

Each Monte Carlo trial owns one counter-based random stream identified by
(master_seed, stream_index).  The generator is pinned so that published
result tables can be regenerated bit-for-bit:

* stream seeding and word generation use the splitmix64 construction
  (Steele/Lea/Burton mixing constants, see `_fmix64`),
* the d-th 64-bit word of a stream is ``fmix64(stream_seed + (d+1)*GOLDEN)``,
  a pure function of (master_seed, stream_index, d), so any sub-range of
  draws can be produced independently and in parallel,
* uniforms map a word to (0, 1) via ``((word >> 11) + 0.5) * 2**-53``,
* complex coefficients come from the polar (Box-Muller) transform:
  ``h = sqrt(-ln u1) * exp(2j*pi*u2)``, which gives CN(0,1) exactly,
  E|h|^2 = 1 with Re/Im independent zero-mean Gaussians of variance 1/2.

Changing any of these constants changes every published stream; do not
edit them without bumping the package version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

_U64_MAX = 0xFFFFFFFFFFFFFFFF


def _fmix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer: bijective avalanche mix of uint64 values."""
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


def _stream_seeds(master_seed: int, stream_indices: np.ndarray) -> np.ndarray:
    """64-bit seed per stream; avalanche-mixed so adjacent indices decorrelate."""
    base = _fmix64(np.array([master_seed], dtype=np.uint64) + _GOLDEN)[0]
    idx = stream_indices.astype(np.uint64)
    return _fmix64(base + (idx + np.uint64(1)) * _GOLDEN)


def _words(seeds: np.ndarray, n_words: int) -> np.ndarray:
    """(n_streams, n_words) matrix of raw 64-bit outputs, word d = splitmix64 step d."""
    d = (np.arange(1, n_words + 1, dtype=np.uint64)) * _GOLDEN
    return _fmix64(seeds[:, None] + d[None, :])


def _uniforms(words: np.ndarray) -> np.ndarray:
    """Map 64-bit words to doubles strictly inside (0, 1)."""
    return ((words >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _check_u64(value: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {type(value).__name__}")
    if not 0 <= int(value) <= _U64_MAX:
        raise ValueError(f"{name} must fit in 64 unsigned bits, got {value}")
    return int(value)


@dataclass(frozen=True)
class RngStream:
    """One reproducible random stream: (master_seed, stream_index).

    Identical pairs yield identical draw sequences; distinct stream indices
    yield statistically independent sequences (one stream per trial).
    """

    master_seed: int
    stream_index: int

    def __post_init__(self):
        _check_u64(self.master_seed, "master_seed")
        _check_u64(self.stream_index, "stream_index")


@dataclass(frozen=True)
class ChannelRealization:
    """A length-N vector of complex channel coefficients.

    The coefficient array is read-only after construction and safe to share
    across threads.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.ndim != 1 or c.size < 1:
            raise ValueError("channel must be a nonempty 1-D coefficient vector")
        if not np.all(np.isfinite(c.real)) or not np.all(np.isfinite(c.imag)):
            raise ValueError("channel coefficients must be finite")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @property
    def n(self) -> int:
        return self.coefficients.size

    def __len__(self) -> int:
        return self.coefficients.size


def sample_block(n: int, master_seed: int, first_stream: int, count: int) -> np.ndarray:
    """(count, n) complex matrix; row r is the realization of stream first_stream+r.

    Bulk form of `sample_rayleigh` used by the Monte Carlo engine; row r is
    bit-identical to sample_rayleigh(n, RngStream(master_seed, first_stream+r)).
    """
    if n < 1:
        raise ValueError(f"need at least one antenna, got n={n}")
    if count < 1:
        raise ValueError(f"need at least one stream, got count={count}")
    _check_u64(master_seed, "master_seed")
    _check_u64(first_stream, "first_stream")
    if first_stream + count - 1 > _U64_MAX:
        raise ValueError("stream index range exceeds 64 bits")
    idx = np.arange(first_stream, first_stream + count, dtype=np.uint64)
    u = _uniforms(_words(_stream_seeds(master_seed, idx), 2 * n))
    radius = np.sqrt(-np.log(u[:, 0::2]))
    phase = (2.0 * np.pi) * u[:, 1::2]
    return radius * (np.cos(phase) + 1j * np.sin(phase))


def sample_rayleigh(n: int, stream: RngStream) -> ChannelRealization:
    """Draw n i.i.d. CN(0,1) coefficients from the given stream."""
    block = sample_block(n, stream.master_seed, stream.stream_index, 1)
    return ChannelRealization(block[0])


def from_values(values) -> ChannelRealization:
    """Build a realization from (re, im) pairs; rejects empty or non-finite input."""
    values = list(values)
    if not values:
        raise ValueError("channel coefficient list must be nonempty")
    coeffs = np.empty(len(values), dtype=np.complex128)
    for i, pair in enumerate(values):
        re, im = pair
        if not (np.isfinite(re) and np.isfinite(im)):
            raise ValueError(f"non-finite coefficient at position {i}: ({re}, {im})")
        coeffs[i] = complex(re, im)
    return ChannelRealization(coeffs)


def read_channel_file(path) -> ChannelRealization:
    """Read a channel vector from disk.

    Two formats are accepted: plain text with one "re im" pair per line
    (blank lines ignored), or a JSON array of [re, im] pairs (detected by a
    leading '[').  Malformed text lines raise ValueError naming the line.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("["):
        import json

        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON channel file: {exc}") from exc
        if not isinstance(data, list) or not data:
            raise ValueError("JSON channel file must be a nonempty array of [re, im] pairs")
        pairs = []
        for i, item in enumerate(data):
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise ValueError(f"entry {i} is not an [re, im] pair: {item!r}")
            pairs.append((float(item[0]), float(item[1])))
        return from_values(pairs)
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 're im', got {line!r}")
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: expected 're im', got {line!r}") from exc
    if not pairs:
        raise ValueError("channel file contains no coefficients")
    return from_values(pairs)


def write_channel_file(path, ch: ChannelRealization) -> None:
    """Write a channel vector as one "re im" text line per coefficient."""
    with open(path, "w", encoding="utf-8") as fh:
        for h in ch.coefficients:
            fh.write(f"{float(h.real)!r} {float(h.imag)!r}\n")
