"""Norlund means of partial sums and the logarithmic mean family.

A nonnegative weight sequence {q_k : k >= 1} with partial sums Q_n defines
the n-th mean (1/Q_n) * sum_{k=1}^{n} q_{n-k} S_k f.  The k = n term needs
q_0, which not every family defines; when absent the sum stops at n-1.
The logarithmic family q_k = 1/k normalizes by the harmonic number l_n and
never touches q_0:

    L_n f = (1/l_n) sum_{k=0}^{n-1} S_k f / (n - k),   S_0 f = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import IndexOutOfRange, InvalidWeight, ZeroTotalWeight
from .step_functions import StepFunction
from .transform import character_row, forward_fast


def harmonic_l(n: int) -> float:
    """n-th harmonic number by forward summation in double precision."""
    if n < 1:
        raise IndexOutOfRange(f"harmonic number needs n >= 1, got {n}")
    total = 0.0
    for j in range(1, n + 1):
        total += 1.0 / j
    return total


def harmonic_numbers(n_max: int) -> np.ndarray:
    """Array [l_1, ..., l_{n_max}] via a running sum."""
    if n_max < 1:
        raise IndexOutOfRange(f"need n_max >= 1, got {n_max}")
    return np.cumsum(1.0 / np.arange(1, n_max + 1))


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Weights q_1, q_2, ... (1-indexed) with an optional leading q_0.

    ``values[k-1]`` holds q_k.  Families that define no q_0 (such as the
    logarithmic one) leave it None and the k = n mean term is omitted.
    """

    values: np.ndarray
    q0: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).reshape(-1).copy()
        if np.any(vals < 0) or not np.isfinite(vals).all():
            raise InvalidWeight("weights must be finite and nonnegative")
        if self.q0 is not None and (self.q0 < 0 or not np.isfinite(self.q0)):
            raise InvalidWeight(f"q_0 must be finite and nonnegative, got {self.q0}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return int(self.values.shape[0])

    @cached_property
    def _cumsum(self) -> np.ndarray:
        return np.cumsum(self.values)

    def q(self, k: int) -> float:
        if k < 1 or k > len(self):
            raise IndexOutOfRange(f"weight index {k} outside 1..{len(self)}")
        return float(self.values[k - 1])

    def total(self, n: int) -> float:
        """Q_n = q_1 + ... + q_n."""
        if n < 1 or n > len(self):
            raise IndexOutOfRange(f"Q_n needs 1 <= n <= {len(self)}, got {n}")
        return float(self._cumsum[n - 1])


def ones_weights(n: int) -> WeightSequence:
    """q_k = 1 for every k, including q_0 (arithmetic means)."""
    return WeightSequence(values=np.ones(n), q0=1.0)


def log_weights(n: int) -> WeightSequence:
    """q_k = 1/k; q_0 is undefined for this family."""
    return WeightSequence(values=1.0 / np.arange(1, n + 1), q0=None)


def weights_from_file(path) -> WeightSequence:
    """One q per line; no q_0."""
    vals = [float(line) for line in open(path, "r", encoding="ascii") if line.strip()]
    if not vals:
        raise InvalidWeight(f"no weights found in {path}")
    return WeightSequence(values=np.asarray(vals), q0=None)


def weight_sequence_from_spec(spec: str, n: int) -> WeightSequence:
    """Parse ``ones`` | ``log`` | ``custom:<file>`` and provide n weights."""
    if spec == "ones":
        return ones_weights(n)
    if spec == "log":
        return log_weights(n)
    if spec.startswith("custom:"):
        w = weights_from_file(spec.split(":", 1)[1])
        if len(w) < n:
            raise InvalidWeight(f"custom weights provide {len(w)} entries, need {n}")
        return w
    raise InvalidWeight(f"unknown weight family {spec!r}")


def iter_partial_sums(f: StepFunction, n_max: int):
    """Yield (k, S_k f values) for k = 1..n_max by incremental synthesis.

    The yielded array is a reused accumulation buffer; copy it before
    holding a reference across iterations.
    """
    seq = f.radix_seq
    if n_max < 0 or n_max > seq.size:
        raise IndexOutOfRange(f"n_max {n_max} outside 0..{seq.size}")
    coeffs = forward_fast(f).coeffs
    acc = np.zeros(seq.size, dtype=np.complex128)
    for k in range(n_max):
        acc += coeffs[k] * character_row(seq, k)
        yield k + 1, acc


def batch_partial_sums(f: StepFunction, n_max: int) -> list[StepFunction]:
    """[S_1 f, ..., S_{n_max} f]; matches repeated partial_sum calls."""
    return [StepFunction(f.radix_seq, acc) for _, acc in iter_partial_sums(f, n_max)]


def partial_sum_stack(f: StepFunction, n_max: int) -> np.ndarray:
    """(n_max + 1, M_N) array whose row n holds S_n f (row 0 is zero)."""
    seq = f.radix_seq
    stack = np.zeros((n_max + 1, seq.size), dtype=np.complex128)
    for k, acc in iter_partial_sums(f, n_max):
        stack[k] = acc
    return stack


def norlund_mean(f: StepFunction, n: int, weights: WeightSequence) -> StepFunction:
    """(1/Q_n) sum q_{n-k} S_k f over k = 1..n-1, plus q_0 S_n f when q_0 exists."""
    seq = f.radix_seq
    if n < 1 or n > seq.size:
        raise IndexOutOfRange(f"mean order {n} outside 1..{seq.size}")
    q_n = weights.total(n)
    if q_n <= 0:
        raise ZeroTotalWeight(f"Q_{n} = {q_n}")
    need = n if weights.q0 is not None else n - 1
    acc = np.zeros(seq.size, dtype=np.complex128)
    for k, s in iter_partial_sums(f, need):
        w = weights.q0 if k == n else weights.q(n - k)
        acc += w * s
    return StepFunction(seq, acc / q_n)


def log_mean(f: StepFunction, n: int, allow_first: bool = False) -> StepFunction:
    """L_n f = (1/l_n) sum_{k=1}^{n-1} S_k f / (n - k).

    n = 1 gives the identically zero mean (S_0 f = 0) and is rejected
    unless ``allow_first`` is set.
    """
    seq = f.radix_seq
    if n == 1 and allow_first:
        return StepFunction(seq, np.zeros(seq.size, dtype=np.complex128))
    if n < 2 or n > seq.size:
        raise IndexOutOfRange(f"log mean order {n} outside 2..{seq.size}")
    acc = np.zeros(seq.size, dtype=np.complex128)
    for k, s in iter_partial_sums(f, n - 1):
        acc += s / (n - k)
    return StepFunction(seq, acc / harmonic_l(n))


def log_mean_stack(f: StepFunction, n_max: int) -> np.ndarray:
    """(n_max + 1, M_N) array whose row n holds L_n f (rows 0 and 1 zero).

    Materializes the S_k stack and one triangular weight matrix; intended
    for moderate n_max.
    """
    seq = f.radix_seq
    if n_max < 2 or n_max > seq.size:
        raise IndexOutOfRange(f"n_max {n_max} outside 2..{seq.size}")
    s_stack = partial_sum_stack(f, n_max - 1)
    ell = harmonic_numbers(n_max)
    tri = np.zeros((n_max + 1, n_max), dtype=np.float64)
    for n in range(2, n_max + 1):
        ks = np.arange(1, n)
        tri[n, ks] = 1.0 / ((n - ks) * ell[n - 1])
    return tri @ s_stack
