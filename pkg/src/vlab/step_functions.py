"""Step functions on a truncated group, with L_p, weak-L_p and Hardy quasi-norms.

Every function is represented by its values on the M_N rank-N cylinders in
linear-index order.  Integrals against Haar measure are therefore plain
averages: int f dmu = sum(values) / M_N.  Martingales are ladders of such
functions, level n being constant on rank-n cylinders.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyMartingale,
    InvalidExponent,
    ResolutionMismatch,
)
from .group_core import RadixSequence, build_radix

FLOAT_FMT = ".17g"  # round-trips IEEE doubles exactly


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Complex-valued function constant on rank-N cylinders."""

    radix_seq: RadixSequence
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128).reshape(-1).copy()
        if vals.shape[0] != self.radix_seq.size:
            raise ResolutionMismatch(
                f"{vals.shape[0]} values for a group with {self.radix_seq.size} cylinders"
            )
        if not np.isfinite(vals).all():
            raise ValueError("step function values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def resolution(self) -> int:
        return self.radix_seq.depth


@dataclass(frozen=True)
class MartingaleSeq:
    """Levels f_0 .. f_N, each constant on cylinders of its rank."""

    levels: tuple[StepFunction, ...]

    def __post_init__(self):
        if not self.levels:
            raise EmptyMartingale("martingale needs at least one level")
        seq = self.levels[0].radix_seq
        if any(lv.radix_seq != seq for lv in self.levels):
            raise ResolutionMismatch("martingale levels live on different groups")

    @property
    def radix_seq(self) -> RadixSequence:
        return self.levels[0].radix_seq


def constant(seq: RadixSequence, c: complex) -> StepFunction:
    return StepFunction(seq, np.full(seq.size, c, dtype=np.complex128))


def zero(seq: RadixSequence) -> StepFunction:
    return StepFunction(seq, np.zeros(seq.size, dtype=np.complex128))


def _check_compatible(f: StepFunction, g: StepFunction) -> None:
    if f.radix_seq != g.radix_seq:
        raise ResolutionMismatch("operands live on different radix sequences")


def _check_exponent(p: float) -> float:
    p = float(p)
    if not np.isfinite(p) or p <= 0:
        raise InvalidExponent(f"exponent must be positive and finite, got {p}")
    return p


def lp_quasinorm(f: StepFunction, p: float) -> float:
    """( int |f|^p dmu )^{1/p} computed as a cylinder average."""
    p = _check_exponent(p)
    a = np.abs(f.values)
    return float(np.sum(a**p) / f.radix_seq.size) ** (1.0 / p)


def weak_lp_quasinorm(f: StepFunction, p: float) -> float:
    """sup_{lambda>0} lambda * mu{|f| > lambda}^{1/p}.

    For a step function the distribution function is a right-continuous
    staircase, so the sup equals the max over the distinct values v of |f|
    of v * mu{|f| >= v}^{1/p}; that finite max is what is computed here.
    """
    p = _check_exponent(p)
    a = np.abs(f.values)
    vs = np.unique(a)
    vs = vs[vs > 0]
    if vs.size == 0:
        return 0.0
    a_sorted = np.sort(a)
    count_ge = a.size - np.searchsorted(a_sorted, vs, side="left")
    return float(np.max(vs * (count_ge / a.size) ** (1.0 / p)))


def conditional_average(f: StepFunction, rank: int) -> StepFunction:
    """Average of f over each rank-``rank`` cylinder, as a rank-N function.

    A rank-n cylinder with anchor index a < M_n is the index set
    {a + t*M_n}, so the average is a column mean of values reshaped to
    (M_N/M_n, M_n).
    """
    m_n = f.radix_seq.scales[rank]
    reps = f.radix_seq.size // m_n
    means = f.values.reshape(reps, m_n).mean(axis=0)
    return StepFunction(f.radix_seq, np.tile(means, reps))


def to_martingale(f: StepFunction) -> MartingaleSeq:
    """The conditional-average ladder of f; level N reproduces f itself."""
    levels = tuple(conditional_average(f, n) for n in range(f.radix_seq.depth + 1))
    return MartingaleSeq(levels=levels)


def check_adapted(mart: MartingaleSeq) -> float:
    """Largest relative deviation from the averaging identity between levels."""
    worst = 0.0
    for n in range(len(mart.levels) - 1):
        upper = mart.levels[n + 1]
        projected = conditional_average(upper, n)
        scale = max(1.0, float(np.max(np.abs(upper.values))))
        dev = float(np.max(np.abs(projected.values - mart.levels[n].values))) / scale
        worst = max(worst, dev)
    return worst


def maximal_function(mart: MartingaleSeq) -> StepFunction:
    """Pointwise sup over levels of |f_n| (real-valued)."""
    if not mart.levels:
        raise EmptyMartingale("cannot take a maximal function of no levels")
    stacked = np.stack([np.abs(lv.values) for lv in mart.levels])
    return StepFunction(mart.radix_seq, stacked.max(axis=0))


def hardy_quasinorm(f, p: float) -> float:
    """L_p quasi-norm of the maximal function.

    Plain step functions are first lifted to their conditional-average
    martingale, whose coefficients match those of f.
    """
    p = _check_exponent(p)
    mart = f if isinstance(f, MartingaleSeq) else to_martingale(f)
    return lp_quasinorm(maximal_function(mart), p)


def add(f: StepFunction, g: StepFunction) -> StepFunction:
    _check_compatible(f, g)
    return StepFunction(f.radix_seq, f.values + g.values)


def scale(f: StepFunction, c: complex) -> StepFunction:
    return StepFunction(f.radix_seq, f.values * c)


def absolute(f: StepFunction) -> StepFunction:
    return StepFunction(f.radix_seq, np.abs(f.values))


def sup_pointwise(fs) -> StepFunction:
    """Pointwise maximum of real-valued functions (real parts are compared)."""
    fs = list(fs)
    if not fs:
        raise EmptyMartingale("sup_pointwise needs at least one function")
    for g in fs[1:]:
        _check_compatible(fs[0], g)
    stacked = np.stack([g.values.real for g in fs])
    return StepFunction(fs[0].radix_seq, stacked.max(axis=0))


# ---------------------------------------------------------------------------
# File format: header `radices=<csv>;N=<int>[;kind=coeffs]`, then M_N lines
# `re,im` with 17 significant digits (bit-exact round trip for doubles).
# ---------------------------------------------------------------------------


def write_value_file(path, seq: RadixSequence, values: np.ndarray, kind: str | None = None) -> None:
    vals = np.asarray(values, dtype=np.complex128).reshape(-1)
    if vals.shape[0] != seq.size:
        raise ResolutionMismatch(f"{vals.shape[0]} values for group of size {seq.size}")
    header = f"radices={seq};N={seq.depth}"
    if kind:
        header += f";kind={kind}"
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n")
        for v in vals:
            fh.write(f"{format(v.real, FLOAT_FMT)},{format(v.imag, FLOAT_FMT)}\n")


def read_value_file(path) -> tuple[RadixSequence, np.ndarray, str | None]:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        fields = dict(part.split("=", 1) for part in header.split(";") if part)
        if "radices" not in fields or "N" not in fields:
            raise ValueError(f"malformed header: {header!r}")
        seq = build_radix(
            tuple(int(r) for r in fields["radices"].split(",")), depth=int(fields["N"])
        )
        vals = np.empty(seq.size, dtype=np.complex128)
        for i in range(seq.size):
            line = fh.readline()
            if not line:
                raise ValueError(f"expected {seq.size} value lines, got {i}")
            re_s, im_s = line.strip().split(",")
            vals[i] = complex(float(re_s), float(im_s))
    return seq, vals, fields.get("kind")


def save_step_function(f: StepFunction, path) -> None:
    write_value_file(path, f.radix_seq, f.values, kind=None)


def load_step_function(path) -> StepFunction:
    seq, vals, kind = read_value_file(path)
    if kind is not None:
        raise ValueError(f"file holds kind={kind}, not a step function")
    return StepFunction(seq, vals)
