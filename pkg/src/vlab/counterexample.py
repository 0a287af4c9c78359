"""The divergence construction: kernel-difference functions and their sweep.

For a scale index pair (M_lo, M_hi) = (M_{2k}, M_{2k+1}) the case function
is the kernel difference D_{M_hi} - D_{M_lo}.  Its coefficients are an
indicator of [M_lo, M_hi); its partial sums collapse to three branches
(zero, kernel difference, the function itself); its martingale maximal
function equals |f| pointwise; and at the probe order n* = M_lo + 2 the
logarithmic mean collapses to a single character over the harmonic number,
so |L_{n*} f| is constant on the whole group.  Those exact facts drive the
weak-type ratio sweep R_k and the exploratory bracket fit.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass

import numpy as np

from .errors import DepthTooSmall, InvalidExponent
from .group_core import RadixSequence, truncate
from .means import harmonic_l, log_mean
from .operators import (
    WeightFunction,
    boundedness_ratio,
    condition6_advisory,
    make_atom,
    power_weight,
)
from .report import ExperimentReport
from .step_functions import (
    StepFunction,
    hardy_quasinorm,
    lp_quasinorm,
    maximal_function,
    to_martingale,
)
from .transform import character_row, dirichlet_closed_MN, forward_fast

SWEEP_COLUMNS = [
    "k",
    "n_k",
    "M_2nk",
    "n_star",
    "p",
    "phi",
    "l_nstar",
    "L_modulus",
    "hardy_norm",
    "R_k",
    "comparator",
]

THETA_COLUMNS = ["n", "lower", "upper", "measured_ratio", "source"]

# Relative slack used when counting level sets at a computed threshold;
# |L| matches the threshold only up to roundoff.
LEVELSET_SLACK = 1e-12


@dataclass(frozen=True)
class CounterexampleCase:
    """One kernel-difference function with its derived scale data."""

    n_k: int
    radix_seq: RadixSequence  # truncated to the working depth 2 n_k + 1
    m_lo: int  # M_{2 n_k}
    m_hi: int  # M_{2 n_k + 1}
    func: StepFunction
    n_star: int  # probe order M_{2 n_k} + 2


def build_case(n_k: int, radix_seq: RadixSequence) -> CounterexampleCase:
    """Construct the kernel difference exactly from the closed kernel forms.

    The function takes the value M_hi - M_lo on the rank-(2 n_k + 1)
    cylinder at 0, -M_lo on the rest of the rank-2 n_k cylinder at 0, and
    0 outside it.
    """
    if n_k < 1:
        raise DepthTooSmall(f"need n_k >= 1, got {n_k}")
    need = 2 * n_k + 1
    if radix_seq.depth < need:
        raise DepthTooSmall(f"depth {radix_seq.depth} < {need} required for n_k = {n_k}")
    work = truncate(radix_seq, need)
    hi = dirichlet_closed_MN(work, need)
    lo = dirichlet_closed_MN(work, need - 1)
    func = StepFunction(work, hi.values - lo.values)
    m_lo = work.scales[need - 1]
    m_hi = work.scales[need]
    return CounterexampleCase(
        n_k=n_k, radix_seq=work, m_lo=m_lo, m_hi=m_hi, func=func, n_star=m_lo + 2
    )


@dataclass(frozen=True)
class CoefficientCheck:
    ok: bool
    max_abs_error: float
    tol: float


def verify_coefficients(case: CounterexampleCase, tol: float = 1e-9) -> CoefficientCheck:
    """Coefficients must be 1 on [M_lo, M_hi) and 0 elsewhere."""
    coeffs = forward_fast(case.func).coeffs
    expected = np.zeros(case.radix_seq.size, dtype=np.complex128)
    expected[case.m_lo : case.m_hi] = 1.0
    err = float(np.max(np.abs(coeffs - expected)))
    return CoefficientCheck(ok=err <= tol, max_abs_error=err, tol=tol)


@dataclass(frozen=True)
class PartialSumCheck:
    ok: bool
    max_err_zero: float
    max_err_middle: float
    max_err_tail: float
    tol: float


def verify_partial_sums(case: CounterexampleCase, tol: float = 1e-9) -> PartialSumCheck:
    """Check all three partial-sum branches by one incremental synthesis walk.

    S_i and D_i advance together (one character row per step), so the walk
    costs O(M_N) memory for any working size.
    """
    seq = case.radix_seq
    f = case.func
    coeffs = forward_fast(f).coeffs
    s_acc = np.zeros(seq.size, dtype=np.complex128)
    d_acc = np.zeros(seq.size, dtype=np.complex128)
    d_at_lo = None
    err_zero = 0.0  # S_i = 0 for i <= M_lo (including S_0 by definition)
    err_middle = 0.0  # S_i = D_i - D_{M_lo} for M_lo < i < M_hi
    err_tail = 0.0  # S_i = f for i >= M_hi (reachable at i = M_N)
    for i in range(1, seq.size + 1):
        row = character_row(seq, i - 1)
        s_acc += coeffs[i - 1] * row
        d_acc += row
        if i == case.m_lo:
            d_at_lo = d_acc.copy()
        if i <= case.m_lo:
            err_zero = max(err_zero, float(np.max(np.abs(s_acc))))
        elif i < case.m_hi:
            err_middle = max(err_middle, float(np.max(np.abs(s_acc - (d_acc - d_at_lo)))))
        else:
            err_tail = max(err_tail, float(np.max(np.abs(s_acc - f.values))))
    ok = max(err_zero, err_middle, err_tail) <= tol
    return PartialSumCheck(
        ok=ok, max_err_zero=err_zero, max_err_middle=err_middle, max_err_tail=err_tail, tol=tol
    )


@dataclass(frozen=True)
class HardyCheck:
    ok: bool
    measured: float
    closed_value: float
    upper_bound: float
    uniform_bound: float
    max_pointwise_gap: float
    rel_tol: float


def hardy_closed_value(case: CounterexampleCase, p: float) -> float:
    """Exact Hardy quasi-norm of the case function.

    The maximal function equals |f|: the conditional-average levels vanish
    below the top rank and reproduce f there.  Integrating |f|^p over its
    two level sets gives
    (M_hi - M_lo)^p / M_hi + M_lo^p (1/M_lo - 1/M_hi), all to the 1/p.
    """
    p = float(p)
    if not 0 < p < 1:
        raise InvalidExponent(f"need 0 < p < 1, got {p}")
    lo, hi = case.m_lo, case.m_hi
    power = (hi - lo) ** p / hi + lo**p * (1.0 / lo - 1.0 / hi)
    return power ** (1.0 / p)


def verify_hardy_bound(case: CounterexampleCase, p: float, rel_tol: float = 1e-12) -> HardyCheck:
    """Measured Hardy norm against the closed value and the uniform bound."""
    p = float(p)
    if not 0 < p < 1:
        raise InvalidExponent(f"need 0 < p < 1, got {p}")
    mart = to_martingale(case.func)
    fstar = maximal_function(mart)
    gap = float(np.max(np.abs(fstar.values - np.abs(case.func.values))))
    measured = lp_quasinorm(fstar, p)
    closed = hardy_closed_value(case, p)
    upper = 2.0 ** (1.0 / p) * case.m_lo ** (1.0 - 1.0 / p)
    uniform = 2.0 ** (1.0 / p)
    ok = (
        gap <= rel_tol * max(1.0, case.m_hi)
        and abs(measured - closed) <= rel_tol * closed
        and measured <= upper * (1.0 + rel_tol)
        and upper <= uniform * (1.0 + rel_tol)
    )
    return HardyCheck(
        ok=ok,
        measured=measured,
        closed_value=closed,
        upper_bound=upper,
        uniform_bound=uniform,
        max_pointwise_gap=gap,
        rel_tol=rel_tol,
    )


@dataclass(frozen=True)
class LogMeanIdentityCheck:
    ok: bool
    modulus: float
    predicted: float
    max_function_gap: float
    modulus_variance: float
    levelset_measure: float
    tol: float


def levelset_measure(f: StepFunction, threshold: float) -> float:
    """mu{|f| >= threshold}, with LEVELSET_SLACK relative forgiveness."""
    count = int(np.count_nonzero(np.abs(f.values) >= threshold * (1.0 - LEVELSET_SLACK)))
    return count / f.radix_seq.size


def l_mean_identity(case: CounterexampleCase, tol: float = 1e-9) -> LogMeanIdentityCheck:
    """L_{n*} f must equal psi_{M_lo} / l_{n*} with constant modulus 1/l_{n*}.

    Only the k = M_lo + 1 partial sum survives in the mean (its neighbors
    are zero or absent), with denominator n* - k = 1, so the whole-group
    level set of the modulus has measure exactly 1.
    """
    ell = harmonic_l(case.n_star)
    predicted = 1.0 / ell
    computed = log_mean(case.func, case.n_star)
    target = character_row(case.radix_seq, case.m_lo) / ell
    gap = float(np.max(np.abs(computed.values - target)))
    moduli = np.abs(computed.values)
    variance = float(np.var(moduli))
    measure = levelset_measure(computed, predicted)
    ok = gap <= tol and variance <= 1e-18 and measure == 1.0
    return LogMeanIdentityCheck(
        ok=ok,
        modulus=float(np.mean(moduli)),
        predicted=predicted,
        max_function_gap=gap,
        modulus_variance=variance,
        levelset_measure=measure,
        tol=tol,
    )


def sweep_row(position, n_k, radix_seq, p, weight):
    """One divergence-sweep report row for the given case."""
    case = build_case(n_k, radix_seq)
    ell = harmonic_l(case.n_star)
    phi = weight.phi(case.n_star + 1)
    threshold = 1.0 / (ell * phi)
    mean = log_mean(case.func, case.n_star)
    modulus = float(np.mean(np.abs(mean.values)))
    measure = levelset_measure(mean, threshold)
    lp_norm = lp_quasinorm(case.func, p)
    hardy = hardy_quasinorm(case.func, p)
    ratio = threshold * measure ** (1.0 / p) / lp_norm
    comparator = case.m_lo ** (1.0 / p - 1.0) / (math.log(case.m_lo + 2.0) * phi)
    return (
        position,
        n_k,
        case.m_lo,
        case.n_star,
        p,
        phi,
        ell,
        modulus,
        hardy,
        ratio,
        comparator,
    )


def divergence_sweep(
    radix_seq: RadixSequence,
    k_list,
    p: float,
    weight: WeightFunction,
    workers: int = 1,
) -> ExperimentReport:
    """Weak-type ratio R_k per case, with the analytic comparator.

    R_k = threshold * mu{|L_{n*} f| >= threshold}^{1/p} / ||f||_p where
    threshold = 1/(l_{n*} phi(n*+1)).  Strict growth of R_k along the sweep
    is asserted only when the weight family satisfies the divergence
    condition; otherwise the report records the verdict and skips it.
    """
    p = float(p)
    if not 0 < p < 1:
        raise InvalidExponent(f"need 0 < p < 1, got {p}")
    k_list = [int(k) for k in k_list]
    verdict = condition6_advisory(weight, p)
    jobs = [(pos + 1, n_k, radix_seq, p, weight) for pos, n_k in enumerate(k_list)]
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda args: sweep_row(*args), jobs))
    else:
        rows = [sweep_row(*args) for args in jobs]
    ratios = [row[9] for row in rows]
    monotone = all(b > a for a, b in zip(ratios, ratios[1:]))
    report = ExperimentReport(columns=list(SWEEP_COLUMNS))
    report.add_meta("radices", str(radix_seq))
    report.add_meta("p", p)
    report.add_meta("weight", weight.spec)
    report.add_meta("condition6", verdict)
    report.add_meta("monotone_checked", verdict == "satisfied")
    report.add_meta("monotone_ok", monotone if verdict == "satisfied" else "")
    for row in rows:
        report.add_row(*row)
    return report


def theta_bracket(
    radix_seq: RadixSequence,
    p: float,
    k_list,
    samples: int = 5,
    seed: int = 0,
    grid_size: int = 25,
) -> ExperimentReport:
    """Exploratory envelope C_1 n^{1/p-1}/log(n+1) .. C_2 n^{1/p-1}.

    Measured points are unweighted ratios: the sweep cases contribute
    1/(l_{n*} ||f||_p) at n = n*, random atoms contribute the flat-weight
    maximal ratio at their truncation order.  C_1 and C_2 are fitted so
    the band encloses every point (C_1 clamped below C_2 so the band stays
    ordered on the whole grid).  The fit only encloses finite data; it
    carries no optimality content.
    """
    p = float(p)
    if not 0 < p < 1:
        raise InvalidExponent(f"need 0 < p < 1, got {p}")
    expo = 1.0 / p - 1.0
    points = []
    for n_k in k_list:
        case = build_case(int(n_k), radix_seq)
        y = 1.0 / (harmonic_l(case.n_star) * lp_quasinorm(case.func, p))
        points.append((case.n_star, y, "sweep"))
    atom_seq = truncate(radix_seq, min(radix_seq.depth, 8))
    atom_nmax = min(atom_seq.size, 256)
    flat = power_weight(0.0)
    children = np.random.SeedSequence(seed).spawn(samples)
    for i in range(samples):
        rng = np.random.default_rng(children[i])
        rank = int(rng.integers(0, atom_seq.depth))
        atom = make_atom(rng, atom_seq, rank, p)
        y = boundedness_ratio(atom.function, p, flat, atom_nmax)
        points.append((atom_nmax, y, "atom"))
    c2 = max(y / n**expo for n, y, _ in points)
    c1 = min(min(y * math.log(n + 1.0) / n**expo for n, y, _ in points), c2)
    top = max(n for n, _, _ in points)
    grid = np.unique(np.geomspace(2, max(top, 4), grid_size).astype(np.int64))
    report = ExperimentReport(columns=list(THETA_COLUMNS))
    report.add_meta("p", p)
    report.add_meta("C1", c1)
    report.add_meta("C2", c2)
    report.add_meta("note", "exploratory envelope fit from finite data; no optimality claim")
    for n in grid:
        n = int(n)
        report.add_row(n, c1 * n**expo / math.log(n + 1.0), c2 * n**expo, None, "grid")
    for n, y, source in points:
        n = int(n)
        report.add_row(n, c1 * n**expo / math.log(n + 1.0), c2 * n**expo, y, source)
    return report
