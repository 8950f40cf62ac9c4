"""Two-group statistical tests and agreement measures, computed from scratch.

Everything here is hand-rolled on top of the special-function layer: Welch
and pooled t-tests, the dummy-variable regression equivalent of the pooled
test, Mann-Whitney U with midrank ties (normal approximation and an exact
small-sample mode), percent agreement, Cohen's kappa, and descriptives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from .specfun import normal_two_sided_p, t_two_sided_p

# Exact Mann-Whitney enumeration is permitted up to this combined size.
EXACT_ENUMERATION_CAP = 12

METRIC_KEYS = ("fre", "gfi", "ari")


@dataclass(frozen=True)
class Sample:
    """A labeled vector of observations."""

    values: Tuple[float, ...]
    label: str = ""


SampleLike = Union[Sample, Sequence[float]]


@dataclass(frozen=True)
class TestResult:
    statistic: float
    degrees_of_freedom: Optional[float]
    p_value: float
    method: str  # welch_t | pooled_t | ols_slope | mann_whitney_normal | mann_whitney_exact
    z_value: Optional[float] = None  # normal-approximation z, Mann-Whitney only
    note: Optional[str] = None  # "degenerate" / "exact-separation" when applicable

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "degrees_of_freedom": self.degrees_of_freedom,
            "p_value": self.p_value,
            "method": self.method,
            "z_value": self.z_value,
            "note": self.note,
        }


@dataclass(frozen=True)
class AgreementResult:
    percent_agreement: float
    kappa: Optional[float]  # None when chance agreement saturates without consensus
    n_items: int
    categories: Tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "percent_agreement": self.percent_agreement,
            "kappa": self.kappa,
            "n_items": self.n_items,
            "categories": list(self.categories),
        }


@dataclass(frozen=True)
class Descriptives:
    n: int
    mean: float
    sd: Optional[float]  # None below n=2
    median: float
    skewness: Optional[float]  # None below n=3 or at zero variance
    min: float
    max: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "sd": self.sd,
            "median": self.median,
            "skewness": self.skewness,
            "min": self.min,
            "max": self.max,
        }


def _values(sample: SampleLike, name: str) -> Tuple[float, ...]:
    raw = sample.values if isinstance(sample, Sample) else tuple(sample)
    out = tuple(float(v) for v in raw)
    for v in out:
        if not math.isfinite(v):
            raise ValueError(f"{name} contains a non-finite value: {v!r}")
    return out


def _mean(xs: Sequence[float]) -> float:
    # fsum keeps the summation correctly rounded; the final division can
    # still be off by one ulp, which callers must not treat as signal
    return math.fsum(xs) / len(xs)


def _sample_variance(xs: Sequence[float], mean: float) -> float:
    # n-1 denominator
    return sum((x - mean) ** 2 for x in xs) / (len(xs) - 1)


def descriptive(sample: SampleLike) -> Descriptives:
    """Summary statistics: mean, sample sd, median, adjusted skewness, extremes."""
    xs = _values(sample, "sample")
    if not xs:
        raise ValueError("descriptive requires a nonempty sample")
    n = len(xs)
    mean = _mean(xs)
    ordered = sorted(xs)
    mid = n // 2
    median = ordered[mid] if n % 2 else (ordered[mid - 1] + ordered[mid]) / 2.0
    sd = math.sqrt(_sample_variance(xs, mean)) if n >= 2 else None
    skewness: Optional[float] = None
    if n >= 3 and sd is not None and sd > 0.0:
        # g1 is scale-free, so normalize deviations by their largest
        # magnitude first; otherwise m2 ** 1.5 underflows for tiny spreads
        deviations = [x - mean for x in xs]
        scale = max(abs(d) for d in deviations)
        if scale > 0.0:
            z = [d / scale for d in deviations]
            m2 = sum(v ** 2 for v in z) / n
            m3 = sum(v ** 3 for v in z) / n
            g1 = m3 / m2 ** 1.5
            # adjusted Fisher-Pearson G1
            skewness = g1 * math.sqrt(n * (n - 1)) / (n - 2)
    return Descriptives(
        n=n,
        mean=mean,
        sd=sd,
        median=median,
        skewness=skewness,
        min=ordered[0],
        max=ordered[-1],
    )


def t_test(a: SampleLike, b: SampleLike, variant: str = "welch") -> TestResult:
    """Two-sided two-sample t-test, Welch by default."""
    if variant not in ("welch", "pooled"):
        raise ValueError(f"unknown t-test variant {variant!r}")
    xa = _values(a, "a")
    xb = _values(b, "b")
    n1, n2 = len(xa), len(xb)
    if n1 < 2 or n2 < 2:
        raise ValueError(f"t-test needs at least 2 observations per sample, got {n1} and {n2}")
    m1, m2 = _mean(xa), _mean(xb)
    v1, v2 = _sample_variance(xa, m1), _sample_variance(xb, m2)
    method = "welch_t" if variant == "welch" else "pooled_t"
    if variant == "welch":
        se1, se2 = v1 / n1, v2 / n2
        se_sq = se1 + se2
    else:
        pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / (n1 + n2 - 2)
        se_sq = pooled * (1.0 / n1 + 1.0 / n2)
    # se_sq can round to zero on subnormal spreads, not just at exact
    # constancy; either way there is no usable scale for a t statistic.
    if se_sq == 0.0:
        df = float(n1 + n2 - 2)
        if m1 == m2:
            return TestResult(0.0, df, 1.0, method, note="degenerate")
        stat = math.inf if m1 > m2 else -math.inf
        return TestResult(stat, df, 0.0, method, note="exact-separation")
    t = (m1 - m2) / math.sqrt(se_sq)
    if variant == "welch":
        # ratios of the per-sample terms stay O(1), so squaring cannot
        # underflow the way the raw se terms can
        r1, r2 = se1 / se_sq, se2 / se_sq
        df = 1.0 / (r1 ** 2 / (n1 - 1) + r2 ** 2 / (n2 - 1))
    else:
        df = float(n1 + n2 - 2)
    return TestResult(t, df, t_two_sided_p(t, df), method)


def ols_group_regression(values: SampleLike, group: Sequence[int]) -> TestResult:
    """Slope test of y = b0 + b1*x for a binary group indicator x.

    Algebraically identical to the pooled t-test on the two groups; kept as a
    separate fitting path so the equivalence can be checked rather than assumed.
    """
    ys = _values(values, "values")
    gs = list(group)
    if len(gs) != len(ys):
        raise ValueError(f"group length {len(gs)} != values length {len(ys)}")
    for g in gs:
        if g not in (0, 1):
            raise ValueError(f"group indicator must be 0 or 1, got {g!r}")
    n = len(ys)
    y0 = [y for y, g in zip(ys, gs) if g == 0]
    y1 = [y for y, g in zip(ys, gs) if g == 1]
    if not y0 or not y1:
        raise ValueError("both groups must be nonempty")
    if n < 3:
        raise ValueError(f"regression needs n >= 3, got {n}")
    xbar = len(y1) / n
    ybar = _mean(ys)
    sxx = sum((g - xbar) ** 2 for g in gs)
    sxy = sum((g - xbar) * (y - ybar) for g, y in zip(gs, ys))
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    sse = sum((y - intercept - slope * g) ** 2 for y, g in zip(ys, gs))
    df = float(n - 2)
    if sse == 0.0:
        if slope == 0.0:
            return TestResult(0.0, df, 1.0, "ols_slope", note="degenerate")
        stat = math.inf if slope > 0 else -math.inf
        return TestResult(stat, df, 0.0, "ols_slope", note="exact-separation")
    se_slope = math.sqrt(sse / df / sxx)
    t = slope / se_slope
    return TestResult(t, df, t_two_sided_p(t, df), "ols_slope")


def _midranks(values: Sequence[float]) -> Tuple[float, ...]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # positions i..j share the average of ranks i+1..j+1
        mid = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return tuple(ranks)


def _exact_u_tails(doubled_ranks: Sequence[int], n1: int, doubled_u_obs: int) -> Tuple[int, int, int]:
    """Count group assignments with U <= obs and U >= obs, all in doubled units.

    Walks the distribution of the doubled rank sum over every size-n1 subset via
    subset-sum counting, which enumerates the same C(n1+n2, n1) assignments a
    brute-force loop would.
    """
    total_sum = sum(doubled_ranks)
    # counts[k][s]: subsets of size k with doubled-rank sum s
    counts = [[0] * (total_sum + 1) for _ in range(n1 + 1)]
    counts[0][0] = 1
    for r in doubled_ranks:
        for k in range(min(n1, len(doubled_ranks)), 0, -1):
            row, prev = counts[k], counts[k - 1]
            for s in range(total_sum, r - 1, -1):
                if prev[s - r]:
                    row[s] += prev[s - r]
    # doubled U = doubled rank sum - n1*(n1+1)
    offset = n1 * (n1 + 1)
    lo = hi = 0
    totaled = 0
    for s, c in enumerate(counts[n1]):
        if not c:
            continue
        totaled += c
        du = s - offset
        if du <= doubled_u_obs:
            lo += c
        if du >= doubled_u_obs:
            hi += c
    return lo, hi, totaled


def mann_whitney_u(a: SampleLike, b: SampleLike, mode: str = "auto") -> TestResult:
    """Mann-Whitney U with midrank ties.

    ``normal`` applies the tie-corrected normal approximation with continuity
    correction; ``exact`` enumerates the U distribution over all group
    assignments (combined n capped at 12); ``auto`` picks exact when permitted.
    """
    if mode not in ("auto", "normal", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    xa = _values(a, "a")
    xb = _values(b, "b")
    n1, n2 = len(xa), len(xb)
    if n1 == 0 or n2 == 0:
        raise ValueError("mann_whitney_u requires nonempty samples")
    n = n1 + n2
    if mode == "exact" and n > EXACT_ENUMERATION_CAP:
        raise ValueError(f"exact mode capped at combined n <= {EXACT_ENUMERATION_CAP}, got {n}")
    if mode == "auto":
        mode = "exact" if n <= EXACT_ENUMERATION_CAP else "normal"

    combined = list(xa) + list(xb)
    ranks = _midranks(combined)
    r1 = sum(ranks[:n1])
    u = r1 - n1 * (n1 + 1) / 2.0

    if mode == "exact":
        # midranks are half-integers; doubling makes the DP exact over ints
        doubled = [round(2 * r) for r in ranks]
        doubled_u_obs = round(2 * r1) - n1 * (n1 + 1)
        lo, hi, total = _exact_u_tails(doubled, n1, doubled_u_obs)
        p = min(1.0, 2.0 * min(lo, hi) / total)
        return TestResult(u, None, p, "mann_whitney_exact")

    mu = n1 * n2 / 2.0
    tie_term = 0.0
    i = 0
    ordered = sorted(combined)
    while i < n:
        j = i
        while j + 1 < n and ordered[j + 1] == ordered[i]:
            j += 1
        t = j - i + 1
        if t > 1:
            tie_term += t ** 3 - t
        i = j + 1
    variance = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0.0:
        # every observation tied: U is exactly mu with no spread
        return TestResult(u, None, 1.0, "mann_whitney_normal", z_value=0.0, note="degenerate")
    # continuity correction shrinks toward the mean, never past it
    diff = u - mu
    adj = max(0.0, abs(diff) - 0.5)
    z = math.copysign(adj, diff) / math.sqrt(variance) if diff else 0.0
    return TestResult(u, None, normal_two_sided_p(z), "mann_whitney_normal", z_value=z)


def percent_agreement(r1: Sequence[object], r2: Sequence[object]) -> float:
    """Fraction of positions where the two rating vectors agree."""
    if len(r1) != len(r2):
        raise ValueError(f"rating length mismatch: {len(r1)} != {len(r2)}")
    if not r1:
        raise ValueError("percent_agreement requires at least one item")
    matches = sum(1 for x, y in zip(r1, r2) if x == y)
    return matches / len(r1)


def cohens_kappa(
    r1: Sequence[object],
    r2: Sequence[object],
    categories: Sequence[object],
) -> AgreementResult:
    """Chance-corrected agreement between two raters over a fixed category set."""
    if len(r1) != len(r2):
        raise ValueError(f"rating length mismatch: {len(r1)} != {len(r2)}")
    if not r1:
        raise ValueError("cohens_kappa requires at least one item")
    cats = tuple(categories)
    if len(set(cats)) != len(cats):
        raise ValueError("categories must be distinct")
    allowed = set(cats)
    for label, ratings in (("r1", r1), ("r2", r2)):
        for r in ratings:
            if r not in allowed:
                raise ValueError(f"{label} contains rating {r!r} outside categories")
    n = len(r1)
    p_o = sum(1 for x, y in zip(r1, r2) if x == y) / n
    p_e = 0.0
    for c in cats:
        p_e += (sum(1 for x in r1 if x == c) / n) * (sum(1 for y in r2 if y == c) / n)
    if p_e == 1.0:
        kappa = 1.0 if p_o == 1.0 else None
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return AgreementResult(
        percent_agreement=p_o,
        kappa=kappa,
        n_items=n,
        categories=tuple(str(c) for c in cats),
    )


def pvalue_matrix(
    original_scores: Mapping[str, SampleLike],
    generated_scores: Mapping[str, SampleLike],
) -> Dict[str, Dict[str, TestResult]]:
    """Run the three between-arm tests for each readability metric.

    Rows are the metrics (fre, gfi, ari); columns are welch_t, ols_slope, and
    mann_whitney (auto mode).
    """
    out: Dict[str, Dict[str, TestResult]] = {}
    for key in METRIC_KEYS:
        if key not in original_scores or key not in generated_scores:
            raise ValueError(f"missing metric {key!r} in score mapping")
        orig = _values(original_scores[key], f"original[{key}]")
        gen = _values(generated_scores[key], f"generated[{key}]")
        if not orig or not gen:
            raise ValueError(f"empty sample for metric {key!r}")
        combined = list(orig) + list(gen)
        group = [0] * len(orig) + [1] * len(gen)
        out[key] = {
            "welch_t": t_test(orig, gen, variant="welch"),
            "ols_slope": ols_group_regression(combined, group),
            "mann_whitney": mann_whitney_u(orig, gen, mode="auto"),
        }
    return out
