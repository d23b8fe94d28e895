"""Exact bounded-height point counts on the built-in geometries.

Strategies (points are counted, never materialized):

* line (p1): iterate admissible denominators q and count coprime numerators
  in an interval by inclusion-exclusion over the prime divisors of q.  The
  unrestricted case (rational mode, or weight 1) collapses to the O(B)
  Moebius sum  N(B) = 1 + 2 * sum_d mu(d) * floor(B/d)^2.
* plane (pn, n = 2): same denominator-driven structure over the last
  coordinate, counting coprime pairs per q.
* blow-up: iterate leading pairs (x_0, x_1) up to the pruning bound
  B^(m1/(m1+1)); admissibility depends only on the pair, and the x_2 range
  splits into a constant-height core |x_2| <= max(x_0,|x_1|) plus a tail
  counted coprime-wise.  All height comparisons are exact integer ones
  obtained by clearing the rational exponents.

Point-by-point definitional oracles (naive_count_*) are kept alongside; the
sieved counters must agree with them exactly, which the test suite checks.

Work is partitioned into contiguous chunks over q (line/plane) or x_0
(blow-up); merging is integer addition, so results are identical for any
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import geometry
from .arith import (
    count_coprime,
    distinct_primes,
    integer_kth_root,
    is_k_full,
    is_kth_power,
    mobius_sieve,
    primes_up_to,
)
from .errors import BudgetExceededError, DomainError
from .orbifold import OrbifoldModel, PlaceSet, blowup_p2, projective_space

__all__ = [
    "CountRecord",
    "CountSeries",
    "MODES",
    "count_p1",
    "count_pn2",
    "count_blowup",
    "count_points",
    "count_series",
    "naive_count_p1",
    "naive_count_pn2",
    "naive_count_blowup",
    "darmon_denominators",
    "campana_denominators",
    "k_full_numbers",
    "write_series_csv",
    "read_counts_csv",
    "dump_points",
    "DEFAULT_BUDGET",
    "CSV_HEADER",
]

MODES = ("rational", "campana", "darmon")
DEFAULT_BUDGET = 10**9
CSV_HEADER = "B,n_rational,n_campana,n_darmon"


@dataclass(frozen=True)
class CountRecord:
    bound: Fraction
    n_rational: Optional[int] = None
    n_campana: Optional[int] = None
    n_darmon: Optional[int] = None


@dataclass(frozen=True)
class CountSeries:
    model: OrbifoldModel
    s_primes: Tuple[int, ...]
    records: Tuple[CountRecord, ...]
    labels: Tuple[str, ...]


def _floor_bound(B: Union[int, float, Fraction]) -> int:
    Bf = Fraction(B)
    return int(math.floor(Bf))


def _charge(budget: Optional[int], amount: int) -> None:
    if budget is not None and amount > budget:
        raise BudgetExceededError(
            f"enumeration would touch ~{amount} candidate tuples (budget {budget})"
        )


def _strip_primes(n: int, primes: Sequence[int]) -> int:
    for p in primes:
        while n % p == 0:
            n //= p
    return n


# --------------------------------------------------------------------------
# admissible denominators
# --------------------------------------------------------------------------


def _s_smooth(limit: int, s_primes: Sequence[int]) -> List[int]:
    """All integers <= limit supported on s_primes (including 1)."""
    vals = [1]
    for p in s_primes:
        extra = []
        for v in vals:
            pv = v * p
            while pv <= limit:
                extra.append(pv)
                pv *= p
        vals.extend(extra)
    return sorted(vals)


def darmon_denominators(limit: int, m: int, s_primes: Sequence[int] = ()) -> List[int]:
    """q <= limit whose prime exponents away from s_primes are multiples of m."""
    out = []
    for s in _s_smooth(limit, s_primes):
        dmax = integer_kth_root(limit // s, m)
        for d in range(1, dmax + 1):
            if any(d % p == 0 for p in s_primes):
                continue
            out.append(s * d**m)
    return sorted(set(out))


def k_full_numbers(limit: int, k: int, exclude: Sequence[int] = ()) -> List[int]:
    """Integers <= limit all of whose prime exponents are >= k, coprime to
    the excluded primes.  Includes 1."""
    ps = [p for p in primes_up_to(integer_kth_root(limit, k)) if p not in exclude]
    out: List[int] = []

    def rec(i: int, val: int) -> None:
        out.append(val)
        for j in range(i, len(ps)):
            p = ps[j]
            v = val * p**k
            if v > limit:
                break
            while v <= limit:
                rec(j + 1, v)
                v *= p

    rec(0, 1)
    return sorted(out)


def campana_denominators(limit: int, m: int, s_primes: Sequence[int] = ()) -> List[int]:
    """q <= limit that are m-full away from s_primes."""
    fulls = k_full_numbers(limit, m, exclude=s_primes)
    out = []
    for s in _s_smooth(limit, s_primes):
        for f in fulls:
            if s * f > limit:
                break
            out.append(s * f)
    return sorted(set(out))


# --------------------------------------------------------------------------
# line counts
# --------------------------------------------------------------------------


def _line_q_count(Bint: int, q: int) -> int:
    """Numerators p with |p| <= Bint and gcd(p, q) = 1 (p = 0 only for q = 1)."""
    return 2 * count_coprime(Bint, distinct_primes(q)) + (1 if q == 1 else 0)


def _count_line_all(Bint: int) -> int:
    """All of Q with height max(|p|, q) <= Bint: 1 + 2 sum mu(d) floor(B/d)^2."""
    if Bint < 1:
        return 0
    mu = mobius_sieve(Bint).astype(np.int64)
    d = np.arange(1, Bint + 1, dtype=np.int64)
    f = Bint // d
    return int(1 + 2 * np.sum(mu[1:] * f * f))


def _p1_chunk_worker(args: Tuple[int, Tuple[int, ...]]) -> int:
    Bint, qs = args
    return sum(_line_q_count(Bint, q) for q in qs)


def count_p1(
    m: int,
    S: PlaceSet,
    B: Union[int, float, Fraction],
    mode: str,
    workers: int = 1,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> int:
    """Points of the line model with global height <= B in the given mode."""
    _check_mode(mode)
    Bint = _floor_bound(B)
    if Bint < 1:
        return 0
    if mode == "rational" or m == 1:
        _charge(budget, Bint)
        return _count_line_all(Bint)
    gen = darmon_denominators if mode == "darmon" else campana_denominators
    qs = gen(Bint, m, S.finite_primes)
    _charge(budget, len(qs))
    chunks = [(Bint, tuple(c)) for c in _chunked(qs)]
    return sum(_run_chunks(_p1_chunk_worker, chunks, workers))


# --------------------------------------------------------------------------
# plane counts (n = 2)
# --------------------------------------------------------------------------


def _pn2_pair_count(Bint: int, q: int) -> int:
    """#{(x0, x1) in [-B, B]^2 : gcd(x0, x1, q) = 1} by inclusion-exclusion."""
    total = 0
    divs = [1]
    for p in distinct_primes(q):
        divs += [-d * p for d in divs]
    for d in divs:
        k = 2 * (Bint // abs(d)) + 1
        total += k * k if d > 0 else -(k * k)
    return total


def _pn2_chunk_worker(args: Tuple[int, Tuple[int, ...]]) -> int:
    Bint, qs = args
    return sum(_pn2_pair_count(Bint, q) for q in qs)


def _count_plane_all(Bint: int) -> int:
    """Rational-mode plane count: sum_d mu(d) floor(B/d) (2 floor(B/d) + 1)^2."""
    if Bint < 1:
        return 0
    mu = mobius_sieve(Bint).astype(np.int64)
    d = np.arange(1, Bint + 1, dtype=np.int64)
    f = Bint // d
    return int(np.sum(mu[1:] * f * (2 * f + 1) ** 2))


def count_pn2(
    m: int,
    S: PlaceSet,
    B: Union[int, float, Fraction],
    mode: str,
    workers: int = 1,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> int:
    """Plane model (projective, n = 2): last coordinate plays the role of q."""
    _check_mode(mode)
    Bint = _floor_bound(B)
    if Bint < 1:
        return 0
    if mode == "rational" or m == 1:
        _charge(budget, Bint)
        return _count_plane_all(Bint)
    gen = darmon_denominators if mode == "darmon" else campana_denominators
    qs = gen(Bint, m, S.finite_primes)
    _charge(budget, len(qs))
    chunks = [(Bint, tuple(c)) for c in _chunked(qs)]
    return sum(_run_chunks(_pn2_chunk_worker, chunks, workers))


# --------------------------------------------------------------------------
# blow-up counts
# --------------------------------------------------------------------------


def _iroot_ratio(num: int, den: int, k: int) -> int:
    """Largest x >= 0 with x^k * den <= num."""
    if num < 0:
        return -1
    return integer_kth_root(num // den, k)


def _blowup_pair_admissible(
    x0: int, g: int, m1: int, m2: int, s_primes: Sequence[int], mode: str
) -> bool:
    if mode == "rational" or (m1 == 1 and m2 == 1):
        return True
    g_t = _strip_primes(g, s_primes)
    q_t = _strip_primes(x0 // g, s_primes)
    if mode == "darmon":
        return is_kth_power(g_t, m1) and is_kth_power(q_t, m2)
    return is_k_full(g_t, m1) and is_k_full(q_t, m2)


def _blowup_chunk_worker(
    args: Tuple[str, int, int, Tuple[int, ...], str, int, int, int]
) -> int:
    Btext, m1, m2, s_primes, mode, lo, hi, Mmax = args
    Bf = Fraction(Btext)
    k = m1 * m2
    Bm = Bf**k
    num, den = Bm.numerator, Bm.denominator
    E1 = (m1 + 1) * m2
    E2 = m1 * m2 + m1 - m2
    total = 0
    for x0 in range(lo, hi):
        for x1 in range(0, Mmax + 1):
            weight = 1 if x1 == 0 else 2
            g = math.gcd(x0, x1)
            M2 = max(x0, x1)
            Q = M2 // g
            qE2 = Q**E2
            if M2**E1 * qE2 * den > num:
                continue  # even the |x2| <= M2 heights exceed B
            if not _blowup_pair_admissible(x0, g, m1, m2, s_primes, mode):
                continue
            gp = distinct_primes(g)
            cnt = 2 * count_coprime(M2, gp) + (1 if g == 1 else 0)
            X2 = _iroot_ratio(num, den * qE2, E1)
            if X2 > M2:
                cnt += 2 * (count_coprime(X2, gp) - count_coprime(M2, gp))
            total += weight * cnt
    return total


def count_blowup(
    m1: int,
    m2: int,
    S: PlaceSet,
    B: Union[int, float, Fraction],
    mode: str,
    workers: int = 1,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> int:
    """Blow-up model points with global height <= B in the given mode."""
    _check_mode(mode)
    Bf = Fraction(B)
    if Bf < 1:
        return 0
    Bm1 = Bf**m1
    Mmax = _iroot_ratio(Bm1.numerator, Bm1.denominator, m1 + 1)
    if Mmax < 1:
        return 0
    _charge(budget, Mmax * (Mmax + 1))
    ranges = _chunked_ranges(1, Mmax + 1)
    chunks = [
        (str(Bf), m1, m2, S.finite_primes, mode, lo, hi, Mmax) for lo, hi in ranges
    ]
    return sum(_run_chunks(_blowup_chunk_worker, chunks, workers))


# --------------------------------------------------------------------------
# chunking / parallel plumbing
# --------------------------------------------------------------------------

_N_CHUNKS = 32  # fixed, so the partition never depends on the worker count


def _chunked(seq: Sequence[int]) -> Iterable[Sequence[int]]:
    if not seq:
        return []
    size = max(1, (len(seq) + _N_CHUNKS - 1) // _N_CHUNKS)
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def _chunked_ranges(lo: int, hi: int) -> List[Tuple[int, int]]:
    if hi <= lo:
        return []
    size = max(1, (hi - lo + _N_CHUNKS - 1) // _N_CHUNKS)
    return [(a, min(a + size, hi)) for a in range(lo, hi, size)]


def _run_chunks(fn, chunk_args, workers: int) -> List[int]:
    if workers <= 1 or len(chunk_args) <= 1:
        return [fn(a) for a in chunk_args]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, chunk_args))


# --------------------------------------------------------------------------
# definitional oracles
# --------------------------------------------------------------------------


def _mode_ok(point, model: OrbifoldModel, S: PlaceSet, mode: str) -> bool:
    if mode == "rational":
        return True
    if mode == "darmon":
        return geometry.is_darmon(point, model, S)
    return geometry.is_campana(point, model, S)


def naive_count_p1(m: int, S: PlaceSet, B, mode: str) -> int:
    """Point-by-point oracle over all reduced p/q with max(|p|, q) <= B."""
    _check_mode(mode)
    model = projective_space(1, m)
    Bf = Fraction(B)
    Bint = _floor_bound(Bf)
    total = 0
    for q in range(1, Bint + 1):
        for p in range(-Bint, Bint + 1):
            if math.gcd(p, q) != 1:
                continue
            pt = geometry.ProjectivePoint.from_rationals((p, q))
            if not _mode_ok(pt, model, S, mode):
                continue
            if geometry.global_height(pt, model).le(Bf):
                total += 1
    return total


def naive_count_pn2(m: int, S: PlaceSet, B, mode: str) -> int:
    _check_mode(mode)
    model = projective_space(2, m)
    Bf = Fraction(B)
    Bint = _floor_bound(Bf)
    total = 0
    for x2 in range(1, Bint + 1):
        for x0 in range(-Bint, Bint + 1):
            for x1 in range(-Bint, Bint + 1):
                if math.gcd(math.gcd(x0, x1), x2) != 1:
                    continue
                pt = geometry.ProjectivePoint.from_rationals((x0, x1, x2))
                if not _mode_ok(pt, model, S, mode):
                    continue
                if geometry.global_height(pt, model).le(Bf):
                    total += 1
    return total


def naive_count_blowup(m1: int, m2: int, S: PlaceSet, B, mode: str) -> int:
    _check_mode(mode)
    model = blowup_p2(m1, m2)
    Bf = Fraction(B)
    Bm1 = Bf**m1
    Mmax = _iroot_ratio(Bm1.numerator, Bm1.denominator, m1 + 1)
    total = 0
    for x0 in range(1, Mmax + 1):
        for x1 in range(-Mmax, Mmax + 1):
            for x2 in range(-Mmax, Mmax + 1):
                if math.gcd(math.gcd(x0, x1), x2) != 1:
                    continue
                pt = geometry.BlowupPoint(Fraction(x1, x0), Fraction(x2, x0))
                if not _mode_ok(pt, model, S, mode):
                    continue
                if geometry.global_height(pt, model).le(Bf):
                    total += 1
    return total


# --------------------------------------------------------------------------
# series over a grid
# --------------------------------------------------------------------------


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")


def count_points(
    model: OrbifoldModel,
    S: PlaceSet,
    B,
    mode: str,
    workers: int = 1,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> int:
    """Dispatch a single count for a built-in model."""
    if model.name == "p1":
        return count_p1(model.params["m"], S, B, mode, workers, budget)
    if model.name == "pn":
        if model.dimension != 2:
            raise DomainError("plane enumeration is implemented for n = 2 only")
        return count_pn2(model.params["m"], S, B, mode, workers, budget)
    if model.name == "blowup":
        return count_blowup(
            model.params["m1"], model.params["m2"], S, B, mode, workers, budget
        )
    raise DomainError(f"no enumerator for model {model.name!r}")


def count_series(
    model: OrbifoldModel,
    S: PlaceSet,
    bounds: Sequence[Union[int, float, Fraction]],
    mode: str = "all",
    workers: int = 1,
    budget: Optional[int] = DEFAULT_BUDGET,
    labels: Optional[Sequence[str]] = None,
) -> CountSeries:
    """Counts over a strictly increasing grid of bounds.

    mode "all" fills every column; a single mode fills just that one.
    """
    if not bounds:
        raise DomainError("empty bound grid")
    fracs = [Fraction(b) for b in bounds]
    if any(b2 <= b1 for b1, b2 in zip(fracs, fracs[1:])):
        raise DomainError("bounds must be strictly increasing")
    if labels is None:
        labels = [_format_bound(b) for b in fracs]
    wanted = MODES if mode == "all" else (mode,)
    records = []
    for b in fracs:
        counts: Dict[str, Optional[int]] = {m: None for m in MODES}
        for md in wanted:
            counts[md] = count_points(model, S, b, md, workers, budget)
        records.append(
            CountRecord(
                bound=b,
                n_rational=counts["rational"],
                n_campana=counts["campana"],
                n_darmon=counts["darmon"],
            )
        )
    return CountSeries(model, S.finite_primes, tuple(records), tuple(labels))


def _format_bound(b: Fraction) -> str:
    if b.denominator == 1:
        return str(b.numerator)
    return str(float(b))


# --------------------------------------------------------------------------
# CSV schema
# --------------------------------------------------------------------------


def write_series_csv(series: CountSeries, fh) -> None:
    fh.write(CSV_HEADER + "\n")
    for label, rec in zip(series.labels, series.records):
        cells = [label]
        for v in (rec.n_rational, rec.n_campana, rec.n_darmon):
            cells.append("" if v is None else str(v))
        fh.write(",".join(cells) + "\n")


def read_counts_csv(fh) -> List[Dict[str, Optional[Union[float, int]]]]:
    header = fh.readline().strip()
    if header != CSV_HEADER:
        raise DomainError(f"unexpected CSV header: {header!r}")
    rows = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != 4:
            raise DomainError(f"malformed CSV row: {line!r}")
        rows.append(
            {
                "bound": float(Fraction(cells[0])),
                "n_rational": int(cells[1]) if cells[1] else None,
                "n_campana": int(cells[2]) if cells[2] else None,
                "n_darmon": int(cells[3]) if cells[3] else None,
            }
        )
    return rows


# --------------------------------------------------------------------------
# debug dump
# --------------------------------------------------------------------------


def dump_points(
    model: OrbifoldModel,
    S: PlaceSet,
    B,
    mode: str,
    fh,
    cap: int = 10**6,
) -> int:
    """Write the counted points one per line (debug aid).  Refuses to start
    when the count exceeds the cap."""
    total = count_points(model, S, B, mode)
    if total > cap:
        raise BudgetExceededError(f"{total} points exceed the dump cap {cap}")
    Bf = Fraction(B)
    written = 0
    if model.name == "p1":
        Bint = _floor_bound(Bf)
        for q in range(1, Bint + 1):
            for p in range(-Bint, Bint + 1):
                if math.gcd(p, q) != 1:
                    continue
                pt = geometry.ProjectivePoint.from_rationals((p, q))
                if _mode_ok(pt, model, S, mode):
                    fh.write(f"{p}/{q}\n")
                    written += 1
    elif model.name == "pn" and model.dimension == 2:
        Bint = _floor_bound(Bf)
        for x2 in range(1, Bint + 1):
            for x0 in range(-Bint, Bint + 1):
                for x1 in range(-Bint, Bint + 1):
                    if math.gcd(math.gcd(x0, x1), x2) != 1:
                        continue
                    pt = geometry.ProjectivePoint.from_rationals((x0, x1, x2))
                    if _mode_ok(pt, model, S, mode):
                        fh.write(":".join(str(c) for c in pt.coords) + "\n")
                        written += 1
    elif model.name == "blowup":
        m1 = model.params["m1"]
        Bm1 = Bf**m1
        Mmax = _iroot_ratio(Bm1.numerator, Bm1.denominator, m1 + 1)
        for x0 in range(1, Mmax + 1):
            for x1 in range(-Mmax, Mmax + 1):
                for x2 in range(-Mmax, Mmax + 1):
                    if math.gcd(math.gcd(x0, x1), x2) != 1:
                        continue
                    pt = geometry.BlowupPoint(Fraction(x1, x0), Fraction(x2, x0))
                    if _mode_ok(pt, model, S, mode) and geometry.global_height(
                        pt, model
                    ).le(Bf):
                        fh.write(f"{pt.u},{pt.w}\n")
                        written += 1
    else:
        raise DomainError(f"dump is not implemented for model {model.name!r}")
    return written
