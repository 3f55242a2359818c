"""Syntactic oracle for the moments of powers of the coupling matrix.

The quantity under study is the n-th moment of the first coordinate of
``J^l Y`` normalized by ``N^(n*l/2)``, where J is an N x N matrix of i.i.d.
centered entries and Y is independent of J.  Expanding the power produces a
sum over *sentences*: n index words of length l+1, each starting at index 1.
Walking a word left to right yields oriented edges (self-loops allowed); a
term survives the expectation only if every oriented edge is traversed at
least twice, because the entries are centered.

This module enumerates sentences two ways and never lets the two routes share
a code path with the Monte Carlo simulation they are meant to check:

* ``exact_moment``            -- direct summation over all N^(n*l) index
  tuples (compiled kernel, compensated accumulation);
* ``exact_moment_via_classes`` -- summation over canonical equivalence
  classes, each expanded by the exact count of members with letters <= N.

Both must agree to ~1e-12, and for n = 2p they converge to
``sigma^(2lp) (2p-1)!! phi^p`` as N grows.
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CapacityError, DomainError
from .special import double_factorial

DEFAULT_ENUM_BUDGET = 12  # max n*l for class enumeration
DEFAULT_DIRECT_BUDGET = 10**8  # max N^(n*l) for direct summation

Sentence = tuple[tuple[int, ...], ...]


def validate_sentence(sentence: Sentence) -> None:
    if not sentence:
        raise DomainError("a sentence needs at least one word")
    length = len(sentence[0])
    for word in sentence:
        if len(word) != length:
            raise DomainError("all words in a sentence must have equal length")
        if len(word) < 2:
            raise DomainError("words must have length >= 2")
        if word[0] != 1:
            raise DomainError(f"words must start with letter 1, got {word}")
        for a in word:
            if not isinstance(a, int) or a < 1:
                raise DomainError(f"letters must be positive integers, got {a!r}")


def word_edges(word):
    """Oriented edges traversed by a word, read left to right."""
    return [(word[i], word[i + 1]) for i in range(len(word) - 1)]


def edge_multiplicities(sentence: Sentence) -> Counter:
    counts: Counter = Counter()
    for word in sentence:
        counts.update(word_edges(word))
    return counts


def support(sentence: Sentence) -> set:
    letters = set()
    for word in sentence:
        letters.update(word)
    return letters


def weight(sentence: Sentence) -> int:
    return len(support(sentence))


def canonicalize(sentence: Sentence) -> Sentence:
    """Relabel by first occurrence (1 stays 1, new letters get 2, 3, ...).

    Two sentences are related by a letter bijection iff their canonical forms
    coincide; the map is idempotent.
    """
    validate_sentence(sentence)
    mapping = {1: 1}
    nxt = 2
    out = []
    for word in sentence:
        relabeled = []
        for a in word:
            if a not in mapping:
                mapping[a] = nxt
                nxt += 1
            relabeled.append(mapping[a])
        out.append(tuple(relabeled))
    return tuple(out)


@lru_cache(maxsize=None)
def _enumerate_classes(l: int, n: int) -> dict:
    """All canonical sentences (n words of length l+1) with every oriented-edge
    multiplicity >= 2, bucketed by weight.

    Enumerates restricted-growth letter strings (a new letter is always the
    smallest unused one) and prunes a branch as soon as the number of edges
    still at multiplicity one exceeds the number of traversals left.
    """
    total = n * l
    letters = [0] * total
    counts: dict = {}
    buckets: dict = {}

    def rec(pos: int, max_used: int, deficient: int) -> None:
        if pos == total:
            if deficient == 0:
                sent = tuple(
                    tuple([1] + letters[r * l : (r + 1) * l]) for r in range(n)
                )
                buckets.setdefault(max_used, []).append(sent)
            return
        prev = 1 if pos % l == 0 else letters[pos - 1]
        room = total - pos - 1  # traversals left after this one
        for letter in range(1, max_used + 2):
            edge = (prev, letter)
            c = counts.get(edge, 0)
            if c == 0:
                d = deficient + 1
            elif c == 1:
                d = deficient - 1
            else:
                d = deficient
            if d > room:
                continue
            counts[edge] = c + 1
            letters[pos] = letter
            rec(pos + 1, max(max_used, letter), d)
            if c == 0:
                del counts[edge]
            else:
                counts[edge] = c

    rec(0, 1, 0)
    return {t: tuple(sents) for t, sents in buckets.items()}


def _check_enum_budget(l: int, n: int, budget: int) -> None:
    if l < 1 or n < 1:
        raise DomainError(f"need l >= 1 and n >= 1, got l={l}, n={n}")
    if n * l > budget:
        raise CapacityError(f"enumeration budget n*l <= {budget} exceeded (n*l = {n * l})")


def enumerate_w(l: int, n: int, t: int, budget: int = DEFAULT_ENUM_BUDGET) -> list:
    """Canonical sentences of weight t with all oriented-edge multiplicities >= 2."""
    _check_enum_budget(l, n, budget)
    if t < 1 or t > n * l + 1:
        raise DomainError(f"weight must lie in 1..{n * l + 1}, got {t}")
    return list(_enumerate_classes(l, n).get(t, ()))


def count_equivalents(t: int, n_letters: int) -> int:
    """Number of sentences with letters in {1..N} equivalent to a weight-t one.

    The first letter is pinned to 1, so the remaining t-1 distinct letters map
    injectively into {2..N}: a falling factorial with t-1 factors (1 when
    t = 1, 0 as soon as t > N).
    """
    if t < 1:
        raise DomainError(f"weight must be >= 1, got {t}")
    if n_letters < 1:
        raise DomainError(f"alphabet size must be >= 1, got {n_letters}")
    return math.perm(n_letters - 1, t - 1)


def limit_moment(l: int, n: int, sigma: float, phi: float) -> float:
    """Large-N limit of the normalized n-th moment: Gaussian even moments."""
    if l < 1 or n < 1:
        raise DomainError(f"need l >= 1 and n >= 1, got l={l}, n={n}")
    if n % 2 == 1:
        return 0.0
    p = n // 2
    return sigma ** (2 * l * p) * double_factorial(2 * p - 1) * phi**p


# ---------------------------------------------------------------------------
# Direct summation over all index tuples.
# ---------------------------------------------------------------------------

_Y_MODE_IID = 0
_Y_MODE_VALUES = 1


def _direct_sum_py(N, l, n, mj, y_mode, y_arr):
    """Pure-Python twin of the compiled kernel (used for cross-validation)."""
    nl = n * l
    total = N**nl
    letters = [0] * nl
    edges = [0] * nl
    terminals = [0] * n
    acc = 0.0
    comp = 0.0
    for idx in range(total):
        x = idx
        for p in range(nl):
            letters[p] = x % N + 1
            x //= N
        for r in range(n):
            prev = 1
            base = r * l
            for i in range(l):
                cur = letters[base + i]
                edges[base + i] = prev * (N + 1) + cur
                prev = cur
            terminals[r] = prev
        term = 1.0
        zero = False
        for i in range(nl):
            e = edges[i]
            dup = False
            for j in range(i):
                if edges[j] == e:
                    dup = True
                    break
            if dup:
                continue
            c = 0
            for j in range(nl):
                if edges[j] == e:
                    c += 1
            m = mj[c]
            if m == 0.0:
                zero = True
                break
            term *= m
        if zero:
            continue
        if y_mode == _Y_MODE_IID:
            for r in range(n):
                v = terminals[r]
                dup = False
                for j in range(r):
                    if terminals[j] == v:
                        dup = True
                        break
                if dup:
                    continue
                c = 0
                for j in range(n):
                    if terminals[j] == v:
                        c += 1
                m = y_arr[c]
                if m == 0.0:
                    zero = True
                    break
                term *= m
            if zero:
                continue
        else:
            for r in range(n):
                term *= y_arr[terminals[r] - 1]
        y = term - comp
        s_new = acc + y
        comp = (s_new - acc) - y
        acc = s_new
    return acc


try:  # compiled kernel; the pure-Python twin remains the reference
    from numba import njit

    _direct_sum_nb = njit(cache=True)(_direct_sum_py)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _direct_sum_nb = None
    HAVE_NUMBA = False


def _entry_moment_table(entry_law, max_order: int) -> np.ndarray:
    return np.array([entry_law.moment(k) for k in range(max_order + 1)], dtype=np.float64)


def _y_setup(n, N, y_law, y_values):
    if (y_law is None) == (y_values is None):
        raise DomainError("provide exactly one of y_law or y_values")
    if y_law is not None:
        table = np.array([y_law.moment(k) for k in range(n + 1)], dtype=np.float64)
        return _Y_MODE_IID, table
    vals = np.asarray(y_values, dtype=np.float64)
    if vals.shape != (N,):
        raise DomainError(f"y_values must have shape ({N},), got {vals.shape}")
    return _Y_MODE_VALUES, vals


def exact_moment(
    l: int,
    n: int,
    N: int,
    entry_law,
    y_law=None,
    y_values=None,
    budget: int = DEFAULT_DIRECT_BUDGET,
    compiled: bool = True,
) -> float:
    """E[(first coordinate of J^l Y)^n] / N^(n*l/2) by full tuple summation.

    Y is either i.i.d. with the moment table of ``y_law`` or the fixed vector
    ``y_values``.  Exact up to floating point; every term with an odd-moment
    zero factor contributes an exact 0.0.
    """
    if l < 1 or n < 1 or N < 1:
        raise DomainError(f"need l, n, N >= 1, got l={l}, n={n}, N={N}")
    nl = n * l
    if N**nl > budget:
        raise CapacityError(
            f"direct summation budget exceeded: N^(n*l) = {N**nl} > {budget}"
        )
    mj = _entry_moment_table(entry_law, nl)
    y_mode, y_arr = _y_setup(n, N, y_law, y_values)
    kernel = _direct_sum_nb if (compiled and HAVE_NUMBA) else _direct_sum_py
    raw = kernel(N, l, n, mj, y_mode, y_arr)
    return raw / N ** (nl / 2.0)


def _class_term(sentence: Sentence, mj, my) -> float:
    """Product of entry-law moments over edges times the i.i.d. Y factor."""
    term = 1.0
    for mult in edge_multiplicities(sentence).values():
        m = mj[mult]
        if m == 0.0:
            return 0.0
        term *= m
    for mult in Counter(word[-1] for word in sentence).values():
        m = my[mult]
        if m == 0.0:
            return 0.0
        term *= m
    return term


def exact_moment_via_classes(
    l: int,
    n: int,
    N: int,
    entry_law,
    y_law,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> float:
    """Same normalized moment as ``exact_moment`` but summed class by class.

    Only classes with all oriented-edge multiplicities >= 2 can contribute
    for a centered entry law, so the enumeration restricted to those classes
    is exhaustive.  Requires an i.i.d. Y law (the class term must not depend
    on which letters represent the class).
    """
    if N < 1:
        raise DomainError(f"need N >= 1, got {N}")
    _check_enum_budget(l, n, budget)
    nl = n * l
    mj = _entry_moment_table(entry_law, nl)
    my = np.array([y_law.moment(k) for k in range(n + 1)], dtype=np.float64)
    contributions = []
    for t, sentences in _enumerate_classes(l, n).items():
        members = count_equivalents(t, N)
        if members == 0:
            continue
        for sent in sentences:
            term = _class_term(sent, mj, my)
            if term != 0.0:
                contributions.append(members * term)
    return math.fsum(contributions) / N ** (nl / 2.0)


def class_table(l: int, n: int, N: int, entry_law, y_law, budget: int = DEFAULT_ENUM_BUDGET):
    """Rows (t, class_id, sentence, member_count_at_N, term_value) for export."""
    _check_enum_budget(l, n, budget)
    mj = _entry_moment_table(entry_law, n * l)
    my = np.array([y_law.moment(k) for k in range(n + 1)], dtype=np.float64)
    rows = []
    class_id = 0
    for t in sorted(_enumerate_classes(l, n)):
        members = count_equivalents(t, N)
        for sent in _enumerate_classes(l, n)[t]:
            rows.append((t, class_id, sent, members, _class_term(sent, mj, my)))
            class_id += 1
    return rows


@dataclass(frozen=True)
class WeightScanReport:
    """Outcome of scanning the maximal sentence weight for odd word counts."""

    l: int
    n: int
    bound: int  # floor(n*l/2)
    max_weight: int  # 0 when no class survives at all
    class_counts: dict = field(default_factory=dict)
    witnesses: tuple = ()  # classes whose weight exceeds the bound

    @property
    def within_bound(self) -> bool:
        return self.max_weight <= self.bound


def max_weight_report(l: int, n: int, budget: int = DEFAULT_ENUM_BUDGET) -> WeightScanReport:
    """Enumerate every surviving class and compare weights to floor(n*l/2).

    Only meaningful for odd n.  Witnesses above the bound are reported, not
    judged: length-2 words admit sentences such as ((1,2),(1,2),(1,2)) whose
    weight exceeds the bound while their moment contribution still vanishes
    as N grows.
    """
    if n % 2 == 0:
        raise DomainError(f"the weight bound scan applies to odd n, got n={n}")
    _check_enum_budget(l, n, budget)
    buckets = _enumerate_classes(l, n)
    bound = (n * l) // 2
    max_weight = max(buckets, default=0)
    witnesses = []
    for t in sorted(buckets):
        if t > bound:
            witnesses.extend(buckets[t])
    return WeightScanReport(
        l=l,
        n=n,
        bound=bound,
        max_weight=max_weight,
        class_counts={t: len(buckets[t]) for t in sorted(buckets)},
        witnesses=tuple(witnesses),
    )
