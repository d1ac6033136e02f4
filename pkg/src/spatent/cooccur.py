"""Pair co-occurrence engine.

The spatial measures implemented in this package are entropies of a
transformed variable: the category pair observed at two pixels, together
with the distance class of the pixel pair.  This module owns

* the pair-category coding (ordered or unordered degree-2 tuples),
* the distance classification into half-open bands (d_{k-1}, d_k],
* the enumeration of all N(N-1)/2 unordered pixel pairs of a grid.

Enumeration never materializes the pair list.  Pixel pairs are grouped by
their integer displacement vector (dr, dc); all pairs sharing a displacement
share a distance, and each displacement contributes
(rows - dr) * (cols - |dc|) pairs whose category tally is one vectorized
pass over two shifted views of the grid.  Cost is O(#displacements * N)
instead of O(N^2) pair visits.

``enumerate_pairs_bruteforce`` is the independent O(N^2) reference
implementation used to verify the displacement route on small grids; the
two are cross-checked in the test suite and by the ``verify`` command, and
must never be merged.
"""

from __future__ import annotations

import bisect
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations_with_replacement, product

import numpy as np

from .errors import CoverageError
from .lattice import CategoricalGrid, max_centroid_distance, window_diagonal
from .prob import JointPmf, Pmf

_UINT63_MAX = 2**63 - 1


def count_categories(scheme: "CooccurrenceScheme") -> int:
    """Number of distinct category tuples the scheme can produce.

    Ordered tuples of m draws from I categories: I**m.  Unordered
    (multiset) tuples: C(I + m - 1, m).  For pairs (m = 2) the unordered
    count collapses to (I^2 + I) / 2.
    """
    i, m = scheme.num_x_categories, scheme.degree
    n = i**m if scheme.ordered else math.comb(i + m - 1, m)
    if n > _UINT63_MAX:
        raise OverflowError(f"category count {n} exceeds the 64-bit range")
    return n


@dataclass(frozen=True)
class CooccurrenceScheme:
    """How a tuple of pixel categories is encoded as one co-occurrence category.

    ``ordered=False`` identifies permutations: the pair (a, b) is stored
    sorted.  ``ordered=True`` keeps orientation; for pairs the first element
    is the pixel that comes first in row-major order, i.e. the pair is read
    moving rightward and downward.
    """

    num_x_categories: int
    ordered: bool = False
    degree: int = 2

    def __post_init__(self) -> None:
        if self.num_x_categories < 1:
            raise ValueError("num_x_categories must be >= 1")
        if self.degree < 2:
            raise ValueError("degree must be >= 2")

    @property
    def num_z_categories(self) -> int:
        return count_categories(self)

    def category_labels(self) -> tuple:
        """All category tuples in canonical order, 1-based codes."""
        rng = range(1, self.num_x_categories + 1)
        if self.ordered:
            return tuple(product(rng, repeat=self.degree))
        return tuple(combinations_with_replacement(rng, self.degree))

    def pair_code_table(self) -> np.ndarray:
        """(I, I) lookup: 0-based categories of a pair -> 0-based pair code.

        Pairs only; the table is what makes vectorized tallying possible.
        """
        if self.degree != 2:
            raise ValueError("pair_code_table is defined for degree 2 only")
        i = self.num_x_categories
        lut = np.empty((i, i), dtype=np.int64)
        if self.ordered:
            lut[:] = np.arange(i * i).reshape(i, i)
        else:
            code = 0
            for a in range(i):
                for b in range(a, i):
                    lut[a, b] = code
                    lut[b, a] = code
                    code += 1
        return lut


@dataclass(frozen=True)
class DistanceClassification:
    """Strictly increasing break points defining half-open distance bands.

    Band k (1-based label 'wk') is the interval (breaks[k-1], breaks[k]].
    Distances at or below breaks[0] and above breaks[-1] belong to no band.
    """

    breaks: tuple

    def __post_init__(self) -> None:
        b = tuple(float(x) for x in self.breaks)
        if len(b) < 2:
            raise ValueError("need at least two break points")
        if b[0] < 0.0:
            raise ValueError("break points must be >= 0")
        if any(x >= y for x, y in zip(b, b[1:])):
            raise ValueError("break points must be strictly increasing")
        object.__setattr__(self, "breaks", b)

    @classmethod
    def default_for(cls, grid: CategoricalGrid) -> "DistanceClassification":
        """Bands (0,1], (1,2], (2,5], (5,10], (10,20], (20,30], (30, diag].

        The final break is the window diagonal, so every pair is covered;
        interior breaks that the grid cannot reach are dropped.
        """
        diag = window_diagonal(grid)
        interior = [b for b in (0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0) if b < diag]
        return cls(tuple(interior) + (diag,))

    @classmethod
    def single_band(cls, max_distance: float) -> "DistanceClassification":
        """The cumulative band (0, max_distance]."""
        return cls((0.0, float(max_distance)))

    @property
    def num_bands(self) -> int:
        return len(self.breaks) - 1

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(f"w{k + 1}" for k in range(self.num_bands))

    def intervals(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.breaks[:-1], self.breaks[1:]))

    def band_index(self, distance: float):
        """0-based band of a distance, or None when it falls outside."""
        if distance <= self.breaks[0] or distance > self.breaks[-1]:
            return None
        return bisect.bisect_left(self.breaks, distance) - 1

    def covers(self, grid: CategoricalGrid) -> bool:
        """True when every inter-pixel distance of the grid has a band."""
        return self.breaks[0] < 1.0 and self.breaks[-1] >= max_centroid_distance(grid)


@dataclass(frozen=True)
class PairSample:
    """Tally of all pixel pairs of one grid: counts per band and pair category.

    ``pair_counts[k]`` is the number of pairs in band k; ``category_counts``
    is the (num_bands, num_z_categories) table of pair-category counts.
    """

    scheme: CooccurrenceScheme
    classification: DistanceClassification
    pair_counts: np.ndarray
    category_counts: np.ndarray

    def __post_init__(self) -> None:
        q = np.asarray(self.pair_counts, dtype=np.int64)
        c = np.asarray(self.category_counts, dtype=np.int64)
        if c.shape != (self.classification.num_bands, self.scheme.num_z_categories):
            raise ValueError("category_counts shape does not match scheme/classification")
        if q.shape != (self.classification.num_bands,):
            raise ValueError("pair_counts shape does not match classification")
        if np.any(c.sum(axis=1) != q):
            raise ValueError("per-band category counts do not sum to pair counts")
        q.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "pair_counts", q)
        object.__setattr__(self, "category_counts", c)

    @property
    def total_pairs(self) -> int:
        return int(self.pair_counts.sum())

    def pooled_category_counts(self) -> np.ndarray:
        return self.category_counts.sum(axis=0)

    def to_csv(self, path_or_buf) -> None:
        """Write rows 'band,z_category,count' covering every cell of the table."""
        labels = self.scheme.category_labels()
        buf = io.StringIO()
        buf.write("band,z_category,count\n")
        for k, band in enumerate(self.classification.labels):
            for r, lab in enumerate(labels):
                z = "-".join(str(x) for x in lab)
                buf.write(f"{band},{z},{int(self.category_counts[k, r])}\n")
        text = buf.getvalue()
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", encoding="ascii") as fh:
                fh.write(text)


def _displacements(rows: int, cols: int):
    """Every displacement (dr, dc) linking a pixel to a later row-major pixel."""
    for dc in range(1, cols):
        yield 0, dc
    for dr in range(1, rows):
        for dc in range(-(cols - 1), cols):
            yield dr, dc


def _tally_displacements(m0, lut, breaks, num_bands, num_codes, items, skip_outside):
    rows, cols = m0.shape
    counts = np.zeros((num_bands, num_codes), dtype=np.int64)
    pair_counts = np.zeros(num_bands, dtype=np.int64)
    for dr, dc in items:
        d = math.sqrt(dr * dr + dc * dc)
        if d <= breaks[0] or d > breaks[-1]:
            if skip_outside:
                continue
            raise CoverageError(
                f"distance {d:.6g} of displacement ({dr}, {dc}) has no band"
            )
        k = bisect.bisect_left(breaks, d) - 1
        if dc >= 0:
            a = m0[: rows - dr, : cols - dc]
            b = m0[dr:, dc:]
        else:
            a = m0[: rows - dr, -dc:]
            b = m0[dr:, : cols + dc]
        codes = lut[a.ravel(), b.ravel()]
        counts[k] += np.bincount(codes, minlength=num_codes)
        pair_counts[k] += codes.size
    return counts, pair_counts


def enumerate_pairs(
    grid: CategoricalGrid,
    classification: DistanceClassification,
    scheme: CooccurrenceScheme,
    *,
    require_coverage: bool = True,
    workers: int = 1,
) -> PairSample:
    """Tally every unordered pixel pair by distance band and pair category.

    Pairs are unordered {u, v} with no self-pairs; for an ordered scheme the
    category tuple is read from the row-major-first pixel.  With
    ``require_coverage=True`` (the default) any pair whose distance has no
    band raises CoverageError; with False such pairs are silently skipped,
    which is what the cumulative single-band measures need.

    ``workers > 1`` splits the displacement list across threads; the merge
    is a fixed-order sum of per-worker tallies, so results are identical to
    the serial run.
    """
    if scheme.degree != 2:
        raise ValueError("pair enumeration supports degree-2 schemes only")
    if scheme.num_x_categories < grid.num_categories:
        raise ValueError("scheme has fewer categories than the grid")
    if grid.size < 2:
        raise ValueError("need at least two pixels to form a pair")

    m0 = grid.matrix - 1
    lut = scheme.pair_code_table()
    breaks = list(classification.breaks)
    nb, nc = classification.num_bands, scheme.num_z_categories
    items = list(_displacements(grid.rows, grid.cols))

    if workers > 1 and len(items) > 1:
        chunks = np.array_split(np.arange(len(items)), min(workers, len(items)))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    lambda ix: _tally_displacements(
                        m0, lut, breaks, nb, nc,
                        [items[i] for i in ix], not require_coverage,
                    ),
                    chunks,
                )
            )
        counts = sum(p[0] for p in parts)
        pair_counts = sum(p[1] for p in parts)
    else:
        counts, pair_counts = _tally_displacements(
            m0, lut, breaks, nb, nc, items, not require_coverage
        )
    return PairSample(scheme, classification, pair_counts, counts)


def enumerate_pairs_bruteforce(
    grid: CategoricalGrid,
    classification: DistanceClassification,
    scheme: CooccurrenceScheme,
    *,
    require_coverage: bool = True,
) -> PairSample:
    """Reference tally visiting all N(N-1)/2 pairs one by one.

    Independent of the displacement route by design: distances come from
    ``pixel_distance`` on pixel indices, categories from the flat value
    vector.  Quadratic cost; intended for grids up to a few hundred pixels.
    """
    from .lattice import pixel_distance

    if scheme.degree != 2:
        raise ValueError("pair enumeration supports degree-2 schemes only")
    if grid.size < 2:
        raise ValueError("need at least two pixels to form a pair")

    labels = scheme.category_labels()
    index = {lab: r for r, lab in enumerate(labels)}
    nb = classification.num_bands
    counts = np.zeros((nb, len(labels)), dtype=np.int64)
    pair_counts = np.zeros(nb, dtype=np.int64)
    vals = grid.values
    for u in range(grid.size - 1):
        for v in range(u + 1, grid.size):
            d = pixel_distance(u, v, grid)
            k = classification.band_index(d)
            if k is None:
                if require_coverage:
                    raise CoverageError(f"distance {d:.6g} has no band")
                continue
            a, b = int(vals[u]), int(vals[v])
            key = (a, b) if scheme.ordered else (min(a, b), max(a, b))
            counts[k, index[key]] += 1
            pair_counts[k] += 1
    return PairSample(scheme, classification, pair_counts, counts)


def tabulate_within(
    grid: CategoricalGrid, max_distance: float, scheme: CooccurrenceScheme
) -> Pmf:
    """Pmf of pair categories over all pairs at distance in (0, max_distance].

    The cumulative tabulation behind the contiguity-based classical indices.
    """
    sample = enumerate_pairs(
        grid,
        DistanceClassification.single_band(max_distance),
        scheme,
        require_coverage=False,
    )
    if sample.total_pairs == 0:
        raise ValueError(f"no pixel pairs at distance <= {max_distance}")
    return Pmf.from_counts(scheme.category_labels(), sample.pooled_category_counts())


@dataclass(frozen=True)
class PairDistributions:
    """Estimated distributions of one PairSample.

    ``p_w``: band weights Q_k / Q.  ``conditionals[k]``: pair-category pmf
    within band k, or None for an empty band.  ``p_z``: the pooled marginal,
    i.e. the Q-weighted mixture of the conditionals.  ``joint``: pair
    category x band, whose marginals reproduce p_z and p_w.
    """

    p_w: Pmf
    conditionals: tuple
    p_z: Pmf
    joint: JointPmf
    empty_bands: tuple


def conditional_pmfs(sample: PairSample) -> PairDistributions:
    """Relative-frequency estimates of the band and pair-category laws."""
    q = sample.pair_counts
    total = sample.total_pairs
    if total == 0:
        raise ValueError("sample contains no pairs")
    band_labels = sample.classification.labels
    z_labels = sample.scheme.category_labels()

    p_w = Pmf(band_labels, q / total)
    p_z = Pmf(z_labels, sample.pooled_category_counts() / total)
    conditionals = tuple(
        Pmf(z_labels, sample.category_counts[k] / q[k]) if q[k] > 0 else None
        for k in range(len(band_labels))
    )
    joint = JointPmf(z_labels, band_labels, sample.category_counts.T / total)
    empty = tuple(band_labels[k] for k in range(len(band_labels)) if q[k] == 0)
    return PairDistributions(p_w, conditionals, p_z, joint, empty)
