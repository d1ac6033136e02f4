"""Classical spatial entropy indices.

Two families:

* area-based: Batty's spatial entropy and the Karlstrom-Ceccato variant,
  computed from the probability that a target category falls in each area
  of a partition of the window;
* contiguity-based: O'Neill's entropy of ordered contiguous pixel pairs,
  Leibovici's cumulative-distance generalization, the relative contagion
  index, and the Parresol-Edwards negated form.

All of them are single numbers; none separates the contribution of space
from the entropy of the category mix, which is what the decomposition in
``spatent.decomp`` adds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cooccur import CooccurrenceScheme, count_categories, tabulate_within
from .errors import ConsistencyError
from .lattice import AreaPartition, CategoricalGrid
from .prob import shannon


@dataclass(frozen=True)
class AreaProbabilities:
    """Per-area probabilities p_g of the target category, with area sizes T_g."""

    probs: np.ndarray
    sizes: np.ndarray

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=np.float64).ravel()
        t = np.asarray(self.sizes, dtype=np.float64).ravel()
        if p.size != t.size:
            raise ValueError("probs and sizes must have equal length")
        if p.size == 0:
            raise ValueError("need at least one area")
        if np.any(p < 0.0) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("area probabilities must be a distribution")
        if np.any(t <= 0.0):
            raise ValueError("area sizes must be positive")
        p.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "sizes", t)

    @property
    def num_areas(self) -> int:
        return self.probs.size


def estimate_area_probs(
    grid: CategoricalGrid, partition: AreaPartition, target_category: int
) -> AreaProbabilities:
    """p_g = (occurrences of the target category in area g) / (total occurrences)."""
    if not 1 <= target_category <= grid.num_categories:
        raise ValueError(f"target category {target_category} out of range")
    if (partition.rows, partition.cols) != (grid.rows, grid.cols):
        raise ValueError("partition geometry does not match the grid")
    mask = grid.values == target_category
    total = int(mask.sum())
    if total == 0:
        raise ValueError(f"category {target_category} does not occur in the grid")
    counts = np.bincount(
        partition.assignment[mask] - 1, minlength=partition.num_areas
    )
    return AreaProbabilities(counts / total, partition.sizes)


def batty_entropy(ap: AreaProbabilities) -> float:
    """Batty's spatial entropy sum_g p_g log(T_g / p_g).

    Maximal, log(sum T_g), when intensity p_g / T_g is constant; minimal,
    log(T_g*), when everything concentrates in the smallest area.  With all
    T_g = 1 it reduces to the Shannon entropy of (p_1..p_G).
    """
    mask = ap.probs > 0.0
    p = ap.probs[mask]
    return float((p * np.log(ap.sizes[mask] / p)).sum())


@dataclass(frozen=True)
class AreaNeighbourhood:
    """Row-standardized neighbourhood weights between areas.

    ``weights[g, g']`` is 1/|N(g)| when area g' (self included) lies in the
    neighbourhood of g, else 0; every row sums to 1.
    """

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if np.any(w < 0.0) or np.any(np.abs(w.sum(axis=1) - 1.0) > 1e-9):
            raise ValueError("rows must be non-negative and sum to 1")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def num_areas(self) -> int:
        return self.weights.shape[0]

    def neighbours_of(self, g: int) -> np.ndarray:
        """0-based ids of the areas with positive weight from area g."""
        return np.nonzero(self.weights[g] > 0.0)[0]


def build_area_neighbourhood(
    partition: AreaPartition, distance: float
) -> AreaNeighbourhood:
    """Neighbourhood by centroid distance: g' in N(g) iff dist <= distance.

    The threshold is closed and the self-distance is 0, so each area always
    belongs to its own neighbourhood; distance 0 gives the identity
    neighbourhood.  Weights are equal within a neighbourhood (1/|N(g)|).
    """
    if distance < 0.0:
        raise ValueError("neighbourhood distance must be >= 0")
    c = partition.centroids()
    diff = c[:, None, :] - c[None, :, :]
    d = np.hypot(diff[..., 0], diff[..., 1])
    adj = d <= distance
    weights = adj / adj.sum(axis=1, keepdims=True)
    return AreaNeighbourhood(weights)


def karlstrom_entropy(ap: AreaProbabilities, nb: AreaNeighbourhood) -> float:
    """Karlstrom-Ceccato entropy sum_g p_g log(1 / ptilde_g).

    ptilde_g is the neighbourhood-smoothed probability (weights @ p).  The
    maximum log(G) is reached at uniform p_g whatever the neighbourhood;
    with the identity neighbourhood the index is Shannon's entropy of p,
    i.e. Batty's entropy at unit area sizes.
    """
    if nb.num_areas != ap.num_areas:
        raise ValueError("neighbourhood and probabilities disagree on area count")
    smoothed = nb.weights @ ap.probs
    mask = ap.probs > 0.0
    if np.any(smoothed[mask] <= 0.0):
        # impossible while each area neighbours itself; guards foreign weights
        raise ConsistencyError("smoothed probability vanished on the support")
    p = ap.probs[mask]
    return float(-(p * np.log(smoothed[mask])).sum())


# ---------------------------------------------------------------------------
# contiguity-based indices

def oneill_entropy(grid: CategoricalGrid) -> float:
    """O'Neill's entropy: Shannon entropy of ordered contiguous pixel pairs.

    Contiguous means centroid distance in (0, 1], i.e. rook adjacency; the
    range is [0, 2 log(I)].
    """
    scheme = CooccurrenceScheme(grid.num_categories, ordered=True)
    return shannon(tabulate_within(grid, 1.0, scheme))


def leibovici_entropy(grid: CategoricalGrid, max_distance: float) -> float:
    """Leibovici's entropy: ordered pair entropy at distances (0, max_distance].

    At max_distance = 1 it coincides with O'Neill's entropy by construction.
    """
    if max_distance < 1.0:
        raise ValueError("max_distance must be >= 1 so that some pair exists")
    scheme = CooccurrenceScheme(grid.num_categories, ordered=True)
    return shannon(tabulate_within(grid, max_distance, scheme))


def relative_contagion(grid: CategoricalGrid, *, ordered: bool = True) -> float:
    """Relative contagion index 1 - H(pairs) / log(num pair categories).

    1 on a single-category grid (maximal contagion), 0 when contiguous pair
    categories are uniform.  The unordered variant normalizes by the
    unordered category count (I^2 + I) / 2.
    """
    if grid.num_categories < 2:
        raise ValueError("contagion needs at least two categories")
    scheme = CooccurrenceScheme(grid.num_categories, ordered=ordered)
    h = shannon(tabulate_within(grid, 1.0, scheme))
    return 1.0 - h / math.log(count_categories(scheme))


def parresol_edwards_entropy(grid: CategoricalGrid) -> float:
    """Parresol-Edwards form: the negated O'Neill entropy."""
    return -oneill_entropy(grid)
