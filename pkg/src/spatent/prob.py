"""Finite probability distributions and the entropy calculus on them.

Everything downstream (classical spatial indices and the distance-band
entropy decomposition) reduces to a handful of operations on finite pmfs:
Shannon entropy, Kullback-Leibler divergence, and the bivariate quantities
(joint entropy, conditional entropy, mutual information).

Conventions, applied uniformly:

* natural logarithms, so every result is in nats;
* the continuity convention 0*log(0) = 0, so zero-probability labels are
  legal everywhere and contribute nothing;
* a pmf is valid when all entries are >= 0 and the total mass is 1 within
  ``MASS_TOLERANCE``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AbsoluteContinuityError,
    DegenerateDistributionWarning,
    InvalidDistributionError,
)

MASS_TOLERANCE = 1e-9


def _validated_probs(probs, what: str) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1:
        p = p.ravel()
    if p.size == 0:
        raise InvalidDistributionError(f"{what}: empty probability vector")
    if np.any(p < 0.0):
        raise InvalidDistributionError(f"{what}: negative probability entry")
    mass = float(p.sum())
    if abs(mass - 1.0) > MASS_TOLERANCE:
        raise InvalidDistributionError(f"{what}: total mass {mass!r} is not 1")
    p.flags.writeable = False
    return p


def _plogp(p: np.ndarray) -> float:
    """-sum(p * log p) over the strictly positive entries."""
    pos = p[p > 0.0]
    return float(-(pos * np.log(pos)).sum()) + 0.0  # + 0.0 folds -0.0 into 0.0


@dataclass(frozen=True)
class Pmf:
    """Probability mass function over an explicit finite label set.

    ``labels`` is a tuple of hashable category identifiers; ``probs`` is the
    aligned vector of probabilities.  Validation happens at construction, so
    any ``Pmf`` instance in circulation is a valid distribution.
    """

    labels: tuple
    probs: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        probs = _validated_probs(self.probs, "Pmf")
        if len(labels) != probs.size:
            raise InvalidDistributionError(
                f"Pmf: {len(labels)} labels but {probs.size} probabilities"
            )
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_counts(cls, labels, counts) -> "Pmf":
        c = np.asarray(counts, dtype=np.float64)
        total = c.sum()
        if total <= 0:
            raise InvalidDistributionError("Pmf.from_counts: nothing observed")
        return cls(tuple(labels), c / total)

    @classmethod
    def uniform(cls, labels) -> "Pmf":
        labels = tuple(labels)
        n = len(labels)
        return cls(labels, np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return len(self.labels)

    def prob_of(self, label) -> float:
        return float(self.probs[self.labels.index(label)])


def as_pmf(p) -> Pmf:
    """Coerce a Pmf, or any probability sequence, into a Pmf.

    Plain sequences get integer labels 1..n; passing an existing Pmf is a
    no-op.  Lets the entropy functions accept raw vectors in scripts and
    tests without extra ceremony.
    """
    if isinstance(p, Pmf):
        return p
    arr = np.asarray(p, dtype=np.float64).ravel()
    return Pmf(tuple(range(1, arr.size + 1)), arr)


def shannon(p) -> float:
    """Shannon entropy H(p) = sum_i p_i log(1/p_i), in nats.

    Zero entries are skipped under the 0*log(0) = 0 convention.  The result
    lies in [0, log(len(p))].
    """
    return _plogp(as_pmf(p).probs)


def shannon_normalized(p) -> float:
    """Entropy divided by its maximum log(len(p)); result in [0, 1].

    A single-label pmf has maximum 0; that degenerate case returns 0.0 and
    emits a DegenerateDistributionWarning instead of dividing by zero.
    """
    pmf = as_pmf(p)
    if len(pmf) < 2:
        warnings.warn(
            "normalized entropy of a single-label pmf is defined as 0",
            DegenerateDistributionWarning,
            stacklevel=2,
        )
        return 0.0
    return shannon(pmf) / float(np.log(len(pmf)))


def kl_divergence(p, q) -> float:
    """Kullback-Leibler divergence KL(p || q) = sum_i p_i log(p_i / q_i).

    Both pmfs must be over the same label tuple, and p must be absolutely
    continuous w.r.t. q (p_i > 0 implies q_i > 0); otherwise the divergence
    is undefined and AbsoluteContinuityError is raised.
    """
    pp, qq = as_pmf(p), as_pmf(q)
    if pp.labels != qq.labels:
        raise ValueError("kl_divergence: label sets differ")
    mask = pp.probs > 0.0
    if np.any(qq.probs[mask] <= 0.0):
        raise AbsoluteContinuityError(
            "kl_divergence: support(p) not contained in support(q)"
        )
    pm = pp.probs[mask]
    return float((pm * np.log(pm / qq.probs[mask])).sum())


@dataclass(frozen=True)
class JointPmf:
    """Joint distribution of two categorical variables as a matrix.

    Rows index the first variable, columns the second.  The matrix must be
    elementwise >= 0 with total mass 1 within MASS_TOLERANCE.
    """

    row_labels: tuple
    col_labels: tuple
    probs: np.ndarray

    def __post_init__(self) -> None:
        row_labels = tuple(self.row_labels)
        col_labels = tuple(self.col_labels)
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 2:
            raise InvalidDistributionError("JointPmf: probs must be a matrix")
        if p.shape != (len(row_labels), len(col_labels)):
            raise InvalidDistributionError(
                f"JointPmf: shape {p.shape} does not match labels "
                f"({len(row_labels)}, {len(col_labels)})"
            )
        if np.any(p < 0.0):
            raise InvalidDistributionError("JointPmf: negative probability entry")
        mass = float(p.sum())
        if abs(mass - 1.0) > MASS_TOLERANCE:
            raise InvalidDistributionError(f"JointPmf: total mass {mass!r} is not 1")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "row_labels", row_labels)
        object.__setattr__(self, "col_labels", col_labels)
        object.__setattr__(self, "probs", p)

    def row_marginal(self) -> Pmf:
        return Pmf(self.row_labels, self.probs.sum(axis=1))

    def col_marginal(self) -> Pmf:
        return Pmf(self.col_labels, self.probs.sum(axis=0))


def joint_entropy(joint: JointPmf) -> float:
    """Entropy of the joint distribution, H(X,Y) = -sum p(x,y) log p(x,y)."""
    return _plogp(joint.probs.ravel())


def conditional_entropy(joint: JointPmf, conditioning: str = "cols") -> float:
    """Expected entropy of one variable given the other.

    ``conditioning="cols"`` returns H(rows | cols) =
    sum_k p(col_k) * H(rows | col_k); ``"rows"`` conditions the other way.
    Zero-mass conditioning labels contribute nothing and are flagged with a
    DegenerateDistributionWarning.
    """
    if conditioning == "cols":
        m = joint.probs
    elif conditioning == "rows":
        m = joint.probs.T
    else:
        raise ValueError("conditioning must be 'rows' or 'cols'")
    col_mass = m.sum(axis=0)
    if np.any(col_mass == 0.0):
        warnings.warn(
            "zero-mass conditioning label skipped in conditional entropy",
            DegenerateDistributionWarning,
            stacklevel=2,
        )
    total = 0.0
    for k in np.nonzero(col_mass > 0.0)[0]:
        cond = m[:, k] / col_mass[k]
        total += col_mass[k] * _plogp(cond)
    return float(total)


def mutual_information(joint: JointPmf) -> float:
    """Mutual information MI(X,Y) = KL(joint || product of marginals).

    Computed directly as sum over positive cells of
    p(x,y) log(p(x,y) / (p(x) p(y))).  Wherever p(x,y) > 0 the marginal
    product is positive too, so the divergence always exists.
    """
    p = joint.probs
    r = p.sum(axis=1)
    c = p.sum(axis=0)
    prod = np.outer(r, c)
    mask = p > 0.0
    return float((p[mask] * np.log(p[mask] / prod[mask])).sum())
