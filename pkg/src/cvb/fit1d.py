"""Univariate progressive-projection fitting over the Chebyshev basis.

Two fitters share the machinery: an exact interpolation that projects the
error vector on an orthogonalized copy of the term vectors, and a shape-first
approximation that projects on the raw term vectors in preference order with
reverse-order revisits after every new term.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .basis import (
    IDENTITY_MAP,
    DomainMap,
    SampleSet1D,
    TermVector,
    cheb_columns,
    warn_if_extrapolating,
)
from .orthogonalize import orthogonalize

# tau whose squared norm falls below this fraction of the sample count is
# degenerate (components of Chebyshev term vectors are bounded by 1).
DEGENERATE_TERM_REL = 1e-12


class FitError(RuntimeError):
    """A fit could not be carried out on the given data."""


@dataclass(frozen=True)
class FitConfig:
    """Loop controls: residual target, schedule length, optional repeats.

    ``epsilon`` is the max-abs residual at which fitting stops.  ``max_terms``
    is the schedule length n (for surfaces it bounds total degree, giving a
    triangular schedule of n(n+1)/2 terms).  ``extra_sweeps`` repeats the whole
    visit/revisit schedule after the first pass; this is an extension beyond
    the plain algorithm and defaults to off.
    """

    epsilon: float = 0.0
    max_terms: int = 8
    extra_sweeps: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0.0):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")
        if self.extra_sweeps < 0:
            raise ValueError(f"extra_sweeps must be >= 0, got {self.extra_sweeps}")


@dataclass(frozen=True)
class TraceStep:
    """One coefficient update: which term, how much, and the residual after."""

    term: object  # int for curves, TermIndex2D for surfaces
    kind: str  # "visit" or "revisit"
    increment: float
    max_abs_residual: float
    l2_residual: float
    coeffs: Optional[tuple] = None  # univariate coefficient snapshot


@dataclass(frozen=True)
class FitReport:
    trace: tuple
    terms_used: int
    converged: bool
    skipped: tuple = field(default_factory=tuple)


@dataclass(frozen=True)
class ChebModel1D:
    """Chebyshev series P(x) = sum a_j T_j(t), t = xmap.forward(x)."""

    coeffs: np.ndarray
    xmap: DomainMap = IDENTITY_MAP

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if a.ndim != 1 or a.size < 1:
            raise ValueError("coefficients must form a non-empty 1-D array")
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "coeffs", a)

    @property
    def n(self) -> int:
        return self.coeffs.size


def residual(gamma, terms, coeffs) -> np.ndarray:
    """Error vector delta = gamma - sum_j a_j tau_j."""
    g = np.atleast_1d(np.asarray(gamma, dtype=float))
    a = np.atleast_1d(np.asarray(coeffs, dtype=float))
    rows = [t.components if isinstance(t, TermVector) else np.asarray(t, dtype=float) for t in terms]
    if len(rows) != a.size:
        raise ValueError(f"{len(rows)} term vectors but {a.size} coefficients")
    for r in rows:
        if r.shape != g.shape:
            raise ValueError("term vectors and gamma must share dimension")
    return g - a @ np.array(rows)


def _norms(delta: np.ndarray) -> tuple[float, float]:
    return float(np.abs(delta).max()), float(np.linalg.norm(delta))


def cvb_interpolate(samples: SampleSet1D, config: FitConfig, xmap: DomainMap = IDENTITY_MAP):
    """Exact fit through projections of the error vector on orthogonal components.

    Each step j projects the current error vector on o_j and distributes the
    increment over the original coefficients via the q triangle, so the fit of
    all earlier terms is preserved exactly.  With max_terms equal to the sample
    count this interpolates the data.  epsilon only feeds the converged flag,
    and extra_sweeps is ignored: the schedule is a single fixed pass.
    """
    n = config.max_terms
    if n > samples.m:
        raise ValueError(f"max_terms={n} exceeds sample count m={samples.m}")
    tau = cheb_columns(samples.x, n).T  # row j is tau_j
    oset = orthogonalize(tau)
    for j in oset.retained():
        if not np.all(np.isfinite(oset.ortho[j])):
            raise FitError(f"orthogonal component of term {j} is not finite")

    gamma = samples.y
    a = np.zeros(n)
    trace = []
    for j in range(n):
        if j in oset.skipped:
            continue
        delta = gamma - a @ tau
        o_j = oset.ortho[j]
        oinc = float((o_j @ delta) / (o_j @ o_j))
        a[: j + 1] += oinc * oset.q[j, : j + 1]
        delta = gamma - a @ tau
        max_abs, l2 = _norms(delta)
        trace.append(
            TraceStep(term=j, kind="visit", increment=oinc,
                      max_abs_residual=max_abs, l2_residual=l2,
                      coeffs=tuple(float(c) for c in a))
        )

    final_max = float(np.abs(gamma - a @ tau).max())
    report = FitReport(
        trace=tuple(trace),
        terms_used=int(np.count_nonzero(a)),
        converged=final_max <= config.epsilon,
        skipped=tuple(sorted(oset.skipped)),
    )
    return ChebModel1D(coeffs=a, xmap=xmap), report


def projection_sweeps(tau, gamma, config, schedule, revisits, skipped, labels=None):
    """Shared visit/revisit engine for both approximation fitters.

    ``schedule`` lists row positions of ``tau`` in visit order and
    ``revisits[t]`` the positions revisited after visiting t, already in
    reverse preference order.  ``labels`` maps positions to trace labels;
    when omitted the trace also carries coefficient snapshots (curve case).
    The error vector is recomputed from scratch after every coefficient
    change.  Returns (coefficients, trace, converged).
    """
    a = np.zeros(tau.shape[0])
    trace = []

    def apply(t, kind):
        delta = gamma - a @ tau
        inc = float((tau[t] @ delta) / (tau[t] @ tau[t]))
        a[t] += inc
        delta = gamma - a @ tau
        max_abs, l2 = _norms(delta)
        trace.append(
            TraceStep(
                term=t if labels is None else labels[t],
                kind=kind,
                increment=inc,
                max_abs_residual=max_abs,
                l2_residual=l2,
                coeffs=tuple(float(c) for c in a) if labels is None else None,
            )
        )
        return max_abs

    max_abs = float(np.abs(gamma).max())
    for _ in range(config.extra_sweeps + 1):
        if max_abs <= config.epsilon:
            break
        for t in schedule:
            if max_abs <= config.epsilon:
                break
            if t in skipped:
                continue
            max_abs = apply(t, "visit")
            for k in revisits[t]:
                max_abs = apply(k, "revisit")
    return a, trace, max_abs <= config.epsilon


def cvb_approximate(samples: SampleSet1D, config: FitConfig, xmap: DomainMap = IDENTITY_MAP):
    """Shape-first fit by projecting the error vector on raw term vectors.

    Terms are visited in order of increasing degree.  Visiting tau_j applies
    a_j += (tau_j . delta)/(tau_j . tau_j); afterwards every earlier term is
    revisited with the same update, in reverse order so the most preferred
    term is refreshed last.  The loop stops once the max-abs residual reaches
    epsilon or the schedule is exhausted; running out of terms is reported,
    not raised.
    """
    n = config.max_terms
    tau = cheb_columns(samples.x, n).T
    norm2 = np.einsum("ij,ij->i", tau, tau)
    skipped = frozenset(int(j) for j in np.flatnonzero(norm2 <= DEGENERATE_TERM_REL * samples.m))

    schedule = list(range(n))
    revisits = {j: [k for k in range(j - 1, -1, -1) if k not in skipped] for j in schedule}
    a, trace, converged = projection_sweeps(tau, samples.y, config, schedule, revisits, skipped)
    report = FitReport(
        trace=tuple(trace),
        terms_used=int(np.count_nonzero(a)),
        converged=converged,
        skipped=tuple(sorted(skipped)),
    )
    return ChebModel1D(coeffs=a, xmap=xmap), report


def eval_model_1d(model: ChebModel1D, x):
    """Evaluate the fitted series at raw coordinates (scalar or array).

    Points outside the model's source interval are still evaluated but flag
    an ExtrapolationWarning.
    """
    x_arr = np.asarray(x, dtype=float)
    warn_if_extrapolating(model.xmap, x_arr, axis="x")
    value = _cheb.chebval(model.xmap.forward(x_arr), model.coeffs)
    return float(value) if np.ndim(x) == 0 else value
