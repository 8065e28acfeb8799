"""Camera calibration from point correspondences, point mapping, image warping.

A calibration holds four fitted surfaces: pixel (u, v) to world X and Y
(forward), and world (X, Y) back to pixel u and v (inverse).  The inverse
direction is fitted from the swapped correspondences rather than obtained by
inverting the forward polynomials.  Pixels in, millimetres out; units are
documentation only and never converted internally.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .basis import DomainMap, auto_map
from .fit1d import FitConfig, FitError
from .fit2d import ChebModel2D, SampleSet2D, TermIndex2D, cvb_approximate_2d, eval_model_2d, visit_order

SUBFIT_NAMES = ("fwd_x", "fwd_y", "inv_u", "inv_v")
MODEL_VERSION = 1


class ModelParseError(ValueError):
    """A calibration document is malformed."""


class ModelVersionError(ModelParseError):
    """A calibration document declares an unsupported version."""


@dataclass(frozen=True)
class Correspondence:
    """One key point: pixel position (u, v) and its world position (X, Y) in mm."""

    u: float
    v: float
    X: float
    Y: float

    def __post_init__(self):
        for name in ("u", "v", "X", "Y"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"correspondence field {name} must be finite")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class SubfitStats:
    terms_used: int
    converged: bool
    max_abs_residual: float
    l2_residual: float


@dataclass(frozen=True)
class CalibrationMeta:
    epsilon: float
    degree_bound: int
    stats: Optional[dict] = None  # name -> SubfitStats, absent on loaded models


@dataclass(frozen=True)
class CalibrationModel:
    fwd_x: ChebModel2D
    fwd_y: ChebModel2D
    inv_u: Optional[ChebModel2D]
    inv_v: Optional[ChebModel2D]
    meta: CalibrationMeta


def _distinct_pairs(a: np.ndarray, b: np.ndarray, what: str) -> None:
    pairs = set()
    for pa, pb in zip(a.tolist(), b.tolist()):
        if (pa, pb) in pairs:
            raise ValueError(f"duplicate {what} pair ({pa}, {pb})")
        pairs.add((pa, pb))


def calibrate(pairs, config: FitConfig, inverse_config: Optional[FitConfig] = None) -> CalibrationModel:
    """Fit the four calibration surfaces from point correspondences.

    ``config`` drives the forward (pixel to world) fits; ``inverse_config``
    the world-to-pixel fits, defaulting to ``config``.  Forward residual
    targets are in world units, inverse ones in pixels.
    """
    pairs = list(pairs)
    if len(pairs) < 3:
        raise ValueError(f"need at least 3 correspondences, got {len(pairs)}")
    inverse_config = inverse_config or config
    u = np.array([p.u for p in pairs])
    v = np.array([p.v for p in pairs])
    X = np.array([p.X for p in pairs])
    Y = np.array([p.Y for p in pairs])
    _distinct_pairs(u, v, "pixel (u, v)")
    _distinct_pairs(X, Y, "world (X, Y)")

    umap, vmap = auto_map(u), auto_map(v)
    xmap, ymap = auto_map(X), auto_map(Y)
    nu, nv = umap.forward(u), vmap.forward(v)
    nx, ny = xmap.forward(X), ymap.forward(Y)

    jobs = {
        "fwd_x": (nu, nv, X, umap, vmap, config),
        "fwd_y": (nu, nv, Y, umap, vmap, config),
        "inv_u": (nx, ny, u, xmap, ymap, inverse_config),
        "inv_v": (nx, ny, v, xmap, ymap, inverse_config),
    }
    models = {}
    stats = {}
    for name, (sx, sy, sz, mx, my, cfg) in jobs.items():
        samples = SampleSet2D(x=sx, y=sy, z=sz)
        model, report = cvb_approximate_2d(samples, cfg, xmap=mx, ymap=my)
        if not model.coeffs and np.abs(sz).max() > 0:
            raise FitError(f"sub-fit {name} is degenerate: no usable terms")
        last = report.trace[-1] if report.trace else None
        models[name] = model
        stats[name] = SubfitStats(
            terms_used=report.terms_used,
            converged=report.converged,
            max_abs_residual=last.max_abs_residual if last else float(np.abs(sz).max()),
            l2_residual=last.l2_residual if last else float(np.linalg.norm(sz)),
        )

    meta = CalibrationMeta(epsilon=config.epsilon, degree_bound=config.max_terms, stats=stats)
    return CalibrationModel(meta=meta, **models)


def map_point(model: CalibrationModel, u: float, v: float):
    """Pixel (u, v) to world (X, Y) through the forward fits."""
    return (
        eval_model_2d(model.fwd_x, u, v),
        eval_model_2d(model.fwd_y, u, v),
    )


def map_world(model: CalibrationModel, X: float, Y: float):
    """World (X, Y) back to pixel (u, v) through the inverse fits."""
    if model.inv_u is None or model.inv_v is None:
        raise ValueError("model has no inverse fits")
    return (
        eval_model_2d(model.inv_u, X, Y),
        eval_model_2d(model.inv_v, X, Y),
    )


@dataclass(frozen=True)
class WarpSpec:
    """Output raster geometry: size plus the world window it covers.

    ``window`` is (x0, x1, y0, y1) in world units; output row 0 runs along
    y0 and column 0 along x0, with pixel centers offset by half a pixel.
    """

    width: int
    height: int
    window: tuple

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("output size must be positive")
        x0, x1, y0, y1 = (float(w) for w in self.window)
        if not (x1 > x0 and y1 > y0):
            raise ValueError(f"degenerate world window {self.window}")
        object.__setattr__(self, "window", (x0, x1, y0, y1))


def warp_image(model: CalibrationModel, image: np.ndarray, out_spec: WarpSpec, fill=0) -> np.ndarray:
    """Resample ``image`` onto the world window using the inverse fits.

    Every output pixel center is mapped world -> source pixel and sampled
    nearest-neighbor; source positions outside the input raster take the
    fill value (scalar for grayscale, scalar or RGB triple for color).
    """
    if model.inv_u is None or model.inv_v is None:
        raise ValueError("warping requires a model with inverse fits")
    image = np.asarray(image)
    x0, x1, y0, y1 = out_spec.window
    wx = x0 + (np.arange(out_spec.width) + 0.5) * (x1 - x0) / out_spec.width
    wy = y0 + (np.arange(out_spec.height) + 0.5) * (y1 - y0) / out_spec.height
    wxx, wyy = np.meshgrid(wx, wy)
    u = eval_model_2d(model.inv_u, wxx, wyy)
    v = eval_model_2d(model.inv_v, wxx, wyy)
    # nearest neighbor: pixel (r, c) covers [c, c+1) x [r, r+1)
    su = np.floor(u).astype(np.int64)
    sv = np.floor(v).astype(np.int64)
    in_h, in_w = image.shape[:2]
    valid = (su >= 0) & (su < in_w) & (sv >= 0) & (sv < in_h)

    shape = (out_spec.height, out_spec.width) + image.shape[2:]
    out = np.empty(shape, dtype=image.dtype)
    out[...] = fill
    out[valid] = image[sv[valid], su[valid]]
    return out


def _fmt(value: float) -> str:
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"cannot serialize non-finite value {value!r}")
    return format(value, ".17g")


def save_model(model: CalibrationModel) -> str:
    """Serialize a calibration to its canonical JSON document.

    Output is byte-stable: fixed key order, terms sorted by visit order,
    every real rendered with 17 significant digits (which round-trips
    float64 exactly).
    """
    for name in SUBFIT_NAMES:
        if getattr(model, name) is None:
            raise ValueError(f"cannot serialize model without sub-fit {name}")
    n = model.meta.degree_bound
    if any(getattr(model, name).degree_bound != n for name in SUBFIT_NAMES):
        raise ValueError("sub-models disagree on the degree bound")
    position = {t: p for p, t in enumerate(visit_order(n))}

    lines = ["{"]
    lines.append(f'  "version": {MODEL_VERSION},')
    lines.append(f'  "epsilon": {_fmt(model.meta.epsilon)},')
    lines.append(f'  "degree_bound": {n},')
    for name in SUBFIT_NAMES:
        sub = getattr(model, name)
        lines.append(f'  "{name}": {{')
        lines.append(f'    "xmap": [{_fmt(sub.xmap.lo)}, {_fmt(sub.xmap.hi)}],')
        lines.append(f'    "ymap": [{_fmt(sub.ymap.lo)}, {_fmt(sub.ymap.hi)}],')
        terms = sorted(sub.coeffs.items(), key=lambda kv: position[kv[0]])
        if terms:
            lines.append('    "terms": [')
            body = [f"      [{t.i}, {t.j}, {_fmt(c)}]" for t, c in terms]
            lines.append(",\n".join(body))
            lines.append("    ]")
        else:
            lines.append('    "terms": []')
        lines.append("  }," if name != SUBFIT_NAMES[-1] else "  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _require(record: dict, field: str, context: str):
    if field not in record:
        raise ModelParseError(f"missing field {field!r} in {context}")
    return record[field]


def _load_map(value, context: str) -> DomainMap:
    if not (isinstance(value, list) and len(value) == 2):
        raise ModelParseError(f"{context} must be a [lo, hi] pair")
    try:
        return DomainMap(float(value[0]), float(value[1]))
    except (TypeError, ValueError) as exc:
        raise ModelParseError(f"bad {context}: {exc}") from exc


def load_model(document: str) -> CalibrationModel:
    """Parse a calibration document produced by ``save_model``."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"invalid document at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ModelParseError("document root must be an object")
    version = _require(doc, "version", "document")
    if type(version) is not int or version != MODEL_VERSION:
        raise ModelVersionError(f"unsupported document version {version!r}")
    epsilon = float(_require(doc, "epsilon", "document"))
    degree_bound = _require(doc, "degree_bound", "document")
    if type(degree_bound) is not int or degree_bound < 1:
        raise ModelParseError(f"degree_bound must be a positive integer, got {degree_bound!r}")

    models = {}
    for name in SUBFIT_NAMES:
        record = _require(doc, name, "document")
        if not isinstance(record, dict):
            raise ModelParseError(f"sub-model {name!r} must be an object")
        xmap = _load_map(_require(record, "xmap", name), f"{name}.xmap")
        ymap = _load_map(_require(record, "ymap", name), f"{name}.ymap")
        raw_terms = _require(record, "terms", name)
        if not isinstance(raw_terms, list):
            raise ModelParseError(f"{name}.terms must be a list")
        coeffs = {}
        for entry in raw_terms:
            if not (isinstance(entry, list) and len(entry) == 3):
                raise ModelParseError(f"{name}.terms entries must be [i, j, coefficient]")
            i, j, c = entry
            if type(i) is not int or type(j) is not int:
                raise ModelParseError(f"{name}.terms indices must be integers, got {entry!r}")
            key = TermIndex2D(i, j)
            if key in coeffs:
                raise ModelParseError(f"{name}.terms repeats term {key}")
            coeffs[key] = float(c)
        try:
            models[name] = ChebModel2D(coeffs=coeffs, xmap=xmap, ymap=ymap, degree_bound=degree_bound)
        except ValueError as exc:
            raise ModelParseError(f"bad sub-model {name!r}: {exc}") from exc

    meta = CalibrationMeta(epsilon=epsilon, degree_bound=degree_bound, stats=None)
    return CalibrationModel(meta=meta, **models)
