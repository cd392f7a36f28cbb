"""Concrete problem instantiations: hinge-loss SVM and intersection of ellipsoids.

Both problems expose ``objective`` / ``subgradient`` oracles consumable by the
solvers, carry enough structure to build their certified polynomial-norm
reference functions, and evaluate the closed-form iteration budgets that
guarantee an eps-accurate run from a known (or estimated) minimizer.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    NumericalFailureError,
    ParseError,
)
from .geometry import PolyNormReference, as_vector, reference_from_growth_polynomial

__all__ = [
    "SvmInstance",
    "IepInstance",
    "svm_objective",
    "svm_full_subgradient",
    "svm_stochastic_subgradient",
    "svm_reference",
    "svm_radius_bound",
    "svm_iteration_budget",
    "iep_objective",
    "iep_subgradient",
    "iep_constants",
    "iep_reference",
    "iep_iteration_budget",
    "parse_libsvm",
    "generate_svm",
    "generate_iep",
    "generate_instance",
    "instance_to_dict",
    "instance_from_dict",
]


def _frozen(arr):
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SvmInstance:
    """Soft-margin SVM data: feature rows ``w_i``, labels in {-1, +1}, ridge weight."""

    features: np.ndarray
    labels: np.ndarray
    lam: float

    def __post_init__(self):
        feats = _frozen(self.features)
        labs = _frozen(self.labels)
        if feats.ndim != 2 or feats.shape[0] < 1 or feats.shape[1] < 1:
            raise InvalidInputError(f"features must be a nonempty 2-D matrix, got shape {feats.shape}")
        if not np.all(np.isfinite(feats)):
            raise InvalidInputError("features contain non-finite entries")
        if labs.shape != (feats.shape[0],):
            raise DimensionMismatchError(
                f"{feats.shape[0]} feature rows but labels have shape {labs.shape}"
            )
        if not np.all(np.isin(labs, (-1.0, 1.0))):
            raise InvalidInputError("labels must all be -1 or +1")
        lam = float(self.lam)
        if not math.isfinite(lam) or lam <= 0.0:
            raise InvalidInputError(f"lambda must be positive, got {self.lam}")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "lam", lam)
        # cached: label-signed features and per-row norms
        object.__setattr__(self, "_signed", _frozen(labs[:, None] * feats))
        object.__setattr__(self, "_row_norms", _frozen(np.linalg.norm(feats, axis=1)))

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def dim(self):
        return self.features.shape[1]

    @property
    def index_count(self):
        return self.features.shape[0]

    def _check_dim(self, x):
        if x.shape != (self.dim,):
            raise DimensionMismatchError(f"x has dimension {x.size}, instance has {self.dim}")

    def objective(self, x):
        return svm_objective(self, x)

    def subgradient(self, x):
        return svm_full_subgradient(self, x)

    def stochastic_subgradient(self, x, rng):
        return svm_stochastic_subgradient(self, x, rng)

    def index_subgradients(self, x):
        """Matrix whose row j is the index-j stochastic oracle output at x."""
        xv = as_vector(x)
        self._check_dim(xv)
        margins = 1.0 - self._signed @ xv
        hinge_part = np.where((margins > 0.0)[:, None], -self._signed, 0.0)
        return self.lam * xv + hinge_part

    def index_subgradient(self, x, j):
        if not 0 <= j < self.index_count:
            raise InvalidInputError(f"sample index {j} out of range [0, {self.index_count})")
        return self.index_subgradients(x)[j]


def svm_objective(inst, x):
    """``(1/n) sum_i max(0, 1 - y_i <x, w_i>) + (lam/2) ||x||^2``."""
    xv = as_vector(x)
    inst._check_dim(xv)
    margins = 1.0 - inst._signed @ xv
    hinge = np.maximum(margins, 0.0)
    return float(hinge.mean()) + 0.5 * inst.lam * float(xv @ xv)


def svm_full_subgradient(inst, x):
    """Exact subgradient: the mean of the per-index oracle outputs.

    A hinge term sitting exactly at margin 1 contributes zero (the inactive
    branch), which makes the oracle deterministic at kinks.
    """
    return inst.index_subgradients(x).mean(axis=0)


def svm_stochastic_subgradient(inst, x, rng):
    """Oracle output for a uniformly drawn sample index; unbiased by construction."""
    j = int(rng.integers(inst.index_count))
    return inst.index_subgradients(x)[j]


def svm_reference(inst):
    """Certified reference for the SVM: growth coefficients
    ``[mean ||w||^2, 2 lam mean ||w||, lam^2]`` with G = 1."""
    norms = inst._row_norms
    a0 = float(np.mean(norms * norms))
    a1 = 2.0 * inst.lam * float(np.mean(norms))
    a2 = inst.lam * inst.lam
    return reference_from_growth_polynomial([a0, a1, a2])


def svm_radius_bound(inst):
    """Radius of a ball around the origin certain to contain the minimizer:
    ``min(mean ||w|| / lam, sqrt(2 / lam))``."""
    return min(float(np.mean(inst._row_norms)) / inst.lam, math.sqrt(2.0 / inst.lam))


def _poly_budget(a0, a1, a2, x_star, x0, eps):
    """Iteration count from the degree-2 growth data and the Bregman upper
    bounds on ``D_h(x*, x0)``: ``ceil(. / (6 eps^2)) - 1``, floored at 0."""
    e = float(eps)
    if not math.isfinite(e) or e <= 0.0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    xs = as_vector(x_star, "x_star")
    x0v = as_vector(x0, "x0")
    if xs.shape != x0v.shape:
        raise DimensionMismatchError(f"x_star has dimension {xs.size}, x0 has dimension {x0v.size}")
    d2 = float(np.sum((xs - x0v) ** 2))
    ns = math.sqrt(float(xs @ xs))
    n0 = math.sqrt(float(x0v @ x0v))
    nsum2 = float(np.sum((xs + x0v) ** 2))
    term = 3.0 * a2 * (nsum2 + 2.0 * n0 * n0) + 4.0 * a1 * (ns + 2.0 * n0) + 6.0 * a0
    return max(math.ceil(d2 * term / (6.0 * e * e)) - 1, 0)


def svm_iteration_budget(inst, x_star, x0, eps):
    """Budget guaranteeing ``E[f(x_bar^k)] - f* <= eps`` for the stochastic
    solver with constant steps ``t_i = eps`` (G = 1)."""
    norms = inst._row_norms
    a0 = float(np.mean(norms * norms))
    a1 = 2.0 * inst.lam * float(np.mean(norms))
    a2 = inst.lam * inst.lam
    if len(x_star := as_vector(x_star, "x_star")) != inst.dim:
        raise DimensionMismatchError(f"x_star has dimension {len(x_star)}, instance has {inst.dim}")
    return _poly_budget(a0, a1, a2, x_star, x0, eps)


@dataclass(frozen=True, eq=False)
class IepInstance:
    """Pointwise max of convex quadratics ``(1/2) x'A_i x + b_i'x + c_i``.

    ``f(x) <= 0`` certifies membership in every ellipsoid, so minimizing f
    solves the intersection problem.
    """

    quadratics: tuple

    def __post_init__(self):
        quads = []
        for idx, (A, b, c) in enumerate(self.quadratics):
            Am = _frozen(A)
            bv = _frozen(b)
            cv = float(c)
            if Am.ndim != 2 or Am.shape[0] != Am.shape[1]:
                raise InvalidInputError(f"quadratic {idx}: A must be square, got shape {Am.shape}")
            m = Am.shape[0]
            if bv.shape != (m,):
                raise DimensionMismatchError(
                    f"quadratic {idx}: A is {m}x{m} but b has shape {bv.shape}"
                )
            if not (np.all(np.isfinite(Am)) and np.all(np.isfinite(bv)) and math.isfinite(cv)):
                raise InvalidInputError(f"quadratic {idx} contains non-finite entries")
            scale = max(1.0, float(np.abs(Am).max()))
            if float(np.abs(Am - Am.T).max()) > 1e-12 * scale:
                raise InvalidInputError(f"quadratic {idx}: A is not symmetric within tolerance")
            eigs = np.linalg.eigvalsh(Am)
            spectral = float(np.abs(eigs).max()) if m else 0.0
            if eigs.size and float(eigs.min()) < -1e-10 * max(spectral, 1e-300):
                raise InvalidInputError(
                    f"quadratic {idx}: A has eigenvalue {eigs.min():.3e}, not PSD"
                )
            quads.append((Am, bv, cv))
        if not quads:
            raise InvalidInputError("need at least one quadratic")
        m = quads[0][0].shape[0]
        if any(q[0].shape[0] != m for q in quads):
            raise DimensionMismatchError("all quadratics must share one dimension")
        object.__setattr__(self, "quadratics", tuple(quads))
        object.__setattr__(self, "_A_stack", _frozen(np.stack([q[0] for q in quads])))
        object.__setattr__(self, "_b_stack", _frozen(np.stack([q[1] for q in quads])))
        object.__setattr__(self, "_c_stack", _frozen(np.array([q[2] for q in quads])))

    @property
    def n_ellipsoids(self):
        return len(self.quadratics)

    @property
    def dim(self):
        return self._A_stack.shape[1]

    def _check_dim(self, x):
        if x.shape != (self.dim,):
            raise DimensionMismatchError(f"x has dimension {x.size}, instance has {self.dim}")

    def _values_and_grads(self, xv):
        Ax = self._A_stack @ xv
        vals = 0.5 * (Ax @ xv) + self._b_stack @ xv + self._c_stack
        return vals, Ax

    def objective(self, x):
        return iep_objective(self, x)

    def subgradient(self, x):
        return iep_subgradient(self, x)


def iep_objective(inst, x):
    """``max_i (1/2) x'A_i x + b_i'x + c_i``."""
    xv = as_vector(x)
    inst._check_dim(xv)
    vals, _ = inst._values_and_grads(xv)
    return float(vals.max())


def iep_subgradient(inst, x):
    """Gradient of the lowest-index quadratic attaining the max (Danskin)."""
    xv = as_vector(x)
    inst._check_dim(xv)
    vals, Ax = inst._values_and_grads(xv)
    i = int(np.argmax(vals))
    return Ax[i] + inst._b_stack[i]


def _spectral_norm(A, rel_tol=1e-10, max_iter=10000):
    """Spectral norm of a symmetric matrix: eigensolve up to 64x64, power
    iteration with the given relative tolerance above."""
    m = A.shape[0]
    if m <= 64:
        return float(np.abs(np.linalg.eigvalsh(A)).max())
    rng = np.random.default_rng(0)
    v = rng.standard_normal(m)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = A @ v
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(nw - est) <= rel_tol * nw:
            return nw
        est = nw
    raise NumericalFailureError(
        f"power iteration did not converge within {max_iter} iterations", iteration=max_iter
    )


def iep_constants(inst):
    """Growth constants ``(sigma, rho, gamma)``: max squared spectral norm,
    twice the largest ``||A_i b_i||``, and the largest ``||b_i||^2``."""
    sigma = max(_spectral_norm(A) ** 2 for A, _, _ in inst.quadratics)
    rho = 2.0 * max(float(np.linalg.norm(A @ b)) for A, b, _ in inst.quadratics)
    gamma = max(float(b @ b) for _, b, _ in inst.quadratics)
    return sigma, rho, gamma


def iep_reference(inst):
    """Certified reference for the IEP: growth coefficients
    ``[gamma, rho, sigma]`` with M = 1."""
    sigma, rho, gamma = iep_constants(inst)
    return reference_from_growth_polynomial([gamma, rho, sigma])


def iep_iteration_budget(inst, x_star, x0, eps):
    """Budget guaranteeing ``f(x_bar^k) - f(x_star) <= eps`` for the
    deterministic solver with constant steps ``t_i = eps`` (M = 1)."""
    sigma, rho, gamma = iep_constants(inst)
    if len(x_star := as_vector(x_star, "x_star")) != inst.dim:
        raise DimensionMismatchError(f"x_star has dimension {len(x_star)}, instance has {inst.dim}")
    return _poly_budget(gamma, rho, sigma, x_star, x0, eps)


def parse_libsvm(text):
    """Parse LIBSVM-format text into a dense feature matrix and labels.

    Each nonempty line is ``<label> <index>:<value> ...`` with 1-based,
    strictly increasing indices; labels must parse to exactly -1 or +1.
    Returns ``(features, labels)``; the column count is the largest index
    seen anywhere, and missing entries are zero.
    """
    rows = []
    labels = []
    width = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise ParseError(f"label {tokens[0]!r} is not a number", line=lineno) from None
        if label not in (-1.0, 1.0):
            raise ParseError(f"label must be +1 or -1, got {tokens[0]!r}", line=lineno)
        entries = []
        last_idx = 0
        for tok in tokens[1:]:
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ParseError(f"expected <index>:<value>, got {tok!r}", line=lineno)
            try:
                idx = int(idx_s)
                val = float(val_s)
            except ValueError:
                raise ParseError(f"bad feature entry {tok!r}", line=lineno) from None
            if idx < 1:
                raise ParseError(f"feature index {idx} must be >= 1", line=lineno)
            if idx <= last_idx:
                raise ParseError(f"feature indices must be strictly increasing at {tok!r}", line=lineno)
            if not math.isfinite(val):
                raise ParseError(f"non-finite feature value in {tok!r}", line=lineno)
            last_idx = idx
            entries.append((idx, val))
        rows.append(entries)
        labels.append(label)
        width = max(width, last_idx)
    if not rows:
        raise ParseError("no samples found (empty input)")
    if width == 0:
        raise ParseError("no feature indices found in any line")
    features = np.zeros((len(rows), width))
    for r, entries in enumerate(rows):
        for idx, val in entries:
            features[r, idx - 1] = val
    return features, np.array(labels)


def generate_svm(n, m, lam, seed, label_noise=0.0, feature_scale=1.0):
    """Random SVM instance with labels planted from a random hyperplane.

    ``label_noise`` flips each planted label independently with the given
    probability.  Fixed seeds reproduce the instance exactly.
    """
    if n < 1 or m < 1:
        raise InvalidInputError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    if not 0.0 <= label_noise <= 1.0:
        raise InvalidInputError(f"label_noise must lie in [0, 1], got {label_noise}")
    rng = np.random.default_rng(seed)
    features = feature_scale * rng.standard_normal((n, m))
    direction = rng.standard_normal(m)
    direction /= np.linalg.norm(direction)
    labels = np.where(features @ direction >= 0.0, 1.0, -1.0)
    if label_noise > 0.0:
        flips = rng.random(n) < label_noise
        labels = np.where(flips, -labels, labels)
    return SvmInstance(features, labels, lam)


def generate_iep(
    n,
    m,
    seed,
    eig_range=(0.0, 2.0),
    b_scale=1.0,
    c_range=(-1.0, 1.0),
    feasible_point=None,
    margin=0.0,
):
    """Random IEP instance with ``A_i = Q_i D_i Q_i^T`` (PSD by construction).

    When ``feasible_point`` is given, every ``c_i`` is shifted so that the
    point attains value at most ``-margin`` in each quadratic, guaranteeing
    ``f* <= -margin <= 0`` for ``margin >= 0``.
    """
    if n < 1 or m < 1:
        raise InvalidInputError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    lo, hi = float(eig_range[0]), float(eig_range[1])
    if lo < 0.0 or hi < lo:
        raise InvalidInputError(f"eig_range must satisfy 0 <= lo <= hi, got {eig_range}")
    if margin < 0.0:
        raise InvalidInputError(f"margin must be >= 0, got {margin}")
    rng = np.random.default_rng(seed)
    point = None if feasible_point is None else as_vector(feasible_point, "feasible_point")
    if point is not None and point.size != m:
        raise DimensionMismatchError(f"feasible_point has dimension {point.size}, expected {m}")
    quads = []
    for _ in range(n):
        q, _ = np.linalg.qr(rng.standard_normal((m, m)))
        d = rng.uniform(lo, hi, m)
        A = (q * d) @ q.T
        A = 0.5 * (A + A.T)
        b = b_scale * rng.standard_normal(m)
        c = float(rng.uniform(*c_range))
        if point is not None:
            quad_term = 0.5 * float(point @ (A @ point))
            lin_term = float(b @ point)
            c = c - (quad_term + lin_term + c) - margin
            # pad below -margin so the guarantee survives rounding under any
            # evaluation order of the objective
            c -= 1e-12 * (1.0 + abs(quad_term) + abs(lin_term) + abs(c) + margin)
        quads.append((A, b, c))
    return IepInstance(tuple(quads))


def generate_instance(kind, params, seed):
    """Dispatch to :func:`generate_svm` or :func:`generate_iep` by kind."""
    builders = {"svm": generate_svm, "iep": generate_iep}
    if kind not in builders:
        raise InvalidInputError(f"unknown instance kind {kind!r}; expected 'svm' or 'iep'")
    try:
        return builders[kind](seed=seed, **dict(params))
    except TypeError as e:
        raise InvalidInputError(f"bad parameters for {kind} generator: {e}") from None


def instance_to_dict(inst):
    """JSON-ready document describing an instance (matrices row-major)."""
    if isinstance(inst, SvmInstance):
        return {
            "kind": "svm",
            "n": inst.n_samples,
            "m": inst.dim,
            "features": inst.features.tolist(),
            "labels": inst.labels.tolist(),
            "lambda": inst.lam,
        }
    if isinstance(inst, IepInstance):
        return {
            "kind": "iep",
            "n": inst.n_ellipsoids,
            "m": inst.dim,
            "quadratics": [
                {"A": A.tolist(), "b": b.tolist(), "c": c} for A, b, c in inst.quadratics
            ],
        }
    raise InvalidInputError(f"cannot serialize object of type {type(inst).__name__}")


def instance_from_dict(doc):
    """Inverse of :func:`instance_to_dict`."""
    try:
        kind = doc["kind"]
        if kind == "svm":
            return SvmInstance(doc["features"], doc["labels"], doc["lambda"])
        if kind == "iep":
            return IepInstance(tuple((q["A"], q["b"], q["c"]) for q in doc["quadratics"]))
    except (KeyError, TypeError) as e:
        raise InvalidInputError(f"malformed instance document: {e}") from None
    raise InvalidInputError(f"unknown instance kind {kind!r}")
