"""2-D projection of the dual embeddings and alignment of the two planes.

The text-space and image-space vector sets are each reduced to 2-D (t-SNE
with cosine distance; classical MDS below five points, where t-SNE is
ill-posed), standardized to a common scale, and the text plane is mapped
onto the image plane with a full Procrustes fit. The node positions the
graph uses are a user-weighted convex combination of the two planes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.manifold import TSNE

_DEGENERATE_EPS = 1e-12


@dataclass(frozen=True)
class Projection2D:
    """Aligned per-image 2-D positions, one row per image."""

    image_ids: tuple[str, ...]
    text_xy: np.ndarray
    image_xy: np.ndarray
    combined_xy: np.ndarray
    alpha: float
    disparity: float  # Procrustes residual of text onto image plane


def tsne_perplexity(n: int) -> float:
    return float(min(30, max(2, (n - 1) // 3)))


def _cosine_distances(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    norms[norms < _DEGENERATE_EPS] = 1.0
    unit = vectors / norms
    d = 1.0 - unit @ unit.T
    np.fill_diagonal(d, 0.0)
    return np.maximum(d, 0.0)


def _classical_mds(distances: np.ndarray) -> np.ndarray:
    """Classical (Torgerson) MDS to 2-D from a distance matrix."""
    n = distances.shape[0]
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ (distances**2) @ j
    eigvals, eigvecs = np.linalg.eigh(b)
    order = np.argsort(eigvals)[::-1][:2]
    vals = np.clip(eigvals[order], 0.0, None)
    coords = eigvecs[:, order] * np.sqrt(vals)
    # Fix eigenvector sign for reproducibility across LAPACK builds.
    for c in range(coords.shape[1]):
        col = coords[:, c]
        nz = np.flatnonzero(np.abs(col) > _DEGENERATE_EPS)
        if nz.size and col[nz[0]] < 0:
            coords[:, c] = -col
    return coords


def standardize(points: np.ndarray) -> np.ndarray:
    """Center and scale to unit RMS radius; all-coincident sets stay put."""
    pts = np.asarray(points, dtype=float)
    centered = pts - pts.mean(axis=0)
    rms = np.sqrt((centered**2).sum(axis=1).mean())
    if rms < _DEGENERATE_EPS:
        return np.zeros_like(centered)
    return centered / rms


def project(vectors: np.ndarray, seed: int, init: np.ndarray | None = None) -> np.ndarray:
    """Reduce high-dimensional vectors to standardized 2-D positions.

    Deterministic for a fixed seed. Fewer than five points fall back to
    classical MDS on the cosine distances; degenerate inputs (all vectors
    identical) collapse to the origin instead of failing. ``init`` seeds
    the t-SNE optimizer, used to keep successive builds of a growing
    session visually stable.
    """
    vectors = np.asarray(vectors, dtype=float)
    n = len(vectors)
    if n == 0:
        return np.zeros((0, 2))
    if n == 1:
        return np.zeros((1, 2))

    distances = _cosine_distances(vectors)
    if distances.max() < 1e-9:
        return np.zeros((n, 2))

    if n < 5:
        return standardize(_classical_mds(distances))

    tsne = TSNE(
        n_components=2,
        metric="cosine",
        perplexity=tsne_perplexity(n),
        random_state=seed,
        init=init if init is not None else "random",
        method="exact" if n <= 300 else "barnes_hut",
    )
    return standardize(tsne.fit_transform(vectors))


def similarity_transform(
    source: np.ndarray, target: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares similarity fit of ``source`` onto ``target``.

    Returns (M, t, disparity) such that ``source @ M.T + t`` is the best
    translate/scale/rotate (reflections allowed) match; the disparity is
    the residual sum of squares after both sets are standardized. A fully
    degenerate source yields the identity with disparity 1.
    """
    src = np.asarray(source, dtype=float)
    tgt = np.asarray(target, dtype=float)
    if src.shape != tgt.shape or len(src) < 2:
        raise ValueError("point sets must have equal shape and >=2 points")

    mu_t = tgt.mean(axis=0)
    t0 = tgt - mu_t
    norm_t = np.linalg.norm(t0)
    if norm_t < _DEGENERATE_EPS:
        raise ValueError("target points are all coincident")

    mu_s = src.mean(axis=0)
    s0 = src - mu_s
    norm_s = np.linalg.norm(s0)
    if norm_s < _DEGENERATE_EPS:
        return np.eye(src.shape[1]), np.zeros(src.shape[1]), 1.0

    s_hat = s0 / norm_s
    t_hat = t0 / norm_t
    u, sigma, vt = np.linalg.svd(t_hat.T @ s_hat)
    rotation = u @ vt
    scale = sigma.sum()
    disparity = float(max(0.0, 1.0 - scale**2))
    matrix = (norm_t * scale / norm_s) * rotation
    offset = mu_t - matrix @ mu_s
    return matrix, offset, disparity


def procrustes_align(
    source: np.ndarray, target: np.ndarray
) -> tuple[np.ndarray, float]:
    """Best similarity transform (translate/scale/rotate, reflections
    allowed) of ``source`` onto ``target``.

    Returns the transformed source in the target's coordinate frame and
    the disparity: the residual sum of squares after both sets are
    standardized (0 for an exact similarity match, at most 1). A fully
    degenerate source maps through unchanged with disparity 1.
    """
    matrix, offset, disparity = similarity_transform(source, target)
    src = np.asarray(source, dtype=float)
    return src @ matrix.T + offset, disparity


def previous_frame_transform(
    points: np.ndarray,
    image_ids: tuple[str, ...],
    previous: dict[str, tuple[float, float]],
) -> tuple[np.ndarray, np.ndarray] | None:
    """Similarity transform fitting the common subset of ``points`` onto
    its previous-frame positions, or None when there is nothing to fit.
    Applying it to a whole frame minimizes node movement between
    successive builds of a growing session; being affine, it commutes
    with the text/image convex combination."""
    common = [i for i, image_id in enumerate(image_ids) if image_id in previous]
    if len(common) < 2:
        return None
    source = points[common]
    target = np.asarray([previous[image_ids[i]] for i in common], dtype=float)
    try:
        matrix, offset, _ = similarity_transform(source, target)
    except ValueError:
        return None
    return matrix, offset


def combine(text_xy: np.ndarray, image_xy: np.ndarray, alpha: float = 0.5) -> np.ndarray:
    """Convex combination alpha*text + (1-alpha)*image, per point."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    text_xy = np.asarray(text_xy, dtype=float)
    image_xy = np.asarray(image_xy, dtype=float)
    if text_xy.shape != image_xy.shape:
        raise ValueError("text and image projections must align")
    return alpha * text_xy + (1.0 - alpha) * image_xy


def project_pair(
    image_ids: tuple[str, ...],
    text_vectors: np.ndarray,
    image_vectors: np.ndarray,
    alpha: float,
    seed: int,
    text_init: np.ndarray | None = None,
    image_init: np.ndarray | None = None,
) -> Projection2D:
    """Project both spaces, align text onto image, and combine.

    The image plane is the anchor: the view is grounded in what was
    generated, and the text plane is fitted onto it.
    """
    text_xy = project(text_vectors, seed, init=text_init)
    image_xy = project(image_vectors, seed + 1, init=image_init)
    disparity = 0.0
    n = len(image_ids)
    if n >= 2 and np.linalg.norm(image_xy - image_xy.mean(axis=0)) > _DEGENERATE_EPS:
        text_xy, disparity = procrustes_align(text_xy, image_xy)
    return Projection2D(
        image_ids=image_ids,
        text_xy=text_xy,
        image_xy=image_xy,
        combined_xy=combine(text_xy, image_xy, alpha),
        alpha=alpha,
        disparity=disparity,
    )
