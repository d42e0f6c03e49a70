"""Static figures for census runs (matplotlib, Agg backend)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from mpl_toolkits.mplot3d.art3d import Poly3DCollection  # noqa: E402

_FACE = "#9ecae1"
_FACE_SELF = "#fdae6b"


def _axes_equal(ax, pts: np.ndarray) -> None:
    centre = pts.mean(axis=0)
    r = np.max(np.linalg.norm(pts - centre, axis=1))
    for set_lim, c in zip((ax.set_xlim, ax.set_ylim, ax.set_zlim), centre):
        set_lim(c - r, c + r)
    ax.set_box_aspect((1, 1, 1))


def draw_embedding(ax, emb, colour: str = _FACE, title: str | None = None) -> None:
    verts = sorted(emb.surface.vertices)
    idx = {v: i for i, v in enumerate(verts)}
    P = emb.array(verts)
    tris = [[P[idx[u]] for u in f] for f in emb.surface.faces]
    ax.add_collection3d(Poly3DCollection(tris, facecolor=colour, edgecolor="#333333", linewidth=0.4, alpha=0.9))
    _axes_equal(ax, P)
    ax.set_axis_off()
    if title:
        ax.set_title(title, fontsize=8)


def render_embedding(emb, path, title: str | None = None, colour: str = _FACE) -> Path:
    fig = plt.figure(figsize=(4, 4))
    ax = fig.add_subplot(projection="3d")
    draw_embedding(ax, emb, colour, title)
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def length_scatter(records, path, title: str) -> Path:
    """Normalised length pairs (b/a, c/a) of census records, by self-intersection."""
    fig, ax = plt.subplots(figsize=(4.5, 4))
    for flag, colour, label in ((True, _FACE_SELF, "self-intersecting"), (False, "#3182bd", "embedded")):
        pts = [r.lengths.normalised()[1:] for r in records if r.self_intersecting == flag]
        if pts:
            arr = np.array([[float(b), float(c)] for b, c in pts])
            ax.scatter(arr[:, 0], arr[:, 1], s=22, c=colour, label=f"{label} ({len(pts)})", edgecolors="k", lw=0.3)
    ax.set_xlabel("middle / shortest length")
    ax.set_ylabel("longest / shortest length")
    ax.set_title(title, fontsize=9)
    if records:
        ax.legend(fontsize=7, frameon=False)
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def gallery(records, path, title: str, max_items: int = 12) -> Path:
    """Grid of rendered tori."""
    items = list(records)[:max_items]
    n = max(len(items), 1)
    cols = min(4, n)
    rows = (n + cols - 1) // cols
    fig = plt.figure(figsize=(3 * cols, 3 * rows))
    for i, r in enumerate(items):
        ax = fig.add_subplot(rows, cols, i + 1, projection="3d")
        lens = ", ".join(f"{float(t):.4f}" for t in r.lengths.normalised())
        draw_embedding(ax, r.embedding, _FACE_SELF if r.self_intersecting else _FACE, f"({lens})")
    fig.suptitle(title, fontsize=10)
    path = Path(path)
    fig.savefig(path, dpi=110, bbox_inches="tight")
    plt.close(fig)
    return path
