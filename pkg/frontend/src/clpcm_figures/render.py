"""Render figures from clpcm artifacts.

Three kinds: pie-positions (posterior mean latent positions with pie-chart
membership glyphs and network edges), traces (intercept plus one position
coordinate pre- and post-alignment), model-probs (bar chart of pi(G|Y)).
Output is deterministic SVG for fixed inputs.
"""

from dataclasses import dataclass
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import FancyArrowPatch, Wedge

from .artifacts import Artifacts

KINDS = ("pie-positions", "traces", "model-probs")

matplotlib.rcParams["svg.hashsalt"] = "clpcm-figures"

_COLOURS = ("#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee",
            "#aa3377", "#bbbbbb", "#999944")


@dataclass
class FigureSpec:
    artifacts: Path
    kind: str
    output: Path
    G: int = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; "
                             f"expected one of {KINDS}")
        self.artifacts = Path(self.artifacts)
        self.output = Path(self.output)


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _membership_block(summary, G):
    per_g = summary["per_G"]
    if G is None:
        probs = {int(k): v for k, v in summary["model_probabilities"].items()}
        G = max(probs, key=lambda g: probs[g])
    block = per_g.get(str(G))
    if block is None:
        raise ValueError(f"G={G} has less than 1% posterior mass; "
                         f"available: {sorted(per_g)}")
    return G, block


def _pie_positions(spec: FigureSpec, art: Artifacts):
    summary = art.summary()
    meta = art.metadata()
    G, block = _membership_block(summary, spec.G)
    mean_Z = np.array(block["mean_Z"])
    P = np.array(block["membership"])
    Y = art.adjacency()
    n = mean_Z.shape[0]
    directed = bool(meta["directed"])

    fig, ax = plt.subplots(figsize=(7, 7))
    span = max(mean_Z.max() - mean_Z.min(), 1e-9)
    radius = 0.022 * span
    for i in range(n):
        for j in range(n):
            if i == j or not Y[i, j]:
                continue
            if not directed and j < i:
                continue
            if directed:
                arrow = FancyArrowPatch(mean_Z[i, :2], mean_Z[j, :2],
                                        arrowstyle="-|>", mutation_scale=7,
                                        shrinkA=6, shrinkB=6,
                                        color="0.75", lw=0.6, zorder=1)
                ax.add_patch(arrow)
            else:
                ax.plot(mean_Z[[i, j], 0], mean_Z[[i, j], 1],
                        color="0.75", lw=0.6, zorder=1)
    for i in range(n):
        start = 90.0
        glyph = []
        for g in range(P.shape[1]):
            frac = P[i, g]
            if frac <= 0:
                continue
            wedge = Wedge(mean_Z[i, :2], radius, start,
                          start + 360.0 * frac,
                          facecolor=_COLOURS[g % len(_COLOURS)],
                          edgecolor="black", lw=0.4, zorder=2)
            glyph.append(wedge)
            start += 360.0 * frac
        for k, wedge in enumerate(glyph):
            wedge.set_gid(f"actor-{i + 1}-w{k}" if k else f"actor-{i + 1}")
            ax.add_patch(wedge)
    ax.set_aspect("equal")
    ax.set_xlabel("dimension 1")
    ax.set_ylabel("dimension 2")
    ax.set_title(f"posterior mean positions, G = {G} "
                 f"(mass {block['mass']:.3f})")
    ax.relim()
    ax.autoscale_view()
    _save(fig, spec.output)


def _traces(spec: FigureSpec, art: Artifacts):
    iters, _, betas = art.draws()
    it_raw, Z_raw = art.positions(aligned=False)
    it_al, Z_al = art.positions(aligned=True)
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.5))
    axes[0].plot(iters, betas, lw=0.4, color=_COLOURS[0])
    axes[0].set_title("intercept")
    axes[0].set_xlabel("iteration")
    axes[1].plot(it_raw, Z_raw[:, 0, 0], lw=0.4, color=_COLOURS[1])
    axes[1].set_title("z[1,1] raw")
    axes[1].set_xlabel("iteration")
    axes[2].plot(it_al, Z_al[:, 0, 0], lw=0.4, color=_COLOURS[2])
    axes[2].set_title("z[1,1] aligned")
    axes[2].set_xlabel("iteration")
    for k, ax in enumerate(axes):
        ax.set_gid(f"trace-panel-{k + 1}")
    fig.tight_layout()
    _save(fig, spec.output)


def _model_probs(spec: FigureSpec, art: Artifacts):
    summary = art.summary()
    probs = {int(k): v for k, v in summary["model_probabilities"].items()}
    gs = sorted(probs)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar([str(g) for g in gs], [probs[g] for g in gs],
           color=_COLOURS[0], edgecolor="black", lw=0.5)
    ax.set_xlabel("number of components G")
    ax.set_ylabel("posterior probability")
    ax.set_ylim(0, 1)
    fig.tight_layout()
    _save(fig, spec.output)


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the output path."""
    art = Artifacts(spec.artifacts)
    if spec.kind == "pie-positions":
        _pie_positions(spec, art)
    elif spec.kind == "traces":
        _traces(spec, art)
    else:
        _model_probs(spec, art)
    return spec.output
