"""Figure rendering for the analytics CSV artifacts.

Six figure kinds cover the pipeline outputs: log-log CCDFs, the DAC
density heatmap, sentiment histograms, per-faction candidate volumes with
difference insets, sentiment-conditioned mean bars with standard-error
whiskers, and daily timelines. Rendering never derives a statistic: every
plotted number comes straight out of an input CSV (the faction insets read
the precomputed difference table).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import pyplot as plt
from matplotlib.colors import LogNorm

from .io import EmptyData, SchemaError, Table, read_table

KIND_CCDF = "ccdf_loglog"
KIND_HEATMAP = "dac_heatmap"
KIND_SENTIMENT = "sentiment_hist"
KIND_FACTION = "faction_volume_with_inset"
KIND_MEANS = "conditioned_means_bars"
KIND_TIMELINE = "timeline"

# per kind: number of inputs, required columns per input, dumped columns per
# input (None = every column is consumed, e.g. CCDF series keys)
KIND_SPECS = {
    KIND_CCDF: {"inputs": 1, "required": [["value", "p"]], "used": [None]},
    KIND_HEATMAP: {
        "inputs": 1,
        "required": [["x_bin_low", "x_bin_high", "y_bin_low", "y_bin_high", "density"]],
        "used": [["x_bin_low", "x_bin_high", "y_bin_low", "y_bin_high", "density"]],
    },
    KIND_SENTIMENT: {"inputs": 1, "required": [["s", "count"]], "used": [["s", "count"]]},
    KIND_FACTION: {
        "inputs": 2,
        "required": [
            ["faction", "group", "candidate", "s", "volume"],
            ["faction", "group", "s", "abs_diff"],
        ],
        "used": [
            ["faction", "group", "candidate", "s", "volume"],
            ["faction", "group", "s", "abs_diff"],
        ],
    },
    KIND_MEANS: {
        "inputs": 1,
        "required": [["feature", "split", "s", "mean", "se"]],
        "used": [["feature", "split", "s", "mean", "se"]],
    },
    KIND_TIMELINE: {
        "inputs": 1,
        "required": [["day", "count", "cumulative"]],
        "used": [["day", "count", "cumulative"]],
    },
}

DEFAULT_STYLE = {
    "figsize": [8.0, 5.0],
    "dpi": 110,
    "cmap": "viridis",
    "rcparams": {},
}


@dataclass
class FigureSpec:
    kind: str
    inputs: list
    output: str
    style: dict = field(default_factory=dict)
    where: list = field(default_factory=list)  # (column, value) filters

    def __post_init__(self):
        if self.kind not in KIND_SPECS:
            raise SchemaError(
                f"unknown figure kind {self.kind!r}; pick from {sorted(KIND_SPECS)}"
            )
        expected = KIND_SPECS[self.kind]["inputs"]
        if len(self.inputs) != expected:
            raise SchemaError(
                f"{self.kind} takes {expected} input CSV(s), got {len(self.inputs)}"
            )


def load_style(path=None) -> dict:
    style = dict(DEFAULT_STYLE)
    if path:
        with open(path, encoding="utf-8") as fh:
            style.update(json.load(fh))
    return style


def _load_tables(spec: FigureSpec) -> list:
    tables = []
    for path, required in zip(spec.inputs, KIND_SPECS[spec.kind]["required"]):
        table = read_table(path)
        table.require(required)
        for column, value in spec.where:
            if column in table.header:
                table = table.where(column, value)
        tables.append(table)
    return tables


def consumed_tables(spec: FigureSpec) -> list:
    """(table, used_columns) pairs exactly as render() consumes them."""
    tables = _load_tables(spec)
    out = []
    for table, used in zip(tables, KIND_SPECS[spec.kind]["used"]):
        out.append((table, list(table.header) if used is None else used))
    return out


def render(spec: FigureSpec) -> str:
    """Draw the figure and write it to ``spec.output``.

    Empty inputs produce a labeled placeholder image rather than an error.
    """
    style = {**DEFAULT_STYLE, **spec.style}
    tables = _load_tables(spec)
    with plt.rc_context({"svg.hashsalt": "spamscope-figures", **style["rcparams"]}):
        fig = plt.figure(figsize=tuple(style["figsize"]))
        try:
            if all(len(t) == 0 for t in tables):
                raise EmptyData(spec.inputs[0])
            _DRAWERS[spec.kind](fig, tables, style)
        except EmptyData:
            fig.text(0.5, 0.5, f"no data\n({spec.kind})",
                     ha="center", va="center", fontsize=14)
        _save(fig, spec.output, style)
        plt.close(fig)
    return spec.output


def _save(fig, output: str, style: dict) -> None:
    metadata = {"Date": None} if str(output).endswith(".svg") else None
    fig.savefig(output, dpi=style["dpi"], metadata=metadata)


# ---------------------------------------------------------------------------
# drawers


def _draw_ccdf(fig, tables, style):
    table = tables[0]
    series_cols = [c for c in table.header if c not in ("value", "p")]
    ax = fig.add_subplot(111)
    groups = {}
    vi, pi = table.index("value"), table.index("p")
    for row in table.rows:
        key = " / ".join(row[table.index(c)] for c in series_cols) if series_cols else ""
        groups.setdefault(key, []).append((float(row[vi]), float(row[pi])))
    for key, points in groups.items():
        points.sort()
        xs = [x for x, _ in points]
        ys = [y for _, y in points]
        ax.loglog(xs, ys, drawstyle="steps-post", marker=".", label=key or None)
    ax.set_xlabel("value")
    ax.set_ylabel("P(X ≥ value)")
    if series_cols:
        ax.legend(fontsize=7, ncol=2)
    ax.grid(True, which="both", alpha=0.3)


def _draw_heatmap(fig, tables, style):
    table = tables[0]
    x_low = np.array(table.floats("x_bin_low"))
    x_high = np.array(table.floats("x_bin_high"))
    y_low = np.array(table.floats("y_bin_low"))
    y_high = np.array(table.floats("y_bin_high"))
    density = np.array(table.floats("density"))
    x_edges = np.unique(np.concatenate([x_low, x_high]))
    y_edges = np.unique(np.concatenate([y_low, y_high]))
    grid = np.full((len(x_edges) - 1, len(y_edges) - 1), np.nan)
    xi = np.searchsorted(x_edges, x_low)
    yi = np.searchsorted(y_edges, y_low)
    for i, j, d in zip(xi, yi, density):
        grid[i, j] = d if d > 0 else np.nan
    ax = fig.add_subplot(111)
    positive = density[density > 0]
    norm = LogNorm(vmin=positive.min(), vmax=positive.max()) if positive.size else None
    mesh = ax.pcolormesh(x_edges, y_edges, grid.T, cmap=style["cmap"], norm=norm)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.axvline(1.0, color="white", lw=0.6, alpha=0.6)
    ax.axhline(1.0, color="white", lw=0.6, alpha=0.6)
    ax.set_xlabel("connectivity growth x")
    ax.set_ylabel("activity rate y")
    fig.colorbar(mesh, ax=ax, label="density")


def _draw_sentiment(fig, tables, style):
    table = tables[0]
    pairs = sorted(zip([int(v) for v in table.column("s")],
                       [float(v) for v in table.column("count")]))
    ax = fig.add_subplot(111)
    ax.bar([s for s, _ in pairs], [c for _, c in pairs], color="#4878a8")
    ax.set_xlabel("sentiment score")
    ax.set_ylabel("tweets")
    ax.set_xticks([s for s, _ in pairs])


def _draw_faction(fig, tables, style):
    volumes, diffs = tables
    factions = volumes.distinct("faction")
    groups = volumes.distinct("group")
    candidates = volumes.distinct("candidate")
    axes = fig.subplots(len(groups), len(factions), squeeze=False)
    width = 0.8 / max(1, len(candidates))
    for gi, group in enumerate(groups):
        for fi, faction in enumerate(factions):
            ax = axes[gi][fi]
            panel = volumes.where("faction", faction).where("group", group)
            for ci, cand in enumerate(candidates):
                rows = panel.where("candidate", cand)
                pairs = sorted(zip([int(v) for v in rows.column("s")],
                                   [float(v) for v in rows.column("volume")]))
                ax.bar([s + (ci - (len(candidates) - 1) / 2) * width for s, _ in pairs],
                       [v for _, v in pairs], width=width, label=cand)
            ax.set_title(f"{faction} / {group}", fontsize=8)
            ax.tick_params(labelsize=7)
            if gi == 0 and fi == 0:
                ax.legend(fontsize=6)
            dpanel = diffs.where("faction", faction).where("group", group)
            if len(dpanel):
                inset = ax.inset_axes([0.66, 0.58, 0.32, 0.38])
                dpairs = sorted(zip([int(v) for v in dpanel.column("s")],
                                    [float(v) for v in dpanel.column("abs_diff")]))
                inset.bar([s for s, _ in dpairs], [d for _, d in dpairs],
                          color="#666666")
                inset.tick_params(labelsize=5)
                inset.set_title("|difference|", fontsize=6)
    fig.supxlabel("sentiment score", fontsize=9)
    fig.supylabel("tweets", fontsize=9)
    fig.tight_layout()


def _draw_means(fig, tables, style):
    table = tables[0]
    features = table.distinct("feature")
    feature = features[0]
    rows = table.where("feature", feature)
    splits = rows.distinct("split")
    axes = fig.subplots(1, max(1, len(splits)), squeeze=False)[0]
    for ax, split in zip(axes, splits):
        panel = rows.where("split", split)
        triples = []
        mi, sei, si = panel.index("mean"), panel.index("se"), panel.index("s")
        for row in panel.rows:
            if row[mi] == "":
                continue  # empty bucket (n = 0)
            triples.append((int(row[si]), float(row[mi]), float(row[sei])))
        triples.sort()
        ax.bar([s for s, _, _ in triples], [m for _, m, _ in triples],
               yerr=[e for _, _, e in triples], capsize=3, color="#70a070")
        ax.set_title(split, fontsize=9)
        ax.set_xlabel("sentiment score")
    axes[0].set_ylabel(f"mean {feature}")
    fig.tight_layout()


def _draw_timeline(fig, tables, style):
    table = tables[0]
    days = table.column("day")
    counts = [float(v) for v in table.column("count")]
    cumulative = [float(v) for v in table.column("cumulative")]
    xs = np.arange(len(days))
    ax = fig.add_subplot(111)
    ax.plot(xs, counts, lw=1.2)
    step = max(1, len(days) // 8)
    ax.set_xticks(xs[::step])
    ax.set_xticklabels(days[::step], rotation=30, fontsize=7, ha="right")
    ax.set_ylabel("tweets per day")
    inset = ax.inset_axes([0.62, 0.12, 0.35, 0.35])
    inset.plot(xs, cumulative, color="#a04040")
    inset.set_title("cumulative", fontsize=7)
    inset.tick_params(labelsize=6)
    fig.tight_layout()


_DRAWERS = {
    KIND_CCDF: _draw_ccdf,
    KIND_HEATMAP: _draw_heatmap,
    KIND_SENTIMENT: _draw_sentiment,
    KIND_FACTION: _draw_faction,
    KIND_MEANS: _draw_means,
    KIND_TIMELINE: _draw_timeline,
}
