"""Trace rendering: two-panel SVG and a terminal sparkline."""
from __future__ import annotations

import io
import math

import numpy as np

from spikegate.instrument import Trace

_BLOCKS = "▁▂▃▄▅▆▇█"


def render_svg(trace: Trace, threshold: float | None = None, title: str | None = None) -> str:
    """Voltage and current against time; read samples are marked.

    Output is byte-identical for identical input.
    """
    import matplotlib
    from matplotlib.figure import Figure

    if len(trace) == 0:
        raise ValueError("trace is empty")
    t = trace.t
    reads = trace.read_indices()
    with matplotlib.rc_context({"svg.hashsalt": "spikegate", "svg.fonttype": "none"}):
        fig = Figure(figsize=(8, 5.5))
        ax_v, ax_i = fig.subplots(2, 1, sharex=True)
        ax_v.step(t, trace.v, where="post", color="tab:blue", lw=1)
        ax_v.set_ylabel("V (V)")
        if title:
            ax_v.set_title(title)
        cur = np.where(np.isnan(trace.i), np.nan, trace.i * 1e9)
        ax_i.plot(t, cur, color="tab:red", lw=0.8, marker=".", ms=2)
        if len(reads):
            ax_i.plot(t[reads], cur[reads], "o", mfc="none", mec="k", ms=6, label="read")
            ax_i.legend(loc="upper right", frameon=False)
        if threshold is not None:
            for sign in (1, -1):
                ax_i.axhline(sign * threshold * 1e9, color="0.4", ls="--", lw=0.8)
        ax_i.set_ylabel("I (nA)")
        ax_i.set_xlabel("t (s)")
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def sparkline(values, width: int = 72) -> str:
    """One line of block characters; each column shows the largest-magnitude sample in its bin."""
    vals = np.asarray(values, dtype=float)
    vals = vals[~np.isnan(vals)]
    if vals.size == 0:
        return ""
    width = max(1, min(width, vals.size))
    bins = np.array_split(vals, width)
    picked = np.array([b[np.argmax(np.abs(b))] for b in bins])
    lo, hi = picked.min(), picked.max()
    if hi == lo:
        return _BLOCKS[0] * width
    idx = np.floor((picked - lo) / (hi - lo) * (len(_BLOCKS) - 1) + 0.5).astype(int)
    return "".join(_BLOCKS[k] for k in idx)


def render_ascii(trace: Trace, width: int = 72) -> str:
    if len(trace) == 0:
        raise ValueError("trace is empty")
    i = trace.i[~np.isnan(trace.i)]
    lines = [
        f"V {sparkline(trace.v, width)}  [{trace.v.min():+.3g}, {trace.v.max():+.3g}] V",
        f"I {sparkline(trace.i, width)}  [{_nano(i.min()) if i.size else 'n/a'}, {_nano(i.max()) if i.size else 'n/a'}] nA",
    ]
    reads = trace.read_indices()
    if len(reads):
        vals = ", ".join(f"{trace.i[k] * 1e9:+.3g}" for k in reads)
        lines.append(f"reads (nA): {vals}")
    return "\n".join(lines)


def _nano(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x * 1e9:+.3g}"
