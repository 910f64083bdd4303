"""Figures for benchmark rows, written to image files."""

from __future__ import annotations

from collections import Counter
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import RunRow  # noqa: E402


def plot_rows(rows: Sequence[RunRow], path: str | Path, title: str | None = None) -> Path:
    """Two panels: distribution of max_bp, and matching size per instance."""
    ok = [r for r in rows if not r.failed]
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.6))

    counts = Counter(r.max_bp for r in ok)
    xs = list(range(0, max(counts, default=0) + 1))
    left.bar(xs, [counts.get(x, 0) for x in xs], color="#4c72b0")
    left.set_xticks(xs)
    left.set_xlabel("max blocking pairs per agent")
    left.set_ylabel("instances")

    idx = [r.index for r in ok]
    right.plot(idx, [r.max_size for r in ok], color="#999999", lw=1, label="maximum matching")
    right.scatter(idx, [r.size for r in ok], s=8, c=["#55a868" if r.stable else "#c44e52" for r in ok],
                  label="found (green = stable)")
    right.set_xlabel("instance")
    right.set_ylabel("matching size")
    right.legend(loc="lower right", fontsize=8)

    if title is None and ok:
        r = ok[0]
        title = f"{r.kind} {r.mode}  n={r.n}  l={r.l}  ({len(ok)} instances)"
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
