"""Optional matplotlib renderings of the CSV side-files."""

from __future__ import annotations


def _pyplot():
    try:
        import matplotlib
    except ImportError:
        raise RuntimeError("figures need matplotlib; install the 'figures' extra") from None
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def df_scatter(rows, frontier: dict, path, s: int) -> None:
    """Σ_s against d_X, point size by pair count, with the K=1 band."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    if rows:
        S, d, c = zip(*rows)
        big = max(c)
        ax.scatter(S, d, s=[8 + 40 * v / big for v in c], alpha=0.6, lw=0)
        top = max(max(S), max(d))
        C = frontier.get("1", 0)
        ax.plot([0, top], [0, top], "k-", lw=0.8)
        ax.plot([0, top], [C, top + C], "k--", lw=0.8)
    ax.set_xlabel(f"thresholded sum (s={s})")
    ax.set_ylabel("d_X")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def path_profiles(profiles: dict, path) -> None:
    """Distance from the start in each domain along a path."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for name, ys in sorted(profiles.items()):
        ax.plot(range(len(ys)), ys, lw=1, label=str(name))
    ax.set_xlabel("step")
    ax.set_ylabel("d_U(start, step)")
    if len(profiles) <= 10:
        ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
