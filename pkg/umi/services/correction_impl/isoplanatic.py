import itertools

import numpy as np
import pandas as pd

from .estimates import TransmissionEstimate


def law_correlation(estimates: TransmissionEstimate, step: int, side: str = "out") -> pd.DataFrame:
    """Normalized inner product |⟨T̂_a, T̂_b⟩| / N_u against the separation of windows a and b of one step.

    Frozen windows are left out. Returns one row per window pair, sorted by separation.
    """
    windows = [estimate for estimate in estimates.for_step(step) if not estimate.frozen]
    active = estimates.active
    n_active = max(int(active.sum()), 1)
    rows = []
    for first, second in itertools.combinations(windows, 2):
        law_a = (first.law_out if side == "out" else first.law_in)[active]
        law_b = (second.law_out if side == "out" else second.law_in)[active]
        rows.append(
            {
                "separation": float(np.linalg.norm(np.subtract(first.window.center, second.window.center))),
                "correlation": float(abs(np.vdot(law_a, law_b)) / n_active),
            }
        )
    frame = pd.DataFrame(rows, columns=["separation", "correlation"])
    return frame.sort_values("separation", ignore_index=True)


def isoplanatic_curve(estimates: TransmissionEstimate, step: int, bin_width: float, side: str = "out") -> pd.DataFrame:
    """Mean law correlation per separation bin of width ``bin_width`` mm."""
    pairs = law_correlation(estimates, step, side)
    if pairs.empty:
        return pd.DataFrame(columns=["separation", "correlation", "pairs"])
    bins = np.floor(pairs["separation"] / bin_width).astype(int)
    grouped = pairs.groupby(bins)["correlation"].agg(["mean", "size"])
    return pd.DataFrame({"separation": (grouped.index + 0.5) * bin_width, "correlation": grouped["mean"].to_numpy(), "pairs": grouped["size"].to_numpy()})
