"""Event pre-filters: artificial refractory period and salt-and-pepper
(neighbour-correlation) noise removal.

Both are order-preserving single-pass stream transforms and ignore
polarity. The refractory filter measures against the last *retained* event
at a pixel, so it is idempotent. The salt-and-pepper filter supports an
event by any prior raw event in its spatio-temporal neighbourhood
(dropped events still count as support), so a burst's first event is
dropped but its followers survive; it is therefore not idempotent in
general.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .events import EventStream


@dataclass(frozen=True)
class FilterConfig:
    refractory_us: int = 5_000  # 0 disables
    sp_window_us: int = 10_000
    sp_neighborhood: int = 1

    def __post_init__(self):
        if self.refractory_us < 0 or self.sp_window_us < 0 or self.sp_neighborhood < 0:
            raise InvalidParameter("filter parameters must be non-negative")


def refractory_filter(stream: EventStream, period_us: int) -> EventStream:
    """Drop events that follow a retained event at the same pixel within
    ``period_us``. Zero disables the filter."""
    if period_us < 0:
        raise InvalidParameter(f"period must be non-negative, got {period_us}")
    if period_us == 0 or len(stream) == 0:
        return stream
    h, w = stream.geometry.height, stream.geometry.width
    last_kept = np.full((h, w), -(period_us + 1), dtype=np.int64)
    keep = np.zeros(len(stream), dtype=bool)
    xs = stream.x.tolist()
    ys = stream.y.tolist()
    ts = stream.t.tolist()
    for i in range(len(stream)):
        x = xs[i]
        y = ys[i]
        t = ts[i]
        if t - last_kept[y, x] > period_us:
            keep[i] = True
            last_kept[y, x] = t
    return _apply_mask(stream, keep)


def sp_filter(stream: EventStream, window_us: int, neighborhood: int = 1) -> EventStream:
    """Drop events with no prior event within ``neighborhood`` Chebyshev
    distance in the last ``window_us``."""
    if window_us < 0 or neighborhood < 0:
        raise InvalidParameter("window and neighborhood must be non-negative")
    if len(stream) == 0:
        return stream
    h, w = stream.geometry.height, stream.geometry.width
    nb = neighborhood
    # pad so the patch slice never clips; sentinel far in the past
    last = np.full((h + 2 * nb, w + 2 * nb), -(window_us + 1), dtype=np.int64)
    keep = np.zeros(len(stream), dtype=bool)
    xs = stream.x.tolist()
    ys = stream.y.tolist()
    ts = stream.t.tolist()
    span = 2 * nb + 1
    for i in range(len(stream)):
        x = xs[i]
        y = ys[i]
        t = ts[i]
        patch = last[y : y + span, x : x + span]
        keep[i] = bool((t - patch <= window_us).any())
        last[y + nb, x + nb] = t
    return _apply_mask(stream, keep)


def _apply_mask(stream: EventStream, keep: np.ndarray) -> EventStream:
    return EventStream(
        stream.geometry, stream.t[keep], stream.x[keep], stream.y[keep], stream.p[keep]
    )
