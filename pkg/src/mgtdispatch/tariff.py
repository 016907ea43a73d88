"""Per-step utility pricing.

Purchases from the utility are priced per time step by piecewise-linear
functions of the exchanged amount x (kW held over the step, positive =
buying). Power steps may sell back (x < 0) at a dedicated rate, or forbid
selling, which prices x < 0 at +inf. Heat never earns anything: surplus heat
(x <= 0) is vented for free.

Slopes are stored in currency per kW-step; a $/kWh rate r converts as
r * step_seconds / 3600. Evaluations use a clamped segment-width sum so the
result is exactly non-decreasing in x whenever all slopes are non-negative,
which the robust machinery relies on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

INF = float("inf")


@dataclass(frozen=True)
class PiecewiseLinearCost:
    """Continuous piecewise-linear cost of one step's exchange x.

    neg_slope prices x < 0 (None = forbidden, +inf). breakpoints must be
    ascending and start at 0.0; slopes[i] applies on
    [breakpoints[i], breakpoints[i+1]), the last slope extends to +inf.
    value0 is the cost at x = 0; it is 0 for every tariff read from a file
    and can become negative only through convexify().
    """

    neg_slope: float | None
    breakpoints: tuple[float, ...] = (0.0,)
    slopes: tuple[float, ...] = (0.0,)
    value0: float = 0.0

    def __post_init__(self):
        if len(self.breakpoints) != len(self.slopes):
            raise ValueError("need one slope per breakpoint")
        if not self.breakpoints or self.breakpoints[0] != 0.0:
            raise ValueError("breakpoints must start at 0.0")
        if any(b2 <= b1 for b1, b2 in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly ascending")

    def value(self, x: float) -> float:
        if x < 0.0:
            return INF if self.neg_slope is None else self.value0 + self.neg_slope * x
        total = self.value0
        bps, sl = self.breakpoints, self.slopes
        for i, s in enumerate(sl):
            hi = bps[i + 1] if i + 1 < len(bps) else INF
            w = min(x, hi) - bps[i]
            if w <= 0.0:
                break
            total += s * w
        return total

    def value_array(self, x: np.ndarray) -> np.ndarray:
        """Vectorized value(); bit-identical to the scalar path per element."""
        x = np.asarray(x, dtype=np.float64)
        total = np.full(x.shape, self.value0, dtype=np.float64)
        bps, sl = self.breakpoints, self.slopes
        for i, s in enumerate(sl):
            hi = bps[i + 1] if i + 1 < len(bps) else INF
            w = np.minimum(x, hi) - bps[i]
            np.maximum(w, 0.0, out=w)
            total += s * w
        if self.neg_slope is None:
            total[x < 0.0] = INF
        else:
            neg = x < 0.0
            total[neg] = self.value0 + self.neg_slope * x[neg]
        return total

    def slope_sequence(self) -> tuple[float, ...]:
        """Slopes left to right across the whole domain (sell branch first)."""
        if self.neg_slope is None:
            return self.slopes
        return (self.neg_slope,) + self.slopes

    def is_convex(self) -> bool:
        seq = self.slope_sequence()
        return all(a <= b for a, b in zip(seq, seq[1:]))


def forbidden_sell() -> None:
    return None


@dataclass(frozen=True, eq=False)
class Tariff:
    """Per-step power and heat cost functions over a fixed horizon.

    Functions are deduplicated: *_index maps each step to an entry of
    *_functions, so time-of-use tariffs stay cheap to store and evaluate.
    """

    step_seconds: float
    horizon_steps: int
    power_functions: tuple[PiecewiseLinearCost, ...]
    power_index: np.ndarray
    heat_functions: tuple[PiecewiseLinearCost, ...]
    heat_index: np.ndarray

    def __post_init__(self):
        if len(self.power_index) != self.horizon_steps or len(self.heat_index) != self.horizon_steps:
            raise ValueError("per-step function index length must equal horizon_steps")

    def power_fn(self, t: int) -> PiecewiseLinearCost:
        return self.power_functions[self.power_index[t]]

    def heat_fn(self, t: int) -> PiecewiseLinearCost:
        return self.heat_functions[self.heat_index[t]]

    def power_cost_block(self, x: np.ndarray, t0: int) -> np.ndarray:
        """Evaluate power cost for a (rows, width) block of exchanges.

        Column j of x belongs to step t0 + j. Groups columns by distinct
        cost function, so TOU tariffs cost two evaluations per block.
        """
        return _eval_block(x, self.power_functions, self.power_index, t0)

    def heat_cost_block(self, x: np.ndarray, t0: int) -> np.ndarray:
        return _eval_block(x, self.heat_functions, self.heat_index, t0)


def _eval_block(x: np.ndarray, functions, index: np.ndarray, t0: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    width = x.shape[-1]
    idx = index[t0:t0 + width]
    out = np.empty_like(x)
    for fi in np.unique(idx):
        cols = np.nonzero(idx == fi)[0]
        out[..., cols] = functions[fi].value_array(x[..., cols])
    return out


def eval_power_cost(tariff: Tariff, t: int, x: float) -> float:
    """Cost of exchanging x kW of power with the utility during step t."""
    if not 0 <= t < tariff.horizon_steps:
        raise IndexError(f"step {t} outside horizon [0, {tariff.horizon_steps})")
    return tariff.power_fn(t).value(x)


def eval_heat_cost(tariff: Tariff, t: int, x: float) -> float:
    """Cost of covering x kW of heat from the utility during step t (free for x <= 0)."""
    if not 0 <= t < tariff.horizon_steps:
        raise IndexError(f"step {t} outside horizon [0, {tariff.horizon_steps})")
    return tariff.heat_fn(t).value(x)


def check_convexity(tariff: Tariff) -> list[str]:
    """Report every step whose cost function is not convex.

    A step is flagged when its slope sequence (sell slope first, then buy
    slopes in order) decreases anywhere; selling above the purchase rate is
    the common offender.
    """
    report: list[str] = []
    for label, functions, index in (
        ("power", tariff.power_functions, tariff.power_index),
        ("heat", tariff.heat_functions, tariff.heat_index),
    ):
        bad: dict[int, str] = {}
        for fi, fn in enumerate(functions):
            seq = fn.slope_sequence()
            for a, b in zip(seq, seq[1:]):
                if b < a:
                    bad[fi] = f"slope drops from {a} to {b}"
                    break
        if bad:
            for t in range(tariff.horizon_steps):
                fi = int(index[t])
                if fi in bad:
                    report.append(f"t={t}: {label} cost is non-convex ({bad[fi]})")
    return report


def is_convex(tariff: Tariff) -> bool:
    return not check_convexity(tariff)


def _convex_envelope(fn: PiecewiseLinearCost) -> PiecewiseLinearCost:
    if fn.is_convex():
        return fn
    right_slope = fn.slopes[-1]
    if fn.neg_slope is not None and fn.neg_slope > right_slope:
        raise ValueError(
            "no finite convex envelope: sell slope exceeds the final purchase "
            "slope, so buying bulk and selling back is an unbounded gain"
        )
    # lower convex hull of the breakpoint graph, then trim against both rays
    pts = [(0.0, fn.value0)]
    for b in fn.breakpoints[1:]:
        pts.append((b, fn.value(b)))
    hull: list[tuple[float, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop middle point when it lies on or above the chord
            if (y2 - y1) * (p[0] - x2) >= (p[1] - y2) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    while len(hull) >= 2:
        (x1, y1), (x2, y2) = hull[-2], hull[-1]
        if (y2 - y1) / (x2 - x1) > right_slope:
            hull.pop()
        else:
            break
    if fn.neg_slope is not None:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[0], hull[1]
            if (y2 - y1) / (x2 - x1) < fn.neg_slope:
                hull.pop(0)
            else:
                break
    # rebuild as value-at-zero + slope segments; the sell ray may extend past
    # x = 0 when the hull's first vertex moved right
    left = fn.neg_slope
    x0, y0 = hull[0]
    breakpoints: list[float] = [0.0]
    slopes: list[float] = []
    if x0 > 0.0:
        # only the left-ray trim moves the first vertex, so left is not None
        value0 = y0 - left * x0
        slopes.append(left)
        breakpoints.append(x0)
    else:
        value0 = y0
    for (xa, ya), (xb, yb) in zip(hull, hull[1:]):
        slopes.append((yb - ya) / (xb - xa))
        breakpoints.append(xb)
    slopes.append(right_slope)
    return PiecewiseLinearCost(left, tuple(breakpoints), tuple(slopes), value0)


def convexify(tariff: Tariff) -> Tariff:
    """Replace every non-convex step cost by its convex envelope.

    The envelope is the lower convex hull of the function's breakpoint graph
    together with its two end rays; it is the tightest convex function lying
    nowhere above the original. Raises when no finite envelope exists (sell
    rate above the final purchase rate).
    """
    return Tariff(
        tariff.step_seconds,
        tariff.horizon_steps,
        tuple(_convex_envelope(fn) for fn in tariff.power_functions),
        tariff.power_index,
        tuple(_convex_envelope(fn) for fn in tariff.heat_functions),
        tariff.heat_index,
    )


@dataclass(frozen=True)
class TouConfig:
    """Time-of-use tariff: one peak window per day, flat heat price.

    The peak window is [peak_start_hour, peak_end_hour) in hours of the day;
    step t covers wall-clock seconds [t*step_seconds, (t+1)*step_seconds).
    sell_per_kwh may be "same" (buy rate of the step), "forbidden", or a rate.
    The heat price can be given per kWh directly or as a fuel price per kg
    plus its energy content.
    """

    step_seconds: float
    horizon_steps: int
    buy_peak_per_kwh: float
    buy_offpeak_per_kwh: float
    peak_start_hour: float = 10.0
    peak_end_hour: float = 20.0
    sell_per_kwh: float | str = "same"
    heat_buy_per_kwh: float | None = None
    heat_price_per_kg: float | None = None
    heat_kwh_per_kg: float = 13.1


def tou_tariff(config: TouConfig) -> Tariff:
    """Build the per-step tariff for a daily peak/off-peak price pair."""
    dt = config.step_seconds
    per_step = dt / 3600.0

    if config.heat_buy_per_kwh is not None:
        heat_rate = config.heat_buy_per_kwh
    elif config.heat_price_per_kg is not None:
        heat_rate = config.heat_price_per_kg / config.heat_kwh_per_kg
    else:
        raise ValueError("need heat_buy_per_kwh or heat_price_per_kg")

    def sell_slope(buy_rate: float) -> float | None:
        if config.sell_per_kwh == "same":
            return buy_rate * per_step
        if config.sell_per_kwh == "forbidden":
            return None
        return float(config.sell_per_kwh) * per_step

    peak = PiecewiseLinearCost(sell_slope(config.buy_peak_per_kwh), (0.0,), (config.buy_peak_per_kwh * per_step,))
    off = PiecewiseLinearCost(sell_slope(config.buy_offpeak_per_kwh), (0.0,), (config.buy_offpeak_per_kwh * per_step,))

    hours = (np.arange(config.horizon_steps, dtype=np.float64) * dt / 3600.0) % 24.0
    if config.peak_start_hour <= config.peak_end_hour:
        in_peak = (hours >= config.peak_start_hour) & (hours < config.peak_end_hour)
    else:
        in_peak = (hours >= config.peak_start_hour) | (hours < config.peak_end_hour)
    power_index = np.where(in_peak, 0, 1).astype(np.int32)

    heat_fn = PiecewiseLinearCost(0.0, (0.0,), (heat_rate * per_step,))
    heat_index = np.zeros(config.horizon_steps, dtype=np.int32)
    return Tariff(dt, config.horizon_steps, (peak, off), power_index, (heat_fn,), heat_index)


def flat_tariff(
    horizon_steps: int,
    step_seconds: float,
    power_buy_slope: float,
    power_sell_slope: float | None,
    heat_buy_slope: float,
) -> Tariff:
    """Single-rate tariff given directly in currency per kW-step (test helper)."""
    pf = PiecewiseLinearCost(power_sell_slope, (0.0,), (power_buy_slope,))
    hf = PiecewiseLinearCost(0.0, (0.0,), (heat_buy_slope,))
    zeros = np.zeros(horizon_steps, dtype=np.int32)
    return Tariff(step_seconds, horizon_steps, (pf,), zeros, (hf,), zeros)


def tariff_to_dict(tariff: Tariff) -> dict:
    """Serialize to the range-list file form; single-rate steps only."""
    ranges = []
    start = 0
    idx = tariff.power_index
    for t in range(1, tariff.horizon_steps + 1):
        if t == tariff.horizon_steps or idx[t] != idx[start]:
            fn = tariff.power_functions[idx[start]]
            if len(fn.slopes) != 1 or fn.value0 != 0.0:
                raise ValueError("tariff files carry single-rate ranges only")
            per_kwh = 3600.0 / tariff.step_seconds
            ranges.append(
                {
                    "from_step": start,
                    "to_step": t,
                    "buy_per_kwh": fn.slopes[0] * per_kwh,
                    "sell_per_kwh": "forbidden" if fn.neg_slope is None else fn.neg_slope * per_kwh,
                }
            )
            start = t
    hf = tariff.heat_functions[int(tariff.heat_index[0])]
    if len(tariff.heat_functions) != 1 or len(hf.slopes) != 1:
        raise ValueError("tariff files carry a single flat heat rate only")
    return {
        "step_seconds": tariff.step_seconds,
        "horizon_steps": tariff.horizon_steps,
        "power": ranges,
        "heat": {"buy_per_kwh": hf.slopes[0] * 3600.0 / tariff.step_seconds},
    }


def tariff_from_dict(data: dict) -> Tariff:
    try:
        dt = float(data["step_seconds"])
        horizon = int(data["horizon_steps"])
        per_step = dt / 3600.0
        functions: list[PiecewiseLinearCost] = []
        index = np.full(horizon, -1, dtype=np.int32)
        for row in data["power"]:
            a, b = int(row["from_step"]), int(row["to_step"])
            if not (0 <= a < b <= horizon):
                raise ValueError(f"bad step range [{a}, {b})")
            sell = row["sell_per_kwh"]
            neg = None if sell == "forbidden" else float(sell) * per_step
            fn = PiecewiseLinearCost(neg, (0.0,), (float(row["buy_per_kwh"]) * per_step,))
            if (index[a:b] != -1).any():
                raise ValueError(f"overlapping power ranges at [{a}, {b})")
            functions.append(fn)
            index[a:b] = len(functions) - 1
        if (index == -1).any():
            gap = int(np.nonzero(index == -1)[0][0])
            raise ValueError(f"power ranges leave step {gap} unpriced")
        heat_fn = PiecewiseLinearCost(0.0, (0.0,), (float(data["heat"]["buy_per_kwh"]) * per_step,))
        return Tariff(dt, horizon, tuple(functions), index, (heat_fn,), np.zeros(horizon, dtype=np.int32))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed tariff description: {exc}") from exc


def save_tariff(tariff: Tariff, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(tariff_to_dict(tariff), fh, indent=1)
        fh.write("\n")


def load_tariff(path: str) -> Tariff:
    with open(path) as fh:
        return tariff_from_dict(json.load(fh))
