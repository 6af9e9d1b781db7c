"""Time-domain step response of rational-plus-delay closed loops.

Fixed-step RK4 on the controllable canonical form, with dead time realized
exactly by a circular buffer of delayed loop-error samples (no Pade in
simulation).  Fixed step keeps traces bit-reproducible for golden tests;
the buffer needs a uniform history grid anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .lti import RationalTF, cascade

DIVERGENCE_LIMIT = 1e9


class SimulationDiverged(RuntimeError):
    """Raised when |y| exceeds the divergence guard; carries the partial trace."""

    def __init__(self, message: str, series: "StepSeries"):
        super().__init__(message)
        self.series = series


@dataclass
class StepSeries:
    t: np.ndarray
    y: np.ndarray
    dt: float
    gain_label: float = 1.0


@dataclass
class OvershootReport:
    overshoot_pct: float
    peak_time: float
    settling_time_2pct: Optional[float]
    final_value: float
    settled: bool = True


@dataclass
class IsoDampingReport:
    """Per-multiplier overshoot table plus the max-min spread (pct points)."""

    runs: list  # (multiplier, OvershootReport | None) - None marks divergence
    spread: Optional[float]
    threshold: float
    passed: Optional[bool]
    diverged: list = field(default_factory=list)
    series: list = field(default_factory=list)  # StepSeries per surviving run


def tf_to_statespace(g: RationalTF):
    """Controllable canonical form (A, B, C, D) of the delay-free part.

    D is 0 for strictly proper systems, otherwise the direct term of the
    proper split.  Improper transfer functions are rejected.
    """
    if g.num.degree > g.den.degree:
        raise ValueError("improper transfer function")
    lead = g.den.coeffs[0]
    a = np.array(g.den.coeffs, dtype=float) / lead
    b = np.array(g.num.coeffs, dtype=float) / lead
    n = len(a) - 1
    if n == 0:
        return np.zeros((0, 0)), np.zeros(0), np.zeros(0), float(b[0])
    if len(b) == len(a):
        d = float(b[0])
        b = (b - d * a)[1:]
    else:
        d = 0.0
    bb = np.zeros(n)
    bb[n - len(b):] = b
    A = np.zeros((n, n))
    if n > 1:
        A[:-1, 1:] = np.eye(n - 1)
    A[-1, :] = -a[1:][::-1]
    B = np.zeros(n)
    B[-1] = 1.0
    C = bb[::-1].copy()
    return A, B, C, d


def _rk4_propagators(A: np.ndarray, B: np.ndarray, h: float):
    """Exact affine form of one RK4 step for x' = Ax + Bu with u linear in t.

    With u0 = u(t), u1 = u(t+h) and the midpoint stages fed (u0+u1)/2, the
    classical RK4 update collapses to x+ = M x + P u0 + Q u1 where

        M = I + hA + h^2/2 A^2 + h^3/6 A^3 + h^4/24 A^4
        P = h/2 B + h^2/3 AB + h^3/8 A^2B + h^4/24 A^3B
        Q = h/2 B + h^2/6 AB + h^3/24 A^2B

    Precomputing these turns the integration loop into one small mat-vec
    per step, which is what makes dense acceptance sweeps affordable.
    """
    n = A.shape[0]
    eye = np.eye(n)
    A2 = A @ A
    A3 = A2 @ A
    M = eye + h * A + (h**2 / 2) * A2 + (h**3 / 6) * A3 + (h**4 / 24) * (A3 @ A)
    AB = A @ B
    A2B = A2 @ B
    P = (h / 2) * B + (h**2 / 3) * AB + (h**3 / 8) * A2B + (h**4 / 24) * (A3 @ B)
    Q = (h / 2) * B + (h**2 / 6) * AB + (h**3 / 24) * A2B
    return M, P, Q


def step_response(open_loop: RationalTF, t_final: float, dt: float) -> StepSeries:
    """Closed-loop (unity negative feedback) response to a unit step.

    The loop error is delayed by the open loop's dead time through a sample
    buffer; dt must put at least 10 samples inside the delay.  The RK4 step
    is applied through its precomputed affine propagator with the delayed
    error interpolated linearly inside each step.
    """
    if t_final <= 0 or dt <= 0:
        raise ValueError("t_final and dt must be > 0")
    delay = open_loop.delay
    if delay > 0 and dt > delay / 10 + 1e-12:
        raise ValueError("dt must be <= delay/10 for delayed loops")

    A, B, C, D = tf_to_statespace(open_loop.rational_part())
    n = A.shape[0]
    n_steps = int(round(t_final / dt))
    t = np.arange(n_steps + 1) * dt
    y = np.zeros(n_steps + 1)
    series = StepSeries(t=t, y=y, dt=dt)
    idx = range(n)

    if delay == 0.0:
        if abs(1.0 + D) < 1e-12:
            raise ValueError("algebraic loop is singular (1 + D = 0)")
        # u = (r - Cx)/(1+D) closes the loop algebraically; r = 1 for t >= 0,
        # leaving an autonomous affine system x' = Acl x + Bcl.
        Acl = A - np.outer(B, C) / (1.0 + D)
        Bcl = B / (1.0 + D)
        M, P, Q = _rk4_propagators(Acl, Bcl, dt)
        Mr = [tuple(row) for row in M]
        R = tuple(P + Q)
        Ct = tuple(C / (1.0 + D))
        y_off = D / (1.0 + D)
        x = (0.0,) * n
        for k in range(n_steps + 1):
            yk = sum(c * xi for c, xi in zip(Ct, x)) + y_off
            y[k] = yk
            if abs(yk) > DIVERGENCE_LIMIT:
                series.t, series.y = t[: k + 1], y[: k + 1]
                raise SimulationDiverged("response diverged", series)
            if k == n_steps:
                break
            x = tuple(sum(Mr[i][j] * x[j] for j in idx) + R[i] for i in idx)
        return series

    # A biproper loop (D != 0) jumps at every multiple of the dead time, and
    # those instants are sample-aligned (the buffer length is round(L/dt)).
    # Tracking the left and right limits of the loop error at each sample
    # lets every RK4 step integrate an input that is smooth inside the step:
    # steps ending on a jump use the pre-jump limit, steps starting on one
    # use the post-jump value.
    n_delay = max(1, int(round(delay / dt)))
    M, P, Q = _rk4_propagators(A, B, dt)
    Mr = [tuple(row) for row in M]
    Pt, Qt, Ct = tuple(P), tuple(Q), tuple(C)
    e_right = [0.0] * (n_steps + 2)
    e_left = [0.0] * (n_steps + 2)
    x = (0.0,) * n

    for k in range(n_steps + 1):
        j = k - n_delay
        ur = e_right[j] if j >= 0 else 0.0
        ul = e_left[j] if j >= 0 else 0.0
        cx = sum(c * xi for c, xi in zip(Ct, x))
        yk = cx + D * ur
        y[k] = yk
        if abs(yk) > DIVERGENCE_LIMIT:
            series.t, series.y = t[: k + 1], y[: k + 1]
            raise SimulationDiverged("response diverged", series)
        e_right[k] = 1.0 - yk
        # reference is 0 for t < 0, so its own step is a jump at k = 0
        e_left[k] = (1.0 if k > 0 else 0.0) - (cx + D * ul)
        if k == n_steps:
            break
        jn = k + 1 - n_delay
        u1 = e_left[jn] if jn >= 0 else 0.0
        x = tuple(
            sum(Mr[i][jj] * x[jj] for jj in idx) + Pt[i] * ur + Qt[i] * u1
            for i in idx
        )
    return series


def overshoot(series: StepSeries, tail_fraction: float = 0.1) -> OvershootReport:
    """Overshoot, peak time and 2% settling time from a step trace.

    The final value is the mean of the trailing tail_fraction of the trace;
    settling detection via the tail mean is robust to the slow tails of
    shaper poles near the origin.  If the two halves of the tail differ by
    more than 1% the trace is flagged unsettled and no settling time is
    reported.
    """
    if not 0 < tail_fraction < 1:
        raise ValueError("tail_fraction must be in (0,1)")
    y = np.asarray(series.y, dtype=float)
    t = np.asarray(series.t, dtype=float)
    if y.size == 0:
        raise ValueError("empty series")
    m = max(2, int(round(tail_fraction * y.size)))
    tail = y[-m:]
    h1, h2 = tail[: m // 2].mean(), tail[m // 2:].mean()
    final = float(tail.mean())
    scale = max(abs(final), 1e-12)
    settled = bool(abs(h2 - h1) < 0.01 * scale)

    if abs(final) < 1e-12:
        os_pct = 0.0
    else:
        os_pct = max(0.0, 100.0 * (float(y.max()) - final) / abs(final))
    peak_time = float(t[int(np.argmax(y))])

    settling = None
    if settled and abs(final) >= 1e-12:
        outside = np.abs(y - final) > 0.02 * abs(final)
        if not outside.any():
            settling = 0.0
        else:
            last = int(np.nonzero(outside)[0][-1])
            settling = float(t[last + 1]) if last + 1 < y.size else None
    return OvershootReport(overshoot_pct=os_pct, peak_time=peak_time,
                           settling_time_2pct=settling, final_value=final,
                           settled=settled)


def iso_damping_report(
    plant: RationalTF,
    controller: RationalTF,
    shaper: RationalTF,
    gain_multipliers,
    t_final: float,
    dt: float,
    threshold: float = 2.0,
    tail_fraction: float = 0.1,
) -> IsoDampingReport:
    """Step the closed loop at each loop-gain multiplier and compare overshoots.

    spread = max - min overshoot_pct over the surviving (non-diverged) runs;
    a run that diverges is recorded per-multiplier and excluded.  The pass
    verdict applies the given spread threshold (percentage points).
    """
    if any(m <= 0 for m in gain_multipliers):
        raise ValueError("gain multipliers must be > 0")
    loop = cascade(shaper, controller, plant)
    runs, diverged, all_series = [], [], []
    for m in gain_multipliers:
        scaled = loop.scaled(m)
        try:
            series = step_response(scaled, t_final, dt)
            series.gain_label = m
            report = overshoot(series, tail_fraction)
            runs.append((m, report))
            all_series.append(series)
        except SimulationDiverged as exc:
            exc.series.gain_label = m
            runs.append((m, None))
            diverged.append(m)
            all_series.append(exc.series)
    survivors = [r.overshoot_pct for _, r in runs if r is not None]
    spread = (max(survivors) - min(survivors)) if survivors else None
    passed = (spread <= threshold) if (spread is not None and not diverged) else (
        None if spread is None else False)
    return IsoDampingReport(runs=runs, spread=spread, threshold=threshold,
                            passed=passed, diverged=diverged, series=all_series)


def write_step_csv(series: StepSeries, path) -> None:
    """Two-column CSV (header ``t_s,y``), floats at 12 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t_s,y\n")
        for ti, yi in zip(series.t, series.y):
            fh.write(f"{ti:.12g},{yi:.12g}\n")
