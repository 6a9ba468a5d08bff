"""
Numeric flows of polynomial vector fields and local nilpotency checks.

Flows are integrated along a ray of complex time ``t = r * exp(i*theta)``
with an adaptive Dormand-Prince 5(4) pair and PI step control.  The state
is always complex.

Blow-up is detected by a norm threshold.  Close to a pole the real-time
step shrinks below ``min_step`` long before the threshold is reached
(``x ~ (1-7t)^(-1/7)`` only exceeds 1e8 within 1e-57 of the pole), so on
step underflow the integrator switches to the arclength-rescaled system

    dz/ds = exp(i*theta) W(z) / (1 + |W(z)|),    dr/ds = 1 / (1 + |W(z)|)

which follows the same orbit at bounded speed.  ``StepUnderflow`` is only
reported when that continuation stalls too or blow-up detection is off.
"""

import csv
import math
from dataclasses import dataclass, field as dc_field
from typing import List, Sequence, Tuple, Union

import numpy as np

from .algebra import Polynomial
from .vectorfield import VectorField, apply_to_poly


class FlowError(ValueError):
    pass


class FlowLimitExceeded(RuntimeError):
    pass


# Dormand-Prince 5(4)
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])

_SAFETY = 0.9
_ALPHA = 0.17  # PI controller exponents for a 5(4) pair
_BETA = 0.04
_FAC_MIN = 0.2
_FAC_MAX = 10.0


def _rk_step(fun, y, h):
    k = np.empty((7, y.size), dtype=y.dtype)
    k[0] = fun(y)
    for s in range(1, 7):
        k[s] = fun(y + h * (np.array(_A[s]) @ k[:s]))
    y_new = y + h * (_B @ k)
    return y_new, h * (_E @ k)


def _err_norm(err, y, y_new, rtol, atol):
    sc = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    with np.errstate(all="ignore"):
        val = math.sqrt(float(np.mean(np.abs(err / sc) ** 2)))
    return val if math.isfinite(val) else math.inf


class CompiledField:
    """Fast numeric evaluation of a VectorField at a complex point."""

    def __init__(self, X):
        self.n = X.n
        rows, coefs, slots = [], [], []
        for exps, i, c in X.terms():
            rows.append(exps)
            coefs.append(complex(c))
            slots.append(i - 1)
        self.exps = np.array(rows, dtype=float).reshape(-1, X.n)
        self.coefs = np.array(coefs, dtype=complex)
        self.slots = np.array(slots, dtype=int)

    def __call__(self, z):
        out = np.zeros(self.n, dtype=complex)
        if self.coefs.size:
            with np.errstate(all="ignore"):
                vals = self.coefs * np.prod(z[None, :] ** self.exps, axis=1)
            np.add.at(out, self.slots, vals)
        return out


@dataclass(frozen=True)
class _Status:
    t: float

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))


class Reached(_Status):
    pass


class BlowUp(_Status):
    pass


class StepUnderflow(_Status):
    pass


Status = Union[Reached, BlowUp, StepUnderflow]


@dataclass
class FlowRequest:
    field: VectorField
    start: Sequence[complex]
    t_max: float
    theta: float = 0.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    blowup_norm: float = 1e8
    min_step: float = 1e-13
    detect_blowup: bool = True
    max_steps: int = 1_000_000

    def validate(self):
        if len(self.start) != self.field.n:
            raise FlowError(f"start has {len(self.start)} components, field lives on {self.field.n}-space")
        if not all(np.isfinite(complex(x)) for x in self.start):
            raise FlowError("start point must be finite")
        for name in ("rel_tol", "abs_tol", "blowup_norm", "min_step"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise FlowError(f"{name} must be a positive finite number, got {v!r}")
        if not (math.isfinite(self.t_max) and self.t_max >= 0):
            raise FlowError("t_max must be a non-negative finite number")
        if not math.isfinite(self.theta):
            raise FlowError("theta must be finite")
        if self.max_steps < 1:
            raise FlowError("max_steps must be positive")


@dataclass
class FlowResult:
    samples: List[Tuple[float, np.ndarray]] = dc_field(default_factory=list)
    status: Status = None

    @property
    def final(self):
        return self.samples[-1][1]

    @property
    def t_final(self):
        return self.samples[-1][0]


def _initial_step(fun, y, rtol, atol, horizon):
    f0 = fun(y)
    sc = atol + rtol * np.abs(y)
    d0 = np.linalg.norm(y / sc) / math.sqrt(y.size)
    d1 = np.linalg.norm(f0 / sc) / math.sqrt(y.size)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, horizon)
    f1 = fun(y + h0 * f0)
    d2 = np.linalg.norm((f1 - f0) / sc) / math.sqrt(y.size) / h0
    if not math.isfinite(d2):
        return h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, horizon)


def _bisect_step(fun, y, h_lo, h_hi, crossed, iters=60):
    # smallest sub-step h (to bisection precision) with crossed(step(h)) True
    y_hi = _rk_step(fun, y, h_hi)[0]
    for _ in range(iters):
        mid = 0.5 * (h_lo + h_hi)
        if mid in (h_lo, h_hi):
            break
        y_mid = _rk_step(fun, y, mid)[0]
        if crossed(y_mid):
            h_hi, y_hi = mid, y_mid
        else:
            h_lo = mid
    return h_hi, y_hi


class _Stepper:
    """Adaptive DOPRI5 driver over a generic autonomous right-hand side."""

    def __init__(self, fun, rtol, atol, min_step, budget):
        self.fun = fun
        self.rtol = rtol
        self.atol = atol
        self.min_step = min_step
        self.budget = budget
        self.err_prev = 1e-4

    def step(self, y, h, h_cap):
        """Take one accepted step of size <= h_cap; returns (y_new, h_used, h_next) or None on underflow."""
        rejected = False
        while True:
            if h < self.min_step:
                return None
            h_try = min(h, h_cap)
            self.budget[0] -= 1
            if self.budget[0] < 0:
                raise FlowLimitExceeded("step budget exhausted")
            y_new, err_vec = _rk_step(self.fun, y, h_try)
            err = _err_norm(err_vec, y, y_new, self.rtol, self.atol)
            if err <= 1.0 and np.all(np.isfinite(y_new)):
                if err == 0:
                    fac = _FAC_MAX
                else:
                    fac = _SAFETY * err ** -_ALPHA * self.err_prev ** _BETA
                    fac = min(_FAC_MAX, max(_FAC_MIN, fac))
                if rejected:
                    fac = min(fac, 1.0)
                self.err_prev = max(err, 1e-4)
                h_next = h_try * fac if h_try == h else max(h, h_try * fac)
                return y_new, h_try, h_next
            rejected = True
            fac = _FAC_MIN if not math.isfinite(err) else max(_FAC_MIN, _SAFETY * err ** -0.2)
            h = h_try * fac


def _push(res, t, z):
    # keep sample times strictly increasing; a terminal sample at an
    # unresolvable time supersedes the previous one
    if len(res.samples) > 1 and t <= res.samples[-1][0]:
        res.samples[-1] = (res.samples[-1][0], z)
    else:
        res.samples.append((t, z))


def integrate(req):
    """Integrate ``dz/dr = exp(i*theta) W(z)`` for ``r`` in ``[0, t_max]``."""
    req.validate()
    W = CompiledField(req.field)
    rot = complex(math.cos(req.theta), math.sin(req.theta))

    def rhs(z):
        return rot * W(z)

    z = np.array([complex(x) for x in req.start], dtype=complex)
    t = 0.0
    res = FlowResult(samples=[(0.0, z.copy())])
    if req.t_max == 0:
        res.status = Reached(0.0)
        return res
    if req.detect_blowup and np.linalg.norm(z) > req.blowup_norm:
        res.status = BlowUp(0.0)
        return res

    budget = [req.max_steps]
    stepper = _Stepper(rhs, req.rel_tol, req.abs_tol, req.min_step, budget)
    h = _initial_step(rhs, z, req.rel_tol, req.abs_tol, req.t_max)
    too_big = lambda y: np.linalg.norm(y) > req.blowup_norm
    while True:
        out = stepper.step(z, h, req.t_max - t)
        if out is None:
            break
        z_new, h_used, h = out
        if req.detect_blowup and too_big(z_new):
            h_star, z_star = _bisect_step(rhs, z, 0.0, h_used, too_big)
            _push(res, t + h_star, z_star)
            res.status = BlowUp(t + h_star)
            return res
        t_new = req.t_max if h_used >= req.t_max - t else t + h_used
        if t_new <= t:
            break
        t, z = t_new, z_new
        res.samples.append((t, z.copy()))
        if t >= req.t_max:
            res.status = Reached(req.t_max)
            return res

    if not req.detect_blowup:
        res.status = StepUnderflow(t)
        return res
    return _continue_arclength(req, rhs, t, z, res, budget)


def _continue_arclength(req, rhs, t, z, res, budget):
    n = z.size

    def g(w):
        v = rhs(w[:n])
        rho = 1.0 + float(np.linalg.norm(v))
        out = np.empty(n + 1, dtype=complex)
        out[:n] = v / rho
        out[n] = 1.0 / rho
        return out

    w = np.append(z, complex(t))
    too_big = lambda y: np.linalg.norm(y[:n]) > req.blowup_norm
    past_end = lambda y: y[n].real >= req.t_max
    stepper = _Stepper(g, req.rel_tol, req.abs_tol, req.min_step, budget)
    h = _initial_step(g, w, req.rel_tol, req.abs_tol, math.inf)
    while True:
        out = stepper.step(w, h, math.inf)
        if out is None:
            res.status = StepUnderflow(float(w[n].real))
            return res
        w_new, h_used, h = out
        if too_big(w_new):
            _, w_star = _bisect_step(g, w, 0.0, h_used, too_big)
            t_star = min(float(w_star[n].real), req.t_max)
            _push(res, t_star, w_star[:n].copy())
            res.status = BlowUp(res.samples[-1][0])
            return res
        if past_end(w_new):
            _, w_end = _bisect_step(g, w, 0.0, h_used, past_end)
            _push(res, req.t_max, w_end[:n].copy())
            res.status = Reached(req.t_max)
            return res
        if w_new[n].real > w[n].real:
            res.samples.append((float(w_new[n].real), w_new[:n].copy()))
        w = w_new


def flow(field, start, t_max, **kwargs):
    return integrate(FlowRequest(field, start, t_max, **kwargs))


def check_closed_form_V2(t):
    """Exact flow of ``V = y^8 d1 + x^4 y^4 d2`` from (1, 1): ``x = y = (1-7t)^(-1/7)``."""
    if not 0 <= t < 1 / 7:
        raise ValueError("closed form exists only for 0 <= t < 1/7")
    x = (1 - 7 * t) ** (-1 / 7)
    return x, x


def write_csv(result, fp):
    """Trajectory as ``t,re_z1,im_z1,...`` rows, one per sample."""
    n = result.samples[0][1].size
    w = csv.writer(fp, lineterminator="\n")
    header = ["t"]
    for i in range(1, n + 1):
        header += [f"re_z{i}", f"im_z{i}"]
    w.writerow(header)
    for t, z in result.samples:
        row = [repr(float(t))]
        for c in z:
            row += [repr(float(c.real)), repr(float(c.imag))]
        w.writerow(row)


# local nilpotency


@dataclass(frozen=True)
class Nilpotent:
    bound: int


@dataclass(frozen=True)
class NotNilpotent:
    witness: int
    period: int


@dataclass(frozen=True)
class Inconclusive:
    pass


def check_locally_nilpotent(W, max_iter=25):
    """
    Iterate ``W`` on every coordinate function.

    Returns ``Nilpotent(b)`` if ``W^b(z_i) = 0`` for all ``i`` (which forces
    local nilpotency on the whole polynomial ring), ``NotNilpotent(i, p)``
    if the orbit of ``z_i`` returns to an earlier nonzero iterate, and
    ``Inconclusive()`` otherwise.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    bound = 0
    open_orbit = False
    for i in range(1, W.n + 1):
        f = Polynomial.var(W.n, i)
        seen = {f: 0}
        k = 0
        while f and k < max_iter:
            f = apply_to_poly(W, f)
            k += 1
            if f:
                if f in seen:
                    return NotNilpotent(i, k - seen[f])
                seen[f] = k
        if f:
            open_orbit = True
        else:
            bound = max(bound, k)
    if open_orbit:
        return Inconclusive()
    return Nilpotent(bound)


def iterate_derivation(W, f, k):
    for _ in range(k):
        f = apply_to_poly(W, f)
    return f
