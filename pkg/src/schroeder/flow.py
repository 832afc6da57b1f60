"""Flows of positive vector fields rho(x) d/dx on the half line.

The central object is the Abel chart: the coordinate
``t(x) = integral_{x0}^{x} du / rho(u)`` in which the flow is unit-speed
translation and the time-1 map becomes ``t -> t + 1``.  Time-t maps are
computed by monotone inversion of the chart, never by ODE stepping, so the
Abel equation holds up to quadrature and root-finding error only.

Two generator families are supported:

* polynomial ``rho = x**n + a x**(2n-1)`` (optionally saturating to 1
  beyond a finite radius) in ordinary float arithmetic, with the singular
  endpoint handled by analytic subtraction of the leading terms;
* the flat generator ``rho = exp(-1/x)``, whose Abel integral has the
  closed primitive ``u e**(1/u) - Ei(1/u)``.  Its values overflow every
  fixed-width float long before x reaches 1e-3, so this chart works in
  adaptive-precision arithmetic (mpmath) and returns ``mpf`` reals.
"""

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.integrate import quad

from .errors import (
    BlowUp,
    CentralizerNotFlow,
    DomainError,
    NoConvergence,
    NotExpanding,
    QuadratureFail,
)


def smoothstep(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1."""
    if u <= 0.0:
        return 0.0
    if u >= 1.0:
        return 1.0
    a = math.exp(-1.0 / u)
    b = math.exp(-1.0 / (1.0 - u))
    return a / (a + b)


@dataclass(frozen=True)
class VectorFieldGen:
    """Generator rho(x) d/dx with rho(0) = 0 and rho > 0 on (0, domain).

    kind "poly": rho = x**n + a x**(2n-1) exactly on [0, guard*saturation],
    blended C-infinity to 1 on [guard*saturation, saturation] and identically
    1 beyond (saturation = inf means the pure polynomial everywhere, which
    for n >= 2 reaches infinity in finite time).

    kind "flat": rho = exp(-1/x), flat at 0 and asymptotically 1.
    """

    kind: str
    n: int = 0
    a: float = 0.0
    saturation: float = math.inf
    guard: float = 0.8

    @classmethod
    def poly(cls, n: int, a: float = 0.0, saturation: float = math.inf):
        if n < 2:
            raise ValueError("polynomial generators need leading order n >= 2")
        return cls(kind="poly", n=n, a=a, saturation=float(saturation))

    @classmethod
    def flat(cls):
        return cls(kind="flat")

    @property
    def positivity_bound(self):
        """sup of the interval on which the polynomial part stays positive."""
        if self.kind != "poly" or self.a >= 0:
            return math.inf
        return (-1.0 / self.a) ** (1.0 / (self.n - 1))

    def rho(self, x):
        if x <= 0.0:
            return 0.0
        if self.kind == "flat":
            return math.exp(-1.0 / x)
        p = x**self.n + self.a * x ** (2 * self.n - 1)
        if math.isinf(self.saturation):
            return p
        s0 = self.guard * self.saturation
        if x <= s0:
            return p
        w = smoothstep((x - s0) / (self.saturation - s0))
        return (1.0 - w) * p + w * 1.0


class AbelChart:
    """Abel coordinate of a generator, with cached quadrature values.

    Construction fixes the base point (t(x0) = 0) and precomputes the
    supremum of the coordinate; all later operations are read-only.
    """

    def __init__(self, gen: VectorFieldGen, x0=None, quad_tol=1e-13,
                 domain_sup=None):
        self.gen = gen
        self.quad_tol = float(quad_tol)
        if gen.kind == "poly":
            bound = gen.positivity_bound
            cap = 0.95 * bound if math.isfinite(bound) else 1e9
            if domain_sup is None and math.isfinite(gen.saturation):
                domain_sup = max(10.0, 2.0 * gen.saturation)
            self.domain_sup = min(domain_sup or cap, cap)
        else:
            self.domain_sup = domain_sup or 10.0
        if x0 is None:
            # x0 = 1 whenever the chart reaches that far, else mid-domain
            lid = min(gen.saturation, self.domain_sup)
            x0 = 1.0 if lid >= 1.0 else lid / 2.0
        if not x0 > 0:
            raise DomainError("base point x0 must be positive")
        self.x0 = float(x0)
        if gen.kind == "poly" and self.x0 >= self.domain_sup:
            raise DomainError("x0 outside the positivity domain of rho")
        self._cache = {}
        self._t_sup = self._compute_t_sup()

    # -- generator pieces ---------------------------------------------------

    def _lead(self, u):
        # primitive of the singular part 1/u**n - a/u of 1/rho
        n, a = self.gen.n, self.gen.a
        return u ** (1 - n) / (1 - n) - a * math.log(u)

    def _g(self, u):
        # 1/rho - (1/u**n - a/u): smooth through u = 0
        n, a = self.gen.n, self.gen.a
        return a * a * u ** (n - 2) / (1.0 + a * u ** (n - 1))

    def _quad(self, f, lo, hi):
        if lo == hi:
            return 0.0
        val, err = quad(f, lo, hi, epsabs=self.quad_tol, epsrel=self.quad_tol,
                        limit=400)
        if err > 1e-9 * max(1.0, abs(val)):
            raise QuadratureFail(f"estimated error {err} on [{lo}, {hi}]")
        return val

    def _compute_t_sup(self):
        g = self.gen
        if g.kind == "flat" or math.isfinite(g.saturation):
            return math.inf
        if g.a < 0:
            return math.inf  # rho vanishes at the far end, the time diverges
        far = max(10.0, 4.0 * self.x0)
        tail = self._quad(lambda u: 1.0 / g.rho(u), far, np.inf)
        return self.abel_time(far) + tail

    @property
    def t_sup(self):
        return self._t_sup

    # -- the coordinate -----------------------------------------------------

    def abel_time(self, x):
        """t(x) = integral_{x0}^{x} du/rho(u); strictly increasing in x.

        Polynomial charts return floats; the flat chart returns an ``mpf``
        carrying enough digits that t(phi(x)) - t(x) is still meaningful.
        """
        if not x > 0:
            raise DomainError("Abel time is defined for x > 0")
        if self.gen.kind == "flat":
            return self._abel_flat(x)
        if x > self.domain_sup:
            raise DomainError(
                f"x={x} beyond the chart domain (rho positivity cap "
                f"{self.domain_sup:.6g})")
        key = float(x)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        g = self.gen
        if math.isinf(g.saturation):
            val = (self._lead(x) - self._lead(self.x0)
                   + (self._quad(self._g, self.x0, x) if g.a != 0.0 else 0.0))
        else:
            val = self._primitive_sat(x) - self._primitive_sat(self.x0)
        self._cache[key] = val
        return val

    def _primitive_sat(self, x):
        # piecewise primitive for a saturating generator, referenced at s0
        s0 = self.gen.guard * self.gen.saturation
        if x <= s0:
            return (self._lead(x) - self._lead(s0)
                    + self._quad(self._g, s0, x))
        return self._quad(lambda u: 1.0 / self.gen.rho(u), s0, x)

    # -- flat-generator machinery (adaptive precision) ----------------------

    @staticmethod
    def _flat_primitive(u):
        # primitive of e**(1/u): F(u) = u e**(1/u) - Ei(1/u)
        return u * mp.e ** (1 / u) - mp.ei(1 / u)

    @staticmethod
    def _dps_for_x(x):
        x = float(x)
        return 40 + (int(0.4343 / x) if x < 1.0 else 0)

    def _abel_flat(self, x):
        dps = max(self._dps_for_x(x), self._dps_for_x(self.x0))
        with mp.workdps(dps):
            return self._flat_primitive(mp.mpf(x)) - self._flat_primitive(
                mp.mpf(self.x0))

    def _invert_flat(self, s):
        # initial guess for F(y) = F(x0) + s
        sf = float(mp.mpf(s)) if not isinstance(s, float) else s
        if sf < -1e200 or math.isinf(sf):
            # asymptotics |t| ~ y**2 e**(1/y): solve L = log|t| + 2 log L
            with mp.workdps(30):
                logt = float(mp.log(abs(mp.mpf(s))))
            L = max(logt, 3.0)
            for _ in range(40):
                L = logt + 2.0 * math.log(L)
            guess = 1.0 / L
        else:
            from scipy.special import expi

            def f_float(u):
                return u * math.exp(1.0 / u) - expi(1.0 / u)

            base = f_float(self.x0)
            lo, hi = 1.0 / 600.0, max(4.0 * self.x0, 8.0)
            while f_float(hi) - base < sf:
                hi *= 2.0
                if hi > 1e12:
                    break
            if f_float(lo) - base > sf:
                with mp.workdps(30):
                    logt = float(mp.log(abs(mp.mpf(s)))) if sf != 0 else 0.0
                L = max(logt, 3.0)
                for _ in range(40):
                    L = logt + 2.0 * math.log(L)
                guess = 1.0 / L
            else:
                from scipy.optimize import brentq
                guess = brentq(lambda u: f_float(u) - base - sf, lo, hi,
                               xtol=1e-13, rtol=1e-12)
        dps = max(self._dps_for_x(guess), self._dps_for_x(self.x0)) + 10
        with mp.workdps(dps):
            target = self._flat_primitive(mp.mpf(self.x0)) + mp.mpf(s)
            y = mp.mpf(guess)
            tol = mp.mpf(10) ** (-(dps - 12))
            for _ in range(120):
                step = (self._flat_primitive(y) - target) * mp.e ** (-1 / y)
                y_new = y - step
                if y_new <= 0:
                    y_new = y / 2
                if abs(y_new - y) <= tol * y_new:
                    return y_new
                y = y_new
            raise NoConvergence("flat-chart inversion stalled")

    # -- inversion and flows -------------------------------------------------

    def invert_abel(self, s):
        """The unique x > 0 with abel_time(x) = s."""
        if self.gen.kind == "flat":
            return self._invert_flat(s)
        if s >= self._t_sup:
            raise BlowUp(f"target time {s} at or past the chart supremum "
                         f"{self._t_sup}")
        g = self.gen
        n = g.n
        # analytic guess from the leading primitive, then bracketed Newton
        lead0 = self._lead(self.x0)
        arg = (1 - n) * (s + lead0)
        guess = arg ** (1.0 / (1 - n)) if arg > 0 else self.x0
        lo, hi = None, None
        x = min(max(guess, 1e-280), self.domain_sup * 0.999999)
        t_x = self.abel_time(x)
        if t_x <= s:
            lo = x
            hi = min(2.0 * x, self.domain_sup)
            while self.abel_time(hi) < s:
                lo = hi
                hi = min(2.0 * hi, self.domain_sup)
                if hi >= self.domain_sup and self.abel_time(hi) < s:
                    raise BlowUp(f"target {s} beyond the certified domain")
        else:
            hi = x
            lo = 0.5 * x
            while self.abel_time(lo) > s:
                hi = lo
                lo *= 0.5
                if lo < 1e-300:
                    raise DomainError("inversion target below representable x")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            t_mid = self.abel_time(mid)
            if t_mid < s:
                lo = mid
            else:
                hi = mid
            x_new = mid + (s - t_mid) * g.rho(mid)
            if lo < x_new < hi:
                t_new = self.abel_time(x_new)
                if t_new < s:
                    lo = x_new
                else:
                    hi = x_new
            if hi - lo <= 1e-15 * hi:
                break
        return 0.5 * (lo + hi)

    def flow_map(self, t, x):
        """exp(t X)(x), via t(x) -> t(x) + t -> x."""
        if not x > 0:
            raise DomainError("flows are computed from x > 0")
        if self.gen.kind == "flat":
            # the sum must be formed at chart precision: t(x) can dwarf t
            with mp.workdps(self._dps_for_x(x) + 15):
                s = self._abel_flat(x) + mp.mpf(t)
            return self._invert_flat(s)
        s = self.abel_time(x) + t
        if s >= self._t_sup:
            raise BlowUp(
                f"time {t} from x={x} exceeds the remaining lifetime "
                f"{self._t_sup - self.abel_time(x):.6g}")
        return self.invert_abel(s)

    def remaining_lifetime(self, x):
        """Supremum of forward flow times defined from x (inf if complete)."""
        return self._t_sup - self.abel_time(x) if math.isfinite(self._t_sup) \
            else math.inf

    def max_start_for(self, time):
        """Largest start so that the time-``time`` flow stays certified."""
        if math.isinf(self._t_sup):
            return math.inf
        return self.invert_abel(self._t_sup - time) * (1.0 - 1e-9)

    def blowup_x(self, time=1.0):
        """Boundary start value for the time-``time`` map.

        For generators without finite escape time the certified domain cap
        plays this role (grid conventions rely on a finite value).
        """
        if math.isfinite(self._t_sup):
            return self.invert_abel(self._t_sup - time)
        return self.domain_sup


def flow_map(chart: AbelChart, t, x):
    """Module-level alias for chart.flow_map."""
    return chart.flow_map(t, x)


def abel_time(chart: AbelChart, x):
    """Module-level alias for chart.abel_time."""
    return chart.abel_time(x)


def fractional_iterate(phi, t, x):
    """phi**t for flow-generated phi: the time t*phi.time flow.

    Models the centralizer of phi as the 1-parameter group of its
    generator; anything without a generator is refused.
    """
    chart = getattr(phi, "chart", None)
    time = getattr(phi, "time", None)
    if chart is None or time is None:
        raise CentralizerNotFlow(
            f"{phi!r} carries no generator; fractional iterates undefined")
    if t == 0:
        return x
    if x == 0:
        return 0.0
    return chart.flow_map(t * time, x)


def koenigs(phi, x, rtol=1e-12, max_iter=200):
    """Linearizing coordinate at a hyperbolic (mu > 1) fixed point.

    sigma(x) = lim mu**k phi**(-k)(x), normalized with sigma'(0) = 1, so
    sigma(phi(x)) = mu sigma(x).  Inverse iterates contract to 0, making
    the limit geometric; forward iterates would escape and are never used.
    """
    mu = float(phi.jets(2).coefficients[1])
    if not mu > 1:
        raise NotExpanding("Koenigs limit requires phi'(0) > 1 (Case 1)")
    if x == 0:
        return 0.0
    y = float(x)
    scale = 1.0
    prev = None
    for _ in range(max_iter):
        y = phi.inverse_value(y)
        scale *= mu
        cur = scale * y
        if prev is not None and abs(cur - prev) <= rtol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise NoConvergence(f"Koenigs limit did not settle in {max_iter} steps")
