"""Arbitrary-precision arithmetic layer: normalized gamma factors, the optimal
complex AGM, inverse Mellin kernels for smoothed L-series summation, and
continued-fraction rational recognition.

All public entry points take the working precision in bits (``prec``) and do
their mpmath work inside ``mp.workprec`` so callers never see a mutated global
context.  Values are returned as mpmath ``mpf``/``mpc`` at that precision.
"""

from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpf, mpc

DEFAULT_PREC = 192  # bits; ~57 decimal digits, tolerances derive from this

# guard bits added inside numerically delicate routines
_GUARD = 24


class PoleError(ArithmeticError):
    """Evaluation at a pole of a gamma factor; carries the offending shift."""

    def __init__(self, shift, where):
        self.shift = shift
        self.where = where
        super().__init__(f"gamma factor with shift {shift} has a pole at s = {where}")


class ConvergenceError(ArithmeticError):
    pass


def fr2mp(x):
    """Exact Fraction/int -> mpf at the ambient working precision."""
    fr = Fraction(x)
    return mpf(fr.numerator) / fr.denominator


def prec_digits(prec):
    """Decimal digits carried by a binary precision."""
    return int(prec * 0.30102999566398119521) + 1


def to_mpc(x, prec=DEFAULT_PREC):
    with mp.workprec(prec):
        if isinstance(x, tuple):
            return mpc(mpf(x[0]), mpf(x[1]))
        return mpc(x)


def _is_nonpositive_even_int(z, tol):
    # real, even, <= 0 up to tol
    if abs(mp.im(z)) > tol:
        return False
    r = mp.re(z)
    n = mp.nint(r)
    return abs(r - n) <= tol and n <= 0 and mp.isint(n / 2)


################################################################
# normalized gamma factors
################################################################

def gamma_r(s, prec=DEFAULT_PREC):
    """pi^(-s/2) Gamma(s/2).  Poles at s = 0, -2, -4, ..."""
    with mp.workprec(prec + _GUARD):
        z = mpc(s)
        if _is_nonpositive_even_int(z, mpf(2) ** (-prec)):
            raise PoleError(0, z)
        val = mp.pi ** (-z / 2) * mp.gamma(z / 2)
    with mp.workprec(prec):
        return +val


def gamma_c(s, prec=DEFAULT_PREC):
    """2 (2 pi)^(-s) Gamma(s).  Poles at s = 0, -1, -2, ..."""
    with mp.workprec(prec + _GUARD):
        z = mpc(s)
        t = 2 * z  # reuse the even-integer test on 2s
        if _is_nonpositive_even_int(t, mpf(2) ** (-prec)):
            raise PoleError(0, z)
        val = 2 * (2 * mp.pi) ** (-z) * mp.gamma(z)
    with mp.workprec(prec):
        return +val


################################################################
# gamma shift multisets
################################################################

@dataclass(frozen=True)
class GammaShifts:
    """Multiset of rational shifts mu_j with L_inf(s) = prod_j Gamma_R(s + mu_j).

    A Gamma_C(s + mu) block always enters as the pair (mu, mu + 1).
    """

    shifts: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "shifts", tuple(sorted(Fraction(m) for m in self.shifts))
        )

    @property
    def degree(self):
        return len(self.shifts)

    @staticmethod
    def from_blocks(gamma_c_shifts=(), gamma_r_shifts=()):
        shifts = []
        for m in gamma_c_shifts:
            shifts += [Fraction(m), Fraction(m) + 1]
        shifts += [Fraction(m) for m in gamma_r_shifts]
        return GammaShifts(tuple(shifts))

    def l_infinity(self, s, prec=DEFAULT_PREC):
        with mp.workprec(prec + _GUARD):
            z = mpc(s)
            val = mpf(1)
            for m in self.shifts:
                val *= gamma_r(z + fr2mp(m), prec + _GUARD)
        with mp.workprec(prec):
            return +val

    def pole_at(self, n):
        """True if some Gamma_R(s + mu) has a pole at the integer s = n."""
        for m in self.shifts:
            t = Fraction(n) + m
            if t <= 0 and t.denominator == 1 and t % 2 == 0:
                return True
        return False

    def rightmost_pole(self):
        return max(-m for m in self.shifts)

    def residue_at(self, n, prec=DEFAULT_PREC):
        """Residue of prod Gamma_R(s + mu) at a simple pole s = n."""
        hits = [m for m in self.shifts if (Fraction(n) + m) <= 0
                and (Fraction(n) + m).denominator == 1 and (Fraction(n) + m) % 2 == 0]
        if len(hits) != 1:
            raise ValueError(f"pole at {n} is not simple (order {len(hits)})")
        m0 = hits[0]
        k = int(-(Fraction(n) + m0) // 2)  # Gamma(u) pole at u = -k
        with mp.workprec(prec + _GUARD):
            # Gamma_R(s+mu) = pi^(-(s+mu)/2) Gamma((s+mu)/2); d((s+mu)/2)/ds = 1/2
            res = mpf(2) * mp.pi ** (mpf(k)) * (-1) ** k / mp.factorial(k)
            for m in self.shifts:
                if m is not m0:
                    res *= gamma_r(mpf(n) + fr2mp(m), prec + _GUARD)
        with mp.workprec(prec):
            return +res


################################################################
# optimal complex AGM
################################################################

def _right_sqrt(x, anchor, prec):
    """Square root c of x with |anchor - c| <= |anchor + c|; ties broken by
    Im(c/anchor) > 0."""
    with mp.workprec(prec):
        c = mp.sqrt(x)
        dm, dp = abs(anchor - c), abs(anchor + c)
        if dm > dp:
            return -c
        if dm == dp and mp.im(c / anchor) < 0:
            return -c
        return c


def agm_complex(a, b, prec=DEFAULT_PREC):
    """Optimal arithmetic-geometric mean of two complex numbers.

    Each geometric-mean step takes the square root closer to the arithmetic
    mean (the "right" branch); this selects the limit relevant for period
    lattices and converges quadratically.
    """
    wp = prec + _GUARD
    with mp.workprec(wp):
        x, y = mpc(a), mpc(b)
        if x == 0 or y == 0 or x == -y:
            raise ValueError("agm undefined for a=0, b=0 or a=-b")
        eps = mpf(2) ** (-(prec + 8))
        for _ in range(prec + 64):
            if abs(x - y) <= eps * abs(x):
                break
            am = (x + y) / 2
            gm = _right_sqrt(x * y, am, wp)
            x, y = am, gm
        else:
            raise ConvergenceError("complex AGM did not converge")
        val = (x + y) / 2
    with mp.workprec(prec):
        return +val


################################################################
# rational recognition
################################################################

def rational_recognize(x, height_bound, prec=DEFAULT_PREC):
    """Recognize x as p/q with |p|, |q| <= height_bound via continued fractions.

    Returns (Fraction, residual) or None.  Absence of a small-height rational
    is a normal outcome, not an error.  The residual acceptance threshold is
    10^-(digits-10) at the working precision.
    """
    if height_bound < 1:
        raise ValueError("height_bound must be >= 1")
    digs = prec_digits(prec)
    with mp.workprec(prec):
        z = mpc(x)
        tol_im = mpf(10) ** (-(digs - 10))
        if abs(mp.im(z)) > tol_im:
            return None
        t = mp.re(z)
        # convergents of the continued fraction of t
        p0, q0, p1, q1 = 1, 0, int(mp.floor(t)), 1
        frac = t - mp.floor(t)
        best = (p1, q1)
        for _ in range(4 * digs):
            if abs(p1) > height_bound or q1 > height_bound:
                break
            best = (p1, q1)
            if frac == 0:
                break
            t = 1 / frac
            a = int(mp.floor(t))
            frac = t - mp.floor(t)
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        p, q = best
        cand = Fraction(p, q)
        residual = abs(z - mpf(p) / q)
        if residual < mpf(10) ** (-(digs - 10)):
            return cand, residual
        return None


################################################################
# inverse Mellin kernels
################################################################
#
# For a shift multiset {mu_j} let gamma(z) = prod_j Gamma_R(z + mu_j).  The
# kernel is its inverse Mellin transform
#
#     G(x) = (1/2 pi i) int_(c) gamma(z) x^(-z) dz ,
#
# and the smoothed-sum weights are the incomplete transforms
#
#     Phi(s, T) = int_T^oo G(x) x^(s-1) dx
#               = (1/2 pi i) int_(c) gamma(s + z) T^(-z) dz / z .
#
# Below a crossover x0 we sum the residue series over the poles of gamma
# (Laurent coefficients obtained once by circle quadrature, so coinciding
# poles need no perturbation); above it we integrate over a vertical line
# through the saddle of |gamma(z) x^(-z)|, which is the stable way to realize
# the saddle-point regime.  Kernel objects are cached per shift multiset.


class _PoleData:
    # one pole z0 of gamma, with Laurent coefficients c[-order..-1]
    __slots__ = ("z0", "order", "coeffs")

    def __init__(self, z0, order, coeffs):
        self.z0 = z0
        self.order = order
        self.coeffs = coeffs  # coeffs[l-1] = c_{-l}


class MellinKernel:
    """Inverse Mellin transform machinery for one gamma-shift multiset."""

    def __init__(self, shifts: GammaShifts, prec=DEFAULT_PREC):
        self.shifts = shifts.shifts
        self._distinct = sorted(
            (m, self.shifts.count(m)) for m in set(self.shifts))
        self.prec = prec
        self.degree = shifts.degree
        d = self.degree
        digs = prec_digits(prec)
        # crossover: keep the residue-series cancellation below ~30 digits;
        # the series loses about 0.87*d*pi*x^(2/d) digits at argument x
        self.x0 = max(1.0, (30.0 / (0.8686 * d * 3.14159265)) ** (d / 2.0))
        self._series_guard = int(3.33 * (0.8686 * d * 3.14159265 *
                                         self.x0 ** (2.0 / d))) + 48
        self._poles = None
        self._phi_contours = {}
        self._tail_digits = digs

    # ---- pole / Laurent data -------------------------------------------

    def _pole_orders(self, depth):
        """Map z0 -> order for all poles with Re z0 >= -depth."""
        orders = {}
        for m in self.shifts:
            k = 0
            while True:
                z0 = -m - 2 * k
                if z0 < -depth:
                    break
                orders[z0] = orders.get(z0, 0) + 1
                k += 1
        return orders

    def _laurent(self, depth):
        """Laurent principal parts of gamma(z) at every pole down to -depth.

        Coefficients come from trapezoidal quadrature on a small circle around
        each pole (spectrally accurate, no epsilon-splitting of multiple
        poles).  Within each residue class of poles mod 2, samples descend the
        pole ladder via Gamma_R(s - 2) = 2 pi Gamma_R(s) / (s - 2), so gamma
        itself is only evaluated on the topmost circle of each class.
        """
        if self._poles is not None and self._pole_depth >= depth:
            return self._poles
        wp = self.prec + self._series_guard
        orders = self._pole_orders(depth)
        digs = prec_digits(wp)
        locs = sorted(orders)
        gap = min((float(b - a) for a, b in zip(locs, locs[1:])), default=1.0)
        gap = min(gap, 1.0)
        # extraction error ~ (radius/gap)^nodes with radius = gap/4
        nodes = int(1.9 * (digs + 12) / max(0.1, gap)) + 16
        poles = []
        with mp.workprec(wp + 32):
            radius = mpf(gap) / 4
            circle = [radius * mp.exp(mpc(0, 2) * mp.pi * t / nodes)
                      for t in range(nodes)]
            # group pole locations by class mod 2
            classes = {}
            for z0 in orders:
                classes.setdefault(z0 % 2, []).append(z0)
            twopi = 2 * mp.pi
            for cls in classes.values():
                cls.sort(reverse=True)
                samples = None
                prev = None
                for z0 in cls:
                    z0m = fr2mp(z0)
                    if samples is None:
                        samples = [self._gamma_prod(z0m + w, wp + 32)
                                   for w in circle]
                    else:
                        # ladder by steps of 2 from the previous pole
                        steps = int((prev - z0) // 2)
                        for _ in range(steps):
                            zt = fr2mp(prev)
                            for t, w in enumerate(circle):
                                fac = mpc(1)
                                for m, mult in self._distinct:
                                    fac *= (twopi / (zt + w + fr2mp(m) - 2)) ** mult
                                samples[t] *= fac
                            prev -= 2
                    prev = z0
                    r = orders[z0]
                    coeffs = []
                    for el in range(1, r + 1):
                        acc = mpc(0)
                        for t, w in enumerate(circle):
                            acc += samples[t] * w ** el
                        coeffs.append(acc / nodes)
                    poles.append(_PoleData(z0, r, coeffs))
        poles.sort(key=lambda P: P.z0, reverse=True)
        self._poles = poles
        self._pole_depth = depth
        return poles

    def _gamma_prod(self, z, prec):
        with mp.workprec(prec):
            val = mpc(1)
            for m, mult in self._distinct:
                u = (z + fr2mp(m)) / 2
                val *= (mp.pi ** (-u) * mp.gamma(u)) ** mult
            return val

    def _series_depth(self, x):
        # powers x^(mu+2k) decay only through the 1/k! in the coefficients;
        # stop once pi^(d... ) x^(2k) / (k!)^(2/d)-type terms are negligible
        d = self.degree
        digs = self._tail_digits
        k = 4
        while k < 4000:
            # stop when (pi^(d/2) x^2)^k / Gamma(2k/d + 1) is negligible
            t = (k * (2 * float(mp.log(mpf(x))) + 0.5 * d * 1.1447299)
                 - float(mp.loggamma(2.0 * k / d + 1)))
            if t < -(digs + 12) * 2.302585:
                break
            k += 4
        return int(max(-min(self.shifts), 0)) + 2 * k

    # ---- kernel value G(x) ----------------------------------------------

    def kernel(self, x):
        """G(x) for real x > 0."""
        x = mpf(x)
        if x <= 0:
            raise ValueError("kernel argument must be positive")
        if x < self.x0:
            return self._kernel_series(x)
        return self._kernel_saddle(x)

    def _kernel_series(self, x):
        depth = self._series_depth(x)
        poles = self._laurent(depth)
        wp = self.prec + self._series_guard
        with mp.workprec(wp):
            lx = mp.log(mpf(x))
            total = mpc(0)
            for P in poles:
                if P.z0 < -depth:
                    continue
                # res gamma(z) x^(-z) at z0: x^(-z0) sum_l c_{-l} (-log x)^(l-1)/(l-1)!
                loc = mpc(0)
                for el in range(1, P.order + 1):
                    loc += P.coeffs[el - 1] * (-lx) ** (el - 1) / mp.factorial(el - 1)
                total += mpf(x) ** fr2mp(-P.z0) * loc
        with mp.workprec(self.prec):
            return mp.re(+total)

    def _saddle_abscissa(self, logx):
        # solve (d/dc) [log gamma(c) - c log x] = 0 on the real axis
        lo = self.rightmost_pole_float() + 0.5

        def f(c):
            acc = mpf(0)
            for m in self.shifts:
                acc += -mp.log(mp.pi) / 2 + mp.digamma((c + fr2mp(m)) / 2) / 2
            return acc - logx

        with mp.workprec(64):
            c = mpf(max(lo + 1.0, 2.0))
            # expand until f(c) > 0
            while f(c) < 0:
                c *= 2
                if c > 1e9:
                    raise ConvergenceError("saddle search diverged")
            hi = c
            lo_ = mpf(lo)
            for _ in range(80):
                mid = (lo_ + hi) / 2
                if f(mid) < 0:
                    lo_ = mid
                else:
                    hi = mid
            return float(hi)

    def rightmost_pole_float(self):
        return float(max(-m for m in self.shifts))

    def _kernel_saddle(self, x):
        """Vertical-line Mellin-Barnes integral through the saddle point."""
        digs = self._tail_digits
        wp = self.prec + _GUARD
        with mp.workprec(wp):
            lx = mp.log(mpf(x))
            c = self._saddle_abscissa(lx)
            strip = c - self.rightmost_pole_float()
            # trapezoid step from the analyticity strip, range from gamma decay
            target = (digs + 10) * 2.302585
            h = 2 * 3.14159265 * strip / (target + abs(float(lx)) * strip + 10)
            d = self.degree
            R = 4.0 * target / (d * 3.14159265) + 10.0 / d + 2.0
            n = int(R / h) + 1
            acc = mpc(0)
            for j in range(-n, n + 1):
                z = mpc(c, j * h)
                acc += self._gamma_prod(z, wp) * mp.exp(-z * lx)
            val = acc * h / (2 * mp.pi)
        with mp.workprec(self.prec):
            return mp.re(+val)

    # ---- incomplete transforms Phi(s, T) --------------------------------

    def _contour_for(self, s_key, lt_min, lt_max):
        """Precompute trapezoid nodes/weights for Phi(s, .) on a T-range."""
        key = (s_key, round(lt_min, 3), round(lt_max, 3))
        if key in self._phi_contours:
            return self._phi_contours[key]
        digs = self._tail_digits
        wp = self.prec + 2 * _GUARD
        with mp.workprec(wp):
            s = mpc(s_key[0], s_key[1])
            # contour must run right of z = 0 and of all poles of gamma(s+z)
            rp = self.rightmost_pole_float() - float(mp.re(s))
            c = max(rp, 0.0) + 4.0
            strip = 3.9
            target = (digs + 8) * 2.302585
            osc = max(abs(lt_min), abs(lt_max))
            h = 2 * 3.14159265 * strip / (target + osc * strip + 8)
            d = self.degree
            R = 4.0 * target / (d * 3.14159265) + 12.0 / d + 3.0
            n = int(R / h) + 1
            # extra digits lost to T^(-c) growth at the smallest T
            guard = int(max(0.0, -lt_min) * c * 1.4427) + 16
            nodes = []
            with mp.workprec(wp + guard):
                for j in range(-n, n + 1):
                    z = mpc(c, j * h)
                    w = self._gamma_prod(s + z, wp + guard) / z * (h / (2 * mp.pi))
                    nodes.append((z, w))
        data = (nodes, c)
        self._phi_contours[key] = data
        return data

    def phi_contour(self, s, T, lt_min=None, lt_max=None):
        """Phi(s, T) by the precomputed vertical-line quadrature."""
        s = mpc(s)
        T = mpf(T)
        lt = mp.log(T)
        if lt_min is None:
            lt_min = float(lt)
        if lt_max is None:
            lt_max = float(lt)
        nodes, c = self._contour_for((float(mp.re(s)), float(mp.im(s))),
                                     lt_min, lt_max)
        wp = self.prec + 2 * _GUARD + int(max(0.0, -float(lt)) * c * 1.4427) + 16
        with mp.workprec(wp):
            acc = mpc(0)
            for z, w in nodes:
                acc += w * mp.exp(-z * lt)
        with mp.workprec(self.prec):
            return +acc

    def phi_series(self, s, T):
        """Phi(s, T) = gamma(s) - int_0^T, valid when gamma(s) is finite and
        no pole of gamma sits at -s (use phi_contour otherwise)."""
        s = mpc(s)
        T = mpf(T)
        depth = self._series_depth(T)
        poles = self._laurent(depth)
        wp = self.prec + self._series_guard
        with mp.workprec(wp):
            lT = mp.log(T)
            total = self._gamma_prod(s, wp)
            for P in poles:
                a = s + fr2mp(-P.z0)  # exponent in int_0^T x^(a-1) log^i x
                # int_0^T x^(a-1) (-log x)^(l-1)/(l-1)! dx, assembled per order
                for el in range(1, P.order + 1):
                    cl = P.coeffs[el - 1]
                    # I_j = int_0^T x^(a-1) log^j x dx; closed form by parts
                    j = el - 1
                    term = mpc(0)
                    for i in range(j + 1):
                        term += ((-1) ** (j - i) * mp.factorial(j) / mp.factorial(i)
                                 * lT ** i / a ** (j - i + 1))
                    total -= cl * (-1) ** j / mp.factorial(j) * T ** a * term
        with mp.workprec(self.prec):
            return +total

    def phi(self, s, T, lt_min=None, lt_max=None):
        """Incomplete Mellin transform Phi(s, T), choosing series vs contour."""
        T = mpf(T)
        s = mpc(s)
        if T < self.x0 and not self._split_invalid(s):
            return self.phi_series(s, T)
        return self.phi_contour(s, T, lt_min, lt_max)

    def _split_invalid(self, s):
        # gamma(s + z)/z has a double pole at z = 0 when gamma itself has a
        # pole at s; the series split also breaks when s hits a pole exponent
        if abs(mp.im(s)) > 1e-9:
            return False
        sr = mp.re(s)
        for m in self.shifts:
            t = sr + fr2mp(m)
            n = mp.nint(t)
            if abs(t - n) < mpf(2) ** (-self.prec // 2) and n <= 0 and mp.isint(n / 2):
                return True
        return False

    def phi_s_derivative(self, s, T, lt_min=None, lt_max=None):
        """d/ds Phi(s, T), via the contour with a digamma-sum factor."""
        s = mpc(s)
        T = mpf(T)
        lt = mp.log(T)
        if lt_min is None:
            lt_min = float(lt)
        if lt_max is None:
            lt_max = float(lt)
        key = ("dlog",) + (float(mp.re(s)), float(mp.im(s)),
                           round(lt_min, 3), round(lt_max, 3))
        data = self._phi_contours.get(key)
        digs = self._tail_digits
        wp = self.prec + 2 * _GUARD
        if data is None:
            base, c = self._contour_for((float(mp.re(s)), float(mp.im(s))),
                                        lt_min, lt_max)
            guard = int(max(0.0, -lt_min) * c * 1.4427) + 16
            nodes = []
            with mp.workprec(wp + guard):
                for z, w in base:
                    dl = mpc(0)
                    for m in self.shifts:
                        u = (s + z + fr2mp(m)) / 2
                        dl += -mp.log(mp.pi) / 2 + mp.digamma(u) / 2
                    nodes.append((z, w * dl))
            data = (nodes, c)
            self._phi_contours[key] = data
        nodes, c = data
        wp2 = self.prec + 2 * _GUARD + int(max(0.0, -float(lt)) * c * 1.4427) + 16
        with mp.workprec(wp2):
            acc = mpc(0)
            for z, w in nodes:
                acc += w * mp.exp(-z * lt)
        with mp.workprec(self.prec):
            return +acc

    def tail_negligible_from(self, scale=1.0):
        """Smallest X with |Phi(s, x)| < 10^-(digits+5) * scale for x >= X."""
        d = self.degree
        digs = self._tail_digits
        t = (digs + 8) * 2.302585 + abs(float(mp.log(mpf(scale)))) if scale != 1.0 else (digs + 8) * 2.302585
        return (t / (d * 3.14159265)) ** (d / 2.0) + self.x0


_kernel_cache = {}


def get_kernel(shifts: GammaShifts, prec=DEFAULT_PREC) -> MellinKernel:
    key = (shifts.shifts, prec)
    if key not in _kernel_cache:
        _kernel_cache[key] = MellinKernel(shifts, prec)
    return _kernel_cache[key]


def inv_mellin_kernel(shifts: GammaShifts, x, prec=DEFAULT_PREC):
    """G(x): inverse Mellin transform of prod_j Gamma_R(s + mu_j) at x > 0."""
    if shifts.degree == 0:
        raise ValueError("empty shift multiset")
    return get_kernel(shifts, prec).kernel(x)
