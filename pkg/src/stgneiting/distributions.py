"""Random-variate toolkit.

All samplers take a ``numpy.random.Generator`` (or anything accepted by
:func:`stgneiting.rng.as_generator`) and follow numpy's ``size`` convention:
``size=None`` returns a Python float, otherwise an array.

Conventions
-----------
* Gamma laws are parametrized by shape and *rate*.
* ``sample_symmetric_stable(alpha)`` has characteristic function
  ``exp(-|u|**alpha)``; ``alpha=2`` is therefore N(0, 2).
* ``sample_unilateral_stable(beta)`` has Laplace transform ``exp(-s**beta)``;
  the tilted version has ``exp(tilt**beta - (tilt + s)**beta)``.
"""

from __future__ import annotations

import math

import numpy as np

from .rng import as_generator

_C1 = math.sqrt(math.pi / 2.0)

# tilt at or below which the tilted stable law is drawn by plain rejection
TILT_SWITCH = 1.0


def _finish(x, size):
    if size is None:
        return float(np.asarray(x).reshape(-1)[0])
    return x


def _n(size):
    return 1 if size is None else size


def sample_gaussian_vector(dim: int, variance: float, rng, size=None):
    """I.i.d. centered Gaussian coordinates; shape ``(dim,)`` or ``(size, dim)``."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if not variance > 0:
        raise ValueError("variance must be > 0")
    gen = as_generator(rng)
    shape = (dim,) if size is None else (size, dim)
    return gen.normal(0.0, math.sqrt(variance), size=shape)


def sample_gamma(shape: float, rate: float, rng, size=None):
    if not (shape > 0 and rate > 0):
        raise ValueError("gamma shape and rate must be > 0")
    gen = as_generator(rng)
    return _finish(gen.gamma(shape, 1.0 / rate, size=_n(size)), size)


def sample_cauchy(scale: float, rng, size=None):
    """Centered Cauchy law with CF ``exp(-scale*|u|)``."""
    if scale < 0:
        raise ValueError("scale must be >= 0")
    gen = as_generator(rng)
    return _finish(scale * gen.standard_cauchy(size=_n(size)), size)


def sample_symmetric_stable(alpha: float, rng, size=None):
    """Chambers-Mallows-Stuck draw with CF ``exp(-|u|**alpha)``."""
    if not 0 < alpha <= 2:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    gen = as_generator(rng)
    n = _n(size)
    if alpha == 2:
        return _finish(gen.normal(0.0, math.sqrt(2.0), size=n), size)
    v = gen.uniform(-math.pi / 2, math.pi / 2, size=n)
    if alpha == 1:
        return _finish(np.tan(v), size)
    w = gen.standard_exponential(size=n)
    x = (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
         * (np.cos(v - alpha * v) / w) ** ((1.0 - alpha) / alpha))
    return _finish(x, size)


def _sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


def _zolotarev(u, beta):
    """Zolotarev's function A(u) on (0, pi)."""
    return ((beta * _sinc(beta * u)) ** beta
            * ((1 - beta) * _sinc((1 - beta) * u)) ** (1 - beta)
            / _sinc(u)) ** (1.0 / (1 - beta))


def sample_unilateral_stable(beta: float, rng, size=None):
    """Positive stable law with Laplace transform ``exp(-s**beta)`` (Kanter)."""
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    gen = as_generator(rng)
    n = _n(size)
    if beta == 1:
        return _finish(np.ones(n), size)
    u = gen.uniform(0.0, math.pi, size=n)
    e = gen.standard_exponential(size=n)
    return _finish((_zolotarev(u, beta) / e) ** ((1 - beta) / beta), size)


def _sinc1(x):
    return math.sin(x) / x if x else 1.0


def _zolotarev1(u, beta):
    return ((beta * _sinc1(beta * u)) ** beta
            * ((1 - beta) * _sinc1((1 - beta) * u)) ** (1 - beta)
            / _sinc1(u)) ** (1.0 / (1 - beta))


def _plain_rejection(beta, tilt, n, gen):
    if n == 1:
        # scalar path; ensemble builders draw one variate at a time
        trials = 0
        while True:
            trials += 1
            u = gen.uniform(0.0, math.pi)
            s = (_zolotarev1(u, beta) / gen.standard_exponential()) ** ((1 - beta) / beta)
            if gen.random() <= math.exp(-tilt * s):
                return np.array([s]), trials
    out = np.empty(n)
    pending = np.arange(n)
    trials = 0
    while pending.size:
        s = sample_unilateral_stable(beta, gen, size=pending.size)
        v = gen.random(pending.size)
        trials += pending.size
        ok = v <= np.exp(-tilt * s)
        out[pending[ok]] = s[ok]
        pending = pending[~ok]
    return out, trials


class _DoubleRejection:
    """Devroye's double-rejection sampler for the exponentially tilted
    positive stable law, vectorized over a batch of draws."""

    def __init__(self, beta, tilt):
        a = beta
        self.a = a
        self.tilt = tilt
        self.b = (1 - a) / a
        self.lam_a = tilt ** a
        self.gamma = self.lam_a * a * (1 - a)
        self.sg = math.sqrt(self.gamma)
        c3 = (2 + _C1) * self.sg
        self.xi = (1 + math.sqrt(2) * c3) / math.pi
        self.psi = c3 * math.exp(-self.gamma * math.pi ** 2 / 8) / math.sqrt(math.pi)

    def _proposal_u(self, m, gen):
        w1 = _C1 * self.xi / self.sg
        w2 = 2 * math.sqrt(math.pi) * self.psi
        w3 = self.xi * math.pi
        v = gen.random(m)
        w = gen.random(m)
        tail = math.pi * (1 - w * w)
        if self.gamma >= 1:
            head = np.abs(gen.standard_normal(m)) / self.sg
            return np.where(v < w1 / (w1 + w2), head, tail)
        return np.where(v < w3 / (w2 + w3), math.pi * w, tail)

    def _aux(self, m, gen):
        a, sg = self.a, self.sg
        U = np.empty(m)
        Z = np.empty(m)
        zz = np.empty(m)
        pending = np.arange(m)
        while pending.size:
            k = pending.size
            u = self._proposal_u(k, gen)
            inside = (u > 0) & (u < math.pi)
            uc = np.where(inside, u, 1.0)
            zeta = np.sqrt(_sinc(uc) / (_sinc(a * uc) ** a * _sinc((1 - a) * uc) ** (1 - a)))
            z = 1 / (1 - (1 + a * zeta / sg) ** (-1 / a))
            d = np.zeros(k)
            if self.gamma >= 1:
                d += np.where(u >= 0, self.xi * np.exp(-self.gamma * u * u / 2), 0.0)
            else:
                d += np.where((u >= 0) & (u <= math.pi), self.xi, 0.0)
            d += np.where(inside, self.psi / np.sqrt(np.abs(math.pi - uc)), 0.0)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                rho = (math.pi * np.exp(-self.lam_a * (1 - 1 / zeta ** 2))
                       / ((1 + _C1) * sg / zeta + z) * d)
                zu = gen.random(k) * rho
                ok = inside & (zu <= 1)
            idx = pending[ok]
            U[idx], Z[idx], zz[idx] = u[ok], zu[ok], z[ok]
            pending = pending[~ok]
        return U, Z, zz

    def _aux1(self, gen):
        a, sg = self.a, self.sg
        w1 = _C1 * self.xi / self.sg
        w2 = 2 * math.sqrt(math.pi) * self.psi
        w3 = self.xi * math.pi
        while True:
            v, w = gen.random(), gen.random()
            if self.gamma >= 1:
                head = abs(gen.standard_normal()) / sg
                u = head if v < w1 / (w1 + w2) else math.pi * (1 - w * w)
            else:
                u = math.pi * w if v < w3 / (w2 + w3) else math.pi * (1 - w * w)
            if not 0 < u < math.pi:
                continue
            zeta = math.sqrt(_sinc1(u) / (_sinc1(a * u) ** a * _sinc1((1 - a) * u) ** (1 - a)))
            z = 1 / (1 - (1 + a * zeta / sg) ** (-1 / a))
            d = self.xi * math.exp(-self.gamma * u * u / 2) if self.gamma >= 1 else self.xi
            d += self.psi / math.sqrt(math.pi - u)
            try:
                rho = (math.pi * math.exp(-self.lam_a * (1 - 1 / zeta ** 2))
                       / ((1 + _C1) * sg / zeta + z) * d)
            except OverflowError:
                rho = math.inf
            zu = gen.random() * rho
            if zu <= 1:
                return u, zu, z

    def _sample1(self, gen):
        a, b = self.a, self.b
        trials = 0
        while True:
            trials += 1
            U, Z, z = self._aux1(gen)
            A = _zolotarev1(U, a)
            m = (b / A) ** a * self.lam_a
            delta = math.sqrt(m * a / A)
            a1 = delta * _C1
            a3 = z / A
            s = a1 + delta + a3
            v2 = gen.random()
            nrm = gen.standard_normal()
            uni = gen.random()
            e1 = gen.standard_exponential()
            if v2 < a1 / s:
                X = m - delta * abs(nrm)
                pen = nrm * nrm / 2
            elif v2 < (a1 + delta) / s:
                X = m + delta * uni
                pen = 0.0
            else:
                X = m + delta + e1 * a3
                pen = e1
            if X <= 0:
                continue
            c = A * (X - m) + self.tilt * m ** (-b) * ((m / X) ** b - 1) - pen
            if Z > 0 and c <= -math.log(Z):
                return X ** (-b), trials

    def sample(self, n, gen):
        a, b = self.a, self.b
        if n == 1:
            x, trials = self._sample1(gen)
            return np.array([x]), trials
        out = np.empty(n)
        pending = np.arange(n)
        trials = 0
        while pending.size:
            k = pending.size
            U, Z, z = self._aux(k, gen)
            A = _zolotarev(U, a)
            m = (b / A) ** a * self.lam_a
            delta = np.sqrt(m * a / A)
            a1 = delta * _C1
            a3 = z / A
            s = a1 + delta + a3
            v2 = gen.random(k)
            nrm = gen.standard_normal(k)
            uni = gen.random(k)
            e1 = gen.standard_exponential(k)
            left = v2 < a1 / s
            mid = ~left & (v2 < (a1 + delta) / s)
            right = ~left & ~mid
            X = np.where(left, m - delta * np.abs(nrm),
                         np.where(mid, m + delta * uni, m + delta + e1 * a3))
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                c = A * (X - m) + self.tilt * m ** (-b) * ((m / X) ** b - 1)
                c = c - np.where(left, nrm * nrm / 2, 0.0) - np.where(right, e1, 0.0)
                ok = (X > 0) & (c <= -np.log(Z))
            trials += k
            out[pending[ok]] = X[ok] ** (-b)
            pending = pending[~ok]
        return out, trials


def tilted_stable_draws(beta: float, tilt: float, n: int, rng, method: str = "auto"):
    """Draw ``n`` tilted stable variates and report the outer acceptance rate.

    ``method`` is ``"auto"``, ``"double"`` (double rejection) or ``"plain"``
    (rejection from the untilted law).  Returns ``(samples, acceptance_rate)``.
    """
    if method not in ("auto", "double", "plain"):
        raise ValueError(f"unknown method {method!r}")
    if not 0 < beta <= 1:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    if tilt < 0:
        raise ValueError(f"tilt must be >= 0, got {tilt}")
    gen = as_generator(rng)
    if beta == 1:
        return np.ones(n), 1.0
    if method == "double" and tilt == 0:
        raise ValueError("double rejection needs tilt > 0")
    if method == "plain" or (method == "auto" and tilt <= TILT_SWITCH):
        x, trials = _plain_rejection(beta, tilt, n, gen)
    else:
        x, trials = _DoubleRejection(beta, tilt).sample(n, gen)
    return x, n / trials if trials else 1.0


def sample_tilted_unilateral_stable(beta: float, tilt: float, rng, size=None):
    """Exponentially tilted positive stable law.

    Laplace transform ``exp(tilt**beta - (tilt + s)**beta)``.  ``beta=1`` is
    the point mass at 1.  Small tilts use rejection from the untilted law,
    larger ones Devroye's double rejection, whose acceptance rate does not
    degrade as the tilt grows.
    """
    x, _ = tilted_stable_draws(beta, tilt, _n(size), rng)
    return _finish(x, size)


def truncation_order(lam: float, eps: float) -> int:
    """Number of shot-noise terms leaving a residual variance fraction below eps."""
    if not lam > 0:
        raise ValueError("lam must be > 0")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return max(1, math.ceil(-math.log(eps) / math.log1p(2.0 / lam)))


def sample_poisson_times_logintensity(a: float, lam: float, eps: float, rng, size=None):
    """First ``n0`` points of a Poisson process with intensity ``lam/t`` on ``t >= a``.

    Points are obtained by time-change inversion of a unit-rate process,
    ``T_n = a / (U_1 ... U_n)**(1/lam)``, and the list stops at
    :func:`truncation_order`.  Returns shape ``(n0,)`` or ``(size, n0)``.
    """
    if not a > 1:
        raise ValueError("a must be > 1")
    n0 = truncation_order(lam, eps)
    gen = as_generator(rng)
    shape = (n0,) if size is None else (size, n0)
    # E_1 + ... + E_n = -ln(U_1 ... U_n)
    cum = np.cumsum(gen.standard_exponential(shape), axis=-1)
    return a * np.exp(cum / lam)


def sample_compound_poisson(intensity: float, jump_sampler, rng, size=None):
    """Sum of N ~ Poisson(intensity) i.i.d. jumps.

    ``jump_sampler(n, generator)`` must return ``n`` jumps.  The result is
    exactly 0 whenever N = 0.
    """
    if intensity < 0:
        raise ValueError("intensity must be >= 0")
    gen = as_generator(rng)
    m = _n(size)
    counts = gen.poisson(intensity, size=m)
    total = int(counts.sum())
    if total == 0:
        return _finish(np.zeros(m), size)
    jumps = np.asarray(jump_sampler(total, gen), dtype=float)
    owner = np.repeat(np.arange(m), counts)
    return _finish(np.bincount(owner, weights=jumps, minlength=m), size)
