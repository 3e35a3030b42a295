"""
Copula Models Module - Parametric copula families used as data-generating processes and ground truth

Families: Gumbel-Hougaard, outer-power Clayton, t (equicorrelation) and the
bivariate extreme-value copula attracting the t-copula. Every model is an
immutable dataclass validated at construction; point arguments may be a
single point of shape (d,) or a batch of shape (k, d).
"""
import math
from dataclasses import dataclass
from typing import Callable, Dict, Mapping, Optional, Tuple, Union

import numpy as np
from scipy import integrate, optimize, stats

import config
from modules.errors import InvalidModelError, UnsupportedModelError

ArrayLike = Union[np.ndarray, list, tuple]


@dataclass(frozen=True)
class SecondOrderData:
    """Second-order expansion C_m - C_inf = phi(m) * S + o(phi(m))"""
    rho_phi: float
    phi: Callable[[int], float]
    S: Optional[Callable[[ArrayLike], Union[float, np.ndarray]]] = None


def _as_points(u: ArrayLike, d: int) -> Tuple[np.ndarray, bool]:
    """
    Normalise a point or batch of points to a (k, d) float array.

    Args:
        u: Point of shape (d,) or batch of shape (k, d)
        d: Expected dimension

    Returns:
        (points, single) where single tells whether a lone point was passed

    Raises:
        InvalidModelError: on dimension mismatch or coordinates outside [0, 1]
    """
    arr = np.asarray(u, dtype=float)
    single = arr.ndim == 1
    points = np.atleast_2d(arr)
    if points.ndim != 2 or points.shape[1] != d:
        raise InvalidModelError(
            f"Dimension mismatch: expected points with {d} coordinates, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(points)) or np.any(points < 0.0) or np.any(points > 1.0):
        raise InvalidModelError("Copula arguments must lie in [0, 1]")
    return points, single


def _finish(values: np.ndarray, single: bool):
    return float(values[0]) if single else values


def _neg_log(points: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return -np.log(points)


def _check_dimension(d) -> int:
    if isinstance(d, bool) or int(d) != d or int(d) < 2:
        raise InvalidModelError(f"Dimension d must be an integer >= 2, got {d}")
    return int(d)


def _positive_stable(alpha: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """
    Draw positive stable variates with Laplace transform exp(-s^alpha).

    Uses Kanter's representation; alpha = 1 is the point mass at 1.
    """
    if alpha >= 1.0:
        return np.ones(size)
    angle = np.pi * (1.0 - rng.random(size))  # (0, pi]
    w = rng.exponential(1.0, size)
    return (
        np.sin(alpha * angle) / np.sin(angle) ** (1.0 / alpha)
        * (np.sin((1.0 - alpha) * angle) / w) ** ((1.0 - alpha) / alpha)
    )


def _central_diff(f: Callable[[float], float], x: float, h: float) -> float:
    # one-sided at the lower boundary of the nonnegative orthant
    lo = max(x - h, 0.0)
    return (f(x + h) - f(lo)) / (x + h - lo)


class CopulaModel:
    """
    Common interface of every copula family.

    Subclasses supply ``_log_cdf_x`` (log C evaluated at x = -log u) and the
    family specific sampler; everything else is derived here.
    """
    family: str = ""
    d: int = 2

    # -- evaluation -----------------------------------------------------
    def _log_cdf_x(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, u: ArrayLike):
        points, single = _as_points(u, self.d)
        return _finish(np.exp(self._log_cdf_x(_neg_log(points))), single)

    def block_copula(self, u: ArrayLike, m: float):
        """
        Copula of componentwise maxima of m i.i.d. rows: C(u^{1/m})^m.

        Args:
            u: Point or batch in [0, 1]^d
            m: Block size (> 0)

        Returns:
            C_m(u), evaluated in log space
        """
        if m <= 0:
            raise InvalidModelError(f"Block size must be positive, got {m}")
        points, single = _as_points(u, self.d)
        x = _neg_log(points) / m
        with np.errstate(invalid="ignore"):
            values = np.exp(m * self._log_cdf_x(x))
        return _finish(np.nan_to_num(values, nan=0.0), single)

    # -- extreme-value side ---------------------------------------------
    def attractor(self) -> "CopulaModel":
        raise UnsupportedModelError(f"No known attractor for {self.describe()}")

    def limit_copula(self, u: ArrayLike):
        return self.attractor().cdf(u)

    def limit_partial_derivative(self, j: int, u: ArrayLike):
        return self.attractor().limit_partial_derivative(j, u)

    def second_order(self) -> SecondOrderData:
        raise UnsupportedModelError(f"No second-order data for {self.describe()}")

    def second_order_S(self, u: ArrayLike):
        S = self.second_order().S
        if S is None:
            raise UnsupportedModelError(f"Second-order function S unavailable for {self.describe()}")
        return S(u)

    # -- sampling -------------------------------------------------------
    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def _check_n(self, n) -> int:
        if isinstance(n, bool) or int(n) != n or int(n) < 1:
            raise InvalidModelError(f"Sample size must be a positive integer, got {n}")
        return int(n)

    # -- serialisation --------------------------------------------------
    def to_config(self) -> Dict[str, str]:
        raise NotImplementedError

    def describe(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.to_config().items() if k != "family")
        return f"{self.family}({params})"


@dataclass(frozen=True)
class GumbelHougaard(CopulaModel):
    """Gumbel-Hougaard copula exp{-(sum (-log u_j)^beta)^(1/beta)}; beta = 1 is independence"""
    beta: float
    d: int = 2
    family = "gumbel_hougaard"

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta < 1.0:
            raise InvalidModelError(f"Gumbel-Hougaard requires beta >= 1, got {self.beta}")
        object.__setattr__(self, "d", _check_dimension(self.d))

    def _exponent(self, x: np.ndarray) -> np.ndarray:
        return np.sum(x ** self.beta, axis=1) ** (1.0 / self.beta)

    def _log_cdf_x(self, x: np.ndarray) -> np.ndarray:
        return -self._exponent(x)

    def attractor(self) -> "GumbelHougaard":
        return self

    @property
    def kendall_tau(self) -> float:
        return 1.0 - 1.0 / self.beta

    def limit_partial_derivative(self, j: int, u: ArrayLike):
        """
        First order partial derivative of C_inf with respect to u_j.

        Args:
            j: Zero-based coordinate index
            u: Point or batch of points

        Returns:
            C(u) * s^{1/beta - 1} * x_j^{beta - 1} / u_j with s = sum x^beta;
            0 where u_j is 0 or 1
        """
        if not 0 <= j < self.d:
            raise InvalidModelError(f"Coordinate index {j} out of range for d={self.d}")
        points, single = _as_points(u, self.d)
        x = _neg_log(points)
        out = np.zeros(points.shape[0])
        interior = (points[:, j] > 0.0) & (points[:, j] < 1.0) & np.all(points > 0.0, axis=1)
        if np.any(interior):
            xi = x[interior]
            s = np.sum(xi ** self.beta, axis=1)
            c = np.exp(-s ** (1.0 / self.beta))
            out[interior] = c * s ** (1.0 / self.beta - 1.0) * xi[:, j] ** (self.beta - 1.0) / points[interior, j]
        return _finish(out, single)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Positive-stable frailty construction (Marshall-Olkin)"""
        n = self._check_n(n)
        frailty = _positive_stable(1.0 / self.beta, n, rng)
        e = rng.exponential(1.0, size=(n, self.d))
        return np.exp(-(e / frailty[:, None]) ** (1.0 / self.beta))

    def to_config(self) -> Dict[str, str]:
        return {"family": self.family, "d": str(self.d), "beta": repr(self.beta)}


@dataclass(frozen=True)
class OuterPowerClayton(CopulaModel):
    """Outer-power Clayton copula [1 + {sum (u_j^-theta - 1)^beta}^(1/beta)]^(-1/theta)"""
    theta: float
    beta: float
    d: int = 2
    family = "outer_power_clayton"

    def __post_init__(self):
        if not math.isfinite(self.theta) or self.theta <= 0.0:
            raise InvalidModelError(f"Outer-power Clayton requires theta > 0, got {self.theta}")
        if not math.isfinite(self.beta) or self.beta < 1.0:
            raise InvalidModelError(f"Outer-power Clayton requires beta >= 1, got {self.beta}")
        object.__setattr__(self, "d", _check_dimension(self.d))

    def _log_cdf_x(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            s = np.sum(np.expm1(self.theta * x) ** self.beta, axis=1)
            return -np.log1p(s ** (1.0 / self.beta)) / self.theta

    def attractor(self) -> GumbelHougaard:
        return GumbelHougaard(beta=self.beta, d=self.d)

    @property
    def kendall_tau(self) -> float:
        return 1.0 - 2.0 / (self.beta * (self.theta + 2.0))

    def second_order(self) -> SecondOrderData:
        return SecondOrderData(rho_phi=-1.0, phi=lambda m: 1.0 / (2.0 * m), S=self._second_order_S)

    def _second_order_S(self, u: ArrayLike):
        points, single = _as_points(u, self.d)
        if np.any(points <= 0.0) or np.any(points >= 1.0):
            raise InvalidModelError("S is evaluated at interior points only")
        x = _neg_log(points)
        s = np.sum(x ** self.beta, axis=1)
        limit = np.exp(-s ** (1.0 / self.beta))
        lam = limit * (s ** (2.0 / self.beta) - s ** (1.0 / self.beta - 1.0) * np.sum(x ** (self.beta + 1.0), axis=1))
        return _finish(self.theta * lam, single)

    # generator psi(t) = (1 + t^{1/beta})^{-1/theta}
    def _psi_inverse(self, u: np.ndarray) -> np.ndarray:
        return np.expm1(-self.theta * np.log(u)) ** self.beta

    def _log_abs_dpsi(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = -math.log(self.theta * self.beta) - (1.0 / self.theta + 1.0) * np.log1p(t ** (1.0 / self.beta))
        if self.beta != 1.0:
            with np.errstate(divide="ignore"):
                out = out + (1.0 / self.beta - 1.0) * np.log(t)
        return out

    def conditional_cdf(self, v: float, u: float) -> float:
        """P(V <= v | U = u) for d = 2"""
        t_u = float(self._psi_inverse(np.array(u)))
        with np.errstate(over="ignore", invalid="ignore"):
            t_v = float(self._psi_inverse(np.array(v)))
            value = float(np.exp(self._log_abs_dpsi(t_u + t_v) - self._log_abs_dpsi(t_u)))
        return 0.0 if math.isnan(value) else min(value, 1.0)

    def _conditional_inversion(self, count: int, rng: np.random.Generator) -> np.ndarray:
        rows = np.empty((count, 2))
        tiny = np.finfo(float).tiny
        for i in range(count):
            u = float(np.clip(rng.random(), 1e-16, 1.0 - 1e-16))
            p = float(np.clip(rng.random(), 1e-16, 1.0 - 1e-16))
            v = optimize.bisect(lambda z: self.conditional_cdf(z, u) - p, tiny, 1.0, xtol=config.BISECT_TOL)
            rows[i] = (u, v)
        return rows

    def _frailty_draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        base = rng.gamma(1.0 / self.theta, 1.0, n)
        frailty = base ** self.beta * _positive_stable(1.0 / self.beta, n, rng)
        e = rng.exponential(1.0, size=(n, self.d))
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            z = (e / frailty[:, None]) ** (1.0 / self.beta)
            return np.exp(-np.log1p(z) / self.theta)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """
        Frailty construction: V = G^beta * S with G ~ Gamma(1/theta) and S
        positive stable of index 1/beta, so that E exp(-tV) = psi(t).

        Rows hit by underflow (tiny frailties) are redrawn; for d = 2 they
        are replaced by conditional inversion instead.
        """
        n = self._check_n(n)
        out = self._frailty_draw(n, rng)
        bad = ~np.all(np.isfinite(out) & (out > 0.0), axis=1)
        if np.any(bad):
            if self.d == 2:
                out[bad] = self._conditional_inversion(int(bad.sum()), rng)
            else:
                while np.any(bad):
                    out[bad] = self._frailty_draw(int(bad.sum()), rng)
                    bad = ~np.all(np.isfinite(out) & (out > 0.0), axis=1)
        return out

    def to_config(self) -> Dict[str, str]:
        return {"family": self.family, "d": str(self.d), "theta": repr(self.theta), "beta": repr(self.beta)}


def _t_stdf(x, y, nu: int, theta: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scale = math.sqrt(nu + 1.0) / math.sqrt(1.0 - theta ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        z_y = scale * ((y / x) ** (1.0 / nu) - theta)
        z_x = scale * ((x / y) ** (1.0 / nu) - theta)
        term_y = np.where(y > 0.0, y * stats.t.cdf(z_y, nu + 1), 0.0)
        term_x = np.where(x > 0.0, x * stats.t.cdf(z_x, nu + 1), 0.0)
    return term_x + term_y


@dataclass(frozen=True)
class TExtremeValue(CopulaModel):
    """Bivariate extreme-value copula exp{-L(-log u, -log v)} attracting the t-copula"""
    nu: int
    theta: float
    d: int = 2
    family = "t_extreme_value"

    def __post_init__(self):
        _check_t_parameters(self.nu, self.theta, 2)
        if self.d != 2:
            raise UnsupportedModelError("The t extreme-value copula is implemented for d = 2 only")

    def stable_tail_dependence(self, x, y):
        """
        L(x, y) = y t_{nu+1}(z(y/x)) + x t_{nu+1}(z(x/y)).

        Args:
            x: Nonnegative real (or array)
            y: Nonnegative real (or array)

        Returns:
            L evaluated elementwise
        """
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        if np.any(~np.isfinite(xa)) or np.any(~np.isfinite(ya)) or np.any(xa < 0) or np.any(ya < 0):
            raise InvalidModelError("L is defined for finite nonnegative arguments")
        if np.any((xa == 0) & (ya == 0)):
            raise InvalidModelError("L requires x and y not both zero")
        value = _t_stdf(xa, ya, self.nu, self.theta)
        return float(value) if value.ndim == 0 else value

    def _log_cdf_x(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            out = -_t_stdf(x[:, 0], x[:, 1], self.nu, self.theta)
        return np.where(np.any(np.isinf(x), axis=1), -np.inf, out)

    def attractor(self) -> "TExtremeValue":
        return self

    def _stdf_gradient(self, x: float, y: float) -> Tuple[float, float]:
        h = config.FD_REL_STEP * max(x, y, 1.0)
        lx = _central_diff(lambda s: float(_t_stdf(s, y, self.nu, self.theta)), x, h)
        ly = _central_diff(lambda s: float(_t_stdf(x, s, self.nu, self.theta)), y, h)
        return lx, ly

    def limit_partial_derivative(self, j: int, u: ArrayLike):
        if j not in (0, 1):
            raise InvalidModelError(f"Coordinate index {j} out of range for d=2")
        points, single = _as_points(u, 2)
        out = np.zeros(points.shape[0])
        for i, (a, b) in enumerate(points):
            if not 0.0 < points[i, j] < 1.0 or a == 0.0 or b == 0.0:
                continue
            x, y = -math.log(a), -math.log(b)
            grad = self._stdf_gradient(x, y)
            value = math.exp(-float(_t_stdf(x, y, self.nu, self.theta)))
            out[i] = value * grad[j] / points[i, j]
        return _finish(out, single)

    def gamma2(self, x: float, y: float) -> float:
        lx, ly = self._stdf_gradient(x, y)
        return x * x * lx + y * y * ly

    def to_config(self) -> Dict[str, str]:
        return {"family": self.family, "d": "2", "nu": str(self.nu), "theta": repr(self.theta)}


def _check_t_parameters(nu, theta, d) -> None:
    if isinstance(nu, bool) or int(nu) != nu or int(nu) < 1:
        raise InvalidModelError(f"t-copula requires an integer nu >= 1, got {nu}")
    if not math.isfinite(theta) or not -1.0 < theta < 1.0:
        raise InvalidModelError(f"t-copula requires theta in (-1, 1), got {theta}")
    if theta <= -1.0 / (d - 1):
        raise InvalidModelError(
            f"Equicorrelation theta={theta} is not positive definite for d={d} (need theta > {-1.0 / (d - 1):.4f})"
        )


@dataclass(frozen=True)
class TCopula(CopulaModel):
    """t-copula with nu degrees of freedom and equicorrelation matrix P (off-diagonal theta)"""
    nu: int
    theta: float
    d: int = 2
    family = "t"

    def __post_init__(self):
        object.__setattr__(self, "d", _check_dimension(self.d))
        _check_t_parameters(self.nu, self.theta, self.d)
        object.__setattr__(self, "nu", int(self.nu))

    @property
    def correlation(self) -> np.ndarray:
        return (1.0 - self.theta) * np.eye(self.d) + self.theta * np.ones((self.d, self.d))

    @property
    def kendall_tau(self) -> float:
        return 2.0 / math.pi * math.asin(self.theta)

    # -- cdf ------------------------------------------------------------
    def _bivariate_cdf(self, a: float, b: float, theta: float) -> float:
        # integrate the t_nu density of X1 against the conditional t_{nu+1} law of X2
        nu = self.nu

        def integrand(s: float) -> float:
            spread = math.sqrt((1.0 - theta ** 2) * (nu + s * s) / (nu + 1.0))
            return stats.t.pdf(s, nu) * stats.t.cdf((b - theta * s) / spread, nu + 1)

        value, _ = integrate.quad(integrand, -np.inf, a, epsabs=config.TCDF_ABS_TOL * 1e-3, limit=config.QUAD_LIMIT)
        return min(max(value, 0.0), 1.0)

    def _cdf_point(self, point: np.ndarray) -> float:
        if np.any(point == 0.0):
            return 0.0
        active = point[point < 1.0]
        if active.size == 0:
            return 1.0
        if active.size == 1:
            return float(active[0])
        q = stats.t.ppf(active, self.nu)
        if active.size == 2:
            return self._bivariate_cdf(float(q[0]), float(q[1]), self.theta)
        if active.size > 4:
            raise UnsupportedModelError(f"t-copula cdf is supported for d <= 4, got {active.size} active coordinates")
        k = active.size
        shape = (1.0 - self.theta) * np.eye(k) + self.theta * np.ones((k, k))
        dist = stats.multivariate_t(loc=np.zeros(k), shape=shape, df=self.nu)
        return float(dist.cdf(q, maxpts=config.TCDF_MAXPTS, random_state=config.TCDF_QMC_SEED))

    def cdf(self, u: ArrayLike):
        """
        Copula CDF by numerical integration of the multivariate t law.

        d = 2 uses deterministic adaptive quadrature; d in {3, 4} uses the
        quasi-Monte Carlo integrator of scipy with a fixed seed.
        """
        points, single = _as_points(u, self.d)
        values = np.array([self._cdf_point(p) for p in points])
        return _finish(values, single)

    def _log_cdf_x(self, x: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.asarray(self.cdf(np.exp(-x))).reshape(-1))

    # -- extreme-value side ---------------------------------------------
    def attractor(self) -> TExtremeValue:
        if self.d != 2:
            raise UnsupportedModelError(
                f"The extreme-value attractor of the t-copula is available for d = 2 only (got d={self.d})"
            )
        return TExtremeValue(nu=self.nu, theta=self.theta)

    def stable_tail_dependence(self, x, y):
        return self.attractor().stable_tail_dependence(x, y)

    @property
    def rho_phi(self) -> float:
        return -1.0 if self.nu <= 2 else -2.0 / self.nu

    def second_order(self) -> SecondOrderData:
        if self.nu == 1:
            phi = lambda m: 1.0 / (2.0 * m)
        elif self.nu == 2:
            phi = lambda m: 3.0 / (2.0 * m)
        else:
            rho = self.rho_phi
            phi = lambda m: float(m) ** rho
        S = self._second_order_S if (self.nu == 1 and self.d == 2) else None
        return SecondOrderData(rho_phi=self.rho_phi, phi=phi, S=S)

    def second_order_S(self, u: ArrayLike):
        if self.nu != 1 or self.d != 2:
            raise UnsupportedModelError(
                f"S is implemented for the bivariate t-copula with nu = 1 only (got nu={self.nu}, d={self.d})"
            )
        return self._second_order_S(u)

    def _second_order_S(self, u: ArrayLike):
        points, single = _as_points(u, 2)
        if np.any(points <= 0.0) or np.any(points >= 1.0):
            raise InvalidModelError("S is evaluated at interior points only")
        limit = self.attractor()
        out = np.empty(points.shape[0])
        for i, (a, b) in enumerate(points):
            x, y = -math.log(a), -math.log(b)
            stdf = float(_t_stdf(x, y, self.nu, self.theta))
            out[i] = math.exp(-stdf) * (limit.gamma2(x, y) - stdf ** 2)
        return _finish(out, single)

    # -- sampling -------------------------------------------------------
    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Cholesky factor of P, chi-square mixing, univariate t CDF"""
        n = self._check_n(n)
        chol = np.linalg.cholesky(self.correlation)
        z = rng.standard_normal((n, self.d)) @ chol.T
        w = rng.chisquare(self.nu, n)
        draws = z / np.sqrt(w / self.nu)[:, None]
        return stats.t.cdf(draws, self.nu)

    def to_config(self) -> Dict[str, str]:
        return {"family": self.family, "d": str(self.d), "nu": str(self.nu), "theta": repr(self.theta)}


FAMILIES = {
    GumbelHougaard.family: GumbelHougaard,
    OuterPowerClayton.family: OuterPowerClayton,
    TCopula.family: TCopula,
    TExtremeValue.family: TExtremeValue,
}


def model_from_config(block: Mapping[str, object], prefix: str = "") -> CopulaModel:
    """
    Build a model from a flat key=value block.

    Args:
        block: Mapping with keys family, d and the family parameters
        prefix: Optional key prefix (e.g. "base_")

    Returns:
        Validated CopulaModel

    Raises:
        InvalidModelError: unknown family or missing/invalid parameters
    """
    def get(key):
        value = block.get(prefix + key)
        if value is None:
            raise InvalidModelError(f"Missing model key '{prefix + key}'")
        return value

    family = str(get("family")).strip()
    if family not in FAMILIES:
        raise InvalidModelError(f"Unknown copula family '{family}' (known: {sorted(FAMILIES)})")
    try:
        d = int(get("d"))
        if family == GumbelHougaard.family:
            return GumbelHougaard(beta=float(get("beta")), d=d)
        if family == OuterPowerClayton.family:
            return OuterPowerClayton(theta=float(get("theta")), beta=float(get("beta")), d=d)
        if family == TCopula.family:
            return TCopula(nu=int(get("nu")), theta=float(get("theta")), d=d)
        return TExtremeValue(nu=int(get("nu")), theta=float(get("theta")), d=d)
    except (TypeError, ValueError) as e:
        raise InvalidModelError(f"Failed to parse {family} model block: {str(e)}") from e


def model_to_config(model: CopulaModel, prefix: str = "") -> Dict[str, str]:
    return {prefix + key: value for key, value in model.to_config().items()}


# Functional surface mirroring the model methods

def cdf(model: CopulaModel, u: ArrayLike):
    return model.cdf(u)


def limit_copula(model: CopulaModel, u: ArrayLike):
    return model.limit_copula(u)


def block_copula(model: CopulaModel, u: ArrayLike, m: float):
    return model.block_copula(u, m)


def stable_tail_dependence(model: CopulaModel, x, y):
    if not hasattr(model, "stable_tail_dependence"):
        raise UnsupportedModelError(f"L is implemented for bivariate t models only, got {model.describe()}")
    return model.stable_tail_dependence(x, y)


def second_order_S(model: CopulaModel, u: ArrayLike):
    return model.second_order_S(u)


def sample(model: CopulaModel, n: int, rng: np.random.Generator) -> np.ndarray:
    return model.sample(n, rng)


def limit_partial_derivative(model: CopulaModel, j: int, u: ArrayLike):
    return model.limit_partial_derivative(j, u)
