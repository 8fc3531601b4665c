"""Hermite polynomials, half-space integrals, and wall-moment recursions.

Everything here is exact closed-form arithmetic (recursions and factorial
ratios); the numerical quadrature counterparts live in
:mod:`knlayer.verification`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SQRT_2PI",
    "ZSequence",
    "HalfSpaceTable",
    "WallMoments",
    "hermite_eval",
    "z_value",
    "z_sign_log",
    "half_space_I",
    "half_space_S",
    "half_space_S_normalized",
    "wall_J",
    "linearized_wall_moment",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)

# Raw (un-normalized) values involve factorials and double factorials; beyond
# this order they no longer fit in a double and only the normalized forms are
# meaningful.
RAW_ORDER_LIMIT = 150


def hermite_eval(order: int, xi: float, u: float, theta: float) -> float:
    """Evaluate the scaled Hermite polynomial of the given order at xi.

    Uses the stable upward three-term recursion seeded with 1 and
    (xi - u)/theta.  The polynomials are orthogonal under the Gaussian
    weight centered at u with variance theta.
    """
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    if order == 0:
        return 1.0
    prev = 1.0
    cur = (xi - u) / theta
    for n in range(1, order):
        prev, cur = cur, ((xi - u) * cur - n * prev) / theta
    return cur


class ZSequence:
    """Values of the Hermite-at-origin sequence z_n in sign/log form.

    z_0 = 1, z_1 = 0 and z_{n+1} = -n z_{n-1}, so odd entries vanish and the
    even ones alternate in sign while growing like a double factorial.  Raw
    magnitudes overflow quickly, hence the (sign, log-magnitude) storage; the
    ratio z_n / sqrt(n!) stays bounded and is tabulated directly.
    """

    def __init__(self, n_max: int):
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        n = n_max + 1
        sign = np.zeros(n, dtype=np.int8)
        logmag = np.full(n, -np.inf)
        normed = np.zeros(n)
        values = np.zeros(n)
        sign[0] = 1
        logmag[0] = 0.0
        normed[0] = 1.0
        values[0] = 1.0
        for k in range(1, n_max):
            # z_{k+1} = -k z_{k-1}; normalized ratio picks up sqrt(k/(k+1))
            sign[k + 1] = -sign[k - 1]
            logmag[k + 1] = math.log(k) + logmag[k - 1]
            normed[k + 1] = -math.sqrt(k / (k + 1.0)) * normed[k - 1]
            prev = values[k - 1]
            values[k + 1] = -k * prev if abs(prev) < 1e304 / k else -math.copysign(math.inf, prev)
        self.n_max = n_max
        self._sign = sign
        self._logmag = logmag
        self._normalized = normed
        self._values = values
        for arr in (self._sign, self._logmag, self._normalized, self._values):
            arr.flags.writeable = False

    def sign(self, n: int) -> int:
        return int(self._sign[n])

    def log_magnitude(self, n: int) -> float:
        return float(self._logmag[n])

    def value(self, n: int) -> float:
        """Raw z_n; overflows to +-inf for very large even n."""
        return float(self._values[n])

    def normalized(self, n: int) -> float:
        """z_n / sqrt(n!), bounded for all n."""
        return float(self._normalized[n])

    @property
    def normalized_values(self) -> np.ndarray:
        return self._normalized


_Z_CACHE = ZSequence(64)


def _z(n_max: int) -> ZSequence:
    global _Z_CACHE
    if n_max > _Z_CACHE.n_max:
        _Z_CACHE = ZSequence(max(n_max, 2 * _Z_CACHE.n_max))
    return _Z_CACHE


def z_value(n: int) -> float:
    """z_n from the recursion z_{n+1} = -n z_{n-1}, z_0 = 1, z_1 = 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _z(n).value(n)


def z_sign_log(n: int) -> tuple[int, float]:
    """Overflow-safe form of z_n: (sign, log|z_n|); sign 0 marks a zero."""
    if n < 0:
        raise ValueError("n must be non-negative")
    zs = _z(n)
    return zs.sign(n), zs.log_magnitude(n)


def _check_raw_window(alpha: int, beta: int) -> None:
    if alpha < 0 or beta < 0:
        raise ValueError("indices must be non-negative")
    if alpha > RAW_ORDER_LIMIT or beta > RAW_ORDER_LIMIT:
        raise ValueError(
            f"raw half-space values are only exposed for indices <= {RAW_ORDER_LIMIT}; "
            "use half_space_S_normalized for higher orders"
        )


def half_space_I(alpha: int, beta: int) -> float:
    """Half-line Gaussian moment of a product of two Hermite polynomials.

    Closed form: alpha! sqrt(2 pi)/2 on the diagonal, and
    (z_{alpha+1} z_beta - z_{beta+1} z_alpha)/(alpha - beta) off it.
    """
    _check_raw_window(alpha, beta)
    if alpha == beta:
        return math.factorial(alpha) * SQRT_2PI / 2.0
    zs = _z(max(alpha, beta) + 1)
    num = zs.value(alpha + 1) * zs.value(beta) - zs.value(beta + 1) * zs.value(alpha)
    return num / (alpha - beta)


def half_space_S(alpha: int, beta: int) -> float:
    """Signed half-space flux integral S(alpha, beta) in closed form.

    Equals beta * I(alpha, beta-1) + I(alpha, beta+1).  The band |a-b| = 1
    collapses to sqrt(2 pi)/2 times a factorial; when either index is even
    the rest reduces to the rational multiple of z_alpha z_beta, and for
    odd-odd pairs the z_{alpha+1} cross terms survive instead (those pairs
    never enter a wall assembly but are part of the contract).  Arguments
    are symmetrized first so S(a, b) == S(b, a) bit for bit.
    """
    _check_raw_window(alpha, beta)
    if alpha > beta:
        alpha, beta = beta, alpha
    if beta - alpha == 1:
        return SQRT_2PI / 2.0 * math.factorial(beta)
    if alpha % 2 == 1 and beta % 2 == 1:
        zs = _z(beta + 1)
        return (
            beta * zs.value(alpha + 1) * zs.value(beta - 1) / (alpha - beta + 1)
            + zs.value(alpha + 1) * zs.value(beta + 1) / (alpha - beta - 1)
        )
    zs = _z(beta)
    coef = (alpha + beta + 1) / float((alpha - beta) ** 2 - 1)
    return coef * zs.value(alpha) * zs.value(beta)


def half_space_S_normalized(alpha: int, beta: int) -> float:
    """S(alpha, beta) / sqrt(alpha! beta!), finite for all supported orders.

    Computed through the normalized z ratios so no raw factorial is ever
    formed; safe for indices in the thousands.
    """
    if alpha < 0 or beta < 0:
        raise ValueError("indices must be non-negative")
    if alpha > beta:
        alpha, beta = beta, alpha
    if beta - alpha == 1:
        return SQRT_2PI / 2.0 * math.sqrt(beta)
    if alpha % 2 == 1 and beta % 2 == 1:
        zs = _z(beta + 1)
        return (
            math.sqrt(beta * (alpha + 1.0))
            * zs.normalized(alpha + 1)
            * zs.normalized(beta - 1)
            / (alpha - beta + 1)
            + math.sqrt((alpha + 1.0) * (beta + 1.0))
            * zs.normalized(alpha + 1)
            * zs.normalized(beta + 1)
            / (alpha - beta - 1)
        )
    zs = _z(beta)
    coef = (alpha + beta + 1) / float((alpha - beta) ** 2 - 1)
    return coef * zs.normalized(alpha) * zs.normalized(beta)


class HalfSpaceTable:
    """Memoized table of S(alpha, beta) for 0 <= alpha, beta <= max_order.

    The normalized form S/sqrt(alpha! beta!) is stored for the full range;
    raw values are kept only inside the double-precision window.  Immutable
    after construction, so safe to share across threads.
    """

    @staticmethod
    def _assemble(top: int, z: np.ndarray, band: np.ndarray, normalized: bool) -> np.ndarray:
        """Closed-form assembly on the upper triangle, mirrored for exact symmetry."""
        a = np.arange(top + 1)[:, None].astype(float)
        b = np.arange(top + 1)[None, :].astype(float)
        ai = np.arange(top + 1)
        za = z[ai][:, None]
        za1 = z[ai + 1][:, None]
        zb = z[ai][None, :]
        zb1 = z[ai + 1][None, :]
        zbm = z[np.maximum(ai - 1, 0)][None, :]
        den = (a - b) ** 2 - 1.0
        den[den == 0.0] = 1.0  # band positions, overwritten below
        table = (a + b + 1.0) / den * za * zb
        # odd-odd pairs: the z_{a+1} cross terms survive instead
        den1 = a - b + 1.0
        den1[den1 == 0.0] = 1.0
        den2 = a - b - 1.0
        den2[den2 == 0.0] = 1.0
        if normalized:
            odd = (
                np.sqrt(b * (a + 1.0)) * za1 * zbm / den1
                + np.sqrt((a + 1.0) * (b + 1.0)) * za1 * zb1 / den2
            )
        else:
            odd = b * za1 * zbm / den1 + za1 * zb1 / den2
        odd_mask = (np.asarray(ai % 2, bool)[:, None]) & (np.asarray(ai % 2, bool)[None, :])
        table[odd_mask] = odd[odd_mask]
        off1 = np.abs(a - b) == 1.0
        table[off1] = band[off1]
        upper = np.triu(table)
        return upper + upper.T - np.diag(np.diag(table))

    def __init__(self, max_order: int):
        if max_order < 0:
            raise ValueError("max_order must be non-negative")
        self.max_order = max_order
        zs = _z(max_order + 2)
        zn = zs.normalized_values[: max_order + 3]

        idx = np.arange(max_order + 1)
        band = SQRT_2PI / 2.0 * np.sqrt(np.maximum(idx[:, None], idx[None, :]))
        self._normalized = self._assemble(max_order, zn, band, normalized=True)

        raw_top = min(max_order, RAW_ORDER_LIMIT)
        zraw = np.array([zs.value(n) for n in range(raw_top + 3)])
        rid = idx[: raw_top + 1]
        fact = np.array([float(math.factorial(int(n))) for n in rid])
        rband = SQRT_2PI / 2.0 * np.where(rid[:, None] >= rid[None, :], fact[:, None], fact[None, :])
        self._raw = self._assemble(raw_top, zraw, rband, normalized=False)
        self._raw_top = raw_top

        self._normalized.flags.writeable = False
        self._raw.flags.writeable = False

    @property
    def s_normalized(self) -> np.ndarray:
        return self._normalized

    @property
    def s_values(self) -> np.ndarray:
        """Raw table, restricted to the double-precision window."""
        return self._raw

    def normalized(self, alpha: int, beta: int) -> float:
        return float(self._normalized[alpha, beta])

    def raw(self, alpha: int, beta: int) -> float:
        if alpha > self._raw_top or beta > self._raw_top:
            raise ValueError(
                f"raw values only stored up to order {self._raw_top}; use normalized()"
            )
        return float(self._raw[alpha, beta])


def wall_J(m: int, x: float, theta0: float, dtheta: float) -> float:
    """Wall-moment kernel J_m(x) by its two-step recursion.

    ``dtheta`` is the gas/wall temperature difference entering the recursion
    J_m = ((dtheta) J_{m-2} + x J_{m-1}) / m, seeded J_0 = 1, J_1 = x.
    """
    if theta0 <= 0.0:
        raise ValueError(f"theta0 must be positive, got {theta0}")
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return 1.0
    if m == 1:
        return x
    jm2, jm1 = 1.0, x
    for k in range(2, m + 1):
        jm2, jm1 = jm1, (dtheta * jm2 + x * jm1) / k
    return jm1


@dataclass(frozen=True)
class WallMoments:
    """Linearized wall/gas state entering the Maxwell boundary moments."""

    theta_bar_wall: float = 0.0
    theta_bar_gas: float = 0.0
    u_bar_wall: tuple[float, float, float] = (0.0, 0.0, 0.0)
    u_bar_gas: tuple[float, float, float] = (0.0, 0.0, 0.0)


def linearized_wall_moment(
    alpha: tuple[int, int, int],
    wm: WallMoments,
    gas_even_moments: dict[int, float] | None = None,
) -> float:
    """First-order wall expansion moment for the multi-index alpha.

    Nonzero only for alpha = 0, e_i or 2 e_i.  The alpha = 0 case is the
    density offset, recovered from the gas-side pure-normal even moments
    ``gas_even_moments`` (a map beta -> f_bar for even beta >= 2); in the
    boundary assembly that offset is eliminated analytically instead.
    """
    if len(alpha) != 3 or any(a < 0 for a in alpha):
        raise ValueError(f"alpha must be a 3-tuple of non-negative ints, got {alpha}")
    total = sum(alpha)
    if total == 0:
        if gas_even_moments is None:
            raise ValueError("the zero multi-index needs the gas-side even moments")
        # S(0,0) (rho_w - rho) = sum_beta S(0,beta) (f_beta - m_beta), S(0,0) = -1
        acc = 0.0
        for beta, f_bar in sorted(gas_even_moments.items()):
            if beta < 2 or beta % 2 != 0:
                raise ValueError(f"gas moments must have even index >= 2, got {beta}")
            m_bar = 0.5 * (wm.theta_bar_wall - wm.theta_bar_gas) if beta == 2 else 0.0
            acc += half_space_S(0, beta) * (f_bar - m_bar)
        return -acc
    if total == 1:
        i = alpha.index(1)
        return wm.u_bar_wall[i] - wm.u_bar_gas[i]
    if total == 2 and max(alpha) == 2:
        return 0.5 * (wm.theta_bar_wall - wm.theta_bar_gas)
    return 0.0
