"""Independent numerical oracles for the closed-form machinery.

Three one-directional checks live here: adaptive quadrature for the
half-space integrals, a dense cyclic Jacobi eigensolver for the parity
spectra, and a first-order upwind two-point BVP solver for the reduced ODE
systems on a truncated domain.  None of them reuse the closed forms they
are meant to confirm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.integrate
import scipy.sparse
import scipy.sparse.linalg

from .boundary_solver import (
    WallBoundarySystem,
    kramers_boundary_system,
    temperature_boundary_system,
)
from .layer_profiles import DEFECT_WEIGHTS, _kramers_parts, _temperature_parts
from .parity_spectral import ParityEigen
from .system_builder import ReducedSystem

__all__ = [
    "QUADRATURE_ORDER_LIMIT",
    "BvpConfig",
    "BvpProfile",
    "BvpConvergenceError",
    "quadrature_S",
    "quadrature_S_normalized",
    "dense_symmetric_eig",
    "geometric_nodes",
    "split_nodes",
    "bvp_temperature",
    "bvp_kramers",
]

QUADRATURE_ORDER_LIMIT = 30
# Base truncation window in Gaussian standard deviations.  The polynomial
# factor of order n oscillates out to 2 sqrt(n), so the window grows with
# the order; past the turning point the weight decays like exp(-x^2/2) and
# an 8-sigma margin pushes the discarded tail far below 1e-16 of the value.
QUADRATURE_WINDOW_SIGMA = 12.0

BVP_TEMPERATURE_ORDER_LIMIT = 15
BVP_KRAMERS_ORDER_LIMIT = 14


class BvpConvergenceError(RuntimeError):
    """The sparse boundary-value solve did not reach the residual target."""


def quadrature_S_normalized(alpha: int, beta: int, theta: float = 1.0) -> float:
    """S(alpha, beta) / sqrt(alpha! beta!) by adaptive quadrature.

    Integrates the flux-weighted product of orthonormal scaled Hermite
    polynomials over the incoming half-line [-12 sqrt(theta), 0].  Working
    with the orthonormal polynomials keeps the integrand O(1), so zeros of
    the closed form come out at true absolute roundoff level.
    """
    if not 0 <= alpha <= QUADRATURE_ORDER_LIMIT or not 0 <= beta <= QUADRATURE_ORDER_LIMIT:
        raise ValueError(
            f"quadrature oracle is validated for orders <= {QUADRATURE_ORDER_LIMIT}"
        )
    if theta <= 0.0:
        raise ValueError(f"theta must be positive, got {theta}")
    sqrt_theta = math.sqrt(theta)
    top = max(alpha, beta)
    window = max(QUADRATURE_WINDOW_SIGMA, 2.0 * math.sqrt(top + 1.0) + 8.0)

    def integrand(xi: float) -> float:
        s = xi / sqrt_theta
        vals = np.empty(top + 1)
        vals[0] = 1.0
        if top >= 1:
            vals[1] = s
        for n in range(1, top):
            vals[n + 1] = (s * vals[n] - math.sqrt(n) * vals[n - 1]) / math.sqrt(n + 1)
        weight = math.exp(-0.5 * s * s) / math.sqrt(2.0 * math.pi * theta)
        return math.sqrt(2.0 * math.pi / theta) * xi * vals[alpha] * vals[beta] * weight

    with warnings.catch_warnings():
        # integrals that vanish identically sit at the roundoff floor, which
        # QUADPACK reports as an unreachable relative tolerance
        warnings.simplefilter("ignore", scipy.integrate.IntegrationWarning)
        value, _ = scipy.integrate.quad(
            integrand,
            -window * sqrt_theta,
            0.0,
            epsabs=1e-14,
            epsrel=1e-12,
            limit=300,
        )
    return value


def quadrature_S(alpha: int, beta: int, theta: float = 1.0) -> float:
    """Raw S(alpha, beta) by quadrature; factorial scaling applied afterwards."""
    scale = math.sqrt(math.factorial(alpha) * math.factorial(beta))
    return quadrature_S_normalized(alpha, beta, theta) * scale


def _disjoint_pair_rounds(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Fixed tournament schedule covering every index pair once per sweep."""
    players = list(range(n)) if n % 2 == 0 else list(range(n)) + [-1]
    m = len(players)
    rounds = []
    order = players[:]
    for _ in range(m - 1):
        left = order[: m // 2]
        right = order[m // 2:][::-1]
        pairs = sorted(
            (min(x, y), max(x, y)) for x, y in zip(left, right) if x >= 0 and y >= 0
        )
        rounds.append(
            (np.array([p for p, _ in pairs]), np.array([q for _, q in pairs]))
        )
        order = [order[0]] + [order[-1]] + order[1:-1]
    return rounds


def dense_symmetric_eig(matrix: np.ndarray, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Classical cyclic Jacobi eigendecomposition of a dense symmetric matrix.

    Returns eigenvalues ascending with matching orthonormal eigenvector
    columns.  Rotations are applied in fixed rounds of disjoint index pairs
    (rotations in disjoint planes commute, so the batched result equals the
    sequential one).  Deliberately independent of the structured path and
    of LAPACK.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    amax = float(np.max(np.abs(a)))
    if not np.isfinite(amax):
        raise ValueError("matrix contains non-finite entries")
    if np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, amax):
        raise ValueError("matrix is not symmetric within 1e-12")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    if n == 1:
        return a[0, :].copy(), v
    if amax == 0.0:
        return np.zeros(n), v
    # scale to unit magnitude so huge-entry inputs cannot overflow the norms
    a = a / amax
    norm = math.sqrt(float(np.sum(a * a)))
    skip = 1e-15 * norm
    rounds = _disjoint_pair_rounds(n)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.tril(a, -1) ** 2) * 2.0))
        if off < 1e-13 * norm:
            break
        for ps, qs in rounds:
            apq = a[ps, qs]
            live = np.abs(apq) > skip
            if not live.any():
                continue
            p_sel = ps[live]
            q_sel = qs[live]
            apq = apq[live]
            tau = (a[q_sel, q_sel] - a[p_sel, p_sel]) / (2.0 * apq)
            t = np.where(
                tau == 0.0,
                1.0,
                np.sign(tau) / (np.abs(tau) + np.sqrt(1.0 + tau * tau)),
            )
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            cp = a[:, p_sel]
            cq = a[:, q_sel]
            a[:, p_sel] = c * cp - s * cq
            a[:, q_sel] = s * cp + c * cq
            rp = a[p_sel, :]
            rq = a[q_sel, :]
            a[p_sel, :] = c[:, None] * rp - s[:, None] * rq
            a[q_sel, :] = s[:, None] * rp + c[:, None] * rq
            a[p_sel, q_sel] = 0.0
            a[q_sel, p_sel] = 0.0
            vp = v[:, p_sel]
            vq = v[:, q_sel]
            v[:, p_sel] = c * vp - s * vq
            v[:, q_sel] = s * vp + c * vq
    w = np.diag(a).copy() * amax
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


@dataclass(frozen=True)
class BvpConfig:
    """Discretization parameters of the finite-difference oracle.

    ``y_max`` defaults to forty widths of the widest layer; the grid is
    geometric with the last cell ``stretch`` times the first.
    """

    y_max: float | None = None
    n_cells: int = 20000
    stretch: float = 50.0
    tolerance: float = 1e-9

    def resolve_y_max(self, widest_layer: float) -> float:
        y_max = 40.0 * widest_layer if self.y_max is None else self.y_max
        if y_max < 20.0 * widest_layer:
            raise ValueError(
                f"y_max {y_max} does not cover the widest layer ({widest_layer:.3g})"
            )
        return y_max

    def validate(self) -> None:
        if self.n_cells < 1000:
            raise ValueError("n_cells must be at least 1000")
        if self.stretch < 1.0:
            raise ValueError("stretch must be >= 1")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")


class BvpProfile(NamedTuple):
    y: np.ndarray
    values: np.ndarray


def geometric_nodes(y_max: float, n_cells: int, stretch: float) -> np.ndarray:
    """Nodes 0 = y_0 < ... < y_n = y_max with geometrically growing cells."""
    if stretch == 1.0:
        return np.linspace(0.0, y_max, n_cells + 1)
    ratio = stretch ** (1.0 / (n_cells - 1))
    steps = ratio ** np.arange(n_cells)
    nodes = np.concatenate(([0.0], np.cumsum(steps)))
    return nodes * (y_max / nodes[-1])


def split_nodes(nodes: np.ndarray) -> np.ndarray:
    """Halve every cell; the input nodes survive at even indices."""
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    out = np.empty(nodes.size + mids.size)
    out[0::2] = nodes
    out[1::2] = mids
    return out


def _solve_layer_bvp(
    system: ReducedSystem,
    eigen: ParityEigen,
    wbs: WallBoundarySystem,
    flux: float,
    wall_value: float,
    kn: float,
    carrier_row: np.ndarray,
    scalar_rhs_per_length: float,
    nodes: np.ndarray,
    tolerance: float,
) -> np.ndarray:
    """Assemble and solve the upwinded characteristic discretization.

    Unknowns per node: the scalar profile value, then the decaying (+) and
    growing (-) characteristic amplitudes.  The + branch is upwinded from
    the wall, the - branch from the far end where it is pinned to zero, and
    the scalar equation telescopes the carrier moments exactly.
    """
    m = eigen.m_odd
    n_nodes = nodes.size
    n_cells = n_nodes - 1
    h = np.diff(nodes)
    stride = 2 * m + 1
    size = stride * n_nodes

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    rhs = np.zeros(size)

    # wall rows: b T (ds ; R_e (v+ + v-)) - [0 ; B R_o (v+ - v-)] = flux c
    b_t = wbs.b_chi * wbs.scaled_matrix
    b_dense = system.coupling_dense()
    odd_flow = b_dense @ eigen.odd_vectors
    even_cols = b_t[:, 1:] @ eigen.even_vectors
    plus_block = even_cols.copy()
    plus_block[1:, :] -= odd_flow
    minus_block = even_cols.copy()
    minus_block[1:, :] += odd_flow
    eq = 0
    for r in range(m + 1):
        rows.append(np.full(1 + 2 * m, eq))
        cols.append(np.concatenate((
            [0],
            1 + np.arange(m),
            1 + m + np.arange(m),
        )))
        vals.append(np.concatenate(([b_t[r, 0]], plus_block[r], minus_block[r])))
        rhs[eq] = flux * wbs.c_vec[r] + wbs.b_chi * wbs.scaled_matrix[r, 0] * wall_value
        eq += 1

    rates = eigen.rates
    # + branch: (1 + h_j / (rate kn)) v_j = v_{j-1}, marching away from the wall
    j_grid, i_grid = np.meshgrid(np.arange(1, n_nodes), np.arange(m), indexing="ij")
    grow = 1.0 + h[j_grid - 1] / (rates[i_grid] * kn)
    eq_ids = eq + np.arange(j_grid.size)
    rows.append(np.repeat(eq_ids, 2))
    plus_col = j_grid * stride + 1 + i_grid
    prev_col = (j_grid - 1) * stride + 1 + i_grid
    cols.append(np.column_stack((plus_col.ravel(), prev_col.ravel())).ravel())
    vals.append(np.column_stack((grow.ravel(), -np.ones(j_grid.size))).ravel())
    eq += j_grid.size

    # - branch: (1 + h_{j+1} / (rate kn)) v_j = v_{j+1}, marching toward the wall
    j_grid, i_grid = np.meshgrid(np.arange(n_cells), np.arange(m), indexing="ij")
    grow = 1.0 + h[j_grid] / (rates[i_grid] * kn)
    eq_ids = eq + np.arange(j_grid.size)
    rows.append(np.repeat(eq_ids, 2))
    minus_col = j_grid * stride + 1 + m + i_grid
    next_col = (j_grid + 1) * stride + 1 + m + i_grid
    cols.append(np.column_stack((minus_col.ravel(), next_col.ravel())).ravel())
    vals.append(np.column_stack((grow.ravel(), -np.ones(j_grid.size))).ravel())
    eq += j_grid.size

    # - branch pinned at the far end
    eq_ids = eq + np.arange(m)
    rows.append(eq_ids)
    cols.append(n_cells * stride + 1 + m + np.arange(m))
    vals.append(np.ones(m))
    eq += m

    # scalar equation telescopes: s_j - s_{j-1} + carrier ((v+ + v-)_j - (.)_{j-1})
    car = np.asarray(carrier_row, dtype=float)
    j_arr = np.arange(1, n_nodes)
    eq_ids = eq + np.arange(n_cells)
    rows.append(np.repeat(eq_ids, 2))
    cols.append(np.column_stack((j_arr * stride, (j_arr - 1) * stride)).ravel())
    vals.append(np.tile([1.0, -1.0], n_cells))
    span = np.arange(m)
    col_block = np.concatenate((
        j_arr[:, None] * stride + 1 + span,
        j_arr[:, None] * stride + 1 + m + span,
        (j_arr[:, None] - 1) * stride + 1 + span,
        (j_arr[:, None] - 1) * stride + 1 + m + span,
    ), axis=1)
    val_block = np.tile(np.concatenate((car, car, -car, -car)), (n_cells, 1))
    rows.append(np.repeat(eq_ids, 4 * m))
    cols.append(col_block.ravel())
    vals.append(val_block.ravel())
    rhs[eq_ids] = scalar_rhs_per_length * h
    eq += n_cells

    if eq != size:
        raise AssertionError(f"assembled {eq} equations for {size} unknowns")

    mat = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(size, size),
    ).tocsc()
    lu = scipy.sparse.linalg.splu(mat)
    x = lu.solve(rhs)
    residual = np.max(np.abs(mat @ x - rhs))
    if not np.isfinite(residual) or residual > tolerance * max(1.0, np.max(np.abs(rhs))):
        raise BvpConvergenceError(f"sparse solve residual {residual:.3e} above tolerance")
    return x[0::stride]


def bvp_temperature(
    order: int,
    chi: float,
    kn: float,
    pr: float,
    q2: float,
    theta_wall: float,
    config: BvpConfig | None = None,
    nodes: np.ndarray | None = None,
) -> BvpProfile:
    """Finite-difference temperature profile on a truncated half-line.

    Small-order equivalence oracle for the analytic solution; first-order
    accurate, so agreement is judged after grid refinement.
    """
    if order % 2 == 0 or not 3 <= order <= BVP_TEMPERATURE_ORDER_LIMIT:
        raise ValueError(
            f"temperature oracle supports odd orders in [3, {BVP_TEMPERATURE_ORDER_LIMIT}]"
        )
    config = config or BvpConfig()
    config.validate()
    system, table, eigen = _temperature_parts(order)
    wbs = temperature_boundary_system(order, chi, table)
    if nodes is None:
        y_max = config.resolve_y_max(float(eigen.rates[0]) * kn)
        nodes = geometric_nodes(y_max, config.n_cells, config.stretch)
    lead = min(3, eigen.m_even)
    carrier = 0.8 * (DEFECT_WEIGHTS[:lead] @ eigen.even_vectors[:lead, :])
    theta = _solve_layer_bvp(
        system,
        eigen,
        wbs,
        q2,
        theta_wall,
        kn,
        carrier,
        -0.4 * pr * q2 / kn,
        nodes,
        config.tolerance,
    )
    return BvpProfile(nodes, theta)


def bvp_kramers(
    order: int,
    chi: float,
    kn: float,
    pr: float,
    sigma12: float,
    u1_wall: float,
    config: BvpConfig | None = None,
    nodes: np.ndarray | None = None,
) -> BvpProfile:
    """Finite-difference tangential-velocity profile, even-order analogue."""
    if order % 2 == 1 or not 4 <= order <= BVP_KRAMERS_ORDER_LIMIT:
        raise ValueError(
            f"Kramers oracle supports even orders in [4, {BVP_KRAMERS_ORDER_LIMIT}]"
        )
    config = config or BvpConfig()
    config.validate()
    system, table, eigen = _kramers_parts(order, pr)
    wbs = kramers_boundary_system(order, chi, pr, table)
    if nodes is None:
        y_max = config.resolve_y_max(float(eigen.rates[0]) * kn)
        nodes = geometric_nodes(y_max, config.n_cells, config.stretch)
    carrier = (2.0 / system.even_scale(1)) * eigen.even_vectors[0, :]
    u1 = _solve_layer_bvp(
        system,
        eigen,
        wbs,
        sigma12,
        u1_wall,
        kn,
        carrier,
        -sigma12 / kn,
        nodes,
        config.tolerance,
    )
    return BvpProfile(nodes, u1)
