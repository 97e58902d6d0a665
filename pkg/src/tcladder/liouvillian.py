"""Lindblad generator, time evolution and its manifold block structure.

The master equation has exactly three decay channels: photon escape (rate
``gamma_a``) and independent spontaneous emission of each emitter (rate
``gamma_sigma``).  Because every channel lowers the excitation number and the
Hamiltonian preserves it, the generator is block triangular when operators are
grouped by the pair of manifolds they connect.  The diagonal blocks of the
one-step-down coherence sector and of the population sector carry all line
positions and widths; the off-diagonal feed blocks only shuffle weight between
cascade steps.

Vectorization convention: ``vec(rho) = rho.reshape(-1)`` (row stacking), so
``vec(A @ rho @ B) = kron(A, B.T) @ vec(rho)``.

Eigenvalue convention: blocks generate real-time dynamics ``dx/dt = M x``.
Multiplying an eigenvalue of ``M`` by ``1j`` (:func:`generator_eig_to_line`)
yields the complex line value whose real part is the emission position and
whose imaginary part is minus half the linewidth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .space import SystemParams, TruncatedBasis, bare_operators

__all__ = [
    "IntegrationError",
    "CoherenceBlock",
    "PopulationBlock",
    "dissipator",
    "jump_operators",
    "build_generator",
    "evolve",
    "expectation",
    "coherence_ops",
    "population_ops",
    "regression_block",
    "population_block",
    "raising_coherence_generator",
    "generator_eig_to_line",
    "line_to_generator_eig",
]


class IntegrationError(RuntimeError):
    """Adaptive propagation failed (e.g. step size underflow)."""


def dissipator(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Rate-free Lindblad dissipator ``2 O rho O+ - O+O rho - rho O+O``."""
    if op.shape != rho.shape:
        raise ValueError(f"shape mismatch: {op.shape} vs {rho.shape}")
    od = op.conj().T
    odo = od @ op
    return 2.0 * op @ rho @ od - odo @ rho - rho @ odo


def jump_operators(
    params: SystemParams, basis: TruncatedBasis
) -> list[tuple[float, np.ndarray]]:
    """The three decay channels as ``(rate, operator)`` pairs."""
    ops = bare_operators(basis)
    return [
        (params.gamma_a, ops.a),
        (params.gamma_sigma, ops.sigma1),
        (params.gamma_sigma, ops.sigma2),
    ]


def build_generator(params: SystemParams, basis: TruncatedBasis) -> np.ndarray:
    """Full generator on vectorized density matrices (dim^2 x dim^2).

    ``d vec(rho)/dt = G vec(rho)``.  This matrix is the brute-force reference
    against which every closed form in :mod:`tcladder.eigenanalysis` is
    checked: its spectrum contains the spectra of all coherence and
    population blocks.
    """
    from .hamiltonian import build_hamiltonian

    h = build_hamiltonian(params, basis)
    eye = np.eye(basis.dim)
    gen = 1j * (np.kron(eye, h.T) - np.kron(h, eye))
    for rate, op in jump_operators(params, basis):
        if rate == 0.0:
            continue
        od_o = op.conj().T @ op
        gen += (rate / 2.0) * (
            2.0 * np.kron(op, op.conj())
            - np.kron(od_o, eye)
            - np.kron(eye, od_o.T)
        )
    return gen


def evolve(
    rho0: np.ndarray,
    params: SystemParams,
    basis: TruncatedBasis,
    t_grid: np.ndarray,
    method: str = "adaptive",
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> np.ndarray:
    """Propagate a density matrix over ``t_grid`` (must start at 0).

    ``method="adaptive"`` uses high-order adaptive stepping with per-step
    error control; ``method="expm"`` uses the exact matrix exponential per
    grid interval.  The trace is never renormalized: trace drift is a
    diagnostic of integration quality, not something to hide.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or t_grid[0] != 0.0:
        raise ValueError("t_grid must be a 1-d grid starting at 0")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    dim = basis.dim
    if rho0.shape != (dim, dim):
        raise ValueError(f"rho0 shape {rho0.shape} does not match basis dim {dim}")

    gen = build_generator(params, basis)
    y0 = rho0.astype(complex).reshape(-1)
    if t_grid.size == 1:
        return y0.reshape(1, dim, dim).copy()

    if method == "adaptive":
        sol = solve_ivp(
            lambda _t, y: gen @ y,
            (0.0, float(t_grid[-1])),
            y0,
            t_eval=t_grid,
            method="DOP853",
            rtol=rtol,
            atol=atol,
        )
        if not sol.success:
            raise IntegrationError(
                f"propagation failed near t = {sol.t[-1] if sol.t.size else 0.0:g} "
                f"of [0, {t_grid[-1]:g}]: {sol.message}"
            )
        return sol.y.T.reshape(-1, dim, dim)
    if method == "expm":
        out = np.empty((t_grid.size, dim, dim), dtype=complex)
        out[0] = rho0
        y = y0.copy()
        steps: dict[float, np.ndarray] = {}
        for k in range(1, t_grid.size):
            dt = float(t_grid[k] - t_grid[k - 1])
            if dt not in steps:
                steps[dt] = expm(gen * dt)
            y = steps[dt] @ y
            out[k] = y.reshape(dim, dim)
        return out
    raise ValueError(f"unknown method {method!r}")


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """``tr(rho O)``."""
    if rho.shape != op.shape:
        raise ValueError(f"shape mismatch: {rho.shape} vs {op.shape}")
    return complex(np.trace(rho @ op))


# ---------------------------------------------------------------------------
# sector bases and blocks
# ---------------------------------------------------------------------------

def coherence_ops(basis: TruncatedBasis, m: int) -> list[tuple[int, int]]:
    """Index pairs of the lowering coherence operators ``|l><m|`` connecting
    manifold ``m`` down to ``m - 1``, in lexicographic (row, column) order."""
    if m < 1:
        raise ValueError("coherence sector needs m >= 1")
    rows = basis.manifold_index[m - 1]
    cols = basis.manifold_index[m]
    return [(r, c) for r in rows for c in cols]


def population_ops(basis: TruncatedBasis, m: int) -> list[tuple[int, int]]:
    """Index pairs of the within-manifold operators ``|l><m|`` of manifold ``m``."""
    if m < 0:
        raise ValueError("population sector needs m >= 0")
    idx = basis.manifold_index[m]
    return [(r, c) for r in idx for c in idx]


def _adjoint_action(
    x: np.ndarray, h: np.ndarray, jumps: list[tuple[float, np.ndarray]]
) -> np.ndarray:
    """Adjoint (observable-side) generator applied to one operator."""
    out = 1j * (h @ x - x @ h)
    for rate, op in jumps:
        if rate == 0.0:
            continue
        od = op.conj().T
        out = out + (rate / 2.0) * (2.0 * od @ x @ op - od @ op @ x - x @ od @ op)
    return out


def _sector_matrix(
    params: SystemParams,
    basis: TruncatedBasis,
    pairs: list[tuple[int, int]],
) -> np.ndarray:
    """Generator matrix of the operator averages of the given basis operators.

    Row k of the result gives ``d<X_k>/dt = sum_p M[k, p] <X_p>``; coefficients
    outside the listed pairs (feed into other sectors) are dropped.
    """
    from .hamiltonian import build_hamiltonian

    h = build_hamiltonian(params, basis)
    jumps = jump_operators(params, basis)
    dim = basis.dim
    mat = np.zeros((len(pairs), len(pairs)), dtype=complex)
    for k, (r, c) in enumerate(pairs):
        x = np.zeros((dim, dim), dtype=complex)
        x[r, c] = 1.0
        y = _adjoint_action(x, h, jumps)
        for p, (r2, c2) in enumerate(pairs):
            mat[k, p] = y[r2, c2]
    return mat


@dataclass(frozen=True)
class CoherenceBlock:
    """Diagonal block of the coherence sector ``m -> m - 1``.

    ``matrix`` generates ``dx/dt = M x`` for the averages of the lowering
    operators listed in ``op_index`` (pairs of basis indices, row then
    column).  Eigenvalues map to emission lines via
    :func:`generator_eig_to_line`.
    """

    m: int
    op_index: tuple[tuple[int, int], ...]
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix)

    def line_values(self) -> np.ndarray:
        return generator_eig_to_line(self.eigenvalues())


@dataclass(frozen=True)
class PopulationBlock:
    """Diagonal block of the within-manifold sector of manifold ``m``.

    Only the decay-out part: the cascade feed from manifold ``m + 1`` lives in
    the off-diagonal blocks of the full generator and does not affect
    eigenvalues.
    """

    m: int
    op_index: tuple[tuple[int, int], ...]
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix)

    def line_values(self) -> np.ndarray:
        return generator_eig_to_line(self.eigenvalues())


def _require_complete(basis: TruncatedBasis, n: int, what: str) -> None:
    if not basis.is_complete_manifold(n):
        raise ValueError(
            f"{what} needs complete manifold {n}; photon_cutoff="
            f"{basis.photon_cutoff} truncates it"
        )


def regression_block(
    params: SystemParams, basis: TruncatedBasis, m: int
) -> CoherenceBlock:
    """Coherence block for transitions from manifold ``m`` to ``m - 1``.

    Block dimension is ``dim(m-1) * dim(m)``: 3, 12 and then 16 for complete
    manifolds.  Both manifolds must be untruncated.
    """
    if m < 1:
        raise ValueError("regression block needs m >= 1")
    _require_complete(basis, m, "regression block")
    _require_complete(basis, m - 1, "regression block")
    pairs = coherence_ops(basis, m)
    return CoherenceBlock(
        m=m, op_index=tuple(pairs), matrix=_sector_matrix(params, basis, pairs)
    )


def population_block(
    params: SystemParams, basis: TruncatedBasis, m: int
) -> PopulationBlock:
    """Within-manifold block of manifold ``m`` (dimension ``dim(m)^2``)."""
    if m < 0:
        raise ValueError("population block needs m >= 0")
    _require_complete(basis, m, "population block")
    pairs = population_ops(basis, m)
    return PopulationBlock(
        m=m, op_index=tuple(pairs), matrix=_sector_matrix(params, basis, pairs)
    )


def raising_coherence_generator(
    params: SystemParams, basis: TruncatedBasis
) -> tuple[list[tuple[int, int]], np.ndarray]:
    """Generator on the full family of raising coherence operators.

    The operators ``|upper><lower|`` for every adjacent manifold pair span a
    closed space under the adjoint generator, including the cascade feed from
    one sector into the next.  This is the exact propagator space for
    two-time correlation functions: every raising emission operator is a
    linear combination of this family.

    Returns the ordered ``(row, column)`` index pairs (sector-major, sector
    ``m`` holding ``|m><m-1|`` operators) and the matrix ``N`` with
    ``dv/dtau = N v``.
    """
    pairs: list[tuple[int, int]] = []
    for m in range(1, basis.max_manifold + 1):
        rows = basis.manifold_index[m]
        cols = basis.manifold_index[m - 1]
        pairs.extend((r, c) for r in rows for c in cols)
    return pairs, _sector_matrix(params, basis, pairs)


# ---------------------------------------------------------------------------
# eigenvalue convention
# ---------------------------------------------------------------------------

def generator_eig_to_line(mu: np.ndarray | complex) -> np.ndarray | complex:
    """Map a real-time generator eigenvalue to a complex line value.

    The line value's real part is the emission position; its imaginary part
    is minus half the width.  Used everywhere a block spectrum is compared
    with closed-form eigenenergies.
    """
    return 1j * mu


def line_to_generator_eig(lam: np.ndarray | complex) -> np.ndarray | complex:
    """Inverse of :func:`generator_eig_to_line`."""
    return -1j * lam
