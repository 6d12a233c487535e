"""First-order evolution of the monopole system in characteristic variables.

The four fields are repackaged as two pairs
    u = (a0 + a1, phi + a2),   v = (a0 - a1, phi - a2),
which turns the evolution rows plus the gauge constraint into
    dt u = +alpha . grad u + N(u, v),   dt v = -alpha . grad v + N(v, u),
with (alpha . grad w)_1 = d1 w_1 + d2 w_2, (alpha . grad w)_2 = d2 w_1 - d1 w_2
and the bilinear term N(w, z) = (([w1, z1] + [w2, z2]) / 2, [w2, w1]).
Splitting each pair with the wave projections diagonalizes the symbol:
    dt u_pm = pm i|D| u_pm + P_pm N(u, v),
    dt v_pm = mp i|D| v_pm + P_pm N(v, u).

The solver advances the system with an integrating-factor RK4 step: the
linear half waves are propagated exactly by unimodular phases and only
the projected, dealiased nonlinearity is integrated.  A Duhamel
fixed-point iteration on the same time grid is provided as an
independent cross-check of the time stepper.

Two interchangeable engines implement the step.  The general one tracks
the four projected components as complex matrix fields and works for any
su(n) and even for artificial complex states.  When the state is an
honest su(2) configuration split consistently into its half waves, an
equivalent fast engine evolves the unsplit pairs in the SU2_GENERATORS
coefficient basis: physical fields are then real 3-vectors, commutators
are cross products, the transforms are half-spectrum, and the exact
linear propagator is the per-mode 2 x 2 matrix
    exp(pm i h alpha . xi) = cos(h|xi|) pm i sin(h|xi|) alpha . xihat
acting on the pair index.  Projection commutes with every stage, so the
engines agree to rounding; tests enforce this.

Layout: public arrays keep the grid axes in front, (2, N, N, n, n) per
pair.  Internally the grid axes go last so the transforms act on
contiguous memory.
"""

import os
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft
from scipy.integrate import cumulative_simpson

from .errors import DivergedError
from .gauge_fields import (
    MonopoleConfig,
    TimeDerivatives,
    lorenz_residual,
    monopole_residual,
    random_config,
    sup_norm,
)
from .grid_spectral import (
    GridSpec,
    apply_projection,
    fft_forward,
    fft_inverse,
    projection_multipliers,
)
from .lie import anti_hermitian_defect, bracket, su2_coefficients, su2_matrix

# sign of the phase i|xi| carried by (u_plus, u_minus, v_plus, v_minus)
_COMPONENT_SIGNS = np.array([+1.0, -1.0, -1.0, +1.0])


def _default_workers():
    try:
        return max(1, int(os.environ.get("MONOPOLE_LAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class DiagonalState:
    """Projected characteristic components, physical-space samples.

    Each component is a pair of matrix fields with shape (2, N, N, n, n);
    u_plus + u_minus and v_plus + v_minus recover the su(n)-valued pairs.
    The same container is used for time derivatives of a state.
    """

    grid: GridSpec
    u_plus: np.ndarray
    u_minus: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray

    def __post_init__(self):
        n = self.grid.n_points
        for name in ("u_plus", "u_minus", "v_plus", "v_minus"):
            f = np.asarray(getattr(self, name), dtype=np.complex128)
            if f.ndim != 5 or f.shape[:3] != (2, n, n) or f.shape[-1] != f.shape[-2]:
                raise ValueError(f"{name} must have shape (2, N, N, n, n), got {f.shape}")
            setattr(self, name, f)

    def components(self):
        return (self.u_plus, self.u_minus, self.v_plus, self.v_minus)

    def u(self):
        return self.u_plus + self.u_minus

    def v(self):
        return self.v_plus + self.v_minus


@dataclass
class Trajectory:
    """Sampled evolution: times[j] holds the instant of states[j]."""

    grid: GridSpec
    times: np.ndarray
    states: list


@dataclass
class ResidualRecord:
    """Sup norms of the constraint residuals sampled along an evolution."""

    times: np.ndarray
    lorenz: np.ndarray
    rows: np.ndarray = None


def state_max_abs(state):
    return max(float(np.max(np.abs(c))) for c in state.components())


def state_distance(a, b):
    return max(
        float(np.max(np.abs(x - y))) for x, y in zip(a.components(), b.components())
    )


def to_uv(cfg):
    """Characteristic pairs (u, v) of a configuration, each (2, N, N, n, n)."""
    u = np.stack([cfg.a0 + cfg.a1, cfg.phi + cfg.a2])
    v = np.stack([cfg.a0 - cfg.a1, cfg.phi - cfg.a2])
    return u, v


def from_uv(grid, u, v):
    """Invert to_uv; accepts any pair arrays of shape (2, N, N, n, n)."""
    return MonopoleConfig(
        grid=grid,
        a0=0.5 * (u[0] + v[0]),
        a1=0.5 * (u[0] - v[0]),
        a2=0.5 * (u[1] - v[1]),
        phi=0.5 * (u[1] + v[1]),
    )


def uv_rates_to_derivatives(du, dv):
    """Map pair time derivatives back to the per-field derivatives."""
    return TimeDerivatives(
        dt_a0=0.5 * (du[0] + dv[0]),
        dt_a1=0.5 * (du[0] - dv[0]),
        dt_a2=0.5 * (du[1] - dv[1]),
        dt_phi=0.5 * (du[1] + dv[1]),
    )


def config_and_derivatives(state, rates):
    """Configuration plus per-field time derivatives from a state and its rates."""
    cfg = from_uv(state.grid, state.u(), state.v())
    return cfg, uv_rates_to_derivatives(rates.u(), rates.v())


def pair_nonlinearity(u, v):
    """N(u, v) and N(v, u) evaluated pointwise, no dealiasing."""
    c_uv = 0.5 * (bracket(u[0], v[0]) + bracket(u[1], v[1]))
    n_u = np.stack([c_uv, bracket(u[1], u[0])])
    n_v = np.stack([-c_uv, bracket(v[1], v[0])])
    return n_u, n_v


def pair_rhs(grid, u, v, workers=1):
    """Time derivatives (dt u, dt v) of the undiagonalized pair system.

    The gradient terms are spectral and the bilinear terms are dealiased,
    matching what the projected right-hand side sums to.
    """
    uhat = fft_forward(u, grid, workers=workers)
    vhat = fft_forward(v, grid, workers=workers)
    n_u, n_v = pair_nonlinearity(u, v)
    nu_hat = fft_forward(n_u, grid, workers=workers)
    nv_hat = fft_forward(n_v, grid, workers=workers)
    kx = grid.kx[..., None, None]
    ky = grid.ky[..., None, None]
    keep = grid.dealias_mask[..., None, None]
    du_hat = np.stack([
        1j * (kx * uhat[0] + ky * uhat[1]) + keep * nu_hat[0],
        1j * (ky * uhat[0] - kx * uhat[1]) + keep * nu_hat[1],
    ])
    dv_hat = np.stack([
        -1j * (kx * vhat[0] + ky * vhat[1]) + keep * nv_hat[0],
        -1j * (ky * vhat[0] - kx * vhat[1]) + keep * nv_hat[1],
    ])
    du = fft_inverse(du_hat, grid, workers=workers)
    dv = fft_inverse(dv_hat, grid, workers=workers)
    return du, dv


def diagonal_split(grid, u, v, workers=1):
    """Project the pairs onto the two half waves and return the state."""
    uhat = fft_forward(u, grid, workers=workers)
    vhat = fft_forward(v, grid, workers=workers)
    comps = []
    for pair_hat in (uhat, vhat):
        for sign in (+1, -1):
            proj = apply_projection(sign, pair_hat, grid)
            comps.append(fft_inverse(proj, grid, workers=workers))
    return DiagonalState(grid, *comps)


def state_from_config(cfg, workers=1):
    u, v = to_uv(cfg)
    return diagonal_split(cfg.grid, u, v, workers=workers)


def random_diagonal_state(rng, grid, n=2, amplitude=0.25, kmax=None, workers=1):
    """Random band-limited initial data, already projected."""
    cfg = random_config(rng, grid, n=n, amplitude=amplitude, kmax=kmax)
    return state_from_config(cfg, workers=workers)


def _pack(component):
    # (2, N, N, n, n) -> (2, n, n, N, N)
    return np.ascontiguousarray(np.moveaxis(component, (1, 2), (3, 4)))


def _unpack(component):
    return np.ascontiguousarray(np.moveaxis(component, (3, 4), (1, 2)))


def _matmul_stack(a, b):
    return np.einsum("sijxy,sjkxy->sikxy", a, b)


class HalfWaveSolver:
    """Integrating-factor RK4 for the projected characteristic system."""

    def __init__(self, grid, workers=None, divergence_limit=1e6, force_general=False):
        self.grid = grid
        self.workers = _default_workers() if workers is None else workers
        self.divergence_limit = divergence_limit
        self.force_general = force_general
        # multiplier of the linear term, per component: sign * i|xi|
        self._lam = (
            _COMPONENT_SIGNS.reshape(4, 1, 1, 1, 1, 1)
            * (1j * grid.kabs)[None, None, None, None]
        )
        self._proj = {
            sign: projection_multipliers(sign, grid) for sign in (+1, -1)
        }
        self._keep = grid.dealias_mask
        self._phase_cache = {}
        # half-spectrum tables for the su(2) engine
        nh = grid.n_points // 2 + 1
        self._kx_r = grid.kx[:, :nh]
        self._ky_r = grid.ky[:, :nh]
        self._mag_r = grid.kabs[:, :nh]
        safe = np.where(self._mag_r == 0.0, 1.0, self._mag_r)
        self._hat_r = (
            np.where(self._mag_r == 0.0, 0.0, self._kx_r / safe),
            np.where(self._mag_r == 0.0, 0.0, self._ky_r / safe),
        )
        self._keep_r = grid.dealias_mask[:, :nh]
        self._fast_phase_cache = {}

    # representation changes -------------------------------------------------

    def _to_internal(self, state):
        stacked = np.stack([_pack(c) for c in state.components()])
        return _fft.fft2(stacked, axes=(-2, -1), norm="ortho", workers=self.workers)

    def _to_public(self, y):
        phys = _fft.ifft2(y, axes=(-2, -1), norm="ortho", workers=self.workers)
        return DiagonalState(self.grid, *(_unpack(c) for c in phys))

    # general engine ----------------------------------------------------------

    def _apply_pair_multiplier(self, p, pair_hat):
        return np.stack([
            p[0, 0] * pair_hat[0] + p[0, 1] * pair_hat[1],
            p[1, 0] * pair_hat[0] + p[1, 1] * pair_hat[1],
        ])

    def _nonlin(self, y):
        """Projected dealiased nonlinearity of internal Fourier data."""
        uv_hat = np.stack([y[0] + y[1], y[2] + y[3]])
        uv = _fft.ifft2(uv_hat, axes=(-2, -1), norm="ortho", workers=self.workers)
        u, v = uv[0], uv[1]
        a = np.stack([u[0], u[1], u[1], v[1]])
        b = np.stack([v[0], v[1], u[0], v[0]])
        c = _matmul_stack(a, b) - _matmul_stack(b, a)
        c_uv = 0.5 * (c[0] + c[1])
        n_pair = np.stack([
            np.stack([c_uv, c[2]]),       # N(u, v)
            np.stack([-c_uv, c[3]]),      # N(v, u)
        ])
        n_hat = _fft.fft2(n_pair, axes=(-2, -1), norm="ortho", workers=self.workers)
        out = np.empty_like(y)
        out[0] = self._apply_pair_multiplier(self._proj[+1], n_hat[0])
        out[1] = self._apply_pair_multiplier(self._proj[-1], n_hat[0])
        out[2] = self._apply_pair_multiplier(self._proj[+1], n_hat[1])
        out[3] = self._apply_pair_multiplier(self._proj[-1], n_hat[1])
        out *= self._keep
        return out

    def _phases(self, h):
        key = float(h)
        if key not in self._phase_cache:
            self._phase_cache[key] = (np.exp(h * self._lam), np.exp(0.5 * h * self._lam))
        return self._phase_cache[key]

    def _step(self, y, h, k1=None):
        e1, eh = self._phases(h)
        if k1 is None:
            k1 = self._nonlin(y)
        k2 = self._nonlin(eh * (y + (0.5 * h) * k1))
        k3 = self._nonlin(eh * y + (0.5 * h) * k2)
        k4 = self._nonlin(e1 * y + h * (eh * k3))
        return e1 * (y + (h / 6.0) * k1) + (h / 6.0) * (2.0 * eh * (k2 + k3) + k4)

    # su(2) engine ------------------------------------------------------------

    def _fast_ready(self, state):
        """True when the state is a consistently split su(2) configuration.

        Fast stepping needs real coefficient fields (su(2) pairs), the
        half-wave components to be the actual projections of their sums,
        and empty Nyquist lines, whose sign convention is not shared by
        the half-spectrum transforms.
        """
        if self.force_general or state.u_plus.shape[-1] != 2:
            return False
        scale = max(state_max_abs(state), 1e-30)
        tol = 1e-12 * scale
        nyq = self.grid.n_points // 2
        for pair, plus in ((state.u(), state.u_plus), (state.v(), state.v_plus)):
            if anti_hermitian_defect(pair) > tol:
                return False
            if float(np.max(np.abs(np.trace(pair, axis1=-2, axis2=-1)))) > tol:
                return False
            pair_hat = fft_forward(pair, self.grid, workers=self.workers)
            if (
                float(np.max(np.abs(pair_hat[:, nyq]))) > tol
                or float(np.max(np.abs(pair_hat[:, :, nyq]))) > tol
            ):
                return False
            plus_hat = fft_forward(plus, self.grid, workers=self.workers)
            proj = apply_projection(+1, pair_hat, self.grid)
            if float(np.max(np.abs(proj - plus_hat))) > tol:
                return False
        return True

    def _to_fast(self, state):
        u = su2_coefficients(state.u()).real
        v = su2_coefficients(state.v()).real
        arr = np.ascontiguousarray(np.moveaxis(np.stack([u, v]), -1, 2))
        return _fft.rfft2(arr, axes=(-2, -1), norm="ortho", workers=self.workers)

    def _fast_to_pairs(self, y):
        n = self.grid.n_points
        phys = _fft.irfft2(y, s=(n, n), axes=(-2, -1), norm="ortho", workers=self.workers)
        mats = su2_matrix(np.moveaxis(phys, -3, -1))
        return mats

    def _from_fast(self, y):
        mats = self._fast_to_pairs(y)
        return diagonal_split(self.grid, mats[0], mats[1], workers=self.workers)

    def _fast_phases(self, h):
        key = float(h)
        if key not in self._fast_phase_cache:
            self._fast_phase_cache[key] = tuple(
                self._square_phase(s * h) for s in (1.0, -1.0, 0.5, -0.5)
            )
        return self._fast_phase_cache[key]

    def _square_phase(self, h):
        """exp(i h alpha . xi) tabulated on the half-spectrum grid."""
        cos = np.cos(h * self._mag_r)
        sin = np.sin(h * self._mag_r)
        h1, h2 = self._hat_r
        e = np.empty((2, 2, *self._mag_r.shape), dtype=np.complex128)
        e[0, 0] = cos + 1j * sin * h1
        e[1, 1] = cos - 1j * sin * h1
        e[0, 1] = 1j * sin * h2
        e[1, 0] = e[0, 1]
        return e

    def _apply_uv(self, eu, ev, y):
        out = np.empty_like(y)
        out[0, 0] = eu[0, 0] * y[0, 0] + eu[0, 1] * y[0, 1]
        out[0, 1] = eu[1, 0] * y[0, 0] + eu[1, 1] * y[0, 1]
        out[1, 0] = ev[0, 0] * y[1, 0] + ev[0, 1] * y[1, 1]
        out[1, 1] = ev[1, 0] * y[1, 0] + ev[1, 1] * y[1, 1]
        return out

    def _nonlin_fast(self, y):
        n = self.grid.n_points
        uv = _fft.irfft2(y, s=(n, n), axes=(-2, -1), norm="ortho", workers=self.workers)
        u, v = uv[0], uv[1]
        c_uv = 0.5 * (np.cross(u[0], v[0], axis=0) + np.cross(u[1], v[1], axis=0))
        out = np.empty_like(uv)
        out[0, 0] = c_uv
        out[0, 1] = np.cross(u[1], u[0], axis=0)
        out[1, 0] = -c_uv
        out[1, 1] = np.cross(v[1], v[0], axis=0)
        n_hat = _fft.rfft2(out, axes=(-2, -1), norm="ortho", workers=self.workers)
        n_hat *= self._keep_r
        return n_hat

    def _step_fast(self, y, h, k1=None):
        eu1, ev1, euh, evh = self._fast_phases(h)
        if k1 is None:
            k1 = self._nonlin_fast(y)
        k2 = self._nonlin_fast(self._apply_uv(euh, evh, y + (0.5 * h) * k1))
        k3 = self._nonlin_fast(self._apply_uv(euh, evh, y) + (0.5 * h) * k2)
        k4 = self._nonlin_fast(self._apply_uv(eu1, ev1, y) + h * self._apply_uv(euh, evh, k3))
        return self._apply_uv(eu1, ev1, y + (h / 6.0) * k1) + (h / 6.0) * (
            2.0 * self._apply_uv(euh, evh, k2 + k3) + k4
        )

    def _rates_fast(self, y, k1):
        kx, ky = self._kx_r, self._ky_r
        out = np.empty_like(y)
        out[0, 0] = 1j * (kx * y[0, 0] + ky * y[0, 1]) + k1[0, 0]
        out[0, 1] = 1j * (ky * y[0, 0] - kx * y[0, 1]) + k1[0, 1]
        out[1, 0] = -1j * (kx * y[1, 0] + ky * y[1, 1]) + k1[1, 0]
        out[1, 1] = -1j * (ky * y[1, 0] - kx * y[1, 1]) + k1[1, 1]
        return out

    def _lorenz_sup_fast(self, y, k1):
        rates = self._rates_fast(y, k1)
        res_hat = 0.5 * (
            rates[0, 0] + rates[1, 0]
            - 1j * self._kx_r * (y[0, 0] - y[1, 0])
            - 1j * self._ky_r * (y[0, 1] - y[1, 1])
        )
        n = self.grid.n_points
        res = _fft.irfft2(res_hat, s=(n, n), axes=(-2, -1), norm="ortho", workers=self.workers)
        # Frobenius norm from orthogonal generators with |e_a|^2 = 1/2
        return float(np.max(np.sqrt(0.5 * np.sum(res * res, axis=0))))

    def _config_from_fast(self, y, k1):
        mats = self._fast_to_pairs(np.stack([y, self._rates_fast(y, k1)]))
        cfg = from_uv(self.grid, mats[0, 0], mats[0, 1])
        dts = uv_rates_to_derivatives(mats[1, 0], mats[1, 1])
        return cfg, dts

    # public operations --------------------------------------------------------

    def rhs(self, state):
        """Time derivative of every projected component, as a DiagonalState."""
        y = self._to_internal(state)
        return self._to_public(self._lam * y + self._nonlin(y))

    def rhs_direct(self, state):
        """Pair derivatives (dt u, dt v) from the undiagonalized system."""
        return pair_rhs(self.grid, state.u(), state.v(), workers=self.workers)

    def config_with_derivatives(self, state):
        """Bridge to the residual operators: fields plus evolution rates."""
        return config_and_derivatives(state, self.rhs(state))

    def step(self, state, h=None):
        """One integrating-factor RK4 step of size h (default grid.dt)."""
        h = self.grid.dt if h is None else h
        return self._to_public(self._step(self._to_internal(state), h))

    def free_flow(self, state, t):
        """Exact linear propagation: each component picks up its phase."""
        y = self._to_internal(state)
        return self._to_public(np.exp(t * self._lam) * y)

    def _check_finite(self, peak, t):
        if not np.isfinite(peak) or peak > self.divergence_limit:
            raise DivergedError(
                f"solution blew up at t={t:.6g} (max coefficient {peak:.3g})"
            )

    def evolve(self, state, n_steps, h=None, observer=None):
        """Advance n_steps.  observer(i, t, state, rates) is called before
        each step and once more at the final time; the rates reuse the
        stage-one nonlinearity, so observation stays cheap."""
        h = self.grid.dt if h is None else h
        if observer is None and self._fast_ready(state):
            y = self._to_fast(state)
            for i in range(n_steps):
                y = self._step_fast(y, h)
                self._check_finite(float(np.max(np.abs(y))), (i + 1) * h)
            return self._from_fast(y)
        y = self._to_internal(state)
        t = 0.0
        for i in range(n_steps):
            if observer is not None:
                k1 = self._nonlin(y)
                observer(i, t, self._to_public(y), self._to_public(self._lam * y + k1))
            else:
                k1 = None
            y = self._step(y, h, k1=k1)
            t = (i + 1) * h
            self._check_finite(float(np.max(np.abs(y))), t)
        if observer is not None:
            k1 = self._nonlin(y)
            observer(n_steps, t, self._to_public(y), self._to_public(self._lam * y + k1))
        return self._to_public(y)

    def evolve_with_residuals(self, state, n_steps, h=None, sample_every=1, rows=False):
        """Advance while recording residual sup norms from the evolution rates.

        Returns (final_state, ResidualRecord).  The gauge constraint
        residual is recorded at every sampled instant; with rows=True the
        three evolution-row residuals are recorded as well.
        """
        h = self.grid.dt if h is None else h
        fast = self._fast_ready(state)
        y = self._to_fast(state) if fast else self._to_internal(state)
        times, lorenz_vals, row_vals = [], [], []
        for i in range(n_steps + 1):
            t = i * h
            k1 = None
            if i % sample_every == 0 or i == n_steps:
                times.append(t)
                if fast:
                    k1 = self._nonlin_fast(y)
                    lorenz_vals.append(self._lorenz_sup_fast(y, k1))
                    if rows:
                        cfg, dts = self._config_from_fast(y, k1)
                        row_vals.append([sup_norm(r) for r in monopole_residual(cfg, dts)])
                else:
                    k1 = self._nonlin(y)
                    cfg, dts = config_and_derivatives(
                        self._to_public(y), self._to_public(self._lam * y + k1)
                    )
                    lorenz_vals.append(sup_norm(lorenz_residual(cfg, dts)))
                    if rows:
                        row_vals.append([sup_norm(r) for r in monopole_residual(cfg, dts)])
            if i < n_steps:
                y = self._step_fast(y, h, k1=k1) if fast else self._step(y, h, k1=k1)
                self._check_finite(float(np.max(np.abs(y))), (i + 1) * h)
        final = self._from_fast(y) if fast else self._to_public(y)
        record = ResidualRecord(
            times=np.array(times),
            lorenz=np.array(lorenz_vals),
            rows=np.array(row_vals) if rows else None,
        )
        return final, record

    def trajectory(self, state, n_steps, h=None, store_every=1):
        """Evolve while sampling every store_every steps (final state always)."""
        times, states = [], []

        def keep(i, t, s, rates):
            if i % store_every == 0 or i == n_steps:
                times.append(t)
                states.append(s)

        self.evolve(state, n_steps, h=h, observer=keep)
        return Trajectory(self.grid, np.array(times), states)

    # Duhamel iteration -------------------------------------------------------

    def picard_iterates(self, state, t_final, n_steps, n_iterations):
        """Fixed-point iterates of the Duhamel form at time t_final.

        Iterate zero is the free flow; each pass integrates the projected
        nonlinearity of the previous iterate with a cumulative Simpson rule
        in the co-moving frame.  Returns the list of end states.
        """
        y0 = self._to_internal(state)
        times = np.linspace(0.0, t_final, n_steps + 1)
        phases = np.exp(times.reshape(-1, 1, 1, 1, 1, 1, 1) * self._lam[None])
        z = np.broadcast_to(y0, (n_steps + 1, *y0.shape)).copy()
        iterates = [self._to_public(phases[-1] * z[-1])]
        for _ in range(n_iterations):
            g = np.empty_like(z)
            for j in range(n_steps + 1):
                g[j] = np.conj(phases[j]) * self._nonlin(phases[j] * z[j])
            # cumulative_simpson is real-only, so integrate the parts
            integral = (
                cumulative_simpson(g.real, x=times, axis=0, initial=0.0)
                + 1j * cumulative_simpson(g.imag, x=times, axis=0, initial=0.0)
            )
            z = y0[None] + integral
            iterates.append(self._to_public(phases[-1] * z[-1]))
        return iterates
