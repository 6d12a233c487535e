"""Gauge potential plus Higgs field on the periodic plane.

A configuration holds the temporal potential a0, the spatial potentials
a1, a2, and the Higgs field phi, all su(n)-valued on the grid.  Time
derivatives are carried separately: they come either from the evolution
right-hand side or from finite differencing a trajectory, and the residual
operators below treat them as independent inputs.

Sign conventions.  The curvature components are
    F_01 = dt a1 - d1 a0 + [a0, a1]
    F_02 = dt a2 - d2 a0 + [a0, a2]
    F_12 = d1 a2 - d2 a1 + [a1, a2]
and the dual of the covariant derivative of phi has components
    (*D phi)_01 = D2 phi,   (*D phi)_02 = -D1 phi,   (*D phi)_12 = -Dt phi
where Dt phi = dt phi + [a0, phi] and Dj phi = dj phi + [aj, phi].
Setting F = *D phi componentwise reproduces the three evolution rows in
monopole_residual, which are implemented independently as a cross-check.
"""

import struct
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .grid_spectral import GridSpec, _check_field, band_mask, dilate, random_band_limited
from .lie import bracket, conjugate, dagger, random_lie, lie_expm, su_basis

_HEADER = struct.Struct("<IdId")


@dataclass
class MonopoleConfig:
    """Snapshot of the four su(n)-valued fields at one instant."""

    grid: GridSpec
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        for name in ("a0", "a1", "a2", "phi"):
            f = np.asarray(getattr(self, name), dtype=np.complex128)
            _check_field(f, self.grid)
            if f.ndim != 4 or f.shape[-1] != f.shape[-2]:
                raise ValueError(f"{name} must have shape (N, N, n, n), got {f.shape}")
            setattr(self, name, f)
        shapes = {getattr(self, k).shape for k in ("a0", "a1", "a2", "phi")}
        if len(shapes) != 1:
            raise ValueError(f"field shapes disagree: {shapes}")

    @property
    def matrix_dim(self):
        return self.a0.shape[-1]

    def fields(self):
        return (self.a0, self.a1, self.a2, self.phi)


@dataclass
class TimeDerivatives:
    """Time derivatives of the four fields, same layout as MonopoleConfig."""

    dt_a0: np.ndarray
    dt_a1: np.ndarray
    dt_a2: np.ndarray
    dt_phi: np.ndarray

    def fields(self):
        return (self.dt_a0, self.dt_a1, self.dt_a2, self.dt_phi)


def spatial_gradient(field, grid):
    """Spectral (d1 f, d2 f) of a physical field (..., N, N, n, n)."""
    spec = _fft.fft2(np.asarray(field), axes=(-4, -3), norm="ortho")
    w1 = (1j * grid.kx)[..., None, None]
    w2 = (1j * grid.ky)[..., None, None]
    d1 = _fft.ifft2(w1 * spec, axes=(-4, -3), norm="ortho")
    d2 = _fft.ifft2(w2 * spec, axes=(-4, -3), norm="ortho")
    return d1, d2


def sup_norm(field):
    """Largest pointwise Frobenius norm over the grid."""
    f = np.asarray(field)
    return float(np.max(np.sqrt(np.sum(np.abs(f) ** 2, axis=(-2, -1)))))


def covariant_derivative(cfg, dts):
    """(Dt phi, D1 phi, D2 phi) with Dt from dts and Dj spectral."""
    d1, d2 = spatial_gradient(cfg.phi, cfg.grid)
    dt = dts.dt_phi + bracket(cfg.a0, cfg.phi)
    return dt, d1 + bracket(cfg.a1, cfg.phi), d2 + bracket(cfg.a2, cfg.phi)


def curvature(cfg, dts):
    """Curvature components (F_01, F_02, F_12)."""
    d1a0, d2a0 = spatial_gradient(cfg.a0, cfg.grid)
    d1a2, _ = spatial_gradient(cfg.a2, cfg.grid)
    _, d2a1 = spatial_gradient(cfg.a1, cfg.grid)
    f01 = dts.dt_a1 - d1a0 + bracket(cfg.a0, cfg.a1)
    f02 = dts.dt_a2 - d2a0 + bracket(cfg.a0, cfg.a2)
    f12 = d1a2 - d2a1 + bracket(cfg.a1, cfg.a2)
    return f01, f02, f12


def hodge_dual_covariant(cfg, dts):
    """Components (h_01, h_02, h_12) of the dual of D phi."""
    dt, d1, d2 = covariant_derivative(cfg, dts)
    return d2, -d1, -dt


def monopole_residual(cfg, dts):
    """Rowwise residual (left side minus right side) of the first-order system:

        dt phi + d1 a2 - d2 a1 = [a2, a1] + [phi, a0]
        dt a1 - d1 a0 - d2 phi = [a1, a0] + [a2, phi]
        dt a2 - d2 a0 + d1 phi = [a2, a0] + [phi, a1]
    """
    a0, a1, a2, phi = cfg.fields()
    d1a0, d2a0 = spatial_gradient(a0, cfg.grid)
    d1a2, d2a1 = spatial_gradient(a2, cfg.grid)[0], spatial_gradient(a1, cfg.grid)[1]
    d1phi, d2phi = spatial_gradient(phi, cfg.grid)
    r1 = dts.dt_phi + d1a2 - d2a1 - bracket(a2, a1) - bracket(phi, a0)
    r2 = dts.dt_a1 - d1a0 - d2phi - bracket(a1, a0) - bracket(a2, phi)
    r3 = dts.dt_a2 - d2a0 + d1phi - bracket(a2, a0) - bracket(phi, a1)
    return r1, r2, r3


def monopole_residual_via_dual(cfg, dts):
    """Residual from F - *D phi, ordered to match monopole_residual rows."""
    f01, f02, f12 = curvature(cfg, dts)
    h01, h02, h12 = hodge_dual_covariant(cfg, dts)
    return f12 - h12, f01 - h01, f02 - h02


def lorenz_residual(cfg, dts):
    """dt a0 - d1 a1 - d2 a2, the gauge constraint residual."""
    d1a1, _ = spatial_gradient(cfg.a1, cfg.grid)
    _, d2a2 = spatial_gradient(cfg.a2, cfg.grid)
    return dts.dt_a0 - d1a1 - d2a2


def gauge_transform(o, do, cfg, dts):
    """Apply a time-independent gauge map O(x).

    do holds the spatial derivatives (d1 O, d2 O).  The potentials pick up
    the inhomogeneous term -(dj O) O^{-1}; a0, phi, and all time derivatives
    conjugate, which is exact because dt O = 0.
    """
    o = np.asarray(o, dtype=np.complex128)
    d1o, d2o = (np.asarray(d, dtype=np.complex128) for d in do)
    _check_field(o, cfg.grid)
    eye = np.eye(o.shape[-1], dtype=np.complex128)
    if np.max(np.abs(o @ dagger(o) - eye)) > 1e-8:
        raise ValueError("gauge map is not unitary")
    oh = dagger(o)
    new_cfg = MonopoleConfig(
        grid=cfg.grid,
        a0=conjugate(o, cfg.a0),
        a1=conjugate(o, cfg.a1) - d1o @ oh,
        a2=conjugate(o, cfg.a2) - d2o @ oh,
        phi=conjugate(o, cfg.phi),
    )
    new_dts = TimeDerivatives(
        dt_a0=conjugate(o, dts.dt_a0),
        dt_a1=conjugate(o, dts.dt_a1),
        dt_a2=conjugate(o, dts.dt_a2),
        dt_phi=conjugate(o, dts.dt_phi),
    )
    return new_cfg, new_dts


def rescale(cfg, lam):
    """Dyadic scaling symmetry at fixed time: lam * f(lam x) for every field.

    Realized exactly by dilating the domain (see grid_spectral.dilate); the
    returned configuration lives on a grid of period L/lam.
    """
    a0, new_grid = dilate(cfg.a0, cfg.grid, lam)
    a1, _ = dilate(cfg.a1, cfg.grid, lam)
    a2, _ = dilate(cfg.a2, cfg.grid, lam)
    phi, _ = dilate(cfg.phi, cfg.grid, lam)
    return MonopoleConfig(grid=new_grid, a0=a0, a1=a1, a2=a2, phi=phi)


def random_config(rng, grid, n=2, amplitude=0.25, kmax=None):
    """Random smooth configuration, band-limited to |k_index| <= kmax."""
    if kmax is None:
        kmax = max(1, grid.n_points // 6)
    basis = su_basis(n)
    dim = n * n - 1
    coeffs = random_band_limited(rng, grid, kmax, shape=(4, dim), scale=amplitude)
    fields = np.einsum("faxy,aij->fxyij", coeffs, basis)
    return MonopoleConfig(grid=grid, a0=fields[0], a1=fields[1], a2=fields[2], phi=fields[3])


def random_derivatives(rng, grid, n=2, amplitude=0.25, kmax=None):
    """Random band-limited TimeDerivatives, independent of any configuration."""
    cfg = random_config(rng, grid, n=n, amplitude=amplitude, kmax=kmax)
    return TimeDerivatives(dt_a0=cfg.a0, dt_a1=cfg.a1, dt_a2=cfg.a2, dt_phi=cfg.phi)


def random_gauge_map(rng, grid, n=2, amplitude=0.4, kmax=3):
    """Smooth periodic gauge map O(x) = exp(X(x)) and its spatial derivatives.

    O is analytic in x, so its spectral derivatives converge superalgebraically
    even though O itself is not band-limited.
    """
    x = amplitude * random_lie(rng, n=n, shape=(grid.n_points, grid.n_points))
    x = np.asarray(x, dtype=np.complex128)
    spec = _fft.fft2(x, axes=(0, 1), norm="ortho") * band_mask(grid, kmax)[..., None, None]
    x = _fft.ifft2(spec, axes=(0, 1), norm="ortho")
    x = 0.5 * (x - dagger(x))  # restore exact anti-Hermiticity after masking
    x = x - np.trace(x, axis1=-2, axis2=-1)[..., None, None] * np.eye(n) / n
    o = lie_expm(x)
    d1o, d2o = spatial_gradient(o, grid)
    return o, (d1o, d2o)


def save_snapshot(path, cfg, time=0.0):
    """Binary snapshot: little-endian header (N, L, n, time) then the four
    fields row-major as interleaved float64 real/imag pairs, in the order
    a0, a1, a2, phi."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(cfg.grid.n_points, cfg.grid.length, cfg.matrix_dim, time))
        for field in cfg.fields():
            fh.write(np.ascontiguousarray(field).astype("<c16").tobytes())


def load_snapshot(path, dt=1e-3):
    """Inverse of save_snapshot; the time step is not stored, pass it in."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        n_points, length, n, time = _HEADER.unpack(raw)
        grid = GridSpec(n_points, length, dt)
        count = n_points * n_points * n * n
        fields = []
        for _ in range(4):
            buf = fh.read(count * 16)
            arr = np.frombuffer(buf, dtype="<c16").reshape(n_points, n_points, n, n)
            fields.append(arr.astype(np.complex128))
    cfg = MonopoleConfig(grid=grid, a0=fields[0], a1=fields[1], a2=fields[2], phi=fields[3])
    return cfg, time
