"""Periodic 2D grid, unitary FFT conventions, and half-wave projections.

Matrix-valued fields live on arrays of shape (..., N, N, n, n): the two grid
axes sit at positions -4 and -3, the Lie matrix axes at -2 and -1.  Fourier
representations use the unitary normalization (norm="ortho") so that the
transform preserves the entrywise l2 norm.

The symbol of the spatial operator is alpha . xi with the constant matrices
ALPHA1, ALPHA2 below; BETA intertwines the two wave projections.  The
projections P(+-, xi) = (1/2)(I +- alpha . xi/|xi|) diagonalize alpha . xi
into |xi| P(+) - |xi| P(-).  At xi = 0 both projections are defined as I/2.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as _fft

from .errors import DegenerateInputError

ALPHA1 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
ALPHA2 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
BETA = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=np.complex128)


def _is_power_of_two(m):
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Square periodic grid: n_points per side, period length, time step."""

    n_points: int
    length: float
    dt: float

    def __post_init__(self):
        if not isinstance(self.n_points, (int, np.integer)):
            raise ValueError("n_points must be an integer")
        if self.n_points < 8 or not _is_power_of_two(self.n_points):
            raise ValueError(f"n_points must be a power of two >= 8, got {self.n_points}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def dx(self):
        return self.length / self.n_points

    @cached_property
    def wavenumbers(self):
        """1D angular frequencies 2 pi k / L in FFT ordering."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    @cached_property
    def kx(self):
        return np.meshgrid(self.wavenumbers, self.wavenumbers, indexing="ij")[0]

    @cached_property
    def ky(self):
        return np.meshgrid(self.wavenumbers, self.wavenumbers, indexing="ij")[1]

    @cached_property
    def kabs(self):
        return np.hypot(self.kx, self.ky)

    @cached_property
    def mode_index(self):
        """Signed integer mode index along one axis, FFT ordering."""
        return np.rint(np.fft.fftfreq(self.n_points) * self.n_points).astype(int)

    @cached_property
    def dealias_mask(self):
        """Two-thirds rule: keep modes with |k_index| <= N/3 in each axis."""
        keep = np.abs(self.mode_index) <= self.n_points // 3
        return np.logical_and.outer(keep, keep)


def _check_field(field, grid):
    field = np.asarray(field)
    n = grid.n_points
    if field.ndim < 4 or field.shape[-4] != n or field.shape[-3] != n:
        raise ValueError(
            f"field shape {field.shape} does not match grid axes (..., {n}, {n}, n, n)"
        )
    return field


def fft_forward(field, grid, workers=1):
    """Physical to Fourier, unitary normalization, over the grid axes."""
    field = _check_field(field, grid)
    return _fft.fft2(field, axes=(-4, -3), norm="ortho", workers=workers)


def fft_inverse(field, grid, workers=1):
    """Fourier to physical, unitary normalization, over the grid axes."""
    field = _check_field(field, grid)
    return _fft.ifft2(field, axes=(-4, -3), norm="ortho", workers=workers)


def alpha_dot(xi):
    """The 2x2 symbol alpha . xi for a single frequency pair."""
    xi = np.asarray(xi, dtype=float)
    return xi[..., 0, None, None] * ALPHA1 + xi[..., 1, None, None] * ALPHA2


def projection_matrices(sign, xi):
    """Wave projections P(sign, xi) = (I + sign * alpha . xi/|xi|) / 2.

    xi has shape (..., 2); the result has shape (..., 2, 2).  Zero
    frequencies get P = I/2, the mean of the two one-sided limits.
    """
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != 2:
        raise ValueError(f"xi must have trailing length 2, got shape {xi.shape}")
    # divide out the largest component first so even subnormal vectors
    # keep an accurate direction; hypot alone would round them to junk
    peak = np.max(np.abs(xi), axis=-1)
    unit = xi / np.where(peak == 0.0, 1.0, peak)[..., None]
    mag = np.hypot(unit[..., 0], unit[..., 1])
    safe = np.where(mag == 0.0, 1.0, mag)
    hat = unit / safe[..., None]
    out = 0.5 * (np.eye(2, dtype=np.complex128) + sign * alpha_dot(hat))
    return np.where(mag[..., None, None] == 0.0, 0.5 * np.eye(2, dtype=np.complex128), out)


def projection_matrix(sign, xi):
    """Single-frequency convenience wrapper around projection_matrices."""
    return projection_matrices(sign, np.asarray(xi, dtype=float).reshape(2))


def projection_multipliers(sign, grid):
    """Entries of P(sign, xi) tabulated on the grid; shape (2, 2, N, N)."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    mag = grid.kabs
    safe = np.where(mag == 0.0, 1.0, mag)
    h1 = np.where(mag == 0.0, 0.0, grid.kx / safe)
    h2 = np.where(mag == 0.0, 0.0, grid.ky / safe)
    p = np.empty((2, 2, grid.n_points, grid.n_points), dtype=np.complex128)
    p[0, 0] = 0.5 * (1.0 + sign * h1)
    p[1, 1] = 0.5 * (1.0 - sign * h1)
    p[0, 1] = 0.5 * sign * h2
    p[1, 0] = 0.5 * sign * h2
    return p


def apply_projection(sign, pair, grid, multipliers=None):
    """Apply the wave projection modewise to a Fourier pair (2, N, N, n, n)."""
    pair = np.asarray(pair)
    if pair.ndim != 5 or pair.shape[0] != 2:
        raise ValueError(f"pair must have shape (2, N, N, n, n), got {pair.shape}")
    _check_field(pair[0], grid)
    p = projection_multipliers(sign, grid) if multipliers is None else multipliers
    w = p[..., None, None]
    out = np.empty_like(pair)
    out[0] = w[0, 0] * pair[0] + w[0, 1] * pair[1]
    out[1] = w[1, 0] * pair[0] + w[1, 1] * pair[1]
    return out


def apply_absD(field, grid, power):
    """Multiply a Fourier field by |xi|^power.

    The zero mode is annihilated for power > 0 and left alone for power = 0.
    For power < 0 the zero mode of the input must vanish; otherwise the
    operation is undefined and DegenerateInputError is raised.
    """
    field = _check_field(field, grid)
    if power == 0:
        return field.copy()
    mag = grid.kabs
    if power < 0:
        zero_amp = np.max(np.abs(field[..., 0, 0, :, :]))
        scale = np.max(np.abs(field))
        if zero_amp > 1e-13 * max(scale, 1e-300):
            raise DegenerateInputError(
                f"negative power {power} needs a vanishing zero mode, "
                f"got amplitude {zero_amp:.3e}"
            )
        safe = np.where(mag == 0.0, 1.0, mag)
        mult = np.where(mag == 0.0, 0.0, safe**power)
    else:
        mult = mag**power
    return field * mult[..., None, None]


def dealias(field, grid):
    """Zero all Fourier modes outside the two-thirds band."""
    field = _check_field(field, grid)
    return field * grid.dealias_mask[..., None, None]


def band_mask(grid, kmax):
    """Boolean (N, N) mask keeping |k_index| <= kmax along both axes."""
    keep = np.abs(grid.mode_index) <= kmax
    return np.logical_and.outer(keep, keep)


def random_band_limited(rng, grid, kmax, shape=(), scale=1.0):
    """Real random scalar fields, band-limited to |k_index| <= kmax.

    Returns an array of shape (*shape, N, N) with roughly unit variance
    before scaling.
    """
    n = grid.n_points
    white = rng.standard_normal((*shape, n, n))
    spec = _fft.fft2(white, axes=(-2, -1), norm="ortho") * band_mask(grid, kmax)
    out = _fft.ifft2(spec, axes=(-2, -1), norm="ortho").real
    rms = np.sqrt(np.mean(out**2, axis=(-2, -1), keepdims=True))
    rms = np.where(rms == 0.0, 1.0, rms)
    return scale * out / rms


def lie_symmetry_defect(fourier_field, grid):
    """How far a Fourier field is from representing an su(n)-valued field.

    A physical field g is anti-Hermitian traceless iff its coefficients
    satisfy g_hat(-k) = -g_hat(k)^H and tr g_hat(k) = 0 for every mode.
    """
    f = _check_field(fourier_field, grid)
    flipped = np.roll(f[..., ::-1, ::-1, :, :], shift=(1, 1), axis=(-4, -3))
    herm = np.max(np.abs(flipped + np.conj(np.swapaxes(f, -1, -2))))
    tr = np.max(np.abs(np.trace(f, axis1=-2, axis2=-1)))
    return max(float(herm), float(tr))


def dilate(field, grid, lam):
    """Dyadic rescaling x -> lam * x realized by shrinking the period.

    The samples of f(lam x) on the grid of period L/lam coincide with the
    samples of f on the original grid, so the returned field is just a
    scaled copy living on GridSpec(N, L/lam, dt/lam).  Mode index k then
    carries frequency lam * (2 pi k / L): amplitudes scale by lam and
    wavevectors dilate by lam, exactly.
    """
    field = np.asarray(field)
    if not lam > 0:
        raise ValueError(f"lam must be positive, got {lam}")
    expo = np.log2(lam)
    if abs(expo - round(expo)) > 1e-12:
        raise ValueError(f"lam must be a dyadic power 2**k, got {lam}")
    new_grid = GridSpec(grid.n_points, grid.length / lam, grid.dt / lam)
    return lam * field, new_grid
