"""Spinor fields on a periodic grid and the Dirac operators acting on them.

Derivatives are Fourier multipliers: ``D_j = -i d/dx_j`` becomes
multiplication by the grid wavenumber ``k_j``.  The Nyquist wavenumber is
kept (as ``-pi/h``), which makes every ``D_j`` an exactly Hermitian matrix
and ``D_j**2`` the spectral second derivative.  Test fields live in an
annulus strictly inside the box, so periodisation never touches them.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .clifford import CliffordRep
from .weights import RadialWeight

BINARY_MAGIC = b"SPINOR1\n"


@dataclass(frozen=True)
class GridSpec:
    n: int
    points: int
    R: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"grid dimension must be >= 1, got {self.n}")
        if self.points < 16 or self.points % 2:
            raise ValueError(f"points per axis must be even and >= 16, got {self.points}")
        if not self.R > 0:
            raise ValueError(f"box half-width must be positive, got {self.R}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.R / self.points

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.n

    @property
    def axes(self) -> tuple[int, ...]:
        """Spatial axes of a ``(m, N, ..., N)`` field array."""
        return tuple(range(1, self.n + 1))

    @cached_property
    def axis(self) -> np.ndarray:
        return -self.R + self.spacing * np.arange(self.points)

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*([self.axis] * self.n), indexing="ij", sparse=True))

    @cached_property
    def radius(self) -> np.ndarray:
        r2 = np.zeros(self.shape)
        for c in self.coords:
            r2 = r2 + c * c
        return np.sqrt(r2)

    @cached_property
    def directions(self) -> tuple[np.ndarray, ...]:
        """omega_j = x_j / |x|, set to 0 at the origin."""
        r = self.radius
        safe = np.where(r > 0, r, 1.0)
        return tuple(np.where(r > 0, c / safe, 0.0) for c in self.coords)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        k = 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.spacing)
        return tuple(np.meshgrid(*([k] * self.n), indexing="ij", sparse=True))

    @cached_property
    def k_squared(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for k in self.wavenumbers:
            out = out + k * k
        return out

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.n, self.points * factor, self.R)

    def to_dict(self) -> dict:
        return {"n": self.n, "points_per_axis": self.points, "box_halfwidth": self.R}


@dataclass(frozen=True, eq=False)
class SpinorField:
    """An m-component complex field, stored as an ``(m, N, ..., N)`` array.

    When ``support_annulus`` is set the values must vanish outside it.
    """

    grid: GridSpec
    values: np.ndarray = field(repr=False)
    support_annulus: tuple[float, float] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != self.grid.n + 1 or v.shape[1:] != self.grid.shape:
            raise ValueError(f"values must have shape (m, {self.grid.shape}), got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.support_annulus is not None:
            r_min, r_max = self.support_annulus
            if not (0 < r_min < r_max < self.grid.R):
                raise ValueError(f"support annulus {self.support_annulus} must satisfy 0 < r_min < r_max < R")
            r = self.grid.radius
            outside = (r <= r_min) | (r >= r_max)
            if outside.any() and np.abs(v[:, outside]).max() > 1e-14:
                raise ValueError("field does not vanish outside its support annulus")

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def with_values(self, values, support_annulus=None) -> "SpinorField":
        return SpinorField(self.grid, values, support_annulus)

    def __mul__(self, c) -> "SpinorField":
        return SpinorField(self.grid, self.values * c, self.support_annulus)

    __rmul__ = __mul__


def _check_rep(rep: CliffordRep, fld: SpinorField):
    if fld.m != rep.m or fld.grid.n != rep.n:
        raise ValueError(
            f"field (n={fld.grid.n}, m={fld.m}) does not match representation (n={rep.n}, m={rep.m})"
        )


def _fft(values, grid):
    return np.fft.fftn(values, axes=grid.axes)


def _ifft(values, grid):
    return np.fft.ifftn(values, axes=grid.axes)


def spectral_derivative(values: np.ndarray, grid: GridSpec, j: int) -> np.ndarray:
    """d/dx_j of a ``(..., N, ..., N)`` array whose last n axes are spatial."""
    ax = tuple(range(values.ndim - grid.n, values.ndim))
    vh = np.fft.fftn(values, axes=ax)
    return np.fft.ifftn(1j * grid.wavenumbers[j] * vh, axes=ax)


def spectral_tail(values: np.ndarray, grid: GridSpec, fraction: float = 2.0 / 3.0) -> float:
    """Relative L2 energy at wavenumbers above ``fraction`` of Nyquist."""
    ax = tuple(range(values.ndim - grid.n, values.ndim))
    vh = np.abs(np.fft.fftn(values, axes=ax)) ** 2
    total = vh.sum()
    if total == 0:
        return 0.0
    kmax = math.pi / grid.spacing
    high = np.zeros(grid.shape, dtype=bool)
    for k in grid.wavenumbers:
        high = high | (np.abs(k) > fraction * kmax)
    return float(np.sqrt(vh[..., high].sum() / total))


def _dirac_symbol_apply(rep: CliffordRep, uh: np.ndarray, grid: GridSpec) -> np.ndarray:
    out = np.zeros_like(uh)
    for a, k in zip(rep.alphas, grid.wavenumbers):
        out += np.tensordot(a, k * uh, axes=(1, 0))
    return out


def apply_dirac(rep: CliffordRep, fld: SpinorField, include_mass: bool = True) -> SpinorField:
    """H u = sum_j alpha_j D_j u (+ beta u)."""
    _check_rep(rep, fld)
    g = fld.grid
    out = _ifft(_dirac_symbol_apply(rep, _fft(fld.values, g), g), g)
    if include_mass:
        out = out + np.tensordot(rep.beta, fld.values, axes=(1, 0))
    return SpinorField(g, out)


def minus_laplacian(fld: SpinorField) -> SpinorField:
    """-Delta u componentwise, as the multiplier |k|^2."""
    g = fld.grid
    return SpinorField(g, _ifft(g.k_squared * _fft(fld.values, g), g))


def apply_angular(rep: CliffordRep, fld: SpinorField) -> SpinorField:
    """L u = sum_{j<k} alpha_j alpha_k (x_j d_k - x_k d_j) u."""
    _check_rep(rep, fld)
    g = fld.grid
    grads = [spectral_derivative(fld.values, g, j) for j in range(g.n)]
    out = np.zeros_like(fld.values)
    for j, k in itertools.combinations(range(g.n), 2):
        rot = g.coords[j] * grads[k] - g.coords[k] * grads[j]
        out += np.tensordot(rep.alphas[j] @ rep.alphas[k], rot, axes=(1, 0))
    return SpinorField(g, out)


def _as_phase_array(phi, grid: GridSpec) -> np.ndarray:
    phi = getattr(phi, "phi", phi)
    phi = np.broadcast_to(np.asarray(phi, dtype=float), grid.shape)
    return phi


def gauge_transform(fld: SpinorField, phi) -> SpinorField:
    """Pointwise multiplication by exp(i phi)."""
    p = _as_phase_array(phi, fld.grid)
    return SpinorField(fld.grid, np.exp(1j * p) * fld.values, fld.support_annulus)


def commutator_residual(rep: CliffordRep, fld: SpinorField, phi, include_mass: bool = True) -> float:
    """|| H(phi u) - phi H u + i sum_j alpha_j (d_j phi) u || (quadrature norm)."""
    _check_rep(rep, fld)
    g = fld.grid
    p = _as_phase_array(phi, g)
    lhs = apply_dirac(rep, SpinorField(g, p * fld.values), include_mass).values
    lhs = lhs - p * apply_dirac(rep, fld, include_mass).values
    rhs = np.zeros_like(fld.values)
    for j, a in enumerate(rep.alphas):
        dphi = spectral_derivative(p, g, j).real
        rhs += np.tensordot(a, dphi * fld.values, axes=(1, 0))
    rhs *= -1j
    return float(np.sqrt(np.sum(np.abs(lhs - rhs) ** 2) * g.cell_volume))


apply_commutator_identity = commutator_residual


@dataclass(frozen=True, eq=False)
class MagneticPotential:
    """A = grad(phi), with the gradient taken spectrally."""

    grid: GridSpec
    phi: np.ndarray = field(repr=False)
    A: tuple[np.ndarray, ...] = field(repr=False)

    @classmethod
    def from_phase(cls, grid: GridSpec, phi, tail_tol: float = 1e-10) -> "MagneticPotential":
        p = np.array(np.broadcast_to(np.asarray(phi, dtype=float), grid.shape))
        tail = spectral_tail(p, grid)
        if tail > tail_tol:
            raise ValueError(f"gauge phase is not resolved on this grid (spectral tail {tail:.3g})")
        p.setflags(write=False)
        A = tuple(spectral_derivative(p, grid, j).real for j in range(grid.n))
        return cls(grid, p, A)

    @classmethod
    def constant(cls, grid: GridSpec, A) -> "MagneticPotential":
        """A constant potential (not a periodic gradient; used for plane-wave checks)."""
        A = tuple(np.full(grid.shape, float(a)) for a in A)
        return cls(grid, np.zeros(grid.shape), A)

    def curl_residual(self) -> float:
        """max |d_j A_k - d_k A_j| over all pairs and grid points."""
        worst = 0.0
        for j, k in itertools.combinations(range(self.grid.n), 2):
            c = spectral_derivative(self.A[k], self.grid, j) - spectral_derivative(self.A[j], self.grid, k)
            worst = max(worst, float(np.abs(c).max()))
        return worst


def apply_magnetic_dirac(
    rep: CliffordRep, fld: SpinorField, pot: MagneticPotential, include_mass: bool = True
) -> SpinorField:
    """H_A u = sum_j alpha_j (D_j - A_j) u (+ beta u)."""
    if pot.grid != fld.grid:
        raise ValueError("potential and field live on different grids")
    out = apply_dirac(rep, fld, include_mass).values.copy()
    for a, Aj in zip(rep.alphas, pot.A):
        out -= np.tensordot(a, Aj * fld.values, axes=(1, 0))
    return SpinorField(fld.grid, out)


def gaussian_phase(grid: GridSpec, amplitude: float = 1.0, width: float | None = None, center=None) -> np.ndarray:
    """amplitude * exp(-|x - center|^2 / (2 width^2)).

    The default width R/8 makes the phase decay to ~1e-14 at the box edge, so
    its spectral gradient is free of wraparound error.
    """
    width = grid.R / 8.0 if width is None else width
    center = np.zeros(grid.n) if center is None else np.asarray(center, dtype=float)
    d2 = np.zeros(grid.shape)
    for c, x0 in zip(grid.coords, center):
        d2 = d2 + (c - x0) ** 2
    return amplitude * np.exp(-d2 / (2.0 * width * width))


def random_smooth_phase(grid: GridSpec, seed: int, terms: int = 3, amplitude: float = 1.0) -> np.ndarray:
    """A seeded sum of Gaussians with random centres, signs and widths.

    Centres stay within 0.15 R of the origin per axis and widths within
    [R/12, R/10], so every term is negligible (< 1e-15) at the box edge.
    """
    rng = np.random.default_rng(seed)
    out = np.zeros(grid.shape)
    for _ in range(terms):
        center = rng.uniform(-0.15, 0.15, grid.n) * grid.R
        width = grid.R * rng.uniform(1 / 12, 1 / 10)
        out += gaussian_phase(grid, amplitude * rng.uniform(-1.0, 1.0), width, center)
    return out


def radial_bump_profile(r, r_min: float, r_max: float):
    """exp(-w^2 / ((r - r_min)(r_max - r))) / exp(-4): 1 at the midpoint, 0 off the annulus."""
    r = np.asarray(r, dtype=float)
    w = r_max - r_min
    inside = (r > r_min) & (r < r_max)
    s = np.where(inside, (r - r_min) * (r_max - r), 1.0)
    return np.where(inside, np.exp(4.0 - w * w / s), 0.0)


def _monomials(n: int, degree: int):
    return [e for d in range(degree + 1) for e in itertools.product(range(d + 1), repeat=n) if sum(e) == d]


def make_annulus_bump(
    grid: GridSpec, m: int, r_min: float, r_max: float, seed: int, max_degree: int = 4
) -> SpinorField:
    """A normalised spinor bump supported in ``r_min < |x| < r_max``.

    Each component is the radial bump times a seeded random polynomial of
    degree ``<= max_degree`` in the direction ``omega``.
    """
    if not (0 < r_min < r_max < grid.R):
        raise ValueError(f"annulus ({r_min}, {r_max}) must satisfy 0 < r_min < r_max < R={grid.R}")
    rng = np.random.default_rng(seed)
    monos = _monomials(grid.n, max_degree)
    coef = (rng.standard_normal((len(monos), m)) + 1j * rng.standard_normal((len(monos), m))) / np.array(
        [1.0 + sum(e) for e in monos]
    )[:, None]
    r = grid.radius
    inside = (r > r_min) & (r < r_max)
    prof = radial_bump_profile(r[inside], r_min, r_max)
    om = [np.broadcast_to(o, grid.shape)[inside] for o in grid.directions]
    basis = np.empty((len(monos), prof.size))
    for i, e in enumerate(monos):
        col = prof.copy()
        for o, p in zip(om, e):
            if p:
                col *= o**p
        basis[i] = col
    vals = np.zeros((m,) + grid.shape, dtype=complex)
    vals[:, inside] = coef.T @ basis
    norm = math.sqrt(float(np.sum(np.abs(vals) ** 2)) * grid.cell_volume)
    return SpinorField(grid, vals / norm, (float(r_min), float(r_max)))


def weighted_norm_sq(fld: SpinorField, w: RadialWeight | None = None, region=None) -> float:
    """Riemann sum of |w(|x|) u(x)|^2 over the grid.

    The sum runs over ``region`` (an annulus ``(r_lo, r_hi)``, closed), or the
    field's support annulus, or else every point except the origin.
    """
    g = fld.grid
    r = g.radius
    region = fld.support_annulus if region is None else region
    mask = (r > 0) if region is None else (r >= region[0]) & (r <= region[1])
    dens = np.sum(np.abs(fld.values[:, mask]) ** 2, axis=0)
    if w is not None:
        dens = dens * np.exp(2.0 * w.log_value(r[mask]))
    return float(dens.sum() * g.cell_volume)


def field_norm(fld: SpinorField) -> float:
    return math.sqrt(float(np.sum(np.abs(fld.values) ** 2)) * fld.grid.cell_volume)


def plane_wave(grid: GridSpec, modes, spinor) -> SpinorField:
    """exp(i xi . x) w with xi = modes * (pi / R) (integer modes keep it periodic)."""
    xi = np.asarray(modes, dtype=float) * math.pi / grid.R
    phase = np.zeros(grid.shape)
    for c, q in zip(grid.coords, xi):
        phase = phase + q * c
    spinor = np.asarray(spinor, dtype=complex)
    return SpinorField(grid, spinor.reshape((-1,) + (1,) * grid.n) * np.exp(1j * phase))


# --- snapshots ---------------------------------------------------------------


def _header(fld: SpinorField) -> dict:
    return {
        **fld.grid.to_dict(),
        "m": fld.m,
        "support_annulus": list(fld.support_annulus) if fld.support_annulus else None,
    }


def save_field_csv(fld: SpinorField, path) -> None:
    """One row per grid point: x_1..x_n, then re/im of each component (C order)."""
    g = fld.grid
    path = Path(path)
    coords = np.stack([np.broadcast_to(c, g.shape).ravel() for c in g.coords], axis=1)
    flat = fld.values.reshape(fld.m, -1).T
    cols = [f"x{j + 1}" for j in range(g.n)]
    for c in range(fld.m):
        cols += [f"re{c}", f"im{c}"]
    data = np.empty((coords.shape[0], g.n + 2 * fld.m))
    data[:, : g.n] = coords
    data[:, g.n :: 2] = flat.real
    data[:, g.n + 1 :: 2] = flat.imag
    with path.open("w", encoding="utf-8") as fh:
        fh.write("# " + json.dumps(_header(fld), sort_keys=True) + "\n")
        fh.write(",".join(cols) + "\n")
        np.savetxt(fh, data, delimiter=",", fmt="%.17g")


def save_field_binary(fld: SpinorField, path) -> None:
    """Magic line, 4-byte little-endian header length, JSON header, complex128 LE values."""
    head = json.dumps(_header(fld), sort_keys=True).encode()
    with Path(path).open("wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(len(head).to_bytes(4, "little"))
        fh.write(head)
        fh.write(np.ascontiguousarray(fld.values, dtype="<c16").tobytes())


def load_field_binary(path) -> SpinorField:
    raw = Path(path).read_bytes()
    if not raw.startswith(BINARY_MAGIC):
        raise ValueError("not a spinor field snapshot")
    off = len(BINARY_MAGIC)
    size = int.from_bytes(raw[off : off + 4], "little")
    head = json.loads(raw[off + 4 : off + 4 + size])
    grid = GridSpec(head["n"], head["points_per_axis"], head["box_halfwidth"])
    vals = np.frombuffer(raw[off + 4 + size :], dtype="<c16").reshape((head["m"],) + grid.shape)
    ann = tuple(head["support_annulus"]) if head["support_annulus"] else None
    return SpinorField(grid, vals.copy(), ann)
