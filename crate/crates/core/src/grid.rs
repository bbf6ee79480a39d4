//! Periodic box `[-L, L)^2`, sampled fields and the spectral calculus on them.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{NlsError, Result};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform `n x n` periodic grid on `[-L, L)^2` with samples at cell centers.
#[derive(Clone)]
pub struct Grid2D {
    n: usize,
    half_width: f64,
    dx: f64,
    wavenumbers: Vec<f64>,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2D")
            .field("n", &self.n)
            .field("half_width", &self.half_width)
            .field("dx", &self.dx)
            .finish()
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.half_width.to_bits() == other.half_width.to_bits()
    }
}

/// Builds a grid; `n` must be a power of two no smaller than 16.
pub fn make_grid(n: usize, half_width: f64) -> Result<Grid2D> {
    Grid2D::new(n, half_width)
}

impl Grid2D {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(NlsError::InvalidGrid(format!(
                "n = {n} must be a power of two >= 16"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(NlsError::InvalidGrid(format!(
                "half-width L = {half_width} must be positive"
            )));
        }
        let dx = 2.0 * half_width / n as f64;
        let base = std::f64::consts::PI / half_width;
        let wavenumbers = (0..n)
            .map(|i| {
                let j = if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
                base * j as f64
            })
            .collect();
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        };
        Ok(Self {
            n,
            half_width,
            dx,
            wavenumbers,
            plans: Arc::new(plans),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Cell area `dx^2`, the weight of the periodic rectangle rule.
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dx
    }

    /// Wavenumbers in transform order: `pi j / L` for `j = 0..n/2-1, -n/2..-1`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * (self.n / 2) as f64 / self.half_width
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell-center coordinate along one axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.dx
    }

    /// Coordinates `(x, y)` of the flat row-major index `idx`.
    #[inline]
    pub fn point(&self, idx: usize) -> (f64, f64) {
        (self.coord(idx % self.n), self.coord(idx / self.n))
    }

    /// `|k|^2` for the flat spectral index; symmetric under axis swap.
    #[inline]
    pub fn k_sq(&self, idx: usize) -> f64 {
        let kx = self.wavenumbers[idx % self.n];
        let ky = self.wavenumbers[idx / self.n];
        kx * kx + ky * ky
    }

    /// Whether the spectral index lies in the top octave (`max(|kx|,|ky|) > k_nyq / 2`).
    #[inline]
    pub fn in_top_octave(&self, idx: usize) -> bool {
        let half = self.nyquist() / 2.0;
        let kx = self.wavenumbers[idx % self.n].abs();
        let ky = self.wavenumbers[idx / self.n].abs();
        kx.max(ky) > half + 1e-12 * half
    }

    /// Unnormalized forward 2D DFT. The output is stored transposed, which
    /// is harmless for every multiplier that depends on `|k|` only.
    pub fn forward_transposed(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.transform(&self.plans.forward, data, scratch);
    }

    /// Inverse of [`Grid2D::forward_transposed`], including the `1/n^2` factor.
    pub fn inverse_transposed(&self, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        self.transform(&self.plans.inverse, data, scratch);
        let norm = 1.0 / (self.n * self.n) as f64;
        for v in data.iter_mut() {
            *v *= norm;
        }
    }

    fn transform(&self, plan: &Arc<dyn Fft<f64>>, data: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        debug_assert_eq!(data.len(), self.len());
        let need = plan.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex64::new(0.0, 0.0));
        }
        plan.process_with_scratch(data, &mut scratch[..need]);
        transpose_in_place(data, self.n);
        plan.process_with_scratch(data, &mut scratch[..need]);
    }
}

pub(crate) fn transpose_in_place(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Complex samples of a wavefunction on a [`Grid2D`] at simulation time `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid2D,
    values: Vec<Complex64>,
    time: f64,
}

impl Field {
    pub fn new(grid: Grid2D, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(NlsError::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(NlsError::NonFinite { index });
        }
        if !time.is_finite() {
            return Err(NlsError::Precondition(format!("time must be finite, got {time}")));
        }
        Ok(Self { grid, values, time })
    }

    pub fn zeros(grid: &Grid2D) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid: grid.clone(),
            time: 0.0,
        }
    }

    /// Samples `f(x, y)` at every cell center.
    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let values = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.point(idx);
                f(x, y)
            })
            .collect();
        Self::new(grid.clone(), values, 0.0)
    }

    /// Real radial profile `f(|x|)`.
    pub fn from_radial(grid: &Grid2D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, |x, y| Complex64::new(f(x.hypot(y)), 0.0))
    }

    pub(crate) fn from_parts_unchecked(grid: Grid2D, values: Vec<Complex64>, time: f64) -> Self {
        Self { grid, values, time }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Multiplies every sample by a real scalar.
    pub fn scaled(&self, a: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * a).collect(),
            time: self.time,
        }
    }

    /// Largest pointwise difference against another field on the same grid.
    pub fn sup_distance(&self, other: &Field) -> Result<f64> {
        ensure_same_grid(&self.grid, &other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Transposed spectrum (see [`Grid2D::forward_transposed`]).
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut data = self.values.clone();
        let mut scratch = Vec::new();
        self.grid.forward_transposed(&mut data, &mut scratch);
        data
    }
}

pub(crate) fn ensure_same_grid(a: &Grid2D, b: &Grid2D) -> Result<()> {
    if a != b {
        return Err(NlsError::GridMismatch(format!(
            "n = {} / L = {} versus n = {} / L = {}",
            a.n(),
            a.half_width(),
            b.n(),
            b.half_width()
        )));
    }
    Ok(())
}

/// `||u||_{L^2}^2` by the periodic rectangle rule.
pub fn mass(field: &Field) -> f64 {
    field.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid.cell_area()
}

/// Mass computed from the spectrum (Parseval).
pub fn spectral_mass(field: &Field) -> f64 {
    let spec = field.spectrum();
    spectral_sum(&field.grid, &spec, |_| 1.0)
}

/// `sum w(k) |U_k|^2` scaled so that `w = 1` reproduces the physical mass.
pub(crate) fn spectral_sum(grid: &Grid2D, spec: &[Complex64], w: impl Fn(usize) -> f64) -> f64 {
    let n2 = (grid.n() * grid.n()) as f64;
    spec.iter()
        .enumerate()
        .map(|(idx, v)| w(idx) * v.norm_sqr())
        .sum::<f64>()
        * grid.cell_area()
        / n2
}

/// `||grad u||^2 = sum |k|^2 |u_k|^2` with the unitary normalization.
pub fn grad_norm_sq(field: &Field) -> f64 {
    let spec = field.spectrum();
    spectral_sum(&field.grid, &spec, |idx| field.grid.k_sq(idx))
}

/// `||u||_{H^1}^2 = ||u||^2 + ||grad u||^2` from one spectrum.
pub fn h1_norm_sq(field: &Field) -> f64 {
    let spec = field.spectrum();
    spectral_sum(&field.grid, &spec, |idx| 1.0 + field.grid.k_sq(idx))
}

/// Fraction of the spectral mass carried by the top octave of modes.
pub fn tail_fraction(field: &Field) -> f64 {
    let spec = field.spectrum();
    tail_fraction_of(&field.grid, &spec)
}

pub(crate) fn tail_fraction_of(grid: &Grid2D, spec: &[Complex64]) -> f64 {
    let total: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let top: f64 = spec
        .iter()
        .enumerate()
        .filter(|(idx, _)| grid.in_top_octave(*idx))
        .map(|(_, v)| v.norm_sqr())
        .sum();
    top / total
}

/// `||u||_{L^p}` for `p >= 1`.
pub fn lp_norm(field: &Field, p: f64) -> f64 {
    let sum: f64 = field.values.iter().map(|v| v.norm().powf(p)).sum();
    (sum * field.grid.cell_area()).powf(1.0 / p)
}

/// Fraction of the mass located at `|x| > radius`.
pub fn outer_mass_fraction(field: &Field, radius: f64) -> f64 {
    let grid = &field.grid;
    let mut total = 0.0;
    let mut outside = 0.0;
    for (idx, v) in field.values.iter().enumerate() {
        let (x, y) = grid.point(idx);
        let m = v.norm_sqr();
        total += m;
        if x.hypot(y) > radius {
            outside += m;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

/// Largest admissible fraction of mass outside `r = L/2` for [`variance`].
pub const VARIANCE_EDGE_TOLERANCE: f64 = 1e-6;

/// `|| x u ||^2` with box-centred coordinates.
pub fn variance(field: &Field) -> Result<f64> {
    let radius = 0.5 * field.grid.half_width();
    let outside = outer_mass_fraction(field, radius);
    if outside > VARIANCE_EDGE_TOLERANCE {
        return Err(NlsError::MassTouchingBoundary { outside, radius });
    }
    let grid = &field.grid;
    let sum: f64 = field
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let (x, y) = grid.point(idx);
            (x * x + y * y) * v.norm_sqr()
        })
        .sum();
    Ok(sum * grid.cell_area())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_construction() {
        let g = make_grid(64, 8.0).unwrap();
        assert_eq!(g.dx(), 0.25);
        let g = make_grid(16, 4.0).unwrap();
        assert_eq!(g.dx(), 0.5);
        let kmax = g.wavenumbers().iter().fold(0.0f64, |m, k| m.max(k.abs()));
        assert!((kmax - 2.0 * PI).abs() < 1e-15);
        assert!(matches!(make_grid(17, 4.0), Err(NlsError::InvalidGrid(_))));
        assert!(matches!(make_grid(8, 4.0), Err(NlsError::InvalidGrid(_))));
        assert!(matches!(make_grid(32, 0.0), Err(NlsError::InvalidGrid(_))));
        assert!(matches!(make_grid(32, -1.0), Err(NlsError::InvalidGrid(_))));
    }

    #[test]
    fn wavenumbers_symmetric_up_to_nyquist() {
        let g = make_grid(32, 3.0).unwrap();
        let k = g.wavenumbers();
        for j in 1..16 {
            assert!((k[j] + k[32 - j]).abs() < 1e-14);
        }
        assert!((k[16] + g.nyquist()).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_finite() {
        let g = make_grid(16, 1.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); 256];
        v[7] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(Field::new(g.clone(), v, 0.0), Err(NlsError::NonFinite { index: 7 })));
        assert!(Field::new(g, vec![Complex64::new(0.0, 0.0); 3], 0.0).is_err());
    }

    #[test]
    fn zero_field_functionals() {
        let g = make_grid(32, 4.0).unwrap();
        let z = Field::zeros(&g);
        assert_eq!(mass(&z), 0.0);
        assert_eq!(grad_norm_sq(&z), 0.0);
        assert_eq!(variance(&z).unwrap(), 0.0);
        assert_eq!(tail_fraction(&z), 0.0);
    }

    #[test]
    fn plane_wave_mass_and_gradient() {
        let g = make_grid(32, 4.0).unwrap();
        let a = 0.7;
        let (jx, jy) = (3.0, -2.0);
        let (kx, ky) = (PI * jx / 4.0, PI * jy / 4.0);
        let f = Field::from_fn(&g, |x, y| Complex64::from_polar(a, kx * x + ky * y)).unwrap();
        let box_area = 64.0;
        assert!((mass(&f) - a * a * box_area).abs() < 1e-12);
        let expect = a * a * box_area * (kx * kx + ky * ky);
        assert!((grad_norm_sq(&f) - expect).abs() < 1e-11 * expect);
    }

    #[test]
    fn gaussian_closed_forms() {
        // u = exp(-|x|^2): mass = pi/2, ||grad u||^2 = pi, ||x u||^2 = pi/8.
        let g = make_grid(128, 8.0).unwrap();
        let f = Field::from_radial(&g, |r| (-r * r).exp()).unwrap();
        assert!((mass(&f) - PI / 2.0).abs() < 1e-10);
        assert!((grad_norm_sq(&f) - PI).abs() < 1e-10);
        assert!((variance(&f).unwrap() - PI / 4.0).abs() < 1e-10);
        assert!((spectral_mass(&f) - mass(&f)).abs() < 1e-12 * mass(&f));
    }

    #[test]
    fn concentrated_field_variance() {
        let g = make_grid(64, 8.0).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); g.len()];
        // cell (31, 31) has center (-dx/2, -dx/2).
        let idx = 31 * 64 + 31;
        v[idx] = Complex64::new(1.0 / g.dx(), 0.0);
        let f = Field::new(g.clone(), v, 0.0).unwrap();
        assert!((mass(&f) - 1.0).abs() < 1e-14);
        let var = variance(&f).unwrap();
        assert!((var - 0.5 * g.dx() * g.dx()).abs() < 1e-14);
    }

    #[test]
    fn variance_rejects_boundary_mass() {
        let g = make_grid(32, 4.0).unwrap();
        let f = Field::from_fn(&g, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(variance(&f), Err(NlsError::MassTouchingBoundary { .. })));
    }

    #[test]
    fn forward_inverse_round_trip() {
        let g = make_grid(32, 2.0).unwrap();
        let f = Field::from_fn(&g, |x, y| Complex64::new((x * y).sin(), (x - y).cos())).unwrap();
        let mut data = f.values().to_vec();
        let mut scratch = Vec::new();
        g.forward_transposed(&mut data, &mut scratch);
        g.inverse_transposed(&mut data, &mut scratch);
        for (a, b) in data.iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
