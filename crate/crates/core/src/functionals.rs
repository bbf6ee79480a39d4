//! Conserved quantities and variational functionals evaluated on a [`Field`].

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::{spectral_sum, tail_fraction_of, Field, Grid2D};
use crate::kernels::{self, Mu};

/// `||u||_{L^p}` for `p = 2, 4, 6, 8`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LpNorms {
    pub l2: f64,
    pub l4: f64,
    pub l6: f64,
    pub l8: f64,
}

impl LpNorms {
    pub fn get(&self, p: u32) -> Option<f64> {
        match p {
            2 => Some(self.l2),
            4 => Some(self.l4),
            6 => Some(self.l6),
            8 => Some(self.l8),
            _ => None,
        }
    }
}

/// All functionals of one snapshot, computed from the same samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FunctionalReport {
    pub time: f64,
    /// `M = ||u||^2`.
    pub mass: f64,
    /// `||grad u||^2`.
    pub grad_sq: f64,
    /// `int F_mu(u)`.
    pub potential_integral: f64,
    /// `E = grad_sq / 2 - int F`.
    pub energy: f64,
    /// `S = E + M / 2`.
    pub action: f64,
    /// `P = M / 2 - int F`.
    pub p_functional: f64,
    /// `I = ||grad u||^2 - int (conj(u) f(u) - 2 F(u))`.
    pub i_functional: f64,
    /// `int (conj(u) f(u) - 4 F(u))`, nonnegative for every field.
    pub defect_integral: f64,
    pub lp_norms: LpNorms,
    /// Fraction of the mass beyond `r = L/2`.
    pub edge_mass_fraction: f64,
    /// Fraction of the spectral mass in the top octave of modes.
    pub tail_fraction: f64,
}

/// Evaluates the full [`FunctionalReport`] of `field`.
pub fn functionals(field: &Field, mu: Mu) -> Result<FunctionalReport> {
    let spec = field.spectrum();
    functionals_with_spectrum(field, &spec, mu)
}

pub(crate) fn functionals_with_spectrum(
    field: &Field,
    spec: &[Complex64],
    mu: Mu,
) -> Result<FunctionalReport> {
    let grid = field.grid();
    let grad_sq = spectral_sum(grid, spec, |idx| grid.k_sq(idx));
    let tail_fraction = tail_fraction_of(grid, spec);
    let sums = pointwise_sums(grid, field.values(), mu)?;
    let area = grid.cell_area();

    let mass = sums.mass * area;
    let potential_integral = sums.potential * area;
    let energy = 0.5 * grad_sq - potential_integral;
    Ok(FunctionalReport {
        time: field.time(),
        mass,
        grad_sq,
        potential_integral,
        energy,
        action: energy + 0.5 * mass,
        p_functional: 0.5 * mass - potential_integral,
        i_functional: grad_sq - sums.virial * area,
        defect_integral: sums.defect * area,
        lp_norms: LpNorms {
            l2: mass.sqrt(),
            l4: (sums.p4 * area).powf(0.25),
            l6: (sums.p6 * area).powf(1.0 / 6.0),
            l8: (sums.p8 * area).powf(0.125),
        },
        edge_mass_fraction: if sums.mass > 0.0 {
            sums.edge / sums.mass
        } else {
            0.0
        },
        tail_fraction,
    })
}

#[derive(Default)]
struct PointSums {
    mass: f64,
    potential: f64,
    virial: f64,
    defect: f64,
    p4: f64,
    p6: f64,
    p8: f64,
    edge: f64,
}

fn pointwise_sums(grid: &Grid2D, values: &[Complex64], mu: Mu) -> Result<PointSums> {
    let edge_r2 = 0.25 * grid.half_width() * grid.half_width();
    let mut s = PointSums::default();
    for (idx, v) in values.iter().enumerate() {
        let rho = v.norm_sqr();
        if rho == 0.0 {
            continue;
        }
        s.mass += rho;
        s.potential += kernels::big_f(rho, mu)?;
        s.virial += kernels::virial_density(rho, mu)?;
        s.defect += kernels::defect_density(rho, mu)?;
        let rho2 = rho * rho;
        s.p4 += rho2;
        s.p6 += rho2 * rho;
        s.p8 += rho2 * rho2;
        let (x, y) = grid.point(idx);
        if x * x + y * y > edge_r2 {
            s.edge += rho;
        }
    }
    Ok(s)
}

/// `int F_mu(u)` alone.
pub fn potential_integral(field: &Field, mu: Mu) -> Result<f64> {
    let mut sum = 0.0;
    for v in field.values() {
        sum += kernels::big_f(v.norm_sqr(), mu)?;
    }
    Ok(sum * field.grid().cell_area())
}

/// `int k_1(4 pi |u|^2)`, the second branch of the coercivity bound.
pub fn k1_integral(field: &Field) -> Result<f64> {
    let mut sum = 0.0;
    for v in field.values() {
        sum += kernels::k1_kernel(4.0 * std::f64::consts::PI * v.norm_sqr())?;
    }
    Ok(sum * field.grid().cell_area())
}

/// `int (e^{4 pi |u|^2} - 1)`, the Moser–Trudinger functional.
pub fn moser_integral(field: &Field) -> Result<f64> {
    let mut sum = 0.0;
    for v in field.values() {
        sum += kernels::multiplier(v.norm_sqr(), Mu::Zero)?;
    }
    Ok(sum * field.grid().cell_area())
}
