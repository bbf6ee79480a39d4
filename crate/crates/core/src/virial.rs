//! Localized virial weight `phi_R(x) = R^2 theta(|x|/R)` and the cutoff `chi_R`.
//!
//! `theta(r) = int_0^r int_0^s zeta`, with `zeta = 2` on `[0, 1]`, `zeta = 0`
//! on `[2, inf)` and `zeta(r) = 2 p(2 - r)` in between, `p` the quintic
//! smoothstep. Because `zeta` is piecewise polynomial, `theta` and all its
//! derivatives are evaluated in closed form. Beyond `2R` the weight is affine
//! in `r` (`phi_R'' = 0`), it equals `|x|^2` up to `R`.

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::grid::{ensure_same_grid, Field, Grid2D};

/// Nodes of the radial tabulation.
pub const TABLE_NODES: usize = 4096;

/// Quintic smoothstep `p(t) = 6t^5 - 15t^4 + 10t^3` and its derivatives.
fn smoothstep(t: f64) -> [f64; 3] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        t3 * (10.0 + t * (-15.0 + 6.0 * t)),
        30.0 * t2 * (t - 1.0) * (t - 1.0),
        60.0 * t * (1.0 + t * (-3.0 + 2.0 * t)),
    ]
}

/// `zeta(r)`, `zeta'(r)`, `zeta''(r)`.
fn zeta(r: f64) -> [f64; 3] {
    if r <= 1.0 {
        [2.0, 0.0, 0.0]
    } else if r >= 2.0 {
        [0.0, 0.0, 0.0]
    } else {
        let [p, dp, ddp] = smoothstep(2.0 - r);
        [2.0 * p, -2.0 * dp, 2.0 * ddp]
    }
}

/// `theta(r)` and `theta'(r)`.
fn theta(r: f64) -> [f64; 2] {
    const THETA_AT_TWO: f64 = 26.0 / 7.0;
    if r <= 1.0 {
        [r * r, 2.0 * r]
    } else if r >= 2.0 {
        [THETA_AT_TWO + 3.0 * (r - 2.0), 3.0]
    } else {
        let t = 2.0 - r;
        let t4 = t * t * t * t;
        // int p = t^6 - 3 t^5 + 5/2 t^4, int int p = t^7/7 - t^6/2 + t^5/2.
        let ip = t4 * (2.5 + t * (-3.0 + t));
        let iip = t4 * t * (0.5 + t * (-0.5 + t / 7.0));
        [1.0 + 3.0 * (r - 1.0) - 2.0 * (1.0 / 7.0 - iip), 3.0 - 2.0 * ip]
    }
}

/// `C^infinity` step: 0 for `t <= 0`, 1 for `t >= 1`.
fn smooth_transition(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Radial cutoff `chi(rho)`: 1 on `rho <= 1/2`, 0 on `rho >= 1`.
pub fn chi(rho: f64) -> f64 {
    smooth_transition(2.0 * (1.0 - rho))
}

/// One row of the radial tabulation of `phi_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSample {
    pub r: f64,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub chi: f64,
}

impl WeightSample {
    /// `Delta phi_R = phi'' + phi'/r` (radial, 2D).
    pub fn laplacian(&self) -> f64 {
        if self.r == 0.0 {
            2.0 * self.d2
        } else {
            self.d2 + self.d1 / self.r
        }
    }

    /// `phi'(r) / r`, with its limit 2 at the origin.
    pub fn d1_over_r(&self) -> f64 {
        if self.r == 0.0 {
            self.d2
        } else {
            self.d1 / self.r
        }
    }

    /// `Delta^2 phi_R = phi'''' + 2 phi'''/r - phi''/r^2 + phi'/r^3`.
    pub fn bilaplacian(&self) -> f64 {
        let r = self.r;
        if r == 0.0 {
            return 0.0;
        }
        self.d4 + 2.0 * self.d3 / r - self.d2 / (r * r) + self.d1 / (r * r * r)
    }
}

/// Evaluates `phi_R` and its first four radial derivatives at `r`.
pub fn weight_sample(radius: f64, r: f64) -> WeightSample {
    let rho = r / radius;
    let [th, dth] = theta(rho);
    let [z, dz, ddz] = zeta(rho);
    WeightSample {
        r,
        value: radius * radius * th,
        d1: radius * dth,
        d2: z,
        d3: dz / radius,
        d4: ddz / (radius * radius),
        chi: chi(rho),
    }
}

/// Virial weight `phi_R` and cutoff `chi_R` tabulated radially and sampled on a grid.
#[derive(Debug, Clone)]
pub struct VirialWeight {
    radius: f64,
    grid: Grid2D,
    table: Vec<WeightSample>,
    weight: Vec<f64>,
    chi: Vec<f64>,
}

/// Builds the weight for radius `R`; requires `0 < 2R < L`.
pub fn make_virial_weight(grid: &Grid2D, radius: f64) -> Result<VirialWeight> {
    VirialWeight::new(grid, radius)
}

impl VirialWeight {
    pub fn new(grid: &Grid2D, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !(2.0 * radius < grid.half_width()) {
            return Err(NlsError::RadiusTooLarge {
                radius,
                half_width: grid.half_width(),
            });
        }
        let r_max = grid.half_width() * std::f64::consts::SQRT_2;
        let table = (0..TABLE_NODES)
            .map(|i| weight_sample(radius, r_max * i as f64 / (TABLE_NODES - 1) as f64))
            .collect();
        let mut weight = Vec::with_capacity(grid.len());
        let mut chi_s = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let (x, y) = grid.point(idx);
            let r = x.hypot(y);
            weight.push(radius * radius * theta(r / radius)[0]);
            chi_s.push(chi(r / radius));
        }
        Ok(Self {
            radius,
            grid: grid.clone(),
            table,
            weight,
            chi: chi_s,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn table(&self) -> &[WeightSample] {
        &self.table
    }

    /// `phi_R` at every grid point.
    pub fn weight_samples(&self) -> &[f64] {
        &self.weight
    }

    /// `chi_R` at every grid point.
    pub fn chi_samples(&self) -> &[f64] {
        &self.chi
    }

    pub fn at(&self, r: f64) -> WeightSample {
        weight_sample(self.radius, r)
    }
}

/// `V_phi = int phi_R |u|^2`.
pub fn localized_virial(field: &Field, weight: &VirialWeight) -> Result<f64> {
    ensure_same_grid(field.grid(), &weight.grid)?;
    let sum: f64 = field
        .values()
        .iter()
        .zip(weight.weight.iter())
        .map(|(v, w)| w * v.norm_sqr())
        .sum();
    Ok(sum * field.grid().cell_area())
}

/// `chi_R u` pointwise.
pub fn cutoff_apply(field: &Field, weight: &VirialWeight) -> Result<Field> {
    ensure_same_grid(field.grid(), &weight.grid)?;
    let values: Vec<Complex64> = field
        .values()
        .iter()
        .zip(weight.chi.iter())
        .map(|(v, c)| v * *c)
        .collect();
    Ok(Field::from_parts_unchecked(field.grid().clone(), values, field.time()))
}
