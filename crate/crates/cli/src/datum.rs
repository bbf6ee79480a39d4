//! Canonical initial data.

use std::f64::consts::PI;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use nlsx_core::ground_state::RadialProfile;
use nlsx_core::kernels;
use nlsx_core::{load_snapshot, Field, Grid2D, Mu};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub enum Datum {
    /// `a exp(-|x - c|² / w²)`.
    Gaussian { amplitude: f64, width: f64, center: (f64, f64) },
    /// `λ Q_μ(λ x)`.
    ScaledGroundState { lambda: f64 },
    /// `φ(λ x)` with `φ(x) = e^{-|x|} / √(2π)`.
    ExpBump { scale: BumpScale },
    /// A stored `NLSX1` snapshot.
    Custom { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpScale {
    Lambda(f64),
    /// Multiple of [`exp_bump_bound`].
    FractionOfBound(f64),
}

impl Datum {
    pub fn kind(&self) -> &'static str {
        match self {
            Datum::Gaussian { .. } => "gaussian",
            Datum::ScaledGroundState { .. } => "scaled_ground_state",
            Datum::ExpBump { .. } => "exp_bump",
            Datum::Custom { .. } => "custom",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Datum::Gaussian { amplitude, width, center } => {
                ensure!(amplitude > 0.0 && amplitude <= 10.0, "gaussian amplitude {amplitude} not in (0, 10]");
                ensure!(width > 0.0 && width.is_finite(), "gaussian width {width} must be positive");
                ensure!(center.0.is_finite() && center.1.is_finite(), "gaussian center must be finite");
            }
            Datum::ScaledGroundState { lambda } => {
                ensure!(lambda > 0.0 && lambda.is_finite(), "lambda {lambda} must be positive");
            }
            Datum::ExpBump { scale: BumpScale::Lambda(l) } => {
                ensure!(l > 0.0 && l.is_finite(), "exp_bump lambda {l} must be positive");
            }
            Datum::ExpBump { scale: BumpScale::FractionOfBound(f) } => {
                ensure!(f > 0.0 && f.is_finite(), "exp_bump fraction {f} must be positive");
            }
            Datum::Custom { ref path } => {
                ensure!(path.exists(), "snapshot {} does not exist", path.display());
            }
        }
        Ok(())
    }
}

/// `e^{-r} / √(2π)`, the radial profile of the bump.
pub fn bump_profile(r: f64) -> f64 {
    (-r).exp() / (2.0 * PI).sqrt()
}

const BUMP_RADIUS: f64 = 60.0;
const BUMP_INTERVALS: usize = 60_000;

/// `2π ∫_0^∞ g(r) r dr` by composite Simpson on `[0, 60]`.
fn radial_quadrature(g: impl Fn(f64) -> f64) -> f64 {
    let h = BUMP_RADIUS / BUMP_INTERVALS as f64;
    let f = |i: usize| {
        let r = i as f64 * h;
        g(r) * r
    };
    let mut sum = f(0) + f(BUMP_INTERVALS);
    for i in 1..BUMP_INTERVALS {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i);
    }
    2.0 * PI * sum * h / 3.0
}

/// `√(2∫F_μ(φ)) / ‖∇φ‖`; every `λ` below it gives `E_μ(φ(λ·)) < 0`.
pub fn exp_bump_bound(mu: Mu) -> Result<f64> {
    let potential = radial_quadrature(|r| {
        let p = bump_profile(r);
        kernels::big_f(p * p, mu).expect("bump amplitude is far below the overflow guard")
    });
    let grad_sq = radial_quadrature(|r| bump_profile(r).powi(2));
    Ok((2.0 * potential).sqrt() / grad_sq.sqrt())
}

/// Samples the datum on `grid`. `ground` is required for `ScaledGroundState`.
pub fn build(datum: &Datum, grid: &Grid2D, mu: Mu, ground: Option<&RadialProfile>) -> Result<Field> {
    datum.validate()?;
    let field = match *datum {
        Datum::Gaussian { amplitude, width, center } => Field::from_fn(grid, |x, y| {
            let r2 = (x - center.0).powi(2) + (y - center.1).powi(2);
            Complex64::new(amplitude * (-r2 / (width * width)).exp(), 0.0)
        })?,
        Datum::ScaledGroundState { lambda } => {
            let q = ground.context("scaled_ground_state needs the ground-state profile")?;
            let reach = lambda * grid.half_width() * std::f64::consts::SQRT_2;
            ensure!(
                reach <= q.r_max(),
                "lambda * L * sqrt(2) = {reach} exceeds the profile radius {}; raise [ground_state] r_max",
                q.r_max()
            );
            Field::from_radial(grid, |r| lambda * q.value_at(lambda * r))?
        }
        Datum::ExpBump { scale } => {
            let lambda = match scale {
                BumpScale::Lambda(l) => l,
                BumpScale::FractionOfBound(f) => f * exp_bump_bound(mu)?,
            };
            Field::from_radial(grid, |r| bump_profile(lambda * r))?
        }
        Datum::Custom { ref path } => {
            let (field, stored_mu) =
                load_snapshot(path).with_context(|| format!("loading {}", path.display()))?;
            if stored_mu != mu {
                bail!("snapshot has mu = {stored_mu}, spec has mu = {mu}");
            }
            if field.grid() != grid {
                bail!(
                    "snapshot grid (n = {}, L = {}) differs from the spec grid (n = {}, L = {})",
                    field.grid().n(),
                    field.grid().half_width(),
                    grid.n(),
                    grid.half_width()
                );
            }
            field
        }
    };
    Ok(field)
}

/// The `λ` actually used by an exp_bump datum.
pub fn bump_lambda(scale: BumpScale, mu: Mu) -> Result<f64> {
    Ok(match scale {
        BumpScale::Lambda(l) => l,
        BumpScale::FractionOfBound(f) => f * exp_bump_bound(mu)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlsx_core::{functionals, make_grid};

    #[test]
    fn bump_gradient_is_one_quarter() {
        let g = radial_quadrature(|r| bump_profile(r).powi(2));
        assert!((g - 0.25).abs() < 1e-12, "{g}");
    }

    #[test]
    fn bump_bound_for_mu_one() {
        let b = exp_bump_bound(Mu::One).unwrap();
        // 30-digit adaptive quadrature of the same integral.
        assert!((b / 0.319_052_393_254_386_5 - 1.0).abs() < 1e-9, "{b}");
        assert!(exp_bump_bound(Mu::Zero).unwrap() > b);
    }

    #[test]
    fn half_bound_bump_has_negative_energy() {
        let grid = make_grid(256, 40.0).unwrap();
        let d = Datum::ExpBump { scale: BumpScale::FractionOfBound(0.5) };
        let f = build(&d, &grid, Mu::One, None).unwrap();
        assert!(functionals(&f, Mu::One).unwrap().energy < 0.0);
    }

    #[test]
    fn out_of_range_parameters() {
        let g = Datum::Gaussian { amplitude: -1.0, width: 1.0, center: (0.0, 0.0) };
        assert!(g.validate().is_err());
        let s = Datum::ScaledGroundState { lambda: 0.0 };
        assert!(s.validate().is_err());
        let c = Datum::Custom { path: "/nonexistent/x.nlsx".into() };
        assert!(c.validate().is_err());
    }
}
