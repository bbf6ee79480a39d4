//! Radial ground state of `-Δφ + φ = f_μ(φ)` by shooting.
//!
//! The radial ODE `φ'' + φ'/r = φ - f_μ(φ)` is integrated from a regular
//! series start with an adaptive Dormand–Prince pair. The converged shoot
//! value separates undershooting trajectories (which turn back up) from
//! overshooting ones (which cross zero). In double precision both ends of the
//! final bracket leave the decaying manifold near `r ≈ 10–17`; past the last
//! radius where they still agree, the accepted profile continues with the
//! linear tail `A K₀(r)`, on which the nonlinearity is below rounding.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::grid::{Field, Grid2D};
use crate::kernels::{self, Mu};
use crate::ode::{Dopri5, State};

/// Radius at which the series start hands over to the integrator.
pub const START_RADIUS: f64 = 1e-6;
pub const DEFAULT_R_MAX: f64 = 30.0;
/// Geometric nodes between `START_RADIUS` and `r_max` (odd, for Simpson).
pub const DEFAULT_NODES: usize = 16385;
pub const LOCAL_TOLERANCE: f64 = 1e-12;
/// Acceptance tolerance for the certificate residuals.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
/// Tolerance on `S(Q) = ½‖∇Q‖²`.
pub const THRESHOLD_IDENTITY_TOLERANCE: f64 = 1e-8;
pub const BRACKET_LO: f64 = 1e-3;
pub const BRACKET_HI: f64 = 10.0;
pub const BRACKET_SCAN_POINTS: usize = 60;
const ABSOLUTE_TOLERANCE: f64 = 1e-18;
const DECAY_THRESHOLD: f64 = 1e-10;
const SPLICE_AGREEMENT: f64 = 1e-7;
const SPLICE_MIN_RADIUS: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Decays,
    CrossesZero,
    Diverges,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Decays => "decays",
            Verdict::CrossesZero => "crosses_zero",
            Verdict::Diverges => "diverges",
        })
    }
}

impl FromStr for Verdict {
    type Err = NlsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decays" => Ok(Verdict::Decays),
            "crosses_zero" => Ok(Verdict::CrossesZero),
            "diverges" => Ok(Verdict::Diverges),
            other => Err(NlsError::Precondition(format!("unknown verdict {other:?}"))),
        }
    }
}

/// Radial samples `φ(r)`, `φ'(r)` on `{0} ∪` a geometric mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    nodes: Vec<f64>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    shoot_value: f64,
    mu: Mu,
    verdict: Verdict,
    /// Uniform spacing in `ln r` of `nodes[1..]`.
    log_step: f64,
}

impl RadialProfile {
    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }
    pub fn dphi(&self) -> &[f64] {
        &self.dphi
    }
    pub fn shoot_value(&self) -> f64 {
        self.shoot_value
    }
    pub fn mu(&self) -> Mu {
        self.mu
    }
    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    /// `a φ`, keeping mesh and verdict. Used for perturbation fixtures.
    pub fn scaled(&self, a: f64) -> RadialProfile {
        RadialProfile {
            phi: self.phi.iter().map(|p| a * p).collect(),
            dphi: self.dphi.iter().map(|p| a * p).collect(),
            shoot_value: a * self.shoot_value,
            ..self.clone()
        }
    }

    /// Index of the first node where `φ <= 0`, if any.
    pub fn first_sign_change(&self) -> Option<usize> {
        self.phi.iter().position(|&p| p <= 0.0)
    }

    /// `φ` strictly decreasing on every node before the first sign change.
    pub fn is_monotone_until_sign_change(&self) -> bool {
        let end = self.first_sign_change().unwrap_or(self.phi.len());
        self.phi[..end].windows(2).all(|w| w[1] < w[0])
    }

    /// Cubic Hermite interpolation of `φ`; the series start below the first node.
    pub fn value_at(&self, r: f64) -> f64 {
        let r0 = self.nodes[1];
        if r <= r0 {
            let c = if r0 > 0.0 { 0.5 * self.dphi[1] / r0 } else { 0.0 };
            return self.phi[0] + c * r * r;
        }
        let last = self.nodes.len() - 1;
        if r >= self.nodes[last] {
            return self.phi[last];
        }
        let mut i = 1 + ((r / r0).ln() / self.log_step).floor() as usize;
        i = i.clamp(1, last - 1);
        while i > 1 && self.nodes[i] > r {
            i -= 1;
        }
        while i + 1 < last && self.nodes[i + 1] <= r {
            i += 1;
        }
        let (a, b) = (self.nodes[i], self.nodes[i + 1]);
        let h = b - a;
        let t = (r - a) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.phi[i] + h10 * h * self.dphi[i] + h01 * self.phi[i + 1] + h11 * h * self.dphi[i + 1]
    }

    /// `2π ∫ g(φ(r), φ'(r)) r dr`: Simpson in `ln r` plus the disk `r < nodes[1]`.
    pub fn radial_integral(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.nodes.len() - 1;
        let w = |i: usize| {
            let r = self.nodes[i];
            g(self.phi[i], self.dphi[i]) * r * r
        };
        let intervals = n - 1;
        let even = intervals - intervals % 2;
        let mut sum = 0.0;
        for i in (1..1 + even).step_by(2) {
            sum += w(i) + 4.0 * w(i + 1) + w(i + 2);
        }
        let mut total = sum * self.log_step / 3.0;
        if even < intervals {
            total += 0.5 * self.log_step * (w(n - 1) + w(n));
        }
        let r0 = self.nodes[1];
        total += g(self.phi[0], 0.0) * 0.5 * r0 * r0;
        2.0 * std::f64::consts::PI * total
    }

    /// CSV export with a `#` metadata header.
    pub fn to_csv(&self, s_threshold: Option<f64>) -> String {
        let mut out = String::with_capacity(self.nodes.len() * 64);
        out.push_str(&format!("# mu={}\n", self.mu));
        out.push_str(&format!("# shoot_value={:e}\n", self.shoot_value));
        if let Some(s) = s_threshold {
            out.push_str(&format!("# s_threshold={s:e}\n"));
        }
        out.push_str(&format!("# verdict={}\n", self.verdict));
        out.push_str("r,phi,dphi\n");
        for i in 0..self.nodes.len() {
            out.push_str(&format!("{:e},{:e},{:e}\n", self.nodes[i], self.phi[i], self.dphi[i]));
        }
        out
    }

    /// Parses [`RadialProfile::to_csv`] output.
    pub fn from_csv(text: &str) -> Result<RadialProfile> {
        let bad = |m: &str| NlsError::Precondition(format!("profile csv: {m}"));
        let mut mu = None;
        let mut shoot = None;
        let mut verdict = Verdict::Decays;
        let (mut nodes, mut phi, mut dphi) = (Vec::new(), Vec::new(), Vec::new());
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim().split_once('=') {
                    match k.trim() {
                        "mu" => {
                            let m: u8 = v.trim().parse().map_err(|_| bad("mu"))?;
                            mu = Some(Mu::try_from(m)?);
                        }
                        "shoot_value" => shoot = Some(v.trim().parse::<f64>().map_err(|_| bad("shoot_value"))?),
                        "verdict" => verdict = v.trim().parse()?,
                        _ => {}
                    }
                }
                continue;
            }
            if line.starts_with('r') {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad("row"))?;
            if cols.len() != 3 {
                return Err(bad("row width"));
            }
            nodes.push(cols[0]);
            phi.push(cols[1]);
            dphi.push(cols[2]);
        }
        let mu = mu.ok_or_else(|| bad("missing mu"))?;
        let shoot = shoot.ok_or_else(|| bad("missing shoot_value"))?;
        if nodes.len() < 4 || nodes[0] != 0.0 || nodes[1] <= 0.0 {
            return Err(bad("mesh"));
        }
        let m = nodes.len() - 2;
        let log_step = (nodes[m + 1] / nodes[1]).ln() / m as f64;
        for (i, r) in nodes.iter().enumerate().skip(1) {
            let expect = nodes[1] * (log_step * (i - 1) as f64).exp();
            if (r - expect).abs() > 1e-9 * expect {
                return Err(bad("mesh is not geometric"));
            }
        }
        Ok(RadialProfile {
            nodes,
            phi,
            dphi,
            shoot_value: shoot,
            mu,
            verdict,
            log_step,
        })
    }
}

/// `{0}` followed by `count` geometric nodes from [`START_RADIUS`] to `r_max`.
pub fn radial_mesh(r_max: f64, count: usize) -> (Vec<f64>, f64) {
    let log_step = (r_max / START_RADIUS).ln() / (count - 1) as f64;
    let mut nodes = Vec::with_capacity(count + 1);
    nodes.push(0.0);
    for i in 0..count {
        nodes.push(if i + 1 == count {
            r_max
        } else {
            START_RADIUS * (log_step * i as f64).exp()
        });
    }
    (nodes, log_step)
}

fn nonlinearity(phi: f64, mu: Mu) -> Result<f64> {
    Ok(kernels::multiplier(phi * phi, mu)? * phi)
}

/// Shooting parameters. The defaults are the production settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    pub r_max: f64,
    pub nodes: usize,
    pub tolerance: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            r_max: DEFAULT_R_MAX,
            nodes: DEFAULT_NODES,
            tolerance: LOCAL_TOLERANCE,
        }
    }
}

/// Integrates the radial ODE from `φ(0) = phi0` with the default mesh.
pub fn shoot(mu: Mu, phi0: f64, r_max: f64) -> Result<(RadialProfile, Verdict)> {
    shoot_with(
        mu,
        phi0,
        &ShootingConfig {
            r_max,
            ..ShootingConfig::default()
        },
    )
}

pub fn shoot_with(mu: Mu, phi0: f64, cfg: &ShootingConfig) -> Result<(RadialProfile, Verdict)> {
    if !(phi0 > 0.0) || !phi0.is_finite() {
        return Err(NlsError::Precondition(format!("shoot value must be positive, got {phi0}")));
    }
    if !(cfg.r_max >= 20.0) {
        return Err(NlsError::Precondition(format!("r_max must be at least 20, got {}", cfg.r_max)));
    }
    if cfg.nodes < 3 || cfg.nodes.is_multiple_of(2) {
        return Err(NlsError::Precondition("node count must be odd and at least 3".into()));
    }
    let (mesh, log_step) = radial_mesh(cfg.r_max, cfg.nodes);
    let c = 0.25 * (phi0 - nonlinearity(phi0, mu)?);
    let r0 = mesh[1];

    let rhs = |r: f64, y: &State| -> Result<State> {
        Ok([y[1], y[0] - nonlinearity(y[0], mu)? - y[1] / r])
    };
    let mut stepper = Dopri5::new(cfg.tolerance, ABSOLUTE_TOLERANCE, r0 * 1e-2);

    let mut phi = vec![phi0, phi0 + c * r0 * r0];
    let mut dphi = vec![0.0, 2.0 * c * r0];
    let mut nodes = vec![0.0, r0];
    let mut y = [phi[1], dphi[1]];
    let mut rising = 0usize;
    let mut verdict = None;

    for i in 1..mesh.len() - 1 {
        y = stepper.advance(&rhs, mesh[i], mesh[i + 1], y)?;
        nodes.push(mesh[i + 1]);
        phi.push(y[0]);
        dphi.push(y[1]);
        if y[0] <= 0.0 {
            verdict = Some(Verdict::CrossesZero);
            break;
        }
        if y[0] > 2.0 * phi0 {
            verdict = Some(Verdict::Diverges);
            break;
        }
        rising = if y[1] > 0.0 { rising + 1 } else { 0 };
        if rising >= 2 {
            verdict = Some(Verdict::Diverges);
            break;
        }
        if y[0].abs() < DECAY_THRESHOLD && y[1].abs() < DECAY_THRESHOLD {
            verdict = Some(Verdict::Decays);
            break;
        }
    }
    let verdict = match verdict {
        Some(v) => v,
        None => {
            return Err(NlsError::Integration {
                r: cfg.r_max,
                reason: format!(
                    "no verdict at r_max: phi = {:e}, dphi = {:e}",
                    y[0], y[1]
                ),
            })
        }
    };
    let profile = RadialProfile {
        nodes,
        phi,
        dphi,
        shoot_value: phi0,
        mu,
        verdict,
        log_step,
    };
    Ok((profile, verdict))
}

/// One evaluated point of the bracket scan or bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub phi0: f64,
    pub verdict: Verdict,
}

/// Result of [`solve_ground_state`].
#[derive(Debug, Clone)]
pub struct GroundStateSolution {
    pub profile: RadialProfile,
    pub certificate: GroundStateCertificate,
    /// Final bracket `(lo, hi)`.
    pub bracket: (f64, f64),
    /// Radius where the integrated profile hands over to the `K₀` tail.
    pub splice_radius: f64,
    pub trace: Vec<TraceEntry>,
}

/// Ground state for `mu` with the default settings, certified.
pub fn find_ground_state(mu: Mu) -> Result<RadialProfile> {
    Ok(solve_ground_state(mu, &ShootingConfig::default())?.profile)
}

pub fn solve_ground_state(mu: Mu, cfg: &ShootingConfig) -> Result<GroundStateSolution> {
    let verdict_at = |phi0: f64| -> Result<Verdict> {
        match shoot_with(mu, phi0, cfg) {
            Ok((_, v)) => Ok(v),
            // A trajectory that survives to r_max without any event counts as decaying.
            Err(NlsError::Integration { reason, .. }) if reason.starts_with("no verdict") => {
                Ok(Verdict::Decays)
            }
            Err(e) => Err(e),
        }
    };
    let mut trace = Vec::new();

    let ratio = (BRACKET_HI / BRACKET_LO).powf(1.0 / (BRACKET_SCAN_POINTS - 1) as f64);
    let mut prev: Option<TraceEntry> = None;
    let mut bracket = None;
    for i in 0..BRACKET_SCAN_POINTS {
        let phi0 = BRACKET_LO * ratio.powi(i as i32);
        let verdict = verdict_at(phi0)?;
        let entry = TraceEntry { phi0, verdict };
        trace.push(entry);
        if let Some(p) = prev {
            if p.verdict != verdict {
                bracket = Some((p, entry));
                break;
            }
        }
        prev = Some(entry);
    }
    let (mut lo, mut hi) = bracket.ok_or(NlsError::BracketNotFound {
        lo: BRACKET_LO,
        hi: BRACKET_HI,
    })?;

    while lo.verdict != Verdict::Decays && hi.verdict != Verdict::Decays {
        let mid = 0.5 * (lo.phi0 + hi.phi0);
        if mid <= lo.phi0 || mid >= hi.phi0 {
            break;
        }
        let verdict = verdict_at(mid)?;
        let entry = TraceEntry { phi0: mid, verdict };
        trace.push(entry);
        if verdict == lo.verdict {
            lo = entry;
        } else if verdict == hi.verdict {
            hi = entry;
        } else {
            lo = entry;
            hi = entry;
        }
    }
    if (hi.phi0 - lo.phi0) >= 1e-13 * hi.phi0 {
        return Err(NlsError::Integration {
            r: 0.0,
            reason: "bisection stalled above the bracket tolerance".into(),
        });
    }

    let (profile, splice_radius) = if lo.verdict == Verdict::Decays || hi.verdict == Verdict::Decays {
        let phi0 = if lo.verdict == Verdict::Decays { lo.phi0 } else { hi.phi0 };
        let (p, _) = shoot_with(mu, phi0, cfg)?;
        let r = p.r_max();
        (extend_with_tail(p, r, cfg)?, r)
    } else {
        splice(mu, lo.phi0, hi.phi0, cfg)?
    };
    let certificate = certify(&profile)?;
    Ok(GroundStateSolution {
        profile,
        certificate,
        bracket: (lo.phi0, hi.phi0),
        splice_radius,
        trace,
    })
}

/// Joins the common part of the two bracket trajectories to the linear tail.
fn splice(mu: Mu, a: f64, b: f64, cfg: &ShootingConfig) -> Result<(RadialProfile, f64)> {
    let (pa, _) = shoot_with(mu, a, cfg)?;
    let (pb, _) = shoot_with(mu, b, cfg)?;
    let common = pa.nodes.len().min(pb.nodes.len());
    let mut last_good = 0;
    for i in 1..common {
        let (x, y) = (pa.phi[i], pb.phi[i]);
        if x <= 0.0 || y <= 0.0 || pa.dphi[i] >= 0.0 || pb.dphi[i] >= 0.0 {
            break;
        }
        if (x - y).abs() > SPLICE_AGREEMENT * x.abs().max(y.abs()) {
            break;
        }
        last_good = i;
    }
    let r_match = pa.nodes[last_good];
    if r_match < SPLICE_MIN_RADIUS {
        return Err(NlsError::Integration {
            r: r_match,
            reason: "bracket trajectories separate before the tail regime".into(),
        });
    }
    let mut nodes = pa.nodes[..=last_good].to_vec();
    let mut phi = Vec::with_capacity(last_good + 1);
    let mut dphi = Vec::with_capacity(last_good + 1);
    for i in 0..=last_good {
        phi.push(0.5 * (pa.phi[i] + pb.phi[i]));
        dphi.push(0.5 * (pa.dphi[i] + pb.dphi[i]));
    }
    nodes.truncate(last_good + 1);
    let joined = RadialProfile {
        nodes,
        phi,
        dphi,
        shoot_value: 0.5 * (a + b),
        mu,
        verdict: Verdict::Decays,
        log_step: pa.log_step,
    };
    Ok((extend_with_tail(joined, r_match, cfg)?, r_match))
}

/// Continues `profile` past its last node with `φ_m K₀(r)/K₀(r_m)` up to `cfg.r_max`.
fn extend_with_tail(mut profile: RadialProfile, r_match: f64, cfg: &ShootingConfig) -> Result<RadialProfile> {
    let (mesh, _) = radial_mesh(cfg.r_max, cfg.nodes);
    let m = profile.nodes.len() - 1;
    let phi_m = profile.phi[m];
    let k0m = scaled_bessel_k(0.0, r_match);
    for &r in &mesh[m + 1..] {
        let decay = (r_match - r).exp() / k0m;
        profile.nodes.push(r);
        profile.phi.push(phi_m * scaled_bessel_k(0.0, r) * decay);
        profile.dphi.push(-phi_m * scaled_bessel_k(1.0, r) * decay);
    }
    let last = profile.nodes.len() - 1;
    profile.verdict = if profile.phi[last].abs() < DECAY_THRESHOLD && profile.dphi[last].abs() < DECAY_THRESHOLD {
        Verdict::Decays
    } else {
        return Err(NlsError::Integration {
            r: profile.nodes[last],
            reason: "tail does not reach the decay threshold".into(),
        });
    };
    Ok(profile)
}

/// `e^z K_ν(z)` from `∫_0^∞ e^{-z(cosh t - 1)} cosh(νt) dt` by the trapezoid rule.
pub fn scaled_bessel_k(nu: f64, z: f64) -> f64 {
    let h = 0.02;
    let mut sum = 0.5;
    let mut k = 1;
    loop {
        let t = h * k as f64;
        let term = (-z * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        k += 1;
    }
    sum * h
}

/// Quadratures and residuals of a ground-state candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundStateCertificate {
    pub mu: Mu,
    pub shoot_value: f64,
    /// `S_μ(Q_μ)`.
    pub s_threshold: f64,
    pub grad_q_sq: f64,
    pub mass_q: f64,
    /// `∫ F_μ(Q)`.
    pub potential_integral: f64,
    /// `∫ Q f_μ(Q)`.
    pub nonlinear_integral: f64,
    pub energy: f64,
    pub pohozaev1_residual: f64,
    pub pohozaev2_residual: f64,
    pub ode_residual_sup: f64,
}

/// Residuals and quadratures without any acceptance check.
pub fn certificate_values(profile: &RadialProfile) -> Result<GroundStateCertificate> {
    let mu = profile.mu;
    let peak = profile.phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    kernels::big_f(peak * peak, mu)?;
    let grad = profile.radial_integral(|_, d| d * d);
    let mass = profile.radial_integral(|p, _| p * p);
    let pot = profile.radial_integral(|p, _| kernels::big_f(p * p, mu).unwrap_or(f64::NAN));
    let nonlinear = profile.radial_integral(|p, _| p * nonlinearity(p, mu).unwrap_or(f64::NAN));
    let energy = 0.5 * grad - pot;
    let s = energy + 0.5 * mass;
    let ode = ode_residual_sup(profile)?;
    Ok(GroundStateCertificate {
        mu,
        shoot_value: profile.shoot_value,
        s_threshold: s,
        grad_q_sq: grad,
        mass_q: mass,
        potential_integral: pot,
        nonlinear_integral: nonlinear,
        energy,
        pohozaev1_residual: (grad + mass - nonlinear).abs() / s.abs(),
        pohozaev2_residual: (0.5 * mass - pot).abs() / s.abs(),
        ode_residual_sup: ode,
    })
}

/// Computes the certificate and checks every acceptance condition.
pub fn certify(profile: &RadialProfile) -> Result<GroundStateCertificate> {
    if profile.verdict != Verdict::Decays {
        return Err(NlsError::Precondition(format!(
            "profile verdict is {}, expected decays",
            profile.verdict
        )));
    }
    if !(profile.shoot_value > 0.0) || profile.phi.iter().all(|&p| p == 0.0) {
        return Err(NlsError::Precondition("profile is not a positive solution".into()));
    }
    let c = certificate_values(profile)?;
    let checks: [(&'static str, f64, f64); 3] = [
        ("pohozaev1_residual", c.pohozaev1_residual, RESIDUAL_TOLERANCE),
        ("pohozaev2_residual", c.pohozaev2_residual, RESIDUAL_TOLERANCE),
        ("ode_residual_sup", c.ode_residual_sup, RESIDUAL_TOLERANCE),
    ];
    for (name, value, tolerance) in checks {
        if !(value < tolerance) {
            return Err(NlsError::CertificateFailed { name, value, tolerance });
        }
    }
    if !(c.grad_q_sq > 0.0 && c.grad_q_sq < 1.0) {
        return Err(NlsError::CertificateFailed {
            name: "grad_q_sq",
            value: c.grad_q_sq,
            tolerance: 1.0,
        });
    }
    let identity = (c.s_threshold - 0.5 * c.grad_q_sq).abs() / c.s_threshold;
    if !(identity <= THRESHOLD_IDENTITY_TOLERANCE) {
        return Err(NlsError::CertificateFailed {
            name: "threshold_identity",
            value: identity,
            tolerance: THRESHOLD_IDENTITY_TOLERANCE,
        });
    }
    if !(c.energy > 0.0) {
        return Err(NlsError::CertificateFailed {
            name: "energy_positivity",
            value: c.energy,
            tolerance: 0.0,
        });
    }
    Ok(c)
}

/// `sup |φ'' + φ'/r - φ + f_μ(φ)|` with `φ''` from a fourth-order difference of `φ'` in `ln r`.
pub fn ode_residual_sup(profile: &RadialProfile) -> Result<f64> {
    let n = profile.nodes.len();
    let h = profile.log_step;
    let d = &profile.dphi;
    let mut sup = 0.0f64;
    for i in 3..n.saturating_sub(2) {
        let r = profile.nodes[i];
        let dd = (-d[i + 2] + 8.0 * d[i + 1] - 8.0 * d[i - 1] + d[i - 2]) / (12.0 * h * r);
        let p = profile.phi[i];
        let res = dd + d[i] / r - p + nonlinearity(p, profile.mu)?;
        sup = sup.max(res.abs());
    }
    Ok(sup)
}

/// Samples `φ(|x|)` on `grid` by cubic Hermite interpolation.
pub fn embed(profile: &RadialProfile, grid: &Grid2D) -> Result<Field> {
    let need = grid.half_width() * std::f64::consts::SQRT_2;
    if profile.r_max() < need * (1.0 - 1e-12) {
        return Err(NlsError::Precondition(format!(
            "grid larger than profile support: r_max {} < {}",
            profile.r_max(),
            need
        )));
    }
    let values: Vec<Complex64> = (0..grid.len())
        .map(|idx| {
            let (x, y) = grid.point(idx);
            Complex64::new(profile.value_at(x.hypot(y)), 0.0)
        })
        .collect();
    Field::new(grid.clone(), values, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_k_reference_values() {
        // K0(1) = 0.42102443824070834, K1(1) = 0.6019072301972346.
        let e = 1f64.exp();
        assert!((scaled_bessel_k(0.0, 1.0) / e - 0.42102443824070834).abs() < 1e-15);
        assert!((scaled_bessel_k(1.0, 1.0) / e - 0.6019072301972346).abs() < 1e-15);
        // K0(10) = 1.778006231616917e-5.
        let k10 = scaled_bessel_k(0.0, 10.0) * (-10f64).exp();
        assert!((k10 / 1.778006231616917e-5 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn mesh_is_geometric_and_odd() {
        let (m, h) = radial_mesh(30.0, 9);
        assert_eq!(m.len(), 10);
        assert_eq!(m[0], 0.0);
        assert_eq!(m[1], START_RADIUS);
        assert_eq!(m[9], 30.0);
        assert!((m[5] / m[4] - h.exp()).abs() < 1e-12);
    }

    #[test]
    fn shoot_rejects_bad_input() {
        assert!(matches!(shoot(Mu::One, 0.0, 30.0), Err(NlsError::Precondition(_))));
        assert!(matches!(shoot(Mu::One, 1.0, 10.0), Err(NlsError::Precondition(_))));
    }

    #[test]
    fn large_shoot_value_overflows() {
        assert!(matches!(shoot(Mu::Zero, 10.0, 30.0), Err(NlsError::Overflow { .. })));
    }

    #[test]
    fn verdict_round_trip() {
        for v in [Verdict::Decays, Verdict::CrossesZero, Verdict::Diverges] {
            assert_eq!(v.to_string().parse::<Verdict>().unwrap(), v);
        }
    }
}
