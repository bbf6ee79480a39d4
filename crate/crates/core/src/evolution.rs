//! Strang split-step integration of `i u_t + Δu = -f_μ(u)` with monitors.

use num_complex::Complex64;

use crate::error::{NlsError, Result};
use crate::functionals::{functionals_with_spectrum, FunctionalReport};
use crate::grid::{h1_norm_sq, outer_mass_fraction, Field, Grid2D};
use crate::kernels::{self, Mu};
use crate::variational::{classify, classify_report, SetA};
use crate::virial::{cutoff_apply, localized_virial, VirialWeight};

pub const DEFAULT_BLOWUP_GRAD_THRESHOLD: f64 = 0.995;
pub const DEFAULT_TAIL_FRACTION_LIMIT: f64 = 1e-3;
pub const DEFAULT_ENERGY_DRIFT_LIMIT: f64 = 1e-7;
pub const DEFAULT_MAX_HALVINGS: usize = 6;
pub const DEFAULT_RESOLUTION_GRAD_FLOOR: f64 = 0.5;
/// Largest mass fraction beyond `r = R` tolerated by the virial monitor.
pub const VIRIAL_OUTSIDE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_end: f64,
    pub mu: Mu,
    pub monitor_stride: usize,
    pub blowup_grad_threshold: f64,
    pub tail_fraction_limit: f64,
    pub weight_radius: Option<f64>,
    /// Halve `dt` and redo a monitor segment when the energy moves by more
    /// than `energy_drift_limit` (relative) across it.
    pub adaptive_dt: bool,
    pub energy_drift_limit: f64,
    pub max_halvings: usize,
    /// A tail trip with `‖∇u‖²` below this value reports `resolution_lost`.
    pub resolution_grad_floor: f64,
}

impl EvolveConfig {
    pub fn new(dt: f64, t_end: f64, mu: Mu) -> Self {
        Self {
            dt,
            t_end,
            mu,
            monitor_stride: 10,
            blowup_grad_threshold: DEFAULT_BLOWUP_GRAD_THRESHOLD,
            tail_fraction_limit: DEFAULT_TAIL_FRACTION_LIMIT,
            weight_radius: None,
            adaptive_dt: true,
            energy_drift_limit: DEFAULT_ENERGY_DRIFT_LIMIT,
            max_halvings: DEFAULT_MAX_HALVINGS,
            resolution_grad_floor: DEFAULT_RESOLUTION_GRAD_FLOOR,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.monitor_stride = stride;
        self
    }

    pub fn with_weight_radius(mut self, radius: f64) -> Self {
        self.weight_radius = Some(radius);
        self
    }

    pub fn fixed_step(mut self) -> Self {
        self.adaptive_dt = false;
        self
    }

    /// Number of steps of size `dt` covering `[0, t_end]`.
    pub fn step_count(&self) -> Result<usize> {
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(self.dt) {
            return Err(NlsError::Precondition(format!(
                "t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        let bad = |m: String| Err(NlsError::Precondition(m));
        if !(self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        let limit = grid.dx() * grid.dx() / std::f64::consts::PI;
        if !(self.dt < limit) {
            return bad(format!("dt = {} violates dt < dx²/π = {limit}", self.dt));
        }
        if !(self.t_end >= 0.0) {
            return bad(format!("t_end must be nonnegative, got {}", self.t_end));
        }
        if self.monitor_stride == 0 {
            return bad("monitor_stride must be at least 1".into());
        }
        if !(self.blowup_grad_threshold > 0.0 && self.blowup_grad_threshold < 1.0) {
            return bad(format!("blowup_grad_threshold {} not in (0, 1)", self.blowup_grad_threshold));
        }
        if !(self.tail_fraction_limit > 0.0 && self.tail_fraction_limit < 1.0) {
            return bad(format!("tail_fraction_limit {} not in (0, 1)", self.tail_fraction_limit));
        }
        self.step_count().map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunVerdict {
    ReachedTEnd,
    BlowupDetected,
    ResolutionLost,
}

impl std::fmt::Display for RunVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RunVerdict::ReachedTEnd => "reached_t_end",
            RunVerdict::BlowupDetected => "blowup_detected",
            RunVerdict::ResolutionLost => "resolution_lost",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub reports: Vec<FunctionalReport>,
    /// `V_{φ_R}(t)` at every monitored time when a weight radius is set.
    pub virial_values: Vec<f64>,
    /// Mass fraction beyond `r = R` at every monitored time (weight runs only).
    pub virial_outside: Vec<f64>,
    pub verdict: RunVerdict,
    pub drift_mass: f64,
    pub drift_energy: f64,
    pub trip_time: Option<f64>,
    pub final_field: Field,
    pub dt_final: f64,
    pub halvings: usize,
    pub mu: Mu,
}

impl TrajectoryRecord {
    pub fn max_grad_sq(&self) -> f64 {
        self.reports.iter().fold(0.0f64, |m, r| m.max(r.grad_sq))
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# mu={}\n# verdict={}\n# drift_mass={:e}\n# drift_energy={:e}\n# dt_final={:e}\n",
            self.mu, self.verdict, self.drift_mass, self.drift_energy, self.dt_final
        );
        if let Some(t) = self.trip_time {
            out.push_str(&format!("# trip_time={t:e}\n"));
        }
        out.push_str("t,mass,grad_sq,energy,action,P,I,L4,L6,L8,virial,tail_fraction\n");
        for (j, r) in self.reports.iter().enumerate() {
            let v = self.virial_values.get(j).map_or(String::new(), |v| format!("{v:e}"));
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e}\n",
                self.times[j],
                r.mass,
                r.grad_sq,
                r.energy,
                r.action,
                r.p_functional,
                r.i_functional,
                r.lp_norms.l4,
                r.lp_norms.l6,
                r.lp_norms.l8,
                v,
                r.tail_fraction
            ));
        }
        out
    }
}

/// Spectral multipliers and work buffers for a fixed `dt`.
struct Propagator {
    grid: Grid2D,
    mu: Mu,
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

fn kinetic(grid: &Grid2D, t: f64) -> Vec<Complex64> {
    (0..grid.len())
        .map(|idx| Complex64::from_polar(1.0, -grid.k_sq(idx) * t))
        .collect()
}

impl Propagator {
    fn new(grid: &Grid2D, dt: f64, mu: Mu) -> Self {
        Self {
            grid: grid.clone(),
            mu,
            dt,
            half: kinetic(grid, 0.5 * dt),
            full: kinetic(grid, dt),
            scratch: Vec::new(),
        }
    }

    fn nonlinear(&self, u: &mut [Complex64]) -> Result<()> {
        for v in u.iter_mut() {
            let m = kernels::multiplier(v.norm_sqr(), self.mu)?;
            *v *= Complex64::from_polar(1.0, self.dt * m);
        }
        Ok(())
    }

    fn apply(&mut self, u: &mut [Complex64], mult: &[Complex64]) {
        self.grid.forward_transposed(u, &mut self.scratch);
        for (v, m) in u.iter_mut().zip(mult) {
            *v *= m;
        }
        self.grid.inverse_transposed(u, &mut self.scratch);
    }

    /// `steps` Strang steps with the inner half kinetic steps fused.
    fn advance(&mut self, u: &mut [Complex64], steps: usize) -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        let half = std::mem::take(&mut self.half);
        let full = std::mem::take(&mut self.full);
        let result = (|| {
            self.apply(u, &half);
            for s in 0..steps {
                self.nonlinear(u)?;
                if s + 1 < steps {
                    self.apply(u, &full);
                }
            }
            self.apply(u, &half);
            Ok(())
        })();
        self.half = half;
        self.full = full;
        result
    }
}

/// One Strang step: half kinetic, exact nonlinear phase, half kinetic.
pub fn strang_step(field: &Field, dt: f64, mu: Mu) -> Result<Field> {
    let mut p = Propagator::new(field.grid(), dt, mu);
    let mut u = field.values().to_vec();
    p.advance(&mut u, 1)?;
    Ok(Field::from_parts_unchecked(field.grid().clone(), u, field.time() + dt))
}

/// `e^{itΔ}` applied exactly in Fourier space.
pub fn linear_propagate(field: &Field, t: f64) -> Field {
    let grid = field.grid();
    let mut u = field.values().to_vec();
    let mut scratch = Vec::new();
    grid.forward_transposed(&mut u, &mut scratch);
    for (idx, v) in u.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, -grid.k_sq(idx) * t);
    }
    grid.inverse_transposed(&mut u, &mut scratch);
    Field::from_parts_unchecked(grid.clone(), u, field.time() + t)
}

fn report_of(grid: &Grid2D, values: &[Complex64], t: f64, mu: Mu) -> Result<(Field, FunctionalReport)> {
    let field = Field::from_parts_unchecked(grid.clone(), values.to_vec(), t);
    let spec = field.spectrum();
    let report = functionals_with_spectrum(&field, &spec, mu)?;
    Ok((field, report))
}

/// Runs [`evolve_with`] without an observer.
pub fn evolve(field: &Field, config: &EvolveConfig) -> Result<TrajectoryRecord> {
    evolve_with(field, config, |_, _| Ok(()))
}

/// Evolves `field`, calling `observer` at `t = 0` and at every monitored time.
pub fn evolve_with<F>(field: &Field, config: &EvolveConfig, mut observer: F) -> Result<TrajectoryRecord>
where
    F: FnMut(&Field, &FunctionalReport) -> Result<()>,
{
    let grid = field.grid().clone();
    config.validate(&grid)?;
    let mu = config.mu;
    let (start, r0) = report_of(&grid, field.values(), 0.0, mu)?;
    if !(r0.grad_sq < 1.0) {
        return Err(NlsError::Precondition(format!(
            "initial gradient norm squared {} is not below 1",
            r0.grad_sq
        )));
    }
    let weight = match config.weight_radius {
        Some(r) => Some(VirialWeight::new(&grid, r)?),
        None => None,
    };
    let virial_of = |f: &Field| -> Result<(f64, f64)> {
        match &weight {
            Some(w) => Ok((localized_virial(f, w)?, outer_mass_fraction(f, w.radius()))),
            None => Ok((0.0, 0.0)),
        }
    };

    let mut dt = config.dt;
    let mut stride = config.monitor_stride;
    let mut total = config.step_count()?;
    let mut done = 0usize;
    let mut prop = Propagator::new(&grid, dt, mu);
    let mut u = field.values().to_vec();

    let mut record = TrajectoryRecord {
        times: vec![0.0],
        reports: vec![r0],
        virial_values: Vec::new(),
        virial_outside: Vec::new(),
        verdict: RunVerdict::ReachedTEnd,
        drift_mass: 0.0,
        drift_energy: 0.0,
        trip_time: None,
        final_field: start.clone(),
        dt_final: dt,
        halvings: 0,
        mu,
    };
    if weight.is_some() {
        let (v, o) = virial_of(&start)?;
        record.virial_values.push(v);
        record.virial_outside.push(o);
    }
    observer(&start, &r0)?;

    let e0 = r0.energy;
    let e_scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
    let m_scale = if r0.mass != 0.0 { r0.mass } else { 1.0 };
    let mut e_prev = e0;
    let grad_trip = config.blowup_grad_threshold * config.blowup_grad_threshold;

    while done < total {
        let k = stride.min(total - done);
        let backup = u.clone();
        let t_next = (done + k) as f64 * dt;
        if let Err(e) = prop.advance(&mut u, k) {
            return match e {
                NlsError::Overflow { .. } => {
                    record.verdict = RunVerdict::BlowupDetected;
                    record.trip_time = Some(t_next);
                    record.final_field = Field::from_parts_unchecked(grid.clone(), backup, done as f64 * dt);
                    record.dt_final = dt;
                    Ok(record)
                }
                other => Err(other),
            };
        }
        let (f, rep) = match report_of(&grid, &u, t_next, mu) {
            Ok(x) => x,
            Err(NlsError::Overflow { .. }) => {
                record.verdict = RunVerdict::BlowupDetected;
                record.trip_time = Some(t_next);
                break;
            }
            Err(e) => return Err(e),
        };
        if config.adaptive_dt
            && record.halvings < config.max_halvings
            && ((rep.energy - e_prev) / e_scale).abs() > config.energy_drift_limit
        {
            u = backup;
            dt *= 0.5;
            stride *= 2;
            total *= 2;
            done *= 2;
            record.halvings += 1;
            prop = Propagator::new(&grid, dt, mu);
            continue;
        }
        done += k;
        e_prev = rep.energy;
        record.drift_mass = record.drift_mass.max(((rep.mass - r0.mass) / m_scale).abs());
        record.drift_energy = record.drift_energy.max(((rep.energy - e0) / e_scale).abs());
        record.times.push(t_next);
        record.reports.push(rep);
        if weight.is_some() {
            let (v, o) = virial_of(&f)?;
            record.virial_values.push(v);
            record.virial_outside.push(o);
        }
        observer(&f, &rep)?;
        if rep.grad_sq >= grad_trip {
            record.verdict = RunVerdict::BlowupDetected;
            record.trip_time = Some(t_next);
            break;
        }
        if rep.tail_fraction > config.tail_fraction_limit {
            record.verdict = if rep.grad_sq < config.resolution_grad_floor {
                RunVerdict::ResolutionLost
            } else {
                RunVerdict::BlowupDetected
            };
            record.trip_time = Some(t_next);
            break;
        }
    }
    record.final_field = Field::from_parts_unchecked(grid, u, *record.times.last().unwrap());
    record.dt_final = dt;
    Ok(record)
}

/// `(t_j, |ΔΔV/Δt² - 8 I(t_j)|)` using every `every`-th monitored sample.
pub fn virial_monitor(record: &TrajectoryRecord, every: usize) -> Result<Vec<(f64, f64)>> {
    if record.virial_values.is_empty() {
        return Err(NlsError::Precondition("run has no virial series".into()));
    }
    if every == 0 {
        return Err(NlsError::Precondition("subsampling factor must be positive".into()));
    }
    let idx: Vec<usize> = (0..record.times.len()).step_by(every).collect();
    if idx.len() < 5 {
        return Err(NlsError::Precondition(format!(
            "stride too coarse: {} samples, need at least 5",
            idx.len()
        )));
    }
    let h = record.times[idx[1]] - record.times[idx[0]];
    for w in idx.windows(2) {
        let d = record.times[w[1]] - record.times[w[0]];
        if (d - h).abs() > 1e-9 * h {
            return Err(NlsError::Precondition("virial samples are not uniformly spaced".into()));
        }
    }
    if let Some(o) = record.virial_outside.iter().copied().fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v)))) {
        if o > VIRIAL_OUTSIDE_TOLERANCE {
            return Err(NlsError::Precondition(format!(
                "mass fraction {o:e} beyond the virial radius"
            )));
        }
    }
    let v = &record.virial_values;
    Ok(idx
        .windows(3)
        .map(|w| {
            let dd = (v[w[2]] - 2.0 * v[w[1]] + v[w[0]]) / (h * h);
            (record.times[w[1]], (dd - 8.0 * record.reports[w[1]].i_functional).abs())
        })
        .collect())
}

/// Invariance under `x ↦ -x`, `y ↦ -y` and `x ↔ y`, to `tol` relative to the sup norm.
pub fn is_radially_symmetric(field: &Field, tol: f64) -> bool {
    let n = field.grid().n();
    let v = field.values();
    let scale = field.max_modulus().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..n {
            let a = v[i * n + j];
            let others = [v[j * n + i], v[i * n + (n - 1 - j)], v[(n - 1 - i) * n + j]];
            if others.iter().any(|b| (a - b).norm() > tol * scale) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct ScatteringReport {
    pub checkpoints: Vec<f64>,
    /// `‖w(t_{j+1}) - w(t_j)‖_{H¹}` with `w(t) = e^{-itΔ} u(t)`.
    pub increments: Vec<f64>,
    /// `∫_0^{t_j} ‖u‖⁶₆ dt`.
    pub l6_integrals: Vec<f64>,
    /// `∫_0^{t_j} ‖u‖⁸₈ dt`.
    pub l8_integrals: Vec<f64>,
    /// `∫_0^{t_j} ‖u‖⁶₆ dt / t_j^{1/3}`.
    pub l6_ratios: Vec<f64>,
    pub record: TrajectoryRecord,
}

impl ScatteringReport {
    pub fn increments_strictly_decreasing(&self) -> bool {
        self.increments.windows(2).all(|w| w[1] < w[0])
    }
}

/// Pullback increments and space-time norms along a `μ = 1` run.
pub fn scattering_diagnostic(
    field: &Field,
    config: &EvolveConfig,
    checkpoints: &[f64],
    threshold: f64,
) -> Result<ScatteringReport> {
    if config.mu != Mu::One {
        return Err(NlsError::Precondition("scattering diagnostic requires mu = 1".into()));
    }
    if !is_radially_symmetric(field, 1e-12) {
        return Err(NlsError::Precondition("datum is not radially symmetric".into()));
    }
    let v = classify(field, Mu::One, threshold)?;
    if v.set_a != SetA::APlus {
        return Err(NlsError::Precondition(format!("datum is {}, expected A_plus", v.set_a)));
    }
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NlsError::Precondition("checkpoints must be increasing".into()));
    }
    let mut pullbacks: Vec<Option<Field>> = vec![None; checkpoints.len()];
    let record = evolve_with(field, config, |f, _| {
        let t = f.time();
        for (j, c) in checkpoints.iter().enumerate() {
            if (t - c).abs() <= 1e-9 * c.max(1.0) {
                pullbacks[j] = Some(linear_propagate(f, -t));
            }
        }
        Ok(())
    })?;
    if record.verdict != RunVerdict::ReachedTEnd {
        return Err(NlsError::Precondition(format!("run ended with {}", record.verdict)));
    }
    let pullbacks: Vec<Field> = pullbacks
        .into_iter()
        .zip(checkpoints)
        .map(|(p, c)| p.ok_or_else(|| NlsError::Precondition(format!("checkpoint {c} is not a monitored time"))))
        .collect::<Result<_>>()?;
    let increments = pullbacks
        .windows(2)
        .map(|w| {
            let diff: Vec<Complex64> = w[1].values().iter().zip(w[0].values()).map(|(a, b)| a - b).collect();
            h1_norm_sq(&Field::from_parts_unchecked(field.grid().clone(), diff, 0.0)).sqrt()
        })
        .collect();

    let mut l6 = Vec::with_capacity(checkpoints.len());
    let mut l8 = Vec::with_capacity(checkpoints.len());
    let (mut acc6, mut acc8) = (0.0, 0.0);
    let mut next = 0;
    for j in 1..record.times.len() {
        let h = record.times[j] - record.times[j - 1];
        let p6 = |r: &FunctionalReport| r.lp_norms.l6.powi(6);
        let p8 = |r: &FunctionalReport| r.lp_norms.l8.powi(8);
        acc6 += 0.5 * h * (p6(&record.reports[j]) + p6(&record.reports[j - 1]));
        acc8 += 0.5 * h * (p8(&record.reports[j]) + p8(&record.reports[j - 1]));
        while next < checkpoints.len() && (record.times[j] - checkpoints[next]).abs() <= 1e-9 * checkpoints[next].max(1.0) {
            l6.push(acc6);
            l8.push(acc8);
            next += 1;
        }
    }
    let ratios = l6.iter().zip(checkpoints).map(|(v, t)| v / t.cbrt()).collect();
    Ok(ScatteringReport {
        checkpoints: checkpoints.to_vec(),
        increments,
        l6_integrals: l6,
        l8_integrals: l8,
        l6_ratios: ratios,
        record,
    })
}

#[derive(Debug, Clone)]
pub struct ChiProbe {
    pub times: Vec<f64>,
    /// Whether `χ_R u(t)` lies in `A⁺ ∪ {0}`.
    pub inside: Vec<bool>,
    pub record: TrajectoryRecord,
}

impl ChiProbe {
    pub fn all_inside(&self) -> bool {
        self.inside.iter().all(|b| *b)
    }
}

/// Classifies `χ_R u(t)` at every monitored time of a `μ = 1` run.
pub fn chi_invariant_probe(
    field: &Field,
    config: &EvolveConfig,
    weight: &VirialWeight,
    threshold: f64,
) -> Result<ChiProbe> {
    if config.mu != Mu::One {
        return Err(NlsError::Precondition("chi probe requires mu = 1".into()));
    }
    let v = classify(field, Mu::One, threshold)?;
    if v.set_a != SetA::APlus {
        return Err(NlsError::Precondition(format!("datum is {}, expected A_plus", v.set_a)));
    }
    let mut times = Vec::new();
    let mut inside = Vec::new();
    let record = evolve_with(field, config, |f, _| {
        let cut = cutoff_apply(f, weight)?;
        let spec = cut.spectrum();
        let rep = functionals_with_spectrum(&cut, &spec, Mu::One)?;
        times.push(f.time());
        inside.push(classify_report(&rep, cut.is_zero(), threshold).in_closed_a_plus());
        Ok(())
    })?;
    Ok(ChiProbe { times, inside, record })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, mass};

    #[test]
    fn zero_field_stays_zero() {
        let g = make_grid(32, 4.0).unwrap();
        let z = strang_step(&Field::zeros(&g), 1e-3, Mu::Zero).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn plane_wave_phase() {
        let g = make_grid(32, std::f64::consts::PI).unwrap();
        let (kx, ky, a) = (2.0, -1.0, 0.1);
        let f = Field::from_fn(&g, |x, y| Complex64::from_polar(a, kx * x + ky * y)).unwrap();
        let dt = 1e-3;
        let out = strang_step(&f, dt, Mu::Zero).unwrap();
        let m = kernels::multiplier(a * a, Mu::Zero).unwrap();
        let phase = (-(kx * kx + ky * ky) + m) * dt;
        for (o, i) in out.values().iter().zip(f.values()) {
            assert!((o - i * Complex64::from_polar(1.0, phase)).norm() < 1e-14);
        }
    }

    #[test]
    fn one_step_conserves_mass() {
        let g = make_grid(64, 8.0).unwrap();
        let f = Field::from_radial(&g, |r| 0.4 * (-r * r).exp()).unwrap();
        let out = strang_step(&f, 1e-3, Mu::One).unwrap();
        assert!((mass(&out) / mass(&f) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn linear_propagation_group() {
        let g = make_grid(64, 8.0).unwrap();
        let f = Field::from_radial(&g, |r| (-r * r).exp()).unwrap();
        assert!(linear_propagate(&f, 0.0).sup_distance(&f).unwrap() < 1e-15);
        let back = linear_propagate(&linear_propagate(&f, 0.7), -0.7);
        assert!(back.sup_distance(&f).unwrap() < 1e-13);
    }

    #[test]
    fn config_validation() {
        let g = make_grid(256, 12.0).unwrap();
        assert!(EvolveConfig::new(1e-3, 1.0, Mu::One).validate(&g).is_ok());
        assert!(EvolveConfig::new(4e-3, 1.0, Mu::One).validate(&g).is_err());
        assert!(EvolveConfig::new(1e-3, 1.0005, Mu::One).validate(&g).is_err());
        let mut c = EvolveConfig::new(1e-3, 1.0, Mu::One);
        c.blowup_grad_threshold = 1.0;
        assert!(c.validate(&g).is_err());
    }

    #[test]
    fn radial_symmetry_check() {
        let g = make_grid(32, 4.0).unwrap();
        let f = Field::from_radial(&g, |r| (-r * r).exp()).unwrap();
        assert!(is_radially_symmetric(&f, 1e-14));
        let s = Field::from_fn(&g, |x, _| Complex64::new((-(x - 0.5).powi(2)).exp(), 0.0)).unwrap();
        assert!(!is_radially_symmetric(&s, 1e-6));
    }
}
