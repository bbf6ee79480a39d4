//! Executes an [`ExperimentSpec`] and collects pass/fail claims.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use nlsx_core::snapshot::encode;
use nlsx_core::variational::classify_report;
use nlsx_core::{
    chi_invariant_probe, classify, evolve, evolve_with, functionals, kappa_probe, make_grid, make_virial_weight,
    scaling_curve, scattering_diagnostic, small_data_check, virial_monitor, Field, GroundStateCertificate,
    RunVerdict, SetVerdict, TrajectoryRecord,
};

use crate::cache::{self, CachedGroundState};
use crate::datum::{self, Datum};
use crate::output::{with_metadata, ArtifactSet};
use crate::spec::{Analysis, EnergySign, EvolveSpec, ExperimentSpec};

/// One checked statement with the tolerance it was judged against.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub name: String,
    pub observed: String,
    pub requirement: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub name: String,
    pub spec_echo: String,
    pub certificate: GroundStateCertificate,
    pub certificate_path: PathBuf,
    pub verdicts: Vec<(String, String)>,
    pub claims: Vec<Claim>,
    pub artifacts: Vec<PathBuf>,
    pub wall_time: Duration,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn verdict(&self, key: &str) -> Option<&str> {
        self.verdicts.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment: {}", self.name);
        let _ = writeln!(s, "result: {}", if self.passed() { "pass" } else { "fail" });
        let _ = writeln!(s, "wall_time_s: {:.3}", self.wall_time.as_secs_f64());
        let c = &self.certificate;
        let _ = writeln!(s, "\n[ground state]");
        let _ = writeln!(s, "mu = {}", c.mu);
        let _ = writeln!(s, "shoot_value = {:e}", c.shoot_value);
        let _ = writeln!(s, "s_threshold = {:e}", c.s_threshold);
        let _ = writeln!(s, "grad_q_sq = {:e}", c.grad_q_sq);
        let _ = writeln!(s, "cache = {}", self.certificate_path.display());
        let _ = writeln!(s, "\n[verdicts]");
        for (k, v) in &self.verdicts {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "\n[claims]");
        for cl in &self.claims {
            let tag = if cl.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{tag} {}: {} (required {})", cl.name, cl.observed, cl.requirement);
        }
        let _ = writeln!(s, "\n[artifacts]");
        for a in &self.artifacts {
            let _ = writeln!(s, "{}", a.display());
        }
        let _ = writeln!(s, "\n[spec]");
        s.push_str(&self.spec_echo);
        if !self.spec_echo.ends_with('\n') {
            s.push('\n');
        }
        s
    }
}

/// Which parts of a spec to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    All,
    Classify,
    Curve,
    Evolve,
}

impl Selection {
    fn wants(self, a: Analysis) -> bool {
        match self {
            Selection::All => true,
            Selection::Classify => a == Analysis::Classify,
            Selection::Curve => a == Analysis::Curve,
            Selection::Evolve => a.needs_evolution(),
        }
    }

    fn wants_evolution(self) -> bool {
        matches!(self, Selection::All | Selection::Evolve)
    }
}

struct Ctx {
    claims: Vec<Claim>,
    verdicts: Vec<(String, String)>,
    artifacts: ArtifactSet,
    meta: Vec<(&'static str, String)>,
}

impl Ctx {
    fn claim(&mut self, name: impl Into<String>, observed: impl Into<String>, requirement: impl Into<String>, pass: bool) {
        self.claims.push(Claim { name: name.into(), observed: observed.into(), requirement: requirement.into(), pass });
    }

    fn verdict(&mut self, key: &str, value: impl ToString) {
        self.verdicts.push((key.to_string(), value.to_string()));
    }

    fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        let text = with_metadata(&self.meta, body);
        self.artifacts.write(name, text.as_bytes())?;
        Ok(())
    }
}

fn stage<T>(name: &str, r: Result<T>) -> Result<T> {
    r.with_context(|| format!("stage {name}"))
}

pub fn run(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentReport> {
    run_selected(spec, out_dir, Selection::All)
}

/// Runs the selected stages, writing artifacts into `out_dir`. On error every
/// artifact written by this call is removed.
pub fn run_selected(spec: &ExperimentSpec, out_dir: &Path, selection: Selection) -> Result<ExperimentReport> {
    let started = Instant::now();
    let mut ctx = Ctx {
        claims: Vec::new(),
        verdicts: Vec::new(),
        artifacts: ArtifactSet::new(out_dir),
        meta: vec![("experiment", spec.name.clone()), ("mu", spec.mu.to_string())],
    };
    match execute(spec, selection, &mut ctx) {
        Ok(gs) => {
            let mut report = ExperimentReport {
                name: spec.name.clone(),
                spec_echo: spec.source.clone(),
                certificate: gs.certificate,
                certificate_path: gs.path,
                verdicts: ctx.verdicts,
                claims: ctx.claims,
                artifacts: Vec::new(),
                wall_time: Duration::ZERO,
            };
            let report_path = ctx.artifacts.path("report.txt");
            ctx.artifacts.record(report_path);
            report.artifacts = ctx.artifacts.paths().to_vec();
            report.wall_time = started.elapsed();
            if let Err(e) = ctx.artifacts.write("report.txt", report.to_text().as_bytes()) {
                ctx.artifacts.discard();
                return Err(e.context("stage report"));
            }
            Ok(report)
        }
        Err(e) => {
            ctx.artifacts.discard();
            Err(e)
        }
    }
}

fn execute(spec: &ExperimentSpec, selection: Selection, ctx: &mut Ctx) -> Result<CachedGroundState> {
    let mu = spec.mu;
    let gs = stage("ground_state", cache::ground_state(mu, &spec.ground_state))?;
    let threshold = gs.certificate.s_threshold;
    ctx.meta.push(("s_threshold", format!("{threshold:e}")));
    ctx.verdict("ground_state_cache", if gs.from_cache { "hit" } else { "miss" });

    let grid = stage("datum", spec.grid())?;
    let field = stage("datum", datum::build(&spec.datum, &grid, mu, Some(&gs.profile)))?;
    if let Datum::ExpBump { scale } = spec.datum {
        let lambda = stage("datum", datum::bump_lambda(scale, mu))?;
        let bound = stage("datum", datum::exp_bump_bound(mu))?;
        ctx.verdict("exp_bump_lambda", format!("{lambda:e}"));
        ctx.verdict("exp_bump_bound", format!("{bound:e}"));
    }
    ctx.artifacts.write("datum.nlsx", &encode(&field, mu))?;
    let initial = stage("datum", functionals(&field, mu).map_err(Into::into))?;
    ctx.verdict("initial_energy", format!("{:e}", initial.energy));
    ctx.verdict("initial_grad_sq", format!("{:e}", initial.grad_sq));

    let wants = |a: Analysis| spec.analyses.contains(&a) && selection.wants(a);

    if wants(Analysis::Classify) {
        stage("classify", run_classify(spec, &field, threshold, ctx))?;
    }
    if wants(Analysis::Curve) {
        stage("curve", run_curve(spec, &field, ctx))?;
    }
    if wants(Analysis::MtProbe) {
        stage("mt_probe", run_mt_probe(spec, &field, ctx))?;
    }

    if let (Some(ev), true) = (&spec.evolve, selection.wants_evolution()) {
        let record = stage("evolve", run_evolve(spec, ev, &field, threshold, ctx))?;
        if wants(Analysis::Virial) {
            stage("virial", run_virial(spec, &record, ctx))?;
        }
        if wants(Analysis::Scattering) {
            stage("scattering", run_scattering(spec, ev, &field, threshold, ctx))?;
        }
        if wants(Analysis::ChiProbe) {
            stage("chi_probe", run_chi(spec, ev, &field, threshold, ctx))?;
        }
    }
    Ok(gs)
}

fn set_verdict_csv(v: &SetVerdict) -> String {
    format!(
        "set_a,set_k,S,P,I,E,threshold\n{},{},{:e},{:e},{:e},{:e},{:e}\n",
        v.set_a, v.set_k, v.s_value, v.p_value, v.i_value, v.e_value, v.threshold
    )
}

fn run_classify(spec: &ExperimentSpec, field: &Field, threshold: f64, ctx: &mut Ctx) -> Result<()> {
    let v = classify(field, spec.mu, threshold)?;
    ctx.verdict("set_a", v.set_a);
    ctx.verdict("set_k", v.set_k);
    ctx.claim("set_agreement", format!("({}, {})", v.set_a, v.set_k), "no (A_plus, K_minus) or (A_minus, K_plus)", !v.is_disagreement());
    if let Some(a) = spec.classify.expect_a {
        ctx.claim("set_a", v.set_a.to_string(), a.to_string(), v.set_a == a);
    }
    if let Some(k) = spec.classify.expect_k {
        ctx.claim("set_k", v.set_k.to_string(), k.to_string(), v.set_k == k);
    }
    match spec.classify.energy {
        Some(EnergySign::Negative) => ctx.claim("energy_sign", format!("{:e}", v.e_value), "< 0", v.e_value < 0.0),
        Some(EnergySign::Nonnegative) => ctx.claim("energy_sign", format!("{:e}", v.e_value), ">= 0", v.e_value >= 0.0),
        None => {}
    }
    ctx.csv("classify.csv", &set_verdict_csv(&v))
}

fn run_curve(spec: &ExperimentSpec, field: &Field, ctx: &mut Ctx) -> Result<()> {
    let cs = spec.curve.as_ref().context("missing [curve] section")?;
    let curve = scaling_curve(field, spec.mu, cs.range, cs.count)?;
    let residuals = curve.derivative_residuals();
    let worst = residuals.iter().fold(0.0f64, |m, r| m.max(r.1));
    ctx.claim(
        "curve_derivative_residual",
        format!("{worst:e} at {} nodes", residuals.len()),
        format!("< {:e}", cs.tolerance),
        !residuals.is_empty() && worst < cs.tolerance,
    );
    ctx.claim("curve_phi_decreasing", curve.is_phi_decreasing(0.0).to_string(), "I/lambda^2 strictly decreasing", curve.is_phi_decreasing(0.0));
    let mut body = curve.to_csv();
    body.push_str("\n# derivative residuals\nlambda,residual\n");
    for (l, r) in &residuals {
        body.push_str(&format!("{l:e},{r:e}\n"));
    }
    ctx.csv("curve.csv", &body)
}

fn run_mt_probe(spec: &ExperimentSpec, field: &Field, ctx: &mut Ctx) -> Result<()> {
    let mt = spec.mt_probe.as_ref().context("missing [mt_probe] section")?;
    let grid = make_grid(mt.n, mt.half_width)?;
    let (kappas, estimate) = kappa_sequence(mt.family_size, &grid)?;
    let monotone = kappas.windows(2).all(|w| w[1] >= w[0]);
    ctx.claim("kappa_nondecreasing", format!("{} sizes", kappas.len()), "kappa(k+1) >= kappa(k)", monotone);
    let violations = estimate.refined_violations().len();
    ctx.claim("refined_mt_violations", violations.to_string(), "0 at kappa (1 + 1e-6)", violations == 0);
    let kappa = estimate.kappa;
    ctx.verdict("kappa", format!("{kappa:e}"));
    let small = small_data_check(field, kappa)?;
    ctx.verdict("small_data_check", small);
    if let Some(expect) = spec.mt_probe.as_ref().and_then(|m| m.expect_small_data) {
        ctx.claim("small_data_check", small.to_string(), expect.to_string(), small == expect);
    }
    ctx.csv("mt_probe.csv", &mt_csv(&kappas, &estimate))
}

/// `κ` for every family size `1..=size`, plus the full estimate.
pub fn kappa_sequence(size: usize, grid: &nlsx_core::Grid2D) -> Result<(Vec<f64>, nlsx_core::variational::KappaEstimate)> {
    let full = kappa_probe(size, grid)?;
    let mut kappas = Vec::with_capacity(size);
    let mut running = 0.0f64;
    for m in &full.members {
        running = running.max(m.moser_integral);
        kappas.push(running);
    }
    Ok((kappas, full))
}

pub fn mt_csv(kappas: &[f64], estimate: &nlsx_core::variational::KappaEstimate) -> String {
    let mut body = format!("# kappa={:e}\nsize,inner_radius,outer_radius,moser_integral,kappa,refined_integral,refined_bound\n", estimate.kappa);
    for (j, (m, k)) in estimate.members.iter().zip(kappas).enumerate() {
        body.push_str(&format!(
            "{},{:e},{:e},{:e},{:e},{:e},{:e}\n",
            j + 1,
            m.inner_radius,
            m.outer_radius,
            m.moser_integral,
            k,
            m.refined_integral,
            estimate.kappa * m.refined_factor()
        ));
    }
    body
}

fn snapshot_name(t: f64) -> String {
    format!("snapshot_t{t:e}.nlsx")
}

fn run_evolve(spec: &ExperimentSpec, ev: &EvolveSpec, field: &Field, threshold: f64, ctx: &mut Ctx) -> Result<TrajectoryRecord> {
    let mu = spec.mu;
    let initial_set = classify(field, mu, threshold)?;
    let mut flips = 0usize;
    let mut pending: Vec<f64> = ev.snapshot_times.clone();
    let mut snapshots: Vec<(String, Vec<u8>)> = Vec::new();
    let record = evolve_with(field, &ev.config, |f, rep| {
        if ev.persistence {
            let v = classify_report(rep, f.is_zero(), threshold);
            if v.set_a != initial_set.set_a {
                flips += 1;
            }
        }
        let t = f.time();
        pending.retain(|&s| {
            if (t - s).abs() <= 1e-9 * s.abs().max(1.0) {
                snapshots.push((snapshot_name(s), encode(f, mu)));
                false
            } else {
                true
            }
        });
        Ok(())
    })?;
    for (name, bytes) in &snapshots {
        ctx.artifacts.write(name, bytes)?;
    }
    if !pending.is_empty() {
        ctx.claim("snapshot_times", format!("{pending:?} not reached"), "every snapshot time is a monitored time", false);
    }
    ctx.verdict("run_verdict", record.verdict);
    if let Some(t) = record.trip_time {
        ctx.verdict("trip_time", format!("{t:e}"));
    }
    if let Some(expect) = ev.expect {
        ctx.claim("run_verdict", record.verdict.to_string(), expect.to_string(), record.verdict == expect);
    }
    if record.verdict == RunVerdict::ReachedTEnd {
        if let Some(tol) = ev.mass_drift {
            ctx.claim("mass_drift", format!("{:e}", record.drift_mass), format!("< {tol:e}"), record.drift_mass < tol);
        }
        if let Some(tol) = ev.energy_drift {
            ctx.claim("energy_drift", format!("{:e}", record.drift_energy), format!("< {tol:e}"), record.drift_energy < tol);
        }
    } else if ev.mass_drift.is_some() || ev.energy_drift.is_some() {
        ctx.claim("conservation", format!("run ended {}", record.verdict), "reached_t_end", false);
    }
    if ev.grad_bound {
        let max = record.max_grad_sq();
        ctx.claim("grad_bound", format!("max grad_sq {max:e}"), format!("< 2 S = {:e}", 2.0 * threshold), max < 2.0 * threshold);
    }
    if ev.persistence {
        ctx.claim(
            "set_persistence",
            format!("{flips} flips from {}", initial_set.set_a),
            "0 flips at monitored times",
            flips == 0,
        );
    }
    ctx.csv("trajectory.csv", &record.to_csv())?;
    ctx.artifacts.write("final.nlsx", &encode(&record.final_field, mu))?;

    if !ev.refinements.is_empty() {
        run_refinements(spec, ev, &record, ctx)?;
    }
    Ok(record)
}

fn run_refinements(spec: &ExperimentSpec, ev: &EvolveSpec, base: &TrajectoryRecord, ctx: &mut Ctx) -> Result<()> {
    let mut rows = vec![(spec.n, ev.config.dt, base.verdict, base.trip_time)];
    for &(n, dt) in &ev.refinements {
        let grid = make_grid(n, spec.half_width)?;
        let gs = cache::ground_state(spec.mu, &spec.ground_state)?;
        let f = datum::build(&spec.datum, &grid, spec.mu, Some(&gs.profile))?;
        let mut cfg = ev.config;
        cfg.dt = dt;
        let rec = evolve(&f, &cfg).with_context(|| format!("refinement n = {n}, dt = {dt}"))?;
        rows.push((n, dt, rec.verdict, rec.trip_time));
    }
    let trips: Option<Vec<f64>> = rows.iter().map(|r| r.3).collect();
    let spread = trips.as_ref().map(|t| {
        let t0 = t[0];
        t.iter().fold(0.0f64, |m, x| m.max((x - t0).abs() / t0))
    });
    let stable = spread.is_some_and(|s| s <= ev.trip_stability);
    ctx.claim(
        "trip_time_stability",
        spread.map_or("a level did not trip".to_string(), |s| format!("relative spread {s:e} over {} levels", rows.len())),
        format!("<= {:e}", ev.trip_stability),
        stable,
    );
    ctx.verdict("label", if stable { "blow-up" } else { "inconclusive" });
    let mut body = String::from("n,dt,verdict,trip_time\n");
    for (n, dt, v, t) in &rows {
        body.push_str(&format!("{n},{dt:e},{v},{}\n", t.map_or(String::new(), |t| format!("{t:e}"))));
    }
    ctx.csv("refinement.csv", &body)
}

fn run_virial(spec: &ExperimentSpec, record: &TrajectoryRecord, ctx: &mut Ctx) -> Result<()> {
    let vs = spec.virial.as_ref().context("missing [virial] section")?;
    let mut worst = Vec::with_capacity(vs.every.len());
    let mut body = String::from("every,t,residual\n");
    for &k in &vs.every {
        let series = virial_monitor(record, k)?;
        for (t, r) in &series {
            body.push_str(&format!("{k},{t:e},{r:e}\n"));
        }
        worst.push(series.iter().fold(0.0f64, |m, x| m.max(x.1)));
    }
    if let Some(tol) = vs.tolerance {
        let w = worst[0];
        ctx.claim("virial_residual", format!("{w:e} at every = {}", vs.every[0]), format!("< {tol:e}"), w < tol);
    }
    if let Some((order, slack)) = vs.order {
        for j in 1..vs.every.len() {
            let observed = (worst[j] / worst[j - 1]).ln() / (vs.every[j] as f64 / vs.every[j - 1] as f64).ln();
            ctx.claim(
                format!("virial_order_{}_{}", vs.every[j - 1], vs.every[j]),
                format!("{observed:.4}"),
                format!("{order} +- {slack}"),
                (observed - order).abs() <= slack,
            );
        }
    }
    ctx.csv("virial.csv", &body)
}

fn run_scattering(spec: &ExperimentSpec, ev: &EvolveSpec, field: &Field, threshold: f64, ctx: &mut Ctx) -> Result<()> {
    let rep = scattering_diagnostic(field, &ev.config, &spec.checkpoints, threshold)?;
    ctx.claim(
        "scattering_increments_decreasing",
        format!("{:?}", rep.increments.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>()),
        "strictly decreasing",
        rep.increments.len() >= 2 && rep.increments_strictly_decreasing(),
    );
    let tail = &rep.l6_ratios[rep.l6_ratios.len().saturating_sub(3)..];
    let nonincreasing = tail.len() == 3 && tail.windows(2).all(|w| w[1] <= w[0]);
    ctx.claim(
        "scattering_l6_ratio",
        format!("{:?}", tail.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>()),
        "nonincreasing over the last 3 checkpoints",
        nonincreasing,
    );
    let mut body = String::from("t,increment,l6_integral,l8_integral,l6_ratio\n");
    for (j, t) in rep.checkpoints.iter().enumerate() {
        let inc = if j == 0 { String::new() } else { format!("{:e}", rep.increments[j - 1]) };
        body.push_str(&format!("{t:e},{inc},{:e},{:e},{:e}\n", rep.l6_integrals[j], rep.l8_integrals[j], rep.l6_ratios[j]));
    }
    ctx.csv("scattering.csv", &body)
}

fn run_chi(spec: &ExperimentSpec, ev: &EvolveSpec, field: &Field, threshold: f64, ctx: &mut Ctx) -> Result<()> {
    let radius = spec.chi_radius.context("missing [chi_probe] radius")?;
    let weight = make_virial_weight(field.grid(), radius)?;
    let probe = chi_invariant_probe(field, &ev.config, &weight, threshold)?;
    let outside = probe.inside.iter().filter(|b| !**b).count();
    ctx.claim("chi_probe_inside", format!("{outside} of {} outside", probe.inside.len()), "chi_R u(t) in closure of A_plus", probe.all_inside());
    let mut body = String::from("t,inside\n");
    for (t, b) in probe.times.iter().zip(&probe.inside) {
        body.push_str(&format!("{t:e},{}\n", *b as u8));
    }
    ctx.csv("chi_probe.csv", &body)
}
