//! Experiment specification files.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, ensure, Context, Result};
use nlsx_core::ground_state::ShootingConfig;
use nlsx_core::{make_grid, EvolveConfig, Grid2D, Mu, RunVerdict, SetA, SetK};

use crate::config::RawConfig;
use crate::datum::{BumpScale, Datum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Analysis {
    Classify,
    Curve,
    MtProbe,
    Virial,
    Scattering,
    ChiProbe,
}

impl Analysis {
    pub const ALL: [Analysis; 6] = [
        Analysis::Classify,
        Analysis::Curve,
        Analysis::MtProbe,
        Analysis::Virial,
        Analysis::Scattering,
        Analysis::ChiProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Classify => "classify",
            Analysis::Curve => "curve",
            Analysis::MtProbe => "mt_probe",
            Analysis::Virial => "virial",
            Analysis::Scattering => "scattering",
            Analysis::ChiProbe => "chi_probe",
        }
    }

    pub fn needs_evolution(self) -> bool {
        matches!(self, Analysis::Virial | Analysis::Scattering | Analysis::ChiProbe)
    }
}

impl FromStr for Analysis {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Analysis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown analysis `{s}`"))
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn parse_mu(s: &str) -> Result<Mu> {
    let v: u8 = s.parse().map_err(|_| anyhow!("mu must be 0 or 1, got `{s}`"))?;
    Ok(Mu::try_from(v)?)
}

fn parse_verdict(s: &str) -> Result<RunVerdict> {
    Ok(match s {
        "reached_t_end" => RunVerdict::ReachedTEnd,
        "blowup_detected" => RunVerdict::BlowupDetected,
        "resolution_lost" => RunVerdict::ResolutionLost,
        _ => bail!("unknown run verdict `{s}`"),
    })
}

fn parse_set_a(s: &str) -> Result<SetA> {
    Ok(match s {
        "A_plus" => SetA::APlus,
        "A_minus" => SetA::AMinus,
        "on_nehari" => SetA::OnNehari,
        "above_threshold" => SetA::AboveThreshold,
        "zero" => SetA::Zero,
        _ => bail!("unknown A-set label `{s}`"),
    })
}

fn parse_set_k(s: &str) -> Result<SetK> {
    Ok(match s {
        "K_plus" => SetK::KPlus,
        "K_minus" => SetK::KMinus,
        "i_zero" => SetK::IZero,
        "above_threshold" => SetK::AboveThreshold,
        "zero" => SetK::Zero,
        _ => bail!("unknown K-set label `{s}`"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergySign {
    Negative,
    Nonnegative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifySpec {
    pub expect_a: Option<SetA>,
    pub expect_k: Option<SetK>,
    pub energy: Option<EnergySign>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub range: (f64, f64),
    pub count: usize,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MtProbeSpec {
    pub family_size: usize,
    pub n: usize,
    pub half_width: f64,
    pub expect_small_data: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirialSpec {
    pub every: Vec<usize>,
    pub tolerance: Option<f64>,
    pub order: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveSpec {
    pub config: EvolveConfig,
    pub expect: Option<RunVerdict>,
    pub grad_bound: bool,
    pub persistence: bool,
    pub mass_drift: Option<f64>,
    pub energy_drift: Option<f64>,
    pub snapshot_times: Vec<f64>,
    /// Extra `(n, dt)` levels for the trip-time stability check.
    pub refinements: Vec<(usize, f64)>,
    pub trip_stability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub mu: Mu,
    pub n: usize,
    pub half_width: f64,
    pub datum: Datum,
    pub ground_state: ShootingConfig,
    pub evolve: Option<EvolveSpec>,
    pub analyses: BTreeSet<Analysis>,
    pub classify: ClassifySpec,
    pub curve: Option<CurveSpec>,
    pub mt_probe: Option<MtProbeSpec>,
    pub virial: Option<VirialSpec>,
    pub checkpoints: Vec<f64>,
    pub chi_radius: Option<f64>,
    /// Text the spec was parsed from.
    pub source: String,
}

impl ExperimentSpec {
    pub fn grid(&self) -> Result<Grid2D> {
        Ok(make_grid(self.n, self.half_width)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, path.parent()).with_context(|| format!("spec {}", path.display()))
    }

    /// Parses spec text. Relative snapshot paths resolve against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut c = RawConfig::parse(text)?;
        let name: String = c.require("", "name")?;
        ensure!(
            !name.is_empty() && name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '-' || ch == '_'),
            "name `{name}` must be nonempty and use only [A-Za-z0-9_-]"
        );
        let mu = parse_mu(&c.require::<String>("", "mu")?)?;
        let n = c.require("grid", "n")?;
        let half_width = c.require("grid", "L")?;

        let datum = parse_datum(&mut c, base)?;

        let mut ground_state = ShootingConfig::default();
        if let Some(r) = c.take_parsed("ground_state", "r_max")? {
            ground_state.r_max = r;
        }

        let analyses: BTreeSet<Analysis> = c.take_list::<Analysis>("analyses", "run")?.unwrap_or_default().into_iter().collect();
        let evolve = if c.has_section("evolve") { Some(parse_evolve(&mut c, mu)?) } else { None };

        let classify = ClassifySpec {
            expect_a: c.take("classify", "expect_a").map(|s| parse_set_a(&s)).transpose()?,
            expect_k: c.take("classify", "expect_k").map(|s| parse_set_k(&s)).transpose()?,
            energy: match c.take("classify", "energy").as_deref() {
                None => None,
                Some("negative") => Some(EnergySign::Negative),
                Some("nonnegative") => Some(EnergySign::Nonnegative),
                Some(other) => bail!("[classify] energy: expected negative or nonnegative, got `{other}`"),
            },
        };

        let curve = if analyses.contains(&Analysis::Curve) {
            Some(CurveSpec {
                range: (c.require("curve", "lambda_min")?, c.require("curve", "lambda_max")?),
                count: c.take_parsed("curve", "count")?.unwrap_or(24),
                tolerance: c.take_parsed("curve", "tolerance")?.unwrap_or(1e-4),
            })
        } else {
            None
        };

        let mt_probe = if analyses.contains(&Analysis::MtProbe) {
            Some(MtProbeSpec {
                family_size: c.require("mt_probe", "family_size")?,
                n: c.take_parsed("mt_probe", "n")?.unwrap_or(256),
                half_width: c.take_parsed("mt_probe", "L")?.unwrap_or(8.0),
                expect_small_data: c.take_parsed("mt_probe", "expect_small_data")?,
            })
        } else {
            None
        };

        let virial = if analyses.contains(&Analysis::Virial) {
            let every = c.take_list::<usize>("virial", "every")?.unwrap_or_else(|| vec![1]);
            let order = match c.take_parsed::<f64>("virial", "order")? {
                Some(o) => Some((o, c.take_parsed("virial", "order_tolerance")?.unwrap_or(0.3))),
                None => None,
            };
            Some(VirialSpec { every, tolerance: c.take_parsed("virial", "tolerance")?, order })
        } else {
            None
        };

        let checkpoints = if analyses.contains(&Analysis::Scattering) {
            c.take_list("scattering", "checkpoints")?.context("[scattering] checkpoints is required")?
        } else {
            Vec::new()
        };
        let chi_radius = if analyses.contains(&Analysis::ChiProbe) { Some(c.require("chi_probe", "radius")?) } else { None };

        c.finish()?;
        let spec = ExperimentSpec {
            name,
            mu,
            n,
            half_width,
            datum,
            ground_state,
            evolve,
            analyses,
            classify,
            curve,
            mt_probe,
            virial,
            checkpoints,
            chi_radius,
            source: text.to_string(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        self.datum.validate()?;
        if let Some(ev) = &self.evolve {
            ev.config.validate(&grid)?;
            for &(n, dt) in &ev.refinements {
                let mut cfg = ev.config;
                cfg.dt = dt;
                cfg.validate(&make_grid(n, self.half_width)?).with_context(|| format!("refinement level n = {n}, dt = {dt}"))?;
            }
            ensure!(
                ev.refinements.is_empty() || ev.expect == Some(RunVerdict::BlowupDetected),
                "[evolve] refinements only apply to expect = blowup_detected"
            );
        }
        for a in &self.analyses {
            if a.needs_evolution() {
                ensure!(self.evolve.is_some(), "analysis {a} needs an [evolve] section");
            }
        }
        if self.analyses.contains(&Analysis::Scattering) || self.analyses.contains(&Analysis::ChiProbe) {
            ensure!(self.mu == Mu::One, "scattering and chi_probe require mu = 1");
        }
        if self.analyses.contains(&Analysis::Virial) {
            ensure!(
                self.evolve.as_ref().is_some_and(|e| e.config.weight_radius.is_some()),
                "analysis virial needs [evolve] weight_radius"
            );
        }
        if let Some(cv) = &self.curve {
            ensure!(cv.range.0 > 0.0 && cv.range.1 > cv.range.0, "[curve] needs 0 < lambda_min < lambda_max");
        }
        ensure!(
            self.checkpoints.windows(2).all(|w| w[1] > w[0]),
            "[scattering] checkpoints must be increasing"
        );
        Ok(())
    }
}

fn parse_datum(c: &mut RawConfig, base: Option<&Path>) -> Result<Datum> {
    let kind: String = c.require("datum", "kind")?;
    let datum = match kind.as_str() {
        "gaussian" => {
            let center = match c.take_list::<f64>("datum", "center")? {
                None => (0.0, 0.0),
                Some(v) if v.len() == 2 => (v[0], v[1]),
                Some(_) => bail!("[datum] center needs two coordinates"),
            };
            Datum::Gaussian { amplitude: c.require("datum", "amplitude")?, width: c.require("datum", "width")?, center }
        }
        "scaled_ground_state" => Datum::ScaledGroundState { lambda: c.require("datum", "lambda")? },
        "exp_bump" => {
            let lambda = c.take_parsed("datum", "lambda")?;
            let fraction = c.take_parsed("datum", "bound_fraction")?;
            let scale = match (lambda, fraction) {
                (Some(l), None) => BumpScale::Lambda(l),
                (None, Some(f)) => BumpScale::FractionOfBound(f),
                _ => bail!("[datum] exp_bump needs exactly one of lambda, bound_fraction"),
            };
            Datum::ExpBump { scale }
        }
        "custom" => {
            let raw: PathBuf = c.require::<String>("datum", "path")?.into();
            let path = match base {
                Some(b) if raw.is_relative() => b.join(raw),
                _ => raw,
            };
            Datum::Custom { path }
        }
        other => bail!("[datum] unknown kind `{other}`"),
    };
    Ok(datum)
}

fn parse_evolve(c: &mut RawConfig, mu: Mu) -> Result<EvolveSpec> {
    let s = "evolve";
    let mut cfg = EvolveConfig::new(c.require(s, "dt")?, c.require(s, "t_end")?, mu);
    if let Some(v) = c.take_parsed(s, "stride")? {
        cfg.monitor_stride = v;
    }
    if let Some(v) = c.take_parsed(s, "adaptive")? {
        cfg.adaptive_dt = v;
    }
    if let Some(v) = c.take_parsed(s, "energy_drift_limit")? {
        cfg.energy_drift_limit = v;
    }
    if let Some(v) = c.take_parsed(s, "blowup_grad")? {
        cfg.blowup_grad_threshold = v;
    }
    if let Some(v) = c.take_parsed(s, "tail_limit")? {
        cfg.tail_fraction_limit = v;
    }
    cfg.weight_radius = c.take_parsed(s, "weight_radius")?;
    let refinements = c
        .take_list::<String>(s, "refinements")?
        .unwrap_or_default()
        .iter()
        .map(|item| {
            let (n, dt) = item.split_once(':').with_context(|| format!("[evolve] refinement `{item}` is not n:dt"))?;
            Ok((n.trim().parse()?, dt.trim().parse()?))
        })
        .collect::<Result<Vec<(usize, f64)>>>()?;
    Ok(EvolveSpec {
        config: cfg,
        expect: c.take(s, "expect").map(|v| parse_verdict(&v)).transpose()?,
        grad_bound: c.take_parsed(s, "grad_bound")?.unwrap_or(false),
        persistence: c.take_parsed(s, "persistence")?.unwrap_or(false),
        mass_drift: c.take_parsed(s, "mass_drift")?,
        energy_drift: c.take_parsed(s, "energy_drift")?,
        snapshot_times: c.take_list(s, "snapshot_times")?.unwrap_or_default(),
        refinements,
        trip_stability: c.take_parsed(s, "trip_stability")?.unwrap_or(0.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "name = t\nmu = 1\n[grid]\nn = 64\nL = 8\n[datum]\nkind = gaussian\namplitude = 0.1\nwidth = 1\n";

    #[test]
    fn minimal_spec() {
        let s = ExperimentSpec::parse(MINIMAL, None).unwrap();
        assert_eq!(s.mu, Mu::One);
        assert!(s.analyses.is_empty());
        assert!(s.evolve.is_none());
        assert_eq!(s.datum, Datum::Gaussian { amplitude: 0.1, width: 1.0, center: (0.0, 0.0) });
    }

    #[test]
    fn unknown_keys_and_bad_values_fail() {
        assert!(ExperimentSpec::parse(&format!("{MINIMAL}colour = red\n"), None).is_err());
        assert!(ExperimentSpec::parse(&MINIMAL.replace("mu = 1", "mu = 2"), None).is_err());
        assert!(ExperimentSpec::parse(&MINIMAL.replace("n = 64", "n = 65"), None).is_err());
    }

    #[test]
    fn scattering_requires_mu_one() {
        let text = format!(
            "{}[evolve]\ndt = 0.01\nt_end = 1\n[analyses]\nrun = scattering\n[scattering]\ncheckpoints = 0.5, 1\n",
            MINIMAL.replace("mu = 1", "mu = 0")
        );
        let err = ExperimentSpec::parse(&text, None).unwrap_err();
        assert!(format!("{err:#}").contains("mu = 1"));
    }

    #[test]
    fn evolution_analyses_need_evolve() {
        let text = format!("{MINIMAL}[analyses]\nrun = virial\n");
        assert!(ExperimentSpec::parse(&text, None).is_err());
    }

    #[test]
    fn missing_snapshot_is_rejected() {
        let text = MINIMAL.replace("kind = gaussian\namplitude = 0.1\nwidth = 1\n", "kind = custom\npath = nope.nlsx\n");
        assert!(ExperimentSpec::parse(&text, Some(Path::new("/nonexistent"))).is_err());
    }
}
