//! On-disk cache of certified ground states.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use nlsx_core::ground_state::{certify, solve_ground_state, ShootingConfig};
use nlsx_core::{GroundStateCertificate, Mu, RadialProfile};

use crate::output::write_atomic;

pub const CACHE_ENV: &str = "NLSX_CACHE_DIR";

pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME").filter(|v| !v.is_empty()) {
        return PathBuf::from(dir).join("nlsx");
    }
    if let Some(home) = std::env::var_os("HOME").filter(|v| !v.is_empty()) {
        return PathBuf::from(home).join(".cache").join("nlsx");
    }
    std::env::temp_dir().join("nlsx-cache")
}

pub fn cache_key(mu: Mu, cfg: &ShootingConfig) -> String {
    format!("gs_mu{}_tol{:e}_rmax{:e}_nodes{}.csv", mu, cfg.tolerance, cfg.r_max, cfg.nodes)
}

#[derive(Debug, Clone)]
pub struct CachedGroundState {
    pub profile: RadialProfile,
    pub certificate: GroundStateCertificate,
    pub path: PathBuf,
    pub from_cache: bool,
}

/// Loads the profile from `dir` or solves and stores it. Cached profiles are re-certified.
pub fn ground_state_in(dir: &Path, mu: Mu, cfg: &ShootingConfig) -> Result<CachedGroundState> {
    let path = dir.join(cache_key(mu, cfg));
    if let Ok(text) = std::fs::read_to_string(&path) {
        let cached = RadialProfile::from_csv(&text)
            .map_err(anyhow::Error::from)
            .and_then(|p| Ok((certify(&p)?, p)));
        match cached {
            Ok((certificate, profile)) if profile.mu() == mu => {
                return Ok(CachedGroundState { profile, certificate, path, from_cache: true });
            }
            // A stale or corrupt entry is recomputed and overwritten.
            _ => {}
        }
    }
    let sol = solve_ground_state(mu, cfg).context("shooting solve")?;
    write_atomic(&path, sol.profile.to_csv(Some(sol.certificate.s_threshold)).as_bytes())?;
    Ok(CachedGroundState { profile: sol.profile, certificate: sol.certificate, path, from_cache: false })
}

pub fn ground_state(mu: Mu, cfg: &ShootingConfig) -> Result<CachedGroundState> {
    ground_state_in(&cache_dir(), mu, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_lookup_hits_the_cache() {
        let dir = std::env::temp_dir().join(format!("nlsx-cache-test-{}", std::process::id()));
        let cfg = ShootingConfig::default();
        let a = ground_state_in(&dir, Mu::Zero, &cfg).unwrap();
        assert!(!a.from_cache);
        let b = ground_state_in(&dir, Mu::Zero, &cfg).unwrap();
        assert!(b.from_cache);
        assert_eq!(a.certificate.s_threshold.to_bits(), b.certificate.s_threshold.to_bits());
        std::fs::write(&b.path, "garbage").unwrap();
        let c = ground_state_in(&dir, Mu::Zero, &cfg).unwrap();
        assert!(!c.from_cache);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn key_names_every_solver_setting() {
        let k = cache_key(Mu::One, &ShootingConfig { r_max: 40.0, nodes: 100, tolerance: 1e-10 });
        assert_eq!(k, "gs_mu1_tol1e-10_rmax4e1_nodes100.csv");
    }
}
