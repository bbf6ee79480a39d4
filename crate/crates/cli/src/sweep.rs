//! Runs a directory of spec files on a worker pool.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};

use crate::runner::{run, ExperimentReport};
use crate::spec::ExperimentSpec;

pub const SPEC_EXTENSION: &str = "spec";

#[derive(Debug)]
pub struct SweepEntry {
    pub spec_path: PathBuf,
    pub out_dir: PathBuf,
    pub outcome: Result<ExperimentReport>,
}

impl SweepEntry {
    pub fn exit_code(&self) -> i32 {
        match &self.outcome {
            Ok(r) => r.exit_code(),
            Err(_) => 2,
        }
    }
}

/// `*.spec` files in `dir`, sorted by name.
pub fn spec_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == SPEC_EXTENSION))
        .collect();
    files.sort();
    Ok(files)
}

/// Each spec writes into `out/<file stem>`; results come back in file order.
pub fn sweep(dir: &Path, out: &Path, jobs: usize) -> Result<Vec<SweepEntry>> {
    let files = spec_files(dir)?;
    let jobs = jobs.max(1).min(files.len().max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<SweepEntry>>> = Mutex::new((0..files.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let stem = path.file_stem().map_or_else(|| format!("spec{i}"), |s| s.to_string_lossy().into_owned());
                let out_dir = out.join(stem);
                let outcome = ExperimentSpec::from_file(path).and_then(|spec| run(&spec, &out_dir));
                let entry = SweepEntry { spec_path: path.clone(), out_dir, outcome };
                results.lock().expect("no worker panics while holding the lock")[i] = Some(entry);
            });
        }
    });
    Ok(results.into_inner().expect("workers have joined").into_iter().flatten().collect())
}
