//! Batch runs over a directory of instances with oracle comparison.

use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use capkc_core::oracle::exact_opt;
use capkc_core::rational::{format as fmt_q, from_u64};
use capkc_core::{solve, Error, Rational, SolveOptions};
use num_traits::Zero;
use serde::Serialize;

use crate::format::parse_instance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub file: String,
    pub n: usize,
    pub variant: Option<String>,
    pub tau_star: Option<String>,
    pub radius: Option<String>,
    /// Exact optimum, when the instance is small enough for the oracle.
    pub opt: Option<String>,
    /// `radius / opt` (1 when both are zero).
    pub ratio: Option<String>,
    pub bound: Option<u32>,
    pub certified: bool,
    pub within_bound: Option<bool>,
    pub error: Option<String>,
    #[serde(skip)]
    ratio_value: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariantSummary {
    pub variant: String,
    pub instances: usize,
    pub max_ratio: Option<String>,
    pub bound: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<VariantSummary>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn to_text(&self) -> String {
        let dash = |v: &Option<String>| v.clone().unwrap_or_else(|| "-".into());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<28} {:>3} {:<9} {:>10} {:>10} {:>10} {:>8} {:>5} {:>9}",
            "file", "n", "variant", "tau_star", "radius", "opt", "ratio", "bound", "certified"
        );
        for r in &self.rows {
            if let Some(e) = &r.error {
                let _ = writeln!(out, "{:<28} {:>3} error: {e}", r.file, r.n);
                continue;
            }
            let _ = writeln!(
                out,
                "{:<28} {:>3} {:<9} {:>10} {:>10} {:>10} {:>8} {:>5} {:>9}",
                r.file,
                r.n,
                dash(&r.variant),
                dash(&r.tau_star),
                dash(&r.radius),
                dash(&r.opt),
                dash(&r.ratio),
                r.bound.map_or_else(|| "-".into(), |b| b.to_string()),
                r.certified
            );
        }
        let _ = writeln!(out);
        for s in &self.summary {
            let _ = writeln!(
                out,
                "{}: {} instances, max ratio {} (bound {})",
                s.variant,
                s.instances,
                dash(&s.max_ratio),
                s.bound
            );
        }
        out
    }
}

/// Solves one instance file; the oracle runs only when `n <= max_n`.
pub fn bench_file(path: &Path, max_n: usize) -> BenchRow {
    let file = path.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned());
    let mut row = BenchRow {
        file,
        n: 0,
        variant: None,
        tau_star: None,
        radius: None,
        opt: None,
        ratio: None,
        bound: None,
        certified: false,
        within_bound: None,
        error: None,
        ratio_value: None,
    };
    let inst = match std::fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|t| parse_instance(&t).map_err(|e| e.to_string()))
    {
        Ok(inst) => inst,
        Err(e) => {
            row.error = Some(e);
            return row;
        }
    };
    row.n = inst.n();
    let sol = match solve(&inst, &SolveOptions::default()) {
        Ok(sol) => sol,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.variant = Some(sol.variant.name().into());
    row.tau_star = Some(fmt_q(&sol.tau_star));
    row.radius = Some(fmt_q(&sol.metric_radius));
    row.bound = Some(sol.ratio_bound);
    row.certified = sol.certified;
    if inst.n() <= max_n {
        match exact_opt(&inst, sol.variant) {
            Ok(opt) => {
                row.within_bound = Some(sol.metric_radius <= from_u64(sol.ratio_bound.into()) * &opt.radius);
                let ratio = if opt.radius.is_zero() {
                    sol.metric_radius.is_zero().then(|| from_u64(1))
                } else {
                    Some(&sol.metric_radius / &opt.radius)
                };
                row.ratio = ratio.as_ref().map(fmt_q);
                row.ratio_value = ratio;
                row.opt = Some(fmt_q(&opt.radius));
            }
            Err(Error::TooLarge(_)) => {}
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    row
}

/// Instance files (`*.capkc`) of `dir`, sorted by name.
pub fn instance_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "capkc"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs every instance of `dir` on `jobs` threads. Rows come back in file
/// order regardless of `jobs`.
pub fn run(dir: &Path, max_n: usize, jobs: usize) -> std::io::Result<BenchReport> {
    let files = instance_files(dir)?;
    let slots: Mutex<Vec<Option<BenchRow>>> = Mutex::new(vec![None; files.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else {
                    break;
                };
                let row = bench_file(path, max_n);
                slots.lock().expect("no panics while holding the lock")[i] = Some(row);
            });
        }
    });
    let rows: Vec<BenchRow> = slots
        .into_inner()
        .expect("threads joined")
        .into_iter()
        .map(|r| r.expect("every file processed"))
        .collect();
    let mut summary: Vec<VariantSummary> = Vec::new();
    for row in rows.iter().filter(|r| r.error.is_none()) {
        let (Some(variant), Some(bound)) = (&row.variant, row.bound) else {
            continue;
        };
        let pos = match summary.iter().position(|s| &s.variant == variant) {
            Some(p) => p,
            None => {
                summary.push(VariantSummary {
                    variant: variant.clone(),
                    instances: 0,
                    max_ratio: None,
                    bound,
                });
                summary.len() - 1
            }
        };
        let s = &mut summary[pos];
        s.instances += 1;
        if let Some(r) = &row.ratio_value {
            let current = s.max_ratio.as_deref().and_then(capkc_core::rational::parse);
            if current.is_none_or(|c| r > &c) {
                s.max_ratio = Some(fmt_q(r));
            }
        }
    }
    summary.sort_by(|a, b| a.variant.cmp(&b.variant));
    Ok(BenchReport { rows, summary })
}
