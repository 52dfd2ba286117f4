//! The four experiment drivers and the run manifest.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Command, RunConfig};
use super::output::*;
use crate::counting::{verify_onenode_bound, OneNodeReport, ResonanceQuery};
use crate::diagrams::enumerate_trees;
use crate::error::{Error, Result};
use crate::expansion::{History, TimeGrid, TreeEvaluator};
use crate::initial_data::{sample_initial_data, smooth_bump, LatticeProfile, SeededGaussianSource, SpectrumProfile};
use crate::kinetic::compare_spectra;
use crate::lattice::{Anisotropy, IVec, LatticeSpec, ModeSet};
use crate::solver::{ensemble_with, write_checkpoint};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub name: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub artifact_version: String,
    pub started_unix: f64,
    pub wall_seconds: f64,
    pub threads: usize,
    pub stages: Vec<StageTiming>,
    pub warnings: Vec<String>,
    pub files: Vec<String>,
    pub exit_code: i32,
    pub error: Option<String>,
}

/// Files and notes produced by one run.
#[derive(Clone, Debug, Default)]
pub struct RunOutcome {
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    pub stages: Vec<StageTiming>,
}

impl RunOutcome {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t0 = Instant::now();
        let out = f();
        self.stages.push(StageTiming { name: name.into(), seconds: t0.elapsed().as_secs_f64() });
        out
    }
}

/// Run `cfg` on a pool of `threads` workers (all cores when `None`) and
/// write the manifest beside the outputs, whether or not the run succeeded.
pub fn run(cfg: &RunConfig, threads: Option<usize>) -> Result<RunOutcome> {
    let dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let t0 = Instant::now();
    let mut outcome = RunOutcome::default();
    let result = pool.install(|| match cfg.command {
        Command::Simulate => simulate(cfg, &dir, &mut outcome),
        Command::Expand => expand(cfg, &dir, &mut outcome),
        Command::Count => count(cfg, &dir, &mut outcome),
        Command::Compare => compare(cfg, &dir, &mut outcome),
    });
    let manifest = RunManifest {
        schema: MANIFEST_SCHEMA.into(),
        command: cfg.command.to_string(),
        config_digest: cfg.digest(),
        seed: cfg.seed,
        artifact_version: env!("CARGO_PKG_VERSION").into(),
        started_unix: started,
        wall_seconds: t0.elapsed().as_secs_f64(),
        threads: pool.current_num_threads(),
        stages: outcome.stages.clone(),
        warnings: outcome.warnings.clone(),
        files: outcome.files.clone(),
        exit_code: result.as_ref().map(|_| 0).unwrap_or_else(Error::exit_code),
        error: result.as_ref().err().map(|e| e.to_string()),
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Numerical(e.to_string()))?;
    std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
    result.map(|_| outcome)
}

fn profiles(cfg: &RunConfig) -> Result<(SpectrumProfile, LatticeProfile)> {
    let n = smooth_bump(cfg.lattice.dim, cfg.profile.diameter, cfg.profile.amplitude, cfg.profile.center_radius)?;
    let modes = ModeSet::shared(&cfg.spec()?);
    let lp = LatticeProfile::new(&n, modes, cfg.profile.zero_mode)?;
    Ok((n, lp))
}

fn rho_warning(cfg: &RunConfig, out: &mut RunOutcome) -> Result<()> {
    let rho = cfg.params()?.rho(cfg.time.t_final);
    if rho > 0.5 {
        out.warnings.push(format!("rho = {rho:.3} is not small; the expansion and kinetic layers are outside their regime"));
    }
    Ok(())
}

fn simulate(cfg: &RunConfig, dir: &Path, out: &mut RunOutcome) -> Result<()> {
    rho_warning(cfg, out)?;
    let (_, profile) = profiles(cfg)?;
    let solver = cfg.solver()?;
    let ckpt_dir = dir.join("checkpoints");
    if cfg.ensemble.checkpoints {
        std::fs::create_dir_all(&ckpt_dir)?;
    }
    let mut stats = out.stage("ensemble", || {
        ensemble_with(&profile, &solver, cfg.ensemble.members, cfg.seed, cfg.time.t_final, |m, field| {
            if cfg.ensemble.checkpoints {
                let mut w = std::io::BufWriter::new(std::fs::File::create(ckpt_dir.join(format!("member_{m:06}.bin")))?);
                write_checkpoint(&mut w, field, m, cfg.seed)?;
            }
            Ok(())
        })
    })?;
    stats.config_digest = cfg.digest();
    out.stage("write", || write_spectrum(&dir.join(SPECTRUM_FILE), &stats, &profile))?;
    out.files.push(SPECTRUM_FILE.into());
    if cfg.ensemble.checkpoints {
        out.files.push("checkpoints/".into());
    }
    Ok(())
}

#[derive(Serialize)]
struct TreeRecord {
    tree: String,
    branches: usize,
    sup_norm: f64,
    final_sup_norm: f64,
    hermitian_defect: f64,
    dropped_pairs: usize,
}

#[derive(Serialize)]
struct ExpandHeader<'a> {
    schema: &'a str,
    config_digest: String,
    seed: u64,
    member: u64,
    t_final: f64,
    steps: usize,
    spec: LatticeSpec,
}

fn expand(cfg: &RunConfig, dir: &Path, out: &mut RunOutcome) -> Result<()> {
    rho_warning(cfg, out)?;
    let (_, profile) = profiles(cfg)?;
    let xi = sample_initial_data(&profile, &SeededGaussianSource::new(cfg.seed, 0));
    let grid = TimeGrid::new(cfg.time.t_final, cfg.expand.steps)?;
    let mut eval = TreeEvaluator::new(&xi, grid, cfg.params()?)?;
    let order = cfg.expand.order;
    let trees = enumerate_trees(order);
    let records = out.stage("trees", || {
        trees
            .iter()
            .map(|t| {
                let h = eval.term(t)?;
                Ok(TreeRecord {
                    tree: t.to_string(),
                    branches: t.l(),
                    sup_norm: h.sup_norm(),
                    final_sup_norm: h.final_field().sup_norm(),
                    hermitian_defect: h.hermitian_defect(),
                    dropped_pairs: h.truncation.dropped_pairs,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let header = ExpandHeader {
        schema: TREES_SCHEMA,
        config_digest: cfg.digest(),
        seed: cfg.seed,
        member: 0,
        t_final: cfg.time.t_final,
        steps: cfg.expand.steps,
        spec: cfg.spec()?,
    };
    write_jsonl(&dir.join("trees.jsonl"), &header, &records)?;
    out.files.push("trees.jsonl".into());

    let rows = out.stage("residual", || {
        (0..=order)
            .map(|n| {
                let r = eval.residual(n)?;
                let s = eval.residual_tree_sum(n)?;
                let gap = History::linear_combination(&[(1.0, &r), (-1.0, &s)])?.sup_norm();
                let app = eval.approximate_solution(n)?;
                Ok(vec![
                    n.to_string(),
                    csv_float(r.sup_norm()),
                    csv_float(s.sup_norm()),
                    csv_float(gap),
                    csv_float(app.final_field().energy()),
                ])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    write_csv(
        &dir.join("residual.csv"),
        RESIDUAL_SCHEMA,
        &["order", "residual_sup", "tree_sum_sup", "identity_gap", "approx_energy"],
        &rows,
    )?;
    out.files.push("residual.csv".into());
    Ok(())
}

/// β points for the counting sweep: the isotropic point first, then an
/// additive low-discrepancy sequence in [1, 2]^d.
pub fn beta_sweep(dim: usize, points: usize) -> Vec<Anisotropy> {
    // Generalized golden ratio: the root of x^{d+1} = x + 1.
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (dim as f64 + 1.0));
    }
    (0..points)
        .map(|j| {
            let beta: Vec<f64> = (0..dim)
                .map(|i| if j == 0 { 1.0 } else { 1.0 + (0.5 + j as f64 / phi.powi(i as i32 + 1)).fract() })
                .collect();
            Anisotropy::new(&beta).expect("points lie in [1, 2]")
        })
        .collect()
}

fn count(cfg: &RunConfig, dir: &Path, out: &mut RunOutcome) -> Result<()> {
    let c = &cfg.count;
    let dim = cfg.lattice.dim;
    let betas = beta_sweep(dim, c.beta_points);
    let mut queries = Vec::new();
    for &l in &c.sizes {
        let spec = LatticeSpec::new(dim, l, c.radius)?;
        for &m in &c.kx {
            let mut k = [0i64; crate::lattice::MAX_DIM];
            k[0] = m;
            for beta in &betas {
                let mut q = ResonanceQuery::new(IVec(k), c.sigma, c.window_ratio * l, spec.clone(), beta.clone())?;
                q.delta = c.delta;
                queries.push(q);
            }
        }
    }
    // Each query visits the lattice ball once.
    let unit_ball = [2.0, std::f64::consts::PI, 4.0 * std::f64::consts::PI / 3.0][dim.clamp(1, 3) - 1];
    let estimate: f64 = queries.iter().map(|q| unit_ball * (c.radius * q.spec.size).powi(dim as i32)).sum();
    if estimate > c.budget {
        return Err(Error::BudgetExceeded { estimate, budget: c.budget });
    }
    let reports: Vec<(OneNodeReport, Vec<f64>)> = out.stage("count", || {
        queries
            .par_iter()
            .map(|q| Ok((verify_onenode_bound(q, c.theta)?, q.beta.beta().to_vec())))
            .collect::<Result<Vec<_>>>()
    })?;
    let flagged = reports.iter().filter(|(r, _)| r.flagged).count();
    if flagged > 0 {
        out.warnings.push(format!("{flagged} queries exceed the one-node bound (ratio > 1)"));
    }
    let join = |v: &[f64]| v.iter().map(|x| csv_float(*x)).collect::<Vec<_>>().join(" ");
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|(r, beta)| {
            vec![
                csv_float(r.size),
                csv_float(r.window),
                join(&r.k),
                join(beta),
                csv_float(r.sigma),
                csv_float(r.delta),
                csv_float(r.theta),
                r.count.to_string(),
                csv_float(r.bound),
                csv_float(r.ratio),
                r.flagged.to_string(),
            ]
        })
        .collect();
    write_csv(
        &dir.join("bounds.csv"),
        BOUNDS_SCHEMA,
        &["L", "T", "k", "beta", "sigma", "delta", "theta", "count", "bound", "ratio", "flagged"],
        &rows,
    )?;
    out.files.push("bounds.csv".into());
    Ok(())
}

#[derive(Serialize)]
struct ComparisonHeader<'a> {
    schema: &'a str,
    config_digest: String,
    stats_digest: String,
    members: u64,
    time: f64,
    t_kin: f64,
}

fn compare(cfg: &RunConfig, dir: &Path, out: &mut RunOutcome) -> Result<()> {
    let path: PathBuf = dir.join(SPECTRUM_FILE);
    if !path.exists() {
        return Err(Error::MissingInput(format!("{} (run `simulate` first)", path.display())));
    }
    let stats = read_spectrum(&path)?;
    if stats.modes.spec() != &cfg.spec()? {
        return Err(Error::Config(format!("{} was produced on a different lattice than the configuration", path.display())));
    }
    let (n, profile) = profiles(cfg)?;
    let params = cfg.params()?;
    let quad = cfg.quadrature()?;
    let report = out.stage("compare", || compare_spectra(&stats, &n, &profile, &params, &quad))?;
    let header = ComparisonHeader {
        schema: COMPARISON_SCHEMA,
        config_digest: cfg.digest(),
        stats_digest: stats.config_digest.clone(),
        members: report.members,
        time: report.time,
        t_kin: params.t_kin(),
    };
    write_jsonl(&dir.join("comparison.jsonl"), &header, &report.rows)?;
    let s = report.summary;
    write_csv(
        &dir.join("comparison_summary.csv"),
        SUMMARY_SCHEMA,
        &["time", "members", "modes", "median_abs_z", "p95_abs_z", "max_abs_z"],
        &[vec![
            csv_float(report.time),
            report.members.to_string(),
            s.modes.to_string(),
            csv_float(s.median_abs_z),
            csv_float(s.p95_abs_z),
            csv_float(s.max_abs_z),
        ]],
    )?;
    out.files.push("comparison.jsonl".into());
    out.files.push("comparison_summary.csv".into());
    if s.p95_abs_z >= 4.0 {
        out.warnings.push(format!("95th percentile |z| = {:.3} ≥ 4", s.p95_abs_z));
    }
    Ok(())
}
