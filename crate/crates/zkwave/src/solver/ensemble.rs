//! Monte-Carlo ensembles of solver runs and their per-mode statistics.
//!
//! Members are evaluated in parallel in fixed-size batches; statistics are
//! then accumulated sequentially in member order, so results are bitwise
//! identical for any number of worker threads.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrator::{Integrator, SolverConfig};
use crate::error::{Error, Result};
use crate::initial_data::{sample_initial_data, LatticeProfile, SeededGaussianSource};
use crate::lattice::{IVec, ModeSet, SpectralField};

const BATCH: usize = 64;

/// Streaming mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnsembleStats {
    pub modes: Arc<ModeSet>,
    pub acc: Vec<Welford>,
    pub members: u64,
    pub seed: u64,
    pub time: f64,
    pub config_digest: String,
}

impl EnsembleStats {
    pub fn new(modes: Arc<ModeSet>, seed: u64, time: f64) -> EnsembleStats {
        let acc = vec![Welford::default(); modes.len()];
        EnsembleStats { modes, acc, members: 0, seed, time, config_digest: String::new() }
    }

    /// Add one member's |ψ_k|².
    pub fn push(&mut self, power: &[f64]) {
        for (a, &p) in self.acc.iter_mut().zip(power) {
            a.push(p);
        }
        self.members += 1;
    }

    pub fn mean(&self, k: IVec) -> Option<f64> {
        self.modes.index_of(k).map(|i| self.acc[i].mean)
    }

    pub fn std_error(&self, k: IVec) -> Option<f64> {
        self.modes.index_of(k).map(|i| self.acc[i].std_error())
    }
}

/// |ψ_k|² of one member at `t_final`.
pub fn member_power(
    integ: &Integrator,
    profile: &LatticeProfile,
    master_seed: u64,
    member: u64,
    t_final: f64,
) -> Result<Vec<f64>> {
    let xi = sample_initial_data(profile, &SeededGaussianSource::new(master_seed, member));
    let mut ws = integ.workspace();
    let psi = integ
        .evolve(&xi, t_final, &mut ws)
        .map_err(|e| Error::Numerical(format!("member {member}: {e}")))?;
    Ok(psi.values.iter().map(|v| v.norm_sqr()).collect())
}

/// Sample, evolve and accumulate `members` ensemble members. Runs on the
/// current rayon pool.
pub fn ensemble_spectrum(
    profile: &LatticeProfile,
    cfg: &SolverConfig,
    members: u64,
    master_seed: u64,
    t_final: f64,
) -> Result<EnsembleStats> {
    ensemble_with(profile, cfg, members, master_seed, t_final, |_, _| Ok(()))
}

/// As [`ensemble_spectrum`], also handing each member's final field to `sink`
/// in member order (for checkpoints).
pub fn ensemble_with(
    profile: &LatticeProfile,
    cfg: &SolverConfig,
    members: u64,
    master_seed: u64,
    t_final: f64,
    mut sink: impl FnMut(u64, &SpectralField) -> Result<()>,
) -> Result<EnsembleStats> {
    if members < 2 {
        return Err(Error::param("M", "an ensemble needs at least two members"));
    }
    let integ = Integrator::new(cfg, profile.modes.clone())?;
    let mut stats = EnsembleStats::new(profile.modes.clone(), master_seed, t_final);
    let mut start = 0u64;
    while start < members {
        let end = (start + BATCH as u64).min(members);
        let batch: Vec<Result<SpectralField>> = (start..end)
            .into_par_iter()
            .map(|m| {
                let xi = sample_initial_data(profile, &SeededGaussianSource::new(master_seed, m));
                let mut ws = integ.workspace();
                integ.evolve(&xi, t_final, &mut ws).map_err(|e| Error::Numerical(format!("member {m}: {e}")))
            })
            .collect();
        for (m, r) in (start..end).zip(batch) {
            let field = r?;
            sink(m, &field)?;
            let power: Vec<f64> = field.values.iter().map(|v| v.norm_sqr()).collect();
            stats.push(&power);
        }
        start = end;
    }
    Ok(stats)
}
