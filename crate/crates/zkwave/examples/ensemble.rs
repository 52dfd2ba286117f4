//! Ensemble-averaged spectrum with per-mode standard errors, written as JSONL
//! together with one binary checkpoint per member.
use std::fs::File;
use std::io::BufWriter;

use zkwave::driver::output::write_spectrum;
use zkwave::expansion::ModelParams;
use zkwave::initial_data::*;
use zkwave::lattice::*;
use zkwave::solver::*;

fn main() -> zkwave::Result<()> {
    let spec = LatticeSpec::new(2, 8.0, 1.0)?;
    let profile = LatticeProfile::new(&smooth_bump(2, 1.2, 1.0, 0.0)?, ModeSet::shared(&spec), ZeroMode::Zero)?;
    let cfg = SolverConfig::new(spec, ModelParams::from_alpha(0.2, 0.0, 8.0, 2)?, 0.05)?;
    let dir = std::env::temp_dir().join("zkwave-ensemble");
    std::fs::create_dir_all(&dir)?;

    let stats = ensemble_with(&profile, &cfg, 32, 5, 1.0, |m, field| {
        let mut w = BufWriter::new(File::create(dir.join(format!("member_{m:06}.bin")))?);
        write_checkpoint(&mut w, field, m, 5)
    })?;
    let k = IVec::from_slice(&[2, 1]);
    println!(
        "{} members at t = {}: ⟨|u_k|²⟩ = {:.5} ± {:.5} (n_in = {:.5})",
        stats.members,
        stats.time,
        stats.mean(k).unwrap(),
        stats.std_error(k).unwrap(),
        profile.get(k)
    );
    write_spectrum(&dir.join("spectrum.jsonl"), &stats, &profile)?;
    println!("wrote {}", dir.display());
    Ok(())
}
