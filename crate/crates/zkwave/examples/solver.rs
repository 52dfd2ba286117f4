//! Integrate one realization with the exponential integrator.
use zkwave::expansion::ModelParams;
use zkwave::initial_data::*;
use zkwave::lattice::*;
use zkwave::solver::*;

fn main() -> zkwave::Result<()> {
    let spec = LatticeSpec::new(2, 16.0, 1.0)?;
    let profile = LatticeProfile::new(&smooth_bump(2, 1.0, 1.0, 0.0)?, ModeSet::shared(&spec), ZeroMode::Zero)?;
    let params = ModelParams::from_alpha(0.1, 0.0, 16.0, 2)?;
    let cfg = SolverConfig::new(spec, params, 0.01)?;
    println!("grid {}², T_kin = {:.3}", cfg.grid_size(), params.t_kin());

    let xi = sample_initial_data(&profile, &SeededGaussianSource::new(1, 0));
    for t in [0.5, 1.0, 2.0] {
        let u = evolve(&xi, t, &cfg)?;
        // ν = 0: the L² norm is conserved.
        println!("t = {t}: relative energy drift {:.2e}", (u.energy() - xi.energy()).abs() / xi.energy());
    }
    Ok(())
}
