//! Tree expansion of the solution and the size of its remainder in λ.
use zkwave::expansion::*;
use zkwave::initial_data::*;
use zkwave::lattice::*;

fn main() -> zkwave::Result<()> {
    let spec = LatticeSpec::new(3, 8.0, 1.0)?;
    let profile = LatticeProfile::new(&smooth_bump(3, 0.5, 1.0, 0.0)?, ModeSet::shared(&spec), ZeroMode::Zero)?;
    let xi = sample_initial_data(&profile, &SeededGaussianSource::new(3, 0));
    let grid = TimeGrid::new(0.5, 8)?;
    println!("λ        N  ‖remainder‖∞ (tree sum)");
    for lambda in [1e-3, 1e-2] {
        let params = ModelParams::for_spec(lambda, 0.0, &spec)?;
        let mut eval = TreeEvaluator::new(&xi, grid, params)?;
        for n in 0..=2 {
            println!("{lambda:<8} {n}  {:.3e}", eval.residual_tree_sum(n)?.sup_norm());
        }
    }
    Ok(())
}
