//! Probe the norm of the linearized operator around the tree expansion.
use zkwave::diagrams::BinaryTree;
use zkwave::expansion::*;
use zkwave::initial_data::*;
use zkwave::lattice::*;

fn main() -> zkwave::Result<()> {
    let spec = LatticeSpec::new(2, 8.0, 1.0)?;
    let profile = LatticeProfile::new(&smooth_bump(2, 1.0, 1.0, 0.0)?, ModeSet::shared(&spec), ZeroMode::Zero)?;
    let xi = sample_initial_data(&profile, &SeededGaussianSource::new(2, 0));
    for lambda in [0.1, 1.0] {
        let mut eval = TreeEvaluator::new(&xi, TimeGrid::new(1.0, 8)?, ModelParams::for_spec(lambda, 0.0, &spec)?)?;
        for t in ["*", "[*,*]"] {
            let probe = probe_operator_norm(&mut eval, &BinaryTree::parse(t)?, 3, 4, 0.0, 1)?;
            println!("λ = {lambda}, T = {t}: ‖P_T‖ ≳ {:.4e}", probe.estimate);
        }
    }
    Ok(())
}
