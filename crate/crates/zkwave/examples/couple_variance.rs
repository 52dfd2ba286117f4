//! E|J_T|² from couples against a Monte Carlo estimate over samples.
use zkwave::diagrams::BinaryTree;
use zkwave::expansion::*;
use zkwave::initial_data::*;
use zkwave::lattice::*;

fn main() -> zkwave::Result<()> {
    let spec = LatticeSpec::new(3, 6.0, 0.6)?;
    let profile = LatticeProfile::new(&smooth_bump(3, 0.6, 1.0, 0.0)?, ModeSet::shared(&spec), ZeroMode::Zero)?;
    let params = ModelParams::for_spec(1.0, 0.0, &spec)?;
    let tree = BinaryTree::parse("[*,*]")?;
    let (time, k) = (1.0, IVec::from_slice(&[1, 1, 0]));
    let exact = variance_via_couples(&tree, k, time, &params, &profile)?;

    let grid = TimeGrid::new(time, 8)?;
    let i = profile.modes.index_of(k).expect("k in ball");
    let members = 2000;
    let mc = (0..members)
        .map(|m| {
            let xi = sample_initial_data(&profile, &SeededGaussianSource::new(4, m));
            Ok(TreeEvaluator::new(&xi, grid, params)?.term(&tree)?.final_field().values[i].norm_sqr())
        })
        .sum::<zkwave::Result<f64>>()?
        / members as f64;
    println!("k = {k:?}: couples {exact:.6e}, Monte Carlo ({members}) {mc:.6e}");
    Ok(())
}
