//! Seeded Gaussian initial data: Hermitian symmetry and E|ξ_k|² = n_in(k).
use zkwave::initial_data::*;
use zkwave::lattice::*;

fn main() -> zkwave::Result<()> {
    let spec = LatticeSpec::new(2, 12.0, 1.0)?;
    let n = smooth_bump(2, 1.5, 1.0, 0.0)?;
    let profile = LatticeProfile::new(&n, ModeSet::shared(&spec), ZeroMode::Zero)?;
    println!("{} modes, {} in the support", profile.modes.len(), profile.support().len());

    let xi = sample_initial_data(&profile, &SeededGaussianSource::new(7, 0));
    println!("Hermitian defect {:.1e}, energy {:.4}", xi.hermitian_defect(), xi.energy());

    // Member streams are independent of each other and of the thread count.
    let k = IVec::from_slice(&[2, 1]);
    let members = 4000;
    let mean = (0..members)
        .map(|m| sample_initial_data(&profile, &SeededGaussianSource::new(7, m)).get(k).norm_sqr())
        .sum::<f64>()
        / members as f64;
    println!("k = {k:?}: ensemble mean |ξ_k|² = {mean:.4}, n_in = {:.4}", profile.get(k));
    Ok(())
}
