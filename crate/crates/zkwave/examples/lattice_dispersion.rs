//! Lattice ball, dispersion and the integer resonance phase.
use zkwave::lattice::*;

fn main() -> zkwave::Result<()> {
    let spec = LatticeSpec::new(3, 8.0, 0.5)?;
    let modes = ModeSet::new(&spec);
    println!("d = 3, L = 8, R = 0.5: {} modes, |K|∞ ≤ {}", modes.len(), spec.kmax());

    let (k1, k2) = (IVec::from_slice(&[1, 2, 0]), IVec::from_slice(&[2, -1, 1]));
    let k = k1 + k2;
    println!("Λ(k1) = {:.6}, Λ(k2) = {:.6}, Λ(k) = {:.6}", spec.lambda(k1), spec.lambda(k2), spec.lambda(k));
    // L³Ω is an integer: resonance tests are exact.
    println!("Ω = {:.6}, L³Ω = {}", spec.omega(k1, k2, k), omega_int(k1, k2, k));

    // Anisotropic dispersion k_x(β·|k|²) on real vectors.
    let beta = Anisotropy::new(&[1.0, 1.5, 1.25])?;
    let w = WaveVector::new(&[0.25, 0.5, -0.125]);
    println!("Λ_β(k) = {:.6}", dispersion(&w, &beta)?);
    Ok(())
}
