use std::sync::Arc;

use zkwave::initial_data::*;
use zkwave::lattice::{IVec, LatticeSpec, ModeSet, WaveVector};

fn lattice_profile(l: f64, amplitude: f64, zero: ZeroMode) -> LatticeProfile {
    let spec = LatticeSpec::new(3, l, 0.5).unwrap();
    let n = smooth_bump(3, 1.0, amplitude, 0.0).unwrap();
    LatticeProfile::new(&n, ModeSet::shared(&spec), zero).unwrap()
}

#[test]
fn bump_profile_basics() {
    let n = smooth_bump(3, 1.0, 1.0, 0.0).unwrap();
    // exp(−1/(1−0)) at the center.
    assert_eq!(n.evaluate(&WaveVector::new(&[0.0, 0.0, 0.0])), (-1.0f64).exp());
    assert_eq!(n.evaluate(&WaveVector::new(&[1.0, 0.0, 0.0])), 0.0);
    assert_eq!(n.evaluate(&WaveVector::new(&[0.5, 0.0, 0.0])), 0.0);
    let zero = smooth_bump(3, 1.0, 0.0, 0.0).unwrap();
    assert!(zero.is_zero());
    assert!(smooth_bump(3, 0.0, 1.0, 0.0).is_err());
    assert!(smooth_bump(3, -1.0, 1.0, 0.0).is_err());
    assert!(smooth_bump(3, 1.0, -1.0, 0.0).is_err());
}

#[test]
fn bump_at_half_radius_matches_closed_form() {
    let n = smooth_bump(2, 2.0, 3.0, 0.0).unwrap();
    let v = n.evaluate(&WaveVector::new(&[0.3, 0.4]));
    // r = 0.5: 3·exp(−1/(1 − 0.25)) = 3·exp(−4/3)
    assert!((v - 3.0 * (-4.0f64 / 3.0).exp()).abs() < 1e-15);
}

#[test]
fn annulus_profile_is_even() {
    let n = smooth_bump(3, 2.0, 1.0, 0.6).unwrap();
    assert!(smooth_bump(3, 2.0, 1.0, 0.4).is_err());
    for k in [[0.5, 0.1, 0.0], [0.0, -0.7, 0.2], [0.3, 0.3, 0.3]] {
        let a = n.evaluate(&WaveVector::new(&k));
        let b = n.evaluate(&WaveVector::new(&k).neg());
        assert_eq!(a, b);
    }
    assert_eq!(n.evaluate(&WaveVector::new(&[0.0, 0.0, 0.0])), 0.0);
}

#[test]
fn table_profile_must_be_even() {
    let mut v = std::collections::HashMap::new();
    v.insert(IVec::from_slice(&[1, 0]), 1.0);
    assert!(SpectrumProfile::table(2, 4.0, v.clone()).is_err());
    v.insert(IVec::from_slice(&[-1, 0]), 1.0);
    assert!(SpectrumProfile::table(2, 4.0, v).is_ok());
}

#[test]
fn sampling_is_deterministic_and_hermitian() {
    let p = lattice_profile(8.0, 1.0, ZeroMode::Zero);
    let a = sample_initial_data(&p, &SeededGaussianSource::new(7, 3));
    let b = sample_initial_data(&p, &SeededGaussianSource::new(7, 3));
    assert_eq!(a.values, b.values);
    assert_eq!(a.hermitian_defect(), 0.0);
    assert_eq!(a.get(IVec::ZERO), 0.0.into());
    let c = sample_initial_data(&p, &SeededGaussianSource::new(7, 4));
    assert_ne!(a.values, c.values);
}

#[test]
fn zero_profile_gives_zero_field() {
    let p = lattice_profile(8.0, 0.0, ZeroMode::RealGaussian);
    let f = sample_initial_data(&p, &SeededGaussianSource::new(1, 0));
    assert!(f.values.iter().all(|v| *v == 0.0.into()));
}

#[test]
fn real_zero_mode_policy() {
    let p = lattice_profile(8.0, 1.0, ZeroMode::RealGaussian);
    let f = sample_initial_data(&p, &SeededGaussianSource::new(5, 0));
    let z = f.get(IVec::ZERO);
    assert_eq!(z.im, 0.0);
    assert_ne!(z.re, 0.0);
}

#[test]
fn draws_do_not_depend_on_the_lattice_ball() {
    // The same orbit gets the same Gaussian whatever else is on the lattice.
    let n = smooth_bump(3, 1.0, 1.0, 0.0).unwrap();
    let small = LatticeProfile::new(&n, ModeSet::shared(&LatticeSpec::new(3, 8.0, 0.3).unwrap()), ZeroMode::Zero).unwrap();
    let large = LatticeProfile::new(&n, ModeSet::shared(&LatticeSpec::new(3, 8.0, 0.6).unwrap()), ZeroMode::Zero).unwrap();
    let src = SeededGaussianSource::new(11, 2);
    let a = sample_initial_data(&small, &src);
    let b = sample_initial_data(&large, &src);
    for &k in small.modes.points() {
        assert_eq!(a.get(k), b.get(k));
    }
}

/// Empirical moments over many members: E|ξ_k|² = n_in(k), E ξ_k ξ_k = 0,
/// E|ξ_k|⁴ = 2 n_in(k)².
#[test]
fn gaussian_moments() {
    let p = lattice_profile(4.0, 1.0, ZeroMode::Zero);
    let modes: Arc<ModeSet> = p.modes.clone();
    let k = IVec::from_slice(&[1, 0, 0]);
    let i = modes.index_of(k).unwrap();
    let n = p.values[i];
    assert!(n > 0.0);
    let m = 100_000u64;
    let (mut s2, mut s4, mut s2sq, mut sq) = (0.0, 0.0, 0.0, num_complex::Complex64::new(0.0, 0.0));
    for member in 0..m {
        let f = sample_initial_data(&p, &SeededGaussianSource::new(2024, member));
        let x = f.values[i];
        let a = x.norm_sqr();
        s2 += a;
        s2sq += a * a;
        s4 += a * a;
        sq += x * x;
    }
    let mf = m as f64;
    let mean2 = s2 / mf;
    let se2 = ((s2sq / mf - mean2 * mean2) / mf).sqrt();
    assert!((mean2 - n).abs() < 3.0 * se2, "E|xi|^2 = {mean2}, n = {n}, se = {se2}");
    let mean4 = s4 / mf;
    // Var|ξ|⁴ = E|ξ|⁸ − (E|ξ|⁴)² = 24n⁴ − 4n⁴ for a complex Gaussian.
    let se4 = (20.0 * n.powi(4) / mf).sqrt();
    assert!((mean4 - 2.0 * n * n).abs() < 4.0 * se4, "E|xi|^4 = {mean4}, 2n^2 = {}", 2.0 * n * n);
    let pseudo = sq / mf;
    assert!(pseudo.norm() < 4.0 * n / mf.sqrt());
}
