use proptest::prelude::*;
use zkwave::lattice::*;

fn wv(c: &[f64]) -> WaveVector {
    WaveVector::new(c)
}

#[test]
fn dispersion_examples() {
    let iso = Anisotropy::isotropic(3);
    assert_eq!(dispersion(&wv(&[1.0, 2.0, 2.0]), &iso).unwrap(), 9.0);
    assert_eq!(dispersion(&wv(&[-1.0, 0.0, 0.0]), &iso).unwrap(), -1.0);
    let beta = Anisotropy::new(&[2.0, 1.0, 1.0]).unwrap();
    assert_eq!(dispersion(&wv(&[1.0, 1.0, 1.0]), &beta).unwrap(), 4.0);
    assert!(dispersion(&wv(&[1.0, 1.0]), &iso).is_err());
    assert!(Anisotropy::new(&[0.5, 1.0, 1.0]).is_err());
}

#[test]
fn resonance_phase_and_defect() {
    let iso = Anisotropy::isotropic(3);
    let k = wv(&[0.5, 0.25, -1.0]);
    let zero = wv(&[0.0, 0.0, 0.0]);
    assert_eq!(resonance_phase(&k, &zero, &k, &iso).unwrap(), 0.0);
    let d = momentum_defect(&wv(&[1.0, 0.0, 0.0]), &wv(&[1.0, 0.0, 0.0]), &wv(&[2.0, 0.0, 0.0])).unwrap();
    assert_eq!(d.0, vec![0.0; 3]);
    let d = momentum_defect(&wv(&[1.0, 2.0, 3.0]), &zero, &wv(&[1.0, 2.0, 2.0])).unwrap();
    assert_eq!(d.0, vec![0.0, 0.0, 1.0]);
    assert!(momentum_defect(&k, &wv(&[1.0]), &k).is_err());
}

#[test]
fn lattice_ball_small_cases() {
    let pts = lattice_ball(&LatticeSpec::new(1, 2.0, 1.0).unwrap());
    let xs: Vec<f64> = pts.iter().map(|p| p.0[0]).collect();
    assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    assert_eq!(lattice_ball(&LatticeSpec::new(2, 1.0, 1.0).unwrap()).len(), 5);
}

/// Independent count of integer points with |K|² ≤ R².
fn ball_count_oracle(r2: i64) -> usize {
    let r = (r2 as f64).sqrt() as i64 + 1;
    let mut n = 0;
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                if a * a + b * b + c * c <= r2 {
                    n += 1;
                }
            }
        }
    }
    n
}

#[test]
fn lattice_ball_count_matches_enumeration_oracle() {
    let spec = LatticeSpec::new(3, 4.0, 1.0).unwrap();
    let n = lattice_ball_points(&spec).len();
    assert_eq!(n, ball_count_oracle(16));
    // Frozen value of the oracle for the d=3, L=4, radius 1 ball.
    assert_eq!(n, 257);
}

#[test]
fn lattice_ball_is_lexicographic() {
    let spec = LatticeSpec::new(3, 3.0, 1.0).unwrap();
    let pts = lattice_ball_points(&spec);
    assert!(pts.windows(2).all(|w| w[0].as_slice(3) < w[1].as_slice(3)));
}

#[test]
fn membership_is_integer() {
    let spec = LatticeSpec::new(2, 8.0, 1.0).unwrap();
    assert!(wv(&[0.125, -0.5]).to_lattice(&spec).is_ok());
    assert!(wv(&[0.1, 0.0]).to_lattice(&spec).is_err());
}

#[test]
fn spectral_field_hermitian_bookkeeping() {
    let spec = LatticeSpec::new(2, 4.0, 1.0).unwrap();
    let modes = ModeSet::shared(&spec);
    let mut f = SpectralField::zeros(modes.clone(), 0.0);
    let k = IVec::from_slice(&[1, 2]);
    f.set(k, num_complex::Complex64::new(1.0, 2.0)).unwrap();
    assert!(f.hermitian_defect() > 0.0);
    f.set(-k, num_complex::Complex64::new(1.0, -2.0)).unwrap();
    assert_eq!(f.hermitian_defect(), 0.0);
    assert!(f.set(IVec::from_slice(&[9, 0]), 1.0.into()).is_err());
}

fn small_vec(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, d)
}

proptest! {
    #[test]
    fn dispersion_is_odd(k in small_vec(3), beta in prop::collection::vec(1.0f64..=2.0, 3)) {
        let b = Anisotropy::new(&beta).unwrap();
        let a = dispersion(&wv(&k), &b).unwrap();
        let m = dispersion(&wv(&k).neg(), &b).unwrap();
        prop_assert_eq!(a, -m);
    }

    #[test]
    fn phase_is_symmetric(k1 in small_vec(3), k2 in small_vec(3), k in small_vec(3)) {
        let iso = Anisotropy::isotropic(3);
        let a = resonance_phase(&wv(&k1), &wv(&k2), &wv(&k), &iso).unwrap();
        let b = resonance_phase(&wv(&k2), &wv(&k1), &wv(&k), &iso).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn phase_matches_expanded_quadratic(k1 in small_vec(3), k in small_vec(3)) {
        let iso = Anisotropy::isotropic(3);
        let k2: Vec<f64> = k.iter().zip(&k1).map(|(a, b)| a - b).collect();
        let om = resonance_phase(&wv(&k1), &wv(&k2), &wv(&k), &iso).unwrap();
        let (kx, k1x) = (k[0], k1[0]);
        let kp = &k[1..];
        let k1p = &k1[1..];
        let dot: f64 = kp.iter().zip(k1p).map(|(a, b)| a * b).sum();
        let k1p2: f64 = k1p.iter().map(|a| a * a).sum();
        let kp2: f64 = kp.iter().map(|a| a * a).sum();
        let expanded = 3.0 * kx * k1x * k1x + kx * k1p2 + 2.0 * dot * k1x - (3.0 * kx * kx + kp2) * k1x - 2.0 * kx * dot;
        let scale = 1.0 + om.abs().max(expanded.abs()) + 100.0;
        prop_assert!((om - expanded).abs() <= 1e-12 * scale);
    }

    #[test]
    fn ball_closed_under_negation(d in 1usize..=3, l in 1u32..6, r in 0.3f64..1.5) {
        let spec = LatticeSpec::new(d, l as f64, r).unwrap();
        let modes = ModeSet::new(&spec);
        for &k in modes.points() {
            prop_assert!(modes.index_of(-k).is_some());
        }
    }

    #[test]
    fn integer_phase_matches_float(a in prop::collection::vec(-6i64..6, 3), b in prop::collection::vec(-6i64..6, 3)) {
        let spec = LatticeSpec::new(3, 4.0, 10.0).unwrap();
        let (k1, k2) = (IVec::from_slice(&a), IVec::from_slice(&b));
        let k = k1 + k2;
        let exact = omega_int(k1, k2, k) as f64 / 64.0;
        prop_assert!((spec.omega(k1, k2, k) - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }
}
