use std::f64::consts::PI;

use zkwave::expansion::ModelParams;
use zkwave::initial_data::*;
use zkwave::kinetic::*;
use zkwave::lattice::*;
use zkwave::quadrature::{coarea_delta_integral, CoareaResolution};
use zkwave::solver::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn annulus(dim: usize) -> SpectrumProfile {
    smooth_bump(dim, 1.0, 1.0, 0.3).unwrap()
}

#[test]
fn kinetic_time_from_alpha() {
    let p = ModelParams::from_alpha(0.1, 0.0, 16.0, 3).unwrap();
    assert!((p.t_kin() - 3.978873577297384).abs() < 1e-12);
    assert!((p.t_kin() - 1.0 / (8.0 * PI * 0.01)).abs() < 1e-12);
    // Same time from λ and L: T_kin = L^d/(8πλ²).
    let q = ModelParams::new(0.1 * 16f64.powf(1.5), 0.0, 16.0, 3).unwrap();
    assert!(rel(q.t_kin(), 16f64.powi(3) / (8.0 * PI * q.lambda * q.lambda)) < 1e-14);
    assert!(rel(q.t_kin(), p.t_kin()) < 1e-12);
}

#[test]
fn trivial_zeros() {
    let quad = CollisionQuadrature::default();
    let zero = smooth_bump(3, 1.0, 0.0, 0.0).unwrap();
    let k = WaveVector::new(&[0.3, 0.1, 0.0]);
    assert_eq!(collision_operator(&zero, &k, &quad).unwrap().total(), 0.0);
    let n = annulus(3);
    let k0 = WaveVector::new(&[0.0, 0.3, 0.1]);
    assert_eq!(collision_operator(&n, &k0, &quad).unwrap(), CollisionValue::default());
    let moll = CollisionQuadrature { mollifier: Mollifier::Gaussian { eta: 0.1 }, ..quad };
    assert_eq!(collision_operator(&n, &k0, &moll).unwrap().total(), 0.0);
    let p = ModelParams::new(0.5, 0.0, 8.0, 3).unwrap();
    assert_eq!(kinetic_prediction(&n, &k, 0.0, &p, &quad).unwrap(), 0.0);
    assert!(kinetic_prediction(&n, &k, -1.0, &p, &quad).is_err());
}

#[test]
fn quadrature_settings_are_validated() {
    let n = annulus(3);
    let k = WaveVector::new(&[0.3, 0.1, 0.0]);
    let bad = [
        CollisionQuadrature { slice_count: 4, ..Default::default() },
        CollisionQuadrature { sphere_order: 1, ..Default::default() },
        CollisionQuadrature { mollifier: Mollifier::Gaussian { eta: 0.0 }, ..Default::default() },
    ];
    for q in bad {
        assert!(collision_operator(&n, &k, &q).is_err(), "{q:?}");
    }
    assert!(collision_operator(&n, &WaveVector::new(&[0.3, 0.1]), &CollisionQuadrature::default()).is_err());
}

#[test]
fn collision_operator_converges_under_refinement() {
    let n = annulus(3);
    let k = WaveVector::new(&[0.35, 0.2, -0.1]);
    let base = CollisionQuadrature { slice_count: 128, sphere_order: 32, mollifier: Mollifier::Exact };
    let a = collision_operator(&n, &k, &base).unwrap();
    let b = collision_operator(&n, &k, &base.refined()).unwrap();
    assert!(a.gain > 0.0 && a.loss != 0.0);
    assert!(rel(a.gain, b.gain) < 1e-4, "{a:?} vs {b:?}");
    assert!(rel(a.total(), b.total()) < 1e-4, "{a:?} vs {b:?}");
}

#[test]
fn collision_operator_is_even_in_k() {
    let n = annulus(3);
    let quad = CollisionQuadrature { slice_count: 48, sphere_order: 16, mollifier: Mollifier::Exact };
    for k in [[0.35, 0.2, -0.1], [-0.2, 0.1, 0.3], [0.45, 0.0, 0.05]] {
        let k = WaveVector::new(&k);
        let a = collision_operator(&n, &k, &quad).unwrap().total();
        let b = collision_operator(&n, &k.neg(), &quad).unwrap().total();
        assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-12), "{a} vs {b}");
    }
}

#[test]
fn gain_integral_is_symmetric_under_relabeling() {
    // ∫ a(k1)b(k−k1)δ dk1 = ∫ b(k1)a(k−k1)δ dk1 for two different profiles;
    // the slab covers both supports.
    let a = smooth_bump(3, 1.0, 1.0, 0.0).unwrap();
    let b = smooth_bump(3, 0.8, 2.0, 0.25).unwrap();
    let k = [0.3, -0.15, 0.1];
    let ev = |p: &SpectrumProfile, v: &[f64]| p.evaluate(&WaveVector::new(v));
    let shift = |v: &[f64]| -> Vec<f64> { k.iter().zip(v).map(|(x, y)| x - y).collect() };
    let res = CoareaResolution { slice_count: 128, sphere_order: 32 };
    let lhs = coarea_delta_integral(&k, 0.0, -0.5, 0.8, res, |k1| ev(&a, k1) * ev(&b, &shift(k1))).unwrap();
    let rhs = coarea_delta_integral(&k, 0.0, -0.5, 0.8, res, |k1| ev(&b, k1) * ev(&a, &shift(k1))).unwrap();
    assert!(lhs > 0.0);
    assert!(rel(lhs, rhs) < 1e-5, "{lhs} vs {rhs}");
}

#[test]
fn mollified_operator_approaches_exact_quadratically() {
    // |Ω| at the critical point k1 = k/2 is many widths away, so the mollified
    // value is smooth in η.
    let n = annulus(2);
    let k = WaveVector::new(&[0.45, 0.15]);
    let exact = collision_operator(&n, &k, &CollisionQuadrature { slice_count: 256, sphere_order: 16, mollifier: Mollifier::Exact })
        .unwrap()
        .total();
    let moll = |eta: f64| {
        let q = CollisionQuadrature { slice_count: 4 * 1200, sphere_order: 16, mollifier: Mollifier::Gaussian { eta } };
        collision_operator(&n, &k, &q).unwrap().total()
    };
    let gaps: Vec<f64> = [0.01, 0.005, 0.0025].iter().map(|&e| (moll(e) - exact).abs()).collect();
    for w in gaps.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..5.0).contains(&ratio), "gap ratio {ratio} ({gaps:?}, K = {exact})");
    }
}

fn lattice_profile(dim: usize, size: f64) -> LatticeProfile {
    let spec = LatticeSpec::new(dim, size, 0.6).unwrap();
    LatticeProfile::new(&annulus(dim), ModeSet::shared(&spec), ZeroMode::Zero).unwrap()
}

#[test]
fn n1_discrete_trivial_cases() {
    let lp = lattice_profile(3, 8.0);
    let p = ModelParams::for_spec(0.3, 0.0, lp.spec()).unwrap();
    assert_eq!(n1_discrete(&lp, IVec::from_slice(&[0, 2, 1]), 1.0, &p).unwrap(), 0.0);
    assert_eq!(n1_discrete(&lp, IVec::from_slice(&[2, 1, 0]), 0.0, &p).unwrap(), 0.0);
    let zero = LatticeProfile::new(&smooth_bump(3, 1.0, 0.0, 0.0).unwrap(), lp.modes.clone(), ZeroMode::Zero).unwrap();
    assert_eq!(n1_discrete(&zero, IVec::from_slice(&[2, 1, 0]), 1.0, &p).unwrap(), 0.0);
    let wrong = ModelParams::new(0.3, 0.0, 9.0, 3).unwrap();
    assert!(n1_discrete(&lp, IVec::from_slice(&[2, 1, 0]), 1.0, &wrong).is_err());
}

#[test]
fn n1_discrete_small_time_limit() {
    // As t → 0 every Fejér kernel tends to t², so n1/t² tends to a plain lattice sum.
    let lp = lattice_profile(3, 8.0);
    let spec = lp.spec().clone();
    let p = ModelParams::for_spec(0.3, 0.0, &spec).unwrap();
    for k in [[2, 1, 0], [-3, 0, 1], [1, 1, 1]] {
        let k = IVec::from_slice(&k);
        let kx = spec.kx(k);
        let mut gain = 0.0;
        let mut loss = 0.0;
        for &k1 in lp.modes.points() {
            gain += lp.get(k1) * lp.get(k - k1);
            loss += kx * (kx - spec.kx(k1)) * lp.get(k1) * lp.get(k);
        }
        let c = 0.09 / 8f64.powi(6);
        let limit = 2.0 * c * kx * kx * gain - 4.0 * c * loss;
        let t = 1e-3;
        let v = n1_discrete(&lp, k, t, &p).unwrap() / (t * t);
        assert!(limit != 0.0);
        assert!(rel(v, limit) < 1e-6, "{v} vs {limit}");
    }
}

#[test]
fn n1_discrete_is_even_in_k() {
    let lp = lattice_profile(3, 10.0);
    let p = ModelParams::for_spec(0.3, 0.0, lp.spec()).unwrap();
    for k in [[2, 1, 0], [-3, 0, 1], [4, -2, 1]] {
        let k = IVec::from_slice(&k);
        for t in [0.5, 3.0, 11.0] {
            let a = n1_discrete(&lp, k, t, &p).unwrap();
            let b = n1_discrete(&lp, -k, t, &p).unwrap();
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} vs {b}");
        }
    }
}

#[test]
fn z_summary_uses_nearest_rank() {
    let z: Vec<f64> = (1..=20).map(|i| if i % 2 == 0 { i as f64 } else { -(i as f64) }).collect();
    let s = z_summary(z.into_iter());
    assert_eq!(s.modes, 20);
    assert_eq!(s.median_abs_z, 10.0);
    assert_eq!(s.p95_abs_z, 19.0);
    assert_eq!(s.max_abs_z, 20.0);
    assert_eq!(z_summary(std::iter::empty()), ZSummary::default());
}

#[test]
fn free_ensemble_matches_initial_spectrum() {
    let spec = LatticeSpec::new(2, 6.0, 1.0).unwrap();
    let n = smooth_bump(2, 1.6, 1.0, 0.0).unwrap();
    let lp = LatticeProfile::new(&n, ModeSet::shared(&spec), ZeroMode::Zero).unwrap();
    let p = ModelParams::for_spec(0.0, 0.0, &spec).unwrap();
    let cfg = SolverConfig::new(spec, p, 0.1).unwrap();
    let stats = ensemble_spectrum(&lp, &cfg, 10_000, 3, 0.5).unwrap();
    let quad = CollisionQuadrature { slice_count: 16, sphere_order: 4, mollifier: Mollifier::Exact };
    let report = compare_spectra(&stats, &n, &lp, &p, &quad).unwrap();
    assert_eq!(report.members, 10_000);
    assert!(report.rows.iter().all(|r| r.n1_discrete == 0.0 && r.kinetic == 0.0));
    assert!(report.summary.max_abs_z < 4.5, "{:?}", report.summary);
}

#[test]
fn zero_profile_gives_zero_report() {
    let spec = LatticeSpec::new(2, 6.0, 1.0).unwrap();
    let n = smooth_bump(2, 1.6, 0.0, 0.0).unwrap();
    let lp = LatticeProfile::new(&n, ModeSet::shared(&spec), ZeroMode::Zero).unwrap();
    let p = ModelParams::for_spec(0.5, 0.0, &spec).unwrap();
    let cfg = SolverConfig::new(spec.clone(), p, 0.1).unwrap();
    let stats = ensemble_spectrum(&lp, &cfg, 4, 3, 0.5).unwrap();
    let report = compare_spectra(&stats, &n, &lp, &p, &CollisionQuadrature::default()).unwrap();
    for r in &report.rows {
        assert_eq!([r.mc_mean, r.mc_se, r.n_in, r.n1_discrete, r.kinetic, r.z], [0.0; 6]);
    }
    let other = LatticeProfile::new(&n, ModeSet::shared(&spec.with_radius(0.5).unwrap()), ZeroMode::Zero).unwrap();
    assert!(compare_spectra(&stats, &n, &other, &p, &CollisionQuadrature::default()).is_err());
}
