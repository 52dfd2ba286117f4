//! Torus lattice Z_L^d = {K/L : K ∈ Z^d}, wave vectors, the dispersion
//! relation Λ(k) = k_x·Σβ_i k_i² and the triad resonance phase.
//!
//! Lattice points are stored as integer vectors `K`; the physical wave vector
//! `k = K/L` is formed only when a real number is needed. All set membership
//! and momentum bookkeeping is exact integer arithmetic.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 4;

/// Default relative tolerance for real-arithmetic identity checks.
pub const IDENTITY_RTOL: f64 = 1e-12;

/// Integer lattice vector `K`; components beyond the working dimension are zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IVec(pub [i64; MAX_DIM]);

impl IVec {
    pub const ZERO: IVec = IVec([0; MAX_DIM]);

    pub fn from_slice(c: &[i64]) -> IVec {
        assert!(c.len() <= MAX_DIM, "at most {MAX_DIM} components");
        let mut v = [0; MAX_DIM];
        v[..c.len()].copy_from_slice(c);
        IVec(v)
    }

    #[inline]
    pub fn x(&self) -> i64 {
        self.0[0]
    }

    #[inline]
    pub fn norm2(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.0 == [0; MAX_DIM]
    }

    pub fn as_slice(&self, dim: usize) -> &[i64] {
        &self.0[..dim]
    }

    /// Isotropic integer dispersion K_x·|K|²; equals L³·Λ(K/L).
    #[inline]
    pub fn lambda_int(&self) -> i64 {
        self.x() * self.norm2()
    }
}

impl std::ops::Add for IVec {
    type Output = IVec;
    #[inline]
    fn add(self, o: IVec) -> IVec {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(o.0) {
            *a += b;
        }
        IVec(r)
    }
}

impl std::ops::Sub for IVec {
    type Output = IVec;
    #[inline]
    fn sub(self, o: IVec) -> IVec {
        let mut r = self.0;
        for (a, b) in r.iter_mut().zip(o.0) {
            *a -= b;
        }
        IVec(r)
    }
}

impl std::ops::Neg for IVec {
    type Output = IVec;
    #[inline]
    fn neg(self) -> IVec {
        IVec(self.0.map(|c| -c))
    }
}

impl std::ops::Mul<i64> for IVec {
    type Output = IVec;
    #[inline]
    fn mul(self, s: i64) -> IVec {
        IVec(self.0.map(|c| c * s))
    }
}

/// Integer resonance phase L³·Ω(K1/L, K2/L, K/L) for the isotropic dispersion.
#[inline]
pub fn omega_int(k1: IVec, k2: IVec, k: IVec) -> i64 {
    k1.lambda_int() + k2.lambda_int() - k.lambda_int()
}

/// A real wave vector `k`; the first component is `k_x`, the rest `k_⊥`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveVector(pub Vec<f64>);

impl WaveVector {
    pub fn new(c: &[f64]) -> WaveVector {
        WaveVector(c.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn kx(&self) -> f64 {
        self.0[0]
    }

    pub fn perp(&self) -> &[f64] {
        &self.0[1..]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn neg(&self) -> WaveVector {
        WaveVector(self.0.iter().map(|c| -c).collect())
    }

    /// The integer vector `K = kL` if every component is within `1e-12/L` of `Z/L`.
    pub fn to_lattice(&self, spec: &LatticeSpec) -> Result<IVec> {
        check_dim(spec.dim, self.dim())?;
        let mut out = [0i64; MAX_DIM];
        for (i, c) in self.0.iter().enumerate() {
            let scaled = c * spec.size;
            let r = scaled.round();
            if (scaled - r).abs() > IDENTITY_RTOL * spec.size.max(1.0) {
                return Err(Error::param("k", format!("component {i} = {c} is not on Z_L^d with L = {}", spec.size)));
            }
            out[i] = r as i64;
        }
        Ok(IVec(out))
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Coefficients β of the anisotropic dispersion (Σβ_i k_i²)·k_x, each in [1,2].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anisotropy {
    beta: Vec<f64>,
}

impl Anisotropy {
    pub fn new(beta: &[f64]) -> Result<Anisotropy> {
        if beta.is_empty() || beta.len() > MAX_DIM {
            return Err(Error::param("beta", format!("length must be in 1..={MAX_DIM}")));
        }
        if let Some(b) = beta.iter().find(|b| !(1.0..=2.0).contains(*b)) {
            return Err(Error::param("beta", format!("component {b} outside [1,2]")));
        }
        Ok(Anisotropy { beta: beta.to_vec() })
    }

    pub fn isotropic(dim: usize) -> Anisotropy {
        Anisotropy { beta: vec![1.0; dim] }
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    pub fn is_isotropic(&self) -> bool {
        self.beta.iter().all(|&b| b == 1.0)
    }
}

/// Λ(k) = (Σ_i β_i k_i²)·k_x.
pub fn dispersion(k: &WaveVector, beta: &Anisotropy) -> Result<f64> {
    check_dim(beta.dim(), k.dim())?;
    let q: f64 = k.0.iter().zip(&beta.beta).map(|(c, b)| b * c * c).sum();
    Ok(q * k.kx())
}

/// Ω(k1,k2,k) = Λ(k1)+Λ(k2)−Λ(k).
pub fn resonance_phase(k1: &WaveVector, k2: &WaveVector, k: &WaveVector, beta: &Anisotropy) -> Result<f64> {
    check_dim(k1.dim(), k2.dim())?;
    check_dim(k1.dim(), k.dim())?;
    Ok(dispersion(k1, beta)? + dispersion(k2, beta)? - dispersion(k, beta)?)
}

/// S(k1,k2,k) = k1+k2−k.
pub fn momentum_defect(k1: &WaveVector, k2: &WaveVector, k: &WaveVector) -> Result<WaveVector> {
    check_dim(k1.dim(), k2.dim())?;
    check_dim(k1.dim(), k.dim())?;
    Ok(WaveVector(k1.0.iter().zip(&k2.0).zip(&k.0).map(|((a, b), c)| a + b - c).collect()))
}

/// Torus discretization: dimension, period `L` and the enumeration radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dim: usize,
    pub size: f64,
    pub radius: f64,
}

impl LatticeSpec {
    pub fn new(dim: usize, size: f64, radius: f64) -> Result<LatticeSpec> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::param("dim", format!("must be in 1..={MAX_DIM}, got {dim}")));
        }
        if !(size > 0.0 && size.is_finite()) {
            return Err(Error::param("L", format!("must be positive, got {size}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param("radius", format!("must be positive, got {radius}")));
        }
        Ok(LatticeSpec { dim, size, radius })
    }

    /// Same torus, different enumeration radius.
    pub fn with_radius(&self, radius: f64) -> Result<LatticeSpec> {
        LatticeSpec::new(self.dim, self.size, radius)
    }

    /// Largest `|K|²` inside the ball `|k| ≤ radius`.
    pub fn max_norm2(&self) -> i64 {
        let r = self.radius * self.size;
        (r * r * (1.0 + 1e-12) + 1e-9).floor() as i64
    }

    /// Largest integer component magnitude inside the ball.
    pub fn kmax(&self) -> i64 {
        (self.max_norm2() as f64).sqrt().floor() as i64
    }

    #[inline]
    pub fn contains(&self, k: IVec) -> bool {
        k.norm2() <= self.max_norm2()
    }

    pub fn wave_vector(&self, k: IVec) -> WaveVector {
        WaveVector(k.0[..self.dim].iter().map(|&c| c as f64 / self.size).collect())
    }

    #[inline]
    pub fn kx(&self, k: IVec) -> f64 {
        k.x() as f64 / self.size
    }

    #[inline]
    pub fn norm2(&self, k: IVec) -> f64 {
        k.norm2() as f64 / (self.size * self.size)
    }

    /// Λ(K/L) for the isotropic dispersion.
    #[inline]
    pub fn lambda(&self, k: IVec) -> f64 {
        k.lambda_int() as f64 / self.size.powi(3)
    }

    /// Ω(K1/L, K2/L, K/L) for the isotropic dispersion; exactly zero on exact resonances.
    #[inline]
    pub fn omega(&self, k1: IVec, k2: IVec, k: IVec) -> f64 {
        omega_int(k1, k2, k) as f64 / self.size.powi(3)
    }

    /// Λ(K/L) with anisotropy coefficients.
    #[inline]
    pub fn lambda_beta(&self, k: IVec, beta: &Anisotropy) -> f64 {
        let q: f64 = (0..self.dim).map(|i| beta.beta[i] * (k.0[i] * k.0[i]) as f64).sum();
        q * k.x() as f64 / self.size.powi(3)
    }
}

/// All lattice points with `|K| ≤ radius·L`, lexicographic order.
pub fn lattice_ball_points(spec: &LatticeSpec) -> Vec<IVec> {
    let m = spec.kmax();
    let r2 = spec.max_norm2();
    let mut out = Vec::new();
    let mut cur = [0i64; MAX_DIM];
    fn rec(axis: usize, dim: usize, m: i64, r2: i64, acc: i64, cur: &mut [i64; MAX_DIM], out: &mut Vec<IVec>) {
        if axis == dim {
            out.push(IVec(*cur));
            return;
        }
        for c in -m..=m {
            let a = acc + c * c;
            if a > r2 {
                continue;
            }
            cur[axis] = c;
            rec(axis + 1, dim, m, r2, a, cur, out);
        }
        cur[axis] = 0;
    }
    rec(0, spec.dim, m, r2, 0, &mut cur, &mut out);
    out
}

/// [`lattice_ball_points`] as physical wave vectors.
pub fn lattice_ball(spec: &LatticeSpec) -> Vec<WaveVector> {
    lattice_ball_points(spec).into_iter().map(|k| spec.wave_vector(k)).collect()
}

/// The lattice ball with O(1) point → index lookup.
#[derive(Debug)]
pub struct ModeSet {
    spec: LatticeSpec,
    points: Vec<IVec>,
    kmax: i64,
    side: usize,
    table: Vec<u32>,
    neg: Vec<usize>,
}

const ABSENT: u32 = u32::MAX;

impl ModeSet {
    pub fn new(spec: &LatticeSpec) -> ModeSet {
        let points = lattice_ball_points(spec);
        let kmax = spec.kmax();
        let side = (2 * kmax + 1) as usize;
        let mut table = vec![ABSENT; side.pow(spec.dim as u32)];
        let mut set = ModeSet { spec: spec.clone(), points, kmax, side, table: Vec::new(), neg: Vec::new() };
        for (i, p) in set.points.iter().enumerate() {
            table[set.slot(*p).expect("ball point within cube")] = i as u32;
        }
        set.table = table;
        set.neg = set.points.iter().map(|p| set.index_of(-*p).expect("ball is symmetric")).collect();
        set
    }

    pub fn shared(spec: &LatticeSpec) -> Arc<ModeSet> {
        Arc::new(ModeSet::new(spec))
    }

    #[inline]
    fn slot(&self, k: IVec) -> Option<usize> {
        let mut s = 0usize;
        for i in 0..self.spec.dim {
            let c = k.0[i];
            if c < -self.kmax || c > self.kmax {
                return None;
            }
            s = s * self.side + (c + self.kmax) as usize;
        }
        if k.0[self.spec.dim..].iter().any(|&c| c != 0) {
            return None;
        }
        Some(s)
    }

    #[inline]
    pub fn index_of(&self, k: IVec) -> Option<usize> {
        let s = self.slot(k)?;
        match self.table[s] {
            ABSENT => None,
            i => Some(i as usize),
        }
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn points(&self) -> &[IVec] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of `−K` for the point at index `i`.
    #[inline]
    pub fn neg_index(&self, i: usize) -> usize {
        self.neg[i]
    }
}

/// Complex amplitudes on a lattice ball at a given time.
#[derive(Clone, Debug)]
pub struct SpectralField {
    pub modes: Arc<ModeSet>,
    pub values: Vec<Complex64>,
    pub time: f64,
}

impl SpectralField {
    pub fn zeros(modes: Arc<ModeSet>, time: f64) -> SpectralField {
        let n = modes.len();
        SpectralField { modes, values: vec![Complex64::new(0.0, 0.0); n], time }
    }

    pub fn spec(&self) -> &LatticeSpec {
        self.modes.spec()
    }

    /// Amplitude at `K`, zero outside the stored ball.
    pub fn get(&self, k: IVec) -> Complex64 {
        self.modes.index_of(k).map(|i| self.values[i]).unwrap_or_default()
    }

    pub fn set(&mut self, k: IVec, v: Complex64) -> Result<()> {
        let i = self
            .modes
            .index_of(k)
            .ok_or_else(|| Error::param("k", format!("{:?} outside the lattice ball", k.as_slice(self.spec().dim))))?;
        self.values[i] = v;
        Ok(())
    }

    /// max_k |ψ_{−k} − conj ψ_k|.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.values.len())
            .map(|i| (self.values[self.modes.neg_index(i)] - self.values[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.sup_norm().max(1.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Σ_k |ψ_k|².
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scaled(&self, c: f64) -> SpectralField {
        SpectralField { modes: self.modes.clone(), values: self.values.iter().map(|v| v * c).collect(), time: self.time }
    }

    pub fn same_lattice(&self, other: &SpectralField) -> Result<()> {
        if Arc::ptr_eq(&self.modes, &other.modes) || self.modes.spec() == other.modes.spec() {
            Ok(())
        } else {
            Err(Error::param("field", "fields live on different lattices"))
        }
    }
}
