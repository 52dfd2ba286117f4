//! Randomized initial data ξ_k = √n_in(k)·η_k and the envelopes n_in.
//!
//! Draws are counter based: the Gaussian attached to the orbit {K, −K} of
//! ensemble member `m` depends only on `(master_seed, m, orbit id)`, never on
//! evaluation order or thread count.
//!
//! Splitting rule: the member key is SHA-256 of
//! `b"zkwave/member" ‖ master_seed (LE) ‖ member_index (LE)`, used as a
//! ChaCha20 seed; each orbit reads its own ChaCha20 stream (stream id = the
//! packed orbit representative) from word position 0.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{IVec, LatticeSpec, ModeSet, SpectralField, WaveVector, MAX_DIM};

/// Shape of the envelope n_in.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileForm {
    /// `amplitude·exp(−1/(1−r²))` in the radial variable
    /// `r = (|k| − center_radius)/(D/2 − center_radius)`.
    SmoothBump { amplitude: f64, center_radius: f64 },
    /// Explicit values on the lattice `Z_L^d` with the given `L`.
    Table { size: f64, values: HashMap<IVec, f64> },
}

/// Even, compactly supported, nonnegative envelope n_in(k).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumProfile {
    pub dim: usize,
    pub diameter: f64,
    pub form: ProfileForm,
}

/// C^∞ bump of diameter `d_support`: a ball when `center_radius = 0`, otherwise
/// an annulus around |k| = center_radius (which must then be at least D/4).
pub fn smooth_bump(dim: usize, d_support: f64, amplitude: f64, center_radius: f64) -> Result<SpectrumProfile> {
    if !(d_support > 0.0) {
        return Err(Error::param("D", format!("must be positive, got {d_support}")));
    }
    if !(amplitude >= 0.0) {
        return Err(Error::param("amplitude", format!("must be nonnegative, got {amplitude}")));
    }
    // An annulus must stay away from the origin, where |k| is not smooth.
    if !(center_radius == 0.0 || (center_radius >= d_support / 4.0 && center_radius < d_support / 2.0)) {
        return Err(Error::param("center_radius", format!("must be 0 or lie in [D/4, D/2), got {center_radius}")));
    }
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::param("dim", format!("must be in 1..={MAX_DIM}")));
    }
    Ok(SpectrumProfile { dim, diameter: d_support, form: ProfileForm::SmoothBump { amplitude, center_radius } })
}

impl SpectrumProfile {
    /// Envelope given by explicit lattice values; rejects tables that are not even.
    pub fn table(dim: usize, size: f64, values: HashMap<IVec, f64>) -> Result<SpectrumProfile> {
        let mut diameter: f64 = 0.0;
        for (k, v) in &values {
            if !(*v >= 0.0) {
                return Err(Error::param("profile", "table values must be nonnegative"));
            }
            if values.get(&-*k).copied().unwrap_or(0.0) != *v {
                return Err(Error::param("profile", format!("table is not even at {:?}", k.as_slice(dim))));
            }
            if *v > 0.0 {
                diameter = diameter.max(2.0 * (k.norm2() as f64).sqrt() / size);
            }
        }
        Ok(SpectrumProfile { dim, diameter: diameter.max(f64::MIN_POSITIVE), form: ProfileForm::Table { size, values } })
    }

    /// n_in at a real wave vector.
    pub fn evaluate(&self, k: &WaveVector) -> f64 {
        match &self.form {
            ProfileForm::SmoothBump { amplitude, center_radius } => {
                let half_width = self.diameter / 2.0 - center_radius;
                let r = (k.norm() - center_radius) / half_width;
                bump(r) * amplitude
            }
            ProfileForm::Table { size, values } => match k.to_lattice(&LatticeSpec { dim: self.dim, size: *size, radius: 1.0 }) {
                Ok(kk) => values.get(&kk).copied().unwrap_or(0.0),
                Err(_) => 0.0,
            },
        }
    }

    /// n_in at the lattice point `K/L`.
    pub fn evaluate_lattice(&self, spec: &LatticeSpec, k: IVec) -> f64 {
        match &self.form {
            ProfileForm::SmoothBump { .. } => self.evaluate(&spec.wave_vector(k)),
            ProfileForm::Table { size, values } if *size == spec.size => values.get(&k).copied().unwrap_or(0.0),
            ProfileForm::Table { .. } => self.evaluate(&spec.wave_vector(k)),
        }
    }

    pub fn sup(&self) -> f64 {
        match &self.form {
            ProfileForm::SmoothBump { amplitude, .. } => amplitude * (-1.0f64).exp(),
            ProfileForm::Table { values, .. } => values.values().copied().fold(0.0, f64::max),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sup() == 0.0
    }
}

/// exp(−1/(1−r²)) on |r| < 1, zero elsewhere.
pub fn bump(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r * r)).exp()
    }
}

/// What the sampler puts on the self-conjugate mode K = 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroMode {
    /// ξ_0 = 0 (mean-zero field).
    #[default]
    Zero,
    /// ξ_0 = √n_in(0)·η with η real standard Gaussian.
    RealGaussian,
}

/// The envelope cached on a lattice ball, with the zero-mode policy applied.
/// `get(K)` is the pair covariance E[ξ_K ξ_{−K}] used by the sampler.
#[derive(Clone, Debug)]
pub struct LatticeProfile {
    pub modes: Arc<ModeSet>,
    pub values: Vec<f64>,
    pub zero_mode: ZeroMode,
}

impl LatticeProfile {
    pub fn new(profile: &SpectrumProfile, modes: Arc<ModeSet>, zero_mode: ZeroMode) -> Result<LatticeProfile> {
        crate::lattice::check_dim(modes.spec().dim, profile.dim)?;
        let spec = modes.spec().clone();
        let values = modes
            .points()
            .iter()
            .map(|&k| if k.is_zero() && zero_mode == ZeroMode::Zero { 0.0 } else { profile.evaluate_lattice(&spec, k) })
            .collect();
        Ok(LatticeProfile { modes, values, zero_mode })
    }

    #[inline]
    pub fn get(&self, k: IVec) -> f64 {
        self.modes.index_of(k).map(|i| self.values[i]).unwrap_or(0.0)
    }

    pub fn spec(&self) -> &LatticeSpec {
        self.modes.spec()
    }

    /// Lattice points carrying nonzero variance, lexicographic order.
    pub fn support(&self) -> Vec<IVec> {
        self.modes.points().iter().zip(&self.values).filter(|(_, v)| **v > 0.0).map(|(k, _)| *k).collect()
    }
}

/// Key of one ensemble member's random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeededGaussianSource {
    pub master_seed: u64,
    pub member_index: u64,
}

impl SeededGaussianSource {
    pub fn new(master_seed: u64, member_index: u64) -> SeededGaussianSource {
        SeededGaussianSource { master_seed, member_index }
    }

    fn member_key(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"zkwave/member");
        h.update(self.master_seed.to_le_bytes());
        h.update(self.member_index.to_le_bytes());
        h.finalize().into()
    }

    fn orbit_stream(&self, key: [u8; 32], orbit: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(orbit);
        rng.set_word_pos(0);
        rng
    }

    /// Complex standard Gaussian η (E|η|² = 1) for the orbit of `k`.
    pub fn complex_gaussian(&self, k: IVec) -> Complex64 {
        let (z0, z1) = box_muller(&mut self.orbit_stream(self.member_key(), orbit_id(k)));
        Complex64::new(z0, z1) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Packs the orbit representative of `K` (first nonzero component positive)
/// into 64 bits, 16 bits per axis.
pub fn orbit_id(k: IVec) -> u64 {
    let rep = orbit_representative(k);
    rep.0.iter().fold(0u64, |acc, &c| (acc << 16) | ((c + 0x8000) as u64 & 0xffff))
}

/// `K` or `−K`, whichever has its first nonzero component positive.
pub fn orbit_representative(k: IVec) -> IVec {
    match k.0.iter().find(|&&c| c != 0) {
        Some(&c) if c < 0 => -k,
        _ => k,
    }
}

fn unit_open(x: u64) -> f64 {
    // (0, 1]: never zero, so the logarithm below is finite.
    ((x >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64)
}

/// Two independent N(0,1) samples.
fn box_muller(rng: &mut ChaCha20Rng) -> (f64, f64) {
    let u1 = unit_open(rng.next_u64());
    let u2 = unit_open(rng.next_u64());
    let r = (-2.0 * u1.ln()).sqrt();
    let th = 2.0 * std::f64::consts::PI * u2;
    (r * th.cos(), r * th.sin())
}

/// ξ_K = √n_in(K)·η_K with η_{−K} = conj η_K; the origin follows the profile's zero-mode policy.
pub fn sample_initial_data(profile: &LatticeProfile, source: &SeededGaussianSource) -> SpectralField {
    let modes = profile.modes.clone();
    let mut field = SpectralField::zeros(modes.clone(), 0.0);
    let key = source.member_key();
    for (i, &k) in modes.points().iter().enumerate() {
        let n = profile.values[i];
        if k.is_zero() {
            if profile.zero_mode == ZeroMode::RealGaussian && n > 0.0 {
                let (z, _) = box_muller(&mut source.orbit_stream(key, orbit_id(k)));
                field.values[i] = Complex64::new(n.sqrt() * z, 0.0);
            }
            continue;
        }
        if orbit_representative(k) != k || n == 0.0 {
            continue;
        }
        let (z0, z1) = box_muller(&mut source.orbit_stream(key, orbit_id(k)));
        let xi = Complex64::new(z0, z1) * (n / 2.0).sqrt();
        field.values[i] = xi;
        field.values[modes.neg_index(i)] = xi.conj();
    }
    field
}
