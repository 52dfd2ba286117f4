//! n-dimensional complex FFT on an N^d grid, built from 1-D passes per axis.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct GridFft {
    n: usize,
    dim: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridFft {
    pub fn new(n: usize, dim: usize) -> GridFft {
        let mut planner = FftPlanner::new();
        GridFft { n, dim, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn side(&self) -> usize {
        self.n
    }

    /// Unnormalized Σ_x u(x) e^{−2πi K·x/N}.
    pub fn forward(&self, buf: &mut [Complex64], line: &mut Vec<Complex64>) {
        self.run(&self.forward, buf, line);
    }

    /// Unnormalized Σ_K û(K) e^{+2πi K·x/N}.
    pub fn inverse(&self, buf: &mut [Complex64], line: &mut Vec<Complex64>) {
        self.run(&self.inverse, buf, line);
    }

    fn run(&self, plan: &Arc<dyn Fft<f64>>, buf: &mut [Complex64], line: &mut Vec<Complex64>) {
        let n = self.n;
        debug_assert_eq!(buf.len(), self.len());
        line.resize(n, Complex64::default());
        for axis in 0..self.dim {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                plan.process(buf);
                continue;
            }
            let block = stride * n;
            for base in (0..buf.len()).step_by(block) {
                for off in 0..stride {
                    for (m, v) in line.iter_mut().enumerate() {
                        *v = buf[base + off + m * stride];
                    }
                    plan.process(line);
                    for (m, v) in line.iter().enumerate() {
                        buf[base + off + m * stride] = *v;
                    }
                }
            }
        }
    }
}
