//! Time-windowed resonance sums against their continuum limit as L grows.
use zkwave::counting::*;
use zkwave::quadrature::CoareaResolution;

fn bump(x: &[f64], c: &[f64], r: f64) -> f64 {
    let s = x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / (r * r);
    if s >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s)).exp()
    }
}

fn main() -> zkwave::Result<()> {
    let k = [1.0, 0.5, 0.0];
    let center = [0.5, 0.9, 0.0];
    let support = SupportBox::around(&center, 0.4);
    let res = CoareaResolution { slice_count: 64, sphere_order: 16 };
    for l in [8.0, 16.0, 32.0] {
        let r = resonance_sum_asymptotics(&fejer_kernel(), |x| bump(x, &center, 0.4), &support, &k, 8.0, l, res)?;
        println!(
            "L = {l}: sum {:.5e}, prediction {:.5e}, |difference|/L² {:.3e} ({} points)",
            r.lattice_sum, r.prediction, r.remainder_ratio, r.points
        );
    }
    Ok(())
}
