//! Gain and loss of the collision operator, and the first-order change n⁽¹⁾
//! on the lattice against (t/T_kin)·K(n) as L grows with t = L.
use zkwave::expansion::ModelParams;
use zkwave::initial_data::*;
use zkwave::kinetic::*;
use zkwave::lattice::*;

fn main() -> zkwave::Result<()> {
    let n = smooth_bump(3, 1.0, 1.0, 0.0)?;
    let quad = CollisionQuadrature { slice_count: 64, sphere_order: 16, mollifier: Mollifier::Exact };
    let k = WaveVector::new(&[0.25, 0.25, 0.0]);
    let kv = collision_operator(&n, &k, &quad)?;
    println!("K(n)(k): gain {:.6e}, loss {:.6e}, total {:.6e}", kv.gain, kv.loss, kv.total());

    for l in [8.0, 12.0, 16.0] {
        let spec = LatticeSpec::new(3, l, 1.0)?;
        let profile = LatticeProfile::new(&n, ModeSet::shared(&spec), ZeroMode::Zero)?;
        let p = ModelParams::for_spec(1.0, 0.0, &spec)?;
        let disc = n1_discrete(&profile, k.to_lattice(&spec)?, l, &p)?;
        let kin = kinetic_prediction(&n, &k, l, &p, &quad)?;
        println!("L = t = {l}: n⁽¹⁾ {disc:.6e}, kinetic {kin:.6e}, ratio {:.3}", disc / kin);
    }
    Ok(())
}
