//! Resonance counts for one node and for a two-node couple.
use zkwave::counting::*;
use zkwave::diagrams::*;
use zkwave::lattice::*;

fn main() -> zkwave::Result<()> {
    for l in [8.0, 16.0, 32.0] {
        let spec = LatticeSpec::new(3, l, 1.0)?;
        let q = ResonanceQuery::new(IVec::from_slice(&[1, 0, 0]), 0.0, l, spec, Anisotropy::isotropic(3))?;
        let r = verify_onenode_bound(&q, 0.1)?;
        println!("L = {l}: {} resonant pairs, bound {:.1}, ratio {:.3}", r.count, r.bound, r.ratio);
    }

    // Couple from [*,*] fully cross-paired with itself; both roots carry k.
    let t = BinaryTree::parse("[*,*]")?;
    let pairings = enumerate_pairings(&t, &t)?;
    let p = pairings.iter().max_by_key(|p| p.cross_count()).unwrap();
    let c = build_couple(&t, &t, p)?;
    let spec = LatticeSpec::new(3, 6.0, 1.0)?;
    let k = IVec::from_slice(&[2, 1, 0]);
    let mut sys = CoupleEquationSystem::new(c, spec, 6.0);
    for leg in sys.couple.legs().filter(|e| e.leg == Some(LegState::Fixed)).map(|e| e.id).collect::<Vec<_>>() {
        sys = sys.with_fixed(leg, k);
    }
    println!("two-node couple at k = {k:?}: {} solutions", brute_force_eq(&sys)?);
    Ok(())
}
