//! Binary trees, leaf pairings and the couples glued from them.
use zkwave::diagrams::*;

fn main() -> zkwave::Result<()> {
    for l in 0..=5 {
        println!("l = {l}: {} trees", trees_with_branches(l).len());
    }
    let t = BinaryTree::parse("[[*,*],*]")?;
    let t2 = BinaryTree::parse("[*,[*,*]]")?;
    println!("T = {t} ({} leaves), T′ = {t2} ({} leaves)", t.leaf_count(), t2.leaf_count());

    let pairings = enumerate_pairings(&t, &t2)?;
    println!("{} admissible pairings", pairings.len());
    for p in pairings.iter().take(3) {
        let c = build_couple(&t, &t2, &p)?;
        println!(
            "  crossings {}: n = {}, internal {}, fixed legs {}, free legs {}, χ = {}, connected {}",
            p.cross_count(),
            c.n(),
            c.n_internal(),
            c.n_fixed(),
            c.n_free(),
            c.chi(),
            c.is_connected()
        );
    }
    Ok(())
}
