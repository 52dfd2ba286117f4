//! Decompose a couple into one-node pieces and report each step.
use zkwave::diagrams::*;

fn main() -> zkwave::Result<()> {
    let t = BinaryTree::parse("[[*,*],[*,*]]")?;
    let t2 = BinaryTree::parse("[*,*]")?;
    let c = enumerate_pairings(&t, &t2)?
        .iter()
        .map(|p| build_couple(&t, &t2, p))
        .collect::<zkwave::Result<Vec<_>>>()?
        .into_iter()
        .find(|c| c.is_connected() && !c.has_self_loop() && c.zero_momentum_edge().is_none())
        .expect("an admissible couple");
    println!("couple with {} nodes, χ = {}", c.n(), c.chi());

    let trace = cutting_algorithm(&c)?;
    println!("freed leg {:?}", trace.freed_leg);
    for s in &trace.steps {
        println!(
            "step {}: leg {} at node {}, {:?}, isolated {:?}, {} remaining pieces",
            s.index,
            s.leg,
            s.node,
            s.case,
            s.isolated_kind,
            s.rest.len()
        );
    }
    println!("{} terminal pieces, {} violations", trace.terminals.len(), trace.violations.len());
    Ok(())
}
