//! Lattice sum of a smooth function against its integral plus boundary
//! corrections, in one to three dimensions.
use zkwave::counting::*;

fn main() -> zkwave::Result<()> {
    for dim in 1..=3 {
        let r = euler_maclaurin_check(&ProductFunction::gaussian(dim, 1.0))?;
        println!(
            "d = {dim}: sum {:.12}, integral {:.12}, correction {:+.3e}, residual {:.1e} over {} cells",
            r.lattice_sum, r.integral, r.correction, r.residual, r.cells
        );
    }
    Ok(())
}
