//! Multiplication by `1/(ln(x/4π)√x)` on the circle: every column of the
//! Toeplitz matrix is bounded by `‖b‖`, yet `‖B f₀‖` keeps growing.

use eigencount::gallery::{self, FrequencyMapping, Symbol};

fn main() -> eigencount::Result<()> {
    let rep = gallery::counterexample_check(
        Symbol::LogSingular,
        FrequencyMapping::PositiveHalf,
        &[32, 64, 128, 256],
        &[0.0, 0.25, 0.49],
    )?;
    println!("|b|_L2 = {:.12}, max column norm = {:.12}", rep.l2_norm, rep.max_column_norm);
    println!("{}: {:?}", rep.bf0.label, rep.bf0.sums);
    println!("  growth per doubling {:?}", rep.bf0.growth);
    for s in &rep.sobolev {
        println!("{}: growth {:?}, plateau = {}", s.label, s.growth, s.plateau);
    }
    Ok(())
}
