//! Counting functions, density exponent and the ψ decomposition of a spectrum.

use eigencount::gallery;

fn main() -> eigencount::Result<()> {
    let s = gallery::gen_condensing_spectrum(200)?;
    let alpha = s.alpha()?;
    println!("M = {}, declared alpha = {alpha}, estimated = {:.3}", s.len(), s.estimate_alpha()?);
    println!("non-condensing l = {}", s.noncondensing_l(alpha));
    for r in [10.0, 50.0, 100.0, 200.0] {
        println!("n({r}) = {:>3}   S_0({r}) with a = 1: {}", s.count(r), s.window_count(r, 1.0, 0.0));
    }
    let check = s.psi_decompose(alpha).check_grid(10_000);
    println!(
        "psi: max |psi - n| = {:.3}, slopes in [{}, {}], {} violations",
        check.max_gap, check.min_slope, check.max_slope, check.violations
    );
    Ok(())
}
