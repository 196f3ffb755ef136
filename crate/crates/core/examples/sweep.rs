//! Deviation `|n(r,T) − n(r,A)|` against `C S_γ(r) + C₁`, with a held-out check
//! and the growth-rate verdict.

use eigencount::gallery;
use eigencount::theorem;
use eigencount::{DiagonalOperator, SubordinationProfile};

fn main() -> eigencount::Result<()> {
    let t = DiagonalOperator::new(gallery::gen_power_spectrum(1.0, 256)?);
    for (beta, a) in [(0.0, 1.0), (0.4, 0.25)] {
        let prof = SubordinationProfile { beta, b: 0.05 };
        let b = gallery::gen_random_perturbation(&t, beta, prof.b, 3);
        let grid = theorem::linear_grid(2.5, theorem::trusted_range(&t), 400);
        let rep = theorem::sweep(&t, &b, &prof, &grid, a)?;
        let hold = theorem::holdout(&rep);
        println!(
            "beta = {beta}: gamma = {}, C = {:.4}, C1 = {:.4}, max deviation {}, holdout violations {}/{}",
            rep.gamma,
            rep.fitted_c,
            rep.fitted_c1,
            rep.max_deviation(),
            hold.violations,
            hold.tested
        );
        println!("  {:?}", theorem::corollary_check(&rep, 0.0));
    }
    Ok(())
}
