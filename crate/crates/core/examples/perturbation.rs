//! Builds `A = T + B` with prescribed column norms and compares its spectrum with `T`.

use eigencount::gallery;
use eigencount::operator::{self, compactness_tail, fit_subordination};
use eigencount::DiagonalOperator;

fn main() -> eigencount::Result<()> {
    let t = DiagonalOperator::new(gallery::gen_power_spectrum(1.0, 96)?);
    let b = gallery::gen_random_perturbation(&t, 0.3, 0.1, 42);
    let prof = fit_subordination(&b, &t, 0.3)?;
    println!("fitted b = {:.6} at beta = {}", prof.b, prof.beta);

    let eigs = operator::perturbed_eigenvalues(&t, &b)?;
    for r in [10.5, 30.5, 60.5] {
        println!("r = {r}: n(r,T) = {}, n(r,A) = {}", t.spectrum().count(r), operator::count_perturbed(&eigs, r));
    }
    for n in [0, 20, 60] {
        let eps = compactness_tail(&t, &prof, n)?;
        println!("eps_{n} <= {:.3e} (retained {:.3e}, beyond {:.3e})", eps.total(), eps.truncated, eps.beyond);
    }
    Ok(())
}
