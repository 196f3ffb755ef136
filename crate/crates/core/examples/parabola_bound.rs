//! `W(λ)` outside the parabola `|Im λ| ≤ h (Re λ)^{2β}` against `6π b² l / h`.

use eigencount::gallery;
use eigencount::resolvent::{self, ParabolaSpec, ResolventField, TailModel};
use eigencount::{DiagonalOperator, SubordinationProfile};

fn main() -> eigencount::Result<()> {
    let t = DiagonalOperator::new(gallery::gen_power_spectrum(1.0, 256)?);
    for beta in [0.0, 0.2, 0.4] {
        let prof = SubordinationProfile { beta, b: 0.05 };
        let pert = gallery::gen_random_perturbation(&t, beta, prof.b, 9);
        let field = ResolventField::from_operator(&t, &pert)?.with_tail(TailModel::for_operator(&t, &prof)?);
        for h in [10.0, 100.0] {
            let spec = ParabolaSpec::new(h, beta)?;
            let samples = spec.samples(200, 1000.0);
            let rep = resolvent::parabola_bound_check(&spec, &field, &prof, 1, &samples)?;
            println!(
                "beta = {beta}, h = {h:>5}: sigma_h = {:>8.2}, max W = {:.3e} < {:.3e}: {}",
                spec.sigma_h, rep.max_value, rep.bound, rep.pass
            );
        }
    }
    Ok(())
}
