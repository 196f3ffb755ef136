//! Samples `W(λ)` across the strip around `r` after opening the lacuna.

use eigencount::gallery;
use eigencount::lacuna::LacunaPlan;
use eigencount::resolvent::{self, ResolventField, SamplingPlan, TailModel};
use eigencount::{DiagonalOperator, SubordinationProfile};

fn main() -> eigencount::Result<()> {
    let b = 0.1;
    let a = 48.0 * b * b;
    let t = DiagonalOperator::new(gallery::gen_power_spectrum(1.0, 256)?);
    let prof = SubordinationProfile { beta: 0.0, b };
    let pert = gallery::gen_random_perturbation(&t, 0.0, b, 1);
    let field = ResolventField::from_operator(&t, &pert)?.with_tail(TailModel::for_operator(&t, &prof)?);
    println!("strip threshold for a = {a}: r >= {:.3}", resolvent::strip_threshold(a, 0.0)?);
    for r in [5.0, 40.0, 100.5] {
        let plan = LacunaPlan::build(t.spectrum(), r, a, 0.0);
        let shifted = field.with_values(plan.shifted_spectrum.clone())?;
        let rep = resolvent::strip_bound_check(&plan.strip(), &shifted, &prof, 1, &SamplingPlan::default())?;
        println!(
            "r = {r:>6}: {} samples, max W = {:.4} at {:?}, pass = {}",
            rep.samples.len(),
            rep.max_value,
            rep.argmax_lambda,
            rep.pass
        );
    }
    Ok(())
}
