//! Rank of the Riesz projector of `T_r + tB` along `t ∈ [0, 1]`.

use eigencount::gallery;
use eigencount::lacuna::{self, ContourOptions, LacunaSetup};
use eigencount::resolvent::SamplingPlan;
use eigencount::{DiagonalOperator, SubordinationProfile};

fn main() -> eigencount::Result<()> {
    let t = DiagonalOperator::new(gallery::gen_power_spectrum(1.0, 96)?);
    let prof = SubordinationProfile { beta: 0.0, b: 0.08 };
    let b = gallery::gen_random_perturbation(&t, 0.0, prof.b, 2);
    let setup = LacunaSetup { a: 1.0, gamma_eff: 0.0, l: 1, h: 16.0 };
    let r = 25.5;
    let wa =
        lacuna::wa_check_nudged(&t, &b, &prof, r, &setup, None, &SamplingPlan::default(), &ContourOptions::default())?;
    let plan = lacuna::plan_lacuna(&t, wa.r, setup.a, setup.gamma_eff, setup.l, &prof)?;
    for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let q = lacuna::riesz_rank(&plan, &b, s, wa.radius)?;
        println!("t = {s:<4}: trace = {:.9}, rank = {}, eigenvalues inside = {}", q.trace, q.rank, q.eigen_count);
    }
    Ok(())
}
