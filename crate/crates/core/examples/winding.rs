//! Counts eigenvalues through the argument principle and checks the identity
//! `n(A) = n(T_r + B) + ν` inside the contour.

use eigencount::gallery;
use eigencount::lacuna::{self, ContourOptions, LacunaSetup};
use eigencount::resolvent::SamplingPlan;
use eigencount::{DiagonalOperator, SubordinationProfile};

fn main() -> eigencount::Result<()> {
    let t = DiagonalOperator::new(gallery::gen_power_spectrum(1.0, 160)?);
    let prof = SubordinationProfile { beta: 0.0, b: 0.1 };
    let b = gallery::gen_random_perturbation(&t, 0.0, prof.b, 11);
    let setup = LacunaSetup { a: 1.0, gamma_eff: 0.0, l: 1, h: 16.0 };
    for r in [12.5, 40.5, 70.5] {
        let rep = lacuna::wa_check_nudged(
            &t,
            &b,
            &prof,
            r,
            &setup,
            None,
            &SamplingPlan::default(),
            &ContourOptions::default(),
        )?;
        println!(
            "r = {r}: R = {}, N = {}, n_A = {} = {} + {} ({}), {} contour points",
            rep.radius,
            rep.rank_n,
            rep.n_a,
            rep.n_trb,
            rep.nu,
            if rep.pass { "ok" } else { "MISMATCH" },
            rep.contour_points
        );
    }
    Ok(())
}
