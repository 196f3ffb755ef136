//! Lacuna at `r`, the finite determinant `D(λ)` and its sampled bounds.

use eigencount::gallery;
use eigencount::lacuna::{self, DeterminantEvaluator};
use eigencount::resolvent::SamplingPlan;
use eigencount::{DiagonalOperator, SubordinationProfile};
use num_complex::Complex64;

fn main() -> eigencount::Result<()> {
    let t = DiagonalOperator::new(gallery::gen_power_spectrum(1.0, 128)?);
    let prof = SubordinationProfile { beta: 0.2, b: 0.05 };
    let b = gallery::gen_random_perturbation(&t, prof.beta, prof.b, 5);
    let (a, gamma) = (0.25, 0.4);
    let plan = lacuna::plan_lacuna(&t, 30.5, a, gamma, 1, &prof)?;
    println!("window {:?}, moved indices {:?}, shift c = {:.3}", plan.window, plan.indices, plan.shift_c);

    let eval = DeterminantEvaluator::new(&plan, &b)?;
    for z in [Complex64::new(30.5, 0.0), Complex64::new(30.5, 5.0), Complex64::new(0.0, 40.0)] {
        println!("D({z}) = {:.6}", eval.eval(z)?);
    }
    let rep = lacuna::det_bounds_check(&plan, &eval, 16.0 * a, &SamplingPlan::default())?;
    println!(
        "N = {}: max |D| = {:.4} <= {}, |D(probe)| = {:.4} >= {}, max block eigenvalue {:.4}",
        rep.rank_n, rep.max_abs_d, rep.upper_bound, rep.abs_d_at_probe, rep.lower_bound, rep.max_block_eigenvalue
    );
    Ok(())
}
