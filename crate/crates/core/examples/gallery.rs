//! The generators: power-law, condensing and periodic spectra with their perturbations.

use eigencount::gallery::{self, FrequencyMapping, Symbol};
use eigencount::operator::fit_subordination;
use eigencount::DiagonalOperator;

fn main() -> eigencount::Result<()> {
    for alpha in [0.5, 1.0, 2.0] {
        let s = gallery::gen_power_spectrum(alpha, 128)?;
        println!(
            "power alpha = {alpha}: l = {}, estimated alpha = {:.3}",
            s.noncondensing_l(alpha),
            s.estimate_alpha()?
        );
    }
    for m in [64, 128, 256] {
        println!("condensing M = {m}: l = {}", gallery::gen_condensing_spectrum(m)?.noncondensing_l(1.0));
    }
    let t = DiagonalOperator::new(gallery::gen_power_spectrum(1.0, 64)?);
    let h = gallery::gen_hermitian_perturbation(&t, 0.2, 0.1, 1);
    println!("hermitian B: {}, fitted b = {:.6}", h.entries().is_hermitian(1e-14), fit_subordination(&h, &t, 0.2)?.b);
    for mapping in [FrequencyMapping::PositiveHalf, FrequencyMapping::Folded] {
        let ex = gallery::build_periodic_example(16, mapping, Symbol::LogSingular)?;
        println!("{mapping:?}: first eigenvalues {:?}, frequencies {:?}", &ex.t.values()[..5], &ex.frequencies[..5]);
    }
    Ok(())
}
