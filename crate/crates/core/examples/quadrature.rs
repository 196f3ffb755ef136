//! Adaptive Gauss-Kronrod on smooth, oscillatory and endpoint-singular integrands.

use eigencount::quadrature::{self, QuadratureOptions};
use num_complex::Complex64;

fn main() -> eigencount::Result<()> {
    let opts = QuadratureOptions::default();
    let real = |f: fn(f64) -> f64| move |x: f64| Ok(Complex64::new(f(x), 0.0));

    let smooth = quadrature::integrate(real(|x| x.exp()), 0.0, 1.0, opts)?;
    println!("int_0^1 e^x       = {:.15} (exact {:.15})", smooth.value.re, 1f64.exp() - 1.0);

    let wave = quadrature::integrate(|x| Ok(Complex64::from_polar(1.0, 30.0 * x)), 0.0, 1.0, opts)?;
    println!("int_0^1 e^(30ix)  = {:.12} using {} panels", wave.value, wave.intervals);

    let sing = quadrature::integrate_singular_left(real(|x| x.ln() / x.sqrt()), 1.0, opts)?;
    println!("int_0^1 ln x/sqrt x = {:.12} (exact -4)", sing.value.re);

    // 1/(x ln²(x/2)) is too slowly decaying to sample in x; integrate in u = ln x
    let slow = quadrature::integrate_log_left(|u| Ok(Complex64::new((u - 2f64.ln()).powi(-2), 0.0)), 1.0, opts)?;
    println!("int_0^1 dx/(x ln^2(x/2)) = {:.12} (exact {:.12})", slow.value.re, 1.0 / 2f64.ln());
    Ok(())
}
