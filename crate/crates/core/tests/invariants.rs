use eigencount::gallery::{self, FrequencyMapping, Symbol};
use eigencount::lacuna::{DeterminantEvaluator, LacunaPlan};
use eigencount::linalg::{self, CMatrix};
use eigencount::operator::{self, PerturbationMatrix};
use eigencount::resolvent;
use eigencount::theorem;
use eigencount::{DiagonalOperator, Spectrum, SubordinationProfile};
use num_complex::Complex64;
use proptest::prelude::*;

/// Sorted values above 1 built from positive gaps, with occasional repeats.
fn spectrum_strategy(max_len: usize) -> impl Strategy<Value = Spectrum> {
    (1.0f64..3.0, prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..2.0], 1..max_len)).prop_map(|(start, gaps)| {
        let mut x = start;
        let values = gaps
            .into_iter()
            .map(|g| {
                x += g;
                x
            })
            .collect();
        Spectrum::new(values).unwrap()
    })
}

fn power(m: usize) -> DiagonalOperator {
    DiagonalOperator::new(gallery::gen_power_spectrum(1.0, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn count_is_monotone_and_complementary(s in spectrum_strategy(60), r1 in 0.0f64..150.0, r2 in 0.0f64..150.0) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        prop_assert!(s.count(lo) <= s.count(hi));
        let above = s.values().iter().filter(|&&v| v >= hi).count();
        prop_assert_eq!(s.count(hi) + above, s.len());
        prop_assert_eq!(s.count(hi), s.values().iter().filter(|&&v| v < hi).count());
    }

    #[test]
    fn window_count_matches_direct_count(s in spectrum_strategy(60), r in 1.0f64..120.0, a in 0.05f64..3.0, gamma in 0.0f64..0.95) {
        let w = a * r.powf(gamma);
        let direct = s.values().iter().filter(|&&v| v >= r - w && v < r + w).count();
        let got = s.window_count(r, a, gamma);
        prop_assert_eq!(got, direct);
        prop_assert_eq!(got == 0, !s.values().iter().any(|&v| v >= r - w && v < r + w));
    }

    #[test]
    fn noncondensing_l_matches_windows_at_data_points(s in spectrum_strategy(80), alpha in 0.5f64..2.0) {
        let xs = s.rescaled(alpha);
        let brute = xs.iter().map(|&t| xs.iter().filter(|&&x| x > t - 1.0 && x <= t).count()).max().unwrap();
        prop_assert_eq!(s.noncondensing_l(alpha), brute);
    }

    #[test]
    fn psi_tracks_counting_function(s in spectrum_strategy(80), alpha in 0.5f64..2.0) {
        let psi = s.psi_decompose(alpha);
        let l = s.noncondensing_l(alpha) as f64;
        prop_assert!(psi.slopes.iter().all(|&k| (0.0..=l).contains(&k)));
        let xs = s.rescaled(alpha);
        let (lo, hi) = psi.domain();
        for i in 0..2000 {
            let t = lo + (hi - lo) * (i as f64 + 0.5) / 2000.0;
            let n = xs.iter().filter(|&&x| x < t).count() as f64;
            prop_assert!((psi.eval(t) - n).abs() <= l + 1e-9, "t = {}", t);
        }
        // continuity at the breakpoints
        for (i, &m) in psi.breakpoints.iter().enumerate().skip(1).take(psi.slopes.len() - 1) {
            let left = psi.knots[i - 1] + psi.slopes[i - 1] * (m - psi.breakpoints[i - 1]);
            prop_assert!((left - psi.knots[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn counting_is_scale_equivariant(s in spectrum_strategy(40), r in 0.5f64..80.0, scale in 1.01f64..5.0) {
        let scaled = Spectrum::new(s.values().iter().map(|v| v * scale).collect()).unwrap();
        let r_scaled = r * scale;
        // both comparisons are exact when no value sits on the boundary
        prop_assume!(s.values().iter().all(|&v| (v - r).abs() > 1e-9 * r));
        prop_assert_eq!(scaled.count(r_scaled), s.count(r));
    }

    #[test]
    fn resolvent_sum_symmetry_and_monotonicity(
        m in 8usize..40, beta in 0.0f64..0.45, b in 0.01f64..0.3, seed in any::<u64>(),
        sigma in -5.0f64..60.0, tau in 0.01f64..30.0, extra in 0.0f64..30.0,
    ) {
        let t = power(m);
        let pert = gallery::gen_random_perturbation(&t, beta, b, seed);
        let prof = SubordinationProfile { beta, b };
        let z = Complex64::new(sigma, tau);
        let w = resolvent::resolvent_sum(&t, &pert, Some(&prof), z).unwrap().total();
        let w_conj = resolvent::resolvent_sum(&t, &pert, Some(&prof), z.conj()).unwrap().total();
        prop_assert!((w - w_conj).abs() <= 1e-12 * w);
        let further = resolvent::resolvent_sum(&t, &pert, Some(&prof), Complex64::new(sigma, tau + extra)).unwrap().total();
        prop_assert!(further <= w * (1.0 + 1e-12));
    }

    #[test]
    fn perturbation_columns_follow_the_profile(m in 4usize..60, beta in 0.0f64..0.49, b in 0.0f64..1.0, seed in any::<u64>(), herm in any::<bool>()) {
        let t = power(m);
        let pert = if herm {
            gallery::gen_hermitian_perturbation(&t, beta, b, seed)
        } else {
            gallery::gen_random_perturbation(&t, beta, b, seed)
        };
        let prof = SubordinationProfile { beta, b };
        prop_assert!(prof.holds(&t, &pert));
        for (k, &mu) in t.values().iter().enumerate() {
            let direct = (0..m).map(|i| pert.entries()[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(direct <= b * mu.powf(beta) * (1.0 + 1e-12) + 1e-15);
        }
        if herm {
            prop_assert!(pert.entries().is_hermitian(1e-14));
        }
    }

    #[test]
    fn lacuna_clears_the_gap(s in spectrum_strategy(80), r in 2.0f64..100.0, a in 0.05f64..2.0, gamma in 0.0f64..0.9) {
        let plan = LacunaPlan::build(&s, r, a, gamma);
        let w = a * r.powf(gamma);
        prop_assert!(!plan.shifted_spectrum.iter().any(|&mu| mu > r - 2.0 * w && mu < r + 2.0 * w));
        prop_assert!(plan.strip().check_gap(&plan.shifted_spectrum).is_ok());
        let moved = s.values().iter().filter(|&&mu| mu > r - 2.0 * w && mu < r + 2.0 * w).count();
        prop_assert_eq!(plan.rank_n, moved);
    }

    #[test]
    fn binary_and_json_round_trip(m in 1usize..12, seed in any::<u64>()) {
        let t = power(m);
        let pert = gallery::gen_random_perturbation(&t, 0.3, 0.7, seed);
        let back = PerturbationMatrix::read_binary(&pert.to_binary()[..]).unwrap();
        prop_assert_eq!(&back, &pert);
        let back = PerturbationMatrix::from_json(&pert.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &pert);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn hermitian_spectra_are_real_and_weyl_close(m in 4usize..48, beta in 0.0f64..0.4, b in 0.01f64..0.5, seed in any::<u64>()) {
        let t = power(m);
        let pert = gallery::gen_hermitian_perturbation(&t, beta, b, seed);
        let eigs = operator::perturbed_eigenvalues(&t, &pert).unwrap();
        // the Frobenius norm bounds the operator norm from above
        let norm = pert.entries().frobenius_norm();
        prop_assert!(linalg::operator_norm_estimate(pert.entries(), 50) <= norm * (1.0 + 1e-12));
        for z in &eigs {
            prop_assert!(z.im.abs() <= 1e-8 * (1.0 + z.norm()));
            let nearest = t.values().iter().map(|&mu| (z.re - mu).abs()).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest <= norm * (1.0 + 1e-9));
        }
    }

    #[test]
    fn unperturbed_counts_agree(m in 2usize..64, r in 0.5f64..80.0) {
        let t = power(m);
        let eigs = operator::perturbed_eigenvalues(&t, &PerturbationMatrix::zeros(m)).unwrap();
        prop_assume!(t.values().iter().all(|&mu| (mu - r).abs() > 1e-9));
        prop_assert_eq!(operator::count_perturbed(&eigs, r), t.spectrum().count(r));
    }

    #[test]
    fn determinant_reflects_for_hermitian_b(m in 8usize..40, b in 0.01f64..0.1, seed in any::<u64>(), r in 5.0f64..30.0, sigma in -5.0f64..40.0, tau in 0.1f64..20.0) {
        let t = power(m);
        prop_assume!(r < t.spectrum().max_value());
        let pert = gallery::gen_hermitian_perturbation(&t, 0.0, b, seed);
        let plan = LacunaPlan::build(t.spectrum(), r, 1.0, 0.0);
        let eval = DeterminantEvaluator::new(&plan, &pert).unwrap();
        let z = Complex64::new(sigma, tau);
        let d = eval.eval(z).unwrap();
        let d_bar = eval.eval(z.conj()).unwrap();
        prop_assert!((d.conj() - d_bar).norm() <= 1e-9 * (1.0 + d.norm()));
    }

    #[test]
    fn sweep_records_respect_fitted_constants(m in 40usize..120, b in 0.01f64..0.1, seed in any::<u64>()) {
        let t = power(m);
        let pert = gallery::gen_random_perturbation(&t, 0.0, b, seed);
        let prof = SubordinationProfile { beta: 0.0, b };
        let grid = theorem::linear_grid(2.0, theorem::trusted_range(&t), 120);
        let rep = theorem::sweep(&t, &pert, &prof, &grid, 1.0).unwrap();
        for rec in &rep.records {
            prop_assert!(rec.deviation as f64 <= rep.fitted_c * rec.s_gamma as f64 + rep.fitted_c1 + 1e-9);
            prop_assert_eq!(rec.deviation, rec.n_t.abs_diff(rec.n_a));
        }
        prop_assert_eq!(rep.violations(rep.fitted_c, rep.fitted_c1), 0);
    }

    #[test]
    fn periodic_multiplier_is_toeplitz_and_hermitian(half in 2usize..10, mean in -2.0f64..2.0, amp in -1.5f64..1.5, folded in any::<bool>()) {
        let m = 2 * half;
        let mapping = if folded { FrequencyMapping::Folded } else { FrequencyMapping::PositiveHalf };
        let ex = gallery::build_periodic_example(m, mapping, Symbol::Cosine { mean, amplitude: amp }).unwrap();
        let entries: &CMatrix = ex.b.entries();
        prop_assert!(entries.is_hermitian(1e-9));
        for j in 0..m {
            for k in 0..m {
                let diff = ex.frequencies[j] - ex.frequencies[k];
                let expected = match diff { 0 => Complex64::new(mean, 0.0), 1 | -1 => Complex64::new(amp / 2.0, 0.0), _ => Complex64::new(0.0, 0.0) };
                prop_assert!((entries[(j, k)] - expected).norm() < 1e-9, "({}, {})", j, k);
            }
        }
        prop_assert!(ex.t.values().iter().all(|&v| v > 1.0));
    }
}

#[test]
fn fourier_coefficients_are_conjugate_symmetric_and_parseval_bounded() {
    let f = |x: f64| Symbol::LogSingular.eval(x);
    for m in [1i64, 2, 5, 17] {
        let plus = gallery::fourier_coefficient(f, m, true, 1e-10).unwrap();
        let minus = gallery::fourier_coefficient(f, -m, true, 1e-10).unwrap();
        assert!((plus.conj() - minus).norm() < 1e-8, "m = {m}");
    }
    let mult = gallery::FourierMultiplier::compute(Symbol::LogSingular, 64, 1e-10).unwrap();
    let norm = mult.l2_norm().unwrap();
    assert!(mult.parseval_partial_sum() <= norm * norm + 1e-8);
}
