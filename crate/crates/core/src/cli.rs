//! Command-line front end; `main.rs` only forwards to [`main`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gallery::{self, FrequencyMapping, Symbol};
use crate::lacuna::{self, ContourOptions, DeterminantEvaluator, LacunaPlan, LacunaSetup};
use crate::operator::{self, DiagonalOperator, PerturbationMatrix, SubordinationProfile};
use crate::resolvent::{self, ParabolaSpec, ResolventField, SamplingPlan, TailModel};
use crate::scenario;
use crate::theorem::{self, CorollaryVerdict};

#[derive(Debug, Parser)]
#[command(name = "eigencount", version, about = "Eigenvalue counts of T + B on finite truncations")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Truncation size M.
    #[arg(long, global = true, default_value_t = 128)]
    pub trunc: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count n(r,T), n(r,A) and S_γ(r) over a grid of r, fit C and C₁.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 3.0)]
        r_min: f64,
        /// Defaults to the trusted range μ_{⌈M/2⌉}.
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0.0)]
        eta: f64,
    },
    /// Sampled resolvent bounds on the strip at r and outside the parabola.
    Bounds {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        h: Option<f64>,
    },
    /// Lacuna at r, winding identity and Riesz ranks along the homotopy.
    Lacuna {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        h: Option<f64>,
    },
    /// Determinant bounds at r and the sampled contour.
    Det {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        h: Option<f64>,
    },
    /// Generate a gallery operator and write it out.
    Gallery {
        #[arg(long, value_enum, default_value_t = GalleryKind::Power)]
        kind: GalleryKind,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.05)]
        b: f64,
        #[arg(long, value_enum, default_value_t = MappingArg::PositiveHalf)]
        mapping: MappingArg,
    },
    /// Periodic multiplier: bounded columns, divergent ‖Bf₀‖.
    Counterexample {
        #[arg(long, value_enum, default_value_t = MappingArg::PositiveHalf)]
        mapping: MappingArg,
        #[arg(long, value_delimiter = ',', default_values_t = vec![64usize, 128, 256])]
        truncations: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0f64, 0.25, 0.49])]
        betas: Vec<f64>,
    },
    /// Run a JSON scenario.
    Run { config: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GalleryKind {
    Power,
    Condensing,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MappingArg {
    PositiveHalf,
    Folded,
}

impl From<MappingArg> for FrequencyMapping {
    fn from(m: MappingArg) -> Self {
        match m {
            MappingArg::PositiveHalf => FrequencyMapping::PositiveHalf,
            MappingArg::Folded => FrequencyMapping::Folded,
        }
    }
}

/// Power-law `T` with a random (or Hermitian) `B` scaled to `‖Bφ_k‖ = b μ_k^β`.
#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.05)]
    pub b: f64,
    /// Window constant; defaults to 96 l b² (1 when b = 0).
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub hermitian: bool,
}

struct Model {
    t: DiagonalOperator,
    b: PerturbationMatrix,
    prof: SubordinationProfile,
    alpha: f64,
    gamma: f64,
    l: usize,
    a: f64,
}

impl ModelArgs {
    fn build(&self, m: usize, seed: u64) -> Result<Model> {
        let t = DiagonalOperator::new(gallery::gen_power_spectrum(self.alpha, m)?);
        let b = if self.hermitian {
            gallery::gen_hermitian_perturbation(&t, self.beta, self.b, seed)
        } else {
            gallery::gen_random_perturbation(&t, self.beta, self.b, seed)
        };
        let prof = SubordinationProfile { beta: self.beta, b: self.b };
        let l = t.spectrum().noncondensing_l(self.alpha);
        let a = self.a.unwrap_or(if self.b == 0.0 { 1.0 } else { 96.0 * l as f64 * self.b * self.b });
        let gamma = theorem::gamma_of(self.alpha, self.beta);
        if !theorem::gamma_admissible(gamma) {
            return Err(Error::HypothesisViolated(gamma));
        }
        Ok(Model { t, b, prof, alpha: self.alpha, gamma, l, a })
    }
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

/// Exit code of a finished check.
fn verdict(pass: bool) -> i32 {
    i32::from(!pass)
}

fn strip_field(m: &Model, plan: &LacunaPlan) -> Result<ResolventField> {
    let tail = TailModel::for_operator(&m.t, &m.prof)?;
    ResolventField::from_operator(&m.t, &m.b)?.with_tail(tail).with_values(plan.shifted_spectrum.clone())
}

fn execute(cli: &Cli) -> Result<i32> {
    let out = &cli.out;
    match &cli.command {
        Command::Sweep { model, r_min, r_max, count, eta } => {
            let m = model.build(cli.trunc, cli.seed)?;
            let hi = r_max.unwrap_or_else(|| theorem::trusted_range(&m.t));
            let grid = theorem::linear_grid(*r_min, hi, *count);
            let report = theorem::sweep(&m.t, &m.b, &m.prof, &grid, m.a)?;
            fs::create_dir_all(out)?;
            report.write_csv(&out.join("sweep.csv"))?;
            report.write_plot_data(&out.join("plot.csv"))?;
            fs::write(out.join("sweep.json"), report.summary_json()?)?;
            let hold = theorem::holdout(&report);
            write_json(out, "holdout.json", &hold)?;
            let cor = theorem::corollary_check(&report, *eta);
            write_json(out, "corollary.json", &cor)?;
            print_json(&serde_json::json!({
                "C": report.fitted_c, "C1": report.fitted_c1,
                "max_deviation": report.max_deviation(),
                "holdout_violations": hold.violations, "corollary": cor,
            }))?;
            Ok(verdict(hold.violations == 0 && !matches!(cor, CorollaryVerdict::Fail { .. })))
        }
        Command::Bounds { model, r, h } => {
            let m = model.build(cli.trunc, cli.seed)?;
            let h = h.unwrap_or(16.0 * m.a);
            let plan = LacunaPlan::build(m.t.spectrum(), *r, m.a, m.gamma);
            let field = strip_field(&m, &plan)?;
            let sampling = SamplingPlan::default();
            fs::create_dir_all(out)?;
            let mut strip = resolvent::strip_bound_check(&plan.strip(), &field, &m.prof, m.l, &sampling)?;
            strip.write_samples_csv(&out.join("strip_samples.csv"))?;
            fs::write(out.join("strip.json"), strip.to_json()?)?;

            let parabola = if m.alpha == 1.0 {
                ParabolaSpec::new(h, m.prof.beta)?
            } else {
                ParabolaSpec::with_exponent(h, m.gamma)?
            };
            let full = ResolventField::from_operator(&m.t, &m.b)?.with_tail(TailModel::for_operator(&m.t, &m.prof)?);
            let sigma_max = theorem::trusted_range(&m.t).max(2.0 * parabola.sigma_h);
            let mut par =
                resolvent::parabola_bound_check(&parabola, &full, &m.prof, m.l, &parabola.samples(200, sigma_max))?;
            par.write_samples_csv(&out.join("parabola_samples.csv"))?;
            fs::write(out.join("parabola.json"), par.to_json()?)?;
            print_json(&serde_json::json!({
                "strip": {"max": strip.max_value, "bound": strip.bound, "pass": strip.pass},
                "parabola": {"max": par.max_value, "bound": par.bound, "pass": par.pass},
            }))?;
            Ok(verdict(strip.pass && par.pass))
        }
        Command::Lacuna { model, r, h } => {
            let m = model.build(cli.trunc, cli.seed)?;
            let h = h.unwrap_or(16.0 * m.a);
            let plan = lacuna::plan_lacuna(&m.t, *r, m.a, m.gamma, m.l, &m.prof)?;
            let setup = LacunaSetup { a: m.a, gamma_eff: m.gamma, l: m.l, h };
            let wa = lacuna::wa_check_nudged(
                &m.t,
                &m.b,
                &m.prof,
                *r,
                &setup,
                None,
                &SamplingPlan::default(),
                &ContourOptions::default(),
            )?;
            let ranks = [0.0, 0.5, 1.0]
                .iter()
                .map(|&s| lacuna::riesz_rank(&plan, &m.b, s, wa.radius))
                .collect::<Result<Vec<_>>>()?;
            write_json(out, "lacuna.json", &plan)?;
            write_json(out, "wa.json", &wa)?;
            write_json(out, "riesz.json", &ranks)?;
            let constant = ranks.iter().all(|k| k.matches && k.rank == ranks[0].rank);
            print_json(&serde_json::json!({
                "window": plan.window, "N": plan.rank_n, "n_A": wa.n_a, "n_TrB": wa.n_trb,
                "nu": wa.nu, "identity": wa.pass, "riesz_ranks": ranks.iter().map(|k| k.rank).collect::<Vec<_>>(),
            }))?;
            Ok(verdict(wa.pass && constant))
        }
        Command::Det { model, r, h } => {
            let m = model.build(cli.trunc, cli.seed)?;
            let h = h.unwrap_or(16.0 * m.a);
            let plan = lacuna::plan_lacuna(&m.t, *r, m.a, m.gamma, m.l, &m.prof)?;
            let eval = DeterminantEvaluator::new(&plan, &m.b)?;
            let report = lacuna::det_bounds_check(&plan, &eval, h, &SamplingPlan::default())?;
            let setup = LacunaSetup { a: m.a, gamma_eff: m.gamma, l: m.l, h };
            let wa = lacuna::wa_check_nudged(
                &m.t,
                &m.b,
                &m.prof,
                *r,
                &setup,
                None,
                &SamplingPlan::default(),
                &ContourOptions::default(),
            )?;
            fs::create_dir_all(out)?;
            if let Some(path) = &wa.contour {
                path.write_csv(&out.join("contour.csv"))?;
            }
            write_json(out, "det_bounds.json", &report)?;
            print_json(&serde_json::json!({
                "N": report.rank_n, "max_abs_D": report.max_abs_d, "upper": report.upper_bound,
                "abs_D_probe": report.abs_d_at_probe, "lower": report.lower_bound,
                "winding": wa.nu, "pass": report.pass,
            }))?;
            Ok(verdict(report.pass))
        }
        Command::Gallery { kind, alpha, beta, b, mapping } => {
            let m = cli.trunc;
            let (t, pert) = match kind {
                GalleryKind::Power | GalleryKind::Condensing => {
                    let spectrum = if *kind == GalleryKind::Power {
                        gallery::gen_power_spectrum(*alpha, m)?
                    } else {
                        gallery::gen_condensing_spectrum(m)?
                    };
                    let t = DiagonalOperator::new(spectrum);
                    let pert = gallery::gen_random_perturbation(&t, *beta, *b, cli.seed);
                    (t, pert)
                }
                GalleryKind::Periodic => {
                    let ex = gallery::build_periodic_example(m, (*mapping).into(), Symbol::LogSingular)?;
                    (ex.t, ex.b)
                }
            };
            let alpha_used = t.spectrum().alpha()?;
            let fit = operator::fit_subordination(&pert, &t, *beta)?;
            fs::create_dir_all(out)?;
            write_json(out, "spectrum.json", t.spectrum())?;
            fs::write(out.join("perturbation.json"), pert.to_json()?)?;
            fs::write(out.join("perturbation.bin"), pert.to_binary())?;
            let summary = serde_json::json!({
                "M": m,
                "alpha": alpha_used,
                "alpha_estimate": t.spectrum().estimate_alpha().ok(),
                "l": t.spectrum().noncondensing_l(alpha_used),
                "b_fit": fit.b,
                "beta": beta,
            });
            write_json(out, "summary.json", &summary)?;
            print_json(&summary)?;
            Ok(0)
        }
        Command::Counterexample { mapping, truncations, betas } => {
            let report = gallery::counterexample_check(Symbol::LogSingular, (*mapping).into(), truncations, betas)?;
            write_json(out, "counterexample.json", &report)?;
            print_json(&serde_json::json!({
                "l2_norm": report.l2_norm,
                "max_column_norm": report.max_column_norm,
                "bf0_growth": report.bf0.growth,
                "local_condition_holds": report.local_condition_holds,
                "global_condition_fails": report.global_condition_fails,
            }))?;
            Ok(verdict(report.local_condition_holds && report.global_condition_fails))
        }
        Command::Run { config } => {
            let manifest = scenario::run_scenario(config, Some(out));
            print_json(&serde_json::json!({
                "name": manifest.name, "exit_code": manifest.exit_code, "stages": manifest.stages,
            }))?;
            Ok(manifest.exit_code)
        }
    }
}

/// Parses arguments, configures the thread pool and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return 2;
        }
    }
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Format(_) | Error::Json(_) => 2,
                _ => 3,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn arguments_parse() {
        Cli::command().debug_assert();
        let cli =
            Cli::try_parse_from(["eigencount", "--trunc", "64", "sweep", "--beta", "0.2", "--a", "0.25"]).unwrap();
        assert_eq!(cli.trunc, 64);
        assert!(matches!(cli.command, Command::Sweep { .. }));
        let cli = Cli::try_parse_from(["eigencount", "counterexample", "--truncations", "32,64"]).unwrap();
        match cli.command {
            Command::Counterexample { truncations, .. } => assert_eq!(truncations, vec![32, 64]),
            _ => unreachable!(),
        }
        assert!(Cli::try_parse_from(["eigencount", "frobnicate"]).is_err());
    }
}
