//! JSON-configured end-to-end runs writing reports and a manifest.
//!
//! ```json
//! {
//!   "name": "b0-alpha1",
//!   "generator": {"kind": "power", "alpha": 1.0},
//!   "truncation": 128,
//!   "perturbation": "random",
//!   "beta": 0.0,
//!   "b": 0.05,
//!   "a": 1.0,
//!   "h": 16.0,
//!   "r_grid": {"start": 10.5, "stop": 50.5, "count": 5},
//!   "sweep_grid": {"start": 3.0, "stop": 65.0, "count": 249},
//!   "eta": 0.0,
//!   "seed": 7,
//!   "output": "out/b0-alpha1"
//! }
//! ```
//!
//! `b` may be `"fit"` (minimal constant for the generated `B`), `a` may be
//! `"auto"` (`96 l b²`, or 1 when `b = 0`), `h` defaults to `16a`, and grids
//! accept `{"values": [...]}` instead of a range. Generators are
//! `{"kind": "power", "alpha": α}`, `{"kind": "condensing"}` and
//! `{"kind": "periodic", "mapping": "positive_half" | "folded", "symbol": {...}}`.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gallery::{self, FrequencyMapping, Symbol};
use crate::lacuna::{self, ContourOptions, DeterminantEvaluator, LacunaSetup};
use crate::operator::{self, fit_subordination, DiagonalOperator, PerturbationMatrix, SubordinationProfile};
use crate::resolvent::{self, ParabolaSpec, ResolventField, SamplingPlan, TailModel};
use crate::theorem::{self, CorollaryVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Power {
        alpha: f64,
    },
    Condensing,
    Periodic {
        mapping: FrequencyMapping,
        #[serde(default = "default_symbol")]
        symbol: Symbol,
    },
}

fn default_symbol() -> Symbol {
    Symbol::LogSingular
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    #[default]
    Random,
    Hermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueOr<T> {
    Value(f64),
    Keyword(T),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKeyword {
    Fit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range { start: f64, stop: f64, count: usize },
    Values { values: Vec<f64> },
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            GridSpec::Range { start, stop, count } => theorem::linear_grid(*start, *stop, *count),
            GridSpec::Values { values } => values.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub generator: GeneratorSpec,
    pub truncation: usize,
    #[serde(default)]
    pub perturbation: PerturbationKind,
    #[serde(default)]
    pub beta: f64,
    pub b: ValueOr<FitKeyword>,
    pub a: ValueOr<AutoKeyword>,
    #[serde(default)]
    pub h: Option<f64>,
    pub r_grid: GridSpec,
    #[serde(default)]
    pub sweep_grid: Option<GridSpec>,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Format(msg));
        if self.truncation < 4 || self.truncation > crate::linalg::DEFAULT_MAX_EIGEN_DIM {
            return bad(format!("truncation {} outside [4, 512]", self.truncation));
        }
        if !(self.beta < 0.5) || self.beta < 0.0 {
            return bad(format!("beta {} outside [0, 1/2)", self.beta));
        }
        if let ValueOr::Value(b) = self.b {
            if !(b >= 0.0) {
                return bad(format!("b = {b} must be nonnegative"));
            }
        }
        if let ValueOr::Value(a) = self.a {
            if !(a > 0.0) {
                return bad(format!("a = {a} must be positive"));
            }
        }
        if let Some(h) = self.h {
            if !(h > 0.0) {
                return bad(format!("h = {h} must be positive"));
            }
        }
        if self.r_grid.points().is_empty() {
            return bad("r_grid is empty".into());
        }
        match &self.generator {
            GeneratorSpec::Power { alpha } if !(*alpha > 0.0) => bad(format!("alpha = {alpha} must be positive")),
            GeneratorSpec::Periodic { .. } if !self.truncation.is_multiple_of(2) => {
                bad("periodic truncation must be even".into())
            }
            GeneratorSpec::Power { .. } | GeneratorSpec::Condensing
                if matches!(self.b, ValueOr::Keyword(FitKeyword::Fit)) =>
            {
                bad("b = \"fit\" needs a fixed perturbation (periodic generator)".into())
            }
            _ => Ok(()),
        }
    }
}

/// Pipeline stage, each with its own nonzero exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Parse,
    Generate,
    Fit,
    Lacuna,
    Bounds,
    Determinant,
    Sweep,
    Corollary,
    Output,
}

impl Stage {
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Parse => 2,
            Stage::Generate => 3,
            Stage::Fit => 4,
            Stage::Lacuna => 5,
            Stage::Bounds => 6,
            Stage::Determinant => 7,
            Stage::Sweep => 8,
            Stage::Corollary => 9,
            Stage::Output => 10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub name: String,
    pub seed: u64,
    pub config: Scenario,
    pub parameters: serde_json::Value,
    pub stages: Vec<StageRecord>,
    pub files: Vec<String>,
    pub exit_code: i32,
}

struct Run {
    dir: PathBuf,
    files: Vec<String>,
    stages: Vec<StageRecord>,
}

impl Run {
    fn write(&mut self, rel: &str, text: &str) -> std::result::Result<(), (Stage, Error)> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| (Stage::Output, e.into()))?;
        }
        fs::write(&path, text).map_err(|e| (Stage::Output, e.into()))?;
        self.files.push(rel.to_string());
        Ok(())
    }

    fn path(&mut self, rel: &str) -> std::result::Result<PathBuf, (Stage, Error)> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| (Stage::Output, e.into()))?;
        }
        self.files.push(rel.to_string());
        Ok(path)
    }

    fn ok(&mut self, stage: Stage, detail: impl Into<String>) {
        self.stages.push(StageRecord { stage, ok: true, detail: detail.into() });
    }
}

fn at(stage: Stage) -> impl Fn(Error) -> (Stage, Error) {
    move |e| (stage, e)
}

fn json<T: Serialize>(v: &T) -> std::result::Result<String, (Stage, Error)> {
    serde_json::to_string_pretty(v).map_err(|e| (Stage::Output, e.into()))
}

/// Builds `T` and `B` for a scenario.
pub fn generate(s: &Scenario) -> Result<(DiagonalOperator, PerturbationMatrix)> {
    let m = s.truncation;
    let t = match &s.generator {
        GeneratorSpec::Power { alpha } => DiagonalOperator::new(gallery::gen_power_spectrum(*alpha, m)?),
        GeneratorSpec::Condensing => DiagonalOperator::new(gallery::gen_condensing_spectrum(m)?),
        GeneratorSpec::Periodic { mapping, symbol } => {
            let ex = gallery::build_periodic_example(m, *mapping, *symbol)?;
            return Ok((ex.t, ex.b));
        }
    };
    let b = match s.b {
        ValueOr::Value(b) => b,
        ValueOr::Keyword(FitKeyword::Fit) => unreachable!("rejected by validate"),
    };
    let pert = match s.perturbation {
        PerturbationKind::Random => gallery::gen_random_perturbation(&t, s.beta, b, s.seed),
        PerturbationKind::Hermitian => gallery::gen_hermitian_perturbation(&t, s.beta, b, s.seed),
    };
    Ok((t, pert))
}

/// Runs the whole pipeline. Reports go under `out` (or the config's
/// `output`, or `./out/<name>`); the returned manifest carries the exit code.
pub fn run_scenario(config_path: &Path, out: Option<&Path>) -> Manifest {
    let parsed = fs::read_to_string(config_path).map_err(Error::from).and_then(|text| Scenario::from_json(&text));
    let scenario = match parsed {
        Ok(s) => s,
        Err(e) => {
            let dir = out.map(Path::to_path_buf);
            let manifest = Manifest {
                name: String::new(),
                seed: 0,
                config: placeholder(),
                parameters: serde_json::Value::Null,
                stages: vec![StageRecord { stage: Stage::Parse, ok: false, detail: e.to_string() }],
                files: Vec::new(),
                exit_code: Stage::Parse.exit_code(),
            };
            if let Some(dir) = dir {
                let _ = fs::create_dir_all(&dir).and_then(|_| {
                    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).unwrap_or_default())
                });
            }
            return manifest;
        }
    };
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| scenario.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
    run_parsed(&scenario, &dir)
}

fn placeholder() -> Scenario {
    Scenario {
        name: String::new(),
        generator: GeneratorSpec::Condensing,
        truncation: 0,
        perturbation: PerturbationKind::Random,
        beta: 0.0,
        b: ValueOr::Value(0.0),
        a: ValueOr::Value(1.0),
        h: None,
        r_grid: GridSpec::Values { values: Vec::new() },
        sweep_grid: None,
        eta: 0.0,
        seed: 0,
        output: None,
    }
}

/// Runs an already parsed scenario into `dir`.
pub fn run_parsed(scenario: &Scenario, dir: &Path) -> Manifest {
    let mut run = Run { dir: dir.to_path_buf(), files: Vec::new(), stages: Vec::new() };
    let mut parameters = serde_json::Value::Null;
    let result = pipeline(scenario, &mut run, &mut parameters);
    let exit_code = match &result {
        Ok(()) => 0,
        Err((stage, e)) => {
            run.stages.push(StageRecord { stage: *stage, ok: false, detail: e.to_string() });
            stage.exit_code()
        }
    };
    let mut manifest = Manifest {
        name: scenario.name.clone(),
        seed: scenario.seed,
        config: scenario.clone(),
        parameters,
        stages: run.stages,
        files: run.files,
        exit_code,
    };
    let text = serde_json::to_string_pretty(&manifest).unwrap_or_default();
    if fs::create_dir_all(dir).and_then(|_| fs::write(dir.join("manifest.json"), text)).is_err()
        && manifest.exit_code == 0
    {
        manifest.exit_code = Stage::Output.exit_code();
    }
    manifest
}

fn pipeline(
    s: &Scenario,
    run: &mut Run,
    parameters: &mut serde_json::Value,
) -> std::result::Result<(), (Stage, Error)> {
    fs::create_dir_all(&run.dir).map_err(|e| (Stage::Output, e.into()))?;

    let (t, b) = generate(s).map_err(at(Stage::Generate))?;
    run.write("spectrum.json", &json(t.spectrum())?)?;
    let bin = run.path("perturbation.bin")?;
    fs::write(bin, b.to_binary()).map_err(|e| (Stage::Output, e.into()))?;
    run.ok(Stage::Generate, format!("M = {}", t.dim()));

    let prof = match s.b {
        ValueOr::Value(bv) => SubordinationProfile { beta: s.beta, b: bv },
        ValueOr::Keyword(FitKeyword::Fit) => fit_subordination(&b, &t, s.beta).map_err(at(Stage::Fit))?,
    };
    if !prof.holds(&t, &b) {
        return Err((Stage::Fit, Error::Precondition(format!("column bound b = {} fails", prof.b))));
    }
    let alpha = t.spectrum().alpha().map_err(at(Stage::Fit))?;
    let l = t.spectrum().noncondensing_l(alpha);
    let gamma = theorem::gamma_of(alpha, s.beta);
    let a = match s.a {
        ValueOr::Value(a) => a,
        ValueOr::Keyword(AutoKeyword::Auto) if prof.b == 0.0 => 1.0,
        ValueOr::Keyword(AutoKeyword::Auto) => 96.0 * l as f64 * prof.b * prof.b,
    };
    let h = s.h.unwrap_or(16.0 * a);
    let eps = operator::compactness_tail(&t, &prof, 0).map_err(at(Stage::Fit))?;
    *parameters = serde_json::json!({
        "alpha": alpha, "beta": s.beta, "gamma": gamma, "b": prof.b, "l": l, "a": a, "h": h,
        "trusted_range": theorem::trusted_range(&t), "compactness_tail": eps,
    });
    run.ok(Stage::Fit, format!("b = {}, l = {l}, gamma = {gamma}", prof.b));
    if !theorem::gamma_admissible(gamma) {
        return Err((Stage::Fit, Error::HypothesisViolated(gamma)));
    }

    let tail = TailModel::for_operator(&t, &prof).map_err(at(Stage::Bounds))?;
    let field = ResolventField::from_operator(&t, &b).map_err(at(Stage::Bounds))?.with_tail(tail);
    let sampling = SamplingPlan::default();
    let contour = ContourOptions::default();
    let setup = LacunaSetup { a, gamma_eff: gamma, l, h };
    let eigs_a: Vec<Complex64> = operator::perturbed_eigenvalues(&t, &b).map_err(at(Stage::Determinant))?;

    let r_grid = s.r_grid.points();
    for (i, &r) in r_grid.iter().enumerate() {
        let tag = format!("r{i:03}");
        let plan = lacuna::plan_lacuna(&t, r, a, gamma, l, &prof).map_err(at(Stage::Lacuna))?;
        run.write(&format!("{tag}/lacuna.json"), &json(&plan)?)?;

        let shifted = field.with_values(plan.shifted_spectrum.clone()).map_err(at(Stage::Bounds))?;
        let mut strip =
            resolvent::strip_bound_check(&plan.strip(), &shifted, &prof, l, &sampling).map_err(at(Stage::Bounds))?;
        let csv = run.path(&format!("{tag}/strip_samples.csv"))?;
        strip.write_samples_csv(&csv).map_err(at(Stage::Output))?;
        strip.samples_path = Some(format!("{tag}/strip_samples.csv"));
        run.write(&format!("{tag}/strip.json"), &strip.to_json().map_err(at(Stage::Output))?)?;
        if !strip.pass {
            return Err((Stage::Bounds, Error::Precondition(format!("strip bound violated at r = {r}"))));
        }

        let eval = DeterminantEvaluator::new(&plan, &b).map_err(at(Stage::Determinant))?;
        let det = lacuna::det_bounds_check(&plan, &eval, h, &sampling).map_err(at(Stage::Determinant))?;
        run.write(&format!("{tag}/det_bounds.json"), &json(&det)?)?;

        let wa = lacuna::wa_check_nudged(&t, &b, &prof, r, &setup, Some(&eigs_a), &sampling, &contour)
            .map_err(at(Stage::Determinant))?;
        if let Some(path) = &wa.contour {
            let p = run.path(&format!("{tag}/contour.csv"))?;
            path.write_csv(&p).map_err(at(Stage::Output))?;
        }
        run.write(&format!("{tag}/wa.json"), &json(&wa)?)?;
        if !det.pass {
            return Err((Stage::Determinant, Error::Precondition(format!("determinant bounds violated at r = {r}"))));
        }
        if !wa.pass {
            return Err((
                Stage::Determinant,
                Error::Precondition(format!(
                    "identity fails at r = {r}: n_A = {}, n_TrB = {}, nu = {}",
                    wa.n_a, wa.n_trb, wa.nu
                )),
            ));
        }
    }
    run.ok(Stage::Lacuna, format!("{} radii planned", r_grid.len()));
    run.ok(Stage::Determinant, "identity holds at every r");

    let parabola =
        ParabolaSpec::with_exponent(h, if alpha == 1.0 { 2.0 * s.beta } else { gamma }).map_err(at(Stage::Bounds))?;
    let sigma_max = theorem::trusted_range(&t).max(parabola.sigma_h * 2.0);
    let samples = parabola.samples(200, sigma_max);
    let mut par = resolvent::parabola_bound_check(&parabola, &field, &prof, l, &samples).map_err(at(Stage::Bounds))?;
    let csv = run.path("parabola_samples.csv")?;
    par.write_samples_csv(&csv).map_err(at(Stage::Output))?;
    par.samples_path = Some("parabola_samples.csv".into());
    run.write("parabola.json", &par.to_json().map_err(at(Stage::Output))?)?;
    if !par.pass {
        return Err((Stage::Bounds, Error::Precondition("parabola bound violated".into())));
    }
    run.ok(Stage::Bounds, "strip and parabola bounds hold");

    let trusted = theorem::trusted_range(&t);
    let grid = match &s.sweep_grid {
        Some(g) => g.points(),
        None => theorem::linear_grid(t.values()[0], trusted, 400),
    };
    let report = theorem::sweep_with_eigenvalues(&t, &eigs_a, &prof, &grid, a).map_err(at(Stage::Sweep))?;
    let p = run.path("sweep.csv")?;
    report.write_csv(&p).map_err(at(Stage::Output))?;
    let p = run.path("plot.csv")?;
    report.write_plot_data(&p).map_err(at(Stage::Output))?;
    run.write("sweep.json", &report.summary_json().map_err(at(Stage::Output))?)?;
    let hold = theorem::holdout(&report);
    run.write("holdout.json", &json(&hold)?)?;
    run.ok(Stage::Sweep, format!("C = {}, C1 = {}", report.fitted_c, report.fitted_c1));

    let verdict = theorem::corollary_check(&report, s.eta);
    run.write("corollary.json", &json(&verdict)?)?;
    if let CorollaryVerdict::Fail { slope, bound } = verdict {
        return Err((Stage::Corollary, Error::Precondition(format!("slope {slope} exceeds {bound}"))));
    }
    run.ok(Stage::Corollary, format!("{verdict:?}"));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUNDLED: &str = include_str!("../scenarios/b0-alpha1.json");

    #[test]
    fn parses_bundled_and_rejects_malformed() {
        let s = Scenario::from_json(BUNDLED).unwrap();
        assert_eq!(s.name, "b0-alpha1");
        assert!(Scenario::from_json("{\"name\": 3}").is_err());
        let fit_random = BUNDLED.replace("\"b\": 0.05", "\"b\": \"fit\"");
        assert!(Scenario::from_json(&fit_random).is_err());
        let auto = BUNDLED.replace("\"a\": 1.0", "\"a\": \"auto\"");
        assert_eq!(Scenario::from_json(&auto).unwrap().a, ValueOr::Keyword(AutoKeyword::Auto));
    }

    #[test]
    fn malformed_file_exits_with_two() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.json");
        fs::write(&cfg, "{ not json").unwrap();
        let m = run_scenario(&cfg, Some(&dir.path().join("out")));
        assert_eq!(m.exit_code, 2);
        assert!(dir.path().join("out/manifest.json").exists());
    }
}
