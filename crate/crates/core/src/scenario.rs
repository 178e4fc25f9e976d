//! JSON scenario files and the reports produced by running them.
//!
//! A scenario is `{id, kind, description?, seed?, tolerances?, payload}`
//! where `payload` is validated against the schema for `kind` before any
//! computation starts. Reports carry everything that influenced the run
//! (tolerances, seed, dimension guard) and serialize deterministically;
//! wall-clock timing only appears in the text rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::calculus::{apply_function, is_coarse_graining};
use crate::classical::{
    classical_equivalence_check, classical_probability, classical_update, preimage,
    verify_contrast, ClassicalEvent, ClassicalState, ClassicalSystem,
};
use crate::collapse::{apply_rule, born_probability, to_update_map};
use crate::equivalence::{
    bases_commute, check_post_processing, contextual_event_equal_implies_same_projector,
    events_equivalent_projector, exhibit_ttt_inconsistency, predicted_update_equal, CheckConfig,
};
use crate::json::{matrix_to_value, JsonMatrix, JsonVector};
use crate::operator::{eigendecompose, maximally_mixed, random_density};
use crate::valuation::{
    discover_functional_relations, search_valuation, FamilyFile, ObservableFamily,
};
use crate::{
    DensityState, Error, HermitianOperator, MeasurementBasis, MeasurementEvent, Result, Semantics,
    SpectralDecomposition, SpectrumFunction, Tolerances, UpdateKind,
};

pub const DEFAULT_MAX_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Collapse,
    PostProcessing,
    Ttt,
    Valuation,
    Classical,
    Equivalence,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    id: String,
    kind: ScenarioKind,
    #[serde(default)]
    description: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    tolerances: Option<Tolerances>,
    payload: Value,
}

/// Command-line overrides applied on top of each scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    /// Replaces `eq_tol`.
    pub eq_tol: Option<f64>,
    pub max_dim: usize,
    /// Substring filter on scenario ids (suite runs only).
    pub cases: Option<String>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            seed: None,
            eq_tol: None,
            max_dim: DEFAULT_MAX_DIM,
            cases: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub max_dim: usize,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub passed: bool,
    pub details: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Invalid,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Invalid => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub id: String,
    pub kind: Option<ScenarioKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigEcho>,
    pub cases: Vec<CaseReport>,
    /// Milliseconds; excluded from JSON so reports stay byte-identical.
    #[serde(skip)]
    pub elapsed_ms: f64,
}

impl Report {
    fn invalid(id: String, err: &Error) -> Self {
        Self {
            id,
            kind: None,
            description: None,
            status: Status::Invalid,
            error: Some(err.to_string()),
            config: None,
            cases: Vec::new(),
            elapsed_ms: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Invalid => "INVALID",
        };
        let _ = writeln!(out, "[{tag}] {} ({:.1} ms)", self.id, self.elapsed_ms);
        if let Some(e) = &self.error {
            let _ = writeln!(out, "    error: {e}");
        }
        for c in &self.cases {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(out, "    {mark} {}", c.name);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub invalid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed_override: Option<u64>,
    pub eq_tol_override: Option<f64>,
    pub max_dim: usize,
    pub cases_filter: Option<String>,
    pub summary: SuiteSummary,
    pub scenarios: Vec<Report>,
}

impl SuiteReport {
    pub fn status(&self) -> Status {
        if self.summary.invalid > 0 {
            Status::Invalid
        } else if self.summary.failed > 0 {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out: String = self.scenarios.iter().map(Report::render_text).collect();
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} scenarios: {} passed, {} failed, {} invalid",
            s.total, s.passed, s.failed, s.invalid
        );
        out
    }
}

/// Exit code for a single-scenario run.
pub fn exit_code(result: &Result<Report>) -> i32 {
    match result {
        Ok(r) => r.status.exit_code(),
        Err(_) => Status::Invalid.exit_code(),
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    match e.classify() {
        serde_json::error::Category::Data => Error::Validation(e.to_string()),
        _ => Error::Parse(e.to_string()),
    }
}

fn payload<T: DeserializeOwned>(v: &Value) -> Result<T> {
    T::deserialize(v).map_err(|e| Error::Validation(format!("payload: {e}")))
}

/// Every failure while turning the payload into library objects is a
/// validation error.
fn invalid(e: Error) -> Error {
    match e {
        Error::Parse(_) | Error::Validation(_) => e,
        other => Error::Validation(other.to_string()),
    }
}

/// Parses, validates and runs one scenario file.
pub fn run_scenario(path: &Path, opts: &RunOptions) -> Result<Report> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    run_scenario_str(&text, opts)
}

pub fn run_scenario_str(text: &str, opts: &RunOptions) -> Result<Report> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(parse_error)?;
    let mut tol = file.tolerances.unwrap_or_default();
    if let Some(eq) = opts.eq_tol {
        tol.eq_tol = eq;
    }
    let ctx = Ctx {
        tol,
        seed: opts.seed.or(file.seed).unwrap_or(0),
        max_dim: opts.max_dim,
    };
    let start = std::time::Instant::now();
    let runner = prepare(file.kind, &file.payload, &ctx).map_err(invalid)?;
    let cases = runner(&ctx);
    let status = if cases.iter().all(|c| c.passed) {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(Report {
        id: file.id,
        kind: Some(file.kind),
        description: file.description,
        status,
        error: None,
        config: Some(ConfigEcho {
            seed: ctx.seed,
            max_dim: ctx.max_dim,
            tolerances: ctx.tol,
        }),
        cases,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs every `*.json` file directly inside `dir`. Files that fail to
/// parse or validate are reported as invalid under their file stem.
pub fn run_suite(dir: &Path, opts: &RunOptions) -> Result<SuiteReport> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();

    let mut scenarios: Vec<Report> = paths
        .iter()
        .map(|p| {
            run_scenario(p, opts).unwrap_or_else(|e| {
                let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned());
                Report::invalid(stem.unwrap_or_default(), &e)
            })
        })
        .filter(|r| {
            opts.cases
                .as_ref()
                .is_none_or(|f| r.id.contains(f.as_str()))
        })
        .collect();
    scenarios.sort_by(|a, b| a.id.cmp(&b.id));

    let count = |s: Status| scenarios.iter().filter(|r| r.status == s).count();
    let summary = SuiteSummary {
        total: scenarios.len(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        invalid: count(Status::Invalid),
    };
    Ok(SuiteReport {
        seed_override: opts.seed,
        eq_tol_override: opts.eq_tol,
        max_dim: opts.max_dim,
        cases_filter: opts.cases.clone(),
        summary,
        scenarios,
    })
}

struct Ctx {
    tol: Tolerances,
    seed: u64,
    max_dim: usize,
}

impl Ctx {
    fn guard(&self, n: usize) -> Result<()> {
        if n > self.max_dim {
            return Err(Error::Validation(format!(
                "dimension {n} exceeds the limit of {}",
                self.max_dim
            )));
        }
        Ok(())
    }

    fn observable(&self, m: &JsonMatrix) -> Result<(HermitianOperator, SpectralDecomposition)> {
        let m = m.to_matrix()?;
        self.guard(m.dim())?;
        let a = HermitianOperator::new(m, &self.tol)?;
        let sd = eigendecompose(&a, &self.tol)?;
        Ok((a, sd))
    }
}

type Runner = Box<dyn FnOnce(&Ctx) -> Vec<CaseReport>>;

fn prepare(kind: ScenarioKind, v: &Value, ctx: &Ctx) -> Result<Runner> {
    match kind {
        ScenarioKind::Collapse => prepare_collapse(payload(v)?, ctx),
        ScenarioKind::PostProcessing => prepare_post_processing(payload(v)?, ctx),
        ScenarioKind::Ttt => prepare_ttt(payload(v)?, ctx),
        ScenarioKind::Valuation => prepare_valuation(payload(v)?, ctx),
        ScenarioKind::Classical => prepare_classical(payload(v)?),
        ScenarioKind::Equivalence => prepare_equivalence(payload(v)?, ctx),
    }
}

fn case(name: impl Into<String>, passed: bool, details: Value) -> CaseReport {
    CaseReport {
        name: name.into(),
        passed,
        details,
    }
}

fn error_case(name: impl Into<String>, e: &Error) -> CaseReport {
    case(name, false, json!({ "error": e.to_string() }))
}

fn state_value(s: &DensityState) -> Value {
    if s.is_null() {
        json!("null")
    } else {
        matrix_to_value(s.matrix())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// ---------------------------------------------------------------------------
// shared payload pieces

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
enum StateSpec {
    Matrix(JsonMatrix),
    Pure(JsonVector),
    MaximallyMixed,
    /// Seeded random full-rank state.
    Random(u64),
}

impl StateSpec {
    fn build(&self, n: usize, tol: &Tolerances) -> Result<DensityState> {
        let s = match self {
            StateSpec::Matrix(m) => DensityState::new(m.to_matrix()?, tol)?,
            StateSpec::Pure(v) => DensityState::pure(&v.to_vec())?,
            StateSpec::MaximallyMixed => maximally_mixed(n),
            StateSpec::Random(seed) => random_density(n, *seed),
        };
        if s.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.dim(),
            });
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
enum BasisSpec {
    Canonical,
    /// Canonical basis with each degenerate block rotated by a seeded
    /// random unitary.
    Random(u64),
    Vectors(Vec<JsonVector>),
}

impl BasisSpec {
    fn build(&self, sd: &SpectralDecomposition, tol: &Tolerances) -> Result<MeasurementBasis> {
        match self {
            BasisSpec::Canonical => Ok(MeasurementBasis::canonical(sd)),
            BasisSpec::Random(seed) => Ok(MeasurementBasis::random_rotation(sd, *seed)),
            BasisSpec::Vectors(vs) => {
                let vs: Vec<_> = vs.iter().map(JsonVector::to_vec).collect();
                MeasurementBasis::from_vectors(&vs, sd, tol)
            }
        }
    }
}

/// `(Δ, g(A), 𝔅)`: the basis, if any, is built for `A` and carried over to
/// `g(A)` when a function is given.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventSpec {
    observable: JsonMatrix,
    #[serde(default)]
    function: Option<SpectrumFunction>,
    outcomes: Vec<f64>,
    #[serde(default)]
    basis: Option<BasisSpec>,
}

impl EventSpec {
    fn build(&self, ctx: &Ctx) -> Result<MeasurementEvent> {
        let (_, sd_a) = ctx.observable(&self.observable)?;
        let basis = self
            .basis
            .as_ref()
            .map(|b| b.build(&sd_a, &ctx.tol))
            .transpose()?;
        let sd = match &self.function {
            Some(g) => apply_function(g, &sd_a, &ctx.tol)?,
            None => sd_a,
        };
        MeasurementEvent::new(sd, &self.outcomes, basis, &ctx.tol)
    }
}

// ---------------------------------------------------------------------------
// collapse

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollapsePayload {
    observable: JsonMatrix,
    state: StateSpec,
    rule: UpdateKind,
    outcomes: Vec<f64>,
    #[serde(default)]
    basis: Option<BasisSpec>,
    #[serde(default)]
    expect: CollapseExpect,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollapseExpect {
    probability: Option<f64>,
    state: Option<JsonMatrix>,
    null: Option<bool>,
    /// Output equals the input state.
    unchanged: Option<bool>,
    /// Output equals `E_Δ / tr(E_Δ)`.
    normalized_projector: Option<bool>,
}

fn prepare_collapse(p: CollapsePayload, ctx: &Ctx) -> Result<Runner> {
    let (_, sd) = ctx.observable(&p.observable)?;
    let basis = p
        .basis
        .as_ref()
        .map(|b| b.build(&sd, &ctx.tol))
        .transpose()?;
    let event = MeasurementEvent::new(sd, &p.outcomes, basis, &ctx.tol)?;
    let rho = p.state.build(event.dim(), &ctx.tol)?;
    let expected = p
        .expect
        .state
        .as_ref()
        .map(JsonMatrix::to_matrix)
        .transpose()?;
    let expect = p.expect;
    let rule = p.rule;
    Ok(Box::new(move |ctx| {
        let tol = &ctx.tol;
        let n = event.dim() as f64;
        let mut cases = Vec::new();
        let prob = born_probability(&rho, &event.outcomes(), event.decomposition());
        match (&prob, expect.probability) {
            (Ok(p), Some(want)) => cases.push(case(
                "probability",
                close(*p, want, tol.eq_tol),
                json!({"value": p, "expected": want}),
            )),
            (Err(e), Some(_)) => cases.push(error_case("probability", e)),
            _ => {}
        }
        let out = match apply_rule(rule, &rho, &event, tol) {
            Ok(s) => s,
            Err(e) => {
                cases.push(error_case(format!("{rule:?} update"), &e));
                return cases;
            }
        };
        let mut details = json!({
            "rule": rule,
            "outcomes": event.outcomes(),
            "probability": prob.ok(),
            "output": state_value(&out),
        });
        let mut ok = true;
        if let Some(want) = expect.null {
            ok &= out.is_null() == want;
        }
        if let Some(m) = &expected {
            let d = out.matrix().distance(m);
            details["distance_to_expected"] = json!(d);
            ok &= !out.is_null() && d <= tol.eq_tol * n;
        }
        if let Some(want) = expect.unchanged {
            let d = out.distance(&rho);
            details["distance_to_input"] = json!(d);
            ok &= (d <= tol.eq_tol * n) == want;
        }
        if let Some(want) = expect.normalized_projector {
            let e = event.projector();
            let target = e.matrix().scale(1.0 / e.rank() as f64);
            let d = out.matrix().distance(&target);
            details["distance_to_normalized_projector"] = json!(d);
            ok &= (d <= tol.eq_tol * n) == want;
        }
        cases.push(case(format!("{rule:?} update"), ok, details));
        cases
    }))
}

// ---------------------------------------------------------------------------
// post-processing

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CheckSettings {
    random_bases: usize,
    sample_states: usize,
    all_subsets: bool,
}

impl Default for CheckSettings {
    fn default() -> Self {
        let c = CheckConfig::default();
        Self {
            random_bases: c.random_bases,
            sample_states: c.sample_states,
            all_subsets: c.all_subsets,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PostProcessingPayload {
    observable: JsonMatrix,
    function: SpectrumFunction,
    semantics: Semantics,
    #[serde(default)]
    check: CheckSettings,
    #[serde(default)]
    expect: PostProcessingExpect,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PostProcessingExpect {
    /// Every verdict must report this.
    update_equal: Option<bool>,
    coarse_graining: Option<bool>,
    /// State of the first witness found.
    witness: Option<StateSpec>,
}

fn prepare_post_processing(p: PostProcessingPayload, ctx: &Ctx) -> Result<Runner> {
    let (_, sd) = ctx.observable(&p.observable)?;
    p.function.values(&sd)?;
    let witness = p
        .expect
        .witness
        .as_ref()
        .map(|w| w.build(sd.dim(), &ctx.tol))
        .transpose()?;
    Ok(Box::new(move |ctx| {
        let tol = &ctx.tol;
        let config = CheckConfig {
            random_bases: p.check.random_bases,
            sample_states: p.check.sample_states,
            seed: ctx.seed,
            all_subsets: p.check.all_subsets,
        };
        let mut cases = Vec::new();
        if let Some(want) = p.expect.coarse_graining {
            match is_coarse_graining(&p.function, &sd, tol) {
                Ok(got) => cases.push(case(
                    "coarse_graining",
                    got == want,
                    json!({"value": got, "expected": want}),
                )),
                Err(e) => cases.push(error_case("coarse_graining", &e)),
            }
        }
        let verdicts = match check_post_processing(&sd, &p.function, p.semantics, &config, tol) {
            Ok(v) => v,
            Err(e) => {
                cases.push(error_case("post_processing", &e));
                return cases;
            }
        };
        for v in &verdicts {
            let predicted = predicted_update_equal(p.semantics, v);
            let ok = v.probability_equal
                && v.sampling_agrees
                && v.update_equal == predicted
                && p.expect
                    .update_equal
                    .is_none_or(|want| v.update_equal == want);
            let mut details = v.to_json();
            details["predicted_update_equal"] = json!(predicted);
            details["choi_distance"] = json!(v.choi_distance);
            cases.push(case(v.case.clone(), ok, details));
        }
        if let Some(want) = &witness {
            let found = verdicts.iter().find_map(|v| v.witness.as_ref());
            let d = found.map(|w| w.state.distance(want));
            let ok = d.is_some_and(|d| d <= tol.eq_tol * sd.dim() as f64);
            cases.push(case("witness", ok, json!({"distance_to_expected": d})));
        }
        cases
    }))
}

// ---------------------------------------------------------------------------
// ttt

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TttPayload {
    observable: JsonMatrix,
    function: SpectrumFunction,
    #[serde(default)]
    expect: TttExpect,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TttExpect {
    trace_distance: Option<f64>,
    frobenius_distance: Option<f64>,
    standard_state: Option<JsonMatrix>,
    subjective_state: Option<JsonMatrix>,
    /// The function is injective, so no inconsistency exists.
    #[serde(default)]
    not_coarse_graining: bool,
}

fn prepare_ttt(p: TttPayload, ctx: &Ctx) -> Result<Runner> {
    let (_, sd) = ctx.observable(&p.observable)?;
    p.function.values(&sd)?;
    let standard = p
        .expect
        .standard_state
        .as_ref()
        .map(JsonMatrix::to_matrix)
        .transpose()?;
    let subjective = p
        .expect
        .subjective_state
        .as_ref()
        .map(JsonMatrix::to_matrix)
        .transpose()?;
    Ok(Box::new(move |ctx| {
        let tol = &ctx.tol;
        let n = sd.dim() as f64;
        let result = exhibit_ttt_inconsistency(&sd, &p.function, tol);
        let report = match (result, p.expect.not_coarse_graining) {
            (Err(Error::NotCoarseGraining), true) => {
                return vec![case(
                    "inconsistency",
                    true,
                    json!({"error": Error::NotCoarseGraining.to_string()}),
                )]
            }
            (Err(e), _) => return vec![error_case("inconsistency", &e)],
            (Ok(r), true) => return vec![case("inconsistency", false, r.to_json())],
            (Ok(r), false) => r,
        };
        let mut ok = report.trace_distance > tol.eq_tol * n;
        if let Some(want) = p.expect.trace_distance {
            ok &= close(report.trace_distance, want, tol.eq_tol);
        }
        if let Some(want) = p.expect.frobenius_distance {
            ok &= close(report.frobenius_distance, want, tol.eq_tol);
        }
        if let Some(m) = &standard {
            ok &= report.standard_state.matrix().distance(m) <= tol.eq_tol * n;
        }
        if let Some(m) = &subjective {
            ok &= report.subjective_state.matrix().distance(m) <= tol.eq_tol * n;
        }
        vec![case("inconsistency", ok, report.to_json())]
    }))
}

// ---------------------------------------------------------------------------
// valuation

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValuationPayload {
    family: FamilyFile,
    #[serde(default = "yes")]
    discover: bool,
    #[serde(default)]
    expect: ValuationExpect,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValuationExpect {
    exists: Option<bool>,
}

fn prepare_valuation(p: ValuationPayload, ctx: &Ctx) -> Result<Runner> {
    ctx.guard(p.family.dim)?;
    let family = ObservableFamily::from_file(&p.family, &ctx.tol)?;
    Ok(Box::new(move |ctx| {
        let tol = &ctx.tol;
        let family = if p.discover {
            discover_functional_relations(&family, tol)
        } else {
            family
        };
        let outcome = match search_valuation(&family, tol) {
            Ok(o) => o,
            Err(e) => return vec![error_case("search", &e)],
        };
        let mut details = outcome.to_json();
        details["members"] = json!(family.len());
        details["relations"] = json!(family.relations().len());
        let verified = outcome.valuation().map(|v| v.verify(&family));
        if let Some(v) = verified {
            details["verified"] = json!(v);
        }
        let exists = verified.is_some();
        let ok = verified.unwrap_or(true) && p.expect.exists.is_none_or(|want| want == exists);
        vec![case("search", ok, details)]
    }))
}

// ---------------------------------------------------------------------------
// classical

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ClassicalStateSpec {
    Uniform,
    PointMass(usize),
    Weights(Vec<f64>),
}

impl ClassicalStateSpec {
    fn build(&self, m: usize) -> Result<ClassicalState> {
        match self {
            ClassicalStateSpec::Uniform => Ok(ClassicalState::uniform(m)),
            ClassicalStateSpec::PointMass(i) if *i < m => Ok(ClassicalState::point_mass(m, *i)),
            ClassicalStateSpec::PointMass(i) => {
                Err(Error::InvalidClassical(format!("no point {i}")))
            }
            ClassicalStateSpec::Weights(w) if w.len() == m => ClassicalState::new(w.clone()),
            ClassicalStateSpec::Weights(w) => Err(Error::DimensionMismatch {
                expected: m,
                found: w.len(),
            }),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalQuery {
    state: ClassicalStateSpec,
    event: ClassicalEvent,
    #[serde(default)]
    probability: Option<f64>,
    /// Expected weights after conditioning, or `null` for the null measure.
    #[serde(default)]
    update: Option<Option<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalPair {
    left: ClassicalEvent,
    right: ClassicalEvent,
    #[serde(default)]
    preimages_equal: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassicalPayload {
    system: ClassicalSystem,
    #[serde(default)]
    queries: Vec<ClassicalQuery>,
    #[serde(default)]
    pairs: Vec<ClassicalPair>,
}

fn prepare_classical(p: ClassicalPayload) -> Result<Runner> {
    p.system.validate()?;
    let m = p.system.len();
    let states = p
        .queries
        .iter()
        .map(|q| q.state.build(m))
        .collect::<Result<Vec<_>>>()?;
    for e in p
        .queries
        .iter()
        .map(|q| &q.event)
        .chain(p.pairs.iter().flat_map(|x| [&x.left, &x.right]))
    {
        p.system.observable(&e.observable)?;
    }
    Ok(Box::new(move |ctx| {
        let tol = ctx.tol.eq_tol;
        let mut cases = Vec::new();
        match verify_contrast(&p.system) {
            Ok(s) => cases.push(case(
                "exhaustive contrast",
                s.counterexamples.is_empty(),
                json!(s),
            )),
            Err(e) => cases.push(error_case("exhaustive contrast", &e)),
        }
        for (k, (q, mu)) in p.queries.iter().zip(&states).enumerate() {
            let name = format!("query {k}");
            let values = p.system.observable(&q.event.observable).expect("checked");
            let run = || -> Result<CaseReport> {
                let prob = classical_probability(mu, &q.event.outcomes, values)?;
                let out = classical_update(mu, &q.event.outcomes, values)?;
                let mut ok = q.probability.is_none_or(|want| close(prob, want, tol));
                if let Some(want) = &q.update {
                    ok &= match want {
                        None => out.is_null(),
                        Some(w) => {
                            !out.is_null()
                                && w.len() == out.weights().len()
                                && w.iter().zip(out.weights()).all(|(a, b)| close(*a, *b, tol))
                        }
                    };
                }
                let update = if out.is_null() {
                    None
                } else {
                    Some(out.weights().to_vec())
                };
                Ok(case(
                    name.clone(),
                    ok,
                    json!({"probability": prob, "update": update}),
                ))
            };
            cases.push(run().unwrap_or_else(|e| error_case(name.clone(), &e)));
        }
        for (k, pair) in p.pairs.iter().enumerate() {
            let name = format!("pair {k}");
            let run = || -> Result<CaseReport> {
                let a1 = p.system.observable(&pair.left.observable)?;
                let a2 = p.system.observable(&pair.right.observable)?;
                let same = preimage(a1, &pair.left.outcomes) == preimage(a2, &pair.right.outcomes);
                let agrees = classical_equivalence_check(&p.system, &pair.left, &pair.right)?;
                let ok = agrees && pair.preimages_equal.is_none_or(|want| want == same);
                Ok(case(
                    name.clone(),
                    ok,
                    json!({"preimages_equal": same, "updates_agree": agrees}),
                ))
            };
            cases.push(run().unwrap_or_else(|e| error_case(name.clone(), &e)));
        }
        cases
    }))
}

// ---------------------------------------------------------------------------
// equivalence

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "test", rename_all = "snake_case", deny_unknown_fields)]
enum EquivalencePayload {
    /// `χ_{Δ₁}(A₁) = χ_{Δ₂}(A₂)`.
    Projector {
        left: EventSpec,
        right: EventSpec,
        expect: bool,
    },
    /// Equal contextual update maps imply equal projectors.
    ContextualProjector {
        left: EventSpec,
        right: EventSpec,
        #[serde(default)]
        maps_equal: Option<bool>,
    },
    BasesCommute {
        observable: JsonMatrix,
        left: BasisSpec,
        right: BasisSpec,
        expect: bool,
    },
}

fn prepare_equivalence(p: EquivalencePayload, ctx: &Ctx) -> Result<Runner> {
    match p {
        EquivalencePayload::Projector {
            left,
            right,
            expect,
        } => {
            let (e1, e2) = (left.build(ctx)?, right.build(ctx)?);
            Ok(Box::new(move |ctx| {
                let got = events_equivalent_projector(&e1, &e2, &ctx.tol);
                let d = e1.projector().matrix().distance(e2.projector().matrix());
                vec![case(
                    "projector equivalence",
                    got == expect,
                    json!({"value": got, "expected": expect, "distance": d}),
                )]
            }))
        }
        EquivalencePayload::ContextualProjector {
            left,
            right,
            maps_equal,
        } => {
            let (e1, e2) = (left.build(ctx)?, right.build(ctx)?);
            if e1.basis().is_none() || e2.basis().is_none() {
                return Err(Error::Validation("contextual events need a basis".into()));
            }
            Ok(Box::new(move |ctx| {
                let tol = &ctx.tol;
                let run = || -> Result<CaseReport> {
                    let m1 = to_update_map(UpdateKind::Contextual, &e1)?;
                    let m2 = to_update_map(UpdateKind::Contextual, &e2)?;
                    let equal = m1.choi_equal(&m2, tol.eq_tol);
                    let holds = contextual_event_equal_implies_same_projector(&e1, &e2, tol)?;
                    let ok = holds && maps_equal.is_none_or(|want| want == equal);
                    Ok(case(
                        "contextual projector",
                        ok,
                        json!({"maps_equal": equal, "choi_distance": m1.choi_distance(&m2), "implication_holds": holds}),
                    ))
                };
                vec![run().unwrap_or_else(|e| error_case("contextual projector", &e))]
            }))
        }
        EquivalencePayload::BasesCommute {
            observable,
            left,
            right,
            expect,
        } => {
            let (_, sd) = ctx.observable(&observable)?;
            let b = left.build(&sd, &ctx.tol)?;
            let c = right.build(&sd, &ctx.tol)?;
            Ok(Box::new(move |ctx| match bases_commute(&b, &c, &ctx.tol) {
                Ok(got) => vec![case(
                    "bases commute",
                    got == expect,
                    json!({"value": got, "expected": expect}),
                )],
                Err(e) => vec![error_case("bases commute", &e)],
            }))
        }
    }
}
