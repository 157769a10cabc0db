//! End-to-end scenario runs compared against checked-in expected outcomes.
//!
//! Expected data lives in `fixtures/expected.json` and is never recomputed.
//! Each scenario turns its computation into a small map of canonical strings
//! (lists are compared as sets), so a verdict is exact equality of data.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::bms_ch3_bound_at;
use crate::chern::{solve_character_from_euler_constraints, ChernCharacter, EulerConstraint, FanoContext};
use crate::rational::{int, rat, text, Rational};
use crate::walls::{
    check_rank_three_diophantine, enumerate_axis_destabilizers, enumerate_walls_on_line, semicircle_apex,
    shifted_line_pairings, AlphaSq, AlphaSqRange, BranchKind, LineQuery, Tag, WallEnumeration,
    DIOPHANTINE_DEFAULT_A, DIOPHANTINE_DEFAULT_B,
};

const FIXTURE: &str = include_str!("../fixtures/expected.json");

/// Scenario ids with the degrees each one supports, in report order.
pub const SCENARIOS: &[(&str, &[i64])] = &[
    ("instanton-line-half", &[1, 2, 3, 4, 5]),
    ("instanton-line-one", &[3, 4, 5]),
    ("axis-destabilizers", &[3, 4, 5]),
    ("charge-three-line", &[2, 3, 4, 5]),
    ("numerical-class", &[1, 2, 3, 4, 5]),
    ("rank-three-diophantine", &[5]),
    ("line-pairings", &[3, 4, 5]),
    ("bms-instances", &[1, 2, 3, 4, 5]),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario `{id}` does not support degree {degree}")]
    UnsupportedDegree { id: String, degree: i64 },
    #[error("no expected outcome for `{id}` at degree {degree}")]
    MissingFixture { id: String, degree: i64 },
    #[error("malformed fixture: {0}")]
    Fixture(String),
}

/// A scalar or an unordered list of canonical strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutcomeValue {
    Scalar(String),
    List(Vec<String>),
}

impl OutcomeValue {
    fn list(items: impl IntoIterator<Item = String>) -> Self {
        let mut v: Vec<String> = items.into_iter().collect();
        v.sort();
        v.dedup();
        OutcomeValue::List(v)
    }

    fn normalized(&self) -> Self {
        match self {
            OutcomeValue::Scalar(s) => OutcomeValue::Scalar(s.clone()),
            OutcomeValue::List(v) => OutcomeValue::list(v.iter().cloned()),
        }
    }
}

pub type Outcome = BTreeMap<String, OutcomeValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Match,
    Mismatch,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    #[serde(serialize_with = "degree_text")]
    pub degree: i64,
    pub claim: String,
    pub expected: Outcome,
    pub actual: Outcome,
    pub verdict: Verdict,
    /// Human-readable differences, e.g. `missing-case` / `extra-case`.
    pub notes: Vec<String>,
    /// Wall-clock time; left out of JSON so reports stay byte-identical.
    #[serde(skip)]
    pub duration: Duration,
}

fn degree_text<S: serde::Serializer>(d: &i64, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(d)
}

#[derive(Debug, Deserialize)]
struct FixtureFile {
    schema: u32,
    scenarios: Vec<FixtureEntry>,
}

#[derive(Debug, Deserialize)]
struct FixtureEntry {
    id: String,
    degree: i64,
    claim: String,
    expected: Outcome,
}

fn fixtures() -> Result<Vec<FixtureEntry>, VerifyError> {
    let file: FixtureFile = serde_json::from_str(FIXTURE).map_err(|e| VerifyError::Fixture(e.to_string()))?;
    if file.schema != 1 {
        return Err(VerifyError::Fixture(format!("unsupported schema {}", file.schema)));
    }
    Ok(file.scenarios)
}

fn scalar(s: impl Into<String>) -> OutcomeValue {
    OutcomeValue::Scalar(s.into())
}

fn ctx(d: i64) -> FanoContext {
    FanoContext::new(d).expect("scenario degrees are in range")
}

fn max_survivor(e: &WallEnumeration) -> OutcomeValue {
    let max = e
        .survivors()
        .map(|c| match c.alpha_sq {
            AlphaSq::Exact(x) => Some(x),
            AlphaSq::Throughout => None,
        })
        .max();
    match max {
        None => scalar("none"),
        Some(None) => scalar("throughout"),
        Some(Some(x)) => scalar(text(&x)),
    }
}

fn instanton() -> ChernCharacter {
    ChernCharacter::level2(int(2), int(0), int(-2))
}

fn on_line(target: ChernCharacter, beta: Rational, range: AlphaSqRange, d: i64) -> WallEnumeration {
    let q = LineQuery { target, beta, range, rank_cap: None };
    enumerate_walls_on_line(&q, &ctx(d)).expect("scenario searches are bounded")
}

fn run_instanton_line_half(d: i64) -> Outcome {
    let e = on_line(instanton(), rat(-1, 2), AlphaSqRange::open(int(0), rat(1, 4)), d);
    Outcome::from([("max-survivor-alpha-sq".into(), max_survivor(&e))])
}

fn run_instanton_line_one(d: i64) -> Outcome {
    let e = on_line(instanton(), int(-1), AlphaSqRange::open(int(0), int(1)), d);
    let branch = e.branches.iter().find(|b| b.a == Some(2) && b.b == 1);
    let (window, integral) = match branch.map(|b| b.kind) {
        Some(BranchKind::Window { window, integral_c }) => (window.to_string(), integral_c),
        _ => ("empty".to_string(), 0),
    };
    let torsion = e.find(0, 0, 0).expect("torsion record is always emitted");
    let torsion_alpha = match torsion.alpha_sq {
        AlphaSq::Exact(x) => text(&x),
        AlphaSq::Throughout => "throughout".into(),
    };
    Outcome::from([
        ("survivors".into(), scalar(e.survivors().count().to_string())),
        ("a2-b1-window".into(), scalar(window)),
        ("a2-b1-integral-c".into(), scalar(integral.to_string())),
        ("torsion-alpha-sq".into(), scalar(torsion_alpha)),
        ("torsion-tags".into(), OutcomeValue::list(torsion.tags.iter().map(|t| t.to_string()))),
    ])
}

fn pair_key(p: &ChernCharacter, q: &ChernCharacter) -> String {
    format!("{p}|{q}")
}

/// The tag that decides a case, strongest first.
fn decisive_tag(tags: &std::collections::BTreeSet<Tag>) -> Tag {
    const ORDER: [Tag; 9] = [
        Tag::ZeroPart,
        Tag::Proportional,
        Tag::LatticeViolation,
        Tag::SignClash,
        Tag::DeltaViolation,
        Tag::LiEliminated,
        Tag::RiderEliminated,
        Tag::JhEliminated,
        Tag::RequiresCategorical,
    ];
    ORDER.into_iter().find(|t| tags.contains(t)).unwrap_or(Tag::Survives)
}

fn run_axis_destabilizers(d: i64) -> Outcome {
    let c = ctx(d);
    let target = ChernCharacter::level2(int(-2), int(0), int(2));
    let e = enumerate_axis_destabilizers(&target, &semicircle_apex(&c), &c).expect("target lies on the axis");
    let genuine: Vec<_> = e.genuine().collect();
    Outcome::from([
        ("cases".into(), OutcomeValue::list(genuine.iter().map(|k| pair_key(&k.p, &k.q)))),
        (
            "classes".into(),
            OutcomeValue::list(
                genuine.iter().map(|k| format!("{}={}", pair_key(&k.p, &k.q), decisive_tag(&k.tags))),
            ),
        ),
    ])
}

fn run_charge_three_line(d: i64) -> Outcome {
    let target = ChernCharacter::level2(int(3), int(0), int(-3));
    let e = on_line(target, rat(-1, 2), AlphaSqRange::half_open(int(0), rat(1, 4)), d);
    let sporadic = e
        .candidates
        .iter()
        .filter(|k| k.triple.0 == 3 && k.triple.1 == 1 && !k.has(Tag::LatticeViolation))
        .map(|k| {
            let a2 = match k.alpha_sq {
                AlphaSq::Exact(x) => text(&x),
                AlphaSq::Throughout => "throughout".into(),
            };
            format!("{}@{}={}", k.triple.2, a2, decisive_tag(&k.tags))
        });
    Outcome::from([
        ("sporadic".into(), OutcomeValue::list(sporadic)),
        ("max-survivor-alpha-sq".into(), max_survivor(&e)),
    ])
}

fn run_numerical_class(d: i64) -> Outcome {
    let c = ctx(d);
    let il = c.ideal_of_line();
    let constraints = [
        EulerConstraint::left(c.structure_sheaf(), int(0)),
        EulerConstraint::left(c.line_bundle(1), int(0)),
        EulerConstraint::left(il, int(-2)),
        EulerConstraint::right(il, int(-2)),
    ];
    let value = match solve_character_from_euler_constraints(&constraints, &c) {
        Ok(ch) => ch.to_string(),
        Err(e) => format!("error: {e}"),
    };
    Outcome::from([("character".into(), scalar(value))])
}

fn run_rank_three_diophantine(_d: i64) -> Outcome {
    let sols = check_rank_three_diophantine(DIOPHANTINE_DEFAULT_A, DIOPHANTINE_DEFAULT_B);
    Outcome::from([(
        "solutions".into(),
        OutcomeValue::list(sols.iter().map(|(a, b, c)| format!("({a}, {b}, {c})"))),
    )])
}

fn run_line_pairings(d: i64) -> Outcome {
    let c = ctx(d);
    (1..=3)
        .map(|n| {
            let (x, y) = shifted_line_pairings(n, &c);
            (format!("n={n}"), scalar(format!("{},{}", text(&x), text(&y))))
        })
        .collect()
}

fn run_bms_instances(d: i64) -> Outcome {
    let c = ctx(d);
    let e = instanton();
    [int(0), rat(1, 20)]
        .into_iter()
        .map(|a2| {
            let v = bms_ch3_bound_at(&e, a2, rat(-1, 2), &c)
                .map(|x| text(&x))
                .unwrap_or_else(|e| format!("error: {e}"));
            (format!("alpha-sq={}", text(&a2)), scalar(v))
        })
        .collect()
}

fn runner(id: &str) -> Option<fn(i64) -> Outcome> {
    Some(match id {
        "instanton-line-half" => run_instanton_line_half,
        "instanton-line-one" => run_instanton_line_one,
        "axis-destabilizers" => run_axis_destabilizers,
        "charge-three-line" => run_charge_three_line,
        "numerical-class" => run_numerical_class,
        "rank-three-diophantine" => run_rank_three_diophantine,
        "line-pairings" => run_line_pairings,
        "bms-instances" => run_bms_instances,
        _ => return None,
    })
}

fn supported_degrees(id: &str) -> Option<&'static [i64]> {
    SCENARIOS.iter().find(|(s, _)| *s == id).map(|(_, d)| *d)
}

fn diff_notes(expected: &Outcome, actual: &Outcome) -> Vec<String> {
    let mut notes = Vec::new();
    for (key, exp) in expected {
        match (exp, actual.get(key)) {
            (_, None) => notes.push(format!("{key}: not computed")),
            (OutcomeValue::List(e), Some(OutcomeValue::List(a))) => {
                let label = if key == "cases" { "case" } else { "entry" };
                for x in e.iter().filter(|x| !a.contains(x)) {
                    notes.push(format!("{key}: missing-{label} {x}"));
                }
                for x in a.iter().filter(|x| !e.contains(x)) {
                    notes.push(format!("{key}: extra-{label} {x}"));
                }
            }
            (e, Some(a)) if e != a => notes.push(format!("{key}: expected {e:?}, got {a:?}")),
            _ => {}
        }
    }
    for key in actual.keys().filter(|k| !expected.contains_key(*k)) {
        notes.push(format!("{key}: not in fixture"));
    }
    notes
}

/// Runs one scenario at one degree.
pub fn verify_scenario(id: &str, degree: i64) -> Result<ScenarioReport, VerifyError> {
    let run = runner(id).ok_or_else(|| VerifyError::UnknownScenario(id.to_string()))?;
    let degrees = supported_degrees(id).expect("every runner is listed");
    if !degrees.contains(&degree) {
        return Err(VerifyError::UnsupportedDegree { id: id.to_string(), degree });
    }
    let fixture = fixtures()?
        .into_iter()
        .find(|f| f.id == id && f.degree == degree)
        .ok_or_else(|| VerifyError::MissingFixture { id: id.to_string(), degree })?;
    let start = Instant::now();
    let actual = run(degree);
    let duration = start.elapsed();
    let expected: Outcome = fixture.expected.iter().map(|(k, v)| (k.clone(), v.normalized())).collect();
    let notes = diff_notes(&expected, &actual);
    let verdict = if expected == actual { Verdict::Match } else { Verdict::Mismatch };
    Ok(ScenarioReport {
        scenario: id.to_string(),
        degree,
        claim: fixture.claim,
        expected,
        actual,
        verdict,
        notes,
        duration,
    })
}

/// The `(scenario, degree)` pairs selected by optional filters.
pub fn select(scenario: Option<&str>, degree: Option<i64>) -> Result<Vec<(&'static str, i64)>, VerifyError> {
    if let Some(id) = scenario {
        let degrees = supported_degrees(id).ok_or_else(|| VerifyError::UnknownScenario(id.to_string()))?;
        if let Some(d) = degree {
            if !degrees.contains(&d) {
                return Err(VerifyError::UnsupportedDegree { id: id.to_string(), degree: d });
            }
        }
    }
    Ok(SCENARIOS
        .iter()
        .filter(|(id, _)| scenario.is_none_or(|s| s == *id))
        .flat_map(|(id, ds)| ds.iter().map(move |d| (*id, *d)))
        .filter(|(_, d)| degree.is_none_or(|x| x == *d))
        .collect())
}

fn thread_cap() -> Option<usize> {
    std::env::var("TILTWALL_THREADS").ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Runs the selected scenarios in parallel; reports come back in inventory order.
pub fn verify_selected(
    scenario: Option<&str>,
    degree: Option<i64>,
) -> Result<Vec<ScenarioReport>, VerifyError> {
    let jobs = select(scenario, degree)?;
    let work = || jobs.par_iter().map(|(id, d)| verify_scenario(id, *d)).collect::<Result<Vec<_>, _>>();
    match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| VerifyError::Fixture(e.to_string()))?
            .install(work),
        None => work(),
    }
}

pub fn verify_all() -> Result<Vec<ScenarioReport>, VerifyError> {
    verify_selected(None, None)
}
