//! Command-line front end.
//!
//! Every subcommand prints one JSON document on stdout and a short human
//! summary on stderr. Numbers in JSON are always canonical rational strings.
//!
//! Characters are written `r,c1,c2[,c3]` in the `(1, H, L, P)` basis, untwisted.
//! The names `O`, `O(n)` and `I_l` are accepted as shorthands.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage or parse error,
//! 3 domain error, 4 search that cannot be bounded.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bounds::BoundVerdict;
use crate::chern::{euler_pairing, make_character, ChernCharacter, ChernError, FanoContext};
use crate::rational::{parse_rational, text, Rational};
use crate::verify::{verify_selected, Verdict, VerifyError};
use crate::walls::{
    enumerate_walls_on_line, AlphaSq, AlphaSqRange, BranchKind, LineQuery, WallCandidate, WallsError,
};

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_UNBOUNDED: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "tiltwall", version, about = "Exact tilt-stability numerics", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Character data, twist, discriminant and slope.
    Char(CharArgs),
    /// Euler pairing chi(left, right).
    Pair(PairArgs),
    /// Numerical walls for a character along a vertical line.
    Walls(WallsArgs),
    /// Run the built-in scenarios against their expected outcomes.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Degree d = H^3, between 1 and 5.
    #[arg(long = "d", allow_hyphen_values = true)]
    degree: i64,
    /// key=value file; keys are flag names without dashes.
    #[arg(long)]
    config: Option<String>,
}

#[derive(Debug, Args)]
struct CharArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    ch: String,
    #[arg(long, allow_hyphen_values = true)]
    twist: Option<String>,
    #[arg(long)]
    delta: bool,
    #[arg(long)]
    slope: bool,
    #[arg(long)]
    assert_lattice: bool,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    left: String,
    #[arg(long, allow_hyphen_values = true)]
    right: String,
}

#[derive(Debug, Args)]
struct WallsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    ch: String,
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    /// Exclusive lower end of the alpha^2 range.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    alpha_sq_min: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha_sq_max: String,
    /// Include alpha_sq_max itself in the range.
    #[arg(long)]
    include_max: bool,
    #[arg(long)]
    rank_cap: Option<u32>,
    /// Print only surviving candidates.
    #[arg(long)]
    survivors_only: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long = "d", allow_hyphen_values = true)]
    degree: Option<i64>,
    #[arg(long)]
    config: Option<String>,
}

/// What a run produced; [`run`] writes it out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn json(value: Value, summary: String, code: u8) -> Self {
        let mut stdout = serde_json::to_string_pretty(&value).expect("json values serialize");
        stdout.push('\n');
        Output { code, stdout, stderr: summary }
    }

    fn error(code: u8, message: impl std::fmt::Display) -> Self {
        Output { code, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

struct Failure(u8, String);

impl Failure {
    fn usage(m: impl std::fmt::Display) -> Self {
        Failure(EXIT_USAGE, m.to_string())
    }
}

impl From<ChernError> for Failure {
    fn from(e: ChernError) -> Self {
        let code = match e {
            ChernError::UnsupportedDegree(_) => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        };
        Failure(code, e.to_string())
    }
}

impl From<WallsError> for Failure {
    fn from(e: WallsError) -> Self {
        let code = match e {
            WallsError::InvalidRange(..) => EXIT_USAGE,
            WallsError::Unbounded { .. } => EXIT_UNBOUNDED,
            _ => EXIT_DOMAIN,
        };
        Failure(code, e.to_string())
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        let code = match e {
            VerifyError::Fixture(_) | VerifyError::MissingFixture { .. } => EXIT_DOMAIN,
            _ => EXIT_USAGE,
        };
        Failure(code, e.to_string())
    }
}

/// Parses `r,c1,c2[,c3]` or one of the named classes.
pub fn parse_character(s: &str, ctx: &FanoContext) -> Result<ChernCharacter, String> {
    let s = s.trim();
    if s == "O" {
        return Ok(ctx.structure_sheaf());
    }
    if s == "I_l" {
        return Ok(ctx.ideal_of_line());
    }
    if let Some(n) = s.strip_prefix("O(").and_then(|r| r.strip_suffix(')')) {
        let n: i64 = n.trim().parse().map_err(|_| format!("invalid twist in `{s}`"))?;
        return Ok(ctx.line_bundle(n));
    }
    let parts = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<Rational>, _>>()
        .map_err(|e| format!("character `{s}`: {e}"))?;
    match parts[..] {
        [a, b, c] => Ok(ChernCharacter::level2(a, b, c)),
        [a, b, c, e] => Ok(ChernCharacter::new(a, b, c, Some(e))),
        _ => Err(format!("character `{s}` needs 3 or 4 comma-separated entries")),
    }
}

fn rational_arg(name: &str, s: &str) -> Result<Rational, Failure> {
    parse_rational(s).map_err(|e| Failure::usage(format!("--{name}: {e}")))
}

fn char_json(v: &ChernCharacter) -> Value {
    json!({
        "ch0": text(&v.ch0),
        "ch1": text(&v.ch1),
        "ch2": text(&v.ch2),
        "ch3": v.ch3.as_ref().map(text),
    })
}

fn bound_json(v: &Option<BoundVerdict>) -> Value {
    match v {
        None => Value::Null,
        Some(b) => json!({
            "status": b.status.as_str(),
            "reason": b.reason.as_str(),
            "value": b.value.as_ref().map(text),
            "bound": b.bound_value.as_ref().map(text),
        }),
    }
}

fn alpha_text(a: &AlphaSq) -> String {
    match a {
        AlphaSq::Exact(x) => text(x),
        AlphaSq::Throughout => "throughout".into(),
    }
}

fn candidate_json(k: &WallCandidate) -> Value {
    let (a, b, c) = k.triple;
    json!({
        "triple": [a.to_string(), b.to_string(), c.to_string()],
        "alpha_sq": alpha_text(&k.alpha_sq),
        "classification": k.tags.iter().map(|t| t.as_str()).collect::<Vec<_>>(),
        "sub": char_json(&k.sub),
        "quotient": char_json(&k.quot),
        "li_sub": bound_json(&k.li_sub),
        "li_quotient": bound_json(&k.li_quot),
    })
}

/// Expands `key=value` lines of a config file into flags.
fn config_flags(path: &str) -> Result<Vec<String>, Failure> {
    let body = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("config {path}: {e}")))?;
    let mut flags = Vec::new();
    for (n, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("config {path}:{}: expected key=value", n + 1)))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        if key == "config" {
            return Err(Failure::usage(format!("config {path}:{}: nested config", n + 1)));
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => {
                flags.push(format!("--{key}"));
                flags.push(value.to_string());
            }
        }
    }
    Ok(flags)
}

/// Splices config-file flags in right after the subcommand so explicit flags win.
fn expand_config(args: &[String]) -> Result<Vec<String>, Failure> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = Some(args.get(i + 1).ok_or_else(|| Failure::usage("--config needs a file"))?.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args.to_vec()) };
    let sub = args.iter().skip(1).position(|a| !a.starts_with('-')).map(|i| i + 1);
    let Some(sub) = sub else { return Ok(args.to_vec()) };
    let mut out = args[..=sub].to_vec();
    out.extend(config_flags(&path)?);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

fn cmd_char(a: &CharArgs) -> Result<Output, Failure> {
    let ctx = FanoContext::new(a.common.degree)?;
    let v = parse_character(&a.ch, &ctx).map_err(Failure::usage)?;
    let v = make_character(v.ch0, v.ch1, v.ch2, v.ch3, a.assert_lattice, &ctx)?;
    let mut out = json!({
        "schema": SCHEMA,
        "command": "char",
        "degree": ctx.degree().to_string(),
        "character": char_json(&v),
        "lattice": v.is_lattice(&ctx),
    });
    let mut summary = format!("character {v} at d = {}\n", ctx.degree());
    if let Some(beta) = &a.twist {
        let beta = rational_arg("twist", beta)?;
        let t = v.twist(beta, &ctx);
        out["beta"] = json!(text(&beta));
        out["twisted"] = char_json(&t);
        let _ = writeln!(summary, "twisted by beta = {}: {t}", text(&beta));
    }
    if a.delta {
        let delta = v.discriminant(&ctx);
        out["delta"] = json!(text(&delta));
        let _ = writeln!(summary, "delta = {}", text(&delta));
    }
    if a.slope {
        let mu = v.mumford_slope();
        out["slope"] = json!(mu.as_ref().map(text).unwrap_or_else(|| "+inf".into()));
        let _ = writeln!(summary, "slope = {}", mu.as_ref().map(text).unwrap_or_else(|| "+inf".into()));
    }
    Ok(Output::json(out, summary, EXIT_OK))
}

fn cmd_pair(a: &PairArgs) -> Result<Output, Failure> {
    let ctx = FanoContext::new(a.common.degree)?;
    let v = parse_character(&a.left, &ctx).map_err(Failure::usage)?;
    let w = parse_character(&a.right, &ctx).map_err(Failure::usage)?;
    let chi = euler_pairing(&v, &w, &ctx)?;
    let out = json!({
        "schema": SCHEMA,
        "command": "pair",
        "degree": ctx.degree().to_string(),
        "left": char_json(&v),
        "right": char_json(&w),
        "chi": text(&chi),
    });
    Ok(Output::json(out, format!("chi({v}, {w}) = {}\n", text(&chi)), EXIT_OK))
}

fn cmd_walls(a: &WallsArgs) -> Result<Output, Failure> {
    let ctx = FanoContext::new(a.common.degree)?;
    let target = parse_character(&a.ch, &ctx).map_err(Failure::usage)?;
    let beta = rational_arg("beta", &a.beta)?;
    let lo = rational_arg("alpha-sq-min", &a.alpha_sq_min)?;
    let hi = rational_arg("alpha-sq-max", &a.alpha_sq_max)?;
    let range = if a.include_max { AlphaSqRange::half_open(lo, hi) } else { AlphaSqRange::open(lo, hi) };
    let query = LineQuery { target: target.truncated(), beta, range, rank_cap: a.rank_cap.map(i128::from) };
    let e = enumerate_walls_on_line(&query, &ctx)?;

    let shown: Vec<Value> =
        e.candidates.iter().filter(|k| !a.survivors_only || k.survives()).map(candidate_json).collect();
    let survivors: Vec<Value> = e
        .survivors()
        .map(|k| json!([k.triple.0.to_string(), k.triple.1.to_string(), k.triple.2.to_string()]))
        .collect();
    let branches: Vec<Value> = e
        .branches
        .iter()
        .map(|b| {
            let (kind, window, integral) = match b.kind {
                BranchKind::Window { window, integral_c } => {
                    ("window", Some(window.to_string()), Some(integral_c.to_string()))
                }
                BranchKind::SignClash => ("sign-clash", None, None),
            };
            json!({
                "a": b.a.map(|x| x.to_string()).unwrap_or_else(|| "any-nonzero".into()),
                "b": b.b.to_string(),
                "kind": kind,
                "window": window,
                "integral_c": integral,
            })
        })
        .collect();
    let range_text = format!("({}, {}{}", text(&lo), text(&hi), if a.include_max { ']' } else { ')' });
    let out = json!({
        "schema": SCHEMA,
        "command": "walls",
        "degree": ctx.degree().to_string(),
        "target": char_json(&query.target),
        "target_twisted": char_json(&e.target_twisted),
        "beta": text(&beta),
        "alpha_sq_range": range_text,
        "candidates": shown,
        "survivors": survivors,
        "branches": branches,
        "certificate": {
            "complete": e.certificate.complete,
            "rank_bound_used": e.certificate.rank_bound_used.to_string(),
            "derivation": e.certificate.derivation.as_str(),
        },
    });
    let mut summary = format!(
        "{} candidates, {} surviving, alpha^2 in {range_text}, beta = {}\n",
        e.candidates.len(),
        survivors.len(),
        text(&beta)
    );
    for k in e.survivors() {
        let _ = writeln!(summary, "  survivor {:?} at alpha^2 = {}", k.triple, alpha_text(&k.alpha_sq));
    }
    Ok(Output::json(out, summary, EXIT_OK))
}

fn cmd_verify(a: &VerifyArgs) -> Result<Output, Failure> {
    if let Some(d) = a.degree {
        FanoContext::new(d)?;
    }
    let reports = verify_selected(a.scenario.as_deref(), a.degree)?;
    let mismatched = reports.iter().filter(|r| r.verdict == Verdict::Mismatch).count();
    let mut summary = String::new();
    for r in &reports {
        let _ = writeln!(
            summary,
            "{:<8} {} d={} ({:.1?})",
            if r.verdict == Verdict::Match { "match" } else { "MISMATCH" },
            r.scenario,
            r.degree,
            r.duration
        );
        for n in &r.notes {
            let _ = writeln!(summary, "         {n}");
        }
    }
    let _ = writeln!(summary, "{} of {} scenarios match", reports.len() - mismatched, reports.len());
    let out = json!({
        "schema": SCHEMA,
        "command": "verify",
        "reports": serde_json::to_value(&reports).expect("reports serialize"),
        "summary": {
            "total": reports.len().to_string(),
            "matched": (reports.len() - mismatched).to_string(),
            "mismatched": mismatched.to_string(),
        },
    });
    let code = if mismatched == 0 { EXIT_OK } else { EXIT_MISMATCH };
    Ok(Output::json(out, summary, code))
}

/// Parses `args` (program name first) and runs the subcommand without touching stdio.
pub fn execute(args: &[String]) -> Output {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(Failure(code, m)) => return Output::error(code, m),
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return Output { code, stdout: String::new(), stderr: e.render().to_string() };
        }
    };
    let result = match &cli.command {
        Command::Char(a) => cmd_char(a),
        Command::Pair(a) => cmd_pair(a),
        Command::Walls(a) => cmd_walls(a),
        Command::Verify(a) => cmd_verify(a),
    };
    result.unwrap_or_else(|Failure(code, m)| Output::error(code, m))
}

/// Runs the CLI and returns the process exit code.
pub fn run(args: &[String]) -> u8 {
    let out = execute(args);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn exec(args: &str) -> Output {
        let v: Vec<String> =
            std::iter::once("tiltwall").chain(args.split_whitespace()).map(String::from).collect();
        execute(&v)
    }

    fn stdout_json(o: &Output) -> Value {
        serde_json::from_str(&o.stdout).unwrap()
    }

    #[test]
    fn char_twist_and_delta() {
        let o = exec("char --d 3 --ch 2,0,-2,0 --twist -1/2");
        assert_eq!(o.code, EXIT_OK);
        assert_eq!(stdout_json(&o)["twisted"]["ch2"], "-5/4");
        let o = exec("char --d 4 --ch 1,-1,2,-2/3 --delta");
        assert_eq!(stdout_json(&o)["delta"], "0");
        let o = exec("char --d 5 --ch 0,0,0,0 --slope");
        let j = stdout_json(&o);
        assert_eq!(j["character"], json!({"ch0": "0", "ch1": "0", "ch2": "0", "ch3": "0"}));
        assert_eq!(j["slope"], "+inf");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exec("char --d 3 --ch 1,x,0").code, EXIT_USAGE);
        assert_eq!(exec("char --d 7 --ch 1,0,0").code, EXIT_USAGE);
        assert_eq!(exec("bogus").code, EXIT_USAGE);
        assert_eq!(exec("char --d 3 --ch 1,0,1/3 --assert-lattice").code, EXIT_DOMAIN);
        assert_eq!(exec("pair --d 3 --left 1,0,0 --right O").code, EXIT_DOMAIN);
        assert_eq!(exec("walls --d 2 --ch 2,2,0 --beta 0 --alpha-sq-max 1").code, EXIT_UNBOUNDED);
        assert_eq!(exec("walls --d 2 --ch 2,2,0 --beta 0 --alpha-sq-max 1 --rank-cap 4").code, EXIT_OK);
        assert_eq!(exec("verify --scenario charge-three-line --d 1").code, EXIT_USAGE);
        assert_eq!(exec("verify --scenario line-pairings --d 4").code, EXIT_OK);
        assert_eq!(exec("--help").code, EXIT_OK);
    }

    #[test]
    fn pairings() {
        let chi = |l: &str, r: &str| {
            stdout_json(&exec(&format!("pair --d 3 --left {l} --right {r}")))["chi"].clone()
        };
        assert_eq!(chi("I_l", "I_l"), "-1");
        assert_eq!(chi("O", "O"), "1");
        assert_eq!(chi("1,0,0,0", "O(2)"), json!("15"));
    }

    #[test]
    fn walls_examples() {
        let j = stdout_json(&exec("walls --d 4 --ch 2,0,-2 --beta -1/2 --alpha-sq-max 1/4"));
        assert_eq!(j["survivors"], json!([]));
        let j = stdout_json(&exec(
            "walls --d 5 --ch 3,0,-3 --beta -1/2 --alpha-sq-max 1/4 --include-max --survivors-only",
        ));
        assert!(j["candidates"].as_array().unwrap().iter().any(|c| c["alpha_sq"] == "1/20"));
        let j = stdout_json(&exec("walls --d 3 --ch 2,0,-2 --beta -1 --alpha-sq-max 1"));
        let torsion = j["candidates"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["triple"] == json!(["0", "0", "0"]))
            .cloned();
        let torsion = torsion.unwrap();
        assert_eq!(torsion["alpha_sq"], "1/3");
        assert!(torsion["classification"].as_array().unwrap().contains(&json!("requires-categorical")));
    }

    #[test]
    fn config_file_supplies_flags() {
        let dir = std::env::temp_dir().join(format!("tiltwall-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# twist query\nd=3\nch=2,0,-2,0\ntwist=-1/2\ndelta=true\nslope=false\n")
            .unwrap();
        let o = exec(&format!("char --config {}", path.display()));
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        let j = stdout_json(&o);
        assert_eq!(j["twisted"]["ch2"], "-5/4");
        assert_eq!(j["delta"], "24");
        assert!(j.get("slope").is_none());
        // explicit flags override the file
        let o = exec(&format!("char --config {} --twist 0", path.display()));
        assert_eq!(stdout_json(&o)["twisted"]["ch2"], "-2");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn parse_character_forms() {
        let c = FanoContext::new(3).unwrap();
        assert_eq!(parse_character("O(-1)", &c).unwrap(), c.line_bundle(-1));
        assert_eq!(parse_character("2, 0, -2", &c).unwrap(), ChernCharacter::level2(int(2), int(0), int(-2)));
        assert!(parse_character("1,2", &c).is_err());
        assert!(parse_character("O(x)", &c).is_err());
    }
}
