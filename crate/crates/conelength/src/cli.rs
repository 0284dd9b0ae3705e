//! Command-line front end: JSON surface documents in, machine-readable
//! results out. Every subcommand drives exactly one library capability.
//!
//! Exit codes: 0 success, 2 validation or schema failure, 3 solver
//! failure (degenerate, inconsistent, singular, or ambiguous data),
//! 64 usage.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{CurveId, Error, Result};
use crate::inversion::{self, LengthSpectrum};
use crate::manifest::{self, BoundaryPath, FamilyKind};
use crate::pants::{BoundaryKind, GeneralizedLength};
use crate::teich::{self, CuffSlot, FamilyGeometry, PantsDecomposition, SurfaceFN};
use crate::xpiece;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "conelength",
    version,
    about = "Closed-form curve lengths on surfaces with cone points, cusps, \
             or boundaries, and their inverse problems",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Surface document to read (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Where to write results; "-" is stdout.
    #[arg(long, global = true, default_value = "-")]
    output: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Acceptance threshold for the checks a command performs itself.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance: f64,
    /// Largest |family index| used by distance and bound checks.
    #[arg(long = "max-twist", global = true, default_value_t = 20)]
    max_twist: i64,
    /// Serialize floats as C99 hexadecimal literals (bit-exact).
    #[arg(long = "hex-floats", global = true)]
    hex_floats: bool,
    /// Worker threads for independent curve evaluations.
    #[arg(long, global = true, default_value_t = 1)]
    parallelism: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Publish the observable length spectrum of a surface document.
    Eval,
    /// Per-side gluing coefficients of every curve family.
    PantsInfo,
    /// Lengths of one curve family over an index range.
    FamilyLengths {
        #[arg(long, default_value_t = 0)]
        curve: usize,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        to: i64,
    },
    /// Recover the twist of one family from a published spectrum.
    InvertTwist {
        #[arg(long, default_value_t = 0)]
        curve: usize,
        /// Verify the recovered twist against this value (tolerance flag).
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<f64>,
    },
    /// Recover one boundary datum from a published spectrum.
    InvertBoundary {
        #[arg(long, default_value_t = 0)]
        boundary: usize,
    },
    /// Recover full coordinates from a published spectrum.
    InvertSurface,
    /// Comparison constants of boundary data; with a surface document,
    /// also verify the length bounds over the curve set.
    Compare {
        /// Boundary data as a comma-separated list (overrides --input).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1..)]
        lambda: Option<Vec<f64>>,
    },
    /// One-sided distance estimates between two surface documents.
    Dist { x1: PathBuf, x2: PathBuf },
    /// Twist-limit diagnostics along one waist.
    Limit {
        #[arg(long, default_value_t = 0)]
        curve: usize,
        #[arg(
            long = "t-sequence",
            value_delimiter = ',',
            default_values_t = [10.0, 20.0, 40.0]
        )]
        t_sequence: Vec<f64>,
        #[arg(long, default_value_t = 3)]
        window: i64,
        #[arg(long, default_value_t = 30)]
        probe: i64,
    },
    /// Maximal curve-count budget for a surface type.
    Budget {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        boundaries: usize,
    },
}

pub fn run() -> i32 {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    64
                }
            };
        }
    };
    match execute(&cli) {
        Ok(rendered) => {
            if let Err(io) = write_output(&cli.output, &rendered) {
                let err = Error::Parse(format!("cannot write output: {io}"));
                emit_error_record(&err);
                return 2;
            }
            0
        }
        Err(err) => {
            emit_error_record(&err);
            if err.is_validation() {
                2
            } else {
                3
            }
        }
    }
}

fn init_logging() {
    let level = match std::env::var("CONELENGTH_LOG").ok().as_deref() {
        Some("info") => log::LevelFilter::Info,
        Some("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Off,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
}

fn emit_error_record(err: &Error) {
    let kind = match err {
        Error::Domain(_) => "domain",
        Error::DegenerateConfiguration(_) => "degenerate_configuration",
        Error::DegenerateInput(_) => "degenerate_input",
        Error::InconsistentSpectrum(_) => "inconsistent_spectrum",
        Error::SingularSystem(_) => "singular_system",
        Error::AmbiguousRecovery(_) => "ambiguous_recovery",
        Error::MissingCurves(_) => "missing_curves",
        Error::TopologyMismatch(_) => "topology_mismatch",
        Error::ExceptionalSurface(_, _) => "exceptional_surface",
        Error::UnsupportedTopology(_) => "unsupported_topology",
        Error::Parse(_) => "parse",
        Error::Schema(_) => "schema",
    };
    let record = serde_json::json!({
        "error": {
            "kind": kind,
            "message": err.to_string(),
            "exit": if err.is_validation() { 2 } else { 3 },
        }
    });
    eprintln!("{record}");
}

fn write_output(target: &str, rendered: &str) -> std::io::Result<()> {
    if target == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(rendered.as_bytes())?;
        out.flush()
    } else {
        std::fs::write(target, rendered)
    }
}

fn execute(cli: &Cli) -> Result<String> {
    if !(cli.tolerance > 0.0 && cli.tolerance <= 1e-4) {
        return Err(Error::Domain(format!(
            "tolerance must lie in (0, 1e-4], got {}",
            cli.tolerance
        )));
    }
    if !(1..=200).contains(&cli.max_twist) {
        return Err(Error::Domain(format!(
            "max-twist must lie in [1, 200], got {}",
            cli.max_twist
        )));
    }
    if cli.parallelism < 1 {
        return Err(Error::Domain("parallelism must be at least 1".into()));
    }
    log::info!("running {}", command_name(&cli.command));
    match &cli.command {
        Command::Eval => cmd_eval(cli),
        Command::PantsInfo => cmd_pants_info(cli),
        Command::FamilyLengths { curve, from, to } => cmd_family_lengths(cli, *curve, *from, *to),
        Command::InvertTwist { curve, expect } => cmd_invert_twist(cli, *curve, *expect),
        Command::InvertBoundary { boundary } => cmd_invert_boundary(cli, *boundary),
        Command::InvertSurface => cmd_invert_surface(cli),
        Command::Compare { lambda } => cmd_compare(cli, lambda.as_deref()),
        Command::Dist { x1, x2 } => cmd_dist(cli, x1, x2),
        Command::Limit {
            curve,
            t_sequence,
            window,
            probe,
        } => cmd_limit(cli, *curve, t_sequence, *window, *probe),
        Command::Budget { genus, boundaries } => cmd_budget(cli, *genus, *boundaries),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval => "eval",
        Command::PantsInfo => "pants-info",
        Command::FamilyLengths { .. } => "family-lengths",
        Command::InvertTwist { .. } => "invert-twist",
        Command::InvertBoundary { .. } => "invert-boundary",
        Command::InvertSurface => "invert-surface",
        Command::Compare { .. } => "compare",
        Command::Dist { .. } => "dist",
        Command::Limit { .. } => "limit",
        Command::Budget { .. } => "budget",
    }
}

// ---------------------------------------------------------------------------
// Surface documents

/// Parsed but not yet validated document content.
#[derive(Debug, Default, Clone)]
pub struct SurfaceDocument {
    pub genus: Option<usize>,
    pub boundaries: Option<Vec<f64>>,
    pub pants: Option<Vec<[CuffSlot; 3]>>,
    pub lengths: Option<Vec<f64>>,
    pub twists: Option<Vec<f64>>,
    pub spectrum: Option<Vec<(String, i64, f64)>>,
}

fn require_input<'c>(cli: &'c Cli) -> Result<&'c Path> {
    cli.input
        .as_deref()
        .ok_or_else(|| Error::Parse("this command needs --input PATH".into()))
}

pub fn load_document(path: &Path) -> Result<SurfaceDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&text)
}

fn parse_document(text: &str) -> Result<SurfaceDocument> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let serde_json::Value::Object(map) = value else {
        return Err(Error::Schema(vec![
            "top level: expected a JSON object".into()
        ]));
    };
    let mut violations: Vec<String> = Vec::new();
    let mut doc = SurfaceDocument::default();

    if let Some(v) = map.get("genus") {
        match v.as_u64() {
            Some(g) => doc.genus = Some(g as usize),
            None => violations.push(format!("genus: expected a nonnegative integer, got {v}")),
        }
    }
    for key in ["boundaries", "lengths", "twists"] {
        if let Some(v) = map.get(key) {
            match parse_float_array(v, key, &mut violations) {
                Some(arr) => match key {
                    "boundaries" => doc.boundaries = Some(arr),
                    "lengths" => doc.lengths = Some(arr),
                    _ => doc.twists = Some(arr),
                },
                None => {}
            }
        }
    }
    if let Some(bs) = &doc.boundaries {
        for (i, b) in bs.iter().enumerate() {
            if let Err(e) = GeneralizedLength::new(*b) {
                violations.push(format!("boundaries[{i}]: {e}"));
            }
        }
    }
    if let Some(v) = map.get("pants") {
        doc.pants = parse_pants(v, &mut violations);
    }
    if let Some(v) = map.get("spectrum") {
        doc.spectrum = parse_spectrum(v, &mut violations);
    }
    if !violations.is_empty() {
        return Err(Error::Schema(violations));
    }
    Ok(doc)
}

fn parse_float_value(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => parse_float_str(s),
        _ => None,
    }
}

fn parse_float_array(
    v: &serde_json::Value,
    key: &str,
    violations: &mut Vec<String>,
) -> Option<Vec<f64>> {
    let serde_json::Value::Array(items) = v else {
        violations.push(format!("{key}: expected an array of reals"));
        return None;
    };
    let mut out = Vec::with_capacity(items.len());
    let mut ok = true;
    for (i, item) in items.iter().enumerate() {
        match parse_float_value(item) {
            Some(x) => out.push(x),
            None => {
                violations.push(format!("{key}[{i}]: expected a real, got {item}"));
                ok = false;
            }
        }
    }
    ok.then_some(out)
}

fn parse_pants(v: &serde_json::Value, violations: &mut Vec<String>) -> Option<Vec<[CuffSlot; 3]>> {
    let serde_json::Value::Array(items) = v else {
        violations.push("pants: expected an array of 3-slot bindings".into());
        return None;
    };
    let mut out = Vec::with_capacity(items.len());
    let mut ok = true;
    for (p, item) in items.iter().enumerate() {
        let serde_json::Value::Array(slots) = item else {
            violations.push(format!("pants[{p}]: expected an array of 3 cuff bindings"));
            ok = false;
            continue;
        };
        if slots.len() != 3 {
            violations.push(format!(
                "pants[{p}]: expected 3 cuff bindings, got {}",
                slots.len()
            ));
            ok = false;
            continue;
        }
        let mut cuffs = [CuffSlot::Curve(0); 3];
        for (s, slot) in slots.iter().enumerate() {
            let parsed = slot
                .as_object()
                .and_then(|o| match (o.get("curve"), o.get("boundary")) {
                    (Some(j), None) => j.as_u64().map(|j| CuffSlot::Curve(j as usize)),
                    (None, Some(b)) => b.as_u64().map(|b| CuffSlot::Boundary(b as usize)),
                    _ => None,
                });
            match parsed {
                Some(c) => cuffs[s] = c,
                None => {
                    violations.push(format!(
                        "pants[{p}][{s}]: expected {{\"curve\": j}} or {{\"boundary\": i}}, \
                         got {slot}"
                    ));
                    ok = false;
                }
            }
        }
        out.push(cuffs);
    }
    ok.then_some(out)
}

fn parse_spectrum(
    v: &serde_json::Value,
    violations: &mut Vec<String>,
) -> Option<Vec<(String, i64, f64)>> {
    let serde_json::Value::Array(items) = v else {
        violations.push("spectrum: expected an array of entries".into());
        return None;
    };
    let mut out = Vec::with_capacity(items.len());
    let mut ok = true;
    for (i, item) in items.iter().enumerate() {
        let entry = item.as_object().and_then(|o| {
            let family = o.get("family")?.as_str()?.to_string();
            let n = o.get("n")?.as_i64()?;
            let length = parse_float_value(o.get("length")?)?;
            Some((family, n, length))
        });
        match entry {
            Some(e) => out.push(e),
            None => {
                violations.push(format!(
                    "spectrum[{i}]: expected {{\"family\": str, \"n\": int, \"length\": real}}, \
                     got {item}"
                ));
                ok = false;
            }
        }
    }
    ok.then_some(out)
}

fn document_decomposition(doc: &SurfaceDocument) -> Result<PantsDecomposition> {
    let mut violations = Vec::new();
    if doc.genus.is_none() {
        violations.push("genus: required".into());
    }
    if doc.pants.is_none() {
        violations.push("pants: required".into());
    }
    if !violations.is_empty() {
        return Err(Error::Schema(violations));
    }
    let pants = doc.pants.clone().expect("checked above");
    let boundary_count = doc.boundaries.as_ref().map(|b| b.len()).unwrap_or_else(|| {
        pants
            .iter()
            .flatten()
            .filter(|s| matches!(s, CuffSlot::Boundary(_)))
            .count()
    });
    PantsDecomposition::new(doc.genus.expect("checked above"), boundary_count, pants)
}

fn document_surface(doc: &SurfaceDocument) -> Result<SurfaceFN> {
    let decomposition = document_decomposition(doc)?;
    let mut violations = Vec::new();
    if doc.boundaries.is_none() {
        violations.push("boundaries: required".into());
    }
    if doc.lengths.is_none() {
        violations.push("lengths: required".into());
    }
    if doc.twists.is_none() {
        violations.push("twists: required".into());
    }
    if !violations.is_empty() {
        return Err(Error::Schema(violations));
    }
    let boundaries = doc
        .boundaries
        .as_ref()
        .expect("checked above")
        .iter()
        .map(|b| GeneralizedLength::new(*b))
        .collect::<Result<Vec<_>>>()?;
    SurfaceFN::new(
        decomposition,
        boundaries,
        doc.lengths.clone().expect("checked above"),
        doc.twists.clone().expect("checked above"),
    )
}

fn document_spectrum(doc: &SurfaceDocument) -> Result<LengthSpectrum> {
    let entries = doc
        .spectrum
        .as_ref()
        .ok_or_else(|| Error::Schema(vec!["spectrum: required".into()]))?;
    let mut spectrum = LengthSpectrum::new();
    for (family, n, length) in entries {
        spectrum.insert(CurveId::new(family.clone(), *n), *length)?;
    }
    Ok(spectrum)
}

// ---------------------------------------------------------------------------
// Float interchange

fn fmt_float(x: f64, hex: bool) -> String {
    if hex {
        hex_float(x)
    } else {
        format!("{x:.16e}")
    }
}

/// C99 hexadecimal float literal; normalized values print all 13 fraction
/// digits, so every emitted literal encodes 53 significant bits exactly.
fn hex_float(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0x0p+0".into()
        } else {
            "0x0p+0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp_field == 0 {
        format!("{sign}0x0.{frac:013x}p-1022")
    } else {
        format!("{sign}0x1.{frac:013x}p{:+}", exp_field - 1023)
    }
}

/// Accepts decimal literals and the hexadecimal forms emitted above (plus
/// shorter hand-written fractions); rejects hex mantissas beyond 53
/// significant bits instead of rounding silently.
fn parse_float_str(s: &str) -> Option<f64> {
    let t = s.trim();
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, t.strip_prefix('+').unwrap_or(t)),
    };
    let Some(hex) = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X")) else {
        return rest.parse::<f64>().ok().map(|v| sign * v);
    };
    let (mantissa, exponent) = hex.split_once(['p', 'P'])?;
    let exponent: i64 = exponent.parse().ok()?;
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits.len() > 28 {
        return None;
    }
    let m = u128::from_str_radix(&digits, 16).ok()?;
    if m == 0 {
        return Some(sign * 0.0);
    }
    let scale = exponent - 4 * frac_part.len() as i64;
    let width = 128 - i64::from(m.leading_zeros());
    let shift = width - 53;
    let (mant53, scale53) = if shift > 0 {
        if m & ((1u128 << shift) - 1) != 0 {
            return None;
        }
        (m >> shift, scale + shift)
    } else {
        (m << (-shift), scale + shift)
    };
    Some(sign * ldexp(mant53 as u64 as f64, scale53))
}

/// `x * 2^e` scaled in chunks so a single `powi` never overflows to
/// infinity or underflows to zero on the way to a representable result.
fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 0 {
        let step = e.min(1000);
        x *= 2f64.powi(step as i32);
        e -= step;
    }
    while e < 0 {
        let step = (-e).min(1000);
        x /= 2f64.powi(step as i32);
        e += step;
    }
    x
}

// ---------------------------------------------------------------------------
// Output rendering

/// Minimal JSON value with crate-controlled float formatting.
enum JVal {
    Int(i64),
    Float(f64),
    Str(String),
    Bool(bool),
    Arr(Vec<JVal>),
    Obj(Vec<(&'static str, JVal)>),
}

impl JVal {
    fn render(&self, hex: bool, out: &mut String) {
        match self {
            JVal::Int(i) => out.push_str(&i.to_string()),
            JVal::Float(x) => {
                if hex {
                    out.push_str(&format!("{}", serde_json::Value::String(hex_float(*x))));
                } else {
                    out.push_str(&fmt_float(*x, false));
                }
            }
            JVal::Str(s) => out.push_str(&serde_json::Value::String(s.clone()).to_string()),
            JVal::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            JVal::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.render(hex, out);
                }
                out.push(']');
            }
            JVal::Obj(fields) => {
                out.push('{');
                for (i, (key, val)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&format!("\"{key}\":"));
                    val.render(hex, out);
                }
                out.push('}');
            }
        }
    }

    fn to_json(&self, hex: bool) -> String {
        let mut out = String::new();
        self.render(hex, &mut out);
        out.push('\n');
        out
    }
}

/// A rectangular result: one header, typed rows. Renders to any format.
struct Rows {
    header: Vec<&'static str>,
    rows: Vec<Vec<JVal>>,
}

impl Rows {
    fn render(&self, format: Format, hex: bool) -> String {
        match format {
            Format::Json => {
                let items = self
                    .rows
                    .iter()
                    .map(|row| {
                        JVal::Obj(
                            self.header
                                .iter()
                                .zip(row)
                                .map(|(k, v)| (*k, v.shallow_copy()))
                                .collect(),
                        )
                    })
                    .collect();
                JVal::Arr(items).to_json(hex)
            }
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|v| v.to_cell(hex)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Table => {
                let mut cells: Vec<Vec<String>> =
                    vec![self.header.iter().map(|s| s.to_string()).collect()];
                for row in &self.rows {
                    cells.push(row.iter().map(|v| v.to_cell(hex)).collect());
                }
                let widths: Vec<usize> = (0..self.header.len())
                    .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
                    .collect();
                let mut out = String::new();
                for row in &cells {
                    let line: Vec<String> = row
                        .iter()
                        .zip(&widths)
                        .map(|(cell, w)| format!("{cell:<w$}"))
                        .collect();
                    out.push_str(line.join("  ").trim_end());
                    out.push('\n');
                }
                out
            }
        }
    }
}

impl JVal {
    fn shallow_copy(&self) -> JVal {
        match self {
            JVal::Int(i) => JVal::Int(*i),
            JVal::Float(x) => JVal::Float(*x),
            JVal::Str(s) => JVal::Str(s.clone()),
            JVal::Bool(b) => JVal::Bool(*b),
            JVal::Arr(items) => JVal::Arr(items.iter().map(|i| i.shallow_copy()).collect()),
            JVal::Obj(fields) => {
                JVal::Obj(fields.iter().map(|(k, v)| (*k, v.shallow_copy())).collect())
            }
        }
    }

    fn to_cell(&self, hex: bool) -> String {
        match self {
            JVal::Int(i) => i.to_string(),
            JVal::Float(x) => fmt_float(*x, hex),
            JVal::Str(s) => s.clone(),
            JVal::Bool(b) => b.to_string(),
            JVal::Arr(_) | JVal::Obj(_) => {
                let mut out = String::new();
                self.render(hex, &mut out);
                out
            }
        }
    }
}

fn surface_to_jval(x: &SurfaceFN) -> Vec<(&'static str, JVal)> {
    let pants = x
        .decomposition
        .pants
        .iter()
        .map(|cuffs| {
            JVal::Arr(
                cuffs
                    .iter()
                    .map(|slot| match slot {
                        CuffSlot::Boundary(b) => {
                            JVal::Obj(vec![("boundary", JVal::Int(*b as i64))])
                        }
                        CuffSlot::Curve(j) => JVal::Obj(vec![("curve", JVal::Int(*j as i64))]),
                    })
                    .collect(),
            )
        })
        .collect();
    vec![
        ("genus", JVal::Int(x.decomposition.genus as i64)),
        (
            "boundaries",
            JVal::Arr(
                x.boundaries
                    .iter()
                    .map(|b| JVal::Float(b.value()))
                    .collect(),
            ),
        ),
        ("pants", JVal::Arr(pants)),
        (
            "lengths",
            JVal::Arr(x.lengths.iter().map(|l| JVal::Float(*l)).collect()),
        ),
        (
            "twists",
            JVal::Arr(x.twists.iter().map(|t| JVal::Float(*t)).collect()),
        ),
    ]
}

fn spectrum_rows(spectrum: &LengthSpectrum) -> Rows {
    Rows {
        header: vec!["family", "n", "length"],
        rows: spectrum
            .iter()
            .map(|(id, l)| {
                vec![
                    JVal::Str(id.family.clone()),
                    JVal::Int(id.index),
                    JVal::Float(l),
                ]
            })
            .collect(),
    }
}

fn kind_name(gl: GeneralizedLength) -> &'static str {
    match gl.kind() {
        BoundaryKind::ConePoint => "cone",
        BoundaryKind::Cusp => "cusp",
        BoundaryKind::Geodesic => "geodesic",
    }
}

// ---------------------------------------------------------------------------
// Commands

fn cmd_eval(cli: &Cli) -> Result<String> {
    let doc = load_document(require_input(cli)?)?;
    let surface = document_surface(&doc)?;
    let spectrum = teich::forward_spectrum(&surface)?;
    match cli.format {
        Format::Json => {
            let fams = manifest::family_structures(&surface.decomposition);
            let families = fams
                .iter()
                .map(|fs| {
                    let i0 = manifest::family_window_start(surface.twists[fs.curve]);
                    JVal::Obj(vec![
                        ("curve", JVal::Int(fs.curve as i64)),
                        (
                            "kind",
                            JVal::Str(
                                match fs.kind {
                                    FamilyKind::Cross { .. } => "cross",
                                    FamilyKind::SelfGlued { .. } => "torus",
                                }
                                .into(),
                            ),
                        ),
                        ("window", JVal::Arr(vec![JVal::Int(i0), JVal::Int(i0 + 2)])),
                    ])
                })
                .collect();
            let spectrum_items = spectrum
                .iter()
                .map(|(id, l)| {
                    JVal::Obj(vec![
                        ("family", JVal::Str(id.family.clone())),
                        ("n", JVal::Int(id.index)),
                        ("length", JVal::Float(l)),
                    ])
                })
                .collect();
            let mut fields = surface_to_jval(&surface);
            fields.push(("families", JVal::Arr(families)));
            fields.push(("spectrum", JVal::Arr(spectrum_items)));
            Ok(JVal::Obj(fields).to_json(cli.hex_floats))
        }
        _ => Ok(spectrum_rows(&spectrum).render(cli.format, cli.hex_floats)),
    }
}

fn cmd_pants_info(cli: &Cli) -> Result<String> {
    let doc = load_document(require_input(cli)?)?;
    let surface = document_surface(&doc)?;
    let fams = manifest::family_structures(&surface.decomposition);
    let mut rows = Vec::new();
    for fs in &fams {
        match teich::family_geometry(&surface, fs) {
            FamilyGeometry::Cross(spec) => {
                let (ca, cb) = xpiece::FamilyEvaluator::side_coefficients(&spec)?;
                for (side, c) in [("a", ca), ("b", cb)] {
                    rows.push(vec![
                        JVal::Int(fs.curve as i64),
                        JVal::Str("cross".into()),
                        JVal::Str(side.into()),
                        JVal::Float(c.m),
                        JVal::Float(c.s),
                        JVal::Float(c.u),
                        JVal::Float(c.v),
                    ]);
                }
            }
            FamilyGeometry::Torus(spec) => {
                let h0 = xpiece::torus_height(spec.waist, spec.boundary)?;
                rows.push(vec![
                    JVal::Int(fs.curve as i64),
                    JVal::Str("torus".into()),
                    JVal::Str("self".into()),
                    JVal::Float(spec.boundary.trace()),
                    JVal::Float(spec.boundary.sine_trace()),
                    JVal::Float((h0 / 2.0).cosh()),
                    JVal::Float(h0),
                ]);
            }
        }
    }
    Ok(Rows {
        header: vec!["curve", "kind", "side", "m", "s", "u", "v"],
        rows,
    }
    .render(cli.format, cli.hex_floats))
}

fn cmd_family_lengths(cli: &Cli, curve: usize, from: i64, to: i64) -> Result<String> {
    let doc = load_document(require_input(cli)?)?;
    let surface = document_surface(&doc)?;
    let curves = surface.decomposition.curve_count();
    if curve >= curves {
        return Err(Error::Domain(format!(
            "curve {curve} out of range, only {curves} exist"
        )));
    }
    if from > to {
        return Err(Error::Domain(format!("empty index range {from}..={to}")));
    }
    let fams = manifest::family_structures(&surface.decomposition);
    let mut spectrum = LengthSpectrum::new();
    spectrum.insert(manifest::gamma_id(curve), surface.lengths[curve])?;
    for n in from..=to {
        spectrum.insert(
            manifest::family_id(curve, n),
            teich::family_member_length(&surface, &fams[curve], n)?,
        )?;
    }
    match cli.format {
        Format::Json => {
            let mut fields = surface_to_jval(&surface);
            let spectrum_items = spectrum
                .iter()
                .map(|(id, l)| {
                    JVal::Obj(vec![
                        ("family", JVal::Str(id.family.clone())),
                        ("n", JVal::Int(id.index)),
                        ("length", JVal::Float(l)),
                    ])
                })
                .collect();
            fields.push(("spectrum", JVal::Arr(spectrum_items)));
            Ok(JVal::Obj(fields).to_json(cli.hex_floats))
        }
        _ => Ok(spectrum_rows(&spectrum).render(cli.format, cli.hex_floats)),
    }
}

/// Twist solve over a published window; torus families are recognized from
/// the pants graph when the document carries one, otherwise the family is
/// treated as crossing an X-piece.
fn cmd_invert_twist(cli: &Cli, curve: usize, expect: Option<f64>) -> Result<String> {
    let doc = load_document(require_input(cli)?)?;
    let spectrum = document_spectrum(&doc)?;
    let waist = spectrum
        .get(&manifest::gamma_id(curve))
        .ok_or_else(|| Error::MissingCurves(vec![manifest::gamma_id(curve)]))?;
    let is_torus = match (&doc.genus, &doc.pants) {
        (Some(_), Some(_)) => {
            let d = document_decomposition(&doc)?;
            if curve >= d.curve_count() {
                return Err(Error::Domain(format!(
                    "curve {curve} out of range, only {} exist",
                    d.curve_count()
                )));
            }
            matches!(
                manifest::family_structures(&d)[curve].kind,
                FamilyKind::SelfGlued { .. }
            )
        }
        _ => false,
    };
    let (i0, [l0, l1, l2]) = inversion::family_window(&spectrum, &manifest::family_name(curve))?;
    let t_rel = if is_torus {
        inversion::solve_torus_twist(l0, l1, l2, waist)?
    } else {
        inversion::solve_twist(l0, l1, l2, waist)?
    };
    let twist = t_rel - i0 as f64;
    if let Some(want) = expect {
        if (twist - want).abs() > cli.tolerance {
            return Err(Error::InconsistentSpectrum(format!(
                "recovered twist {twist} differs from expected {want} by more than {}",
                cli.tolerance
            )));
        }
    }
    let mut row = vec![
        JVal::Int(curve as i64),
        JVal::Str(if is_torus { "torus" } else { "cross" }.into()),
        JVal::Int(i0),
        JVal::Float(twist),
    ];
    let mut header = vec!["curve", "kind", "window_start", "twist"];
    if let Some(want) = expect {
        header.push("expected");
        row.push(JVal::Float(want));
    }
    Ok(Rows {
        header,
        rows: vec![row],
    }
    .render(cli.format, cli.hex_floats))
}

fn cmd_invert_boundary(cli: &Cli, boundary: usize) -> Result<String> {
    let doc = load_document(require_input(cli)?)?;
    let decomposition = document_decomposition(&doc)?;
    let spectrum = document_spectrum(&doc)?;
    if boundary >= decomposition.boundary_count {
        return Err(Error::Domain(format!(
            "boundary {boundary} out of range, only {} exist",
            decomposition.boundary_count
        )));
    }
    let bounds = manifest::boundary_structures(&decomposition)?;
    let bs = &bounds[boundary];
    let mut rows = Vec::new();
    match bs.path {
        BoundaryPath::Torus { curve } => {
            let waist = spectrum
                .get(&manifest::gamma_id(curve))
                .ok_or_else(|| Error::MissingCurves(vec![manifest::gamma_id(curve)]))?;
            let (_, [l0, l1, l2]) =
                inversion::family_window(&spectrum, &manifest::family_name(curve))?;
            let t_rel = inversion::solve_torus_twist(l0, l1, l2, waist)?;
            let lam = inversion::recover_torus_angle(waist, l0, t_rel)?;
            rows.push(vec![
                JVal::Int(boundary as i64),
                JVal::Str("torus".into()),
                JVal::Float(lam.value()),
                JVal::Str(kind_name(lam).into()),
            ]);
        }
        BoundaryPath::Cross {
            anchor,
            companion,
            partner_target,
        } => {
            let mut needed = vec![manifest::gamma_id(anchor), manifest::gamma_id(companion)];
            if let CuffSlot::Curve(i) = partner_target {
                needed.push(manifest::gamma_id(i));
            }
            for k in 0..4 {
                for i in 0..2 {
                    needed.push(manifest::bc_id(boundary, k, i));
                }
            }
            let values = spectrum.require(&needed)?;
            let waists = manifest::bc_row_waists(values[0]);
            let m3 = GeneralizedLength::new(values[1])
                .expect("spectrum lengths are positive")
                .trace();
            let m3p = manifest::bc_far_companion(m3).trace();
            let row_values = &values[needed.len() - 8..];
            let mut observations = [inversion::BcObservation {
                waist: 0.0,
                twist: 0.0,
                l_delta: 0.0,
                l_delta1: 0.0,
            }; 4];
            for k in 0..4 {
                observations[k] = inversion::BcObservation {
                    waist: waists[k],
                    twist: manifest::BC_ROW_TWISTS[k],
                    l_delta: row_values[2 * k],
                    l_delta1: row_values[2 * k + 1],
                };
            }
            let unknowns = inversion::solve_bc_system(&observations)?;
            let candidates = inversion::recover_cone_candidates(&unknowns, m3, m3p)?;
            let (u, up) = match partner_target {
                CuffSlot::Curve(i) => {
                    let want = GeneralizedLength::new(values[2])
                        .expect("spectrum lengths are positive")
                        .trace();
                    let best = candidates
                        .iter()
                        .copied()
                        .min_by(|l, r| {
                            let gl = (want - l.1).abs();
                            let gr = (want - r.1).abs();
                            gl.total_cmp(&gr)
                        })
                        .expect("candidate list is nonempty");
                    if (want - best.1).abs() > 1e-6 * want.max(1.0) {
                        return Err(Error::InconsistentSpectrum(format!(
                            "far cuff trace {want} is not reproduced by the boundary system \
                             (best candidate {})",
                            best.1
                        )));
                    }
                    let _ = i;
                    best
                }
                CuffSlot::Boundary(_) => candidates[0],
            };
            let lam = inversion::trace_to_length(u)?;
            rows.push(vec![
                JVal::Int(boundary as i64),
                JVal::Str("cross".into()),
                JVal::Float(lam.value()),
                JVal::Str(kind_name(lam).into()),
            ]);
            if let CuffSlot::Boundary(bp) = partner_target {
                let lam_p = inversion::trace_to_length(up)?;
                rows.push(vec![
                    JVal::Int(bp as i64),
                    JVal::Str("cross".into()),
                    JVal::Float(lam_p.value()),
                    JVal::Str(kind_name(lam_p).into()),
                ]);
            }
        }
    }
    Ok(Rows {
        header: vec!["boundary", "path", "lambda", "kind"],
        rows,
    }
    .render(cli.format, cli.hex_floats))
}

fn cmd_invert_surface(cli: &Cli) -> Result<String> {
    let doc = load_document(require_input(cli)?)?;
    let decomposition = document_decomposition(&doc)?;
    let spectrum = document_spectrum(&doc)?;
    let surface = if cli.parallelism == 1 {
        inversion::recover_surface(&decomposition, &spectrum)?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.parallelism)
            .build()
            .map_err(|e| Error::Domain(format!("cannot build worker pool: {e}")))?;
        pool.install(|| inversion::recover_surface(&decomposition, &spectrum))?
    };
    match cli.format {
        Format::Json => Ok(JVal::Obj(surface_to_jval(&surface)).to_json(cli.hex_floats)),
        _ => {
            let mut rows = Vec::new();
            for (b, lam) in surface.boundaries.iter().enumerate() {
                rows.push(vec![
                    JVal::Str("boundary".into()),
                    JVal::Int(b as i64),
                    JVal::Float(lam.value()),
                    JVal::Str(kind_name(*lam).into()),
                ]);
            }
            for (j, l) in surface.lengths.iter().enumerate() {
                rows.push(vec![
                    JVal::Str("length".into()),
                    JVal::Int(j as i64),
                    JVal::Float(*l),
                    JVal::Str(String::new()),
                ]);
            }
            for (j, t) in surface.twists.iter().enumerate() {
                rows.push(vec![
                    JVal::Str("twist".into()),
                    JVal::Int(j as i64),
                    JVal::Float(*t),
                    JVal::Str(String::new()),
                ]);
            }
            Ok(Rows {
                header: vec!["coordinate", "index", "value", "kind"],
                rows,
            }
            .render(cli.format, cli.hex_floats))
        }
    }
}

fn cmd_compare(cli: &Cli, lambda: Option<&[f64]>) -> Result<String> {
    let (constants, report) = match lambda {
        Some(values) => {
            let gls = values
                .iter()
                .map(|v| GeneralizedLength::new(*v))
                .collect::<Result<Vec<_>>>()?;
            (teich::comparison_constants(&gls), None)
        }
        None => {
            let doc = load_document(require_input(cli)?)?;
            let surface = document_surface(&doc)?;
            let report = teich::verify_length_bounds(&surface, cli.max_twist)?;
            (report.constants, Some(report))
        }
    };
    let mut header = vec!["c", "d"];
    let mut row = vec![JVal::Float(constants.c), JVal::Float(constants.d)];
    if let Some(r) = report {
        header.extend([
            "checked",
            "worst_additive_gap",
            "worst_ratio",
            "additive_ok",
            "ratio_ok",
        ]);
        row.extend([
            JVal::Int(r.checked as i64),
            JVal::Float(r.worst_additive_gap),
            JVal::Float(r.worst_ratio),
            JVal::Bool(r.additive_ok),
            JVal::Bool(r.ratio_ok),
        ]);
    }
    Ok(Rows {
        header,
        rows: vec![row],
    }
    .render(cli.format, cli.hex_floats))
}

fn cmd_dist(cli: &Cli, x1: &Path, x2: &Path) -> Result<String> {
    let s1 = document_surface(&load_document(x1)?)?;
    let s2 = document_surface(&load_document(x2)?)?;
    let forward = teich::thurston_distance_lb(&s1, &s2, cli.max_twist)?;
    let reverse = teich::thurston_distance_lb(&s2, &s1, cli.max_twist)?;
    let gap = teich::almost_isometry_gap(&s1, &s2, cli.max_twist)?;
    let bound = 2.0 * teich::comparison_constants(&s1.boundaries).c.ln();
    Ok(Rows {
        header: vec!["forward", "reverse", "cusped_gap", "gap_bound"],
        rows: vec![vec![
            JVal::Float(forward),
            JVal::Float(reverse),
            JVal::Float(gap),
            JVal::Float(bound),
        ]],
    }
    .render(cli.format, cli.hex_floats))
}

fn cmd_limit(
    cli: &Cli,
    curve: usize,
    t_sequence: &[f64],
    window: i64,
    probe: i64,
) -> Result<String> {
    let doc = load_document(require_input(cli)?)?;
    let surface = document_surface(&doc)?;
    let samples = teich::boundary_convergence(&surface, curve, t_sequence, window, probe)?;
    let rows = samples
        .iter()
        .map(|s| {
            vec![
                JVal::Float(s.t),
                JVal::Float(s.profile_gap),
                JVal::Float(s.constant_rel_gap),
                JVal::Bool(s.constant_rel_gap <= cli.tolerance),
            ]
        })
        .collect();
    Ok(Rows {
        header: vec!["t", "profile_gap", "constant_rel_gap", "constant_converged"],
        rows,
    }
    .render(cli.format, cli.hex_floats))
}

fn cmd_budget(cli: &Cli, genus: usize, boundaries: usize) -> Result<String> {
    let budget = inversion::curve_budget(genus, boundaries)?;
    match cli.format {
        Format::Table => Ok(format!("{budget}\n")),
        Format::Csv => Ok(format!("budget\n{budget}\n")),
        Format::Json => Ok(JVal::Obj(vec![
            ("genus", JVal::Int(genus as i64)),
            ("boundaries", JVal::Int(boundaries as i64)),
            ("budget", JVal::Int(budget as i64)),
        ])
        .to_json(cli.hex_floats)),
    }
}
