//! The `galois-lines` command line.
//!
//! Every command prints either a text summary or, with `--json`, one JSON
//! document carrying `"schemaVersion": 1`. Exit codes: 0 when every
//! certificate passes, 1 when one fails, 2 for usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::curve::{curve_from_pq, curve_from_roots, EllipticCurveModel};
use crate::error::Error;
use crate::exact::Scalar;
use crate::galois::{arrangement_report, ArrangementReport, GaloisCatalog, GaloisLineRecord, LineLabel, DEFAULT_TOL};
use crate::monodromy::{is_irreducible, line_image, sample_candidates, verify_plane_galois_point, MonodromyReport};
use crate::projection::{classify_center, project_curve, CenterClass, PlaneCurveRecord};
use crate::projective::ProjPoint;
use crate::torus::{diamond_check, order_four_subgroups, AutomorphismGroup, ComplexLattice, GroupKind};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 20_240_229;
/// Candidate points tried when the center is off every Galois line.
pub const SAMPLED_CANDIDATES: usize = 25;

#[derive(Parser, Debug)]
#[command(name = "galois-lines", version, about = "Galois lines of elliptic quartic curves in P^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Numeric tolerance, in (0, 1e-4].
    #[arg(long, global = true, default_value_t = DEFAULT_TOL, value_parser = parse_tol)]
    tol: f64,
    /// Seed for every random choice; identical seeds give identical output.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build, certify and cross-check every Galois line of the curve.
    Analyze(CurveArgs),
    /// Certify a single line.
    #[command(group(ArgGroup::new("line").required(true).args(["edge", "z4"])))]
    VerifyLine {
        #[command(flatten)]
        curve: CurveArgs,
        /// Tetrahedron edge `i,j` (vertices 0..3).
        #[arg(long, value_name = "I,J")]
        edge: Option<String>,
        /// Cyclic line `m,n` (j = 1728 only).
        #[arg(long, value_name = "M,N")]
        z4: Option<String>,
    },
    /// Project the curve from a point of P^3 and describe the plane image.
    Project {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, value_name = "X:Y:Z:W")]
        center: String,
        /// Test plane Galois points: the images of the Galois lines through
        /// the center, or sampled points when there are none.
        #[arg(long)]
        verify_galois_point: bool,
    },
    /// List the order-4 automorphism groups of a torus whose quotient is P^1.
    #[command(group(ArgGroup::new("lattice").required(true).args(["omega", "square_lattice"])))]
    EnumerateGroups {
        /// Lattice parameter `re,im` with `im > 0`.
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
        omega: Option<String>,
        /// Shorthand for `--omega 0,1`.
        #[arg(long)]
        square_lattice: bool,
    },
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("curve").required(true).args(["roots", "pq"])))]
struct CurveArgs {
    /// Roots `e1,e2,e3` of 4x^3 + px + q, summing to zero.
    #[arg(long, value_name = "E1,E2,E3", allow_hyphen_values = true)]
    roots: Option<String>,
    /// Coefficients `p,q`; the cubic must split over the rationals.
    #[arg(long, value_name = "P,Q", allow_hyphen_values = true)]
    pq: Option<String>,
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if t > 0.0 && t <= 1e-4 {
        Ok(t)
    } else {
        Err(format!("tolerance must lie in (0, 1e-4], got {t}"))
    }
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: String) -> Self {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: msg,
        }
    }
}

/// Run the command line on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            return Outcome {
                code: 0,
                stdout: e.to_string(),
                stderr: String::new(),
            }
        }
        Err(e) => return Outcome::usage(e.render().to_string()),
    };
    let result = match &cli.command {
        Command::Analyze(c) => analyze(&cli, c),
        Command::VerifyLine { curve, edge, z4 } => verify_line(&cli, curve, edge.as_deref(), z4.as_deref()),
        Command::Project {
            curve,
            center,
            verify_galois_point,
        } => project(&cli, curve, center, *verify_galois_point),
        Command::EnumerateGroups { omega, square_lattice } => enumerate(&cli, omega.as_deref(), *square_lattice),
    };
    let (passed, json, text) = match result {
        Ok(r) => r,
        Err(Failure::Usage(msg)) => return Outcome::usage(format!("error: {msg}\n")),
        Err(Failure::Runtime(e)) => {
            return Outcome {
                code: 1,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    let body = if cli.json {
        let mut s = serde_json::to_string_pretty(&json).expect("reports serialize");
        s.push('\n');
        s
    } else {
        text
    };
    let code = if passed { 0 } else { 1 };
    match &cli.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Outcome {
                code,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => Outcome {
                code: 1,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            },
        },
        None => Outcome {
            code,
            stdout: body,
            stderr: String::new(),
        },
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_)
            | Error::Parse(_)
            | Error::SingularCurve(_)
            | Error::NotWeierstrassNormal(_)
            | Error::InvalidCenter(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other),
        }
    }
}

type CmdResult = Result<(bool, serde_json::Value, String), Failure>;

fn parse_list<const N: usize>(s: &str, sep: char, what: &str) -> Result<[Scalar; N], Failure> {
    let parts: Vec<&str> = s.split(sep).collect();
    if parts.len() != N {
        return Err(Failure::Usage(format!("{what} needs {N} values separated by '{sep}', got {s:?}")));
    }
    let vals = parts
        .iter()
        .map(|p| p.parse::<Scalar>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(vals.try_into().expect("length checked"))
}

fn parse_index_pair(s: &str, what: &str) -> Result<(i64, i64), Failure> {
    let bad = || Failure::Usage(format!("{what} needs two integers `a,b`, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn build_curve(c: &CurveArgs) -> Result<EllipticCurveModel, Failure> {
    Ok(match (&c.roots, &c.pq) {
        (Some(r), _) => {
            let [e1, e2, e3] = parse_list::<3>(r, ',', "--roots")?;
            curve_from_roots(e1, e2, e3)?
        }
        (None, Some(pq)) => {
            let [p, q] = parse_list::<2>(pq, ',', "--pq")?;
            curve_from_pq(p, q)?
        }
        (None, None) => return Err(Failure::Usage("give --roots or --pq".into())),
    })
}

fn envelope(command: &str, cli: &Cli, payload: serde_json::Value) -> serde_json::Value {
    let mut v = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": command,
        "tolerance": cli.tol,
        "seed": cli.seed,
    });
    if let (Some(obj), serde_json::Value::Object(p)) = (v.as_object_mut(), payload) {
        obj.extend(p);
    }
    v
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn curve_line(c: &EllipticCurveModel) -> String {
    let e = c.e();
    format!(
        "y^2 = 4x^3 + ({})x + ({})   roots {}, {}, {}   j = {}",
        c.p(),
        c.q(),
        e[0],
        e[1],
        e[2],
        c.j_classical()
    )
}

fn line_row(r: &GaloisLineRecord) -> String {
    let verts: Vec<String> = r.incident_vertices.iter().map(|v| format!("Q{v}")).collect();
    let status = if r.certificate.passed() { "pass" } else { "FAIL" };
    let mut row = format!(
        "  {:<8} {:<3} {:<9} {:<15} {:<5} through {}",
        r.label.to_string(),
        r.kind.to_string(),
        r.group.label.to_string(),
        r.certificate.mode,
        status,
        if verts.is_empty() { "-".into() } else { verts.join(" ") }
    );
    if let Some(f) = r.certificate.first_failure() {
        let _ = write!(row, "   [{}: {}]", f.name, f.detail);
    }
    row
}

fn analyze(cli: &Cli, c: &CurveArgs) -> CmdResult {
    let curve = build_curve(c)?;
    let cat = GaloisCatalog::build(&curve, cli.tol, cli.seed)?;
    let report = arrangement_report(&cat);
    let passed = report.certificates_pass();
    let json = envelope("analyze", cli, json!({ "passed": passed, "report": to_value(&report) }));
    Ok((passed, json, analyze_text(&report)))
}

fn analyze_text(rep: &ArrangementReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "curve     {}", curve_line(&rep.curve));
    let _ = writeln!(s, "vertices");
    for (i, v) in rep.tetrahedron.vertices.iter().enumerate() {
        let _ = writeln!(s, "  Q{i} {v}");
    }
    let _ = writeln!(s, "lines ({}: {} V4, {} Z4)", rep.counts.total, rep.counts.v4, rep.counts.z4);
    for r in &rep.lines {
        let _ = writeln!(s, "{}", line_row(r));
    }
    let _ = writeln!(s, "claims");
    for c in &rep.claims {
        let res = c.residual.map(|r| format!(" (residual {r:.1e})")).unwrap_or_default();
        let _ = writeln!(s, "  {:<4} {}{}: {}", c.status, c.name, res, c.detail);
    }
    if !rep.discrepancies.is_empty() {
        let _ = writeln!(s, "notes");
        for d in &rep.discrepancies {
            let _ = writeln!(s, "  - {d}");
        }
    }
    s
}

fn verify_line(cli: &Cli, c: &CurveArgs, edge: Option<&str>, z4: Option<&str>) -> CmdResult {
    let curve = build_curve(c)?;
    let label = match (edge, z4) {
        (Some(e), _) => {
            let (i, j) = parse_index_pair(e, "--edge")?;
            if !(0..4).contains(&i) || !(0..4).contains(&j) || i == j {
                return Err(Failure::Usage(format!("--edge needs two distinct vertices in 0..3, got {e}")));
            }
            LineLabel::Edge(i.min(j) as usize, i.max(j) as usize)
        }
        (None, Some(z)) => {
            let (m, n) = parse_index_pair(z, "--z4")?;
            if !curve.is_lemniscatic() {
                return Err(Failure::Usage("cyclic lines exist only when j = 1728".into()));
            }
            LineLabel::Z4(m.rem_euclid(4), n.rem_euclid(4))
        }
        (None, None) => return Err(Failure::Usage("give --edge or --z4".into())),
    };
    let cat = GaloisCatalog::build(&curve, cli.tol, cli.seed)?;
    let rec = cat
        .record(label)
        .ok_or_else(|| Failure::Usage(format!("{label} is not a Galois line of this curve (cyclic labels need m ≡ n mod 2)")))?;
    let passed = rec.certificate.passed();
    let json = envelope("verify-line", cli, json!({ "passed": passed, "line": to_value(rec) }));
    let mut text = format!("curve     {}\n{}\n", curve_line(&curve), line_row(rec));
    for ch in &rec.certificate.checks {
        let res = ch.residual.map(|r| format!(" (residual {r:.1e})")).unwrap_or_default();
        let _ = writeln!(text, "  {:<4} {}{}: {}", if ch.passed { "pass" } else { "FAIL" }, ch.name, res, ch.detail);
    }
    let _ = writeln!(text, "  fixes the line pointwise: {}", rec.certificate.fixes_line_pointwise);
    Ok((passed, json, text))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CandidateTest {
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<MonodromyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<String>,
}

/// Largest relative residual of the quartic on sampled curve points.
fn sample_residual(cat: &GaloisCatalog, rec: &PlaneCurveRecord, seed: u64, n: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a);
    (0..n)
        .map(|_| {
            let p = cat.uniformization.point(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            rec.residual(&p)
        })
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max)
}

fn project(cli: &Cli, c: &CurveArgs, center: &str, verify: bool) -> CmdResult {
    let curve = build_curve(c)?;
    let coords = parse_list::<4>(center, ':', "--center")?;
    let p = ProjPoint::new(coords).map_err(|_| Failure::Usage("the center must not be (0:0:0:0)".into()))?;
    let cat = GaloisCatalog::build(&curve, cli.tol, cli.seed)?;
    let class = classify_center(&cat, &p)?;
    let rec = project_curve(&curve, &p)?;
    let residual = sample_residual(&cat, &rec, cli.seed, 20);
    let passed = residual < cli.tol;
    let irreducible = if rec.is_double_cover() {
        None
    } else {
        Some(is_irreducible(&rec.form, cli.seed)?)
    };

    let mut tests = Vec::new();
    if verify {
        match &class {
            CenterClass::Vertex { vertex } => tests.push(CandidateTest {
                source: format!("Q{vertex}"),
                result: None,
                skipped: Some("projection from a vertex is 2:1 onto a conic".into()),
            }),
            CenterClass::OnGaloisLine { lines } => {
                for &l in lines {
                    let line = cat.record(l).and_then(|r| r.line.rational());
                    tests.push(match line {
                        Some(line) => {
                            let r = line_image(&rec, &line)?;
                            CandidateTest {
                                source: format!("image of {l}"),
                                result: Some(verify_plane_galois_point(&rec, &r, cli.seed)?),
                                skipped: None,
                            }
                        }
                        None => CandidateTest {
                            source: format!("image of {l}"),
                            result: None,
                            skipped: Some("the line is not defined over the rationals".into()),
                        },
                    });
                }
            }
            CenterClass::Generic => {
                for r in sample_candidates(&rec.form, SAMPLED_CANDIDATES, cli.seed) {
                    tests.push(CandidateTest {
                        source: "sample".into(),
                        result: Some(verify_plane_galois_point(&rec, &r, cli.seed)?),
                        skipped: None,
                    });
                }
            }
        }
    }

    let json = envelope(
        "project",
        cli,
        json!({
            "passed": passed,
            "classification": to_value(&class),
            "curve": to_value(&rec),
            "doubleCover": rec.is_double_cover(),
            "irreducible": irreducible,
            "sampleResidual": residual,
            "galoisPointTests": to_value(&tests),
        }),
    );

    let mut s = String::new();
    let _ = writeln!(s, "curve     {}", curve_line(&curve));
    let _ = writeln!(s, "center    {p}");
    let where_ = match &class {
        CenterClass::Vertex { vertex } => format!("vertex Q{vertex}"),
        CenterClass::OnGaloisLine { lines } => {
            format!("on {}", lines.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
        }
        CenterClass::Generic => "off every Galois line".into(),
    };
    let _ = writeln!(s, "position  {where_}");
    let _ = writeln!(s, "image     {} = 0", rec.form);
    match &rec.conic {
        Some(q) => {
            let _ = writeln!(s, "          2:1 onto the conic {q} = 0");
        }
        None => {
            let _ = writeln!(s, "          irreducible: {}", irreducible.unwrap_or(false));
        }
    }
    let _ = writeln!(s, "residual  {residual:.1e} on 20 curve points");
    for t in &tests {
        match (&t.result, &t.skipped) {
            (Some(m), _) => {
                let pt: Vec<String> = m.point.iter().map(ToString::to_string).collect();
                let kind = m.kind.map(|k| format!(" ({k})")).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "  ({}) {}: {}, monodromy of order {}{}",
                    pt.join(":"),
                    t.source,
                    if m.galois { "Galois point" } else { "not a Galois point" },
                    m.group_order,
                    kind
                );
            }
            (None, Some(why)) => {
                let _ = writeln!(s, "  {}: skipped, {why}", t.source);
            }
            _ => {}
        }
    }
    Ok((passed, json, s))
}

/// Snap a typed-in `ω` onto `i`, `e^{iπ/3}` or `e^{2iπ/3}` when it is
/// within rounding of one of them.
fn snap_omega(w: Complex64) -> (Complex64, bool) {
    let r3 = 3f64.sqrt() / 2.0;
    for t in [Complex64::new(0.0, 1.0), Complex64::new(0.5, r3), Complex64::new(-0.5, r3)] {
        if (w - t).norm() < 1e-5 {
            return (t, w != t);
        }
    }
    (w, false)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EnumeratedGroup<'a> {
    #[serde(flatten)]
    group: &'a AutomorphismGroup,
    diamond: bool,
}

fn enumerate(cli: &Cli, omega: Option<&str>, square: bool) -> CmdResult {
    let w = if square {
        Complex64::new(0.0, 1.0)
    } else {
        let s = omega.ok_or_else(|| Failure::Usage("give --omega or --square-lattice".into()))?;
        let bad = || Failure::Usage(format!("--omega needs `re,im`, got {s:?}"));
        let (re, im) = s.split_once(',').ok_or_else(bad)?;
        Complex64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?)
    };
    let (w, snapped) = snap_omega(w);
    let lat = ComplexLattice::new(w)?;
    let mut all: Vec<(AutomorphismGroup, bool)> = order_four_subgroups(&lat)
        .into_iter()
        .map(|g| {
            let ok = diamond_check(&lat, &g);
            (g, ok)
        })
        .collect();
    all.sort_by(|a, b| (!a.1, a.0.kind, &a.0.label).cmp(&(!b.1, b.0.kind, &b.0.label)));
    let galois: Vec<&AutomorphismGroup> = all.iter().filter(|(_, ok)| *ok).map(|(g, _)| g).collect();
    let v4 = galois.iter().filter(|g| g.kind == GroupKind::V4).count();
    let z4 = galois.iter().filter(|g| g.kind == GroupKind::Z4).count();
    let beyond = lat.symmetry_order() == 6;
    let listed: Vec<EnumeratedGroup> = all.iter().map(|(g, ok)| EnumeratedGroup { group: g, diamond: *ok }).collect();
    let json = envelope(
        "enumerate-groups",
        cli,
        json!({
            "passed": true,
            "lattice": { "omega": [w.re, w.im], "snapped": snapped, "symmetryOrder": lat.symmetry_order() },
            "beyondScope": beyond,
            "counts": { "galois": galois.len(), "v4": v4, "z4": z4, "orderFourSubgroups": all.len() },
            "groups": to_value(&listed),
        }),
    );
    let mut s = String::new();
    let _ = writeln!(
        s,
        "lattice   Z + Z({}{:+}i){}, unit group of order {}",
        w.re,
        w.im,
        if snapped { " (snapped)" } else { "" },
        lat.symmetry_order()
    );
    if beyond {
        let _ = writeln!(s, "          hexagonal lattice (j = 0): outside the square and generic cases");
    }
    let _ = writeln!(s, "{} Galois groups ({v4} V4, {z4} Z4) among {} subgroups of order 4", galois.len(), all.len());
    for (g, ok) in &all {
        let _ = writeln!(
            s,
            "  {:<5} {:<3} {:<16} {}",
            if *ok { "ok" } else { "no" },
            g.kind.to_string(),
            g.label.to_string(),
            g.describe(&lat).join(", ")
        );
    }
    Ok((true, json, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("galois-lines").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_with_two() {
        let o = run_args(&["analyze", "--roots", "1,1,-2"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("repeated root"), "{}", o.stderr);
        assert_eq!(run_args(&["analyze"]).code, 2);
        assert_eq!(run_args(&["analyze", "--roots", "1/2,-1/2,0", "--tol", "0.1"]).code, 2);
        assert_eq!(run_args(&["analyze", "--roots", "1,2,3"]).code, 2);
        assert_eq!(run_args(&["enumerate-groups", "--omega", "0,-1"]).code, 2);
        assert_eq!(run_args(&["verify-line", "--roots", "1/3,1/2,-5/6", "--z4", "0,0"]).code, 2);
        assert_eq!(run_args(&["project", "--roots", "1/2,-1/2,0", "--center", "1:0:0:0"]).code, 2);
    }

    #[test]
    fn tolerance_bounds() {
        assert!(parse_tol("1e-4").is_ok());
        assert!(parse_tol("0").is_err());
        assert!(parse_tol("2e-4").is_err());
        assert!(parse_tol("nan").is_err());
    }

    #[test]
    fn omega_snapping() {
        let (w, snapped) = snap_omega(Complex64::new(0.5, 0.866025));
        assert!(snapped && (w - Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3)).norm() < 1e-15);
        assert_eq!(snap_omega(Complex64::new(0.0, 1.0)), (Complex64::new(0.0, 1.0), false));
        assert!(!snap_omega(Complex64::new(0.1, 1.3)).1);
    }

    #[test]
    fn enumeration_counts() {
        let counts = |args: &[&str]| {
            let o = run_args(args);
            assert_eq!(o.code, 0, "{}", o.stderr);
            let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
            (v["counts"]["galois"].as_u64().unwrap(), v["beyondScope"].as_bool().unwrap())
        };
        assert_eq!(counts(&["enumerate-groups", "--square-lattice", "--json"]), (14, false));
        assert_eq!(counts(&["enumerate-groups", "--omega", "0,2", "--json"]), (6, false));
        assert_eq!(counts(&["enumerate-groups", "--omega", "0.5,0.866025", "--json"]), (6, true));
    }
}
