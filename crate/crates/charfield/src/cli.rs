//! Command-line front end.
//!
//! Subcommands: `solve` (one intersection point), `field` (full
//! characteristic field to CSV/JSON/SVG), `validate` (system and
//! Laplace-invariant checks), `oracle-compare` (marching-scheme
//! convergence study) and `scenarios` (registry listing).
//!
//! Configuration comes from flags or a JSON file (`--config`), with flags
//! taking precedence. Outputs are byte-deterministic: floats are printed
//! in shortest round-trip form and nothing depends on time or scheduling.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure; for
//! nonzero exits a machine-readable record goes to stderr.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::cauchy::{
    build_field, profile_boundary, solve_point, BoundaryCurve, CharacteristicField, SolverOptions,
    TableRow,
};
use crate::error::{Error, Result};
use crate::laplace::{
    lambda_relation_residual, laplace_invariants, simplest_case_pairing, EquationKind,
    PairingClass, DEFAULT_FD_STEP,
};
use crate::oracle::{convergence_study, MocClosure};
use crate::scenarios::{scenario, scenario_names};
use crate::systems::{RiemannPoint, SystemDescriptor, SystemName};

/// Merged run configuration (file defaults overridden by flags).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub scenario: Option<String>,
    pub boundary_file: Option<String>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub quad_tol: Option<f64>,
    pub kernel_tol: Option<f64>,
    pub margin: Option<f64>,
    pub fd_step: Option<f64>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub tau_p: Option<f64>,
    pub tau_q: Option<f64>,
    pub levels: Option<Vec<usize>>,
}

impl RunConfig {
    fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {path}: {e}")))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad config {path}: {e}")))
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("quad_tol", self.quad_tol),
            ("kernel_tol", self.kernel_tol),
            ("margin", self.margin),
            ("fd_step", self.fd_step),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::Config(format!("{name} must be > 0, got {v}")));
                }
            }
        }
        for (name, v) in [("n1", self.n1), ("n2", self.n2)] {
            if let Some(v) = v {
                if v < 2 {
                    return Err(Error::Config(format!("{name} must be >= 2, got {v}")));
                }
            }
        }
        if let Some(path) = &self.boundary_file {
            if !Path::new(path).exists() {
                return Err(Error::Config(format!("boundary file {path} does not exist")));
            }
        }
        if let Some(f) = &self.format {
            if !["csv", "json", "svg"].contains(&f.as_str()) {
                return Err(Error::Config(format!("unknown format {f:?}")));
            }
        }
        Ok(())
    }

    fn solver_options(&self) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            quad_tol: self.quad_tol.unwrap_or(d.quad_tol),
            kernel_tol: self.kernel_tol.unwrap_or(d.kernel_tol),
            margin: self.margin.unwrap_or(d.margin),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "charfield",
    about = "characteristic fields for 2x2 hyperbolic systems in Riemann-invariant form"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<String>,
    /// Scenario name from the registry (see `scenarios`).
    #[arg(long)]
    scenario: Option<String>,
    /// Tabulated boundary CSV with header tau,x,y,u,v (needs --system).
    #[arg(long)]
    boundary_file: Option<String>,
    /// System name: plasticity, coulomb, heat, gas, beam, born_infeld.
    #[arg(long)]
    system: Option<String>,
    /// Plasticity constant.
    #[arg(long)]
    k: Option<f64>,
    /// Coulomb angle.
    #[arg(long)]
    alpha_c: Option<f64>,
    /// Coulomb cohesion.
    #[arg(long)]
    cohesion: Option<f64>,
    /// Heat constant chi0.
    #[arg(long)]
    chi0: Option<f64>,
    /// Heat constant tau0.
    #[arg(long)]
    tau0: Option<f64>,
    /// Polytrope constant.
    #[arg(long)]
    gamma: Option<f64>,
    /// Absolute tolerance of the arc integrals.
    #[arg(long)]
    quad_tol: Option<f64>,
    /// Absolute tolerance of the kernel integrals.
    #[arg(long)]
    kernel_tol: Option<f64>,
    /// Non-characteristic margin.
    #[arg(long)]
    margin: Option<f64>,
    /// Finite-difference step for derivative checks.
    #[arg(long)]
    fd_step: Option<f64>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<String>,
    /// Output format: csv, json or svg (inferred from --out extension
    /// when omitted).
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Solve one characteristic intersection point.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        tau_p: Option<f64>,
        #[arg(long)]
        tau_q: Option<f64>,
    },
    /// Solve a characteristic field over a parameter grid.
    Field {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of family-1 curves (launch values of tau_q).
        #[arg(long)]
        n1: Option<usize>,
        /// Number of family-2 curves (launch values of tau_p).
        #[arg(long)]
        n2: Option<usize>,
    },
    /// Run system and Laplace-invariant checks for one system.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare the solver against the marching oracle over grid levels.
    OracleCompare {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated marching resolutions.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<usize>,
        /// Marching closure: euler, blended or trapezoid.
        #[arg(long, default_value = "blended")]
        closure: String,
    },
    /// List registered scenarios.
    Scenarios,
}

fn merge(common: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &common.scenario {
        cfg.scenario = Some(s.clone());
    }
    if let Some(s) = &common.boundary_file {
        cfg.boundary_file = Some(s.clone());
    }
    if let Some(s) = &common.system {
        cfg.system = Some(s.clone());
    }
    for (key, v) in [
        ("k", common.k),
        ("alpha_c", common.alpha_c),
        ("cohesion", common.cohesion),
        ("chi0", common.chi0),
        ("tau0", common.tau0),
        ("gamma", common.gamma),
    ] {
        if let Some(v) = v {
            cfg.params.insert(key.to_string(), v);
        }
    }
    macro_rules! over {
        ($($f:ident),*) => { $( if common.$f.is_some() { cfg.$f = common.$f.clone(); } )* };
    }
    over!(quad_tol, kernel_tol, margin, fd_step, out, format);
    cfg.validate()?;
    Ok(cfg)
}

fn build_system(cfg: &RunConfig) -> Result<SystemDescriptor> {
    let name = cfg
        .system
        .as_deref()
        .ok_or_else(|| Error::Config("missing --system".into()))?;
    SystemDescriptor::by_name(name, &cfg.params)
}

fn resolve_problem(cfg: &RunConfig) -> Result<(SystemDescriptor, BoundaryCurve)> {
    match (&cfg.scenario, &cfg.boundary_file) {
        (Some(name), None) => {
            let sc = scenario(name)?;
            Ok((sc.system, sc.curve))
        }
        (None, Some(path)) => {
            let sys = build_system(cfg)?;
            let rows = read_boundary_table(path)?;
            let curve = BoundaryCurve::from_table(&sys, &rows)?;
            Ok((sys, curve))
        }
        (Some(_), Some(_)) => Err(Error::Config(
            "give either --scenario or --boundary-file, not both".into(),
        )),
        (None, None) => Err(Error::Config(
            "a boundary is required: --scenario NAME or --boundary-file PATH".into(),
        )),
    }
}

fn read_boundary_table(path: &str) -> Result<Vec<TableRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{path}: empty boundary file")))?;
    if header.trim() != "tau,x,y,u,v" {
        return Err(Error::Config(format!(
            "{path}: expected header tau,x,y,u,v, got {header:?}"
        )));
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(Error::Config(format!("{path}:{}: need 5 columns", ln + 2)));
        }
        let mut vals = [0.0f64; 5];
        for (i, c) in cols.iter().enumerate() {
            vals[i] = c
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("{path}:{}: {e}", ln + 2)))?;
        }
        rows.push(TableRow {
            tau: vals[0],
            x: vals[1],
            y: vals[2],
            u: vals[3],
            v: vals[4],
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// emission

/// Shortest round-trip decimal form (Rust's float Display).
fn fmt(v: f64) -> String {
    format!("{v}")
}

/// One parsed row of a field CSV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CsvRow {
    pub family: u8,
    pub curve_index: usize,
    pub vertex_index: usize,
    pub tau_p: f64,
    pub tau_q: f64,
    pub x: f64,
    pub y: f64,
    pub r1: f64,
    pub r2: f64,
    pub u: f64,
    pub v: f64,
}

pub const FIELD_CSV_HEADER: &str = "family,curve_index,vertex_index,tau_p,tau_q,x,y,r1,r2,u,v";

/// Serialize a field as CSV: family-1 polylines then family-2, vertices in
/// grid order, gaps skipped.
pub fn field_csv(field: &CharacteristicField) -> String {
    let mut out = String::from(FIELD_CSV_HEADER);
    out.push('\n');
    let mut push = |family: u8, curve: usize, vertex: usize, p: &crate::cauchy::SolvedPoint| {
        out.push_str(&format!(
            "{family},{curve},{vertex},{},{},{},{},{},{},{},{}\n",
            fmt(p.tau_p),
            fmt(p.tau_q),
            fmt(p.x),
            fmt(p.y),
            fmt(p.r1),
            fmt(p.r2),
            fmt(p.state.u),
            fmt(p.state.v)
        ));
    };
    for j in 0..field.tau_q.len() {
        for (i, v) in field.family1(j).into_iter().enumerate() {
            if let Some(p) = v {
                push(1, j, i, p);
            }
        }
    }
    for i in 0..field.tau_p.len() {
        for (j, v) in field.family2(i).into_iter().enumerate() {
            if let Some(p) = v {
                push(2, i, j, p);
            }
        }
    }
    out
}

/// Parse a field CSV produced by [`field_csv`].
pub fn parse_field_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == FIELD_CSV_HEADER => {}
        other => {
            return Err(Error::Config(format!("bad field CSV header: {other:?}")));
        }
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 11 {
            return Err(Error::Config(format!("line {}: need 11 columns", ln + 2)));
        }
        let f = |i: usize| -> Result<f64> {
            cols[i]
                .parse()
                .map_err(|e| Error::Config(format!("line {}: {e}", ln + 2)))
        };
        rows.push(CsvRow {
            family: cols[0]
                .parse()
                .map_err(|e| Error::Config(format!("line {}: {e}", ln + 2)))?,
            curve_index: cols[1]
                .parse()
                .map_err(|e| Error::Config(format!("line {}: {e}", ln + 2)))?,
            vertex_index: cols[2]
                .parse()
                .map_err(|e| Error::Config(format!("line {}: {e}", ln + 2)))?,
            tau_p: f(3)?,
            tau_q: f(4)?,
            x: f(5)?,
            y: f(6)?,
            r1: f(7)?,
            r2: f(8)?,
            u: f(9)?,
            v: f(10)?,
        });
    }
    Ok(rows)
}

/// Serialize a field as JSON (vertices in grid order).
pub fn field_json(field: &CharacteristicField) -> String {
    #[derive(Serialize)]
    struct Vertex {
        i_p: usize,
        j_q: usize,
        tau_p: f64,
        tau_q: f64,
        x: f64,
        y: f64,
        r1: f64,
        r2: f64,
        u: f64,
        v: f64,
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        tau_p: &'a [f64],
        tau_q: &'a [f64],
        vertices: Vec<Vertex>,
        errors: Vec<String>,
    }
    let mut vertices = Vec::new();
    for i in 0..field.tau_p.len() {
        for j in 0..field.tau_q.len() {
            if let Some(p) = field.vertex(i, j) {
                vertices.push(Vertex {
                    i_p: i,
                    j_q: j,
                    tau_p: p.tau_p,
                    tau_q: p.tau_q,
                    x: p.x,
                    y: p.y,
                    r1: p.r1,
                    r2: p.r2,
                    u: p.state.u,
                    v: p.state.v,
                });
            }
        }
    }
    let doc = Doc {
        tau_p: &field.tau_p,
        tau_q: &field.tau_q,
        vertices,
        errors: field
            .errors
            .iter()
            .map(|e| format!("({}, {}): {}", e.tau_p, e.tau_q, e.message))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("field serialization")
}

/// Write the field as a deterministic SVG: one polyline per characteristic
/// (split at gaps), families in distinct stroke classes, the boundary as a
/// path, viewBox fitted with a 5% margin.
pub fn emit_svg(field: &CharacteristicField, path: &str) -> Result<()> {
    let svg = render_svg(field)?;
    std::fs::write(path, svg)?;
    Ok(())
}

pub fn render_svg(field: &CharacteristicField) -> Result<String> {
    if field.solved_count() == 0 {
        return Err(Error::Domain {
            what: "emit_svg",
            why: "empty field".into(),
        });
    }
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |x: f64, y: f64| {
        lo.0 = lo.0.min(x);
        lo.1 = lo.1.min(y);
        hi.0 = hi.0.max(x);
        hi.1 = hi.1.max(y);
    };
    for i in 0..field.tau_p.len() {
        for j in 0..field.tau_q.len() {
            if let Some(p) = field.vertex(i, j) {
                grow(p.x, p.y);
            }
        }
    }
    for &(x, y) in &field.boundary {
        grow(x, y);
    }
    let w = (hi.0 - lo.0).max(1e-9);
    let h = (hi.1 - lo.1).max(1e-9);
    let m = 0.05 * w.max(h);
    // svg y axis points down; emit flipped y
    let view = format!(
        "{} {} {} {}",
        fmt(lo.0 - m),
        fmt(-hi.1 - m),
        fmt(w + 2.0 * m),
        fmt(h + 2.0 * m)
    );
    let sw = fmt(0.002 * w.max(h));
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{view}\">\n<style>.fam1{{fill:none;stroke:#1f6fb2;stroke-width:{sw}}}.fam2{{fill:none;stroke:#c24f1f;stroke-width:{sw}}}.boundary{{fill:none;stroke:#222;stroke-width:{sw}}}</style>\n"
    ));
    let mut d = String::from("M");
    for (n, &(x, y)) in field.boundary.iter().enumerate() {
        if n > 0 {
            d.push_str(" L");
        }
        d.push_str(&format!(" {} {}", fmt(x), fmt(-y)));
    }
    out.push_str(&format!("<path class=\"boundary\" d=\"{d}\"/>\n"));
    let polyline = |class: &str, pts: &[Option<&crate::cauchy::SolvedPoint>], out: &mut String| {
        let mut run: Vec<String> = Vec::new();
        let flush = |run: &mut Vec<String>, out: &mut String| {
            if !run.is_empty() {
                out.push_str(&format!(
                    "<polyline class=\"{class}\" points=\"{}\"/>\n",
                    run.join(" ")
                ));
                run.clear();
            }
        };
        for p in pts {
            match p {
                Some(p) => run.push(format!("{},{}", fmt(p.x), fmt(-p.y))),
                None => flush(&mut run, out),
            }
        }
        flush(&mut run, out);
    };
    for j in 0..field.tau_q.len() {
        polyline("fam1", &field.family1(j), &mut out);
    }
    for i in 0..field.tau_p.len() {
        polyline("fam2", &field.family2(i), &mut out);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn write_output(cfg: &RunConfig, content: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// subcommand bodies

fn cmd_solve(cfg: &RunConfig) -> Result<String> {
    let (sys, curve) = resolve_problem(cfg)?;
    let (a, b) = curve.param_range();
    let tau_p = cfg.tau_p.unwrap_or(a);
    let tau_q = cfg.tau_q.unwrap_or(b);
    let opts = cfg.solver_options();
    let pt = solve_point(&sys, &curve, tau_p, tau_q, &opts)?;
    #[derive(Serialize)]
    struct Record {
        x: f64,
        y: f64,
        r1: f64,
        r2: f64,
        u: f64,
        v: f64,
    }
    let rec = Record {
        x: pt.x,
        y: pt.y,
        r1: pt.r1,
        r2: pt.r2,
        u: pt.state.u,
        v: pt.state.v,
    };
    Ok(format!(
        "{}\n",
        serde_json::to_string(&rec).expect("record serialization")
    ))
}

fn cmd_field(cfg: &RunConfig) -> Result<(String, Option<String>)> {
    let (sys, curve) = resolve_problem(cfg)?;
    let opts = cfg.solver_options();
    let field = build_field(&sys, &curve, cfg.n1.unwrap_or(24), cfg.n2.unwrap_or(24), &opts)?;
    let format = cfg
        .format
        .clone()
        .or_else(|| {
            cfg.out
                .as_deref()
                .and_then(|p| Path::new(p).extension())
                .and_then(|e| e.to_str())
                .map(|e| e.to_string())
        })
        .unwrap_or_else(|| "csv".to_string());
    let content = match format.as_str() {
        "csv" => field_csv(&field),
        "json" => field_json(&field),
        "svg" => render_svg(&field)?,
        other => return Err(Error::Config(format!("unknown format {other:?}"))),
    };
    let note = if field.errors.is_empty() {
        None
    } else {
        Some(format!(
            "{} vertices failed; first: ({}, {}): {}",
            field.errors.len(),
            field.errors[0].tau_p,
            field.errors[0].tau_q,
            field.errors[0].message
        ))
    };
    Ok((content, note))
}

/// Round for reporting: 8 decimals, so exact anchors print exactly and
/// finite-difference noise near 1e-9 is suppressed.
fn rounded(v: f64) -> f64 {
    let r = (v * 1e8).round() / 1e8;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn cmd_validate(cfg: &RunConfig) -> Result<String> {
    let sys = build_system(cfg)?;
    let h_fd = cfg.fd_step.unwrap_or(DEFAULT_FD_STEP);
    let mut out = String::new();
    let params = sys
        .params()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("system {} ({params})\n", sys.name().as_str()));

    // hyperbolicity and round-trip over the sample set
    let pts = sys.sample_invariants(500);
    let mut min_gap = f64::INFINITY;
    for &pt in &pts {
        let (l1, l2) = sys.eigenvalues(pt)?;
        min_gap = min_gap.min((l1 - l2).abs());
    }
    out.push_str(&format!(
        "hyperbolicity ok over {} samples, min |lambda1-lambda2| = {:e}\n",
        pts.len(),
        rounded(min_gap)
    ));
    let mut rt = 0.0f64;
    for st in crate::systems::sample_states(&sys, 200) {
        let p = sys.to_invariants(st)?;
        let back = sys.from_invariants(p)?;
        rt = rt.max((back.u - st.u).abs().max((back.v - st.v).abs()));
    }
    out.push_str(&format!("invariant round-trip max deviation {rt:e}\n"));

    let class = match simplest_case_pairing(&sys) {
        PairingClass::DetConst { k } => format!("det-const (K = {})", rounded(k)),
        PairingClass::Antisymmetric => "antisymmetric".to_string(),
        PairingClass::General => "general".to_string(),
    };
    out.push_str(&format!("pairing class {class}\n"));

    // Laplace invariants at an anchor with invariant gap 2
    let anchor = match sys.name() {
        SystemName::Beam => RiemannPoint::new(1.0, -1.0),
        SystemName::Plasticity | SystemName::Coulomb => RiemannPoint::new(-0.5, 0.5),
        SystemName::Heat => RiemannPoint::new(0.5, 2.5),
        _ => RiemannPoint::new(0.0, 2.0),
    };
    let lx = laplace_invariants(&sys, EquationKind::EqX, anchor, h_fd)?;
    let lp = laplace_invariants(&sys, EquationKind::EqPhi, anchor, h_fd)?;
    let (hx, kx) = (rounded(lx.h), rounded(lx.k));
    if hx == kx {
        out.push_str(&format!(
            "laplace h=k={hx} (eq x at r=({}, {}))\n",
            anchor.r1, anchor.r2
        ));
    } else {
        out.push_str(&format!(
            "laplace h={hx} k={kx} (eq x at r=({}, {}))\n",
            anchor.r1, anchor.r2
        ));
    }
    out.push_str(&format!(
        "cross-identity residuals ({:e}, {:e})\n",
        rounded((lx.h - lp.k).abs()),
        rounded((lx.k - lp.h).abs())
    ));
    let rel = lambda_relation_residual(&sys, anchor, h_fd)?;
    out.push_str(&format!("eigenvalue-relation residual {}\n", rounded(rel)));
    Ok(out)
}

fn cmd_oracle_compare(cfg: &RunConfig, levels: &[usize], closure: &str) -> Result<String> {
    let (sys, curve) = resolve_problem(cfg)?;
    let closure = match closure {
        "euler" => MocClosure::Euler,
        "blended" => MocClosure::Blended,
        "trapezoid" => MocClosure::Trapezoid,
        other => return Err(Error::Config(format!("unknown closure {other:?}"))),
    };
    let levels = if levels.is_empty() {
        cfg.levels.clone().unwrap_or_else(|| vec![50, 100, 200])
    } else {
        levels.to_vec()
    };
    let opts = cfg.solver_options();
    let study = convergence_study(&sys, &curve, &levels, 32, closure, &opts)?;
    let mut out = String::new();
    let mut prev: Option<f64> = None;
    for level in &study {
        let ratio = prev
            .map(|p| format!(" ratio={}", rounded(level.report.max_abs / p)))
            .unwrap_or_default();
        out.push_str(&format!(
            "n0={} nodes={} max={:e} mean={:e}{ratio}\n",
            level.n0,
            level.report.count,
            level.report.max_abs,
            level.report.mean_abs
        ));
        prev = Some(level.report.max_abs);
    }
    Ok(out)
}

fn cmd_scenarios() -> String {
    let mut out = String::new();
    for name in scenario_names() {
        let sc = scenario(name).expect("registered scenario");
        let (a, b) = sc.curve.param_range();
        out.push_str(&format!(
            "{name}: {} [system {}, tau in [{}, {}]]\n",
            sc.description,
            sc.system.name().as_str(),
            rounded(a),
            rounded(b)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// dispatch

fn classify(err: &Error) -> (i32, &'static str) {
    match err {
        Error::Config(_) | Error::UnknownScenario { .. } | Error::Io(_) => (1, "config"),
        _ => (2, "numeric"),
    }
}

fn fail(err: Error) -> i32 {
    let (code, kind) = classify(&err);
    let record = serde_json::json!({ "kind": kind, "error": err.to_string() });
    let _ = writeln!(std::io::stderr(), "{record}");
    code
}

/// Run the CLI on the given argument list and return the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = writeln!(std::io::stderr(), "{e}");
                return 1;
            }
            print!("{e}");
            return 0;
        }
    };
    let outcome: Result<()> = (|| match cli.cmd {
        Cmd::Solve { common, tau_p, tau_q } => {
            let mut cfg = merge(&common)?;
            if tau_p.is_some() {
                cfg.tau_p = tau_p;
            }
            if tau_q.is_some() {
                cfg.tau_q = tau_q;
            }
            let content = cmd_solve(&cfg)?;
            write_output(&cfg, &content)
        }
        Cmd::Field { common, n1, n2 } => {
            let mut cfg = merge(&common)?;
            if n1.is_some() {
                cfg.n1 = n1;
            }
            if n2.is_some() {
                cfg.n2 = n2;
            }
            cfg.validate()?;
            let (content, note) = cmd_field(&cfg)?;
            write_output(&cfg, &content)?;
            if let Some(note) = note {
                let _ = writeln!(
                    std::io::stderr(),
                    "{}",
                    serde_json::json!({ "kind": "vertex-errors", "note": note })
                );
            }
            Ok(())
        }
        Cmd::Validate { common } => {
            let cfg = merge(&common)?;
            let content = cmd_validate(&cfg)?;
            write_output(&cfg, &content)
        }
        Cmd::OracleCompare {
            common,
            levels,
            closure,
        } => {
            let cfg = merge(&common)?;
            let content = cmd_oracle_compare(&cfg, &levels, &closure)?;
            write_output(&cfg, &content)
        }
        Cmd::Scenarios => {
            print!("{}", cmd_scenarios());
            Ok(())
        }
    })();
    match outcome {
        Ok(()) => 0,
        Err(e) => fail(e),
    }
}

/// Profile report helper: sample count plus monotonicity flags.
pub fn profile_summary(curve: &BoundaryCurve, n: usize) -> Result<String> {
    let p = profile_boundary(curve, n)?;
    Ok(format!(
        "samples={} monotone_r1={} monotone_r2={}\n",
        p.samples.len(),
        p.monotone_r1,
        p.monotone_r2
    ))
}
