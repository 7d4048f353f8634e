//! Command-line front end. Every command produces a JSON value and a text
//! rendering; failures become a JSON error object and a nonzero exit code.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::birkhoff::{birkhoff_matrix, birkhoff_scalar, build_fundamental, is_negative_hbar};
use crate::cohomology::CohomologyRing;
use crate::connection::{find_annihilators, format_operator, gauge_fixed_all, raw_connection, to_flat};
use crate::formal::{QSeries, Series, Window};
use crate::ifunction::{build_i, f3_eta, Action, GeometrySpec};
use crate::localization::{assemble_f, four_q_ddq, LocConfig};
use crate::mirror::{extended_j, gw_readout, local_readout, MirrorData};
use crate::{fmt_q, json as js, parse_q, Error, Result, Q};

/// Environment variable holding the default truncation box, e.g. `3,3`.
pub const BOX_ENV: &str = "QCOH_DEFAULT_BOX";

/// Canonical class of F3 used for the local surface `K_F3`.
pub const KF3_CLASS: [i64; 2] = [1, -2];

#[derive(Parser, Debug)]
#[command(name = "qcoh", version, about = "Exact I/J-function, mirror map and localization computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct Geometry {
    /// Preset name: P1, X<k>, G<k>, F<n>, KF3.
    #[arg(long, conflicts_with = "geometry")]
    pub preset: Option<String>,
    /// Geometry file (JSON).
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Truncation box, comma separated.
    #[arg(long = "box")]
    pub bx: Option<String>,
    /// Torus action for X_k: diagonal, antidiagonal, second, or `a,b`.
    #[arg(long)]
    pub action: Option<String>,
    /// hbar and lambda window half-widths, `h,l`.
    #[arg(long, conflicts_with = "unbounded")]
    pub window: Option<String>,
    /// Use an unbounded window (only for specs with no lambda expansions).
    #[arg(long)]
    pub unbounded: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cohomology ring: basis and classical multiplication tables.
    Ring(Geometry),
    /// The I-function.
    Ifun(Geometry),
    /// The Birkhoff-normalized J-function.
    Jfun(Geometry),
    /// Mirror map read from J.
    Mirror {
        #[command(flatten)]
        geo: Geometry,
        /// Absorb non-divisor slots into extra variables first.
        #[arg(long)]
        extended: bool,
    },
    /// Gromov-Witten readout (X_k or KF3).
    Gw {
        #[command(flatten)]
        geo: Geometry,
        /// Compare the stripped J with the X_-1 I-function slot by slot.
        #[arg(long)]
        compare: bool,
        /// Lowest hbar power compared.
        #[arg(long, default_value_t = 3)]
        depth: i32,
    },
    /// Connection matrices.
    Connection {
        #[command(flatten)]
        geo: Geometry,
        #[arg(long, value_enum, default_value_t = ConnKind::Hat)]
        kind: ConnKind,
    },
    /// Quantum differential operators annihilating J in flat coordinates.
    Qde {
        #[command(flatten)]
        geo: Geometry,
        #[arg(long, default_value_t = 2)]
        theta_deg: u32,
        #[arg(long, default_value_t = 2)]
        y_deg: u32,
        /// Degree of each y_i; defaults to c1 of the total space.
        #[arg(long, allow_hyphen_values = true)]
        weights: Option<String>,
    },
    /// Big quantum cohomology of F3.
    Bigq {
        #[arg(long = "box")]
        bx: Option<String>,
    },
    /// Localization graph sum for O(k)+O(-2-k) over P1.
    Localize {
        /// Degree of the first summand, O(k).
        #[arg(long)]
        k: u32,
        /// Ratio of the two fiber weights, e.g. 1 or -1/2.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Highest degree d.
        #[arg(long)]
        dmax: u32,
        /// Order of the lambda expansion; defaults to 2 dmax - 2.
        #[arg(long)]
        lambda_order: Option<u32>,
    },
    /// Golden-data checks with a pass/fail table.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        k: i64,
        #[arg(long, default_value_t = 5)]
        order: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConnKind {
    Raw,
    Hat,
    Flat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    XkIdentity,
    X1,
    Localize,
    Kf3,
}

/// Result of one command.
#[derive(Clone, Debug)]
pub struct Output {
    pub json: Value,
    pub text: String,
    /// False when a verification failed.
    pub ok: bool,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Output { json, text, ok: true }
    }
}

fn parse_box(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::Invalid(format!("bad box {s:?}"))))
        .collect()
}

fn preset_vars(name: &str) -> usize {
    if name == "P1" || name.starts_with('X') {
        1
    } else {
        2
    }
}

fn default_box(vars: usize, explicit: Option<&str>) -> Result<Vec<u32>> {
    let from = |s: &str| -> Result<Vec<u32>> {
        let b = parse_box(s)?;
        if b.len() != vars {
            return Err(Error::Invalid(format!("box {s:?} needs {vars} entries")));
        }
        Ok(b)
    };
    if let Some(s) = explicit {
        return from(s);
    }
    match std::env::var(BOX_ENV) {
        Ok(s) if parse_box(&s).map(|b| b.len() == vars).unwrap_or(false) => from(&s),
        _ => Ok(if vars == 1 { vec![5] } else { vec![3, 3] }),
    }
}

impl Geometry {
    fn is_kf3(&self) -> bool {
        self.preset.as_deref() == Some("KF3")
    }

    /// The geometry spec; `KF3` resolves to its base `F3`.
    pub fn spec(&self) -> Result<GeometrySpec> {
        let mut spec = match (&self.preset, &self.geometry) {
            (Some(p), None) => {
                let name = if p == "KF3" { "F3" } else { p.as_str() };
                let bx = default_box(preset_vars(name), self.bx.as_deref())?;
                let action = self.action.as_deref().map(Action::parse).transpose()?;
                GeometrySpec::preset(name, action, &bx)?
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
                let mut g = js::geometry(&text)?;
                if let Some(b) = &self.bx {
                    g.bx = default_box(g.bx.len(), Some(b))?;
                }
                g
            }
            _ => return Err(Error::Invalid("give exactly one of --preset or --geometry".into())),
        };
        if self.unbounded {
            spec.window = Some(Window::UNBOUNDED);
        } else if let Some(w) = &self.window {
            let v: Vec<i32> = w
                .split(',')
                .map(|x| x.trim().parse().map_err(|_| Error::Invalid(format!("bad window {w:?}"))))
                .collect::<Result<_>>()?;
            let [h, l] = v[..] else {
                return Err(Error::Invalid("window is `h,l`".into()));
            };
            spec.window = Some(Window::symmetric(h, l));
        }
        Ok(spec)
    }
}

fn text_series(name: &str, s: &Series) -> String {
    let mut out = format!("{name}:\n");
    for (d, c) in s.terms() {
        for (e, l, x) in c.terms() {
            out.push_str(&format!("  q^{d:?} hbar^{e} lambda^{l}  {}\n", fmt_q(x)));
        }
    }
    out
}

fn text_qseries(name: &str, j: &QSeries) -> String {
    let ring = j.ring();
    let mut out = format!("{name} (prefactor: {}):\n", j.has_prefactor());
    for (a, c) in j.comps().iter().enumerate() {
        out.push_str(&text_series(&format!("[{}]", ring.basis_name(a)), c));
    }
    out
}

fn text_matrix(name: &str, m: &crate::matrix::SeriesMatrix) -> String {
    let mut out = format!("{name}:\n");
    for (a, row) in m.rows.iter().enumerate() {
        for (b, e) in row.iter().enumerate() {
            if !e.is_zero() {
                out.push_str(&text_series(&format!("  ({a},{b})"), e));
            }
        }
    }
    out
}

fn ring_output(ring: &CohomologyRing) -> Output {
    let basis: Vec<String> = (0..ring.dim()).map(|a| ring.basis_name(a)).collect();
    let mats: Vec<Value> = (0..ring.num_generators())
        .map(|i| js::rational_matrix(&crate::connection::classical(ring, i)))
        .collect();
    let mut text = format!("basis: {}\n", basis.join(", "));
    for i in 0..ring.num_generators() {
        text.push_str(&format!("p{} multiplication:\n", i + 1));
        for row in crate::connection::classical(ring, i) {
            let r: Vec<String> = row.iter().map(fmt_q).collect();
            text.push_str(&format!("  {}\n", r.join(" ")));
        }
    }
    Output::new(json!({ "basis": basis, "top_degree": ring.top_degree(), "multiplication": mats }), text)
}

fn mirror_output(md: &MirrorData) -> Result<Output> {
    let k = md.ring.num_generators();
    let t: Vec<Value> = (0..k).map(|i| js::series(md.divisor(i))).collect();
    let inv = md.inverse_map()?;
    let inv_json: Vec<Value> = inv.components().iter().map(js::series).collect();
    let mut text = String::new();
    for i in 0..k {
        text.push_str(&text_series(&format!("t{} - log q{}", i + 1, i + 1), md.divisor(i)));
    }
    text.push_str(&text_series("lambda part of the unit slot", &md.tilde));
    let slots: BTreeMap<String, Value> =
        md.slots.iter().enumerate().map(|(a, s)| (md.ring.basis_name(a), js::series(s))).collect();
    Ok(Output::new(
        json!({ "t": t, "t_tilde": js::series(&md.tilde), "slots": slots, "inverse": inv_json }),
        text,
    ))
}

/// Invariant grid `d1 x d2` for a two-variable local readout.
pub fn kf3_table(bx: &[u32]) -> Result<BTreeMap<Vec<u32>, Option<Q>>> {
    let i = build_i(&GeometrySpec::fn_(3, [bx[0], bx[1]]))?;
    let ej = extended_j(&i)?;
    Ok(local_readout(&ej.j, &KF3_CLASS)?.invariants)
}

fn kf3_output(bx: &[u32]) -> Result<Output> {
    let inv = kf3_table(bx)?;
    let cell = |d: &[u32]| -> String {
        match inv.get(d) {
            Some(Some(v)) => fmt_q(v),
            _ => "undetermined".into(),
        }
    };
    let mut rows = Vec::new();
    let mut text = String::from("d1\\d2");
    for d2 in 0..=bx[1] {
        text.push_str(&format!("{d2:>14}"));
    }
    text.push('\n');
    for d1 in 0..=bx[0] {
        text.push_str(&format!("{d1:>5}"));
        for d2 in 0..=bx[1] {
            let c = cell(&[d1, d2]);
            text.push_str(&format!("{c:>14}"));
            rows.push(json!({ "d": [d1, d2], "n": if c == "undetermined" { Value::Null } else { json!(c) } }));
        }
        text.push('\n');
    }
    Ok(Output::new(json!({ "invariants": rows }), text))
}

fn localize_output(cfg: &LocConfig) -> Result<Output> {
    let a = assemble_f(cfg)?;
    let deriv = four_q_ddq(&a.coeffs);
    let mut text = format!("k = {}, z = {}\n   d  F_d  4 d F_d\n", cfg.k, fmt_q(&cfg.z));
    let rows: Vec<Value> = a
        .coeffs
        .iter()
        .zip(&deriv)
        .enumerate()
        .map(|(i, (c, w))| {
            text.push_str(&format!("{:>4}  {}  {}\n", i + 1, fmt_q(c), fmt_q(w)));
            json!({ "d": i + 1, "coeff": js::rat(c), "four_q_ddq": js::rat(w) })
        })
        .collect();
    Ok(Output::new(
        json!({ "k": cfg.k, "z": js::rat(&cfg.z), "dmax": cfg.d_max, "lambda_order": cfg.lambda_order, "rounds": a.rounds, "coefficients": rows }),
        text,
    ))
}

/// `(basis, hbar, lambda)` slots where the stripped `J_k` and `I_{-1}` differ.
pub fn xk_identity_diff(k: i64, order: u32, depth: i32) -> Result<Vec<(String, i32, i32)>> {
    let i = build_i(&GeometrySpec::xk(k, Action::Diagonal, order))?;
    let j = birkhoff_scalar(&i)?.j;
    let stripped = gw_readout(&j)?.stripped;
    let base = build_i(&GeometrySpec::xk(-1, Action::Diagonal, order))?;
    let win = stripped.window().meet(&base.window());
    let mut diff = Vec::new();
    for a in 0..base.ring().dim() {
        for e in -depth..=0 {
            for l in win.lambda.0.max(-64)..=win.lambda.1.min(64) {
                if stripped.comp(a).extract(e, l) != base.comp(a).extract(e, l) {
                    diff.push((base.ring().basis_name(a), e, l));
                }
            }
        }
    }
    Ok(diff)
}

fn verify(suite: Suite, k: i64, order: u32) -> Result<Output> {
    let mut rows: Vec<(String, bool)> = Vec::new();
    match suite {
        Suite::XkIdentity => {
            let diff = xk_identity_diff(k, order, 3)?;
            for (b, e, l) in &diff {
                rows.push((format!("slot {b} hbar^{e} lambda^{l}"), false));
            }
            rows.push((format!("X{k} stripped J equals I_-1 through hbar^-3, q^{order}"), diff.is_empty()));
        }
        Suite::X1 => {
            for (action, series) in [("diagonal", crate::golden::x1_diagonal()), ("antidiagonal", crate::golden::x1_antidiagonal())] {
                let i = build_i(&GeometrySpec::xk(1, Action::parse(action)?, order))?;
                let g = gw_readout(&birkhoff_scalar(&i)?.j)?;
                for (name, s, want) in [("t", &g.t, &series[0]), ("t~", &g.t_tilde, &series[1]), ("W", &g.w, &series[2])] {
                    let got: Vec<Q> = (1..=order.min(want.len() as u32)).map(|d| s.rat(&[d])).collect();
                    rows.push((format!("{action} {name}"), got[..] == want[..got.len()]));
                }
            }
        }
        Suite::Localize => {
            for t in crate::golden::localization_tables() {
                let got = assemble_f(&LocConfig::new(t.k, t.z.clone(), t.coeffs.len() as u32))?.coeffs;
                let note = if t.alternating_sign { " (reference signs times (-1)^(d+1))" } else { "" };
                rows.push((format!("k={} z={}{note}", t.k, fmt_q(&t.z)), got == t.graph_sum()));
            }
        }
        Suite::Kf3 => {
            let inv = kf3_table(&[3, 6])?;
            for (d, want) in crate::golden::table1() {
                // The zero class carries no invariant and is absent from the readout.
                let got = inv.get(&d).cloned().flatten();
                rows.push((format!("N{d:?}"), got == want));
            }
        }
    }
    let ok = rows.iter().all(|r| r.1);
    let mut text = String::new();
    for (name, pass) in &rows {
        text.push_str(&format!("{}  {name}\n", if *pass { "PASS" } else { "FAIL" }));
    }
    let json_rows: Vec<Value> = rows.iter().map(|(n, p)| json!({ "check": n, "pass": p })).collect();
    Ok(Output { json: json!({ "suite": suite.to_possible_value().map(|v| v.get_name().to_string()), "pass": ok, "checks": json_rows }), text, ok })
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Ring(g) => Ok(ring_output(&*g.spec()?.ring()?)),
        Command::Ifun(g) => {
            let i = build_i(&g.spec()?)?;
            Ok(Output::new(js::qseries(&i), text_qseries("I", &i)))
        }
        Command::Jfun(g) => {
            let b = birkhoff_scalar(&build_i(&g.spec()?)?)?;
            let neg = is_negative_hbar(&b.j);
            let mut v = js::qseries(&b.j);
            v["negative_hbar"] = json!(neg);
            Ok(Output::new(v, text_qseries("J", &b.j)))
        }
        Command::Mirror { geo, extended } => {
            let i = build_i(&geo.spec()?)?;
            if *extended {
                let ej = extended_j(&i)?;
                let mut out = mirror_output(&ej.mirror)?;
                let ring = i.ring();
                out.json["x0"] = js::series(&ej.x0);
                out.text.push_str(&text_series("x0", &ej.x0));
                for (b, x) in &ej.extra {
                    out.json[format!("x_{}", ring.basis_name(*b))] = js::series(x);
                    out.text.push_str(&text_series(&format!("x for {}", ring.basis_name(*b)), x));
                }
                let logs: Vec<Value> = ej.map.components().iter().map(js::series).collect();
                out.json["y_of_q"] = json!(logs);
                Ok(out)
            } else {
                mirror_output(&MirrorData::extract(&birkhoff_scalar(&i)?.j))
            }
        }
        Command::Gw { geo, compare, depth } => {
            if geo.is_kf3() {
                return kf3_output(&geo.spec()?.bx);
            }
            let spec = geo.spec()?;
            if *compare {
                let k: i64 = spec.name.trim_start_matches('X').parse().map_err(|_| Error::Invalid("--compare needs an X_k preset".into()))?;
                let diff = xk_identity_diff(k, spec.bx[0], *depth)?;
                let text = if diff.is_empty() {
                    "stripped J equals I_-1 slot by slot\n".to_string()
                } else {
                    diff.iter().map(|(b, e, l)| format!("differs at {b} hbar^{e} lambda^{l}\n")).collect()
                };
                let rows: Vec<Value> = diff.iter().map(|(b, e, l)| json!({ "basis": b, "hbar": e, "lambda": l })).collect();
                return Ok(Output { json: json!({ "equal": diff.is_empty(), "differences": rows }), text, ok: diff.is_empty() });
            }
            if spec.weights.len() != 1 {
                return Err(Error::Invalid("gw supports X_k presets and KF3".into()));
            }
            let g = gw_readout(&birkhoff_scalar(&build_i(&spec)?)?.j)?;
            let named = [
                ("t", &g.t),
                ("t_tilde", &g.t_tilde),
                ("W", &g.w),
                ("W_tilde", &g.w_tilde),
                ("W_hat", &g.w_hat),
                ("W_hat_unit", &g.w_hat_unit),
            ];
            let mut v = serde_json::Map::new();
            let mut text = String::new();
            for (n, s) in named {
                v.insert(n.into(), js::series(s));
                text.push_str(&text_series(n, s));
            }
            v.insert("ratio".into(), g.ratio.as_ref().map_or(Value::Null, js::rat));
            Ok(Output::new(Value::Object(v), text))
        }
        Command::Connection { geo, kind } => {
            let i = build_i(&geo.spec()?)?;
            let fs = build_fundamental(&i)?;
            let mats = match kind {
                ConnKind::Raw => (0..fs.ring.num_generators()).map(|g| raw_connection(&fs, g)).collect::<Result<Vec<_>>>()?,
                ConnKind::Hat => gauge_fixed_all(&fs, &birkhoff_matrix(&fs)?)?,
                ConnKind::Flat => {
                    let pair = birkhoff_matrix(&fs)?;
                    let hats = gauge_fixed_all(&fs, &pair)?;
                    let raw = QSeries::from_comps(fs.ring.clone(), pair.r.rows[0].clone(), true)?;
                    to_flat(&hats, &MirrorData::extract(&raw), None, None)?
                }
            };
            let text = mats.iter().enumerate().map(|(g, m)| text_matrix(&format!("Omega_{}", g + 1), m)).collect();
            Ok(Output::new(json!({ "kind": format!("{kind:?}").to_lowercase(), "matrices": mats.iter().map(js::matrix).collect::<Vec<_>>() }), text))
        }
        Command::Qde { geo, theta_deg, y_deg, weights } => {
            let spec = geo.spec()?;
            let w: Vec<i64> = match weights {
                Some(s) => s
                    .split(',')
                    .map(|x| x.trim().parse().map_err(|_| Error::Invalid(format!("bad weights {s:?}"))))
                    .collect::<Result<_>>()?,
                None => total_c1(&spec),
            };
            let ops = find_annihilators(&flat_j(&build_i(&spec)?)?, *theta_deg, *y_deg, &w)?;
            let text = ops.iter().map(|o| format!("{}\n", format_operator(o))).collect();
            Ok(Output::new(json!({ "weights": w, "operators": ops.iter().map(js::operator).collect::<Vec<_>>() }), text))
        }
        Command::Bigq { bx } => {
            let bx = default_box(2, bx.as_deref())?;
            let i = build_i(&GeometrySpec::fn_(3, [bx[0], bx[1]]))?;
            let bq = crate::bigquantum::run(&i, &f3_eta())?;
            let text = bq
                .gf
                .coeffs
                .iter()
                .map(|((d, n), c)| format!("d={d:?} n={n:?}  {}\n", fmt_q(c)))
                .collect();
            let c: Vec<Value> = bq.c.iter().map(js::matrix).collect();
            Ok(Output::new(json!({ "coefficients": bq.gf.to_json(), "C": c }), text))
        }
        Command::Localize { k, z, dmax, lambda_order } => {
            let mut cfg = LocConfig::new(*k, parse_q(z)?, *dmax);
            if let Some(o) = lambda_order {
                cfg.lambda_order = *o;
            }
            localize_output(&cfg)
        }
        Command::Verify { suite, k, order } => verify(*suite, *k, *order),
    }
}

/// `c_1` of the total space: the base plus every twist class.
/// J in the flat variables `y = e^t`.
pub fn flat_j(i: &QSeries) -> Result<QSeries> {
    let j = birkhoff_scalar(i)?.j;
    let md = MirrorData::extract(&j);
    if md.is_trivial() {
        Ok(j)
    } else {
        crate::mirror::shift_by_mirror(&j, &md)
    }
}

pub fn total_c1(spec: &GeometrySpec) -> Vec<i64> {
    let mut c = spec.c1();
    for t in &spec.twists {
        for (a, b) in c.iter_mut().zip(&t.class) {
            *a += b;
        }
    }
    c
}

/// Parses arguments, runs, writes output and returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (body, code) = match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&out.json).expect("json values serialize")),
                Format::Text => out.text.clone(),
            };
            (body, if out.ok { 0 } else { 1 })
        }
        Err(e) => (format!("{}\n", js::error(&e)), 1),
    };
    match &cli.output {
        Some(p) => {
            if let Err(e) = std::fs::write(p, body) {
                eprintln!("{}", js::error(&Error::Invalid(format!("{}: {e}", p.display()))));
                return 1;
            }
        }
        None => print!("{body}"),
    }
    code
}
