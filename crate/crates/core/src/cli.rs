//! The `fkp` command line: argument parsing, job planning and report rendering.
//!
//! Every input file holds one document or a batch array (see [`crate::io`]).
//! Jobs run in parallel and are reported in input order. Exit codes: 0 on
//! success, 1 on a validation error, 2 when a window runs out of precision,
//! 3 when a property check fails.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::checks;
use crate::coefficients::format_rational;
use crate::cohomology::{both_routes, pc_cross_identity, stability_probe, CohomologyReport, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::hierarchy::{
    apply_to_field, derive_kdv, derive_kp, kp_flow, parshin_flow, ParshinPair, TwoVarOperator, DEFAULT_DEPTH_CAP,
    DEFAULT_DRESSING_FLOOR,
};
use crate::io::{self, Document, LaxOperator, Operator};
use crate::par;
use crate::psdo::DEFAULT_OPERATOR_FLOOR;
use crate::series::{BiSeriesWindow, DiffRing, SeriesPrecision};
use crate::subspace::{condition_star_star, ord_unit, schur_check, MonomialBox, SparseVector, WindowedSubspace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PRECISION: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;

pub const DEFAULT_SEED: u64 = 2026;
pub const DEFAULT_U_CAP: i64 = 16;
pub const DEFAULT_T_LEVELS: i64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Picture cohomology of each subspace by both routes, with the stability probe.
    Coh,
    /// Per-level (h0, h1) and boundary behaviour of each subspace.
    Fredholm,
    /// A·W ⊂ W for A the first document and W each later one (W = A if alone).
    Schur,
    /// Condition (**) for each series against the ring given first.
    Starstar,
    /// t-adic order of a series, or of pairs a, b with additivity checked.
    Ord,
    /// Derive the KP equation from the first two flows.
    KpDerive,
    /// Derive KdV from the reduction (L²)₋ = 0.
    KdvDerive,
    /// Flow right-hand side: KP for one-variable operators, Parshin for
    /// pairs, the symbolic KP flow when no input is given.
    Flow {
        /// KP flow index.
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Parshin flow exponents (L^i M^j).
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        i: i64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        j: i64,
    },
    /// Dress (δ1, δ2) by each two-variable operator S.
    Dress,
    /// Apply each two-variable operator to the series that follows it.
    Apply,
    /// Run the full property suite.
    Selfcheck,
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "fkp",
    version,
    about = "Exact pseudodifferential operators, KP/Parshin flows and Fredholm subspace cohomology"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input document file; repeatable.
    #[arg(long, global = true)]
    pub input: Vec<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Levels and exponents added on every side by the stability probe.
    #[arg(long, global = true, default_value_t = DEFAULT_MARGIN)]
    pub margin: i64,
    /// Seed for the property suite.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// u-terms kept per t-level in series inverses.
    #[arg(long, global = true, default_value_t = DEFAULT_U_CAP)]
    pub u_cap: i64,
    /// Widen subspace boxes down to this t-level.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t_lo: Option<i64>,
    /// Widen subspace boxes up to this t-level (exclusive); also the number
    /// of t-levels kept in series inverses [default: 8].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t_hi: Option<i64>,
    /// δ-floor for dressing [default: -4] and for KP flows of exact operators [default: -8].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub floor: Option<i64>,
    /// Largest working depth for the KP and KdV derivations.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH_CAP)]
    pub depth_cap: u32,
}

/// Window overrides; `None` keeps each document's own window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub u_cap: i64,
    pub t_lo: Option<i64>,
    pub t_hi: Option<i64>,
    pub floor: Option<i64>,
    pub depth_cap: u32,
}

impl Default for Window {
    fn default() -> Self {
        Self { u_cap: DEFAULT_U_CAP, t_lo: None, t_hi: None, floor: None, depth_cap: DEFAULT_DEPTH_CAP }
    }
}

impl Window {
    pub fn precision(&self) -> SeriesPrecision {
        SeriesPrecision { u_terms: self.u_cap, t_levels: self.t_hi.unwrap_or(DEFAULT_T_LEVELS) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    pub format: Format,
    pub margin: i64,
    pub seed: u64,
    pub window: Window,
}

impl JobConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            inputs: vec![],
            format: Format::Table,
            margin: DEFAULT_MARGIN,
            seed: DEFAULT_SEED,
            window: Window::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = &self.window;
        let bad = |msg: String| Err(Error::Invalid(msg));
        if self.margin < 0 {
            return bad(format!("--margin must be >= 0, got {}", self.margin));
        }
        if w.u_cap < 1 {
            return bad(format!("--u-cap must be >= 1, got {}", w.u_cap));
        }
        if w.t_lo.is_some_and(|t| t > -1) {
            return bad("--t-lo must be <= -1".into());
        }
        if w.t_hi.is_some_and(|t| t < 1) {
            return bad("--t-hi must be >= 1".into());
        }
        if w.floor.is_some_and(|f| f > -1) {
            return bad("--floor must be <= -1".into());
        }
        if !(1..=64).contains(&w.depth_cap) {
            return bad(format!("--depth-cap must lie in 1..=64, got {}", w.depth_cap));
        }
        Ok(())
    }
}

impl From<Cli> for JobConfig {
    fn from(c: Cli) -> Self {
        Self {
            command: c.command,
            inputs: c.input,
            format: c.format,
            margin: c.margin,
            seed: c.seed,
            window: Window { u_cap: c.u_cap, t_lo: c.t_lo, t_hi: c.t_hi, floor: c.floor, depth_cap: c.depth_cap },
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Precision(_) => EXIT_PRECISION,
        _ => EXIT_INVALID,
    }
}

#[derive(Clone, Debug)]
enum Job {
    Coh(WindowedSubspace),
    Fredholm(WindowedSubspace),
    Schur(WindowedSubspace, WindowedSubspace),
    StarStar(WindowedSubspace, BiSeriesWindow),
    Ord(BiSeriesWindow, Option<BiSeriesWindow>),
    KpDerive,
    KdvDerive,
    KpSymbolic(u32),
    KpFlow(LaxOperator, u32),
    ParshinFlow(ParshinPair, i64, i64),
    Dress(TwoVarOperator),
    Apply(TwoVarOperator, BiSeriesWindow),
    Selfcheck,
}

struct Output {
    value: Value,
    table: String,
    /// False when a property the job checks does not hold.
    ok: bool,
}

fn load(inputs: &[PathBuf]) -> Result<Vec<Document>> {
    let mut docs = vec![];
    for p in inputs {
        let text =
            std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", p.display())))?;
        let parsed = io::parse_documents(&text).map_err(|e| match e {
            Error::Invalid(msg) => Error::Invalid(format!("{}: {msg}", p.display())),
            other => other,
        })?;
        docs.extend(parsed);
    }
    Ok(docs)
}

fn widen(w: WindowedSubspace, win: &Window) -> Result<WindowedSubspace> {
    if win.t_lo.is_none() && win.t_hi.is_none() {
        return Ok(w);
    }
    let bx = *w.bx();
    let nb = MonomialBox { t_lo: win.t_lo.unwrap_or(bx.t_lo), t_hi: win.t_hi.unwrap_or(bx.t_hi), ..bx };
    if nb.t_lo > bx.t_lo || nb.t_hi < bx.t_hi {
        return Err(Error::Invalid(format!(
            "--t-lo/--t-hi would cut the document box t in [{}, {})",
            bx.t_lo, bx.t_hi
        )));
    }
    WindowedSubspace::new(nb, w.tail().extended(&nb), w.raw_generators().to_vec())
}

fn mismatch(i: usize, doc: &Document, expected: &str) -> Error {
    Error::Invalid(format!("document {i} is a {}, expected {expected}", doc.kind()))
}

fn subspace(i: usize, d: Document, win: &Window) -> Result<WindowedSubspace> {
    match d {
        Document::Subspace(w) => widen(w, win),
        other => Err(mismatch(i, &other, "subspace")),
    }
}

fn series(i: usize, d: Document) -> Result<BiSeriesWindow> {
    match d {
        Document::Series(s) => Ok(s),
        other => Err(mismatch(i, &other, "series")),
    }
}

fn two_var(i: usize, d: Document) -> Result<TwoVarOperator> {
    match d {
        Document::Operator(Operator::Two(op)) => Ok(op),
        other => Err(mismatch(i, &other, "two-variable operator")),
    }
}

fn plan(config: &JobConfig, docs: Vec<Document>) -> Result<Vec<Job>> {
    let win = &config.window;
    let n_docs = docs.len();
    let mut it = docs.into_iter().enumerate();
    Ok(match &config.command {
        Command::Coh | Command::Fredholm => {
            let ws = it.map(|(i, d)| subspace(i, d, win)).collect::<Result<Vec<_>>>()?;
            if ws.is_empty() {
                return Err(Error::Invalid("`coh` and `fredholm` need subspace documents".into()));
            }
            let coh = config.command == Command::Coh;
            ws.into_iter().map(|w| if coh { Job::Coh(w) } else { Job::Fredholm(w) }).collect()
        }
        Command::Schur => {
            let (i, first) = it.next().ok_or_else(|| Error::Invalid("`schur` needs --input documents".into()))?;
            let a = subspace(i, first, win)?;
            let ws = it.map(|(i, d)| subspace(i, d, win)).collect::<Result<Vec<_>>>()?;
            if ws.is_empty() {
                vec![Job::Schur(a.clone(), a)]
            } else {
                ws.into_iter().map(|w| Job::Schur(a.clone(), w)).collect()
            }
        }
        Command::Starstar => {
            let (i, first) = it.next().ok_or_else(|| Error::Invalid("`starstar` needs --input documents".into()))?;
            let a = subspace(i, first, win)?;
            let ss = it.map(|(i, d)| series(i, d)).collect::<Result<Vec<_>>>()?;
            if ss.is_empty() {
                return Err(Error::Invalid("`starstar` needs series documents after the ring".into()));
            }
            ss.into_iter().map(|s| Job::StarStar(a.clone(), s)).collect()
        }
        Command::Ord => {
            let ss = it.map(|(i, d)| series(i, d)).collect::<Result<Vec<_>>>()?;
            match ss.len() {
                0 => return Err(Error::Invalid("`ord` needs series documents".into())),
                1 => vec![Job::Ord(ss[0].clone(), None)],
                n if n % 2 == 1 => return Err(Error::Invalid(format!("`ord` takes one series or pairs, got {n}"))),
                _ => ss.chunks(2).map(|p| Job::Ord(p[0].clone(), Some(p[1].clone()))).collect(),
            }
        }
        Command::KpDerive => vec![Job::KpDerive],
        Command::KdvDerive => vec![Job::KdvDerive],
        Command::Selfcheck => vec![Job::Selfcheck],
        Command::Flow { n, i, j } => {
            if *n == 0 {
                return Err(Error::Invalid("--n must be >= 1".into()));
            }
            if n_docs == 0 {
                vec![Job::KpSymbolic(*n)]
            } else {
                it.map(|(k, d)| match d {
                    Document::Operator(Operator::One(l)) => Ok(Job::KpFlow(l, *n)),
                    Document::Pair(p) => Ok(Job::ParshinFlow(p, *i, *j)),
                    other => Err(mismatch(k, &other, "one-variable operator or pair")),
                })
                .collect::<Result<Vec<_>>>()?
            }
        }
        Command::Dress => {
            let ss = it.map(|(i, d)| two_var(i, d)).collect::<Result<Vec<_>>>()?;
            if ss.is_empty() {
                return Err(Error::Invalid("`dress` needs operator documents".into()));
            }
            ss.into_iter().map(Job::Dress).collect()
        }
        Command::Apply => {
            if n_docs == 0 || n_docs % 2 == 1 {
                return Err(Error::Invalid(format!("`apply` takes (operator, series) pairs, got {n_docs} documents")));
            }
            let mut jobs = vec![];
            while let (Some((i, a)), Some((k, f))) = (it.next(), it.next()) {
                jobs.push(Job::Apply(two_var(i, a)?, series(k, f)?));
            }
            jobs
        }
    })
}

fn vector_json(v: &SparseVector) -> Value {
    Value::Array(v.iter().map(|(m, c)| json!([m.t, m.u, m.comp, format_rational(c)])).collect())
}

fn vector_text(v: &SparseVector) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|(m, c)| {
            let e = if m.comp == 0 { String::new() } else { format!("*e{}", m.comp) };
            format!("{}*u^{}*t^{}{e}", format_rational(c), m.u, m.t)
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn coh_row(out: &mut String, name: &str, r: &CohomologyReport) {
    let _ = writeln!(out, "{name:<10}{:>22}{:>22}{:>22}", r.h0.to_string(), r.h1.to_string(), r.h2.to_string());
}

fn execute(config: &JobConfig, job: &Job) -> Result<Output> {
    let win = &config.window;
    let mut t = String::new();
    match job {
        Job::Coh(w) => {
            let (mut a, mut b) = both_routes(w);
            let stable = stability_probe(w, config.margin);
            a.stable = stable;
            b.stable = stable;
            let agree = a.dims() == b.dims();
            let cross = pc_cross_identity(w);
            let _ = writeln!(t, "{:<10}{:>22}{:>22}{:>22}", "route", "h0", "h1", "h2");
            coh_row(&mut t, "picture", &a);
            coh_row(&mut t, "complex", &b);
            let _ = writeln!(t, "routes agree: {}", yes_no(agree));
            let _ = writeln!(t, "stable under margin {}: {}", config.margin, yes_no(stable));
            let _ = writeln!(t, "certified finite: {}", yes_no(a.certified));
            if a.certified {
                let _ = writeln!(t, "cross identity: {}", yes_no(cross.holds));
            }
            Ok(Output {
                value: json!({"command": "coh", "picture": a, "complex": b, "routes_agree": agree,
                              "margin": config.margin, "cross_identity": cross}),
                table: t,
                ok: agree && (!a.certified || cross.holds),
            })
        }
        Job::Fredholm(w) => {
            let r = w.fredholm_check();
            let _ = writeln!(t, "{:>6}{:>22}{:>22}", "level", "h0", "h1");
            for l in &r.levels {
                let _ = writeln!(t, "{:>6}{:>22}{:>22}", l.n, l.h0.to_string(), l.h1.to_string());
            }
            let _ = writeln!(t, "below the box: {}", r.below.description);
            let _ = writeln!(t, "above the box: {}", r.above.description);
            let _ = writeln!(t, "fredholm: {}", yes_no(r.fredholm));
            Ok(Output { value: json!({"command": "fredholm", "report": r}), table: t, ok: true })
        }
        Job::Schur(a, w) => {
            let r = schur_check(a, w)?;
            let _ = writeln!(t, "A*W in W: {:?}", r.verdict);
            if let Some((x, y)) = &r.witness {
                let _ = writeln!(t, "witness: a = {}, w = {}", vector_text(x), vector_text(y));
            }
            let _ = writeln!(t, "undecided products: {}", r.undecided.len());
            let _ = writeln!(t, "A*A in A: {:?}", r.algebra_closed);
            let witness = r.witness.as_ref().map(|(x, y)| json!([vector_json(x), vector_json(y)]));
            Ok(Output {
                value: json!({"command": "schur", "verdict": r.verdict, "witness": witness,
                              "undecided": r.undecided.len(), "algebra_closed": r.algebra_closed}),
                table: t,
                ok: true,
            })
        }
        Job::StarStar(a, s) => {
            let d = condition_star_star(a, s, win.precision());
            let _ = writeln!(t, "condition (**) for {s}: {d:?}");
            Ok(Output {
                value: json!({"command": "starstar", "series": s.to_string(), "decision": d}),
                table: t,
                ok: true,
            })
        }
        Job::Ord(a, None) => {
            let o = a.t_order()?;
            let _ = writeln!(t, "ord = {o}");
            Ok(Output { value: json!({"command": "ord", "ord": o}), table: t, ok: true })
        }
        Job::Ord(a, Some(b)) => {
            let (oa, ob, oab) = ord_unit(a, b)?;
            let additive = oa + ob == oab;
            let _ = writeln!(t, "ord(a) = {oa}, ord(b) = {ob}, ord(ab) = {oab}, additive: {}", yes_no(additive));
            Ok(Output {
                value: json!({"command": "ord", "ord_a": oa, "ord_b": ob, "ord_ab": oab, "additive": additive}),
                table: t,
                ok: additive,
            })
        }
        Job::KpDerive => {
            let d = derive_kp(win.depth_cap)?;
            let _ = writeln!(t, "residual = {}", d.residual);
            let _ = writeln!(t, "depth used = {}", d.depth);
            let _ = writeln!(t, "u_t  = {}", d.u_t);
            let _ = writeln!(t, "u_y  = {}", d.u_y);
            let _ = writeln!(t, "u_yy = {}", d.u_yy);
            Ok(Output {
                value: json!({"command": "kp-derive", "depth": d.depth, "residual": d.residual.to_string(),
                              "u_t": d.u_t.to_string(), "u_y": d.u_y.to_string(), "u_yy": d.u_yy.to_string(),
                              "holds": d.holds()}),
                table: t,
                ok: d.holds(),
            })
        }
        Job::KdvDerive => {
            let lo = derive_kdv(4.min(win.depth_cap))?;
            let hi = if win.depth_cap >= 6 { Some(derive_kdv(6)?) } else { None };
            let stable = hi.as_ref().is_none_or(|h| {
                h.third_derivative_coefficient == lo.third_derivative_coefficient
                    && h.nonlinear_coefficient == lo.nonlinear_coefficient
            });
            let c = format_rational(&lo.third_derivative_coefficient);
            let e = format_rational(&lo.nonlinear_coefficient);
            let _ = writeln!(t, "4u_t = {}", lo.evolution);
            let _ = writeln!(t, "u''' coefficient = {c}, uu' coefficient = {e}");
            let _ = writeln!(
                t,
                "printed coefficient = {}, matches: {}",
                format_rational(&lo.printed_coefficient),
                yes_no(lo.matches_printed)
            );
            let _ = writeln!(
                t,
                "depths checked = {}{}",
                lo.depth,
                hi.as_ref().map_or(String::new(), |h| format!(", {}", h.depth))
            );
            Ok(Output {
                value: json!({"command": "kdv-derive", "depth": lo.depth, "evolution": lo.evolution.to_string(),
                              "third_derivative_coefficient": c, "nonlinear_coefficient": e,
                              "printed_coefficient": format_rational(&lo.printed_coefficient),
                              "matches_printed": lo.matches_printed, "stable_in_depth": stable}),
                table: t,
                ok: stable,
            })
        }
        Job::KpSymbolic(n) => {
            let mut last = None;
            for depth in 1..=win.depth_cap {
                match kp_flow(*n, depth) {
                    Ok(d) => {
                        let images: Vec<(u32, String)> = d.images().map(|(i, p)| (i, p.to_string())).collect();
                        let _ = writeln!(t, "flow {n} at depth {depth}:");
                        for (i, p) in &images {
                            let _ = writeln!(t, "  D(a{i}) = {p}");
                        }
                        return Ok(Output {
                            value: json!({"command": "flow", "n": n, "depth": depth, "images": images}),
                            table: t,
                            ok: true,
                        });
                    }
                    Err(e @ Error::Precision(_)) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.unwrap_or_else(|| Error::Precision("depth cap reached".into())))
        }
        Job::KpFlow(l, n) => {
            let l =
                if l.floor().is_none() { l.with_floor(win.floor.unwrap_or(DEFAULT_OPERATOR_FLOOR)) } else { l.clone() };
            let p = l.power(*n)?.plus();
            if p.floor().is_some() {
                return Err(Error::Precision(format!("(L^{n})+ is not determined at this floor")));
            }
            let rhs = p.commutator(&l);
            let plus = rhs.plus();
            let ok = plus.floor().is_none() && DiffRing::is_zero(&plus);
            let _ = writeln!(t, "dL/dt{n} = {rhs}");
            let _ = writeln!(t, "nonnegative part vanishes: {}", yes_no(ok));
            Ok(Output {
                value: json!({"command": "flow", "n": n, "rhs": io::to_value(&Document::Operator(Operator::One(rhs))),
                              "well_posed": ok}),
                table: t,
                ok,
            })
        }
        Job::ParshinFlow(pair, i, j) => {
            let (dl, dm) = parshin_flow(pair, *i, *j, None)?;
            let tangent = DiffRing::is_zero(&dl.commutator(&pair.m).add(&pair.l.commutator(&dm)));
            let _ = writeln!(t, "dL = {dl}");
            let _ = writeln!(t, "dM = {dm}");
            let _ = writeln!(t, "[L, M] = 0 preserved: {}", yes_no(tangent));
            Ok(Output {
                value: json!({"command": "flow", "i": i, "j": j,
                              "dl": io::to_value(&Document::Operator(Operator::Two(dl))),
                              "dm": io::to_value(&Document::Operator(Operator::Two(dm))),
                              "bracket_preserved": tangent}),
                table: t,
                ok: tangent,
            })
        }
        Job::Dress(s) => {
            let pair = ParshinPair::dress(s, win.floor.unwrap_or(DEFAULT_DRESSING_FLOOR))?;
            let commuting = pair.is_commuting();
            let _ = writeln!(t, "L = {}", pair.l);
            let _ = writeln!(t, "M = {}", pair.m);
            let _ = writeln!(t, "[L, M] = 0: {}", yes_no(commuting));
            Ok(Output {
                value: json!({"command": "dress", "pair": io::to_value(&Document::Pair(pair)), "commuting": commuting}),
                table: t,
                ok: commuting,
            })
        }
        Job::Apply(a, f) => {
            let g = apply_to_field(a, f)?;
            let _ = writeln!(t, "{g}");
            Ok(Output {
                value: json!({"command": "apply", "result": io::to_value(&Document::Series(g))}),
                table: t,
                ok: true,
            })
        }
        Job::Selfcheck => {
            let outcomes = checks::all(config.seed);
            for c in &outcomes {
                let _ =
                    writeln!(t, "[{}] {:>2} {:<24} {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
            }
            let ok = outcomes.iter().all(|c| c.passed);
            Ok(Output { value: json!({"command": "selfcheck", "seed": config.seed, "checks": outcomes}), table: t, ok })
        }
    }
}

/// Runs one configured invocation, writing reports to `out` and diagnostics
/// to `err`; returns the exit status.
pub fn run(config: &JobConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let jobs = config.validate().and_then(|_| load(&config.inputs)).and_then(|docs| plan(config, docs));
    let jobs = match jobs {
        Ok(j) => j,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let results = par::map(&jobs, |job| execute(config, job));
    let mut status = EXIT_OK;
    let mut values = vec![];
    let mut table = String::new();
    for (i, r) in results.iter().enumerate() {
        if results.len() > 1 {
            let _ = writeln!(table, "== job {i} ==");
        }
        match r {
            Ok(o) => {
                values.push(o.value.clone());
                table.push_str(&o.table);
                if !o.ok && status == EXIT_OK {
                    status = EXIT_PROPERTY;
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error in job {i}: {e}");
                values.push(json!({"job": i, "error": e.to_string()}));
                let _ = writeln!(table, "error: {e}");
                if status == EXIT_OK || status == EXIT_PROPERTY {
                    status = exit_code(e);
                }
            }
        }
    }
    let text = match config.format {
        Format::Table => table,
        Format::Json => {
            let v = if values.len() == 1 { values.remove(0) } else { Value::Array(values) };
            serde_json::to_string_pretty(&v).expect("reports serialize") + "\n"
        }
    };
    let _ = out.write_all(text.as_bytes());
    status
}
