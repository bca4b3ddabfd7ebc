//! The document format read and written by the CLI.
//!
//! Every document is a JSON object with a `"kind"` field; a file holds one
//! document or an array of them (a batch).
//!
//! ```text
//! subspace  {"kind": "subspace", "rank": 1,
//!            "box": {"t": [-3, 3], "u": [-3, 3]},
//!            "tail": {"low": {"affine": {"slope": -1, "intercept": -2}},
//!                     "high": "empty",
//!                     "levels": [[n, component, threshold], ...]},
//!            "generators": [[[t_exp, u_exp, component, "p/q"], ...], ...]}
//! series    {"kind": "series", "terms": [[t_exp, u_exp, "p/q"], ...],
//!            "t_cap": null, "u_caps": [[t_exp, u_cap], ...]}
//! operator  {"kind": "operator", "vars": 1,
//!            "terms": [[exp, power_series], ...], "floor": -8}
//! pair      {"kind": "pair", "l": operator, "m": operator, "dressing": operator | null}
//! ```
//!
//! A threshold is `"none"`, `"full"` or an integer d (the tail holds u^a for
//! a ≤ d); `levels` overrides the boundary modes inside the box. A power
//! series is `{"terms": [[[exponents...], "p/q"], ...], "cap": null}` with one
//! exponent per variable and terms of total degree ≥ cap unknown. With
//! `"vars": 1` the coefficients are series in x; with `"vars": 2` the terms
//! are in δ2 and each coefficient is itself an operator in δ1 over series in
//! x1, x2. Pair operators always have two variables. Scalars may be written
//! as integers or "p/q" strings.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::coefficients::QStr;
use crate::error::{Error, Result};
use crate::hierarchy::{InnerOperator, ParshinPair, TwoVarOperator};
use crate::psdo::OperatorWindow;
use crate::series::{BiSeriesWindow, SeriesDoc, TruncatedSeries};
use crate::subspace::{vector, HighMode, LowMode, Mono, MonomialBox, TailProfile, Threshold, WindowedSubspace};

pub type LaxOperator = OperatorWindow<TruncatedSeries<1>>;

#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    One(LaxOperator),
    Two(TwoVarOperator),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Subspace(WindowedSubspace),
    Series(BiSeriesWindow),
    Operator(Operator),
    Pair(ParshinPair),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Subspace(_) => "subspace",
            Document::Series(_) => "series",
            Document::Operator(_) => "operator",
            Document::Pair(_) => "pair",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ThresholdDoc(Threshold);

impl Serialize for ThresholdDoc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Threshold::None => s.serialize_str("none"),
            Threshold::Full => s.serialize_str("full"),
            Threshold::At(d) => s.serialize_i64(d),
        }
    }
}

impl<'de> Deserialize<'de> for ThresholdDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) if s == "none" => Ok(Self(Threshold::None)),
            Value::String(s) if s == "full" => Ok(Self(Threshold::Full)),
            Value::Number(n) if n.is_i64() => Ok(Self(Threshold::At(n.as_i64().unwrap()))),
            other => Err(serde::de::Error::custom(format!(
                "expected \"none\", \"full\" or an integer threshold, got {other}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxDoc {
    t: (i64, i64),
    u: (i64, i64),
}

fn empty_low() -> LowMode {
    LowMode::Empty
}

fn empty_high() -> HighMode {
    HighMode::Empty
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TailDoc {
    #[serde(default = "empty_low")]
    low: LowMode,
    #[serde(default = "empty_high")]
    high: HighMode,
    #[serde(default)]
    levels: Vec<(i64, usize, ThresholdDoc)>,
}

impl Default for TailDoc {
    fn default() -> Self {
        Self { low: LowMode::Empty, high: HighMode::Empty, levels: vec![] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceDoc {
    rank: usize,
    #[serde(rename = "box")]
    bx: BoxDoc,
    #[serde(default)]
    tail: TailDoc,
    #[serde(default)]
    generators: Vec<Vec<(i64, i64, usize, QStr)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerDoc {
    terms: Vec<(Vec<u32>, QStr)>,
    #[serde(default)]
    cap: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorDoc<C> {
    terms: Vec<(i64, C)>,
    #[serde(default)]
    floor: Option<i64>,
}

type Op2Doc = OperatorDoc<OperatorDoc<PowerDoc>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairDoc {
    l: Op2Doc,
    m: Op2Doc,
    #[serde(default)]
    dressing: Option<Op2Doc>,
}

fn at(path: &str, msg: impl std::fmt::Display) -> Error {
    let path = if path.is_empty() { "." } else { path };
    Error::Invalid(format!("at `{path}`: {msg}"))
}

/// Wraps a library error with a location, without repeating its prefix.
fn located(path: &str, e: Error) -> Error {
    match e {
        Error::Invalid(msg) => at(path, msg),
        other => at(path, other),
    }
}

fn join(path: &str, field: impl std::fmt::Display) -> String {
    let field = field.to_string();
    match (path.is_empty(), field.starts_with('[')) {
        (true, _) => field,
        (false, true) => format!("{path}{field}"),
        (false, false) => format!("{path}.{field}"),
    }
}

fn typed<T: DeserializeOwned>(v: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let inner = e.path().to_string();
        let path = if inner == "." { prefix.to_string() } else { join(prefix, inner) };
        at(&path, e.into_inner())
    })
}

// Conversions between the wire structs and the library types.

fn power_from<const N: usize>(d: &PowerDoc, path: &str) -> Result<TruncatedSeries<N>> {
    let mut terms = Vec::with_capacity(d.terms.len());
    for (i, (exps, c)) in d.terms.iter().enumerate() {
        let m: [u32; N] = exps.as_slice().try_into().map_err(|_| {
            at(&join(path, format!("terms[{i}]")), format!("expected {N} exponent(s), got {}", exps.len()))
        })?;
        terms.push((m, c.0.clone()));
    }
    Ok(TruncatedSeries::with_cap(terms, d.cap))
}

fn power_to<const N: usize>(s: &TruncatedSeries<N>) -> PowerDoc {
    PowerDoc { terms: s.terms().map(|(m, c)| (m.to_vec(), QStr(c.clone()))).collect(), cap: s.cap() }
}

fn lax_from(d: &OperatorDoc<PowerDoc>, path: &str) -> Result<LaxOperator> {
    let terms = d
        .terms
        .iter()
        .enumerate()
        .map(|(i, (e, c))| Ok((*e, power_from::<1>(c, &join(path, format!("terms[{i}]")))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorWindow::new(terms, d.floor))
}

fn lax_to(op: &LaxOperator) -> OperatorDoc<PowerDoc> {
    OperatorDoc { terms: op.terms().map(|(e, c)| (e, power_to(c))).collect(), floor: op.floor() }
}

fn inner_from(d: &OperatorDoc<PowerDoc>, path: &str) -> Result<InnerOperator> {
    let terms = d
        .terms
        .iter()
        .enumerate()
        .map(|(i, (e, c))| Ok((*e, power_from::<2>(c, &join(path, format!("terms[{i}]")))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorWindow::new(terms, d.floor))
}

fn two_from(d: &Op2Doc, path: &str) -> Result<TwoVarOperator> {
    let terms = d
        .terms
        .iter()
        .enumerate()
        .map(|(i, (e, c))| Ok((*e, inner_from(c, &join(path, format!("terms[{i}]")))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(OperatorWindow::new(terms, d.floor))
}

fn two_to(op: &TwoVarOperator) -> Op2Doc {
    OperatorDoc {
        terms: op
            .terms()
            .map(|(e, inner)| {
                let c = OperatorDoc {
                    terms: inner.terms().map(|(e1, s)| (e1, power_to(s))).collect(),
                    floor: inner.floor(),
                };
                (e, c)
            })
            .collect(),
        floor: op.floor(),
    }
}

fn subspace_from(d: &SubspaceDoc, path: &str) -> Result<WindowedSubspace> {
    let bx =
        MonomialBox::new(d.bx.t.0, d.bx.t.1, d.bx.u.0, d.bx.u.1, d.rank).map_err(|e| located(&join(path, "box"), e))?;
    let mut tail = TailProfile::from_modes(&bx, d.tail.low, d.tail.high);
    for (i, (n, j, th)) in d.tail.levels.iter().enumerate() {
        if !bx.contains_level(*n) || *j >= bx.rank {
            return Err(at(
                &join(path, format!("tail.levels[{i}]")),
                format!("level {n}, component {j} lies outside the box"),
            ));
        }
        tail.set(*n, *j, th.0);
    }
    let mut gens = Vec::with_capacity(d.generators.len());
    for (i, g) in d.generators.iter().enumerate() {
        for (k, (t, u, j, _)) in g.iter().enumerate() {
            if !bx.contains(&Mono::new(*t, *u, *j)) {
                return Err(at(
                    &join(path, format!("generators[{i}][{k}]")),
                    format!("u^{u} t^{t} e{j} lies outside the box"),
                ));
            }
        }
        gens.push(vector(g.iter().map(|(t, u, j, c)| (Mono::new(*t, *u, *j), c.0.clone()))));
    }
    WindowedSubspace::new(bx, tail, gens).map_err(|e| located(path, e))
}

fn subspace_to(w: &WindowedSubspace) -> SubspaceDoc {
    let bx = *w.bx();
    let t = w.tail();
    let base = TailProfile::from_modes(&bx, t.low, t.high);
    let mut levels = vec![];
    for n in bx.t_lo..bx.t_hi {
        for j in 0..bx.rank {
            let th = t.threshold(n, j);
            if th != base.threshold(n, j) {
                levels.push((n, j, ThresholdDoc(th)));
            }
        }
    }
    SubspaceDoc {
        rank: bx.rank,
        bx: BoxDoc { t: (bx.t_lo, bx.t_hi), u: (bx.u_lo, bx.u_hi) },
        tail: TailDoc { low: t.low, high: t.high, levels },
        generators: w
            .raw_generators()
            .iter()
            .map(|g| g.iter().map(|(m, c)| (m.t, m.u, m.comp, QStr(c.clone()))).collect())
            .collect(),
    }
}

fn with_kind(kind: &str, body: impl Serialize) -> Value {
    let mut v = serde_json::to_value(body).expect("documents serialize");
    if let Value::Object(map) = &mut v {
        map.insert("kind".into(), Value::String(kind.into()));
    }
    v
}

/// The JSON value of a document, `"kind"` included.
pub fn to_value(doc: &Document) -> Value {
    match doc {
        Document::Subspace(w) => with_kind("subspace", subspace_to(w)),
        Document::Series(s) => {
            let mut d = s.to_doc();
            d.kind = None;
            with_kind("series", d)
        }
        Document::Operator(Operator::One(op)) => {
            let mut v = with_kind("operator", lax_to(op));
            v["vars"] = 1.into();
            v
        }
        Document::Operator(Operator::Two(op)) => {
            let mut v = with_kind("operator", two_to(op));
            v["vars"] = 2.into();
            v
        }
        Document::Pair(p) => {
            with_kind("pair", PairDoc { l: two_to(&p.l), m: two_to(&p.m), dressing: p.dressing.as_ref().map(two_to) })
        }
    }
}

pub fn to_json(doc: &Document) -> String {
    serde_json::to_string_pretty(&to_value(doc)).expect("documents serialize")
}

fn take_field(map: &mut serde_json::Map<String, Value>, key: &str, path: &str) -> Result<Value> {
    map.remove(key).ok_or_else(|| at(path, format!("missing field `{key}`")))
}

/// Parses one document value; `path` prefixes diagnostics.
pub fn from_value(v: Value, path: &str) -> Result<Document> {
    let Value::Object(mut map) = v else {
        return Err(at(path, "expected a document object"));
    };
    let kind = match take_field(&mut map, "kind", path)? {
        Value::String(s) => s,
        other => return Err(at(&join(path, "kind"), format!("expected a string, got {other}"))),
    };
    match kind.as_str() {
        "subspace" => {
            let d: SubspaceDoc = typed(Value::Object(map), path)?;
            Ok(Document::Subspace(subspace_from(&d, path)?))
        }
        "series" => {
            let d: SeriesDoc = typed(Value::Object(map), path)?;
            BiSeriesWindow::from_doc(&d).map(Document::Series).map_err(|e| located(path, e))
        }
        "operator" => {
            let vars = take_field(&mut map, "vars", path)?;
            match vars.as_u64() {
                Some(1) => {
                    let d: OperatorDoc<PowerDoc> = typed(Value::Object(map), path)?;
                    Ok(Document::Operator(Operator::One(lax_from(&d, path)?)))
                }
                Some(2) => {
                    let d: Op2Doc = typed(Value::Object(map), path)?;
                    Ok(Document::Operator(Operator::Two(two_from(&d, path)?)))
                }
                _ => Err(at(&join(path, "vars"), format!("expected 1 or 2, got {vars}"))),
            }
        }
        "pair" => {
            let d: PairDoc = typed(Value::Object(map), path)?;
            let l = two_from(&d.l, &join(path, "l"))?;
            let m = two_from(&d.m, &join(path, "m"))?;
            let dressing = d.dressing.as_ref().map(|s| two_from(s, &join(path, "dressing"))).transpose()?;
            Ok(Document::Pair(ParshinPair { l, m, dressing }))
        }
        other => {
            Err(at(&join(path, "kind"), format!("unknown kind `{other}`, expected subspace, series, operator or pair")))
        }
    }
}

/// Parses a file holding one document or a batch array of them.
pub fn parse_documents(text: &str) -> Result<Vec<Document>> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Invalid(format!("malformed JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    match v {
        Value::Array(items) => {
            items.into_iter().enumerate().map(|(i, item)| from_value(item, &format!("[{i}]"))).collect()
        }
        single => Ok(vec![from_value(single, "")?]),
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut docs = parse_documents(text)?;
    if docs.len() != 1 {
        return Err(Error::Invalid(format!("expected a single document, found {}", docs.len())));
    }
    Ok(docs.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{hand_built_corpus, non_representable_ring};
    use crate::coefficients::int;
    use crate::hierarchy::two_var_monomial;
    use crate::series::DiffRing;

    fn round_trip(d: &Document) {
        let text = to_json(d);
        let back = parse_document(&text).unwrap();
        assert_eq!(&back, d);
        assert_eq!(to_json(&back), text);
    }

    #[test]
    fn subspaces_round_trip() {
        for (_, w) in hand_built_corpus() {
            round_trip(&Document::Subspace(w));
        }
    }

    #[test]
    fn operators_series_and_pairs_round_trip() {
        let lax = OperatorWindow::new(
            [(1, TruncatedSeries::one()), (-1, TruncatedSeries::with_cap([([2], int(3))], Some(5)))],
            Some(-8),
        );
        round_trip(&Document::Operator(Operator::One(lax)));
        let s = TwoVarOperator::one().add(&two_var_monomial(int(2), [1, 0], -1, -1));
        round_trip(&Document::Operator(Operator::Two(s.clone())));
        round_trip(&Document::Pair(ParshinPair::dress(&s, -3).unwrap()));
        round_trip(&Document::Pair(ParshinPair::trivial()));
        let f = BiSeriesWindow::from_terms([(0, -1, int(1)), (2, 3, crate::coefficients::frac(-1, 2))]);
        round_trip(&Document::Series(f.inverse(Default::default()).unwrap()));
    }

    #[test]
    fn reads_the_compact_form() {
        let text = r#"{"kind": "subspace", "rank": 1, "box": {"t": [-3, 3], "u": [-3, 3]},
            "tail": {"low": {"affine": {"slope": -1, "intercept": -2}},
                     "high": {"affine": {"slope": -1, "intercept": -2}}},
            "generators": [[[0, 0, 0, 1]], [[0, -1, 0, "1"], [-1, 0, 0, "1"]]]}"#;
        assert_eq!(parse_document(text).unwrap(), Document::Subspace(non_representable_ring()));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let cases = [
            (r#"{"kind": "subspace", "rank": 1, "box": {"t": [-3, 3], "u": [-3, "x"]}}"#, "box.u"),
            (
                r#"{"kind": "subspace", "rank": 1, "box": {"t": [-3, 3], "u": [-3, 3]}, "tail": {"levels": [[0, 0, "half"]]}}"#,
                "tail.levels[0]",
            ),
            (
                r#"{"kind": "subspace", "rank": 1, "box": {"t": [-3, 3], "u": [-3, 3]}, "generators": [[[9, 0, 0, 1]]]}"#,
                "generators[0][0]",
            ),
            (r#"[{"kind": "series", "terms": []}, {"kind": "blob"}]"#, "[1].kind"),
            (r#"{"kind": "operator", "vars": 1, "terms": [[0, {"terms": [[[1, 2], 1]]}]]}"#, "terms[0]"),
            (r#"{"kind": "series", "terms": [[0, 0, "1/0"]]}"#, "terms[0][2]"),
            (r#"{"kind": "pair", "l": {"terms": []}}"#, "missing field `m`"),
        ];
        for (text, needle) in cases {
            let err = parse_documents(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err} should mention {needle}");
        }
        assert!(parse_documents("{").unwrap_err().to_string().contains("line 1"));
    }
}
