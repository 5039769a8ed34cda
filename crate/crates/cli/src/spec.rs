//! JSON specifications of functions, norms, weights and Young functions.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use rikit::homogeneity::DeltaFamily;
use rikit::lorentz::{LorentzParams, Mode, PowerPiece, Weight};
use rikit::orlicz::{OrliczLorentzParams, YoungFunction, YoungPiece};
use rikit::repro::g_family;
use rikit::{
    AnalyticDecreasing, NormFunctional, NormKind, QuadratureSpec, RearrangedFunction, StepFunction,
};

use crate::error::{CliError, CliResult};

/// Numbers that may be infinite, written as JSON numbers or `"inf"`.
mod extended {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => {
                Ok(f64::INFINITY)
            }
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {t:?}"
            ))),
        }
    }
}

/// Separates an inner field path from its message inside nested errors.
const PATH_SEP: char = '\u{1f}';

fn join_path(outer: &str, inner: &str) -> String {
    match (outer.is_empty(), inner.is_empty()) {
        (true, _) => inner.to_string(),
        (_, true) => outer.to_string(),
        _ if inner.starts_with('[') => format!("{outer}{inner}"),
        _ => format!("{outer}.{inner}"),
    }
}

/// Splits nested `path<SEP>message` layers into one path and the message.
fn unwrap_path(mut path: String, mut message: String) -> (String, String) {
    while let Some((inner, rest)) = message.split_once(PATH_SEP) {
        path = join_path(&path, inner);
        message = rest.to_string();
    }
    (path, message)
}

fn render_path(segments: &[String]) -> String {
    segments
        .iter()
        .fold(String::new(), |acc, s| join_path(&acc, s))
}

/// Deserialises an internally tagged object through an externally tagged
/// derive so that field paths survive; the variant segment is dropped.
fn untag<T, E: de::Error>(
    value: Value,
    tag: &str,
    parse: impl FnOnce(serde_path_to_error::Deserializer<Value>) -> Result<T, serde_json::Error>,
) -> Result<T, E> {
    let Value::Object(mut map) = value else {
        return Err(E::custom(format!(
            "{PATH_SEP}expected an object with a \"{tag}\" field"
        )));
    };
    let variant = match map.remove(tag) {
        Some(Value::String(v)) => v,
        Some(_) => return Err(E::custom(format!("{tag}{PATH_SEP}expected a string"))),
        None => return Err(E::custom(format!("{PATH_SEP}missing field `{tag}`"))),
    };
    let wrapped = Value::Object(Map::from_iter([(variant, Value::Object(map))]));
    let mut track = serde_path_to_error::Track::new();
    parse(serde_path_to_error::Deserializer::new(wrapped, &mut track)).map_err(|e| {
        let segments: Vec<String> = track
            .path()
            .iter()
            .skip(1)
            .map(|seg| match seg {
                serde_path_to_error::Segment::Seq { index } => format!("[{index}]"),
                serde_path_to_error::Segment::Map { key } => key.clone(),
                serde_path_to_error::Segment::Enum { variant } => variant.clone(),
                _ => "?".into(),
            })
            .collect();
        E::custom(format!("{}{PATH_SEP}{e}", render_path(&segments)))
    })
}

/// An internally tagged enum whose deserialiser reports field paths.
/// The variant list is emitted twice: once as the public type and once as
/// an externally tagged remote mirror that does the parsing.
macro_rules! tagged_spec {
    (
        $(#[$meta:meta])*
        pub enum $name:ident ($remote:literal, mirror $repr:ident, tag $tag:literal) { $($body:tt)* }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize)]
        #[serde(tag = $tag, rename_all = "kebab-case")]
        pub enum $name { $($body)* }

        #[allow(dead_code)]
        #[derive(Deserialize)]
        #[serde(remote = $remote, rename_all = "kebab-case", deny_unknown_fields)]
        enum $repr { $($body)* }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                untag(Value::deserialize(d)?, $tag, |de| $repr::deserialize(de))
            }
        }
    };
}

tagged_spec! {
    pub enum FunctionSpec ("FunctionSpec", mirror FunctionSpecRepr, tag "kind") {
        /// `(value, length)` pairs laid out left to right.
        Step { pieces: Vec<(f64, f64)> },
        AnalyticNamed(NamedFunction),
        Dilated { r: f64, inner: Box<FunctionSpec> },
        Scaled { scalar: f64, inner: Box<FunctionSpec> },
    }
}

tagged_spec! {
    pub enum NamedFunction ("NamedFunction", mirror NamedFunctionRepr, tag "name") {
    YCounterexample {
        p: f64,
    },
    G {
        p: f64,
        #[serde(rename = "Q")]
        q_big: f64,
    },
    Indicator {
        t: f64,
    },
    PowerDecay {
        exponent: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        support: Option<f64>,
    },
}
}

impl FunctionSpec {
    pub fn build(&self) -> CliResult<RearrangedFunction> {
        Ok(match self {
            FunctionSpec::Step { pieces } => (&StepFunction::new(pieces.clone())?).into(),
            FunctionSpec::AnalyticNamed(named) => match named {
                NamedFunction::YCounterexample { p } => {
                    AnalyticDecreasing::y_counterexample(*p)?.into()
                }
                NamedFunction::G { p, q_big } => AnalyticDecreasing::g(*p, *q_big)?.into(),
                NamedFunction::Indicator { t } => RearrangedFunction::indicator(*t)?,
                NamedFunction::PowerDecay { exponent, support } => {
                    AnalyticDecreasing::power_decay(*exponent, *support)?.into()
                }
            },
            FunctionSpec::Dilated { r, inner } => inner.build()?.dilate(*r)?,
            FunctionSpec::Scaled { scalar, inner } => inner.build()?.scale(*scalar)?,
        })
    }
}

/// A named Young function (`power-<q>`, `oscillating`) or a power table.
#[derive(Debug, Clone, PartialEq)]
pub enum YoungSpec {
    Power(f64),
    Oscillating,
    Table(Vec<YoungPiece>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct YoungTable {
    pieces: Vec<TablePiece>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TablePiece {
    #[serde(with = "extended")]
    end: f64,
    coef: f64,
    exponent: f64,
}

impl YoungSpec {
    /// Accepts a name or, if the text starts with `{`, a JSON table.
    pub fn parse(text: &str) -> CliResult<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            let table: YoungTable = parse_json(text, "young function")?;
            return Ok(Self::from_table(table));
        }
        Self::from_name(text).map_err(|m| CliError::Spec {
            path: ".".into(),
            message: m,
        })
    }

    fn from_name(name: &str) -> Result<Self, String> {
        if name == "oscillating" {
            return Ok(YoungSpec::Oscillating);
        }
        name.strip_prefix("power-")
            .and_then(|q| q.parse::<f64>().ok())
            .map(YoungSpec::Power)
            .ok_or_else(|| {
                format!(
                    "unknown Young function {name:?}; expected power-<q>, oscillating or a table"
                )
            })
    }

    fn from_table(t: YoungTable) -> Self {
        YoungSpec::Table(
            t.pieces
                .into_iter()
                .map(|p| YoungPiece {
                    end: p.end,
                    coef: p.coef,
                    exponent: p.exponent,
                })
                .collect(),
        )
    }

    pub fn build(&self) -> CliResult<YoungFunction> {
        Ok(match self {
            YoungSpec::Power(q) => YoungFunction::power(*q)?,
            YoungSpec::Oscillating => YoungFunction::oscillating(),
            YoungSpec::Table(pieces) => YoungFunction::piecewise(pieces.clone())?,
        })
    }
}

impl Serialize for YoungSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            YoungSpec::Power(q) => s.serialize_str(&format!("power-{q}")),
            YoungSpec::Oscillating => s.serialize_str("oscillating"),
            YoungSpec::Table(pieces) => YoungTable {
                pieces: pieces
                    .iter()
                    .map(|p| TablePiece {
                        end: p.end,
                        coef: p.coef,
                        exponent: p.exponent,
                    })
                    .collect(),
            }
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for YoungSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Name(String),
            Table(YoungTable),
        }
        match Raw::deserialize(d)? {
            Raw::Name(n) => YoungSpec::from_name(&n).map_err(serde::de::Error::custom),
            Raw::Table(t) => Ok(YoungSpec::from_table(t)),
        }
    }
}

tagged_spec! {
    pub enum WeightSpec ("WeightSpec", mirror WeightSpecRepr, tag "kind") {
        /// `coef · t^exponent`
        Power { coef: f64, exponent: f64 },
        Indicator { len: f64 },
        Piecewise { pieces: Vec<WeightPiece> },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightPiece {
    #[serde(with = "extended")]
    pub end: f64,
    pub coef: f64,
    pub exponent: f64,
}

impl WeightSpec {
    pub fn build(&self) -> CliResult<Weight> {
        Ok(match self {
            WeightSpec::Power { coef, exponent } => Weight::power(*coef, *exponent)?,
            WeightSpec::Indicator { len } => Weight::indicator(*len)?,
            WeightSpec::Piecewise { pieces } => Weight::piecewise(
                pieces
                    .iter()
                    .map(|p| PowerPiece {
                        end: p.end,
                        coef: p.coef,
                        exponent: p.exponent,
                    })
                    .collect(),
            )?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    Star,
    #[default]
    Doublestar,
}

impl From<ModeSpec> for Mode {
    fn from(m: ModeSpec) -> Self {
        match m {
            ModeSpec::Star => Mode::Star,
            ModeSpec::Doublestar => Mode::DoubleStar,
        }
    }
}

fn is_default_mode(m: &ModeSpec) -> bool {
    *m == ModeSpec::Doublestar
}

tagged_spec! {
pub enum NormSpec ("NormSpec", mirror NormSpecRepr, tag "kind") {
    LorentzStar {
        p: f64,
        #[serde(with = "extended")]
        q: f64,
    },
    LorentzDoublestar {
        p: f64,
        #[serde(with = "extended")]
        q: f64,
    },
    Lambda {
        q: f64,
        weight: WeightSpec,
    },
    Gamma {
        q: f64,
        weight: WeightSpec,
    },
    OrliczLorentz {
        p: f64,
        phi: YoungSpec,
        #[serde(default, skip_serializing_if = "is_default_mode")]
        mode: ModeSpec,
    },
    /// The extrapolation family normalising the slowly decaying example.
    DeltaG {
        p: f64,
        #[serde(rename = "Q")]
        q_big: f64,
        #[serde(rename = "N")]
        n: usize,
    },
    YSpace {
        p: f64,
    },
}
}

impl NormSpec {
    pub fn build(&self, quad: &QuadratureSpec) -> CliResult<NormFunctional> {
        let kind = match self {
            NormSpec::LorentzStar { p, q } => NormKind::LorentzStar(LorentzParams::new(*p, *q)?),
            NormSpec::LorentzDoublestar { p, q } => {
                NormKind::LorentzDoubleStar(LorentzParams::new(*p, *q)?)
            }
            NormSpec::Lambda { q, weight } => NormKind::Lambda {
                q: *q,
                weight: weight.build()?,
            },
            NormSpec::Gamma { q, weight } => NormKind::Gamma {
                q: *q,
                weight: weight.build()?,
            },
            NormSpec::OrliczLorentz { p, phi, mode } => NormKind::OrliczLorentz(
                OrliczLorentzParams::new(*p, phi.build()?)?.with_mode((*mode).into()),
            ),
            NormSpec::DeltaG { p, q_big, n } => {
                NormKind::Delta(self::delta_family(*p, *q_big, *n, quad)?)
            }
            NormSpec::YSpace { p } => NormKind::YSpace { p: *p },
        };
        Ok(NormFunctional::new(kind)?.with_quad(*quad))
    }
}

fn delta_family(p: f64, q_big: f64, n: usize, quad: &QuadratureSpec) -> CliResult<DeltaFamily> {
    Ok(g_family(p, q_big, n, quad)?)
}

/// Deserialises with the failing field path in the error.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let outer = e.path().to_string();
        let outer = if outer == "." { String::new() } else { outer };
        let (path, message) = unwrap_path(outer, e.inner().to_string());
        CliError::Spec {
            path: if path.is_empty() { ".".into() } else { path },
            message: format!("{what}: {message}"),
        }
    })
}

pub fn parse_function_spec(text: &str) -> CliResult<RearrangedFunction> {
    parse_json::<FunctionSpec>(text, "function spec")?.build()
}

pub fn parse_norm_spec(text: &str, quad: &QuadratureSpec) -> CliResult<NormFunctional> {
    parse_json::<NormSpec>(text, "norm spec")?.build(quad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_step_and_named() {
        let f = parse_function_spec(r#"{"kind":"step","pieces":[[3,1],[1,2]]}"#).unwrap();
        assert_eq!(f.evaluate(0.5), 3.0);
        assert_eq!(f.evaluate(2.5), 1.0);
        let g = parse_function_spec(r#"{"kind":"analytic-named","name":"g","p":2,"Q":3}"#).unwrap();
        let t: f64 = 0.01;
        let expected = t.powf(-0.5) * (-t.ln()).powf(-1.0 / 3.0);
        assert!((g.evaluate(t) - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn dilation_of_indicator() {
        let f = parse_function_spec(
            r#"{"kind":"dilated","r":2,"inner":{"kind":"step","pieces":[[1,1]]}}"#,
        )
        .unwrap();
        assert_eq!(f.evaluate(0.49), 1.0);
        assert_eq!(f.evaluate(0.51), 0.0);
    }

    #[test]
    fn errors_carry_paths() {
        let err = parse_json::<FunctionSpec>(
            r#"{"kind":"scaled","scalar":2,"inner":{"kind":"step","pieces":[[1,"x"]]}}"#,
            "f",
        )
        .unwrap_err();
        match err {
            CliError::Spec { path, .. } => assert!(path.starts_with("inner.pieces"), "{path}"),
            e => panic!("unexpected {e}"),
        }
        assert!(
            parse_json::<FunctionSpec>(r#"{"kind":"analytic-named","name":"bessel"}"#, "f")
                .is_err()
        );
        assert!(parse_function_spec(r#"{"kind":"step","pieces":[[1,-2]]}"#).is_err());
    }

    #[test]
    fn young_specs() {
        assert_eq!(YoungSpec::parse("power-4").unwrap(), YoungSpec::Power(4.0));
        assert_eq!(
            YoungSpec::parse("oscillating").unwrap(),
            YoungSpec::Oscillating
        );
        assert!(YoungSpec::parse("cubic").is_err());
        let t = YoungSpec::parse(
            r#"{"pieces":[{"end":1,"coef":1,"exponent":2},{"end":"inf","coef":1,"exponent":3}]}"#,
        )
        .unwrap();
        assert!(matches!(t, YoungSpec::Table(ref p) if p.len() == 2 && p[1].end == f64::INFINITY));
    }

    #[test]
    fn norm_spec_with_infinite_q() {
        let n: NormSpec =
            serde_json::from_str(r#"{"kind":"lorentz-doublestar","p":2,"q":"inf"}"#).unwrap();
        assert_eq!(
            n,
            NormSpec::LorentzDoublestar {
                p: 2.0,
                q: f64::INFINITY
            }
        );
        assert!(serde_json::to_string(&n).unwrap().contains("\"inf\""));
    }
}
