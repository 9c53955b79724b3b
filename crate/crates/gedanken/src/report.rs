//! Serialized forms of scenario reports and the catalog.
//!
//! JSON floats are written with 17 significant digits so that parsing and
//! re-serializing a report reproduces it byte for byte.

use std::io;

use gedanken_core::scenarios::{Check, ParamSpec, ScenarioInfo, ScenarioReport, Step};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

/// A report as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub scenario: String,
    #[serde(with = "pairs")]
    pub params: Vec<(String, f64)>,
    pub seed: u64,
    pub steps: Vec<StepDoc>,
    pub checks: Vec<CheckDoc>,
    #[serde(with = "pairs")]
    pub metrics: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDoc {
    pub label: String,
    pub state: Vec<TermDoc>,
    #[serde(with = "pairs")]
    pub distribution: Vec<(String, f64)>,
    pub probability: Option<f64>,
    #[serde(with = "pairs")]
    pub entropies: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDoc {
    #[serde(with = "pairs")]
    pub assignment: Vec<(String, String)>,
    /// `[re, im]`
    pub amplitude: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub name: String,
    pub comparison: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: String,
}

impl From<&Step> for StepDoc {
    fn from(s: &Step) -> Self {
        StepDoc {
            label: s.label.clone(),
            state: s
                .state
                .iter()
                .map(|t| TermDoc { assignment: t.assignment.clone(), amplitude: [t.amplitude.re, t.amplitude.im] })
                .collect(),
            distribution: s.distribution.clone(),
            probability: s.probability,
            entropies: s.entropies.clone(),
        }
    }
}

impl From<&Check> for CheckDoc {
    fn from(c: &Check) -> Self {
        CheckDoc {
            name: c.name.clone(),
            comparison: c.comparison.name().into(),
            expected: c.expected,
            actual: c.actual,
            tolerance: c.tolerance,
            pass: c.pass,
            provenance: c.provenance.clone(),
        }
    }
}

impl From<&ScenarioReport> for ReportDoc {
    fn from(r: &ScenarioReport) -> Self {
        ReportDoc {
            scenario: r.scenario.clone(),
            params: r.params.clone(),
            seed: r.seed,
            steps: r.steps.iter().map(StepDoc::from).collect(),
            checks: r.checks.iter().map(CheckDoc::from).collect(),
            metrics: r.metrics.clone(),
            notes: r.notes.clone(),
        }
    }
}

impl ReportDoc {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn step(&self, label: &str) -> Option<&StepDoc> {
        self.steps.iter().find(|s| s.label == label)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamDoc {
    pub name: String,
    pub default: f64,
    pub min: f64,
    pub max: f64,
    pub min_inclusive: bool,
    pub max_inclusive: bool,
    pub integer: bool,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub name: String,
    pub anchor: String,
    pub params: Vec<ParamDoc>,
}

impl From<&ParamSpec> for ParamDoc {
    fn from(p: &ParamSpec) -> Self {
        ParamDoc {
            name: p.name.into(),
            default: p.default,
            min: p.min,
            max: p.max,
            min_inclusive: p.min_inclusive,
            max_inclusive: p.max_inclusive,
            integer: p.integer,
            description: p.description.into(),
        }
    }
}

impl From<&ScenarioInfo> for ScenarioDoc {
    fn from(s: &ScenarioInfo) -> Self {
        ScenarioDoc { name: s.name.into(), anchor: s.anchor.into(), params: s.params.iter().map(ParamDoc::from).collect() }
    }
}

/// Pretty JSON with 17-significant-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Exact(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

pub fn from_json(text: &str) -> serde_json::Result<ReportDoc> {
    serde_json::from_str(text)
}

/// One row per check.
pub fn checks_csv(doc: &ReportDoc) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["scenario", "check", "comparison", "expected", "actual", "tolerance", "pass", "provenance"];
    w.write_record(header).expect("in-memory csv");
    for c in &doc.checks {
        w.write_record([
            doc.scenario.as_str(),
            &c.name,
            &c.comparison,
            &number(c.expected),
            &number(c.actual),
            &number(c.tolerance),
            if c.pass { "true" } else { "false" },
            &c.provenance,
        ])
        .expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv writes UTF-8")
}

/// Shortest decimal form that parses back to the same float.
pub fn number(v: f64) -> String {
    format!("{v:?}")
}

/// Delegates layout to `PrettyFormatter` and prints floats as `{:.16e}`.
struct Exact<'a>(PrettyFormatter<'a>);

impl Formatter for Exact<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn end_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_key(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// `Vec<(String, T)>` as a JSON object, keeping insertion order.
mod pairs {
    use std::fmt;
    use std::marker::PhantomData;

    use serde::de::{MapAccess, Visitor};
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, T: Serialize>(v: &[(String, T)], s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(v.len()))?;
        for (k, x) in v {
            map.serialize_entry(k, x)?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>, T: Deserialize<'de>>(d: D) -> Result<Vec<(String, T)>, D::Error> {
        struct Pairs<T>(PhantomData<T>);

        impl<'de, T: Deserialize<'de>> Visitor<'de> for Pairs<T> {
            type Value = Vec<(String, T)>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some(entry) = m.next_entry()? {
                    out.push(entry);
                }
                Ok(out)
            }
        }

        d.deserialize_map(Pairs(PhantomData))
    }
}
