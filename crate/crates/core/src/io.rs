//! CSV ingestion/emission and JSON helpers for extended reals.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stepfn::StepFunction;

/// Serde adapter writing `±∞` and NaN as the strings `"inf"`, `"-inf"`,
/// `"nan"`; JSON has no literal for them.
pub mod ext {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct V;

    impl Visitor<'_> for V {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            super::parse_ext(v).ok_or_else(|| E::custom(format!("not a number: {v}")))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(V)
    }

    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        #[derive(serde::Serialize, serde::Deserialize)]
        struct W(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&W(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<W>::deserialize(d)?.into_iter().map(|w| w.0).collect())
        }
    }

    pub mod opt {
        use serde::{Deserialize, Deserializer, Serializer};

        #[derive(serde::Serialize, serde::Deserialize)]
        struct W(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => s.serialize_some(&W(*x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
        }
    }
}

/// Parses a float, accepting `inf`/`-inf`/`nan` spellings.
pub fn parse_ext(s: &str) -> Option<f64> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => t.parse().ok(),
    }
}

/// JSON mirror of a step function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepFunctionJson {
    #[serde(with = "ext::vec")]
    pub breakpoints: Vec<f64>,
    #[serde(with = "ext::vec")]
    pub values: Vec<f64>,
    #[serde(with = "ext::opt")]
    pub support_end: Option<f64>,
}

impl From<&StepFunction<f64>> for StepFunctionJson {
    fn from(f: &StepFunction<f64>) -> Self {
        Self {
            breakpoints: f.breakpoints().to_vec(),
            values: f.values().to_vec(),
            support_end: f.support_end(),
        }
    }
}

impl TryFrom<StepFunctionJson> for StepFunction<f64> {
    type Error = Error;

    fn try_from(j: StepFunctionJson) -> Result<Self> {
        StepFunction::new(j.breakpoints, j.values, j.support_end)
    }
}

fn fmt_ext(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// Writes `t,value` with a leading `0,v₀` row; a support end appears as a
/// final row with value 0.
pub fn write_step_csv<W: Write>(f: &StepFunction<f64>, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["t", "value"]).map_err(csv_err)?;
    wtr.write_record(["0".to_string(), fmt_ext(f.values()[0])]).map_err(csv_err)?;
    for (b, v) in f.breakpoints().iter().zip(&f.values()[1..]) {
        wtr.write_record([fmt_ext(*b), fmt_ext(*v)]).map_err(csv_err)?;
    }
    if let Some(e) = f.support_end() {
        wtr.write_record([fmt_ext(e), "0".into()]).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Inverse of [`write_step_csv`].
pub fn read_step_csv<R: Read>(r: R) -> Result<StepFunction<f64>> {
    let rows = read_pairs(r, ["t", "value"])?;
    let Some(&(t0, v0)) = rows.first() else {
        return Err(Error::Parse { line: 1, msg: "no data rows".into() });
    };
    if t0 != 0.0 {
        return Err(Error::Parse { line: 2, msg: "first row must be 0,<v0>".into() });
    }
    let mut bp = Vec::new();
    let mut vs = vec![v0];
    let mut end = None;
    for (i, &(t, v)) in rows.iter().enumerate().skip(1) {
        if v == 0.0 {
            if i + 1 != rows.len() {
                return Err(Error::Parse { line: i as u64 + 2, msg: "zero value before the last row".into() });
            }
            end = Some(t);
        } else {
            bp.push(t);
            vs.push(v);
        }
    }
    StepFunction::new(bp, vs, end)
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse { line, msg: e.to_string() }
}

/// Reads a two-column numeric CSV with the given header. Line numbers in
/// errors are 1-based file lines (the header is line 1).
pub fn read_pairs<R: Read>(r: R, header: [&str; 2]) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    let h = rdr.headers().map_err(csv_err)?.clone();
    if h.len() != 2 || h.get(0) != Some(header[0]) || h.get(1) != Some(header[1]) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected header `{},{}`, found `{}`", header[0], header[1], h.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != 2 {
            return Err(Error::Parse { line, msg: format!("expected 2 fields, found {}", rec.len()) });
        }
        let a = parse_ext(&rec[0]).ok_or_else(|| Error::Parse { line, msg: format!("not a number: `{}`", &rec[0]) })?;
        let b = parse_ext(&rec[1]).ok_or_else(|| Error::Parse { line, msg: format!("not a number: `{}`", &rec[1]) })?;
        out.push((a, b));
    }
    Ok(out)
}

/// Reads a header-less dense numeric matrix.
pub fn read_matrix<R: Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let row = rec
            .iter()
            .map(|s| parse_ext(s).filter(|v| v.is_finite()).ok_or_else(|| Error::Parse { line, msg: format!("not a finite number: `{s}`") }))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, msg: "empty matrix".into() });
    }
    let n = rows.len();
    if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Parse { line: i as u64 + 1, msg: format!("matrix must be square ({n} columns)") });
    }
    Ok(rows)
}

pub fn open(path: &Path) -> Result<std::fs::File> {
    Ok(std::fs::File::open(path)?)
}
