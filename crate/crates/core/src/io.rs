//! Input documents: interval sets, point windows, covers. Every reader also
//! accepts a run report written by the command line and reads its
//! `outputs`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::examples::{easycor_lambda, hkw_cover, LengthRule, Schedule};
use crate::pointset::{DensityBound, PointSetWindow};
use crate::setmodel::{CoverSpec, IntervalUnion};

/// Generator descriptors accepted in place of an explicit point list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointSource {
    Easycor {
        beta: f64,
        j_max: usize,
        #[serde(default)]
        schedule: Schedule,
    },
    /// `{from, from + 1, …, to}`.
    Integers { from: i64, to: i64 },
    /// `{sign(n)·n³ : |n| ≤ n_max}`.
    Cubes { n_max: u32 },
}

impl PointSource {
    pub fn generate(&self) -> Result<PointSetWindow> {
        match *self {
            PointSource::Easycor {
                beta,
                j_max,
                schedule,
            } => easycor_lambda(beta, j_max, schedule),
            PointSource::Integers { from, to } => {
                if to < from {
                    return Err(Error::config(format!("empty integer range {from}..={to}")));
                }
                PointSetWindow::new((from..=to).map(|n| n as f64).collect())
            }
            PointSource::Cubes { n_max } => cube_window(n_max),
        }
    }
}

/// `{sign(n)·n³ : |n| ≤ n_max}`.
pub fn cube_window(n_max: u32) -> Result<PointSetWindow> {
    let n = i64::from(n_max);
    PointSetWindow::new((-n..=n).map(|k| (k * k * k) as f64).collect())
}

/// Cover descriptor: either a literal cover or the rational-centred generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverSource {
    Hkw {
        n_max: usize,
        #[serde(default)]
        rule: LengthRule,
        #[serde(default, rename = "Z")]
        z: usize,
        #[serde(default = "half")]
        alpha: f64,
    },
}

fn half() -> f64 {
    0.5
}

impl CoverSource {
    pub fn generate(&self) -> Result<CoverSpec> {
        match *self {
            CoverSource::Hkw {
                n_max,
                rule,
                z,
                alpha,
            } => {
                let mut c = hkw_cover(n_max, rule)?;
                c.z = z;
                c.alpha = alpha;
                c.validate()?;
                Ok(c)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SetDocument {
    intervals: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
struct PointsDocument {
    points: Vec<f64>,
    #[serde(default)]
    window_certified: bool,
    #[serde(default)]
    density_bound: Option<DensityBound>,
}

fn read_text(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(Error::input(format!("{} is empty", path.display())));
    }
    Ok(text)
}

/// Strips a run-report wrapper and, when present, a named payload key.
fn unwrap_payload(mut v: Value, key: &str) -> Value {
    if let Some(out) = v.get_mut("outputs").map(Value::take) {
        v = out;
    }
    if let Some(inner) = v.get_mut(key).map(Value::take) {
        if inner.is_object() {
            return inner;
        }
        // keep siblings such as window flags next to a points array
        v[key] = inner;
    }
    v
}

fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::input(format!("malformed {what} document: {e}")))
}

pub fn parse_set(text: &str) -> Result<IntervalUnion> {
    let v = unwrap_payload(parse_json(text, "set")?, "set");
    let doc: SetDocument = serde_json::from_value(v)
        .map_err(|e| Error::input(format!("malformed set document: {e}")))?;
    IntervalUnion::normalize(&doc.intervals)
}

pub fn read_set(path: &Path) -> Result<IntervalUnion> {
    parse_set(&read_text(path)?)
}

/// Writes `{"intervals": [[a, b], …]}`.
pub fn set_to_json(set: &IntervalUnion) -> Value {
    serde_json::json!({ "intervals": set.intervals() })
}

/// JSON `{"points": …}`, a generator descriptor, or whitespace-separated
/// numbers with `#` comments.
pub fn parse_points(text: &str) -> Result<PointSetWindow> {
    let trimmed = text.trim_start();
    if !(trimmed.starts_with('{') || trimmed.starts_with('[')) {
        let mut pts = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
            {
                let x: f64 = tok
                    .parse()
                    .map_err(|_| Error::input(format!("not a number: {tok:?}")))?;
                pts.push(x);
            }
        }
        if pts.is_empty() {
            return Err(Error::input("no points"));
        }
        return PointSetWindow::from_unsorted(pts);
    }
    let v = parse_json(text, "point set")?;
    if let Value::Array(_) = v {
        let pts: Vec<f64> = serde_json::from_value(v)
            .map_err(|e| Error::input(format!("malformed point list: {e}")))?;
        return non_empty(PointSetWindow::from_unsorted(pts)?);
    }
    let v = unwrap_payload(v, "pointset");
    if v.get("kind").is_some() {
        let src: PointSource = serde_json::from_value(v)
            .map_err(|e| Error::input(format!("malformed generator descriptor: {e}")))?;
        return src.generate();
    }
    let doc: PointsDocument = serde_json::from_value(v)
        .map_err(|e| Error::input(format!("malformed point document: {e}")))?;
    let w = PointSetWindow::from_unsorted(doc.points)?
        .certified(doc.window_certified)
        .with_density_bound(doc.density_bound);
    non_empty(w)
}

fn non_empty(w: PointSetWindow) -> Result<PointSetWindow> {
    if w.is_empty() {
        Err(Error::input("no points"))
    } else {
        Ok(w)
    }
}

pub fn read_points(path: &Path) -> Result<PointSetWindow> {
    parse_points(&read_text(path)?)
}

/// A literal [`CoverSpec`] or a `{"kind": "hkw", …}` descriptor.
pub fn parse_cover(text: &str) -> Result<CoverSpec> {
    let v = unwrap_payload(parse_json(text, "cover")?, "cover");
    let cover = if v.get("kind").is_some() {
        let src: CoverSource = serde_json::from_value(v)
            .map_err(|e| Error::input(format!("malformed cover descriptor: {e}")))?;
        src.generate()?
    } else {
        let c: CoverSpec = serde_json::from_value(v)
            .map_err(|e| Error::input(format!("malformed cover document: {e}")))?;
        c.validate()?;
        c
    };
    Ok(cover)
}

pub fn read_cover(path: &Path) -> Result<CoverSpec> {
    parse_cover(&read_text(path)?)
}

/// Writes `value` as pretty JSON followed by a newline.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_points() {
        let w = parse_points("# header\n3\n1 2\n").unwrap();
        assert_eq!(w.points(), &[1.0, 2.0, 3.0]);
        assert!(matches!(parse_points("  \n"), Err(Error::Input(_))));
        assert!(matches!(parse_points("1 x"), Err(Error::Input(_))));
    }

    #[test]
    fn json_points_and_descriptors() {
        let w = parse_points(r#"{"points": [2, 0, 1], "window_certified": true}"#).unwrap();
        assert_eq!(w.points(), &[0.0, 1.0, 2.0]);
        assert!(w.window_certified());
        let w = parse_points(r#"{"kind": "integers", "from": -2, "to": 2}"#).unwrap();
        assert_eq!(w.len(), 5);
        let w = parse_points(r#"{"kind": "cubes", "n_max": 2}"#).unwrap();
        assert_eq!(w.points(), &[-8.0, -1.0, 0.0, 1.0, 8.0]);
        let w = parse_points(r#"{"outputs": {"points": [5, 6]}}"#).unwrap();
        assert_eq!(w.points(), &[5.0, 6.0]);
        assert!(matches!(
            parse_points(r#"{"points": []}"#),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn set_documents() {
        let s = parse_set(r#"{"intervals": [[0.9, 0.1], [0.2, 0.3]]}"#).unwrap();
        assert_eq!(s.intervals().len(), 3);
        assert!((s.measure() - 0.3).abs() < 1e-12);
        let back = parse_set(&set_to_json(&s).to_string()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn cover_documents() {
        let c = parse_cover(r#"{"kind": "hkw", "n_max": 3}"#).unwrap();
        assert_eq!(c.lengths, vec![0.25, 0.125, 0.0625]);
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_cover(&text).unwrap(), c);
        assert!(parse_cover(r#"{"lengths": [0.5], "Z": 0, "alpha": 1.5}"#).is_err());
    }
}
