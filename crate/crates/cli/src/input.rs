//! Cone files: `{"dim": n, "cones": [{"name", "generators", "method"?}]}`.
//! Coordinates are JSON numbers or strings holding a decimal or a rational
//! `p/q`; rationals are parsed exactly and then rounded to `f64`.

use std::collections::HashSet;
use std::str::FromStr;

use num::{BigRational, ToPrimitive};
use serde::Deserialize;
use solid_angle::MeasureMethod;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    dim: usize,
    cones: Vec<RawCone>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCone {
    name: String,
    generators: Vec<Vec<Coordinate>>,
    #[serde(default)]
    method: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Coordinate {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpec {
    pub name: String,
    pub generators: Vec<Vec<f64>>,
    pub method: Option<MeasureMethod>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeFile {
    pub dim: usize,
    pub cones: Vec<ConeSpec>,
}

fn coordinate(c: &Coordinate) -> Result<f64, String> {
    let v = match c {
        Coordinate::Number(x) => *x,
        Coordinate::Text(s) => {
            let s = s.trim();
            if s.contains('/') {
                BigRational::from_str(s)
                    .map_err(|e| format!("bad rational `{s}`: {e}"))?
                    .to_f64()
                    .ok_or_else(|| format!("rational `{s}` is out of range"))?
            } else {
                s.parse::<f64>()
                    .map_err(|e| format!("bad number `{s}`: {e}"))?
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite coordinate {v}"))
    }
}

pub fn parse(text: &str) -> Result<ConeFile, String> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| format!("invalid cone file: {e}"))?;
    if raw.dim == 0 {
        return Err("dim must be positive".into());
    }
    let mut seen = HashSet::new();
    let mut cones = Vec::with_capacity(raw.cones.len());
    for c in raw.cones {
        if !seen.insert(c.name.clone()) {
            return Err(format!("duplicate cone name `{}`", c.name));
        }
        let mut generators = Vec::with_capacity(c.generators.len());
        for (i, g) in c.generators.iter().enumerate() {
            if g.len() != raw.dim {
                return Err(format!(
                    "cone `{}`: generator {i} has {} entries, expected {}",
                    c.name,
                    g.len(),
                    raw.dim
                ));
            }
            let v = g
                .iter()
                .map(coordinate)
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| format!("cone `{}`, generator {i}: {e}", c.name))?;
            generators.push(v);
        }
        let method = c
            .method
            .as_deref()
            .map(MeasureMethod::from_str)
            .transpose()
            .map_err(|e| format!("cone `{}`: {e}", c.name))?;
        cones.push(ConeSpec {
            name: c.name,
            generators,
            method,
        });
    }
    Ok(ConeFile {
        dim: raw.dim,
        cones,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_decimals_and_rationals() {
        let f = parse(
            r#"{"dim": 2, "cones": [
                {"name": "a", "generators": [[1, "0"], ["3/5", "0.8"]], "method": "decomp1"}
            ]}"#,
        )
        .unwrap();
        assert_eq!(f.cones[0].generators, vec![vec![1.0, 0.0], vec![0.6, 0.8]]);
        assert_eq!(f.cones[0].method, Some(MeasureMethod::Decomp1));
    }

    #[test]
    fn rejects_malformed_files() {
        for bad in [
            r#"{"dim": 2, "cones": [{"name": "a", "generators": [[1, 0, 0]]}]}"#,
            r#"{"dim": 2, "cones": [{"name": "a", "generators": []}, {"name": "a", "generators": []}]}"#,
            r#"{"dim": 2, "cones": [{"name": "a", "generators": [["1/0", 0]]}]}"#,
            r#"{"dim": 2, "cones": [{"name": "a", "generators": [[1, 0]], "method": "nope"}]}"#,
            r#"{"dim": 0, "cones": []}"#,
            r#"{"dim": 2}"#,
            "not json",
        ] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }
}
