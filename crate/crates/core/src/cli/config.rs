//! JSON description of an IFS: explicit maps or a named family.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::constructions::{curve_ifs, grid_ifs, CurveFamilyParams, GridFamilyParams};
use crate::dimension::MeasureWeights;
use crate::error::{Error, Result};
use crate::ifs::{AffineMap2, DiscRescaling, Hull, IFS2};
use crate::linalg2::{top_singular_value, Matrix2, Vec2};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Maps(Vec<AffineMap2>),
    Grid(GridFamilyParams),
    Curve(CurveFamilyParams),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IfsConfig {
    pub source: Source,
    pub weights: Option<Vec<f64>>,
    pub hull: Option<Hull>,
}

/// A configured system ready for analysis, in the frame where `hull` is invariant.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub ifs: IFS2,
    pub weights: MeasureWeights,
    pub hull: Hull,
    /// Set when the maps were conjugated into the unit-disc frame.
    pub rescaling: Option<DiscRescaling>,
}

const MAP_KEYS: [&str; 6] = ["a11", "a12", "a21", "a22", "dx", "dy"];

fn number(v: &Value, path: &str, errs: &mut Vec<String>) -> Option<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Some(x),
        _ => {
            errs.push(format!("{path}: expected a finite number, found {v}"));
            None
        }
    }
}

fn parse_map(i: usize, v: &Value, errs: &mut Vec<String>) -> Option<AffineMap2> {
    let Some(obj) = v.as_object() else {
        errs.push(format!("maps[{i}]: expected an object"));
        return None;
    };
    let before = errs.len();
    for k in obj.keys() {
        if !MAP_KEYS.contains(&k.as_str()) {
            errs.push(format!("maps[{i}].{k}: unknown field"));
        }
    }
    let mut vals = [0.0; 6];
    for (slot, key) in vals.iter_mut().zip(MAP_KEYS) {
        match obj.get(key) {
            Some(x) => {
                if let Some(x) = number(x, &format!("maps[{i}].{key}"), errs) {
                    *slot = x;
                }
            }
            None => errs.push(format!("maps[{i}].{key}: missing")),
        }
    }
    if errs.len() > before {
        return None;
    }
    let linear = Matrix2::new(vals[0], vals[1], vals[2], vals[3]);
    let alpha1 = top_singular_value(&linear);
    if linear.det() == 0.0 {
        errs.push(format!("maps[{i}]: singular linear part"));
    } else if alpha1 >= 1.0 {
        errs.push(format!("maps[{i}]: not a contraction (α₁ = {alpha1})"));
    }
    Some(AffineMap2::new(linear, Vec2::new(vals[4], vals[5])))
}

fn parse_family(v: &Value, errs: &mut Vec<String>) -> Option<Source> {
    let Some(obj) = v.as_object().filter(|o| o.len() == 1) else {
        errs.push("family: expected an object with exactly one of \"grid\" or \"curve\"".into());
        return None;
    };
    let (name, body) = obj.iter().next().expect("one entry");
    match name.as_str() {
        "grid" => match serde_json::from_value::<GridFamilyParams>(body.clone()) {
            Ok(p) => match p.validate() {
                Ok(()) => Some(Source::Grid(p)),
                Err(e) => {
                    errs.push(format!("family.grid: {e}"));
                    None
                }
            },
            Err(e) => {
                errs.push(format!("family.grid: {e}"));
                None
            }
        },
        "curve" => match serde_json::from_value::<CurveFamilyParams>(body.clone()) {
            Ok(p) => match p.validate() {
                Ok(()) => Some(Source::Curve(p)),
                Err(e) => {
                    errs.push(format!("family.curve: {e}"));
                    None
                }
            },
            Err(e) => {
                errs.push(format!("family.curve: {e}"));
                None
            }
        },
        other => {
            errs.push(format!("family.{other}: unknown family (expected grid or curve)"));
            None
        }
    }
}

fn check_root(root: &Map<String, Value>, errs: &mut Vec<String>) {
    for k in root.keys() {
        if !["schema", "maps", "weights", "hull", "family"].contains(&k.as_str()) {
            errs.push(format!("{k}: unknown field"));
        }
    }
    match root.get("schema") {
        None => errs.push("schema: missing (expected 1)".into()),
        Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) => errs.push(format!("schema: unsupported version {v} (expected 1)")),
    }
}

/// Parses and validates a config, reporting every violation found.
pub fn parse_config(text: &str) -> Result<IfsConfig> {
    let root: Value = serde_json::from_str(text)?;
    let Some(root) = root.as_object() else {
        return Err(Error::Config(vec!["top level: expected an object".into()]));
    };
    let mut errs = Vec::new();
    check_root(root, &mut errs);

    let source = match (root.get("maps"), root.get("family")) {
        (Some(_), Some(_)) => {
            errs.push("maps, family: exactly one may be given".into());
            None
        }
        (None, None) => {
            errs.push("maps: missing (or give a family block)".into());
            None
        }
        (Some(maps), None) => match maps.as_array() {
            Some(list) if !list.is_empty() => {
                let parsed: Vec<Option<AffineMap2>> = list
                    .iter()
                    .enumerate()
                    .map(|(i, v)| parse_map(i, v, &mut errs))
                    .collect();
                parsed.into_iter().collect::<Option<Vec<_>>>().map(Source::Maps)
            }
            _ => {
                errs.push("maps: expected a non-empty array".into());
                None
            }
        },
        (None, Some(f)) => parse_family(f, &mut errs),
    };

    let weights = match root.get("weights") {
        None => None,
        Some(Value::Array(list)) => {
            let w: Vec<Option<f64>> = list
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let x = number(v, &format!("weights[{i}]"), &mut errs)?;
                    if x <= 0.0 {
                        errs.push(format!("weights[{i}]: must be positive"));
                    }
                    Some(x)
                })
                .collect();
            w.into_iter().collect::<Option<Vec<_>>>()
        }
        Some(_) => {
            errs.push("weights: expected an array of numbers".into());
            None
        }
    };
    if let (Some(w), Some(Source::Maps(m))) = (&weights, &source) {
        if w.len() != m.len() {
            errs.push(format!("weights: {} entries for {} maps", w.len(), m.len()));
        }
    }
    if let Some(w) = &weights {
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            errs.push(format!("weights: sum to {total}, not 1"));
        }
    }

    let hull = match root.get("hull") {
        None => None,
        Some(v) => match serde_json::from_value::<Hull>(v.clone()) {
            Ok(h) => Some(h),
            Err(_) => {
                errs.push(format!("hull: expected \"unit-square\" or \"unit-disc\", found {v}"));
                None
            }
        },
    };

    if !errs.is_empty() {
        return Err(Error::Config(errs));
    }
    Ok(IfsConfig {
        source: source.expect("no errors implies a source"),
        weights,
        hull,
    })
}

pub fn load_config(path: &std::path::Path) -> Result<IfsConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

impl IfsConfig {
    pub fn build(&self) -> Result<IFS2> {
        match &self.source {
            Source::Maps(m) => IFS2::new(m.clone()),
            Source::Grid(p) => grid_ifs(p),
            Source::Curve(p) => curve_ifs(p),
        }
    }

    /// Builds the system and picks its hull: the requested one, else the unit
    /// square when it is invariant, else the unit disc after rescaling.
    pub fn resolve(&self) -> Result<Resolved> {
        let ifs = self.build()?;
        let weights = match &self.weights {
            Some(w) => {
                if w.len() != ifs.len() {
                    return Err(Error::Config(vec![format!(
                        "weights: {} entries for {} maps",
                        w.len(),
                        ifs.len()
                    )]));
                }
                let total: f64 = w.iter().sum();
                MeasureWeights::Bernoulli(w.iter().map(|x| x / total).collect())
            }
            None => MeasureWeights::uniform(ifs.len()),
        };
        let square_ok = crate::ifs::check_hull_invariant(&ifs, &Hull::UnitSquare.polygon()).is_ok();
        let (ifs, hull, rescaling) = match self.hull {
            Some(Hull::UnitSquare) => (ifs, Hull::UnitSquare, None),
            None if square_ok => (ifs, Hull::UnitSquare, None),
            _ => {
                let (conj, r) = ifs.fit_disc()?;
                (conj, Hull::UnitDisc, Some(r))
            }
        };
        Ok(Resolved {
            ifs,
            weights,
            hull,
            rescaling,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SIMS: &str = r#"{"schema": 1, "maps": [
        {"a11": 0.5, "a12": 0, "a21": 0, "a22": 0.5, "dx": 0, "dy": 0},
        {"a11": 0.5, "a12": 0, "a21": 0, "a22": 0.5, "dx": 0.5, "dy": 0.5}]}"#;

    #[test]
    fn minimal_config() {
        let c = parse_config(TWO_SIMS).unwrap();
        let r = c.resolve().unwrap();
        assert_eq!(r.ifs.len(), 2);
        assert_eq!(r.hull, Hull::UnitSquare);
        assert!(r.rescaling.is_none());
    }

    #[test]
    fn all_errors_reported_with_paths() {
        let text = r#"{"schema": 1, "extra": 3, "maps": [
            {"a11": 0.5, "a12": "x", "a21": 0, "a22": 0.5, "dx": 0, "dy": 0},
            {"a11": 1.5, "a12": 0, "a21": 0, "a22": 0.5, "dx": 0},
            {"a11": 2.0, "a12": 0, "a21": 0, "a22": 0.5, "dx": 0, "dy": 0}],
            "weights": [0.5, 0.5], "hull": "triangle"}"#;
        let Err(Error::Config(errs)) = parse_config(text) else {
            panic!("expected config errors");
        };
        let has = |s: &str| errs.iter().any(|e| e.contains(s));
        assert!(has("maps[0].a12"), "{errs:?}");
        assert!(has("maps[1].dy: missing"));
        assert!(has("maps[2]: not a contraction"));
        assert!(has("extra: unknown field"));
        assert!(has("hull:"));
        assert!(errs.len() >= 5);
    }

    #[test]
    fn grid_family_expands() {
        let text = r#"{"schema": 1, "family": {"grid": {"tau1_minus": 0.1, "tau1_plus": 0.4,
            "tau2_minus": 0.9, "tau2_plus": 1.2, "N": 5}}}"#;
        let c = parse_config(text).unwrap();
        assert_eq!(c.build().unwrap().len(), 50);
    }

    #[test]
    fn maps_and_family_exclusive() {
        let text = r#"{"schema": 1, "maps": [], "family": {"curve": {}}}"#;
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
        assert!(matches!(parse_config("{\"schema\": 2}"), Err(Error::Config(_))));
        assert!(matches!(parse_config("not json"), Err(Error::Json(_))));
    }

    #[test]
    fn non_invariant_square_falls_back_to_disc() {
        let text = r#"{"schema": 1, "maps": [
            {"a11": 0.5, "a12": 0, "a21": 0, "a22": 0.5, "dx": 0, "dy": 0},
            {"a11": 0.5, "a12": 0, "a21": 0, "a22": 0.5, "dx": 0.6, "dy": 0}]}"#;
        let r = parse_config(text).unwrap().resolve().unwrap();
        assert_eq!(r.hull, Hull::UnitDisc);
        assert!(r.rescaling.is_some());
        crate::ifs::check_hull_invariant(&r.ifs, &Hull::UnitDisc.polygon()).unwrap();
    }
}
