//! Loading orbifolds, polytopes and matrices from bundled data or JSON files.
//!
//! Structural problems are collected in full before anything is built, so a
//! malformed file reports every bad entry at once with its JSON location.

use std::fmt;
use std::path::{Path, PathBuf};

use coxdeform::lorentz::seeds;
use coxdeform::orbifold::{CoxeterOrbifold, RawOrbifold};
use coxdeform::polytope::{cube, dodecahedron, loebell, prism, simplex, Polytope, RawPolytope};
use serde_json::Value;

/// Environment variable naming a directory of `<name>.json` files that
/// replaces the bundled data.
pub const BUILTIN_DIR_VAR: &str = "COXDEFORM_BUILTIN_DIR";

const BUNDLED: &[(&str, &str)] = &[
    ("tetrahedron", include_str!("../data/tetrahedron.json")),
    ("esselmann", include_str!("../data/esselmann.json")),
    ("mirror_double", include_str!("../data/mirror_double.json")),
    ("cube_a", include_str!("../data/cube_a.json")),
    ("cube_b", include_str!("../data/cube_b.json")),
    ("cube_c", include_str!("../data/cube_c.json")),
    ("dodecahedron", include_str!("../data/dodecahedron.json")),
    ("loebell5", include_str!("../data/loebell5.json")),
    ("loebell6", include_str!("../data/loebell6.json")),
    ("loebell7", include_str!("../data/loebell7.json")),
    ("loebell8", include_str!("../data/loebell8.json")),
];

/// Names of the bundled orbifolds.
pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(name, _)| *name)
}

/// Which stage of loading rejected the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// The input could not be found or read.
    Input,
    Parse,
    Schema,
    Semantic,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Input => "input error",
            Stage::Parse => "parse error",
            Stage::Schema => "schema error",
            Stage::Semantic => "semantic error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub stage: Stage,
    /// JSON pointer into the document, empty for the whole document.
    pub location: String,
    pub message: String,
}

/// Every problem found in one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadError {
    pub source: String,
    pub issues: Vec<Issue>,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, issue) in self.issues.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            let at = if issue.location.is_empty() { "/" } else { &issue.location };
            write!(f, "{}: {} at {at}: {}", self.source, issue.stage, issue.message)?;
        }
        Ok(())
    }
}

impl LoadError {
    fn single(source: &str, stage: Stage, location: &str, message: impl Into<String>) -> LoadError {
        LoadError {
            source: source.into(),
            issues: vec![Issue { stage, location: location.into(), message: message.into() }],
        }
    }
}

/// An orbifold together with where it came from.
#[derive(Clone, Debug)]
pub struct LoadedOrbifold {
    pub name: String,
    pub source: String,
    pub seed: Option<String>,
    pub orbifold: CoxeterOrbifold,
}

enum Located {
    File(PathBuf),
    Text { source: String, text: String },
}

fn locate(spec: &str) -> Result<Located, LoadError> {
    let path = Path::new(spec);
    if path.is_file() || spec.ends_with(".json") {
        return Ok(Located::File(path.to_path_buf()));
    }
    if let Some(dir) = std::env::var_os(BUILTIN_DIR_VAR) {
        let file = Path::new(&dir).join(format!("{spec}.json"));
        if file.is_file() {
            return Ok(Located::File(file));
        }
        return Err(LoadError::single(
            spec,
            Stage::Input,
            "",
            format!("no file {} in {}", file.display(), BUILTIN_DIR_VAR),
        ));
    }
    match BUNDLED.iter().find(|(name, _)| *name == spec) {
        Some((name, text)) => Ok(Located::Text { source: format!("bundled:{name}"), text: text.to_string() }),
        None => Err(LoadError::single(
            spec,
            Stage::Input,
            "",
            format!("not a file or bundled name (bundled: {})", bundled_names().collect::<Vec<_>>().join(", ")),
        )),
    }
}

fn read(located: Located) -> Result<(String, Value), LoadError> {
    let (source, text) = match located {
        Located::File(path) => {
            let source = path.display().to_string();
            match std::fs::read_to_string(&path) {
                Ok(text) => (source, text),
                Err(e) => return Err(LoadError::single(&source, Stage::Input, "", e.to_string())),
            }
        }
        Located::Text { source, text } => (source, text),
    };
    match serde_json::from_str(&text) {
        Ok(value) => Ok((source, value)),
        Err(e) => Err(LoadError::single(&source, Stage::Parse, "", format!("line {} column {}: {e}", e.line(), e.column()))),
    }
}

/// Collects schema and semantic issues for one document.
struct Checker {
    issues: Vec<Issue>,
}

impl Checker {
    fn push(&mut self, stage: Stage, location: String, message: String) {
        self.issues.push(Issue { stage, location, message });
    }

    fn uint(&mut self, v: &Value, at: &str) -> Option<usize> {
        match v.as_u64() {
            Some(x) => Some(x as usize),
            None => {
                self.push(Stage::Schema, at.into(), format!("expected a non-negative integer, found {v}"));
                None
            }
        }
    }

    fn array<'a>(&mut self, doc: &'a Value, key: &str, required: bool) -> Option<&'a Vec<Value>> {
        match doc.get(key) {
            Some(Value::Array(items)) => Some(items),
            Some(other) => {
                self.push(Stage::Schema, format!("/{key}"), format!("expected an array, found {}", kind(other)));
                None
            }
            None => {
                if required {
                    self.push(Stage::Schema, format!("/{key}"), "missing required field".into());
                }
                None
            }
        }
    }

    /// An array of `len` integers at `at`.
    fn tuple(&mut self, v: &Value, len: usize, at: &str) -> Option<Vec<usize>> {
        match v.as_array() {
            Some(items) if items.len() == len => {
                let parsed: Vec<Option<usize>> =
                    items.iter().enumerate().map(|(k, x)| self.uint(x, &format!("{at}/{k}"))).collect();
                parsed.into_iter().collect()
            }
            _ => {
                self.push(Stage::Schema, at.into(), format!("expected an array of {len} integers, found {v}"));
                None
            }
        }
    }

    fn facet_id(&mut self, id: usize, facets: Option<usize>, at: String) {
        if let Some(f) = facets {
            if id == 0 || id > f {
                self.push(Stage::Semantic, at, format!("facet {id} does not exist (facets are numbered 1 to {f})"));
            }
        }
    }

    /// Schema and facet-reference checks for the polytope fields. Returns
    /// the facet count when it is known.
    fn polytope(&mut self, doc: &Value) -> Option<usize> {
        if !doc.is_object() {
            self.push(Stage::Schema, String::new(), format!("expected an object, found {}", kind(doc)));
            return None;
        }
        match doc.get("n") {
            Some(n) => {
                self.uint(n, "/n");
            }
            None => self.push(Stage::Schema, "/n".into(), "missing required field".into()),
        }
        let facets = self.array(doc, "facets", true).map(|names| {
            for (k, name) in names.iter().enumerate() {
                if !name.is_string() {
                    self.push(Stage::Schema, format!("/facets/{k}"), format!("expected a string, found {}", kind(name)));
                }
            }
            names.len()
        });
        if let Some(ridges) = self.array(doc, "ridges", true) {
            for (k, r) in ridges.iter().enumerate() {
                let at = format!("/ridges/{k}");
                if let Some(ids) = self.tuple(r, 2, &at) {
                    for (t, id) in ids.into_iter().enumerate() {
                        self.facet_id(id, facets, format!("{at}/{t}"));
                    }
                }
            }
        }
        if let Some(vertices) = self.array(doc, "vertices", false) {
            for (k, v) in vertices.iter().enumerate() {
                let at = format!("/vertices/{k}");
                match v.as_array() {
                    Some(ids) => {
                        for (t, id) in ids.iter().enumerate() {
                            if let Some(id) = self.uint(id, &format!("{at}/{t}")) {
                                self.facet_id(id, facets, format!("{at}/{t}"));
                            }
                        }
                    }
                    None => self.push(Stage::Schema, at, format!("expected an array of facet ids, found {v}")),
                }
            }
        }
        facets
    }

    fn orders(&mut self, doc: &Value, facets: Option<usize>) {
        let Some(orders) = self.array(doc, "orders", true) else { return };
        for (k, o) in orders.iter().enumerate() {
            let at = format!("/orders/{k}");
            if let Some(t) = self.tuple(o, 3, &at) {
                let [i, j, m] = [t[0], t[1], t[2]];
                if m < 2 {
                    self.push(Stage::Schema, format!("{at}/2"), format!("ridge ({i}, {j}) has order {m}; orders must be at least 2"));
                }
                self.facet_id(i, facets, format!("{at}/0"));
                self.facet_id(j, facets, format!("{at}/1"));
            }
        }
    }

    fn optional_string(&mut self, doc: &Value, key: &str) -> Option<String> {
        match doc.get(key) {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(other) => {
                self.push(Stage::Schema, format!("/{key}"), format!("expected a string, found {}", kind(other)));
                None
            }
        }
    }

    fn finish(self, source: &str) -> Result<(), LoadError> {
        if self.issues.is_empty() {
            Ok(())
        } else {
            Err(LoadError { source: source.into(), issues: self.issues })
        }
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn semantic(source: &str, e: coxdeform::Error) -> LoadError {
    LoadError::single(source, Stage::Semantic, "", e.to_string())
}

/// Parses and validates an orbifold document already in memory.
pub fn orbifold_from_value(source: &str, fallback_name: &str, doc: &Value) -> Result<LoadedOrbifold, LoadError> {
    let mut check = Checker { issues: Vec::new() };
    let facets = check.polytope(doc);
    check.orders(doc, facets);
    let name = check.optional_string(doc, "name").unwrap_or_else(|| fallback_name.to_string());
    let seed = check.optional_string(doc, "seed");
    if let Some(s) = &seed {
        if !seeds::SEED_NAMES.contains(&s.as_str()) {
            check.push(Stage::Semantic, "/seed".into(), format!("unknown seed {s:?}"));
        }
    }
    check.finish(source)?;
    let raw: RawOrbifold =
        serde_json::from_value(doc.clone()).map_err(|e| LoadError::single(source, Stage::Schema, "", e.to_string()))?;
    let orbifold = CoxeterOrbifold::from_raw(&raw).map_err(|e| semantic(source, e))?;
    Ok(LoadedOrbifold { name, source: source.into(), seed, orbifold })
}

/// Loads an orbifold from a JSON file or a bundled name.
pub fn load_orbifold(spec: &str) -> Result<LoadedOrbifold, LoadError> {
    let (source, doc) = read(locate(spec)?)?;
    let fallback = Path::new(spec).file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
    orbifold_from_value(&source, fallback, &doc)
}

/// Generated polytopes: `cube`, `dodecahedron`, `simplex`, `prism<m>`,
/// `loebell<m>`.
fn generated_polytope(spec: &str) -> Option<Polytope> {
    let numbered = |prefix: &str| spec.strip_prefix(prefix).and_then(|m| m.parse::<usize>().ok());
    match spec {
        "cube" => Some(cube()),
        "dodecahedron" => Some(dodecahedron()),
        "simplex" => Some(simplex(3)),
        _ => {
            if let Some(m) = numbered("prism").filter(|&m| m >= 3) {
                Some(prism(m))
            } else {
                numbered("loebell").filter(|&m| m >= 5).map(loebell)
            }
        }
    }
}

/// Loads a polytope: a generated name, a bundled orbifold name (its base
/// polytope), or a JSON file with or without orders.
pub fn load_polytope(spec: &str) -> Result<(String, Polytope), LoadError> {
    if !Path::new(spec).is_file() {
        if let Some(p) = generated_polytope(spec) {
            return Ok((spec.to_string(), p));
        }
    }
    let (source, doc) = read(locate(spec)?)?;
    let mut check = Checker { issues: Vec::new() };
    check.polytope(&doc);
    check.finish(&source)?;
    let raw: RawPolytope =
        serde_json::from_value(doc).map_err(|e| LoadError::single(&source, Stage::Schema, "", e.to_string()))?;
    let p = Polytope::from_raw(&raw).map_err(|e| semantic(&source, e))?;
    Ok((source, p))
}

/// A Cartan matrix read from JSON: either an array of rows, or an object
/// with `rows` and optionally `n` and one-based `orders`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixInput {
    pub source: String,
    pub rows: Vec<Vec<f64>>,
    pub n: Option<usize>,
    pub orders: Vec<(usize, usize, u32)>,
}

pub fn matrix_from_value(source: &str, doc: &Value) -> Result<MatrixInput, LoadError> {
    let mut check = Checker { issues: Vec::new() };
    let (rows_value, at) = match doc {
        Value::Array(_) => (Some(doc), String::new()),
        Value::Object(map) => (map.get("rows"), "/rows".to_string()),
        other => {
            check.push(Stage::Schema, String::new(), format!("expected an array of rows or an object, found {}", kind(other)));
            (None, String::new())
        }
    };
    let mut rows = Vec::new();
    match rows_value.and_then(Value::as_array) {
        Some(items) => {
            for (i, row) in items.iter().enumerate() {
                match row.as_array() {
                    Some(entries) => {
                        if entries.len() != items.len() {
                            check.push(
                                Stage::Schema,
                                format!("{at}/{i}"),
                                format!("row has {} entries, the matrix has {} rows", entries.len(), items.len()),
                            );
                        }
                        let parsed: Vec<f64> = entries
                            .iter()
                            .enumerate()
                            .filter_map(|(j, x)| {
                                let v = x.as_f64();
                                if v.is_none() {
                                    check.push(Stage::Schema, format!("{at}/{i}/{j}"), format!("expected a number, found {x}"));
                                }
                                v
                            })
                            .collect();
                        rows.push(parsed);
                    }
                    None => check.push(Stage::Schema, format!("{at}/{i}"), format!("expected an array, found {row}")),
                }
            }
        }
        None if doc.is_object() => check.push(Stage::Schema, "/rows".into(), "missing array of rows".into()),
        None => {}
    }
    let n = doc.get("n").and_then(|n| check.uint(n, "/n"));
    let mut orders = Vec::new();
    if doc.get("orders").is_some() {
        check.orders(doc, Some(rows.len()));
        if check.issues.is_empty() {
            for o in doc["orders"].as_array().into_iter().flatten() {
                let t = o.as_array().unwrap();
                let id = |k: usize| t[k].as_u64().unwrap() as usize;
                orders.push((id(0) - 1, id(1) - 1, id(2) as u32));
            }
        }
    }
    check.finish(source)?;
    Ok(MatrixInput { source: source.into(), rows, n, orders })
}

/// Reads a Cartan matrix file.
pub fn load_matrix(path: &str) -> Result<MatrixInput, LoadError> {
    let (source, doc) = read(Located::File(PathBuf::from(path)))?;
    matrix_from_value(&source, &doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn tetrahedron_doc() -> Value {
        serde_json::from_str(BUNDLED[0].1).unwrap()
    }

    #[test]
    fn bundled_documents_load() {
        for (name, text) in BUNDLED {
            let doc: Value = serde_json::from_str(text).unwrap();
            let loaded = orbifold_from_value(name, name, &doc).unwrap_or_else(|e| panic!("{e}"));
            assert_eq!(loaded.name, *name);
        }
    }

    #[test]
    fn order_one_is_a_schema_error_naming_the_ridge() {
        let mut doc = tetrahedron_doc();
        doc["orders"][3] = json!([2, 3, 1]);
        let err = orbifold_from_value("t", "t", &doc).unwrap_err();
        assert_eq!(err.issues.len(), 1);
        assert_eq!(err.issues[0].stage, Stage::Schema);
        assert_eq!(err.issues[0].location, "/orders/3/2");
        assert!(err.issues[0].message.contains("ridge (2, 3)"), "{}", err.issues[0].message);
    }

    #[test]
    fn unknown_facets_are_semantic_errors() {
        let mut doc = tetrahedron_doc();
        doc["ridges"][1] = json!([1, 9]);
        let err = orbifold_from_value("t", "t", &doc).unwrap_err();
        assert_eq!(err.issues[0].stage, Stage::Semantic);
        assert_eq!(err.issues[0].location, "/ridges/1/1");
    }

    #[test]
    fn issues_are_aggregated() {
        let mut doc = tetrahedron_doc();
        doc["orders"][0] = json!([1, 2, 0]);
        doc["orders"][5] = json!([3, "x", 3]);
        doc["facets"][2] = json!(7);
        doc["ridges"][0] = json!([1, 5]);
        let err = orbifold_from_value("t", "t", &doc).unwrap_err();
        let locations: Vec<&str> = err.issues.iter().map(|i| i.location.as_str()).collect();
        assert_eq!(locations, ["/facets/2", "/ridges/0/1", "/orders/0/2", "/orders/5/1"]);
        assert_eq!(err.to_string().lines().count(), 4);
    }

    #[test]
    fn constructor_errors_are_semantic() {
        let mut doc = tetrahedron_doc();
        doc["orders"].as_array_mut().unwrap().pop();
        let err = orbifold_from_value("t", "t", &doc).unwrap_err();
        assert_eq!(err.issues[0].stage, Stage::Semantic);
        assert!(err.issues[0].message.contains("no order"));
    }

    #[test]
    fn matrices_in_both_layouts() {
        let m = matrix_from_value("m", &json!([[2, -1], [-1, 2]])).unwrap();
        assert_eq!(m.rows, vec![vec![2.0, -1.0], vec![-1.0, 2.0]]);
        let m = matrix_from_value("m", &json!({"rows": [[2, -1], [-1, 2]], "n": 1, "orders": [[1, 2, 3]]})).unwrap();
        assert_eq!((m.n, m.orders.clone()), (Some(1), vec![(0, 1, 3)]));
        let err = matrix_from_value("m", &json!([[2, -1], [-1]])).unwrap_err();
        assert_eq!(err.issues[0].location, "/1");
        assert!(matrix_from_value("m", &json!({"rows": [[2, "a"], [-1, 2]]})).is_err());
    }

    #[test]
    fn generated_polytopes() {
        assert_eq!(load_polytope("prism5").unwrap().1.facet_count(), 7);
        assert_eq!(load_polytope("loebell6").unwrap().1.facet_count(), 14);
        assert_eq!(load_polytope("esselmann").unwrap().1.dim(), 4);
        assert!(load_polytope("prism2").is_err());
    }
}
