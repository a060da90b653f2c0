//! JSON formats for chirotopes and trees, and the binary order-type
//! database.
//!
//! A chirotope file gives its labels and either signs or points:
//!
//! ```json
//! {"labels": ["a", "b", "c"], "signs": {"a,b,c": 1}}
//! {"labels": ["a", "b", "c"], "points": [[0, 0], [1, 0], [0, 1]]}
//! ```
//!
//! A point is `[x, y]` with integer coordinates or `[xn, xd, yn, yd]` with
//! rational ones. Any entry may also be a string such as `"-3/4"`, which is
//! how coordinates too large for a JSON number are written.
//!
//! A tree file lists nodes and edges. Each node is a chirotope object with
//! an `"id"`, or refers to a database record with `"db": {"n": 9, "index": 17}`:
//!
//! ```json
//! {"nodes": [{"id": 0, "labels": [...], "signs": {...}}, ...],
//!  "edges": [{"u": 0, "u_proxy": "a", "v": 1, "v_proxy": "x"}]}
//! ```

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::chirotope::{Chirotope, SignFunction};
use crate::error::{Error, Result};
use crate::geometry::{parse_rational, Point, PointConfig};
use crate::label::Label;
use crate::tree::{ChirotopeTree, Edge, NodeId};

fn format_err(path: &str, msg: impl Into<String>) -> Error {
    Error::Format { path: path.to_string(), msg: msg.into() }
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), msg: e.to_string() })
}

/// A chirotope as read from a file: bare signs or a point realization.
#[derive(Clone, Debug)]
pub enum ChirotopeSource {
    Signs(SignFunction),
    Points(PointConfig),
}

impl ChirotopeSource {
    pub fn sign_function(&self) -> Result<SignFunction> {
        match self {
            ChirotopeSource::Signs(sf) => Ok(sf.clone()),
            ChirotopeSource::Points(pc) => pc.sign_function(),
        }
    }

    /// The chirotope, after checking the axioms.
    pub fn chirotope(&self) -> Result<Chirotope> {
        Chirotope::new(self.sign_function()?)
    }

    pub fn points(&self) -> Option<&PointConfig> {
        match self {
            ChirotopeSource::Points(pc) => Some(pc),
            ChirotopeSource::Signs(_) => None,
        }
    }
}

fn parse_label(v: &Value, path: &str) -> Result<Label> {
    let s = v.as_str().ok_or_else(|| format_err(path, "expected a string label"))?;
    if s.is_empty() {
        return Err(Error::InvalidLabel(s.to_string(), "labels must be nonempty"));
    }
    if s.contains(',') {
        return Err(Error::InvalidLabel(s.to_string(), "labels must not contain commas"));
    }
    Ok(Label::new(s))
}

fn parse_labels(v: &Value, path: &str) -> Result<Vec<Label>> {
    let arr = v.as_array().ok_or_else(|| format_err(path, "expected an array of labels"))?;
    arr.iter().enumerate().map(|(i, l)| parse_label(l, &format!("{path}[{i}]"))).collect()
}

fn parse_integer(v: &Value, path: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(i.into()),
            None => Err(format_err(path, "expected an integer")),
        },
        Value::String(s) => s.trim().parse().map_err(|_| format_err(path, format!("`{s}` is not an integer"))),
        _ => Err(format_err(path, "expected an integer")),
    }
}

fn parse_coordinate(v: &Value, path: &str) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| format_err(path, format!("`{s}` is not a rational number"))),
        _ => Ok(BigRational::from_integer(parse_integer(v, path)?)),
    }
}

fn parse_point(v: &Value, path: &str) -> Result<Point> {
    let arr = v.as_array().ok_or_else(|| format_err(path, "expected a coordinate array"))?;
    let c = |i: usize| parse_coordinate(&arr[i], &format!("{path}[{i}]"));
    match arr.len() {
        2 => Ok(Point::new(c(0)?, c(1)?)),
        4 => {
            let frac = |n: usize| -> Result<BigRational> {
                let num = parse_integer(&arr[n], &format!("{path}[{n}]"))?;
                let den = parse_integer(&arr[n + 1], &format!("{path}[{}]", n + 1))?;
                if den == BigInt::default() {
                    return Err(format_err(&format!("{path}[{}]", n + 1), "zero denominator"));
                }
                Ok(BigRational::new(num, den))
            };
            Ok(Point::new(frac(0)?, frac(2)?))
        }
        k => Err(format_err(path, format!("expected 2 or 4 coordinates, found {k}"))),
    }
}

/// Parity of the permutation sorting three distinct labels.
fn sort_triple(mut t: [Label; 3]) -> ([Label; 3], i8) {
    let mut parity = 1;
    for (i, j) in [(0, 1), (1, 2), (0, 1)] {
        if t[i] > t[j] {
            t.swap(i, j);
            parity = -parity;
        }
    }
    (t, parity)
}

fn parse_signs(labels: Vec<Label>, v: &Value, path: &str) -> Result<SignFunction> {
    let obj = v.as_object().ok_or_else(|| format_err(path, "expected an object of signs"))?;
    let mut triples: BTreeMap<[Label; 3], i8> = BTreeMap::new();
    for (key, s) in obj {
        let here = format!("{path}.{key}");
        let parts: Vec<&str> = key.split(',').map(str::trim).collect();
        let [a, b, c] = parts[..] else {
            return Err(format_err(&here, "key must name three labels separated by commas"));
        };
        if a == b || b == c || a == c {
            return Err(format_err(&here, "triple repeats a label"));
        }
        let sign = s.as_i64().ok_or_else(|| format_err(&here, "sign must be an integer"))?;
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidSign { a: a.into(), b: b.into(), c: c.into(), sign });
        }
        let (sorted, parity) = sort_triple([a.into(), b.into(), c.into()]);
        let value = sign as i8 * parity;
        if let Some(old) = triples.insert(sorted, value) {
            if old != value {
                return Err(format_err(&here, "contradicts another entry for the same triple"));
            }
        }
    }
    SignFunction::from_sorted_triples(labels, &triples)
}

fn chirotope_from_value(v: &Value, path: &str) -> Result<ChirotopeSource> {
    let obj = v.as_object().ok_or_else(|| format_err(path, "expected an object"))?;
    let labels = parse_labels(obj.get("labels").ok_or_else(|| format_err(path, "missing `labels`"))?, &format!("{path}.labels"))?;
    match (obj.get("signs"), obj.get("points")) {
        (Some(s), None) => Ok(ChirotopeSource::Signs(parse_signs(labels, s, &format!("{path}.signs"))?)),
        (None, Some(p)) => {
            let here = format!("{path}.points");
            let arr = p.as_array().ok_or_else(|| format_err(&here, "expected an array of points"))?;
            if arr.len() != labels.len() {
                return Err(format_err(&here, format!("{} points for {} labels", arr.len(), labels.len())));
            }
            let pts = arr.iter().enumerate().map(|(i, q)| parse_point(q, &format!("{here}[{i}]"))).collect::<Result<Vec<_>>>()?;
            Ok(ChirotopeSource::Points(PointConfig::new(labels.into_iter().zip(pts))?))
        }
        (Some(_), Some(_)) => Err(format_err(path, "give either `signs` or `points`, not both")),
        (None, None) => Err(format_err(path, "missing `signs` or `points`")),
    }
}

/// Parses a chirotope file.
pub fn parse_chirotope(text: &str) -> Result<ChirotopeSource> {
    chirotope_from_value(&parse_json(text)?, "$")
}

/// Signs of every sorted triple.
pub fn signs_to_json(sf: &SignFunction) -> Value {
    let signs: Map<String, Value> =
        sf.sorted_triples().map(|(a, b, c, s)| (format!("{a},{b},{c}"), json!(s))).collect();
    json!({ "labels": sf.labels().iter().map(Label::as_str).collect::<Vec<_>>(), "signs": signs })
}

fn integer_to_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) if i.unsigned_abs() < 1 << 53 => json!(i),
        _ => json!(v.to_string()),
    }
}

fn point_to_json(p: &Point) -> Value {
    if p.x.denom().is_one() && p.y.denom().is_one() {
        json!([integer_to_json(p.x.numer()), integer_to_json(p.y.numer())])
    } else {
        json!([
            integer_to_json(p.x.numer()),
            integer_to_json(p.x.denom()),
            integer_to_json(p.y.numer()),
            integer_to_json(p.y.denom())
        ])
    }
}

pub fn points_to_json(pc: &PointConfig) -> Value {
    json!({
        "labels": pc.labels().iter().map(Label::as_str).collect::<Vec<_>>(),
        "points": pc.points().iter().map(point_to_json).collect::<Vec<_>>(),
    })
}

/// A tree as read from a file, with whichever nodes were given as points.
#[derive(Clone, Debug)]
pub struct TreeSource {
    pub tree: ChirotopeTree,
    pub points: BTreeMap<NodeId, PointConfig>,
}

/// Where tree files find their database records.
#[derive(Clone, Copy, Debug)]
pub struct DbSettings<'a> {
    pub dir: &'a Path,
    pub big_endian: bool,
}

/// Parses a tree file. Nodes that refer to database records are looked up
/// through `db`.
pub fn parse_tree(text: &str, db: Option<DbSettings<'_>>) -> Result<TreeSource> {
    tree_from_value(&parse_json(text)?, db)
}

/// Either kind of input file.
#[derive(Clone, Debug)]
pub enum InputFile {
    Chirotope(ChirotopeSource),
    Tree(TreeSource),
}

/// Parses a tree file if the top level has `"nodes"`, else a chirotope file.
pub fn parse_input(text: &str, db: Option<DbSettings<'_>>) -> Result<InputFile> {
    let v = parse_json(text)?;
    if v.get("nodes").is_some() {
        Ok(InputFile::Tree(tree_from_value(&v, db)?))
    } else {
        Ok(InputFile::Chirotope(chirotope_from_value(&v, "$")?))
    }
}

fn tree_from_value(v: &Value, db: Option<DbSettings<'_>>) -> Result<TreeSource> {
    let obj = v.as_object().ok_or_else(|| format_err("$", "expected an object"))?;
    let nodes = obj.get("nodes").and_then(Value::as_array).ok_or_else(|| format_err("$", "missing `nodes` array"))?;
    let mut dbs = DbCache::new(db);
    let mut chis = Vec::new();
    let mut points = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        let path = format!("$.nodes[{i}]");
        let id = n
            .get("id")
            .and_then(Value::as_u64)
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(|| format_err(&path, "missing or invalid `id`"))?;
        let id = NodeId(id);
        let source = match n.get("db") {
            Some(r) => ChirotopeSource::Points(dbs.resolve(r, n.get("labels"), id, &path)?),
            None => chirotope_from_value(n, &path)?,
        };
        if let Some(pc) = source.points() {
            points.insert(id, pc.clone());
        }
        chis.push((id, source.chirotope()?));
    }
    let edges = match obj.get("edges") {
        None => Vec::new(),
        Some(e) => {
            let arr = e.as_array().ok_or_else(|| format_err("$.edges", "expected an array"))?;
            arr.iter().enumerate().map(|(i, e)| parse_edge(e, &format!("$.edges[{i}]"))).collect::<Result<_>>()?
        }
    };
    if chis.iter().map(|(id, _)| id).collect::<BTreeSet<_>>().len() != chis.len() {
        return Err(format_err("$.nodes", "node ids are not distinct"));
    }
    Ok(TreeSource { tree: ChirotopeTree::new(chis, edges)?, points })
}

fn parse_edge(e: &Value, path: &str) -> Result<Edge> {
    let node = |k: &str| -> Result<NodeId> {
        e.get(k)
            .and_then(Value::as_u64)
            .and_then(|x| u32::try_from(x).ok())
            .map(NodeId)
            .ok_or_else(|| format_err(path, format!("missing or invalid `{k}`")))
    };
    let proxy = |k: &str| -> Result<Label> {
        parse_label(e.get(k).ok_or_else(|| format_err(path, format!("missing `{k}`")))?, &format!("{path}.{k}"))
    };
    Ok(Edge::new(node("u")?, proxy("u_proxy")?, node("v")?, proxy("v_proxy")?))
}

/// Serializes a tree, writing nodes as points where a realization is given.
pub fn tree_to_json(tree: &ChirotopeTree, points: Option<&BTreeMap<NodeId, PointConfig>>) -> Value {
    let nodes: Vec<Value> = tree
        .nodes()
        .map(|(id, chi)| {
            let mut v = match points.and_then(|p| p.get(&id)) {
                Some(pc) => points_to_json(pc),
                None => signs_to_json(chi),
            };
            v.as_object_mut().expect("object").insert("id".into(), json!(id.0));
            v
        })
        .collect();
    let edges: Vec<Value> = tree
        .edges()
        .iter()
        .map(|e| json!({ "u": e.u.0, "u_proxy": e.u_proxy.as_str(), "v": e.v.0, "v_proxy": e.v_proxy.as_str() }))
        .collect();
    json!({ "nodes": nodes, "edges": edges })
}

/// File name of the database of `n`-point order types.
pub fn db_file_name(n: usize) -> String {
    let bits = if n <= 8 { "b08" } else { "b16" };
    format!("otypes{n:02}.{bits}")
}

/// Fixed-width records of `n` points, coordinates `x, y` in turn, one byte
/// each for `n <= 8` and two bytes each for `n = 9, 10`.
#[derive(Clone, Debug)]
pub struct OrderTypeDb {
    n: usize,
    width: usize,
    big_endian: bool,
    data: Vec<u8>,
}

impl OrderTypeDb {
    pub fn from_bytes(data: Vec<u8>, n: usize, big_endian: bool) -> Result<Self> {
        if !(3..=10).contains(&n) {
            return Err(Error::SizeCapExceeded { what: "order-type database point count", size: n, cap: 10 });
        }
        let width = if n <= 8 { 1 } else { 2 };
        let record = 2 * n * width;
        if data.len() % record != 0 {
            return Err(format_err(&format!("database of {n}-point records"), format!("length {} is not a multiple of {record}", data.len())));
        }
        Ok(OrderTypeDb { n, width, big_endian, data })
    }

    pub fn open(path: &Path, n: usize, big_endian: bool) -> Result<Self> {
        Self::from_bytes(fs::read(path)?, n, big_endian)
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn record_count(&self) -> usize {
        self.data.len() / (2 * self.n * self.width)
    }

    /// Raw coordinates of record `index`.
    pub fn record(&self, index: usize) -> Result<Vec<(u32, u32)>> {
        let count = self.record_count();
        if index >= count {
            return Err(Error::IndexOutOfRange { index, count });
        }
        let bytes = &self.data[index * 2 * self.n * self.width..(index + 1) * 2 * self.n * self.width];
        let value = |c: &[u8]| -> u32 {
            match (c.len(), self.big_endian) {
                (1, _) => c[0] as u32,
                (_, false) => u16::from_le_bytes([c[0], c[1]]) as u32,
                (_, true) => u16::from_be_bytes([c[0], c[1]]) as u32,
            }
        };
        Ok(bytes.chunks(2 * self.width).map(|p| (value(&p[..self.width]), value(&p[self.width..]))).collect())
    }

    /// Record `index` as a point configuration with the given labels.
    pub fn config(&self, index: usize, labels: &[Label]) -> Result<PointConfig> {
        if labels.len() != self.n {
            return Err(format_err(&format!("record {index}"), format!("{} labels for {} points", labels.len(), self.n)));
        }
        let pts = self.record(index)?;
        let pc = PointConfig::new(labels.iter().cloned().zip(pts.iter().map(|&(x, y)| Point::from_ints(x as i64, y as i64))))
            .map_err(|_| Error::CollinearRecord(index))?;
        match pc.sign_function() {
            Ok(_) => Ok(pc),
            Err(Error::Collinear(..)) => Err(Error::CollinearRecord(index)),
            Err(e) => Err(e),
        }
    }

    /// All records in general position; collinear ones are skipped and counted.
    pub fn configs(&self, labels: &[Label]) -> (Vec<(usize, PointConfig)>, usize) {
        let mut skipped = 0;
        let mut out = Vec::new();
        for i in 0..self.record_count() {
            match self.config(i, labels) {
                Ok(pc) => out.push((i, pc)),
                Err(_) => skipped += 1,
            }
        }
        (out, skipped)
    }
}

/// Encodes records in the database layout.
pub fn encode_db(records: &[Vec<(u32, u32)>], n: usize, big_endian: bool) -> Result<Vec<u8>> {
    let width = if n <= 8 { 1 } else { 2 };
    let max = if width == 1 { u8::MAX as u32 } else { u16::MAX as u32 };
    let mut out = Vec::with_capacity(records.len() * 2 * n * width);
    for (i, r) in records.iter().enumerate() {
        if r.len() != n {
            return Err(format_err(&format!("record {i}"), format!("{} points, expected {n}", r.len())));
        }
        for &c in r.iter().flat_map(|(x, y)| [x, y]) {
            if c > max {
                return Err(format_err(&format!("record {i}"), format!("coordinate {c} exceeds {max}")));
            }
            match (width, big_endian) {
                (1, _) => out.push(c as u8),
                (_, false) => out.extend((c as u16).to_le_bytes()),
                (_, true) => out.extend((c as u16).to_be_bytes()),
            }
        }
    }
    Ok(out)
}

/// Default labels of a database node: `"{id}.{j}"`.
pub fn db_labels(id: NodeId, n: usize) -> Vec<Label> {
    (0..n).map(|j| Label::new(format!("{}.{j}", id.0))).collect()
}

struct DbCache<'a> {
    settings: Option<DbSettings<'a>>,
    open: HashMap<usize, OrderTypeDb>,
}

impl<'a> DbCache<'a> {
    fn new(settings: Option<DbSettings<'a>>) -> Self {
        DbCache { settings, open: HashMap::new() }
    }

    fn resolve(&mut self, r: &Value, labels: Option<&Value>, id: NodeId, path: &str) -> Result<PointConfig> {
        let here = format!("{path}.db");
        let field = |k: &str| r.get(k).and_then(Value::as_u64).ok_or_else(|| format_err(&here, format!("missing or invalid `{k}`")));
        let (n, index) = (field("n")? as usize, field("index")? as usize);
        let settings = self.settings.ok_or_else(|| format_err(&here, "node refers to the order-type database but no directory was given"))?;
        let db = match self.open.entry(n) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(OrderTypeDb::open(&db_path(settings.dir, n), n, settings.big_endian)?),
        };
        let labels = match labels {
            Some(l) => parse_labels(l, &format!("{path}.labels"))?,
            None => db_labels(id, n),
        };
        db.config(index, &labels)
    }
}

/// Path of the database of `n`-point order types in `dir`.
pub fn db_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(db_file_name(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::chain_tree;

    #[test]
    fn sign_file_round_trip() {
        let pc = PointConfig::from_ints([("a", (0, 0)), ("b", (4, 0)), ("c", (0, 4)), ("d", (1, 1))]).unwrap();
        let sf = pc.sign_function().unwrap();
        let text = signs_to_json(&sf).to_string();
        assert_eq!(parse_chirotope(&text).unwrap().sign_function().unwrap(), sf);
        let text = points_to_json(&pc).to_string();
        assert_eq!(parse_chirotope(&text).unwrap().sign_function().unwrap(), sf);
    }

    #[test]
    fn unsorted_keys_take_the_permutation_sign() {
        let a = parse_chirotope(r#"{"labels":["a","b","c"],"signs":{"b,a,c":-1}}"#).unwrap();
        let b = parse_chirotope(r#"{"labels":["a","b","c"],"signs":{"a,b,c":1}}"#).unwrap();
        assert_eq!(a.sign_function().unwrap(), b.sign_function().unwrap());
        assert!(parse_chirotope(r#"{"labels":["a","b","c"],"signs":{"a,b,c":1,"b,a,c":1}}"#).is_err());
    }

    #[test]
    fn rational_points_and_errors() {
        let src = parse_chirotope(r#"{"labels":["a","b","c"],"points":[[0,1,0,1],[1,2,0,1],["0","1/3"]]}"#).unwrap();
        let pc = src.points().unwrap();
        assert_eq!(pc.points()[1].x, BigRational::new(1.into(), 2.into()));
        assert!(matches!(parse_chirotope("{\n  \"labels\": [\"a\",\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_chirotope(r#"{"labels":["a","b","c"],"signs":{"a,b,c":2}}"#), Err(Error::InvalidSign { .. })));
        assert!(matches!(parse_chirotope(r#"{"labels":["a","b","c","d"],"signs":{"a,b,c":1}}"#), Err(Error::MissingSign(..))));
        assert!(matches!(
            parse_chirotope(r#"{"labels":["a","b","c"],"points":[[0,0],[1,1],[2,2]]}"#).unwrap().sign_function(),
            Err(Error::Collinear(..))
        ));
    }

    #[test]
    fn tree_round_trip() {
        let t = chain_tree(&[false, true, true]).unwrap();
        let text = tree_to_json(&t, None).to_string();
        let back = parse_tree(&text, None).unwrap();
        assert_eq!(back.tree.fingerprint(), t.fingerprint());
        assert!(back.points.is_empty());
    }

    #[test]
    fn database_records() {
        let recs = vec![vec![(0, 0), (10, 0), (0, 10)], vec![(0, 0), (1, 1), (2, 2)]];
        let db = OrderTypeDb::from_bytes(encode_db(&recs, 3, false).unwrap(), 3, false).unwrap();
        assert_eq!(db.record_count(), 2);
        let labels = crate::label::labels(["a", "b", "c"]);
        assert_eq!(db.config(0, &labels).unwrap().chirotope().unwrap().extreme_count(), 3);
        assert!(matches!(db.config(1, &labels), Err(Error::CollinearRecord(1))));
        assert!(matches!(db.config(2, &labels), Err(Error::IndexOutOfRange { index: 2, count: 2 })));
        let (ok, skipped) = db.configs(&labels);
        assert_eq!((ok.len(), skipped), (1, 1));

        let wide = vec![(0..9).map(|i| (i * 300 + 1, (i * i * 170 + 3) % 60000)).collect::<Vec<_>>()];
        for be in [false, true] {
            let db = OrderTypeDb::from_bytes(encode_db(&wide, 9, be).unwrap(), 9, be).unwrap();
            assert_eq!(db.record(0).unwrap(), wide[0]);
        }
        assert_eq!(db_file_name(8), "otypes08.b08");
        assert_eq!(db_file_name(10), "otypes10.b16");
    }

    #[test]
    fn tree_nodes_from_database() {
        let dir = std::env::temp_dir().join(format!("chirotope-db-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let recs = vec![vec![(0, 0), (20, 0), (0, 20), (5, 6)]];
        fs::write(db_path(&dir, 4), encode_db(&recs, 4, false).unwrap()).unwrap();
        let text = r#"{"nodes":[{"id":0,"db":{"n":4,"index":0}},{"id":1,"db":{"n":4,"index":0},"labels":["p","q","r","s"]}],
                       "edges":[{"u":0,"u_proxy":"0.0","v":1,"v_proxy":"p"}]}"#;
        let src = parse_tree(text, Some(DbSettings { dir: &dir, big_endian: false })).unwrap();
        assert_eq!(src.tree.total_element_count(), 8);
        assert_eq!(src.points.len(), 2);
        assert!(parse_tree(text, None).is_err());
        assert!(matches!(parse_input(text, Some(DbSettings { dir: &dir, big_endian: false })).unwrap(), InputFile::Tree(_)));
        fs::remove_dir_all(&dir).unwrap();
    }
}
