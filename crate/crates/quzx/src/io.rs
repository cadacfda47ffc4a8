//! JSON interchange for diagrams, tensor dumps and matrix files.
//!
//! Complex numbers are `[re, im]` pairs. Floats are written in the shortest
//! form that parses back to the same double.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diagram::{Diagram, End, Node, Port};
use crate::error::{Error, Result};
use crate::generator::GeneratorKind;
use crate::phase::PhaseVector;
use crate::tensor::DenseTensor;

pub const FORMAT_VERSION: &str = "1";

type Pair = [f64; 2];

fn pair(c: C64) -> Pair {
    [c.re, c.im]
}

fn complex(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    kind: String,
    d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<Vec<Pair>>,
    /// `K_j` tag carried by phase vectors built from roots of unity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t: Option<usize>,
    n_in: usize,
    n_out: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRecord {
    a: Value,
    b: Value,
    dim: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct DiagramRecord {
    version: String,
    scalar: Pair,
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    next_id: Option<usize>,
}

fn end_value(e: End, d: &Diagram) -> Value {
    match e {
        End::Input(i) => serde_json::json!(["in", i]),
        End::Output(i) => serde_json::json!(["out", i]),
        End::Node { node, port } => {
            let n_in = d.node(node).map(|n| n.n_in).unwrap_or(0);
            let p = match port {
                Port::In(i) => i,
                Port::Out(i) => n_in + i,
            };
            serde_json::json!([node, p])
        }
    }
}

fn parse_end(v: &Value, at: &str, nodes: &[NodeRecord]) -> Result<End> {
    let bad = |why: &str| Error::Parse(format!("{at}: {why}"));
    let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("expected a 2-element array"))?;
    let idx = arr[1].as_u64().ok_or_else(|| bad("port or slot must be a non-negative integer"))? as usize;
    match &arr[0] {
        Value::String(s) if s == "in" => Ok(End::Input(idx)),
        Value::String(s) if s == "out" => Ok(End::Output(idx)),
        Value::Number(n) => {
            let id = n.as_u64().ok_or_else(|| bad("node id must be a non-negative integer"))? as usize;
            let rec = nodes.iter().find(|r| r.id == id).ok_or_else(|| bad("unknown node id"))?;
            let port = if idx < rec.n_in {
                Port::In(idx)
            } else {
                Port::Out(idx - rec.n_in)
            };
            Ok(End::node(id, port))
        }
        _ => Err(bad("first element must be a node id, \"in\" or \"out\"")),
    }
}

fn node_record(id: usize, n: &Node) -> NodeRecord {
    let mut r = NodeRecord {
        id,
        kind: n.kind.name().to_string(),
        d: n.dim,
        phase: None,
        phase_k: None,
        label: None,
        s: None,
        t: None,
        n_in: n.n_in,
        n_out: n.n_out,
    };
    match &n.kind {
        GeneratorKind::ZSpider { phase } => {
            r.phase = Some(phase.entries().iter().copied().map(pair).collect());
            r.phase_k = phase.symbolic_label();
        }
        GeneratorKind::XSpider { label } => r.label = Some(*label),
        GeneratorKind::DimBinder { s, t } | GeneratorKind::DimSplitter { s, t } => {
            r.s = Some(*s);
            r.t = Some(*t);
        }
        _ => {}
    }
    r
}

fn node_kind(r: &NodeRecord, at: &str) -> Result<GeneratorKind> {
    let need = |v: Option<usize>, f: &str| v.ok_or_else(|| Error::Parse(format!("{at}.{f}: missing")));
    Ok(match r.kind.as_str() {
        "z" => {
            let entries = r
                .phase
                .as_ref()
                .ok_or_else(|| Error::Parse(format!("{at}.phase: missing")))?
                .iter()
                .map(complex)
                .collect();
            GeneratorKind::z(PhaseVector::new(entries).with_symbolic(r.phase_k))
        }
        "x" => GeneratorKind::x(need(r.label, "label")?),
        "h" => GeneratorKind::H,
        "h_dagger" => GeneratorKind::HDagger,
        "triangle" => GeneratorKind::Triangle,
        "triangle_inv" => GeneratorKind::TriangleInv,
        "w" => GeneratorKind::WSpider,
        "binder" => GeneratorKind::DimBinder {
            s: need(r.s, "s")?,
            t: need(r.t, "t")?,
        },
        "splitter" => GeneratorKind::DimSplitter {
            s: need(r.s, "s")?,
            t: need(r.t, "t")?,
        },
        other => return Err(Error::Parse(format!("{at}.kind: unknown kind {other:?}"))),
    })
}

fn to_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn from_str<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn diagram_to_json(d: &Diagram) -> String {
    let rec = DiagramRecord {
        version: FORMAT_VERSION.to_string(),
        scalar: pair(d.scalar()),
        nodes: d.nodes().iter().map(|(&id, n)| node_record(id, n)).collect(),
        edges: d
            .edges()
            .iter()
            .map(|e| EdgeRecord {
                a: end_value(e.a, d),
                b: end_value(e.b, d),
                dim: e.dim,
            })
            .collect(),
        inputs: d.inputs().to_vec(),
        outputs: d.outputs().to_vec(),
        next_id: Some(d.next_id()),
    };
    to_string(&rec)
}

/// Parses and validates a diagram file.
pub fn diagram_from_json(text: &str) -> Result<Diagram> {
    let rec: DiagramRecord = from_str(text)?;
    if rec.version != FORMAT_VERSION {
        return Err(Error::Parse(format!("version: expected \"1\", got {:?}", rec.version)));
    }
    let mut d = Diagram::empty();
    for (k, r) in rec.nodes.iter().enumerate() {
        let at = format!("nodes[{k}]");
        let kind = node_kind(r, &at)?;
        if d.node(r.id).is_some() {
            return Err(Error::Parse(format!("{at}.id: duplicate id {}", r.id)));
        }
        kind.check(r.d, r.n_in, r.n_out)
            .map_err(|e| Error::Parse(format!("{at}: {e}")))?;
        d.insert_node_unchecked(
            r.id,
            Node {
                kind,
                dim: r.d,
                n_in: r.n_in,
                n_out: r.n_out,
            },
        );
    }
    for (k, e) in rec.edges.iter().enumerate() {
        let a = parse_end(&e.a, &format!("edges[{k}].a"), &rec.nodes)?;
        let b = parse_end(&e.b, &format!("edges[{k}].b"), &rec.nodes)?;
        d.add_edge(a, b, e.dim);
    }
    for &dim in &rec.inputs {
        d.push_input(dim);
    }
    for &dim in &rec.outputs {
        d.push_output(dim);
    }
    d.set_scalar(complex(&rec.scalar));
    if let Some(n) = rec.next_id {
        d.next_id = d.next_id.max(n);
    }
    d.ensure_valid()?;
    Ok(d)
}

#[derive(Debug, Serialize, Deserialize)]
struct TensorRecord {
    version: String,
    axis_dims: Vec<usize>,
    data: Vec<Pair>,
}

pub fn tensor_to_json(t: &DenseTensor) -> String {
    to_string(&TensorRecord {
        version: FORMAT_VERSION.to_string(),
        axis_dims: t.axis_dims.clone(),
        data: t.data.iter().copied().map(pair).collect(),
    })
}

pub fn tensor_from_json(text: &str) -> Result<DenseTensor> {
    let rec: TensorRecord = from_str(text)?;
    DenseTensor::new(rec.axis_dims, rec.data.iter().map(complex).collect())
}

/// A dense `rows x cols` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixRecord {
    rows: usize,
    cols: usize,
    data: Vec<Pair>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Length {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = C64::new(1.0, 0.0);
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    pub fn to_json(&self) -> String {
        to_string(&MatrixRecord {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().copied().map(pair).collect(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: MatrixRecord = from_str(text)?;
        Matrix::new(rec.rows, rec.cols, rec.data.iter().map(complex).collect())
            .map_err(|e| Error::Parse(format!("data: {e}")))
    }

    pub fn to_tensor(&self) -> DenseTensor {
        DenseTensor::from_matrix(self.rows, self.cols, self.data.clone()).expect("shape checked")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagram_round_trip_is_structural() {
        let a = Diagram::z(PhaseVector::from_angles(&[0.1, 2.0 / 3.0]), 1, 2).unwrap();
        let b = Diagram::x(3, 2, 2, 1).unwrap();
        let d = a
            .compose_seq(&b)
            .unwrap()
            .compose_par(&Diagram::cap(3))
            .compose_par(&Diagram::z(PhaseVector::k(3, 1), 0, 0).unwrap())
            .with_scalar(C64::new(0.1, -1e-300));
        let text = diagram_to_json(&d);
        let back = diagram_from_json(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(diagram_to_json(&back), text);
    }

    #[test]
    fn parse_errors_name_the_field() {
        let bad = r#"{"version":"1","scalar":[1,0],"nodes":[{"id":0,"kind":"q","d":2,"n_in":0,"n_out":0}],"edges":[],"inputs":[],"outputs":[]}"#;
        let err = diagram_from_json(bad).unwrap_err().to_string();
        assert!(err.contains("nodes[0].kind"), "{err}");
        let err = diagram_from_json("{\n\"version\": }").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn matrix_round_trip() {
        let m = Matrix::new(1, 2, vec![C64::new(0.5, 1.0 / 3.0), C64::new(-2.0, 0.0)]).unwrap();
        assert_eq!(Matrix::from_json(&m.to_json()).unwrap(), m);
        assert!(Matrix::from_json(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
    }
}
