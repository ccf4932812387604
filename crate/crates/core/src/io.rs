//! JSON instance files, key-sorted JSON output, and Graphviz export.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::PcgInstance;
use crate::error::{Error, Result};
use crate::pcg::{Pcg, Sign, SignedEdge};
use crate::state::{BTerm, ProductBasis};

fn default_d() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub vertices: Vec<usize>,
    pub theta: Sign,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum AlphaRecord {
    Magnitude { magnitude: f64 },
    Complex { re: f64, im: f64 },
}

impl AlphaRecord {
    pub fn value(self) -> Complex64 {
        match self {
            AlphaRecord::Magnitude { magnitude } => Complex64::new(magnitude, 0.0),
            AlphaRecord::Complex { re, im } => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexRecord {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BTermRecord {
    pub vertices: Vec<usize>,
    pub lambda: ComplexRecord,
}

/// On-disk instance: a PCG plus the state parameters `α` and `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcgFile {
    pub n: usize,
    #[serde(default = "default_d")]
    pub d: usize,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub b_terms: Vec<BTermRecord>,
}

impl PcgFile {
    /// Parses JSON; errors carry serde's line/column position.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed PCG file: {e}")))
    }

    pub fn to_json(&self) -> String {
        to_sorted_json(self).expect("PCG files always serialize")
    }

    pub fn from_instance(instance: &PcgInstance) -> Self {
        let alpha = instance.alpha;
        Self {
            n: instance.pcg.n(),
            d: 2,
            edges: instance
                .pcg
                .edges()
                .iter()
                .map(|e| EdgeRecord { vertices: e.vertices().to_vec(), theta: e.theta() })
                .collect(),
            alpha: Some(if alpha.im == 0.0 && alpha.re >= 0.0 {
                AlphaRecord::Magnitude { magnitude: alpha.re }
            } else {
                AlphaRecord::Complex { re: alpha.re, im: alpha.im }
            }),
            b_terms: instance
                .b_terms
                .iter()
                .map(|t| BTermRecord {
                    vertices: t.vertices.clone(),
                    lambda: ComplexRecord { re: t.lambda.re, im: t.lambda.im },
                })
                .collect(),
        }
    }

    /// Builds the PCG (edge well-formedness only; structural validation is
    /// the caller's choice) and the state parameters. `α` defaults to 1.
    pub fn to_instance(&self) -> Result<PcgInstance> {
        if self.d != 2 {
            return Err(Error::Unsupported(format!(
                "PCG files describe qubit states; d = {} is not supported",
                self.d
            )));
        }
        for (i, e) in self.edges.iter().enumerate() {
            let mut sorted = e.vertices.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != e.vertices.len() {
                return Err(Error::InvalidInput(format!("edges[{i}].vertices repeats a vertex")));
            }
        }
        let pcg = Pcg::new(
            self.n,
            self.edges.iter().map(|e| SignedEdge::new(e.vertices.iter().copied(), e.theta)).collect(),
        )?;
        Ok(PcgInstance {
            pcg,
            alpha: self.alpha.map_or(Complex64::new(1.0, 0.0), AlphaRecord::value),
            b_terms: self
                .b_terms
                .iter()
                .map(|t| BTerm::new(t.vertices.iter().copied(), Complex64::new(t.lambda.re, t.lambda.im)))
                .collect(),
            basis: ProductBasis::X,
        })
    }
}

/// Pretty JSON with object keys sorted at every level.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's default map is a BTreeMap, so a round trip through Value sorts keys.
    let v = serde_json::to_value(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    serde_json::to_string_pretty(&v).map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Graphviz rendering. Pair edges are drawn directly; larger edges become a
/// square junction node wired to each member. Red is θ = +1, green θ = -1.
pub fn to_dot(pcg: &Pcg) -> String {
    let mut out = String::new();
    out.push_str("graph pcg {\n");
    out.push_str("  node [shape=circle];\n");
    for v in 1..=pcg.n() {
        let _ = writeln!(out, "  v{v} [label=\"{v}\"];");
    }
    for (i, e) in pcg.edges().iter().enumerate() {
        let color = e.theta().color_name();
        match e.vertices() {
            [a, b] => {
                let _ = writeln!(out, "  v{a} -- v{b} [color={color}, penwidth=2];");
            }
            vs => {
                let _ = writeln!(
                    out,
                    "  e{i} [shape=square, label=\"\", style=filled, fillcolor={color}, color={color}, width=0.15];"
                );
                for v in vs {
                    let _ = writeln!(out, "  e{i} -- v{v} [color={color}];");
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal_file() {
        let f = PcgFile::parse(r#"{"n": 3, "edges": [{"vertices": [2,3], "theta": 1}, {"vertices": [1,3], "theta": 1}, {"vertices": [1,2], "theta": -1}]}"#).unwrap();
        assert_eq!(f.d, 2);
        let inst = f.to_instance().unwrap();
        assert_eq!(inst.alpha, Complex64::new(1.0, 0.0));
        assert_eq!(inst.pcg.edges()[2].theta(), Sign::Minus);
    }

    #[test]
    fn parse_alpha_forms() {
        let m = PcgFile::parse(r#"{"n":3,"edges":[],"alpha":{"magnitude":0.5}}"#).unwrap();
        assert_eq!(m.alpha.unwrap().value(), Complex64::new(0.5, 0.0));
        let c = PcgFile::parse(r#"{"n":3,"edges":[],"alpha":{"re":0.0,"im":0.5}}"#).unwrap();
        assert_eq!(c.alpha.unwrap().value(), Complex64::new(0.0, 0.5));
    }

    #[test]
    fn rejects_unknown_fields_and_bad_signs() {
        assert!(PcgFile::parse(r#"{"n":3,"edges":[],"colour":1}"#).is_err());
        assert!(PcgFile::parse(r#"{"n":3,"edges":[{"vertices":[1,2],"theta":0}]}"#).is_err());
        assert!(PcgFile::parse(r#"{"n":3,"edges":[{"vertices":[1,2],"theta":1,"w":2}]}"#).is_err());
        let err = PcgFile::parse("{\n\"n\": 3,\n\"edges\": [}").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn rejects_qudit_and_repeated_vertices() {
        let q = PcgFile::parse(r#"{"n":3,"d":3,"edges":[]}"#).unwrap();
        assert!(matches!(q.to_instance(), Err(Error::Unsupported(_))));
        let r = PcgFile::parse(r#"{"n":3,"edges":[{"vertices":[1,1],"theta":1}]}"#).unwrap();
        assert!(r.to_instance().is_err());
    }

    #[test]
    fn dot_output() {
        let g = Pcg::new(4, vec![SignedEdge::red([1, 2]), SignedEdge::green([2, 3, 4])]).unwrap();
        let dot = to_dot(&g);
        assert!(dot.starts_with("graph pcg {"));
        assert!(dot.contains("v1 -- v2 [color=red"));
        assert!(dot.contains("e1 [shape=square"));
        assert!(dot.contains("fillcolor=green"));
        for v in [2, 3, 4] {
            assert!(dot.contains(&format!("e1 -- v{v} [color=green]")));
        }
    }

    #[test]
    fn sorted_json_keys() {
        let g = PcgFile::parse(r#"{"n":3,"edges":[{"theta":1,"vertices":[1,2]}]}"#).unwrap();
        let s = g.to_json();
        assert!(s.find("\"d\"").unwrap() < s.find("\"edges\"").unwrap());
        assert!(s.find("\"edges\"").unwrap() < s.find("\"n\"").unwrap());
        assert!(s.find("\"theta\"").unwrap() < s.find("\"vertices\"").unwrap());
    }
}
