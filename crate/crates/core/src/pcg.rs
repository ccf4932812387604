//! Projected-coloring graphs: signed hypergraphs whose edges encode parity
//! constraints on a two-coloring of the vertices.
//!
//! Vertices are labeled `1..=n`. An edge with sign `+1` (red) requires an odd
//! number of red vertices on it, an edge with sign `-1` (green) an even
//! number. Internally a coloring is a bit vector `b` with `b_v = 1` for red,
//! so each edge reads `sum_{v in S} b_v = Θ` (mod 2) where `Θ = 1` iff the
//! edge is red.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, Gf2Vector};

/// Largest vertex count a [`Pcg`] may have; vertex sets are kept as `u64` masks.
pub const MAX_VERTICES: usize = 64;

/// Default vertex cap for exhaustive coloring enumeration.
pub const DEFAULT_COLORING_CAP: usize = 24;

/// Edge sign θ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    /// θ = +1, drawn red.
    Plus,
    /// θ = -1, drawn green.
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidInput(format!("edge sign must be +1 or -1, got {other}"))),
        }
    }

    /// Θ = (θ + |θ|) / 2.
    pub fn parity_bit(self) -> bool {
        self == Sign::Plus
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn color_name(self) -> &'static str {
        match self {
            Sign::Plus => "red",
            Sign::Minus => "green",
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_value(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedEdge {
    vertices: Vec<usize>,
    theta: Sign,
}

impl SignedEdge {
    /// Vertex labels are sorted and deduplicated.
    pub fn new<I: IntoIterator<Item = usize>>(vertices: I, theta: Sign) -> Self {
        let set: BTreeSet<usize> = vertices.into_iter().collect();
        Self {
            vertices: set.into_iter().collect(),
            theta,
        }
    }

    pub fn red<I: IntoIterator<Item = usize>>(vertices: I) -> Self {
        Self::new(vertices, Sign::Plus)
    }

    pub fn green<I: IntoIterator<Item = usize>>(vertices: I) -> Self {
        Self::new(vertices, Sign::Minus)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn theta(&self) -> Sign {
        self.theta
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Bit `v - 1` set for each vertex `v`.
    pub fn mask(&self) -> u64 {
        self.vertices.iter().fold(0, |m, &v| m | 1 << (v - 1))
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

impl fmt::Display for SignedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}:{}", vs.join(","), if self.theta == Sign::Plus { "+" } else { "-" })
    }
}

/// A structural defect reported by [`Pcg::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Edge size outside `1..n`.
    EdgeSize { edge: usize, size: usize, n: usize },
    /// Edge `subset` is contained in edge `superset` (indices are 0-based).
    SubsetPair { subset: usize, superset: usize },
    /// More than one connected component; each lists its vertices.
    Disconnected { components: Vec<Vec<usize>> },
    NoEdges,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeSize { edge, size, n } => {
                write!(f, "edge #{edge} has {size} vertices, need 1 <= size < {n}")
            }
            Violation::SubsetPair { subset, superset } => {
                write!(f, "edge #{subset} is a subset of edge #{superset}")
            }
            Violation::Disconnected { components } => {
                let parts: Vec<String> = components
                    .iter()
                    .map(|c| format!("{{{}}}", c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                write!(f, "disconnected components {}", parts.join(" "))
            }
            Violation::NoEdges => f.write_str("no edges"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A projected-coloring graph.
///
/// Construction only checks that each edge is well formed (nonempty, labels
/// in range). The structural conditions are checked by [`Pcg::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pcg {
    n: usize,
    edges: Vec<SignedEdge>,
}

impl Pcg {
    pub fn new(n: usize, edges: Vec<SignedEdge>) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidInput(format!(
                "vertex count must be in 1..={MAX_VERTICES}, got {n}"
            )));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.is_empty() {
                return Err(Error::InvalidInput(format!("edge #{i} is empty")));
            }
            if let Some(&v) = e.vertices().iter().find(|&&v| v == 0 || v > n) {
                return Err(Error::InvalidInput(format!("edge #{i} has vertex {v} outside 1..={n}")));
            }
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[SignedEdge] {
        &self.edges
    }

    /// Number of edges, `p`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn full_mask(&self) -> u64 {
        if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 }
    }

    /// Same graph with the sign of edge `index` reversed.
    pub fn with_flipped_sign(&self, index: usize) -> Self {
        let mut edges = self.edges.clone();
        let e = &mut edges[index];
        e.theta = e.theta.flipped();
        Self { n: self.n, edges }
    }

    /// Same vertex set, edges restricted to `keep` (0-based indices).
    pub fn sub_pcg(&self, keep: &[usize]) -> Self {
        Self {
            n: self.n,
            edges: keep.iter().map(|&i| self.edges[i].clone()).collect(),
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations: Vec<Violation> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.len() >= self.n)
            .map(|(i, e)| Violation::EdgeSize { edge: i, size: e.len(), n: self.n })
            .collect();
        violations.extend(self.combinatorial_violations());
        ValidationReport { violations }
    }

    fn combinatorial_violations(&self) -> Vec<Violation> {
        let mut out = self.connectivity_violations();
        let masks: Vec<u64> = self.edges.iter().map(SignedEdge::mask).collect();
        for i in 0..masks.len() {
            for j in 0..masks.len() {
                if i == j {
                    continue;
                }
                let subset = masks[i] & !masks[j] == 0;
                // Equal sets are reported once, lower index as the subset.
                if subset && (masks[i] != masks[j] || i < j) {
                    out.push(Violation::SubsetPair { subset: i, superset: j });
                }
            }
        }
        if let Some(pos) = out.iter().position(|v| matches!(v, Violation::Disconnected { .. })) {
            let d = out.remove(pos);
            out.push(d);
        }
        out
    }

    /// The coloring problem only needs a connected, nonempty edge set; the
    /// size bound and the antichain condition are what make the quantum
    /// state's conditional certainties hold.
    fn connectivity_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.edges.is_empty() {
            out.push(Violation::NoEdges);
        }
        let components = self.components();
        if components.len() > 1 {
            out.push(Violation::Disconnected { components });
        }
        out
    }

    /// Connected components of the hypergraph, as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..=self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for e in &self.edges {
            let first = e.vertices()[0];
            for &v in &e.vertices()[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, v));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 1..=self.n {
            let root = find(&mut parent, v);
            groups.entry(root).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() { Ok(()) } else { Err(Error::InvalidPcg(report.violations)) }
    }

    fn ensure_antichain_and_connected(&self) -> Result<()> {
        let v = self.combinatorial_violations();
        if v.is_empty() { Ok(()) } else { Err(Error::InvalidPcg(v)) }
    }

    fn ensure_connected(&self) -> Result<()> {
        let v = self.connectivity_violations();
        if v.is_empty() { Ok(()) } else { Err(Error::InvalidPcg(v)) }
    }

    /// Hardy matrix `A` (p × n incidence) and parity vector `Θ`.
    pub fn hardy_matrices(&self) -> Result<(Gf2Matrix, Gf2Vector)> {
        self.ensure_connected()?;
        Ok(self.hardy_matrices_unchecked())
    }

    fn hardy_matrices_unchecked(&self) -> (Gf2Matrix, Gf2Vector) {
        let mut a = Gf2Matrix::zeros(self.edges.len(), self.n);
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e.vertices() {
                a.set(i, v - 1, true);
            }
        }
        let theta = Gf2Vector::from_bits(self.edges.iter().map(|e| e.theta.parity_bit()));
        (a, theta)
    }

    /// Rank criterion: un-colorable iff `rank(A) != rank([A | Θ])`.
    pub fn is_colorable(&self) -> Result<Colorability> {
        self.ensure_connected()?;
        Ok(self.colorability_unchecked())
    }

    fn colorability_unchecked(&self) -> Colorability {
        let (a, theta) = self.hardy_matrices_unchecked();
        let rank_a = a.rank();
        let rank_b = a.augment(&theta).expect("theta has one entry per row").rank();
        if rank_a != rank_b {
            return Colorability::Uncolorable { rank_a, rank_b };
        }
        let b = a
            .solve(&theta)
            .expect("dimensions agree")
            .expect("equal ranks imply a solution");
        Colorability::Colorable {
            rank_a,
            rank_b,
            witness: Coloring::from_red_bits(&b),
        }
    }

    /// Exhaustive enumeration of all `2^n` colorings; `b` counts upward with
    /// vertex 1 as the least significant bit.
    pub fn brute_force_colorings(&self, cap: usize) -> Result<ColoringCensus> {
        self.ensure_connected()?;
        if self.n > cap {
            return Err(Error::ResourceLimit(format!(
                "exhaustive coloring needs 2^{} assignments, cap is {cap} vertices",
                self.n
            )));
        }
        let constraints: Vec<(u64, u32)> = self
            .edges
            .iter()
            .map(|e| (e.mask(), u32::from(e.theta.parity_bit())))
            .collect();
        let total = 1u64 << self.n;
        let mut satisfying = 0u64;
        let mut first = None;
        for b in 0..total {
            if constraints.iter().all(|&(m, t)| (b & m).count_ones() & 1 == t) {
                satisfying += 1;
                if first.is_none() {
                    first = Some(b);
                }
            }
        }
        Ok(ColoringCensus {
            total_assignments: total,
            satisfying_count: satisfying,
            first_witness: first.map(|b| Coloring::from_mask(b, self.n)),
        })
    }

    /// Whether the graph is a minimal un-colorable one.
    ///
    /// Solvability is monotone in the constraint set, so checking every
    /// single-edge deletion decides minimality. For a reducible graph the
    /// witness is a minimal un-colorable edge subset found by greedy deletion
    /// in index order.
    pub fn is_irreducible(&self) -> Result<Irreducibility> {
        self.ensure_connected()?;
        if self.colorability_unchecked().is_colorable() {
            return Ok(Irreducibility::NotApplicable);
        }
        let all: Vec<usize> = (0..self.edges.len()).collect();
        let uncolorable = |keep: &[usize]| !self.sub_pcg(keep).colorability_unchecked().is_colorable();
        let minimal = (0..self.edges.len()).all(|skip| {
            let keep: Vec<usize> = all.iter().copied().filter(|&i| i != skip).collect();
            !uncolorable(&keep)
        });
        let covered = self.edges.iter().fold(0u64, |m, e| m | e.mask()) == self.full_mask();
        if minimal && covered {
            return Ok(Irreducibility::Irreducible);
        }
        let mut keep = all;
        let mut i = 0;
        while i < keep.len() {
            let trial: Vec<usize> = keep.iter().copied().filter(|&k| k != keep[i]).collect();
            if uncolorable(&trial) {
                keep = trial;
            } else {
                i += 1;
            }
        }
        Ok(Irreducibility::Reducible { witness: keep })
    }

    /// Short content hash over `n` and the ordered edge list.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("n={}", self.n));
        for e in &self.edges {
            h.update(format!("|{e}"));
        }
        h.finalize().iter().take(12).map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for Pcg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.n)?;
        for e in &self.edges {
            write!(f, " {e}")?;
        }
        Ok(())
    }
}

/// One red constraint edge per pair of bordering regions.
pub fn from_adjacency_map(regions: usize, adjacency: &[(usize, usize)]) -> Result<Pcg> {
    let mut edges = Vec::with_capacity(adjacency.len());
    for &(a, b) in adjacency {
        if a == b {
            return Err(Error::InvalidInput(format!("region {a} cannot border itself")));
        }
        edges.push(SignedEdge::red([a, b]));
    }
    let pcg = Pcg::new(regions, edges)?;
    pcg.ensure_antichain_and_connected()?;
    Ok(pcg)
}

/// Vertex colors `C(v)`: `+1` green, `-1` red.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Coloring {
    values: Vec<i8>,
}

impl Coloring {
    pub fn from_red_bits(bits: &Gf2Vector) -> Self {
        Self {
            values: bits.iter().map(|red| if red { -1 } else { 1 }).collect(),
        }
    }

    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self {
            values: (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// `C(v)` for a 1-based vertex.
    pub fn color(&self, v: usize) -> i8 {
        self.values[v - 1]
    }

    /// Checks `prod_{v in S} C(v) = -θ` for every edge directly.
    pub fn satisfies(&self, pcg: &Pcg) -> bool {
        self.values.len() == pcg.n()
            && pcg.edges().iter().all(|e| {
                let prod: i8 = e.vertices().iter().map(|&v| self.color(v)).product();
                prod == -e.theta().value()
            })
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.values {
            f.write_str(if *c < 0 { "R" } else { "G" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Colorability {
    Colorable { rank_a: usize, rank_b: usize, witness: Coloring },
    Uncolorable { rank_a: usize, rank_b: usize },
}

impl Colorability {
    pub fn is_colorable(&self) -> bool {
        matches!(self, Colorability::Colorable { .. })
    }

    pub fn ranks(&self) -> (usize, usize) {
        match *self {
            Colorability::Colorable { rank_a, rank_b, .. } | Colorability::Uncolorable { rank_a, rank_b } => {
                (rank_a, rank_b)
            }
        }
    }

    pub fn witness(&self) -> Option<&Coloring> {
        match self {
            Colorability::Colorable { witness, .. } => Some(witness),
            Colorability::Uncolorable { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColoringCensus {
    pub total_assignments: u64,
    pub satisfying_count: u64,
    pub first_witness: Option<Coloring>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    /// 0-based indices of a minimal un-colorable edge subset.
    Reducible { witness: Vec<usize> },
    /// The graph is colorable.
    NotApplicable,
}
