//! Built-in named instances with their expected classifications.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pcg::{from_adjacency_map, Pcg, SignedEdge};
use crate::state::{BTerm, Pauli, PauliWord, ProductBasis, SparseState};
use crate::verify::loop_pcg;

pub const MAX_LOOP_N: usize = 30;

/// Entry ids, in listing order.
pub const IDS: &[&str] = &[
    "minimal-triangle",
    "minimal-psi",
    "minimal-variant-y",
    "loop",
    "odd-loop-red",
    "magic-m4",
    "magic-m9",
    "magic-m9-tilde",
    "magic-m16",
    "magic-m16-tilde",
    "magic-m8",
    "map-four-regions",
    "qudit",
    "pps-appendix-e",
];

/// Optional generator parameters. Unused ones are ignored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CatalogParams {
    pub n: Option<usize>,
    pub d: Option<usize>,
    /// Real, non-negative `α` for the entries that take one.
    pub alpha: Option<f64>,
}

impl CatalogParams {
    /// Parses `key=value` pairs separated by commas, e.g. `n=7,alpha=0.5`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut p = Self::default();
        for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("parameter {part:?} is not key=value")))?;
            let bad = |e: &dyn std::fmt::Display| Error::InvalidInput(format!("parameter {k}: {e}"));
            match k.trim() {
                "n" => p.n = Some(v.trim().parse().map_err(|e| bad(&e))?),
                "d" => p.d = Some(v.trim().parse().map_err(|e| bad(&e))?),
                "alpha" => p.alpha = Some(v.trim().parse().map_err(|e| bad(&e))?),
                other => return Err(Error::InvalidInput(format!("unknown parameter {other:?}"))),
            }
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PcgInstance {
    pub pcg: Pcg,
    pub alpha: Complex64,
    pub b_terms: Vec<BTerm>,
    /// Measurement basis in which the conditional certainties hold.
    pub basis: ProductBasis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrePostFixture {
    pub pre: SparseState,
    pub post: SparseState,
    /// Projectors `(I + sign·word)/2` claimed to vanish between the two states.
    pub checks: Vec<(PauliWord, i8)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Pcg(PcgInstance),
    Qudit { d: usize },
    PrePost(PrePostFixture),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Expected {
    /// Colorability under the X-basis rank criterion.
    pub colorable: Option<bool>,
    pub success_probability: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub description: String,
    pub instance: Instance,
    pub expected: Expected,
}

impl CatalogEntry {
    pub fn pcg_instance(&self) -> Option<&PcgInstance> {
        match &self.instance {
            Instance::Pcg(p) => Some(p),
            _ => None,
        }
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn red_sets<I, S>(n: usize, sets: I) -> Pcg
where
    I: IntoIterator<Item = S>,
    S: IntoIterator<Item = usize>,
{
    Pcg::new(n, sets.into_iter().map(SignedEdge::red).collect()).expect("catalog edges are in range")
}

fn all_pairs(n: usize) -> Vec<[usize; 2]> {
    (1..=n).flat_map(|a| ((a + 1)..=n).map(move |b| [a, b])).collect()
}

fn triangle() -> Pcg {
    red_sets(3, [[2, 3], [1, 3], [1, 2]])
}

fn magic_m9() -> Pcg {
    red_sets(
        9,
        [[1, 2, 3], [4, 5, 6], [7, 8, 9], [1, 4, 7], [2, 5, 8], [3, 6, 9], [1, 5, 9], [3, 5, 7]],
    )
}

/// Row-major 4×4 grid: four rows, four columns, both diagonals.
fn magic_m16() -> Pcg {
    let mut sets: Vec<Vec<usize>> = (0..4).map(|k| (1..=4).map(|j| 4 * k + j).collect()).collect();
    sets.extend((1..=4).map(|l| vec![l, 4 + l, 8 + l, 12 + l]));
    sets.push(vec![1, 6, 11, 16]);
    sets.push(vec![4, 7, 10, 13]);
    red_sets(16, sets)
}

fn with_extra_red(pcg: Pcg, extra: &[usize]) -> Pcg {
    let mut edges = pcg.edges().to_vec();
    edges.push(SignedEdge::red(extra.iter().copied()));
    Pcg::new(pcg.n(), edges).expect("catalog edges are in range")
}

fn pcg_entry(id: &str, description: &str, pcg: Pcg, colorable: bool) -> CatalogEntry {
    let success = 1.0 / (pcg.edge_count() + 1) as f64;
    CatalogEntry {
        id: id.into(),
        params: BTreeMap::new(),
        description: description.into(),
        instance: Instance::Pcg(PcgInstance {
            pcg,
            alpha: real(1.0),
            b_terms: Vec::new(),
            basis: ProductBasis::X,
        }),
        expected: Expected { colorable: Some(colorable), success_probability: Some(success) },
    }
}

pub fn get(id: &str, params: &CatalogParams) -> Result<CatalogEntry> {
    let entry = match id {
        "minimal-triangle" => pcg_entry(
            id,
            "Three pair edges, all red: the minimal three-qubit pigeonhole state",
            triangle(),
            false,
        ),
        "minimal-psi" => {
            let a = params.alpha.unwrap_or(FRAC_1_SQRT_2);
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidInput(format!("minimal-psi needs 0 < alpha < 1, got {a}")));
            }
            let mut e = pcg_entry(
                id,
                "Minimal triangle state mixed with |111> at weight beta = sqrt(1 - alpha^2)",
                triangle(),
                false,
            );
            if let Instance::Pcg(p) = &mut e.instance {
                p.alpha = real(a);
                p.b_terms = vec![BTerm::new([1, 2, 3], real(1.0))];
            }
            e.expected.success_probability = Some(a * a / 4.0);
            e.params.insert("alpha".into(), a.to_string());
            e
        }
        "minimal-variant-y" => {
            let pcg = Pcg::new(3, vec![SignedEdge::green([2, 3]), SignedEdge::green([1, 3]), SignedEdge::green([1, 2])])
                .expect("in range");
            let mut e = pcg_entry(
                id,
                "All-plus triangle state: colorable in the X basis, but every Y pair product is -1 given a zero on the third qubit",
                pcg,
                true,
            );
            if let Instance::Pcg(p) = &mut e.instance {
                p.basis = ProductBasis::Y;
            }
            e
        }
        "loop" => {
            let n = params.n.unwrap_or(5);
            if !(3..=MAX_LOOP_N).contains(&n) {
                return Err(Error::InvalidInput(format!("loop needs 3 <= n <= {MAX_LOOP_N}, got {n}")));
            }
            let mut e = pcg_entry(
                id,
                "Cycle with red closing edge {1,n} and green edges {i,i+1}; success 1/(n+1)",
                loop_pcg(n)?,
                false,
            );
            e.params.insert("n".into(), n.to_string());
            e
        }
        "odd-loop-red" => {
            let n = params.n.unwrap_or(5);
            if n.is_multiple_of(2) || !(3..=MAX_LOOP_N).contains(&n) {
                return Err(Error::InvalidInput(format!(
                    "odd-loop-red needs odd 3 <= n <= {MAX_LOOP_N}, got {n}"
                )));
            }
            let pcg = red_sets(n, (1..=n).map(|i| [i, i % n + 1]));
            let mut e = pcg_entry(id, "Odd cycle with every pair edge red", pcg, false);
            e.params.insert("n".into(), n.to_string());
            e
        }
        "magic-m4" => pcg_entry(
            id,
            "2x2 binary magic square: all six pairs of four qubits red",
            red_sets(4, all_pairs(4)),
            false,
        ),
        "magic-m9" => pcg_entry(
            id,
            "3x3 binary magic square: rows, columns and diagonals red; classically satisfiable",
            magic_m9(),
            true,
        ),
        "magic-m9-tilde" => pcg_entry(
            id,
            "3x3 magic square plus the corner constraint {1,3,7,9}",
            with_extra_red(magic_m9(), &[1, 3, 7, 9]),
            false,
        ),
        "magic-m16" => pcg_entry(
            id,
            "4x4 binary magic square (row-major): rows, columns and diagonals red; satisfiable",
            magic_m16(),
            true,
        ),
        "magic-m16-tilde" => pcg_entry(
            id,
            "4x4 magic square plus the constraint {1,4,6,7,10,11,13,16}. The extra edge is the union of the two diagonals, so the antichain condition fails",
            with_extra_red(magic_m16(), &[1, 4, 6, 7, 10, 11, 13, 16]),
            false,
        ),
        "magic-m8" => pcg_entry(
            id,
            "Order-2 cube square: all 28 pairs of eight qubits red",
            red_sets(8, all_pairs(8)),
            false,
        ),
        "map-four-regions" => {
            let adjacency: Vec<(usize, usize)> = all_pairs(4).into_iter().map(|[a, b]| (a, b)).collect();
            pcg_entry(
                id,
                "Four mutually bordering regions; two colors are forced to suffice",
                from_adjacency_map(4, &adjacency)?,
                false,
            )
        }
        "qudit" => {
            let d = params.d.unwrap_or(3);
            if !(2..=crate::state::MAX_QUDIT_FAMILY_DIM).contains(&d) {
                return Err(Error::ResourceLimit(format!("qudit family needs 2 <= d <= 7, got {d}")));
            }
            let mut p = BTreeMap::new();
            p.insert("d".into(), d.to_string());
            CatalogEntry {
                id: id.into(),
                params: p,
                description: "(d+1) qudits: each d-site shift product is omega given a zero on the remaining site".into(),
                instance: Instance::Qudit { d },
                expected: Expected {
                    colorable: Some(false),
                    success_probability: Some(1.0 / (1 + (d - 1) * (d + 1)) as f64),
                },
            }
        }
        "pps-appendix-e" => {
            let h = FRAC_1_SQRT_2;
            let plus = vec![real(h), real(h)];
            let minus = vec![real(h), real(-h)];
            let pre = SparseState::product(2, &[plus.clone(), minus, plus])?;
            let post = SparseState::basis(2, &[0, 1, 0])?;
            let yy = |a, b| PauliWord::on_sites(3, Pauli::Y, &[a, b]).expect("sites in range");
            CatalogEntry {
                id: id.into(),
                params: BTreeMap::new(),
                description: "Pre-selected |+>|->|+>, post-selected |0>|1>|0>, with three pair projectors".into(),
                instance: Instance::PrePost(PrePostFixture {
                    pre,
                    post,
                    checks: vec![(yy(1, 2), 1), (yy(1, 3), -1), (yy(2, 3), -1)],
                }),
                expected: Expected::default(),
            }
        }
        other => return Err(Error::NotFound(format!("no catalog entry {other:?}"))),
    };
    Ok(entry)
}
