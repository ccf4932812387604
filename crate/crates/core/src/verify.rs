//! End-to-end certification of a pigeonhole paradox instance.
//!
//! A certificate combines three independent channels: the GF(2) rank test,
//! an exhaustive census of classical colorings, and exact simulation of the
//! conditional certainties and the success event.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pcg::{Coloring, Pcg, SignedEdge, DEFAULT_COLORING_CAP};
use crate::state::{
    build_qudit_family, build_state, root_of_unity, success_formula_applies, success_sites, BTerm,
    ProductBasis, SparseState, DEFAULT_TOLERANCE,
};

/// Table rows are re-derived by simulation up to this loop size.
pub const TABLE_SIMULATION_MAX_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BTermRecord {
    pub vertices: Vec<usize>,
    pub lambda: ComplexValue,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceRecord {
    pub digest: String,
    pub n: usize,
    pub edges: Vec<SignedEdge>,
    pub alpha: ComplexValue,
    pub b_terms: Vec<BTermRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LhvCensus {
    Complete { total: u64, satisfying: u64 },
    Skipped { n: usize, cap: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyCheck {
    pub edge: usize,
    pub vertices: Vec<usize>,
    /// Required eigenvalue `-θ` of the product of X over the edge.
    pub required_eigenvalue: i8,
    /// Probability of the conditioning event `Z = +1` on the edge complement.
    pub condition_probability: f64,
    /// `P(prod X = -θ | condition)`.
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuccessRecord {
    pub sites: Vec<usize>,
    pub simulated: f64,
    /// `|α|²/(p+1)`.
    pub formula: f64,
    pub formula_applicable: bool,
    /// False only when the formula applies and disagrees with simulation.
    pub formula_agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NoParadoxReason {
    Colorable,
    HardyCheckFailed { edge: usize },
    ZeroSuccessProbability,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Paradox,
    NoParadox(NoParadoxReason),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParadoxCertificate {
    pub instance: InstanceRecord,
    pub rank_a: usize,
    pub rank_b: usize,
    pub colorable: bool,
    pub witness: Option<Coloring>,
    pub lhv_census: LhvCensus,
    pub hardy_checks: Vec<HardyCheck>,
    pub success: SuccessRecord,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl ParadoxCertificate {
    pub fn is_paradox(&self) -> bool {
        self.verdict == Verdict::Paradox
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verifier {
    pub lhv_cap: usize,
    pub tolerance: f64,
}

impl Default for Verifier {
    fn default() -> Self {
        Self {
            lhv_cap: DEFAULT_COLORING_CAP,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// [`Verifier::verify`] with the default tolerance.
pub fn verify(pcg: &Pcg, alpha: Complex64, b_terms: &[BTerm], lhv_cap: usize) -> Result<ParadoxCertificate> {
    Verifier { lhv_cap, ..Verifier::default() }.verify(pcg, alpha, b_terms)
}

impl Verifier {
    pub fn verify(&self, pcg: &Pcg, alpha: Complex64, b_terms: &[BTerm]) -> Result<ParadoxCertificate> {
        let tol = self.tolerance;
        let state = build_state(pcg, alpha, b_terms)?;
        let decision = pcg.is_colorable()?;
        let (rank_a, rank_b) = decision.ranks();

        let lhv_census = if pcg.n() <= self.lhv_cap {
            let census = pcg.brute_force_colorings(self.lhv_cap)?;
            if (rank_a != rank_b) != (census.satisfying_count == 0) {
                return Err(Error::CrossCheck(format!(
                    "ranks ({rank_a}, {rank_b}) disagree with {} satisfying colorings for {pcg}",
                    census.satisfying_count
                )));
            }
            LhvCensus::Complete {
                total: census.total_assignments,
                satisfying: census.satisfying_count,
            }
        } else {
            LhvCensus::Skipped { n: pcg.n(), cap: self.lhv_cap }
        };
        if let Some(w) = decision.witness() {
            if !w.satisfies(pcg) {
                return Err(Error::CrossCheck(format!("witness {w} fails a constraint of {pcg}")));
            }
        }

        let hardy_checks = hardy_checks(pcg, &state)?;

        let sites = success_sites(pcg);
        let simulated = state.joint_z_probability(&sites, 0)?;
        let formula = alpha.norm_sqr() / (pcg.edge_count() + 1) as f64;
        let formula_applicable = success_formula_applies(pcg, b_terms);
        let success = SuccessRecord {
            formula_agrees: !formula_applicable || (simulated - formula).abs() <= tol,
            sites,
            simulated,
            formula,
            formula_applicable,
        };

        let verdict = if rank_a == rank_b {
            Verdict::NoParadox(NoParadoxReason::Colorable)
        } else if let Some(bad) = hardy_checks.iter().find(|c| (c.probability - 1.0).abs() > tol) {
            Verdict::NoParadox(NoParadoxReason::HardyCheckFailed { edge: bad.edge })
        } else if success.simulated <= tol {
            Verdict::NoParadox(NoParadoxReason::ZeroSuccessProbability)
        } else {
            Verdict::Paradox
        };

        Ok(ParadoxCertificate {
            instance: InstanceRecord {
                digest: pcg.digest(),
                n: pcg.n(),
                edges: pcg.edges().to_vec(),
                alpha: alpha.into(),
                b_terms: b_terms
                    .iter()
                    .map(|t| BTermRecord { vertices: t.vertices.clone(), lambda: t.lambda.into() })
                    .collect(),
            },
            rank_a,
            rank_b,
            colorable: decision.is_colorable(),
            witness: decision.witness().cloned(),
            lhv_census,
            hardy_checks,
            success,
            tolerance: tol,
            verdict,
        })
    }
}

/// Conditions the complement of each edge on `Z = +1` and records the
/// probability that the edge's X product equals `-θ`.
pub fn hardy_checks(pcg: &Pcg, state: &SparseState) -> Result<Vec<HardyCheck>> {
    if state.n() != pcg.n() || state.d() != 2 {
        return Err(Error::InvalidInput(format!(
            "state has n = {}, d = {}; the PCG needs n = {} qubits",
            state.n(),
            state.d(),
            pcg.n()
        )));
    }
    pcg.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let condition: Vec<(usize, u8)> =
                (1..=pcg.n()).filter(|v| !e.contains(*v)).map(|v| (v, 0)).collect();
            let projection = state.project_z(&condition)?;
            let required = -e.theta().value();
            let probability = match &projection.state {
                Some(post) => post
                    .product_distribution(e.vertices(), ProductBasis::X)?
                    .probability_of_sign(required),
                None => 0.0,
            };
            Ok(HardyCheck {
                edge: i,
                vertices: e.vertices().to_vec(),
                required_eigenvalue: required,
                condition_probability: projection.probability,
                probability,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuccessRow {
    pub n: usize,
    /// Loop-PCG state, `1/(n+1)`.
    pub p_loop: f64,
    /// Generalized Hardy paradox, `1/2^(n-1)`.
    pub p_generalized: f64,
    /// Standard Hardy paradox, `(1 + cos(π/(n-1)))/2^n`.
    pub p_standard: f64,
    /// `p_loop` recomputed from the simulated loop state.
    pub p_loop_simulated: Option<f64>,
}

/// Closed-form success probabilities for `n = 3..=max_n`; the loop column is
/// re-simulated for `n <= 12` when `simulate` is set.
pub fn success_table(max_n: usize, simulate: bool) -> Result<Vec<SuccessRow>> {
    if max_n < 3 {
        return Err(Error::InvalidInput(format!("table needs max_n >= 3, got {max_n}")));
    }
    (3..=max_n)
        .map(|n| {
            let nf = n as f64;
            let p_loop = 1.0 / (nf + 1.0);
            let p_loop_simulated = if simulate && n <= TABLE_SIMULATION_MAX_N {
                let pcg = loop_pcg(n)?;
                let state = build_state(&pcg, Complex64::new(1.0, 0.0), &[])?;
                let sim = state.joint_z_probability(&success_sites(&pcg), 0)?;
                if (sim - p_loop).abs() > DEFAULT_TOLERANCE {
                    return Err(Error::CrossCheck(format!(
                        "loop n={n}: simulated {sim} vs closed form {p_loop}"
                    )));
                }
                Some(sim)
            } else {
                None
            };
            Ok(SuccessRow {
                n,
                p_loop,
                p_generalized: 1.0 / 2f64.powi(n as i32 - 1),
                p_standard: (1.0 + (std::f64::consts::PI / (nf - 1.0)).cos()) / 2f64.powi(n as i32),
                p_loop_simulated,
            })
        })
        .collect()
}

/// The loop PCG: red edge `{1,n}` first, then green edges `{i,i+1}`.
pub fn loop_pcg(n: usize) -> Result<Pcg> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("loop needs n >= 3, got {n}")));
    }
    let mut edges = vec![SignedEdge::red([1, n])];
    edges.extend((1..n).map(|i| SignedEdge::green([i, i + 1])));
    Pcg::new(n, edges)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuditConstraint {
    /// Site conditioned on `Z = 1` (digit 0).
    pub condition_site: usize,
    pub sites: Vec<usize>,
    /// Required eigenvalue is `ω^required_power`.
    pub required_power: usize,
    pub condition_probability: f64,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuditCertificate {
    pub d: usize,
    pub n: usize,
    pub constraints: Vec<QuditConstraint>,
    pub joint_probability: f64,
    /// `1/(1 + (d-1)(d+1))`.
    pub joint_formula: f64,
    pub census_total: u64,
    pub census_satisfying: u64,
    pub paradox: bool,
}

/// Certifies the `(d+1)`-qudit pigeonhole family: each `d`-site shift
/// product is `ω` with certainty given a zero on the remaining site, while no
/// classical assignment of `ω`-powers satisfies all `d+1` constraints.
pub fn verify_qudit_family(d: usize) -> Result<QuditCertificate> {
    let state = build_qudit_family(d)?;
    let n = d + 1;
    let mut constraints = Vec::with_capacity(n);
    for z in 1..=n {
        let sites: Vec<usize> = (1..=n).filter(|&s| s != z).collect();
        let projection = state.project_z(&[(z, 0)])?;
        let post = projection
            .state
            .ok_or_else(|| Error::CrossCheck(format!("conditioning on site {z} has probability zero")))?;
        let dist = post.product_distribution(&sites, ProductBasis::X)?;
        constraints.push(QuditConstraint {
            condition_site: z,
            sites,
            required_power: 1,
            condition_probability: projection.probability,
            probability: dist.probability_of_power(1),
        });
    }
    let all: Vec<usize> = (1..=n).collect();
    let joint_probability = state.joint_z_probability(&all, 0)?;
    let joint_formula = 1.0 / (1 + (d - 1) * (d + 1)) as f64;

    // Exponents e_k in Z_d; constraint z reads sum_{k != z} e_k = 1 (mod d).
    let total = (d as u64).pow(n as u32);
    let mut satisfying = 0u64;
    let mut exps = vec![0usize; n];
    for _ in 0..total {
        let sum: usize = exps.iter().sum();
        if exps.iter().all(|&e| (sum + d - e) % d == 1 % d) {
            satisfying += 1;
        }
        for e in exps.iter_mut() {
            *e += 1;
            if *e < d {
                break;
            }
            *e = 0;
        }
    }

    let tol = DEFAULT_TOLERANCE;
    let paradox = constraints.iter().all(|c| (c.probability - 1.0).abs() <= tol)
        && joint_probability > tol
        && satisfying == 0;
    Ok(QuditCertificate {
        d,
        n,
        constraints,
        joint_probability,
        joint_formula,
        census_total: total,
        census_satisfying: satisfying,
        paradox,
    })
}

/// Product of the `d+1` certified eigenvalues, `ω^(d+1)`.
pub fn qudit_certified_product(d: usize) -> Complex64 {
    root_of_unity(d).powi(d as i32 + 1)
}
