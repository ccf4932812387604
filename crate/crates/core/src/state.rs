//! Exact sparse simulation of PCG states and the qudit pigeonhole family.
//!
//! States are maps from basis strings (one digit per site, site 1 first) to
//! complex amplitudes. Digit 0 is the Z eigenvalue +1. The shift operator
//! acts as `X|k> = |k-1 mod d>`, so for qubits it is the ordinary Pauli X.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcg::Pcg;

/// Amplitudes below this magnitude are dropped.
pub const PRUNE_EPS: f64 = 1e-15;

/// Default comparison tolerance for probabilities.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub const MAX_QUDIT_FAMILY_DIM: usize = 7;

pub type BasisKey = Vec<u8>;

#[derive(Clone, PartialEq)]
pub struct SparseState {
    n: usize,
    d: usize,
    amps: BTreeMap<BasisKey, Complex64>,
}

impl SparseState {
    /// Sums the given terms (repeated keys accumulate) and prunes near-zero
    /// amplitudes. No normalization is applied.
    pub fn from_terms<I>(n: usize, d: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisKey, Complex64)>,
    {
        if d < 2 || d > u8::MAX as usize {
            return Err(Error::InvalidInput(format!("local dimension must be in 2..=255, got {d}")));
        }
        let mut amps: BTreeMap<BasisKey, Complex64> = BTreeMap::new();
        for (key, amp) in terms {
            if key.len() != n {
                return Err(Error::InvalidInput(format!(
                    "basis string has {} digits, state has {n} sites",
                    key.len()
                )));
            }
            if let Some(&bad) = key.iter().find(|&&k| k as usize >= d) {
                return Err(Error::InvalidInput(format!("digit {bad} out of range for d = {d}")));
            }
            *amps.entry(key).or_default() += amp;
        }
        amps.retain(|_, a| a.norm() >= PRUNE_EPS);
        Ok(Self { n, d, amps })
    }

    /// Single computational basis state.
    pub fn basis(d: usize, digits: &[u8]) -> Result<Self> {
        Self::from_terms(digits.len(), d, [(digits.to_vec(), Complex64::new(1.0, 0.0))])
    }

    /// Tensor product of single-site states, each given as `d` amplitudes.
    pub fn product(d: usize, sites: &[Vec<Complex64>]) -> Result<Self> {
        if let Some(bad) = sites.iter().position(|s| s.len() != d) {
            return Err(Error::InvalidInput(format!("site {} needs {d} amplitudes", bad + 1)));
        }
        let mut terms: Vec<(BasisKey, Complex64)> = vec![(Vec::new(), Complex64::new(1.0, 0.0))];
        for site in sites {
            terms = terms
                .into_iter()
                .flat_map(|(key, amp)| {
                    site.iter().enumerate().map(move |(k, &a)| {
                        let mut next = key.clone();
                        next.push(k as u8);
                        (next, amp * a)
                    })
                })
                .collect();
        }
        Self::from_terms(sites.len(), d, terms)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, key: &[u8]) -> Complex64 {
        self.amps.get(key).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisKey, &Complex64)> {
        self.amps.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(Complex64::norm_sqr).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm < PRUNE_EPS {
            return Err(Error::InvalidInput("cannot normalize the zero state".into()));
        }
        Self::from_terms(self.n, self.d, self.amps.iter().map(|(k, a)| (k.clone(), a / norm)))
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_shape(other)?;
        Ok(self
            .amps
            .iter()
            .map(|(k, a)| a.conj() * other.amplitude(k))
            .sum())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::InvalidInput(format!(
                "state shapes differ: (n={}, d={}) vs (n={}, d={})",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }

    fn check_site(&self, site: usize) -> Result<usize> {
        if site == 0 || site > self.n {
            return Err(Error::InvalidInput(format!("site {site} outside 1..={}", self.n)));
        }
        Ok(site - 1)
    }

    fn check_sites(&self, sites: &[usize]) -> Result<Vec<usize>> {
        let mut seen = BTreeSet::new();
        sites
            .iter()
            .map(|&s| {
                let i = self.check_site(s)?;
                if !seen.insert(i) {
                    return Err(Error::InvalidInput(format!("site {s} listed twice")));
                }
                Ok(i)
            })
            .collect()
    }

    /// Conditions on Z outcomes (`site -> digit`, sites 1-based).
    pub fn project_z(&self, assignment: &[(usize, u8)]) -> Result<Projection> {
        let sites: Vec<usize> = assignment.iter().map(|&(s, _)| s).collect();
        let idx = self.check_sites(&sites)?;
        if let Some(&(s, digit)) = assignment.iter().find(|&&(_, k)| k as usize >= self.d) {
            return Err(Error::InvalidInput(format!("digit {digit} at site {s} out of range for d = {}", self.d)));
        }
        let matches = |key: &BasisKey| idx.iter().zip(assignment).all(|(&i, &(_, k))| key[i] == k);
        let kept: Vec<(BasisKey, Complex64)> = self
            .amps
            .iter()
            .filter(|(k, _)| matches(k))
            .map(|(k, a)| (k.clone(), *a))
            .collect();
        let weight: f64 = kept.iter().map(|(_, a)| a.norm_sqr()).sum();
        let total = self.norm_sqr();
        let probability = if total > 0.0 { weight / total } else { 0.0 };
        let state = if weight > 0.0 {
            let norm = weight.sqrt();
            Some(Self::from_terms(self.n, self.d, kept.into_iter().map(|(k, a)| (k, a / norm)))?)
        } else {
            None
        };
        Ok(Projection { probability, state })
    }

    /// Probability that every listed site reads `digit` in the Z basis.
    pub fn joint_z_probability(&self, sites: &[usize], digit: u8) -> Result<f64> {
        let assignment: Vec<(usize, u8)> = sites.iter().map(|&s| (s, digit)).collect();
        Ok(self.project_z(&assignment)?.probability)
    }

    /// Exact outcome distribution of the product of shift operators (or Y
    /// operators, qubits only) over `sites`.
    pub fn product_distribution(&self, sites: &[usize], basis: ProductBasis) -> Result<ProductDistribution> {
        if sites.is_empty() {
            return Err(Error::InvalidInput("product observable needs at least one site".into()));
        }
        let idx = self.check_sites(sites)?;
        if basis == ProductBasis::Y && self.d != 2 {
            return Err(Error::Unsupported(format!("Y products need qubits, state has d = {}", self.d)));
        }
        let total = self.norm_sqr();
        if total < PRUNE_EPS {
            return Err(Error::InvalidInput("distribution of the zero state".into()));
        }
        // Y = S X S^dagger with S = diag(1, i): rotate by S^dagger, then measure X.
        let rotated;
        let state = match basis {
            ProductBasis::X => self,
            ProductBasis::Y => {
                let minus_i = Complex64::new(0.0, -1.0);
                rotated = Self::from_terms(
                    self.n,
                    self.d,
                    self.amps.iter().map(|(k, a)| {
                        let ones = idx.iter().filter(|&&i| k[i] == 1).count() as i32;
                        (k.clone(), a * minus_i.powi(ones))
                    }),
                )?;
                &rotated
            }
        };
        let d = self.d;
        let omega = root_of_unity(d);
        // <psi| O^m |psi> with (O^m psi)[k] = psi[k + m] on the listed sites.
        let moments: Vec<Complex64> = (0..d)
            .map(|m| {
                state
                    .amps
                    .iter()
                    .map(|(k, a)| {
                        let mut shifted = k.clone();
                        for &i in &idx {
                            shifted[i] = ((shifted[i] as usize + d - m) % d) as u8;
                        }
                        state.amplitude(&shifted).conj() * a
                    })
                    .sum::<Complex64>()
                    / total
            })
            .collect();
        let probabilities = (0..d)
            .map(|j| {
                let p: Complex64 = moments
                    .iter()
                    .enumerate()
                    .map(|(m, mom)| omega.powi(-((j * m) as i32)) * mom)
                    .sum::<Complex64>()
                    / d as f64;
                p.re.max(0.0)
            })
            .collect();
        Ok(ProductDistribution { d, probabilities })
    }

    /// Applies a Pauli word (qubits only).
    pub fn apply_pauli(&self, word: &PauliWord) -> Result<Self> {
        if self.d != 2 {
            return Err(Error::Unsupported("Pauli words act on qubits only".into()));
        }
        if word.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "Pauli word has {} letters, state has {} sites",
                word.len(),
                self.n
            )));
        }
        let i = Complex64::new(0.0, 1.0);
        let phase = word.phase.value();
        Self::from_terms(
            self.n,
            2,
            self.amps.iter().map(|(k, a)| {
                let mut out = k.clone();
                let mut amp = a * phase;
                for (slot, letter) in out.iter_mut().zip(&word.letters) {
                    let bit = *slot;
                    match letter {
                        Pauli::I => {}
                        Pauli::X => *slot ^= 1,
                        Pauli::Y => {
                            *slot ^= 1;
                            amp *= if bit == 0 { i } else { -i };
                        }
                        Pauli::Z => {
                            if bit == 1 {
                                amp = -amp;
                            }
                        }
                    }
                }
                (out, amp)
            }),
        )
    }
}

impl fmt::Debug for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseState(n={}, d={}) {self}", self.n, self.d)
    }
}

impl fmt::Display for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in &self.amps {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let digits: String = k.iter().map(|d| char::from(b'0' + *d)).collect();
            write!(f, "({:.6}{:+.6}i)|{digits}>", a.re, a.im)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `e^{2πi/d}`.
pub fn root_of_unity(d: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / d as f64)
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub probability: f64,
    /// Renormalized post-measurement state; `None` when the outcome has
    /// probability zero.
    pub state: Option<SparseState>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductBasis {
    X,
    Y,
}

impl FromStr for ProductBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" | "X" => Ok(ProductBasis::X),
            "y" | "Y" => Ok(ProductBasis::Y),
            other => Err(Error::InvalidInput(format!("unknown product basis {other:?}"))),
        }
    }
}

/// Distribution over the eigenvalues `ω^j`, `j = 0..d`. For qubits index 0
/// is the eigenvalue +1 and index 1 is -1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductDistribution {
    pub d: usize,
    pub probabilities: Vec<f64>,
}

impl ProductDistribution {
    pub fn eigenvalue(&self, power: usize) -> Complex64 {
        root_of_unity(self.d).powi(power as i32)
    }

    pub fn probability_of_power(&self, power: usize) -> f64 {
        self.probabilities[power % self.d]
    }

    /// Qubit helper: probability of eigenvalue `+1` or `-1`.
    pub fn probability_of_sign(&self, sign: i8) -> f64 {
        assert_eq!(self.d, 2, "sign lookup is for qubit distributions");
        self.probabilities[usize::from(sign < 0)]
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// A `B` component term: all ones on `vertices`, coefficient `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BTerm {
    pub vertices: Vec<usize>,
    pub lambda: Complex64,
}

impl BTerm {
    pub fn new<I: IntoIterator<Item = usize>>(vertices: I, lambda: Complex64) -> Self {
        let set: BTreeSet<usize> = vertices.into_iter().collect();
        Self {
            vertices: set.into_iter().collect(),
            lambda,
        }
    }

    pub fn mask(&self) -> u64 {
        self.vertices.iter().fold(0, |m, &v| m | 1 << (v - 1))
    }
}

fn ones_key(n: usize, mask: u64) -> BasisKey {
    (0..n).map(|i| (mask >> i & 1) as u8).collect()
}

/// `α|A> + β|B>` with `|A>` the PCG state and `|B> = Σ λ_s |1>_{T_s}`.
/// `β = sqrt(1 - |α|²)` is taken real and non-negative.
pub fn build_state(pcg: &Pcg, alpha: Complex64, b_terms: &[BTerm]) -> Result<SparseState> {
    pcg.ensure_valid()?;
    build_state_unvalidated(pcg, alpha, b_terms)
}

/// Same amplitudes as [`build_state`] without the structural PCG checks
/// (size bound, antichain, connectivity). The coefficient and B-term
/// conditions are still enforced. Conditional certainties are not
/// guaranteed for such states.
pub fn build_state_unvalidated(pcg: &Pcg, alpha: Complex64, b_terms: &[BTerm]) -> Result<SparseState> {
    let tol = DEFAULT_TOLERANCE;
    let a2 = alpha.norm_sqr();
    if alpha.norm() < PRUNE_EPS {
        return Err(Error::InvalidInput("alpha must be nonzero".into()));
    }
    if a2 > 1.0 + tol {
        return Err(Error::InvalidInput(format!("|alpha| = {} exceeds 1", alpha.norm())));
    }
    if b_terms.is_empty() {
        if (a2 - 1.0).abs() > tol {
            return Err(Error::InvalidInput(format!(
                "|alpha| = {} < 1 requires at least one B-term",
                alpha.norm()
            )));
        }
    } else {
        let lam: f64 = b_terms.iter().map(|t| t.lambda.norm_sqr()).sum();
        if (lam - 1.0).abs() > tol {
            return Err(Error::InvalidInput(format!("B-term coefficients have squared norm {lam}, need 1")));
        }
        let mut seen = BTreeSet::new();
        for (s, t) in b_terms.iter().enumerate() {
            if t.vertices.is_empty() || t.vertices.iter().any(|&v| v == 0 || v > pcg.n()) {
                return Err(Error::InvalidInput(format!("B-term {s} has vertices outside 1..={}", pcg.n())));
            }
            if !seen.insert(t.mask()) {
                return Err(Error::InvalidInput(format!("B-term {s} repeats an earlier support")));
            }
        }
        for (r, e) in pcg.edges().iter().enumerate() {
            let complement = pcg.full_mask() & !e.mask();
            if let Some(s) = b_terms.iter().position(|t| t.mask() & complement == 0) {
                return Err(Error::BTermSupport { edge: r, term: s });
            }
        }
    }

    let n = pcg.n();
    let scale = 1.0 / ((pcg.edge_count() + 1) as f64).sqrt();
    let beta = (1.0 - a2).max(0.0).sqrt();
    let mut terms = vec![(vec![0u8; n], alpha * scale)];
    for e in pcg.edges() {
        terms.push((ones_key(n, e.mask()), -alpha * f64::from(e.theta().value()) * scale));
    }
    for t in b_terms {
        terms.push((ones_key(n, t.mask()), t.lambda * beta));
    }
    SparseState::from_terms(n, 2, terms)
}

/// Whether `P(Z = +1 on ∪ S̄_i) = |α|²/(p+1)` holds structurally: no edge
/// and no B-term support may lie inside `∩ S_i`, so only `|0…0>` survives.
pub fn success_formula_applies(pcg: &Pcg, b_terms: &[BTerm]) -> bool {
    let core = pcg.edges().iter().fold(pcg.full_mask(), |m, e| m & e.mask());
    pcg.edges().iter().all(|e| e.mask() & !core != 0) && b_terms.iter().all(|t| t.mask() & !core != 0)
}

/// Sites measured in the success event: the union of edge complements.
pub fn success_sites(pcg: &Pcg) -> Vec<usize> {
    let union = pcg.edges().iter().fold(0u64, |m, e| m | (pcg.full_mask() & !e.mask()));
    (1..=pcg.n()).filter(|v| union >> (v - 1) & 1 == 1).collect()
}

/// The `(d+1)`-qudit pigeonhole state: `|0…0>` plus, for each `c = 1..d`
/// and each site `z`, `ω^c` on the string with digit `c` everywhere except a
/// zero at `z`. All terms share the magnitude `1/sqrt(1 + (d-1)(d+1))`.
pub fn build_qudit_family(d: usize) -> Result<SparseState> {
    if !(2..=MAX_QUDIT_FAMILY_DIM).contains(&d) {
        return Err(Error::ResourceLimit(format!(
            "qudit family dimension must be in 2..={MAX_QUDIT_FAMILY_DIM}, got {d}"
        )));
    }
    let n = d + 1;
    let omega = root_of_unity(d);
    let scale = 1.0 / ((1 + (d - 1) * (d + 1)) as f64).sqrt();
    let mut terms = vec![(vec![0u8; n], Complex64::new(scale, 0.0))];
    for c in 1..d {
        for zero in 0..n {
            let key = (0..n).map(|i| if i == zero { 0 } else { c as u8 }).collect();
            terms.push((key, omega.powi(c as i32) * scale));
        }
    }
    SparseState::from_terms(n, d, terms)
}

/// `<post| (I + sign·word)/2 |pre>`.
pub fn pps_amplitude(pre: &SparseState, post: &SparseState, word: &PauliWord, sign: i8) -> Result<Complex64> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidInput(format!("projector sign must be +1 or -1, got {sign}")));
    }
    pre.check_same_shape(post)?;
    if pre.d != 2 {
        return Err(Error::Unsupported("pre/post-selection amplitudes are defined for qubits".into()));
    }
    let direct = post.inner(pre)?;
    let through = post.inner(&pre.apply_pauli(word)?)?;
    Ok((direct + f64::from(sign) * through) / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    PlusOne,
    MinusOne,
    PlusI,
    MinusI,
}

impl Phase {
    pub fn value(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

/// A qubit Pauli string with a global phase, e.g. `-iXYZ` or `YYI`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliWord {
    pub phase: Phase,
    pub letters: Vec<Pauli>,
}

impl PauliWord {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { phase: Phase::PlusOne, letters }
    }

    /// Identity on `n` sites except `letter` at each of the 1-based `sites`.
    pub fn on_sites(n: usize, letter: Pauli, sites: &[usize]) -> Result<Self> {
        let mut letters = vec![Pauli::I; n];
        for &s in sites {
            if s == 0 || s > n {
                return Err(Error::InvalidInput(format!("site {s} outside 1..={n}")));
            }
            letters[s - 1] = letter;
        }
        Ok(Self::new(letters))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (Phase::PlusI, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (Phase::MinusI, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MinusOne, r)
        } else {
            (Phase::PlusOne, s.strip_prefix('+').unwrap_or(s))
        };
        let letters = rest
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidInput(format!("bad Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { phase, letters })
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.phase {
            Phase::PlusOne => "",
            Phase::MinusOne => "-",
            Phase::PlusI => "+i",
            Phase::MinusI => "-i",
        })?;
        for l in &self.letters {
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}
