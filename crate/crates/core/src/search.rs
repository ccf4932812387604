//! Exhaustive enumeration of small PCGs up to vertex relabeling.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pcg::{Irreducibility, Pcg, Sign, SignedEdge, DEFAULT_COLORING_CAP};

pub const MAX_ENUMERATION_VERTICES: usize = 6;
pub const MAX_ENUMERATION_EDGES: usize = 12;
/// Brute-force canonicalization enumerates `n!` relabelings.
pub const MAX_CANONICAL_VERTICES: usize = 8;

/// Lexicographically least sorted `(vertex mask, Θ bit)` list over all
/// vertex relabelings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CanonicalForm {
    pub n: usize,
    pub edges: Vec<(u64, bool)>,
}

impl CanonicalForm {
    pub fn of(pcg: &Pcg) -> Result<Self> {
        if pcg.n() > MAX_CANONICAL_VERTICES {
            return Err(Error::ResourceLimit(format!(
                "canonical form is brute force over n! relabelings, n = {} exceeds {MAX_CANONICAL_VERTICES}",
                pcg.n()
            )));
        }
        let edges: Vec<(u64, bool)> = pcg.edges().iter().map(|e| (e.mask(), e.theta().parity_bit())).collect();
        Ok(Self { n: pcg.n(), edges: canonical_edges(pcg.n(), &edges) })
    }

    pub fn to_pcg(&self) -> Pcg {
        let edges = self
            .edges
            .iter()
            .map(|&(mask, red)| {
                let vs = (0..self.n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1);
                SignedEdge::new(vs, if red { Sign::Plus } else { Sign::Minus })
            })
            .collect();
        Pcg::new(self.n, edges).expect("canonical forms hold in-range edges")
    }
}

fn permute_mask(mask: u64, perm: &[usize]) -> u64 {
    perm.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .fold(0, |m, (_, &to)| m | 1 << to)
}

fn canonical_edges(n: usize, edges: &[(u64, bool)]) -> Vec<(u64, bool)> {
    (0..n)
        .permutations(n)
        .map(|perm| {
            let mut relabeled: Vec<(u64, bool)> =
                edges.iter().map(|&(m, s)| (permute_mask(m, &perm), s)).collect();
            relabeled.sort_unstable();
            relabeled
        })
        .min()
        .unwrap_or_default()
}

/// Every valid PCG on `n` vertices with `1..=max_edges` edges whose sizes lie
/// in `sizes`, once per isomorphism class, in canonical-form order.
pub fn enumerate(n: usize, max_edges: usize, sizes: RangeInclusive<usize>) -> Result<Vec<Pcg>> {
    enumerate_with(n, max_edges, sizes, true)
}

pub fn enumerate_with(n: usize, max_edges: usize, sizes: RangeInclusive<usize>, parallel: bool) -> Result<Vec<Pcg>> {
    Ok(enumerate_forms(n, max_edges, sizes, parallel)?.iter().map(CanonicalForm::to_pcg).collect())
}

fn enumerate_forms(
    n: usize,
    max_edges: usize,
    sizes: RangeInclusive<usize>,
    parallel: bool,
) -> Result<BTreeSet<CanonicalForm>> {
    if n == 0 || n > MAX_ENUMERATION_VERTICES {
        return Err(Error::ResourceLimit(format!(
            "enumeration supports 1 <= n <= {MAX_ENUMERATION_VERTICES}, got {n}"
        )));
    }
    if max_edges > MAX_ENUMERATION_EDGES {
        return Err(Error::ResourceLimit(format!(
            "enumeration supports at most {MAX_ENUMERATION_EDGES} edges, got {max_edges}"
        )));
    }
    let candidates: Vec<u64> = (1u64..(1 << n))
        .filter(|m| {
            let k = m.count_ones() as usize;
            k < n && sizes.contains(&k)
        })
        .collect();

    // Unsigned shapes first, deduplicated; signings are canonicalized afterwards.
    let mut shapes = BTreeSet::new();
    let mut stack = Vec::new();
    collect_antichains(n, &candidates, 0, max_edges, &mut stack, &mut shapes);

    let shapes: Vec<Vec<u64>> = shapes.into_iter().collect();
    let sign_forms = |shape: &Vec<u64>| -> BTreeSet<CanonicalForm> {
        let p = shape.len();
        (0u32..(1 << p))
            .map(|signs| {
                let edges: Vec<(u64, bool)> =
                    shape.iter().enumerate().map(|(i, &m)| (m, signs >> i & 1 == 1)).collect();
                CanonicalForm { n, edges: canonical_edges(n, &edges) }
            })
            .collect()
    };
    let out = if parallel {
        shapes.par_iter().map(sign_forms).reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        })
    } else {
        shapes.iter().flat_map(sign_forms).collect()
    };
    Ok(out)
}

/// Depth-first antichains over `candidates[start..]`; connected, covering
/// ones are inserted by canonical unsigned shape.
fn collect_antichains(
    n: usize,
    candidates: &[u64],
    start: usize,
    max_edges: usize,
    stack: &mut Vec<u64>,
    out: &mut BTreeSet<Vec<u64>>,
) {
    if !stack.is_empty() && is_connected_cover(n, stack) {
        let unsigned: Vec<(u64, bool)> = stack.iter().map(|&m| (m, false)).collect();
        out.insert(canonical_edges(n, &unsigned).into_iter().map(|(m, _)| m).collect());
    }
    if stack.len() == max_edges {
        return;
    }
    for i in start..candidates.len() {
        let m = candidates[i];
        if stack.iter().all(|&s| s & !m != 0 && m & !s != 0) {
            stack.push(m);
            collect_antichains(n, candidates, i + 1, max_edges, stack, out);
            stack.pop();
        }
    }
}

fn is_connected_cover(n: usize, edges: &[u64]) -> bool {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut reached = edges[0];
    loop {
        let next = edges.iter().filter(|&&e| e & reached != 0).fold(reached, |r, &e| r | e);
        if next == reached {
            break;
        }
        reached = next;
    }
    reached == full
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceClass {
    pub form: CanonicalForm,
    pub colorable: bool,
    pub irreducible: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Census {
    pub total: usize,
    pub colorable: usize,
    pub uncolorable: usize,
    pub irreducible: usize,
    /// One canonical form per irreducible un-colorable class, in order.
    pub representatives: Vec<CanonicalForm>,
    pub instances: Vec<InstanceClass>,
}

/// Classifies each instance by the rank criterion, cross-checked against
/// exhaustive colorings.
pub fn classify<'a, I: IntoIterator<Item = &'a Pcg>>(pcgs: I) -> Result<Census> {
    let mut census = Census::default();
    for pcg in pcgs {
        let decision = pcg.is_colorable()?;
        let brute = pcg.brute_force_colorings(DEFAULT_COLORING_CAP)?;
        if decision.is_colorable() != (brute.satisfying_count > 0) {
            return Err(Error::CrossCheck(format!(
                "rank criterion and brute force disagree on {pcg}"
            )));
        }
        let irreducible = pcg.is_irreducible()? == Irreducibility::Irreducible;
        let form = CanonicalForm::of(pcg)?;
        census.total += 1;
        if decision.is_colorable() {
            census.colorable += 1;
        } else {
            census.uncolorable += 1;
        }
        if irreducible {
            census.irreducible += 1;
            census.representatives.push(form.clone());
        }
        census.instances.push(InstanceClass { form, colorable: decision.is_colorable(), irreducible });
    }
    census.representatives.sort();
    census.representatives.dedup();
    Ok(census)
}
