mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use common::{brute_colorings, dense_pcg_state, random_b_terms, random_valid_pcg};
use hlqp::catalog::PcgInstance;
use hlqp::io::PcgFile;
use hlqp::search::{classify, enumerate_with, CanonicalForm};
use hlqp::state::{build_state, success_formula_applies};
use hlqp::verify::{hardy_checks, Verifier};
use hlqp::{BTerm, Irreducibility, Pcg, ProductBasis, SignedEdge};
use itertools::Itertools;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random valid PCG with random state parameters, reproducible from a seed.
fn instance(seed: u64, max_n: usize, max_edges: usize) -> (Pcg, Complex64, Vec<BTerm>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pcg = random_valid_pcg(&mut rng, 3, max_n, max_edges);
    if rng.gen_bool(0.5) {
        let b: Vec<BTerm> = random_b_terms(&mut rng, &pcg)
            .into_iter()
            .map(|(vs, l)| BTerm::new(vs, l))
            .collect();
        let alpha = Complex64::from_polar(rng.gen_range(0.05..0.99), rng.gen_range(0.0..2.0 * PI));
        (pcg, alpha, b)
    } else {
        (pcg, Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI)), Vec::new())
    }
}

fn b_pairs(b: &[BTerm]) -> Vec<(Vec<usize>, Complex64)> {
    b.iter().map(|t| (t.vertices.clone(), t.lambda)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rank_criterion_matches_exhaustive_colorings(seed in any::<u64>()) {
        let (pcg, _, _) = instance(seed, 10, 8);
        let decision = pcg.is_colorable().unwrap();
        let (_, satisfying) = brute_colorings(&pcg);
        prop_assert_eq!(decision.is_colorable(), satisfying > 0);
        if let Some(w) = decision.witness() {
            prop_assert!(w.satisfies(&pcg));
        }
        let (ra, rb) = decision.ranks();
        prop_assert!(rb == ra || rb == ra + 1);
    }

    #[test]
    fn hardy_certainty_on_valid_instances(seed in any::<u64>()) {
        let (pcg, alpha, b) = instance(seed, 8, 6);
        let state = build_state(&pcg, alpha, &b).unwrap();
        let dense = dense_pcg_state(&pcg, alpha, &b_pairs(&b));
        for h in hardy_checks(&pcg, &state).unwrap() {
            prop_assert!((h.probability - 1.0).abs() <= 1e-9, "edge {}: {}", h.edge, h.probability);
            prop_assert!(h.condition_probability > 0.0);
            let rest: Vec<usize> = (1..=pcg.n()).filter(|v| !h.vertices.contains(v)).collect();
            let d = dense.condition_zero(&rest).x_product_probability(&h.vertices, h.required_eigenvalue);
            prop_assert!((d - 1.0).abs() <= 1e-9);
            prop_assert!((dense.prob_zero_on(&rest) - h.condition_probability).abs() <= 1e-12);
        }
    }

    #[test]
    fn sign_flip_keeps_rank_a(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let (pcg, _, _) = instance(seed, 10, 8);
        let i = pick.index(pcg.edge_count());
        let (a, b) = pcg.hardy_matrices().unwrap();
        let (fa, fb) = pcg.with_flipped_sign(i).hardy_matrices().unwrap();
        prop_assert_eq!(a.rank(), fa.rank());
        prop_assert_eq!(&a, &fa);
        prop_assert_ne!(b, fb);
    }

    #[test]
    fn states_and_projections_are_normalized(seed in any::<u64>(), mask in any::<u16>(), digits in any::<u16>()) {
        let (pcg, alpha, b) = instance(seed, 8, 6);
        let state = build_state(&pcg, alpha, &b).unwrap();
        prop_assert!(state.is_normalized(1e-9));
        let assignment: Vec<(usize, u8)> = (1..=pcg.n())
            .filter(|s| mask >> (s - 1) & 1 == 1)
            .map(|s| (s, (digits >> (s - 1) & 1) as u8))
            .collect();
        let p = state.project_z(&assignment).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&p.probability));
        match p.state {
            Some(post) => prop_assert!(post.is_normalized(1e-9)),
            None => prop_assert!(p.probability == 0.0),
        }
    }

    #[test]
    fn projection_chain_rule(seed in any::<u64>(), split in 1usize..4) {
        let (pcg, alpha, b) = instance(seed, 8, 6);
        let state = build_state(&pcg, alpha, &b).unwrap();
        let all: Vec<(usize, u8)> = (1..=pcg.n()).take(split + 1).map(|s| (s, (s % 2) as u8)).collect();
        let (first, second) = all.split_at(split.min(all.len()));
        let joint = state.project_z(&all).unwrap();
        let a = state.project_z(first).unwrap();
        let chained = match &a.state {
            Some(post) => a.probability * post.project_z(second).unwrap().probability,
            None => 0.0,
        };
        prop_assert!((joint.probability - chained).abs() <= 1e-12);
        if let (Some(post), Some(j)) = (&a.state, &joint.state) {
            let seq = post.project_z(second).unwrap().state.unwrap();
            prop_assert!((seq.inner(j).unwrap().norm() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn global_phase_leaves_certificates_unchanged(seed in any::<u64>(), phi in 0.0..(2.0 * PI)) {
        let (pcg, alpha, b) = instance(seed, 7, 5);
        let phase = Complex64::from_polar(1.0, phi);
        let rotated: Vec<BTerm> = b.iter().map(|t| BTerm::new(t.vertices.clone(), t.lambda * phase)).collect();
        let v = Verifier::default();
        let x = v.verify(&pcg, alpha, &b).unwrap();
        let y = v.verify(&pcg, alpha * phase, &rotated).unwrap();
        prop_assert_eq!(&x.verdict, &y.verdict);
        prop_assert!((x.success.simulated - y.success.simulated).abs() <= 1e-12);
        for (p, q) in x.hardy_checks.iter().zip(&y.hardy_checks) {
            prop_assert!((p.probability - q.probability).abs() <= 1e-12);
            prop_assert!((p.condition_probability - q.condition_probability).abs() <= 1e-12);
        }
    }

    #[test]
    fn file_round_trip_is_identity(seed in any::<u64>()) {
        let (pcg, alpha, b_terms) = instance(seed, 10, 8);
        let inst = PcgInstance { pcg, alpha, b_terms, basis: ProductBasis::X };
        let text = PcgFile::from_instance(&inst).to_json();
        let back = PcgFile::parse(&text).unwrap().to_instance().unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(PcgFile::from_instance(&back).to_json(), text);
    }

    #[test]
    fn success_formula_when_it_applies(seed in any::<u64>()) {
        let (pcg, alpha, b) = instance(seed, 8, 6);
        let cert = Verifier::default().verify(&pcg, alpha, &b).unwrap();
        prop_assert_eq!(cert.success.formula_applicable, success_formula_applies(&pcg, &b));
        if cert.success.formula_applicable {
            let expected = alpha.norm_sqr() / (pcg.edge_count() + 1) as f64;
            prop_assert!((cert.success.simulated - expected).abs() <= 1e-9);
        }
        let dense = dense_pcg_state(&pcg, alpha, &b_pairs(&b));
        prop_assert!((dense.prob_zero_on(&cert.success.sites) - cert.success.simulated).abs() <= 1e-12);
    }

    #[test]
    fn canonical_form_ignores_relabeling(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let (pcg, _, _) = instance(seed, 7, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
        let mut perm: Vec<usize> = (1..=pcg.n()).collect();
        for i in (1..perm.len()).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut edges: Vec<SignedEdge> = pcg
            .edges()
            .iter()
            .map(|e| SignedEdge::new(e.vertices().iter().map(|&v| perm[v - 1]), e.theta()))
            .collect();
        edges.reverse();
        let relabeled = Pcg::new(pcg.n(), edges).unwrap();
        prop_assert_eq!(CanonicalForm::of(&pcg).unwrap(), CanonicalForm::of(&relabeled).unwrap());
        prop_assert_eq!(
            pcg.is_colorable().unwrap().is_colorable(),
            relabeled.is_colorable().unwrap().is_colorable()
        );
    }

    #[test]
    fn reducible_witness_is_minimal(seed in any::<u64>()) {
        let (pcg, _, _) = instance(seed, 8, 7);
        match pcg.is_irreducible().unwrap() {
            Irreducibility::NotApplicable => prop_assert!(pcg.is_colorable().unwrap().is_colorable()),
            Irreducibility::Irreducible => {
                for i in 0..pcg.edge_count() {
                    let keep: Vec<usize> = (0..pcg.edge_count()).filter(|&j| j != i).collect();
                    let (_, sat) = brute_colorings(&pcg.sub_pcg(&keep));
                    prop_assert!(sat > 0);
                }
            }
            Irreducibility::Reducible { witness } => {
                prop_assert!(witness.len() < pcg.edge_count());
                prop_assert_eq!(brute_colorings(&pcg.sub_pcg(&witness)).1, 0);
                for drop in 0..witness.len() {
                    let keep: Vec<usize> = witness.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, &j)| j).collect();
                    prop_assert!(brute_colorings(&pcg.sub_pcg(&keep)).1 > 0);
                }
            }
        }
    }
}

/// Independent enumeration: every connected antichain cover, every signing,
/// canonicalized by trying all relabelings.
fn oracle_class_count(n: usize, max_edges: usize) -> usize {
    let full = (1u64 << n) - 1;
    let candidates: Vec<u64> = (1..=full).filter(|m| (m.count_ones() as usize) < n).collect();
    let mut forms = BTreeSet::new();
    for p in 1..=max_edges {
        for es in candidates.iter().copied().combinations(p) {
            if es.iter().tuple_combinations().any(|(a, b)| a & b == *a || a & b == *b) {
                continue;
            }
            let mut reach = es[0];
            loop {
                let next = es.iter().filter(|&&e| e & reach != 0).fold(reach, |r, &e| r | e);
                if next == reach {
                    break;
                }
                reach = next;
            }
            if reach != full {
                continue;
            }
            for signs in 0u32..(1 << p) {
                let best = (0..n)
                    .permutations(n)
                    .map(|perm| {
                        let mut rel: Vec<(u64, u32)> = es
                            .iter()
                            .enumerate()
                            .map(|(i, &m)| {
                                let pm = (0..n).filter(|b| m >> b & 1 == 1).fold(0u64, |acc, b| acc | 1 << perm[b]);
                                (pm, signs >> i & 1)
                            })
                            .collect();
                        rel.sort_unstable();
                        rel
                    })
                    .min()
                    .unwrap();
                forms.insert(best);
            }
        }
    }
    forms.len()
}

#[test]
fn enumeration_counts_match_oracle() {
    for (n, max_edges) in [(3, 3), (3, 5), (4, 3), (4, 5)] {
        let got = enumerate_with(n, max_edges, 1..=n, false).unwrap().len();
        assert_eq!(got, oracle_class_count(n, max_edges), "n = {n}, max_edges = {max_edges}");
    }
}

#[test]
fn parallel_and_serial_censuses_agree() {
    for (n, max_edges, sizes) in [(4, 5, 1..=3), (5, 4, 2..=4), (5, 3, 1..=4)] {
        let par = enumerate_with(n, max_edges, sizes.clone(), true).unwrap();
        let ser = enumerate_with(n, max_edges, sizes, false).unwrap();
        assert_eq!(par, ser);
        let (a, b) = (classify(&par).unwrap(), classify(&ser).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.total, a.colorable + a.uncolorable);
        assert!(par.iter().all(|p| p.validate().is_valid()));
    }
}
