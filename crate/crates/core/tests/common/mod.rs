//! Dense reference implementations used as oracles by the integration tests.
//! Everything here is written from the definitions, without calling into the
//! library's GF(2) or sparse-simulation code.

#![allow(dead_code)]

use hlqp::{Pcg, SignedEdge};
use num_complex::Complex64;
use rand::Rng;

/// Full amplitude vector; the digit of site `s` (1-based) has weight `d^(s-1)`.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub d: usize,
    pub amps: Vec<Complex64>,
}

impl Dense {
    pub fn digit(&self, index: usize, site: usize) -> usize {
        index / self.d.pow(site as u32 - 1) % self.d
    }

    fn with_digit(&self, index: usize, site: usize, digit: usize) -> usize {
        let w = self.d.pow(site as u32 - 1);
        index - self.digit(index, site) * w + digit * w
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude_of_ones(&self, sites: &[usize]) -> Complex64 {
        self.amps[sites.iter().map(|&s| 1usize << (s - 1)).sum::<usize>()]
    }

    /// Probability of reading digit 0 on every listed site.
    pub fn prob_zero_on(&self, sites: &[usize]) -> f64 {
        let kept: f64 = (0..self.amps.len())
            .filter(|&i| sites.iter().all(|&s| self.digit(i, s) == 0))
            .map(|i| self.amps[i].norm_sqr())
            .sum();
        kept / self.norm_sqr()
    }

    /// Normalized state after reading digit 0 on every listed site.
    pub fn condition_zero(&self, sites: &[usize]) -> Dense {
        let mut amps = self.amps.clone();
        for (i, a) in amps.iter_mut().enumerate() {
            if sites.iter().any(|&s| self.digit(i, s) != 0) {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Dense { n: self.n, d: self.d, amps: amps.into_iter().map(|a| a / norm).collect() }
    }

    /// `(O psi)` where `O` lowers the digit by one on each listed site.
    pub fn apply_shift(&self, sites: &[usize]) -> Dense {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = i;
            for &s in sites {
                let k = self.digit(j, s);
                j = self.with_digit(j, s, (k + self.d - 1) % self.d);
            }
            out[j] += a;
        }
        Dense { n: self.n, d: self.d, amps: out }
    }

    /// `|| O psi - lambda psi ||` for a normalized `psi`.
    pub fn eigen_residual(&self, sites: &[usize], lambda: Complex64) -> f64 {
        let o = self.apply_shift(sites);
        o.amps
            .iter()
            .zip(&self.amps)
            .map(|(x, y)| (x - lambda * y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Qubits: probability that the X product over `sites` equals `sign`.
    pub fn x_product_probability(&self, sites: &[usize], sign: i8) -> f64 {
        assert_eq!(self.d, 2);
        let flipped = self.apply_shift(sites);
        let expectation: Complex64 = self.amps.iter().zip(&flipped.amps).map(|(a, b)| a.conj() * b).sum();
        (1.0 + f64::from(sign) * expectation.re / self.norm_sqr()) / 2.0
    }
}

/// `alpha|A> + beta|B>` written out term by term from the definition.
pub fn dense_pcg_state(pcg: &Pcg, alpha: Complex64, b_terms: &[(Vec<usize>, Complex64)]) -> Dense {
    let n = pcg.n();
    let p = pcg.edge_count() as f64;
    let beta = (1.0 - alpha.norm_sqr()).max(0.0).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] += alpha / (p + 1.0).sqrt();
    for e in pcg.edges() {
        let idx: usize = e.vertices().iter().map(|&v| 1usize << (v - 1)).sum();
        let theta = f64::from(e.theta().value());
        amps[idx] += -alpha * theta / (p + 1.0).sqrt();
    }
    for (vs, lambda) in b_terms {
        let idx: usize = vs.iter().map(|&v| 1usize << (v - 1)).sum();
        amps[idx] += beta * lambda;
    }
    Dense { n, d: 2, amps }
}

/// `(total, satisfying)` over all `2^n` colorings, checking each constraint
/// as "product of colors equals -theta".
pub fn brute_colorings(pcg: &Pcg) -> (u64, u64) {
    let n = pcg.n();
    let total = 1u64 << n;
    let satisfying = (0..total)
        .filter(|bits| {
            pcg.edges().iter().all(|e| {
                let product: i32 = e
                    .vertices()
                    .iter()
                    .map(|&v| if bits >> (v - 1) & 1 == 1 { 1 } else { -1 })
                    .product();
                product == -i32::from(e.theta().value())
            })
        })
        .count() as u64;
    (total, satisfying)
}

/// Random PCG satisfying every structural condition, by rejection.
pub fn random_valid_pcg<R: Rng>(rng: &mut R, min_n: usize, max_n: usize, max_edges: usize) -> Pcg {
    loop {
        let n = rng.gen_range(min_n.max(3)..=max_n);
        let p = rng.gen_range(1..=max_edges);
        let edges: Vec<SignedEdge> = (0..p)
            .map(|_| {
                let size = rng.gen_range(1..n);
                let mut vs: Vec<usize> = (1..=n).collect();
                for i in 0..size {
                    let j = rng.gen_range(i..n);
                    vs.swap(i, j);
                }
                vs.truncate(size);
                if rng.gen_bool(0.5) {
                    SignedEdge::red(vs)
                } else {
                    SignedEdge::green(vs)
                }
            })
            .collect();
        let pcg = Pcg::new(n, edges).expect("labels in range");
        if pcg.validate().is_valid() {
            return pcg;
        }
    }
}

/// B-term supports that are not contained in any edge, with random
/// normalized coefficients.
pub fn random_b_terms<R: Rng>(rng: &mut R, pcg: &Pcg) -> Vec<(Vec<usize>, Complex64)> {
    let n = pcg.n();
    let full = (1u64 << n) - 1;
    let mut masks: Vec<u64> = vec![full];
    for _ in 0..rng.gen_range(0..3) {
        let m = rng.gen_range(1..=full);
        let inside_edge = pcg.edges().iter().any(|e| m & !e.mask() == 0);
        if !inside_edge && !masks.contains(&m) {
            masks.push(m);
        }
    }
    let raw: Vec<Complex64> = masks
        .iter()
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    masks
        .into_iter()
        .zip(raw)
        .map(|(m, c)| ((1..=n).filter(|v| m >> (v - 1) & 1 == 1).collect(), c / norm))
        .collect()
}
