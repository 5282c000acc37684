//! Exhaustive paving experiments on arbitrary projections.
//!
//! The search over diagonal symmetries fixes the first sign to `+1` (`s` and
//! `-s` give the same norms) and walks the remaining `2^(n-1)` sign vectors
//! in reflected Gray-code order, updating the `r x r` compression by a
//! rank-one term per flipped sign. The space is cut into a fixed number of
//! blocks by the trailing signs; blocks run in parallel and are reduced in
//! block order, so results do not depend on the worker count.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    compress_diagonal, dot, operator_norm, random_projection, Projection, SymmetricMatrix, Symmetry, Vector,
};
use crate::rearrange::{theorem1_bound, theorem1_symmetry};

/// Default refusal threshold for exhaustive search.
pub const DEFAULT_MAX_N: usize = 24;
/// Tolerance on `min ||psp|| <= 2 delta_p`.
pub const CONJECTURE_TOL: f64 = 1e-9;
/// Values this close (relative) are ties, broken lexicographically with `-1 < +1`.
pub const TIE_REL_TOL: f64 = 1e-12;
const BLOCK_BITS: usize = 6;
const RESYNC_EVERY: u64 = 1024;

/// Largest diagonal entry `<p e_i, e_i>`.
pub fn delta_p_numeric(p: &Projection) -> f64 {
    (0..p.dim()).map(|i| p.diagonal(i)).fold(0.0, f64::max)
}

/// Result of an exhaustive sign search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceOutcome {
    pub min_norm: f64,
    pub argmin: Symmetry,
    /// Number of sign vectors evaluated, always `2^(n-1)`.
    pub evaluated: u64,
}

/// A quantity that depends on the signs and admits cheap single-sign flips.
trait SignObjective: Sync {
    type State: Send;
    fn init(&self, signs: &[i8]) -> Self::State;
    fn flip(&self, state: &mut Self::State, i: usize, new_sign: i8);
    fn value(&self, state: &Self::State) -> Result<f64>;
}

/// `||F S F^T||`, the operator norm of `p s p`.
struct CompressionNorm {
    rank: usize,
    columns: Vec<Vec<f64>>,
    projection: Projection,
}

impl SignObjective for CompressionNorm {
    type State = Vec<f64>;

    fn init(&self, signs: &[i8]) -> Vec<f64> {
        let w: Vec<f64> = signs.iter().map(|&s| f64::from(s)).collect();
        compress_diagonal(&self.projection, &w)
            .expect("sign vector matches dimension")
            .entries()
            .to_vec()
    }

    fn flip(&self, m: &mut Vec<f64>, i: usize, new_sign: i8) {
        let f = &self.columns[i];
        let r = self.rank;
        let k = 2.0 * f64::from(new_sign);
        for a in 0..r {
            let fa = k * f[a];
            for b in 0..r {
                m[a * r + b] += fa * f[b];
            }
        }
    }

    fn value(&self, m: &Vec<f64>) -> Result<f64> {
        operator_norm(&SymmetricMatrix::from_symmetric_unchecked(self.rank, m.clone()))
    }
}

/// `||p s p v|| = ||sum_i s_i v_i f_i||` for a fixed `v` in range(p).
struct VectorImageNorm {
    weighted: Vec<Vec<f64>>,
}

impl SignObjective for VectorImageNorm {
    type State = Vec<f64>;

    fn init(&self, signs: &[i8]) -> Vec<f64> {
        let r = self.weighted.first().map_or(0, Vec::len);
        let mut z = vec![0.0; r];
        for (g, &s) in self.weighted.iter().zip(signs) {
            let s = f64::from(s);
            z.iter_mut().zip(g).for_each(|(a, b)| *a += s * b);
        }
        z
    }

    fn flip(&self, z: &mut Vec<f64>, i: usize, new_sign: i8) {
        let k = 2.0 * f64::from(new_sign);
        z.iter_mut().zip(&self.weighted[i]).for_each(|(a, b)| *a += k * b);
    }

    fn value(&self, z: &Vec<f64>) -> Result<f64> {
        Ok(dot(z, z).sqrt())
    }
}

fn better(a: (f64, &[i8]), b: (f64, &[i8])) -> bool {
    let scale = a.0.abs().max(b.0.abs()).max(1.0);
    if (a.0 - b.0).abs() <= TIE_REL_TOL * scale {
        a.1 < b.1
    } else {
        a.0 < b.0
    }
}

fn check_cap(n: usize, max_n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("exhaustive search needs n >= 1".into()));
    }
    if n > max_n {
        return Err(Error::CapExceeded { n, cap: max_n });
    }
    Ok(())
}

/// Minimum of `objective` over all sign vectors with `s_0 = +1`.
fn exhaustive_min<O: SignObjective>(n: usize, objective: &O) -> Result<BruteForceOutcome> {
    let free = n - 1;
    let block_bits = free.min(BLOCK_BITS);
    let inner_bits = free - block_bits;
    let blocks = 1usize << block_bits;

    let per_block: Vec<Result<(f64, Vec<i8>, u64)>> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut signs = vec![-1i8; n];
            signs[0] = 1;
            for j in 0..block_bits {
                // bit set -> +1, so block 0 is lexicographically smallest
                signs[n - block_bits + j] = if block >> (block_bits - 1 - j) & 1 == 1 { 1 } else { -1 };
            }
            let mut state = objective.init(&signs);
            let mut best_val = objective.value(&state)?;
            let mut best_signs = signs.clone();
            let steps = 1u64 << inner_bits;
            for t in 1..steps {
                let idx = 1 + t.trailing_zeros() as usize;
                signs[idx] = -signs[idx];
                if t % RESYNC_EVERY == 0 {
                    state = objective.init(&signs);
                } else {
                    objective.flip(&mut state, idx, signs[idx]);
                }
                let val = objective.value(&state)?;
                if better((val, &signs), (best_val, &best_signs)) {
                    best_val = val;
                    best_signs.copy_from_slice(&signs);
                }
            }
            Ok((best_val, best_signs, steps))
        })
        .collect();

    let mut evaluated = 0u64;
    let mut best: Option<(f64, Vec<i8>)> = None;
    for r in per_block {
        let (val, signs, count) = r?;
        evaluated += count;
        best = match best {
            Some((bv, bs)) if !better((val, &signs), (bv, &bs)) => Some((bv, bs)),
            _ => Some((val, signs)),
        };
    }
    let (_, signs) = best.expect("at least one block");
    // Report the minimizer's value recomputed from scratch, free of update drift.
    let min_norm = objective.value(&objective.init(&signs))?;
    Ok(BruteForceOutcome {
        min_norm,
        argmin: Symmetry::new(signs)?,
        evaluated,
    })
}

/// `min_s ||p s p||` over all diagonal symmetries with `s_0 = +1`.
pub fn brute_force_min(p: &Projection, max_n: usize) -> Result<BruteForceOutcome> {
    let n = p.dim();
    check_cap(n, max_n)?;
    let objective = CompressionNorm {
        rank: p.rank(),
        columns: p.frame().columns(),
        projection: p.clone(),
    };
    exhaustive_min(n, &objective)
}

/// `min_s ||p s p v||` for one vector, with `v` replaced by `p(v)/||p(v)||`.
pub fn brute_force_min_vector(p: &Projection, v: &Vector, max_n: usize) -> Result<BruteForceOutcome> {
    let n = p.dim();
    check_cap(n, max_n)?;
    let u = p.apply(v)?;
    let norm = u.norm();
    if norm.is_nan() || norm <= 1e-10 {
        return Err(Error::Degenerate(format!("p(v) has norm {norm:e}")));
    }
    let weighted = p
        .frame()
        .columns()
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.into_iter().map(|x| x * u[i] / norm).collect())
        .collect();
    exhaustive_min(n, &VectorImageNorm { weighted })
}

/// Exhaustive reference: every sign vector, recomputed from scratch. Test-sized `n` only.
pub fn naive_min(p: &Projection) -> Result<(f64, Symmetry)> {
    let n = p.dim();
    check_cap(n, 16)?;
    let mut best: Option<(f64, Vec<i8>)> = None;
    for mask in 0u64..(1 << (n - 1)) {
        let mut signs = vec![1i8; n];
        for (j, s) in signs.iter_mut().enumerate().skip(1) {
            if mask >> (j - 1) & 1 == 1 {
                *s = -1;
            }
        }
        let w: Vec<f64> = signs.iter().map(|&s| f64::from(s)).collect();
        let val = operator_norm(&compress_diagonal(p, &w)?)?;
        if best.as_ref().is_none_or(|(bv, bs)| better((val, &signs), (*bv, bs))) {
            best = Some((val, signs));
        }
    }
    let (val, signs) = best.expect("n >= 1");
    Ok((val, Symmetry::new(signs)?))
}

/// One conjecture test on one projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub seed: Option<u64>,
    pub n: usize,
    pub rank: usize,
    pub delta_p: f64,
    pub two_delta_p: f64,
    pub min_psp_norm: Option<f64>,
    pub argmin_signs: Option<Symmetry>,
    pub conjecture_a_satisfied: Option<bool>,
    /// `||p s p e_i||` achieved by the single-vector construction, per basis
    /// vector (`None` where `p e_i = 0`).
    pub theorem1_norms: Option<Vec<Option<f64>>>,
    pub theorem1_bound: Option<f64>,
    pub runtime_ms: Option<u64>,
    pub error: Option<String>,
}

impl ExperimentRecord {
    fn blank(p: &Projection) -> Self {
        let delta_p = delta_p_numeric(p);
        ExperimentRecord {
            seed: None,
            n: p.dim(),
            rank: p.rank(),
            delta_p,
            two_delta_p: 2.0 * delta_p,
            min_psp_norm: None,
            argmin_signs: None,
            conjecture_a_satisfied: None,
            theorem1_norms: None,
            theorem1_bound: None,
            runtime_ms: None,
            error: None,
        }
    }
}

/// Brute-force `min ||psp||` against `2 delta_p`.
pub fn conjecture_a_test(p: &Projection, max_n: usize) -> Result<ExperimentRecord> {
    let mut rec = ExperimentRecord::blank(p);
    let out = brute_force_min(p, max_n)?;
    rec.conjecture_a_satisfied = Some(out.min_norm <= rec.two_delta_p + CONJECTURE_TOL);
    rec.min_psp_norm = Some(out.min_norm);
    rec.argmin_signs = Some(out.argmin);
    Ok(rec)
}

/// True iff `delta_p >= gamma` or some symmetry has `||psp|| < 1 - epsilon`.
pub fn conjecture_b_probe(p: &Projection, gamma: f64, epsilon: f64, max_n: usize) -> Result<bool> {
    if delta_p_numeric(p) >= gamma {
        return Ok(true);
    }
    Ok(brute_force_min(p, max_n)?.min_norm < 1.0 - epsilon)
}

/// The two diagonal compressions of `p` for a split `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PavingPair {
    pub q_norm: f64,
    pub complement_norm: f64,
    /// `max(||q p q||, ||(1-q) p (1-q)||)`.
    pub max_norm: f64,
    /// `1/2 + delta_p`.
    pub threshold: f64,
}

impl PavingPair {
    pub fn satisfied(&self) -> bool {
        self.max_norm <= self.threshold + CONJECTURE_TOL
    }
}

/// `q` is the diagonal projection onto the `+1` positions of `q_signs`.
pub fn paving_pair(p: &Projection, q_signs: &Symmetry) -> Result<PavingPair> {
    let mask: Vec<f64> = q_signs.signs().iter().map(|&s| if s > 0 { 1.0 } else { 0.0 }).collect();
    let comp: Vec<f64> = mask.iter().map(|x| 1.0 - x).collect();
    let q_norm = operator_norm(&compress_diagonal(p, &mask)?)?;
    let complement_norm = operator_norm(&compress_diagonal(p, &comp)?)?;
    Ok(PavingPair {
        q_norm,
        complement_norm,
        max_norm: q_norm.max(complement_norm),
        threshold: 0.5 + delta_p_numeric(p),
    })
}

/// What each scanned instance computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// Exhaustive `min ||psp||` against `2 delta_p`.
    ConjectureA,
    /// Single-vector symmetries for every basis vector; no exhaustive search.
    Theorem1,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n: usize,
    pub rank: usize,
    pub count: usize,
    pub seed: u64,
    pub mode: ScanMode,
    pub max_n: usize,
}

fn theorem1_norms(p: &Projection) -> Result<Vec<Option<f64>>> {
    (0..p.dim())
        .map(|i| match theorem1_symmetry(p, &Vector::basis(p.dim(), i)) {
            Ok(r) => Ok(Some(r.achieved_norm)),
            Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

fn run_instance(config: &ScanConfig, seed: u64) -> ExperimentRecord {
    let start = Instant::now();
    let p = match random_projection(config.n, config.rank, seed) {
        Ok(p) => p,
        Err(e) => {
            return ExperimentRecord {
                seed: Some(seed),
                n: config.n,
                rank: config.rank,
                delta_p: f64::NAN,
                two_delta_p: f64::NAN,
                min_psp_norm: None,
                argmin_signs: None,
                conjecture_a_satisfied: None,
                theorem1_norms: None,
                theorem1_bound: None,
                runtime_ms: Some(start.elapsed().as_millis() as u64),
                error: Some(e.to_string()),
            }
        }
    };
    let mut rec = ExperimentRecord::blank(&p);
    rec.seed = Some(seed);
    let result = (|| -> Result<()> {
        if matches!(config.mode, ScanMode::ConjectureA | ScanMode::Both) {
            let a = conjecture_a_test(&p, config.max_n)?;
            rec.min_psp_norm = a.min_psp_norm;
            rec.argmin_signs = a.argmin_signs;
            rec.conjecture_a_satisfied = a.conjecture_a_satisfied;
        }
        if matches!(config.mode, ScanMode::Theorem1 | ScanMode::Both) {
            rec.theorem1_norms = Some(theorem1_norms(&p)?);
            rec.theorem1_bound = Some(theorem1_bound(rec.delta_p));
        }
        Ok(())
    })();
    if let Err(e) = result {
        rec.error = Some(e.to_string());
    }
    rec.runtime_ms = Some(start.elapsed().as_millis() as u64);
    rec
}

/// A deterministic batch: instance `i` uses seed `seed + i`.
pub fn scan(config: &ScanConfig) -> Vec<ExperimentRecord> {
    (0..config.count)
        .into_par_iter()
        .map(|i| run_instance(config, config.seed.wrapping_add(i as u64)))
        .collect()
}

/// Aggregate counts over a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSummary {
    pub instances: usize,
    pub tested: usize,
    pub satisfied: usize,
    pub errors: usize,
    /// `satisfied / tested`, absent when nothing was tested.
    pub satisfaction_rate: Option<f64>,
}

pub fn summarize(records: &[ExperimentRecord]) -> ScanSummary {
    let tested = records.iter().filter(|r| r.conjecture_a_satisfied.is_some()).count();
    let satisfied = records
        .iter()
        .filter(|r| r.conjecture_a_satisfied == Some(true))
        .count();
    ScanSummary {
        instances: records.len(),
        tested,
        satisfied,
        errors: records.iter().filter(|r| r.error.is_some()).count(),
        satisfaction_rate: (tested > 0).then(|| satisfied as f64 / tested as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_rank1(n: usize) -> Projection {
        let x = 1.0 / (n as f64).sqrt();
        Projection::from_rows(n, vec![vec![x; n]]).unwrap()
    }

    #[test]
    fn delta_p_examples() {
        assert_eq!(delta_p_numeric(&Projection::identity(5)), 1.0);
        assert!((delta_p_numeric(&uniform_rank1(7)) - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn brute_force_examples() {
        let out = brute_force_min(&uniform_rank1(2), DEFAULT_MAX_N).unwrap();
        assert!(out.min_norm < 1e-15);
        assert_eq!(out.argmin.signs(), &[1, -1]);
        assert_eq!(out.evaluated, 2);

        let out = brute_force_min(&uniform_rank1(4), DEFAULT_MAX_N).unwrap();
        assert!(out.min_norm < 1e-15);
        // lexicographically smallest balanced split with s_0 = +1
        assert_eq!(out.argmin.signs(), &[1, -1, -1, 1]);

        let out = brute_force_min(&uniform_rank1(3), DEFAULT_MAX_N).unwrap();
        assert!((out.min_norm - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(out.evaluated, 4);
    }

    #[test]
    fn brute_force_cap_and_empty() {
        let p = crate::linalg::random_projection(9, 3, 1).unwrap();
        assert_eq!(
            brute_force_min(&p, 8).unwrap_err(),
            Error::CapExceeded { n: 9, cap: 8 }
        );
        let zero = Projection::new(crate::linalg::OrthonormalFrame::empty(0)).unwrap();
        assert!(brute_force_min(&zero, 24).is_err());
    }

    #[test]
    fn single_coordinate() {
        let p = Projection::identity(1);
        let out = brute_force_min(&p, 24).unwrap();
        assert_eq!(out.min_norm, 1.0);
        assert_eq!(out.evaluated, 1);
    }

    #[test]
    fn matches_naive_enumeration() {
        for (n, r, seed) in [(5, 2, 1u64), (8, 4, 2), (10, 3, 3), (12, 6, 4)] {
            let p = crate::linalg::random_projection(n, r, seed).unwrap();
            let fast = brute_force_min(&p, 24).unwrap();
            let (val, _) = naive_min(&p).unwrap();
            assert!((fast.min_norm - val).abs() < 1e-12, "n={n}: {} vs {val}", fast.min_norm);
            assert_eq!(fast.evaluated, 1 << (n - 1));
        }
    }

    #[test]
    fn conjecture_a_examples() {
        let rec = conjecture_a_test(&uniform_rank1(3), 24).unwrap();
        assert_eq!(rec.conjecture_a_satisfied, Some(true));
        assert!((rec.two_delta_p - 2.0 / 3.0).abs() < 1e-15);

        let rec = conjecture_a_test(&Projection::identity(4), 24).unwrap();
        assert_eq!(rec.min_psp_norm, Some(1.0));
        assert_eq!(rec.conjecture_a_satisfied, Some(true));
    }

    #[test]
    fn conjecture_b_examples() {
        let p = uniform_rank1(3);
        assert!(conjecture_b_probe(&p, 0.2, 0.99, 24).unwrap());
        assert!(conjecture_b_probe(&uniform_rank1(4), 0.3, 0.5, 24).unwrap());
        assert!(!conjecture_b_probe(&Projection::identity(2), 1.5, 0.1, 24).unwrap());
    }

    #[test]
    fn paving_pair_examples() {
        let p = uniform_rank1(2);
        let full = paving_pair(&p, &Symmetry::identity(2)).unwrap();
        assert!((full.max_norm - 1.0).abs() < 1e-15);
        assert!(full.complement_norm.abs() < 1e-15);
        let empty = paving_pair(&p, &Symmetry::identity(2).negated()).unwrap();
        assert!((empty.max_norm - 1.0).abs() < 1e-15);
        let half = paving_pair(&p, &Symmetry::new(vec![1, -1]).unwrap()).unwrap();
        assert!((half.q_norm - 0.5).abs() < 1e-15);
        assert!((half.complement_norm - 0.5).abs() < 1e-15);
        assert!((half.threshold - 1.0).abs() < 1e-15);
        assert!(half.satisfied());
    }

    #[test]
    fn scan_examples() {
        let cfg = ScanConfig {
            n: 10,
            rank: 5,
            count: 5,
            seed: 1,
            mode: ScanMode::ConjectureA,
            max_n: 24,
        };
        let recs = scan(&cfg);
        assert_eq!(recs.len(), 5);
        assert!(recs.iter().all(|r| r.conjecture_a_satisfied.is_some()));
        assert_eq!(recs[2].seed, Some(3));

        assert!(scan(&ScanConfig { count: 0, ..cfg }).is_empty());

        let strip = |mut v: Vec<ExperimentRecord>| {
            v.iter_mut().for_each(|r| r.runtime_ms = None);
            v
        };
        assert_eq!(strip(scan(&cfg)), strip(recs));
    }

    #[test]
    fn scan_reports_cap_errors_per_record() {
        let cfg = ScanConfig {
            n: 10,
            rank: 5,
            count: 3,
            seed: 1,
            mode: ScanMode::ConjectureA,
            max_n: 8,
        };
        let recs = scan(&cfg);
        assert_eq!(recs.len(), 3);
        assert!(recs.iter().all(|r| r.error.as_deref().is_some_and(|e| e.contains("cap"))));
        assert_eq!(summarize(&recs).errors, 3);
        assert_eq!(summarize(&recs).satisfaction_rate, None);
    }

    #[test]
    fn theorem1_scan_skips_exhaustive_search() {
        let cfg = ScanConfig {
            n: 40,
            rank: 10,
            count: 2,
            seed: 5,
            mode: ScanMode::Theorem1,
            max_n: 24,
        };
        for r in scan(&cfg) {
            assert!(r.error.is_none());
            assert!(r.min_psp_norm.is_none());
            let bound = r.theorem1_bound.unwrap();
            for x in r.theorem1_norms.unwrap().into_iter().flatten() {
                assert!(x <= bound + 1e-9);
            }
        }
    }
}
