//! Zero-sum rearrangement and the single-vector symmetry construction.
//!
//! A family of vectors summing to zero can be ordered so that every vector
//! has non-positive inner product with the partial sum before it; partial
//! sums then satisfy `||w_i||^2 <= sum_{j<=i} ||v_j||^2`. Applied to the
//! pieces `y_i = p_2 q_i p v` of a unit vector `v` in the range of `p`, a
//! prefix cut of that order yields a diagonal symmetry `s` with
//! `||p s p v|| <= sqrt(2 delta_p + 3 delta_p^2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{apply_psp, dot, materialize, Projection, Symmetry, Vector};

/// Relative slack for the ordering hypothesis, in units of the largest squared norm.
pub const PREFIX_REL_TOL: f64 = 1e-10;
/// Absolute slack on the partial-sum bound.
pub const LEMMA_BOUND_TOL: f64 = 1e-9;
/// Slack on the prefix-cut condition `|1/2 - sum alpha^2| <= delta_p / 2`.
pub const CUT_TOL: f64 = 1e-12;
const DEFAULT_SUM_REL_TOL: f64 = 1e-9;

/// Vectors of a common dimension whose sum vanishes up to `sum_tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumFamily {
    vectors: Vec<Vec<f64>>,
    sum_tolerance: f64,
}

impl ZeroSumFamily {
    /// Uses the default tolerance `1e-9 * sum ||v_i||`.
    pub fn new(vectors: Vec<Vector>) -> Result<Self> {
        let total: f64 = vectors.iter().map(Vector::norm).sum();
        Self::with_tolerance(vectors, DEFAULT_SUM_REL_TOL * total)
    }

    pub fn with_tolerance(vectors: Vec<Vector>, sum_tolerance: f64) -> Result<Self> {
        let vectors: Vec<Vec<f64>> = vectors.into_iter().map(Vector::into_inner).collect();
        Self::from_raw(vectors, sum_tolerance)
    }

    fn from_raw(vectors: Vec<Vec<f64>>, sum_tolerance: f64) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        let mut sum = vec![0.0; dim];
        for v in &vectors {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
        }
        let residual = dot(&sum, &sum).sqrt();
        if residual > sum_tolerance {
            return Err(Error::InvalidArgument(format!(
                "family sums to a vector of norm {residual:e}, above tolerance {sum_tolerance:e}"
            )));
        }
        Ok(ZeroSumFamily {
            vectors,
            sum_tolerance,
        })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn sum_tolerance(&self) -> f64 {
        self.sum_tolerance
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    fn max_norm_sq(&self) -> f64 {
        self.vectors.iter().map(|v| dot(v, v)).fold(0.0, f64::max)
    }
}

fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    order.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// True iff each reordered vector has inner product at most
/// `1e-10 * max ||v||^2` with the partial sum before it.
pub fn check_prefix_property(family: &ZeroSumFamily, order: &[usize]) -> bool {
    if !is_permutation(order, family.len()) {
        return false;
    }
    let slack = PREFIX_REL_TOL * family.max_norm_sq();
    let mut partial = vec![0.0; family.dim()];
    for (step, &i) in order.iter().enumerate() {
        let v = family.vector(i);
        if step > 0 && dot(v, &partial) > slack {
            return false;
        }
        partial.iter_mut().zip(v).for_each(|(w, x)| *w += x);
    }
    true
}

/// True iff every partial sum satisfies `||w_i||^2 <= sum_{j<=i} ||v_j||^2 + 1e-9`.
pub fn lemma2_bound_holds(family: &ZeroSumFamily, order: &[usize]) -> bool {
    if !is_permutation(order, family.len()) {
        return false;
    }
    let mut partial = vec![0.0; family.dim()];
    let mut budget = 0.0;
    for &i in order {
        let v = family.vector(i);
        partial.iter_mut().zip(v).for_each(|(w, x)| *w += x);
        budget += dot(v, v);
        if dot(&partial, &partial) > budget + LEMMA_BOUND_TOL {
            return false;
        }
    }
    true
}

/// Greedy order: start at index 0, then repeatedly take the remaining vector
/// with the most negative inner product against the running sum (smallest
/// index on ties).
pub fn greedy_rearrange(family: &ZeroSumFamily) -> Result<Vec<usize>> {
    let n = family.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let slack = PREFIX_REL_TOL * family.max_norm_sq();
    let mut remaining: Vec<usize> = (1..n).collect();
    let mut order = Vec::with_capacity(n);
    order.push(0);
    let mut partial = family.vector(0).to_vec();
    while !remaining.is_empty() {
        let (slot, best) = remaining
            .iter()
            .enumerate()
            .map(|(slot, &i)| (slot, dot(family.vector(i), &partial)))
            .fold((0, f64::INFINITY), |acc, cand| if cand.1 < acc.1 { cand } else { acc });
        // The remaining vectors sum to -partial, so their average inner
        // product is at most (-||w||^2 + tol ||w||) / count.
        let allowed = family.sum_tolerance * dot(&partial, &partial).sqrt() + slack;
        if best > allowed {
            return Err(Error::InvalidArgument(format!(
                "no remaining vector opposes the partial sum (best inner product {best:e})"
            )));
        }
        let i = remaining.remove(slot);
        order.push(i);
        partial
            .iter_mut()
            .zip(family.vector(i))
            .for_each(|(w, x)| *w += x);
    }
    Ok(order)
}

/// The symmetry built for one vector, with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Result {
    pub signs: Symmetry,
    pub achieved_norm: f64,
    /// `sqrt(2 delta_p + 3 delta_p^2)`.
    pub bound: f64,
    pub delta_p: f64,
    /// Number of leading entries of `permutation` that receive `+1`.
    pub k: usize,
    pub permutation: Vec<usize>,
    /// `alpha_i^2 = |<e_i, v>|^2` for the normalized `v`, in coordinate order.
    pub alpha_sq: Vec<f64>,
    /// `beta_i^2 = ||p e_i||^2 - alpha_i^2`, in coordinate order.
    pub beta_sq: Vec<f64>,
    /// `sum_{j<k} alpha_{permutation[j]}^2`.
    pub prefix_alpha_sq: f64,
}

/// `sqrt(2 delta + 3 delta^2)`.
pub fn theorem1_bound(delta_p: f64) -> f64 {
    (2.0 * delta_p + 3.0 * delta_p * delta_p).sqrt()
}

/// Splitting of `p(v)` along `v` and its complement in range(p).
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// `p(v) / ||p(v)||`.
    pub unit: Vector,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// `x_i = p_1 q_i p(v)`.
    pub x: Vec<Vector>,
    /// `y_i = p_2 q_i p(v)`.
    pub y: Vec<Vector>,
}

fn normalized_range_vector(p: &Projection, v: &Vector) -> Result<Vector> {
    let u = p.apply(v)?;
    let norm = u.norm();
    if norm.is_nan() || norm <= 1e-10 {
        return Err(Error::Degenerate(format!("p(v) has norm {norm:e}")));
    }
    Ok(u.scaled(1.0 / norm))
}

/// `||f - v_i c||^2`: the part of `p e_i` orthogonal to `v`, in frame
/// coordinates. Subtracting `alpha_i^2` from `||p e_i||^2` instead loses all
/// precision when the two nearly agree.
fn complement_norm_sq(f: &[f64], vi: f64, c: &[f64]) -> f64 {
    f.iter().zip(c).map(|(fk, ck)| (fk - vi * ck).powi(2)).sum()
}

/// Ambient-coordinate decomposition `p q_i p(v) = x_i + y_i`, with `p_1` the
/// projection onto span(v) and `p_2 = p - p_1`.
pub fn decompose(p: &Projection, v: &Vector) -> Result<Decomposition> {
    let unit = normalized_range_vector(p, v)?;
    let frame = p.frame();
    let n = p.dim();
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let c = frame.coords_of(unit.as_slice());
    for i in 0..n {
        let vi = unit[i];
        let f = frame.column(i);
        let pe = frame.embed(&f);
        alpha.push(vi.abs());
        beta.push(complement_norm_sq(&f, vi, &c).sqrt());
        x.push(unit.scaled(vi * vi));
        y.push(Vector::new(
            pe.iter()
                .zip(unit.as_slice())
                .map(|(a, u)| vi * (a - vi * u))
                .collect(),
        ));
    }
    Ok(Decomposition {
        unit,
        alpha,
        beta,
        x,
        y,
    })
}

/// A diagonal symmetry `s` with `||p s p v|| <= sqrt(2 delta_p + 3 delta_p^2)`.
///
/// `v` is first replaced by `p(v)/||p(v)||`. The pieces `y_i` are formed in
/// frame coordinates, greedily rearranged, and `s` is `+1` on the shortest
/// prefix whose `alpha^2` mass lies within `delta_p/2` of `1/2`.
pub fn theorem1_symmetry(p: &Projection, v: &Vector) -> Result<Theorem1Result> {
    let unit = normalized_range_vector(p, v)?;
    let frame = p.frame();
    let n = p.dim();
    let c = frame.coords_of(unit.as_slice());
    let columns = frame.columns();

    let diag: Vec<f64> = columns.iter().map(|f| dot(f, f)).collect();
    let delta_p = diag.iter().copied().fold(0.0, f64::max);
    let alpha_sq: Vec<f64> = unit.as_slice().iter().map(|x| x * x).collect();
    let beta_sq: Vec<f64> = columns
        .iter()
        .zip(unit.as_slice())
        .map(|(f, &vi)| complement_norm_sq(f, vi, &c))
        .collect();

    let y: Vec<Vec<f64>> = columns
        .iter()
        .zip(unit.as_slice())
        .map(|(f, &vi)| f.iter().zip(&c).map(|(fk, ck)| vi * (fk - vi * ck)).collect())
        .collect();
    let total: f64 = y.iter().map(|yi| dot(yi, yi).sqrt()).sum();
    // The pieces sum to (1 - sum alpha^2) c, which is rounding noise on a unit scale.
    let family = ZeroSumFamily::from_raw(y, DEFAULT_SUM_REL_TOL * total.max(1.0))?;
    let permutation = greedy_rearrange(&family)?;

    let mut prefix = 0.0f64;
    let mut cut = None;
    for k in 0..=n {
        if (0.5 - prefix).abs() <= delta_p / 2.0 + CUT_TOL {
            cut = Some((k, prefix));
            break;
        }
        if k < n {
            prefix += alpha_sq[permutation[k]];
        }
    }
    let (k, prefix_alpha_sq) = cut.ok_or_else(|| {
        Error::Numerical("no prefix of the rearranged alpha^2 lands within delta_p/2 of 1/2".into())
    })?;

    let mut plus = vec![false; n];
    for &i in &permutation[..k] {
        plus[i] = true;
    }
    let signs = Symmetry::from_plus_set(&plus);
    let achieved_norm = apply_psp(p, &signs, &unit)?.norm();
    Ok(Theorem1Result {
        signs,
        achieved_norm,
        bound: theorem1_bound(delta_p),
        delta_p,
        k,
        permutation,
        alpha_sq,
        beta_sq,
        prefix_alpha_sq,
    })
}

/// `p q_i p(v)` for every `i`, from the dense projection matrix.
pub fn dense_pieces(p: &Projection, v: &Vector) -> Result<Vec<Vector>> {
    let unit = normalized_range_vector(p, v)?;
    let pm = materialize(p);
    let n = p.dim();
    Ok((0..n)
        .map(|i| Vector::new((0..n).map(|r| pm.get(r, i) * unit[i]).collect()))
        .collect())
}
