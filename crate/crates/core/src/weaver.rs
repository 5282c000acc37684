//! The explicit counterexample projection and its exact certificate.
//!
//! For a parameter `m` the ambient basis splits into four blocks:
//! `a_i` (`m^2` vectors), `b_i` (`2m+1`), `c_ij` for `i < j` (`m(2m+1)`) and
//! `d_ij` (`(2m+1)(m+1)^2`). The projection `p` has rank `2m+2` and is given by
//! an explicit orthonormal frame `v_0, ..., v_{2m+1}` whose entries lie in
//! `Q(sqrt((m-1)/(m+1)))`.
//!
//! The certificate uses that `||p s p v_0||^2` depends on a symmetry `s` only
//! through the number of `+1` signs on the `a` block and on the `b` block, so
//! an exhaustive minimum over all symmetries reduces to an `(alpha, beta)`
//! lattice of `(m^2 + 1)(2m + 2)` cells, all evaluated exactly.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{QuadExt, Rational};
use crate::linalg::{Projection, Symmetry, Vector};

/// Smallest `m` for which the construction's claims are asserted.
pub const CLAIMS_MIN_M: u32 = 6;

/// The construction parameter `m >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeaverParams {
    m: u32,
}

impl WeaverParams {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("m must be at least 2, got {m}")));
        }
        if m > 1 << 12 {
            return Err(Error::InvalidArgument(format!("m = {m} is too large to index")));
        }
        Ok(WeaverParams { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    fn mu(&self) -> usize {
        self.m as usize
    }

    /// Whether `m` is in the range where the construction's inequalities are claimed.
    pub fn claims_apply(&self) -> bool {
        self.m >= CLAIMS_MIN_M
    }

    pub fn a_count(&self) -> usize {
        self.mu() * self.mu()
    }

    pub fn b_count(&self) -> usize {
        2 * self.mu() + 1
    }

    pub fn c_count(&self) -> usize {
        let b = self.b_count();
        b * (b - 1) / 2
    }

    /// Number of `d_ij` per row `i`.
    pub fn d_per_row(&self) -> usize {
        (self.mu() + 1) * (self.mu() + 1)
    }

    pub fn d_count(&self) -> usize {
        self.b_count() * self.d_per_row()
    }

    /// Sum of the four block sizes.
    pub fn block_dimension(&self) -> usize {
        self.a_count() + self.b_count() + self.c_count() + self.d_count()
    }

    /// Rank of the projection: `2m + 2`.
    pub fn rank(&self) -> usize {
        2 * self.mu() + 2
    }

    /// The radicand `(m - 1)/(m + 1)`.
    pub fn rho(&self) -> Rational {
        Rational::new(i64::from(self.m) - 1, i64::from(self.m) + 1)
    }

    fn m_rat(&self) -> Rational {
        Rational::from_integer(i64::from(self.m))
    }
}

/// `2m^3 + 8m^2 + 7m + 2`.
pub fn dimension(m: u64) -> u64 {
    2 * m * m * m + 8 * m * m + 7 * m + 2
}

/// The four coordinate blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    A,
    B,
    C,
    D,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::A, Block::B, Block::C, Block::D];

    /// The first index of the block; all members share one row norm.
    pub fn representative(self) -> BasisIndex {
        match self {
            Block::A => BasisIndex::A(1),
            Block::B => BasisIndex::B(1),
            Block::C => BasisIndex::C(1, 2),
            Block::D => BasisIndex::D(1, 1),
        }
    }
}

/// A basis vector, with the 1-based indices of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisIndex {
    A(usize),
    B(usize),
    /// `c_ij` with `i < j`.
    C(usize, usize),
    D(usize, usize),
}

impl BasisIndex {
    pub fn block(&self) -> Block {
        match self {
            BasisIndex::A(_) => Block::A,
            BasisIndex::B(_) => Block::B,
            BasisIndex::C(..) => Block::C,
            BasisIndex::D(..) => Block::D,
        }
    }

    pub fn is_valid(&self, params: &WeaverParams) -> bool {
        let b = params.b_count();
        match *self {
            BasisIndex::A(i) => (1..=params.a_count()).contains(&i),
            BasisIndex::B(i) => (1..=b).contains(&i),
            BasisIndex::C(i, j) => 1 <= i && i < j && j <= b,
            BasisIndex::D(i, j) => (1..=b).contains(&i) && (1..=params.d_per_row()).contains(&j),
        }
    }

    /// Position in the fixed order: A block, B block, C lexicographic, D lexicographic.
    pub fn position(&self, params: &WeaverParams) -> Result<usize> {
        if !self.is_valid(params) {
            return Err(Error::InvalidArgument(format!("{self:?} out of range for m = {}", params.m)));
        }
        let a = params.a_count();
        let b = params.b_count();
        let c = params.c_count();
        Ok(match *self {
            BasisIndex::A(i) => i - 1,
            BasisIndex::B(i) => a + i - 1,
            BasisIndex::C(i, j) => a + b + c_row_offset(b, i) + (j - i - 1),
            BasisIndex::D(i, j) => a + b + c + (i - 1) * params.d_per_row() + (j - 1),
        })
    }

    pub fn from_position(params: &WeaverParams, pos: usize) -> Result<BasisIndex> {
        let a = params.a_count();
        let b = params.b_count();
        let c = params.c_count();
        let d = params.d_count();
        if pos < a {
            return Ok(BasisIndex::A(pos + 1));
        }
        let pos = pos - a;
        if pos < b {
            return Ok(BasisIndex::B(pos + 1));
        }
        let pos = pos - b;
        if pos < c {
            let mut i = 1;
            while c_row_offset(b, i + 1) <= pos {
                i += 1;
            }
            return Ok(BasisIndex::C(i, i + 1 + pos - c_row_offset(b, i)));
        }
        let pos = pos - c;
        if pos < d {
            let per = params.d_per_row();
            return Ok(BasisIndex::D(pos / per + 1, pos % per + 1));
        }
        Err(Error::InvalidArgument(format!(
            "position {} beyond dimension {}",
            pos + a + b + c,
            params.block_dimension()
        )))
    }
}

/// Number of `c` coordinates in rows `1..i`.
fn c_row_offset(b: usize, i: usize) -> usize {
    (i - 1) * b - (i - 1) * i / 2
}

/// Exact entry `<v_k, x>` of the frame.
pub fn frame_entry(params: &WeaverParams, k: usize, x: BasisIndex) -> QuadExt {
    let rho = params.rho();
    let m = params.m_rat();
    let m1 = &m + &Rational::one();
    let zero = Rational::zero();
    let rational = |r: Rational| QuadExt::rational(r, &rho).expect("radicand is non-negative");
    let inv = |r: &Rational| r.inv().expect("m >= 2");
    if k == 0 {
        return match x {
            BasisIndex::A(_) | BasisIndex::B(_) => rational(inv(&m1)),
            _ => rational(zero),
        };
    }
    match x {
        BasisIndex::A(_) => rational(-inv(&(&(&m * &m) * &m1))),
        BasisIndex::B(j) if j == k => rational(inv(&m1)),
        BasisIndex::C(_, j) if j == k => rational(inv(&(&m * &m1))),
        BasisIndex::C(i, _) if i == k => rational(-inv(&(&m * &m1))),
        BasisIndex::D(i, _) if i == k => QuadExt::new(zero, inv(&m), rho).expect("radicand is non-negative"),
        _ => rational(zero),
    }
}

/// The exact frame `v_0, ..., v_{2m+1}`, stored sparsely by position.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactFrame {
    params: WeaverParams,
    vectors: Vec<Vec<(usize, QuadExt)>>,
}

/// Builds the frame vectors entry by entry.
pub fn build_frame(params: &WeaverParams) -> ExactFrame {
    let b = params.b_count();
    let pos = |x: BasisIndex| x.position(params).expect("index in range");
    let mut vectors = Vec::with_capacity(params.rank());

    let mut support: Vec<BasisIndex> = (1..=params.a_count()).map(BasisIndex::A).collect();
    support.extend((1..=b).map(BasisIndex::B));
    vectors.push(support);

    for i in 1..=b {
        let mut support: Vec<BasisIndex> = (1..=params.a_count()).map(BasisIndex::A).collect();
        support.push(BasisIndex::B(i));
        support.extend((1..i).map(|j| BasisIndex::C(j, i)));
        support.extend((i + 1..=b).map(|j| BasisIndex::C(i, j)));
        support.extend((1..=params.d_per_row()).map(|j| BasisIndex::D(i, j)));
        vectors.push(support);
    }

    let vectors = vectors
        .into_iter()
        .enumerate()
        .map(|(k, support)| {
            let mut entries: Vec<(usize, QuadExt)> = support
                .into_iter()
                .map(|x| (pos(x), frame_entry(params, k, x)))
                .collect();
            entries.sort_by_key(|(p, _)| *p);
            entries
        })
        .collect();
    ExactFrame {
        params: *params,
        vectors,
    }
}

impl ExactFrame {
    pub fn params(&self) -> &WeaverParams {
        &self.params
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.params.block_dimension()
    }

    /// Nonzero entries of `v_k` as (position, value), sorted by position.
    pub fn support(&self, k: usize) -> &[(usize, QuadExt)] {
        &self.vectors[k]
    }

    pub fn entry(&self, k: usize, x: BasisIndex) -> Result<QuadExt> {
        let pos = x.position(&self.params)?;
        let rho = self.params.rho();
        Ok(match self.vectors[k].binary_search_by_key(&pos, |(p, _)| *p) {
            Ok(idx) => self.vectors[k][idx].1.clone(),
            Err(_) => QuadExt::zero(&rho)?,
        })
    }

    /// Overwrites one entry (zero values are dropped).
    pub fn set_entry(&mut self, k: usize, x: BasisIndex, value: QuadExt) -> Result<()> {
        let pos = x.position(&self.params)?;
        let v = &mut self.vectors[k];
        match v.binary_search_by_key(&pos, |(p, _)| *p) {
            Ok(idx) if value.is_zero() => {
                v.remove(idx);
            }
            Ok(idx) => v[idx].1 = value,
            Err(_) if value.is_zero() => {}
            Err(idx) => v.insert(idx, (pos, value)),
        }
        Ok(())
    }

    /// Exact `<v_k, v_l>` by a sparse merge.
    pub fn inner(&self, k: usize, l: usize) -> Result<QuadExt> {
        let (x, y) = (&self.vectors[k], &self.vectors[l]);
        let mut acc = QuadExt::zero(&self.params.rho())?;
        let (mut i, mut j) = (0, 0);
        while i < x.len() && j < y.len() {
            match x[i].0.cmp(&y[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    acc = acc.add(&x[i].1.mul(&y[j].1)?)?;
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(acc)
    }

    /// The exact Gram matrix of the frame.
    pub fn exact_gram(&self) -> Result<Vec<Vec<QuadExt>>> {
        let r = self.rank();
        (0..r)
            .map(|k| (0..r).map(|l| self.inner(k, l)).collect())
            .collect()
    }

    /// Dense floating rows of `v_k`.
    pub fn float_row(&self, k: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.dim()];
        for (pos, value) in &self.vectors[k] {
            row[*pos] = value.to_f64();
        }
        row
    }

    /// The floating projection onto the span of the frame.
    pub fn to_projection(&self) -> Result<Projection> {
        let rows = (0..self.rank()).map(|k| self.float_row(k)).collect();
        Projection::from_rows(self.dim(), rows)
    }

    /// `v_0` as a floating vector.
    pub fn v0(&self) -> Vector {
        Vector::new(self.float_row(0))
    }
}

/// True iff the exact Gram matrix is the identity.
pub fn verify_orthonormal(frame: &ExactFrame) -> bool {
    let r = frame.rank();
    (0..r).into_par_iter().all(|k| {
        (k..r).all(|l| match frame.inner(k, l) {
            Ok(g) => g.to_rational() == Some(if k == l { Rational::one() } else { Rational::zero() }),
            Err(_) => false,
        })
    })
}

/// Exact `||p e_x||^2 = sum_k <e_x, v_k>^2`, evaluated from the frame entries.
pub fn row_norm_sq(params: &WeaverParams, x: BasisIndex) -> Result<Rational> {
    if !x.is_valid(params) {
        return Err(Error::InvalidArgument(format!("{x:?} out of range for m = {}", params.m)));
    }
    let rho = params.rho();
    let mut acc = QuadExt::zero(&rho)?;
    for k in 0..params.rank() {
        let e = frame_entry(params, k, x);
        acc = acc.add(&e.mul(&e)?)?;
    }
    acc.to_rational()
        .ok_or_else(|| Error::Numerical(format!("row norm of {x:?} is irrational")))
}

/// The closed-form row norms: `1/(m+1)^2 + (2m+1)/(m^4 (m+1)^2)`, `2/(m+1)^2`,
/// `2/(m^2 (m+1)^2)`, `(m-1)/(m^2 (m+1))`.
pub fn row_norm_sq_closed_form(params: &WeaverParams, block: Block) -> Rational {
    let m = params.m_rat();
    let m1 = &m + &Rational::one();
    let m1sq = m1.square();
    let msq = m.square();
    let inv = |r: Rational| r.inv().expect("m >= 2");
    match block {
        Block::A => {
            inv(m1sq.clone()) + Rational::from_integer(2 * i64::from(params.m) + 1) * inv(&msq.square() * &m1sq)
        }
        Block::B => Rational::from_integer(2) * inv(m1sq),
        Block::C => Rational::from_integer(2) * inv(&msq * &m1sq),
        Block::D => (&m - &Rational::one()) * inv(&msq * &m1),
    }
}

/// Exact row norms of each block's representative.
pub fn block_row_norms(params: &WeaverParams) -> Result<Vec<(Block, Rational)>> {
    Block::ALL
        .iter()
        .map(|&b| Ok((b, row_norm_sq(params, b.representative())?)))
        .collect()
}

/// Exact `delta_p`: the largest block row norm.
pub fn delta_p_exact(params: &WeaverParams) -> Result<Rational> {
    Ok(block_row_norms(params)?
        .into_iter()
        .map(|(_, r)| r)
        .max()
        .expect("four blocks"))
}

/// Signs of a symmetry on the `a` and `b` blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignProfile {
    eps: Vec<i8>,
    eps_prime: Vec<i8>,
}

impl SignProfile {
    pub fn new(params: &WeaverParams, eps: Vec<i8>, eps_prime: Vec<i8>) -> Result<Self> {
        if eps.len() != params.a_count() {
            return Err(Error::DimensionMismatch {
                expected: params.a_count(),
                found: eps.len(),
            });
        }
        if eps_prime.len() != params.b_count() {
            return Err(Error::DimensionMismatch {
                expected: params.b_count(),
                found: eps_prime.len(),
            });
        }
        if eps.iter().chain(&eps_prime).any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("profile signs must be +1 or -1".into()));
        }
        Ok(SignProfile { eps, eps_prime })
    }

    /// Restriction of a full symmetry to the `a` and `b` blocks.
    pub fn from_symmetry(params: &WeaverParams, s: &Symmetry) -> Result<Self> {
        if s.len() != params.block_dimension() {
            return Err(Error::DimensionMismatch {
                expected: params.block_dimension(),
                found: s.len(),
            });
        }
        let a = params.a_count();
        let b = params.b_count();
        SignProfile::new(params, s.signs()[..a].to_vec(), s.signs()[a..a + b].to_vec())
    }

    pub fn eps(&self) -> &[i8] {
        &self.eps
    }

    pub fn eps_prime(&self) -> &[i8] {
        &self.eps_prime
    }

    /// Number of `+1` signs on the `a` block.
    pub fn alpha(&self) -> usize {
        self.eps.iter().filter(|&&s| s > 0).count()
    }

    /// Number of `+1` signs on the `b` block.
    pub fn beta(&self) -> usize {
        self.eps_prime.iter().filter(|&&s| s > 0).count()
    }

    pub fn negated(&self) -> Self {
        SignProfile {
            eps: self.eps.iter().map(|s| -s).collect(),
            eps_prime: self.eps_prime.iter().map(|s| -s).collect(),
        }
    }

    /// A full symmetry agreeing with this profile, with `c`/`d` signs taken
    /// from `rest` in position order.
    pub fn extend(&self, params: &WeaverParams, rest: impl IntoIterator<Item = i8>) -> Result<Symmetry> {
        let mut signs = self.eps.clone();
        signs.extend_from_slice(&self.eps_prime);
        signs.extend(rest.into_iter().take(params.c_count() + params.d_count()));
        if signs.len() != params.block_dimension() {
            return Err(Error::DimensionMismatch {
                expected: params.block_dimension(),
                found: signs.len(),
            });
        }
        Symmetry::new(signs)
    }
}

/// Frame coordinates of `p s p v_0`: `c0 = (sum eps + sum eps')/(m+1)^2` and
/// `c_i = (-sum eps / m^2 + eps'_i)/(m+1)^2`.
pub fn psp_v0_coeffs(params: &WeaverParams, profile: &SignProfile) -> Result<(Rational, Vec<Rational>)> {
    if profile.eps.len() != params.a_count() || profile.eps_prime.len() != params.b_count() {
        return Err(Error::InvalidArgument("profile does not match m".into()));
    }
    let m1sq = (params.m_rat() + Rational::one()).square();
    let inv_m1sq = m1sq.inv()?;
    let sum_a = profile.eps.iter().map(|&s| i64::from(s)).sum::<i64>();
    let sum_b = profile.eps_prime.iter().map(|&s| i64::from(s)).sum::<i64>();
    let c0 = Rational::from_integer(sum_a + sum_b) * &inv_m1sq;
    let a_term = -(Rational::from_integer(sum_a) * params.m_rat().square().inv()?);
    let cs = profile
        .eps_prime
        .iter()
        .map(|&e| (&a_term + &Rational::from_integer(i64::from(e))) * &inv_m1sq)
        .collect();
    Ok((c0, cs))
}

/// `||p s p v_0||^2` for any symmetry with `alpha` plus signs on `a` and
/// `beta` plus signs on `b`.
pub fn psp_v0_norm_sq(params: &WeaverParams, alpha: usize, beta: usize) -> Result<Rational> {
    let a = params.a_count();
    let b = params.b_count();
    if alpha > a || beta > b {
        return Err(Error::InvalidArgument(format!(
            "counts (alpha, beta) = ({alpha}, {beta}) outside [0, {a}] x [0, {b}]"
        )));
    }
    let s = 2 * alpha as i64 - a as i64;
    let t = 2 * beta as i64 - b as i64;
    let inv_m1sq = (params.m_rat() + Rational::one()).square().inv()?;
    let a_term = -(Rational::from_integer(s) * params.m_rat().square().inv()?);
    let c0 = Rational::from_integer(s + t) * &inv_m1sq;
    let c_plus = (&a_term + &Rational::one()) * &inv_m1sq;
    let c_minus = (&a_term - &Rational::one()) * &inv_m1sq;
    Ok(c0.square()
        + Rational::from_integer(beta as i64) * c_plus.square()
        + Rational::from_integer((b - beta) as i64) * c_minus.square())
}

/// Outcome of the exhaustive certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    FalsifiesA,
    Inconclusive,
}

/// Lattice cell `(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub alpha: usize,
    pub beta: usize,
}

/// Exact minimum of `||p s p v_0||^2` over all symmetries, compared to `(2 delta_p)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub m: u32,
    pub dimension: u64,
    pub delta_p: Rational,
    pub two_delta_p: Rational,
    pub min_norm_sq: Rational,
    pub argmin: Cell,
    /// The two-branch lower bound `(delta_p/4) min(m^2-4m-2, sqrt(2m+1))`; only for `m >= 6`.
    pub paper_branch_bound: Option<f64>,
    pub verdict: Verdict,
}

impl CertificateReport {
    /// `(2 delta_p)^2`, the squared threshold.
    pub fn threshold_sq(&self) -> Rational {
        self.two_delta_p.square()
    }
}

#[derive(Serialize)]
struct CertificateJson<'a> {
    m: u32,
    dimension: u64,
    delta_p: &'a Rational,
    delta_p_decimal: f64,
    two_delta_p: &'a Rational,
    two_delta_p_decimal: f64,
    threshold_sq: Rational,
    min_norm_sq: &'a Rational,
    min_norm_sq_decimal: f64,
    min_norm_decimal: f64,
    argmin: Cell,
    paper_branch_bound: Option<f64>,
    verdict: Verdict,
}

impl Serialize for CertificateReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CertificateJson {
            m: self.m,
            dimension: self.dimension,
            delta_p: &self.delta_p,
            delta_p_decimal: self.delta_p.to_f64(),
            two_delta_p: &self.two_delta_p,
            two_delta_p_decimal: self.two_delta_p.to_f64(),
            threshold_sq: self.threshold_sq(),
            min_norm_sq: &self.min_norm_sq,
            min_norm_sq_decimal: self.min_norm_sq.to_f64(),
            min_norm_decimal: self.min_norm_sq.to_f64().sqrt(),
            argmin: self.argmin,
            paper_branch_bound: self.paper_branch_bound,
            verdict: self.verdict,
        }
        .serialize(serializer)
    }
}

/// Exhaustive exact minimum over the `(alpha, beta)` lattice.
///
/// Rows are evaluated in parallel; the reduction orders by value, then by
/// `(alpha, beta)`, so the result does not depend on the worker count.
pub fn min_over_symmetries_v0(params: &WeaverParams) -> Result<CertificateReport> {
    let a = params.a_count();
    let b = params.b_count();
    let best = (0..=a)
        .into_par_iter()
        .map(|alpha| -> Result<(Rational, Cell)> {
            let mut row_best: Option<(Rational, Cell)> = None;
            for beta in 0..=b {
                let v = psp_v0_norm_sq(params, alpha, beta)?;
                let cand = (v, Cell { alpha, beta });
                row_best = Some(match row_best {
                    Some(cur) if cur <= cand => cur,
                    _ => cand,
                });
            }
            Ok(row_best.expect("beta range is nonempty"))
        })
        .try_reduce_with(|x, y| Ok(if x <= y { x } else { y }))
        .expect("alpha range is nonempty")?;

    let delta_p = delta_p_exact(params)?;
    let two_delta_p = Rational::from_integer(2) * &delta_p;
    let verdict = if best.0 > two_delta_p.square() {
        Verdict::FalsifiesA
    } else {
        Verdict::Inconclusive
    };
    Ok(CertificateReport {
        m: params.m,
        dimension: dimension(u64::from(params.m)),
        delta_p,
        two_delta_p,
        min_norm_sq: best.0,
        argmin: best.1,
        paper_branch_bound: paper_overall_bound(params).ok(),
        verdict,
    })
}

/// Lower bound on `||p s p v_0||` from the two inequality chains, for a
/// normalized `alpha <= m^2/2`.
///
/// Below `m^2/4` the projection onto `v_0` gives `(m^2-4m-2)/4 * delta_p`;
/// from `m^2/4` on, the projection onto the span of `v_1..v_{2m+1}` gives
/// `sqrt(2m+1) * 2 alpha / (m^2 (m+1)^2)`.
pub fn paper_branch_bound(params: &WeaverParams, alpha: usize) -> Result<f64> {
    require_claims(params)?;
    let a = params.a_count();
    if 2 * alpha > a {
        return Err(Error::InvalidArgument(format!(
            "alpha = {alpha} outside the normalized range [0, m^2/2]"
        )));
    }
    let m = f64::from(params.m);
    let delta = 2.0 / ((m + 1.0) * (m + 1.0));
    Ok(if 4 * alpha < a {
        (m * m - 4.0 * m - 2.0) / 4.0 * delta
    } else {
        (2.0 * m + 1.0).sqrt() * 2.0 * alpha as f64 / (m * m * (m + 1.0) * (m + 1.0))
    })
}

/// `(delta_p / 4) * min(m^2 - 4m - 2, sqrt(2m+1))`.
pub fn paper_overall_bound(params: &WeaverParams) -> Result<f64> {
    require_claims(params)?;
    let m = f64::from(params.m);
    let delta = 2.0 / ((m + 1.0) * (m + 1.0));
    Ok(delta / 4.0 * (m * m - 4.0 * m - 2.0).min((2.0 * m + 1.0).sqrt()))
}

fn require_claims(params: &WeaverParams) -> Result<()> {
    if !params.claims_apply() {
        return Err(Error::InvalidArgument(format!(
            "the branch bound needs m >= {CLAIMS_MIN_M}, got {}",
            params.m
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: u32) -> WeaverParams {
        WeaverParams::new(m).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn params_validation() {
        assert!(WeaverParams::new(1).is_err());
        assert!(WeaverParams::new(2).is_ok());
        assert!(!p(5).claims_apply());
        assert!(p(6).claims_apply());
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension(6), 764);
        assert_eq!(dimension(8), 1594);
        for m in 2..=20 {
            assert_eq!(p(m).block_dimension() as u64, dimension(u64::from(m)), "m = {m}");
        }
    }

    #[test]
    fn positions_are_a_bijection() {
        for m in [2, 3, 6] {
            let params = p(m);
            for pos in 0..params.block_dimension() {
                let x = BasisIndex::from_position(&params, pos).unwrap();
                assert!(x.is_valid(&params));
                assert_eq!(x.position(&params).unwrap(), pos);
            }
            assert!(BasisIndex::from_position(&params, params.block_dimension()).is_err());
        }
        let params = p(6);
        assert!(BasisIndex::C(3, 3).position(&params).is_err());
        assert!(BasisIndex::D(14, 1).position(&params).is_err());
        assert!(BasisIndex::A(0).position(&params).is_err());
    }

    #[test]
    fn frame_entries_match_construction() {
        let params = p(6);
        let f = build_frame(&params);
        let rho = params.rho();
        let rat = |x: Rational| QuadExt::rational(x, &rho).unwrap();
        assert_eq!(f.entry(0, BasisIndex::A(1)).unwrap(), rat(r(1, 7)));
        assert_eq!(f.entry(0, BasisIndex::B(13)).unwrap(), rat(r(1, 7)));
        assert!(f.entry(0, BasisIndex::C(1, 2)).unwrap().is_zero());
        assert_eq!(f.entry(3, BasisIndex::C(1, 3)).unwrap(), rat(r(1, 42)));
        assert_eq!(f.entry(3, BasisIndex::C(3, 5)).unwrap(), rat(r(-1, 42)));
        assert!(f.entry(3, BasisIndex::C(1, 2)).unwrap().is_zero());
        assert_eq!(f.entry(3, BasisIndex::A(20)).unwrap(), rat(r(-1, 252)));
        assert_eq!(
            f.entry(1, BasisIndex::D(1, 1)).unwrap(),
            QuadExt::new(Rational::zero(), r(1, 6), r(5, 7)).unwrap()
        );
        assert!(f.entry(2, BasisIndex::D(1, 1)).unwrap().is_zero());
        assert_eq!(f.rank(), 14);
        assert_eq!(f.support(0).len(), 36 + 13);
        assert_eq!(f.support(1).len(), 36 + 1 + 12 + 49);
    }

    #[test]
    fn orthonormal_and_perturbation_detected() {
        let params = p(6);
        let mut f = build_frame(&params);
        assert!(verify_orthonormal(&f));
        let rho = params.rho();
        f.set_entry(0, BasisIndex::A(1), QuadExt::rational(r(1, 8), &rho).unwrap())
            .unwrap();
        assert!(!verify_orthonormal(&f));
    }

    #[test]
    fn small_m_frames_are_orthonormal() {
        for m in 2..=5 {
            assert!(verify_orthonormal(&build_frame(&p(m))), "m = {m}");
        }
    }

    #[test]
    fn row_norm_examples() {
        let params = p(6);
        assert_eq!(row_norm_sq(&params, BasisIndex::B(1)).unwrap(), r(2, 49));
        assert_eq!(row_norm_sq(&params, BasisIndex::D(1, 1)).unwrap(), r(5, 252));
        assert_eq!(row_norm_sq(&params, BasisIndex::A(1)).unwrap(), r(1309, 63504));
        assert_eq!(row_norm_sq(&params, BasisIndex::C(2, 9)).unwrap(), r(2, 1764));
        assert!(row_norm_sq(&params, BasisIndex::B(14)).is_err());
    }

    #[test]
    fn delta_p_examples() {
        assert_eq!(delta_p_exact(&p(6)).unwrap(), r(2, 49));
        assert_eq!(delta_p_exact(&p(8)).unwrap(), r(2, 81));
        assert_eq!(delta_p_exact(&p(10)).unwrap(), r(2, 121));
    }

    #[test]
    fn small_m_block_ranking_is_measured() {
        // Below m = 6 the ranking is measured, not asserted.
        for m in 2..6 {
            let params = p(m);
            let norms = block_row_norms(&params).unwrap();
            let max = delta_p_exact(&params).unwrap();
            assert!(norms.iter().any(|(_, v)| *v == max));
        }
    }

    #[test]
    fn coeff_examples() {
        let params = p(6);
        let all_plus = SignProfile::new(&params, vec![1; 36], vec![1; 13]).unwrap();
        let (c0, cs) = psp_v0_coeffs(&params, &all_plus).unwrap();
        assert_eq!(c0, Rational::one());
        assert!(cs.iter().all(Rational::is_zero));

        let mixed = SignProfile::new(&params, vec![1; 36], vec![-1; 13]).unwrap();
        let (c0, cs) = psp_v0_coeffs(&params, &mixed).unwrap();
        assert_eq!(c0, r(23, 49));
        assert!(cs.iter().all(|c| *c == r(-2, 49)));

        let (n0, ncs) = psp_v0_coeffs(&params, &mixed.negated()).unwrap();
        assert_eq!(n0, -c0);
        assert!(ncs.iter().zip(&cs).all(|(a, b)| *a == -b));
    }

    #[test]
    fn norm_sq_examples() {
        let params = p(6);
        assert_eq!(psp_v0_norm_sq(&params, 18, 6).unwrap(), r(14, 2401));
        assert_eq!(psp_v0_norm_sq(&params, 36, 13).unwrap(), Rational::one());
        assert_eq!(
            psp_v0_norm_sq(&params, 5, 2).unwrap(),
            psp_v0_norm_sq(&params, 31, 11).unwrap()
        );
        assert!(psp_v0_norm_sq(&params, 37, 0).is_err());
        assert!(psp_v0_norm_sq(&params, 0, 14).is_err());
    }

    #[test]
    fn certificate_examples() {
        let c6 = min_over_symmetries_v0(&p(6)).unwrap();
        assert_eq!(c6.min_norm_sq, r(14, 2401));
        assert_eq!(c6.argmin, Cell { alpha: 18, beta: 6 });
        assert_eq!(c6.verdict, Verdict::Inconclusive);

        let c8 = min_over_symmetries_v0(&p(8)).unwrap();
        assert_eq!(c8.min_norm_sq, r(2, 729));
        assert_eq!(c8.threshold_sq(), r(16, 6561));
        assert_eq!(c8.two_delta_p, r(4, 81));
        assert_eq!(c8.verdict, Verdict::FalsifiesA);

        assert_eq!(min_over_symmetries_v0(&p(7)).unwrap().verdict, Verdict::Inconclusive);
        assert_eq!(min_over_symmetries_v0(&p(3)).unwrap().paper_branch_bound, None);
    }

    #[test]
    fn certificate_json_carries_exact_strings() {
        let c8 = min_over_symmetries_v0(&p(8)).unwrap();
        let v = serde_json::to_value(&c8).unwrap();
        assert_eq!(v["min_norm_sq"], "2/729");
        assert_eq!(v["two_delta_p"], "4/81");
        assert_eq!(v["threshold_sq"], "16/6561");
        assert_eq!(v["verdict"], "FALSIFIES_A");
        assert_eq!(v["argmin"]["alpha"], 32);
    }

    #[test]
    fn branch_bound_examples() {
        let params = p(6);
        assert!((paper_branch_bound(&params, 0).unwrap() - 5.0 / 49.0).abs() < 1e-15);
        assert!((paper_branch_bound(&params, 9).unwrap() - 13f64.sqrt() / 98.0).abs() < 1e-15);
        assert!(paper_branch_bound(&params, 19).is_err());
        assert!(paper_branch_bound(&p(5), 0).is_err());
        let overall = paper_overall_bound(&p(8)).unwrap();
        assert!((overall - (2.0 / 81.0) / 4.0 * 17f64.sqrt()).abs() < 1e-15);
        assert!((overall - 0.02546).abs() < 1e-5);
    }
}
