//! Dense real vectors, symmetric matrices, orthonormal frames, projections
//! and diagonal symmetries.
//!
//! A projection is carried by an orthonormal frame `F` (rows span the range),
//! so `p = F^T F`. Operator norms of `p s p` are taken on the `r x r`
//! compression `F S F^T`, which has the same nonzero spectrum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension at or below which [`operator_norm`] uses cyclic Jacobi.
pub const JACOBI_MAX_DIM: usize = 256;
/// Jacobi stops once the off-diagonal Frobenius mass drops below this times `||M||_F`.
pub const JACOBI_REL_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Relative Rayleigh-quotient tolerance for the power-iteration fallback.
pub const POWER_REL_TOL: f64 = 1e-12;
pub const POWER_MAX_ITERS: usize = 100_000;
/// Gram defect accepted for floating frames.
pub const FRAME_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;

/// A dense real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    /// The `i`-th standard basis vector of `R^n`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm_sq(&self) -> f64 {
        dot(&self.0, &self.0)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, k: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * k).collect())
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// A real symmetric `n x n` matrix, dense row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixLayout {
    n: usize,
    entries: Vec<Vec<f64>>,
}

impl SymmetricMatrix {
    /// Checks symmetry to `1e-12 * max|entry|` and stores the symmetrized matrix.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        let scale = entries.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                asym = asym.max((entries[i * n + j] - entries[j * n + i]).abs());
            }
        }
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let mut m = SymmetricMatrix { n, entries };
        for i in 0..n {
            for j in 0..i {
                let avg = 0.5 * (m.entries[i * n + j] + m.entries[j * n + i]);
                m.entries[i * n + j] = avg;
                m.entries[j * n + i] = avg;
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        SymmetricMatrix::new(n, entries)
    }

    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymmetricMatrix::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    /// Wraps storage already known to be exactly symmetric.
    pub(crate) fn from_symmetric_unchecked(n: usize, entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        SymmetricMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `x^T M x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    /// Dense product `self * other`; the result is symmetric only when the
    /// factors commute, so it is returned as plain row-major storage.
    pub fn matmul(&self, other: &SymmetricMatrix) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                for j in 0..n {
                    out[i * n + j] += a * orow[j];
                }
            }
        }
        out
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &SymmetricMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn sub(&self, other: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(SymmetricMatrix::from_symmetric_unchecked(self.n, entries))
    }
}

impl Serialize for SymmetricMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixLayout {
            n: self.n,
            entries: (0..self.n).map(|i| self.row(i).to_vec()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymmetricMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let layout = MatrixLayout::deserialize(deserializer)?;
        if layout.entries.len() != layout.n {
            return Err(serde::de::Error::custom("row count does not match n"));
        }
        SymmetricMatrix::from_rows(&layout.entries).map_err(serde::de::Error::custom)
    }
}

/// `r` orthonormal rows of length `n`, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame {
    n: usize,
    rank: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FrameLayout {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl OrthonormalFrame {
    /// Builds a frame and checks the Gram matrix against the identity to [`FRAME_TOL`].
    pub fn new(n: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let frame = OrthonormalFrame::new_unchecked(n, rows)?;
        let defect = frame.gram_defect();
        if defect > FRAME_TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(frame)
    }

    /// Builds a row set of length-`n` vectors without checking orthonormality.
    pub fn new_unchecked(n: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rank = rows.len();
        let mut data = Vec::with_capacity(rank * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(OrthonormalFrame { n, rank, data })
    }

    pub fn empty(n: usize) -> Self {
        OrthonormalFrame {
            n,
            rank: 0,
            data: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.n..(k + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n.max(1)).take(self.rank)
    }

    /// Column `i`: the coordinates of `p(e_i)` in the frame basis.
    pub fn column(&self, i: usize) -> Vec<f64> {
        (0..self.rank).map(|k| self.data[k * self.n + i]).collect()
    }

    /// All columns, `n` vectors of length `r`.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.column(i)).collect()
    }

    /// `F x`, the frame coordinates of the projection of `x`.
    pub fn coords_of(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rank).map(|k| dot(self.row(k), x)).collect()
    }

    /// `F^T c`, the ambient vector with frame coordinates `c`.
    pub fn embed(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (k, ck) in c.iter().enumerate() {
            for (o, f) in out.iter_mut().zip(self.row(k)) {
                *o += ck * f;
            }
        }
        out
    }

    /// Largest entrywise deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let g = gram(self);
        let mut worst = 0.0f64;
        for i in 0..self.rank {
            for j in 0..self.rank {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.get(i, j) - target).abs());
            }
        }
        worst
    }

    /// The frame with ambient coordinates reordered: new coordinate `perm[i]`
    /// carries old coordinate `i`.
    pub fn permute_coordinates(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: perm.len(),
            });
        }
        let mut data = vec![0.0; self.data.len()];
        for k in 0..self.rank {
            for (i, &pi) in perm.iter().enumerate() {
                data[k * self.n + pi] = self.data[k * self.n + i];
            }
        }
        Ok(OrthonormalFrame {
            n: self.n,
            rank: self.rank,
            data,
        })
    }
}

impl Serialize for OrthonormalFrame {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FrameLayout {
            n: self.n,
            rows: self.rows().map(<[f64]>::to_vec).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrthonormalFrame {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let layout = FrameLayout::deserialize(deserializer)?;
        OrthonormalFrame::new(layout.n, layout.rows).map_err(serde::de::Error::custom)
    }
}

/// An orthogonal projection, carried by an orthonormal frame of its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Projection {
    frame: OrthonormalFrame,
}

impl Projection {
    pub fn new(frame: OrthonormalFrame) -> Result<Self> {
        let defect = frame.gram_defect();
        if defect > FRAME_TOL {
            return Err(Error::NotOrthonormal { defect });
        }
        Ok(Projection { frame })
    }

    pub fn from_rows(n: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        Projection::new(OrthonormalFrame::new(n, rows)?)
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| Vector::basis(n, i).into_inner()).collect();
        Projection {
            frame: OrthonormalFrame::new_unchecked(n, rows).expect("square identity"),
        }
    }

    pub fn frame(&self) -> &OrthonormalFrame {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.frame.n
    }

    pub fn rank(&self) -> usize {
        self.frame.rank
    }

    /// `<p e_i, e_i> = ||p e_i||^2`.
    pub fn diagonal(&self, i: usize) -> f64 {
        (0..self.frame.rank)
            .map(|k| {
                let x = self.frame.data[k * self.frame.n + i];
                x * x
            })
            .sum()
    }

    /// `p x`.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim(), x.dim())?;
        Ok(Vector(self.frame.embed(&self.frame.coords_of(x.as_slice()))))
    }

    pub fn permute_coordinates(&self, perm: &[usize]) -> Result<Self> {
        Ok(Projection {
            frame: self.frame.permute_coordinates(perm)?,
        })
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A diagonal symmetry `s = q - (1 - q)`, stored as its `+1`/`-1` diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Symmetry {
    signs: Vec<i8>,
}

impl Symmetry {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(format!("sign entry {bad} is not +1 or -1")));
        }
        Ok(Symmetry { signs })
    }

    pub fn identity(n: usize) -> Self {
        Symmetry { signs: vec![1; n] }
    }

    /// `+1` where `plus[i]` holds, `-1` elsewhere.
    pub fn from_plus_set(plus: &[bool]) -> Self {
        Symmetry {
            signs: plus.iter().map(|&b| if b { 1 } else { -1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, i: usize) -> f64 {
        f64::from(self.signs[i])
    }

    pub fn negated(&self) -> Self {
        Symmetry {
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    /// Indicator of the `+1` positions, i.e. the diagonal projection `q`.
    pub fn plus_mask(&self) -> Vec<bool> {
        self.signs.iter().map(|&s| s > 0).collect()
    }
}

impl TryFrom<Vec<i8>> for Symmetry {
    type Error = Error;
    fn try_from(signs: Vec<i8>) -> Result<Self> {
        Symmetry::new(signs)
    }
}

impl From<Symmetry> for Vec<i8> {
    fn from(s: Symmetry) -> Vec<i8> {
        s.signs
    }
}

/// Pairwise inner products of the frame rows.
pub fn gram(frame: &OrthonormalFrame) -> SymmetricMatrix {
    let r = frame.rank;
    let mut g = vec![0.0; r * r];
    for i in 0..r {
        for j in 0..=i {
            let v = dot(frame.row(i), frame.row(j));
            g[i * r + j] = v;
            g[j * r + i] = v;
        }
    }
    SymmetricMatrix::from_symmetric_unchecked(r, g)
}

/// The dense `n x n` matrix `P = F^T F`.
pub fn materialize(p: &Projection) -> SymmetricMatrix {
    let n = p.dim();
    let f = &p.frame;
    let mut out = vec![0.0; n * n];
    for k in 0..f.rank {
        let row = f.row(k);
        for i in 0..n {
            let ri = row[i];
            if ri == 0.0 {
                continue;
            }
            for j in 0..=i {
                out[i * n + j] += ri * row[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            out[j * n + i] = out[i * n + j];
        }
    }
    SymmetricMatrix::from_symmetric_unchecked(n, out)
}

/// `F diag(weights) F^T`, the compression of a diagonal operator onto range(p).
pub fn compress_diagonal(p: &Projection, weights: &[f64]) -> Result<SymmetricMatrix> {
    check_dim(p.dim(), weights.len())?;
    let f = &p.frame;
    let r = f.rank;
    let mut m = vec![0.0; r * r];
    for k in 0..r {
        let rk = f.row(k);
        for l in 0..=k {
            let rl = f.row(l);
            let v: f64 = rk
                .iter()
                .zip(rl)
                .zip(weights)
                .map(|((a, b), w)| a * b * w)
                .sum();
            m[k * r + l] = v;
            m[l * r + k] = v;
        }
    }
    Ok(SymmetricMatrix::from_symmetric_unchecked(r, m))
}

/// `F S F^T`; its operator norm equals `||p s p||`.
pub fn compress_psp(p: &Projection, s: &Symmetry) -> Result<SymmetricMatrix> {
    check_dim(p.dim(), s.len())?;
    let weights: Vec<f64> = s.signs.iter().map(|&x| f64::from(x)).collect();
    compress_diagonal(p, &weights)
}

/// `p s p v`.
pub fn apply_psp(p: &Projection, s: &Symmetry, v: &Vector) -> Result<Vector> {
    check_dim(p.dim(), s.len())?;
    check_dim(p.dim(), v.dim())?;
    let f = &p.frame;
    let mut u = f.embed(&f.coords_of(v.as_slice()));
    for (x, &sign) in u.iter_mut().zip(&s.signs) {
        if sign < 0 {
            *x = -*x;
        }
    }
    Ok(Vector(f.embed(&f.coords_of(&u))))
}

/// Eigensolver used by [`operator_norm_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Jacobi,
    PowerIteration,
}

/// Largest absolute eigenvalue of a symmetric matrix.
///
/// Cyclic Jacobi up to [`JACOBI_MAX_DIM`], power iteration on `M^2` above it.
pub fn operator_norm(m: &SymmetricMatrix) -> Result<f64> {
    if m.n <= JACOBI_MAX_DIM {
        operator_norm_with(m, EigenMethod::Jacobi)
    } else {
        operator_norm_with(m, EigenMethod::PowerIteration)
    }
}

pub fn operator_norm_with(m: &SymmetricMatrix, method: EigenMethod) -> Result<f64> {
    match method {
        EigenMethod::Jacobi => Ok(jacobi_eigenvalues(m)?
            .into_iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))),
        EigenMethod::PowerIteration => power_iteration_norm(m),
    }
}

/// All eigenvalues (unsorted) by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = m.n;
    let mut a = m.entries.clone();
    let fro = m.frobenius_norm();
    if fro == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let target = JACOBI_REL_TOL * fro;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    loop {
        let current = off(&a);
        if current <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            let est = (0..n).fold(0.0f64, |acc, i| acc.max(a[i * n + i].abs()));
            return Err(Error::NoConvergence {
                iterations: sweeps,
                last_estimate: est,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    Ok((0..n).map(|i| a[i * n + i]).collect())
}

fn power_iteration_norm(m: &SymmetricMatrix) -> Result<f64> {
    let n = m.n;
    if n == 0 || m.frobenius_norm() == 0.0 {
        return Ok(0.0);
    }
    // Deterministic start with no special alignment to coordinate axes.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + ((i as f64) * 0.618_033_988_75).fract()).collect();
    let norm = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    let mut rayleigh = 0.0f64;
    for iter in 0..POWER_MAX_ITERS {
        let mx = m.mul_vec(&x);
        let next = dot(&mx, &mx);
        let y = m.mul_vec(&mx);
        let ny = dot(&y, &y).sqrt();
        if ny == 0.0 {
            return Ok(next.sqrt());
        }
        if iter > 0 && (next - rayleigh).abs() <= POWER_REL_TOL * next {
            return Ok(next.sqrt());
        }
        rayleigh = next;
        x = y.into_iter().map(|v| v / ny).collect();
    }
    Err(Error::NoConvergence {
        iterations: POWER_MAX_ITERS,
        last_estimate: rayleigh.sqrt(),
    })
}

/// ChaCha8 generator for projection attempt `stream` under `seed`.
///
/// Instance generation is pinned to `rand_chacha` ChaCha8 plus the
/// `rand_distr` ziggurat normal sampler, so a seed reproduces the same frame.
pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const UNIT_VECTOR_STREAM: u64 = 1 << 63;

/// A rank-`r` projection on `R^n`: `r` standard Gaussian rows orthonormalized
/// by modified Gram-Schmidt with one reorthogonalization pass.
pub fn random_projection(n: usize, r: usize, seed: u64) -> Result<Projection> {
    if r > n {
        return Err(Error::InvalidArgument(format!("rank {r} exceeds dimension {n}")));
    }
    for attempt in 0u64.. {
        let mut rng = seeded_rng(seed, attempt);
        let raw: Vec<Vec<f64>> = (0..r)
            .map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        if let Some(rows) = orthonormalize(raw) {
            return Projection::from_rows(n, rows);
        }
    }
    unreachable!("attempt counter exhausted")
}

/// A Gaussian unit vector drawn from a stream disjoint from [`random_projection`].
pub fn random_unit_vector(n: usize, seed: u64) -> Vector {
    let mut rng = seeded_rng(seed, UNIT_VECTOR_STREAM);
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-12 || n == 0 {
            return Vector(v.into_iter().map(|x| x / norm.max(f64::MIN_POSITIVE)).collect());
        }
    }
}

/// Modified Gram-Schmidt, two passes per row. `None` on numerical rank loss.
fn orthonormalize(mut rows: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    for i in 0..rows.len() {
        let original = dot(&rows[i], &rows[i]).sqrt();
        for _pass in 0..2 {
            for j in 0..i {
                let (done, rest) = rows.split_at_mut(i);
                let proj = dot(&done[j], &rest[0]);
                for (x, q) in rest[0].iter_mut().zip(&done[j]) {
                    *x -= proj * q;
                }
            }
        }
        let norm = dot(&rows[i], &rows[i]).sqrt();
        if norm.is_nan() || norm <= 1e-8 * original || norm == 0.0 {
            return None;
        }
        rows[i].iter_mut().for_each(|x| *x /= norm);
    }
    Some(rows)
}
