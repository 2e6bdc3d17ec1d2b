//! Dense kernels and subspace algebra.
//!
//! Matrices are `nalgebra` dense matrices in column-major order. Complex
//! matrices whose imaginary parts are all exactly zero are decomposed in real
//! arithmetic, so real inputs always produce real bases.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{ComplexField, DMatrix, DVector, Schur};
use num_complex::Complex64;

use crate::{GeoError, Result};

#[allow(non_camel_case_types)]
pub type c64 = Complex64;
pub type CMat = DMatrix<c64>;
pub type RMat = DMatrix<f64>;
pub type CVec = DVector<c64>;

/// Rank and residual thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    /// Relative singular-value cutoff.
    pub rel: f64,
    /// Absolute residual bound for containment and friend checks.
    pub abs: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { rel: 1e-11, abs: 1e-8 }
    }
}

impl Tol {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel.is_finite() && rel > 0.0) {
            return Err(GeoError::InvalidTolerance(format!("rel must be > 0, got {rel}")));
        }
        if !(abs.is_finite() && abs >= 0.0) {
            return Err(GeoError::InvalidTolerance(format!("abs must be >= 0, got {abs}")));
        }
        Ok(Tol { rel, abs })
    }

    /// Same thresholds with a looser relative cutoff, used where the matrix
    /// is evaluated at a computed (perturbed) eigenvalue.
    pub fn loose(&self) -> Tol {
        Tol {
            rel: self.rel.max(self.abs),
            abs: self.abs,
        }
    }
}

pub fn cx(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

pub fn to_c(m: &RMat) -> CMat {
    m.map(|x| c64::new(x, 0.0))
}

pub fn re_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn im_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

pub fn max_imag(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

/// True when every imaginary part is exactly zero.
pub fn is_exactly_real(m: &CMat) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Realness predicate: largest imaginary magnitude is at most `tol.abs`.
pub fn is_real(m: &CMat, tol: Tol) -> bool {
    max_imag(m) <= tol.abs
}

pub fn all_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hstack(blocks: &[&CMat]) -> CMat {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[&CMat]) -> CMat {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(*b);
        at += b.nrows();
    }
    out
}

pub fn rhstack(blocks: &[&RMat]) -> RMat {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = RMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

pub fn rvstack(blocks: &[&RMat]) -> RMat {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = RMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(*b);
        at += b.nrows();
    }
    out
}

/// Singular values plus thin left and full right singular vectors.
struct Decomp {
    s: Vec<f64>,
    u: CMat,
    v: CMat,
    rank: usize,
}

/// One-sided Jacobi. Returns unsorted column norms, `A V` and the
/// accumulated `V` (with no rows unless `want_v`).
fn jacobi<T>(mut a: DMatrix<T>, want_v: bool) -> (Vec<f64>, DMatrix<T>, DMatrix<T>)
where
    T: ComplexField<RealField = f64>,
{
    let (r, c) = a.shape();
    let mut v = if want_v { DMatrix::<T>::identity(c, c) } else { DMatrix::<T>::zeros(0, c) };
    let eps = f64::EPSILON * r as f64;
    let frob = a.norm();
    if frob > 0.0 {
        a.unscale_mut(frob);
    }
    // Columns this small are left alone; rotating them loses unitarity.
    let negligible = (JACOBI_FLOOR * f64::EPSILON).powi(2);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.clone().modulus();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.unscale(g).conjugate();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for mat in [&mut a, &mut v] {
                    for k in 0..mat.nrows() {
                        let xp = mat[(k, p)].clone();
                        let xq = mat[(k, q)].clone() * phase.clone();
                        mat[(k, p)] = xp.clone().scale(cs) - xq.clone().scale(sn);
                        mat[(k, q)] = xp.scale(sn) + xq.scale(cs);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s = (0..c).map(|j| a.column(j).norm() * frob).collect();
    if frob > 0.0 {
        a.scale_mut(frob);
    }
    (s, a, v)
}

const JACOBI_SWEEPS: usize = 80;
const JACOBI_FLOOR: f64 = 1e-3;

/// Singular values (descending, one per column), left vectors for the
/// nonzero values and a full set of right vectors.
fn svd_generic<T>(m: DMatrix<T>) -> (Vec<f64>, DMatrix<T>, DMatrix<T>)
where
    T: ComplexField<RealField = f64>,
{
    let (r, c) = m.shape();
    let (s, av, v) = jacobi(m, true);
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let sorted: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let u = DMatrix::<T>::from_fn(r, c, |i, j| {
        let k = order[j];
        if s[k] > 0.0 {
            av[(i, k)].clone().unscale(s[k])
        } else {
            T::zero()
        }
    });
    let v = DMatrix::<T>::from_fn(c, c, |i, j| v[(i, order[j])].clone());
    (sorted, u, v)
}

fn decompose(m: &CMat, tol: Tol) -> Decomp {
    decompose_scaled(m, 0.0, tol)
}

/// As `decompose`, with the rank cutoff measured against `max(σ₁, scale)`.
fn decompose_scaled(m: &CMat, scale: f64, tol: Tol) -> Decomp {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Decomp {
            s: Vec::new(),
            u: CMat::zeros(r, 0),
            v: CMat::identity(c, c),
            rank: 0,
        };
    }
    let (s, u, v) = if is_exactly_real(m) {
        let (s, u, v) = svd_generic(re_part(m));
        (s, to_c(&u), to_c(&v))
    } else {
        svd_generic(m.clone())
    };
    let rank = count_above(&s, scale, tol, r.max(c));
    Decomp { s, u, v, rank }
}

/// Singular values (one per column, descending), left vectors (zero where
/// the value vanishes) and a full unitary matrix of right vectors.
pub fn svd(m: &CMat) -> (Vec<f64>, CMat, CMat) {
    let d = decompose(m, Tol::default());
    (d.s, d.u, d.v)
}

/// The `k` leading left singular vectors.
pub fn leading_left_vectors(m: &CMat, k: usize) -> CMat {
    let (_, u, _) = svd(m);
    u.columns(0, k).into_owned()
}

fn count_above(s: &[f64], scale: f64, tol: Tol, dim: usize) -> usize {
    let s1 = s.first().copied().unwrap_or(0.0).max(scale);
    if s1 <= 0.0 {
        return 0;
    }
    let thr = tol.rel * s1 * dim as f64;
    s.iter().take_while(|&&x| x > thr).count()
}

fn values_generic<T>(m: DMatrix<T>) -> Vec<f64>
where
    T: ComplexField<RealField = f64>,
{
    let tall = if m.nrows() < m.ncols() { m.adjoint() } else { m };
    let mut s = jacobi(tall, false).0;
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Vec::new();
    }
    if is_exactly_real(m) {
        values_generic(re_part(m))
    } else {
        values_generic(m.clone())
    }
}

pub fn norm2(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn rnorm2(m: &RMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    norm2(&to_c(m))
}

/// Ratio of extreme singular values; infinite for rank-deficient input.
pub fn cond(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

pub fn rank_of(m: &CMat, tol: Tol) -> usize {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return 0;
    }
    count_above(&singular_values(m), 0.0, tol, r.max(c))
}

/// Orthonormalize columns that are already known to be independent.
fn orthonormalize_full(x: CMat) -> CMat {
    let (r, c) = x.shape();
    if c == 0 {
        return CMat::zeros(r, 0);
    }
    if is_exactly_real(&x) {
        to_c(&re_part(&x).qr().q())
    } else {
        x.qr().q()
    }
}

pub fn kernel_basis(m: &CMat, tol: Tol) -> Subspace {
    let c = m.ncols();
    let d = decompose(m, tol);
    let basis = d.v.columns(d.rank, c - d.rank).into_owned();
    Subspace { ambient: c, basis }
}

pub fn image_basis(m: &CMat, tol: Tol) -> Subspace {
    image_basis_scaled(m, 0.0, tol)
}

/// Kernel with the rank cutoff taken relative to `max(σ₁, scale)`, for
/// matrices that may be numerically zero.
pub fn kernel_basis_scaled(m: &CMat, scale: f64, tol: Tol) -> Subspace {
    let c = m.ncols();
    let d = decompose_scaled(m, scale, tol);
    let basis = d.v.columns(d.rank, c - d.rank).into_owned();
    Subspace { ambient: c, basis }
}

/// Image with the rank cutoff taken relative to `max(σ₁, scale)`.
pub fn image_basis_scaled(m: &CMat, scale: f64, tol: Tol) -> Subspace {
    let r = m.nrows();
    let d = decompose_scaled(m, scale, tol);
    let basis = orthonormalize_full(d.u.columns(0, d.rank).into_owned());
    Subspace { ambient: r, basis }
}

pub fn pinv(m: &CMat, tol: Tol) -> CMat {
    let (r, c) = m.shape();
    let d = decompose(m, tol);
    let mut out = CMat::zeros(c, r);
    for k in 0..d.rank {
        let vk = d.v.column(k);
        let uk = d.u.column(k);
        out += (vk * uk.adjoint()) * c64::new(1.0 / d.s[k], 0.0);
    }
    out
}

pub fn rpinv(m: &RMat, tol: Tol) -> RMat {
    re_part(&pinv(&to_c(m), tol))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

/// `W - F X` with each entry accumulated in double-double.
pub fn residual_compensated(w: &RMat, f: &RMat, x: &RMat) -> RMat {
    RMat::from_fn(w.nrows(), w.ncols(), |i, j| {
        let (mut hi, mut lo) = (w[(i, j)], 0.0);
        for k in 0..f.ncols() {
            let (p, pe) = two_prod(-f[(i, k)], x[(k, j)]);
            let (s, se) = two_sum(hi, p);
            hi = s;
            lo += se + pe;
        }
        hi + lo
    })
}

/// `W X^†`; for square invertible `X`, followed by iterative refinement
/// against the compensated residual.
pub fn right_divide_refined(w: &RMat, x: &RMat, tol: Tol) -> RMat {
    let xp = rpinv(x, tol);
    let mut f = w * &xp;
    if x.is_square() && rank_of(&to_c(x), tol) == x.ncols() {
        for _ in 0..3 {
            let r = residual_compensated(w, &f, x);
            f += r * &xp;
        }
    }
    f
}

/// A linear subspace held as an orthonormal basis (0 columns for `{0}`).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: CMat,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: CMat::zeros(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: CMat::identity(ambient, ambient),
        }
    }

    /// Span of arbitrary columns, orthonormalized.
    pub fn span(raw: &CMat, tol: Tol) -> Self {
        image_basis(raw, tol)
    }

    pub fn span_real(raw: &RMat, tol: Tol) -> Self {
        image_basis(&to_c(raw), tol)
    }

    /// Wrap columns that are already orthonormal.
    pub fn from_orthonormal(basis: CMat) -> Self {
        Subspace {
            ambient: basis.nrows(),
            basis,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn real_basis(&self) -> RMat {
        re_part(&self.basis)
    }

    pub fn is_real(&self, tol: Tol) -> bool {
        is_real(&self.basis, tol)
    }

    /// `x - P x` for the orthogonal projector `P` onto this subspace.
    pub fn project_out(&self, x: &CMat) -> CMat {
        if self.is_zero() {
            return x.clone();
        }
        x - &self.basis * (self.basis.adjoint() * x)
    }

    /// Largest column residual of `x` after projection onto this subspace.
    pub fn residual(&self, x: &CMat) -> f64 {
        let r = self.project_out(x);
        (0..r.ncols()).fold(0.0, |acc, k| acc.max(r.column(k).norm()))
    }

    pub fn orthogonal_complement(&self, tol: Tol) -> Subspace {
        if self.is_zero() {
            return Subspace::full(self.ambient);
        }
        kernel_basis(&self.basis.adjoint(), tol)
    }

    /// Direct sum with the whole of `C^extra` appended below.
    pub fn extend_full(&self, extra: usize) -> Subspace {
        let n = self.ambient;
        let mut b = CMat::zeros(n + extra, self.dim() + extra);
        b.view_mut((0, 0), (n, self.dim())).copy_from(&self.basis);
        b.view_mut((n, self.dim()), (extra, extra)).fill_with_identity();
        Subspace::from_orthonormal(b)
    }

    /// Embedding `V ⊕ 0` into a space with `extra` trailing zero coordinates.
    pub fn extend_zero(&self, extra: usize) -> Subspace {
        let n = self.ambient;
        let mut b = CMat::zeros(n + extra, self.dim());
        b.view_mut((0, 0), (n, self.dim())).copy_from(&self.basis);
        Subspace::from_orthonormal(b)
    }

    /// Real subspace spanned by the real and imaginary parts of the basis.
    pub fn realified(&self, tol: Tol) -> Subspace {
        if is_exactly_real(&self.basis) {
            return self.clone();
        }
        let b = hstack(&[&to_c(&re_part(&self.basis)), &to_c(&im_part(&self.basis))]);
        image_basis(&b, tol)
    }
}

fn check_ambient(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient != v.ambient {
        return Err(GeoError::DimensionMismatch(format!(
            "ambient dimensions {} and {}",
            u.ambient, v.ambient
        )));
    }
    Ok(())
}

pub fn subspace_sum(u: &Subspace, v: &Subspace, tol: Tol) -> Result<Subspace> {
    check_ambient(u, v)?;
    if u.is_zero() {
        return Ok(v.clone());
    }
    if v.is_zero() {
        return Ok(u.clone());
    }
    Ok(image_basis(&hstack(&[&u.basis, &v.basis]), tol))
}

pub fn subspace_intersect(u: &Subspace, v: &Subspace, tol: Tol) -> Result<Subspace> {
    check_ambient(u, v)?;
    if u.is_zero() || v.is_zero() {
        return Ok(Subspace::zero(u.ambient));
    }
    // Solutions of U a + V b = 0 give U a in both spaces; the same stacked
    // matrix drives `subspace_sum`, so the dimension formula holds exactly.
    let k = kernel_basis(&hstack(&[&u.basis, &v.basis]), tol);
    let a = k.basis.rows(0, u.dim()).into_owned();
    Ok(Subspace::from_orthonormal(orthonormalize_full(&u.basis * a)))
}

/// `{x : M x ∈ S}`.
pub fn preimage(m: &CMat, s: &Subspace, tol: Tol) -> Result<Subspace> {
    if m.nrows() != s.ambient {
        return Err(GeoError::DimensionMismatch(format!(
            "map has {} rows, subspace lives in dimension {}",
            m.nrows(),
            s.ambient
        )));
    }
    let n = m.ncols();
    let scale = norm2(m);
    if scale == 0.0 {
        return Ok(Subspace::full(n));
    }
    let mhat = m * c64::new(1.0 / scale, 0.0);
    let stacked = hstack(&[&mhat, &(-&s.basis)]);
    let k = kernel_basis(&stacked, tol);
    let x = k.basis.rows(0, n).into_owned();
    Ok(Subspace::from_orthonormal(orthonormalize_full(x)))
}

/// Image of a subspace under a linear map.
pub fn map_subspace(m: &CMat, s: &Subspace, tol: Tol) -> Result<Subspace> {
    if m.ncols() != s.ambient {
        return Err(GeoError::DimensionMismatch(format!(
            "map has {} columns, subspace lives in dimension {}",
            m.ncols(),
            s.ambient
        )));
    }
    if s.is_zero() {
        return Ok(Subspace::zero(m.nrows()));
    }
    Ok(image_basis_scaled(&(m * &s.basis), norm2(m), tol))
}

pub fn contains(u: &Subspace, v: &Subspace, tol: Tol) -> Result<bool> {
    check_ambient(u, v)?;
    Ok(u.residual(&v.basis) <= tol.abs)
}

pub fn equals(u: &Subspace, v: &Subspace, tol: Tol) -> Result<bool> {
    Ok(contains(u, v, tol)? && contains(v, u, tol)?)
}

/// Largest mutual containment residual; infinite when dimensions differ.
pub fn equality_residual(u: &Subspace, v: &Subspace) -> Result<f64> {
    check_ambient(u, v)?;
    if u.dim() != v.dim() {
        return Ok(f64::INFINITY);
    }
    Ok(u.residual(&v.basis).max(v.residual(&u.basis)))
}

/// Eigenvalues of a square matrix, real Schur path for real input.
pub fn eigenvalues(m: &CMat) -> Vec<c64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigenvalues of a non-square matrix");
    if n == 0 {
        return Vec::new();
    }
    if is_exactly_real(m) {
        return re_part(m).complex_eigenvalues().iter().copied().collect();
    }
    let (_, t) = Schur::new(m.clone()).unpack();
    (0..n).map(|k| t[(k, k)]).collect()
}

pub fn reigenvalues(m: &RMat) -> Vec<c64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// Bottleneck distance between two equal-size multisets: the smallest `d`
/// admitting a perfect matching with all matched pairs within `d`.
pub fn match_distance(a: &[c64], b: &[c64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut cands: Vec<f64> = a
        .iter()
        .flat_map(|x| b.iter().map(move |y| (x - y).norm()))
        .collect();
    cands.sort_by(|x, y| x.total_cmp(y));
    cands.dedup();
    let (mut lo, mut hi) = (0, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(a, b, cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

fn perfect_matching(a: &[c64], b: &[c64], d: f64) -> bool {
    fn augment(i: usize, a: &[c64], b: &[c64], d: f64, seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for j in 0..b.len() {
            if seen[j] || (a[i] - b[j]).norm() > d {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, a, b, d, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; b.len()];
    (0..a.len()).all(|i| {
        let mut seen = vec![false; b.len()];
        augment(i, a, b, d, &mut seen, &mut owner)
    })
}

/// Representatives of clusters of values closer than `radius`.
pub fn dedup_values(values: &[c64], radius: f64) -> Vec<c64> {
    let mut out: Vec<c64> = Vec::new();
    for &z in values {
        if out.iter().all(|w| (w - z).norm() > radius) {
            out.push(z);
        }
    }
    out
}
