//! Invariant-subspace algorithms: reachable and unobservable subspaces, the
//! output-nulling and input-containing recursions, friends, reachability
//! subspaces and the block decomposition adapted to `R* ⊂ V* ⊂ X`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::assignment::{self, FeedbackResult};
use crate::linalg::{
    c64, eigenvalues, hstack, image_basis, image_basis_scaled, kernel_basis, kernel_basis_scaled, leading_left_vectors, map_subspace, norm2, preimage, re_part, rhstack,
    rnorm2, subspace_intersect, subspace_sum, to_c, CMat, RMat, Subspace, Tol,
};
use crate::pencils::SpectrumSpec;
use crate::sysmodel::SystemQuad;
use crate::{GeoError, Result};

fn unit_scaled(m: &CMat) -> CMat {
    let s = norm2(m);
    if s > 0.0 {
        m / c64::new(s, 0.0)
    } else {
        m.clone()
    }
}

/// Krylov chain `K₀ = {0}`, `K_{ℓ+1} = im H + Δ K_ℓ`, ending with the first
/// repeated dimension.
pub fn krylov_chain_c(a: &CMat, b: &CMat, tol: Tol) -> Vec<Subspace> {
    let n = a.nrows();
    let ahat = unit_scaled(a);
    let bsp = image_basis(b, tol);
    let mut chain = vec![Subspace::zero(n)];
    for _ in 0..=n {
        let cur = chain.last().expect("non-empty chain");
        let next = if cur.is_zero() {
            bsp.clone()
        } else {
            image_basis(&hstack(&[bsp.basis(), &(&ahat * cur.basis())]), tol)
        };
        let stop = next.dim() == cur.dim();
        chain.push(next);
        if stop {
            break;
        }
    }
    chain
}

pub fn krylov_chain(a: &RMat, b: &RMat, tol: Tol) -> Vec<Subspace> {
    krylov_chain_c(&to_c(a), &to_c(b), tol)
}

/// `dim im [B AB … A^{n-1}B]`.
pub fn krylov_rank(a: &RMat, b: &RMat, tol: Tol) -> usize {
    krylov_chain(a, b, tol).last().map_or(0, Subspace::dim)
}

/// `im [B AB … A^{h-1}B]`.
pub fn krylov_term(a: &RMat, b: &RMat, h: usize, tol: Tol) -> Subspace {
    let chain = krylov_chain(a, b, tol);
    chain[h.min(chain.len() - 1)].clone()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reachable {
    pub space: Subspace,
    /// Smallest `ℓ` with `im [B … A^{ℓ-1}B]` already equal to the reachable subspace.
    pub h_min: usize,
}

pub fn reachable_subspace(a: &RMat, b: &RMat, tol: Tol) -> Reachable {
    let chain = krylov_chain(a, b, tol);
    let h_min = chain.len() - 2;
    Reachable {
        space: chain[h_min].clone(),
        h_min,
    }
}

/// `⟨ker C | A⟩`.
pub fn unobservable_subspace(c: &RMat, a: &RMat, tol: Tol) -> Result<Subspace> {
    if c.nrows() == 0 {
        return Err(GeoError::NoOutput);
    }
    if c.ncols() != a.nrows() {
        return Err(GeoError::DimensionMismatch("C must have n columns".into()));
    }
    let kc = kernel_basis(&to_c(c), tol);
    let ac = to_c(a);
    let mut q = kc.clone();
    for _ in 0..=a.nrows() {
        let next = subspace_intersect(&kc, &preimage(&ac, &q, tol)?, tol)?;
        let stop = next.dim() == q.dim();
        q = next;
        if stop {
            break;
        }
    }
    Ok(q)
}

fn check_ambient(sys: &SystemQuad, s: &Subspace) -> Result<()> {
    if s.ambient() != sys.n() {
        return Err(GeoError::DimensionMismatch(format!(
            "subspace of dimension {} for a system with n = {}",
            s.ambient(),
            sys.n()
        )));
    }
    Ok(())
}

/// `V₀ = E`, `V_{i+1} = [A; C]⁻¹((V_i ⊕ 0) + im [B; D]) ∩ E`, up to the
/// first repeated dimension. The last term is `V*_E`.
pub fn vstar_sequence(sys: &SystemQuad, e: &Subspace, tol: Tol) -> Result<Vec<Subspace>> {
    check_ambient(sys, e)?;
    let s = sys.balanced();
    let p = s.p();
    let am = to_c(&s.state_map());
    let bd = image_basis(&to_c(&s.input_map()), tol);
    let mut chain = vec![e.clone()];
    for _ in 0..=s.n() {
        let cur = chain.last().expect("non-empty chain");
        let target = subspace_sum(&cur.extend_zero(p), &bd, tol)?;
        let next = subspace_intersect(&preimage(&am, &target, tol)?, e, tol)?;
        let stop = next.dim() == cur.dim();
        chain.push(next);
        if stop {
            break;
        }
    }
    Ok(chain)
}

/// Largest output-nulling subspace `V*`.
pub fn vstar(sys: &SystemQuad, tol: Tol) -> Result<Subspace> {
    let chain = vstar_sequence(sys, &Subspace::full(sys.n()), tol)?;
    Ok(chain.last().expect("non-empty chain").clone())
}

/// `V*_E`.
pub fn vstar_in(sys: &SystemQuad, e: &Subspace, tol: Tol) -> Result<Subspace> {
    let chain = vstar_sequence(sys, e, tol)?;
    Ok(chain.last().expect("non-empty chain").clone())
}

/// The non-decreasing chain `S₀ = {0} ⊆ S₁ ⊆ …`, indexable past saturation.
#[derive(Debug, Clone, PartialEq)]
pub struct SChain {
    terms: Vec<Subspace>,
}

impl SChain {
    /// `S_h`, equal to `S*` for every `h` past the stationary point.
    pub fn term(&self, h: usize) -> &Subspace {
        &self.terms[h.min(self.terms.len() - 1)]
    }

    pub fn last(&self) -> &Subspace {
        self.terms.last().expect("non-empty chain")
    }

    /// Index of the last stored term.
    pub fn len(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn terms(&self) -> &[Subspace] {
        &self.terms
    }
}

/// `S_{i+1} = [A B]((S_i ⊕ U) ∩ ker [C D])`; with `p = 0` this is the
/// Krylov chain of `(A, B)`.
pub fn sstar_sequence(sys: &SystemQuad, tol: Tol) -> Result<SChain> {
    let s = sys.balanced();
    let (n, m) = (s.n(), s.m());
    let ab = to_c(&rhstack(&[&s.a, &s.b]));
    let kcd = kernel_basis(&to_c(&s.output_row()), tol);
    let mut terms = vec![Subspace::zero(n)];
    for _ in 0..=n {
        let cur = terms.last().expect("non-empty chain");
        let z = subspace_intersect(&cur.extend_full(m), &kcd, tol)?;
        let next = map_subspace(&ab, &z, tol)?;
        let stop = next.dim() == cur.dim();
        terms.push(next);
        if stop {
            break;
        }
    }
    Ok(SChain { terms })
}

fn inclusion_residual(target: &Subspace, mapped: &CMat) -> f64 {
    target.residual(mapped)
}

/// `A V ⊆ V + im B`.
pub fn is_controlled_invariant(a: &RMat, b: &RMat, v: &Subspace, tol: Tol) -> Result<bool> {
    let sys = SystemQuad::pair(a.clone(), b.clone())?;
    Ok(output_nulling_residual(&sys, v, tol)? <= tol.abs)
}

/// Residual of `[A; C] V ⊆ (V ⊕ 0) + im [B; D]` on the balanced system.
pub fn output_nulling_residual(sys: &SystemQuad, v: &Subspace, tol: Tol) -> Result<f64> {
    check_ambient(sys, v)?;
    if v.is_zero() {
        return Ok(0.0);
    }
    let s = sys.balanced();
    let bd = image_basis(&to_c(&s.input_map()), tol);
    let target = subspace_sum(&v.extend_zero(s.p()), &bd, tol)?;
    Ok(inclusion_residual(&target, &(to_c(&s.state_map()) * v.basis())))
}

pub fn is_output_nulling(sys: &SystemQuad, v: &Subspace, tol: Tol) -> Result<bool> {
    Ok(output_nulling_residual(sys, v, tol)? <= tol.abs)
}

/// `A (S ∩ ker C) ⊆ S`.
pub fn is_conditioned_invariant(c: &RMat, a: &RMat, s: &Subspace, tol: Tol) -> Result<bool> {
    if s.ambient() != a.nrows() || c.ncols() != a.nrows() {
        return Err(GeoError::DimensionMismatch("C, A and S disagree on n".into()));
    }
    let kc = kernel_basis(&to_c(c), tol);
    let inter = subspace_intersect(s, &kc, tol)?;
    if inter.is_zero() {
        return Ok(true);
    }
    let ahat = unit_scaled(&to_c(a));
    Ok(inclusion_residual(s, &(ahat * inter.basis())) <= tol.abs)
}

/// `[A B]((S ⊕ U) ∩ ker [C D]) ⊆ S`.
pub fn is_input_containing(sys: &SystemQuad, s: &Subspace, tol: Tol) -> Result<bool> {
    check_ambient(sys, s)?;
    let b = sys.balanced();
    let kcd = kernel_basis(&to_c(&b.output_row()), tol);
    let z = subspace_intersect(&s.extend_full(b.m()), &kcd, tol)?;
    if z.is_zero() {
        return Ok(true);
    }
    let ab = to_c(&rhstack(&[&b.a, &b.b]));
    Ok(inclusion_residual(s, &(ab * z.basis())) <= tol.abs)
}

fn feedback_scale(sys: &SystemQuad, f: &RMat) -> f64 {
    let nf = rnorm2(f);
    1.0f64
        .max(rnorm2(&sys.a) + rnorm2(&sys.b) * nf)
        .max(rnorm2(&sys.c) + rnorm2(&sys.d) * nf)
}

/// A real friend `F` of an output-nulling (controlled-invariant if `p = 0`)
/// subspace. With a spectrum, eigenvectors inside `V` are taken from the
/// pencil kernels and the rest of `V` is completed by least squares.
pub fn friend_of(
    sys: &SystemQuad,
    v: &Subspace,
    spectrum: Option<&SpectrumSpec>,
    tol: Tol,
) -> Result<FeedbackResult> {
    check_ambient(sys, v)?;
    let (n, m) = (sys.n(), sys.m());
    if v.is_zero() {
        return Ok(FeedbackResult::zero(m, n));
    }
    let real = v.realified(tol);
    if real.dim() != v.dim() {
        return Err(GeoError::DimensionMismatch("subspace is not self-conjugate".into()));
    }
    let res = output_nulling_residual(sys, &real, tol)?;
    if res > tol.abs {
        return Err(GeoError::NotOutputNulling(res));
    }
    let out = match spectrum {
        Some(spec) => assignment::friend_with_spectrum(sys, &real, spec, tol)?,
        None => assignment::friend_from_pairs(sys, &real, &[], tol)?,
    };
    let bound = tol.abs * feedback_scale(sys, &out.f);
    let worst = out.residual_inv.max(out.residual_out);
    if worst > bound {
        return Err(GeoError::NotOutputNulling(worst));
    }
    if out.residual_eig > bound {
        return Err(GeoError::SpectrumNotAssignable(out.residual_eig));
    }
    Ok(out)
}

/// `B ker D` (all of `im B` when `p = 0`).
pub fn b_ker_d(sys: &SystemQuad, tol: Tol) -> Subspace {
    let kd = kernel_basis(&to_c(&sys.d), tol);
    map_subspace(&to_c(&sys.b), &kd, tol).expect("consistent dimensions")
}

/// `⟨A + BF | V ∩ B ker D⟩` for a least-squares friend `F` of `V`.
pub fn reachability_on(sys: &SystemQuad, v: &Subspace, tol: Tol) -> Result<Subspace> {
    let f = friend_of(sys, v, None, tol)?.f;
    reachability_on_with_friend(sys, v, &f, tol)
}

/// Same as [`reachability_on`] for a caller-supplied friend.
pub fn reachability_on_with_friend(sys: &SystemQuad, v: &Subspace, f: &RMat, tol: Tol) -> Result<Subspace> {
    check_ambient(sys, v)?;
    let start = subspace_intersect(v, &b_ker_d(sys, tol), tol)?;
    if start.is_zero() {
        return Ok(start);
    }
    let acl = unit_scaled(&to_c(&(&sys.a + &sys.b * f)));
    let pv = v.basis() * v.basis().adjoint();
    let mut r = start;
    for _ in 0..=sys.n() {
        let image = image_basis_scaled(&(&pv * &acl * r.basis()), 1.0, tol);
        let next = subspace_sum(&r, &image, tol)?;
        let stop = next.dim() == r.dim();
        r = next;
        if stop {
            break;
        }
    }
    Ok(r)
}

/// `R* = R_{V*}`.
pub fn rstar(sys: &SystemQuad, tol: Tol) -> Result<Subspace> {
    if !sys.has_output() {
        return Err(GeoError::NoOutput);
    }
    reachability_on(sys, &vstar(sys, tol)?, tol)
}

/// Block form adapted to `R* ⊂ V* ⊂ X` and `B⁻¹V* ∩ ker D ⊂ U`.
#[derive(Debug, Clone, PartialEq)]
pub struct Morse {
    /// Orthogonal state basis `[T₁ T₂ T₃]`.
    pub t: RMat,
    /// Orthogonal input basis `[Ω₁ Ω₂]`.
    pub omega: RMat,
    /// Friend of `V*` used for the transformation.
    pub f: RMat,
    pub a_bar: RMat,
    pub b_bar: RMat,
    pub c_bar: RMat,
    pub d_bar: RMat,
    pub dim_rstar: usize,
    pub dim_vstar: usize,
    pub dim_omega1: usize,
    /// `σ(Ā₂₂)`, with multiplicity.
    pub zeros: Vec<c64>,
    /// Largest entry norm among the blocks required to vanish.
    pub block_residual: f64,
}

impl Morse {
    pub fn a22(&self) -> RMat {
        let (r, v) = (self.dim_rstar, self.dim_vstar);
        self.a_bar.view((r, r), (v - r, v - r)).into_owned()
    }
}

fn completion(inside: &Subspace, outer: &Subspace, count: usize) -> RMat {
    let n = outer.ambient();
    if count == 0 {
        return RMat::zeros(n, 0);
    }
    re_part(&leading_left_vectors(&inside.project_out(outer.basis()), count))
}

pub fn morse_decomposition(sys: &SystemQuad, tol: Tol) -> Result<Morse> {
    if !sys.has_output() {
        return Err(GeoError::NoOutput);
    }
    let (n, p) = (sys.n(), sys.p());
    let vs = vstar(sys, tol)?;
    let friend = friend_of(sys, &vs, None, tol)?;
    let f = friend.f;
    let rs = reachability_on_with_friend(sys, &vs, &f, tol)?;
    let (r, v) = (rs.dim(), vs.dim());
    let t1 = rs.real_basis();
    let t2 = completion(&rs, &vs, v - r);
    let t3 = vs.orthogonal_complement(tol).real_basis();
    let t = rhstack(&[&t1, &t2, &t3]);
    let om1 = preimage(&to_c(&sys.input_map()), &vs.extend_zero(p), tol)?;
    let k = om1.dim();
    let om2 = om1.orthogonal_complement(tol).real_basis();
    let omega = rhstack(&[&om1.real_basis(), &om2]);
    let tt = t.transpose();
    let a_bar = &tt * (&sys.a + &sys.b * &f) * &t;
    let b_bar = &tt * &sys.b * &omega;
    let c_bar = (&sys.c + &sys.d * &f) * &t;
    let d_bar = &sys.d * &omega;
    let blk = |mat: &RMat, r0: usize, c0: usize, rows: usize, cols: usize| {
        if rows == 0 || cols == 0 {
            0.0
        } else {
            mat.view((r0, c0), (rows, cols)).norm()
        }
    };
    let block_residual = [
        blk(&a_bar, r, 0, n - r, r),
        blk(&a_bar, v, r, n - v, v - r),
        blk(&b_bar, r, 0, n - r, k),
        blk(&c_bar, 0, 0, p, v),
        blk(&d_bar, 0, 0, p, k),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let scale = feedback_scale(sys, &f).max(rnorm2(&sys.b)).max(rnorm2(&sys.d));
    if block_residual > tol.abs * scale {
        return Err(GeoError::DecompositionResidual(block_residual));
    }
    let a11 = a_bar.view((0, 0), (r, r)).into_owned();
    let b11 = b_bar.view((0, 0), (r, k)).into_owned();
    if r > 0 {
        let reach = krylov_rank(&a11, &b11, tol);
        if reach != r {
            return Err(GeoError::BlockNotReachable { rank: reach, dim: r });
        }
    }
    let a22 = a_bar.view((r, r), (v - r, v - r)).into_owned();
    let zeros = eigenvalues(&to_c(&a22));
    Ok(Morse {
        t,
        omega,
        f,
        a_bar,
        b_bar,
        c_bar,
        d_bar,
        dim_rstar: r,
        dim_vstar: v,
        dim_omega1: k,
        zeros,
        block_residual,
    })
}

/// Block lower-triangular Toeplitz matrix with `D` on the diagonal and
/// `C A^k B` below it, `blocks` block rows.
pub fn markov_toeplitz(sys: &SystemQuad, blocks: usize) -> RMat {
    let (m, p) = (sys.m(), sys.p());
    let powers = input_powers(sys, blocks);
    let mut toeplitz = RMat::zeros(blocks * p, blocks * m);
    for r in 0..blocks {
        for c in 0..=r {
            let block = if r == c { sys.d.clone() } else { &sys.c * &powers[r - c - 1] };
            toeplitz.view_mut((r * p, c * m), (p, m)).copy_from(&block);
        }
    }
    toeplitz
}

/// `[B, AB, …, A^{k-1}B]` as separate blocks.
fn input_powers(sys: &SystemQuad, k: usize) -> Vec<RMat> {
    let mut powers: Vec<RMat> = Vec::with_capacity(k);
    powers.push(sys.b.clone());
    for i in 1..k {
        let next = &sys.a * &powers[i - 1];
        powers.push(next);
    }
    powers
}

/// Kernel of the Toeplitz matrix by block forward substitution: block row
/// `r` only constrains `u_r` given the admissible `(u_0, …, u_{r-1})`.
fn toeplitz_kernel(toeplitz: &RMat, blocks: usize, m: usize, p: usize, tol: Tol) -> Subspace {
    let mut z = CMat::zeros(0, 0);
    for r in 0..blocks {
        let k = z.ncols();
        let row = to_c(&toeplitz.view((r * p, 0), (p, r * m)).into_owned());
        let diag = to_c(&toeplitz.view((r * p, r * m), (p, m)).into_owned());
        let step = hstack(&[&(row * &z), &diag]);
        let ker = kernel_basis_scaled(&step, 1.0, tol);
        let mut ext = CMat::zeros((r + 1) * m, k + m);
        ext.view_mut((0, 0), (r * m, k)).copy_from(&z);
        ext.view_mut((r * m, k), (m, m)).fill_with_identity();
        z = ext * ker.basis();
    }
    Subspace::from_orthonormal(z)
}

/// `V_i ∩ S_j` as the image, under `[A^{j-1}B … AB B 0 … 0]`, of the kernel
/// of [`markov_toeplitz`] with `i + j` block rows.
pub fn intersection_formula(sys: &SystemQuad, i: usize, j: usize, tol: Tol) -> Result<Subspace> {
    if !sys.has_output() {
        return Err(GeoError::NoOutput);
    }
    let n = sys.n();
    if j == 0 {
        return Ok(Subspace::zero(n));
    }
    let s = sys.balanced();
    let (m, p) = (s.m(), s.p());
    let blocks = i + j;
    let powers = input_powers(&s, j);
    let toeplitz = markov_toeplitz(&s, blocks);
    let mut krylov = RMat::zeros(n, blocks * m);
    for c in 0..j {
        krylov.view_mut((0, c * m), (n, m)).copy_from(&powers[j - 1 - c]);
    }
    let ker = toeplitz_kernel(&toeplitz, blocks, m, p, tol);
    map_subspace(&to_c(&krylov), &ker, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{contains, cx, equals, Subspace};
    use crate::pencils::validate_spectrum;
    use crate::sysmodel::{random_system, GenSpec};

    fn r(rows: usize, cols: usize, d: &[f64]) -> RMat {
        RMat::from_row_slice(rows, cols, d)
    }

    fn e(n: usize, k: usize) -> Subspace {
        let mut v = RMat::zeros(n, 1);
        v[(k, 0)] = 1.0;
        Subspace::span_real(&v, Tol::default())
    }

    fn dint(c: &[f64]) -> SystemQuad {
        SystemQuad::new(r(2, 2, &[0.0, 1.0, 0.0, 0.0]), r(2, 1, &[0.0, 1.0]), r(1, 2, c), RMat::zeros(1, 1)).unwrap()
    }

    #[test]
    fn reachable_examples() {
        let t = Tol::default();
        let rs = reachable_subspace(&r(2, 2, &[0.0, 1.0, 0.0, 0.0]), &r(2, 1, &[0.0, 1.0]), t);
        assert_eq!((rs.space.dim(), rs.h_min), (2, 2));
        let rs = reachable_subspace(&r(2, 2, &[1.0, 0.0, 0.0, 2.0]), &r(2, 1, &[1.0, 0.0]), t);
        assert_eq!((rs.space.dim(), rs.h_min), (1, 1));
        assert!(equals(&rs.space, &e(2, 0), t).unwrap());
        let a3 = r(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let rs = reachable_subspace(&a3, &r(3, 1, &[0.0, 0.0, 1.0]), t);
        assert_eq!((rs.space.dim(), rs.h_min), (3, 3));
        let rs = reachable_subspace(&a3, &RMat::zeros(3, 1), t);
        assert_eq!((rs.space.dim(), rs.h_min), (0, 0));
    }

    #[test]
    fn unobservable_examples() {
        let t = Tol::default();
        let a = r(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(unobservable_subspace(&RMat::identity(2, 2), &a, t).unwrap().is_zero());
        assert_eq!(unobservable_subspace(&RMat::zeros(1, 2), &a, t).unwrap().dim(), 2);
        // Brute-force observability matrix [C; CA] = [[0, 1], [0, 0]].
        let c = r(1, 2, &[0.0, 1.0]);
        let obs = to_c(&crate::linalg::rvstack(&[&c, &(&c * &a)]));
        let oracle = kernel_basis(&obs, t);
        let q = unobservable_subspace(&c, &a, t).unwrap();
        assert!(equals(&q, &oracle, t).unwrap());
        assert!(equals(&q, &e(2, 0), t).unwrap());
        assert_eq!(unobservable_subspace(&RMat::zeros(0, 2), &a, t), Err(GeoError::NoOutput));
    }

    #[test]
    fn vstar_examples() {
        let t = Tol::default();
        let full = Subspace::full(2);
        let chain = vstar_sequence(&dint(&[1.0, 0.0]), &full, t).unwrap();
        let dims: Vec<usize> = chain.iter().map(Subspace::dim).collect();
        assert_eq!(dims, vec![2, 1, 0, 0]);
        assert!(equals(&chain[1], &e(2, 1), t).unwrap());
        let vs = vstar(&dint(&[0.0, 1.0]), t).unwrap();
        assert!(equals(&vs, &e(2, 0), t).unwrap());
        assert_eq!(vstar(&dint(&[0.0, 0.0]), t).unwrap().dim(), 2);
    }

    #[test]
    fn sstar_examples() {
        let t = Tol::default();
        let a = r(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = r(2, 1, &[0.0, 1.0]);
        let fullrank_d = SystemQuad::new(a.clone(), b.clone(), r(1, 2, &[0.3, 1.0]), r(1, 1, &[1.0])).unwrap();
        assert!(sstar_sequence(&fullrank_d, t).unwrap().last().is_zero());
        // C = [0 1], D = 0: S₁ = im B = span{e₂}; S₂ = [A B]((span{e₂} ⊕ U) ∩ ker C) = B·U = span{e₂}.
        let ch = sstar_sequence(&dint(&[0.0, 1.0]), t).unwrap();
        assert!(equals(ch.term(1), &e(2, 1), t).unwrap());
        assert!(equals(ch.last(), &e(2, 1), t).unwrap());
        assert!(equals(ch.term(50), &e(2, 1), t).unwrap());
        let pair = SystemQuad::pair(a, b).unwrap();
        assert_eq!(sstar_sequence(&pair, t).unwrap().term(2).dim(), 2);
    }

    #[test]
    fn membership_tests() {
        let t = Tol::default();
        let a = r(2, 2, &[0.3, 1.0, -0.7, 0.2]);
        assert!(is_controlled_invariant(&a, &RMat::zeros(2, 1), &Subspace::full(2), t).unwrap());
        let line = Subspace::span_real(&r(2, 1, &[1.0, 0.4]), t);
        assert!(!is_controlled_invariant(&a, &RMat::zeros(2, 1), &line, t).unwrap());
        assert!(is_conditioned_invariant(&r(1, 2, &[1.0, 0.0]), &a, &Subspace::zero(2), t).unwrap());
        let sys = dint(&[0.0, 1.0]);
        assert!(is_output_nulling(&sys, &e(2, 0), t).unwrap());
        assert!(!is_output_nulling(&sys, &e(2, 1), t).unwrap());
        let ch = sstar_sequence(&sys, t).unwrap();
        assert!(is_input_containing(&sys, ch.last(), t).unwrap());
        assert!(!is_input_containing(&sys, &Subspace::zero(2), t).unwrap());
    }

    #[test]
    fn friend_examples() {
        let t = Tol::default();
        let pair = SystemQuad::pair(r(2, 2, &[-1.0, 0.0, 0.0, -2.0]), RMat::identity(2, 2)).unwrap();
        let spec = validate_spectrum(&[cx(-1.0, 0.0), cx(-2.0, 0.0)], &[], t).unwrap();
        let fr = friend_of(&pair, &Subspace::full(2), Some(&spec), t).unwrap();
        assert!(fr.f.norm() < 1e-12);
        let di = SystemQuad::pair(r(2, 2, &[0.0, 1.0, 0.0, 0.0]), r(2, 1, &[0.0, 1.0])).unwrap();
        let fr = friend_of(&di, &Subspace::full(2), Some(&spec), t).unwrap();
        assert!((fr.f[(0, 0)] + 2.0).abs() < 1e-9 && (fr.f[(0, 1)] + 3.0).abs() < 1e-9);
        let z = friend_of(&di, &Subspace::zero(2), None, t).unwrap();
        assert_eq!(z.f, RMat::zeros(1, 2));
        assert!(matches!(friend_of(&dint(&[0.0, 1.0]), &e(2, 1), None, t), Err(GeoError::NotOutputNulling(_))));
    }

    #[test]
    fn reachability_on_examples() {
        let t = Tol::default();
        let sys = dint(&[0.0, 1.0]);
        assert!(reachability_on(&sys, &e(2, 0), t).unwrap().is_zero());
        let pair = sys.without_output();
        assert_eq!(reachability_on(&pair, &Subspace::full(2), t).unwrap().dim(), 2);
        assert!(reachability_on(&sys, &Subspace::zero(2), t).unwrap().is_zero());
    }

    #[test]
    fn rstar_examples() {
        let t = Tol::default();
        let a = r(2, 2, &[0.3, 1.0, -0.7, 0.2]);
        let b = r(2, 1, &[0.0, 1.0]);
        let blocked = SystemQuad::new(a.clone(), b.clone(), RMat::identity(2, 2), r(2, 1, &[1.0, 0.0])).unwrap();
        assert!(rstar(&blocked, t).unwrap().is_zero());
        let silent = SystemQuad::new(a.clone(), b.clone(), RMat::zeros(1, 2), RMat::zeros(1, 1)).unwrap();
        let reach = reachable_subspace(&a, &b, t).space;
        assert!(equals(&rstar(&silent, t).unwrap(), &reach, t).unwrap());
    }

    #[test]
    fn rstar_with_invertible_feedthrough() {
        let t = Tol::default();
        let sys = random_system(&GenSpec::new(4, 2, 2, 17)).unwrap();
        // Square invertible D: every state is output-nulling, but B ker D = {0}.
        let vs = vstar(&sys, t).unwrap();
        assert_eq!(vs.dim(), 4);
        assert!(rstar(&sys, t).unwrap().is_zero());
        assert!(sstar_sequence(&sys, t).unwrap().last().is_zero());
    }

    #[test]
    fn morse_examples() {
        let t = Tol::default();
        let m = morse_decomposition(&dint(&[0.0, 1.0]), t).unwrap();
        assert_eq!((m.dim_rstar, m.dim_vstar), (0, 1));
        assert_eq!(m.zeros.len(), 1);
        assert!(m.zeros[0].norm() < 1e-12);
        let m = morse_decomposition(&dint(&[1.0, 0.0]), t).unwrap();
        assert_eq!((m.dim_rstar, m.dim_vstar), (0, 0));
        assert!(m.zeros.is_empty());
        let pair = dint(&[1.0, 0.0]).without_output();
        assert_eq!(morse_decomposition(&pair, t), Err(GeoError::NoOutput));
    }

    #[test]
    fn intersection_formula_examples() {
        let t = Tol::default();
        for seed in 0..5 {
            let sys = random_system(&GenSpec::new(5, 2, 1, seed)).unwrap();
            let vchain = vstar_sequence(&sys, &Subspace::full(5), t).unwrap();
            let schain = sstar_sequence(&sys, t).unwrap();
            for i in 0..=5 {
                let vi = &vchain[i.min(vchain.len() - 1)];
                let direct = subspace_intersect(vi, schain.term(1), t).unwrap();
                assert!(equals(&direct, &intersection_formula(&sys, i, 1, t).unwrap(), t).unwrap());
            }
            let rs = rstar(&sys, t).unwrap();
            assert!(equals(&intersection_formula(&sys, 5, 5, t).unwrap(), &rs, t).unwrap());
        }
        let blocked = SystemQuad::new(
            r(2, 2, &[0.3, 1.0, -0.7, 0.2]),
            r(2, 1, &[0.0, 1.0]),
            r(1, 2, &[1.0, -2.0]),
            r(1, 1, &[3.0]),
        )
        .unwrap();
        assert!(intersection_formula(&blocked, 2, 2, t).unwrap().is_zero());
    }

    #[test]
    fn toeplitz_kernel_matches_direct_kernel() {
        let t = Tol::default();
        for seed in 0..10 {
            let sys = random_system(&GenSpec::new(4, 3, 2, seed)).unwrap().balanced();
            let tp = markov_toeplitz(&sys, 3);
            let sub = toeplitz_kernel(&tp, 3, 3, 2, t);
            let direct = kernel_basis(&to_c(&tp), t);
            assert!(equals(&sub, &direct, t).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn chains_are_monotone() {
        let t = Tol::default();
        for seed in 0..10 {
            let sys = random_system(&GenSpec::new(6, 2, 1, seed)).unwrap();
            let v = vstar_sequence(&sys, &Subspace::full(6), t).unwrap();
            assert!(v.len() <= 7);
            for w in v.windows(2) {
                assert!(contains(&w[0], &w[1], t).unwrap());
            }
            let s = sstar_sequence(&sys, t).unwrap();
            for w in s.terms().windows(2) {
                assert!(contains(&w[1], &w[0], t).unwrap());
            }
        }
    }
}
