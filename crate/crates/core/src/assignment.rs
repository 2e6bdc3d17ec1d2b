//! Eigenstructure assignment from pencil kernels.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::geometry;
use crate::linalg::{
    c64, cond, hstack, image_basis, image_basis_scaled, is_exactly_real, kernel_basis, max_imag, norm2, pinv, rank_of, re_part,
    match_distance, reigenvalues, rpinv, to_c, CMat, CVec, RMat, Subspace, Tol,
};
use crate::pencils::{self, PencilKernel, SpectrumSpec, SpectrumUnit};
use crate::sysmodel::SystemQuad;
use crate::{GeoError, Result};

/// Condition number of the eigenvector matrix above which a warning is attached.
pub const COND_WARNING: f64 = 1e8;

/// Smallest norm a new unit direction must keep after projecting out the
/// directions already selected.
const SELECT_FLOOR: f64 = 1e-9;

/// Kernel directions whose state part is below this norm are treated as
/// pure input directions.
const STATE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackResult {
    pub f: RMat,
    /// Assigned eigenvalues with unit-norm eigenvectors, conjugates included.
    pub assigned: Vec<(c64, CVec)>,
    pub residual_eig: f64,
    /// `‖(C + DF) X‖` over the basis `X` handled; zero when `p = 0`.
    pub residual_out: f64,
    /// Invariance residual of the target subspace under `A + BF`.
    pub residual_inv: f64,
    pub cond_v: f64,
    /// Largest imaginary part of `F` computed from the unrealified selection.
    pub imag_max: f64,
    pub warning: Option<String>,
}

impl FeedbackResult {
    pub(crate) fn zero(m: usize, n: usize) -> Self {
        FeedbackResult {
            f: RMat::zeros(m, n),
            assigned: Vec::new(),
            residual_eig: 0.0,
            residual_out: 0.0,
            residual_inv: 0.0,
            cond_v: 1.0,
            imag_max: 0.0,
            warning: None,
        }
    }

    pub fn assigned_lambdas(&self) -> Vec<c64> {
        self.assigned.iter().map(|(l, _)| *l).collect()
    }
}

/// One eigenpair chosen from a pencil kernel: `v = V c`, `w = W c`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelChoice {
    pub kernel: PencilKernel,
    pub coeffs: CVec,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Eigenpair {
    pub lambda: c64,
    pub v: CVec,
    pub w: CVec,
}

impl Eigenpair {
    fn normalized(lambda: c64, v: CVec, w: CVec) -> Self {
        let s = v.norm();
        let k = if s > 0.0 { c64::new(1.0 / s, 0.0) } else { c64::new(1.0, 0.0) };
        Eigenpair {
            lambda,
            v: v * k,
            w: w * k,
        }
    }
}

/// Per-condition outcome of Moore's test.
#[derive(Debug, Clone, PartialEq)]
pub struct MooreReport {
    pub distinct: bool,
    pub independent: bool,
    pub conjugate: Vec<bool>,
    pub membership: Vec<bool>,
}

impl MooreReport {
    pub fn holds(&self) -> bool {
        self.distinct && self.independent && self.conjugate.iter().all(|&b| b) && self.membership.iter().all(|&b| b)
    }

    /// `(index, condition)` pairs that failed; condition 1 is reported at index 0.
    pub fn failures(&self) -> Vec<(usize, u8)> {
        let mut out = Vec::new();
        if !self.independent {
            out.push((0, 1));
        }
        for (i, ok) in self.conjugate.iter().enumerate() {
            if !ok {
                out.push((i, 2));
            }
        }
        for (i, ok) in self.membership.iter().enumerate() {
            if !ok {
                out.push((i, 3));
            }
        }
        out
    }
}

fn lambda_scale(lambdas: impl Iterator<Item = c64>, tol: Tol) -> f64 {
    tol.abs * lambdas.fold(1.0f64, |acc, z| acc.max(z.norm()))
}

pub fn moore_check(a: &RMat, b: &RMat, candidates: &[(c64, CVec)], tol: Tol) -> MooreReport {
    let st = lambda_scale(candidates.iter().map(|c| c.0), tol);
    let k = candidates.len();
    let distinct = (0..k).all(|i| (0..i).all(|j| (candidates[i].0 - candidates[j].0).norm() > st));
    let independent = if k == 0 {
        true
    } else {
        let cols: Vec<CMat> = candidates.iter().map(|(_, v)| CMat::from_column_slice(v.len(), 1, v.as_slice())).collect();
        let refs: Vec<&CMat> = cols.iter().collect();
        rank_of(&hstack(&refs), tol) == k
    };
    let conjugate = (0..k)
        .map(|i| {
            let (l, v) = &candidates[i];
            let vs = tol.abs * v.norm().max(1.0);
            if l.im.abs() <= st {
                return v.iter().all(|z| z.im.abs() <= vs);
            }
            (0..k).any(|j| {
                j != i && (candidates[j].0 - l.conj()).norm() <= st && (&candidates[j].1 - v.conjugate()).norm() <= vs
            })
        })
        .collect();
    let membership = candidates
        .iter()
        .map(|(l, v)| {
            let ker = pencils::reach_pencil_kernel(a, b, *l, tol);
            let im = image_basis_scaled(&ker.v, 1.0, tol);
            let vm = CMat::from_column_slice(v.len(), 1, v.as_slice());
            im.residual(&vm) <= tol.abs * v.norm().max(1.0)
        })
        .collect();
    MooreReport {
        distinct,
        independent,
        conjugate,
        membership,
    }
}

/// Rotates `v` (and `w`) by a common phase so that `Re v ⊥ Im v`.
fn align_phase(v: &CVec, w: &CVec) -> (CVec, CVec) {
    let a = v.map(|z| z.re);
    let b = v.map(|z| z.im);
    let theta = 0.5 * num_traits::Float::atan2(-2.0 * a.dot(&b), a.dot(&a) - b.dot(&b));
    let ph = c64::from_polar(1.0, theta);
    (v * ph, w * ph)
}

/// Phase that makes the largest entry of `v` real and positive.
fn real_phase(v: &CVec) -> c64 {
    let big = v.iter().fold(c64::new(0.0, 0.0), |acc, z| if z.norm() > acc.norm() { *z } else { acc });
    if big.norm() == 0.0 {
        c64::new(1.0, 0.0)
    } else {
        big.conj() / big.norm()
    }
}

/// Real columns `(X, W)` for a self-conjugate selection: real eigenpairs as
/// they are, each conjugate pair as its real and imaginary parts.
pub(crate) fn realify(pairs: &[Eigenpair], n: usize, m: usize, tol: Tol) -> Result<(RMat, RMat, Vec<Eigenpair>)> {
    let st = lambda_scale(pairs.iter().map(|p| p.lambda), tol);
    let mut xs: Vec<CVec> = Vec::new();
    let mut ws: Vec<CVec> = Vec::new();
    let mut used = alloc::vec![false; pairs.len()];
    let mut full: Vec<Eigenpair> = Vec::new();
    for i in 0..pairs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let p = &pairs[i];
        if p.lambda.im.abs() <= st {
            let ph = real_phase(&p.v);
            let (v, w) = (&p.v * ph, &p.w * ph);
            let vs = tol.abs * v.norm().max(1.0);
            if v.iter().chain(w.iter()).any(|z| z.im.abs() > vs) {
                return Err(GeoError::NonSelfConjugateSelection(format!(
                    "real eigenvalue {} has a non-real eigenvector",
                    p.lambda
                )));
            }
            let v = v.map(|z| c64::new(z.re, 0.0));
            let w = w.map(|z| c64::new(z.re, 0.0));
            xs.push(v.clone());
            ws.push(w.clone());
            full.push(Eigenpair {
                lambda: c64::new(p.lambda.re, 0.0),
                v,
                w,
            });
            continue;
        }
        let j = (0..pairs.len()).find(|&j| !used[j] && (pairs[j].lambda - p.lambda.conj()).norm() <= st);
        let Some(j) = j else {
            return Err(GeoError::NonSelfConjugateSelection(format!(
                "{} is selected without its conjugate",
                p.lambda
            )));
        };
        let q = &pairs[j];
        let vs = tol.abs * p.v.norm().max(1.0);
        if (&q.v - p.v.conjugate()).norm() > vs || (&q.w - p.w.conjugate()).norm() > vs {
            return Err(GeoError::NonSelfConjugateSelection(format!(
                "vectors for {} and {} are not conjugate",
                p.lambda, q.lambda
            )));
        }
        used[j] = true;
        xs.push(p.v.map(|z| c64::new(z.re, 0.0)));
        xs.push(p.v.map(|z| c64::new(z.im, 0.0)));
        ws.push(p.w.map(|z| c64::new(z.re, 0.0)));
        ws.push(p.w.map(|z| c64::new(z.im, 0.0)));
        full.push(p.clone());
        full.push(Eigenpair {
            lambda: p.lambda.conj(),
            v: p.v.conjugate(),
            w: p.w.conjugate(),
        });
    }
    let to_mat = |cols: &[CVec], rows: usize| {
        RMat::from_fn(rows, cols.len(), |i, j| cols[j][i].re)
    };
    Ok((to_mat(&xs, n), to_mat(&ws, m), full))
}

fn cols_of(vs: &[CVec], rows: usize) -> CMat {
    CMat::from_fn(rows, vs.len(), |i, j| vs[j][i])
}

/// Columns `[v w]` with each pair `(λ, λ̄)` replaced by `(p + q)/√2` and
/// `-i(p - q)/√2`, a unitary recombination that leaves `W V^†` unchanged
/// and is real exactly when `q = p̄`.
fn pair_rotated(pairs: &[Eigenpair]) -> (Vec<CVec>, Vec<CVec>) {
    let h = c64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mi = c64::new(0.0, -core::f64::consts::FRAC_1_SQRT_2);
    let mut used = alloc::vec![false; pairs.len()];
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    for i in 0..pairs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let p = &pairs[i];
        let partner = (p.lambda.im != 0.0)
            .then(|| (i + 1..pairs.len()).find(|&j| !used[j] && pairs[j].lambda == p.lambda.conj()))
            .flatten();
        match partner {
            Some(j) => {
                used[j] = true;
                let q = &pairs[j];
                xs.push((&p.v + &q.v) * h);
                xs.push((&p.v - &q.v) * mi);
                ws.push((&p.w + &q.w) * h);
                ws.push((&p.w - &q.w) * mi);
            }
            None => {
                xs.push(p.v.clone());
                ws.push(p.w.clone());
            }
        }
    }
    (xs, ws)
}

/// Diagnostics shared by every synthesis route.
pub(crate) fn finish(
    sys: &SystemQuad,
    f: RMat,
    pairs: &[Eigenpair],
    target: Option<&Subspace>,
    extra_cols: (&RMat, &RMat),
    tol: Tol,
) -> FeedbackResult {
    let (n, m) = (sys.n(), sys.m());
    let closed = to_c(&(&sys.a + &sys.b * &f));
    let residual_eig = pairs
        .iter()
        .map(|p| (&closed * &p.v - &p.v * p.lambda).norm())
        .fold(0.0, f64::max);
    let vcols: Vec<CVec> = pairs.iter().map(|p| p.v.clone()).collect();
    let vsel = cols_of(&vcols, n);
    let cond_v = if pairs.is_empty() { 1.0 } else { cond(&vsel) };
    let (residual_out, residual_inv) = match target {
        Some(t) if !t.is_zero() => {
            let x = t.basis();
            let out = if sys.has_output() {
                norm2(&(to_c(&(&sys.c + &sys.d * &f)) * x))
            } else {
                0.0
            };
            (out, t.residual(&(&closed * x)))
        }
        _ => {
            let out = if sys.has_output() && !pairs.is_empty() {
                norm2(&(to_c(&(&sys.c + &sys.d * &f)) * &vsel))
            } else {
                0.0
            };
            (out, 0.0)
        }
    };
    // Same F from the complex selection, before any real part is taken.
    let imag_max = if pairs.is_empty() {
        0.0
    } else {
        let (xc, wc) = pair_rotated(pairs);
        let (xr, wr) = extra_cols;
        let xc = hstack(&[&cols_of(&xc, n), &to_c(xr)]);
        let wc = hstack(&[&cols_of(&wc, m), &to_c(wr)]);
        max_imag(&(wc * pinv(&xc, tol)))
    };
    let warning = (cond_v > COND_WARNING)
        .then(|| format!("eigenvector matrix condition number {cond_v:.3e} exceeds {COND_WARNING:.0e}"));
    FeedbackResult {
        f,
        assigned: pairs.iter().map(|p| (p.lambda, p.v.clone())).collect(),
        residual_eig,
        residual_out,
        residual_inv,
        cond_v,
        imag_max,
        warning,
    }
}

/// `F = [w₁ … w_r] [v₁ … v_r]^†` over the realified selection.
pub fn synthesize_feedback(a: &RMat, b: &RMat, selection: &[KernelChoice], tol: Tol) -> Result<FeedbackResult> {
    let sys = SystemQuad::pair(a.clone(), b.clone())?;
    let (n, m) = (sys.n(), sys.m());
    if selection.is_empty() {
        return Ok(FeedbackResult::zero(m, n));
    }
    let mut pairs = Vec::with_capacity(selection.len());
    for ch in selection {
        if ch.kernel.v.nrows() != n || ch.kernel.w.nrows() != m || ch.coeffs.len() != ch.kernel.q() {
            return Err(GeoError::DimensionMismatch("kernel choice does not match the pair".into()));
        }
        let v = &ch.kernel.v * &ch.coeffs;
        let w = &ch.kernel.w * &ch.coeffs;
        pairs.push(Eigenpair::normalized(ch.kernel.lambda, v, w));
    }
    let (x, w, full) = realify(&pairs, n, m, tol)?;
    let rank = rank_of(&to_c(&x), tol);
    if rank < x.ncols() {
        return Err(GeoError::DependentSelection {
            rank,
            count: x.ncols(),
        });
    }
    let f = crate::linalg::right_divide_refined(&w, &x, tol);
    let empty = (RMat::zeros(n, 0), RMat::zeros(m, 0));
    Ok(finish(&sys, f, &full, None, (&empty.0, &empty.1), tol))
}

/// Kernel of the pencil restricted to state directions inside `v`.
fn constrained_kernel(sys: &SystemQuad, v: &Subspace, lambda: c64, tol: Tol) -> PencilKernel {
    let n = sys.n();
    let comp = v.orthogonal_complement(tol);
    let base = pencils::balanced_pencil(sys, lambda);
    let mut extra = CMat::zeros(comp.dim(), n + sys.m());
    extra.view_mut((0, 0), (comp.dim(), n)).copy_from(&comp.basis().adjoint());
    let k = kernel_basis(&crate::linalg::vstack(&[&base, &extra]), tol);
    let q = k.dim();
    let v = k.basis().view((0, 0), (n, q)).into_owned();
    let w = k.basis().view((n, 0), (sys.m(), q)).into_owned();
    // Recombine so the state parts are orthonormal.
    let (s, _, right) = crate::linalg::svd(&v);
    let keep = s.iter().take_while(|&&x| x > STATE_FLOOR).count();
    let coeffs = CMat::from_fn(q, keep, |i, j| right[(i, j)] / c64::new(s[j], 0.0));
    PencilKernel {
        lambda,
        v: &v * &coeffs,
        w: &w * &coeffs,
        kind: if sys.has_output() {
            pencils::PencilKind::Rosenbrock
        } else {
            pencils::PencilKind::Reachability
        },
    }
}

struct Selection {
    basis: CMat,
    pairs: Vec<Eigenpair>,
}

impl Selection {
    fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn residual_of(&self, x: &CMat) -> CMat {
        if self.dim() == 0 {
            x.clone()
        } else {
            x - &self.basis * (self.basis.adjoint() * x)
        }
    }

    fn push_real(&mut self, cols: &[CVec]) {
        let mut all: Vec<CVec> = (0..self.dim()).map(|j| self.basis.column(j).into_owned()).collect();
        all.extend(cols.iter().cloned());
        let m = cols_of(&all, self.basis.nrows());
        let q = if is_exactly_real(&m) {
            to_c(&re_part(&m).qr().q())
        } else {
            m.qr().q()
        };
        self.basis = q;
    }
}

fn top_right_vectors(m: &CMat) -> (Vec<f64>, CMat) {
    let (s, _, v) = crate::linalg::svd(m);
    (s, v)
}

fn try_real(sel: &Selection, ker: &PencilKernel) -> Option<Eigenpair> {
    if ker.q() == 0 {
        return None;
    }
    let (s, vr) = top_right_vectors(&sel.residual_of(&ker.v));
    if s.first().copied().unwrap_or(0.0) <= SELECT_FLOOR {
        return None;
    }
    let c = vr.column(0).into_owned();
    let p = Eigenpair::normalized(ker.lambda, &ker.v * &c, &ker.w * &c);
    let ph = real_phase(&p.v);
    Some(Eigenpair {
        lambda: c64::new(ker.lambda.re, 0.0),
        v: (&p.v * ph).map(|z| c64::new(z.re, 0.0)),
        w: (&p.w * ph).map(|z| c64::new(z.re, 0.0)),
    })
}

fn re_im(v: &CVec) -> CMat {
    CMat::from_fn(v.len(), 2, |i, j| c64::new(if j == 0 { v[i].re } else { v[i].im }, 0.0))
}

fn try_pair(sel: &Selection, ker: &PencilKernel) -> Option<Eigenpair> {
    if ker.q() == 0 {
        return None;
    }
    let (s, vr) = top_right_vectors(&sel.residual_of(&ker.v));
    if s.first().copied().unwrap_or(0.0) <= SELECT_FLOOR {
        return None;
    }
    let c1 = vr.column(0).into_owned();
    let mut cands = alloc::vec![c1.clone()];
    if vr.ncols() > 1 {
        let c2 = vr.column(1).into_owned();
        let h = c64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        cands.push((&c1 + &c2 * c64::new(0.0, 1.0)) * h);
        cands.push((&c1 + &c2) * h);
    }
    for c in cands {
        let v = &ker.v * &c;
        let w = &ker.w * &c;
        let vn = v.norm();
        if vn == 0.0 {
            continue;
        }
        let (v, w) = align_phase(&v, &w);
        let ri = sel.residual_of(&re_im(&v));
        let sv = crate::linalg::singular_values(&ri);
        if sv.len() == 2 && sv[1] > SELECT_FLOOR {
            return Some(Eigenpair::normalized(ker.lambda, v, w));
        }
    }
    None
}

/// Round-robin greedy selection of eigenvectors inside `target`, one real
/// eigenvalue or one conjugate pair at a time, until `target` is spanned or
/// no listed eigenvalue adds a new direction.
fn greedy_select(sys: &SystemQuad, target: &Subspace, spec: &SpectrumSpec, tol: Tol) -> Selection {
    let units = spec.units();
    let kernels: Vec<PencilKernel> = units
        .iter()
        .map(|u| {
            let i = match *u {
                SpectrumUnit::Real(i) | SpectrumUnit::Pair(i, _) => i,
            };
            constrained_kernel(sys, target, spec.lambdas()[i], tol)
        })
        .collect();
    let k = target.dim();
    let mut sel = Selection {
        basis: CMat::zeros(sys.n(), 0),
        pairs: Vec::new(),
    };
    loop {
        let mut progress = false;
        for (u, ker) in units.iter().zip(&kernels) {
            let room = k - sel.dim();
            match u {
                SpectrumUnit::Real(_) if room >= 1 => {
                    if let Some(p) = try_real(&sel, ker) {
                        sel.push_real(core::slice::from_ref(&p.v));
                        sel.pairs.push(p);
                        progress = true;
                    }
                }
                SpectrumUnit::Pair(..) if room >= 2 => {
                    if let Some(p) = try_pair(&sel, ker) {
                        let ri = re_im(&p.v);
                        sel.push_real(&[ri.column(0).into_owned(), ri.column(1).into_owned()]);
                        sel.pairs.push(Eigenpair {
                            lambda: p.lambda.conj(),
                            v: p.v.conjugate(),
                            w: p.w.conjugate(),
                        });
                        sel.pairs.push(p);
                        progress = true;
                    }
                }
                _ => {}
            }
        }
        if !progress || sel.dim() == k {
            return sel;
        }
    }
}

/// Friend of `target` whose restriction has the eigenpairs in `pairs` and
/// an arbitrary (least-squares) action on the rest of `target`.
pub(crate) fn friend_from_pairs(
    sys: &SystemQuad,
    target: &Subspace,
    pairs: &[Eigenpair],
    tol: Tol,
) -> Result<FeedbackResult> {
    let (n, m) = (sys.n(), sys.m());
    let (xs, ws, full) = realify(pairs, n, m, tol)?;
    let x = target.real_basis();
    // Orthonormal completion of span(xs) inside the target.
    let rest_dim = target.dim() - xs.ncols();
    let rest = if rest_dim == 0 {
        RMat::zeros(n, 0)
    } else {
        let span_sel = image_basis(&to_c(&xs), tol);
        let proj = span_sel.project_out(&to_c(&x));
        re_part(&crate::linalg::leading_left_vectors(&proj, rest_dim))
    };
    let urest = if rest_dim == 0 {
        RMat::zeros(m, 0)
    } else {
        // [[X, -B], [0, -D]] [Y; U] = [A; C] x for each completion column.
        let k = x.ncols();
        let p = sys.p();
        let mut lhs = RMat::zeros(n + p, k + m);
        lhs.view_mut((0, 0), (n, k)).copy_from(&x);
        lhs.view_mut((0, k), (n, m)).copy_from(&(-&sys.b));
        lhs.view_mut((n, k), (p, m)).copy_from(&(-&sys.d));
        let rhs = sys.state_map() * &rest;
        let sol = rpinv(&lhs, tol) * rhs;
        sol.view((k, 0), (m, rest_dim)).into_owned()
    };
    let xall = crate::linalg::rhstack(&[&xs, &rest]);
    let wall = crate::linalg::rhstack(&[&ws, &urest]);
    let f = crate::linalg::right_divide_refined(&wall, &xall, tol);
    Ok(finish(sys, f, &full, Some(target), (&rest, &urest), tol))
}

pub(crate) fn friend_with_spectrum(
    sys: &SystemQuad,
    target: &Subspace,
    spec: &SpectrumSpec,
    tol: Tol,
) -> Result<FeedbackResult> {
    let sel = greedy_select(sys, target, spec, tol);
    friend_from_pairs(sys, target, &sel.pairs, tol)
}

/// Closed-loop eigenvalue error accepted by [`place`], per unit of
/// spectral scale and eigenvector conditioning.
const PLACE_MATCH: f64 = 1e-6;

/// Pole placement on the whole state space of the pair `(A, B)`. Fails
/// unless every requested eigenvalue is assigned.
pub fn place(a: &RMat, b: &RMat, lambdas: &[c64], tol: Tol) -> Result<FeedbackResult> {
    let sys = SystemQuad::pair(a.clone(), b.clone())?;
    let forbidden = pencils::uncontrollable_eigenvalues(a, b, tol);
    let spec = pencils::validate_spectrum(lambdas, &forbidden, tol)?;
    let out = geometry::friend_of(&sys, &Subspace::full(sys.n()), Some(&spec), tol)?;
    if out.assigned.len() < lambdas.len() {
        return Err(GeoError::SpectrumNotAssignable(f64::INFINITY));
    }
    if lambdas.len() == sys.n() {
        let closed = reigenvalues(&(a + b * &out.f));
        let dist = match_distance(&closed, lambdas);
        let scale = lambdas.iter().map(|l| l.norm()).fold(1.0, f64::max);
        if dist > PLACE_MATCH * scale * out.cond_v.max(1.0) {
            return Err(GeoError::SpectrumNotAssignable(dist));
        }
    }
    Ok(out)
}

/// Validates `lambdas` against the values forbidden for `sys`.
pub fn admissible_spectrum(sys: &SystemQuad, lambdas: &[c64], tol: Tol) -> Result<SpectrumSpec> {
    let forbidden = pencils::forbidden_values(sys, tol)?;
    pencils::validate_spectrum(lambdas, &forbidden, tol)
}

/// `K_h = im [V₁ … V_h]` over the real field, with the kernels it came from.
pub fn build_kh(sys: &SystemQuad, spec: &SpectrumSpec, tol: Tol) -> Result<(Subspace, Vec<PencilKernel>)> {
    let spec = admissible_spectrum(sys, spec.lambdas(), tol)?;
    let kernels: Vec<PencilKernel> = spec
        .lambdas()
        .iter()
        .map(|&l| pencils::system_pencil_kernel(sys, l, tol))
        .collect();
    Ok((kh_from_kernels(sys.n(), &kernels, tol), kernels))
}

pub(crate) fn kh_from_kernels(n: usize, kernels: &[PencilKernel], tol: Tol) -> Subspace {
    let mut cols: Vec<CMat> = Vec::new();
    for k in kernels {
        if k.q() == 0 {
            continue;
        }
        cols.push(to_c(&re_part(&k.v)));
        if !is_exactly_real(&k.v) {
            cols.push(to_c(&k.v.map(|z| z.im)));
        }
    }
    if cols.is_empty() {
        return Subspace::zero(n);
    }
    let refs: Vec<&CMat> = cols.iter().collect();
    image_basis_scaled(&hstack(&refs), 1.0, tol)
}

/// Rank of the concatenated state parts `[V₁ … V_h]` over the complex field.
pub fn kernel_rank(kernels: &[PencilKernel], n: usize, tol: Tol) -> usize {
    let refs: Vec<&CMat> = kernels.iter().filter(|k| k.q() > 0).map(|k| &k.v).collect();
    if refs.is_empty() {
        return 0;
    }
    debug_assert!(refs.iter().all(|v| v.nrows() == n));
    image_basis_scaled(&hstack(&refs), 1.0, tol).dim()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainMode {
    Reachability,
    Rosenbrock,
}

/// Stationarity index of the Krylov chain, or of `V* ∩ S_ℓ`.
pub fn min_distinct_spectrum(sys: &SystemQuad, mode: ChainMode, tol: Tol) -> Result<usize> {
    match mode {
        ChainMode::Reachability => Ok(geometry::reachable_subspace(&sys.a, &sys.b, tol).h_min),
        ChainMode::Rosenbrock => {
            if !sys.has_output() {
                return Ok(geometry::reachable_subspace(&sys.a, &sys.b, tol).h_min);
            }
            let vstar = geometry::vstar(sys, tol)?;
            let rdim = geometry::rstar(sys, tol)?.dim();
            let chain = geometry::sstar_sequence(sys, tol)?;
            for l in 0..=chain.len() {
                let inter = crate::linalg::subspace_intersect(&vstar, chain.term(l), tol)?;
                if inter.dim() == rdim {
                    return Ok(l);
                }
            }
            Ok(chain.len())
        }
    }
}

/// `R_h`: the reachability subspace on `K_h`.
pub fn reach_on_kh(sys: &SystemQuad, spec: &SpectrumSpec, tol: Tol) -> Result<Subspace> {
    let (kh, _) = build_kh(sys, spec, tol)?;
    geometry::reachability_on(sys, &kh, tol)
}

/// Saturation index of the Krylov chain of a diagonal `Δ` and `H`.
pub fn diag_krylov_saturation(delta: &CMat, h: &CMat, tol: Tol) -> Result<usize> {
    let n = delta.nrows();
    if delta.ncols() != n || h.nrows() != n {
        return Err(GeoError::DimensionMismatch("Delta must be square with as many rows as H".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && delta[(i, j)] != c64::new(0.0, 0.0) {
                return Err(GeoError::NonDiagonal);
            }
        }
    }
    let chain = geometry::krylov_chain_c(delta, h, tol);
    Ok(chain.len() - 2)
}

/// Number of clusters among `values` at radius `tol.abs · max(1, |value|)`.
pub fn distinct_count(values: &[c64], tol: Tol) -> usize {
    let r = tol.abs * values.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    crate::linalg::dedup_values(values, r).len()
}
