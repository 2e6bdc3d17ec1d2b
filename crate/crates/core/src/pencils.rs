//! Kernels of the reachability and Rosenbrock pencils, uncontrollable
//! eigenvalues and invariant zeros.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry;
use crate::linalg::{
    c64, cx, dedup_values, eigenvalues, kernel_basis, rank_of, rnorm2, to_c, vstack, CMat, RMat,
    Tol,
};
use crate::sysmodel::SystemQuad;
use crate::{GeoError, Result};

const NORMAL_RANK_SAMPLES: usize = 5;
const NORMAL_RANK_SEED: u64 = 0x5e_ed0f_2e80;
const FORBIDDEN_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PencilKind {
    Reachability,
    Rosenbrock,
}

/// Orthonormal basis `[V; W]` of a pencil kernel at one `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilKernel {
    pub lambda: c64,
    pub v: CMat,
    pub w: CMat,
    pub kind: PencilKind,
}

impl PencilKernel {
    pub fn q(&self) -> usize {
        self.v.ncols()
    }

    pub fn stacked(&self) -> CMat {
        vstack(&[&self.v, &self.w])
    }
}

/// A validated, self-conjugate list of distinct eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    lambdas: Vec<c64>,
    real: Vec<bool>,
    partner: Vec<Option<usize>>,
}

/// One real eigenvalue or one conjugate pair, by index into the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumUnit {
    Real(usize),
    Pair(usize, usize),
}

impl SpectrumSpec {
    pub fn lambdas(&self) -> &[c64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn is_real(&self, i: usize) -> bool {
        self.real[i]
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.partner[i]
    }

    /// Real entries and conjugate pairs in order of first appearance; the
    /// first index of a pair has positive imaginary part.
    pub fn units(&self) -> Vec<SpectrumUnit> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            match self.partner[i] {
                None => out.push(SpectrumUnit::Real(i)),
                Some(j) if j > i => {
                    if self.lambdas[i].im > 0.0 {
                        out.push(SpectrumUnit::Pair(i, j))
                    } else {
                        out.push(SpectrumUnit::Pair(j, i))
                    }
                }
                Some(_) => {}
            }
        }
        out
    }
}

fn scale_tol(lambdas: &[c64], tol: Tol) -> f64 {
    let big = lambdas.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    tol.abs * big
}

/// Checks distinctness, self-conjugacy and distance from `forbidden`.
pub fn validate_spectrum(lambdas: &[c64], forbidden: &[c64], tol: Tol) -> Result<SpectrumSpec> {
    if let Some(z) = lambdas.iter().find(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(GeoError::NonFinite(alloc::format!("eigenvalue {z}")));
    }
    let st = scale_tol(lambdas, tol);
    for i in 0..lambdas.len() {
        for j in 0..i {
            if (lambdas[i] - lambdas[j]).norm() <= st {
                return Err(GeoError::DuplicateLambda(lambdas[i]));
            }
        }
    }
    let mut vals: Vec<c64> = lambdas.to_vec();
    let mut real = alloc::vec![false; vals.len()];
    let mut partner = alloc::vec![None; vals.len()];
    for i in 0..vals.len() {
        if vals[i].im.abs() <= st {
            vals[i].im = 0.0;
            real[i] = true;
        }
    }
    for i in 0..vals.len() {
        if real[i] || partner[i].is_some() {
            continue;
        }
        let conj = vals[i].conj();
        let j = (0..vals.len()).find(|&j| j != i && !real[j] && (vals[j] - conj).norm() <= st);
        match j {
            Some(j) => {
                vals[j] = conj;
                partner[i] = Some(j);
                partner[j] = Some(i);
            }
            None => return Err(GeoError::NotSelfConjugate(vals[i])),
        }
    }
    for &z in &vals {
        for &f in forbidden {
            let dist = (z - f).norm();
            if dist <= FORBIDDEN_MARGIN * st {
                return Err(GeoError::TooCloseToForbidden {
                    lambda: z,
                    forbidden: f,
                    distance: dist,
                });
            }
        }
    }
    Ok(SpectrumSpec {
        lambdas: vals,
        real,
        partner,
    })
}

fn scaled(m: &CMat) -> CMat {
    let s = m.norm();
    if s > 0.0 {
        m / c64::new(s, 0.0)
    } else {
        m.clone()
    }
}

/// `[A - λI, B]`.
pub fn reach_pencil(a: &RMat, b: &RMat, lambda: c64) -> CMat {
    let n = a.nrows();
    let mut top = crate::linalg::hstack(&[&to_c(a), &to_c(b)]);
    for k in 0..n {
        top[(k, k)] -= lambda;
    }
    top
}

/// `[[A - λI, B], [C, D]]`.
pub fn rosenbrock_matrix(sys: &SystemQuad, lambda: c64) -> CMat {
    let top = reach_pencil(&sys.a, &sys.b, lambda);
    let bottom = to_c(&sys.output_row());
    vstack(&[&top, &bottom])
}

/// Same kernel as [`rosenbrock_matrix`], with each block row normalized.
pub(crate) fn balanced_pencil(sys: &SystemQuad, lambda: c64) -> CMat {
    let top = scaled(&reach_pencil(&sys.a, &sys.b, lambda));
    let bottom = scaled(&to_c(&sys.output_row()));
    vstack(&[&top, &bottom])
}

fn split(kernel: &CMat, n: usize, lambda: c64, kind: PencilKind) -> PencilKernel {
    let q = kernel.ncols();
    let m = kernel.nrows() - n;
    PencilKernel {
        lambda,
        v: kernel.view((0, 0), (n, q)).into_owned(),
        w: kernel.view((n, 0), (m, q)).into_owned(),
        kind,
    }
}

pub fn reach_pencil_kernel(a: &RMat, b: &RMat, lambda: c64, tol: Tol) -> PencilKernel {
    let k = kernel_basis(&scaled(&reach_pencil(a, b, lambda)), tol);
    split(k.basis(), a.nrows(), lambda, PencilKind::Reachability)
}

pub fn rosenbrock_kernel(sys: &SystemQuad, lambda: c64, tol: Tol) -> Result<PencilKernel> {
    if !sys.has_output() {
        return Err(GeoError::NoOutput);
    }
    Ok(system_pencil_kernel(sys, lambda, tol))
}

/// Rosenbrock kernel, or the reachability kernel when `p = 0`.
pub fn system_pencil_kernel(sys: &SystemQuad, lambda: c64, tol: Tol) -> PencilKernel {
    if !sys.has_output() {
        return reach_pencil_kernel(&sys.a, &sys.b, lambda, tol);
    }
    let k = kernel_basis(&balanced_pencil(sys, lambda), tol);
    split(k.basis(), sys.n(), lambda, PencilKind::Rosenbrock)
}

fn eig_cluster_radius(values: &[c64], tol: Tol) -> f64 {
    num_traits::Float::sqrt(tol.abs) * values.iter().fold(1.0f64, |acc, z| acc.max(z.norm()))
}

/// Eigenvalues of `A` at which `[A - λI, B]` loses row rank.
pub fn uncontrollable_eigenvalues(a: &RMat, b: &RMat, tol: Tol) -> Vec<c64> {
    let ev = eigenvalues(&to_c(a));
    let reps = dedup_values(&ev, eig_cluster_radius(&ev, tol));
    let n = a.nrows();
    reps.into_iter()
        .filter(|&z| rank_of(&scaled(&reach_pencil(a, b, z)), tol.loose()) < n)
        .collect()
}

/// Finite invariant zeros with their rank-drop cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct ZerosReport {
    /// Eigenvalues of the zero block, with multiplicity.
    pub zeros: Vec<c64>,
    /// Same values with clusters merged.
    pub distinct: Vec<c64>,
    /// Rank of the system pencil at generic `λ`.
    pub normal_rank: usize,
    /// Per zero: whether the pencil rank falls below `normal_rank`.
    pub rank_drop: Vec<bool>,
}

impl ZerosReport {
    pub fn consistent(&self) -> bool {
        self.rank_drop.iter().all(|&d| d)
    }
}

/// Maximum pencil rank over a few seeded random evaluation points.
pub fn normal_rank(sys: &SystemQuad, tol: Tol) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(NORMAL_RANK_SEED);
    let scale = rnorm2(&sys.a).max(1.0);
    (0..NORMAL_RANK_SAMPLES)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            rank_of(&balanced_pencil(sys, cx(re, im) * scale), tol)
        })
        .max()
        .unwrap_or(0)
}

pub fn pencil_rank_at(sys: &SystemQuad, lambda: c64, tol: Tol) -> usize {
    rank_of(&balanced_pencil(sys, lambda), tol.loose())
}

pub fn invariant_zeros(sys: &SystemQuad, tol: Tol) -> Result<ZerosReport> {
    let morse = geometry::morse_decomposition(sys, tol)?;
    let zeros = morse.zeros;
    let distinct = dedup_values(&zeros, eig_cluster_radius(&zeros, tol));
    let nr = normal_rank(sys, tol);
    let rank_drop = zeros.iter().map(|&z| pencil_rank_at(sys, z, tol) < nr).collect();
    Ok(ZerosReport {
        zeros,
        distinct,
        normal_rank: nr,
        rank_drop,
    })
}

/// Values an assigned spectrum must avoid: invariant zeros when the system
/// has an output, uncontrollable eigenvalues otherwise.
pub fn forbidden_values(sys: &SystemQuad, tol: Tol) -> Result<Vec<c64>> {
    if sys.has_output() {
        Ok(invariant_zeros(sys, tol)?.zeros)
    } else {
        Ok(uncontrollable_eigenvalues(&sys.a, &sys.b, tol))
    }
}
