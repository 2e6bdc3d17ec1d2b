//! System quadruples and seeded random generation.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry;
use crate::linalg::{rank_of, rhstack, rvstack, to_c, RMat, Tol};
use crate::{GeoError, Result};

const RETRY_BUDGET: usize = 100;

/// The quadruple `(A, B, C, D)`; `p = 0` means no output.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemQuad {
    pub a: RMat,
    pub b: RMat,
    pub c: RMat,
    pub d: RMat,
}

fn check_finite(name: &str, m: &RMat) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(GeoError::NonFinite(name.into()))
    }
}

impl SystemQuad {
    pub fn new(a: RMat, b: RMat, c: RMat, d: RMat) -> Result<Self> {
        let n = a.nrows();
        let mismatch = |what: &str| Err(GeoError::DimensionMismatch(what.into()));
        if n == 0 || a.ncols() != n {
            return mismatch("A must be square and non-empty");
        }
        if b.nrows() != n || b.ncols() == 0 {
            return mismatch("B must have n rows and at least one column");
        }
        let (p, m) = (c.nrows(), b.ncols());
        if c.ncols() != n {
            return mismatch("C must have n columns");
        }
        if d.nrows() != p || d.ncols() != m {
            return mismatch("D must be p x m");
        }
        for (name, mat) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            check_finite(name, mat)?;
        }
        Ok(SystemQuad { a, b, c, d })
    }

    /// A pair `(A, B)` with empty output maps.
    pub fn pair(a: RMat, b: RMat) -> Result<Self> {
        let (n, m) = (a.nrows(), b.ncols());
        SystemQuad::new(a, b, RMat::zeros(0, n), RMat::zeros(0, m))
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.b.ncols()
    }

    pub fn p(&self) -> usize {
        self.c.nrows()
    }

    pub fn has_output(&self) -> bool {
        self.p() > 0
    }

    /// Copy with the output maps dropped.
    pub fn without_output(&self) -> SystemQuad {
        SystemQuad::pair(self.a.clone(), self.b.clone()).expect("validated dimensions")
    }

    /// `[A; C]`.
    pub fn state_map(&self) -> RMat {
        rvstack(&[&self.a, &self.c])
    }

    /// `[B; D]`.
    pub fn input_map(&self) -> RMat {
        rvstack(&[&self.b, &self.d])
    }

    /// `[C D]`.
    pub fn output_row(&self) -> RMat {
        rhstack(&[&self.c, &self.d])
    }

    /// Equivalent system `(A/a, βB, γC, aβγD)` with unit-norm `A`, `B`, `C`.
    ///
    /// Every term of the output-nulling and input-containing recursions is
    /// unchanged by this rescaling.
    pub fn balanced(&self) -> SystemQuad {
        let unit = |x: f64| if x > 0.0 { x } else { 1.0 };
        let alpha = unit(crate::linalg::rnorm2(&self.a));
        let beta = 1.0 / unit(crate::linalg::rnorm2(&self.b));
        let gamma = 1.0 / unit(crate::linalg::rnorm2(&self.c));
        SystemQuad {
            a: &self.a / alpha,
            b: &self.b * beta,
            c: &self.c * gamma,
            d: &self.d * (alpha * beta * gamma),
        }
    }
}

pub fn dual_of(sys: &SystemQuad) -> Result<SystemQuad> {
    if !sys.has_output() {
        return Err(GeoError::NoOutput);
    }
    SystemQuad::new(
        sys.a.transpose(),
        sys.c.transpose(),
        sys.b.transpose(),
        sys.d.transpose(),
    )
}

/// Parameters for [`random_system`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub seed: u64,
    pub controllable: bool,
    pub target_dim_rstar: Option<usize>,
}

impl GenSpec {
    pub fn new(n: usize, m: usize, p: usize, seed: u64) -> Self {
        GenSpec {
            n,
            m,
            p,
            seed,
            controllable: false,
            target_dim_rstar: None,
        }
    }

    pub fn controllable(mut self) -> Self {
        self.controllable = true;
        self
    }

    pub fn with_rstar(mut self, dim: usize) -> Self {
        self.target_dim_rstar = Some(dim);
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(GeoError::InvalidSpec(msg.into()));
        if self.n == 0 || self.m == 0 {
            return bad("n and m must be positive");
        }
        if self.m > self.n {
            return bad("m must not exceed n");
        }
        if self.p > self.n {
            return bad("p must not exceed n");
        }
        if let Some(r) = self.target_dim_rstar {
            if self.p == 0 {
                return bad("target_dim_rstar requires p >= 1");
            }
            if r > self.n {
                return bad("target_dim_rstar must not exceed n");
            }
        }
        Ok(())
    }
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-like random orthogonal matrix (Q factor of a Gaussian matrix).
pub fn orthogonal_matrix(rng: &mut ChaCha8Rng, n: usize) -> RMat {
    if n == 0 {
        return RMat::zeros(0, 0);
    }
    let qr = normal_matrix(rng, n, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn controllable(a: &RMat, b: &RMat) -> bool {
    geometry::krylov_rank(a, b, Tol::default()) == a.nrows()
}

/// Deterministic random quadruple with standard normal entries.
pub fn random_system(spec: &GenSpec) -> Result<SystemQuad> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    if let Some(r) = spec.target_dim_rstar {
        return structured_system(spec, r, &mut rng);
    }
    let (n, m, p) = (spec.n, spec.m, spec.p);
    for _ in 0..RETRY_BUDGET {
        let a = normal_matrix(&mut rng, n, n);
        let b = normal_matrix(&mut rng, n, m);
        let c = normal_matrix(&mut rng, p, n);
        let d = normal_matrix(&mut rng, p, m);
        if !spec.controllable || controllable(&a, &b) {
            return SystemQuad::new(a, b, c, d);
        }
    }
    Err(GeoError::GenerationFailed(RETRY_BUDGET))
}

/// Random system whose reachable subspace has dimension `n - unreachable`.
///
/// Built in Kalman form and hidden by a random orthogonal change of basis.
pub fn random_uncontrollable_system(spec: &GenSpec, unreachable: usize) -> Result<SystemQuad> {
    spec.validate()?;
    let (n, m, p) = (spec.n, spec.m, spec.p);
    if unreachable == 0 || unreachable > n {
        return Err(GeoError::InvalidSpec(format!(
            "unreachable dimension {unreachable} outside 1..={n}"
        )));
    }
    let r = n - unreachable;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for _ in 0..RETRY_BUDGET {
        let a11 = normal_matrix(&mut rng, r, r);
        let b1 = normal_matrix(&mut rng, r, m);
        if r > 0 && !controllable(&a11, &b1) {
            continue;
        }
        let mut a = normal_matrix(&mut rng, n, n);
        a.view_mut((0, 0), (r, r)).copy_from(&a11);
        a.view_mut((r, 0), (unreachable, r)).fill(0.0);
        let mut b = RMat::zeros(n, m);
        b.view_mut((0, 0), (r, m)).copy_from(&b1);
        let t = orthogonal_matrix(&mut rng, n);
        let c = normal_matrix(&mut rng, p, n);
        let d = normal_matrix(&mut rng, p, m);
        let a = &t * a * t.transpose();
        let b = &t * b;
        let sys = SystemQuad::new(a, b, c, d)?;
        if geometry::krylov_rank(&sys.a, &sys.b, Tol::default()) == r {
            return Ok(sys);
        }
    }
    Err(GeoError::GenerationFailed(RETRY_BUDGET))
}

/// Block structure adapted to `R* ⊂ V* ⊂ X` with `dim R* = r` and no
/// invariant zeros, mapped back through random orthogonal bases and a random
/// feedback.
fn structured_system(spec: &GenSpec, r: usize, rng: &mut ChaCha8Rng) -> Result<SystemQuad> {
    let (n, m, p) = (spec.n, spec.m, spec.p);
    let n3 = n - r;
    // Input split: m1 columns drive R*, the remaining m2 < p columns excite
    // the outer block, which then has no output-nulling subspace.
    let m1 = if r > 0 { (m + 1).saturating_sub(p).max(1) } else { (m + 1).saturating_sub(p) };
    let m2 = m - m1;
    let tol = Tol::default();
    for _ in 0..RETRY_BUDGET {
        let mut abar = normal_matrix(rng, n, n);
        abar.view_mut((r, 0), (n3, r)).fill(0.0);
        let mut bbar = normal_matrix(rng, n, m);
        bbar.view_mut((r, 0), (n3, m1)).fill(0.0);
        let mut cbar = normal_matrix(rng, p, n);
        cbar.view_mut((0, 0), (p, r)).fill(0.0);
        let mut dbar = normal_matrix(rng, p, m);
        dbar.view_mut((0, 0), (p, m1)).fill(0.0);
        let t = orthogonal_matrix(rng, n);
        let omega = orthogonal_matrix(rng, m);
        let f0 = normal_matrix(rng, m, n);
        let a11 = abar.view((0, 0), (r, r)).into_owned();
        let b11 = bbar.view((0, 0), (r, m1)).into_owned();
        if r > 0 && !controllable(&a11, &b11) {
            continue;
        }
        let tinv = t.transpose();
        let b = &t * &bbar * omega.transpose();
        let d = &dbar * omega.transpose();
        let a = &t * &abar * &tinv - &b * &f0;
        let c = &cbar * &tinv - &d * &f0;
        let sys = SystemQuad::new(a, b, c, d)?;
        if m2 > 0 || n3 > 0 {
            let vstar = geometry::vstar(&sys, tol)?;
            if vstar.dim() != r {
                continue;
            }
        }
        let rs = geometry::rstar(&sys, tol)?;
        if rs.dim() == r {
            return Ok(sys);
        }
    }
    Err(GeoError::GenerationFailed(RETRY_BUDGET))
}

/// Number of columns among `b` that are needed (rank of `B`).
pub fn input_rank(b: &RMat) -> usize {
    rank_of(&to_c(b), Tol::default())
}

/// Replace the last column of `B` by a random combination of the others.
pub fn rank_deficient_input(rng: &mut ChaCha8Rng, b: &RMat) -> RMat {
    let m = b.ncols();
    if m < 2 {
        return b.clone();
    }
    let coeffs: Vec<f64> = (0..m - 1).map(|_| rng.sample(StandardNormal)).collect();
    let mut out = b.clone();
    let mut last = RMat::zeros(b.nrows(), 1);
    for (j, c) in coeffs.iter().enumerate() {
        last += b.column(j) * *c;
    }
    out.column_mut(m - 1).copy_from(&last.column(0));
    out
}
