//! Minkowski norms `F = √L(α₁², α₂²)` on `V₁ ⊕ V₂` and their tensors.
//!
//! Vectors are given in frame coordinates: the first `n₁` entries span V₁,
//! the remaining `n₂` span V₂. The frame is α-orthonormal up to the block
//! scales in [`DatumDecomposition::alpha_scale`], which normalization uses
//! to absorb `φ(0)` and `φ(1)` without moving the coordinates.
//!
//! Closed forms are computed in adapted position `(a, 0, …, 0, a′)` and
//! conjugated back by a block rotation from `SO(n₁) × SO(n₂)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{validate_generating, GeneratingFamily, LDerivs};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatumDecomposition {
    pub n1: usize,
    pub n2: usize,
    /// `α₁(y) = s₀·|y′|`, `α₂(y) = s₁·|y″|` in frame coordinates.
    pub alpha_scale: [f64; 2],
    pub normalized: bool,
}

impl DatumDecomposition {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n2 < 2 || n1 < n2 {
            return Err(Error::InvalidSplit { n1, n2 });
        }
        Ok(Self {
            n1,
            n2,
            alpha_scale: [1.0, 1.0],
            normalized: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.n1 + self.n2
    }

    fn check(&self, y: &DVector<f64>) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.len(),
            });
        }
        if y.iter().all(|x| *x == 0.0) {
            return Err(Error::ZeroVector);
        }
        Ok(())
    }

    fn scale_of(&self, i: usize) -> f64 {
        if i < self.n1 {
            self.alpha_scale[0]
        } else {
            self.alpha_scale[1]
        }
    }

    /// Coordinates in the α-orthonormal frame.
    pub fn to_alpha(&self, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(y.len(), |i, _| self.scale_of(i) * y[i])
    }

    pub fn from_alpha(&self, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(y.len(), |i, _| y[i] / self.scale_of(i))
    }

    /// `(α₁(y), α₂(y))`.
    pub fn split(&self, y: &DVector<f64>) -> (f64, f64) {
        let t = self.to_alpha(y);
        (t.rows(0, self.n1).norm(), t.rows(self.n1, self.n2).norm())
    }

    pub fn alpha(&self, y: &DVector<f64>) -> f64 {
        let (a, b) = self.split(y);
        a.hypot(b)
    }
}

/// Rescale α₁, α₂ by `φ(0)`, `φ(1)` so the profile becomes normalized; F is
/// unchanged as a function of the frame coordinates.
pub fn normalize_datum(
    family: &GeneratingFamily,
    datum: &DatumDecomposition,
) -> Result<(GeneratingFamily, DatumDecomposition)> {
    let (p0, p1) = family.endpoint_squares()?;
    let report = validate_generating(family, 101)?;
    if !report.valid {
        return Err(Error::InvalidFamily(format!(
            "convexity margin {} at {:?}",
            report.min_margin, report.argmin
        )));
    }
    let fam = family.normalized()?;
    let mut out = datum.clone();
    out.alpha_scale = [
        datum.alpha_scale[0] * p0.sqrt(),
        datum.alpha_scale[1] * p1.sqrt(),
    ];
    out.normalized = true;
    Ok((fam, out))
}

pub fn eval_norm(
    family: &GeneratingFamily,
    datum: &DatumDecomposition,
    y: &DVector<f64>,
) -> Result<f64> {
    datum.check(y)?;
    let (a, b) = datum.split(y);
    Ok(family.l(a * a, b * b).sqrt())
}

/// Dense third-order array.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let p = self.idx(i, j, k);
        self.data[p] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest `|C_ijk − C_σ(ijk)|` over all index permutations.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let c = self.get(i, j, k);
                    for other in [
                        self.get(i, k, j),
                        self.get(j, i, k),
                        self.get(j, k, i),
                        self.get(k, i, j),
                        self.get(k, j, i),
                    ] {
                        worst = worst.max((c - other).abs());
                    }
                }
            }
        }
        worst
    }

    /// `C_ijk y^k` as an n×n matrix.
    pub fn contract_last(&self, y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            (0..self.n).map(|k| self.get(i, j, k) * y[k]).sum()
        })
    }

    /// `g^{ij} C_ijk`.
    pub fn trace_with(&self, g_inv: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_fn(self.n, |k, _| {
            let mut acc = 0.0;
            for i in 0..self.n {
                for j in 0..self.n {
                    acc += g_inv[(i, j)] * self.get(i, j, k);
                }
            }
            acc
        })
    }
}

/// Fundamental tensor and its inverse at one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalTensor {
    /// `α₁(y)`, `α₂(y)`: the adapted representative is `(a, 0, …, 0, a′)`.
    pub a: f64,
    pub a_prime: f64,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
}

/// Cartan tensor and mean torsion at one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanTensor {
    pub a: f64,
    pub a_prime: f64,
    pub c: Tensor3,
    /// `None` on the boundary `y ∈ V₁ ∪ V₂`, where the closed form has
    /// `1/a` or `1/a′` factors.
    pub mean_torsion: Option<DVector<f64>>,
}

/// Rotation `Q ∈ SO(k)` with `Q w = |w| e_t`.
fn block_rotation(w: &[f64], t: usize) -> DMatrix<f64> {
    let k = w.len();
    let r = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut q = DMatrix::identity(k, k);
    if r == 0.0 {
        return q;
    }
    // Householder onto −σ r e_t (no cancellation), then fix signs.
    let sigma = if w[t] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = DVector::from_column_slice(w);
    v[t] += sigma * r;
    let vv = v.dot(&v);
    q -= (&v * v.transpose()) * (2.0 / vv);
    q.row_mut(t).scale_mut(-sigma);
    if sigma < 0.0 {
        let f = if t == 0 { 1 } else { 0 };
        q.row_mut(f).scale_mut(-1.0);
    }
    q
}

/// Block rotation `R` with `R ỹ = (a, 0, …, 0, a′)` for α-coordinates `ỹ`.
fn adapted_rotation(datum: &DatumDecomposition, yt: &DVector<f64>) -> DMatrix<f64> {
    let (n1, n2) = (datum.n1, datum.n2);
    let n = n1 + n2;
    let mut r = DMatrix::zeros(n, n);
    let q1 = block_rotation(yt.rows(0, n1).as_slice(), 0);
    let q2 = block_rotation(yt.rows(n1, n2).as_slice(), n2 - 1);
    r.view_mut((0, 0), (n1, n1)).copy_from(&q1);
    r.view_mut((n1, n1), (n2, n2)).copy_from(&q2);
    r
}

struct Adapted {
    a: f64,
    ap: f64,
    d: LDerivs,
    rot: DMatrix<f64>,
}

fn adapt(
    family: &GeneratingFamily,
    datum: &DatumDecomposition,
    y: &DVector<f64>,
) -> Result<Adapted> {
    datum.check(y)?;
    let yt = datum.to_alpha(y);
    let a = yt.rows(0, datum.n1).norm();
    let ap = yt.rows(datum.n1, datum.n2).norm();
    Ok(Adapted {
        a,
        ap,
        d: family.l_derivs(a * a, ap * ap),
        rot: adapted_rotation(datum, &yt),
    })
}

/// `S M S` with `S` the diagonal block scale: α-coordinates to frame.
fn pull_back(datum: &DatumDecomposition, m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        datum.scale_of(i) * m[(i, j)] * datum.scale_of(j)
    })
}

pub fn fundamental_tensor(
    family: &GeneratingFamily,
    datum: &DatumDecomposition,
    y: &DVector<f64>,
) -> Result<FundamentalTensor> {
    let Adapted { a, ap, d, rot } = adapt(family, datum, y)?;
    let (n1, n) = (datum.n1, datum.dim());
    let last = n - 1;
    let det = d.l1 * d.l2 - 2.0 * d.l * d.l12;

    let mut g = DMatrix::zeros(n, n);
    let mut gi = DMatrix::zeros(n, n);
    for i in 0..n {
        let (gii, inv) = if i < n1 {
            (d.l1, 1.0 / d.l1)
        } else {
            (d.l2, 1.0 / d.l2)
        };
        g[(i, i)] = gii;
        gi[(i, i)] = inv;
    }
    let g11 = d.l1 + 2.0 * a * a * d.l11;
    let gnn = d.l2 + 2.0 * ap * ap * d.l22;
    let g1n = 2.0 * a * ap * d.l12;
    g[(0, 0)] = g11;
    g[(last, last)] = gnn;
    g[(0, last)] = g1n;
    g[(last, 0)] = g1n;
    gi[(0, 0)] = gnn / det;
    gi[(last, last)] = g11 / det;
    gi[(0, last)] = -g1n / det;
    gi[(last, 0)] = -g1n / det;

    let rt = rot.transpose();
    let g = pull_back(datum, &rt * g * &rot);
    let gi = {
        let m = &rt * gi * &rot;
        DMatrix::from_fn(n, n, |i, j| {
            m[(i, j)] / (datum.scale_of(i) * datum.scale_of(j))
        })
    };
    if !g.iter().all(|x| x.is_finite()) || g.clone().cholesky().is_none() {
        return Err(Error::InvalidFamily(format!(
            "fundamental tensor is not positive definite at a={a}, a'={ap}"
        )));
    }
    Ok(FundamentalTensor {
        a,
        a_prime: ap,
        g,
        g_inv: gi,
    })
}

pub fn cartan_tensor(
    family: &GeneratingFamily,
    datum: &DatumDecomposition,
    y: &DVector<f64>,
) -> Result<CartanTensor> {
    let Adapted { a, ap, d, rot } = adapt(family, datum, y)?;
    let (n1, n) = (datum.n1, datum.dim());
    let last = n - 1;

    // Nonzero entries in adapted position, up to symmetry.
    let mut entries: Vec<([usize; 3], f64)> = vec![
        ([0, 0, 0], 3.0 * a * d.l11 + 2.0 * a * a * a * d.l111),
        ([last, last, 0], a * d.l12 + 2.0 * a * ap * ap * d.l122),
        ([last, 0, 0], ap * d.l12 + 2.0 * a * a * ap * d.l112),
        (
            [last, last, last],
            3.0 * ap * d.l22 + 2.0 * ap * ap * ap * d.l222,
        ),
    ];
    for i in 1..last {
        let (c1, cn) = if i < n1 {
            (a * d.l11, ap * d.l12)
        } else {
            (a * d.l12, ap * d.l22)
        };
        entries.push(([i, i, 0], c1));
        entries.push(([i, i, last], cn));
    }

    let mut c = Tensor3::zeros(n);
    let mut seen = std::collections::HashSet::new();
    for ([p, q, r], val) in entries {
        if val == 0.0 {
            continue;
        }
        for [i, j, k] in [
            [p, q, r],
            [p, r, q],
            [q, p, r],
            [q, r, p],
            [r, p, q],
            [r, q, p],
        ] {
            if !seen.insert([i, j, k]) {
                continue;
            }
            // C(ỹ)_{xyz} = Σ R_ix R_jy R_kz C_ad[i][j][k]
            for x in 0..n {
                let rx = rot[(i, x)];
                if rx == 0.0 {
                    continue;
                }
                for yy in 0..n {
                    let rxy = rx * rot[(j, yy)];
                    if rxy == 0.0 {
                        continue;
                    }
                    for z in 0..n {
                        let p = c.idx(x, yy, z);
                        c.data[p] += val * rxy * rot[(k, z)];
                    }
                }
            }
        }
    }
    for x in 0..n {
        for yy in 0..n {
            for z in 0..n {
                let s = datum.scale_of(x) * datum.scale_of(yy) * datum.scale_of(z);
                let p = c.idx(x, yy, z);
                c.data[p] *= s;
            }
        }
    }

    let mean_torsion = if a > BOUNDARY_EPS * a.hypot(ap) && ap > BOUNDARY_EPS * a.hypot(ap) {
        let det = d.l1 * d.l2 - 2.0 * d.l * d.l12;
        let (k1, k2) = ((datum.n1 - 1) as f64, (datum.n2 - 1) as f64);
        let i1 = (-d.l * d.l12 - 2.0 * a * a * d.l * d.l112) / (a * det)
            + k1 * a * d.l11 / d.l1
            + k2 * a * d.l12 / d.l2;
        let i_n = (-d.l * d.l12 - 2.0 * ap * ap * d.l * d.l122) / (ap * det)
            + k1 * ap * d.l12 / d.l1
            + k2 * ap * d.l22 / d.l2;
        let mut ad = DVector::zeros(n);
        ad[0] = i1;
        ad[last] = i_n;
        let it = rot.transpose() * ad;
        Some(DVector::from_fn(n, |i, _| datum.scale_of(i) * it[i]))
    } else {
        None
    };

    Ok(CartanTensor {
        a,
        a_prime: ap,
        c,
        mean_torsion,
    })
}

/// Relative size below which `a` or `a′` counts as zero.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// `ln √det g(y)`, from a Cholesky factor of the fundamental tensor.
pub fn log_det_hessian(
    family: &GeneratingFamily,
    datum: &DatumDecomposition,
    y: &DVector<f64>,
) -> Result<f64> {
    let t = fundamental_tensor(family, datum, y)?;
    let chol = t.g.cholesky().expect("checked positive definite");
    Ok(chol.l().diagonal().iter().map(|x| x.ln()).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdMode {
    Central,
    /// Forward differences in the block whose norm is below the step.
    OneSided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdHessian {
    pub g: DMatrix<f64>,
    pub mode: FdMode,
}

/// Finite-difference Hessian of `½F²` in frame coordinates.
///
/// Differentiates the gradient `∂(½F²)/∂y = L₁·s₀²·y′ ⊕ L₂·s₁²·y″`
/// numerically. Blocks whose norm is below `step` use second-order
/// forward differences and the result is flagged [`FdMode::OneSided`].
pub fn hessian_fd_oracle(
    family: &GeneratingFamily,
    datum: &DatumDecomposition,
    y: &DVector<f64>,
    step: f64,
) -> Result<FdHessian> {
    datum.check(y)?;
    let limit = datum.alpha(y) / 100.0;
    if !(step > 0.0 && step <= limit * (1.0 + 1e-12)) {
        return Err(Error::StepTooLarge { step, limit });
    }
    let (n1, n) = (datum.n1, datum.dim());
    let grad = |z: &DVector<f64>| -> DVector<f64> {
        let (a, b) = datum.split(z);
        let d = family.l_derivs(a * a, b * b);
        let [s0, s1] = datum.alpha_scale;
        DVector::from_fn(n, |i, _| {
            if i < n1 {
                d.l1 * s0 * s0 * z[i]
            } else {
                d.l2 * s1 * s1 * z[i]
            }
        })
    };
    let thin = [
        y.rows(0, n1).norm() < step,
        y.rows(n1, n - n1).norm() < step,
    ];
    let mut g = DMatrix::zeros(n, n);
    let mut mode = FdMode::Central;
    let g0 = grad(y);
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = step;
        let col = if thin[usize::from(j >= n1)] {
            mode = FdMode::OneSided;
            let f1 = grad(&(y + &e));
            let f2 = grad(&(y + &e * 2.0));
            (f1 * 4.0 - &g0 * 3.0 - f2) / (2.0 * step)
        } else {
            (grad(&(y + &e)) - grad(&(y - &e))) / (2.0 * step)
        };
        g.set_column(j, &col);
    }
    Ok(FdHessian { g, mode })
}

/// Central-difference gradient of [`log_det_hessian`], the mean-torsion
/// oracle.
pub fn mean_torsion_fd(
    family: &GeneratingFamily,
    datum: &DatumDecomposition,
    y: &DVector<f64>,
    step: f64,
) -> Result<DVector<f64>> {
    datum.check(y)?;
    let n = datum.dim();
    let mut out = DVector::zeros(n);
    for k in 0..n {
        let mut e = DVector::zeros(n);
        e[k] = step;
        let p = log_det_hessian(family, datum, &(y + &e))?;
        let m = log_det_hessian(family, datum, &(y - &e))?;
        out[k] = (p - m) / (2.0 * step);
    }
    Ok(out)
}

/// `‖a − b‖∞ / max(‖b‖∞, floor)`.
pub fn relative_deviation<'a, I>(a: I, b: I, floor: f64) -> f64
where
    I: IntoIterator<Item = &'a f64>,
{
    let mut diff: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (x, y) in a.into_iter().zip(b) {
        diff = diff.max((x - y).abs());
        scale = scale.max(y.abs());
    }
    diff / scale.max(floor)
}

/// Floor for [`relative_deviation`] so near-zero references are compared
/// absolutely.
pub const DEVIATION_FLOOR: f64 = 1e-3;

/// A random unit-α direction with `min(α₁, α₂) ≥ ratio·α`.
pub fn random_interior_direction<R: Rng + ?Sized>(
    datum: &DatumDecomposition,
    rng: &mut R,
    ratio: f64,
) -> DVector<f64> {
    let n = datum.dim();
    loop {
        let t = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let a = t.rows(0, datum.n1).norm();
        let b = t.rows(datum.n1, datum.n2).norm();
        let r = a.hypot(b);
        if a >= ratio * r && b >= ratio * r {
            return datum.from_alpha(&(t / r));
        }
    }
}

/// Random orthogonal `k×k` matrix with determinant +1.
pub fn random_rotation<R: Rng + ?Sized>(k: usize, rng: &mut R) -> DMatrix<f64> {
    let m = DMatrix::from_fn(k, k, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for i in 0..k {
        if r[(i, i)] < 0.0 {
            q.column_mut(i).scale_mut(-1.0);
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).scale_mut(-1.0);
    }
    q
}

/// Random element of `SO(n₁) × SO(n₂)` acting on frame coordinates.
pub fn random_block_rotation<R: Rng + ?Sized>(
    datum: &DatumDecomposition,
    rng: &mut R,
) -> DMatrix<f64> {
    let (n1, n2) = (datum.n1, datum.n2);
    let mut r = DMatrix::zeros(n1 + n2, n1 + n2);
    r.view_mut((0, 0), (n1, n1))
        .copy_from(&random_rotation(n1, rng));
    r.view_mut((n1, n1), (n2, n2))
        .copy_from(&random_rotation(n2, rng));
    r
}

/// Largest `‖I(y)‖` below which a family counts as Riemannian.
pub const RIEMANNIAN_TOL: f64 = 1e-9;

/// Whether the mean torsion vanishes at `samples` seeded interior
/// directions.
pub fn is_riemannian(
    family: &GeneratingFamily,
    datum: &DatumDecomposition,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    use rand::SeedableRng;
    if family.is_linear_kind() {
        return Ok(true);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let y = random_interior_direction(datum, &mut rng, 0.1);
        let t = cartan_tensor(family, datum, &y)?;
        let i = t.mean_torsion.expect("interior direction");
        if i.norm() >= RIEMANNIAN_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}
