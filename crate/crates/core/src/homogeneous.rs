//! S-curvature of left-invariant (α₁,α₂)-metrics on compact Lie groups.
//!
//! A [`HomogeneousDatum`] fixes `𝔤 = V₁ ⊕ V₂` with inner products on each
//! factor and a normalized generating family. Vectors are handled in an
//! α-orthonormal frame adapted to the splitting, so the norm-level code in
//! [`crate::norm`] applies unchanged.
//!
//! With `a = α₁(y)`, `a′ = α₂(y)` and `D = L₁L₂ − 2LL₁₂` at `(a², a′²)`,
//! `g⁻¹I` equals `Φ(y)·y′` modulo `y`, where
//!
//! ```text
//! Φ(y) = I₁·L / (a·a′²·D)
//! I₁   = (−LL₁₂ − 2a²LL₁₁₂)/(a·D) + (n₁−1)·aL₁₁/L₁ + (n₂−1)·aL₁₂/L₂
//! ```
//!
//! and `S(y) = Φ(y)·(L₁c + L₂d)` with `c = ⟨[y″,y′]_𝔪, y′⟩₁`,
//! `d = ⟨[y″,y′]_𝔪, y″⟩₂`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::GeneratingFamily;
use crate::lie::{subspace_tools, CompactLieAlgebra};
use crate::norm::{
    fundamental_tensor, mean_torsion_fd, normalize_datum, random_interior_direction,
    relative_deviation, DatumDecomposition, BOUNDARY_EPS, DEVIATION_FLOOR,
};

/// `𝔤 = V₁ ⊕ V₂` with positive-definite forms on each factor, given as Gram
/// matrices in the listed bases.
#[derive(Debug, Clone)]
pub struct SubspaceDatum {
    pub v1: Vec<DVector<f64>>,
    pub v2: Vec<DVector<f64>>,
    pub form1: DMatrix<f64>,
    pub form2: DMatrix<f64>,
}

fn check_form(m: &DMatrix<f64>, k: usize) -> Result<()> {
    if m.nrows() != k || m.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: m.nrows(),
        });
    }
    if (m - m.transpose()).amax() > 1e-12 * (1.0 + m.amax()) || m.clone().cholesky().is_none() {
        return Err(Error::Subalgebra(
            "form is not symmetric positive definite".into(),
        ));
    }
    Ok(())
}

impl SubspaceDatum {
    pub fn new(
        algebra: &CompactLieAlgebra,
        v1: Vec<DVector<f64>>,
        v2: Vec<DVector<f64>>,
        form1: DMatrix<f64>,
        form2: DMatrix<f64>,
    ) -> Result<Self> {
        let d = algebra.dim();
        if v1.len() + v2.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v1.len() + v2.len(),
            });
        }
        for v in v1.iter().chain(&v2) {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        check_form(&form1, v1.len())?;
        check_form(&form2, v2.len())?;
        let all: Vec<DVector<f64>> = v1.iter().chain(&v2).cloned().collect();
        let sv = DMatrix::from_columns(&all).singular_values();
        if sv.min() <= 1e-10 * sv.max() {
            return Err(Error::DependentBasis);
        }
        Ok(Self {
            v1,
            v2,
            form1,
            form2,
        })
    }

    /// `V₂ = span(v2)`, `V₁` its bi-orthogonal complement, both forms the
    /// restriction of the bi-invariant form.
    pub fn bi_invariant(algebra: &CompactLieAlgebra, v2: Vec<DVector<f64>>) -> Result<Self> {
        let info = subspace_tools(algebra, &v2, None)?;
        let gram = |vs: &[DVector<f64>]| {
            DMatrix::from_fn(vs.len(), vs.len(), |i, j| {
                vs[i].dot(&(algebra.bi_form() * &vs[j]))
            })
        };
        let (f1, f2) = (gram(&info.complement), gram(&v2));
        Self::new(algebra, info.complement, v2, f1, f2)
    }

    pub fn n1(&self) -> usize {
        self.v1.len()
    }

    pub fn n2(&self) -> usize {
        self.v2.len()
    }
}

#[derive(Debug, Clone)]
pub struct HomogeneousDatum {
    pub algebra: CompactLieAlgebra,
    pub split: SubspaceDatum,
    /// Normalized: `φ(0) = φ(1) = 1`.
    pub family: GeneratingFamily,
    pub decomposition: DatumDecomposition,
    /// Columns are the α-orthonormal frame, V₁ first.
    pub frame: DMatrix<f64>,
    pub frame_inv: DMatrix<f64>,
    /// Projection onto `𝔪` applied after brackets; `None` is the full
    /// bracket.
    pub projection: Option<DMatrix<f64>>,
    pub kind: String,
}

fn frame_block(basis: &[DVector<f64>], form: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = form.clone().cholesky().ok_or(Error::DependentBasis)?;
    let lt_inv = chol
        .l()
        .transpose()
        .try_inverse()
        .ok_or(Error::DependentBasis)?;
    Ok(DMatrix::from_columns(basis) * lt_inv)
}

impl HomogeneousDatum {
    /// Normalizes `family` and rescales the forms by `φ(0)²`, `φ(1)²` so
    /// that `F` is unchanged.
    pub fn new(
        algebra: CompactLieAlgebra,
        split: SubspaceDatum,
        family: &GeneratingFamily,
        projection: Option<DMatrix<f64>>,
        kind: impl Into<String>,
    ) -> Result<Self> {
        let dec = DatumDecomposition::new(split.n1(), split.n2())?;
        let (family, scaled) = normalize_datum(family, &dec)?;
        let [s0, s1] = scaled.alpha_scale;
        let split = SubspaceDatum {
            form1: &split.form1 * (s0 * s0),
            form2: &split.form2 * (s1 * s1),
            ..split
        };
        let e1 = frame_block(&split.v1, &split.form1)?;
        let e2 = frame_block(&split.v2, &split.form2)?;
        let d = algebra.dim();
        let mut frame = DMatrix::zeros(d, d);
        frame.view_mut((0, 0), (d, split.n1())).copy_from(&e1);
        frame
            .view_mut((0, split.n1()), (d, split.n2()))
            .copy_from(&e2);
        let frame_inv = frame.clone().try_inverse().ok_or(Error::DependentBasis)?;
        if let Some(p) = &projection {
            if p.nrows() != d || p.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.nrows(),
                });
            }
        }
        let decomposition = DatumDecomposition {
            normalized: true,
            ..dec
        };
        Ok(Self {
            algebra,
            split,
            family,
            decomposition,
            frame,
            frame_inv,
            projection,
            kind: kind.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn to_algebra(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.frame * y
    }

    pub fn to_frame(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.frame_inv * x
    }

    /// `[u, v]_𝔪` in frame coordinates.
    pub fn bracket(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let b = self
            .algebra
            .bracket(&self.to_algebra(u), &self.to_algebra(v));
        let b = match &self.projection {
            Some(p) => p * b,
            None => b,
        };
        self.to_frame(&b)
    }

    /// Frame-coordinate vectors `(y′, y″)` padded to full length.
    pub fn components(&self, y: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let n1 = self.decomposition.n1;
        let mut y1 = y.clone();
        let mut y2 = y.clone();
        y1.rows_mut(n1, y.len() - n1).fill(0.0);
        y2.rows_mut(0, n1).fill(0.0);
        (y1, y2)
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

    /// `(a, a′)` after rejecting boundary directions.
    fn interior_split(&self, y: &DVector<f64>) -> Result<(f64, f64)> {
        self.check(y)?;
        let (a, ap) = self.decomposition.split(y);
        let r = a.hypot(ap);
        if a <= BOUNDARY_EPS * r || ap <= BOUNDARY_EPS * r {
            return Err(Error::BoundaryDirection);
        }
        Ok((a, ap))
    }
}

/// `Φ` for a normalized family with `(n₁, n₂)` split, at `(a, a′)`.
fn phi_closed(family: &GeneratingFamily, n1: usize, n2: usize, a: f64, ap: f64) -> f64 {
    let d = family.l_derivs(a * a, ap * ap);
    let det = d.l1 * d.l2 - 2.0 * d.l * d.l12;
    let (k1, k2) = ((n1 - 1) as f64, (n2 - 1) as f64);
    let i1 = (-d.l * d.l12 - 2.0 * a * a * d.l * d.l112) / (a * det)
        + k1 * a * d.l11 / d.l1
        + k2 * a * d.l12 / d.l2;
    i1 * d.l / (a * ap * ap * det)
}

/// `Φ(y)`, homogeneous of degree −2.
pub fn phi_coefficient(datum: &HomogeneousDatum, y: &DVector<f64>) -> Result<f64> {
    let (a, ap) = datum.interior_split(y)?;
    let r = a.hypot(ap);
    let phi = phi_closed(
        &datum.family,
        datum.decomposition.n1,
        datum.decomposition.n2,
        a / r,
        ap / r,
    );
    if !phi.is_finite() {
        return Err(Error::InvalidFamily(format!(
            "Phi is not finite at a={a}, a'={ap}"
        )));
    }
    Ok(phi / (r * r))
}

/// `c = ⟨[y″,y′]_𝔪, y′⟩₁` and `d = ⟨[y″,y′]_𝔪, y″⟩₂`.
pub fn bracket_pairings(datum: &HomogeneousDatum, y: &DVector<f64>) -> (f64, f64) {
    let (y1, y2) = datum.components(y);
    let z = datum.bracket(&y2, &y1);
    (z.dot(&y1), z.dot(&y2))
}

pub fn s_curvature_closed(datum: &HomogeneousDatum, y: &DVector<f64>) -> Result<f64> {
    let phi = phi_coefficient(datum, y)?;
    let (a, ap) = datum.decomposition.split(y);
    let d = datum.family.l_derivs(a * a, ap * ap);
    let (c, dd) = bracket_pairings(datum, y);
    Ok(phi * (d.l1 * c + d.l2 * dd))
}

/// Default step for [`s_curvature_oracle`] relative to `α(y)`.
pub const ORACLE_STEP: f64 = 1e-5;

/// `⟨[y, g⁻¹∇ln√det g]_𝔪, y⟩_y` with the gradient by central differences.
pub fn s_curvature_oracle(datum: &HomogeneousDatum, y: &DVector<f64>, step: f64) -> Result<f64> {
    datum.interior_split(y)?;
    let dec = &datum.decomposition;
    let limit = dec.alpha(y) / 100.0;
    if !(step > 0.0 && step <= limit * (1.0 + 1e-12)) {
        return Err(Error::StepTooLarge { step, limit });
    }
    let t = fundamental_tensor(&datum.family, dec, y)?;
    let grad = mean_torsion_fd(&datum.family, dec, y, step)?;
    let v = &t.g_inv * grad;
    let w = datum.bracket(y, &v);
    Ok(w.dot(&(&t.g * y)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SCurvatureReport {
    pub y: Vec<f64>,
    pub a: f64,
    pub a_prime: f64,
    pub phi: Option<f64>,
    pub s_closed: Option<f64>,
    pub s_oracle: Option<f64>,
    pub relative_deviation: Option<f64>,
    pub boundary: bool,
}

/// Closed form and oracle at one direction; boundary directions are
/// flagged instead of failing.
pub fn s_curvature_report(
    datum: &HomogeneousDatum,
    y: &DVector<f64>,
    step: f64,
) -> Result<SCurvatureReport> {
    datum.check(y)?;
    let (a, ap) = datum.decomposition.split(y);
    let mut report = SCurvatureReport {
        y: y.iter().copied().collect(),
        a,
        a_prime: ap,
        phi: None,
        s_closed: None,
        s_oracle: None,
        relative_deviation: None,
        boundary: false,
    };
    match phi_coefficient(datum, y) {
        Err(Error::BoundaryDirection) => {
            report.boundary = true;
            return Ok(report);
        }
        Err(e) => return Err(e),
        Ok(phi) => report.phi = Some(phi),
    }
    let closed = s_curvature_closed(datum, y)?;
    let oracle = s_curvature_oracle(datum, y, step)?;
    report.s_closed = Some(closed);
    report.s_oracle = Some(oracle);
    report.relative_deviation = Some(relative_deviation(&[closed], &[oracle], DEVIATION_FLOOR));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub samples: usize,
    pub seed: u64,
    pub max_abs_s_closed: f64,
    pub max_abs_s_oracle: f64,
    pub max_rel_deviation: f64,
}

/// Closed form against oracle over seeded unit directions with
/// `min(a, a′) ≥ 0.1`. Each sample has its own RNG stream, so the result
/// does not depend on thread scheduling.
pub fn s_curvature_sweep(
    datum: &HomogeneousDatum,
    samples: usize,
    seed: u64,
) -> Result<SweepSummary> {
    let rows: Vec<(f64, f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let y = random_interior_direction(&datum.decomposition, &mut rng, 0.1);
            let c = s_curvature_closed(datum, &y)?;
            let o = s_curvature_oracle(datum, &y, ORACLE_STEP)?;
            Ok((
                c.abs(),
                o.abs(),
                relative_deviation(&[c], &[o], DEVIATION_FLOOR),
            ))
        })
        .collect::<Result<_>>()?;
    let max = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(SweepSummary {
        samples,
        seed,
        max_abs_s_closed: max(|r| r.0),
        max_abs_s_oracle: max(|r| r.1),
        max_rel_deviation: max(|r| r.2),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitPoint {
    pub eps: f64,
    pub s_closed: f64,
}

/// `S` along `y(ε) = (1−ε)·ŷ + ε·t̂` approaching a boundary direction `ŷ`
/// from the side of `t̂`.
pub fn s_curvature_limit(
    datum: &HomogeneousDatum,
    boundary: &DVector<f64>,
    transverse: &DVector<f64>,
    eps: &[f64],
) -> Result<Vec<LimitPoint>> {
    datum.check(boundary)?;
    datum.check(transverse)?;
    let dec = &datum.decomposition;
    let yb = boundary / dec.alpha(boundary);
    let tt = transverse / dec.alpha(transverse);
    eps.iter()
        .map(|&e| {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::OutOfRange(format!(
                    "limit parameter {e} not in (0, 1)"
                )));
            }
            let y = &yb * (1.0 - e) + &tt * e;
            Ok(LimitPoint {
                eps: e,
                s_closed: s_curvature_closed(datum, &y)?,
            })
        })
        .collect()
}

/// Which bracket pairing a witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// `⟨[y″,y′], y′⟩₁`
    C,
    /// `⟨[y″,y′], y″⟩₂`
    D,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// V₁ part in frame coordinates.
    pub y1: Vec<f64>,
    /// V₂ part in frame coordinates.
    pub y2: Vec<f64>,
    pub pairing: Pairing,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// Tolerance for the polarized pairings, relative to the largest bracket
/// pairing between frame vectors.
pub const CRITERION_TOL: f64 = 1e-10;

/// Whether `⟨[y′,y″]_𝔪, y′⟩₁ = ⟨[y′,y″]_𝔪, y″⟩₂ = 0` for all `y′ ∈ V₁`,
/// `y″ ∈ V₂`, checked on polarized frame pairs. Diagonal pairs are scanned
/// before mixed ones, so a mixed witness isolates the cross term.
pub fn vanishing_criterion(datum: &HomogeneousDatum) -> Criterion {
    let (n1, n) = (datum.decomposition.n1, datum.dim());
    let e = |i: usize| {
        let mut v = DVector::zeros(n);
        v[i] = 1.0;
        v
    };
    // brackets[i][a] = [f_a, e_i] in frame coordinates
    let brackets: Vec<Vec<DVector<f64>>> = (0..n1)
        .map(|i| (n1..n).map(|a| datum.bracket(&e(a), &e(i))).collect())
        .collect();
    let scale = brackets
        .iter()
        .flatten()
        .map(|b| b.amax())
        .fold(0.0, f64::max);
    let tol = CRITERION_TOL * scale.max(1.0);

    let c = |i: usize, j: usize, a: usize| brackets[i][a - n1][j] + brackets[j][a - n1][i];
    let d = |i: usize, a: usize, b: usize| brackets[i][a - n1][b] + brackets[i][b - n1][a];
    let witness = |y1: Vec<usize>, y2: Vec<usize>, pairing, value| {
        let pad = |idx: &[usize], off: usize, len: usize| {
            let mut v = vec![0.0; len];
            for &k in idx {
                v[k - off] = 1.0;
            }
            v
        };
        Criterion {
            holds: false,
            witness: Some(Witness {
                y1: pad(&y1, 0, n1),
                y2: pad(&y2, n1, n - n1),
                pairing,
                value,
            }),
        }
    };

    for diagonal in [true, false] {
        for a in n1..n {
            for i in 0..n1 {
                let js = if diagonal { i..i + 1 } else { i + 1..n1 };
                for j in js {
                    let v = c(i, j, a);
                    if v.abs() > tol {
                        let y1 = if diagonal { vec![i] } else { vec![i, j] };
                        let val = if diagonal { v / 2.0 } else { v };
                        return witness(y1, vec![a], Pairing::C, val);
                    }
                }
            }
        }
        for i in 0..n1 {
            for a in n1..n {
                let bs = if diagonal { a..a + 1 } else { a + 1..n };
                for b in bs {
                    let v = d(i, a, b);
                    if v.abs() > tol {
                        let y2 = if diagonal { vec![a] } else { vec![a, b] };
                        let val = if diagonal { v / 2.0 } else { v };
                        return witness(vec![i], y2, Pairing::D, val);
                    }
                }
            }
        }
    }
    Criterion {
        holds: true,
        witness: None,
    }
}

/// `V₂` the Cartan subalgebra, `V₁` the sum of real root spaces with
/// `⟨·,·⟩₁ = c_λ·⟨·,·⟩_bi` on `𝔤_λ` (one scalar per root space, in the
/// order of [`CompactLieAlgebra::real_root_spaces`]).
pub fn build_cartan_datum(
    algebra: &CompactLieAlgebra,
    family: &GeneratingFamily,
    scalars: &[f64],
) -> Result<HomogeneousDatum> {
    if algebra.rank() < 2 {
        return Err(Error::InvalidRank {
            kind: algebra.spec(),
            rank: algebra.rank(),
        });
    }
    let spaces = algebra.real_root_spaces()?;
    let scalars = expand_scalars(scalars, spaces.len())?;
    let mut v1 = Vec::new();
    let mut diag1 = Vec::new();
    for (s, c) in spaces.iter().zip(&scalars) {
        v1.extend(s.basis.iter().cloned());
        diag1.extend([*c, *c]);
    }
    let v2 = algebra.cartan_basis();
    let form2 = gram(algebra, &v2);
    let form1 = gram(algebra, &v1).component_mul(&scale_matrix(&diag1));
    let split = SubspaceDatum::new(algebra, v1, v2, form1, form2)?;
    HomogeneousDatum::new(algebra.clone(), split, family, None, "cartan")
}

/// `V₂ = 𝔤_{λ₀}` (the real root space at `root_index`), `V₁` the Cartan
/// subalgebra with form `cartan_scale·⟨·,·⟩_bi` plus the remaining root
/// spaces with their scalars.
pub fn build_root_space_datum(
    algebra: &CompactLieAlgebra,
    family: &GeneratingFamily,
    root_index: usize,
    cartan_scale: f64,
    others: &[f64],
) -> Result<HomogeneousDatum> {
    let spaces = algebra.real_root_spaces()?;
    if root_index >= spaces.len() {
        return Err(Error::OutOfRange(format!(
            "root space {root_index} of {}",
            spaces.len()
        )));
    }
    if !(cartan_scale > 0.0 && cartan_scale.is_finite()) {
        return Err(Error::OutOfRange(format!("Cartan scale {cartan_scale}")));
    }
    let others = expand_scalars(others, spaces.len() - 1)?;
    let mut v1 = algebra.cartan_basis();
    let mut diag1 = vec![cartan_scale; v1.len()];
    let mut rest = others.iter();
    for (k, s) in spaces.iter().enumerate() {
        if k == root_index {
            continue;
        }
        let c = *rest.next().expect("one scalar per remaining root space");
        v1.extend(s.basis.iter().cloned());
        diag1.extend([c, c]);
    }
    let v2 = spaces[root_index].basis.to_vec();
    let form2 = gram(algebra, &v2);
    let form1 = gram(algebra, &v1).component_mul(&scale_matrix(&diag1));
    let split = SubspaceDatum::new(algebra, v1, v2, form1, form2)?;
    HomogeneousDatum::new(algebra.clone(), split, family, None, "root-space")
}

/// The su(n) root-space datum that violates the criterion: `V₂ = 𝔤_{λ₀}`
/// for the first real root space, Cartan block doubled, and the second
/// remaining root space doubled as well.
///
/// Doubling only the Cartan block is not enough. With all other root
/// spaces at the bi-invariant scale, both pairings still vanish.
pub fn build_perturbed_datum(
    algebra: &CompactLieAlgebra,
    family: &GeneratingFamily,
) -> Result<HomogeneousDatum> {
    let k = algebra.real_root_spaces()?.len();
    if k < 3 {
        return Err(Error::InvalidRank {
            kind: algebra.spec(),
            rank: algebra.rank(),
        });
    }
    let mut others = vec![1.0; k - 1];
    others[1] = 2.0;
    let mut d = build_root_space_datum(algebra, family, 0, 2.0, &others)?;
    d.kind = "perturbed".into();
    Ok(d)
}

fn expand_scalars(s: &[f64], k: usize) -> Result<Vec<f64>> {
    let out = match s.len() {
        0 => vec![1.0; k],
        1 => vec![s[0]; k],
        n if n == k => s.to_vec(),
        n => {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: n,
            })
        }
    };
    if let Some(bad) = out.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
        return Err(Error::OutOfRange(format!("root-space scalar {bad}")));
    }
    Ok(out)
}

fn gram(algebra: &CompactLieAlgebra, v: &[DVector<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(v.len(), v.len(), |i, j| {
        v[i].dot(&(algebra.bi_form() * &v[j]))
    })
}

/// `M_ij = √(dᵢdⱼ)`: scales a Gram matrix block-wise.
fn scale_matrix(d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(d.len(), d.len(), |i, j| (d[i] * d[j]).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn su3() -> CompactLieAlgebra {
        CompactLieAlgebra::su(3).unwrap()
    }

    fn fam(s: &str) -> GeneratingFamily {
        GeneratingFamily::parse(s).unwrap()
    }

    fn unit_mixed(d: &HomogeneousDatum) -> DVector<f64> {
        let n = d.dim();
        let n1 = d.decomposition.n1;
        let mut y = DVector::zeros(n);
        y[0] = 1.0 / 2f64.sqrt();
        y[n1] = 1.0 / 2f64.sqrt();
        y
    }

    #[test]
    fn cartan_datum_shape() {
        let d = build_cartan_datum(&su3(), &fam("mroot:2"), &[]).unwrap();
        assert_eq!((d.decomposition.n1, d.decomposition.n2), (6, 2));
        assert!(d.family.is_normalized(1e-12));
        // mroot:2 has L(1,0) = L(0,1) = 2, so α = 2·bi and the frame is
        // bi-orthogonal with squared length 1/2.
        let e = &d.frame;
        assert!((e.transpose() * e - DMatrix::<f64>::identity(8, 8) * 0.5).amax() < 1e-12);
        assert!(
            build_cartan_datum(&CompactLieAlgebra::su(2).unwrap(), &fam("mroot:2"), &[]).is_err()
        );
        assert!(build_cartan_datum(&su3(), &fam("mroot:2"), &[1.0, 2.0]).is_err());
        assert!(build_cartan_datum(&su3(), &fam("mroot:2"), &[-1.0]).is_err());
    }

    #[test]
    fn normalization_preserves_norm() {
        let g = su3();
        let raw = fam("mroot:3");
        let scalars = [0.7, 1.3, 1.9];
        let d = build_cartan_datum(&g, &raw, &scalars).unwrap();
        let spaces = g.real_root_spaces().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
            let a1: f64 = spaces
                .iter()
                .zip(scalars)
                .map(|(s, c)| c * (s.basis[0].dot(&x).powi(2) + s.basis[1].dot(&x).powi(2)))
                .sum();
            let a2: f64 = g.cartan_basis().iter().map(|h| h.dot(&x).powi(2)).sum();
            let expected = raw.l(a1, a2).sqrt();
            let f = crate::norm::eval_norm(&d.family, &d.decomposition, &d.to_frame(&x)).unwrap();
            assert!((f - expected).abs() < 1e-12 * expected, "{f} vs {expected}");
        }
    }

    #[test]
    fn phi_vanishes_for_linear_families() {
        let d = build_cartan_datum(&su3(), &fam("riemannian:1,2"), &[0.5, 1.0, 2.0]).unwrap();
        let y = unit_mixed(&d);
        assert_eq!(phi_coefficient(&d, &y).unwrap(), 0.0);
        assert_eq!(s_curvature_closed(&d, &y).unwrap(), 0.0);
        assert!(s_curvature_oracle(&d, &y, 1e-5).unwrap().abs() < 1e-8);
    }

    #[test]
    fn boundary_and_step_errors() {
        let d = build_cartan_datum(&su3(), &fam("mroot:2"), &[]).unwrap();
        let mut y = DVector::zeros(8);
        y[0] = 1.0;
        assert_eq!(phi_coefficient(&d, &y), Err(Error::BoundaryDirection));
        assert_eq!(
            s_curvature_oracle(&d, &y, 1e-5),
            Err(Error::BoundaryDirection)
        );
        assert!(s_curvature_report(&d, &y, 1e-5).unwrap().boundary);
        let y = unit_mixed(&d);
        assert!(matches!(
            s_curvature_oracle(&d, &y, 0.1),
            Err(Error::StepTooLarge { .. })
        ));
    }

    #[test]
    fn phi_homogeneity() {
        let d = build_perturbed_datum(&su3(), &fam("mroot:2")).unwrap();
        let y = unit_mixed(&d);
        let p1 = phi_coefficient(&d, &y).unwrap();
        let p2 = phi_coefficient(&d, &(&y * 2.0)).unwrap();
        assert!((p2 - p1 / 4.0).abs() < 1e-9 * p1.abs().max(1.0));
        assert!(p1 != 0.0);
    }

    #[test]
    fn cartan_criterion_and_vanishing() {
        let g = su3();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..3 {
            let scalars: Vec<f64> = (0..3).map(|_| rng.random_range(0.5..2.0)).collect();
            let d = build_cartan_datum(&g, &fam("mroot:2"), &scalars).unwrap();
            assert!(vanishing_criterion(&d).holds);
            let s = s_curvature_sweep(&d, 20, 1).unwrap();
            assert!(s.max_abs_s_closed < 1e-9, "{s:?}");
            assert!(s.max_abs_s_oracle < 1e-8, "{s:?}");
        }
    }

    #[test]
    fn perturbed_datum_fails_with_witness() {
        let d = build_perturbed_datum(&su3(), &fam("mroot:2")).unwrap();
        let c = vanishing_criterion(&d);
        assert!(!c.holds);
        let w = c.witness.unwrap();
        // the witness pair has a nonzero pairing
        let mut y = DVector::zeros(8);
        y.rows_mut(0, 6).copy_from_slice(&w.y1);
        y.rows_mut(6, 2).copy_from_slice(&w.y2);
        let (cc, dd) = bracket_pairings(&d, &y);
        let v = match w.pairing {
            Pairing::C => cc,
            Pairing::D => dd,
        };
        assert!(v.abs() > 1e-6);
        let s = s_curvature_sweep(&d, 50, 2).unwrap();
        assert!(s.max_abs_s_closed > 1e-3, "{s:?}");
        assert!(s.max_rel_deviation < 1e-5, "{s:?}");
    }

    #[test]
    fn doubled_cartan_alone_keeps_the_criterion() {
        let d = build_root_space_datum(&su3(), &fam("mroot:2"), 0, 2.0, &[]).unwrap();
        assert!(vanishing_criterion(&d).holds);
    }

    #[test]
    fn zero_bracket_holds() {
        let g = su3();
        let mut d = build_perturbed_datum(&g, &fam("mroot:2")).unwrap();
        d.projection = Some(DMatrix::zeros(8, 8));
        assert!(vanishing_criterion(&d).holds);
        assert_eq!(s_curvature_closed(&d, &unit_mixed(&d)).unwrap(), 0.0);
    }

    #[test]
    fn root_space_datum_needs_room_in_v1() {
        let g = CompactLieAlgebra::su(2).unwrap();
        let d = build_root_space_datum(&g, &fam("mroot:2"), 0, 1.0, &[]);
        assert!(matches!(d, Err(Error::InvalidSplit { .. })));
    }

    #[test]
    fn limit_mode_tracks_the_closed_form() {
        let d = build_perturbed_datum(&su3(), &fam("mroot:2")).unwrap();
        let mut yb = DVector::zeros(8);
        yb[0] = 1.0;
        yb[3] = 0.5;
        let mut t = DVector::zeros(8);
        t[6] = 1.0;
        t[7] = -0.3;
        let pts = s_curvature_limit(&d, &yb, &t, &[0.1, 0.01, 0.001]).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| p.s_closed.is_finite()));
        assert!(s_curvature_limit(&d, &yb, &t, &[0.0]).is_err());
    }
}
