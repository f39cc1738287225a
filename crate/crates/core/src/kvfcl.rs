//! Sampling tests for Killing vector fields of constant length.
//!
//! A pair `(X, X′) ∈ 𝔤 ⊕ 𝔤′`, with `𝔤′` a subalgebra acting isometrically
//! by right translations, has constant length iff
//! `F(Ad(g)X − Ad(g′)X′)` does not depend on `g ∈ G`, `g′ ∈ G′`.
//! Constancy is probed on seeded exp-words; a large spread refutes it,
//! a tiny one accepts it at sampling resolution.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::homogeneous::HomogeneousDatum;
use crate::lie::random_adjoint;
use crate::norm::eval_norm;

/// Spread below which a candidate is accepted.
pub const ACCEPT_SPREAD: f64 = 1e-8;
/// Spread above which a candidate is rejected.
pub const REJECT_SPREAD: f64 = 1e-3;
/// Exp-word length for sampling `g` and `g′`.
pub const WORD_LENGTH: usize = 3;
/// Residual tolerance for membership and commutation tests.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
pub const CENTER_TOL: f64 = 1e-10;

/// Candidate field with `X`, `X′` and the basis of `𝔤′`, all as algebra
/// vectors.
#[derive(Debug, Clone)]
pub struct KillingCandidate {
    pub x: DVector<f64>,
    pub x_prime: DVector<f64>,
    pub g_prime: Vec<DVector<f64>>,
}

impl KillingCandidate {
    /// Checks `X′ ∈ span(𝔤′)` and that `ad(𝔤′)` preserves `V₁`, `V₂` and
    /// the α-form.
    pub fn new(
        datum: &HomogeneousDatum,
        x: DVector<f64>,
        x_prime: DVector<f64>,
        g_prime: Vec<DVector<f64>>,
    ) -> Result<Self> {
        let d = datum.dim();
        for v in std::iter::once(&x).chain([&x_prime]).chain(&g_prime) {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: v.len(),
                });
            }
        }
        if x.iter().chain(x_prime.iter()).all(|v| *v == 0.0) {
            return Err(Error::ZeroVector);
        }
        validate_isometric(datum, &g_prime)?;
        let residual = membership_residual(&g_prime, &x_prime);
        if residual > MEMBERSHIP_TOL * (1.0 + x_prime.amax()) {
            return Err(Error::Subalgebra(format!(
                "X' is not in the declared subalgebra (residual {residual:e})"
            )));
        }
        Ok(Self {
            x,
            x_prime,
            g_prime,
        })
    }

    /// Candidate given in frame coordinates of `datum`.
    pub fn from_frame(
        datum: &HomogeneousDatum,
        x: &DVector<f64>,
        x_prime: &DVector<f64>,
        g_prime: Vec<DVector<f64>>,
    ) -> Result<Self> {
        for v in [x, x_prime] {
            if v.len() != datum.dim() {
                return Err(Error::DimensionMismatch {
                    expected: datum.dim(),
                    got: v.len(),
                });
            }
        }
        Self::new(
            datum,
            datum.to_algebra(x),
            datum.to_algebra(x_prime),
            g_prime,
        )
    }
}

fn membership_residual(basis: &[DVector<f64>], v: &DVector<f64>) -> f64 {
    if basis.is_empty() {
        return v.amax();
    }
    let m = DMatrix::from_columns(basis);
    let svd = m.clone().svd(true, true);
    match svd.solve(v, 1e-14) {
        Ok(c) => (m * c - v).amax(),
        Err(_) => f64::INFINITY,
    }
}

/// `ad(b)` preserves `V₁`, `V₂` and is α-skew for every basis vector `b`.
pub fn validate_isometric(datum: &HomogeneousDatum, g_prime: &[DVector<f64>]) -> Result<()> {
    let n1 = datum.decomposition.n1;
    let n = datum.dim();
    for (k, b) in g_prime.iter().enumerate() {
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        // ad(b) in the α-orthonormal frame
        let m = &datum.frame_inv * datum.algebra.ad(b) * &datum.frame;
        let scale = 1.0 + m.amax();
        let mixing = m
            .view((0, n1), (n1, n - n1))
            .amax()
            .max(m.view((n1, 0), (n - n1, n1)).amax());
        if mixing > 1e-10 * scale {
            return Err(Error::Subalgebra(format!(
                "ad of generator {k} mixes V1 and V2 (residual {mixing:e})"
            )));
        }
        let skew = (&m + m.transpose()).amax();
        if skew > 1e-10 * scale {
            return Err(Error::Subalgebra(format!(
                "ad of generator {k} is not skew for the datum form (residual {skew:e})"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationReport {
    pub samples: usize,
    pub seed: u64,
    pub min: f64,
    pub max: f64,
    /// `(max − min)/min`, infinite when `min = 0`.
    pub spread: f64,
    pub verdict: Verdict,
}

fn verdict(spread: f64) -> Verdict {
    if spread < ACCEPT_SPREAD {
        Verdict::Accepted
    } else if spread > REJECT_SPREAD {
        Verdict::Rejected
    } else {
        Verdict::Inconclusive
    }
}

/// `F(Ad(g)X − Ad(g′)X′)` over `samples` seeded pairs `(g, g′)`. Sample `i`
/// draws from its own RNG stream.
pub fn length_deviation(
    datum: &HomogeneousDatum,
    cand: &KillingCandidate,
    samples: usize,
    seed: u64,
) -> Result<DeviationReport> {
    if samples == 0 {
        return Err(Error::OutOfRange("at least one sample is required".into()));
    }
    let alg = &datum.algebra;
    let gens: Vec<DVector<f64>> = (0..alg.dim()).map(|i| alg.unit(i)).collect();
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let g = random_adjoint(alg, &gens, WORD_LENGTH, &mut rng);
            let gp = random_adjoint(alg, &cand.g_prime, WORD_LENGTH, &mut rng);
            let w = g * &cand.x - gp * &cand.x_prime;
            let y = datum.to_frame(&w);
            if y.iter().all(|v| *v == 0.0) {
                return Ok(0.0);
            }
            eval_norm(&datum.family, &datum.decomposition, &y)
        })
        .collect::<Result<_>>()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(0.0, f64::max);
    let spread = if min > 0.0 {
        (max - min) / min
    } else {
        f64::INFINITY
    };
    Ok(DeviationReport {
        samples,
        seed,
        min,
        max,
        spread,
        verdict: verdict(spread),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateClass {
    /// `X ≠ 0` and `X′` central in `𝔤′`.
    Class1,
    /// `X = 0`.
    Class2,
    Rejected,
    /// Accepted with `X ≠ 0` and `X′` not central: contradicts the
    /// dichotomy, so it signals a bug or a tolerance failure.
    Inconsistent,
    Inconclusive,
}

/// Whether `X′` commutes with every basis vector of `𝔤′`.
pub fn is_central(
    datum: &HomogeneousDatum,
    x_prime: &DVector<f64>,
    g_prime: &[DVector<f64>],
) -> bool {
    g_prime.iter().all(|b| {
        datum.algebra.bracket(x_prime, b).amax() <= CENTER_TOL * (1.0 + x_prime.amax() * b.amax())
    })
}

pub fn classify_candidate(
    datum: &HomogeneousDatum,
    cand: &KillingCandidate,
    report: &DeviationReport,
) -> CandidateClass {
    match report.verdict {
        Verdict::Rejected => CandidateClass::Rejected,
        Verdict::Inconclusive => CandidateClass::Inconclusive,
        Verdict::Accepted => {
            if cand.x.amax() <= MEMBERSHIP_TOL {
                CandidateClass::Class2
            } else if is_central(datum, &cand.x_prime, &cand.g_prime) {
                CandidateClass::Class1
            } else {
                CandidateClass::Inconsistent
            }
        }
    }
}
