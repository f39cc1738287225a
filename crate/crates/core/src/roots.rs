//! Root systems of the simple types with exact coordinates, and scans for
//! the minimum number of roots orthogonal to neither of two vectors.
//!
//! Coordinates live in Q(√2, √3): `E₆` uses `±√3/2`, `E₇` uses `±√2/2`
//! and `±√2`, and `G₂` is realized in the plane with short roots of length
//! one. `Aₙ` sits in the trace-zero hyperplane of `R^{n+1}`.
//!
//! Scans work in coordinates with respect to the simple roots. Every
//! pairing `2⟨β, αᵢ⟩` is an integer, so deciding `⟨β, U⟩ = 0` for
//! `U = Σ uᵢαᵢ` with integral `u` is integer arithmetic.

use std::collections::{HashMap, HashSet};
use std::fmt;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{dot, Quad};
use crate::lie::CompactLieAlgebra;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RootType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl RootType {
    fn letter(self) -> char {
        match self {
            RootType::A => 'A',
            RootType::B => 'B',
            RootType::C => 'C',
            RootType::D => 'D',
            RootType::E => 'E',
            RootType::F => 'F',
            RootType::G => 'G',
        }
    }
}

/// Exact vector in the ambient space.
pub type ExactVector = Vec<Quad>;

#[derive(Debug, Clone)]
pub struct RootSystem {
    kind: RootType,
    rank: usize,
    ambient: usize,
    roots: Vec<ExactVector>,
    /// Indices of the simple roots.
    simple: Vec<usize>,
    /// Indices of the positive roots.
    positive: Vec<usize>,
    /// `pairing[β][i] = 2⟨β, αᵢ⟩`.
    pairing: Vec<Vec<i64>>,
}

fn q(n: i64) -> Quad {
    Quad::from_int(n)
}

fn half() -> Quad {
    Quad::from_ratio(1, 2)
}

fn unit(dim: usize, i: usize, c: Quad) -> ExactVector {
    let mut v = vec![Quad::zero(); dim];
    v[i] = c;
    v
}

/// `±eᵢ ± eⱼ` for `i < j < n`, padded to `dim` coordinates.
fn d_roots(n: usize, dim: usize) -> Vec<ExactVector> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut v = vec![Quad::zero(); dim];
                v[i] = q(si);
                v[j] = q(sj);
                out.push(v);
            }
        }
    }
    out
}

/// All sign vectors of length `n`, as ±1.
fn signs(n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0..1u32 << n).map(move |mask| {
        (0..n)
            .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
            .collect()
    })
}

fn enumerate_roots(kind: RootType, rank: usize) -> Vec<ExactVector> {
    match kind {
        RootType::A => {
            let n = rank + 1;
            let mut out = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let mut v = vec![Quad::zero(); n];
                        v[i] = q(1);
                        v[j] = q(-1);
                        out.push(v);
                    }
                }
            }
            out
        }
        RootType::B | RootType::C => {
            let mut out = d_roots(rank, rank);
            let c = if kind == RootType::B { 1 } else { 2 };
            for i in 0..rank {
                out.push(unit(rank, i, q(c)));
                out.push(unit(rank, i, q(-c)));
            }
            out
        }
        RootType::D => d_roots(rank, rank),
        RootType::G => {
            let r3_2 = Quad::sqrt3_times(BigRational::new(BigInt::from(1), BigInt::from(2)));
            let r3 = Quad::sqrt3_times(BigRational::one());
            let three_2 = Quad::from_ratio(3, 2);
            let base = vec![
                vec![q(1), Quad::zero()],
                vec![half(), r3_2.clone()],
                vec![-half(), r3_2.clone()],
                vec![Quad::zero(), r3],
                vec![three_2.clone(), r3_2.clone()],
                vec![three_2, -r3_2],
            ];
            let mut out = Vec::new();
            for v in base {
                out.push(v.iter().map(|x| -x).collect());
                out.push(v);
            }
            out
        }
        RootType::F => {
            let mut out = d_roots(4, 4);
            for i in 0..4 {
                out.push(unit(4, i, q(1)));
                out.push(unit(4, i, q(-1)));
            }
            for s in signs(4) {
                out.push(s.iter().map(|&x| Quad::from_ratio(x, 2)).collect());
            }
            out
        }
        RootType::E => match rank {
            6 => {
                let mut out = d_roots(5, 6);
                let r3_2 = BigRational::new(BigInt::from(1), BigInt::from(2));
                for s in signs(6) {
                    let plus = s.iter().filter(|&&x| x > 0).count();
                    if plus % 2 == 1 {
                        let mut v: ExactVector =
                            s[..5].iter().map(|&x| Quad::from_ratio(x, 2)).collect();
                        v.push(Quad::sqrt3_times(
                            r3_2.clone() * BigRational::from_integer(s[5].into()),
                        ));
                        out.push(v);
                    }
                }
                out
            }
            7 => {
                let mut out = d_roots(6, 7);
                let r2_2 = BigRational::new(BigInt::from(1), BigInt::from(2));
                for s in signs(7) {
                    let plus = s[..6].iter().filter(|&&x| x > 0).count();
                    if plus % 2 == 0 {
                        let mut v: ExactVector =
                            s[..6].iter().map(|&x| Quad::from_ratio(x, 2)).collect();
                        v.push(Quad::sqrt2_times(
                            r2_2.clone() * BigRational::from_integer(s[6].into()),
                        ));
                        out.push(v);
                    }
                }
                for sgn in [1, -1] {
                    out.push(unit(
                        7,
                        6,
                        Quad::sqrt2_times(BigRational::from_integer(sgn.into())),
                    ));
                }
                out
            }
            _ => {
                let mut out = d_roots(8, 8);
                for s in signs(8) {
                    let minus = s.iter().filter(|&&x| x < 0).count();
                    if minus % 2 == 0 {
                        out.push(s.iter().map(|&x| Quad::from_ratio(x, 2)).collect());
                    }
                }
                out
            }
        },
    }
}

fn expected_count(kind: RootType, rank: usize) -> usize {
    match kind {
        RootType::A => rank * (rank + 1),
        RootType::B | RootType::C => 2 * rank * rank,
        RootType::D => 2 * rank * (rank - 1),
        RootType::G => 12,
        RootType::F => 48,
        RootType::E => [72, 126, 240][rank - 6],
    }
}

fn rational_to_i64(x: &BigRational) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

impl RootSystem {
    pub fn new(kind: RootType, rank: usize) -> Result<Self> {
        let ok = match kind {
            RootType::A => (1..=16).contains(&rank),
            RootType::B => (2..=16).contains(&rank),
            RootType::C => (3..=16).contains(&rank),
            RootType::D => (4..=16).contains(&rank),
            RootType::E => (6..=8).contains(&rank),
            RootType::F => rank == 4,
            RootType::G => rank == 2,
        };
        if !ok {
            return Err(Error::InvalidRank {
                kind: kind.letter().to_string(),
                rank,
            });
        }
        let roots = enumerate_roots(kind, rank);
        debug_assert_eq!(roots.len(), expected_count(kind, rank));
        let ambient = roots[0].len();

        // Superincreasing weights make ⟨w, β⟩ nonzero for every root.
        let w: Vec<f64> = (0..ambient)
            .map(|i| 3f64.powi((ambient - 1 - i) as i32))
            .collect();
        let height =
            |v: &ExactVector| -> f64 { v.iter().zip(&w).map(|(x, w)| x.to_f64() * w).sum() };
        let positive: Vec<usize> = (0..roots.len())
            .filter(|&i| height(&roots[i]) > 0.0)
            .collect();
        let pos_set: HashSet<&ExactVector> = positive.iter().map(|&i| &roots[i]).collect();
        let mut decomposable: HashSet<ExactVector> = HashSet::new();
        for (a, &i) in positive.iter().enumerate() {
            for &j in &positive[a + 1..] {
                let s: ExactVector = roots[i].iter().zip(&roots[j]).map(|(x, y)| x + y).collect();
                if pos_set.contains(&s) {
                    decomposable.insert(s);
                }
            }
        }
        let mut simple: Vec<usize> = positive
            .iter()
            .copied()
            .filter(|&i| !decomposable.contains(&roots[i]))
            .collect();
        simple.sort_by(|&a, &b| height(&roots[b]).total_cmp(&height(&roots[a])));
        assert_eq!(simple.len(), rank, "simple roots of {:?}{}", kind, rank);

        let two = q(2);
        let pairing = roots
            .iter()
            .map(|b| {
                simple
                    .iter()
                    .map(|&s| {
                        let p = &two * &dot(b, &roots[s]);
                        p.as_rational()
                            .and_then(rational_to_i64)
                            .expect("2<beta, alpha_i> is an integer")
                    })
                    .collect()
            })
            .collect();

        Ok(Self {
            kind,
            rank,
            ambient,
            roots,
            simple,
            positive,
            pairing,
        })
    }

    /// Parse `A3`, `B2`, `E8`, `F4`, `G2`, …
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        let bad = || Error::RootTypeSpec(spec.to_string());
        let mut chars = s.chars();
        let kind = match chars.next().ok_or_else(bad)?.to_ascii_uppercase() {
            'A' => RootType::A,
            'B' => RootType::B,
            'C' => RootType::C,
            'D' => RootType::D,
            'E' => RootType::E,
            'F' => RootType::F,
            'G' => RootType::G,
            _ => return Err(bad()),
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 3 {
            return Err(bad());
        }
        let rank: usize = digits.parse().map_err(|_| bad())?;
        Self::new(kind, rank)
    }

    pub fn kind(&self) -> RootType {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn roots(&self) -> &[ExactVector] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn simple_roots(&self) -> Vec<&ExactVector> {
        self.simple.iter().map(|&i| &self.roots[i]).collect()
    }

    pub fn positive_roots(&self) -> Vec<&ExactVector> {
        self.positive.iter().map(|&i| &self.roots[i]).collect()
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.kind.letter(), self.rank)
    }

    /// `Σ uᵢ αᵢ` in ambient coordinates.
    pub fn from_simple_coords(&self, u: &[i64]) -> ExactVector {
        let mut v = vec![Quad::zero(); self.ambient];
        for (&c, &s) in u.iter().zip(&self.simple) {
            if c == 0 {
                continue;
            }
            let c = q(c);
            for (x, r) in v.iter_mut().zip(&self.roots[s]) {
                *x += &(&c * r);
            }
        }
        v
    }

    /// The reflection `s_α(v) = v − 2⟨v,α⟩/⟨α,α⟩ α`.
    pub fn reflect(&self, alpha: &ExactVector, v: &ExactVector) -> ExactVector {
        let aa = dot(alpha, alpha);
        let coef = &(&q(2) * &dot(v, alpha)) * &aa.inverse().expect("roots are nonzero");
        v.iter().zip(alpha).map(|(x, a)| x - &(&coef * a)).collect()
    }

    fn check_vector(&self, v: &ExactVector) -> Result<()> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                got: v.len(),
            });
        }
        if v.iter().all(Quad::is_zero) {
            return Err(Error::ZeroVector);
        }
        if self.kind == RootType::A {
            let mut s = Quad::zero();
            for x in v {
                s += x;
            }
            if !s.is_zero() {
                return Err(Error::OutOfRange(
                    "A-type vectors must have zero coordinate sum".into(),
                ));
            }
        }
        Ok(())
    }

    /// Zero-set bitmask of `Σ uᵢαᵢ`.
    fn zero_mask(&self, u: &[i64]) -> Mask {
        let mut m = Mask::default();
        for (b, row) in self.pairing.iter().enumerate() {
            let s: i128 = row
                .iter()
                .zip(u)
                .map(|(p, x)| *p as i128 * *x as i128)
                .sum();
            if s == 0 {
                m.set(b);
            }
        }
        m
    }

    fn count_masks(&self, a: &Mask, b: &Mask) -> usize {
        self.len() - a.union_count(b)
    }
}

pub fn build_root_system(kind: RootType, rank: usize) -> Result<RootSystem> {
    RootSystem::new(kind, rank)
}

/// Exact number of roots orthogonal to neither `u` nor `x`.
pub fn count_nonorthogonal(rs: &RootSystem, u: &ExactVector, x: &ExactVector) -> Result<usize> {
    rs.check_vector(u)?;
    rs.check_vector(x)?;
    Ok(rs
        .roots
        .iter()
        .filter(|b| !dot(b, u).is_zero() && !dot(b, x).is_zero())
        .count())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Mask([u64; 4]);

impl Mask {
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn union_count(&self, other: &Mask) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }
}

/// Determinant of a small integer matrix by fraction-free elimination.
fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Primitive, sign-normalized generator of the kernel of `r−1` integer
/// rows in dimension `r`, or `None` if the rows are dependent.
fn kernel_line(rows: &[&[i64]]) -> Option<Vec<i64>> {
    let r = rows.len() + 1;
    let mut v: Vec<i128> = (0..r)
        .map(|skip| {
            let m: Vec<Vec<i128>> = rows
                .iter()
                .map(|row| {
                    (0..r)
                        .filter(|&c| c != skip)
                        .map(|c| row[c] as i128)
                        .collect()
                })
                .collect();
            let d = bareiss_det(m);
            if skip % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    let g = v.iter().fold(0, |g, &x| gcd(g, x));
    if g == 0 {
        return None;
    }
    let first = *v.iter().find(|x| **x != 0).expect("nonzero");
    let s = if first < 0 { -g } else { g };
    for x in v.iter_mut() {
        *x /= s;
    }
    v.into_iter().map(|x| i64::try_from(x).ok()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    ExhaustiveDirections,
    Random { samples: u64, seed: u64 },
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::ExhaustiveDirections => write!(f, "exhaustive-directions"),
            Strategy::Random { .. } => write!(f, "random"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    #[serde(rename = "type")]
    pub type_label: String,
    pub rank: usize,
    pub strategy: String,
    /// Pairs evaluated.
    pub samples: u64,
    pub seed: Option<u64>,
    pub min_count: usize,
    #[serde(rename = "argmin_U")]
    pub argmin_u: Vec<String>,
    #[serde(rename = "argmin_X")]
    pub argmin_x: Vec<String>,
    /// Evaluated pairs with fewer than four non-orthogonal roots.
    pub violations: u64,
    /// Distinct arrangement lines (exhaustive strategy only).
    pub lines: Option<usize>,
    /// `min_count == 2` for type A, `min_count ≥ 4` otherwise.
    pub pass: bool,
}

fn render(v: &ExactVector) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Per-chunk best of a random scan: count, sample index, `u`, `x`, violations.
type ChunkBest = (usize, u64, Vec<i64>, Vec<i64>, u64);

/// Upper bound on root subsets the exhaustive strategy will enumerate.
pub const EXHAUSTIVE_LIMIT: u128 = 50_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// All lines cut out by `rank−1` independent root hyperplanes, in simple
/// coordinates.
fn arrangement_lines(rs: &RootSystem) -> Result<Vec<Vec<i64>>> {
    let r = rs.rank;
    let pos = &rs.positive;
    let subsets = binomial(pos.len(), r - 1);
    if subsets > EXHAUSTIVE_LIMIT {
        return Err(Error::OutOfRange(format!(
            "exhaustive scan of {} needs {subsets} root subsets; use the random strategy",
            rs.label()
        )));
    }
    let mut seen = HashSet::new();
    let mut lines = Vec::new();
    let mut idx: Vec<usize> = (0..r - 1).collect();
    loop {
        let rows: Vec<&[i64]> = idx.iter().map(|&i| rs.pairing[pos[i]].as_slice()).collect();
        if let Some(line) = kernel_line(&rows) {
            if seen.insert(line.clone()) {
                lines.push(line);
            }
        }
        // next combination
        let mut k = r - 1;
        loop {
            if k == 0 {
                return Ok(lines);
            }
            k -= 1;
            if idx[k] < pos.len() - (r - 1 - k) {
                idx[k] += 1;
                for t in k + 1..r - 1 {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Lines of the arrangement and every pair of them attaining the minimum.
pub fn minimizing_line_pairs(rs: &RootSystem) -> Result<(usize, Vec<(ExactVector, ExactVector)>)> {
    let lines = arrangement_lines(rs)?;
    let masks: Vec<Mask> = lines.iter().map(|l| rs.zero_mask(l)).collect();
    let mut best = usize::MAX;
    let mut pairs = Vec::new();
    for i in 0..lines.len() {
        for j in i..lines.len() {
            let c = rs.count_masks(&masks[i], &masks[j]);
            if c < best {
                best = c;
                pairs.clear();
            }
            if c == best {
                pairs.push((i, j));
            }
        }
    }
    Ok((
        best,
        pairs
            .into_iter()
            .map(|(i, j)| {
                (
                    rs.from_simple_coords(&lines[i]),
                    rs.from_simple_coords(&lines[j]),
                )
            })
            .collect(),
    ))
}

fn verdict(rs: &RootSystem, min: usize) -> bool {
    if rs.kind == RootType::A {
        min == 2
    } else {
        min >= 4
    }
}

/// Scan for the minimum of [`count_nonorthogonal`] over pairs of nonzero
/// vectors.
///
/// The count only depends on which roots are orthogonal to each vector,
/// and any nonzero vector can be moved onto an arrangement line without
/// losing orthogonal roots. The exhaustive strategy therefore takes the
/// minimum over all pairs of lines, which certifies the global minimum.
/// The random strategy draws vectors from lines, from 2-dimensional strata
/// and from small integer boxes.
pub fn assertion_scan(rs: &RootSystem, strategy: Strategy) -> Result<ScanReport> {
    if rs.rank < 2 {
        return Err(Error::InvalidRank {
            kind: rs.kind.letter().to_string(),
            rank: rs.rank,
        });
    }
    match strategy {
        Strategy::ExhaustiveDirections => {
            let lines = arrangement_lines(rs)?;
            let masks: Vec<Mask> = lines.iter().map(|l| rs.zero_mask(l)).collect();
            let mut best = (usize::MAX, 0, 0);
            let mut violations = 0u64;
            let mut pairs = 0u64;
            for i in 0..lines.len() {
                for j in i..lines.len() {
                    let c = rs.count_masks(&masks[i], &masks[j]);
                    pairs += 1;
                    if c < 4 {
                        violations += 1;
                    }
                    if c < best.0 {
                        best = (c, i, j);
                    }
                }
            }
            let (min, i, j) = best;
            Ok(ScanReport {
                type_label: rs.label(),
                rank: rs.rank,
                strategy: strategy.to_string(),
                samples: pairs,
                seed: None,
                min_count: min,
                argmin_u: render(&rs.from_simple_coords(&lines[i])),
                argmin_x: render(&rs.from_simple_coords(&lines[j])),
                violations,
                lines: Some(lines.len()),
                pass: verdict(rs, min),
            })
        }
        Strategy::Random { samples, seed } => {
            const CHUNK: u64 = 4096;
            let chunks = samples.div_ceil(CHUNK);
            let results: Vec<ChunkBest> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c);
                    let n = CHUNK.min(samples - c * CHUNK);
                    let mut best = (usize::MAX, 0u64, Vec::new(), Vec::new());
                    let mut violations = 0;
                    for k in 0..n {
                        let u = random_direction(rs, &mut rng);
                        let x = random_direction(rs, &mut rng);
                        let cnt = rs.count_masks(&rs.zero_mask(&u), &rs.zero_mask(&x));
                        if cnt < 4 {
                            violations += 1;
                        }
                        if cnt < best.0 {
                            best = (cnt, c * CHUNK + k, u, x);
                        }
                    }
                    (best.0, best.1, best.2, best.3, violations)
                })
                .collect();
            let violations = results.iter().map(|r| r.4).sum();
            let best = results
                .into_iter()
                .min_by_key(|r| (r.0, r.1))
                .expect("at least one chunk");
            Ok(ScanReport {
                type_label: rs.label(),
                rank: rs.rank,
                strategy: strategy.to_string(),
                samples,
                seed: Some(seed),
                min_count: best.0,
                argmin_u: render(&rs.from_simple_coords(&best.2)),
                argmin_x: render(&rs.from_simple_coords(&best.3)),
                violations,
                lines: None,
                pass: verdict(rs, best.0),
            })
        }
    }
}

fn random_line<R: Rng>(rs: &RootSystem, rng: &mut R, fixed: &[usize]) -> Option<Vec<i64>> {
    let r = rs.rank;
    let mut rows: Vec<&[i64]> = fixed.iter().map(|&i| rs.pairing[i].as_slice()).collect();
    while rows.len() < r - 1 {
        let b = rs.positive[rng.random_range(0..rs.positive.len())];
        rows.push(rs.pairing[b].as_slice());
    }
    kernel_line(&rows)
}

/// A nonzero vector in simple coordinates from a mixture of strata.
fn random_direction<R: Rng>(rs: &RootSystem, rng: &mut R) -> Vec<i64> {
    let r = rs.rank;
    loop {
        let pick: f64 = rng.random();
        let v = if pick < 0.6 {
            random_line(rs, rng, &[])
        } else if pick < 0.8 && r >= 3 {
            let fixed: Vec<usize> = (0..r - 2)
                .map(|_| rs.positive[rng.random_range(0..rs.positive.len())])
                .collect();
            match (random_line(rs, rng, &fixed), random_line(rs, rng, &fixed)) {
                (Some(a), Some(b)) => {
                    let (s, t) = (rng.random_range(1..=3i64), rng.random_range(-3..=3i64));
                    Some(a.iter().zip(&b).map(|(x, y)| s * x + t * y).collect())
                }
                _ => None,
            }
        } else {
            Some((0..r).map(|_| rng.random_range(-3..=3)).collect())
        };
        if let Some(v) = v {
            if v.iter().any(|x| *x != 0) {
                return v;
            }
        }
    }
}

/// Whether the ambient vector has two distinct entries with multiplicities
/// `1` and `n` (the shape of `diag(−n, 1, …, 1)` up to permutation and
/// scale); returns the position of the singleton entry.
pub fn singleton_pattern(v: &ExactVector) -> Option<usize> {
    let mut counts: HashMap<&Quad, Vec<usize>> = HashMap::new();
    for (i, x) in v.iter().enumerate() {
        counts.entry(x).or_default().push(i);
    }
    if counts.len() != 2 {
        return None;
    }
    let mut groups: Vec<&Vec<usize>> = counts.values().collect();
    groups.sort_by_key(|g| g.len());
    if groups[0].len() == 1 && groups[1].len() == v.len() - 1 {
        Some(groups[0][0])
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketCrosscheck {
    pub root_count: usize,
    pub bracket_dim: usize,
    pub equal: bool,
}

fn exact_from_f64(x: f64) -> Result<Quad> {
    BigRational::from_float(x)
        .map(Quad::from_rational)
        .ok_or_else(|| Error::OutOfRange(format!("non-finite entry {x}")))
}

/// Compare `dim [U,[X,𝔤]]` in su(n+1) with the root count of `Aₙ`.
///
/// `u`, `x` are algebra vectors of su(n+1) that must commute and lie in the
/// diagonal Cartan subalgebra.
pub fn bracket_dim_crosscheck(
    n: usize,
    u: &DVector<f64>,
    x: &DVector<f64>,
) -> Result<BracketCrosscheck> {
    let g = CompactLieAlgebra::su(n + 1)?;
    if u.len() != g.dim() || x.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: if u.len() != g.dim() { u.len() } else { x.len() },
        });
    }
    let scale = 1.0 + u.amax() * x.amax();
    if g.bracket(u, x).amax() > 1e-12 * scale {
        return Err(Error::NonCommuting);
    }
    let du = g
        .diagonal_entries(u, 1e-12 * (1.0 + u.amax()))
        .ok_or(Error::NotDiagonal)?;
    let dx = g
        .diagonal_entries(x, 1e-12 * (1.0 + x.amax()))
        .ok_or(Error::NotDiagonal)?;
    let composed = g.ad(u) * g.ad(x);
    let sv = composed.singular_values();
    let tol = 1e-9 * sv.amax().max(f64::MIN_POSITIVE);
    let bracket_dim = sv.iter().filter(|s| **s > tol).count();

    let rs = RootSystem::new(RootType::A, n)?;
    // Entries recovered from coordinates carry O(ε) noise. Only the equality
    // pattern matters for the count, so near-equal entries share one value.
    let snap = |v: &[f64]| -> Result<ExactVector> {
        let tol = 1e-9 * (1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|a, b| v[*a].total_cmp(&v[*b]));
        let mut shared = vec![0.0; v.len()];
        let mut rep = v[order[0]];
        for &i in &order {
            if v[i] - rep > tol {
                rep = v[i];
            }
            shared[i] = rep;
        }
        let mut out = shared
            .iter()
            .map(|x| exact_from_f64(*x))
            .collect::<Result<Vec<Quad>>>()?;
        let mut s = Quad::zero();
        for o in &out {
            s += o;
        }
        let mean = &s * &Quad::from_ratio(1, out.len() as i64);
        for o in out.iter_mut() {
            *o = &*o - &mean;
        }
        Ok(out)
    };
    let eu = snap(&du)?;
    let ex = snap(&dx)?;
    let root_count = count_nonorthogonal(&rs, &eu, &ex)?;
    Ok(BracketCrosscheck {
        root_count,
        bracket_dim,
        equal: root_count == bracket_dim,
    })
}
