//! The compact Lie algebra su(n) in an orthonormal basis.
//!
//! Elements are real coordinate vectors against a basis that is
//! orthonormal for `⟨X,Y⟩ = −tr(XY)`, so the bi-invariant form is the
//! identity matrix. The first `n−1` basis vectors span the diagonal Cartan
//! subalgebra.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

type C64 = Complex<f64>;

#[derive(Debug, Clone)]
pub struct CompactLieAlgebra {
    n: usize,
    dim: usize,
    labels: Vec<String>,
    basis: Vec<DMatrix<C64>>,
    /// `c[(i·dim + j)·dim + k]` is the `e_k`-coefficient of `[e_i, e_j]`.
    structure: Vec<f64>,
    bi_form: DMatrix<f64>,
    cartan: Vec<usize>,
}

/// Real root space: a 2-plane on which the Cartan acts by rotations.
#[derive(Debug, Clone)]
pub struct RootSpace {
    /// Orthonormal pair `(p, q)` with `[h, p] = λ(h) q`.
    pub basis: [DVector<f64>; 2],
    /// `λ` on the Cartan basis vectors.
    pub root: Vec<f64>,
}

impl CompactLieAlgebra {
    /// su(n) for `n ≥ 2`.
    pub fn su(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::AlgebraSpec(format!("su{n}")));
        }
        let i = C64::new(0.0, 1.0);
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        for k in 1..n {
            let norm = ((k * (k + 1)) as f64).sqrt();
            let mut m = DMatrix::<C64>::zeros(n, n);
            for j in 0..k {
                m[(j, j)] = i / norm;
            }
            m[(k, k)] = i * (-(k as f64)) / norm;
            basis.push(m);
            labels.push(format!("h{k}"));
        }
        let r2 = 2f64.sqrt();
        for j in 0..n {
            for k in j + 1..n {
                let mut a = DMatrix::<C64>::zeros(n, n);
                a[(j, k)] = C64::new(1.0 / r2, 0.0);
                a[(k, j)] = C64::new(-1.0 / r2, 0.0);
                basis.push(a);
                labels.push(format!("a{}{}", j + 1, k + 1));
                let mut s = DMatrix::<C64>::zeros(n, n);
                s[(j, k)] = i / r2;
                s[(k, j)] = i / r2;
                basis.push(s);
                labels.push(format!("s{}{}", j + 1, k + 1));
            }
        }
        let dim = basis.len();
        let mut structure = vec![0.0; dim * dim * dim];
        let coords =
            |m: &DMatrix<C64>| -> Vec<f64> { basis.iter().map(|e| -(m * e).trace().re).collect() };
        for a in 0..dim {
            for b in a + 1..dim {
                let br = &basis[a] * &basis[b] - &basis[b] * &basis[a];
                for (k, c) in coords(&br).into_iter().enumerate() {
                    let c = if c.abs() < 1e-15 { 0.0 } else { c };
                    structure[(a * dim + b) * dim + k] = c;
                    structure[(b * dim + a) * dim + k] = -c;
                }
            }
        }
        Ok(Self {
            n,
            dim,
            labels,
            basis,
            structure,
            bi_form: DMatrix::identity(dim, dim),
            cartan: (0..n - 1).collect(),
        })
    }

    /// Parse `su2`, `su3`, …
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        let n = s
            .strip_prefix("su")
            .and_then(|r| r.parse::<usize>().ok())
            .filter(|n| (2..=12).contains(n))
            .ok_or_else(|| Error::AlgebraSpec(spec.to_string()))?;
        Self::su(n)
    }

    pub fn spec(&self) -> String {
        format!("su{}", self.n)
    }

    /// Size of the defining matrices.
    pub fn matrix_size(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn bi_form(&self) -> &DMatrix<f64> {
        &self.bi_form
    }

    pub fn cartan_indices(&self) -> &[usize] {
        &self.cartan
    }

    pub fn cartan_basis(&self) -> Vec<DVector<f64>> {
        self.cartan.iter().map(|&i| self.unit(i)).collect()
    }

    pub fn unit(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    fn check(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            })
        } else {
            Ok(())
        }
    }

    /// `[x, y]` in coordinates. Panics on length mismatch.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let mut out = DVector::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let row = &self.structure[(i * d + j) * d..(i * d + j + 1) * d];
                for (k, c) in row.iter().enumerate() {
                    out[k] += w * c;
                }
            }
        }
        out
    }

    /// Matrix of `[x, ·]`. Panics on length mismatch.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let row = &self.structure[(i * d + j) * d..(i * d + j + 1) * d];
                for (k, c) in row.iter().enumerate() {
                    m[(k, j)] += x[i] * c;
                }
            }
        }
        m
    }

    pub fn to_matrix(&self, x: &DVector<f64>) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (c, e) in x.iter().zip(&self.basis) {
            if *c != 0.0 {
                m += e * C64::new(*c, 0.0);
            }
        }
        m
    }

    /// Coordinates of a traceless anti-Hermitian matrix.
    pub fn from_matrix(&self, m: &DMatrix<C64>) -> DVector<f64> {
        DVector::from_iterator(self.dim, self.basis.iter().map(|e| -(m * e).trace().re))
    }

    /// The element `i·diag(d)`; `d` must sum to zero.
    pub fn diagonal(&self, d: &[f64]) -> Result<DVector<f64>> {
        if d.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: d.len(),
            });
        }
        let tr: f64 = d.iter().sum();
        let scale = d.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if tr.abs() > 1e-12 * scale {
            return Err(Error::OutOfRange(format!(
                "diagonal entries sum to {tr}, not 0"
            )));
        }
        let m = DMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                C64::new(0.0, d[i])
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(self.from_matrix(&m))
    }

    /// Real diagonal entries `d` of `x = i·diag(d)`, or `None` if `x` has an
    /// off-diagonal component above `tol`.
    pub fn diagonal_entries(&self, x: &DVector<f64>, tol: f64) -> Option<Vec<f64>> {
        if (self.rank()..self.dim).any(|i| x[i].abs() > tol) {
            return None;
        }
        let m = self.to_matrix(x);
        Some((0..self.n).map(|i| m[(i, i)].im).collect())
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    worst = worst.max(
                        (self.structure_constant(i, j, k) + self.structure_constant(j, i, k)).abs(),
                    );
                }
            }
        }
        worst
    }

    /// Largest coefficient of `[a,[b,c]] + [b,[c,a]] + [c,[a,b]]` over basis
    /// triples.
    pub fn jacobi_residual(&self) -> f64 {
        let e: Vec<_> = (0..self.dim).map(|i| self.unit(i)).collect();
        let mut worst: f64 = 0.0;
        for a in 0..self.dim {
            for b in a + 1..self.dim {
                let ab = self.bracket(&e[a], &e[b]);
                for c in b + 1..self.dim {
                    let r = self.bracket(&e[a], &self.bracket(&e[b], &e[c]))
                        + self.bracket(&e[b], &self.bracket(&e[c], &e[a]))
                        + self.bracket(&e[c], &ab);
                    worst = worst.max(r.amax());
                }
            }
        }
        worst
    }

    /// Largest `|⟨[x,y],z⟩ + ⟨y,[x,z]⟩|` over basis triples.
    pub fn invariance_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            let ad = self.ad(&self.unit(i));
            let m = ad.transpose() * &self.bi_form + &self.bi_form * &ad;
            worst = worst.max(m.amax());
        }
        worst
    }

    /// Real root spaces, ordered by `|λ(H)|` for a fixed generic `H` in the
    /// Cartan.
    pub fn real_root_spaces(&self) -> Result<Vec<RootSpace>> {
        let weights: Vec<f64> = (0..self.rank())
            .map(|k| {
                [
                    2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0, 31.0,
                ][k % 11]
                    .sqrt()
                    * (1.0 + k as f64)
            })
            .collect();
        let mut h = DVector::zeros(self.dim);
        for (&idx, w) in self.cartan.iter().zip(&weights) {
            h[idx] = *w;
        }
        let ad = self.ad(&h);
        let sq = &ad * &ad;
        let sq = (&sq + sq.transpose()) * 0.5;
        let eig = sq.symmetric_eigen();
        let mut order: Vec<usize> = (0..self.dim).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let scale = eig.eigenvalues.amax();
        let tol = 1e-8 * scale;
        let nonzero: Vec<usize> = order
            .into_iter()
            .filter(|&i| eig.eigenvalues[i].abs() > tol)
            .collect();
        if nonzero.len() != self.dim - self.rank() || !nonzero.len().is_multiple_of(2) {
            return Err(Error::OutOfRange("Cartan element is not regular".into()));
        }
        let mut spaces = Vec::new();
        for pair in nonzero.chunks(2) {
            let (e0, e1) = (eig.eigenvalues[pair[0]], eig.eigenvalues[pair[1]]);
            if (e0 - e1).abs() > tol {
                return Err(Error::OutOfRange("root values are not separated".into()));
            }
            let p = eig.eigenvectors.column(pair[0]).into_owned();
            let mut q = self.bracket(&h, &p);
            let lam = q.norm();
            q /= lam;
            let root = self
                .cartan_basis()
                .iter()
                .map(|hk| self.bracket(hk, &p).dot(&q))
                .collect();
            spaces.push(RootSpace {
                basis: [p, q],
                root,
            });
        }
        Ok(spaces)
    }
}

/// `ad(x)` with a dimension check.
pub fn bracket_and_ad(algebra: &CompactLieAlgebra, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    algebra.check(x)?;
    Ok(algebra.ad(x))
}

pub const CENTRALIZER_TOL: f64 = 1e-9;

/// Orthonormal basis of the numerical kernel of `ad(x)`.
pub fn centralizer(
    algebra: &CompactLieAlgebra,
    x: &DVector<f64>,
    tol: f64,
) -> Result<Vec<DVector<f64>>> {
    algebra.check(x)?;
    if x.iter().all(|v| *v == 0.0) {
        return Ok((0..algebra.dim()).map(|i| algebra.unit(i)).collect());
    }
    let ad = algebra.ad(x);
    let svd = ad.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let sv = &svd.singular_values;
    let smax = sv.amax();
    let thr = tol * smax;
    let mut kernel = Vec::new();
    let mut nearest = f64::INFINITY;
    for (i, s) in sv.iter().enumerate() {
        if *s < thr {
            kernel.push(v_t.row(i).transpose());
        } else {
            nearest = nearest.min(*s);
        }
    }
    if nearest < 1e3 * thr {
        return Err(Error::IllConditioned { tol, nearest });
    }
    Ok(kernel)
}

/// `exp(t·ad(y))·x`.
pub fn adjoint_transport(
    algebra: &CompactLieAlgebra,
    y: &DVector<f64>,
    t: f64,
    x: &DVector<f64>,
) -> Result<DVector<f64>> {
    algebra.check(y)?;
    algebra.check(x)?;
    Ok((algebra.ad(y) * t).exp() * x)
}

/// `Ad(g)` for `g = exp(t₁Y₁)⋯exp(t_wY_w)`, with `Y_k` a standard Gaussian
/// combination of `generators` normalized to unit bi-norm and
/// `t_k ∈ [−π, π]`.
pub fn random_adjoint<R: Rng + ?Sized>(
    algebra: &CompactLieAlgebra,
    generators: &[DVector<f64>],
    word_length: usize,
    rng: &mut R,
) -> DMatrix<f64> {
    let d = algebra.dim();
    let mut g = DMatrix::identity(d, d);
    if generators.is_empty() {
        return g;
    }
    for _ in 0..word_length {
        let mut y = DVector::zeros(d);
        for gen in generators {
            y += gen * rng.sample::<f64, _>(StandardNormal);
        }
        let norm = y.norm();
        if norm == 0.0 {
            continue;
        }
        let t = rng.random_range(-std::f64::consts::PI..=std::f64::consts::PI);
        g *= (algebra.ad(&y) * (t / norm)).exp();
    }
    g
}

/// A seeded point `Ad(g)x` on the adjoint orbit of `x`.
pub fn random_orbit_sample(
    algebra: &CompactLieAlgebra,
    x: &DVector<f64>,
    word_length: usize,
    seed: u64,
) -> Result<DVector<f64>> {
    algebra.check(x)?;
    if word_length == 0 {
        return Err(Error::OutOfRange("word length must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<_> = (0..algebra.dim()).map(|i| algebra.unit(i)).collect();
    Ok(random_adjoint(algebra, &gens, word_length, &mut rng) * x)
}

#[derive(Debug, Clone)]
pub struct SubspaceInfo {
    pub is_commutative: bool,
    /// Orthonormal basis of the orthogonal complement for the given form.
    pub complement: Vec<DVector<f64>>,
    /// Projection onto the complement.
    pub pr1: DMatrix<f64>,
    /// Projection onto the span of the input.
    pub pr2: DMatrix<f64>,
}

/// Commutativity, orthogonal complement and projections for `span(v)`,
/// orthogonality taken with respect to `form` (the bi-invariant form when
/// `None`).
pub fn subspace_tools(
    algebra: &CompactLieAlgebra,
    v: &[DVector<f64>],
    form: Option<&DMatrix<f64>>,
) -> Result<SubspaceInfo> {
    for x in v {
        algebra.check(x)?;
    }
    let a = form.unwrap_or(algebra.bi_form());
    let d = algebra.dim();
    let k = v.len();
    let vm = DMatrix::from_columns(v);
    let gram = if k == 0 {
        DMatrix::zeros(0, 0)
    } else {
        vm.transpose() * a * &vm
    };
    let pr2 = if k == 0 {
        DMatrix::zeros(d, d)
    } else {
        let eig = gram.clone().symmetric_eigen();
        let (lo, hi) = eig
            .eigenvalues
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), x| {
                (lo.min(*x), hi.max(*x))
            });
        if lo.is_nan() || lo <= 1e-12 * hi {
            return Err(Error::DependentBasis);
        }
        let inv = gram.try_inverse().ok_or(Error::DependentBasis)?;
        &vm * inv * vm.transpose() * a
    };
    let pr1 = DMatrix::identity(d, d) - &pr2;

    let mut complement: Vec<DVector<f64>> = Vec::new();
    let ip = |x: &DVector<f64>, y: &DVector<f64>| x.dot(&(a * y));
    for i in 0..d {
        if complement.len() == d - k {
            break;
        }
        let mut w = pr1.column(i).into_owned();
        for _ in 0..2 {
            for c in &complement {
                let proj = ip(c, &w);
                w -= c * proj;
            }
        }
        let nw = ip(&w, &w).sqrt();
        if nw > 1e-8 {
            complement.push(w / nw);
        }
    }

    let mut is_commutative = true;
    for i in 0..k {
        for j in i + 1..k {
            let b = algebra.bracket(&v[i], &v[j]);
            if b.amax() >= 1e-12 * (1.0 + v[i].amax() * v[j].amax()) {
                is_commutative = false;
            }
        }
    }
    Ok(SubspaceInfo {
        is_commutative,
        complement,
        pr1,
        pr2,
    })
}

/// Distance between subspaces spanned by orthonormal bases:
/// the spectral norm of the difference of orthogonal projectors.
pub fn subspace_distance(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    if a.is_empty() {
        return 0.0;
    }
    let pa = DMatrix::from_columns(a);
    let pb = DMatrix::from_columns(b);
    let diff = &pa * pa.transpose() - &pb * pb.transpose();
    diff.singular_values().amax()
}
