//! Generating profiles of an (α₁,α₂)-norm.
//!
//! A norm `F = √L(α₁², α₂²)` can be described by any of three profiles:
//! `L(u,v)` (1-homogeneous on the closed quadrant minus the origin),
//! `φ(s) = √L(1−s², s²)` and `ψ(t) = √L(t², 1−t²)`, with
//! `φ(s) = ψ(√(1−s²))`. Named families carry closed-form derivatives;
//! expression families are differentiated symbolically.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;

/// Which profile a family is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Phi,
    Psi,
    L,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FamilyKind {
    /// `L = c₁u + c₂v`.
    Riemannian { c1: f64, c2: f64 },
    /// `L = u + v + (uᵐ + vᵐ)^{1/m}`.
    MRoot { m: u32 },
    /// φ as an expression in `s`.
    Phi(Expr),
    /// ψ as an expression in `s`.
    Psi(Expr),
    /// L as an expression in `u`, `v`.
    L(Expr),
}

/// `L` and all partial derivatives up to order three at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct LDerivs {
    pub l: f64,
    pub l1: f64,
    pub l2: f64,
    pub l11: f64,
    pub l12: f64,
    pub l22: f64,
    pub l111: f64,
    pub l112: f64,
    pub l122: f64,
    pub l222: f64,
}

impl LDerivs {
    fn all_finite(&self) -> bool {
        [
            self.l, self.l1, self.l2, self.l11, self.l12, self.l22, self.l111, self.l112,
            self.l122, self.l222,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// A profile value with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Profile {
    /// `f(s) − s f′(s) + (b² − s²) f″(s)`
    pub fn margin(&self, s: f64, b: f64) -> f64 {
        self.value - s * self.d1 + (b * b - s * s) * self.d2
    }
}

/// Symbolic derivative trees for expression kinds.
#[derive(Debug)]
struct Compiled {
    /// L, L₁, L₂, L₁₁, L₁₂, L₂₂, L₁₁₁, L₁₁₂, L₁₂₂, L₂₂₂ in `u`, `v`.
    l: [Expr; 10],
    /// Profile and two derivatives in `s`, for φ and ψ kinds.
    profile: Option<[Expr; 3]>,
}

#[derive(Debug, Clone)]
pub struct GeneratingFamily {
    kind: FamilyKind,
    /// Effective `L(u,v) = L_kind(σ₀u, σ₁v)`; set by normalization.
    scale: [f64; 2],
    compiled: Option<Arc<Compiled>>,
}

impl PartialEq for GeneratingFamily {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.scale == other.scale
    }
}

fn check_vars(e: &Expr, allowed: &[&str]) -> Result<()> {
    for name in e.variables() {
        if !allowed.contains(&name.as_str()) {
            return Err(Error::UnknownVariable {
                name,
                allowed: allowed.join(","),
            });
        }
    }
    Ok(())
}

/// `(u+v)·f(√(w))²` where `w` is `v/(u+v)` for φ and `u/(u+v)` for ψ.
fn l_tree_from_profile(profile: &Expr, target: Target) -> Expr {
    let u = Expr::var("u");
    let v = Expr::var("v");
    let sum = Expr::add(u.clone(), v.clone());
    let num = if target == Target::Phi { v } else { u };
    let arg = Expr::sqrt(Expr::div(num, sum.clone()));
    let f = profile.substitute(&[("s", arg)]);
    Expr::mul(sum, Expr::pow(f, Expr::constant(2.0)))
}

fn l_derivative_trees(l: &Expr) -> [Expr; 10] {
    let l1 = l.diff("u");
    let l2 = l.diff("v");
    let l11 = l1.diff("u");
    let l12 = l1.diff("v");
    let l22 = l2.diff("v");
    let l111 = l11.diff("u");
    let l112 = l11.diff("v");
    let l122 = l12.diff("v");
    let l222 = l22.diff("v");
    [l.clone(), l1, l2, l11, l12, l22, l111, l112, l122, l222]
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl GeneratingFamily {
    pub fn new(kind: FamilyKind) -> Result<Self> {
        let compiled = match &kind {
            FamilyKind::Riemannian { c1, c2 } => {
                if !(*c1 > 0.0 && *c2 > 0.0 && c1.is_finite() && c2.is_finite()) {
                    return Err(Error::FamilySpec {
                        spec: format!("riemannian:{c1},{c2}"),
                        reason: "coefficients must be positive and finite".into(),
                    });
                }
                None
            }
            FamilyKind::MRoot { m } => {
                if *m < 2 {
                    return Err(Error::FamilySpec {
                        spec: format!("mroot:{m}"),
                        reason: "m must be an integer >= 2".into(),
                    });
                }
                None
            }
            FamilyKind::Phi(e) | FamilyKind::Psi(e) => {
                check_vars(e, &["s"])?;
                let target = if matches!(kind, FamilyKind::Phi(_)) {
                    Target::Phi
                } else {
                    Target::Psi
                };
                let d1 = e.diff("s");
                let d2 = d1.diff("s");
                Some(Arc::new(Compiled {
                    l: l_derivative_trees(&l_tree_from_profile(e, target)),
                    profile: Some([e.clone(), d1, d2]),
                }))
            }
            FamilyKind::L(e) => {
                check_vars(e, &["u", "v"])?;
                Some(Arc::new(Compiled {
                    l: l_derivative_trees(e),
                    profile: None,
                }))
            }
        };
        Ok(Self {
            kind,
            scale: [1.0, 1.0],
            compiled,
        })
    }

    pub fn riemannian(c1: f64, c2: f64) -> Result<Self> {
        Self::new(FamilyKind::Riemannian { c1, c2 })
    }

    pub fn mroot(m: u32) -> Result<Self> {
        Self::new(FamilyKind::MRoot { m })
    }

    /// Parse `riemannian:c1,c2`, `mroot:m`, `phi:<expr>`, `psi:<expr>` or
    /// `L:<expr>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = |reason: &str| Error::FamilySpec {
            spec: spec.to_string(),
            reason: reason.to_string(),
        };
        let (tag, body) = spec
            .split_once(':')
            .ok_or_else(|| bad("expected `<kind>:<parameters>`"))?;
        let kind = match tag.trim() {
            "riemannian" => {
                let parts: Vec<&str> = body.split(',').map(str::trim).collect();
                if parts.len() != 2 {
                    return Err(bad("expected two coefficients `c1,c2`"));
                }
                let c = |s: &str| s.parse::<f64>().map_err(|_| bad("malformed coefficient"));
                FamilyKind::Riemannian {
                    c1: c(parts[0])?,
                    c2: c(parts[1])?,
                }
            }
            "mroot" => FamilyKind::MRoot {
                m: body
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| bad("m must be a positive integer"))?,
            },
            "phi" => FamilyKind::Phi(Expr::parse(body)?),
            "psi" => FamilyKind::Psi(Expr::parse(body)?),
            "L" => FamilyKind::L(Expr::parse(body)?),
            _ => return Err(bad("unknown kind (riemannian, mroot, phi, psi, L)")),
        };
        Self::new(kind)
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn scale(&self) -> [f64; 2] {
        self.scale
    }

    /// Canonical spec string of the underlying kind (scale not included).
    pub fn spec(&self) -> String {
        match &self.kind {
            FamilyKind::Riemannian { c1, c2 } => {
                format!("riemannian:{},{}", fmt_num(*c1), fmt_num(*c2))
            }
            FamilyKind::MRoot { m } => format!("mroot:{m}"),
            FamilyKind::Phi(e) => format!("phi:{e}"),
            FamilyKind::Psi(e) => format!("psi:{e}"),
            FamilyKind::L(e) => format!("L:{e}"),
        }
    }

    /// True for families whose L is linear by construction.
    pub fn is_linear_kind(&self) -> bool {
        matches!(self.kind, FamilyKind::Riemannian { .. })
    }

    fn base_derivs(&self, u: f64, v: f64) -> LDerivs {
        match &self.kind {
            FamilyKind::Riemannian { c1, c2 } => LDerivs {
                l: c1 * u + c2 * v,
                l1: *c1,
                l2: *c2,
                ..LDerivs::default()
            },
            FamilyKind::MRoot { m } => mroot_derivs(*m, u, v),
            _ => {
                let c = self
                    .compiled
                    .as_ref()
                    .expect("expression kinds are compiled");
                let look = |name: &str| match name {
                    "u" => Some(u),
                    "v" => Some(v),
                    _ => None,
                };
                let e = |i: usize| c.l[i].eval_with(&look);
                LDerivs {
                    l: e(0),
                    l1: e(1),
                    l2: e(2),
                    l11: e(3),
                    l12: e(4),
                    l22: e(5),
                    l111: e(6),
                    l112: e(7),
                    l122: e(8),
                    l222: e(9),
                }
            }
        }
    }

    /// L and its partial derivatives to order three at `(u, v)`.
    pub fn l_derivs(&self, u: f64, v: f64) -> LDerivs {
        let [p, q] = self.scale;
        if p == 1.0 && q == 1.0 {
            return self.base_derivs(u, v);
        }
        let d = self.base_derivs(p * u, q * v);
        LDerivs {
            l: d.l,
            l1: p * d.l1,
            l2: q * d.l2,
            l11: p * p * d.l11,
            l12: p * q * d.l12,
            l22: q * q * d.l22,
            l111: p * p * p * d.l111,
            l112: p * p * q * d.l112,
            l122: p * q * q * d.l122,
            l222: q * q * q * d.l222,
        }
    }

    pub fn l(&self, u: f64, v: f64) -> f64 {
        self.l_derivs(u, v).l
    }

    fn direct_profile(&self, which: Target, s: f64) -> Option<Profile> {
        if self.scale != [1.0, 1.0] {
            return None;
        }
        let own = match self.kind {
            FamilyKind::Phi(_) => Target::Phi,
            FamilyKind::Psi(_) => Target::Psi,
            _ => return None,
        };
        if own != which {
            return None;
        }
        let [f, d1, d2] = self.compiled.as_ref()?.profile.as_ref()?;
        let at = [("s", s)];
        Some(Profile {
            value: f.eval(&at),
            d1: d1.eval(&at),
            d2: d2.eval(&at),
        })
    }

    /// φ, φ′, φ″ at `s`.
    pub fn phi(&self, s: f64) -> Profile {
        if let Some(p) = self.direct_profile(Target::Phi, s) {
            return p;
        }
        // h(s) = L(1−s², s²) = φ²
        let d = self.l_derivs(1.0 - s * s, s * s);
        let h = d.l;
        let h1 = 2.0 * s * (d.l2 - d.l1);
        let h2 = 2.0 * (d.l2 - d.l1) + 4.0 * s * s * (d.l11 - 2.0 * d.l12 + d.l22);
        from_square(h, h1, h2)
    }

    /// ψ, ψ′, ψ″ at `t`.
    pub fn psi(&self, t: f64) -> Profile {
        if let Some(p) = self.direct_profile(Target::Psi, t) {
            return p;
        }
        let d = self.l_derivs(t * t, 1.0 - t * t);
        let k = d.l;
        let k1 = 2.0 * t * (d.l1 - d.l2);
        let k2 = 2.0 * (d.l1 - d.l2) + 4.0 * t * t * (d.l11 - 2.0 * d.l12 + d.l22);
        from_square(k, k1, k2)
    }

    /// Expression tree for L in `u`, `v`, with the scale folded in.
    pub fn l_expr(&self) -> Expr {
        let base = match &self.kind {
            FamilyKind::Riemannian { c1, c2 } => Expr::add(
                Expr::mul(Expr::constant(*c1), Expr::var("u")),
                Expr::mul(Expr::constant(*c2), Expr::var("v")),
            ),
            FamilyKind::MRoot { m } => {
                let m = *m as f64;
                let um = Expr::pow(Expr::var("u"), Expr::constant(m));
                let vm = Expr::pow(Expr::var("v"), Expr::constant(m));
                Expr::add(
                    Expr::add(Expr::var("u"), Expr::var("v")),
                    Expr::pow(Expr::add(um, vm), Expr::constant(1.0 / m)),
                )
            }
            FamilyKind::L(e) => e.clone(),
            FamilyKind::Phi(_) | FamilyKind::Psi(_) => {
                self.compiled.as_ref().expect("compiled").l[0].clone()
            }
        };
        let [p, q] = self.scale;
        if p == 1.0 && q == 1.0 {
            base
        } else {
            base.substitute(&[
                ("u", Expr::mul(Expr::constant(p), Expr::var("u"))),
                ("v", Expr::mul(Expr::constant(q), Expr::var("v"))),
            ])
        }
    }

    fn profile_expr(&self, which: Target) -> Expr {
        let unscaled = self.scale == [1.0, 1.0];
        let s = Expr::var("s");
        let co = Expr::sqrt(Expr::sub(
            Expr::constant(1.0),
            Expr::pow(s.clone(), Expr::constant(2.0)),
        ));
        match (&self.kind, which) {
            (FamilyKind::Phi(e), Target::Phi) | (FamilyKind::Psi(e), Target::Psi) if unscaled => {
                e.clone()
            }
            (FamilyKind::Phi(e), Target::Psi) | (FamilyKind::Psi(e), Target::Phi) if unscaled => {
                e.substitute(&[("s", co)])
            }
            _ => {
                let s2 = Expr::pow(s, Expr::constant(2.0));
                let one_minus = Expr::sub(Expr::constant(1.0), s2.clone());
                let (u, v) = if which == Target::Phi {
                    (one_minus, s2)
                } else {
                    (s2, one_minus)
                };
                Expr::sqrt(self.l_expr().substitute(&[("u", u), ("v", v)]))
            }
        }
    }

    /// The same norm expressed through another profile.
    pub fn convert(&self, target: Target) -> Result<GeneratingFamily> {
        let kind = match target {
            Target::L => FamilyKind::L(self.l_expr()),
            Target::Phi => FamilyKind::Phi(self.profile_expr(Target::Phi)),
            Target::Psi => FamilyKind::Psi(self.profile_expr(Target::Psi)),
        };
        let out = GeneratingFamily::new(kind)?;
        for i in 0..=100 {
            let s = i as f64 / 100.0;
            let v = match target {
                Target::Phi => out.phi(s).value,
                Target::Psi => out.psi(s).value,
                Target::L => out.l(1.0 - s, s),
            };
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveProfile { at: s });
            }
        }
        Ok(out)
    }

    /// Rescale so that `φ(0) = φ(1) = 1`: `L̃(u,v) = L(u/L(1,0), v/L(0,1))`.
    pub fn normalized(&self) -> Result<GeneratingFamily> {
        let (p0, p1) = self.endpoint_squares()?;
        let mut out = self.clone();
        out.scale = [self.scale[0] / p0, self.scale[1] / p1];
        Ok(out)
    }

    /// `(φ(0)², φ(1)²) = (L(1,0), L(0,1))`, both required positive.
    pub fn endpoint_squares(&self) -> Result<(f64, f64)> {
        let p0 = self.l(1.0, 0.0);
        let p1 = self.l(0.0, 1.0);
        if !(p0 > 0.0 && p0.is_finite()) {
            return Err(Error::NonPositiveProfile { at: 0.0 });
        }
        if !(p1 > 0.0 && p1.is_finite()) {
            return Err(Error::NonPositiveProfile { at: 1.0 });
        }
        Ok((p0, p1))
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        match self.endpoint_squares() {
            Ok((p0, p1)) => (p0 - 1.0).abs() <= tol && (p1 - 1.0).abs() <= tol,
            Err(_) => false,
        }
    }

    /// Largest residual of the three Euler identities of a 1-homogeneous L
    /// on `grid` points of each ray family `r·(1−w, w)`, `r ∈ {0.5, 1, 2}`.
    pub fn euler_residual(&self, grid: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for r in [0.5, 1.0, 2.0] {
            for i in 0..grid {
                let w = i as f64 / (grid - 1).max(1) as f64;
                let (u, v) = (r * (1.0 - w), r * w);
                let d = self.l_derivs(u, v);
                let scale = 1.0 + d.l.abs();
                worst = worst
                    .max((u * d.l1 + v * d.l2 - d.l).abs() / scale)
                    .max((u * d.l11 + v * d.l12).abs() / scale)
                    .max((u * d.l112 + v * d.l122 + d.l12).abs() / scale);
            }
        }
        worst
    }
}

impl fmt::Display for GeneratingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec())?;
        if self.scale != [1.0, 1.0] {
            write!(f, " (scaled {},{})", self.scale[0], self.scale[1])?;
        }
        Ok(())
    }
}

/// Profile of `√h` from `h` and its derivatives.
fn from_square(h: f64, h1: f64, h2: f64) -> Profile {
    let f = h.sqrt();
    Profile {
        value: f,
        d1: h1 / (2.0 * f),
        d2: h2 / (2.0 * f) - h1 * h1 / (4.0 * f * f * f),
    }
}

/// Closed-form derivatives of `u + v + (uᵐ + vᵐ)^{1/m}`.
fn mroot_derivs(m: u32, u: f64, v: f64) -> LDerivs {
    let mi = m as i32;
    let mf = m as f64;
    let k = mf - 1.0;
    let um = u.powi(mi);
    let vm = v.powi(mi);
    let p = um + vm;
    let r = p.powf(1.0 / mf);
    let p2 = p.powf(1.0 / mf - 2.0);
    let p3 = p.powf(1.0 / mf - 3.0);
    let pw = |x: f64, e: i32| if e == 0 { 1.0 } else { x.powi(e) };
    let r_u = pw(u, mi - 1) * p.powf(1.0 / mf - 1.0);
    let r_v = pw(v, mi - 1) * p.powf(1.0 / mf - 1.0);
    let r_uu = k * pw(u, mi - 2) * vm * p2;
    let r_uv = -k * pw(u, mi - 1) * pw(v, mi - 1) * p2;
    let r_vv = k * um * pw(v, mi - 2) * p2;
    // u^{m−3} only appears with the factor (m−2).
    let lead = |x: f64| {
        if m == 2 {
            0.0
        } else {
            (mf - 2.0) * p * pw(x, mi - 3)
        }
    };
    let r_uuu = k * vm * p3 * (lead(u) + (1.0 - 2.0 * mf) * pw(u, 2 * mi - 3));
    let r_vvv = k * um * p3 * (lead(v) + (1.0 - 2.0 * mf) * pw(v, 2 * mi - 3));
    let r_uuv = k * pw(u, mi - 2) * pw(v, mi - 1) * p3 * (mf * p + (1.0 - 2.0 * mf) * vm);
    let r_uvv = k * pw(v, mi - 2) * pw(u, mi - 1) * p3 * (mf * p + (1.0 - 2.0 * mf) * um);
    LDerivs {
        l: u + v + r,
        l1: 1.0 + r_u,
        l2: 1.0 + r_v,
        l11: r_uu,
        l12: r_uv,
        l22: r_vv,
        l111: r_uuu,
        l112: r_uuv,
        l122: r_uvv,
        l222: r_vvv,
    }
}

/// Outcome of the convexity scan over `0 ≤ s ≤ b ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    /// Grid minimum of the φ- and ψ-margins.
    pub min_margin: f64,
    /// `(s, b)` where the minimum is attained.
    pub argmin: (f64, f64),
    /// Which profile attains the minimum.
    pub argmin_profile: Target,
    /// Largest deviation between the φ- and ψ-forms of
    /// `f − s f′ + (1−s²) f″` at `s` and `√(1−s²)`.
    pub identity_residual: f64,
    pub grid_size: usize,
}

pub const IDENTITY_TOL: f64 = 1e-10;

/// Check the convexity inequalities for φ and ψ on a triangular grid.
pub fn validate_generating(family: &GeneratingFamily, grid_size: usize) -> Result<ValidityReport> {
    if grid_size < 3 {
        return Err(Error::OutOfRange(format!("grid size {grid_size} < 3")));
    }
    let step = 1.0 / (grid_size - 1) as f64;
    let pts: Vec<f64> = (0..grid_size).map(|i| i as f64 * step).collect();
    let phis: Vec<Profile> = pts.iter().map(|&s| family.phi(s)).collect();
    let psis: Vec<Profile> = pts.iter().map(|&s| family.psi(s)).collect();

    for (s, p) in pts.iter().zip(phis.iter().chain(psis.iter())) {
        if !p.value.is_finite() || !p.d1.is_finite() || !p.d2.is_finite() {
            return Err(Error::DerivativesUnavailable {
                at: format!("s={s}"),
            });
        }
    }
    for (i, s) in pts.iter().enumerate() {
        let d = family.l_derivs(1.0 - s * s, s * s);
        if !d.all_finite() {
            return Err(Error::DerivativesUnavailable {
                at: format!("(u,v)=({},{})", 1.0 - s * s, s * s),
            });
        }
        if phis[i].value <= 0.0 {
            return Err(Error::NonPositiveProfile { at: *s });
        }
        if psis[i].value <= 0.0 {
            return Err(Error::NonPositiveProfile {
                at: (1.0 - s * s).max(0.0).sqrt(),
            });
        }
    }

    let mut min_margin = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    let mut argmin_profile = Target::Phi;
    for (which, profiles) in [(Target::Phi, &phis), (Target::Psi, &psis)] {
        for (i, p) in profiles.iter().enumerate() {
            for &b in &pts[i..] {
                let m = p.margin(pts[i], b);
                if m < min_margin {
                    min_margin = m;
                    argmin = (pts[i], b);
                    argmin_profile = which;
                }
            }
        }
    }

    let mut identity_residual: f64 = 0.0;
    for &s in &pts {
        let sb = (1.0 - s * s).max(0.0).sqrt();
        let lhs = family.phi(s).margin(s, 1.0);
        let rhs = family.psi(sb).margin(sb, 1.0);
        identity_residual = identity_residual.max((lhs - rhs).abs());
    }

    Ok(ValidityReport {
        valid: min_margin > 0.0 && identity_residual <= IDENTITY_TOL,
        min_margin,
        argmin,
        argmin_profile,
        identity_residual,
        grid_size,
    })
}

/// The three principal curvatures of the indicatrix at parameter `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrincipalCurvatures {
    /// Along the `s`-curve.
    pub kappa_s: f64,
    /// Multiplicity `n₁ − 1`.
    pub kappa_u: f64,
    /// Multiplicity `n₂ − 1`.
    pub kappa_v: f64,
}

pub fn principal_curvatures(family: &GeneratingFamily, s: f64) -> Result<PrincipalCurvatures> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfRange(format!("s = {s} outside [0,1]")));
    }
    let p = family.phi(s);
    let q = 1.0 - s * s;
    let w = q * p.d1 * p.d1 / (p.value * p.value) + 1.0;
    let kappa_s = p.margin(s, 1.0) / w.powf(1.5);
    let kappa_u = (p.value - s * p.d1) / w.sqrt();
    let sb = q.max(0.0).sqrt();
    let r = family.psi(sb);
    let wb = (1.0 - sb * sb) * r.d1 * r.d1 / (r.value * r.value) + 1.0;
    let kappa_v = (r.value - sb * r.d1) / wb.sqrt();
    Ok(PrincipalCurvatures {
        kappa_s,
        kappa_u,
        kappa_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn fam(s: &str) -> GeneratingFamily {
        GeneratingFamily::parse(s).unwrap()
    }

    #[test]
    fn spec_parsing() {
        assert!(
            matches!(fam("riemannian:1,2").kind(), FamilyKind::Riemannian { c1, c2 } if *c1 == 1.0 && *c2 == 2.0)
        );
        assert!(matches!(fam("mroot:3").kind(), FamilyKind::MRoot { m: 3 }));
        assert!(GeneratingFamily::parse("mroot:1").is_err());
        assert!(GeneratingFamily::parse("mroot:x").is_err());
        assert!(GeneratingFamily::parse("riemannian:1").is_err());
        assert!(GeneratingFamily::parse("riemannian:1,-2").is_err());
        assert!(GeneratingFamily::parse("bogus:1").is_err());
        assert!(GeneratingFamily::parse("phi1").is_err());
        assert!(matches!(
            GeneratingFamily::parse("phi:u+s"),
            Err(Error::UnknownVariable { .. })
        ));
        assert!(matches!(
            GeneratingFamily::parse("L:u+s"),
            Err(Error::UnknownVariable { .. })
        ));
    }

    #[test]
    fn spec_string_round_trips() {
        for s in [
            "riemannian:1,2.5",
            "mroot:3",
            "phi:1-0.9*s^2",
            "L:u+v+sqrt(u^2+v^2)",
            "psi:sqrt(2-s^2)",
        ] {
            let f = fam(s);
            let g = fam(&f.spec());
            assert_eq!(f, g, "{s}");
        }
    }

    #[test]
    fn mroot_derivatives_match_symbolic() {
        for m in 2..=5 {
            let named = GeneratingFamily::mroot(m).unwrap();
            let sym = named.convert(Target::L).unwrap();
            for &(u, v) in &[(0.3, 0.7), (1.0, 0.0), (0.0, 1.0), (2.0, 0.25), (1e-3, 1.0)] {
                let a = named.l_derivs(u, v);
                let b = sym.l_derivs(u, v);
                let pairs = [
                    (a.l, b.l),
                    (a.l1, b.l1),
                    (a.l2, b.l2),
                    (a.l11, b.l11),
                    (a.l12, b.l12),
                    (a.l22, b.l22),
                    (a.l111, b.l111),
                    (a.l112, b.l112),
                    (a.l122, b.l122),
                    (a.l222, b.l222),
                ];
                for (i, (x, y)) in pairs.iter().enumerate() {
                    if y.is_finite() {
                        assert!(
                            (x - y).abs() <= 1e-9 * (1.0 + y.abs()),
                            "m={m} ({u},{v}) #{i}: {x} vs {y}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn conversion_examples() {
        let one = fam("phi:1");
        assert_abs_diff_eq!(
            one.convert(Target::Psi).unwrap().psi(0.3).value,
            1.0,
            epsilon = 1e-15
        );
        let l = one.convert(Target::L).unwrap();
        assert_abs_diff_eq!(l.l(0.3, 0.5), 0.8, epsilon = 1e-15);

        let f = fam("phi:sqrt(1+s^2)");
        let psi = f.convert(Target::Psi).unwrap();
        let l = f.convert(Target::L).unwrap();
        for i in 0..=20 {
            let s = i as f64 / 20.0;
            assert_abs_diff_eq!(psi.psi(s).value, (2.0 - s * s).sqrt(), epsilon = 1e-14);
            assert_abs_diff_eq!(l.l(1.0 - s, s), 1.0 + s, epsilon = 1e-14);
        }
    }

    #[test]
    fn round_trip_phi_l_phi() {
        for spec in [
            "phi:sqrt(1+s^2)",
            "phi:1+0.2*s^2",
            "phi:1-0.3*s^2+0.1*s^4",
            "mroot:3",
        ] {
            let f = fam(spec);
            let back = f.convert(Target::L).unwrap().convert(Target::Phi).unwrap();
            let via_psi = f
                .convert(Target::Psi)
                .unwrap()
                .convert(Target::Phi)
                .unwrap();
            for i in 0..=100 {
                let s = i as f64 / 100.0;
                assert!(
                    (f.phi(s).value - back.phi(s).value).abs() < 1e-12,
                    "{spec} {s}"
                );
                assert!(
                    (f.phi(s).value - via_psi.phi(s).value).abs() < 1e-12,
                    "{spec} {s}"
                );
            }
        }
    }

    #[test]
    fn conversion_rejects_nonpositive() {
        let f = fam("phi:1-2*s^2");
        assert!(matches!(
            f.convert(Target::L),
            Err(Error::NonPositiveProfile { .. })
        ));
    }

    #[test]
    fn validation_examples() {
        let r = validate_generating(&fam("phi:1"), 201).unwrap();
        assert!(r.valid);
        assert_abs_diff_eq!(r.min_margin, 1.0, epsilon = 1e-14);

        let r = validate_generating(&fam("phi:sqrt(1+s^2)"), 201).unwrap();
        assert!(r.valid);
        assert_abs_diff_eq!(r.min_margin, 2.0 / 2f64.powf(1.5), epsilon = 1e-12);

        let r = validate_generating(&fam("phi:1-0.9*s^2"), 201).unwrap();
        assert!(!r.valid);
        assert_abs_diff_eq!(r.min_margin, -0.8, epsilon = 1e-12);
        assert_eq!(r.argmin, (0.0, 1.0));

        for m in [2, 3] {
            let r = validate_generating(&GeneratingFamily::mroot(m).unwrap(), 201).unwrap();
            assert!(r.valid, "m={m}");
            assert!(r.identity_residual < 1e-10);
        }

        assert!(matches!(
            validate_generating(&fam("phi:1-2*s^2"), 51),
            Err(Error::NonPositiveProfile { .. })
        ));
        assert!(validate_generating(&fam("phi:1"), 2).is_err());
    }

    #[test]
    fn non_smooth_profile_reports_missing_derivatives() {
        assert!(matches!(
            validate_generating(&fam("L:u+v+sqrt(u*v)"), 21),
            Err(Error::DerivativesUnavailable { .. })
        ));
    }

    #[test]
    fn normalization_of_mroot2() {
        let f = GeneratingFamily::mroot(2).unwrap();
        let (p0, p1) = f.endpoint_squares().unwrap();
        assert_abs_diff_eq!(p0, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p1, 2.0, epsilon = 1e-15);
        let n = f.normalized().unwrap();
        assert!(n.is_normalized(1e-14));
        for &(u, v) in &[(0.3f64, 0.9f64), (1.0, 0.0), (2.0, 5.0)] {
            let want = (u + v) / 2.0 + (u * u + v * v).sqrt() / 2.0;
            assert_abs_diff_eq!(n.l(u, v), want, epsilon = 1e-14);
        }
        assert_eq!(n.normalized().unwrap().scale(), n.scale());
        assert!(fam("phi:-1+s^2").normalized().is_err());
    }

    #[test]
    fn principal_curvature_examples() {
        let k = principal_curvatures(&fam("phi:1"), 0.4).unwrap();
        assert_abs_diff_eq!(k.kappa_s, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.kappa_u, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.kappa_v, 1.0, epsilon = 1e-15);
        let k = principal_curvatures(&fam("phi:sqrt(1+s^2)"), 0.0).unwrap();
        assert_abs_diff_eq!(k.kappa_s, 2.0, epsilon = 1e-14);
        let f = GeneratingFamily::mroot(2).unwrap();
        for i in 0..=100 {
            let k = principal_curvatures(&f, i as f64 / 100.0).unwrap();
            assert!(k.kappa_s > 0.0 && k.kappa_u > 0.0 && k.kappa_v > 0.0);
        }
        assert!(principal_curvatures(&f, 1.5).is_err());
    }

    #[test]
    fn euler_identities_for_registered_families() {
        for spec in [
            "riemannian:1,2",
            "mroot:2",
            "mroot:3",
            "mroot:4",
            "phi:sqrt(1+s^2)",
            "phi:1+0.2*s^2",
            "psi:sqrt(2-s^2)",
            "L:u+v+sqrt(u^2+v^2)",
        ] {
            let f = fam(spec);
            assert!(
                f.euler_residual(51) < 1e-10,
                "{spec}: {}",
                f.euler_residual(51)
            );
            assert!(f.normalized().unwrap().euler_residual(51) < 1e-10, "{spec}");
        }
    }

    proptest! {
        #[test]
        fn phi_psi_relation(s in 0.0f64..=1.0, m in 2u32..6) {
            let f = GeneratingFamily::mroot(m).unwrap();
            let sb = (1.0 - s * s).sqrt();
            prop_assert!((f.phi(s).value - f.psi(sb).value).abs() < 1e-13);
        }

        #[test]
        fn quadratic_phi_identity_nine(c in -0.3f64..0.6, s in 0.0f64..=1.0) {
            let f = GeneratingFamily::new(FamilyKind::Phi(
                Expr::parse(&format!("1+{c}*s^2")).unwrap(),
            )).unwrap();
            let sb = (1.0 - s * s).sqrt();
            let lhs = f.phi(s).margin(s, 1.0);
            let rhs = f.psi(sb).margin(sb, 1.0);
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }
}
