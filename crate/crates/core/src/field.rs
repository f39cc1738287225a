//! Exact arithmetic in the biquadratic field Q(√2, √3).
//!
//! Every element is stored as `a + b√2 + c√3 + d√6` with rational
//! coefficients. Since `{1, √2, √3, √6}` is a Q-basis, an element is zero
//! exactly when all four coefficients are zero, so orthogonality tests on
//! root vectors never need a tolerance.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Element of Q(√2, √3).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Quad {
    /// Coefficients of `1, √2, √3, √6`.
    coef: [BigRational; 4],
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Quad {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Self { coef: [a, b, c, d] }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_rational(q: BigRational) -> Self {
        Self::new(
            q,
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        )
    }

    /// `q·√2`
    pub fn sqrt2_times(q: BigRational) -> Self {
        Self::new(
            BigRational::zero(),
            q,
            BigRational::zero(),
            BigRational::zero(),
        )
    }

    /// `q·√3`
    pub fn sqrt3_times(q: BigRational) -> Self {
        Self::new(
            BigRational::zero(),
            BigRational::zero(),
            q,
            BigRational::zero(),
        )
    }

    pub fn coefficients(&self) -> &[BigRational; 4] {
        &self.coef
    }

    pub fn is_zero(&self) -> bool {
        self.coef.iter().all(Zero::is_zero)
    }

    /// The rational value, if the irrational parts vanish.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coef[1..].iter().all(Zero::is_zero) {
            Some(&self.coef[0])
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        let w = [1.0, 2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt()];
        self.coef
            .iter()
            .zip(w)
            .map(|(c, w)| c.to_f64().unwrap_or(f64::NAN) * w)
            .sum()
    }

    /// Conjugate under `√2 ↦ −√2`.
    fn conj2(&self) -> Self {
        let [a, b, c, d] = &self.coef;
        Self::new(a.clone(), -b.clone(), c.clone(), -d.clone())
    }

    /// Conjugate under `√3 ↦ −√3`.
    fn conj3(&self) -> Self {
        let [a, b, c, d] = &self.coef;
        Self::new(a.clone(), b.clone(), -c.clone(), -d.clone())
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // x·σ₂(x) lies in Q(√3); multiplying by its √3-conjugate lands in Q.
        let c2 = self.conj2();
        let p = self * &c2;
        let c3 = p.conj3();
        let norm = &p * &c3;
        let n = norm.as_rational().expect("field norm is rational").clone();
        let num = &c2 * &c3;
        Some(Self {
            coef: num.coef.map(|c| c / &n),
        })
    }
}

impl Add for &Quad {
    type Output = Quad;
    fn add(self, rhs: &Quad) -> Quad {
        Quad {
            coef: std::array::from_fn(|i| &self.coef[i] + &rhs.coef[i]),
        }
    }
}

impl Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        &self + &rhs
    }
}

impl AddAssign<&Quad> for Quad {
    fn add_assign(&mut self, rhs: &Quad) {
        for (a, b) in self.coef.iter_mut().zip(&rhs.coef) {
            *a += b;
        }
    }
}

impl Sub for &Quad {
    type Output = Quad;
    fn sub(self, rhs: &Quad) -> Quad {
        Quad {
            coef: std::array::from_fn(|i| &self.coef[i] - &rhs.coef[i]),
        }
    }
}

impl Sub for Quad {
    type Output = Quad;
    fn sub(self, rhs: Quad) -> Quad {
        &self - &rhs
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad {
            coef: self.coef.map(|c| -c),
        }
    }
}

impl Neg for &Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        -self.clone()
    }
}

impl Mul for &Quad {
    type Output = Quad;
    fn mul(self, rhs: &Quad) -> Quad {
        let [a, b, c, d] = &self.coef;
        let [e, f, g, h] = &rhs.coef;
        let two = rat(2, 1);
        let three = rat(3, 1);
        let six = rat(6, 1);
        // Products of basis elements: √2√2=2, √3√3=3, √6√6=6, √2√3=√6,
        // √2√6=2√3, √3√6=3√2.
        let one = a * e + b * f * &two + c * g * &three + d * h * &six;
        let s2 = a * f + b * e + (c * h + d * g) * &three;
        let s3 = a * g + c * e + (b * h + d * f) * &two;
        let s6 = a * h + d * e + b * g + c * f;
        Quad::new(one, s2, s3, s6)
    }
}

impl Mul for Quad {
    type Output = Quad;
    fn mul(self, rhs: Quad) -> Quad {
        &self * &rhs
    }
}

impl Zero for Quad {
    fn zero() -> Self {
        Quad::zero()
    }
    fn is_zero(&self) -> bool {
        Quad::is_zero(self)
    }
}

impl One for Quad {
    fn one() -> Self {
        Quad::one()
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["", "sqrt2", "sqrt3", "sqrt6"];
        let mut first = true;
        for (c, name) in self.coef.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            if name.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{mag}*{name}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quad({self})")
    }
}

/// Exact inner product of two coordinate vectors.
pub fn dot(x: &[Quad], y: &[Quad]) -> Quad {
    let mut acc = Quad::zero();
    for (a, b) in x.iter().zip(y) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc += &(a * b);
    }
    acc
}
