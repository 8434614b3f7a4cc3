//! Exact arithmetic in the real quadratic field `Q[λ]`.
//!
//! `λ` is the expanding root of `x² − T x + D` with `D = ±1`, so every
//! element is stored as `p + qλ` with arbitrary-precision rationals and
//! products are reduced with `λ² = Tλ − D`. Ordering is decided exactly:
//! writing `λ = (T + ε√Δ)/2` the value becomes `A + B√Δ` and the sign
//! follows from one comparison of `A²` against `B²Δ`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Rational = BigRational;

/// Builds a rational from a small numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `"p"`, `"p/q"` (with optional sign and whitespace).
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Canonical `num/den` rendering used by every JSON artifact.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to scaled integer division for huge numerators.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// The field `Q[λ]`, `λ` the expanding root of `x² − trace·x + det`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadField {
    trace: i64,
    det: i64,
}

impl QuadField {
    pub fn new(trace: i64, det: i64) -> Result<Self> {
        if det != 1 && det != -1 {
            return Err(Error::InvalidField(format!("det must be ±1, got {det}")));
        }
        let disc = trace * trace - 4 * det;
        if disc <= 0 {
            return Err(Error::InvalidField(format!(
                "x² − {trace}x + {det} has no distinct real roots"
            )));
        }
        let r = disc.isqrt();
        if r * r == disc {
            return Err(Error::InvalidField(format!(
                "x² − {trace}x + {det} splits over Q"
            )));
        }
        Ok(QuadField { trace, det })
    }

    /// The golden-ratio field, `λ = τ`.
    pub fn golden() -> Self {
        QuadField { trace: 1, det: -1 }
    }

    pub fn trace(&self) -> i64 {
        self.trace
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    pub fn discriminant(&self) -> i64 {
        self.trace * self.trace - 4 * self.det
    }

    /// `+1` when `λ = (T + √Δ)/2`, `−1` when `λ = (T − √Δ)/2`.
    fn root_sign(&self) -> i32 {
        if self.trace >= 0 {
            1
        } else {
            -1
        }
    }

    /// Sign of `a + bλ` for integers `a`, `b`: with `λ = (T + ε√Δ)/2`
    /// this is the sign of `X + Y√Δ`, `X = 2a + bT`, `Y = εb`.
    fn sign_of_parts(&self, a: &BigInt, b: &BigInt) -> i32 {
        let sa = bigint_sign(a);
        let sb = bigint_sign(b) * self.root_sign();
        // λ has the sign of the root choice.
        if sb == 0 || sa == sb {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        let x: BigInt = a * 2 + b * self.trace;
        let y2: BigInt = b * b * self.discriminant();
        let sx = bigint_sign(&x);
        if sx == 0 || sx == sb {
            return sb;
        }
        match (&x * &x).cmp(&y2) {
            Ordering::Greater => sx,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("discriminant is not a square"),
        }
    }

    pub fn lambda_f64(&self) -> f64 {
        let s = (self.discriminant() as f64).sqrt();
        (self.trace as f64 + self.root_sign() as f64 * s) / 2.0
    }

    pub fn lambda(&self) -> QfNum {
        QfNum::from_parts(Rational::zero(), Rational::one(), *self)
    }

    /// The contracting root `T − λ = D/λ`.
    pub fn contracting(&self) -> QfNum {
        self.lambda().conjugate()
    }

    pub fn zero(&self) -> QfNum {
        QfNum::from_parts(Rational::zero(), Rational::zero(), *self)
    }

    pub fn one(&self) -> QfNum {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> QfNum {
        QfNum::from_parts(rat_int(n), Rational::zero(), *self)
    }

    pub fn rational(&self, r: Rational) -> QfNum {
        QfNum::from_parts(r, Rational::zero(), *self)
    }

    pub fn element(&self, p: Rational, q: Rational) -> QfNum {
        QfNum::from_parts(p, q, *self)
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[λ], λ² = {}λ {} {}", self.trace, if self.det < 0 { "+" } else { "−" }, 1)
    }
}

/// An element `p + qλ` of a quadratic field.
#[derive(Clone, Debug)]
pub struct QfNum {
    p: Rational,
    q: Rational,
    field: QuadField,
}

impl QfNum {
    pub fn from_parts(p: Rational, q: Rational, field: QuadField) -> Self {
        QfNum { p, q, field }
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    /// Membership in `Z[λ]`.
    pub fn is_integral(&self) -> bool {
        self.p.is_integer() && self.q.is_integer()
    }

    pub fn conjugate(&self) -> QfNum {
        let t = rat_int(self.field.trace);
        QfNum::from_parts(&self.p + &self.q * t, -self.q.clone(), self.field)
    }

    /// `x · conj(x)`.
    pub fn norm(&self) -> Rational {
        let t = rat_int(self.field.trace);
        let d = rat_int(self.field.det);
        &self.p * &self.p + &self.p * &self.q * t + &self.q * &self.q * d
    }

    /// `x + conj(x)`.
    pub fn trace(&self) -> Rational {
        rat_int(2) * &self.p + &self.q * rat_int(self.field.trace)
    }

    /// Exact sign of the real number `p + qλ`.
    pub fn signum(&self) -> i32 {
        // Scaling by the positive denominators keeps the sign.
        let (pn, pd) = (self.p.numer(), self.p.denom());
        let (qn, qd) = (self.q.numer(), self.q.denom());
        self.field.sign_of_parts(&(pn * qd), &(qn * pd))
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> QfNum {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.p) + rational_to_f64(&self.q) * self.field.lambda_f64()
    }

    /// Largest integer `n` with `n ≤ self`.
    pub fn floor(&self) -> BigInt {
        let est = self.to_f64().floor();
        let mut n = if est.is_finite() {
            BigInt::from(est as i64)
        } else {
            // Exact fallback: bound by the rational parts.
            (&self.p + &self.q * rat_int(self.field.trace.abs() + 1)).floor().to_integer()
        };
        loop {
            let nq = self.field.rational(BigRational::from_integer(n.clone()));
            if nq > *self {
                n -= 1;
                continue;
            }
            let next = self.field.rational(BigRational::from_integer(&n + 1));
            if next <= *self {
                n += 1;
                continue;
            }
            return n;
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    pub fn recip(&self) -> Result<QfNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conjugate();
        Ok(QfNum::from_parts(c.p / &n, c.q / &n, self.field))
    }

    fn same_field(&self, other: &QfNum) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field, other.field))
        }
    }

    pub fn checked_add(&self, other: &QfNum) -> Result<QfNum> {
        self.same_field(other)?;
        Ok(QfNum::from_parts(&self.p + &other.p, &self.q + &other.q, self.field))
    }

    pub fn checked_sub(&self, other: &QfNum) -> Result<QfNum> {
        self.same_field(other)?;
        Ok(QfNum::from_parts(&self.p - &other.p, &self.q - &other.q, self.field))
    }

    pub fn checked_mul(&self, other: &QfNum) -> Result<QfNum> {
        self.same_field(other)?;
        let t = rat_int(self.field.trace);
        let d = rat_int(self.field.det);
        let qq = &self.q * &other.q;
        let p = &self.p * &other.p - &qq * d;
        let q = &self.p * &other.q + &self.q * &other.p + qq * t;
        Ok(QfNum::from_parts(p, q, self.field))
    }

    pub fn checked_div(&self, other: &QfNum) -> Result<QfNum> {
        self.same_field(other)?;
        self.checked_mul(&other.recip()?)
    }

    pub fn scale(&self, r: &Rational) -> QfNum {
        QfNum::from_parts(&self.p * r, &self.q * r, self.field)
    }

    pub fn add_rational(&self, r: &Rational) -> QfNum {
        QfNum::from_parts(&self.p + r, self.q.clone(), self.field)
    }

    pub fn pow(&self, n: u32) -> QfNum {
        let mut acc = self.field.one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_repr(&self) -> QfRepr {
        QfRepr { p: format_rational(&self.p), q: format_rational(&self.q) }
    }

    pub fn from_repr(repr: &QfRepr, field: QuadField) -> Result<QfNum> {
        Ok(QfNum::from_parts(parse_rational(&repr.p)?, parse_rational(&repr.q)?, field))
    }
}

fn bigint_sign(n: &BigInt) -> i32 {
    match n.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}

/// JSON form of a field element: `{"p": "num/den", "q": "num/den"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QfRepr {
    pub p: String,
    pub q: String,
}

impl Serialize for QfNum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(serializer)
    }
}

impl PartialEq for QfNum {
    fn eq(&self, other: &Self) -> bool {
        assert_eq!(self.field, other.field, "comparing elements of different fields");
        self.p == other.p && self.q == other.q
    }
}

impl Eq for QfNum {}

impl Hash for QfNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.q.hash(state);
    }
}

impl PartialOrd for QfNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QfNum {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.field, other.field, "comparison across fields");
        if self.q == other.q {
            return self.p.cmp(&other.p);
        }
        // (p₁ − p₂) + (q₁ − q₂)λ over the common denominator of each part.
        let (p1, p2, q1, q2) = (&self.p, &other.p, &self.q, &other.q);
        let (pn, pd) = (p1.numer() * p2.denom() - p2.numer() * p1.denom(), p1.denom() * p2.denom());
        let (qn, qd) = (q1.numer() * q2.denom() - q2.numer() * q1.denom(), q1.denom() * q2.denom());
        match self.field.sign_of_parts(&(pn * &qd), &(qn * pd)) {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }
}

impl fmt::Display for QfNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", self.p);
        }
        let q = if self.q.is_one() {
            String::new()
        } else if self.q == -Rational::one() {
            "-".to_string()
        } else {
            self.q.to_string()
        };
        if self.p.is_zero() {
            write!(f, "{q}λ")
        } else if self.q.is_negative() {
            let qa = -self.q.clone();
            let qa = if qa.is_one() { String::new() } else { qa.to_string() };
            write!(f, "{} - {qa}λ", self.p)
        } else {
            write!(f, "{} + {q}λ", self.p)
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a, 'b> $tr<&'b QfNum> for &'a QfNum {
            type Output = QfNum;
            fn $m(self, rhs: &'b QfNum) -> QfNum {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<QfNum> for QfNum {
            type Output = QfNum;
            fn $m(self, rhs: QfNum) -> QfNum {
                (&self).$m(&rhs)
            }
        }
        impl<'b> $tr<&'b QfNum> for QfNum {
            type Output = QfNum;
            fn $m(self, rhs: &'b QfNum) -> QfNum {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<QfNum> for &'a QfNum {
            type Output = QfNum;
            fn $m(self, rhs: QfNum) -> QfNum {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &QfNum {
    type Output = QfNum;
    fn neg(self) -> QfNum {
        QfNum::from_parts(-self.p.clone(), -self.q.clone(), self.field)
    }
}

impl Neg for QfNum {
    type Output = QfNum;
    fn neg(self) -> QfNum {
        QfNum::from_parts(-self.p, -self.q, self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> QuadField {
        QuadField::golden()
    }

    #[test]
    fn lambda_squared_reduces() {
        let l = fib().lambda();
        assert_eq!(&l * &l, fib().element(rat_int(1), rat_int(1)));
    }

    #[test]
    fn product_of_one_plus_and_one_minus_lambda() {
        let f = fib();
        let x = f.element(rat_int(1), rat_int(1));
        let y = f.element(rat_int(1), rat_int(-1));
        let prod = &x * &y;
        assert_eq!(prod, -f.lambda());
        let approx = x.to_f64() * y.to_f64();
        assert!((prod.to_f64() - approx).abs() < 1e-12);
    }

    #[test]
    fn additive_identity() {
        let f = fib();
        let x = f.element(rat(3, 7), rat(-2, 5));
        assert_eq!(&x + &f.zero(), x);
    }

    #[test]
    fn signs_near_golden_ratio() {
        let f = fib();
        assert_eq!(f.zero().signum(), 0);
        assert_eq!(f.element(rat_int(1), rat_int(-1)).signum(), -1);
        assert_eq!(f.element(rat_int(2), rat_int(-1)).signum(), 1);
    }

    #[test]
    fn integrality() {
        let f = fib();
        assert!(f.element(rat_int(1), rat_int(2)).is_integral());
        assert!(!f.rational(rat(1, 2)).is_integral());
        // τ⁻¹/2 = (λ − 1)/2
        assert!(!f.element(rat(-1, 2), rat(1, 2)).is_integral());
    }

    #[test]
    fn conjugation() {
        let f = fib();
        assert_eq!(f.lambda().conjugate(), f.element(rat_int(1), rat_int(-1)));
        assert_eq!(f.rational(rat(5, 3)).conjugate(), f.rational(rat(5, 3)));
        assert_eq!(&f.lambda() * &f.lambda().conjugate(), f.int(-1));
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        let f = fib();
        let g = QuadField::new(3, 1).unwrap();
        assert!(matches!(f.one().checked_div(&f.zero()), Err(Error::DivisionByZero)));
        assert!(matches!(f.one().checked_add(&g.one()), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn invalid_fields_rejected() {
        assert!(QuadField::new(2, 1).is_err());
        assert!(QuadField::new(0, -1).is_err());
        assert!(QuadField::new(3, 2).is_err());
        assert!(QuadField::new(-3, 1).is_ok());
    }

    #[test]
    fn negative_trace_picks_expanding_root() {
        let f = QuadField::new(-1, -1).unwrap();
        assert!(f.lambda().is_negative());
        assert!(f.lambda().abs().to_f64() > 1.0);
        assert!(f.contracting().abs().to_f64() < 1.0);
    }

    #[test]
    fn floor_and_ceil() {
        let f = fib();
        assert_eq!(f.lambda().floor(), BigInt::from(1));
        assert_eq!((-f.lambda()).floor(), BigInt::from(-2));
        assert_eq!(f.int(3).floor(), BigInt::from(3));
        assert_eq!(f.lambda().ceil(), BigInt::from(2));
    }

    #[test]
    fn repr_round_trip() {
        let f = QuadField::new(3, 1).unwrap();
        let x = f.element(rat(-7, 3), rat(2, 9));
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"p":"-7/3","q":"2/9"}"#);
        let back: QfRepr = serde_json::from_str(&json).unwrap();
        assert_eq!(QfNum::from_repr(&back, f).unwrap(), x);
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 4 ").unwrap(), rat_int(4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
