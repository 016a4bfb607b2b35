//! Exact arithmetic in Q(sqrt 2, sqrt 7).

use alloc::string::ToString;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeTuple, Serializer};

/// `a + b sqrt2 + c sqrt7 + d sqrt14` with rational coefficients.
///
/// `{1, sqrt2, sqrt7, sqrt14}` is a basis over Q, so equality is
/// coefficient-wise and the value is rational exactly when `b = c = d = 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadNum {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivisionByZero;

impl fmt::Display for DivisionByZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("division by zero")
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// An element `x + y sqrt2` of Q(sqrt 2).
#[derive(Clone)]
struct Q2(BigRational, BigRational);

impl Q2 {
    fn mul(&self, o: &Q2) -> Q2 {
        let two = rat(2, 1);
        Q2(&self.0 * &o.0 + two * &self.1 * &o.1, &self.0 * &o.1 + &self.1 * &o.0)
    }

    fn add(&self, o: &Q2) -> Q2 {
        Q2(&self.0 + &o.0, &self.1 + &o.1)
    }

    fn sub(&self, o: &Q2) -> Q2 {
        Q2(&self.0 - &o.0, &self.1 - &o.1)
    }

    fn scale(&self, k: &BigRational) -> Q2 {
        Q2(&self.0 * k, &self.1 * k)
    }

    fn neg(&self) -> Q2 {
        Q2(-&self.0, -&self.1)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero() && self.1.is_zero()
    }

    fn inv(&self) -> Q2 {
        // (x - y sqrt2) / (x^2 - 2 y^2); the norm is nonzero for nonzero input.
        let n = &self.0 * &self.0 - rat(2, 1) * &self.1 * &self.1;
        Q2(&self.0 / &n, -&self.1 / &n)
    }
}

impl QuadNum {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        QuadNum { a, b, c, d }
    }

    /// Coefficients given as `(numerator, denominator)` pairs.
    pub fn from_pairs(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Self {
        QuadNum::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(d.0, d.1))
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n, 1))
    }

    pub fn from_rational(q: BigRational) -> Self {
        QuadNum::new(q, BigRational::zero(), BigRational::zero(), BigRational::zero())
    }

    pub fn sqrt2() -> Self {
        Self::from_pairs((0, 1), (1, 1), (0, 1), (0, 1))
    }

    pub fn sqrt7() -> Self {
        Self::from_pairs((0, 1), (0, 1), (1, 1), (0, 1))
    }

    pub fn sqrt14() -> Self {
        Self::from_pairs((0, 1), (0, 1), (0, 1), (1, 1))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.is_rational()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        QuadNum::new(&self.a * k, &self.b * k, &self.c * k, &self.d * k)
    }

    fn split(&self) -> (Q2, Q2) {
        (Q2(self.a.clone(), self.b.clone()), Q2(self.c.clone(), self.d.clone()))
    }

    fn join(p: Q2, q: Q2) -> Self {
        QuadNum::new(p.0, p.1, q.0, q.1)
    }

    pub fn checked_div(&self, other: &QuadNum) -> Result<QuadNum, DivisionByZero> {
        Ok(self * &other.inv()?)
    }

    /// Multiplicative inverse, rationalising `p + q sqrt7` by its conjugate.
    pub fn inv(&self) -> Result<QuadNum, DivisionByZero> {
        if self.is_zero() {
            return Err(DivisionByZero);
        }
        let (p, q) = self.split();
        let norm = p.mul(&p).sub(&q.mul(&q).scale(&rat(7, 1)));
        debug_assert!(!norm.is_zero());
        let n_inv = norm.inv();
        Ok(QuadNum::join(p.mul(&n_inv), q.neg().mul(&n_inv)))
    }

    /// Exact sign.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        integer_sign(&common_denominator(self).1)
    }

    pub fn cmp_exact(&self, other: &QuadNum) -> Ordering {
        match (self - other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    pub fn abs(&self) -> QuadNum {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Nearest-ish double, from a 128-bit enclosure.
    pub fn to_f64(&self) -> f64 {
        let scale = 128u32;
        let (lo, _) = enclosure(self, scale);
        let num = lo.to_f64().unwrap_or(f64::NAN);
        num / libm::pow(2.0, scale as f64)
    }
}

/// `(den, [n0, n1, n2, n3])` with `u = (n0 + n1 sqrt2 + n2 sqrt7 + n3 sqrt14) / den`.
fn common_denominator(u: &QuadNum) -> (BigInt, [BigInt; 4]) {
    let coefs = [&u.a, &u.b, &u.c, &u.d];
    let den = coefs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints = coefs.map(|q| q.numer() * (&den / q.denom()));
    (den, ints)
}

/// Sign of `n0 + n1 sqrt2 + n2 sqrt7 + n3 sqrt14` for integers, not all zero.
fn integer_sign(n: &[BigInt; 4]) -> i8 {
    let mut bits = 64u32;
    loop {
        let (lo, hi) = integer_enclosure(n, bits);
        if lo.is_positive() {
            return 1;
        }
        if hi.is_negative() {
            return -1;
        }
        bits *= 2;
    }
}

/// Floor and ceiling of `sqrt(m) * 2^bits`.
fn scaled_sqrt(m: u32, bits: u32) -> (BigInt, BigInt) {
    let target = BigInt::from(m) << (2 * bits);
    let lo = target.sqrt();
    let hi = if &lo * &lo == target { lo.clone() } else { &lo + 1 };
    (lo, hi)
}

/// Integer bounds on `2^bits * (n0 + n1 sqrt2 + n2 sqrt7 + n3 sqrt14)`.
fn integer_enclosure(n: &[BigInt; 4], bits: u32) -> (BigInt, BigInt) {
    let base = &n[0] << bits;
    let mut lo = base.clone();
    let mut hi = base;
    for (coef, m) in n[1..].iter().zip([2u32, 7, 14]) {
        if coef.is_zero() {
            continue;
        }
        let (s_lo, s_hi) = scaled_sqrt(m, bits);
        if coef.sign() == Sign::Plus {
            lo += coef * &s_lo;
            hi += coef * &s_hi;
        } else {
            lo += coef * &s_hi;
            hi += coef * &s_lo;
        }
    }
    (lo, hi)
}

/// Bounds on `2^bits * u` as integers, rounding outward.
fn enclosure(u: &QuadNum, bits: u32) -> (BigInt, BigInt) {
    let (den, ints) = common_denominator(u);
    let (lo, hi) = integer_enclosure(&ints, bits);
    (lo.div_floor(&den), hi.div_ceil(&den))
}

impl PartialOrd for QuadNum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadNum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl<'a> Add<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn add(self, o: &QuadNum) -> QuadNum {
        QuadNum::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }
}

impl<'a> Sub<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn sub(self, o: &QuadNum) -> QuadNum {
        QuadNum::new(&self.a - &o.a, &self.b - &o.b, &self.c - &o.c, &self.d - &o.d)
    }
}

impl<'a> Mul<&'a QuadNum> for &'a QuadNum {
    type Output = QuadNum;
    fn mul(self, o: &QuadNum) -> QuadNum {
        let (p1, q1) = self.split();
        let (p2, q2) = o.split();
        let p = p1.mul(&p2).add(&q1.mul(&q2).scale(&rat(7, 1)));
        let q = p1.mul(&q2).add(&q1.mul(&p2));
        QuadNum::join(p, q)
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::new(-&self.a, -&self.b, -&self.c, -&self.d)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for QuadNum {
            type Output = QuadNum;
            fn $m(self, o: QuadNum) -> QuadNum {
                (&self).$m(&o)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -&self
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (q, unit) in [(&self.a, ""), (&self.b, "√2"), (&self.c, "√7"), (&self.d, "√14")] {
            if q.is_zero() {
                continue;
            }
            let text = q.to_string();
            if wrote {
                if q.is_negative() {
                    write!(f, " - {}", (-q))?;
                } else {
                    write!(f, " + {text}")?;
                }
            } else {
                f.write_str(&text)?;
            }
            if !unit.is_empty() {
                write!(f, "·{unit}")?;
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}

struct Fraction<'a>(&'a BigRational);

struct Int<'a>(&'a BigInt);

impl Serialize for Int<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl Serialize for Fraction<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&Int(self.0.numer()))?;
        t.serialize_element(&Int(self.0.denom()))?;
        t.end()
    }
}

/// Serialises as `[[a_num, a_den], [b_num, b_den], [c_num, c_den], [d_num, d_den]]`;
/// integers too large for 64 bits are written as decimal strings.
impl Serialize for QuadNum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(4)?;
        for q in [&self.a, &self.b, &self.c, &self.d] {
            t.serialize_element(&Fraction(q))?;
        }
        t.end()
    }
}
