//! Exact scalars: rationals with a machine-word fast path, and elements of a
//! quadratic extension `Q(sqrt c)`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("cannot parse scalar from {0:?}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixing quadratic contexts sqrt({0}) and sqrt({1})")]
    MixedContexts(i64, i64),
    #[error("radicand {0} is not square-free or is 0/1")]
    BadRadicand(i64),
}

/// Operations the exact linear algebra needs from its coefficient domain.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn inverse(&self) -> Option<Self>;
    fn from_rational(q: Q) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

#[derive(Clone)]
enum Repr {
    Small(Ratio<i64>),
    Big(Box<BigRational>),
}

/// An exact rational number.
///
/// Values that fit into `i64/i64` are kept unboxed; arithmetic that overflows
/// promotes to arbitrary precision and demotes again when the result fits.
/// The representation is canonical, so derived comparisons are exact.
#[derive(Clone)]
pub struct Q(Repr);

impl Q {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Q(Repr::Small(Ratio::new(num, den))).canonical()
    }

    pub fn int(n: i64) -> Self {
        Q(Repr::Small(Ratio::from_integer(n)))
    }

    pub fn from_big(r: BigRational) -> Self {
        Q(Repr::Big(Box::new(r))).canonical()
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => {
                BigRational::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
            }
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.numer()),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.denom()),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.denom() == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(r) => r.numer().signum() as i32,
            Repr::Big(b) => {
                if b.is_zero() {
                    0
                } else if b.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn abs(&self) -> Q {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, mut e: u32) -> Q {
        let mut base = self.clone();
        let mut acc = Q::int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn recip(&self) -> Option<Q> {
        if Field::is_zero(self) {
            return None;
        }
        Some(match &self.0 {
            Repr::Small(r) => match r.numer().checked_abs() {
                Some(_) => Q(Repr::Small(r.recip())),
                None => Q::from_big(self.to_big().recip()),
            },
            Repr::Big(b) => Q::from_big(b.recip()),
        })
    }

    fn canonical(self) -> Self {
        match self.0 {
            Repr::Big(b) => {
                match (b.numer().to_i64(), b.denom().to_i64()) {
                    // i64::MIN is excluded so that negation and recip never overflow.
                    (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => {
                        Q(Repr::Small(Ratio::new_raw(n, d)))
                    }
                    _ => Q(Repr::Big(b)),
                }
            }
            Repr::Small(r) => {
                if *r.numer() == i64::MIN || *r.denom() == i64::MIN {
                    Q(Repr::Big(Box::new(BigRational::new(
                        BigInt::from(*r.numer()),
                        BigInt::from(*r.denom()),
                    ))))
                } else {
                    Q(Repr::Small(r))
                }
            }
        }
    }

    fn binop(
        &self,
        rhs: &Q,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl Fn(BigRational, BigRational) -> BigRational,
    ) -> Q {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(r) = small(a, b) {
                return Q(Repr::Small(r)).canonical();
            }
        }
        Q::from_big(big(self.to_big(), rhs.to_big()))
    }
}

impl Field for Q {
    fn zero() -> Self {
        Q::int(0)
    }
    fn one() -> Self {
        Q::int(1)
    }
    fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => *r.numer() == 0,
            Repr::Big(b) => b.is_zero(),
        }
    }
    fn inverse(&self) -> Option<Self> {
        self.recip()
    }
    fn from_rational(q: Q) -> Self {
        q
    }
}

impl Default for Q {
    fn default() -> Self {
        Q::int(0)
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Self {
        Q::int(n)
    }
}

impl From<i32> for Q {
    fn from(n: i32) -> Self {
        Q::int(n as i64)
    }
}

impl PartialEq for Q {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Q {}

impl Hash for Q {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(r) => {
                0u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.numer().hash(state);
                b.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => {
                let lhs = *a.numer() as i128 * *b.denom() as i128;
                let rhs = *b.numer() as i128 * *a.denom() as i128;
                lhs.cmp(&rhs)
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl<'a> Add<&'a Q> for &Q {
    type Output = Q;
    fn add(self, rhs: &'a Q) -> Q {
        self.binop(rhs, |a, b| a.checked_add(b), |a, b| a + b)
    }
}

impl<'a> Sub<&'a Q> for &Q {
    type Output = Q;
    fn sub(self, rhs: &'a Q) -> Q {
        self.binop(rhs, |a, b| a.checked_sub(b), |a, b| a - b)
    }
}

impl<'a> Mul<&'a Q> for &Q {
    type Output = Q;
    fn mul(self, rhs: &'a Q) -> Q {
        self.binop(rhs, |a, b| a.checked_mul(b), |a, b| a * b)
    }
}

impl<'a> Div<&'a Q> for &Q {
    type Output = Q;
    fn div(self, rhs: &'a Q) -> Q {
        let inv = rhs.recip().expect("division by zero");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a $ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &'a $ty) -> $ty { (&self).$m(rhs) }
        }
    )*};
}

forward_owned!(Q, Add add, Sub sub, Mul mul, Div div);

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        match self.0 {
            Repr::Small(r) => Q(Repr::Small(-r)),
            Repr::Big(b) => Q::from_big(-*b),
        }
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        -self.clone()
    }
}

impl AddAssign<&Q> for Q {
    fn add_assign(&mut self, rhs: &Q) {
        *self = &*self + rhs;
    }
}

impl AddAssign for Q {
    fn add_assign(&mut self, rhs: Q) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Q> for Q {
    fn sub_assign(&mut self, rhs: &Q) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Q> for Q {
    fn mul_assign(&mut self, rhs: &Q) {
        *self = &*self * rhs;
    }
}

impl Sum for Q {
    fn sum<I: Iterator<Item = Q>>(iter: I) -> Q {
        iter.fold(Q::int(0), |acc, x| acc + x)
    }
}

impl Product for Q {
    fn product<I: Iterator<Item = Q>>(iter: I) -> Q {
        iter.fold(Q::int(1), |acc, x| acc * x)
    }
}

impl fmt::Display for Q {
    /// Canonical `p/q` text; integers print without a denominator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || ScalarError::Parse(s.to_string());
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Q::from_big(BigRational::new(n, d)))
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Q::int(n)),
        }
    }
}

/// `n!` as an exact rational.
pub fn factorial(n: u32) -> Q {
    (1..=n as i64).map(Q::int).product()
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> Q {
    if k > n {
        return Q::int(0);
    }
    let mut acc = Q::int(1);
    for i in 0..k {
        acc = acc * Q::int((n - i) as i64) / Q::int((i + 1) as i64);
    }
    acc
}

fn is_square_free(c: i64) -> bool {
    if c == 0 || c == 1 {
        return false;
    }
    let mut n = c.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        if n.is_multiple_of(p) {
            n /= p;
        }
        p += 1;
    }
    true
}

/// An element `p + q*sqrt(c)` of `Q(sqrt c)`.
///
/// Elements with `q = 0` carry no context and combine with any field;
/// combining two irrational elements over different radicands panics in the
/// operator impls and is reported by the `checked_*` methods.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadScalar {
    rational: Q,
    surd: Q,
    radicand: i64,
}

impl QuadScalar {
    pub fn new(rational: Q, surd: Q, radicand: i64) -> Result<Self, ScalarError> {
        if !is_square_free(radicand) {
            return Err(ScalarError::BadRadicand(radicand));
        }
        Ok(QuadScalar {
            rational,
            surd,
            radicand,
        }
        .normalized())
    }

    pub fn rational(q: Q) -> Self {
        QuadScalar {
            rational: q,
            surd: Q::int(0),
            radicand: 0,
        }
    }

    /// `sqrt(c)` itself.
    pub fn sqrt_of(radicand: i64) -> Result<Self, ScalarError> {
        Self::new(Q::int(0), Q::int(1), radicand)
    }

    pub fn parts(&self) -> (&Q, &Q) {
        (&self.rational, &self.surd)
    }

    /// The radicand if the element is irrational.
    pub fn context(&self) -> Option<i64> {
        (self.radicand != 0).then_some(self.radicand)
    }

    fn normalized(mut self) -> Self {
        if Field::is_zero(&self.surd) {
            self.radicand = 0;
        }
        self
    }

    fn joint_context(&self, other: &Self) -> Result<i64, ScalarError> {
        match (self.radicand, other.radicand) {
            (0, c) | (c, 0) => Ok(c),
            (a, b) if a == b => Ok(a),
            (a, b) => Err(ScalarError::MixedContexts(a, b)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ScalarError> {
        let c = self.joint_context(other)?;
        Ok(QuadScalar {
            rational: &self.rational + &other.rational,
            surd: &self.surd + &other.surd,
            radicand: c,
        }
        .normalized())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ScalarError> {
        let c = self.joint_context(other)?;
        let cq = Q::int(c);
        Ok(QuadScalar {
            rational: &self.rational * &other.rational + &self.surd * &other.surd * &cq,
            surd: &self.rational * &other.surd + &self.surd * &other.rational,
            radicand: c,
        }
        .normalized())
    }

    /// Galois conjugate `p - q*sqrt(c)`.
    pub fn conjugate(&self) -> Self {
        QuadScalar {
            rational: self.rational.clone(),
            surd: -&self.surd,
            radicand: self.radicand,
        }
    }

    /// Field norm `p^2 - c q^2`.
    pub fn norm(&self) -> Q {
        &self.rational * &self.rational - &self.surd * &self.surd * &Q::int(self.radicand)
    }

    pub fn checked_inverse(&self) -> Result<Self, ScalarError> {
        let n = self.norm();
        let inv = n.recip().ok_or(ScalarError::DivisionByZero)?;
        let conj = self.conjugate();
        Ok(QuadScalar {
            rational: &conj.rational * &inv,
            surd: &conj.surd * &inv,
            radicand: self.radicand,
        }
        .normalized())
    }
}

impl Field for QuadScalar {
    fn zero() -> Self {
        QuadScalar::rational(Q::int(0))
    }
    fn one() -> Self {
        QuadScalar::rational(Q::int(1))
    }
    fn is_zero(&self) -> bool {
        Field::is_zero(&self.rational) && Field::is_zero(&self.surd)
    }
    fn inverse(&self) -> Option<Self> {
        self.checked_inverse().ok()
    }
    fn from_rational(q: Q) -> Self {
        QuadScalar::rational(q)
    }
}

impl<'a> Add<&'a QuadScalar> for &QuadScalar {
    type Output = QuadScalar;
    fn add(self, rhs: &'a QuadScalar) -> QuadScalar {
        self.checked_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Sub<&'a QuadScalar> for &QuadScalar {
    type Output = QuadScalar;
    fn sub(self, rhs: &'a QuadScalar) -> QuadScalar {
        self + &(-rhs.clone())
    }
}

impl<'a> Mul<&'a QuadScalar> for &QuadScalar {
    type Output = QuadScalar;
    fn mul(self, rhs: &'a QuadScalar) -> QuadScalar {
        self.checked_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Div<&'a QuadScalar> for &QuadScalar {
    type Output = QuadScalar;
    fn div(self, rhs: &'a QuadScalar) -> QuadScalar {
        let inv = rhs.checked_inverse().unwrap_or_else(|e| panic!("{e}"));
        self * &inv
    }
}

forward_owned!(QuadScalar, Add add, Sub sub, Mul mul, Div div);

impl Neg for QuadScalar {
    type Output = QuadScalar;
    fn neg(self) -> QuadScalar {
        QuadScalar {
            rational: -self.rational,
            surd: -self.surd,
            radicand: self.radicand,
        }
    }
}

impl fmt::Display for QuadScalar {
    /// `p/q` or `p/q+r/s*sqrt(c)`, with reduced fractions and positive denominators.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let frac = |q: &Q| format!("{}/{}", q.numer(), q.denom());
        if self.radicand == 0 {
            return write!(f, "{}", frac(&self.rational));
        }
        write!(
            f,
            "{}+{}*sqrt({})",
            frac(&self.rational),
            frac(&self.surd),
            self.radicand
        )
    }
}

impl fmt::Debug for QuadScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QuadScalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || ScalarError::Parse(s.to_string());
        let Some(pos) = t.find("*sqrt(") else {
            return Ok(QuadScalar::rational(t.parse()?));
        };
        if !t.ends_with(')') {
            return Err(err());
        }
        let radicand: i64 = t[pos + 6..t.len() - 1].parse().map_err(|_| err())?;
        let head = &t[..pos];
        // split "p/q+r/s" at the sign that starts the surd coefficient
        let bytes = head.as_bytes();
        let split = (1..bytes.len())
            .find(|&i| matches!(bytes[i], b'+' | b'-') && bytes[i - 1].is_ascii_digit())
            .ok_or_else(err)?;
        let rational: Q = head[..split].parse()?;
        let surd_text = head[split..].trim_start_matches('+');
        let surd: Q = surd_text.parse()?;
        QuadScalar::new(rational, surd, radicand)
    }
}

impl Serialize for QuadScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Square root of a rational if it is rational.
pub fn rational_sqrt(q: &Q) -> Option<Q> {
    let n = exact_sqrt(&q.numer())?;
    let d = exact_sqrt(&q.denom())?;
    Some(Q::from_big(BigRational::new(n, d)))
}

/// `gcd` of two big integers, used by polynomial content computations.
pub fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

/// Shorthand for building rationals in tests and catalogs.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn promotes_on_overflow_and_demotes_back() {
        let big = Q::int(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq.0, Repr::Big(_)));
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back.0, Repr::Small(_)));
    }

    #[test]
    fn canonical_text() {
        assert_eq!(Q::new(4, -6).to_string(), "-2/3");
        assert_eq!(Q::new(6, 3).to_string(), "2");
        assert_eq!("10/-4".parse::<Q>().unwrap(), Q::new(-5, 2));
        assert!("1/0".parse::<Q>().is_err());
    }

    #[test]
    fn quadratic_text_roundtrip() {
        let x = QuadScalar::new(Q::new(1, 2), Q::new(-3, 4), 2).unwrap();
        assert_eq!(x.to_string(), "1/2+-3/4*sqrt(2)");
        assert_eq!(x.to_string().parse::<QuadScalar>().unwrap(), x);
        let r: QuadScalar = "-2/3".parse().unwrap();
        assert_eq!(r, QuadScalar::rational(Q::new(-2, 3)));
        assert_eq!(r.to_string(), "-2/3");
    }

    #[test]
    fn sqrt_squares_to_radicand() {
        let s = QuadScalar::sqrt_of(3).unwrap();
        assert_eq!(&s * &s, QuadScalar::rational(Q::int(3)));
        let inv = s.inverse().unwrap();
        assert_eq!(&inv * &s, QuadScalar::one());
    }

    #[test]
    fn mixing_contexts_is_an_error() {
        let a = QuadScalar::sqrt_of(2).unwrap();
        let b = QuadScalar::sqrt_of(3).unwrap();
        assert_eq!(a.checked_add(&b), Err(ScalarError::MixedContexts(2, 3)));
        // rationals are context free
        assert!(a.checked_mul(&QuadScalar::rational(Q::int(5))).is_ok());
        assert_eq!(QuadScalar::sqrt_of(4), Err(ScalarError::BadRadicand(4)));
    }

    fn arb_q() -> impl Strategy<Value = Q> {
        prop_oneof![
            (-50i64..50, 1i64..50).prop_map(|(n, d)| Q::new(n, d)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(n, d)| Q::new(n, d)),
        ]
    }

    fn arb_quad() -> impl Strategy<Value = QuadScalar> {
        (arb_q(), arb_q()).prop_map(|(a, b)| QuadScalar::new(a, b, 5).unwrap())
    }

    proptest! {
        #[test]
        fn rational_field_axioms(a in arb_q(), b in arb_q(), c in arb_q()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!((&a + &b).cmp(&a), b.cmp(&Q::int(0)));
            if !Field::is_zero(&b) {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn quadratic_field_axioms(a in arb_quad(), b in arb_quad(), c in arb_quad()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inverse().unwrap(), QuadScalar::one());
            }
        }
    }
}
