use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Exact rational numbers, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Coefficient field of a [`super::Poly`].
pub trait Field: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Panics on division by zero.
    fn div(&self, other: &Self) -> Self;
    fn from_integer(n: i64) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Whether elimination should cross-multiply instead of dividing, which
    /// pays off when products are cheaper than quotients.
    const FRACTION_FREE: bool = false;

    /// A nonzero factor that keeps the entries of `coeffs` small when
    /// multiplied in. The default makes the last entry one.
    fn normalizer<'a>(coeffs: impl Iterator<Item = &'a Self> + Clone) -> Self
    where
        Self: 'a,
    {
        let last = coeffs.last().expect("nonempty coefficient list");
        Self::one().div(last)
    }
}

impl Field for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, other: &Self) -> Self {
        assert!(!Zero::is_zero(other), "division by zero");
        self / other
    }
    fn from_integer(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }

    const FRACTION_FREE: bool = true;

    /// Reciprocal of the content: the result is integral, primitive, and its
    /// last entry is positive.
    fn normalizer<'a>(coeffs: impl Iterator<Item = &'a Self> + Clone) -> Self {
        let denominators = coeffs.clone().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let mut content = BigInt::zero();
        let mut last = BigInt::zero();
        for c in coeffs {
            last = c.numer() * (&denominators / c.denom());
            if !content.is_one() {
                content = content.gcd(&last);
            }
        }
        assert!(!content.is_zero(), "normalizer of zero coefficients");
        if last.is_negative() {
            content = -content;
        }
        BigRational::new(denominators, content)
    }
}

/// Integers modulo the prime `2^31 - 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp(u64);

impl Fp {
    pub const MODULUS: u64 = 2_147_483_647;

    pub fn new(n: i64) -> Self {
        Fp(n.rem_euclid(Self::MODULUS as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Reduction of a rational whose denominator is prime to the modulus.
    pub fn from_rational(q: &Rational) -> Option<Self> {
        let m = BigInt::from(Self::MODULUS);
        let residue = |n: &BigInt| Fp(n.mod_floor(&m).try_into().expect("residue fits"));
        let den = residue(q.denom());
        if den.0 == 0 {
            return None;
        }
        Some(Field::div(&residue(q.numer()), &den))
    }

    fn pow(self, mut e: u64) -> Self {
        let (mut base, mut acc) = (self, Fp(1));
        while e > 0 {
            if e & 1 == 1 {
                acc = Field::mul(&acc, &base);
            }
            base = Field::mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, other: &Self) -> Self {
        Fp((self.0 + other.0) % Self::MODULUS)
    }
    fn sub(&self, other: &Self) -> Self {
        Fp((self.0 + Self::MODULUS - other.0) % Self::MODULUS)
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(self.0 * other.0 % Self::MODULUS)
    }
    fn neg(&self) -> Self {
        Fp((Self::MODULUS - self.0) % Self::MODULUS)
    }
    fn div(&self, other: &Self) -> Self {
        assert!(other.0 != 0, "division by zero");
        Field::mul(self, &other.pow(Self::MODULUS - 2))
    }
    fn from_integer(n: i64) -> Self {
        Fp::new(n)
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
