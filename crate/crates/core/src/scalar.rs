//! Scalar fields for the two arithmetic modes.
//!
//! Exact mode works over Gaussian rationals (complex numbers with
//! arbitrary-precision rational real and imaginary parts, always in lowest
//! terms). Float mode wraps `Complex<f64>`. Every algorithm in this crate is
//! generic over [`Scalar`]; rank and zero decisions consult
//! [`Scalar::is_negligible`], which is exact in exact mode and
//! tolerance-based in float mode.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Real part of a scalar field: ordered, with exact or tolerant equality.
pub trait RealField:
    Clone + fmt::Debug + fmt::Display + PartialEq + Eq + Ord + Send + Sync + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Division; panics on a zero divisor.
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
    /// Equality up to the key-merging tolerance of the mode.
    fn approx_eq(&self, rhs: &Self) -> bool;
}

impl RealField for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(!Zero::is_zero(rhs), "division by zero rational");
        self / rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn approx_eq(&self, rhs: &Self) -> bool {
        self == rhs
    }
}

/// Absolute tolerance used to merge floating exponent/phase keys.
pub const KEY_MERGE_TOL: f64 = 1e-9;

/// `f64` with a total order, usable as a map key.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct R64(pub f64);

impl R64 {
    pub fn new(x: f64) -> Self {
        // normalize -0.0 so keys compare equal
        R64(if x == 0.0 { 0.0 } else { x })
    }
}

impl Eq for R64 {}

impl PartialOrd for R64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for R64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for R64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl RealField for R64 {
    fn zero() -> Self {
        R64(0.0)
    }
    fn one() -> Self {
        R64(1.0)
    }
    fn from_i64(n: i64) -> Self {
        R64(n as f64)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        R64::new(num as f64 / den as f64)
    }
    fn add(&self, rhs: &Self) -> Self {
        R64::new(self.0 + rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        R64::new(self.0 - rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        R64::new(self.0 * rhs.0)
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(rhs.0 != 0.0, "division by zero");
        R64::new(self.0 / rhs.0)
    }
    fn neg(&self) -> Self {
        R64::new(-self.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
    fn to_f64(&self) -> f64 {
        self.0
    }
    fn approx_eq(&self, rhs: &Self) -> bool {
        (self.0 - rhs.0).abs() <= KEY_MERGE_TOL
    }
}

/// Complex scalar of one arithmetic mode.
pub trait Scalar: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    type Real: RealField;

    /// Whether arithmetic (and hence every zero test) is exact.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn from_i64(n: i64) -> Self;
    /// num/den as a scalar; used for the 1/k! coefficients of nilpotent exponentials.
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_real(re: Self::Real) -> Self;
    fn from_re_im(re: Self::Real, im: Self::Real) -> Self;
    /// Exact conversion of a binary float (used for parsing and normalization).
    fn from_f64(x: f64) -> Self;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Division; panics on division by zero (callers guard with rank checks).
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;

    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn is_zero(&self) -> bool;
    /// |z| as f64 (approximate in exact mode; used only for diagnostics and pivoting).
    fn abs(&self) -> f64;
    fn to_c64(&self) -> Complex64;

    /// Zero test for rank decisions: exact in exact mode, `|z| <= threshold` in float mode.
    fn is_negligible(&self, threshold: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs() <= threshold
        }
    }
}

/// Complex number with exact rational real and imaginary parts.
///
/// `BigRational` keeps itself in lowest terms with positive denominator, so
/// equality is structural.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    /// |z|^2 as an exact rational.
    pub fn abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}+{}i)", self.re, self.im)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if Zero::is_zero(&self.im) {
            write!(f, "{}", self.re)
        } else if Zero::is_zero(&self.re) {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Scalar for GaussianRational {
    type Real = BigRational;
    const EXACT: bool = true;

    fn zero() -> Self {
        GaussianRational::from_ints(0, 0)
    }
    fn one() -> Self {
        GaussianRational::from_ints(1, 0)
    }
    fn i() -> Self {
        GaussianRational::from_ints(0, 1)
    }
    fn from_i64(n: i64) -> Self {
        GaussianRational::from_ints(n, 0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        GaussianRational {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: Zero::zero(),
        }
    }
    fn from_real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: Zero::zero(),
        }
    }
    fn from_re_im(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }
    fn from_f64(x: f64) -> Self {
        GaussianRational {
            re: BigRational::from_float(x).expect("finite float"),
            im: Zero::zero(),
        }
    }

    fn add(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
    fn div(&self, rhs: &Self) -> Self {
        let d = rhs.abs_sq();
        assert!(!Zero::is_zero(&d), "division by zero GaussianRational");
        GaussianRational {
            re: (&self.re * &rhs.re + &self.im * &rhs.im) / &d,
            im: (&self.im * &rhs.re - &self.re * &rhs.im) / &d,
        }
    }
    fn neg(&self) -> Self {
        GaussianRational {
            re: -&self.re,
            im: -&self.im,
        }
    }
    fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    fn re(&self) -> BigRational {
        self.re.clone()
    }
    fn im(&self) -> BigRational {
        self.im.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn abs(&self) -> f64 {
        RealField::to_f64(&self.abs_sq()).sqrt()
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(RealField::to_f64(&self.re), RealField::to_f64(&self.im))
    }
}

/// Double-precision complex scalar.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct CF64(pub Complex64);

impl CF64 {
    pub fn new(re: f64, im: f64) -> Self {
        CF64(Complex64::new(re, im))
    }
}

impl fmt::Display for CF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Scalar for CF64 {
    type Real = R64;
    const EXACT: bool = false;

    fn zero() -> Self {
        CF64::new(0.0, 0.0)
    }
    fn one() -> Self {
        CF64::new(1.0, 0.0)
    }
    fn i() -> Self {
        CF64::new(0.0, 1.0)
    }
    fn from_i64(n: i64) -> Self {
        CF64::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        CF64::new(num as f64 / den as f64, 0.0)
    }
    fn from_real(re: R64) -> Self {
        CF64::new(re.0, 0.0)
    }
    fn from_re_im(re: R64, im: R64) -> Self {
        CF64::new(re.0, im.0)
    }
    fn from_f64(x: f64) -> Self {
        CF64::new(x, 0.0)
    }

    fn add(&self, rhs: &Self) -> Self {
        CF64(self.0 + rhs.0)
    }
    fn sub(&self, rhs: &Self) -> Self {
        CF64(self.0 - rhs.0)
    }
    fn mul(&self, rhs: &Self) -> Self {
        CF64(self.0 * rhs.0)
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(rhs.0.norm_sqr() != 0.0, "division by zero");
        CF64(self.0 / rhs.0)
    }
    fn neg(&self) -> Self {
        CF64(-self.0)
    }
    fn conj(&self) -> Self {
        CF64(self.0.conj())
    }

    fn re(&self) -> R64 {
        R64::new(self.0.re)
    }
    fn im(&self) -> R64 {
        R64::new(self.0.im)
    }
    fn is_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }
    fn abs(&self) -> f64 {
        self.0.norm()
    }
    fn to_c64(&self) -> Complex64 {
        self.0
    }
}
