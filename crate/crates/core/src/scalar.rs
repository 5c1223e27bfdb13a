//! Coefficient rings for symbols and operators.
//!
//! Two rings are provided: exact Gaussian rationals ([`Exact`]) and double
//! precision complex numbers ([`Float`]). Every algebraic routine in the crate
//! is generic over [`Scalar`], so identities can be checked exactly and large
//! sweeps can run in floating point.

use core::fmt::Debug;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Exact = Complex<BigRational>;
pub type Float = Complex64;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
{
    fn imag_unit() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_c64(&self) -> Complex64;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    /// `1/n` for a positive integer.
    fn recip_int(n: &BigInt) -> Self {
        Self::from_rational(&Rational::new(BigInt::one(), n.clone()))
    }

    fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// `(-i)^k`, the factor turning `∂^k` into `D^k`.
    fn minus_i_pow(k: u32) -> Self {
        match k % 4 {
            0 => Self::one(),
            1 => -Self::imag_unit(),
            2 => -Self::one(),
            _ => Self::imag_unit(),
        }
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let a = self.to_c64();
        let b = other.to_c64();
        (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
    }
}

impl Scalar for Exact {
    fn imag_unit() -> Self {
        Complex::new(Rational::zero(), Rational::one())
    }

    fn from_rational(r: &Rational) -> Self {
        Complex::new(r.clone(), Rational::zero())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl Scalar for Float {
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }

    fn from_rational(r: &Rational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // numerator/denominator too large for a direct conversion
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact rational from a finite `f64`.
pub fn rational_from_f64(v: f64) -> Result<Rational> {
    Rational::from_f64(v).ok_or_else(|| Error::pre("rational_from_f64", alloc::format!("{v} is not finite")))
}

/// Parses `"p"`, `"p/q"` or a decimal like `"-0.125"` / `"1e-3"` into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = |msg: &str| Error::Parse { pos: 0, msg: alloc::format!("{msg}: {s:?}") };
    if s.is_empty() {
        return Err(err("empty rational"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().map_err(|_| err("bad exponent"))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err("invalid digit"));
    }
    let digits = alloc::format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(digits.parse::<BigInt>().map_err(|_| err("bad digits"))?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// `p/q` when the denominator is 1 prints as `p`.
pub fn format_rational(r: &Rational) -> alloc::string::String {
    if r.is_integer() {
        alloc::format!("{}", r.numer())
    } else {
        alloc::format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn exact(re: Rational, im: Rational) -> Exact {
    Complex::new(re, im)
}

pub fn abs_rational(r: &Rational) -> Rational {
    r.abs()
}
