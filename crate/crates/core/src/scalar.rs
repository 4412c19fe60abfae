//! Scalar towers.
//!
//! Every algorithm in this crate is generic over a complex scalar type with
//! a real part that can be ordered. Two towers are provided and never mixed
//! silently:
//!
//! * [`GaussianRational`] — complex numbers `a + bi` with arbitrary-precision
//!   rational parts. Arithmetic is exact; certificates built in this tower
//!   are replayable equalities, not approximations.
//! * [`Complex64`] — double-precision complex numbers for Monte-Carlo work
//!   and for squared-norm component output (the only place square roots
//!   appear). Verdicts computed here are flagged numeric-grade.
//!
//! Conversion from exact to float is explicit ([`Scalar::to_c64`]) and lossy;
//! there is no implicit path back.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Double-precision complex scalar (the float tower).
pub type Complex64 = num_complex::Complex<f64>;

/// Arbitrary-precision rational (real part of the exact tower).
pub type Rational = BigRational;

/// Ordered real scalar underlying a complex tower.
pub trait RealScalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic in this type is exact.
    const EXACT: bool;

    fn from_rational(q: &Rational) -> Self;

    fn from_usize(k: usize) -> Self;

    /// Lossy when `EXACT`; identity otherwise.
    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// Threshold below which a pivot at the given problem scale counts as
    /// zero: exactly zero in the exact tower, `1e-9 * scale` in floats.
    fn pivot_threshold(scale: &Self) -> Self;
}

impl RealScalar for Rational {
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_usize(k: usize) -> Self {
        Rational::from_integer(BigInt::from(k))
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn pivot_threshold(_scale: &Self) -> Self {
        Rational::zero()
    }
}

impl RealScalar for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }

    fn from_usize(k: usize) -> Self {
        k as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn pivot_threshold(scale: &Self) -> Self {
        1e-9 * f64::abs(*scale)
    }
}

/// Complex scalar over which the polynomial and matrix algebra is generic.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    type Real: RealScalar;

    /// True when arithmetic in this tower is exact.
    const EXACT: bool;

    fn conj(&self) -> Self;

    fn from_real(re: Self::Real) -> Self;

    fn from_parts(re: Self::Real, im: Self::Real) -> Self;

    fn real(&self) -> Self::Real;

    fn imag(&self) -> Self::Real;

    /// `x * conj(x)`, always real and nonnegative.
    fn abs_sq(&self) -> Self::Real;

    /// Embed a real rational; exact in the exact tower, rounded in floats.
    fn from_rational(q: &Rational) -> Self {
        Self::from_real(Self::Real::from_rational(q))
    }

    fn from_rational_pair(re: &Rational, im: &Rational) -> Self {
        Self::from_parts(Self::Real::from_rational(re), Self::Real::from_rational(im))
    }

    /// Explicit lossy conversion into the float tower.
    fn to_c64(&self) -> Complex64;

    /// Canonical string form for JSON payloads: `p/q` / `p/q+r/si` in the
    /// exact tower, 17-significant-digit scientific floats otherwise.
    fn to_json_string(&self) -> String;

    /// Inverse of [`Scalar::to_json_string`]; each tower also accepts the
    /// other's forms where the value is representable.
    fn parse_json_str(s: &str) -> Result<Self>;
}

/// Complex number with exact rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_integer(k: i64) -> Self {
        GaussianRational {
            re: Rational::from_integer(BigInt::from(k)),
            im: Rational::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational {
            re: Rational::new(BigInt::from(num), BigInt::from(den)),
            im: Rational::zero(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_complex_rational(&self.re, &self.im))
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        GaussianRational::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussianRational::new(re, im)
    }
}

impl Div for GaussianRational {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let den = &rhs.re * &rhs.re + &rhs.im * &rhs.im;
        assert!(!den.is_zero(), "division by zero Gaussian rational");
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) / &den;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) / &den;
        GaussianRational::new(re, im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational::new(Rational::one(), Rational::zero())
    }
}

impl Scalar for GaussianRational {
    type Real = Rational;
    const EXACT: bool = true;

    fn conj(&self) -> Self {
        GaussianRational::new(self.re.clone(), -self.im.clone())
    }

    fn from_real(re: Rational) -> Self {
        GaussianRational::new(re, Rational::zero())
    }

    fn from_parts(re: Rational, im: Rational) -> Self {
        GaussianRational::new(re, im)
    }

    fn real(&self) -> Rational {
        self.re.clone()
    }

    fn imag(&self) -> Rational {
        self.im.clone()
    }

    fn abs_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }

    fn to_json_string(&self) -> String {
        format_complex_rational(&self.re, &self.im)
    }

    fn parse_json_str(s: &str) -> Result<Self> {
        let (re, im) = parse_complex_rational(s)?;
        Ok(GaussianRational::new(re, im))
    }
}

impl Scalar for Complex64 {
    type Real = f64;
    const EXACT: bool = false;

    fn conj(&self) -> Self {
        num_complex::Complex::conj(self)
    }

    fn from_real(re: f64) -> Self {
        Complex64::new(re, 0.0)
    }

    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }

    fn real(&self) -> f64 {
        self.re
    }

    fn imag(&self) -> f64 {
        self.im
    }

    fn abs_sq(&self) -> f64 {
        self.norm_sqr()
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn to_json_string(&self) -> String {
        if self.im == 0.0 {
            format_f64(self.re)
        } else if self.im > 0.0 || self.im.is_nan() {
            format!("{}+{}i", format_f64(self.re), format_f64(self.im))
        } else {
            format!("{}-{}i", format_f64(self.re), format_f64(-self.im))
        }
    }

    fn parse_json_str(s: &str) -> Result<Self> {
        let (re, im) = split_complex_str(s)?;
        let parse = |t: &str| -> Result<f64> {
            if let Some((num, den)) = t.split_once('/') {
                let n: f64 = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid("number", format!("bad numerator in `{t}`")))?;
                let d: f64 = den
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid("number", format!("bad denominator in `{t}`")))?;
                Ok(n / d)
            } else {
                t.trim()
                    .parse()
                    .map_err(|_| Error::invalid("number", format!("cannot parse `{t}` as a float")))
            }
        };
        Ok(Complex64::new(parse(&re)?, im.as_deref().map(parse).transpose()?.unwrap_or(0.0)))
    }
}

/// Round-trippable 17-significant-digit scientific form.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Convert a big rational to the nearest double.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Out of double range: scale both parts down by a common power of two.
    let bits = q.numer().bits().max(q.denom().bits()) as i64;
    let shift = (bits - 900).max(0) as u64;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Exact dyadic rational equal to the given finite double.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Parse a real rational from `p/q`, integer, or decimal (`-1.25`,
/// `3.5e-2`) notation. Decimal forms convert exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::invalid("number", "empty numeric string"));
    }
    if let Some((num, den)) = t.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::invalid("number", format!("bad numerator in `{t}`")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::invalid("number", format!("bad denominator in `{t}`")))?;
        if d.is_zero() {
            return Err(Error::invalid("number", format!("zero denominator in `{t}`")));
        }
        return Ok(Rational::new(n, d));
    }
    // Split off a decimal exponent if present.
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = t[pos + 1..]
                .parse()
                .map_err(|_| Error::invalid("number", format!("bad exponent in `{t}`")))?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(Error::invalid("number", format!("no digits in `{t}`")));
    } else {
        digits
    };
    let n: BigInt = digits
        .parse()
        .map_err(|_| Error::invalid("number", format!("cannot parse `{t}` as a rational")))?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(n * ten.pow(scale as u32))
    } else {
        Rational::new(n, ten.pow((-scale) as u32))
    };
    Ok(value)
}

/// Format `re + im*i` compactly: plain `re` when the imaginary part is zero.
pub fn format_complex_rational(re: &Rational, im: &Rational) -> String {
    if im.is_zero() {
        re.to_string()
    } else if im.is_negative() {
        format!("{}-{}i", re, -im.clone())
    } else {
        format!("{re}+{im}i")
    }
}

/// Split a complex string into its real part and optional imaginary part.
///
/// Accepts `a`, `a+bi`, `a-bi`, and `bi`, where each part may be a rational,
/// an integer, or a decimal with exponent. The split point is the last `+`
/// or `-` that is neither leading nor part of an exponent.
fn split_complex_str(s: &str) -> Result<(String, Option<String>)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::invalid("number", "empty complex string"));
    }
    if !t.ends_with('i') {
        return Ok((t, None));
    }
    let body = &t[..t.len() - 1];
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    match split {
        Some(k) => {
            let (re, imsign) = (body[..k].to_string(), &body[k..]);
            let im = match imsign {
                "+" => "1".to_string(),
                "-" => "-1".to_string(),
                other => other.to_string(),
            };
            Ok((re, Some(im)))
        }
        None => {
            // Pure imaginary: `bi`, `i`, `-i`.
            let im = match body {
                "" => "1".to_string(),
                "-" => "-1".to_string(),
                other => other.to_string(),
            };
            Ok(("0".to_string(), Some(im)))
        }
    }
}

/// Parse a complex rational from the forms emitted by
/// [`format_complex_rational`].
pub fn parse_complex_rational(s: &str) -> Result<(Rational, Rational)> {
    let (re, im) = split_complex_str(s)?;
    let re = parse_rational(&re)?;
    let im = match im {
        Some(t) => parse_rational(&t)?,
        None => Rational::zero(),
    };
    Ok((re, im))
}
