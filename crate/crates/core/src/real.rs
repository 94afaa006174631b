//! Scalar types for the rational-function evaluators.
//!
//! [`Real`] is implemented for `f64` and for [`DoubleDouble`], an unevaluated
//! sum of two binary64 values carrying about 106 significant bits.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Num, One, Zero};

use crate::interval::{f64_to_bigint, scaled_to_f64, RealInterval};

pub trait Real:
    Copy + PartialOrd + fmt::Debug + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Significant bits carried by the type.
    const BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    /// Nearest representable value to the midpoint of a certified enclosure.
    fn from_interval(iv: &RealInterval) -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
}

impl Real for f64 {
    const BITS: u32 = 53;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn from_interval(iv: &RealInterval) -> Self {
        iv.midpoint_f64()
    }

    fn abs(self) -> Self {
        libm::fabs(self)
    }

    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
}

/// `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

impl DoubleDouble {
    pub const fn new(hi: f64, lo: f64) -> Self {
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        DoubleDouble { hi: h, lo: l }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dd({:e} + {:e})", self.hi, self.lo)
    }
}

impl PartialEq for DoubleDouble {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        Self::renorm(s, e)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        Self::renorm(p, e)
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self - o * DoubleDouble::from_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * DoubleDouble::from_f64(q2);
        let q3 = r.hi / o.hi;
        let (q, e) = quick_two_sum(q1, q2);
        DoubleDouble { hi: q, lo: e } + DoubleDouble::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, o: Self) -> Self {
        let q = (self / o).hi.trunc_toward_zero();
        self - o * DoubleDouble::from_f64(q)
    }
}

trait Trunc {
    fn trunc_toward_zero(self) -> f64;
}

impl Trunc for f64 {
    fn trunc_toward_zero(self) -> f64 {
        libm::trunc(self)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble { hi: 0.0, lo: 0.0 }
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble { hi: 1.0, lo: 0.0 }
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = ();
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, ()> {
        f64::from_str_radix(s, radix)
            .map(DoubleDouble::from_f64)
            .map_err(|_| ())
    }
}

impl Real for DoubleDouble {
    const BITS: u32 = 106;

    fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn from_interval(iv: &RealInterval) -> Self {
        let iv = iv.round_to(iv.precision().max(160));
        let prec = iv.precision() + 1;
        let mid: BigInt = iv.lo_scaled() + iv.hi_scaled();
        let hi = scaled_to_f64(&mid, prec);
        if hi == 0.0 || !hi.is_finite() {
            return DoubleDouble::from_f64(hi);
        }
        // hi·2^prec is an integer whenever the midpoint carries more than 53 bits.
        let scaled_hi = hi * libm::exp2(prec as f64);
        let rest = match f64_to_bigint(libm::round(scaled_hi)) {
            Some(h) if libm::round(scaled_hi) == scaled_hi => scaled_to_f64(&(mid - h), prec),
            _ => 0.0,
        };
        DoubleDouble::renorm(hi, rest)
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return DoubleDouble::zero();
        }
        // One Newton step from the binary64 root.
        let x = libm::sqrt(self.hi);
        let xx = DoubleDouble::from_f64(x) * DoubleDouble::from_f64(x);
        let corr = (self - xx).hi / (2.0 * x);
        DoubleDouble::renorm(x, corr)
    }
}

/// `z^n` for an integer exponent by repeated squaring.
pub fn cpowi<T: Real>(z: Complex<T>, n: i32) -> Complex<T> {
    let mut base = if n < 0 {
        Complex::new(T::one(), T::zero()) / z
    } else {
        z
    };
    let mut e = n.unsigned_abs();
    let mut acc = Complex::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// Lift a binary64 complex number into `Complex<T>`.
pub fn lift<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn lower<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn cabs<T: Real>(z: Complex<T>) -> f64 {
    let z = lower(z);
    libm::hypot(z.re, z.im)
}
