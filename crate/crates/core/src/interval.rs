//! Certified real intervals with dyadic endpoints.
//!
//! An interval is stored as a pair of integers `lo <= hi` together with a
//! precision `prec`; it denotes `[lo·2^-prec, hi·2^-prec]`. Every operation
//! rounds outward, so the exact result of the real operation is always
//! contained in the returned interval.

use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct RealInterval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn pow2(n: u32) -> BigInt {
    BigInt::one() << (n as usize)
}

fn div_ceil(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn isqrt_ceil(x: &BigInt) -> BigInt {
    let r = x.sqrt();
    if &(&r * &r) < x {
        r + 1
    } else {
        r
    }
}

impl RealInterval {
    /// The interval `[lo, hi]·2^-prec`.
    pub fn from_scaled(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        RealInterval { lo, hi, prec }
    }

    /// The degenerate interval `[n, n]`.
    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        let v = n << (prec as usize);
        RealInterval {
            lo: v.clone(),
            hi: v,
            prec,
        }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    /// The smallest interval at precision `prec` containing the binary64 value `x`.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite(), "cannot enclose a non-finite value");
        let (lo, hi) = f64_scaled_floor_ceil(x, prec);
        RealInterval { lo, hi, prec }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn lo_scaled(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_scaled(&self) -> &BigInt {
        &self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        scaled_to_f64(&self.lo, self.prec)
    }

    pub fn hi_f64(&self) -> f64 {
        scaled_to_f64(&self.hi, self.prec)
    }

    pub fn midpoint_f64(&self) -> f64 {
        scaled_to_f64(&(&self.lo + &self.hi), self.prec + 1)
    }

    pub fn width_f64(&self) -> f64 {
        scaled_to_f64(&(&self.hi - &self.lo), self.prec)
    }

    /// Largest absolute value of any point of the interval, rounded up to binary64.
    pub fn mag_f64(&self) -> f64 {
        self.lo_f64().abs().max(self.hi_f64().abs())
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// Whether the binary64 value `x` lies in the interval (exact test).
    pub fn contains_f64(&self, x: f64) -> bool {
        let (fl, ce) = f64_scaled_floor_ceil(x, self.prec);
        // x·2^prec in [lo, hi] <=> floor >= lo when exact, ceil <= hi.
        self.lo <= fl && ce <= self.hi
    }

    /// `other ⊆ self`, comparing at a common precision.
    pub fn contains(&self, other: &RealInterval) -> bool {
        let p = self.prec.max(other.prec);
        let a = self.rescale_exact(p);
        let b = other.rescale_exact(p);
        a.lo <= b.lo && b.hi <= a.hi
    }

    /// Same interval expressed at a higher precision (exact).
    fn rescale_exact(&self, prec: u32) -> RealInterval {
        debug_assert!(prec >= self.prec);
        let shift = (prec - self.prec) as usize;
        RealInterval {
            lo: &self.lo << shift,
            hi: &self.hi << shift,
            prec,
        }
    }

    /// Re-express at precision `prec`, rounding outward when precision drops.
    pub fn round_to(&self, prec: u32) -> RealInterval {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => self.rescale_exact(prec),
            Ordering::Less => {
                let d = pow2(self.prec - prec);
                RealInterval {
                    lo: self.lo.div_floor(&d),
                    hi: div_ceil(&self.hi, &d),
                    prec,
                }
            }
        }
    }

    fn align(&self, other: &RealInterval) -> (RealInterval, RealInterval) {
        let p = self.prec.max(other.prec);
        (self.rescale_exact(p), other.rescale_exact(p))
    }

    pub fn add(&self, other: &RealInterval) -> RealInterval {
        let (a, b) = self.align(other);
        RealInterval {
            lo: a.lo + b.lo,
            hi: a.hi + b.hi,
            prec: a.prec,
        }
    }

    pub fn sub(&self, other: &RealInterval) -> RealInterval {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RealInterval {
        RealInterval {
            lo: -&self.hi,
            hi: -&self.lo,
            prec: self.prec,
        }
    }

    pub fn mul_int(&self, n: &BigInt) -> RealInterval {
        let a = &self.lo * n;
        let b = &self.hi * n;
        if n.is_negative() {
            RealInterval {
                lo: b,
                hi: a,
                prec: self.prec,
            }
        } else {
            RealInterval {
                lo: a,
                hi: b,
                prec: self.prec,
            }
        }
    }

    pub fn add_int(&self, n: &BigInt) -> RealInterval {
        let v = n << (self.prec as usize);
        RealInterval {
            lo: &self.lo + &v,
            hi: &self.hi + &v,
            prec: self.prec,
        }
    }

    /// Product, rounded outward to the larger of the two precisions.
    pub fn mul(&self, other: &RealInterval) -> RealInterval {
        let (a, b) = self.align(other);
        let cands = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = cands.iter().min().unwrap();
        let max = cands.iter().max().unwrap();
        let d = pow2(a.prec);
        RealInterval {
            lo: min.div_floor(&d),
            hi: div_ceil(max, &d),
            prec: a.prec,
        }
    }

    /// Quotient. Returns `None` when the divisor contains zero.
    pub fn div(&self, other: &RealInterval) -> Option<RealInterval> {
        if other.contains_zero() {
            return None;
        }
        let (a, b) = self.align(other);
        let shift = a.prec as usize;
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&a.lo, &a.hi] {
            let xs = x << shift;
            for y in [&b.lo, &b.hi] {
                let fl = xs.div_floor(y);
                let ce = div_ceil(&xs, y);
                if lo.as_ref().map_or(true, |l| &fl < l) {
                    lo = Some(fl);
                }
                if hi.as_ref().map_or(true, |h| &ce > h) {
                    hi = Some(ce);
                }
            }
        }
        Some(RealInterval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            prec: a.prec,
        })
    }

    /// Square root of the non-negative part. Returns `None` if the interval is entirely negative.
    pub fn sqrt(&self) -> Option<RealInterval> {
        if self.is_negative() {
            return None;
        }
        let shift = self.prec as usize;
        let lo = if self.lo.is_negative() {
            BigInt::zero()
        } else {
            (&self.lo << shift).sqrt()
        };
        let hi = isqrt_ceil(&(&self.hi << shift));
        Some(RealInterval {
            lo,
            hi,
            prec: self.prec,
        })
    }
}

impl fmt::Debug for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:e}, {:e}]@{}",
            self.lo_f64(),
            self.hi_f64(),
            self.prec
        )
    }
}

/// `m·2^-prec` rounded to the nearest binary64.
pub(crate) fn scaled_to_f64(m: &BigInt, prec: u32) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    // Keep 64 significant bits so the final scaling is a single rounding step
    // for all values of interest.
    let bits = m.bits();
    if bits > 64 {
        let drop = bits - 64;
        let top = m >> (drop as usize);
        let mant = top.to_f64().unwrap_or(f64::NAN);
        mant * libm::exp2(drop as f64 - prec as f64)
    } else {
        m.to_f64().unwrap_or(f64::NAN) * libm::exp2(-(prec as f64))
    }
}

/// Floor and ceiling of `x·2^prec` as integers.
fn f64_scaled_floor_ceil(x: f64, prec: u32) -> (BigInt, BigInt) {
    if x == 0.0 {
        return (BigInt::zero(), BigInt::zero());
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let sign = if x < 0.0 { Sign::Minus } else { Sign::Plus };
    let m = BigInt::from_biguint(sign, mant.into());
    let total = e + prec as i64;
    if total >= 0 {
        let v = m << (total as usize);
        (v.clone(), v)
    } else {
        let d = pow2((-total) as u32);
        (m.div_floor(&d), div_ceil(&m, &d))
    }
}

/// Exact conversion of a binary64 value that is known to be integral.
pub(crate) fn f64_to_bigint(x: f64) -> Option<BigInt> {
    BigInt::from_f64(x)
}
