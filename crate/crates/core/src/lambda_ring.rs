//! Exact arithmetic in `Z[λ_p]`, `λ_p = 2cos(π/p)`.
//!
//! Elements are integer coefficient vectors reduced modulo the minimal
//! polynomial `μ_p` of `λ_p`. The real embedding sends `λ` to the largest real
//! root of `μ_p`; signs are decided exactly (symbolic zero test, then interval
//! refinement with doubling precision).

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::interval::RealInterval;

/// Precision (bits) at which `λ` is enclosed when a ring is created.
const CACHED_LAMBDA_BITS: u32 = 320;

/// Coefficients (constant term first) of the minimal polynomial of `2cos(π/p)`.
///
/// Obtained from the cyclotomic polynomial `Φ_{2p}(y)` through the substitution
/// `x = y + 1/y`, entirely in integer arithmetic.
pub fn minimal_polynomial(p: u32) -> Result<Vec<i64>> {
    if p < 3 {
        return Err(Error::domain(alloc::format!(
            "Hecke group index p = {p} must be >= 3"
        )));
    }
    let phi = cyclotomic(2 * p as usize);
    let m = (phi.len() - 1) / 2;
    // y^{-m} Φ(y) = c_m + Σ_{j>=1} c_{m+j} (y^j + y^{-j}), and y^j + y^{-j} = t_j(x)
    // with t_0 = 2, t_1 = x, t_{j+1} = x t_j - t_{j-1}.
    let mut result = vec![0i64; m + 1];
    result[0] = phi[m];
    let mut t_prev = vec![2i64];
    let mut t_cur = vec![0i64, 1];
    for j in 1..=m {
        let c = phi[m + j];
        for (i, &t) in t_cur.iter().enumerate() {
            result[i] += c * t;
        }
        let mut next = vec![0i64; t_cur.len() + 1];
        for (i, &t) in t_cur.iter().enumerate() {
            next[i + 1] += t;
        }
        for (i, &t) in t_prev.iter().enumerate() {
            next[i] -= t;
        }
        t_prev = t_cur;
        t_cur = next;
    }
    debug_assert_eq!(result[m], 1);
    Ok(result)
}

/// `Φ_n(y)` by repeated exact division of `y^n - 1`.
fn cyclotomic(n: usize) -> Vec<i64> {
    let mut num = vec![0i64; n + 1];
    num[0] = -1;
    num[n] = 1;
    for d in 1..n {
        if n % d == 0 {
            num = poly_div_exact(&num, &cyclotomic(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let lead = den[dn];
    debug_assert!(lead == 1 || lead == -1);
    let mut q = vec![0i64; num.len() - dn];
    for i in (0..q.len()).rev() {
        let c = rem[i + dn] / lead;
        q[i] = c;
        for (j, &d) in den.iter().enumerate() {
            rem[i + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

/// The ring `Z[λ_p]` together with a certified enclosure of `λ_p`.
pub struct LambdaRing {
    p: u32,
    minpoly: Vec<i64>,
    lambda: RealInterval,
}

impl fmt::Debug for LambdaRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LambdaRing")
            .field("p", &self.p)
            .field("minpoly", &self.minpoly)
            .finish()
    }
}

impl LambdaRing {
    pub fn new(p: u32) -> Result<Arc<LambdaRing>> {
        let minpoly = minimal_polynomial(p)?;
        let lambda = enclose_lambda(p, &minpoly, CACHED_LAMBDA_BITS);
        Ok(Arc::new(LambdaRing { p, minpoly, lambda }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// `deg μ_p = φ(2p)/2`.
    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn minimal_polynomial(&self) -> &[i64] {
        &self.minpoly
    }

    /// `λ_p` as a binary64 value.
    pub fn lambda_f64(&self) -> f64 {
        self.lambda.midpoint_f64()
    }

    /// A certified enclosure of `λ_p` of width at most `2^-prec`.
    pub fn lambda_interval(&self, prec: u32) -> RealInterval {
        if prec + 2 <= CACHED_LAMBDA_BITS {
            self.lambda.round_to(prec + 2)
        } else {
            enclose_lambda(self.p, &self.minpoly, prec + 2)
        }
    }
}

/// Sign of `μ(x)` at the dyadic point `x = num·2^-prec`, exactly.
fn minpoly_sign_at(minpoly: &[i64], num: &BigInt, prec: u32) -> i32 {
    // 2^{prec·d} μ(num/2^prec) = Σ m_i num^i 2^{prec(d-i)}
    let d = minpoly.len() - 1;
    let mut acc = BigInt::zero();
    let mut pow_num = BigInt::one();
    for (i, &m) in minpoly.iter().enumerate() {
        acc += (BigInt::from(m) * &pow_num) << ((prec as usize) * (d - i));
        pow_num *= num;
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Bisection enclosure of the largest root of `μ_p`, which is `2cos(π/p)`.
fn enclose_lambda(p: u32, minpoly: &[i64], prec: u32) -> RealInterval {
    let approx = 2.0 * libm::cos(core::f64::consts::PI / p as f64);
    if minpoly.len() == 2 {
        // μ = x - c.
        return RealInterval::from_i64(-minpoly[0], prec);
    }
    // Separation from the next conjugate 2cos(3π/p) bounds how wide the start bracket may be.
    let gap = approx - 2.0 * libm::cos(3.0 * core::f64::consts::PI / p as f64);
    let mut start_bits = 40u32;
    while libm::exp2(-(start_bits as f64)) * 4.0 >= gap {
        start_bits += 4;
    }
    let delta = libm::exp2(-(start_bits as f64));
    let work = prec.max(start_bits + 8);
    let lo0 = RealInterval::from_f64(approx - delta, work);
    let hi0 = RealInterval::from_f64(approx + delta, work);
    let mut lo = lo0.lo_scaled().clone();
    let mut hi = hi0.hi_scaled().clone();
    let s_lo = minpoly_sign_at(minpoly, &lo, work);
    let s_hi = minpoly_sign_at(minpoly, &hi, work);
    assert!(
        s_lo != 0 && s_hi != 0 && s_lo != s_hi,
        "start bracket for 2cos(pi/{p}) does not isolate the root"
    );
    let one = BigInt::one();
    while &hi - &lo > one {
        let mid: BigInt = (&lo + &hi) >> 1usize;
        let s = minpoly_sign_at(minpoly, &mid, work);
        if s == 0 {
            return RealInterval::from_scaled(mid.clone(), mid, work).round_to(prec);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RealInterval::from_scaled(lo, hi, work).round_to(prec)
}

/// An element `Σ c_i λ^i` of `Z[λ_p]`, `0 <= i < deg μ_p`.
#[derive(Clone)]
pub struct RingElem {
    ring: Arc<LambdaRing>,
    coeffs: Vec<BigInt>,
}

impl RingElem {
    /// Builds an element from raw coefficients (constant term first), reducing modulo `μ_p`.
    pub fn from_coeffs(ring: &Arc<LambdaRing>, coeffs: Vec<BigInt>) -> RingElem {
        let mut e = RingElem {
            ring: ring.clone(),
            coeffs,
        };
        e.reduce();
        e
    }

    pub fn from_i64_coeffs(ring: &Arc<LambdaRing>, coeffs: &[i64]) -> RingElem {
        Self::from_coeffs(ring, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_int(ring: &Arc<LambdaRing>, n: i64) -> RingElem {
        Self::from_i64_coeffs(ring, &[n])
    }

    pub fn zero(ring: &Arc<LambdaRing>) -> RingElem {
        Self::from_int(ring, 0)
    }

    pub fn one(ring: &Arc<LambdaRing>) -> RingElem {
        Self::from_int(ring, 1)
    }

    /// The generator `λ`.
    pub fn lambda(ring: &Arc<LambdaRing>) -> RingElem {
        Self::from_i64_coeffs(ring, &[0, 1])
    }

    pub fn ring(&self) -> &Arc<LambdaRing> {
        &self.ring
    }

    pub fn p(&self) -> u32 {
        self.ring.p
    }

    /// Reduced coefficient vector, constant term first, of length `deg μ_p`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficients as `i64`, if they all fit.
    pub fn coeffs_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn reduce(&mut self) {
        let d = self.ring.degree();
        let mp = &self.ring.minpoly;
        while self.coeffs.len() > d {
            let top = self.coeffs.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = self.coeffs.len() - d;
            // x^{d+shift} = -Σ_{i<d} m_i x^{i+shift}
            for (i, &m) in mp.iter().take(d).enumerate() {
                self.coeffs[i + shift] -= &top * m;
            }
        }
        self.coeffs.resize(d, BigInt::zero());
    }

    fn check_same_ring(&self, other: &RingElem) -> Result<()> {
        if self.ring.p != other.ring.p {
            return Err(Error::domain(alloc::format!(
                "ring mismatch: p = {} vs p = {}",
                self.ring.p,
                other.ring.p
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &RingElem) -> Result<RingElem> {
        self.check_same_ring(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(RingElem {
            ring: self.ring.clone(),
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &RingElem) -> Result<RingElem> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &RingElem) -> Result<RingElem> {
        self.check_same_ring(other)?;
        let d = self.coeffs.len();
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        Ok(RingElem::from_coeffs(&self.ring, prod))
    }

    pub fn neg(&self) -> RingElem {
        RingElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, n: i64) -> RingElem {
        RingElem {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|c| c * n).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> RingElem {
        let mut acc = RingElem::one(&self.ring);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Certified enclosure of the real embedding, of width at most `2^(1-precision)·max(1, |a|)`.
    pub fn embed(&self, precision: u32) -> RealInterval {
        let precision = precision.max(32);
        let coeff_bits = self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0) as u32;
        let work = precision + 16 + coeff_bits + 4 * self.coeffs.len() as u32;
        let lam = self.ring.lambda_interval(work);
        let mut acc = RealInterval::from_int(self.coeffs.last().unwrap(), work);
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(&lam).add_int(c);
        }
        acc.round_to(precision + 2)
    }

    /// Binary64 approximation of the embedding.
    pub fn to_f64(&self) -> f64 {
        self.embed(64).midpoint_f64()
    }

    /// Exact sign of the real embedding.
    pub fn sign(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let mut prec = 64u32;
        loop {
            let iv = self.embed(prec);
            if iv.is_positive() {
                return 1;
            }
            if iv.is_negative() {
                return -1;
            }
            // A nonzero element has nonzero embedding, so this terminates.
            prec = prec.saturating_mul(2);
        }
    }

    /// Exact comparison of the embeddings.
    pub fn cmp_real(&self, other: &RingElem) -> Ordering {
        match (self - other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Whether the coefficient vector is the constant `n`.
    pub fn is_int(&self, n: i64) -> bool {
        self.coeffs[0] == BigInt::from(n) && self.coeffs[1..].iter().all(Zero::is_zero)
    }
}

/// Arithmetic operators panic on mixed rings; use the `checked_*` methods to get an error instead.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl core::ops::$tr<&RingElem> for &RingElem {
            type Output = RingElem;
            fn $method(self, rhs: &RingElem) -> RingElem {
                self.$checked(rhs).expect("ring mismatch")
            }
        }
        impl core::ops::$tr<RingElem> for RingElem {
            type Output = RingElem;
            fn $method(self, rhs: RingElem) -> RingElem {
                (&self).$checked(&rhs).expect("ring mismatch")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl core::ops::Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem::neg(self)
    }
}

impl core::ops::Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem::neg(&self)
    }
}

/// Which of `add`, `sub`, `mul`, `neg` to apply in [`ring_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingOp {
    Add,
    Sub,
    Mul,
    Neg,
}

/// `a op b` (for `Neg`, `b` is ignored apart from the ring check).
pub fn ring_arith(a: &RingElem, b: &RingElem, op: RingOp) -> Result<RingElem> {
    match op {
        RingOp::Add => a.checked_add(b),
        RingOp::Sub => a.checked_sub(b),
        RingOp::Mul => a.checked_mul(b),
        RingOp::Neg => {
            a.check_same_ring(b)?;
            Ok(a.neg())
        }
    }
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        self.ring.p == other.ring.p && self.coeffs == other.coeffs
    }
}

impl Eq for RingElem {}

/// Structural order on `(p, coefficients)`, used for exact set keys. Not the real order.
impl Ord for RingElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ring
            .p
            .cmp(&other.ring.p)
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialOrd for RingElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    f.write_str("λ")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
