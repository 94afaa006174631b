//! Complex Gamma and Beta, and the Gauss hypergeometric evaluations used by the
//! Mellin formulas.
//!
//! Every complex power and logarithm here takes the principal branch with
//! `-π <= arg z < π`: a negative real number has argument `-π`.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_780_329_736_406;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `arg z` in `[-π, π)`.
pub fn arg(z: Complex64) -> f64 {
    let a = libm::atan2(z.im, z.re);
    if a >= PI {
        -PI
    } else {
        a
    }
}

/// `log z = log|z| + i arg z` with `arg z ∈ [-π, π)`.
pub fn ln(z: Complex64) -> Complex64 {
    c(libm::log(z.norm()), arg(z))
}

/// `z^w = exp(w log z)`; `0^w = 0` for `Re w > 0`.
pub fn cpow(z: Complex64, w: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return if w.re > 0.0 {
            c(0.0, 0.0)
        } else {
            c(f64::NAN, f64::NAN)
        };
    }
    (w * ln(z)).exp()
}

fn sinpi_real(x: f64) -> f64 {
    let n = libm::round(2.0 * x);
    let f = x - 0.5 * n;
    let (s, co) = (libm::sin(PI * f), libm::cos(PI * f));
    match (n as i64).rem_euclid(4) {
        0 => s,
        1 => co,
        2 => -s,
        _ => -co,
    }
}

fn cospi_real(x: f64) -> f64 {
    let n = libm::round(2.0 * x);
    let f = x - 0.5 * n;
    let (s, co) = (libm::sin(PI * f), libm::cos(PI * f));
    match (n as i64).rem_euclid(4) {
        0 => co,
        1 => -s,
        2 => -co,
        _ => s,
    }
}

/// `sin(πz)` with exact argument reduction in the real part.
pub fn sinpi(z: Complex64) -> Complex64 {
    let y = PI * z.im;
    c(
        sinpi_real(z.re) * libm::cosh(y),
        cospi_real(z.re) * libm::sinh(y),
    )
}

/// A logarithm of `sin(πz)` that stays finite for large `|Im z|`.
fn ln_sinpi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return ln(sinpi(z));
    }
    let i_pi_z = c(-PI * z.im, PI * z.re);
    if z.im > 0.0 {
        // sin(πz) = e^{-iπz} (1 - e^{2iπz}) / (-2i)
        -i_pi_z + ln(c(1.0, 0.0) - (i_pi_z * 2.0).exp()) - ln(c(0.0, -2.0))
    } else {
        i_pi_z + ln(c(1.0, 0.0) - (-i_pi_z * 2.0).exp()) - ln(c(0.0, 2.0))
    }
}

/// `Some(n)` when `s = -n` is a pole of `Γ`.
fn gamma_pole(s: Complex64) -> Option<u32> {
    if s.im == 0.0 && s.re <= 0.0 && s.re == libm::round(s.re) && s.re > -1e9 {
        Some((-s.re) as u32)
    } else {
        None
    }
}

fn gamma_pole_error(s: Complex64, n: u32) -> Error {
    // Res_{s=-n} Γ = (-1)^n / n!
    let mut fact = 1.0;
    for j in 1..=n {
        fact *= j as f64;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Error::Pole {
        at: s,
        residue: Some(c(sign / fact, 0.0)),
    }
}

const STIRLING: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

fn ln_gamma_right(s: Complex64) -> Complex64 {
    // Shift to Re w >= 15 and apply Stirling's series there.
    let mut w = s;
    let mut shift = c(0.0, 0.0);
    while w.re < 15.0 {
        shift += ln(w);
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = c(0.0, 0.0);
    let mut pow = inv;
    for (m, b) in STIRLING.iter().enumerate() {
        let m = (m + 1) as f64;
        series += pow * (b / (2.0 * m * (2.0 * m - 1.0)));
        pow *= inv2;
    }
    (w - 0.5) * ln(w) - w + LN_SQRT_2PI + series - shift
}

/// A logarithm of `Γ(s)` (not necessarily the principal one; `exp` of it is `Γ(s)`).
pub fn ln_gamma(s: Complex64) -> Result<Complex64> {
    if let Some(n) = gamma_pole(s) {
        return Err(gamma_pole_error(s, n));
    }
    if s.re >= 0.5 {
        Ok(ln_gamma_right(s))
    } else {
        let one_minus = c(1.0, 0.0) - s;
        Ok(c(libm::log(PI), 0.0) - ln_sinpi(s) - ln_gamma_right(one_minus))
    }
}

pub fn gamma(s: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(s)?.exp())
}

/// A logarithm of `B(a, b)`; real part `-∞` when only `a + b` is a pole.
pub fn ln_beta(a: Complex64, b: Complex64) -> Result<Complex64> {
    let la = ln_gamma(a)?;
    let lb = ln_gamma(b)?;
    match ln_gamma(a + b) {
        Ok(lab) => Ok(la + lb - lab),
        Err(Error::Pole { .. }) => Ok(c(f64::NEG_INFINITY, 0.0)),
        Err(e) => Err(e),
    }
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a + b)`, evaluated in log space. Zero when only `a + b` is a pole.
pub fn beta(a: Complex64, b: Complex64) -> Result<Complex64> {
    let l = ln_beta(a, b)?;
    if l.re == f64::NEG_INFINITY {
        return Ok(c(0.0, 0.0));
    }
    Ok(l.exp())
}

fn near_nonpositive_integer(x: Complex64, max_n: i64) -> Option<i64> {
    if x.im != 0.0 {
        return None;
    }
    let n = libm::round(-x.re);
    if n >= 0.0 && (n as i64) <= max_n && (x.re + n).abs() <= 1e-14 * n.max(1.0) {
        Some(n as i64)
    } else {
        None
    }
}

/// `₂F₁[a, -N; c; z] = Σ_{n<=N} (a)_n (-N)_n / ((c)_n n!) z^n`.
pub fn hyp2f1_polynomial(
    a: Complex64,
    degree: u32,
    cc: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    if degree >= 1 && near_nonpositive_integer(cc, degree as i64 - 1).is_some() {
        return Err(Error::pole(cc));
    }
    let b = c(-(degree as f64), 0.0);
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    for n in 0..degree {
        let nf = n as f64;
        term = term * (a + nf) * (b + nf) / ((cc + nf) * (nf + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

/// `₂F₁[k, 1-k; c; z]` as the terminating sum of `k` terms.
pub fn hyp2f1_terminating(k: u32, cc: Complex64, z: Complex64) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    hyp2f1_polynomial(c(k as f64, 0.0), k - 1, cc, z)
}

/// Gauss series, for `|z| < 1`.
pub fn hyp2f1_series(a: Complex64, b: Complex64, cc: Complex64, z: Complex64) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::domain("Gauss series needs |z| < 1"));
    }
    if let Some(n) = near_nonpositive_integer(cc, i64::MAX) {
        let terminates = [a, b]
            .iter()
            .any(|x| matches!(near_nonpositive_integer(*x, n), Some(_)));
        if !terminates {
            return Err(Error::pole(cc));
        }
    }
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    for n in 0..100_000u32 {
        let nf = n as f64;
        term = term * (a + nf) * (b + nf) / ((cc + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && n > 4 {
            return Ok(sum);
        }
        if term.norm() == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::Accuracy(alloc::string::String::from(
        "Gauss series did not converge",
    )))
}

/// `∫_0^1 y^{p-1} (1-y)^{q-1} (1-βy)^{-a} dy` for `Re p, Re q > 0`, with the endpoint
/// singularities removed by `y = u^r` near `0` and `1 - y = v^r` near `1`.
pub(crate) fn euler_integral(
    p: Complex64,
    q: Complex64,
    beta: Complex64,
    a: Complex64,
    opts: QuadOptions,
) -> Result<Complex64> {
    if p.re <= 0.0 || q.re <= 0.0 {
        return Err(Error::domain("Euler integral needs positive real parts"));
    }
    let one = c(1.0, 0.0);
    let a_int = if a.im == 0.0 && a.re == libm::round(a.re) && a.re.abs() < 1e6 {
        Some(a.re as i32)
    } else {
        None
    };
    let kernel = move |w: Complex64| -> Complex64 {
        match a_int {
            Some(n) => w.powi(-n),
            None => cpow(w, -a),
        }
    };
    let rp = (2.0 / p.re).max(1.0);
    let rq = (2.0 / q.re).max(1.0);
    let left = integrate(
        |u: f64| {
            if u <= 0.0 {
                return c(0.0, 0.0);
            }
            let lu = libm::log(u);
            let y = libm::exp(rp * lu);
            let main = ((p * rp - 1.0) * lu).exp() * rp;
            main * cpow(c(1.0 - y, 0.0), q - one) * kernel(one - beta * y)
        },
        0.0,
        libm::pow(0.5, 1.0 / rp),
        opts,
    )
    .into_result("Euler integral near 0")?;
    let right = integrate(
        |v: f64| {
            if v <= 0.0 {
                return c(0.0, 0.0);
            }
            let lv = libm::log(v);
            let t = libm::exp(rq * lv);
            let main = ((q * rq - 1.0) * lv).exp() * rq;
            main * cpow(c(1.0 - t, 0.0), p - one) * kernel((one - beta) + beta * t)
        },
        0.0,
        libm::pow(0.5, 1.0 / rq),
        opts,
    )
    .into_result("Euler integral near 1")?;
    Ok(left + right)
}

fn euler_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-13,
        max_intervals: 4000,
    }
}

/// `₂F₁[a, b; c; z]` from its Euler integral, for `Re c > Re b > 0` and `|arg(1 - z)| < π`.
pub fn hyp2f1_integral(
    a: Complex64,
    b: Complex64,
    cc: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    if !(cc.re > b.re && b.re > 0.0) {
        return Err(Error::domain("Euler integral needs Re c > Re b > 0"));
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::domain("Euler integral needs |arg(1 - z)| < π"));
    }
    if a.re == 0.0 && a.im == 0.0 {
        return Ok(c(1.0, 0.0));
    }
    let integral = euler_integral(b, cc - b, z, a, euler_opts())?;
    Ok(integral / beta(b, cc - b)?)
}

/// `(1/e)·₂F₁[m, e; e + 1; β]` with `e = s - 2k + m`, continued to `Re e > -n` by `n`
/// integrations by parts:
///
/// `Σ_{j<n} (-β)^j (m)_j (1-β)^{-m-j} / (e(e+1)…(e+j)) + (-β)^n (m)_n / (e…(e+n-1)) J_n`,
/// `J_n = ∫_0^1 y^{e+n-1} (1-βy)^{-m-n} dy`.
pub fn hyp2f1_continued(
    m: u32,
    two_k: u32,
    s: Complex64,
    beta: Complex64,
    n: u32,
) -> Result<Complex64> {
    if m == 0 || 2 * m > two_k {
        return Err(Error::domain("need 1 <= m <= k"));
    }
    let e = s - (two_k as f64) + (m as f64);
    if e.re + n as f64 <= 0.0 {
        return Err(Error::domain(alloc::format!(
            "{n} integrations by parts reach only Re s > {}",
            two_k as f64 - m as f64 - n as f64
        )));
    }
    if let Some(j) = near_nonpositive_integer(e, n as i64) {
        return Err(Error::Pole {
            at: s,
            residue: Some(residue_continued(m, j as u32, beta)),
        });
    }
    if beta.re == 0.0 && beta.im == 0.0 {
        return Ok(e.inv());
    }
    let one = c(1.0, 0.0);
    let mf = m as f64;
    let mut sum = c(0.0, 0.0);
    let mut coef = e.inv(); // (-β)^j (m)_j / (e…(e+j))
    let base = one - beta;
    for j in 0..n {
        sum += coef * base.powi(-(m as i32 + j as i32));
        coef = coef * (-beta) * (mf + j as f64) / (e + (j + 1) as f64);
    }
    // coef now carries an extra 1/(e+n); undo it for the remainder integral.
    let rem_coef = coef * (e + n as f64);
    let j_n = euler_integral(e + n as f64, one, beta, c(mf + n as f64, 0.0), euler_opts())?;
    Ok(sum + rem_coef * j_n)
}

/// Residue in `s` of `(1/e)·₂F₁[m, e; e+1; β]` at `e = -j`: the coefficient of `y^j` in
/// `(1-βy)^{-m}`, i.e. `(m)_j β^j / j!`.
fn residue_continued(m: u32, j: u32, beta: Complex64) -> Complex64 {
    let mut r = c(1.0, 0.0);
    for i in 0..j {
        r = r * beta * (m as f64 + i as f64) / ((i + 1) as f64);
    }
    r
}

/// Evaluation regimes of [`Hyp2F1Request`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyp2F1Mode {
    /// `b` a non-positive integer.
    Terminating,
    /// Euler integral; `Re c > Re b > 0`.
    IntegralRep,
    /// `c = b + 1` and `a` a positive integer, continued by `n` integrations by parts.
    Continued { n: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Request {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub z: Complex64,
    pub mode: Hyp2F1Mode,
}

impl Hyp2F1Request {
    pub fn evaluate(&self) -> Result<Complex64> {
        match self.mode {
            Hyp2F1Mode::Terminating => match near_nonpositive_integer(self.b, 1 << 20) {
                Some(n) => hyp2f1_polynomial(self.a, n as u32, self.c, self.z),
                None => Err(Error::domain(
                    "terminating mode needs b a non-positive integer",
                )),
            },
            Hyp2F1Mode::IntegralRep => hyp2f1_integral(self.a, self.b, self.c, self.z),
            Hyp2F1Mode::Continued { n } => {
                let m = self.a.re;
                if self.a.im != 0.0 || m < 1.0 || m != libm::round(m) {
                    return Err(Error::domain("continued mode needs a positive integer a"));
                }
                if (self.c - self.b - 1.0).norm() > 1e-14 {
                    return Err(Error::domain("continued mode needs c = b + 1"));
                }
                // With two_k = 2m the shift s - 2k + m equals s - m, so s = b + m.
                let m = m as u32;
                let v = hyp2f1_continued(m, 2 * m, self.b + m as f64, self.z, n)?;
                Ok(v * self.b)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn branch_convention() {
        assert_eq!(arg(c(-1.0, 0.0)), -PI);
        assert_eq!(arg(c(-1.0, -0.0)), -PI);
        assert!((arg(c(0.0, 1.0)) - PI / 2.0).abs() < 1e-16);
        // (-1)^{1/2} = e^{-iπ/2} = -i under this convention.
        assert!((cpow(c(-1.0, 0.0), c(0.5, 0.0)) - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn gamma_special_values() {
        assert!(rel(gamma(c(0.5, 0.0)).unwrap(), c(libm::sqrt(PI), 0.0)) < 1e-14);
        assert!(rel(gamma(c(5.0, 0.0)).unwrap(), c(24.0, 0.0)) < 1e-14);
        assert!(rel(beta(c(1.0, 0.0), c(1.0, 0.0)).unwrap(), c(1.0, 0.0)) < 1e-14);
        match gamma(c(-3.0, 0.0)) {
            Err(Error::Pole {
                residue: Some(r), ..
            }) => assert!((r - c(-1.0 / 6.0, 0.0)).norm() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert_eq!(beta(c(0.5, 0.0), c(-0.5, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn gamma_matches_real_gamma() {
        let mut x = -9.75;
        while x < 30.0 {
            let g = gamma(c(x, 0.0)).unwrap();
            let oracle = libm::tgamma(x);
            assert!(
                (g.re - oracle).abs() <= 2e-13 * oracle.abs(),
                "x={x}: {g} vs {oracle}"
            );
            assert!(g.im.abs() <= 1e-13 * oracle.abs());
            x += 0.37;
        }
    }

    #[test]
    fn gamma_modulus_on_vertical_lines() {
        for &y in &[0.3, 1.0, 4.0, 12.5, 30.0, 49.0] {
            // |Γ(1/2 + iy)|² = π / cosh(πy), |Γ(iy)|² = π / (y sinh(πy)).
            let g = gamma(c(0.5, y)).unwrap();
            let expect = libm::log(PI) - libm::log(libm::cosh(PI * y));
            assert!((2.0 * libm::log(g.norm()) - expect).abs() < 1e-12, "y={y}");
            let g = gamma(c(0.0, y)).unwrap();
            let expect = libm::log(PI) - libm::log(y * libm::sinh(PI * y));
            assert!((2.0 * libm::log(g.norm()) - expect).abs() < 1e-12, "y={y}");
        }
        // Far up the line Re s = 0 the reflection stays finite.
        let g = ln_gamma(c(0.0, 240.0)).unwrap();
        // sinh(240π) = e^{240π}/2 to double precision.
        let expect =
            0.5 * (libm::log(PI) - libm::log(240.0) + core::f64::consts::LN_2) - PI * 240.0 / 2.0;
        assert!((g.re - expect).abs() < 1e-10);
    }

    #[test]
    fn gamma_identities_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let s = c(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            // Reflection.
            let lhs = gamma(s).unwrap() * gamma(c(1.0, 0.0) - s).unwrap() * sinpi(s) / PI;
            assert!(rel(lhs, c(1.0, 0.0)) < 1e-11, "s={s}");
            // Recurrence across the reflection boundary.
            let lhs = gamma(s + 1.0).unwrap();
            assert!(rel(lhs, s * gamma(s).unwrap()) < 1e-12, "s={s}");
            // Legendre duplication.
            let lhs = gamma(s).unwrap() * gamma(s + 0.5).unwrap();
            let rhs =
                cpow(c(2.0, 0.0), c(1.0, 0.0) - s * 2.0) * libm::sqrt(PI) * gamma(s * 2.0).unwrap();
            assert!(rel(lhs, rhs) < 1e-11, "s={s}");
        }
    }

    #[test]
    fn terminating_examples() {
        assert_eq!(
            hyp2f1_terminating(1, c(0.3, 2.0), c(5.0, -1.0)).unwrap(),
            c(1.0, 0.0)
        );
        let v = hyp2f1_terminating(3, c(2.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(v.norm() < 1e-15);
        assert!(matches!(
            hyp2f1_terminating(3, c(-1.0, 0.0), c(0.5, 0.0)),
            Err(Error::Pole { .. })
        ));
        assert!(hyp2f1_terminating(3, c(-2.0, 0.0), c(0.5, 0.0)).is_ok());
    }

    #[test]
    fn integral_examples() {
        let v = hyp2f1_integral(c(0.0, 0.0), c(0.7, 0.2), c(2.0, 0.0), c(0.3, 0.4)).unwrap();
        assert_eq!(v, c(1.0, 0.0));
        let v = hyp2f1_integral(c(1.3, 0.0), c(0.7, 0.2), c(2.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(rel(v, c(1.0, 0.0)) < 1e-12);
        let v = hyp2f1_integral(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!(rel(v, c(2.0 * core::f64::consts::LN_2, 0.0)) < 1e-12);
        assert!(hyp2f1_integral(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(0.5, 0.0)).is_err());
        assert!(hyp2f1_integral(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(1.5, 0.0)).is_err());
    }

    #[test]
    fn integral_matches_series_inside_disc() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let b = c(rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0));
            let cc = b + c(rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0));
            let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
            let r = rng.gen_range(0.0..0.7);
            let t = rng.gen_range(-PI..PI);
            let z = c(r * libm::cos(t), r * libm::sin(t));
            let i = hyp2f1_integral(a, b, cc, z).unwrap();
            let s = hyp2f1_series(a, b, cc, z).unwrap();
            assert!(rel(i, s) < 1e-10, "a={a} b={b} c={cc} z={z}: {i} vs {s}");
        }
    }

    #[test]
    fn terminating_matches_integral() {
        for k in 1..=5u32 {
            for &cc in &[
                c(k as f64 + 0.5, 0.0),
                c(2.0 * k as f64, 0.7),
                c(k as f64 + 3.0, -1.2),
            ] {
                for &z in &[c(0.3, 0.1), c(-2.5, 0.0), c(0.5, -3.0)] {
                    // ₂F₁[k, 1-k; c; z] = ₂F₁[1-k, k; c; z]; the Euler integral needs Re c > Re b = k > 0.
                    let t = hyp2f1_terminating(k, cc, z).unwrap();
                    let i =
                        hyp2f1_integral(c(1.0 - k as f64, 0.0), c(k as f64, 0.0), cc, z).unwrap();
                    assert!(rel(t, i) <= 1e-10, "k={k} c={cc} z={z}: {t} vs {i}");
                }
            }
        }
    }

    #[test]
    fn continued_examples() {
        // β = 0 collapses to 1/e.
        let s = c(0.3, 1.1);
        let v = hyp2f1_continued(1, 2, s, c(0.0, 0.0), 2).unwrap();
        assert!(rel(v, (s - 1.0).inv()) < 1e-15);
        // n = 0 is the direct integral.
        let (m, two_k) = (2u32, 6u32);
        let s = c(5.2, 0.4);
        let e = s - 4.0;
        let beta_arg = c(0.0, -1.7);
        let v0 = hyp2f1_continued(m, two_k, s, beta_arg, 0).unwrap();
        let direct = hyp2f1_integral(c(m as f64, 0.0), e, e + 1.0, beta_arg).unwrap() / e;
        assert!(rel(v0, direct) < 1e-10);
        // Overlap between successive n.
        for n in 0..4 {
            let a = hyp2f1_continued(m, two_k, s, beta_arg, n).unwrap();
            let b = hyp2f1_continued(m, two_k, s, beta_arg, n + 1).unwrap();
            assert!(rel(a, b) <= 1e-9, "n={n}: {a} vs {b}");
        }
        // Continuation agrees with the Gauss series where |β| < 1 and Re e < 0.
        let beta_arg = c(0.0, 0.6);
        let s = c(2.4, 0.3);
        let e = s - 4.0;
        let v = hyp2f1_continued(m, two_k, s, beta_arg, 3).unwrap();
        let series = hyp2f1_series(c(m as f64, 0.0), e, e + 1.0, beta_arg).unwrap() / e;
        assert!(rel(v, series) < 1e-10, "{v} vs {series}");
        // Pole at e = -1 with the residue of the series.
        match hyp2f1_continued(m, two_k, c(3.0, 0.0), beta_arg, 3) {
            Err(Error::Pole {
                residue: Some(r), ..
            }) => assert!((r - beta_arg * 2.0).norm() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert!(hyp2f1_continued(m, two_k, c(1.0, 0.0), beta_arg, 2).is_err());
    }

    #[test]
    fn request_modes_agree() {
        let req = |mode| Hyp2F1Request {
            a: c(2.0, 0.0),
            b: c(0.6, 0.3),
            c: c(1.6, 0.3),
            z: c(0.0, 0.8),
            mode,
        };
        let direct = req(Hyp2F1Mode::IntegralRep).evaluate().unwrap();
        let cont = req(Hyp2F1Mode::Continued { n: 2 }).evaluate().unwrap();
        assert!(rel(direct, cont) < 1e-10);
        let term = Hyp2F1Request {
            a: c(3.0, 0.0),
            b: c(-2.0, 0.0),
            c: c(2.0, 0.0),
            z: c(0.5, 0.0),
            mode: Hyp2F1Mode::Terminating,
        };
        assert!(term.evaluate().unwrap().norm() < 1e-15);
    }

    #[test]
    fn euler_transformation() {
        let mut rng = ChaCha8Rng::seed_from_u64(953);
        for _ in 0..50 {
            let b = c(rng.gen_range(0.3..2.0), rng.gen_range(-1.0..1.0));
            let cc = b + c(rng.gen_range(0.3..2.0), rng.gen_range(-1.0..1.0));
            let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0));
            let z = c(rng.gen_range(-3.0..0.9), rng.gen_range(-2.0..2.0));
            let lhs = hyp2f1_integral(a, b, cc, z).unwrap();
            let rhs =
                cpow(c(1.0, 0.0) - z, cc - a - b) * hyp2f1_integral(cc - a, cc - b, cc, z).unwrap();
            assert!(rel(lhs, rhs) <= 1e-9, "a={a} b={b} c={cc} z={z}");
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn gamma_reflection(x in -6.0f64..6.0, y in -4.0f64..4.0) {
            let s = c(x, y);
            proptest::prop_assume!((s - libm::round(x)).norm() > 1e-3);
            let v = gamma(s).unwrap() * gamma(c(1.0, 0.0) - s).unwrap() * sinpi(s) / PI;
            proptest::prop_assert!((v - 1.0).norm() <= 1e-11, "{}", v);
        }

        #[test]
        fn connection_at_infinity(
            a in -1.5f64..1.5, b in 0.2f64..1.5, dc in 0.3f64..2.0, r in 1.5f64..4.0, th in -2.8f64..2.8,
        ) {
            proptest::prop_assume!(((a - b) - libm::round(a - b)).abs() > 0.1);
            let (a, b, cc) = (c(a, 0.0), c(b, 0.0), c(b + dc, 0.0));
            let z = -c(r * libm::cos(th), r * libm::sin(th));
            let one = c(1.0, 0.0);
            let w = z.inv();
            let t1 = gamma(cc).unwrap() * gamma(b - a).unwrap() / (gamma(b).unwrap() * gamma(cc - a).unwrap())
                * cpow(-z, -a) * hyp2f1_series(a, a - cc + one, a - b + one, w).unwrap();
            let t2 = gamma(cc).unwrap() * gamma(a - b).unwrap() / (gamma(a).unwrap() * gamma(cc - b).unwrap())
                * cpow(-z, -b) * hyp2f1_series(b, b - cc + one, b - a + one, w).unwrap();
            let lhs = hyp2f1_integral(a, b, cc, z).unwrap();
            proptest::prop_assert!(rel(lhs, t1 + t2) <= 1e-8);
        }

        #[test]
        fn linear_transformation(
            a in -1.5f64..1.5, b in 0.2f64..1.5, dc in 0.3f64..2.0, x in -0.6f64..0.6, y in -0.6f64..0.6,
        ) {
            let (a, b, cc, z) = (c(a, 0.0), c(b, 0.0), c(b + dc, 0.0), c(x, y));
            let lhs = hyp2f1_integral(a, b, cc, z).unwrap();
            let rhs = cpow(c(1.0, 0.0) - z, cc - a - b) * hyp2f1_series(cc - a, cc - b, cc, z).unwrap();
            proptest::prop_assert!(rel(lhs, rhs) <= 1e-9);
        }
    }
}
