//! The Mellin side: `Φ = D + E⁰ + E*`, the remainder term `R(s)`, remainder atoms
//! `R(s; a, b) = (a-b)^k ∫_0^∞ y^{s-1} / ((iy-a)^k (iy-b)^k) dy` and the operator `ρ`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hecke_group::GroupElem;
use crate::quadratic_forms::HyperbolicPoint;
use crate::quadrature::{integrate_with_breaks, QuadOptions};
use crate::rpf::{partial_fractions, PolePair, RpfSpec};
use crate::special_functions::{cpow, gamma, hyp2f1_continued, hyp2f1_terminating, ln, ln_beta};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Fourier coefficients `a_1 … a_N` of `F(z) = Σ a_n e^{2πinz/λ}` (`a_0 = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    lambda_scale: f64,
    weight: u32,
    coeffs: Vec<f64>,
}

impl FourierSeries {
    /// `coeffs[n - 1] = a_n`.
    pub fn new(lambda_scale: f64, weight: u32, coeffs: Vec<f64>) -> Result<FourierSeries> {
        if !(lambda_scale > 0.0 && lambda_scale.is_finite()) {
            return Err(Error::domain("λ must be positive"));
        }
        if weight == 0 || weight % 2 == 1 {
            return Err(Error::domain("weight must be a positive even integer"));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::domain("non-finite Fourier coefficient"));
        }
        Ok(FourierSeries {
            lambda_scale,
            weight,
            coeffs,
        })
    }

    pub fn lambda_scale(&self) -> f64 {
        self.lambda_scale
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn rate(&self) -> f64 {
        2.0 * PI / self.lambda_scale
    }

    /// `F(iy)`.
    pub fn eval_iy(&self, y: f64) -> f64 {
        let q = libm::exp(-self.rate() * y);
        let mut pw = q;
        let mut sum = 0.0;
        for a in &self.coeffs {
            sum += a * pw;
            pw *= q;
        }
        sum
    }

    /// `B` with `|F(iy)| <= B e^{-2πy/λ}` for `y >= y_min`.
    fn exp_bound(&self, y_min: f64) -> f64 {
        let q = libm::exp(-self.rate() * y_min);
        let mut pw = 1.0;
        let mut sum = 0.0;
        for a in &self.coeffs {
            sum += a.abs() * pw;
            pw *= q;
        }
        sum
    }
}

/// `|a_n| <= constant · n^exponent`, supplied by the caller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthBound {
    pub constant: f64,
    pub exponent: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartialPhi {
    pub value: Complex64,
    /// Bound on the contribution of the omitted terms `n > N`.
    pub tail_bound: f64,
    pub terms: usize,
}

/// `(2π/λ)^{-s} Γ(s) Σ_{n<=N} a_n n^{-s}` with a bound on the truncated tail.
pub fn phi_partial(
    s: Complex64,
    series: &FourierSeries,
    growth: &GrowthBound,
    rel_tol: f64,
) -> Result<PartialPhi> {
    let n = series.len();
    let mut sum = c(0.0, 0.0);
    for (i, a) in series.coeffs.iter().enumerate() {
        if *a != 0.0 {
            sum += (-s * libm::log((i + 1) as f64)).exp() * *a;
        }
    }
    let prefactor = cpow(c(series.rate(), 0.0), -s) * gamma(s)?;
    let value = prefactor * sum;
    // Σ_{m>N} C m^{β-σ} <= C ∫_N^∞ x^{β-σ} dx.
    let excess = s.re - growth.exponent - 1.0;
    if excess <= 0.0 {
        return Err(Error::domain(
            "the Dirichlet series tail does not converge at this abscissa",
        ));
    }
    let tail = if n == 0 {
        f64::INFINITY
    } else {
        growth.constant * libm::pow(n as f64, -excess) / excess
    };
    let tail_bound = tail * prefactor.norm();
    if tail_bound > rel_tol * value.norm() {
        return Err(Error::Accuracy(alloc::format!(
            "Dirichlet tail bound {tail_bound:e} exceeds the target at s = {s}"
        )));
    }
    Ok(PartialPhi {
        value,
        tail_bound,
        terms: n,
    })
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_intervals: 20_000,
    }
}

fn breaks(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = libm::ceil((hi - lo) / step).max(1.0) as usize;
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

/// `D(s) = ∫_1^∞ F(iy) (y^s - y^{2k-s}) dy/y`.
pub fn d_eval(s: Complex64, series: &FourierSeries) -> Result<Complex64> {
    d_eval_split(s, series, 1.0)
}

/// `∫_y0^∞ F(iy) y^{s-1} dy - ∫_{1/y0}^∞ F(iy) y^{2k-s-1} dy`.
///
/// Equal to `D(s)` for every `y0 > 0` exactly when `F(i/y) = -y^{2k} F(iy)`; with `y0 = 1`
/// the two pieces share one integrand and `D(2k-s) = -D(s)` holds to rounding.
pub fn d_eval_split(s: Complex64, series: &FourierSeries, y0: f64) -> Result<Complex64> {
    if !(y0 > 0.0 && y0.is_finite()) {
        return Err(Error::domain("split point must be positive"));
    }
    if series.is_empty() {
        return Ok(c(0.0, 0.0));
    }
    let two_k = series.weight as f64;
    let rate = series.rate();
    let y_min = y0.min(1.0 / y0);
    let big_b = series.exp_bound(y_min);
    if big_b == 0.0 {
        return Ok(c(0.0, 0.0));
    }
    let m = s.re.max(two_k - s.re).max(1.0);
    // For y >= 2(M-1)/c the factor y^{M-1} e^{-cy/2} is decreasing, so each tail past Y
    // is at most B Y^{M-1} e^{-cY} · 2/c.
    let target = 1e-16 * big_b * libm::exp(-rate * y_min);
    let mut y_max = (2.0 * (m - 1.0) / rate).max(2.0 * y0.max(1.0 / y0));
    while 4.0 * big_b * libm::pow(y_max, m - 1.0) * libm::exp(-rate * y_max) / rate > target {
        y_max += 0.5;
    }
    let opts = QuadOptions {
        abs_tol: target,
        ..quad_opts()
    };
    let s1 = s - 1.0;
    let s2 = c(two_k, 0.0) - s - 1.0;
    let piece = |e: Complex64, lo: f64| {
        integrate_with_breaks(
            |y| (e * libm::log(y)).exp() * series.eval_iy(y),
            &breaks(lo, y_max, 0.5),
            opts,
        )
        .into_result("D(s)")
    };
    if y0 == 1.0 {
        return integrate_with_breaks(
            |y| {
                let ly = libm::log(y);
                ((s1 * ly).exp() - (s2 * ly).exp()) * series.eval_iy(y)
            },
            &breaks(1.0, y_max, 0.5),
            opts,
        )
        .into_result("D(s)");
    }
    Ok(piece(s1, y0)? - piece(s2, 1.0 / y0)?)
}

/// `E⁰(s) = -∫_1^∞ c0 q0(iy) y^{2k-s} dy/y`, continued: `-c0 ν (1/(s-2k) + 1/s)`, plus
/// `i c0 η / (s-1)` when `2k = 2`.
pub fn e0_eval(s: Complex64, spec: &RpfSpec) -> Result<Complex64> {
    let two_k = spec.two_k() as f64;
    let a = spec.c0() * spec.nu();
    let b = spec.c0() * spec.eta();
    let at = |x: f64| s.re == x && s.im == 0.0;
    if a != 0.0 && at(0.0) {
        return Err(Error::Pole {
            at: s,
            residue: Some(c(-a, 0.0)),
        });
    }
    if a != 0.0 && at(two_k) {
        return Err(Error::Pole {
            at: s,
            residue: Some(c(-a, 0.0)),
        });
    }
    if spec.k() == 1 && b != 0.0 && at(1.0) {
        return Err(Error::Pole {
            at: s,
            residue: Some(I * b),
        });
    }
    let mut v = c(0.0, 0.0);
    if a != 0.0 {
        v -= ((s - two_k).inv() + s.inv()) * a;
    }
    if spec.k() == 1 && b != 0.0 {
        v += I * b / (s - 1.0);
    }
    Ok(v)
}

/// Evaluation route for `E*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstarMethod {
    /// `-∫_1^∞ q*(iy) y^{2k-s} dy/y`, for `Re s > 0`.
    Quadrature,
    /// Partial fractions and continued `₂F₁` terms, valid off the integer pole set.
    Hypergeometric,
}

struct StarBounds {
    /// `|q*(iy)| <= near_zero` for all `y`.
    near_zero: f64,
    /// `|q*(iy)| <= at_infinity · y^{-2k}`.
    at_infinity: f64,
}

fn star_bounds(pairs: &[PolePair<f64>], k: u32) -> StarBounds {
    let mut near_zero = 0.0;
    let mut at_infinity = 0.0;
    for pp in pairs {
        let top = (pp.weight * pp.gap_k).abs();
        near_zero += top / libm::pow((pp.alpha * pp.conj).abs(), k as f64);
        at_infinity += top;
    }
    StarBounds {
        near_zero,
        at_infinity,
    }
}

/// `∫_lo^hi g(u) du` with unit breakpoints, for integrands on a logarithmic line.
fn log_line(
    g: impl Fn(f64) -> Complex64,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    what: &str,
) -> Result<Complex64> {
    // Panel roundoff sits near 1e-13 of the integrand scale; the tails are cut tighter.
    let opts = QuadOptions {
        abs_tol: 100.0 * abs_tol,
        ..quad_opts()
    };
    integrate_with_breaks(g, &breaks(lo, hi, 1.0), opts).into_result(what)
}

const TAIL: f64 = 1e-15;

pub fn estar_eval(s: Complex64, spec: &RpfSpec, method: EstarMethod) -> Result<Complex64> {
    match method {
        EstarMethod::Quadrature => estar_quadrature(s, spec),
        EstarMethod::Hypergeometric => estar_hypergeometric(s, spec),
    }
}

fn estar_quadrature(s: Complex64, spec: &RpfSpec) -> Result<Complex64> {
    if s.re <= 0.0 {
        return Err(Error::domain("the E* integral needs Re s > 0"));
    }
    let ev = spec.evaluator();
    if ev.pairs().is_empty() {
        return Ok(c(0.0, 0.0));
    }
    let b = star_bounds(ev.pairs(), spec.k());
    let sigma = s.re;
    let hi = libm::log(1.0 / (sigma * TAIL)) / sigma;
    let shift = c(spec.two_k() as f64, 0.0) - s;
    let v = log_line(
        |u| {
            let y = libm::exp(u);
            ev.qstar(c(0.0, y)).unwrap_or(c(f64::NAN, f64::NAN)) * (shift * u).exp()
        },
        0.0,
        hi,
        TAIL * b.at_infinity,
        "E*(s) by quadrature",
    )?;
    Ok(-v)
}

/// `E*(s) = -∫_0^1 q*(iy) y^{s-1} dy`, valid for `0 < Re s < 2k`.
pub fn estar_alt_quadrature(s: Complex64, spec: &RpfSpec) -> Result<Complex64> {
    if s.re <= 0.0 {
        return Err(Error::domain("the alternative E* integral needs Re s > 0"));
    }
    let ev = spec.evaluator();
    if ev.pairs().is_empty() {
        return Ok(c(0.0, 0.0));
    }
    let b = star_bounds(ev.pairs(), spec.k());
    let sigma = s.re;
    let lo = -libm::log(1.0 / (sigma * TAIL)) / sigma;
    let v = log_line(
        |u| {
            let y = libm::exp(u);
            ev.qstar(c(0.0, y)).unwrap_or(c(f64::NAN, f64::NAN)) * (s * u).exp()
        },
        lo,
        0.0,
        TAIL * b.near_zero,
        "E*(s) by the alternative integral",
    )?;
    Ok(-v)
}

/// Either a finite value or the residue of a simple pole exactly at the evaluation point.
enum Raw {
    Value(Complex64),
    Pole(Complex64),
}

fn estar_hyp_raw(s: Complex64, spec: &RpfSpec) -> Result<Raw> {
    let k = spec.k();
    let two_k = spec.two_k();
    let ev = spec.evaluator();
    let mut value = c(0.0, 0.0);
    let mut residue = c(0.0, 0.0);
    let mut hit = false;
    for pp in ev.pairs() {
        let pf = partial_fractions(k, pp.alpha, pp.conj)?;
        for m in 1..=k {
            for (x, coef) in [
                (pp.alpha, pf.a[m as usize - 1]),
                (pp.conj, pf.b[m as usize - 1]),
            ] {
                // ∫_1^∞ y^{2k-s-1} (iy - x)^{-m} dy = i^{-m} (1/e) ₂F₁[m, e; e+1; -ix], e = s-2k+m.
                let e = s.re - two_k as f64 + m as f64;
                let n = libm::ceil(1.0 - e).max(0.0) as u32;
                let scale = I.powi(-(m as i32)) * (-pp.weight * coef);
                match hyp2f1_continued(m, two_k, s, c(0.0, -x), n) {
                    Ok(v) => value += scale * v,
                    Err(Error::Pole {
                        residue: Some(r), ..
                    }) => {
                        hit = true;
                        residue += scale * r;
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(if hit {
        Raw::Pole(residue)
    } else {
        Raw::Value(value)
    })
}

/// Mean of `f` over the circle `|w - s| = r`: the value at `s` when `f` is analytic on the disc.
fn circle_mean(
    f: impl Fn(Complex64) -> Result<Complex64>,
    s: Complex64,
    r: f64,
) -> Result<Complex64> {
    const N: usize = 64;
    let mut acc = c(0.0, 0.0);
    for j in 0..N {
        let theta = 2.0 * PI * (j as f64 + 0.5) / N as f64;
        acc += f(s + c(r * libm::cos(theta), r * libm::sin(theta)))?;
    }
    Ok(acc / N as f64)
}

/// Nearest integer to `s` when `s` lies within `radius` of it.
fn near_integer(s: Complex64, radius: f64) -> Option<f64> {
    let n = libm::round(s.re);
    if (s - n).norm() < radius {
        Some(n)
    } else {
        None
    }
}

const NEAR: f64 = 0.01;
const CIRCLE: f64 = 0.25;

fn estar_hypergeometric(s: Complex64, spec: &RpfSpec) -> Result<Complex64> {
    if spec.terms().is_empty() {
        return Ok(c(0.0, 0.0));
    }
    let raw = |w: Complex64| match estar_hyp_raw(w, spec)? {
        Raw::Value(v) => Ok(v),
        Raw::Pole(r) => Err(Error::Pole {
            at: w,
            residue: Some(r),
        }),
    };
    let Some(n) = near_integer(s, NEAR) else {
        return raw(s);
    };
    if n > spec.two_k() as f64 - 1.0 {
        return raw(s);
    }
    // Terms can only blow up at integers <= 2k-1; decide whether their residues cancel.
    let net = match estar_hyp_raw(c(n, 0.0), spec)? {
        Raw::Value(_) => c(0.0, 0.0),
        Raw::Pole(r) => r,
    };
    let scale = star_bounds(spec.evaluator().pairs(), spec.k())
        .at_infinity
        .max(1e-300);
    if net.norm() > 1e-9 * scale {
        if s == c(n, 0.0) {
            return Err(Error::Pole {
                at: s,
                residue: Some(net),
            });
        }
        return raw(s);
    }
    circle_mean(raw, s, CIRCLE)
}

/// Integers in `[lo, hi]` where the hypergeometric `E*` has a pole, with the residues.
pub fn estar_pole_scan(spec: &RpfSpec, lo: i64, hi: i64) -> Result<Vec<(i64, Complex64)>> {
    let mut out = Vec::new();
    for n in lo..=hi {
        if let Err(Error::Pole { residue, .. }) = estar_hypergeometric(c(n as f64, 0.0), spec) {
            out.push((n, residue.unwrap_or(c(f64::NAN, f64::NAN))));
        }
    }
    Ok(out)
}

fn strip_check(s: Complex64, k: u32) -> Result<()> {
    if !(s.re > 0.0 && s.re < 2.0 * k as f64) {
        return Err(Error::domain(alloc::format!(
            "s = {s} lies outside the strip 0 < Re s < {}",
            2 * k
        )));
    }
    Ok(())
}

fn strip_radius(s: Complex64, k: u32) -> f64 {
    CIRCLE.min(0.5 * s.re).min(0.5 * (2.0 * k as f64 - s.re))
}

/// Lemma-1 two-term expression with `(δ, ε)` admissible; returns `(δ-ε)^k · ∫…`.
fn lemma_terms(s: Complex64, delta: f64, eps: f64, k: u32) -> Result<Complex64> {
    let kf = k as f64;
    let z = c(eps / (eps - delta), 0.0);
    let i_s = s * c(0.0, PI / 2.0);
    let l1 = i_s + (s - kf) * ln(c(delta, 0.0)) + ln_beta(c(2.0 * kf, 0.0) - s, s - kf)?;
    let l2 = i_s + (s - kf) * ln(c(eps, 0.0)) + ln_beta(s, c(kf, 0.0) - s)?;
    let f1 = hyp2f1_terminating(k, c(kf + 1.0, 0.0) - s, z)?;
    let f2 = hyp2f1_terminating(k, s - kf + 1.0, z)?;
    Ok(l1.exp() * f1 + l2.exp() * f2)
}

fn atom_raw(s: Complex64, a: f64, b: f64, k: u32) -> Result<Complex64> {
    // The lemma needs δ/(δ-ε) > 0; the integrand is symmetric in (δ, ε).
    if a / (a - b) > 0.0 {
        lemma_terms(s, a, b, k)
    } else {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Ok(lemma_terms(s, b, a, k)? * sign)
    }
}

fn atom_args(a: f64, b: f64, k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    if !(a.is_finite() && b.is_finite()) || a == 0.0 || b == 0.0 || a == b {
        return Err(Error::domain(
            "remainder atoms need distinct nonzero real a, b",
        ));
    }
    Ok(())
}

/// `R(s; a, b)` from the closed Beta/₂F₁ form. At the removable singularities on the
/// integers of the strip the value is recovered as a circle mean.
pub fn atom_closed(s: Complex64, a: f64, b: f64, k: u32) -> Result<Complex64> {
    atom_args(a, b, k)?;
    strip_check(s, k)?;
    if near_integer(s, NEAR).is_some() {
        return circle_mean(|w| atom_raw(w, a, b, k), s, strip_radius(s, k));
    }
    atom_raw(s, a, b, k)
}

/// `R(s; a, b)` by quadrature on `y = e^u` with explicit tail cut-offs.
pub fn atom_quadrature(s: Complex64, a: f64, b: f64, k: u32) -> Result<Complex64> {
    atom_args(a, b, k)?;
    strip_check(s, k)?;
    let kf = k as f64;
    let top = libm::pow((a - b).abs(), kf);
    // |iy - a| >= max(|a|, y): tails below e^{σu} top/|ab|^k and e^{(σ-2k)u} top.
    let m0 = top / libm::pow((a * b).abs(), kf);
    let sigma = s.re;
    let lo = -libm::log(1.0 / (sigma * TAIL)) / sigma;
    let hi = libm::log(1.0 / ((2.0 * kf - sigma) * TAIL)) / (2.0 * kf - sigma);
    let lo = lo + libm::log(top / m0).min(0.0) / sigma;
    let hi = hi + libm::log(top.max(1.0)) / (2.0 * kf - sigma);
    let gap = c(a - b, 0.0).powi(k as i32);
    log_line(
        |u| {
            let y = libm::exp(u);
            let w = (c(-a, y) * c(-b, y)).powi(-(k as i32));
            gap * w * (s * u).exp()
        },
        lo,
        hi,
        TAIL * m0.max(top),
        "remainder atom by quadrature",
    )
}

/// `R(s) = -Σ d D^{-k/2} i^s Σ_α {α^{s-k} B(2k-s, s-k) ₂F₁[k, 1-k; k-s+1; α'/(α'-α)]
/// + α'^{s-k} B(s, k-s) ₂F₁[k, 1-k; s-k+1; α'/(α'-α)]}`.
pub fn r_closed(s: Complex64, spec: &RpfSpec) -> Result<Complex64> {
    let k = spec.k();
    strip_check(s, k)?;
    let ev = spec.evaluator();
    let raw = |w: Complex64| -> Result<Complex64> {
        let mut sum = c(0.0, 0.0);
        for pp in ev.pairs() {
            // α > 0 > α': the lemma applies with (δ, ε) = (α, α'), and (α-α')^k D^{-k/2} d
            // is the stored weight times the stored gap.
            sum += lemma_terms(w, pp.alpha, pp.conj, k)? * pp.weight;
        }
        Ok(-sum)
    };
    if ev.pairs().is_empty() {
        return Ok(c(0.0, 0.0));
    }
    if near_integer(s, NEAR).is_some() {
        return circle_mean(raw, s, strip_radius(s, k));
    }
    raw(s)
}

/// `R(s) = -∫_0^∞ q*(iy) y^{s-1} dy` by quadrature.
pub fn r_quadrature(s: Complex64, spec: &RpfSpec) -> Result<Complex64> {
    let k = spec.k();
    strip_check(s, k)?;
    let ev = spec.evaluator();
    if ev.pairs().is_empty() {
        return Ok(c(0.0, 0.0));
    }
    let b = star_bounds(ev.pairs(), k);
    let sigma = s.re;
    let two_k = 2.0 * k as f64;
    let lo = -libm::log(1.0 / (sigma * TAIL)) / sigma;
    let hi = libm::log(1.0 / ((two_k - sigma) * TAIL)) / (two_k - sigma);
    let v = log_line(
        |u| {
            let y = libm::exp(u);
            ev.qstar(c(0.0, y)).unwrap_or(c(f64::NAN, f64::NAN)) * (s * u).exp()
        },
        lo,
        hi,
        TAIL * b.near_zero.max(b.at_infinity),
        "R(s) by quadrature",
    )?;
    Ok(-v)
}

/// `(a, b)` ordered structurally, with `R(s; b, a) = (-1)^k R(s; a, b)` absorbed into the sign.
type AtomKey = (HyperbolicPoint, HyperbolicPoint);

/// Atoms of one cycle: `weight · Σ multiplicity · R(s; a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomGroup {
    pub weight: f64,
    atoms: BTreeMap<AtomKey, i64>,
}

impl AtomGroup {
    fn insert(&mut self, a: HyperbolicPoint, b: HyperbolicPoint, mult: i64, k: u32) {
        let (key, m) = if a <= b {
            ((a, b), mult)
        } else if k % 2 == 1 {
            ((b, a), -mult)
        } else {
            ((b, a), mult)
        };
        let entry = self.atoms.entry(key.clone()).or_insert(0);
        *entry += m;
        if *entry == 0 {
            self.atoms.remove(&key);
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HyperbolicPoint, &HyperbolicPoint, i64)> {
        self.atoms.iter().map(|((a, b), m)| (a, b, *m))
    }
}

/// One signed atom `coeff · R(s; a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RemainderAtom {
    pub coeff: f64,
    pub multiplicity: i64,
    pub a: HyperbolicPoint,
    pub b: HyperbolicPoint,
}

/// A formal combination of remainder atoms, merged exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct RemainderExpr {
    p: u32,
    k: u32,
    groups: Vec<AtomGroup>,
}

impl RemainderExpr {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn groups(&self) -> &[AtomGroup] {
        &self.groups
    }

    pub fn atom_count(&self) -> usize {
        self.groups.iter().map(AtomGroup::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.iter().all(AtomGroup::is_empty)
    }

    pub fn atoms(&self) -> Vec<RemainderAtom> {
        let mut out = Vec::new();
        for g in &self.groups {
            for (a, b, m) in g.iter() {
                out.push(RemainderAtom {
                    coeff: g.weight * m as f64,
                    multiplicity: m,
                    a: a.clone(),
                    b: b.clone(),
                });
            }
        }
        out
    }

    /// Term-wise sum; both sides must come from the same spec.
    pub fn add(&self, other: &RemainderExpr) -> Result<RemainderExpr> {
        if self.groups.len() != other.groups.len() || self.k != other.k || self.p != other.p {
            return Err(Error::domain("remainder expressions of different shape"));
        }
        let mut out = self.clone();
        for (g, h) in out.groups.iter_mut().zip(&other.groups) {
            if g.weight != h.weight {
                return Err(Error::domain(
                    "remainder expressions with different weights",
                ));
            }
            for (a, b, m) in h.iter() {
                g.insert(a.clone(), b.clone(), m, self.k);
            }
        }
        Ok(out)
    }

    /// `Σ coeff · R(s; a, b)` through [`atom_closed`].
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let mut sum = c(0.0, 0.0);
        for atom in self.atoms() {
            sum += atom_closed(s, atom.a.to_f64(), atom.b.to_f64(), self.k)? * atom.coeff;
        }
        Ok(sum)
    }
}

/// Pre-merge atom list: for each `α ∈ Z ∩ I_j`, `+R(s; α, α')` and `-R(s; U^{j-1}α, U^{j-1}α')`,
/// each scaled by `-c D^{-k/2}` with `c = d/2`.
pub fn remainder_terms(spec: &RpfSpec) -> Result<Vec<RemainderAtom>> {
    let u = GroupElem::u(spec.ring());
    let k = spec.k();
    let mut out = Vec::new();
    for term in spec.terms() {
        let weight = remainder_weight(term.d, &term.cycle, k);
        for (alpha, &j) in term.cycle.members().iter().zip(term.cycle.indices()) {
            let m = u.power(j as i64 - 1);
            out.push(RemainderAtom {
                coeff: weight,
                multiplicity: 1,
                a: alpha.clone(),
                b: alpha.hecke_conjugate(),
            });
            out.push(RemainderAtom {
                coeff: -weight,
                multiplicity: -1,
                a: alpha.apply(&m)?,
                b: alpha.hecke_conjugate().apply(&m)?,
            });
        }
    }
    Ok(out)
}

fn remainder_weight(d: f64, cycle: &crate::quadratic_forms::SimpleCycle, k: u32) -> f64 {
    let disc = cycle.class_seed().discriminant().to_f64();
    -(d / 2.0) * libm::pow(disc, -(k as f64) / 2.0)
}

pub fn remainder_expr(spec: &RpfSpec) -> Result<RemainderExpr> {
    let u = GroupElem::u(spec.ring());
    let k = spec.k();
    let mut groups = Vec::new();
    for term in spec.terms() {
        let mut g = AtomGroup {
            weight: remainder_weight(term.d, &term.cycle, k),
            atoms: BTreeMap::new(),
        };
        for (alpha, &j) in term.cycle.members().iter().zip(term.cycle.indices()) {
            let m = u.power(j as i64 - 1);
            g.insert(alpha.clone(), alpha.hecke_conjugate(), 1, k);
            g.insert(alpha.apply(&m)?, alpha.hecke_conjugate().apply(&m)?, -1, k);
        }
        groups.push(g);
    }
    Ok(RemainderExpr {
        p: spec.p(),
        k,
        groups,
    })
}

/// `ρ(R(s; a, b)) = -R(2k-s; a-λ, b-λ)`, normalized to `R(s; U⁻¹a, U⁻¹b)`.
pub fn rho(expr: &RemainderExpr, u_inverse: &GroupElem) -> Result<RemainderExpr> {
    let mut groups = Vec::with_capacity(expr.groups.len());
    for g in &expr.groups {
        let mut h = AtomGroup {
            weight: g.weight,
            atoms: BTreeMap::new(),
        };
        for (a, b, m) in g.iter() {
            h.insert(a.apply(u_inverse)?, b.apply(u_inverse)?, m, expr.k);
        }
        groups.push(h);
    }
    Ok(RemainderExpr {
        p: expr.p,
        k: expr.k,
        groups,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondRelationReport {
    pub atoms_before_merge: usize,
    pub atoms_after_merge: usize,
    /// `Σ_j ρ^j(R)` has no atoms left.
    pub symbolic_empty: bool,
    /// Atoms surviving the symbolic sum (empty on success).
    pub witness: Vec<RemainderAtom>,
    /// `ρ^p(R) = R` exactly.
    pub rho_order_p: bool,
    pub numeric_residuals: Vec<(Complex64, f64)>,
    pub max_numeric_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Human-readable cancellation trace.
    pub trace: Vec<String>,
}

/// Symbolic and numeric check of `R + ρ(R) + … + ρ^{p-1}(R) = 0`.
///
/// The numeric side applies the last `ρ` of each power through its definition
/// `-R(2k-s; a-λ, b-λ)` rather than the normalized form.
pub fn verify_second_relation(
    spec: &RpfSpec,
    points: &[Complex64],
    tolerance: f64,
) -> Result<SecondRelationReport> {
    let k = spec.k();
    let p = spec.p();
    let lambda = spec.ring().lambda_f64();
    let u_inv = GroupElem::u(spec.ring()).inverse();
    let before = remainder_terms(spec)?.len();
    let r = remainder_expr(spec)?;
    let mut trace = Vec::new();
    trace.push(alloc::format!(
        "R: {before} atoms before merge, {} after",
        r.atom_count()
    ));
    let mut powers = Vec::with_capacity(p as usize + 1);
    powers.push(r.clone());
    for j in 1..=p {
        let next = rho(&powers[j as usize - 1], &u_inv)?;
        powers.push(next);
    }
    let rho_order_p = powers[p as usize] == r;
    let mut total = r.clone();
    for (j, pw) in powers.iter().enumerate().take(p as usize).skip(1) {
        total = total.add(pw)?;
        trace.push(alloc::format!(
            "after adding ρ^{j}(R): {} atoms",
            total.atom_count()
        ));
    }
    let symbolic_empty = total.is_empty();
    let two_k = 2.0 * k as f64;
    let mut numeric_residuals = Vec::with_capacity(points.len());
    let mut max_numeric_residual: f64 = 0.0;
    for &s in points {
        let mut sum = r.eval(s)?;
        for prev in powers.iter().take(p as usize - 1) {
            for atom in prev.atoms() {
                let a = atom.a.to_f64() - lambda;
                let b = atom.b.to_f64() - lambda;
                sum -= atom_closed(c(two_k, 0.0) - s, a, b, k)? * atom.coeff;
            }
        }
        let res = sum.norm();
        max_numeric_residual = max_numeric_residual.max(res);
        numeric_residuals.push((s, res));
    }
    Ok(SecondRelationReport {
        atoms_before_merge: before,
        atoms_after_merge: r.atom_count(),
        symbolic_empty,
        witness: total.atoms(),
        rho_order_p,
        numeric_residuals,
        max_numeric_residual,
        tolerance,
        pass: symbolic_empty && rho_order_p && max_numeric_residual <= tolerance,
        trace,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InverseMellinReport {
    pub integral: Complex64,
    pub closed: Complex64,
    pub abs_error: f64,
    /// Estimated size of the discarded contour `|Im s| > T`.
    pub truncation_estimate: f64,
}

/// `(1/2πi) ∫_{d-iT}^{d+iT} R(s; a, b) y^{-s} ds` against `(a-b)^k / ((iy-a)^k (iy-b)^k)`.
pub fn inverse_mellin_check(
    a: f64,
    b: f64,
    k: u32,
    y: f64,
    d: f64,
    t_max: f64,
) -> Result<InverseMellinReport> {
    atom_args(a, b, k)?;
    if !(y > 0.0) || !(d > 0.0 && d < 2.0 * k as f64) || !(t_max > 0.0) {
        return Err(Error::domain(
            "inverse Mellin check needs y > 0, 0 < d < 2k, T > 0",
        ));
    }
    let ly = libm::log(y);
    let integrand = |t: f64| -> Complex64 {
        let s = c(d, t);
        atom_closed(s, a, b, k).unwrap_or(c(f64::NAN, f64::NAN)) * (-s * ly).exp()
    };
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-13,
        max_intervals: 20_000,
    };
    let v = integrate_with_breaks(integrand, &breaks(-t_max, t_max, 1.0), opts)
        .into_result("inverse Mellin contour")?;
    let integral = v / (2.0 * PI);
    let closed = c(a - b, 0.0).powi(k as i32) * (c(-a, y) * c(-b, y)).powi(-(k as i32));
    // Exponential decay rate of the integrand, read off near the cut.
    let edge = |t: f64| integrand(t).norm() + integrand(-t).norm();
    let (e1, e0) = (edge(t_max), edge(t_max - 1.0));
    let truncation_estimate = if e1 == 0.0 {
        0.0
    } else if e1 < e0 {
        e1 / libm::log(e0 / e1) / (2.0 * PI)
    } else {
        f64::INFINITY
    };
    Ok(InverseMellinReport {
        integral,
        closed,
        abs_error: (integral - closed).norm(),
        truncation_estimate,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalEquationReport {
    pub residuals: Vec<(Complex64, f64)>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `Φ(s) = D(s) + E⁰(s) + E*(s)`, with `E*` from the hypergeometric continuation.
pub fn phi_eval(s: Complex64, series: Option<&FourierSeries>, spec: &RpfSpec) -> Result<Complex64> {
    let d = match series {
        Some(f) => d_eval(s, f)?,
        None => c(0.0, 0.0),
    };
    Ok(d + e0_eval(s, spec)? + estar_eval(s, spec, EstarMethod::Hypergeometric)?)
}

/// Max of `|Φ(2k-s) + Φ(s) - R(s)|` over the grid.
pub fn functional_equation_check(
    series: Option<&FourierSeries>,
    spec: &RpfSpec,
    grid: &[Complex64],
    tolerance: f64,
) -> Result<FunctionalEquationReport> {
    let two_k = spec.two_k();
    if let Some(f) = series {
        if f.weight() != two_k {
            return Err(Error::domain("series weight differs from the RPF weight"));
        }
    }
    let mut residuals = Vec::with_capacity(grid.len());
    let mut max_residual: f64 = 0.0;
    for &s in grid {
        let lhs = phi_eval(c(two_k as f64, 0.0) - s, series, spec)? + phi_eval(s, series, spec)?;
        let res = (lhs - r_closed(s, spec)?).norm();
        max_residual = max_residual.max(res);
        residuals.push((s, res));
    }
    Ok(FunctionalEquationReport {
        residuals,
        max_residual,
        tolerance,
        pass: max_residual <= tolerance,
    })
}

/// For `q = 0`: max of `|Φ(s) + Φ(2k-s)|` with `Φ` split at `y0`, where only the
/// modularity of the coefficients makes the two halves cancel.
pub fn cusp_functional_equation_check(
    series: &FourierSeries,
    grid: &[Complex64],
    y0: f64,
    tolerance: f64,
) -> Result<FunctionalEquationReport> {
    let two_k = c(series.weight() as f64, 0.0);
    let mut residuals = Vec::with_capacity(grid.len());
    let mut max_residual: f64 = 0.0;
    for &s in grid {
        let res = (d_eval_split(s, series, y0)? + d_eval_split(two_k - s, series, y0)?).norm();
        max_residual = max_residual.max(res);
        residuals.push((s, res));
    }
    Ok(FunctionalEquationReport {
        residuals,
        max_residual,
        tolerance,
        pass: max_residual <= tolerance,
    })
}

/// `|Φ(σ + it)|` along a vertical line (a smoke test of boundedness, not a proof).
pub fn vertical_profile(
    series: Option<&FourierSeries>,
    spec: &RpfSpec,
    sigma: f64,
    ts: &[f64],
) -> Result<Vec<f64>> {
    ts.iter()
        .map(|&t| phi_eval(c(sigma, t), series, spec).map(|v| v.norm()))
        .collect()
}

/// `n` points in `0 < Re s < 2k`, each at least `0.05` from every integer.
pub fn strip_grid(k: u32, n: usize) -> Vec<Complex64> {
    let width = 2.0 * k as f64;
    (0..n)
        .map(|i| {
            let mut sigma = 0.1 + (width - 0.2) * (i as f64 + 0.5) / n as f64;
            let r = libm::round(sigma);
            if (sigma - r).abs() < 0.05 {
                sigma = r + if sigma >= r { 0.07 } else { -0.07 };
            }
            let t = 0.7 * ((i % 5) as f64 - 2.0) + 0.3;
            c(sigma, t)
        })
        .collect()
}
