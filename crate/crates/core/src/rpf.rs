//! Hecke-symmetric rational period functions of weight `2k`, `k` odd.
//!
//! `q = q* + c0·q0`: `q*` sums `d·D^{-k/2}·(α-α')^k / ((z-α)^k (z-α')^k)` over the simple
//! numbers `α` of each cycle, and `q0` carries the pole at zero.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::hecke_group::GroupElem;
use crate::lambda_ring::{LambdaRing, RingElem};
use crate::quadratic_forms::{HyperbolicPoint, SimpleCycle};
use crate::real::{cabs, cpowi, lift, lower, DoubleDouble, Real};

/// Default distance below which an evaluation point counts as sitting on a real pole.
pub const POLE_GUARD: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct RpfTerm {
    pub cycle: SimpleCycle,
    pub d: f64,
}

#[derive(Clone, Debug)]
pub struct RpfSpec {
    ring: Arc<LambdaRing>,
    k: u32,
    terms: Vec<RpfTerm>,
    c0: f64,
    nu: f64,
    eta: f64,
}

impl RpfSpec {
    pub fn new(
        ring: &Arc<LambdaRing>,
        k: u32,
        terms: Vec<RpfTerm>,
        c0: f64,
        nu: f64,
        eta: f64,
    ) -> Result<RpfSpec> {
        if k == 0 || k % 2 == 0 {
            return Err(Error::domain(alloc::format!(
                "weight 2k needs k odd and positive, got k = {k}"
            )));
        }
        if k != 1 && eta != 0.0 {
            return Err(Error::domain("eta must vanish unless 2k = 2"));
        }
        for t in &terms {
            if t.cycle.p() != ring.p() {
                return Err(Error::domain("cycle belongs to a different Hecke group"));
            }
            if !t.cycle.certified() {
                return Err(Error::SymmetryViolation(
                    "cycle failed its mapping certificates".into(),
                ));
            }
            if !t.d.is_finite() {
                return Err(Error::domain("non-finite coefficient d"));
            }
        }
        if ![c0, nu, eta].iter().all(|x| x.is_finite()) {
            return Err(Error::domain("non-finite constant"));
        }
        Ok(RpfSpec {
            ring: ring.clone(),
            k,
            terms,
            c0,
            nu,
            eta,
        })
    }

    pub fn zero(ring: &Arc<LambdaRing>, k: u32) -> Result<RpfSpec> {
        RpfSpec::new(ring, k, Vec::new(), 0.0, 0.0, 0.0)
    }

    pub fn ring(&self) -> &Arc<LambdaRing> {
        &self.ring
    }

    pub fn p(&self) -> u32 {
        self.ring.p()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn two_k(&self) -> u32 {
        2 * self.k
    }

    pub fn terms(&self) -> &[RpfTerm] {
        &self.terms
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Binary64 evaluator.
    pub fn evaluator(&self) -> RpfEvaluator<f64> {
        RpfEvaluator::new(self)
    }
}

/// One pole pair of `q*` at working precision.
#[derive(Clone, Copy, Debug)]
pub struct PolePair<T> {
    /// `d·D^{-k/2}` of the owning cycle.
    pub weight: T,
    pub alpha: T,
    pub conj: T,
    /// `(α - α')^k`.
    pub gap_k: T,
}

/// Embedded coefficients of `q` and of the matrices `T` and `U^j` for `0 <= j < p`.
#[derive(Clone, Debug)]
pub struct RpfEvaluator<T: Real> {
    k: u32,
    pairs: Vec<PolePair<T>>,
    c0: T,
    nu: T,
    eta: T,
    t_matrix: [T; 4],
    u_powers: Vec<[T; 4]>,
    guard: f64,
}

fn embed<T: Real>(x: &RingElem) -> T {
    T::from_interval(&x.embed(T::BITS + 64))
}

/// Matrix entries `[a, b, c, d]` at the precision of `T`.
pub fn matrix_entries<T: Real>(m: &GroupElem) -> [T; 4] {
    let [a, b, c, d] = m.entries();
    [embed(a), embed(b), embed(c), embed(d)]
}

fn point<T: Real>(x: &HyperbolicPoint) -> T {
    T::from_interval(&x.root_value(T::BITS + 32))
}

impl<T: Real> RpfEvaluator<T> {
    pub fn new(spec: &RpfSpec) -> RpfEvaluator<T> {
        let k = spec.k;
        let mut pairs = Vec::new();
        for term in &spec.terms {
            let disc: T = embed(&term.cycle.class_seed().discriminant());
            let root = disc.sqrt();
            let mut root_k = T::one();
            for _ in 0..k {
                root_k = root_k * root;
            }
            let weight = T::from_f64(term.d) / root_k;
            for alpha in term.cycle.members() {
                let a: T = point(alpha);
                let c: T = point(&alpha.hecke_conjugate());
                let mut gap_k = T::one();
                for _ in 0..k {
                    gap_k = gap_k * (a - c);
                }
                pairs.push(PolePair {
                    weight,
                    alpha: a,
                    conj: c,
                    gap_k,
                });
            }
        }
        let ring = spec.ring();
        let u = GroupElem::u(ring);
        let mut u_powers = Vec::new();
        let mut acc = GroupElem::identity(ring);
        for _ in 0..spec.p() {
            u_powers.push(matrix_entries(&acc));
            acc = acc.compose(&u).expect("same ring");
        }
        RpfEvaluator {
            k,
            pairs,
            c0: T::from_f64(spec.c0),
            nu: T::from_f64(spec.nu),
            eta: T::from_f64(spec.eta),
            t_matrix: matrix_entries(&GroupElem::t(ring)),
            u_powers,
            guard: POLE_GUARD,
        }
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn pairs(&self) -> &[PolePair<T>] {
        &self.pairs
    }

    fn check_guard(&self, z: Complex<T>, pole: T) -> Result<()> {
        let dist = cabs(z - Complex::new(pole, T::zero()));
        if dist < self.guard {
            return Err(Error::PoleProximity {
                z: lower(z),
                pole: pole.to_f64(),
                distance: dist,
            });
        }
        Ok(())
    }

    pub fn qstar(&self, z: Complex<T>) -> Result<Complex<T>> {
        let mut sum = Complex::new(T::zero(), T::zero());
        for pp in &self.pairs {
            self.check_guard(z, pp.alpha)?;
            self.check_guard(z, pp.conj)?;
            let prod =
                (z - Complex::new(pp.alpha, T::zero())) * (z - Complex::new(pp.conj, T::zero()));
            sum = sum + cpowi(prod, -(self.k as i32)) * (pp.weight * pp.gap_k);
        }
        Ok(sum)
    }

    pub fn q0(&self, z: Complex<T>) -> Result<Complex<T>> {
        if z.re.is_zero() && z.im.is_zero() {
            return Err(Error::pole(lower(z)));
        }
        let one = Complex::new(T::one(), T::zero());
        let base = (one - cpowi(z, -2 * self.k as i32)) * self.nu;
        if self.k == 1 {
            Ok(base + cpowi(z, -1) * self.eta)
        } else {
            Ok(base)
        }
    }

    pub fn q(&self, z: Complex<T>) -> Result<Complex<T>> {
        let star = self.qstar(z)?;
        if self.c0.is_zero() {
            return Ok(star);
        }
        Ok(star + self.q0(z)? * self.c0)
    }

    /// `(q|M)(z)` for `M` given by its embedded entries.
    pub fn q_slash(&self, m: &[T; 4], z: Complex<T>) -> Result<Complex<T>> {
        slash_at(|w| self.q(w), m, 2 * self.k, z)
    }

    /// `(q|T)(z) + q(z)`.
    pub fn relation1(&self, z: Complex<T>) -> Result<Complex<T>> {
        Ok(self.q_slash(&self.t_matrix, z)? + self.q(z)?)
    }

    /// `Σ_{j<p} (q|U^j)(z)`.
    pub fn relation2(&self, z: Complex<T>) -> Result<Complex<T>> {
        let mut sum = Complex::new(T::zero(), T::zero());
        for m in &self.u_powers {
            sum = sum + self.q_slash(m, z)?;
        }
        Ok(sum)
    }
}

/// `(f|M)(z) = (cz + d)^{-2k} f(Mz)`.
pub fn slash_at<T: Real>(
    f: impl Fn(Complex<T>) -> Result<Complex<T>>,
    m: &[T; 4],
    two_k: u32,
    z: Complex<T>,
) -> Result<Complex<T>> {
    let [a, b, c, d] = *m;
    let j = z * c + Complex::new(d, T::zero());
    let w = (z * a + Complex::new(b, T::zero())) / j;
    Ok(cpowi(j, -(two_k as i32)) * f(w)?)
}

/// The weight-`2k` slash of a binary64 function by `M`.
pub fn slash<F: Fn(Complex64) -> Complex64>(
    f: F,
    m: &GroupElem,
    two_k: u32,
) -> impl Fn(Complex64) -> Complex64 {
    let entries: [f64; 4] = matrix_entries(m);
    move |z| slash_at(|w| Ok(f(w)), &entries, two_k, z).expect("infallible")
}

pub fn q0_eval(z: Complex64, spec: &RpfSpec) -> Result<Complex64> {
    spec.evaluator().q0(z)
}

pub fn qstar_eval(z: Complex64, spec: &RpfSpec) -> Result<Complex64> {
    spec.evaluator().qstar(z)
}

pub fn q_eval(z: Complex64, spec: &RpfSpec) -> Result<Complex64> {
    spec.evaluator().q(z)
}

/// Working precision for relation checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Binary64,
    DoubleDouble,
}

impl Precision {
    /// `<= 64` bits selects binary64; anything above runs in double-double (about 106 bits).
    pub fn from_bits(bits: u32) -> Result<Precision> {
        match bits {
            0..=52 => Err(Error::domain("precision must be at least 53 bits")),
            53..=64 => Ok(Precision::Binary64),
            _ => Ok(Precision::DoubleDouble),
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Binary64 => <f64 as Real>::BITS,
            Precision::DoubleDouble => DoubleDouble::BITS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationReport {
    pub name: &'static str,
    pub max_residual: f64,
    pub worst_point: Option<Complex64>,
    pub residuals: Vec<f64>,
    pub n_samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

fn sweep<T: Real>(
    name: &'static str,
    samples: &[Complex64],
    tolerance: f64,
    f: impl Fn(Complex<T>) -> Result<Complex<T>>,
) -> Result<RelationReport> {
    let mut residuals = Vec::with_capacity(samples.len());
    let mut max_residual = 0.0;
    let mut worst_point = None;
    for &z in samples {
        if z.im <= 0.0 {
            return Err(Error::domain("samples must lie in the upper half-plane"));
        }
        let r = cabs(f(lift(z))?);
        if r > max_residual || worst_point.is_none() {
            max_residual = r;
            worst_point = Some(z);
        }
        residuals.push(r);
    }
    Ok(RelationReport {
        name,
        max_residual,
        worst_point,
        residuals,
        n_samples: samples.len(),
        tolerance,
        pass: max_residual <= tolerance,
    })
}

/// Max of `|(q|T)(z) + q(z)|` over the samples.
pub fn verify_relation1(
    spec: &RpfSpec,
    samples: &[Complex64],
    tolerance: f64,
    precision: Precision,
) -> Result<RelationReport> {
    match precision {
        Precision::Binary64 => {
            let ev = RpfEvaluator::<f64>::new(spec);
            sweep("rpf1", samples, tolerance, |z| ev.relation1(z))
        }
        Precision::DoubleDouble => {
            let ev = RpfEvaluator::<DoubleDouble>::new(spec);
            sweep("rpf1", samples, tolerance, |z| ev.relation1(z))
        }
    }
}

/// Max of `|Σ_{j<p} (q|(ST)^j)(z)|` over the samples.
pub fn verify_relation2(
    spec: &RpfSpec,
    samples: &[Complex64],
    tolerance: f64,
    precision: Precision,
) -> Result<RelationReport> {
    match precision {
        Precision::Binary64 => {
            let ev = RpfEvaluator::<f64>::new(spec);
            sweep("rpf2", samples, tolerance, |z| ev.relation2(z))
        }
        Precision::DoubleDouble => {
            let ev = RpfEvaluator::<DoubleDouble>::new(spec);
            sweep("rpf2", samples, tolerance, |z| ev.relation2(z))
        }
    }
}

/// Coefficients of `(α-α')^k / ((z-α)^k (z-α')^k) = Σ_m a_m/(z-α)^m + Σ_n b_n/(z-α')^n`;
/// entry `m - 1` holds the order-`m` coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialFractionData {
    pub k: u32,
    pub alpha: f64,
    pub conj: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

fn binomial(n: u32, r: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..r {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

pub fn partial_fractions(k: u32, alpha: f64, conj: f64) -> Result<PartialFractionData> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    if alpha == conj || !alpha.is_finite() || !conj.is_finite() {
        return Err(Error::domain(
            "partial fractions need distinct finite poles",
        ));
    }
    let gap = alpha - conj;
    let sign_k = if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut a = Vec::with_capacity(k as usize);
    let mut b = Vec::with_capacity(k as usize);
    for m in 1..=k {
        let bin = binomial(2 * k - m - 1, k - 1);
        let pow = libm::pow(gap, m as f64 - k as f64);
        let sign_mk = if (k - m) % 2 == 0 { 1.0 } else { -1.0 };
        a.push(sign_mk * bin * pow);
        b.push(sign_k * bin * pow);
    }
    Ok(PartialFractionData {
        k,
        alpha,
        conj,
        a,
        b,
    })
}

impl PartialFractionData {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for m in 1..=self.k as i32 {
            sum += self.a[m as usize - 1] * (z - self.alpha).powi(-m);
            sum += self.b[m as usize - 1] * (z - self.conj).powi(-m);
        }
        sum
    }
}

/// `α ∈ I_j` paired with `U^{j-1}α`.
#[derive(Clone, Debug)]
pub struct GroupedPair {
    pub j: u32,
    pub alpha: HyperbolicPoint,
    pub image: HyperbolicPoint,
}

#[derive(Clone, Debug)]
pub struct GroupedClass {
    /// The original coefficient `d`.
    pub d: f64,
    /// `c = d/2`, the coefficient of the grouped sum.
    pub c: f64,
    pub discriminant: RingElem,
    pub pairs: Vec<GroupedPair>,
}

/// `q*(z) = Σ c Σ_{j=2}^{p} Σ_{α∈Z∩I_j} (Q_α(z)^{-k} - Q_{U^{j-1}α}(z)^{-k})`, `c = d/2`.
#[derive(Clone, Debug)]
pub struct GroupedQstar {
    pub k: u32,
    pub classes: Vec<GroupedClass>,
}

pub fn qstar_interval_form(spec: &RpfSpec) -> Result<GroupedQstar> {
    let u = GroupElem::u(spec.ring());
    let mut classes = Vec::new();
    for term in spec.terms() {
        let cycle = &term.cycle;
        let mut pairs = Vec::new();
        for (alpha, &j) in cycle.members().iter().zip(cycle.indices()) {
            let image = alpha.apply(&u.power(j as i64 - 1))?;
            // The conjugate of U^{j-1}α must again be a member.
            let back = image.hecke_conjugate();
            if !cycle.members().contains(&back) {
                return Err(Error::SymmetryViolation(alloc::format!(
                    "conjugate of U^{}α for α = {alpha:?} is not in the cycle",
                    j - 1
                )));
            }
            pairs.push(GroupedPair {
                j,
                alpha: alpha.clone(),
                image,
            });
        }
        classes.push(GroupedClass {
            d: term.d,
            c: term.d / 2.0,
            discriminant: cycle.class_seed().discriminant(),
            pairs,
        });
    }
    Ok(GroupedQstar {
        k: spec.k(),
        classes,
    })
}

impl GroupedQstar {
    /// Evaluates through the quadratic forms `Q_x(z) = A z² + B z + C` directly.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let k = self.k as i32;
        let mut sum = Complex64::new(0.0, 0.0);
        for class in &self.classes {
            let mut inner = Complex64::new(0.0, 0.0);
            for pair in &class.pairs {
                inner += pair.alpha.distinguished_form().value_at(z).powi(-k);
                inner -= pair.image.distinguished_form().value_at(z).powi(-k);
            }
            sum += inner * class.c;
        }
        sum
    }

    pub fn is_empty(&self) -> bool {
        self.classes.iter().all(|c| c.pairs.is_empty())
    }
}

/// Convenience for tests and the driver: binary64 `q` as a closure.
pub fn q_function(spec: &RpfSpec) -> impl Fn(Complex64) -> Result<Complex64> {
    let ev = spec.evaluator();
    move |z| ev.q(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic_forms::{enumerate_simple_cycle, symmetric_seed, QuadraticForm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn golden_spec(k: u32, d: f64) -> RpfSpec {
        let ring = LambdaRing::new(3).unwrap();
        let seed = QuadraticForm::from_i64(&ring, &[1], &[1], &[-1]).unwrap();
        let cycle = enumerate_simple_cycle(&seed, 12).unwrap();
        RpfSpec::new(&ring, k, alloc::vec![RpfTerm { cycle, d }], 0.0, 0.0, 0.0).unwrap()
    }

    fn samples(seed: u64, n: usize) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| c(rng.gen_range(-5.0..5.0), rng.gen_range(0.2..5.0)))
            .collect()
    }

    #[test]
    fn slash_examples() {
        let ring = LambdaRing::new(3).unwrap();
        let t = GroupElem::t(&ring);
        let f = slash(|_| c(1.0, 0.0), &t, 2);
        assert!((f(c(0.0, 1.0)) - c(-1.0, 0.0)).norm() < 1e-15);
        let id = slash(|z: Complex64| z * z + 1.0, &GroupElem::identity(&ring), 6);
        assert_eq!(id(c(0.3, 0.7)), c(0.3, 0.7) * c(0.3, 0.7) + 1.0);
    }

    #[test]
    fn slash_composes() {
        let ring = LambdaRing::new(5).unwrap();
        let (s, t, u) = crate::hecke_group::generators(5).unwrap();
        let f = |z: Complex64| (z - 0.3).powi(-3) + z;
        for (m1, m2) in [(&s, &t), (&u, &s), (&t, &u)] {
            let prod = m1.compose(m2).unwrap();
            let lhs = slash(f, &prod, 4);
            let e1: [f64; 4] = matrix_entries(m1);
            let e2: [f64; 4] = matrix_entries(m2);
            for z in samples(3, 10) {
                let inner = |w| slash_at(|x| Ok(f(x)), &e1, 4, w);
                let rhs = slash_at(inner, &e2, 4, z).unwrap();
                assert!((lhs(z) - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
            }
        }
        let _ = ring;
    }

    #[test]
    fn q0_examples() {
        let ring = LambdaRing::new(3).unwrap();
        let spec = RpfSpec::new(&ring, 3, Vec::new(), 1.0, 1.0, 0.0).unwrap();
        assert_eq!(q0_eval(c(1.0, 0.0), &spec).unwrap(), c(0.0, 0.0));
        assert!((q0_eval(c(0.0, 1.0), &spec).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
        assert!(matches!(
            q0_eval(c(0.0, 0.0), &spec),
            Err(Error::Pole { .. })
        ));
        let spec1 = RpfSpec::new(&ring, 1, Vec::new(), 1.0, 0.5, 0.25).unwrap();
        assert!((q0_eval(c(1.0, 0.0), &spec1).unwrap() - c(0.25, 0.0)).norm() < 1e-15);
        // q0|T + q0 = 0 at 2i, straight from the closed form.
        for s in [&spec, &spec1] {
            let ev = s.evaluator();
            let z = c(0.0, 2.0);
            let w = -z.inv();
            let lhs = z.powi(-(s.two_k() as i32)) * ev.q0(w).unwrap() + ev.q0(z).unwrap();
            assert!(lhs.norm() < 1e-15);
        }
        assert!(RpfSpec::new(&ring, 3, Vec::new(), 1.0, 1.0, 0.5).is_err());
        assert!(RpfSpec::new(&ring, 2, Vec::new(), 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn golden_qstar_value() {
        // d = 1: q* = Σ Q_α^{-1} = 1/(z²+z-1) + 1/(z²-z-1), which is -10/29 at 2i.
        let spec = golden_spec(1, 1.0);
        let v = qstar_eval(c(0.0, 2.0), &spec).unwrap();
        assert!((v - c(-10.0 / 29.0, 0.0)).norm() < 1e-15, "{v}");
        // d = √5 scales the same sum by √5.
        let v5 = qstar_eval(c(0.0, 2.0), &golden_spec(1, libm::sqrt(5.0))).unwrap();
        assert!(
            (v5 - c(-10.0 * libm::sqrt(5.0) / 29.0, 0.0)).norm() < 1e-15,
            "{v5}"
        );
        // Direct expansion oracle at 1 + i.
        let z = c(1.0, 1.0);
        let oracle = (z * z + z - 1.0).inv() + (z * z - z - 1.0).inv();
        assert!((q_eval(z, &spec).unwrap() - oracle).norm() < 1e-15);
        let zero = RpfSpec::zero(spec.ring(), 1).unwrap();
        assert_eq!(qstar_eval(z, &zero).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            qstar_eval(c(0.618_033_988_749_894_9, 1e-8), &spec),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn schwarz_symmetry_and_decay() {
        let spec = golden_spec(3, 1.3);
        let ev = spec.evaluator();
        for z in samples(5, 10) {
            let a = ev.qstar(z.conj()).unwrap();
            let b = ev.qstar(z).unwrap().conj();
            assert!((a - b).norm() <= 1e-14 * b.norm().max(1.0));
        }
        // q* = O(|z|^{-2k}) and q0 = O(1) along the imaginary axis.
        let ratios: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&y: &f64| ev.qstar(c(0.0, y)).unwrap().norm() * libm::pow(y, 6.0))
            .collect();
        assert!(
            (ratios[1] / ratios[0] - 1.0).abs() < 0.01
                && (ratios[2] / ratios[1] - 1.0).abs() < 0.01
        );
        let spec0 = RpfSpec::new(spec.ring(), 3, Vec::new(), 1.0, 1.0, 0.0).unwrap();
        for y in [1e2, 1e3, 1e4] {
            assert!(q0_eval(c(0.0, y), &spec0).unwrap().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn conjugate_sums_cancel() {
        // Σ Q_α^{-k} = -Σ Q_{α'}^{-k} over a symmetric cycle.
        let ring = LambdaRing::new(5).unwrap();
        let seed = QuadraticForm::from_i64(&ring, &[2, 5], &[-7, -11], &[-2, -5]).unwrap();
        let cycle = enumerate_simple_cycle(&seed, 20).unwrap();
        for z in samples(9, 10) {
            let mut lhs = c(0.0, 0.0);
            let mut rhs = c(0.0, 0.0);
            for a in cycle.members() {
                lhs += a.distinguished_form().value_at(z).powi(-3);
                rhs -= a
                    .hecke_conjugate()
                    .distinguished_form()
                    .value_at(z)
                    .powi(-3);
            }
            assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1e-3));
        }
    }

    #[test]
    fn golden_relations() {
        let spec = golden_spec(1, 0.7);
        let pts = samples(1, 100);
        let r1 = verify_relation1(&spec, &pts, 1e-10, Precision::Binary64).unwrap();
        let r2 = verify_relation2(&spec, &pts, 1e-10, Precision::Binary64).unwrap();
        assert!(
            r1.pass && r2.pass,
            "{} {}",
            r1.max_residual,
            r2.max_residual
        );
        let ring = spec.ring().clone();
        let only_q0 = RpfSpec::new(&ring, 1, Vec::new(), 2.0, 1.5, -0.5).unwrap();
        let r = verify_relation1(&only_q0, &pts, 1e-12, Precision::Binary64).unwrap();
        assert!(r.pass, "{}", r.max_residual);
        let zero = RpfSpec::zero(&ring, 3).unwrap();
        let r = verify_relation2(&zero, &pts, 0.0, Precision::Binary64).unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn larger_group_relations() {
        let ring = LambdaRing::new(5).unwrap();
        let seed = QuadraticForm::from_i64(&ring, &[2, 5], &[-7, -11], &[-2, -5]).unwrap();
        let cycle = enumerate_simple_cycle(&seed, 20).unwrap();
        let spec = RpfSpec::new(
            &ring,
            3,
            alloc::vec![RpfTerm { cycle, d: 1.0 }],
            0.5,
            1.0,
            0.0,
        )
        .unwrap();
        let pts = samples(2, 100);
        let r1 = verify_relation1(&spec, &pts, 1e-8, Precision::Binary64).unwrap();
        let r2 = verify_relation2(&spec, &pts, 1e-8, Precision::Binary64).unwrap();
        assert!(
            r1.pass && r2.pass,
            "{} {}",
            r1.max_residual,
            r2.max_residual
        );
        let r2dd = verify_relation2(&spec, &pts, 1e-10, Precision::DoubleDouble).unwrap();
        assert!(
            r2dd.pass && r2dd.max_residual <= r2.max_residual,
            "{}",
            r2dd.max_residual
        );
    }

    #[test]
    fn nonsymmetric_sums_fail_relation2() {
        // Dropping one member of the golden cycle breaks the second relation.
        let spec = golden_spec(1, 1.0);
        let ev = spec.evaluator();
        let mut partial = ev.clone();
        partial.pairs.truncate(1);
        let z = c(0.3, 0.9);
        assert!(ev.relation2(z).unwrap().norm() < 1e-12);
        assert!(partial.relation2(z).unwrap().norm() > 1e-3);
    }

    #[test]
    fn partial_fraction_examples() {
        let pf = partial_fractions(1, 2.0, -0.5).unwrap();
        assert_eq!((pf.a[0], pf.b[0]), (1.0, -1.0));
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        for k in [1u32, 3] {
            let pf = partial_fractions(k, phi, -1.0 / phi).unwrap();
            let z = c(3.0, 4.0);
            let direct = libm::pow(phi + 1.0 / phi, k as f64)
                * ((z - phi) * (z + 1.0 / phi)).powi(-(k as i32));
            assert!((pf.eval(z) - direct).norm() <= 1e-12);
        }
        assert!(partial_fractions(2, 1.0, 1.0).is_err());
    }

    /// Solve for the partial-fraction coefficients from 2k sample points.
    fn brute_force_pf(k: usize, al: f64, be: f64) -> Vec<f64> {
        let n = 2 * k;
        let pts: Vec<Complex64> = (0..n)
            .map(|i| c(0.3 * i as f64 - 1.0, 1.0 + 0.2 * i as f64))
            .collect();
        let mut m: Vec<Vec<Complex64>> = pts
            .iter()
            .map(|&z| {
                let mut row: Vec<Complex64> = (1..=k as i32).map(|j| (z - al).powi(-j)).collect();
                row.extend((1..=k as i32).map(|j| (z - be).powi(-j)));
                row.push(libm::pow(al - be, k as f64) * ((z - al) * (z - be)).powi(-(k as i32)));
                row
            })
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
                .unwrap();
            m.swap(col, piv);
            for r in 0..n {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for cc in col..=n {
                        let v = m[col][cc];
                        m[r][cc] -= f * v;
                    }
                }
            }
        }
        (0..n).map(|i| (m[i][n] / m[i][i]).re).collect()
    }

    #[test]
    fn partial_fractions_match_linear_solve() {
        let phi = (1.0 + libm::sqrt(5.0)) / 2.0;
        let pf = partial_fractions(3, phi, -1.0 / phi).unwrap();
        let brute = brute_force_pf(3, phi, -1.0 / phi);
        let ours: Vec<f64> = pf.a.iter().chain(pf.b.iter()).copied().collect();
        for (x, y) in ours.iter().zip(&brute) {
            assert!(
                (x - y).abs() <= 1e-9 * y.abs().max(1.0),
                "{ours:?} vs {brute:?}"
            );
        }
    }

    #[test]
    fn grouped_form_agrees() {
        let spec = golden_spec(1, 0.9);
        let g = qstar_interval_form(&spec).unwrap();
        let js: Vec<(u32, f64)> = g.classes[0]
            .pairs
            .iter()
            .map(|p| (p.j, p.alpha.to_f64()))
            .collect();
        assert_eq!(js.len(), 2);
        assert_eq!(js[0].0, 2);
        assert!((js[0].1 - 0.618_033_988_749_895).abs() < 1e-14);
        assert_eq!(js[1].0, 3);
        assert!((js[1].1 - 1.618_033_988_749_895).abs() < 1e-14);
        for (s, seed) in [(spec, 4u64), (symmetric_p7_spec(), 6)] {
            let g = qstar_interval_form(&s).unwrap();
            for z in samples(seed, 20) {
                let a = g.eval(z);
                let b = qstar_eval(z, &s).unwrap();
                assert!((a - b).norm() <= 1e-10 * b.norm(), "{a} vs {b}");
            }
        }
        let zero = RpfSpec::zero(&LambdaRing::new(3).unwrap(), 1).unwrap();
        assert!(qstar_interval_form(&zero).unwrap().is_empty());
    }

    fn symmetric_p7_spec() -> RpfSpec {
        let ring = LambdaRing::new(7).unwrap();
        let cycle = enumerate_simple_cycle(&symmetric_seed(&ring), 28).unwrap();
        RpfSpec::new(
            &ring,
            1,
            alloc::vec![RpfTerm { cycle, d: 1.0 }],
            0.3,
            1.0,
            0.2,
        )
        .unwrap()
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn relations_hold_for_random_constants(
            d in -3.0f64..3.0, c0 in -2.0f64..2.0, nu in -2.0f64..2.0, eta in -2.0f64..2.0,
            x in -5.0f64..5.0, y in 0.2f64..5.0,
        ) {
            let ring = LambdaRing::new(3).unwrap();
            let seed = QuadraticForm::from_i64(&ring, &[1], &[1], &[-1]).unwrap();
            let cycle = enumerate_simple_cycle(&seed, 12).unwrap();
            let spec = RpfSpec::new(&ring, 1, alloc::vec![RpfTerm { cycle, d }], c0, nu, eta).unwrap();
            let ev = spec.evaluator();
            let z = c(x, y);
            proptest::prop_assert!(ev.relation1(z).unwrap().norm() <= 1e-8);
            proptest::prop_assert!(ev.relation2(z).unwrap().norm() <= 1e-8);
        }
    }
}
