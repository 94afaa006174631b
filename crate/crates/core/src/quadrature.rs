//! Adaptive 15-point Gauss–Kronrod quadrature for complex-valued integrands.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};

// Kronrod abscissae on [0, 1) (the node at 0 is last) and weights; Gauss weights for the
// 7-point rule at the odd-indexed abscissae (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn tol(abs_tol: f64, rel_tol: f64) -> Self {
        QuadOptions {
            abs_tol,
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
    /// Estimate of `∫|f|`, which sets the rounding floor of the error estimate.
    pub abs_integral: f64,
}

impl QuadResult {
    /// The value, or an accuracy error when the error target was not met.
    pub fn into_result(self, what: &str) -> Result<Complex64> {
        if self.converged && self.value.re.is_finite() && self.value.im.is_finite() {
            Ok(self.value)
        } else {
            Err(Error::Accuracy(alloc::format!(
                "{what}: quadrature stopped with estimated error {:e}",
                self.error
            )))
        }
    }
}

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kron * half;
    let raw = ((kron - gauss) * half).norm();
    // QUADPACK-style error scaling keeps the estimate honest on smooth panels.
    let resabs = abs_sum * half.abs();
    let mut err = if raw > 0.0 {
        let scaled = libm::pow(200.0 * raw / resabs.max(f64::MIN_POSITIVE), 1.5) * resabs;
        scaled.min(raw)
    } else {
        raw
    };
    err = err.max(50.0 * f64::EPSILON * resabs);
    (value, err, resabs)
}

/// Whether refining the panel can still shrink its error estimate.
fn above_rounding_floor(err: f64, resabs: f64) -> bool {
    err > 50.0 * f64::EPSILON * resabs * (1.0 + 1e-12)
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// `∫_a^b f(x) dx` by globally adaptive bisection of the panel with the largest error.
pub fn integrate<F: FnMut(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> QuadResult {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Like [`integrate`] over `[breaks[0], breaks[last]]`, starting from one panel per gap.
pub fn integrate_with_breaks<F: FnMut(f64) -> Complex64>(
    mut f: F,
    breaks: &[f64],
    opts: QuadOptions,
) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut evaluations = 0;
    let mut above_floor = 0usize;
    for w in breaks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (v, e, r) = gk15(&mut f, w[0], w[1]);
        above_floor += above_rounding_floor(e, r) as usize;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            err: e,
            resabs: r,
        });
        total += v;
        total_err += e;
        evaluations += 15;
    }
    if heap.is_empty() {
        return QuadResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            converged: true,
            evaluations: 0,
            abs_integral: 0.0,
        };
    }
    let mut intervals = heap.len();
    let max_intervals = opts.max_intervals.max(intervals + 1);
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if total_err <= target {
            break;
        }
        if above_floor == 0 {
            break;
        }
        if intervals >= max_intervals {
            break;
        }
        let worst: Panel = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel too narrow to split further.
            heap.push(worst);
            break;
        }
        let (v1, e1, r1) = gk15(&mut f, worst.a, mid);
        let (v2, e2, r2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        intervals += 1;
        above_floor -= above_rounding_floor(worst.err, worst.resabs) as usize;
        above_floor +=
            above_rounding_floor(e1, r1) as usize + above_rounding_floor(e2, r2) as usize;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
            resabs: r1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
            resabs: r2,
        });
    }
    // Re-sum to shed the drift of the running totals.
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut abs_integral = 0.0;
    for p in heap.iter() {
        value += p.value;
        error += p.err;
        abs_integral += p.resabs;
    }
    let target = opts.abs_tol.max(opts.rel_tol * value.norm());
    // When every panel sits at its rounding floor no refinement can do better.
    let floor = 100.0 * f64::EPSILON * abs_integral;
    QuadResult {
        value,
        error,
        converged: error <= target.max(floor),
        evaluations,
        abs_integral,
    }
}

/// `∫_a^b` of a real integrand.
pub fn integrate_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> QuadResult {
    integrate(|x| Complex64::new(f(x), 0.0), a, b, opts)
}
