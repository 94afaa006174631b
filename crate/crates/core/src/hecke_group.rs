//! Elements of the Hecke group `G_p = <S, T>/{±I}` over `Z[λ_p]`, their
//! classification and fixed points, the Möbius action, and the partition of
//! the real line by the orbit of `0` under `U = ST`.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interval::RealInterval;
use crate::lambda_ring::{LambdaRing, RingElem};
use crate::quadratic_forms::{form_from_matrix, Branch, HyperbolicPoint};

/// A determinant-one matrix over `Z[λ_p]`, stored in canonical projective form:
/// `c > 0`, or `c = 0` and `a > 0`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupElem {
    a: RingElem,
    b: RingElem,
    c: RingElem,
    d: RingElem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

/// A point of `C ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

/// `(S, T, U)` with `S = [[1, λ], [0, 1]]`, `T = [[0, -1], [1, 0]]`, `U = ST`.
pub fn generators(p: u32) -> Result<(GroupElem, GroupElem, GroupElem)> {
    let ring = LambdaRing::new(p)?;
    let s = GroupElem::s(&ring);
    let t = GroupElem::t(&ring);
    let u = s.compose(&t)?;
    Ok((s, t, u))
}

impl GroupElem {
    /// Checks `ad - bc = 1` and canonicalizes the sign.
    pub fn new(a: RingElem, b: RingElem, c: RingElem, d: RingElem) -> Result<GroupElem> {
        let p = a.p();
        if [&b, &c, &d].iter().any(|e| e.p() != p) {
            return Err(Error::domain("matrix entries from different rings"));
        }
        let det = &(&a * &d) - &(&b * &c);
        if !det.is_int(1) {
            return Err(Error::domain(alloc::format!("determinant {det} is not 1")));
        }
        Ok(Self::canonical(a, b, c, d))
    }

    fn canonical(a: RingElem, b: RingElem, c: RingElem, d: RingElem) -> GroupElem {
        let s = match c.sign() {
            0 => a.sign(),
            s => s,
        };
        if s < 0 {
            GroupElem {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            GroupElem { a, b, c, d }
        }
    }

    pub fn from_i64_entries(ring: &Arc<LambdaRing>, entries: [&[i64]; 4]) -> Result<GroupElem> {
        let [a, b, c, d] = entries.map(|e| RingElem::from_i64_coeffs(ring, e));
        Self::new(a, b, c, d)
    }

    pub fn identity(ring: &Arc<LambdaRing>) -> GroupElem {
        GroupElem {
            a: RingElem::one(ring),
            b: RingElem::zero(ring),
            c: RingElem::zero(ring),
            d: RingElem::one(ring),
        }
    }

    /// Translation `z ↦ z + λ`.
    pub fn s(ring: &Arc<LambdaRing>) -> GroupElem {
        GroupElem {
            a: RingElem::one(ring),
            b: RingElem::lambda(ring),
            c: RingElem::zero(ring),
            d: RingElem::one(ring),
        }
    }

    /// Inversion `z ↦ -1/z`.
    pub fn t(ring: &Arc<LambdaRing>) -> GroupElem {
        GroupElem {
            a: RingElem::zero(ring),
            b: RingElem::from_int(ring, -1),
            c: RingElem::one(ring),
            d: RingElem::zero(ring),
        }
    }

    /// `U = ST`, `z ↦ λ - 1/z`.
    pub fn u(ring: &Arc<LambdaRing>) -> GroupElem {
        GroupElem {
            a: RingElem::lambda(ring),
            b: RingElem::from_int(ring, -1),
            c: RingElem::one(ring),
            d: RingElem::zero(ring),
        }
    }

    pub fn ring(&self) -> &Arc<LambdaRing> {
        self.a.ring()
    }

    pub fn p(&self) -> u32 {
        self.a.p()
    }

    pub fn a(&self) -> &RingElem {
        &self.a
    }

    pub fn b(&self) -> &RingElem {
        &self.b
    }

    pub fn c(&self) -> &RingElem {
        &self.c
    }

    pub fn d(&self) -> &RingElem {
        &self.d
    }

    pub fn entries(&self) -> [&RingElem; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn compose(&self, other: &GroupElem) -> Result<GroupElem> {
        if self.p() != other.p() {
            return Err(Error::domain(alloc::format!(
                "cannot compose elements of G_{} and G_{}",
                self.p(),
                other.p()
            )));
        }
        let a = &(&self.a * &other.a) + &(&self.b * &other.c);
        let b = &(&self.a * &other.b) + &(&self.b * &other.d);
        let c = &(&self.c * &other.a) + &(&self.d * &other.c);
        let d = &(&self.c * &other.b) + &(&self.d * &other.d);
        Ok(Self::canonical(a, b, c, d))
    }

    pub fn inverse(&self) -> GroupElem {
        Self::canonical(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn power(&self, n: i64) -> GroupElem {
        let mut base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = GroupElem::identity(self.ring());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base).expect("same ring");
            }
            base = base.compose(&base).expect("same ring");
            e >>= 1;
        }
        acc
    }

    /// Equality with `±I`.
    pub fn is_identity(&self) -> bool {
        self.a.is_int(1) && self.d.is_int(1) && self.b.is_zero() && self.c.is_zero()
    }

    pub fn trace(&self) -> RingElem {
        &self.a + &self.d
    }

    pub fn classify(&self) -> Classification {
        let tr = self.trace();
        let four = RingElem::from_int(self.ring(), 4);
        match (&(&tr * &tr) - &four).sign() {
            1 => Classification::Hyperbolic,
            0 => Classification::Parabolic,
            _ => Classification::Elliptic,
        }
    }

    /// The two real fixed points `(α, α')` of a hyperbolic element with `c ≠ 0`.
    /// `α` is the `+√D` root of the associated form `[c, d - a, -b]`.
    pub fn fixed_points(&self) -> Result<(HyperbolicPoint, HyperbolicPoint)> {
        if self.classify() != Classification::Hyperbolic {
            return Err(Error::domain(
                "fixed points requested for a non-hyperbolic element",
            ));
        }
        if self.c.is_zero() {
            return Err(Error::domain("hyperbolic element with c = 0 fixes ∞"));
        }
        let q = form_from_matrix(self)?;
        let alpha = HyperbolicPoint::new(q, Branch::Plus)?;
        let conj = alpha.hecke_conjugate();
        Ok((alpha, conj))
    }

    /// Entries as binary64 values.
    pub fn entries_f64(&self) -> [f64; 4] {
        [
            self.a.to_f64(),
            self.b.to_f64(),
            self.c.to_f64(),
            self.d.to_f64(),
        ]
    }

    /// `Mz = (az + b)/(cz + d)`, with `M∞ = a/c`. A zero denominator maps to `∞`.
    pub fn mobius_apply(&self, z: ExtComplex) -> ExtComplex {
        let [a, b, c, d] = self.entries_f64();
        match z {
            ExtComplex::Infinity => {
                if self.c.is_zero() {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(Complex64::new(a / c, 0.0))
                }
            }
            ExtComplex::Finite(z) => {
                let den = z * c + d;
                if den.norm() == 0.0 {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((z * a + b) / den)
                }
            }
        }
    }

    /// Image of the projective point `(x : y)`.
    pub fn apply_projective(&self, x: &RingElem, y: &RingElem) -> (RingElem, RingElem) {
        (
            &(&self.a * x) + &(&self.b * y),
            &(&self.c * x) + &(&self.d * y),
        )
    }
}

impl fmt::Debug for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A point `num/den` of `Q(λ) ∪ {∞}` with entries in `Z[λ]`, plus a certified enclosure.
#[derive(Clone, PartialEq, Eq)]
pub struct Endpoint {
    num: RingElem,
    den: RingElem,
}

impl Endpoint {
    pub fn num(&self) -> &RingElem {
        &self.num
    }

    pub fn den(&self) -> &RingElem {
        &self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.is_zero()
    }

    /// Enclosure of `num/den`; `None` at `∞`.
    pub fn enclosure(&self, prec: u32) -> Option<RealInterval> {
        if self.is_infinite() {
            return None;
        }
        let w = prec + 32;
        self.num.embed(w).div(&self.den.embed(w))
    }

    pub fn to_f64(&self) -> f64 {
        match self.enclosure(64) {
            Some(iv) => iv.midpoint_f64(),
            None => f64::INFINITY,
        }
    }

    /// Exact order of the real number `x·1` relative to this (finite) endpoint, given
    /// `sign(x·den - num)`.
    fn orient(&self, sign_of_x_den_minus_num: i32) -> Ordering {
        (sign_of_x_den_minus_num * self.den.sign()).cmp(&0)
    }

    /// Exact comparison of the ring element `x` with the endpoint.
    pub fn cmp_ring(&self, x: &RingElem) -> Ordering {
        if self.is_infinite() {
            return Ordering::Less;
        }
        self.orient((&(x * &self.den) - &self.num).sign())
    }
}

impl fmt::Debug for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("∞")
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// The points `U^j(0)`, which cut the real line into
/// `I_j = [U^{p-j+2}(0), U^{p-j+1}(0))`, `1 <= j <= p`, with `I_1 = [-∞, 0)`.
#[derive(Clone, Debug)]
pub struct IntervalDecomposition {
    ring: Arc<LambdaRing>,
    /// `orbit[m] = U^m(0)` for `0 <= m <= p`; `orbit[1] = ∞` and `orbit[p] = orbit[0] = 0`.
    orbit: Vec<Endpoint>,
}

impl IntervalDecomposition {
    pub fn new(ring: &Arc<LambdaRing>) -> IntervalDecomposition {
        let u = GroupElem::u(ring);
        let mut orbit = Vec::new();
        let mut pt = (RingElem::zero(ring), RingElem::one(ring));
        for _ in 0..=ring.p() {
            orbit.push(Endpoint {
                num: pt.0.clone(),
                den: pt.1.clone(),
            });
            pt = u.apply_projective(&pt.0, &pt.1);
        }
        IntervalDecomposition {
            ring: ring.clone(),
            orbit,
        }
    }

    pub fn p(&self) -> u32 {
        self.ring.p()
    }

    pub fn ring(&self) -> &Arc<LambdaRing> {
        &self.ring
    }

    /// `U^m(0)` for `0 <= m <= p`.
    pub fn orbit_point(&self, m: usize) -> &Endpoint {
        &self.orbit[m]
    }

    /// Endpoints `U^j(0)` for `j = p, p-1, ..., 1` (the last is `∞`).
    pub fn endpoints(&self) -> Vec<&Endpoint> {
        (1..=self.p() as usize)
            .rev()
            .map(|j| &self.orbit[j])
            .collect()
    }

    /// Left endpoint of `I_j` (`None` for `I_1`, whose left end is `-∞`).
    pub fn left(&self, j: u32) -> Option<&Endpoint> {
        let p = self.p();
        assert!((1..=p).contains(&j), "interval index {j} out of range");
        if j == 1 {
            None
        } else {
            Some(&self.orbit[(p - j + 2) as usize])
        }
    }

    /// Right endpoint of `I_j` (`∞` for `I_p`).
    pub fn right(&self, j: u32) -> &Endpoint {
        let p = self.p();
        assert!((1..=p).contains(&j), "interval index {j} out of range");
        &self.orbit[(p - j + 1) as usize]
    }

    /// Index of the interval containing a point, given its exact comparison with each
    /// finite endpoint (`cmp(e)` is the order of the point relative to `e`).
    pub fn index_by(&self, mut cmp: impl FnMut(&Endpoint) -> Ordering) -> u32 {
        for j in (2..=self.p()).rev() {
            let left = self.left(j).expect("finite left endpoint");
            if cmp(left) != Ordering::Less {
                return j;
            }
        }
        1
    }

    /// Interval index of a binary64 value (`-∞` lies in `I_1`).
    pub fn index_of_f64(&self, x: f64) -> u32 {
        if x == f64::INFINITY {
            // Only the closure of I_p reaches +∞.
            return self.p();
        }
        self.index_by(|e| {
            let iv = e.enclosure(80).expect("finite endpoint");
            if iv.contains_f64(x) {
                // Decide exactly whether x equals the endpoint.
                let xr = RealInterval::from_f64(x, 80);
                if xr.contains(&iv) {
                    return Ordering::Equal;
                }
                let v = iv.midpoint_f64();
                return x.partial_cmp(&v).unwrap_or(Ordering::Equal);
            }
            if x < iv.lo_f64() {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }

    pub fn index_of_ring(&self, x: &RingElem) -> u32 {
        self.index_by(|e| e.cmp_ring(x))
    }

    pub fn index_of_point(&self, x: &HyperbolicPoint) -> u32 {
        self.index_by(|e| x.cmp_endpoint(e))
    }
}

/// Interval index of a real number (binary64) or of an exact hyperbolic point.
pub fn interval_index(x: &HyperbolicPoint, dec: &IntervalDecomposition) -> u32 {
    dec.index_of_point(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic_forms::QuadraticForm;
    use proptest::prelude::*;

    fn ring(p: u32) -> Arc<LambdaRing> {
        LambdaRing::new(p).unwrap()
    }

    #[test]
    fn generators_match_definitions() {
        let (s, t, u) = generators(3).unwrap();
        let r = s.ring().clone();
        let expect_u = GroupElem::from_i64_entries(&r, [&[1], &[-1], &[1], &[0]]).unwrap();
        assert_eq!(u, expect_u);
        assert!(t.a().is_zero());
        let (_, _, u5) = generators(5).unwrap();
        assert_eq!(u5, GroupElem::u(u5.ring()));
        assert_eq!(u5.a(), &RingElem::lambda(u5.ring()));
    }

    #[test]
    fn group_relations_hold() {
        for p in 3..=12 {
            let (s, t, _) = generators(p).unwrap();
            assert!(t.power(2).is_identity(), "T^2 at p={p}");
            let st = s.compose(&t).unwrap();
            assert!(st.power(p as i64).is_identity(), "(ST)^p at p={p}");
            for j in 1..p {
                assert!(!st.power(j as i64).is_identity(), "U^{j} at p={p}");
            }
        }
    }

    #[test]
    fn inverse_and_projective_equality() {
        let r = ring(7);
        let (s, t, u) = (GroupElem::s(&r), GroupElem::t(&r), GroupElem::u(&r));
        let w = s.compose(&t).unwrap().compose(&s.power(-2)).unwrap();
        assert!(w.compose(&w.inverse()).unwrap().is_identity());
        assert_eq!(u.power(-1), u.power(6));
        assert_eq!(t.inverse(), t);
    }

    #[test]
    fn classification() {
        let r = ring(3);
        assert_eq!(GroupElem::t(&r).classify(), Classification::Elliptic);
        assert_eq!(GroupElem::s(&r).classify(), Classification::Parabolic);
        let m = GroupElem::from_i64_entries(&r, [&[2], &[1], &[1], &[1]]).unwrap();
        assert_eq!(m.classify(), Classification::Hyperbolic);
        assert!(GroupElem::from_i64_entries(&r, [&[2], &[1], &[1], &[2]]).is_err());
    }

    #[test]
    fn fixed_points_of_golden_matrices() {
        let r = ring(3);
        let sqrt5 = libm::sqrt(5.0);
        let m = GroupElem::from_i64_entries(&r, [&[2], &[1], &[1], &[1]]).unwrap();
        let (a, b) = m.fixed_points().unwrap();
        assert!((a.to_f64() - (1.0 + sqrt5) / 2.0).abs() < 1e-14);
        assert!((b.to_f64() - (1.0 - sqrt5) / 2.0).abs() < 1e-14);
        let m = GroupElem::from_i64_entries(&r, [&[1], &[1], &[1], &[2]]).unwrap();
        let (a, b) = m.fixed_points().unwrap();
        assert!((a.to_f64() - (-1.0 + sqrt5) / 2.0).abs() < 1e-14);
        assert!((b.to_f64() - (-1.0 - sqrt5) / 2.0).abs() < 1e-14);
        assert!(GroupElem::s(&r).fixed_points().is_err());
    }

    #[test]
    fn fixed_points_are_equivariant() {
        let r = ring(5);
        let (s, t) = (GroupElem::s(&r), GroupElem::t(&r));
        let m = s
            .compose(&s)
            .unwrap()
            .compose(&t)
            .unwrap()
            .compose(&s)
            .unwrap()
            .compose(&t)
            .unwrap();
        assert_eq!(m.classify(), Classification::Hyperbolic);
        let v = s.compose(&t).unwrap().compose(&s.inverse()).unwrap();
        let conj = v.compose(&m).unwrap().compose(&v.inverse()).unwrap();
        let (a, b) = m.fixed_points().unwrap();
        let (ca, cb) = conj.fixed_points().unwrap();
        let mut lhs = [ca.to_f64(), cb.to_f64()];
        let mut rhs = [a.apply(&v).unwrap().to_f64(), b.apply(&v).unwrap().to_f64()];
        lhs.sort_by(f64::total_cmp);
        rhs.sort_by(f64::total_cmp);
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).abs() < 1e-12, "{lhs:?} vs {rhs:?}");
        }
    }

    #[test]
    fn mobius_action() {
        let r = ring(3);
        let i = ExtComplex::Finite(Complex64::new(0.0, 1.0));
        match GroupElem::t(&r).mobius_apply(i) {
            ExtComplex::Finite(w) => assert!((w - Complex64::new(0.0, 1.0)).norm() < 1e-15),
            ExtComplex::Infinity => panic!(),
        }
        let u = GroupElem::u(&r);
        assert_eq!(
            u.mobius_apply(ExtComplex::Finite(Complex64::new(0.0, 0.0))),
            ExtComplex::Infinity
        );
        assert_eq!(
            u.mobius_apply(ExtComplex::Infinity),
            ExtComplex::Finite(Complex64::new(1.0, 0.0))
        );
    }

    #[test]
    fn decomposition_endpoints_increase() {
        for p in 3..=12 {
            let dec = IntervalDecomposition::new(&ring(p));
            let eps = dec.endpoints();
            assert_eq!(eps.len(), p as usize);
            assert!(eps[0].num().is_zero());
            assert!(eps[p as usize - 1].is_infinite());
            assert!(
                dec.orbit_point(0) == dec.orbit_point(p as usize)
                    || dec.orbit_point(p as usize).num().is_zero()
            );
            for w in eps.windows(2) {
                if !w[1].is_infinite() {
                    assert!(w[0].to_f64() < w[1].to_f64(), "p={p}: {:?}", w);
                }
            }
        }
    }

    #[test]
    fn interval_index_for_p3() {
        let dec = IntervalDecomposition::new(&ring(3));
        assert_eq!(dec.index_of_f64(-0.5), 1);
        assert_eq!(dec.index_of_f64(0.618), 2);
        assert_eq!(dec.index_of_f64(1.618), 3);
        assert_eq!(dec.index_of_f64(0.0), 2);
        assert_eq!(dec.index_of_f64(1.0), 3);
        assert_eq!(dec.index_of_f64(f64::NEG_INFINITY), 1);
        let r = dec.ring().clone();
        assert_eq!(dec.index_of_ring(&RingElem::from_int(&r, 1)), 3);
        assert_eq!(dec.index_of_ring(&RingElem::from_int(&r, 0)), 2);
        let q = QuadraticForm::from_i64(&r, &[1], &[1], &[-1]).unwrap();
        let alpha = HyperbolicPoint::new(q, Branch::Plus).unwrap();
        assert_eq!(interval_index(&alpha, &dec), 2);
        assert_eq!(interval_index(&alpha.hecke_conjugate(), &dec), 1);
    }

    #[test]
    fn u_shifts_intervals_at_endpoints() {
        for p in 3..=9 {
            let r = ring(p);
            let dec = IntervalDecomposition::new(&r);
            let u = GroupElem::u(&r);
            for j in 2..=p {
                // U maps the left endpoint of I_j to the left endpoint of I_{j-1}.
                let l = dec.left(j).unwrap();
                let img = u.apply_projective(l.num(), l.den());
                let target = if j == 2 {
                    // Left end of I_1 is U(0) = ∞ read as -∞.
                    assert!(img.1.is_zero());
                    continue;
                } else {
                    dec.left(j - 1).unwrap()
                };
                assert!((&(&img.0 * target.den()) - &(&img.1 * target.num())).is_zero());
            }
        }
    }

    proptest! {
        #[test]
        fn u_maps_interval_interiors(p in 3u32..10, t in 0.001f64..0.999, j0 in 0u32..64) {
            let r = ring(p);
            let dec = IntervalDecomposition::new(&r);
            let j = 1 + j0 % p;
            let x = match j {
                1 => -1.0 / t + 1.0,
                _ => {
                    let lo = dec.left(j).unwrap().to_f64();
                    let hi = dec.right(j).to_f64();
                    if hi.is_infinite() { lo + 1.0 / t } else { lo + t * (hi - lo) }
                }
            };
            let u = GroupElem::u(&r);
            if let ExtComplex::Finite(w) = u.mobius_apply(ExtComplex::Finite(Complex64::new(x, 0.0))) {
                let expect = if j == 1 { p } else { j - 1 };
                prop_assert_eq!(dec.index_of_f64(w.re), expect);
            }
        }

        #[test]
        fn composition_is_associative(w in proptest::collection::vec(0u8..3, 1..12)) {
            let r = ring(5);
            let gens = [GroupElem::s(&r), GroupElem::s(&r).inverse(), GroupElem::t(&r)];
            let mut acc = GroupElem::identity(&r);
            for &g in &w {
                acc = acc.compose(&gens[g as usize]).unwrap();
            }
            let mut acc2 = GroupElem::identity(&r);
            for &g in w.iter().rev() {
                acc2 = gens[g as usize].compose(&acc2).unwrap();
            }
            prop_assert_eq!(&acc, &acc2);
            let det = &(acc.a() * acc.d()) - &(acc.b() * acc.c());
            prop_assert!(det.is_int(1));
        }
    }
}
