//! Binary quadratic forms over `Z[λ_p]`, the points they define, and the sets
//! of simple numbers attached to a form class.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hecke_group::{Classification, Endpoint, GroupElem, IntervalDecomposition};
use crate::interval::RealInterval;
use crate::lambda_ring::{LambdaRing, RingElem};

/// `Q(x, y) = Ax² + Bxy + Cy²`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QuadraticForm {
    a: RingElem,
    b: RingElem,
    c: RingElem,
}

impl QuadraticForm {
    pub fn new(a: RingElem, b: RingElem, c: RingElem) -> Result<QuadraticForm> {
        if a.p() != b.p() || a.p() != c.p() {
            return Err(Error::domain("form coefficients from different rings"));
        }
        Ok(QuadraticForm { a, b, c })
    }

    pub fn from_i64(
        ring: &Arc<LambdaRing>,
        a: &[i64],
        b: &[i64],
        c: &[i64],
    ) -> Result<QuadraticForm> {
        Self::new(
            RingElem::from_i64_coeffs(ring, a),
            RingElem::from_i64_coeffs(ring, b),
            RingElem::from_i64_coeffs(ring, c),
        )
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

    pub fn ring(&self) -> &Arc<LambdaRing> {
        self.a.ring()
    }

    pub fn p(&self) -> u32 {
        self.a.p()
    }

    /// `D = B² - 4AC`.
    pub fn discriminant(&self) -> RingElem {
        &(&self.b * &self.b) - &(&self.a * &self.c).scale(4)
    }

    /// `Q ∘ M`, i.e. `(x, y) ↦ Q(ax + by, cx + dy)`.
    pub fn act(&self, m: &GroupElem) -> Result<QuadraticForm> {
        if m.p() != self.p() {
            return Err(Error::domain("form and matrix from different groups"));
        }
        let [a, b, c, d] = m.entries();
        let (qa, qb, qc) = (&self.a, &self.b, &self.c);
        let na = &(&(qa * &(a * a)) + &(qb * &(a * c))) + &(qc * &(c * c));
        let nb = &(&(qa * &(a * b)).scale(2) + &(qb * &(&(a * d) + &(b * c))))
            + &(qc * &(c * d)).scale(2);
        let nc = &(&(qa * &(b * b)) + &(qb * &(b * d))) + &(qc * &(d * d));
        Ok(QuadraticForm {
            a: na,
            b: nb,
            c: nc,
        })
    }

    pub fn negate(&self) -> QuadraticForm {
        QuadraticForm {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
        }
    }

    /// `A > 0 > C`.
    pub fn is_simple(&self) -> bool {
        self.a.sign() > 0 && self.c.sign() < 0
    }

    /// `Q(z, 1)` at a complex point, in binary64.
    pub fn value_at(&self, z: Complex64) -> Complex64 {
        (z * self.a.to_f64() + self.b.to_f64()) * z + self.c.to_f64()
    }

    /// Whether the geodesic joining the two roots meets the closed standard fundamental
    /// domain `{|Re z| <= λ/2, |z| >= 1}` (binary64 test with a small inclusive slack).
    fn geodesic_meets_fundamental_domain(&self) -> bool {
        const SLACK: f64 = 1e-9;
        let a = self.a.to_f64();
        let b = self.b.to_f64();
        let d = self.discriminant().to_f64();
        if a == 0.0 || d <= 0.0 {
            return false;
        }
        let half = self.ring().lambda_f64() / 2.0;
        let center = -b / (2.0 * a);
        let radius = libm::sqrt(d) / (2.0 * a.abs());
        let lo = (center - radius).max(-half);
        let hi = (center + radius).min(half);
        if lo > hi + SLACK {
            return false;
        }
        // On the geodesic, |z|² = r² - c² + 2cx, which is linear in x.
        let f = |x: f64| radius * radius - center * center + 2.0 * center * x;
        f(lo) >= 1.0 - SLACK || f(hi) >= 1.0 - SLACK
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

/// The form `[c, d - a, -b]` of a hyperbolic matrix taken with positive trace. Its roots
/// are the fixed points of `M`.
pub fn form_from_matrix(m: &GroupElem) -> Result<QuadraticForm> {
    if m.classify() != Classification::Hyperbolic {
        return Err(Error::domain("form requested for a non-hyperbolic element"));
    }
    let [a, b, c, d] = m.entries();
    let flip = m.trace().sign() < 0;
    let q = QuadraticForm {
        a: c.clone(),
        b: d - a,
        c: -b,
    };
    Ok(if flip { q.negate() } else { q })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    /// `(-B + √D)/(2A)`.
    Plus,
    /// `(-B - √D)/(2A)`, the Hecke conjugate of the plus root.
    Minus,
}

impl Branch {
    pub fn flip(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    fn sign(self) -> i64 {
        match self {
            Branch::Plus => 1,
            Branch::Minus => -1,
        }
    }
}

/// A real quadratic irrational stored as a root of a form with `A > 0`.
///
/// The derived `Ord` is structural (for exact set keys); use [`HyperbolicPoint::cmp_value`]
/// for the order of the real numbers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HyperbolicPoint {
    form: QuadraticForm,
    branch: Branch,
}

/// `sign(u + v√D)` for `D > 0`.
fn surd_sign(u: &RingElem, v: &RingElem, d: &RingElem) -> i32 {
    let (su, sv) = (u.sign(), v.sign());
    if sv == 0 {
        return su;
    }
    if su == 0 || su == sv {
        return sv;
    }
    match (&(u * u) - &(&(v * v) * d)).sign() {
        0 => 0,
        t if t > 0 => su,
        _ => sv,
    }
}

fn ordering(sign: i32) -> Ordering {
    sign.cmp(&0)
}

impl HyperbolicPoint {
    /// The `branch` root of `form`; normalizes to a form with `A > 0`.
    pub fn new(form: QuadraticForm, branch: Branch) -> Result<HyperbolicPoint> {
        if form.discriminant().sign() <= 0 {
            return Err(Error::domain(alloc::format!(
                "form {form:?} does not have positive discriminant"
            )));
        }
        match form.a.sign() {
            0 => Err(Error::domain(alloc::format!(
                "form {form:?} has a root at ∞"
            ))),
            s if s < 0 => Ok(HyperbolicPoint {
                form: form.negate(),
                branch: branch.flip(),
            }),
            _ => Ok(HyperbolicPoint { form, branch }),
        }
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// The form `Q` with `x` as its plus root: the stored form for the plus branch and its
    /// negation for the minus branch (so that `Q_{α'} = -Q_α`).
    pub fn distinguished_form(&self) -> QuadraticForm {
        match self.branch {
            Branch::Plus => self.form.clone(),
            Branch::Minus => self.form.negate(),
        }
    }

    pub fn p(&self) -> u32 {
        self.form.p()
    }

    pub fn discriminant(&self) -> RingElem {
        self.form.discriminant()
    }

    pub fn hecke_conjugate(&self) -> HyperbolicPoint {
        HyperbolicPoint {
            form: self.form.clone(),
            branch: self.branch.flip(),
        }
    }

    /// Certified enclosure of the root, of width at most `2^-prec·max(1, |x|)`.
    pub fn root_value(&self, prec: u32) -> RealInterval {
        let prec = prec.max(32);
        let mut work = prec + 64;
        loop {
            let b = self.form.b.embed(work);
            let a2 = self.form.a.embed(work).mul_int(&2.into());
            let sd = self
                .discriminant()
                .embed(work)
                .sqrt()
                .expect("positive discriminant");
            let num = match self.branch {
                Branch::Plus => sd.sub(&b),
                Branch::Minus => sd.neg().sub(&b),
            };
            if let Some(v) = num.div(&a2) {
                let bound = libm::exp2(-(prec as f64)) * v.mag_f64().max(1.0);
                if v.width_f64() <= bound {
                    return v;
                }
            }
            work *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.root_value(64).midpoint_f64()
    }

    /// `x - x'` for the plus branch, `x' - x` for the minus branch: `±√D/A`.
    pub fn conjugate_gap(&self, prec: u32) -> RealInterval {
        let work = prec + 64;
        let sd = self
            .discriminant()
            .embed(work)
            .sqrt()
            .expect("positive discriminant");
        let g = sd.div(&self.form.a.embed(work)).expect("A > 0");
        match self.branch {
            Branch::Plus => g,
            Branch::Minus => g.neg(),
        }
    }

    /// `M x`, computed by transporting the form: the form of `Mx` is `Q ∘ M⁻¹`.
    pub fn apply(&self, m: &GroupElem) -> Result<HyperbolicPoint> {
        let q = self.distinguished_form().act(&m.inverse())?;
        if q.a.is_zero() {
            return Err(Error::domain("the image of the point is ∞"));
        }
        HyperbolicPoint::new(q, Branch::Plus)
    }

    /// Exact order of the real value relative to the finite point `e` (any point is
    /// below `∞`).
    pub fn cmp_endpoint(&self, e: &Endpoint) -> Ordering {
        if e.is_infinite() {
            return Ordering::Less;
        }
        self.cmp_fraction(e.num(), e.den())
    }

    /// Exact order relative to `n/d`, `d ≠ 0`.
    pub fn cmp_fraction(&self, n: &RingElem, d: &RingElem) -> Ordering {
        // x - n/d = (-B d - 2A n ± d√D) / (2A d), A > 0.
        let u = &(-(&self.form.b * d)) - &(&self.form.a * n).scale(2);
        let v = d.scale(self.branch.sign());
        ordering(surd_sign(&u, &v, &self.discriminant()) * d.sign())
    }

    /// Exact order of the real values. Points with equal discriminants are compared
    /// symbolically; otherwise by interval refinement.
    pub fn cmp_value(&self, other: &HyperbolicPoint) -> Ordering {
        let d = self.discriminant();
        if d == other.discriminant() {
            let (a1, b1) = (&self.form.a, &self.form.b);
            let (a2, b2) = (&other.form.a, &other.form.b);
            let u = &(a1 * b2) - &(a2 * b1);
            let v = &a2.scale(self.branch.sign()) - &a1.scale(other.branch.sign());
            return ordering(surd_sign(&u, &v, &d));
        }
        let mut prec = 64;
        while prec <= 4096 {
            let x = self.root_value(prec);
            let y = other.root_value(prec);
            let diff = x.sub(&y);
            if diff.is_positive() {
                return Ordering::Greater;
            }
            if diff.is_negative() {
                return Ordering::Less;
            }
            prec *= 2;
        }
        Ordering::Equal
    }
}

impl fmt::Debug for HyperbolicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.branch {
            Branch::Plus => '+',
            Branch::Minus => '-',
        };
        write!(f, "{:?}{} (≈ {:.6})", self.form, sign, self.to_f64())
    }
}

/// `Z_A` for a Hecke-symmetric class `A`, with the evidence that it closes up.
#[derive(Clone, Debug)]
pub struct SimpleCycle {
    class_seed: QuadraticForm,
    members: Vec<HyperbolicPoint>,
    indices: Vec<u32>,
    successor: Vec<usize>,
    orbit_count: usize,
    certificates: Vec<MappingCheck>,
    decomposition: IntervalDecomposition,
    depth_used: usize,
    forms_visited: usize,
}

/// Outcome of comparing `{β' : β ∈ Z ∩ I_{p-j+2}}` with `{U^{j-1}α : α ∈ Z ∩ I_j}`.
#[derive(Clone, Debug)]
pub struct MappingCheck {
    pub j: u32,
    pub holds: bool,
    pub conjugates: Vec<HyperbolicPoint>,
    pub images: Vec<HyperbolicPoint>,
    /// A point in one set but not the other, when the check fails.
    pub witness: Option<HyperbolicPoint>,
}

impl SimpleCycle {
    pub fn p(&self) -> u32 {
        self.class_seed.p()
    }

    pub fn class_seed(&self) -> &QuadraticForm {
        &self.class_seed
    }

    /// The simple numbers, sorted by value.
    pub fn members(&self) -> &[HyperbolicPoint] {
        &self.members
    }

    /// Interval index of each member.
    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// `successor()[i]` is the member index of `U^{j-1}(α_i')`.
    pub fn successor(&self) -> &[usize] {
        &self.successor
    }

    /// Number of orbits of the successor permutation.
    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    pub fn certificates(&self) -> &[MappingCheck] {
        &self.certificates
    }

    pub fn decomposition(&self) -> &IntervalDecomposition {
        &self.decomposition
    }

    pub fn depth_used(&self) -> usize {
        self.depth_used
    }

    pub fn forms_visited(&self) -> usize {
        self.forms_visited
    }

    pub fn certified(&self) -> bool {
        self.certificates.iter().all(|c| c.holds)
    }
}

pub fn default_max_depth(p: u32) -> usize {
    4 * p as usize
}

/// Enumerates `Z_A` for the class of `seed`.
///
/// Breadth-first search over `seed ∘ W`, `W` a word in `S, S⁻¹, T`, restricted to forms
/// whose geodesic meets the closed fundamental domain; these forms are finite in number
/// and connected through the side pairings, so the search is exhaustive once the
/// frontier empties. Every simple form is such a form or the `T`-image of one.
pub fn enumerate_simple_cycle(seed: &QuadraticForm, max_depth: usize) -> Result<SimpleCycle> {
    if seed.discriminant().sign() <= 0 {
        return Err(Error::domain(alloc::format!(
            "seed {seed:?} does not have positive discriminant"
        )));
    }
    if !seed.is_simple() {
        return Err(Error::NotSimple(alloc::format!(
            "{seed:?} does not satisfy A > 0 > C"
        )));
    }
    let ring = seed.ring().clone();
    let s = GroupElem::s(&ring);
    let moves = [s.clone(), s.inverse(), GroupElem::t(&ring)];

    let mut visited: BTreeSet<QuadraticForm> = BTreeSet::new();
    let mut frontier: Vec<QuadraticForm> = Vec::new();
    for q in [seed.clone(), seed.act(&moves[2])?] {
        if q.geodesic_meets_fundamental_domain() && visited.insert(q.clone()) {
            frontier.push(q);
        }
    }
    let mut depth = 0;
    while !frontier.is_empty() {
        if depth == max_depth {
            return Err(Error::IncompleteEnumeration {
                depth: max_depth,
                reason: alloc::format!("{} forms still unexplored", frontier.len()),
            });
        }
        let mut next = Vec::new();
        for q in &frontier {
            for g in &moves {
                let r = q.act(g)?;
                if r.geodesic_meets_fundamental_domain() && !visited.contains(&r) {
                    visited.insert(r.clone());
                    next.push(r);
                }
            }
        }
        frontier = next;
        depth += 1;
    }

    let mut simple: BTreeSet<QuadraticForm> = BTreeSet::new();
    for q in &visited {
        for r in [q.clone(), q.act(&moves[2])?] {
            if r.is_simple() {
                simple.insert(r);
            }
        }
    }
    let mut members: Vec<HyperbolicPoint> = simple
        .into_iter()
        .map(|q| HyperbolicPoint::new(q, Branch::Plus))
        .collect::<Result<_>>()?;
    members.sort_by(|x, y| x.cmp_value(y));

    let decomposition = IntervalDecomposition::new(&ring);
    let indices: Vec<u32> = members
        .iter()
        .map(|m| decomposition.index_of_point(m))
        .collect();
    let position: BTreeMap<HyperbolicPoint, usize> = members
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();

    let u = GroupElem::u(&ring);
    let mut successor = Vec::with_capacity(members.len());
    for (m, &j) in members.iter().zip(&indices) {
        let img = m.hecke_conjugate().apply(&u.power(j as i64 - 1))?;
        match position.get(&img) {
            Some(&i) => successor.push(i),
            None => {
                return Err(Error::SymmetryViolation(alloc::format!(
                    "U^{}({:?}') = {img:?} is not a simple number of the class; \
                     the class of the negated seed differs from the class of the seed",
                    j - 1,
                    m
                )))
            }
        }
    }
    let distinct: BTreeSet<usize> = successor.iter().copied().collect();
    if distinct.len() != successor.len() {
        return Err(Error::SymmetryViolation(String::from(
            "successor map is not injective",
        )));
    }
    let orbit_count = count_orbits(&successor);

    let mut cycle = SimpleCycle {
        class_seed: seed.clone(),
        members,
        indices,
        successor,
        orbit_count,
        certificates: Vec::new(),
        decomposition,
        depth_used: depth,
        forms_visited: visited.len(),
    };
    let p = ring.p();
    cycle.certificates = (2..=p)
        .map(|j| verify_mapping_lemma(&cycle, j))
        .collect::<Result<_>>()?;
    Ok(cycle)
}

fn count_orbits(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut count = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
        }
    }
    count
}

/// Exact set comparison `{β' : β ∈ Z ∩ I_{p-j+2}} = {U^{j-1}α : α ∈ Z ∩ I_j}` for `2 <= j <= p`.
pub fn verify_mapping_lemma(cycle: &SimpleCycle, j: u32) -> Result<MappingCheck> {
    let p = cycle.p();
    if !(2..=p).contains(&j) {
        return Err(Error::domain(alloc::format!("j = {j} outside 2..={p}")));
    }
    let u_pow = GroupElem::u(cycle.decomposition.ring()).power(j as i64 - 1);
    let mut conjugates = BTreeSet::new();
    let mut images = BTreeSet::new();
    for (m, &idx) in cycle.members.iter().zip(&cycle.indices) {
        if idx == p - j + 2 {
            conjugates.insert(m.hecke_conjugate());
        }
        if idx == j {
            images.insert(m.apply(&u_pow)?);
        }
    }
    let witness = conjugates.symmetric_difference(&images).next().cloned();
    Ok(MappingCheck {
        j,
        holds: witness.is_none(),
        conjugates: conjugates.into_iter().collect(),
        images: images.into_iter().collect(),
        witness,
    })
}

/// `[1, -λ, -1]`, the form of `S·Sᵀ`; its class is Hecke symmetric for every `p`.
pub fn symmetric_seed(ring: &Arc<LambdaRing>) -> QuadraticForm {
    QuadraticForm::from_i64(ring, &[1], &[0, -1], &[-1]).expect("same ring")
}
