//! Order oracles and the constructions between circular and left orders.

use std::fmt::Debug;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::group::Group;
use crate::spec::{Element, GroupSpec};

/// Where an oracle came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    DescriptorBuilt,
    LiftedQuotient,
    EmbeddingInduced,
    UserSupplied,
}

type TripleFn<E> = dyn Fn(&E, &E, &E) -> i8 + Send + Sync;
type SignFn<E> = dyn Fn(&E) -> i8 + Send + Sync;
pub type Membership<E> = Arc<dyn Fn(&E) -> bool + Send + Sync>;
pub type Section<E, F> = Arc<dyn Fn(&E) -> F + Send + Sync>;

/// A circular order `c: G³ → {−1, 0, 1}`.
pub struct CircularOrderOracle<E> {
    f: Arc<TripleFn<E>>,
    pub provenance: Provenance,
}

impl<E> Clone for CircularOrderOracle<E> {
    fn clone(&self) -> Self {
        CircularOrderOracle { f: self.f.clone(), provenance: self.provenance }
    }
}

impl<E: PartialEq> CircularOrderOracle<E> {
    pub fn new<F>(provenance: Provenance, f: F) -> Self
    where
        F: Fn(&E, &E, &E) -> i8 + Send + Sync + 'static,
    {
        CircularOrderOracle { f: Arc::new(f), provenance }
    }

    /// Degenerate triples are 0 before anything else is consulted.
    pub fn eval(&self, a: &E, b: &E, c: &E) -> i8 {
        if a == b || b == c || a == c {
            return 0;
        }
        (self.f)(a, b, c)
    }
}

/// A left order, given by the sign of each element relative to the identity.
pub struct LeftOrderOracle<E> {
    f: Arc<SignFn<E>>,
}

impl<E> Clone for LeftOrderOracle<E> {
    fn clone(&self) -> Self {
        LeftOrderOracle { f: self.f.clone() }
    }
}

impl<E> LeftOrderOracle<E> {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&E) -> i8 + Send + Sync + 'static,
    {
        LeftOrderOracle { f: Arc::new(f) }
    }

    pub fn sign(&self, g: &E) -> i8 {
        (self.f)(g)
    }
}

/// `a < b` in the left order, i.e. `a^{-1} b > id`.
pub fn lo_less<G: Group>(group: &G, lo: &LeftOrderOracle<G::Elem>, a: &G::Elem, b: &G::Elem) -> bool {
    lo.sign(&group.left_div(a, b)) > 0
}

/// Sign of the permutation sorting `(a, b, c)`; 0 if two coincide.
pub fn sort_sign<E: PartialEq>(a: &E, b: &E, c: &E, less: impl Fn(&E, &E) -> bool) -> i8 {
    if a == b || b == c || a == c {
        return 0;
    }
    let inversions = less(b, a) as u8 + less(c, a) as u8 + less(c, b) as u8;
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The circular order induced by a left order.
pub fn linear_circular_order<G>(group: Arc<G>, lo: LeftOrderOracle<G::Elem>) -> CircularOrderOracle<G::Elem>
where
    G: Group + Send + Sync + 'static,
{
    CircularOrderOracle::new(Provenance::DescriptorBuilt, move |a, b, c| {
        sort_sign(a, b, c, |x, y| lo_less(&*group, &lo, x, y))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    Cocycle,
    Degeneracy,
    Symmetry,
    LeftInvariance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderViolation<E> {
    pub kind: ViolationKind,
    pub witness: Vec<E>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleReport<E> {
    pub quadruples: usize,
    pub violation_count: usize,
    /// The first few violations, with witnesses.
    pub violations: Vec<OrderViolation<E>>,
}

impl<E> CocycleReport<E> {
    pub fn is_ok(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SampleConfig {
    /// Samples up to this size are checked on every quadruple.
    pub exhaustive_limit: usize,
    pub random_quadruples: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { exhaustive_limit: 10, random_quadruples: 1000, seed: 1 }
    }
}

const KEPT_VIOLATIONS: usize = 16;

/// Check the cocycle identity, nondegeneracy, symmetry and left-invariance.
pub fn check_cocycle<G: Group>(
    group: &G,
    c: &CircularOrderOracle<G::Elem>,
    sample: &[G::Elem],
    cfg: SampleConfig,
) -> CocycleReport<G::Elem> {
    let mut report = CocycleReport { quadruples: 0, violation_count: 0, violations: Vec::new() };
    if sample.is_empty() {
        return report;
    }
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let n = sample.len();
    let quads: Box<dyn Iterator<Item = [usize; 4]>> = if n <= cfg.exhaustive_limit {
        Box::new((0..n.pow(4)).map(move |x| [x % n, (x / n) % n, (x / n / n) % n, x / n / n / n]))
    } else {
        let picks: Vec<[usize; 4]> =
            (0..cfg.random_quadruples).map(|_| std::array::from_fn(|_| rng.gen_range(0..n))).collect();
        Box::new(picks.into_iter())
    };
    let mut rng = StdRng::seed_from_u64(cfg.seed.wrapping_add(1));
    let push = |report: &mut CocycleReport<G::Elem>, kind, witness: Vec<G::Elem>| {
        report.violation_count += 1;
        if report.violations.len() < KEPT_VIOLATIONS {
            report.violations.push(OrderViolation { kind, witness });
        }
    };
    for [i, j, k, l] in quads {
        report.quadruples += 1;
        let (a1, a2, a3, a4) = (&sample[i], &sample[j], &sample[k], &sample[l]);
        let v = c.eval(a2, a3, a4) - c.eval(a1, a3, a4) + c.eval(a1, a2, a4) - c.eval(a1, a2, a3);
        if v != 0 {
            push(&mut report, ViolationKind::Cocycle, vec![a1.clone(), a2.clone(), a3.clone(), a4.clone()]);
        }
        let t = c.eval(a1, a2, a3);
        let degenerate = a1 == a2 || a2 == a3 || a1 == a3;
        if degenerate != (t == 0) || !(-1..=1).contains(&t) {
            push(&mut report, ViolationKind::Degeneracy, vec![a1.clone(), a2.clone(), a3.clone()]);
        }
        if c.eval(a2, a3, a1) != t || c.eval(a2, a1, a3) != -t {
            push(&mut report, ViolationKind::Symmetry, vec![a1.clone(), a2.clone(), a3.clone()]);
        }
        let g = &sample[rng.gen_range(0..n)];
        let moved = c.eval(&group.mul(g, a1), &group.mul(g, a2), &group.mul(g, a3));
        if moved != t {
            push(&mut report, ViolationKind::LeftInvariance, vec![g.clone(), a1.clone(), a2.clone(), a3.clone()]);
        }
    }
    report
}

/// Left-order laws on a sample: `sign(g) = 0` iff `g = id`, `sign(g^{-1}) = −sign(g)`,
/// and the positive cone is closed under products within the sample.
pub fn check_left_order<G: Group>(group: &G, lo: &LeftOrderOracle<G::Elem>, sample: &[G::Elem]) -> Vec<Vec<G::Elem>> {
    let mut bad = Vec::new();
    for g in sample {
        let s = lo.sign(g);
        if (s == 0) != group.is_identity(g) || lo.sign(&group.inv(g)) != -s {
            bad.push(vec![g.clone()]);
        }
    }
    for g in sample.iter().filter(|g| lo.sign(g) > 0) {
        for h in sample.iter().filter(|h| lo.sign(h) > 0) {
            if lo.sign(&group.mul(g, h)) <= 0 {
                bad.push(vec![g.clone(), h.clone()]);
            }
        }
    }
    bad
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("RestrictionClosureFailure: {g:?}, {h:?}")]
pub struct RestrictionClosureFailure<E: Debug> {
    pub g: E,
    pub h: E,
}

fn is_positive<G: Group>(group: &G, c: &CircularOrderOracle<G::Elem>, h: &G::Elem) -> bool {
    c.eval(&group.inv(h), &group.identity(), h) == 1
}

/// Left order on a subgroup from `P = {h : c(h^{-1}, id, h) = 1}`, with the
/// closure condition verified on the sample.
pub fn restriction_order<G>(
    group: Arc<G>,
    c: &CircularOrderOracle<G::Elem>,
    member: Membership<G::Elem>,
    sample: &[G::Elem],
) -> Result<LeftOrderOracle<G::Elem>, RestrictionClosureFailure<G::Elem>>
where
    G: Group + Send + Sync + 'static,
{
    let hs: Vec<&G::Elem> = sample.iter().filter(|g| member(g)).collect();
    for &h in &hs {
        if !group.is_identity(h) && group.inv(h) == *h {
            return Err(RestrictionClosureFailure { g: h.clone(), h: h.clone() });
        }
    }
    let pos: Vec<&G::Elem> = hs.iter().copied().filter(|h| is_positive(&*group, c, h)).collect();
    for &g in &pos {
        for &h in &pos {
            if !is_positive(&*group, c, &group.mul(g, h)) {
                return Err(RestrictionClosureFailure { g: g.clone(), h: h.clone() });
            }
        }
    }
    let c = c.clone();
    Ok(LeftOrderOracle::new(move |h| {
        if group.is_identity(h) {
            0
        } else if is_positive(&*group, &c, h) {
            1
        } else {
            -1
        }
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ConvexWitness<E> {
    /// `h_1 < id < h_2` in the restricted order, `c(h_1, g, h_2) = c(h_1, id, h_2) = 1`, `g` outside.
    Trapped { h1: E, g: E, h2: E },
    /// The subgroup is not left-ordered by restriction.
    NotLeftOrdered { g: E, h: E },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexReport<E> {
    pub convex: bool,
    pub witness: Option<ConvexWitness<E>>,
}

/// Bounded convexity check on a ball.
pub fn check_convex<G>(
    group: Arc<G>,
    c: &CircularOrderOracle<G::Elem>,
    member: Membership<G::Elem>,
    ball: &[G::Elem],
) -> ConvexReport<G::Elem>
where
    G: Group + Send + Sync + 'static,
{
    let lo = match restriction_order(group.clone(), c, member.clone(), ball) {
        Ok(lo) => lo,
        Err(RestrictionClosureFailure { g, h }) => {
            return ConvexReport { convex: false, witness: Some(ConvexWitness::NotLeftOrdered { g, h }) }
        }
    };
    let id = group.identity();
    let (inside, outside): (Vec<&G::Elem>, Vec<&G::Elem>) = ball.iter().partition(|g| member(g));
    for &h1 in inside.iter().filter(|h| lo.sign(h) < 0) {
        for &h2 in inside.iter().filter(|h| lo.sign(h) > 0) {
            if c.eval(h1, &id, h2) != 1 {
                continue;
            }
            if let Some(&g) = outside.iter().find(|g| c.eval(h1, g, h2) == 1) {
                let witness = ConvexWitness::Trapped { h1: h1.clone(), g: g.clone(), h2: h2.clone() };
                return ConvexReport { convex: false, witness: Some(witness) };
            }
        }
    }
    ConvexReport { convex: true, witness: None }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("RepresentativeDependence: {witness:?}")]
pub struct RepresentativeDependence<E: Debug> {
    pub witness: Vec<E>,
}

/// `c_H(g_1 H, g_2 H, g_3 H) = c(g_1, g_2, g_3)` evaluated on transversal
/// representatives, spot-checked for independence of the representatives.
pub fn quotient_order<G>(
    group: Arc<G>,
    c: &CircularOrderOracle<G::Elem>,
    transversal: Section<G::Elem, G::Elem>,
    sample_g: &[G::Elem],
    sample_h: &[G::Elem],
) -> Result<CircularOrderOracle<G::Elem>, RepresentativeDependence<G::Elem>>
where
    G: Group + Send + Sync + 'static,
{
    let reps: Vec<G::Elem> = sample_g.iter().map(|g| transversal(g)).collect();
    for (i, g1) in sample_g.iter().enumerate() {
        for (j, g2) in sample_g.iter().enumerate() {
            for (k, g3) in sample_g.iter().enumerate() {
                if reps[i] == reps[j] || reps[j] == reps[k] || reps[i] == reps[k] {
                    continue;
                }
                let base = c.eval(g1, g2, g3);
                for (x, h) in sample_h.iter().enumerate() {
                    let h2 = &sample_h[(x + 1) % sample_h.len()];
                    let h3 = &sample_h[(x + 2) % sample_h.len()];
                    let moved = c.eval(&group.mul(g1, h), &group.mul(g2, h2), &group.mul(g3, h3));
                    if moved != base {
                        return Err(RepresentativeDependence {
                            witness: vec![g1.clone(), g2.clone(), g3.clone(), h.clone()],
                        });
                    }
                }
            }
        }
    }
    let c = c.clone();
    Ok(CircularOrderOracle::new(Provenance::LiftedQuotient, move |a, b, d| {
        c.eval(&transversal(a), &transversal(b), &transversal(d))
    }))
}

/// The circular order on `G` built from a left order on a normal subgroup `H`
/// and a circular order on `G/H` (given on transversal representatives).
pub fn assemble<G>(
    group: Arc<G>,
    lo_h: LeftOrderOracle<G::Elem>,
    member: Membership<G::Elem>,
    cbar: CircularOrderOracle<G::Elem>,
    transversal: Section<G::Elem, G::Elem>,
) -> CircularOrderOracle<G::Elem>
where
    G: Group + Send + Sync + 'static,
{
    CircularOrderOracle::new(Provenance::DescriptorBuilt, move |g1, g2, g3| {
        let same = |x: &G::Elem, y: &G::Elem| member(&group.left_div(x, y));
        let h_less_id = |x: &G::Elem| lo_h.sign(x) < 0;
        let (s12, s23, s13) = (same(g1, g2), same(g2, g3), same(g1, g3));
        let pm = |b: bool| if b { 1 } else { -1 };
        match (s12, s23, s13) {
            (true, true, _) => {
                let x = group.left_div(g1, g2);
                let y = group.left_div(g1, g3);
                let id = group.identity();
                sort_sign(&id, &x, &y, |p, q| lo_less(&*group, &lo_h, p, q))
            }
            (false, false, false) => cbar.eval(&transversal(g1), &transversal(g2), &transversal(g3)),
            (true, _, _) => pm(h_less_id(&group.left_div(g2, g1))),
            (_, true, _) => pm(h_less_id(&group.left_div(g3, g2))),
            (_, _, true) => pm(h_less_id(&group.left_div(g1, g3))),
        }
    })
}

/// The central extension `G × Z` (or `G × Z_q`) with cocycle `f_{a,b}`.
pub struct LiftedGroup<G: Group> {
    pub base: Arc<G>,
    pub c: CircularOrderOracle<G::Elem>,
    pub modulus: Option<i64>,
}

impl<G: Group> Clone for LiftedGroup<G> {
    fn clone(&self) -> Self {
        LiftedGroup { base: self.base.clone(), c: self.c.clone(), modulus: self.modulus }
    }
}

impl<G: Group> LiftedGroup<G> {
    pub fn f(&self, a: &G::Elem, b: &G::Elem) -> i64 {
        if self.base.is_identity(a) || self.base.is_identity(b) {
            return 0;
        }
        let ab = self.base.mul(a, b);
        if self.base.is_identity(&ab) {
            return 1;
        }
        if self.c.eval(&self.base.identity(), a, &ab) == 1 {
            0
        } else {
            1
        }
    }

    fn reduce(&self, n: i64) -> i64 {
        match self.modulus {
            Some(q) => n.rem_euclid(q),
            None => n,
        }
    }

    pub fn zeta(&self) -> (G::Elem, i64) {
        (self.base.identity(), self.reduce(1))
    }

    /// `(a, n) > id` iff `n ≥ 1`, or `n = 0` and `a ≠ id`.
    pub fn order(&self) -> LeftOrderOracle<(G::Elem, i64)>
    where
        G: Send + Sync + 'static,
    {
        assert!(self.modulus.is_none(), "only the integer lift is left-ordered");
        let base = self.base.clone();
        LeftOrderOracle::new(move |(a, n): &(G::Elem, i64)| match n.cmp(&0) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => {
                if base.is_identity(a) {
                    0
                } else {
                    1
                }
            }
        })
    }
}

impl<G: Group> Group for LiftedGroup<G> {
    type Elem = (G::Elem, i64);

    fn identity(&self) -> Self::Elem {
        (self.base.identity(), 0)
    }

    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        let f = self.f(&x.0, &y.0);
        (self.base.mul(&x.0, &y.0), self.reduce(x.1 + y.1 + f))
    }

    fn inv(&self, x: &Self::Elem) -> Self::Elem {
        let ai = self.base.inv(&x.0);
        let f = self.f(&x.0, &ai);
        (ai, self.reduce(-x.1 - f))
    }

    fn generators(&self) -> Vec<Self::Elem> {
        let mut g: Vec<_> = self.base.generators().into_iter().map(|a| (a, 0)).collect();
        g.push(self.zeta());
        g
    }
}

/// Construction of the lifted left-ordered group.
pub fn lift<G: Group>(base: Arc<G>, c: CircularOrderOracle<G::Elem>) -> LiftedGroup<G> {
    LiftedGroup { base, c, modulus: None }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("BadSection: representative {rep:?} of {elem:?} is not in [id, zeta)")]
pub struct BadSection<E: Debug, F: Debug> {
    pub elem: E,
    pub rep: F,
}

/// Circular order on `H/⟨ζ⟩` from minimal representatives.
pub fn quotient_by_central<H, E>(
    group: Arc<H>,
    lo: LeftOrderOracle<H::Elem>,
    zeta: H::Elem,
    section: Section<E, H::Elem>,
    verify: &[E],
) -> Result<CircularOrderOracle<E>, BadSection<E, H::Elem>>
where
    H: Group + Send + Sync + 'static,
    E: Clone + PartialEq + Debug + 'static,
{
    for e in verify {
        let rep = section(e);
        if lo.sign(&rep) < 0 || !lo_less(&*group, &lo, &rep, &zeta) {
            return Err(BadSection { elem: e.clone(), rep });
        }
    }
    Ok(CircularOrderOracle::new(Provenance::LiftedQuotient, move |a, b, c| {
        let (ra, rb, rc) = (section(a), section(b), section(c));
        sort_sign(&ra, &rb, &rc, |x, y| lo_less(&*group, &lo, x, y))
    }))
}

/// `quotient_by_central(lift(c))` with the section `g ↦ (g, 0)`.
pub fn lift_roundtrip<G>(
    base: Arc<G>,
    c: CircularOrderOracle<G::Elem>,
    verify: &[G::Elem],
) -> CircularOrderOracle<G::Elem>
where
    G: Group + Send + Sync + 'static,
    G::Elem: Send + Sync + 'static,
{
    let lifted = Arc::new(lift(base, c));
    let lo = lifted.order();
    let zeta = lifted.zeta();
    quotient_by_central(lifted, lo, zeta, Arc::new(|g: &G::Elem| (g.clone(), 0)), verify)
        .expect("(g, 0) is the minimal representative")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ArchimedeanVerdict<E> {
    /// `c(id, g^n, f) = 1` (resp. `id < g^n < f`) for every `1 ≤ n ≤ N`.
    Failure {
        f: E,
        g: E,
    },
    NoFailureUpTo(usize),
}

impl<E> ArchimedeanVerdict<E> {
    pub fn is_failure(&self) -> bool {
        matches!(self, ArchimedeanVerdict::Failure { .. })
    }
}

/// Circular Archimedean test for one pair.
pub fn check_archimedean<G: Group>(
    group: &G,
    c: &CircularOrderOracle<G::Elem>,
    f: &G::Elem,
    g: &G::Elem,
    bound: usize,
) -> ArchimedeanVerdict<G::Elem> {
    let id = group.identity();
    let mut p = id.clone();
    for _ in 0..bound {
        p = group.mul(&p, g);
        if c.eval(&id, &p, f) != 1 {
            return ArchimedeanVerdict::NoFailureUpTo(bound);
        }
    }
    ArchimedeanVerdict::Failure { f: f.clone(), g: g.clone() }
}

/// Left-order Archimedean test for one pair: failure when `id < g^n < f` for all `n ≤ N`.
pub fn check_archimedean_left<G: Group>(
    group: &G,
    lo: &LeftOrderOracle<G::Elem>,
    f: &G::Elem,
    g: &G::Elem,
    bound: usize,
) -> ArchimedeanVerdict<G::Elem> {
    let mut p = group.identity();
    for _ in 0..bound {
        p = group.mul(&p, g);
        if lo.sign(&p) <= 0 || !lo_less(group, lo, &p, f) {
            return ArchimedeanVerdict::NoFailureUpTo(bound);
        }
    }
    ArchimedeanVerdict::Failure { f: f.clone(), g: g.clone() }
}

/// A triple and a right multiplier with `c(g_1 h, g_2 h, g_3 h) ≠ c(g_1, g_2, g_3)`.
pub fn right_invariance_failure<G: Group>(
    group: &G,
    c: &CircularOrderOracle<G::Elem>,
    sample: &[G::Elem],
) -> Option<[G::Elem; 4]> {
    for a in sample {
        for b in sample {
            for d in sample {
                let t = c.eval(a, b, d);
                for h in sample {
                    if c.eval(&group.mul(a, h), &group.mul(b, h), &group.mul(d, h)) != t {
                        return Some([a.clone(), b.clone(), d.clone(), h.clone()]);
                    }
                }
            }
        }
    }
    None
}

/// A pair and a right multiplier with `a < b` but not `ah < bh`.
pub fn right_invariance_failure_left<G: Group>(
    group: &G,
    lo: &LeftOrderOracle<G::Elem>,
    sample: &[G::Elem],
) -> Option<[G::Elem; 3]> {
    for a in sample {
        for b in sample {
            if !lo_less(group, lo, a, b) {
                continue;
            }
            for h in sample {
                if !lo_less(group, lo, &group.mul(a, h), &group.mul(b, h)) {
                    return Some([a.clone(), b.clone(), h.clone()]);
                }
            }
        }
    }
    None
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("NoPositiveGenerator: no power of z is in positive cyclic order")]
pub struct NoPositiveGenerator;

/// The exponent `u` (coprime to `n`) such that `id, z^u, z^{2u}, …` is in positive cyclic order.
pub fn positive_generator(spec: &GroupSpec, c: &CircularOrderOracle<Element>) -> Result<u32, NoPositiveGenerator> {
    let n = spec.n();
    if n == 0 {
        return Err(NoPositiveGenerator);
    }
    let id = spec.identity();
    (1..n.max(2))
        .filter(|&u| num_integer::gcd(u, n) == 1)
        .find(|&u| {
            let z0 = spec.pow(&spec.z(), u as i64);
            (1..n as i64 - 1).all(|i| c.eval(&id, &spec.pow(&z0, i), &spec.pow(&z0, i + 1)) == 1)
        })
        .ok_or(NoPositiveGenerator)
}

/// Result of passing to `Ḡ = G/⟨z²⟩`.
pub struct Z2Quotient {
    pub u: u32,
    /// The order on `Ḡ`, whose elements are normal forms with `k ∈ {0, 1}`.
    pub cbar: CircularOrderOracle<Element>,
    spec: Arc<GroupSpec>,
    c: CircularOrderOracle<Element>,
}

impl Z2Quotient {
    pub fn quotient_spec(&self) -> GroupSpec {
        self.spec.with_n(2)
    }

    fn z0(&self) -> Element {
        self.spec.pow(&self.spec.z(), self.u as i64)
    }

    /// Minimal representative in `G` of the class of `g`.
    pub fn min_rep(&self, g: &Element) -> Element {
        min_rep(&self.spec, &self.c, self.u, g)
    }

    /// `r(g)` with `g = g_min · z_0^{2 r(g)}`.
    pub fn r(&self, g: &Element) -> i64 {
        let m = self.min_rep(g);
        let d = self.spec.left_div(&m, g);
        let z02 = self.spec.pow(&self.z0(), 2);
        let q = self.spec.n() as i64 / 2;
        (0..q).find(|&r| self.spec.pow(&z02, r) == d).expect("classes differ by a power of z^2")
    }
}

fn min_rep(spec: &GroupSpec, c: &CircularOrderOracle<Element>, u: u32, g: &Element) -> Element {
    let n = spec.n();
    let base = spec.element(g.k % 2, g.e.clone());
    if n == 2 || (base.is_identity() && g.k.is_multiple_of(2)) {
        return base;
    }
    let z0 = spec.pow(&spec.z(), u as i64);
    let z02 = spec.pow(&z0, 2);
    let id = spec.identity();
    let mut x = base;
    for _ in 0..n / 2 {
        if c.eval(&id, &x, &z02) == 1 {
            return x;
        }
        x = spec.mul(&x, &z02);
    }
    panic!("no minimal representative: the input is not a circular order")
}

/// Pass from an order on `G` to the induced order on `G/⟨z²⟩`.
pub fn z2_quotient(spec: Arc<GroupSpec>, c: CircularOrderOracle<Element>) -> Result<Z2Quotient, NoPositiveGenerator> {
    let u = positive_generator(&spec, &c)?;
    let (s2, c2) = (spec.clone(), c.clone());
    let cbar = CircularOrderOracle::new(Provenance::LiftedQuotient, move |a, b, d| {
        let m = |x: &Element| min_rep(&s2, &c2, u, x);
        c2.eval(&m(a), &m(b), &m(d))
    });
    Ok(Z2Quotient { u, cbar, spec, c })
}

/// Exponent sum of `g` against per-generator values on `(z, a_0, …, a_m)`.
pub fn hom_value(values: &[i64], g: &Element, modulus: i64) -> i64 {
    let mut s = values[0] * g.k as i64;
    for (v, e) in values[1..].iter().zip(&g.e) {
        s += v * e;
    }
    s.rem_euclid(modulus)
}

/// `c'(g, h, k) = c(g z_0^{2λ(g)}, h z_0^{2λ(h)}, k z_0^{2λ(k)})`.
pub fn twist(
    spec: Arc<GroupSpec>,
    c: CircularOrderOracle<Element>,
    u: u32,
    lambda: Vec<i64>,
) -> CircularOrderOracle<Element> {
    let q = spec.n() as i64 / 2;
    let z02 = spec.pow(&spec.pow(&spec.z(), u as i64), 2);
    CircularOrderOracle::new(Provenance::DescriptorBuilt, move |a, b, d| {
        let shift = |x: &Element| spec.mul(x, &spec.pow(&z02, hom_value(&lambda, x, q)));
        c.eval(&shift(a), &shift(b), &shift(d))
    })
}

/// The standard order on `G` over a given order on `Ḡ = G/⟨z²⟩`, with `z^u`
/// as the positive generator: pull back the order of `Ḡ ×_f Z_{n/2}` along
/// an isomorphism sending `z^u ↦ (z̄, 0)`.
pub fn c_std(spec: Arc<GroupSpec>, cbar: CircularOrderOracle<Element>, u: u32) -> CircularOrderOracle<Element> {
    let n = spec.n() as i64;
    let q = n / 2;
    let gbar = Arc::new(spec.with_n(2));
    let target = LiftedGroup { base: gbar.clone(), c: cbar.clone(), modulus: Some(q) };
    let u_inv = (1..n).find(|&v| (v * u as i64) % n == 1).expect("u is a unit");
    let zbar = (gbar.z(), 0);
    let rho_z = target.pow(&zbar, u_inv);
    let rank = spec.rank();

    let rho = |imgs: &[(Element, i64)], z: &(Element, i64), g: &Element| rho_of(&target, imgs, z, g);
    let respects = |imgs: &[(Element, i64)]| {
        for i in 0..rank {
            for j in i + 1..rank {
                let lhs = target.conjugate(&imgs[i], &imgs[j]);
                let rhs = rho(imgs, &rho_z, &spec.conjugate(&spec.a(i), &spec.a(j)));
                if lhs != rhs {
                    return false;
                }
            }
            let lhs = target.conjugate(&rho_z, &imgs[i]);
            let rhs = rho(imgs, &rho_z, &spec.conjugate(&spec.z(), &spec.a(i)));
            if lhs != rhs {
                return false;
            }
        }
        true
    };
    let total = (q as u64).pow(rank as u32);
    let imgs = (0..total)
        .map(|mut code| {
            (0..rank)
                .map(|i| {
                    let r = (code % q as u64) as i64;
                    code /= q as u64;
                    (gbar.a(i), r)
                })
                .collect::<Vec<_>>()
        })
        .find(|imgs| respects(imgs))
        .expect("the extension by z^2 splits compatibly with the lift");

    let cmp_bar = {
        let gbar = gbar.clone();
        let cbar = cbar.clone();
        move |x: &Element, y: &Element| -> std::cmp::Ordering {
            use std::cmp::Ordering::*;
            if x == y {
                Equal
            } else if x.is_identity() {
                Less
            } else if y.is_identity() {
                Greater
            } else if cbar.eval(&gbar.identity(), x, y) == 1 {
                Less
            } else {
                Greater
            }
        }
    };
    let target = target.clone();
    CircularOrderOracle::new(Provenance::DescriptorBuilt, move |a, b, d| {
        let key = |g: &Element| rho_of(&target, &imgs, &rho_z, g);
        let (ka, kb, kd) = (key(a), key(b), key(d));
        sort_sign(&ka, &kb, &kd, |x, y| x.1.cmp(&y.1).then_with(|| cmp_bar(&x.0, &y.0)).is_lt())
    })
}

fn rho_of(target: &LiftedGroup<GroupSpec>, imgs: &[(Element, i64)], z: &(Element, i64), g: &Element) -> (Element, i64) {
    let mut x = target.pow(z, g.k as i64);
    for (img, &e) in imgs.iter().zip(&g.e) {
        x = target.mul(&x, &target.pow(img, e));
    }
    x
}
