//! Abstract group interface shared by every order oracle.

use std::collections::{HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;

/// A group with computable multiplication, inversion and equality.
pub trait Group {
    type Elem: Clone + Eq + Hash + Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    /// Generators used for balls and random words.
    fn generators(&self) -> Vec<Self::Elem>;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        *a == self.identity()
    }

    /// `a^{-1} b`.
    fn left_div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(&self.inv(a), b)
    }

    fn pow(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut exp = k.unsigned_abs();
        let mut acc = self.identity();
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    fn conjugate(&self, g: &Self::Elem, x: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(g, x), &self.inv(g))
    }

    fn commute(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }
}

/// Word-metric ball of the given radius with respect to `generators()` and
/// their inverses, in breadth-first order (identity first).
pub fn ball<G: Group>(group: &G, radius: usize) -> Vec<G::Elem> {
    let mut steps = Vec::new();
    for g in group.generators() {
        let gi = group.inv(&g);
        steps.push(g.clone());
        if gi != g {
            steps.push(gi);
        }
    }
    let id = group.identity();
    let mut seen: HashSet<G::Elem> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut frontier = VecDeque::from([(id, 0usize)]);
    while let Some((x, d)) = frontier.pop_front() {
        if d == radius {
            continue;
        }
        for s in &steps {
            let y = group.mul(&x, s);
            if seen.insert(y.clone()) {
                out.push(y.clone());
                frontier.push_back((y, d + 1));
            }
        }
    }
    out
}

/// Product of `len` uniformly chosen generators or inverses.
pub fn random_word<G: Group, R: Rng>(group: &G, len: usize, rng: &mut R) -> G::Elem {
    let gens = group.generators();
    let mut x = group.identity();
    if gens.is_empty() {
        return x;
    }
    for _ in 0..len {
        let g = &gens[rng.gen_range(0..gens.len())];
        let s = if rng.gen_bool(0.5) { g.clone() } else { group.inv(g) };
        x = group.mul(&x, &s);
    }
    x
}

/// The cyclic group `Z_n` written additively on residues `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cyclic {
    pub n: u32,
}

impl Cyclic {
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "cyclic group order must be positive");
        Cyclic { n }
    }
}

impl Group for Cyclic {
    type Elem = u32;

    fn identity(&self) -> u32 {
        0
    }

    fn mul(&self, a: &u32, b: &u32) -> u32 {
        (a + b) % self.n
    }

    fn inv(&self, a: &u32) -> u32 {
        (self.n - a % self.n) % self.n
    }

    fn generators(&self) -> Vec<u32> {
        if self.n == 1 {
            vec![]
        } else {
            vec![1]
        }
    }
}
