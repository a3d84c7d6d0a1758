//! Polycyclic presentations of `T ⋊ Z_n` and collection to normal form.
//!
//! Generators `a_0, …, a_m` are infinite cyclic; `T_j = ⟨a_j, …, a_m⟩`.
//! Every conjugation relation `a_i a_j a_i^{-1}` (`i < j`) and `z a_j z^{-1}`
//! lies in `T_j` with exponent `±1` on `a_j`, so `T_i = T_{i+1} ⋊ ⟨a_i⟩` and
//! collection from the left terminates.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::Group;

/// Normal form `z^k · a_0^{e_0} ⋯ a_m^{e_m}`; `k` is always 0 when `n = 0`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    pub k: u32,
    pub e: Vec<i64>,
}

impl Element {
    pub fn identity(rank: usize) -> Self {
        Element { k: 0, e: vec![0; rank] }
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.e.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "id");
        }
        let mut parts = Vec::new();
        match self.k {
            0 => {}
            1 => parts.push("z".to_string()),
            k => parts.push(format!("z^{k}")),
        }
        for (i, &x) in self.e.iter().enumerate() {
            match x {
                0 => {}
                1 => parts.push(format!("a{i}")),
                x => parts.push(format!("a{i}^{x}")),
            }
        }
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    Z,
    A(usize),
}

/// A word in the generators: a product of letter powers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Word(pub Vec<(Letter, i64)>);

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self
            .0
            .iter()
            .map(|(l, p)| match l {
                Letter::Z => format!("z^{p}"),
                Letter::A(i) => format!("a{i}^{p}"),
            })
            .collect();
        write!(f, "{}", toks.join(" "))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("relation {relation}: generator index {index} out of range")]
    IndexOutOfRange { relation: String, index: usize },
    #[error("relation {relation} is not triangular: {reason}")]
    NonTriangular { relation: String, reason: String },
}

/// Which condition of a presentation fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// `n` is odd.
    OddN { n: u32 },
    /// `a_i` does not invert `T_{i+1}/T_{i+2}`.
    SuccessiveQuotientNotInverted { i: usize },
    /// `z` does not invert `T/T_1`.
    TopNotInverted,
    /// Conjugation by `by` does not carry the relation `a_j a_l a_j^{-1} = w` to a valid relation.
    RelationNotPreserved { by: String, j: usize, l: usize },
    /// The `z`-automorphism does not square to the identity.
    ZActionOrder { j: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OddN { n } => write!(f, "n must be 0 or even (got {n})"),
            Violation::SuccessiveQuotientNotInverted { i } => {
                write!(f, "successive quotient not inverted: a{i} on T{}/T{}", i + 1, i + 2)
            }
            Violation::TopNotInverted => write!(f, "z does not invert T/T1"),
            Violation::RelationNotPreserved { by, j, l } => {
                write!(f, "conjugation by {by} does not preserve the relation for a{j} a{l} a{j}^-1")
            }
            Violation::ZActionOrder { j } => {
                write!(f, "z-automorphism does not have order dividing 2 (fails on a{j})")
            }
        }
    }
}

/// Presentation of `G = T ⋊ Z_n`.
#[derive(Clone)]
pub struct GroupSpec {
    rank: usize,
    n: u32,
    conj_words: BTreeMap<(usize, usize), Word>,
    zconj_words: BTreeMap<usize, Word>,
    /// `conj[i][j]` = normal form of `a_i a_j a_i^{-1}` (entries `j <= i` unused).
    conj: Vec<Vec<Vec<i64>>>,
    /// `conj_inv[i][j]` = normal form of `a_i^{-1} a_j a_i`.
    conj_inv: Vec<Vec<Vec<i64>>>,
    /// Per level: signs when every image is a pure power of its generator.
    diagonal: Vec<Option<Vec<i64>>>,
    involutive: Vec<bool>,
    zconj: Vec<Vec<i64>>,
    z_diagonal: Option<Vec<i64>>,
    z_involutive: bool,
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupSpec")
            .field("rank", &self.rank)
            .field("n", &self.n)
            .field("conj", &self.conj_words)
            .field("zconj", &self.zconj_words)
            .finish()
    }
}

impl GroupSpec {
    /// Build a presentation; missing relations mean the generators commute.
    /// Only syntactic triangularity is enforced here; see [`GroupSpec::check_consistency`].
    pub fn new(
        rank: usize,
        n: u32,
        conj_words: BTreeMap<(usize, usize), Word>,
        zconj_words: BTreeMap<usize, Word>,
    ) -> Result<Self, SpecError> {
        if rank == 0 {
            return Err(SpecError::ZeroRank);
        }
        for (&(i, j), w) in &conj_words {
            let rel = format!("{i},{j}");
            if j >= rank {
                return Err(SpecError::IndexOutOfRange { relation: rel, index: j });
            }
            if i >= j {
                return Err(SpecError::NonTriangular {
                    relation: rel,
                    reason: "conjugating index must be smaller than the conjugated one".into(),
                });
            }
            check_word_letters(w, j, rank, &rel)?;
        }
        for (&j, w) in &zconj_words {
            let rel = format!("z,{j}");
            if j >= rank {
                return Err(SpecError::IndexOutOfRange { relation: rel, index: j });
            }
            check_word_letters(w, j, rank, &rel)?;
        }

        let unit = |j: usize| {
            let mut v = vec![0; rank];
            v[j] = 1;
            v
        };
        let mut spec = GroupSpec {
            rank,
            n,
            conj_words,
            zconj_words,
            conj: vec![vec![vec![0; rank]; rank]; rank],
            conj_inv: vec![vec![vec![0; rank]; rank]; rank],
            diagonal: vec![None; rank],
            involutive: vec![false; rank],
            zconj: (0..rank).map(unit).collect(),
            z_diagonal: None,
            z_involutive: false,
        };

        // Fill columns from the deepest level up: column j only needs T_j arithmetic.
        for j in (0..rank).rev() {
            for i in 0..j {
                let img = match spec.conj_words.get(&(i, j)) {
                    Some(w) => spec.eval_t_word(j, w),
                    None => unit(j),
                };
                let lead = img[j];
                if lead.abs() != 1 {
                    return Err(SpecError::NonTriangular {
                        relation: format!("{i},{j}"),
                        reason: format!("exponent of a{j} must be ±1, got {lead}"),
                    });
                }
                spec.conj[i][j] = img;
            }
            for i in 0..j {
                // φ(a_j) = a_j^ε t  ⇒  φ^{-1}(a_j) = (a_j · φ^{-1}(t)^{-1})^ε
                let img = spec.conj[i][j].clone();
                let eps = img[j];
                let t = spec.mul_t(j, &spec.pow_t(j, &unit(j), -eps), &img);
                let t_pre = spec.apply_once(i, false, &t);
                let base = spec.mul_t(j, &unit(j), &spec.inv_t(j, &t_pre));
                spec.conj_inv[i][j] = spec.pow_t(j, &base, eps);
            }
        }
        for i in 0..rank {
            let signs: Option<Vec<i64>> = (i + 1..rank)
                .map(|j| {
                    let img = &spec.conj[i][j];
                    let pure = img.iter().enumerate().all(|(l, &x)| l == j || x == 0);
                    pure.then_some(img[j])
                })
                .collect();
            spec.diagonal[i] = signs.map(|s| {
                let mut full = vec![1; rank];
                full[i + 1..].copy_from_slice(&s);
                full
            });
        }
        for i in 0..rank {
            spec.involutive[i] = (i + 1..rank).all(|j| {
                let once = spec.conj[i][j].clone();
                spec.apply_once(i, true, &once) == unit(j)
            });
        }

        for j in 0..rank {
            if let Some(w) = spec.zconj_words.get(&j) {
                let img = spec.eval_t_word(j, w);
                if img[j].abs() != 1 {
                    return Err(SpecError::NonTriangular {
                        relation: format!("z,{j}"),
                        reason: format!("exponent of a{j} must be ±1, got {}", img[j]),
                    });
                }
                spec.zconj[j] = img;
            }
        }
        spec.z_diagonal = (0..rank)
            .map(|j| {
                let img = &spec.zconj[j];
                img.iter().enumerate().all(|(l, &x)| l == j || x == 0).then_some(img[j])
            })
            .collect();
        spec.z_involutive = n > 0 && (0..rank).all(|j| spec.alpha_once(&spec.zconj[j].clone()) == unit(j));
        Ok(spec)
    }

    /// Number of `a`-generators, `m + 1`.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Order of the top cyclic factor (0 for plain `T`).
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn conj_words(&self) -> &BTreeMap<(usize, usize), Word> {
        &self.conj_words
    }

    pub fn zconj_words(&self) -> &BTreeMap<usize, Word> {
        &self.zconj_words
    }

    /// Same `T` and action with the top factor replaced by `Z_{n'}`.
    pub fn with_n(&self, n: u32) -> GroupSpec {
        GroupSpec::new(self.rank, n, self.conj_words.clone(), self.zconj_words.clone())
            .expect("relations were already validated")
    }

    /// The subgroup `T` (drop `z`).
    pub fn t_spec(&self) -> GroupSpec {
        GroupSpec::new(self.rank, 0, self.conj_words.clone(), BTreeMap::new())
            .expect("relations were already validated")
    }

    /// `ε_{ij}`: exponent of `a_j` in `a_i a_j a_i^{-1}`.
    pub fn epsilon(&self, i: usize, j: usize) -> i64 {
        assert!(i < j && j < self.rank);
        self.conj[i][j][j]
    }

    /// `δ_j`: exponent of `a_j` in `z a_j z^{-1}`.
    pub fn delta(&self, j: usize) -> i64 {
        self.zconj[j][j]
    }

    pub fn a(&self, i: usize) -> Element {
        let mut e = vec![0; self.rank];
        e[i] = 1;
        Element { k: 0, e }
    }

    /// The top generator; panics when `n = 0`.
    pub fn z(&self) -> Element {
        assert!(self.n > 0, "no z generator when n = 0");
        Element { k: 1 % self.n, e: vec![0; self.rank] }
    }

    pub fn element(&self, k: u32, e: Vec<i64>) -> Element {
        assert_eq!(e.len(), self.rank);
        let k = if self.n == 0 { 0 } else { k % self.n };
        Element { k, e }
    }

    /// Evaluate an arbitrary word to normal form.
    pub fn eval_word(&self, w: &Word) -> Element {
        let mut x = Element::identity(self.rank);
        for &(l, p) in &w.0 {
            let g = match l {
                Letter::Z => {
                    if self.n == 0 {
                        continue;
                    }
                    self.z()
                }
                Letter::A(i) => self.a(i),
            };
            x = self.mul(&x, &self.pow(&g, p));
        }
        x
    }

    fn eval_t_word(&self, from: usize, w: &Word) -> Vec<i64> {
        let mut x = vec![0; self.rank];
        for &(l, p) in &w.0 {
            let Letter::A(i) = l else { unreachable!("checked at construction") };
            let mut g = vec![0; self.rank];
            g[i] = 1;
            x = self.mul_t(from, &x, &self.pow_t(from, &g, p));
        }
        x
    }

    /// `a_i^k v a_i^{-k}` for `v ∈ T_{i+1}`.
    fn act(&self, i: usize, k: i64, v: &[i64]) -> Vec<i64> {
        if k == 0 || v.iter().all(|&x| x == 0) {
            return v.to_vec();
        }
        if let Some(signs) = &self.diagonal[i] {
            let odd = k.rem_euclid(2) == 1;
            return v.iter().zip(signs).map(|(&x, &s)| if odd { x * s } else { x }).collect();
        }
        let k = if self.involutive[i] { k.rem_euclid(2) } else { k };
        let mut out = v.to_vec();
        for _ in 0..k.unsigned_abs() {
            out = self.apply_once(i, k > 0, &out);
        }
        out
    }

    fn apply_once(&self, i: usize, forward: bool, v: &[i64]) -> Vec<i64> {
        let table = if forward { &self.conj } else { &self.conj_inv };
        let mut out = vec![0; self.rank];
        for j in i + 1..self.rank {
            if v[j] != 0 {
                let p = self.pow_t(i + 1, &table[i][j], v[j]);
                out = self.mul_t(i + 1, &out, &p);
            }
        }
        out
    }

    /// Product in `T_from` of vectors supported on levels `>= from`.
    fn mul_t(&self, from: usize, x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut res = vec![0; self.rank];
        let mut x = x.to_vec();
        for l in from..self.rank {
            res[l] = x[l] + y[l];
            x[l] = 0;
            if y[l] != 0 && l + 1 < self.rank {
                x = self.act(l, -y[l], &x);
            }
        }
        res
    }

    fn inv_t(&self, from: usize, x: &[i64]) -> Vec<i64> {
        if from >= self.rank {
            return vec![0; self.rank];
        }
        let mut rest = x.to_vec();
        rest[from] = 0;
        let rest_inv = self.inv_t(from + 1, &rest);
        let mut out = self.act(from, x[from], &rest_inv);
        out[from] = -x[from];
        out
    }

    fn pow_t(&self, from: usize, x: &[i64], k: i64) -> Vec<i64> {
        let base = if k < 0 { self.inv_t(from, x) } else { x.to_vec() };
        let mut exp = k.unsigned_abs();
        let mut acc = vec![0; self.rank];
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_t(from, &acc, &sq);
            }
            exp >>= 1;
            if exp > 0 {
                sq = self.mul_t(from, &sq, &sq);
            }
        }
        acc
    }

    fn alpha_once(&self, v: &[i64]) -> Vec<i64> {
        if let Some(signs) = &self.z_diagonal {
            return v.iter().zip(signs).map(|(x, s)| x * s).collect();
        }
        let mut out = vec![0; self.rank];
        for j in 0..self.rank {
            if v[j] != 0 {
                let p = self.pow_t(0, &self.zconj[j], v[j]);
                out = self.mul_t(0, &out, &p);
            }
        }
        out
    }

    /// `z^k v z^{-k}` for `v ∈ T`, `k >= 0`.
    fn alpha_pow(&self, k: u32, v: &[i64]) -> Vec<i64> {
        let k = if self.z_involutive { k % 2 } else { k };
        let mut out = v.to_vec();
        for _ in 0..k {
            out = self.alpha_once(&out);
        }
        out
    }

    /// Sign `±1` by which `g` acts on `T_j / T_{j+1}`.
    pub fn quotient_sign_action(&self, g: &Element, j: usize) -> i64 {
        let mut s = if g.k % 2 == 1 { self.delta(j) } else { 1 };
        for i in 0..j {
            if g.e[i].rem_euclid(2) == 1 {
                s *= self.epsilon(i, j);
            }
        }
        s
    }

    /// Parity class of `g` modulo the sign-action kernel: `(k mod 2, e_0 mod 2, …, e_{m-1} mod 2)`.
    pub fn parity_class(&self, g: &Element) -> Vec<u8> {
        let mut p = vec![(g.k % 2) as u8];
        p.extend(g.e[..self.rank - 1].iter().map(|x| x.rem_euclid(2) as u8));
        p
    }

    /// Report every violated presentation condition (empty when consistent).
    pub fn check_consistency(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.n % 2 == 1 {
            out.push(Violation::OddN { n: self.n });
        }
        for i in 0..self.rank.saturating_sub(1) {
            if self.epsilon(i, i + 1) != -1 {
                out.push(Violation::SuccessiveQuotientNotInverted { i });
            }
        }
        if self.n > 0 && self.delta(0) != -1 {
            out.push(Violation::TopNotInverted);
        }
        // φ_i must respect the relations among a_{i+1}, …, a_m.
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                for l in j + 1..self.rank {
                    let pj = &self.conj[i][j];
                    let pl = &self.conj[i][l];
                    let lhs = self.mul_t(i + 1, &self.mul_t(i + 1, pj, pl), &self.inv_t(i + 1, pj));
                    let rhs = self.act(i, 1, &self.conj[j][l]);
                    if lhs != rhs {
                        out.push(Violation::RelationNotPreserved { by: format!("a{i}"), j, l });
                    }
                }
            }
        }
        if self.n > 0 {
            for j in 0..self.rank {
                for l in j + 1..self.rank {
                    let pj = &self.zconj[j];
                    let pl = &self.zconj[l];
                    let lhs = self.mul_t(0, &self.mul_t(0, pj, pl), &self.inv_t(0, pj));
                    let rhs = self.alpha_once(&self.conj[j][l]);
                    if lhs != rhs {
                        out.push(Violation::RelationNotPreserved { by: "z".into(), j, l });
                    }
                }
            }
            for j in 0..self.rank {
                let mut u = vec![0; self.rank];
                u[j] = 1;
                if self.alpha_once(&self.alpha_once(&u)) != u {
                    out.push(Violation::ZActionOrder { j });
                }
            }
        }
        out
    }

    pub fn is_consistent(&self) -> bool {
        self.check_consistency().is_empty()
    }

    /// Presentation relations abelianized, as rows over `(z, a_0, …, a_m)`.
    pub fn abelianized_relations(&self) -> Vec<Vec<i64>> {
        let width = self.rank + 1;
        let mut rows = Vec::new();
        if self.n > 0 {
            let mut r = vec![0; width];
            r[0] = self.n as i64;
            rows.push(r);
        }
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                let mut r = vec![0; width];
                r[1 + j] += 1;
                for (l, &x) in self.conj[i][j].iter().enumerate() {
                    r[1 + l] -= x;
                }
                rows.push(r);
            }
        }
        if self.n > 0 {
            for j in 0..self.rank {
                let mut r = vec![0; width];
                r[1 + j] += 1;
                for (l, &x) in self.zconj[j].iter().enumerate() {
                    r[1 + l] -= x;
                }
                rows.push(r);
            }
        }
        rows
    }

    /// Exponent-sum image of `g` over `(z, a_0, …, a_m)`: well defined modulo
    /// the abelianized relations.
    pub fn exponent_vector(&self, g: &Element) -> Vec<i64> {
        let mut v = vec![g.k as i64];
        v.extend_from_slice(&g.e);
        v
    }
}

fn check_word_letters(w: &Word, from: usize, rank: usize, rel: &str) -> Result<(), SpecError> {
    for &(l, _) in &w.0 {
        match l {
            Letter::Z => {
                return Err(SpecError::NonTriangular {
                    relation: rel.into(),
                    reason: "z may not appear in a conjugation image".into(),
                })
            }
            Letter::A(idx) if idx >= rank => {
                return Err(SpecError::IndexOutOfRange { relation: rel.into(), index: idx })
            }
            Letter::A(idx) if idx < from => {
                return Err(SpecError::NonTriangular {
                    relation: rel.into(),
                    reason: format!("a{idx} is shallower than a{from}"),
                })
            }
            _ => {}
        }
    }
    Ok(())
}

impl Group for GroupSpec {
    type Elem = Element;

    fn identity(&self) -> Element {
        Element::identity(self.rank)
    }

    fn mul(&self, x: &Element, y: &Element) -> Element {
        if self.n == 0 {
            return Element { k: 0, e: self.mul_t(0, &x.e, &y.e) };
        }
        // z^k x' z^{k'} y' = z^{k+k'} (z^{-k'} x' z^{k'}) y'
        let back = (self.n - y.k % self.n) % self.n;
        let moved = self.alpha_pow(back, &x.e);
        Element { k: (x.k + y.k) % self.n, e: self.mul_t(0, &moved, &y.e) }
    }

    fn inv(&self, x: &Element) -> Element {
        if self.n == 0 {
            return Element { k: 0, e: self.inv_t(0, &x.e) };
        }
        let moved = self.alpha_pow(x.k, &x.e);
        Element { k: (self.n - x.k) % self.n, e: self.inv_t(0, &moved) }
    }

    fn generators(&self) -> Vec<Element> {
        let mut g = Vec::new();
        if self.n > 0 {
            g.push(self.z());
        }
        g.extend((0..self.rank).map(|i| self.a(i)));
        g
    }

    fn is_identity(&self, a: &Element) -> bool {
        a.is_identity()
    }
}

/// Lattice of `𝒜 ∩ T`: the elements of `T` acting trivially on every `T_j/T_{j+1}`.
///
/// Basis rows are normal-form vectors, upper triangular with positive leads.
/// Coordinates are taken with respect to the group law, so they are additive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ALattice {
    pub basis: Vec<Vec<i64>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("basis elements {0} and {1} of the sign-action kernel do not commute")]
    AbelianityViolation(String, String),
}

impl ALattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_elements(&self) -> Vec<Element> {
        self.basis.iter().map(|b| Element { k: 0, e: b.clone() }).collect()
    }

    pub fn contains(&self, spec: &GroupSpec, g: &Element) -> bool {
        g.k == 0 && (0..spec.rank()).all(|j| spec.quotient_sign_action(g, j) == 1)
    }

    /// Coordinates of `g ∈ 𝒜` in the basis; `None` when `g ∉ 𝒜`.
    pub fn coords(&self, spec: &GroupSpec, g: &Element) -> Option<Vec<i64>> {
        if g.k != 0 {
            return None;
        }
        let mut x = g.clone();
        let mut c = vec![0; self.rank()];
        for (i, b) in self.basis.iter().enumerate() {
            let lead = b[i];
            if x.e[i] % lead != 0 {
                return None;
            }
            c[i] = x.e[i] / lead;
            let bi = Element { k: 0, e: b.clone() };
            x = spec.mul(&spec.pow(&bi, -c[i]), &x);
            debug_assert_eq!(x.e[i], 0);
        }
        x.is_identity().then_some(c)
    }

    pub fn element(&self, spec: &GroupSpec, coords: &[i64]) -> Element {
        let mut x = spec.identity();
        for (b, &c) in self.basis.iter().zip(coords) {
            let bi = Element { k: 0, e: b.clone() };
            x = spec.mul(&x, &spec.pow(&bi, c));
        }
        x
    }
}

/// Basis of `𝒜 ∩ T`, checking that the basis elements commute.
pub fn compute_a(spec: &GroupSpec) -> Result<ALattice, LatticeError> {
    let rank = spec.rank();
    let in_a = |e: &[i64]| {
        let g = Element { k: 0, e: e.to_vec() };
        (0..rank).all(|j| spec.quotient_sign_action(&g, j) == 1)
    };
    let mut basis = Vec::with_capacity(rank);
    for i in 0..rank {
        // Look for a lead-1 element with 0/1 exponents below level i; else a_i^2.
        let free = rank.saturating_sub(i + 1);
        let mut found = None;
        for mask in 0u64..(1u64 << free.min(20)) {
            let mut e = vec![0; rank];
            e[i] = 1;
            for b in 0..free {
                e[i + 1 + b] = ((mask >> b) & 1) as i64;
            }
            if in_a(&e) {
                found = Some(e);
                break;
            }
        }
        basis.push(found.unwrap_or_else(|| {
            let mut e = vec![0; rank];
            e[i] = 2;
            e
        }));
    }
    let lattice = ALattice { basis };
    let elems = lattice.basis_elements();
    for (x, y) in elems.iter().enumerate().flat_map(|(i, x)| elems[i + 1..].iter().map(move |y| (x, y))) {
        if !spec.commute(x, y) {
            return Err(LatticeError::AbelianityViolation(x.to_string(), y.to_string()));
        }
    }
    Ok(lattice)
}
