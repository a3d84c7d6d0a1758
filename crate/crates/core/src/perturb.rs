//! Perturbations of circular orders on infinite Abelian subgroups of `S^1`,
//! and the embedding of a rank-one-by-cyclic group into `S^1`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circle::{
    frac_cmp, is_squarefree, ord, p_component, parse_real, rat, CirclePoint, PrecisionExhausted, Real,
    DEFAULT_BUDGET_BITS,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PerturbError {
    #[error("NotApplicable: {0}")]
    NotApplicable(String),
    #[error("MTooSmall: M ≈ {m} does not dominate max |s| = {max}")]
    MTooSmall { m: String, max: String },
    #[error("NoWitness: no order change found within {searched} elements")]
    NoWitness { searched: usize },
    #[error(transparent)]
    Precision(#[from] PrecisionExhausted),
    #[error("EmbeddingFile: {0}")]
    File(String),
}

impl PerturbError {
    pub fn name(&self) -> &'static str {
        match self {
            PerturbError::NotApplicable(_) => "NotApplicable",
            PerturbError::MTooSmall { .. } => "MTooSmall",
            PerturbError::NoWitness { .. } => "NoWitness",
            PerturbError::Precision(_) => "PrecisionExhausted",
            PerturbError::File(_) => "EmbeddingFile",
        }
    }
}

/// A truncated Prüfer `p`-group `{a/p^k : k ≤ depth}` declared to stand for the infinite one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruferDecl {
    pub p: u64,
    pub depth: u32,
}

/// The subgroup of `S^1` generated by the given points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianEmbedding {
    pub names: Vec<String>,
    pub gens: Vec<CirclePoint>,
    pub prufer: Option<PruferDecl>,
}

impl AbelianEmbedding {
    pub fn new(gens: Vec<CirclePoint>) -> Self {
        let names = (0..gens.len()).map(|i| format!("g{i}")).collect();
        AbelianEmbedding { names, gens, prufer: None }
    }

    /// Generators `g_k = 1/p^k` for `k = 1..=depth`.
    pub fn prufer(p: u64, depth: u32) -> Self {
        let names = (1..=depth).map(|k| format!("g{k}")).collect();
        let gens = (1..=depth).map(|k| CirclePoint::rational(1, (p as i64).pow(k))).collect();
        AbelianEmbedding { names, gens, prufer: Some(PruferDecl { p, depth }) }
    }

    /// A point written as `1/2`, `g0`, `-2*g0 + g1` or `1/3 + 2*g1`.
    pub fn parse_point(&self, src: &str) -> Result<CirclePoint, String> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err("empty element".into());
        }
        let mut out = CirclePoint::zero();
        let mut start = 0;
        let mut terms = Vec::new();
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, t.strip_prefix('+').unwrap_or(t)),
            };
            let sign = if neg { -1 } else { 1 };
            let term = match body.split_once('*') {
                Some((k, name)) => {
                    let k: i64 = k.parse().map_err(|_| format!("bad multiplier in `{t}`"))?;
                    self.generator(name)?.times(sign * k)
                }
                None if body.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) => {
                    self.generator(body)?.times(sign)
                }
                None => {
                    let q = crate::circle::parse_rational(body)?;
                    CirclePoint::new(Real::rational(if neg { -q } else { q }))
                }
            };
            out = out.add(&term);
        }
        Ok(out)
    }

    fn generator(&self, name: &str) -> Result<&CirclePoint, String> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.gens[i])
            .ok_or_else(|| format!("unknown generator `{name}`"))
    }

    pub fn is_torsion(&self) -> bool {
        self.gens.iter().all(|g| g.real().is_rational())
    }

    pub fn image(&self, x: &[i64]) -> CirclePoint {
        self.gens.iter().zip(x).fold(CirclePoint::zero(), |acc, (g, k)| acc.add(&g.times(*k)))
    }

    /// Distinct points of the word ball of the given radius, zero first.
    pub fn ball(&self, radius: usize) -> Vec<CirclePoint> {
        let mut seen = HashSet::from([CirclePoint::zero()]);
        let mut out = vec![CirclePoint::zero()];
        let mut frontier = vec![CirclePoint::zero()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in &frontier {
                for g in &self.gens {
                    for y in [x.add(g), x.sub(g)] {
                        if seen.insert(y.clone()) {
                            out.push(y.clone());
                            next.push(y);
                        }
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

/// `[symbols]` maps names to squarefree radicands, `[generators]` maps names to
/// expressions; an optional `[prufer]` table declares a truncation.
#[derive(Debug, Deserialize)]
struct EmbeddingFile {
    #[serde(default)]
    symbols: BTreeMap<String, u64>,
    #[serde(default)]
    generators: BTreeMap<String, String>,
    prufer: Option<PruferDecl>,
}

pub fn parse_embedding(src: &str) -> Result<AbelianEmbedding, PerturbError> {
    let f: EmbeddingFile = toml::from_str(src).map_err(|e| PerturbError::File(e.message().to_string()))?;
    for (name, r) in &f.symbols {
        if !is_squarefree(*r) {
            return Err(PerturbError::File(format!("symbol `{name}`: radicand {r} is not squarefree")));
        }
    }
    let radicands: HashSet<_> = f.symbols.values().collect();
    if radicands.len() != f.symbols.len() {
        return Err(PerturbError::File("two symbols share a radicand".into()));
    }
    if f.generators.is_empty() {
        return match f.prufer {
            Some(d) => Ok(AbelianEmbedding::prufer(d.p, d.depth)),
            None => Err(PerturbError::File("no generators".into())),
        };
    }
    let gens = f
        .generators
        .iter()
        .map(|(name, e)| {
            parse_real(e, &f.symbols).map(CirclePoint::new).map_err(|m| PerturbError::File(format!("{name}: {m}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AbelianEmbedding { names: f.generators.into_keys().collect(), gens, prufer: f.prufer })
}

/// Outcome of a perturbation: the new embedding, the point map, and a triple
/// `(0, x, y)` of original points whose orientation changes.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub embedding: AbelianEmbedding,
    pub witness: (CirclePoint, CirclePoint, CirclePoint),
    pub description: String,
    map: PointMap,
}

#[derive(Debug, Clone)]
enum PointMap {
    /// `√from ↦ √from + δ(√to − 1)` inside each point.
    Substitute { from: u64, to: u64, delta: BigRational },
    /// `x ↦ (1 + p^{k−1}) x` on the `p`-component.
    Prufer { p: u64, factor: BigInt },
}

impl Perturbation {
    pub fn apply(&self, x: &CirclePoint) -> CirclePoint {
        apply_map(&self.map, x)
    }
}

fn apply_map(map: &PointMap, x: &CirclePoint) -> CirclePoint {
    match map {
        PointMap::Substitute { from, to, delta } => {
            let r = x.real();
            let c = r.coeffs.get(from).cloned().unwrap_or_else(BigRational::zero);
            let shift = Real::sqrt(*to, &c * delta).add(&Real::rational(-(&c * delta)));
            CirclePoint::new(r.add(&shift))
        }
        PointMap::Prufer { p, factor } => {
            assert!(x.real().is_rational(), "Prüfer maps act on rational points");
            let (xp, xr) = p_component(&x.real().q, *p);
            CirclePoint::new(Real::rational(xp * BigRational::from_integer(factor.clone()) + xr))
        }
    }
}

/// Orientation agreement on every triple of `s` under `f`.
pub fn agrees_on(s: &[CirclePoint], f: impl Fn(&CirclePoint) -> CirclePoint) -> Result<bool, PrecisionExhausted> {
    let img: Vec<CirclePoint> = s.iter().map(&f).collect();
    for i in 0..s.len() {
        for j in 0..s.len() {
            for k in 0..s.len() {
                if ord(&s[i], &s[j], &s[k])? != ord(&img[i], &img[j], &img[k])? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn sort_points(pts: &mut [CirclePoint]) -> Result<(), PrecisionExhausted> {
    let mut err = None;
    pts.sort_by(|a, b| match frac_cmp(a, b, DEFAULT_BUDGET_BITS) {
        Ok(o) => o,
        Err(e) => {
            err = Some(e);
            Ordering::Equal
        }
    });
    err.map_or(Ok(()), Err)
}

/// A pair `x, y` of nonzero ball points with `ord(0, x, y) ≠ ord(0, f x, f y)`.
fn find_witness(
    ball: &[CirclePoint],
    f: impl Fn(&CirclePoint) -> CirclePoint,
) -> Result<Option<(CirclePoint, CirclePoint, CirclePoint)>, PrecisionExhausted> {
    let mut before: Vec<CirclePoint> = ball.iter().filter(|x| !x.is_zero()).cloned().collect();
    sort_points(&mut before)?;
    let mut pairs: Vec<(CirclePoint, CirclePoint)> = before.iter().map(|x| (f(x), x.clone())).collect();
    let mut imgs: Vec<CirclePoint> = pairs.iter().map(|p| p.0.clone()).collect();
    sort_points(&mut imgs)?;
    let pos: BTreeMap<&CirclePoint, usize> = imgs.iter().enumerate().map(|(i, p)| (p, i)).collect();
    pairs.sort_by_key(|(img, _)| pos[img]);
    for (i, (_, x)) in pairs.iter().enumerate() {
        if *x != before[i] {
            let (a, b) = (before[i].clone(), x.clone());
            let zero = CirclePoint::zero();
            debug_assert_ne!(ord(&zero, &a, &b)?, ord(&zero, &f(&a), &f(&b))?);
            return Ok(Some((zero, a, b)));
        }
    }
    Ok(None)
}

pub const WITNESS_RADII: [usize; 6] = [8, 32, 128, 512, 2048, 4096];

fn search_witness(
    emb: &AbelianEmbedding,
    f: impl Fn(&CirclePoint) -> CirclePoint,
) -> Result<(CirclePoint, CirclePoint, CirclePoint), PerturbError> {
    let mut searched = 0;
    for r in WITNESS_RADII {
        let b = emb.ball(if emb.gens.len() > 1 { r.min(24) } else { r });
        searched = b.len();
        if let Some(w) = find_witness(&b, &f)? {
            return Ok(w);
        }
        if emb.gens.len() > 1 && r >= 24 {
            break;
        }
    }
    Err(PerturbError::NoWitness { searched })
}

fn fresh_radicand(emb: &AbelianEmbedding) -> u64 {
    let used: HashSet<u64> = emb.gens.iter().flat_map(|g| g.real().coeffs.keys().copied()).collect();
    (3..).find(|r| is_squarefree(*r) && !used.contains(r)).unwrap()
}

/// Replace one irrational symbol `λ` by `λ' = λ + 2^{-j}(√r − 1)` for a fresh
/// squarefree `r`, with `j` the first exponent giving agreement on `s`.
pub fn perturb_nontorsion(emb: &AbelianEmbedding, s: &[CirclePoint]) -> Result<Perturbation, PerturbError> {
    let from = emb
        .gens
        .iter()
        .find_map(|g| g.real().coeffs.keys().next().copied())
        .ok_or_else(|| PerturbError::NotApplicable("every generator is rational (torsion group)".into()))?;
    let to = fresh_radicand(emb);
    for j in 1..=64 {
        let map = PointMap::Substitute { from, to, delta: rat(1, 1) / BigRational::from_integer(BigInt::one() << j) };
        if !agrees_on(s, |x| apply_map(&map, x))? {
            continue;
        }
        let embedding = AbelianEmbedding {
            names: emb.names.clone(),
            gens: emb.gens.iter().map(|g| apply_map(&map, g)).collect(),
            prufer: None,
        };
        let witness = search_witness(emb, |x| apply_map(&map, x))?;
        let description = format!("sqrt({from}) -> sqrt({from}) + 2^-{j}*(sqrt({to}) - 1)");
        return Ok(Perturbation { embedding, witness, description, map });
    }
    Err(PerturbError::NotApplicable("no perturbation scale agrees on S".into()))
}

fn p_exponent(x: &BigRational, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut d = x.denom().clone();
    let mut e = 0;
    while (&d % &p).is_zero() {
        d /= &p;
        e += 1;
    }
    e
}

/// On a declared Prüfer truncation: `N` is the largest `p`-exponent of a
/// denominator in `s`, `k = N + 1`, and the map is `x ↦ (1 + p^{k−1}) x` on
/// the `p`-component, the identity elsewhere.
pub fn perturb_prufer(emb: &AbelianEmbedding, s: &[CirclePoint]) -> Result<Perturbation, PerturbError> {
    if !emb.is_torsion() {
        return Err(PerturbError::NotApplicable("generators must be rational".into()));
    }
    let decl =
        emb.prufer.ok_or_else(|| PerturbError::NotApplicable("finite group: no Prüfer component declared".into()))?;
    let p = decl.p;
    let n = s.iter().map(|x| p_exponent(&x.real().q, p)).max().unwrap_or(0);
    let k = n + 1;
    if k > decl.depth {
        return Err(PerturbError::NotApplicable(format!("truncation depth {} too shallow for S", decl.depth)));
    }
    let factor = BigInt::one() + BigInt::from(p).pow(k - 1);
    let map = PointMap::Prufer { p, factor: factor.clone() };
    assert!(agrees_on(s, |x| apply_map(&map, x))?, "the map fixes S pointwise");
    let embedding = AbelianEmbedding {
        names: emb.names.clone(),
        gens: emb.gens.iter().map(|g| apply_map(&map, g)).collect(),
        prufer: emb.prufer,
    };
    let witness = search_witness(emb, |x| apply_map(&map, x))?;
    Ok(Perturbation { embedding, witness, description: format!("x -> {factor}x on the {p}-component"), map })
}

/// `A = H ⊕_{h_0} Z_k` with `H ⊂ Q`: elements `h t̂^n` (`0 ≤ n < k`), `t̂^k = h_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankOneByCyclic {
    pub k: u32,
    pub h0: BigRational,
}

pub type AElem = (BigRational, u32);

impl RankOneByCyclic {
    pub fn mul(&self, x: &AElem, y: &AElem) -> AElem {
        let n = x.1 + y.1;
        let mut h = &x.0 + &y.0;
        if n >= self.k {
            h += &self.h0;
        }
        (h, n % self.k)
    }

    pub fn inv(&self, x: &AElem) -> AElem {
        if x.1 == 0 {
            (-&x.0, 0)
        } else {
            (-&x.0 - &self.h0, self.k - x.1)
        }
    }

    /// Reference order: `H` ordered as in `Q`, `A/H = Z_k` with `t` positive.
    pub fn reference(&self, a: &AElem, b: &AElem, c: &AElem) -> i8 {
        if a == b || b == c || a == c {
            return 0;
        }
        let rel = |x: &AElem, y: &AElem| self.mul(&self.inv(x), y);
        let sign3 = |p: i64, q: i64, r: i64| -> i8 {
            let inv = (p > q) as i32 + (q > r) as i32 + (p > r) as i32;
            if inv % 2 == 0 {
                1
            } else {
                -1
            }
        };
        let (na, nb, nc) = (a.1, b.1, c.1);
        if na == nb && nb == nc {
            let (x, y) = (rel(a, b).0, rel(a, c).0);
            let v = [BigRational::zero(), x, y];
            let mut idx = [0, 1, 2];
            idx.sort_by(|&i, &j| v[i].cmp(&v[j]));
            let mut pos = [0i64; 3];
            for (rank, &i) in idx.iter().enumerate() {
                pos[i] = rank as i64;
            }
            return sign3(pos[0], pos[1], pos[2]);
        }
        if na != nb && nb != nc && na != nc {
            return sign3(na as i64, nb as i64, nc as i64);
        }
        // exactly two share a coset: the pair's H-order decides
        let neg = |x: &AElem| x.0.is_negative();
        let pm = |b: bool| if b { 1 } else { -1 };
        if na == nb {
            pm(neg(&rel(b, a)))
        } else if nb == nc {
            pm(neg(&rel(c, b)))
        } else {
            pm(neg(&rel(a, c)))
        }
    }
}

/// `Φ(h t̂^n) = μh + n(1 + μh_0)/k` with `μ = 1/(2kM)` and `M = c√r`.
#[derive(Debug, Clone)]
pub struct PhiEmbedding {
    pub group: RankOneByCyclic,
    pub mu: Real,
    pub m: Real,
}

impl PhiEmbedding {
    pub fn phi(&self, x: &AElem) -> CirclePoint {
        let k = rat(self.group.k as i64, 1);
        let t =
            Real::rational(BigRational::one()).add(&self.mu.scale(&self.group.h0)).scale(&(BigRational::one() / &k));
        CirclePoint::new(self.mu.scale(&x.0).add(&t.scale(&rat(x.1 as i64, 1))))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiReport {
    pub agrees_on_cosets: bool,
    pub chain_positive: bool,
    pub injective_on_ball: bool,
    pub ball_size: usize,
    pub homomorphism_on_samples: bool,
}

impl PhiReport {
    pub fn ok(&self) -> bool {
        self.agrees_on_cosets && self.chain_positive && self.injective_on_ball && self.homomorphism_on_samples
    }
}

/// Build `Φ` with `M = c·√r`, failing with `MTooSmall` unless `M > max |s|`.
pub fn build_phi(
    k: u32,
    h0: BigRational,
    s: &[BigRational],
    m_coeff: BigRational,
    m_radicand: u64,
) -> Result<PhiEmbedding, PerturbError> {
    assert!(k >= 1);
    let max = s.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero);
    let m = Real::sqrt(m_radicand, m_coeff.clone());
    let (lo, _) = m.enclosure(64);
    if lo <= max {
        return Err(PerturbError::MTooSmall { m: format!("{:.6}", m.to_f64()), max: max.to_string() });
    }
    // 1/(2k c √r) = √r / (2k c r)
    let mu = Real::sqrt(m_radicand, BigRational::one() / (m_coeff * rat(2 * k as i64 * m_radicand as i64, 1)));
    Ok(PhiEmbedding { group: RankOneByCyclic { k, h0 }, mu, m })
}

/// `M = (max|s| + 1)·√2`.
pub fn default_m(s: &[BigRational]) -> (BigRational, u64) {
    let max = s.iter().map(|x| x.abs()).max().unwrap_or_else(BigRational::zero);
    (max + BigRational::one(), 2)
}

const CHAIN_CAP: usize = 4096;

/// Check `Φ` against the reference order on `⋃ S t̂^n`, on chains
/// `s_0, s_1 t̂, …, s_{k−1} t̂^{k−1}`, for injectivity on the first
/// `ball_size` elements of the word ball, and additivity on those elements.
pub fn verify_phi(phi: &PhiEmbedding, s: &[BigRational], ball_size: usize) -> Result<PhiReport, PrecisionExhausted> {
    let g = &phi.group;
    let pts: Vec<AElem> = (0..g.k).flat_map(|n| s.iter().map(move |h| (h.clone(), n))).collect();
    let imgs: Vec<CirclePoint> = pts.iter().map(|x| phi.phi(x)).collect();
    let mut agrees = true;
    'outer: for i in 0..pts.len() {
        for j in 0..pts.len() {
            for l in 0..pts.len() {
                if g.reference(&pts[i], &pts[j], &pts[l]) != ord(&imgs[i], &imgs[j], &imgs[l])? {
                    agrees = false;
                    break 'outer;
                }
            }
        }
    }

    // every chain s_0, s_1 t̂, …, s_{k−1} t̂^{k−1}, up to a cap
    let mut chain_positive = true;
    if g.k >= 3 && !s.is_empty() {
        let mut idx = vec![0usize; g.k as usize];
        for _ in 0..CHAIN_CAP {
            let chain: Vec<AElem> = idx.iter().zip(0..).map(|(&i, n)| (s[i].clone(), n)).collect();
            let img: Vec<CirclePoint> = chain.iter().map(|x| phi.phi(x)).collect();
            for a in 0..chain.len() {
                for b in a + 1..chain.len() {
                    for c in b + 1..chain.len() {
                        chain_positive &=
                            g.reference(&chain[a], &chain[b], &chain[c]) == 1 && ord(&img[a], &img[b], &img[c])? == 1;
                    }
                }
            }
            let Some(pos) = idx.iter().position(|&i| i + 1 < s.len()) else { break };
            idx[pos] += 1;
            idx[..pos].iter_mut().for_each(|i| *i = 0);
        }
    }

    let gens = [(BigRational::one(), 0u32), (BigRational::zero(), 1 % g.k)];
    let mut ball: Vec<AElem> = vec![(BigRational::zero(), 0)];
    let mut seen: HashSet<AElem> = ball.iter().cloned().collect();
    let mut i = 0;
    while ball.len() < ball_size && i < ball.len() {
        let x = ball[i].clone();
        for gen in &gens {
            for y in [g.mul(&x, gen), g.mul(&x, &g.inv(gen))] {
                if ball.len() < ball_size && seen.insert(y.clone()) {
                    ball.push(y);
                }
            }
        }
        i += 1;
    }
    let images: HashSet<CirclePoint> = ball.iter().map(|x| phi.phi(x)).collect();
    let injective = images.len() == ball.len();
    let homomorphism = ball.iter().all(|x| ball.iter().all(|y| phi.phi(&g.mul(x, y)) == phi.phi(x).add(&phi.phi(y))));
    Ok(PhiReport {
        agrees_on_cosets: agrees,
        chain_positive,
        injective_on_ball: injective,
        ball_size: ball.len(),
        homomorphism_on_samples: homomorphism,
    })
}
