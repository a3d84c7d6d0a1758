//! Enumeration of all circular orders via descriptors, the counting factors,
//! and brute-force cross-checks.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::group::{ball, Group};
use crate::linalg::{smith_normal_form, IntMatrix};
use crate::orders::{
    assemble, c_std, check_cocycle, positive_generator, twist, z2_quotient, CircularOrderOracle, LeftOrderOracle,
    Membership, Provenance, SampleConfig,
};
use crate::spec::{Element, GroupSpec};
use crate::tararin::{
    kernel_subgroup_data, psi_value, t_data, tararin_test, FunctionalChain, KernelData, TararinOutcome,
};

/// Signs paired with a functional chain on a kernel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeftOrderDesc {
    pub chain: FunctionalChain,
    pub signs: Vec<i8>,
}

/// `g > id` iff `s_j · v_j(x(g^o)) > 0` at the first `j` with a nonzero value,
/// where `g^o` is the first power of `g` in the lattice.
pub fn kernel_left_order(spec: Arc<GroupSpec>, kd: Arc<KernelData>, desc: LeftOrderDesc) -> LeftOrderOracle<Element> {
    LeftOrderOracle::new(move |g: &Element| {
        if g.is_identity() {
            return 0;
        }
        let (_, c) = kd.decompose(&spec, g).expect("element lies in the kernel");
        let o = kd.data.coset_order(c) as i64;
        let x = kd.lattice_coords(&spec, &spec.pow(g, o)).expect("power lies in the lattice");
        for (v, s) in desc.chain.eval(&x).into_iter().zip(&desc.signs) {
            if v != 0 {
                return if v.signum() as i8 == *s { 1 } else { -1 };
            }
        }
        unreachable!("chain separates every nonidentity element")
    })
}

pub fn sign_vectors(len: usize) -> Vec<Vec<i8>> {
    (0..1u32 << len)
        .map(|mask| (0..len).map(|i| if (mask >> (len - 1 - i)) & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("Unclassified: {0}")]
    Unclassified(String),
    #[error("DistinctnessFailure: descriptors {a} and {b} agree on every triple of the radius-{radius} ball")]
    DistinctnessFailure { a: usize, b: usize, radius: usize },
    #[error("InvalidOrder: descriptor {index} fails the cocycle check")]
    InvalidOrder { index: usize },
    #[error("BallTooLarge: {size} elements (limit {limit})")]
    BallTooLarge { size: usize, limit: usize },
}

impl EnumError {
    pub fn name(&self) -> &'static str {
        match self {
            EnumError::Unclassified(_) => "Unclassified",
            EnumError::DistinctnessFailure { .. } => "DistinctnessFailure",
            EnumError::InvalidOrder { .. } => "InvalidOrder",
            EnumError::BallTooLarge { .. } => "BallTooLarge",
        }
    }
}

/// The `2^{m+1}` left orders of a Tararin group (`n = 0`).
pub fn enumerate_lo_tararin(spec: &GroupSpec) -> Result<Vec<(LeftOrderDesc, LeftOrderOracle<Element>)>, EnumError> {
    let t = Arc::new(spec.t_spec());
    let kd = Arc::new(t_data(&t).map_err(|e| EnumError::Unclassified(e.to_string()))?);
    let chain = match tararin_test(&kd.data).map_err(|e| EnumError::Unclassified(e.to_string()))? {
        TararinOutcome::Accept(c) => c,
        TararinOutcome::Reject { reason, depth } => {
            return Err(EnumError::Unclassified(format!("T is not a Tararin group: {reason} at depth {depth}")))
        }
    };
    Ok(sign_vectors(chain.len())
        .into_iter()
        .map(|signs| {
            let desc = LeftOrderDesc { chain: chain.clone(), signs };
            let lo = kernel_left_order(t.clone(), kd.clone(), desc.clone());
            (desc, lo)
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct RotHom {
    pub psi: Vec<u8>,
    pub outcome: Result<(Arc<KernelData>, FunctionalChain), String>,
}

impl RotHom {
    pub fn accepted(&self) -> bool {
        self.outcome.is_ok()
    }
}

fn psi_candidates(spec: &GroupSpec) -> Vec<Vec<u8>> {
    let rank = spec.rank();
    let top = if spec.n() > 0 { 1 } else { 0 };
    if top == 0 {
        return vec![vec![0; rank + 1]];
    }
    (0..1u32 << rank)
        .map(|mask| {
            let mut p = vec![1u8];
            p.extend((0..rank).map(|i| ((mask >> (rank - 1 - i)) & 1) as u8));
            p
        })
        .collect()
}

/// Classify every candidate rotation homomorphism `ψ` with `ψ(z) = 1` (for `n = 2`)
/// or the trivial one (for `n = 0`).
pub fn enumerate_rot_homs(spec: &GroupSpec) -> Vec<RotHom> {
    assert!(spec.n() == 0 || spec.n() == 2, "rotation homs are classified on the reduced group");
    psi_candidates(spec)
        .into_iter()
        .map(|psi| {
            let outcome = kernel_subgroup_data(spec, &psi).map_err(|e| e.name().to_string()).and_then(|kd| {
                match tararin_test(&kd.data) {
                    Ok(TararinOutcome::Accept(chain)) => Ok((Arc::new(kd), chain)),
                    Ok(TararinOutcome::Reject { reason, depth }) => Err(format!("{reason} at depth {depth}")),
                    Err(e) => Err(e.to_string()),
                }
            });
            RotHom { psi, outcome }
        })
        .collect()
}

/// `Hom(G, Z_q)` for `q = n/2`: its size via the Smith form and an explicit list
/// of values on `(z, a_0, …, a_m)`.
pub fn k_lift_count(spec: &GroupSpec) -> (u64, Vec<Vec<i64>>) {
    assert!(spec.n() >= 2 && spec.n().is_multiple_of(2), "k_lift needs an even n ≥ 2");
    let q = spec.n() as i64 / 2;
    let rows = spec.abelianized_relations();
    let cols = spec.rank() + 1;
    let m = if rows.is_empty() { IntMatrix::zeros(0, cols) } else { IntMatrix::from_rows(&rows) };
    let s = smith_normal_form(&m);
    let diag = s.diagonal();
    let mut count: u64 = 1;
    for i in 0..cols {
        let d = diag.get(i).copied().unwrap_or(0);
        count *= num_integer::gcd(d, q) as u64;
    }
    let list: Vec<Vec<i64>> = (0..(q as u64).pow(cols as u32))
        .map(|mut code| {
            (0..cols)
                .map(|_| {
                    let v = (code % q as u64) as i64;
                    code /= q as u64;
                    v
                })
                .collect::<Vec<_>>()
        })
        .filter(|x| rows.iter().all(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<i64>().rem_euclid(q) == 0))
        .collect();
    assert_eq!(list.len() as u64, count, "Smith count disagrees with the listed homomorphisms");
    let mut list = list;
    list.sort();
    (count, list)
}

pub fn euler_phi(n: u32) -> u64 {
    (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, PartialOrd, Ord)]
pub struct CircularOrderDescriptor {
    pub psi: Vec<u8>,
    pub signs: Vec<i8>,
    pub u: u32,
    pub lambda: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiReport {
    pub psi: Vec<u8>,
    pub accepted: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub n: u32,
    pub phi_n: u64,
    pub rank_factor: u64,
    pub k_rot: u64,
    pub k_lift: u64,
    pub total: u64,
    pub lower_bound: u64,
    pub per_psi: Vec<PsiReport>,
}

pub struct MaterializedOrder {
    pub descriptor: CircularOrderDescriptor,
    pub oracle: CircularOrderOracle<Element>,
    /// Membership in the linear part: `ker ψ` for `n = 2`, its index-`n/2` lift otherwise.
    pub kernel: Membership<Element>,
    pub kernel_order: LeftOrderOracle<Element>,
}

/// The assembled order for `n = 2` from `(ψ, chain, signs)`.
fn order_n2(
    spec: Arc<GroupSpec>,
    kd: Arc<KernelData>,
    desc: LeftOrderDesc,
) -> (CircularOrderOracle<Element>, Membership<Element>, LeftOrderOracle<Element>) {
    let lo = kernel_left_order(spec.clone(), kd.clone(), desc);
    let psi = kd.psi.clone();
    let member: Membership<Element> = Arc::new(move |g| psi_value(&psi, g) == 0);
    let z = spec.z();
    let id = spec.identity();
    let m2 = member.clone();
    let transversal = Arc::new(move |g: &Element| if m2(g) { id.clone() } else { z.clone() });
    let cbar = CircularOrderOracle::new(Provenance::DescriptorBuilt, |_: &Element, _: &Element, _: &Element| 0);
    (assemble(spec, lo.clone(), member.clone(), cbar, transversal), member, lo)
}

/// Count the circular orders of a spec with `n ≥ 2` and materialize one oracle per descriptor.
pub fn materialize_all(spec: &GroupSpec) -> Result<(Vec<MaterializedOrder>, CountReport), EnumError> {
    let n = spec.n();
    if n < 2 {
        return Err(EnumError::Unclassified("n = 0: a Tararin group has infinitely many circular orders".into()));
    }
    let spec = Arc::new(spec.clone());
    let gbar = Arc::new(spec.with_n(2));
    let homs = enumerate_rot_homs(&gbar);
    let units: Vec<u32> = (1..n.max(2)).filter(|&u| num_integer::gcd(u, n) == 1).collect();
    let (k_lift, lambdas) = if n == 2 { (1, vec![vec![0; spec.rank() + 1]]) } else { k_lift_count(&spec) };

    let mut out = Vec::new();
    for h in &homs {
        let Ok((kd, chain)) = &h.outcome else { continue };
        for signs in sign_vectors(chain.len()) {
            let desc = LeftOrderDesc { chain: chain.clone(), signs: signs.clone() };
            let (cbar, member, lo) = order_n2(gbar.clone(), kd.clone(), desc);
            for &u in &units {
                for lambda in &lambdas {
                    let descriptor =
                        CircularOrderDescriptor { psi: h.psi.clone(), signs: signs.clone(), u, lambda: lambda.clone() };
                    let oracle = if n == 2 {
                        cbar.clone()
                    } else {
                        let std = c_std(spec.clone(), cbar.clone(), u);
                        if lambda.iter().all(|&x| x == 0) {
                            std
                        } else {
                            twist(spec.clone(), std, u, lambda.clone())
                        }
                    };
                    let kernel: Membership<Element> = if n == 2 {
                        member.clone()
                    } else {
                        // one of the two lifts of each element of ker ψ rotates by 1/2;
                        // the other sits in the arc (z0^{-1}, z0) around id
                        let u0 = positive_generator(&spec, &oracle)
                            .map_err(|_| EnumError::InvalidOrder { index: out.len() })?;
                        let (psi, c) = (h.psi.clone(), oracle.clone());
                        let z0 = spec.pow(&spec.z(), u0 as i64);
                        let z0_inv = spec.inv(&z0);
                        Arc::new(move |g: &Element| {
                            psi_value(&psi, g) == 0 && (g.is_identity() || c.eval(&z0_inv, g, &z0) == 1)
                        })
                    };
                    out.push(MaterializedOrder { descriptor, oracle, kernel, kernel_order: lo.clone() });
                }
            }
        }
    }
    out.sort_by(|a, b| a.descriptor.cmp(&b.descriptor));

    let k_rot = homs.iter().filter(|h| h.accepted()).count() as u64;
    let phi_n = euler_phi(n);
    let rank_factor = 1u64 << spec.rank();
    let report = CountReport {
        n,
        phi_n,
        rank_factor,
        k_rot,
        k_lift,
        total: phi_n * rank_factor * k_rot * k_lift,
        lower_bound: phi_n * rank_factor,
        per_psi: homs
            .iter()
            .map(|h| PsiReport {
                psi: h.psi.clone(),
                accepted: h.accepted(),
                reason: h.outcome.as_ref().err().cloned(),
            })
            .collect(),
    };
    assert_eq!(report.total as usize, out.len(), "descriptor list matches the counting formula");
    Ok((out, report))
}

/// Values of `c(id, g, h)` over ordered pairs of the sample.
pub fn signature(c: &CircularOrderOracle<Element>, id: &Element, sample: &[Element]) -> Vec<i8> {
    let mut v = Vec::with_capacity(sample.len() * sample.len());
    for g in sample {
        for h in sample {
            v.push(c.eval(id, g, h));
        }
    }
    v
}

/// Whether two oracles agree on every triple of the sample.
pub fn agree_on<G: Group>(
    c1: &CircularOrderOracle<G::Elem>,
    c2: &CircularOrderOracle<G::Elem>,
    sample: &[G::Elem],
) -> bool {
    sample.iter().all(|a| sample.iter().all(|b| sample.iter().all(|d| c1.eval(a, b, d) == c2.eval(a, b, d))))
}

/// First pair of orders that agree on every triple of the ball.
pub fn find_collision(spec: &GroupSpec, orders: &[MaterializedOrder], radius: usize) -> Option<(usize, usize)> {
    let b = ball(spec, radius);
    let id = spec.identity();
    let sigs: Vec<Vec<i8>> = orders.iter().map(|o| signature(&o.oracle, &id, &b)).collect();
    let mut seen: HashMap<&Vec<i8>, usize> = HashMap::new();
    for (i, s) in sigs.iter().enumerate() {
        if let Some(&j) = seen.get(s) {
            if agree_on::<GroupSpec>(&orders[j].oracle, &orders[i].oracle, &b) {
                return Some((j, i));
            }
        }
        seen.entry(s).or_insert(i);
    }
    None
}

pub struct Enumeration {
    pub orders: Vec<MaterializedOrder>,
    pub report: CountReport,
}

#[derive(Debug, Clone, Copy)]
pub struct EnumOptions {
    pub radius: usize,
    pub cocycle: SampleConfig,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions { radius: 3, cocycle: SampleConfig::default() }
    }
}

/// All circular orders, each checked as a cocycle and pairwise separated on a ball.
pub fn enumerate_co(spec: &GroupSpec, opts: EnumOptions) -> Result<Enumeration, EnumError> {
    let (orders, report) = materialize_all(spec)?;
    let b = ball(spec, opts.radius);
    for (index, o) in orders.iter().enumerate() {
        if !check_cocycle(spec, &o.oracle, &b, opts.cocycle).is_ok() {
            return Err(EnumError::InvalidOrder { index });
        }
    }
    if let Some((a, b)) = find_collision(spec, &orders, opts.radius) {
        return Err(EnumError::DistinctnessFailure { a, b, radius: opts.radius });
    }
    Ok(Enumeration { orders, report })
}

/// Left-invariant cyclic arrangements of `Z_n`, written starting at 0.
pub fn brute_force_co_cyclic(n: u32) -> (usize, Vec<Vec<u32>>) {
    assert!((2..=9).contains(&n), "desk bound is 2 ≤ n ≤ 9");
    let mut found = Vec::new();
    let mut rest: Vec<u32> = (1..n).collect();
    permute(&mut rest, 0, &mut |perm| {
        let mut seq = vec![0];
        seq.extend_from_slice(perm);
        let shifted: Vec<u32> = seq.iter().map(|x| (x + 1) % n).collect();
        let zero = shifted.iter().position(|&x| x == 0).unwrap();
        let rotated: Vec<u32> = shifted[zero..].iter().chain(&shifted[..zero]).copied().collect();
        if rotated == seq {
            found.push(seq);
        }
    });
    (found.len(), found)
}

fn permute(v: &mut Vec<u32>, k: usize, f: &mut impl FnMut(&[u32])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

pub const BALL_LIMIT: usize = 40;

/// Positive cones on a ball: subsets `P` with `B∖{id} = P ⊔ P^{-1}` and
/// `P·P ∩ B ⊆ P`. Returns every completed cone as a sorted element list.
pub fn brute_force_ball_orders(spec: &GroupSpec, radius: usize) -> Result<Vec<Vec<Element>>, EnumError> {
    let b = ball(spec, radius);
    if b.len() > BALL_LIMIT {
        return Err(EnumError::BallTooLarge { size: b.len(), limit: BALL_LIMIT });
    }
    let index: HashMap<Element, usize> = b.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
    let n = b.len();
    let inv: Vec<usize> = b.iter().map(|g| index.get(&spec.inv(g)).copied().unwrap_or(usize::MAX)).collect();
    let mut prod = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            prod[i][j] = index.get(&spec.mul(&b[i], &b[j])).copied();
        }
    }
    let nonid: Vec<usize> = (0..n).filter(|&i| !b[i].is_identity()).collect();
    if nonid.iter().any(|&i| inv[i] == i) {
        return Ok(Vec::new());
    }
    let mut state = vec![0i8; n];
    let mut out = Vec::new();
    search(&nonid, &inv, &prod, &mut state, &mut out);
    let mut cones: Vec<Vec<Element>> = out
        .into_iter()
        .map(|s: Vec<i8>| {
            let mut c: Vec<Element> = (0..n).filter(|&i| s[i] > 0).map(|i| b[i].clone()).collect();
            c.sort();
            c
        })
        .collect();
    cones.sort();
    Ok(cones)
}

fn search(nonid: &[usize], inv: &[usize], prod: &[Vec<Option<usize>>], state: &mut Vec<i8>, out: &mut Vec<Vec<i8>>) {
    let Some(&g) = nonid.iter().find(|&&i| state[i] == 0) else {
        out.push(state.clone());
        return;
    };
    for choice in [g, inv[g]] {
        let saved = state.clone();
        if assign(choice, inv, prod, state) {
            search(nonid, inv, prod, state, out);
        }
        *state = saved;
    }
}

/// Mark `g` positive and propagate closure; false on contradiction.
fn assign(g: usize, inv: &[usize], prod: &[Vec<Option<usize>>], state: &mut [i8]) -> bool {
    let mut work = vec![g];
    while let Some(x) = work.pop() {
        match state[x] {
            1 => continue,
            -1 => return false,
            _ => {}
        }
        state[x] = 1;
        if inv[x] != usize::MAX {
            if state[inv[x]] == 1 {
                return false;
            }
            state[inv[x]] = -1;
        }
        let positives: Vec<usize> = (0..state.len()).filter(|&y| state[y] == 1).collect();
        for y in positives {
            for p in [prod[x][y], prod[y][x]].into_iter().flatten() {
                if state[p] != 1 {
                    work.push(p);
                }
            }
        }
    }
    true
}

/// Positive cone of a left order restricted to a sample.
pub fn cone_on(lo: &LeftOrderOracle<Element>, sample: &[Element]) -> Vec<Element> {
    let mut c: Vec<Element> = sample.iter().filter(|g| lo.sign(g) > 0).cloned().collect();
    c.sort();
    c
}

/// Distinct cones of the given orders on a sample.
pub fn distinct_cones(los: &[LeftOrderOracle<Element>], sample: &[Element]) -> usize {
    los.iter().map(|lo| cone_on(lo, sample)).collect::<HashSet<_>>().len()
}

/// Read back `(u, λ)` from an order on a group with `n > 2`: `u` from the
/// positive generator, and `λ(x) = r(x) − r_std(x)` on the generators, where
/// `r_std` belongs to the standard order over the same quotient.
pub fn recover_twist(
    spec: Arc<GroupSpec>,
    c: CircularOrderOracle<Element>,
) -> Result<(u32, Vec<i64>), crate::orders::NoPositiveGenerator> {
    let q = spec.n() as i64 / 2;
    let quo = z2_quotient(spec.clone(), c)?;
    let std = z2_quotient(spec.clone(), c_std(spec.clone(), quo.cbar.clone(), quo.u))?;
    let mut gens = vec![spec.z()];
    gens.extend((0..spec.rank()).map(|i| spec.a(i)));
    let lambda = gens.iter().map(|g| (quo.r(g) - std.r(g)).rem_euclid(q)).collect();
    Ok((quo.u, lambda))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn sign_vectors_in_order() {
        assert_eq!(sign_vectors(2), vec![vec![1, 1], vec![1, -1], vec![-1, 1], vec![-1, -1]]);
        assert_eq!(sign_vectors(0), vec![Vec::<i8>::new()]);
    }

    #[test]
    fn totient() {
        let got: Vec<u64> = (1..=9).map(euler_phi).collect();
        assert_eq!(got, vec![1, 1, 2, 2, 4, 2, 6, 4, 6]);
    }

    #[test]
    fn cyclic_arrangements_of_z4() {
        let (count, seqs) = brute_force_co_cyclic(4);
        assert_eq!(count, 2);
        assert_eq!(seqs, vec![vec![0, 1, 2, 3], vec![0, 3, 2, 1]]);
    }

    #[test]
    fn ball_cones_of_z() {
        let cones = brute_force_ball_orders(&fixtures::z(), 3).unwrap();
        assert_eq!(cones.len(), 2);
        assert_eq!(cones[0].len(), 3);
    }

    #[test]
    fn involution_blocks_cones() {
        assert!(brute_force_ball_orders(&fixtures::dinf(), 2).unwrap().is_empty());
    }

    #[test]
    fn ball_limit() {
        let err = brute_force_ball_orders(&fixtures::rank3(), 4).unwrap_err();
        assert_eq!(err.name(), "BallTooLarge");
    }

    #[test]
    fn n_zero_has_no_finite_count() {
        assert!(matches!(materialize_all(&fixtures::k2()), Err(EnumError::Unclassified(_))));
    }
}
