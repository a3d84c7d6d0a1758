//! Finite extensions of free abelian groups and the recursive test for
//! Tararin groups.
//!
//! A [`VirtuallyAbelianData`] describes `H` with a normal subgroup `A ≅ Z^r`
//! of finite index: every element is `v · t_c` for a lattice vector `v` and a
//! coset `c`, with `t_c v t_c^{-1} = M_c v` and `t_c t_d = u_{c,d} t_{cd}`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::group::Group;
use crate::linalg::{bezout, normalize_sign, primitive, smith_normal_form, IntMatrix, Smith};
use crate::spec::{compute_a, ALattice, Element, GroupSpec, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtuallyAbelianData {
    pub rank: usize,
    pub labels: Vec<String>,
    /// `table[c][d]` is the coset of `t_c t_d`; coset 0 is the identity.
    pub table: Vec<Vec<usize>>,
    pub actions: Vec<IntMatrix>,
    pub cocycle: Vec<Vec<Vec<i64>>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DataError {
    #[error("MalformedData: {0}")]
    MalformedData(String),
}

impl VirtuallyAbelianData {
    pub fn cosets(&self) -> usize {
        self.table.len()
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let bad = |m: String| Err(DataError::MalformedData(m));
        let q = self.cosets();
        let r = self.rank;
        if q == 0 || self.labels.len() != q || self.actions.len() != q || self.cocycle.len() != q {
            return bad("coset tables have inconsistent sizes".into());
        }
        for c in 0..q {
            if self.table[c].len() != q || self.cocycle[c].len() != q {
                return bad(format!("row {c} has the wrong length"));
            }
            let m = &self.actions[c];
            if m.rows() != r || m.cols() != r || m.det().abs() != 1 {
                return bad(format!("action of {} is not an automorphism", self.labels[c]));
            }
            if self.table[c].iter().any(|&x| x >= q) {
                return bad(format!("row {c} of the table is out of range"));
            }
            if self.cocycle[c].iter().any(|u| u.len() != r) {
                return bad(format!("cocycle row {c} has the wrong dimension"));
            }
        }
        if self.actions[0] != IntMatrix::identity(r) {
            return bad("identity coset must act trivially".into());
        }
        for c in 0..q {
            if self.table[0][c] != c || self.table[c][0] != c {
                return bad("coset 0 is not the identity".into());
            }
            if self.cocycle[0][c].iter().chain(&self.cocycle[c][0]).any(|&x| x != 0) {
                return bad("cocycle is not normalized".into());
            }
            let mut row = self.table[c].clone();
            row.sort_unstable();
            if row != (0..q).collect::<Vec<_>>() {
                return bad(format!("table row {c} is not a permutation"));
            }
        }
        for c in 0..q {
            for d in 0..q {
                let cd = self.table[c][d];
                if self.actions[c].mul(&self.actions[d]) != self.actions[cd] {
                    return bad(format!("actions of {} and {} do not compose", self.labels[c], self.labels[d]));
                }
                for e in 0..q {
                    if self.table[cd][e] != self.table[c][self.table[d][e]] {
                        return bad("coset table is not associative".into());
                    }
                    let de = self.table[d][e];
                    let lhs = add(&self.cocycle[c][d], &self.cocycle[cd][e]);
                    let rhs = add(&self.actions[c].mul_vec(&self.cocycle[d][e]), &self.cocycle[c][de]);
                    if lhs != rhs {
                        return bad(format!(
                            "cocycle identity fails at ({}, {}, {})",
                            self.labels[c], self.labels[d], self.labels[e]
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `(v, c)(w, d) = (v + M_c w + u_{c,d}, cd)`.
    pub fn mul(&self, x: &(Vec<i64>, usize), y: &(Vec<i64>, usize)) -> (Vec<i64>, usize) {
        let (v, c) = x;
        let (w, d) = y;
        let s = add(&add(v, &self.actions[*c].mul_vec(w)), &self.cocycle[*c][*d]);
        (s, self.table[*c][*d])
    }

    pub fn identity(&self) -> (Vec<i64>, usize) {
        (vec![0; self.rank], 0)
    }

    pub fn coset_order(&self, c: usize) -> usize {
        let mut x = c;
        let mut k = 1;
        while x != 0 {
            x = self.table[x][c];
            k += 1;
        }
        k
    }

    pub fn pow(&self, x: &(Vec<i64>, usize), k: usize) -> (Vec<i64>, usize) {
        (0..k).fold(self.identity(), |acc, _| self.mul(&acc, x))
    }
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Primitive covectors in the coordinates of the input lattice, one per
/// level, each with first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionalChain {
    pub covectors: Vec<Vec<i64>>,
}

impl FunctionalChain {
    pub fn len(&self) -> usize {
        self.covectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covectors.is_empty()
    }

    /// Values of every covector on `x`.
    pub fn eval(&self, x: &[i64]) -> Vec<i64> {
        self.covectors.iter().map(|v| crate::linalg::dot(v, x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RejectReason {
    NotIndicable,
    RankTooHigh,
    TorsionInKernel,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TararinOutcome {
    Accept(FunctionalChain),
    Reject { reason: RejectReason, depth: usize },
}

impl TararinOutcome {
    pub fn chain(&self) -> Option<&FunctionalChain> {
        match self {
            TararinOutcome::Accept(c) => Some(c),
            TararinOutcome::Reject { .. } => None,
        }
    }
}

struct Level {
    data: VirtuallyAbelianData,
    /// Current lattice basis in top coordinates (columns).
    basis_top: Vec<Vec<i64>>,
    /// Top lattice part of each current coset representative.
    offset: Vec<Vec<i64>>,
    top_coset: Vec<usize>,
}

impl Level {
    fn to_top(&self, w: &[i64], c: usize) -> (Vec<i64>, usize) {
        let mut v = self.offset[c].clone();
        for (col, &x) in self.basis_top.iter().zip(w) {
            for (vi, ci) in v.iter_mut().zip(col) {
                *vi += x * ci;
            }
        }
        (v, self.top_coset[c])
    }
}

fn has_torsion(data: &VirtuallyAbelianData) -> bool {
    (1..data.cosets()).any(|c| {
        let o = data.coset_order(c);
        let (w, _) = data.pow(&(vec![0; data.rank], c), o);
        let mut n = IntMatrix::zeros(data.rank, data.rank);
        let mut p = IntMatrix::identity(data.rank);
        for _ in 0..o {
            for i in 0..data.rank {
                for j in 0..data.rank {
                    n[(i, j)] += p[(i, j)];
                }
            }
            p = p.mul(&data.actions[c]);
        }
        let neg: Vec<i64> = w.iter().map(|x| -x).collect();
        smith_normal_form(&n).solve(&neg).is_some()
    })
}

/// Relation matrix of the abelianization over the columns
/// `(e_1, …, e_r, t_0, …, t_{q-1})`.
pub fn abelianization_matrix(data: &VirtuallyAbelianData) -> IntMatrix {
    let (r, q) = (data.rank, data.cosets());
    let mut rows = Vec::new();
    for c in 0..q {
        for i in 0..r {
            let mut row = vec![0; r + q];
            row[i] += 1;
            for (k, x) in data.actions[c].col(i).into_iter().enumerate() {
                row[k] -= x;
            }
            rows.push(row);
        }
    }
    for c in 0..q {
        for d in 0..q {
            let mut row = vec![0; r + q];
            row[r + c] += 1;
            row[r + d] += 1;
            row[r + data.table[c][d]] -= 1;
            for (k, &x) in data.cocycle[c][d].iter().enumerate() {
                row[k] -= x;
            }
            rows.push(row);
        }
    }
    let mut m = IntMatrix::zeros(rows.len(), r + q);
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    m
}

/// Decide whether `data` describes a Tararin group, returning the chain of
/// rank-one quotient functionals on success.
pub fn tararin_test(data: &VirtuallyAbelianData) -> Result<TararinOutcome, DataError> {
    data.validate()?;
    let r0 = data.rank;
    let mut level = Level {
        data: data.clone(),
        basis_top: (0..r0).map(|i| unit(r0, i)).collect(),
        offset: vec![vec![0; r0]; data.cosets()],
        top_coset: (0..data.cosets()).collect(),
    };
    let mut covectors = Vec::new();
    let mut ys: Vec<Vec<i64>> = Vec::new();
    for depth in 0.. {
        let d = &level.data;
        if has_torsion(d) {
            return Ok(TararinOutcome::Reject { reason: RejectReason::TorsionInKernel, depth });
        }
        if d.rank == 0 {
            // Torsion-free and finite: trivial.
            return Ok(TararinOutcome::Accept(FunctionalChain { covectors }));
        }
        let rel = abelianization_matrix(d);
        let smith = smith_normal_form(&rel);
        let (_, free) = smith.cokernel();
        match free {
            0 => return Ok(TararinOutcome::Reject { reason: RejectReason::NotIndicable, depth }),
            1 => {}
            _ => return Ok(TararinOutcome::Reject { reason: RejectReason::RankTooHigh, depth }),
        }
        let ell = primitive(&smith.kernel_basis()[0]);
        let (r, q) = (d.rank, d.cosets());
        let ell_a = ell[..r].to_vec();
        let ell_t = ell[r..].to_vec();

        covectors.push(extend_covector(&level, &ell_a, &ys, data));
        let witness = match ell_a.iter().position(|&x| x != 0) {
            Some(i) => (unit(r, i), 0),
            None => (vec![0; r], ell_t.iter().position(|&x| x != 0).expect("nonzero functional")),
        };
        let (wv, wc) = level.to_top(&witness.0, witness.1);
        let o = data.coset_order(wc);
        ys.push(data.pow(&(wv, wc), o).0);

        // Descend to ker L.
        let (g, bez) = bezout(&ell_a);
        let kept: Vec<usize> = (0..q).filter(|&c| ell_t[c] % g == 0).collect();
        let shift: Vec<Vec<i64>> = kept.iter().map(|&c| bez.iter().map(|&b| -(ell_t[c] / g) * b).collect()).collect();
        let row = IntMatrix::from_rows(std::slice::from_ref(&ell_a));
        let s = smith_normal_form(&row);
        let kernel: Vec<Vec<i64>> = (1..r).map(|j| s.v.col(j)).collect();
        let new_coords = |x: &[i64]| -> Vec<i64> {
            let y = s.v_inv.mul_vec(x);
            debug_assert_eq!(y[0], 0, "vector outside the kernel");
            y[1..].to_vec()
        };
        let index: HashMap<usize, usize> = kept.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut table = vec![vec![0; kept.len()]; kept.len()];
        let mut cocycle = vec![vec![vec![]; kept.len()]; kept.len()];
        let mut actions = Vec::with_capacity(kept.len());
        for (i, &c) in kept.iter().enumerate() {
            let cols: Vec<Vec<i64>> = kernel.iter().map(|b| new_coords(&d.actions[c].mul_vec(b))).collect();
            actions.push(IntMatrix::from_cols(r - 1, &cols));
            for (j, &e) in kept.iter().enumerate() {
                let ce = d.table[c][e];
                let k = index[&ce];
                table[i][j] = k;
                let u = add(&add(&shift[i], &d.actions[c].mul_vec(&shift[j])), &d.cocycle[c][e]);
                let u: Vec<i64> = u.iter().zip(&shift[k]).map(|(a, b)| a - b).collect();
                cocycle[i][j] = new_coords(&u);
            }
        }
        let next = VirtuallyAbelianData {
            rank: r - 1,
            labels: kept.iter().map(|&c| d.labels[c].clone()).collect(),
            table,
            actions,
            cocycle,
        };
        let basis_top = kernel.iter().map(|b| level.to_top(b, 0).0).collect();
        let offset = kept
            .iter()
            .zip(&shift)
            .map(|(&c, a)| {
                let base = level.to_top(a, 0).0;
                add(&base, &level.offset[c])
            })
            .collect();
        let top_coset = kept.iter().map(|&c| level.top_coset[c]).collect();
        level = Level { data: next, basis_top, offset, top_coset };
    }
    unreachable!()
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

/// Extend `ell_a` (on the current lattice) to the top lattice: vanish on the
/// earlier witness squares, then average over the current cosets' actions.
fn extend_covector(level: &Level, ell_a: &[i64], ys: &[Vec<i64>], top: &VirtuallyAbelianData) -> Vec<i64> {
    let r0 = top.rank;
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs = Vec::new();
    for (col, &l) in level.basis_top.iter().zip(ell_a) {
        rows.push(col.iter().map(|&x| q(x)).collect());
        rhs.push(q(l));
    }
    for y in ys {
        rows.push(y.iter().map(|&x| q(x)).collect());
        rhs.push(BigRational::zero());
    }
    let v = solve_square(rows, rhs).expect("witness squares span a complement");
    let mut avg = vec![BigRational::zero(); r0];
    for &c in &level.top_coset {
        let m = &top.actions[c];
        for (j, a) in avg.iter_mut().enumerate() {
            for (i, vi) in v.iter().enumerate() {
                *a += vi * q(m[(i, j)]);
            }
        }
    }
    let denom = avg.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i64> =
        avg.iter().map(|x| (x.numer() * (&denom / x.denom())).to_i64().expect("covector fits in i64")).collect();
    let mut out = primitive(&ints);
    normalize_sign(&mut out);
    out
}

fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].recip();
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = &a[i][col] * &inv;
                for j in col..n {
                    let t = &f * &a[col][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[col];
                b[i] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Values of a hom to `Z_2` on `(z, a_0, …, a_m)`.
pub fn psi_value(psi: &[u8], g: &Element) -> u8 {
    let mut s = psi[0] as i64 * g.k as i64;
    for (p, e) in psi[1..].iter().zip(&g.e) {
        s += *p as i64 * e;
    }
    s.rem_euclid(2) as u8
}

/// Whether `psi` respects every defining relation.
pub fn is_homomorphism(spec: &GroupSpec, psi: &[u8]) -> bool {
    spec.abelianized_relations()
        .iter()
        .all(|row| row.iter().zip(psi).map(|(r, &p)| r * p as i64).sum::<i64>().rem_euclid(2) == 0)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("PsiNotVanishingOnA: psi is nonzero on {0}")]
    PsiNotVanishingOnA(String),
    #[error("NotAHomomorphism: psi does not respect the relations")]
    NotAHomomorphism,
    #[error("psi must have {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl KernelError {
    pub fn name(&self) -> &'static str {
        match self {
            KernelError::PsiNotVanishingOnA(_) => "PsiNotVanishingOnA",
            KernelError::NotAHomomorphism => "NotAHomomorphism",
            KernelError::WrongLength { .. } => "WrongLength",
            KernelError::Lattice(_) => "AbelianityViolation",
        }
    }
}

/// A kernel `K = ker ψ` of a presented group, described as virtually abelian
/// data together with the group elements behind it.
#[derive(Debug, Clone)]
pub struct KernelData {
    pub psi: Vec<u8>,
    pub data: VirtuallyAbelianData,
    pub lattice: Vec<Element>,
    pub reps: Vec<Element>,
    a: ALattice,
    sub: Smith,
    coset_of_key: HashMap<Vec<i64>, usize>,
}

impl KernelData {
    pub fn contains(&self, g: &Element) -> bool {
        psi_value(&self.psi, g) == 0
    }

    pub fn a_lattice(&self) -> &ALattice {
        &self.a
    }

    /// Coordinates of `g` in the kernel's lattice basis.
    pub fn lattice_coords(&self, spec: &GroupSpec, g: &Element) -> Option<Vec<i64>> {
        let c = self.a.coords(spec, g)?;
        self.sub.solve(&c)
    }

    /// `g = v · t_c` with `v` in the lattice.
    pub fn decompose(&self, spec: &GroupSpec, g: &Element) -> Option<(Vec<i64>, usize)> {
        if !self.contains(g) {
            return None;
        }
        let c = *self.coset_of_key.get(&sign_key(spec, g))?;
        let v = spec.mul(g, &spec.inv(&self.reps[c]));
        Some((self.lattice_coords(spec, &v)?, c))
    }
}

fn sign_key(spec: &GroupSpec, g: &Element) -> Vec<i64> {
    (0..spec.rank()).map(|j| spec.quotient_sign_action(g, j)).collect()
}

/// Kernel data for `ψ: G → Z_2`, requiring `ψ(𝒜) = 0` so the lattice is `𝒜`.
pub fn kernel_subgroup_data(spec: &GroupSpec, psi: &[u8]) -> Result<KernelData, KernelError> {
    build_kernel_data(spec, psi, true)
}

/// Kernel data with lattice `𝒜 ∩ ker ψ`; accepts any homomorphism.
pub fn kernel_data_relaxed(spec: &GroupSpec, psi: &[u8]) -> Result<KernelData, KernelError> {
    build_kernel_data(spec, psi, false)
}

/// Data of `T` itself over `𝒜 ∩ T`.
pub fn t_data(spec: &GroupSpec) -> Result<KernelData, KernelError> {
    let t = spec.t_spec();
    let psi = vec![0; spec.rank() + 1];
    build_kernel_data(&t, &psi, true)
}

fn build_kernel_data(spec: &GroupSpec, psi: &[u8], strict: bool) -> Result<KernelData, KernelError> {
    let rank = spec.rank();
    if psi.len() != rank + 1 {
        return Err(KernelError::WrongLength { expected: rank + 1, got: psi.len() });
    }
    let a = compute_a(spec)?;
    let basis = a.basis_elements();
    let w: Vec<u8> = basis.iter().map(|b| psi_value(psi, b)).collect();
    let first = w.iter().position(|&x| x == 1);
    if let (true, Some(i)) = (strict, first) {
        return Err(KernelError::PsiNotVanishingOnA(basis[i].to_string()));
    }
    if !is_homomorphism(spec, psi) {
        return Err(KernelError::NotAHomomorphism);
    }
    let r = a.rank();
    let cols: Vec<Vec<i64>> = (0..r)
        .map(|j| match first {
            None => unit(r, j),
            Some(i0) if j == i0 => {
                let mut v = vec![0; r];
                v[i0] = 2;
                v
            }
            Some(i0) => {
                let mut v = unit(r, j);
                v[i0] += w[j] as i64;
                v
            }
        })
        .collect();
    let sub_m = IntMatrix::from_cols(r, &cols);
    let sub = smith_normal_form(&sub_m);
    let lattice: Vec<Element> = cols.iter().map(|c| a.element(spec, c)).collect();
    let fix = first.map(|i0| basis[i0].clone());

    let top_bits = if spec.n() > 0 { 1 } else { 0 };
    let bits = top_bits + rank - 1;
    let mut reps = Vec::new();
    let mut coset_of_key = HashMap::new();
    for mask in 0u32..(1 << bits) {
        let bit = |b: usize| ((mask >> b) & 1) as i64;
        let k = if top_bits == 1 { bit(0) as u32 } else { 0 };
        let mut e = vec![0; rank];
        for (i, x) in e.iter_mut().take(rank - 1).enumerate() {
            *x = bit(top_bits + i);
        }
        let mut g = spec.element(k, e);
        if psi_value(psi, &g) == 1 {
            match &fix {
                Some(f) => g = spec.mul(&g, f),
                None => continue,
            }
        }
        let key = sign_key(spec, &g);
        if coset_of_key.contains_key(&key) {
            continue;
        }
        coset_of_key.insert(key, reps.len());
        reps.push(g);
    }

    let mut kd = KernelData {
        psi: psi.to_vec(),
        data: VirtuallyAbelianData {
            rank: r,
            labels: reps.iter().map(|g| g.to_string()).collect(),
            table: vec![],
            actions: vec![],
            cocycle: vec![],
        },
        lattice,
        reps,
        a,
        sub,
        coset_of_key,
    };
    let q = kd.reps.len();
    let mut table = vec![vec![0; q]; q];
    let mut cocycle = vec![vec![vec![]; q]; q];
    let mut actions = Vec::with_capacity(q);
    for c in 0..q {
        let tc = &kd.reps[c];
        let cols: Vec<Vec<i64>> = kd
            .lattice
            .iter()
            .map(|b| kd.lattice_coords(spec, &spec.conjugate(tc, b)).expect("lattice is normal"))
            .collect();
        actions.push(IntMatrix::from_cols(r, &cols));
        for d in 0..q {
            let prod = spec.mul(tc, &kd.reps[d]);
            let (u, cd) = kd.decompose(spec, &prod).expect("kernel is closed");
            table[c][d] = cd;
            cocycle[c][d] = u;
        }
    }
    kd.data.table = table;
    kd.data.actions = actions;
    kd.data.cocycle = cocycle;
    Ok(kd)
}

/// Promislow's group `⟨a, b | a b² a^{-1} = b^{-2}, b a² b^{-1} = a^{-2}⟩` over
/// the lattice `⟨a², b², (ab)²⟩`.
pub fn promislow() -> VirtuallyAbelianData {
    let diag = |d: [i64; 3]| IntMatrix::from_rows(&[vec![d[0], 0, 0], vec![0, d[1], 0], vec![0, 0, d[2]]]);
    let z = vec![0, 0, 0];
    // cosets: 1, a, b, ab (product is xor of the bit patterns)
    let u = vec![
        vec![z.clone(), z.clone(), z.clone(), z.clone()],
        vec![z.clone(), vec![1, 0, 0], z.clone(), vec![1, 0, 0]],
        vec![z.clone(), vec![-1, 1, -1], vec![0, 1, 0], vec![-1, 0, -1]],
        vec![z.clone(), vec![0, -1, 1], vec![0, -1, 0], vec![0, 0, 1]],
    ];
    VirtuallyAbelianData {
        rank: 3,
        labels: vec!["1".into(), "a".into(), "b".into(), "ab".into()],
        table: (0..4).map(|c| (0..4).map(|d| c ^ d).collect()).collect(),
        actions: vec![diag([1, 1, 1]), diag([1, -1, -1]), diag([-1, 1, -1]), diag([-1, -1, 1])],
        cocycle: u,
    }
}
