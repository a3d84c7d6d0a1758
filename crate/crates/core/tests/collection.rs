//! Collection checked against a faithful affine representation.
//!
//! Each `a_i` acts on `Q^{m+1}` by `x_i += 1` and `x_j *= ε_ij` for `j > i`;
//! `z` carries an extra `Z_n` tag and a hand-chosen affine map.

use circorder::fixtures;
use circorder::{compute_a, Element, Group, GroupSpec};
use proptest::prelude::*;

/// `x ↦ s ⊙ x + t/2`, tagged with a residue mod `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Aff {
    k: u32,
    s: Vec<i64>,
    t2: Vec<i64>,
}

impl Aff {
    fn id(k: u32, dim: usize) -> Self {
        Aff { k, s: vec![1; dim], t2: vec![0; dim] }
    }

    fn then_after(&self, g: &Aff, n: u32) -> Aff {
        // (self ∘ g)(x) = s_f (s_g x + t_g) + t_f
        let s = self.s.iter().zip(&g.s).map(|(a, b)| a * b).collect();
        let t2 = self.s.iter().zip(&g.t2).zip(&self.t2).map(|((a, b), c)| a * b + c).collect();
        let k = if n == 0 { 0 } else { (self.k + g.k) % n };
        Aff { k, s, t2 }
    }
}

struct Oracle {
    n: u32,
    a: Vec<Aff>,
    a_inv: Vec<Aff>,
    z: Option<Aff>,
}

impl Oracle {
    fn new(spec: &GroupSpec, z: Option<(Vec<i64>, Vec<i64>)>) -> Self {
        let m = spec.rank();
        let n = spec.n();
        let mut a = Vec::new();
        let mut a_inv = Vec::new();
        for i in 0..m {
            let mut f = Aff::id(0, m);
            for j in i + 1..m {
                f.s[j] = spec.epsilon(i, j);
            }
            f.t2[i] = 2;
            let mut g = f.clone();
            g.t2[i] = -2;
            a.push(f);
            a_inv.push(g);
        }
        let z = z.map(|(s, t2)| Aff { k: 1 % n.max(1), s, t2 });
        Oracle { n, a, a_inv, z }
    }

    fn rho(&self, g: &Element) -> Aff {
        let m = g.e.len();
        let mut out = Aff::id(0, m);
        for _ in 0..g.k {
            out = out.then_after(self.z.as_ref().unwrap(), self.n);
        }
        for (i, &x) in g.e.iter().enumerate() {
            let f = if x > 0 { &self.a[i] } else { &self.a_inv[i] };
            for _ in 0..x.abs() {
                out = out.then_after(f, self.n);
            }
        }
        out
    }
}

fn cases() -> Vec<(&'static str, GroupSpec, Oracle)> {
    let mk = |name: &'static str, z: Option<(Vec<i64>, Vec<i64>)>| {
        let s = fixtures::fixture(name).unwrap();
        let o = Oracle::new(&s, z);
        (name, s, o)
    };
    vec![
        mk("z", None),
        mk("k2", None),
        mk("dinf", Some((vec![-1], vec![0]))),
        mk("zz4", Some((vec![-1], vec![0]))),
        mk("ex414", Some((vec![-1, -1], vec![0, -1]))),
        mk("rank3", Some((vec![-1, -1, -1], vec![0, 0, 0]))),
    ]
}

fn element(spec: &GroupSpec, k: u32, e: &[i64]) -> Element {
    spec.element(k, e[..spec.rank()].to_vec())
}

#[test]
fn oracle_satisfies_presentations() {
    for (name, spec, o) in cases() {
        for g in spec.generators() {
            for h in spec.generators() {
                let c = spec.conjugate(&g, &h);
                let lhs = o.rho(&g).then_after(&o.rho(&h), o.n).then_after(&o.rho(&spec.inv(&g)), o.n);
                assert_eq!(lhs, o.rho(&c), "{name}: {g:?} {h:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn product_matches_affine_composition(
        k1 in 0u32..8, k2 in 0u32..8,
        e1 in proptest::collection::vec(-5i64..=5, 3),
        e2 in proptest::collection::vec(-5i64..=5, 3),
    ) {
        for (name, spec, o) in cases() {
            let x = element(&spec, k1, &e1);
            let y = element(&spec, k2, &e2);
            let xy = spec.mul(&x, &y);
            prop_assert_eq!(o.rho(&xy), o.rho(&x).then_after(&o.rho(&y), o.n), "{}", name);
            prop_assert!(spec.mul(&x, &spec.inv(&x)).is_identity());
        }
    }

    #[test]
    fn associativity(
        ks in proptest::collection::vec(0u32..8, 3),
        es in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 3), 3),
    ) {
        for (name, spec, _) in cases() {
            let x = element(&spec, ks[0], &es[0]);
            let y = element(&spec, ks[1], &es[1]);
            let z = element(&spec, ks[2], &es[2]);
            prop_assert_eq!(spec.mul(&spec.mul(&x, &y), &z), spec.mul(&x, &spec.mul(&y, &z)), "{}", name);
        }
    }
}

#[test]
fn z_squared_central_and_a_abelian() {
    for (name, spec, _) in cases() {
        let gens = spec.generators();
        if spec.n() > 0 {
            let z2 = spec.pow(&spec.z(), 2);
            assert!(gens.iter().all(|g| spec.commute(&z2, g)), "{name}");
        }
        for j in 0..spec.rank() {
            let sq = spec.pow(&spec.a(j), 2);
            for i in j..spec.rank() {
                assert!(spec.commute(&sq, &spec.a(i)), "{name}");
            }
        }
        let lat = compute_a(&spec).unwrap();
        for b in lat.basis_elements() {
            for g in &gens {
                let c = lat.coords(&spec, &spec.conjugate(g, &b)).expect("A is normal");
                let own = lat.coords(&spec, &b).unwrap();
                let nz: Vec<_> = c.iter().zip(&own).filter(|(x, _)| **x != 0).collect();
                assert_eq!(nz.len(), 1, "{name}");
                assert_eq!(nz[0].0.abs(), nz[0].1.abs(), "{name}");
            }
        }
    }
}
