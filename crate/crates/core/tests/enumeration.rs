use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use circorder::enumeration::*;
use circorder::fixtures;
use circorder::orders::*;
use circorder::tararin::psi_value;
use circorder::{ball, Element, Group, GroupSpec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn totient_by_factoring(mut n: u64) -> u64 {
    let mut out = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out = out / p * (p - 1);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out = out / n * (n - 1);
    }
    out
}

#[test]
fn cyclic_brute_force_matches_totient() {
    for n in 2..=9u32 {
        assert_eq!(brute_force_co_cyclic(n).0 as u64, totient_by_factoring(n as u64), "n = {n}");
    }
}

#[test]
fn k2_left_orders_match_ball_cones() {
    let k2 = fixtures::k2();
    let los = enumerate_lo_tararin(&k2).unwrap();
    assert_eq!(los.len(), 4);
    let b = ball(&k2, 2);
    for (_, lo) in &los {
        assert!(check_left_order(&k2, lo, &ball(&k2, 3)).is_empty());
    }
    let ours: BTreeSet<Vec<Element>> = los.iter().map(|(_, lo)| cone_on(lo, &b)).collect();
    assert_eq!(ours.len(), 4);
    let brute: BTreeSet<Vec<Element>> = brute_force_ball_orders(&k2, 2).unwrap().into_iter().collect();
    assert_eq!(ours, brute);
}

#[test]
fn tararin_left_orders_of_every_t() {
    for name in ["z", "k2", "dinf", "ex414", "zz4", "rank3"] {
        let s = fixtures::fixture(name).unwrap();
        let los = enumerate_lo_tararin(&s).unwrap();
        assert_eq!(los.len(), 1 << s.rank(), "{name}");
        let t = s.t_spec();
        let b = ball(&t, 2);
        let cones: Vec<_> = los.iter().map(|(_, lo)| lo.clone()).collect();
        assert_eq!(distinct_cones(&cones, &b), los.len(), "{name}");
    }
}

#[test]
fn counts_per_fixture() {
    let expect = [("dinf", 2, 1, 1), ("ex414", 8, 2, 1), ("zz4", 16, 1, 4), ("rank3", 8, 1, 1)];
    for (name, total, k_rot, k_lift) in expect {
        let (orders, r) = materialize_all(&fixtures::fixture(name).unwrap()).unwrap();
        assert_eq!((r.total, r.k_rot, r.k_lift), (total, k_rot, k_lift), "{name}");
        assert_eq!(orders.len() as u64, total);
        assert_eq!(r.lower_bound, r.phi_n * r.rank_factor);
    }
}

#[test]
fn ex414_second_kernel() {
    let s = fixtures::ex414();
    let (orders, r) = materialize_all(&s).unwrap();
    let accepted: Vec<_> = r.per_psi.iter().filter(|p| p.accepted).map(|p| p.psi.clone()).collect();
    assert_eq!(accepted, vec![vec![1, 0, 0], vec![1, 1, 0]]);
    let o = orders.iter().find(|o| o.descriptor.psi == [1, 1, 0]).unwrap();
    let za0 = s.mul(&s.z(), &s.a(0));
    let a02 = s.pow(&s.a(0), 2);
    assert!((o.kernel)(&za0) && (o.kernel)(&a02) && !(o.kernel)(&s.a(0)));
    let k: Vec<Element> = ball(&s, 3).into_iter().filter(|g| (o.kernel)(g)).collect();
    assert!(check_left_order(&s, &o.kernel_order, &k).is_empty());
    assert!(r.total > r.lower_bound);
}

#[test]
fn pairwise_distinct_where_claimed() {
    for name in ["dinf", "ex414", "rank3"] {
        let s = fixtures::fixture(name).unwrap();
        let e = enumerate_co(&s, EnumOptions::default()).unwrap();
        let id = s.identity();
        let b = ball(&s, 3);
        let sigs: HashSet<Vec<i8>> = e.orders.iter().map(|o| signature(&o.oracle, &id, &b)).collect();
        assert_eq!(sigs.len(), e.orders.len(), "{name}");
    }
}

/// `λ` is a homomorphism to `Z_q` iff it is additive on products of random elements.
fn is_hom_by_products(s: &GroupSpec, lambda: &[i64], q: i64, rng: &mut StdRng) -> bool {
    let b = ball(s, 3);
    (0..400).all(|_| {
        let x = &b[rng.gen_range(0..b.len())];
        let y = &b[rng.gen_range(0..b.len())];
        hom_value(lambda, &s.mul(x, y), q) == (hom_value(lambda, x, q) + hom_value(lambda, y, q)).rem_euclid(q)
    })
}

#[test]
fn k_lift_matches_additivity_oracle() {
    let mut rng = StdRng::seed_from_u64(5);
    let s = fixtures::zz4();
    let (count, list) = k_lift_count(&s);
    let mut oracle = Vec::new();
    for lz in 0..2 {
        for la in 0..2 {
            if is_hom_by_products(&s, &[lz, la], 2, &mut rng) {
                oracle.push(vec![lz, la]);
            }
        }
    }
    assert_eq!(count, 4);
    assert_eq!(list, oracle);
}

/// `z2_quotient ∘ twist` recovers `(u, λ)` exactly when `λ(z) = 0`; otherwise
/// the twist moves the positive generator to `z^{u+2}` and the pair collides
/// with another descriptor.
#[test]
fn zz4_twists_collide_in_pairs() {
    let s = Arc::new(fixtures::zz4());
    let (orders, _) = materialize_all(&s).unwrap();
    let b = ball(&*s, 3);
    let id = s.identity();
    let sigs: HashSet<Vec<i8>> = orders.iter().map(|o| signature(&o.oracle, &id, &b)).collect();
    assert_eq!(sigs.len(), 8);
    let mut recovered = 0;
    for o in &orders {
        let (u, lambda) = recover_twist(s.clone(), o.oracle.clone()).unwrap();
        let d = &o.descriptor;
        if d.lambda[0] == 0 {
            assert_eq!((u, lambda), (d.u, d.lambda.clone()));
            recovered += 1;
        } else {
            assert_eq!(u, (d.u + 2) % 4);
        }
    }
    assert_eq!(recovered, 8);
}

fn all_orders(name: &str) -> (Arc<GroupSpec>, Vec<CircularOrderOracle<Element>>) {
    let s = Arc::new(fixtures::fixture(name).unwrap());
    let orders = if s.n() == 0 {
        enumerate_lo_tararin(&s).unwrap().into_iter().map(|(_, lo)| linear_circular_order(s.clone(), lo)).collect()
    } else {
        materialize_all(&s).unwrap().0.into_iter().map(|o| o.oracle).collect()
    };
    (s, orders)
}

#[test]
fn lift_roundtrip_on_every_order() {
    let mut rng = StdRng::seed_from_u64(11);
    for name in fixtures::SPEC_NAMES {
        let (s, orders) = all_orders(name);
        let b = ball(&*s, 3);
        for c in orders {
            let back = lift_roundtrip(s.clone(), c.clone(), &b);
            for _ in 0..200 {
                let t: Vec<&Element> = (0..3).map(|_| &b[rng.gen_range(0..b.len())]).collect();
                assert_eq!(back.eval(t[0], t[1], t[2]), c.eval(t[0], t[1], t[2]), "{name}");
            }
        }
    }
}

#[test]
fn cocycle_fuzz_on_every_order() {
    for name in fixtures::SPEC_NAMES {
        let (s, orders) = all_orders(name);
        let b = ball(&*s, 3);
        for c in orders {
            let cfg = SampleConfig { exhaustive_limit: 0, random_quadruples: 1000, seed: 7 };
            let r = check_cocycle(&*s, &c, &b, cfg);
            assert!(r.is_ok(), "{name}: {:?}", r.violations);
        }
    }
}

#[test]
fn kernel_orders_restrict_from_the_circular_order() {
    let s = Arc::new(fixtures::ex414());
    let b = ball(&*s, 3);
    for o in materialize_all(&s).unwrap().0 {
        let psi = o.descriptor.psi.clone();
        let member: Membership<Element> = Arc::new(move |g| psi_value(&psi, g) == 0);
        let lo = restriction_order(s.clone(), &o.oracle, member.clone(), &b).unwrap();
        for g in b.iter().filter(|g| member(g)) {
            assert_eq!(lo.sign(g), o.kernel_order.sign(g));
        }
    }
}

/// The rotation kernel is the linear part: it is convex, and the next subgroup
/// up (`K ∪ z²K` when `G/K = Z_4`) and the other index-2 kernels are not.
#[test]
fn rotation_kernel_is_the_linear_part() {
    for name in ["dinf", "ex414", "rank3", "zz4"] {
        let s = Arc::new(fixtures::fixture(name).unwrap());
        let b = ball(&*s, 3);
        let (orders, report) = materialize_all(&s).unwrap();
        let homs: Vec<Vec<u8>> = report.per_psi.iter().filter(|p| p.accepted).map(|p| p.psi.clone()).collect();
        for o in &orders {
            assert!(check_convex(s.clone(), &o.oracle, o.kernel.clone(), &b).convex, "{name} {:?}", o.descriptor);
            if s.n() == 4 {
                let (k, z2, g) = (o.kernel.clone(), s.pow(&s.z(), 2), s.clone());
                let up: Membership<Element> = Arc::new(move |x| k(x) || k(&g.mul(&z2, x)));
                assert!(!check_convex(s.clone(), &o.oracle, up, &b).convex, "{name} {:?}", o.descriptor);
            } else {
                for psi in homs.iter().filter(|p| **p != o.descriptor.psi) {
                    let psi = psi.clone();
                    let other: Membership<Element> = Arc::new(move |x| psi_value(&psi, x) == 0);
                    assert!(!check_convex(s.clone(), &o.oracle, other, &b).convex, "{name} {:?}", o.descriptor);
                }
            }
        }
    }
}
