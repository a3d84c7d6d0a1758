use std::sync::Arc;

use circorder::enumeration::{materialize_all, MaterializedOrder};
use circorder::fixtures;
use circorder::orders::*;
use circorder::tararin::psi_value;
use circorder::{ball, Element, Group, GroupSpec};

fn orders_of(spec: &GroupSpec) -> Vec<MaterializedOrder> {
    materialize_all(spec).unwrap().0
}

fn in_t() -> Membership<Element> {
    Arc::new(|g: &Element| g.k == 0)
}

/// `a_0^e ↦ e·p/q mod 1` on `Z`, a rational stand-in for an irrational rotation.
fn rotation_order(p: i64, q: i64) -> CircularOrderOracle<Element> {
    CircularOrderOracle::new(Provenance::UserSupplied, move |a: &Element, b: &Element, c: &Element| {
        let pos = |x: &Element| (x.e[0] * p).rem_euclid(q);
        sort_sign(a, b, c, |x, y| pos(x) < pos(y))
    })
}

#[test]
fn dinf_orders_are_valid_and_t_is_convex() {
    let s = Arc::new(fixtures::dinf());
    let b4 = ball(&*s, 4);
    for o in orders_of(&s) {
        let r = check_cocycle(&*s, &o.oracle, &b4, SampleConfig::default());
        assert!(r.is_ok(), "{:?}", r.violations);
        let conv = check_convex(s.clone(), &o.oracle, in_t(), &b4);
        assert!(conv.convex);
    }
}

#[test]
fn dinf_restriction_is_an_order_on_z() {
    let s = Arc::new(fixtures::dinf());
    let b = ball(&*s, 3);
    let mut seen = Vec::new();
    for o in orders_of(&s) {
        let lo = restriction_order(s.clone(), &o.oracle, in_t(), &b).unwrap();
        let a0 = s.a(0);
        let sa = lo.sign(&a0);
        assert_eq!(lo.sign(&s.inv(&a0)), -sa);
        assert!(check_left_order(&*s, &lo, &b.iter().filter(|g| g.k == 0).cloned().collect::<Vec<_>>()).is_empty());
        seen.push(sa);
    }
    seen.sort();
    assert_eq!(seen, vec![-1, 1]);
}

#[test]
fn trivial_subgroup_is_convex() {
    let s = Arc::new(fixtures::dinf());
    let b = ball(&*s, 3);
    let o = &orders_of(&s)[0];
    let trivial: Membership<Element> = Arc::new(|g: &Element| g.is_identity());
    let lo = restriction_order(s.clone(), &o.oracle, trivial.clone(), &b).unwrap();
    assert!(b.iter().all(|g| !g.is_identity() || lo.sign(g) == 0));
    assert!(check_convex(s, &o.oracle, trivial, &b).convex);
}

#[test]
fn ex414_order_from_odd_kernel_is_not_convex_on_t() {
    let s = Arc::new(fixtures::ex414());
    let b = ball(&*s, 3);
    let mut witnessed = 0;
    for o in orders_of(&s) {
        let conv = check_convex(s.clone(), &o.oracle, in_t(), &b);
        match o.descriptor.psi[1] {
            0 => assert!(conv.convex),
            _ => {
                assert!(!conv.convex);
                match conv.witness.unwrap() {
                    ConvexWitness::Trapped { h1, g, h2 } => {
                        assert!(h1.k == 0 && h2.k == 0 && g.k != 0);
                        assert_eq!(o.oracle.eval(&h1, &g, &h2), 1);
                    }
                    ConvexWitness::NotLeftOrdered { g, h } => {
                        let pos = |x: &Element| o.oracle.eval(&s.inv(x), &s.identity(), x) == 1;
                        assert!(g.k == 0 && h.k == 0);
                        assert!(g == h || (pos(&g) && pos(&h) && !pos(&s.mul(&g, &h))));
                    }
                }
                witnessed += 1;
            }
        }
        // the kernel of ψ is always convex
        assert!(check_convex(s.clone(), &o.oracle, o.kernel.clone(), &b).convex);
    }
    assert_eq!(witnessed, 4);
}

#[test]
fn quotients_by_linear_part() {
    for name in ["dinf", "ex414"] {
        let s = Arc::new(fixtures::fixture(name).unwrap());
        let b = ball(&*s, 2);
        for o in orders_of(&s) {
            let psi = o.descriptor.psi.clone();
            let z = s.z();
            let id = s.identity();
            let tr: Section<Element, Element> =
                Arc::new(move |g: &Element| if psi_value(&psi, g) == 0 { id.clone() } else { z.clone() });
            let hs: Vec<Element> = b.iter().filter(|g| (o.kernel)(g)).cloned().collect();
            let q = quotient_order(s.clone(), &o.oracle, tr, &b, &hs).unwrap();
            for x in &b {
                for y in &b {
                    assert_eq!(q.eval(&s.identity(), x, y), 0);
                }
            }
        }
    }
}

#[test]
fn lifted_f_table_on_z3() {
    use circorder::group::Cyclic;
    let c = CircularOrderOracle::new(Provenance::UserSupplied, |a: &u32, b: &u32, d: &u32| {
        sort_sign(a, b, d, |x, y| x < y)
    });
    let l = lift(Arc::new(Cyclic::new(3)), c);
    assert_eq!(l.f(&1, &1), 0);
    assert_eq!(l.f(&2, &2), 1);
    assert!((0..3).all(|a| l.f(&a, &0) == 0));
}

#[test]
fn rotation_of_z_is_archimedean_in_both_senses() {
    let s = Arc::new(fixtures::z());
    let c = rotation_order(408, 985);
    let sample: Vec<Element> = (-6..=6).filter(|&e| e != 0).map(|e| s.element(0, vec![e])).collect();
    let lifted = Arc::new(lift(s.clone(), c.clone()));
    let lo = lifted.order();
    for f in &sample {
        for g in &sample {
            let circ = check_archimedean(&*s, &c, f, g, 50);
            let (lf, lg) = ((f.clone(), 0), (g.clone(), 0));
            let g_pos = if lo.sign(&lg) > 0 { lg } else { lifted.inv(&lg) };
            let stolz = check_archimedean_left(&*lifted, &lo, &lf, &g_pos, 50);
            assert!(!circ.is_failure(), "{f} {g}");
            assert!(!stolz.is_failure(), "{f} {g}");
        }
    }
}

#[test]
fn rotation_quotient_recovers_embedding() {
    let s = Arc::new(fixtures::z());
    let c = rotation_order(408, 985);
    let b = ball(&*s, 5);
    let back = lift_roundtrip(s.clone(), c.clone(), &b);
    for x in &b {
        for y in &b {
            for w in &b {
                assert_eq!(back.eval(x, y, w), c.eval(x, y, w));
            }
        }
    }
}

#[test]
fn dinf_has_archimedean_witness_in_both_senses() {
    let s = Arc::new(fixtures::dinf());
    for o in orders_of(&s) {
        let a0 = s.a(0);
        let lifted = Arc::new(lift(s.clone(), o.oracle.clone()));
        let lo = lifted.order();
        let found = [a0.clone(), s.inv(&a0)].into_iter().find_map(|g| {
            match check_archimedean(&*s, &o.oracle, &s.z(), &g, 50) {
                ArchimedeanVerdict::Failure { f, g } => Some((f, g)),
                _ => None,
            }
        });
        let (f, g) = found.expect("a_0-powers stay inside the linear part");
        assert_eq!(f.k, 1);
        assert_eq!(g.k, 0);
        let lg = (g.clone(), 0);
        let lg = if lo.sign(&lg) > 0 { lg } else { lifted.inv(&lg) };
        assert!(check_archimedean_left(&*lifted, &lo, &(f, 0), &lg, 50).is_failure());
    }
}

#[test]
fn lift_is_functorial_for_t_in_dinf() {
    let s = Arc::new(fixtures::dinf());
    let t = Arc::new(s.t_spec());
    let bt = ball(&*t, 4);
    for o in orders_of(&s) {
        let big = lift(s.clone(), o.oracle.clone());
        let small = lift(t.clone(), o.oracle.clone());
        let (lo_big, lo_small) = (big.order(), small.order());
        for g in &bt {
            for h in &bt {
                for (n, m) in [(0, 0), (1, -1), (-2, 1)] {
                    let (x, y) = ((g.clone(), n), (h.clone(), m));
                    assert_eq!(small.mul(&x, &y), big.mul(&x, &y));
                    assert_eq!(lo_small.sign(&x), lo_big.sign(&x));
                }
            }
        }
    }
}

#[test]
fn bi_invariance_transfers_through_the_lift() {
    let z = Arc::new(fixtures::z());
    let c = rotation_order(408, 985);
    let bz = ball(&*z, 4);
    assert!(right_invariance_failure(&*z, &c, &bz).is_none());
    let lz = Arc::new(lift(z.clone(), c));
    let sample: Vec<_> = bz.iter().flat_map(|g| [(g.clone(), 0), (g.clone(), 1), (g.clone(), -1)]).collect();
    assert!(right_invariance_failure_left(&*lz, &lz.order(), &sample).is_none());

    let d = Arc::new(fixtures::dinf());
    let bd = ball(&*d, 2);
    let o = &orders_of(&d)[0];
    assert!(right_invariance_failure(&*d, &o.oracle, &bd).is_some());
    let ld = Arc::new(lift(d.clone(), o.oracle.clone()));
    let sample: Vec<_> = bd.iter().flat_map(|g| [(g.clone(), 0), (g.clone(), 1)]).collect();
    assert!(right_invariance_failure_left(&*ld, &ld.order(), &sample).is_some());
}

#[test]
fn positive_generator_and_trivial_n2_quotient() {
    let s = Arc::new(fixtures::dinf());
    let b = ball(&*s, 2);
    for o in orders_of(&s) {
        let q = z2_quotient(s.clone(), o.oracle.clone()).unwrap();
        assert_eq!(q.u, 1);
        for x in &b {
            assert_eq!(q.r(x), 0);
            for y in &b {
                assert_eq!(q.cbar.eval(&s.identity(), x, y), o.oracle.eval(&s.identity(), x, y));
            }
        }
    }
}
