use circorder::circle::*;
use circorder::perturb::*;
use num_rational::BigRational;
use proptest::prelude::*;

fn point(q: (i64, i64), c2: (i64, i64), c3: (i64, i64)) -> CirclePoint {
    CirclePoint::new(
        Real::rational(rat(q.0, q.1)).add(&Real::sqrt(2, rat(c2.0, c2.1))).add(&Real::sqrt(3, rat(c3.0, c3.1))),
    )
}

fn arb_point() -> impl Strategy<Value = CirclePoint> {
    let r = || (-20i64..20, 1i64..9);
    (r(), r(), prop_oneof![Just((0i64, 1i64)), r()]).prop_map(|(q, a, b)| point(q, a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ord_is_a_cocycle(a in arb_point(), b in arb_point(), c in arb_point(), d in arb_point()) {
        let o = |x: &CirclePoint, y: &CirclePoint, z: &CirclePoint| ord(x, y, z).unwrap() as i32;
        prop_assert_eq!(o(&b, &c, &d) - o(&a, &c, &d) + o(&a, &b, &d) - o(&a, &b, &c), 0);
    }

    #[test]
    fn ord_is_translation_invariant(a in arb_point(), b in arb_point(), c in arb_point(), t in arb_point()) {
        prop_assert_eq!(ord(&a, &b, &c).unwrap(), ord(&t.add(&a), &t.add(&b), &t.add(&c)).unwrap());
    }

    #[test]
    fn ord_is_cyclic_and_antisymmetric(a in arb_point(), b in arb_point(), c in arb_point()) {
        let v = ord(&a, &b, &c).unwrap();
        prop_assert_eq!(v, ord(&b, &c, &a).unwrap());
        prop_assert_eq!(v, -ord(&b, &a, &c).unwrap());
    }
}

#[test]
fn prufer_depth_four() {
    let emb = AbelianEmbedding::prufer(2, 4);
    let s = [CirclePoint::rational(1, 2), CirclePoint::rational(1, 4)];
    let p = perturb_prufer(&emb, &s).unwrap();
    assert!(agrees_on(&s, |x| p.apply(x)).unwrap());
    let (a, b, c) = &p.witness;
    assert_ne!(ord(a, b, c).unwrap(), ord(&p.apply(a), &p.apply(b), &p.apply(c)).unwrap());
    // injective on the whole truncation
    let all = emb.ball(16);
    assert_eq!(all.len(), 16);
    let imgs: std::collections::HashSet<_> = all.iter().map(|x| p.apply(x)).collect();
    assert_eq!(imgs.len(), 16);
    assert_eq!(p.embedding.gens[2], CirclePoint::rational(5, 8));
}

#[test]
fn prufer_s_too_fine_for_truncation() {
    let emb = AbelianEmbedding::prufer(2, 2);
    let s = [CirclePoint::rational(1, 4)];
    assert_eq!(perturb_prufer(&emb, &s).unwrap_err().name(), "NotApplicable");
}

#[test]
fn nontorsion_rank_two() {
    let lam = point((-1, 1), (1, 1), (0, 1));
    let emb = AbelianEmbedding::new(vec![lam.clone(), CirclePoint::rational(1, 3)]);
    let s: Vec<CirclePoint> = emb.ball(2);
    let p = perturb_nontorsion(&emb, &s).unwrap();
    assert!(agrees_on(&s, |x| p.apply(x)).unwrap());
    let (a, b, c) = &p.witness;
    assert_ne!(ord(a, b, c).unwrap(), ord(&p.apply(a), &p.apply(b), &p.apply(c)).unwrap());
    let ball = emb.ball(6);
    let imgs: std::collections::HashSet<_> = ball.iter().map(|x| p.apply(x)).collect();
    assert_eq!(imgs.len(), ball.len());
}

#[test]
fn phi_with_three_cosets() {
    let s: Vec<BigRational> = (-2..=2).map(|x| rat(x, 1)).collect();
    let (c, r) = default_m(&s);
    let phi = build_phi(3, rat(0, 1), &s, c, r).unwrap();
    let rep = verify_phi(&phi, &s, 30).unwrap();
    assert!(rep.agrees_on_cosets && rep.chain_positive && rep.injective_on_ball && rep.homomorphism_on_samples);
    assert_eq!(rep.ball_size, 30);
    // sorted images: each coset occupies a short arc around n/3
    let mut pts: Vec<(f64, i64, u32)> = (0..3u32)
        .flat_map(|n| (-2..=2i64).map(move |h| (h, n)))
        .map(|(h, n)| (phi.phi(&(rat(h, 1), n)).to_f64(), h, n))
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let pattern: Vec<(i64, u32)> = pts.iter().map(|p| (p.1, p.2)).collect();
    // reference pattern: 0,1,2 | then for n = 1, 2: −2..2 | then −2, −1 of coset 0
    let mut reference = vec![(0, 0), (1, 0), (2, 0)];
    for n in 1..3 {
        reference.extend((-2..=2).map(|h| (h, n)));
    }
    reference.extend([(-2, 0), (-1, 0)]);
    assert_eq!(pattern, reference);
}
