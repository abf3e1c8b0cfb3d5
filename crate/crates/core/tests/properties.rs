use cusp_core::compactify::{choose_refinement, collar_monodromy, fixed_point};
use cusp_core::cycles::{apply_surgery, cycles_equal, is_negative_definite};
use cusp_core::exactgeom::lattice::{orient, pt};
use cusp_core::exactgeom::{rat_frac, rat_from_pair, rat_to_pair};
use cusp_core::surgery::fan_from_toric_cycle;
use cusp_core::*;
use num_bigint::BigInt;
use proptest::prelude::*;

/// Negative-definite cycles: entries 2..=9, at least one above 2.
fn negative_definite() -> impl Strategy<Value = Cycle> {
    (proptest::collection::vec(2i64..=9, 1..=12), any::<prop::sample::Index>()).prop_map(|(mut v, i)| {
        if v.iter().all(|&d| d == 2) {
            let k = i.index(v.len());
            v[k] = 3;
        }
        Cycle::new(v).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn charges_of_dual_pair_sum_to_24(c in negative_definite()) {
        let d = dual_cycle(&c).unwrap();
        prop_assert_eq!(charge(&c) + charge(&d), 24);
        prop_assert!(is_negative_definite(&d));
        prop_assert!(cycles_equal(&dual_cycle(&d).unwrap(), &c));
    }

    #[test]
    fn dual_keeps_trace_and_swaps_block_counts(c in negative_definite()) {
        let d = dual_cycle(&c).unwrap();
        // the two monodromies are conjugate up to inversion
        prop_assert_eq!(monodromy(&c).trace(), monodromy(&d).trace());
        let excess: i64 = c.entries().iter().map(|x| x - 2).sum();
        prop_assert_eq!(d.len() as i64, excess);
        let heads = |x: &Cycle| x.entries().iter().filter(|&&e| e >= 3).count();
        prop_assert_eq!(heads(&d), heads(&c));
    }

    #[test]
    fn negative_definite_monodromy_is_hyperbolic(c in negative_definite()) {
        let n = monodromy(&c);
        prop_assert_eq!(n.det(), BigInt::from(1));
        prop_assert!(n.trace() > BigInt::from(2));
        prop_assert!(sl2z_word(&n).is_ok());
    }

    #[test]
    fn monodromy_ignores_rotation(c in negative_definite(), k in 0usize..12) {
        let (m, r) = (monodromy(&c), monodromy(&c.rotated(k)));
        prop_assert_eq!(m.trace(), r.trace());
        prop_assert!(sl2z_word(&m).unwrap().cyclic_eq(&sl2z_word(&r).unwrap()));
    }
}

/// Toric cycles: a minimal model followed by corner blow-ups.
fn toric() -> impl Strategy<Value = Cycle> {
    let start = prop_oneof![Just(vec![-1i64, -1, -1]), (-4i64..=4).prop_map(|a| vec![0, a, 0, -a])];
    (start, proptest::collection::vec(any::<prop::sample::Index>(), 0..10)).prop_map(|(v, blowups)| {
        let mut c = Cycle::new(v).unwrap();
        for i in blowups {
            c = apply_surgery(&c, &SurgeryOnCycle::CornerBlowup(i.index(c.len()))).unwrap();
        }
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn toric_monodromy_is_trivial(c in toric()) {
        prop_assert!(fan_from_toric_cycle(&c).is_ok(), "{}", c);
        prop_assert!(monodromy(&c).is_identity());
        prop_assert_eq!(charge(&c), 0);
    }

    #[test]
    fn fan_accepts_only_trivial_monodromy(v in proptest::collection::vec(-3i64..=3, 3..=8)) {
        let c = Cycle::new(v).unwrap();
        if fan_from_toric_cycle(&c).is_ok() {
            prop_assert!(monodromy(&c).is_identity());
        }
    }

    #[test]
    fn rationals_round_trip_as_pairs(n in -10_000i64..10_000, d in 1i64..10_000) {
        let r = rat_frac(n, d);
        prop_assert_eq!(rat_from_pair(&rat_to_pair(&r)), Some(r.clone()));
        prop_assert!(rat_to_pair(&r)[1] > BigInt::from(0));
    }

    #[test]
    fn affine_maps_invert(a in -5i128..=5, b in -5i128..=5, t in (-20i128..20, -20i128..20), p in (-50i128..50, -50i128..50)) {
        // [[1+ab, a], [b, 1]] has det 1
        let m = IMat2 { a: 1 + a * b, b: a, c: b, d: 1 };
        prop_assert_eq!(m.det(), 1);
        let f = IAffine::new(m, pt(t.0, t.1));
        let g = f.inverse().unwrap();
        let q = pt(p.0, p.1);
        prop_assert_eq!(g.apply(f.apply(q)), q);
        prop_assert!(f.compose(&g).is_identity());
        prop_assert_eq!(f.to_affine().apply(&q.to_vec2()), f.apply(q).to_vec2());
        // unimodular maps keep twice-areas
        let (u, v) = (pt(1, 0), pt(0, 1));
        prop_assert_eq!(orient(f.apply(pt(0, 0)), f.apply(u), f.apply(v)), 1);
    }
}

/// Rectangle recipes: blow-up counts per side, an optional corner smoothing.
#[derive(Clone, Debug)]
struct Small {
    sides: (i128, i128),
    counts: [usize; 4],
    smooth: Option<usize>,
}

fn small() -> impl Strategy<Value = Small> {
    ((8i128..=16, 8i128..=16), [2usize..=4, 2usize..=4, 2usize..=4, 2usize..=4], prop::option::of(0usize..4))
        .prop_map(|(sides, counts, smooth)| Small { sides, counts, smooth })
}

fn build(s: &Small) -> Option<AlmostToricBase> {
    let rays = fan_from_toric_cycle(&Cycle::new(vec![0, 0, 0, 0]).unwrap()).unwrap();
    let (a, b) = s.sides;
    let mut base = AlmostToricBase::moment_polygon(&rays, &[a, b, a, b]).unwrap();
    for (e, &k) in s.counts.iter().enumerate() {
        for _ in 0..k {
            base = base.internal_blowup(e, 1, 2).ok()?;
        }
    }
    if let Some(v) = s.smooth {
        base = base.node_smoothing(v, 1).ok()?;
    }
    let c = base.bookkeeping_cycle();
    let excess: i64 = c.entries().iter().map(|d| d - 2).sum();
    if !is_negative_definite(&c) || excess < 2 {
        return None;
    }
    let k = choose_refinement(&fixed_point(&collar_monodromy(&base).ok()?).ok()?);
    (k <= 3).then_some(base)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, max_global_rejects: 4096, ..ProptestConfig::default() })]

    #[test]
    fn random_rectangles_give_type_iii(base in small().prop_filter_map("too fine or not definite", |s| build(&s))) {
        let c = base.bookkeeping_cycle();
        prop_assert_eq!(base.boundary_d_values().unwrap(), c.clone());
        let s = close_surface(&base, CloseOptions::default()).unwrap();
        let t = build_complex(&s).unwrap();
        for h in 0..t.he_count() {
            prop_assert_eq!(t.d[h] + t.d[t.twin[h]], 2);
        }
        for tri in &t.charts {
            prop_assert_eq!(orient(tri[0], tri[1], tri[2]), 1);
        }
        let r = verify_type_iii(&t, &dual_cycle(&c).unwrap()).unwrap();
        prop_assert!(r.all_ok(), "{:?}", r.failures());
        prop_assert_eq!(r.expected_stars_checked, s.base.singular_points.len());
        let star = t.around(t.v0).unwrap();
        prop_assert!(star.iter().all(|&h| t.d[h] >= 2));
        prop_assert!(star.iter().any(|&h| t.d[h] >= 3));
    }
}
