use super::*;
use crate::compactify::{close_surface, CloseOptions};
use crate::cycles::{charge, dual_cycle};
use crate::exactgeom::lattice::{area2, pt};
use crate::surgery::{fan_from_toric_cycle, AlmostToricBase, BlowupPlacement};

fn cyc(v: &[i64]) -> Cycle {
    Cycle::new(v.to_vec()).unwrap()
}

fn four_six_five() -> AlmostToricBase {
    let rays = fan_from_toric_cycle(&cyc(&[0, 0, 0, 0])).unwrap();
    let mut b = AlmostToricBase::moment_polygon(&rays, &[16, 17, 16, 17]).unwrap();
    let plan: [(usize, &[i128]); 4] =
        [(0, &[2, 3, 4, 5]), (1, &[3, 4]), (2, &[2, 3, 4, 5, 6, 7]), (3, &[2, 3, 4, 5, 6])];
    for (edge, offsets) in plan {
        for &o in offsets {
            b = b.internal_blowup(edge, 1, o).unwrap();
        }
    }
    b.node_smoothing(0, 1).unwrap()
}

/// Two basis triangles `(a, b, c)` and `(b, a, x)` sharing the edge `a b`,
/// both drawn in the same chart.
fn pair(c: [Pt; 3], x: Pt) -> TriComplex {
    let charts = vec![c, [c[1], c[0], x]];
    let mut twin = vec![usize::MAX; 6];
    twin[0] = 3;
    twin[3] = 0;
    TriComplex {
        vertices: [c[0], c[1], c[2], x]
            .iter()
            .map(|&p| VertexInfo { pos: p, patch: Patch::Base, singular: false, expected_cycle: None })
            .collect(),
        faces: vec![[0, 1, 2], [1, 0, 3]],
        charts,
        base_charts: vec![Some(IAffine::IDENTITY); 2],
        twin,
        twin_maps: vec![IAffine::IDENTITY; 6],
        d: vec![0; 6],
        v0: 0,
        scale: 1,
        flips: 0,
    }
}

#[test]
fn flat_parallelogram_diagonal() {
    let t = pair([pt(1, 1), pt(0, 0), pt(1, 0)], pt(0, 1));
    assert_eq!(t.compute_d(0).unwrap(), 1);
    assert_eq!(t.compute_d(3).unwrap(), 1);
}

#[test]
fn bent_pair_is_zero_and_two() {
    let t = pair([pt(0, 0), pt(1, 0), pt(0, 1)], pt(0, -1));
    assert_eq!(t.compute_d(0).unwrap(), 0);
    assert_eq!(t.compute_d(3).unwrap(), 2);
}

#[test]
fn transition_map_enters_d() {
    let mut t = pair([pt(1, 1), pt(0, 0), pt(1, 0)], pt(0, 1));
    // a unimodular map fixing the common edge bends the second triangle
    t.twin_maps[0] = IAffine::new(IMat2::new(2, -1, 1, 0), pt(0, 0));
    assert_eq!(t.twin_maps[0].apply(pt(0, 1)), pt(-1, 0));
    assert_eq!(t.compute_d(0).unwrap(), 2);
    // a map moving the edge leaves x off the lattice line
    t.twin_maps[0] = IAffine::new(IMat2::new(1, 1, 0, 1), pt(0, 0));
    assert_eq!(t.compute_d(0), Err(ComplexError::NonIntegralEdge(0)));
}

#[test]
fn angle_sort() {
    let mut v = vec![pt(0, -1), pt(-1, 0), pt(1, 1), pt(1, 0), pt(0, 1), pt(1, -1)];
    sort_by_angle(&mut v);
    assert_eq!(v, vec![pt(1, 0), pt(1, 1), pt(0, 1), pt(-1, 0), pt(0, -1), pt(1, -1)]);
}

#[test]
fn expected_cycle_of_a_blown_up_smooth_point() {
    // one cut merges two neighbouring edges and adds one unit of charge
    let c = expected_star_cycle(&cyc(&[0, 0, 0, 0]), &[SurgeryOnCycle::NodeSmoothing(0)]).unwrap();
    assert_eq!(c, cyc(&[-2, 0, 0]));
    assert_eq!(charge(&c), 1);
}

fn pipeline(b: &AlmostToricBase) -> (ClosedSurface, TriComplex, TypeIIIReport) {
    let s = close_surface(b, CloseOptions::default()).unwrap();
    let t = build_complex(&s).unwrap();
    let d = dual_cycle(&b.bookkeeping_cycle()).unwrap();
    let r = verify_type_iii(&t, &d).unwrap();
    (s, t, r)
}

#[test]
fn four_six_five_is_type_iii() {
    let (s, t, r) = pipeline(&four_six_five());
    assert!(r.all_ok(), "failed: {:?}", r.failures());
    assert_eq!(r.charge_total, 24);
    assert_eq!(r.euler_characteristic, 2);
    assert!(cycles_equal_rot(&r.v0_cycle, &cyc(&[3, 2, 3, 2, 2, 2, 3, 2, 2])));
    assert_eq!(r.v0_charge, 6);
    assert_eq!(r.expected_stars_checked, 18);
    // read counterclockwise around v0 the dual comes out reversed
    let d = dual_cycle(&cyc(&[4, 6, 5])).unwrap();
    assert!(crate::cycles::cycles_equal_oriented(&r.v0_cycle, &d.reversed()));
    assert_eq!(r.v0_word, "RLLRLLLRLLLL");
    // faces are basis triangles covering the base and the cone
    let mut area = area2(&s.base.vertices());
    if let Some(c) = &s.cone {
        area += area2(&c.fundamental);
    }
    assert_eq!(t.faces.len() as i128, area);
}

#[test]
fn flips_remove_one_edge_at_v0_each() {
    let s = close_surface(&four_six_five(), CloseOptions::default()).unwrap();
    let t = edge_d_values(&triangulate(&s).unwrap()).unwrap();
    let before = t.around(t.v0).unwrap().len();
    let m = minimize_star(&t, t.v0).unwrap();
    let star = m.around(m.v0).unwrap();
    assert!(m.flips > 0);
    assert_eq!(before - star.len(), m.flips);
    assert!(star.iter().all(|&h| m.d[h] >= 2));
    assert!(star.iter().any(|&h| m.d[h] >= 3));
    // nothing left to flip
    assert_eq!(minimize_star(&m, m.v0).unwrap(), m);
}

fn cycles_equal_rot(a: &Cycle, b: &Cycle) -> bool {
    crate::cycles::cycles_equal(a, b)
}

#[test]
fn json_round_trip() {
    let (_, t, _) = pipeline(&four_six_five());
    let j = ComplexJson::from_complex(&t);
    let text = serde_json::to_string(&j).unwrap();
    let back: ComplexJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back.clone().into_complex().unwrap(), t);
    assert_eq!(back.kind, "tri_complex");
}

#[test]
fn broken_d_is_caught() {
    let (_, mut t, _) = pipeline(&four_six_five());
    t.d[5] += 1;
    let d = dual_cycle(&cyc(&[4, 6, 5])).unwrap();
    let r = verify_type_iii(&t, &d).unwrap();
    assert!(!r.triple_point_ok);
    assert!(!r.d_consistent_ok);
    assert!(!r.all_ok());
}

#[test]
fn malformed_json_is_rejected() {
    let (_, t, _) = pipeline(&four_six_five());
    let mut j = ComplexJson::from_complex(&t);
    j.edges[0].twin = j.edges.len();
    assert!(matches!(j.into_complex(), Err(ComplexError::Malformed(_))));
}

fn full_length_blowups(toric: &[i64], support: &[usize]) -> AlmostToricBase {
    let rays = fan_from_toric_cycle(&cyc(toric)).unwrap();
    let lengths = crate::surgery::solve_lengths(&rays, support).unwrap();
    let mut b = AlmostToricBase::moment_polygon(&rays, &lengths).unwrap().with_relaxed_cuts(true);
    for &e in support {
        let size = b.boundary.iter().find(|x| x.label == e).unwrap().length;
        b = b.internal_blowup_with(&BlowupPlacement { edge: e, size, offset: None, shear: None }).unwrap();
    }
    b
}

fn singular_count(r: &TypeIIIReport) -> usize {
    r.stars.iter().filter(|s| s.singular).count()
}

#[test]
fn first_charge_three_model() {
    let b = full_length_blowups(&[3, 2, 1, 2, 3, 1, 2, 2, 2, 2, 1], &[2, 5, 10]);
    let (s, _, r) = pipeline(&b);
    assert!(s.cone.is_none());
    assert!(r.all_ok(), "failed: {:?}", r.failures());
    assert!(cycles_equal_rot(&r.v0_cycle, &cyc(&[6, 9])));
    assert_eq!(r.v0_charge, 21);
    assert_eq!(r.charge_total - r.v0_charge, 3);
    assert_eq!(r.expected_stars_checked, singular_count(&r) - 1);
}

#[test]
fn second_charge_three_model() {
    let b = full_length_blowups(&[3, 2, 2, 1, 3, 2, 1, 2, 2, 2, 1], &[3, 6, 10]);
    assert_eq!(b.total_boundary_length(), 0);
    let (s, t, r) = pipeline(&b);
    assert!(s.cone.is_none());
    assert!(r.all_ok(), "failed: {:?}", r.failures());
    assert!(cycles_equal_rot(&r.v0_cycle, &cyc(&[6, 9])));
    assert_eq!(r.v0_charge, 21);
    assert_eq!(r.charge_total - r.v0_charge, 3);
    assert_eq!(r.expected_stars_checked, singular_count(&r) - 1);
    // fifty triple points
    assert_eq!(t.faces.len(), 50);
}
