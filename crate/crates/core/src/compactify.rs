//! Closing a base with negative-definite boundary into a sphere.
//!
//! The boundary is developed once around; the resulting affine monodromy is
//! hyperbolic with a rational fixed point `v0`. After scaling so that `v0` is
//! integral, the cone from `v0` over one period of the developed boundary is a
//! fundamental domain for the monodromy, and gluing it along the boundary
//! closes the surface.

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cycles::Cycle;
use crate::exactgeom::lattice::{area2, cross, orient, segments_cross, segments_overlap, IAffine, Pt};
use crate::exactgeom::{denominator_lcm, AffineMap, Rat, Vec2};
use crate::surgery::{AlmostToricBase, SurgeryError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompactifyError {
    #[error("every boundary component has length zero")]
    EmptyBoundary,
    #[error("monodromy has trace {0}, not hyperbolic")]
    NotHyperbolic(String),
    #[error("monodromy is the identity; every point is fixed")]
    Degenerate,
    #[error("invalid anchor: {0}")]
    AnchorInvalid(String),
    #[error("boundary chains do not match: {0}")]
    ChainMismatch(String),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

pub type Result<T> = std::result::Result<T, CompactifyError>;

/// Affine monodromy of a counterclockwise loop along the boundary.
pub fn collar_monodromy(b: &AlmostToricBase) -> Result<AffineMap> {
    if b.total_boundary_length() == 0 {
        return Err(CompactifyError::EmptyBoundary);
    }
    Ok(b.develop()?.monodromy.to_affine())
}

/// The unique fixed point `(I - N)^{-1} B` of `x -> N x + B`.
pub fn fixed_point(m: &AffineMap) -> Result<Vec2> {
    let n = &m.linear;
    if n.is_identity() {
        return Err(CompactifyError::Degenerate);
    }
    let t = n.trace();
    let two = num_bigint::BigInt::from(2);
    if t == two {
        return Err(CompactifyError::NotHyperbolic(t.to_string()));
    }
    // I - N = [[1-a, -b], [-c, 1-d]]
    let one = num_bigint::BigInt::one();
    let (p, q, r, s) = (&one - &n.a, -&n.b, -&n.c, &one - &n.d);
    let det = Rat::from_integer(&p * &s - &q * &r);
    let (bx, by) = (&m.translation.x, &m.translation.y);
    let x = (Rat::from_integer(s) * bx - Rat::from_integer(q) * by) / &det;
    let y = (Rat::from_integer(p) * by - Rat::from_integer(r) * bx) / &det;
    Ok(Vec2::new(x, y))
}

/// Least `k` making `k v0` integral.
pub fn choose_refinement(v0: &Vec2) -> i128 {
    denominator_lcm(v0).to_i128().expect("refinement factor fits in i128")
}

/// Developed boundary of a base over several periods.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteHyperbola {
    /// `vertices[j]` is the developed vertex with index `j - periods * period`.
    pub vertices: Vec<Pt>,
    /// Primitive directions of the boundary components over one period,
    /// zero-length components included.
    pub directions: Vec<Pt>,
    pub d_values: Cycle,
    pub period: usize,
    pub periods: usize,
    pub monodromy: IAffine,
}

impl DiscreteHyperbola {
    /// Developed vertex `j`, where vertex `0` is the start of the chain.
    pub fn vertex(&self, j: i64) -> Pt {
        let idx = j + (self.periods * self.period) as i64;
        self.vertices[idx as usize]
    }

    /// One period starting at `anchor`: `w_anchor, ..., w_{anchor+n}`.
    pub fn period_from(&self, anchor: usize) -> Vec<Pt> {
        (0..=self.period).map(|i| self.vertex((anchor + i) as i64)).collect()
    }
}

fn power(m: &IAffine, k: i64) -> IAffine {
    let base = if k < 0 { m.inverse().expect("monodromy is invertible") } else { *m };
    (0..k.unsigned_abs()).fold(IAffine::IDENTITY, |acc, _| acc.compose(&base))
}

pub fn discrete_hyperbola(b: &AlmostToricBase, periods: usize) -> Result<DiscreteHyperbola> {
    if b.total_boundary_length() == 0 {
        return Err(CompactifyError::EmptyBoundary);
    }
    let periods = periods.max(1);
    let dev = b.develop()?;
    let path = dev.path();
    let n = path.len() - 1;
    let m = dev.monodromy;
    let mut vertices = Vec::with_capacity(2 * periods * n + 1);
    for k in -(periods as i64)..periods as i64 {
        let mk = power(&m, k);
        vertices.extend(path[..n].iter().map(|&p| mk.apply(p)));
    }
    vertices.push(power(&m, periods as i64).apply(path[0]));
    let directions = dev.components()?.into_iter().map(|(_, u)| u).collect();
    Ok(DiscreteHyperbola { vertices, directions, d_values: b.boundary_d_values()?, period: n, periods, monodromy: m })
}

/// Vertices `P_0 = 0, P_{i+1} = P_i + m_i z_i` with `z_{i+1} = d_i z_i - z_{i-1}`
/// and seeds `z_0, z_1`, for `count` steps.
pub fn hyperbola_from_recurrence(d: &Cycle, m: &[i128], z0: Pt, z1: Pt, count: usize) -> (Vec<Pt>, Vec<Pt>) {
    let n = d.len();
    let mut z = vec![z0, z1];
    while z.len() < count + 1 {
        let i = z.len() - 1;
        z.push(z[i].scale(d.entries()[i % n] as i128) - z[i - 1]);
    }
    z.truncate(count.max(2));
    let mut p = vec![Pt::default()];
    for i in 0..count {
        let last = *p.last().unwrap();
        p.push(last + z[i.min(z.len() - 1)].scale(m[i % n]));
    }
    (p, z)
}

/// Fundamental domain of the monodromy acting on the cone side of the
/// developed boundary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeDomain {
    /// `v0, M w_a, M w_{a+n-1}, ..., w_a`, counterclockwise.
    pub fundamental: Vec<Pt>,
    /// Maps the edge `(v0, w_a)` onto `(v0, M w_a)`.
    pub identification: IAffine,
    pub anchor: usize,
    pub refinement: i128,
}

impl ConeDomain {
    pub fn apex(&self) -> Pt {
        self.fundamental[0]
    }

    pub fn refine(&self, k: i128) -> Self {
        let mut c = self.clone();
        c.fundamental.iter_mut().for_each(|p| *p = p.scale(k));
        c.identification.t = c.identification.t.scale(k);
        c.refinement *= k;
        c
    }
}

/// Cone from `v0` over the period of `h` starting at vertex `anchor`.
pub fn build_cone(h: &DiscreteHyperbola, v0: Pt, anchor: usize, refinement: i128) -> Result<ConeDomain> {
    let m = h.monodromy;
    let t = m.m.trace();
    if t <= 2 {
        return Err(CompactifyError::NotHyperbolic(t.to_string()));
    }
    if m.apply(v0) != v0 {
        return Err(CompactifyError::AnchorInvalid(format!("{v0} is not fixed by the monodromy")));
    }
    if anchor >= h.period || anchor + h.period > h.periods * h.period {
        return Err(CompactifyError::AnchorInvalid(format!(
            "anchor {anchor} outside the {} developed periods of length {}",
            h.periods, h.period
        )));
    }
    let mut w = h.period_from(anchor);
    w.reverse();
    let mut poly = vec![v0];
    poly.extend(w);
    // every edge of the hyperbola must face v0
    for i in 1..poly.len() - 1 {
        if orient(v0, poly[i], poly[i + 1]) <= 0 {
            return Err(CompactifyError::AnchorInvalid(format!(
                "edge {}-{} is not visible from {v0}",
                poly[i],
                poly[i + 1]
            )));
        }
    }
    if area2(&poly) <= 0 || !is_simple(&poly) {
        return Err(CompactifyError::AnchorInvalid("fundamental polygon is not simple".into()));
    }
    Ok(ConeDomain { fundamental: poly, identification: m, anchor, refinement })
}

/// No two non-adjacent edges meet, and adjacent edges meet only at their
/// common vertex.
pub fn is_simple(poly: &[Pt]) -> bool {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if a == b {
            return false;
        }
        for j in i + 1..n {
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if segments_cross(a, b, c, d) || segments_overlap(a, b, c, d) {
                return false;
            }
            if !adjacent {
                let touches = [a, b].iter().any(|&p| crate::exactgeom::lattice::on_segment(c, d, p))
                    || [c, d].iter().any(|&p| crate::exactgeom::lattice::on_segment(a, b, p));
                if touches {
                    return false;
                }
            }
        }
    }
    true
}

/// A base boundary segment glued to a cone edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryMatch {
    pub chain_index: usize,
    /// Cone edge from `fundamental[cone_edge]` to the next vertex.
    pub cone_edge: usize,
    /// Takes the cone edge onto the base segment.
    pub cone_to_base: IAffine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedSurface {
    pub base: AlmostToricBase,
    /// Absent when every boundary component has length zero.
    pub cone: Option<ConeDomain>,
    pub boundary_matching: Vec<BoundaryMatch>,
}

impl ClosedSurface {
    /// Position of the cusp point: the cone apex, or the point the boundary
    /// collapsed to.
    pub fn v0_in_base(&self) -> Option<Pt> {
        match self.cone {
            Some(_) => None,
            None => Some(self.base.outline[0].start),
        }
    }

    pub fn singular_count(&self) -> usize {
        self.base.singular_points.len() + 1
    }
}

pub fn assemble_sphere(b: &AlmostToricBase, c: Option<&ConeDomain>) -> Result<ClosedSurface> {
    let Some(c) = c else {
        if b.total_boundary_length() != 0 {
            return Err(CompactifyError::ChainMismatch("base has boundary but no cone".into()));
        }
        // the boundary collapsed to a point, which the monodromy must fix
        let dev = b.develop()?;
        let p = b.outline[0].start;
        if dev.monodromy.apply(p) != p {
            return Err(CompactifyError::ChainMismatch(format!("collapsed boundary point {p} is not fixed")));
        }
        return Ok(ClosedSurface { base: b.clone(), cone: None, boundary_matching: Vec::new() });
    };
    if c.refinement != b.scale {
        return Err(CompactifyError::ChainMismatch(format!("base refined by {}, cone by {}", b.scale, c.refinement)));
    }
    let dev = b.develop()?;
    let m = dev.monodromy;
    if m != c.identification {
        return Err(CompactifyError::ChainMismatch("cone identification differs from the monodromy".into()));
    }
    let poly = &c.fundamental;
    let np = poly.len();
    let mut matching = Vec::new();
    for e in dev.edges() {
        let seg = &b.outline[e.chain_index];
        let mut found = None;
        for j in [0i64, 1, -1] {
            let chart = power(&m, j).compose(&e.chart);
            let (s, t) = (chart.apply(seg.end), chart.apply(seg.start));
            if let Some(k) = (1..np - 1).find(|&k| poly[k] == s && poly[k + 1] == t) {
                found = Some((k, chart.inverse().unwrap()));
                break;
            }
        }
        let (k, map) = found.ok_or_else(|| {
            CompactifyError::ChainMismatch(format!("no cone edge for boundary segment {}", e.chain_index))
        })?;
        matching.push(BoundaryMatch { chain_index: e.chain_index, cone_edge: k, cone_to_base: map });
    }
    if matching.len() != np - 2 {
        return Err(CompactifyError::ChainMismatch(format!(
            "{} boundary segments for {} cone edges",
            matching.len(),
            np - 2
        )));
    }
    Ok(ClosedSurface { base: b.clone(), cone: Some(c.clone()), boundary_matching: matching })
}

/// Parameters of the closing step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CloseOptions {
    pub anchor: Option<usize>,
    pub periods: usize,
}

impl Default for CloseOptions {
    fn default() -> Self {
        CloseOptions { anchor: None, periods: 1 }
    }
}

/// Refine, build the cone and glue it on; or glue nothing when the boundary
/// has already collapsed.
pub fn close_surface(b: &AlmostToricBase, opts: CloseOptions) -> Result<ClosedSurface> {
    if b.total_boundary_length() == 0 {
        return assemble_sphere(b, None);
    }
    let m = collar_monodromy(b)?;
    let v0 = fixed_point(&m)?;
    let tr = m.linear.trace();
    if tr <= num_bigint::BigInt::from(2) {
        return Err(CompactifyError::NotHyperbolic(tr.to_string()));
    }
    let k = choose_refinement(&v0);
    let refined = b.refine(k);
    // anchors up to one period ahead need a second developed period
    let h = discrete_hyperbola(&refined, opts.periods.max(2))?;
    let kv = v0.scale(&Rat::from_integer(k.into()));
    let v0k = Pt::from_vec2(&kv).expect("refined fixed point is integral");
    let anchors: Vec<usize> = match opts.anchor {
        Some(a) => vec![a],
        None => (0..h.period).collect(),
    };
    let mut last = CompactifyError::AnchorInvalid("no anchor tried".into());
    for a in anchors {
        match build_cone(&h, v0k, a, refined.scale) {
            Ok(cone) => return assemble_sphere(&refined, Some(&cone)),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// `v` is the origin.
pub fn is_origin(v: &Vec2) -> bool {
    v.x.is_zero() && v.y.is_zero()
}

/// Sanity check used by the tests: consecutive component directions form
/// oriented lattice bases.
pub fn directions_are_bases(h: &DiscreteHyperbola) -> bool {
    let u = &h.directions;
    let n = u.len();
    (0..n).all(|i| {
        let next = if i + 1 == n { h.monodromy.apply_linear(u[0]) } else { u[i + 1] };
        cross(u[i], next) == 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::monodromy;
    use crate::exactgeom::lattice::pt;
    use crate::exactgeom::{rat, rat_frac, Mat2};
    use crate::surgery::fan_from_toric_cycle;

    fn cyc(v: &[i64]) -> Cycle {
        Cycle::new(v.to_vec()).unwrap()
    }

    fn rectangle(a: i128, b: i128) -> AlmostToricBase {
        let rays = fan_from_toric_cycle(&cyc(&[0, 0, 0, 0])).unwrap();
        AlmostToricBase::moment_polygon(&rays, &[a, b, a, b]).unwrap()
    }

    fn four_six_five() -> AlmostToricBase {
        let mut b = rectangle(16, 17);
        let plan: [(usize, &[i128]); 4] =
            [(0, &[2, 3, 4, 5]), (1, &[3, 4]), (2, &[2, 3, 4, 5, 6, 7]), (3, &[2, 3, 4, 5, 6])];
        for (edge, offsets) in plan {
            for &o in offsets {
                b = b.internal_blowup(edge, 1, o).unwrap();
            }
        }
        b.node_smoothing(0, 1).unwrap()
    }

    #[test]
    fn toric_monodromy_is_trivial() {
        let m = collar_monodromy(&rectangle(7, 5)).unwrap();
        assert!(m.linear.is_identity());
        assert!(is_origin(&m.translation));
        assert_eq!(fixed_point(&m), Err(CompactifyError::Degenerate));
    }

    #[test]
    fn four_six_five_monodromy() {
        let m = collar_monodromy(&four_six_five()).unwrap();
        assert_eq!(m.linear.trace(), 105.into());
        assert_eq!(m.linear.det(), 1.into());
        // conjugate to the product of the edge matrices, so same trace
        assert_eq!(monodromy(&cyc(&[4, 6, 5])).trace(), m.linear.trace());
        let v0 = fixed_point(&m).unwrap();
        assert_eq!(m.apply(&v0), v0);
    }

    #[test]
    fn fixed_points() {
        let m = AffineMap { linear: Mat2::from_i64(2, 1, 1, 1), translation: Vec2::int(1, 0) };
        assert_eq!(fixed_point(&m).unwrap(), Vec2::int(0, -1));
        let p = AffineMap { linear: Mat2::from_i64(1, 1, 0, 1), translation: Vec2::int(3, 4) };
        assert!(matches!(fixed_point(&p), Err(CompactifyError::NotHyperbolic(_))));
        let three_twos = monodromy(&cyc(&[2, 2, 2]));
        assert_eq!(three_twos.trace(), 2.into());
    }

    #[test]
    fn refinement_factor() {
        assert_eq!(choose_refinement(&Vec2::int(0, -1)), 1);
        assert_eq!(choose_refinement(&Vec2::new(rat_frac(1, 2), rat_frac(3, 4))), 4);
        assert_eq!(choose_refinement(&Vec2::new(rat_frac(5, 3), rat_frac(1, 2))), 6);
        assert_eq!(choose_refinement(&Vec2::new(rat(7), rat(0))), 1);
    }

    #[test]
    fn rectangle_refines() {
        let r = rectangle(7, 5).refine(2);
        assert_eq!(r.vertices(), vec![pt(0, 0), pt(0, 14), pt(-10, 14), pt(-10, 0)]);
        assert_eq!(r.boundary_d_values().unwrap(), cyc(&[0, 0, 0, 0]));
        assert_eq!(rectangle(7, 5).refine(1), rectangle(7, 5));
    }

    #[test]
    fn recurrence_seed() {
        let (_, z) = hyperbola_from_recurrence(&cyc(&[4, 6, 5]), &[1, 1, 1], pt(1, 0), pt(0, 1), 3);
        assert_eq!(z[2], pt(-1, 6));
    }

    #[test]
    fn hyperbola_periodicity() {
        let b = four_six_five();
        let h = discrete_hyperbola(&b, 2).unwrap();
        let n = h.period as i64;
        for j in -2 * n..=0 {
            assert_eq!(h.monodromy.apply(h.vertex(j)), h.vertex(j + n));
        }
        assert!(directions_are_bases(&h));
        // the developed vertices follow the recurrence from their first two directions
        let (pts, _) = hyperbola_from_recurrence(
            &h.d_values,
            &b.boundary.iter().map(|e| e.length).collect::<Vec<_>>(),
            h.directions[0],
            h.directions[1],
            3,
        );
        let corners: Vec<Pt> = {
            let mut v = vec![h.vertex(0)];
            for w in h.period_from(0).windows(3) {
                if orient(w[0], w[1], w[2]) != 0 {
                    v.push(w[1]);
                }
            }
            v.push(h.vertex(n));
            v
        };
        let shifted: Vec<Pt> = pts.iter().map(|&p| p + h.vertex(0)).collect();
        assert_eq!(corners, shifted);
    }

    #[test]
    fn toric_hyperbola_closes() {
        let h = discrete_hyperbola(&rectangle(3, 2), 1).unwrap();
        assert_eq!(h.vertex(0), h.vertex(h.period as i64));
    }

    #[test]
    fn four_six_five_closes_up() {
        let s = close_surface(&four_six_five(), CloseOptions::default()).unwrap();
        assert_eq!(s.singular_count(), 19);
        let c = s.cone.as_ref().unwrap();
        let f = &c.fundamental;
        let (v0, first, last) = (f[0], f[1], *f.last().unwrap());
        assert_eq!(c.identification.apply(last), first);
        assert_eq!((first - v0).gcd(), (last - v0).gcd());
        assert!(is_simple(f));
        assert_eq!(s.boundary_matching.len(), f.len() - 2);
    }

    #[test]
    fn bad_anchor_is_rejected() {
        let b = four_six_five();
        let m = collar_monodromy(&b).unwrap();
        let v0 = fixed_point(&m).unwrap();
        let k = choose_refinement(&v0);
        let r = b.refine(k);
        let h = discrete_hyperbola(&r, 1).unwrap();
        let v0k = Pt::from_vec2(&v0.scale(&Rat::from_integer(k.into()))).unwrap();
        assert!(matches!(build_cone(&h, v0k, h.period, k), Err(CompactifyError::AnchorInvalid(_))));
        // a point that is not the fixed point cannot be a cone apex
        assert!(matches!(build_cone(&h, v0k + pt(1, 0), 0, k), Err(CompactifyError::AnchorInvalid(_))));
        // one developed period only reaches anchor 0
        assert!(matches!(build_cone(&h, v0k, 1, k), Err(CompactifyError::AnchorInvalid(_))));
    }

    #[test]
    fn every_anchor_is_answered() {
        let b = four_six_five();
        let mut closed = 0;
        for a in 0..4 {
            match close_surface(&b, CloseOptions { anchor: Some(a), periods: 1 }) {
                Ok(s) => {
                    assert_eq!(s.singular_count(), 19);
                    closed += 1;
                }
                Err(e) => assert!(matches!(e, CompactifyError::AnchorInvalid(_)), "{e}"),
            }
        }
        assert!(closed >= 1);
    }

    #[test]
    fn mismatched_refinement() {
        let b = four_six_five();
        let s = close_surface(&b, CloseOptions::default()).unwrap();
        let cone = s.cone.unwrap().refine(2);
        assert!(matches!(assemble_sphere(&s.base, Some(&cone)), Err(CompactifyError::ChainMismatch(_))));
    }
}
