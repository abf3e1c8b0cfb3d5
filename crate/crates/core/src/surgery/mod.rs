//! Moment polygons and the two surgeries on integral-affine surfaces with
//! boundary.
//!
//! A base is stored as a planar region whose boundary is a cyclic chain of
//! segments. A segment is either a piece of a boundary component or one side
//! of a cut; the two sides of a cut form a seam glued by an integral affine
//! map. Boundary components of lattice length zero are kept as markers that
//! remember their direction, so that the boundary cycle stays readable after
//! every piece of a component has been cut away.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cycles::{apply_surgery, Cycle, SurgeryOnCycle};
use crate::exactgeom::lattice::{
    cross, locate, on_segment, on_segment_interior, orient, pt, segments_cross, segments_overlap, IAffine, IMat2,
    Location, Pt,
};

mod develop;

pub use develop::{DevEdge, DevMarker, Development};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurgeryError {
    #[error("cycle {0} is not the cycle of a smooth complete toric surface")]
    NotToric(Cycle),
    #[error("edge lengths do not close up: sum of m_i z_i is {0}")]
    NonClosing(Pt),
    #[error("the polygon has empty interior")]
    Degenerate,
    #[error("no positive lengths supported on the given edges close up")]
    NoSolution,
    #[error("edge {edge} has length {length}, shorter than {size}")]
    EdgeTooShort { edge: usize, length: i128, size: i128 },
    #[error("triangle does not fit: {0}")]
    DoesNotFit(String),
    #[error("cut collides with the boundary, another cut or a singular point: {0}")]
    CutCollision(String),
    #[error("every boundary component has length zero")]
    EmptyBoundary,
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("no boundary component with label {0}")]
    UnknownEdge(usize),
    #[error("inconsistent base: {0}")]
    Corrupt(String),
}

pub type Result<T> = std::result::Result<T, SurgeryError>;

/// A boundary component of the base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    /// Index of the toric boundary divisor this component descends from.
    pub label: usize,
    /// Primitive direction of the first piece, in the planar chart.
    pub direction: Pt,
    pub length: i128,
    /// Self-intersection number as tracked through the surgeries.
    pub d: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKind {
    InternalBlowup,
    NodeSmoothing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "label")]
pub enum Anchor {
    /// The boundary component a blow-up triangle rests on.
    Edge(usize),
    /// The corner at the end of the given component.
    Vertex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub kind: CutKind,
    pub apex: Pt,
    pub anchor: Anchor,
    /// Multiple of the basis triangle, or the lattice length of the slit.
    pub size: i128,
    /// Identification of the second side onto the first; fixes the apex.
    pub gluing: IAffine,
    /// Primitive directions from the apex along the first and second side.
    /// For a slit both sides point back to the corner.
    pub e1: Pt,
    pub e2: Pt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum SegmentKind {
    Edge { label: usize },
    Cut { seam: usize, side: Side },
}

/// A boundary component of length zero sitting at the start of a segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub label: usize,
    pub dir: Pt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: Pt,
    pub end: Pt,
    pub kind: SegmentKind,
    pub markers: Vec<Marker>,
}

impl Segment {
    fn edge(start: Pt, end: Pt, label: usize) -> Self {
        Segment { start, end, kind: SegmentKind::Edge { label }, markers: Vec::new() }
    }

    fn side(start: Pt, end: Pt, seam: usize, side: Side) -> Self {
        Segment { start, end, kind: SegmentKind::Cut { seam, side }, markers: Vec::new() }
    }

    pub fn label(&self) -> Option<usize> {
        match self.kind {
            SegmentKind::Edge { label } => Some(label),
            SegmentKind::Cut { .. } => None,
        }
    }

    pub fn length(&self) -> i128 {
        (self.end - self.start).gcd()
    }

    pub fn direction(&self) -> Pt {
        (self.end - self.start).primitive()
    }
}

/// Two sides of the boundary chain glued together. `map` takes the `B` side
/// onto the `A` side with reversed orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seam {
    pub map: IAffine,
    pub cuts: Vec<usize>,
    pub alive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub position: Pt,
    pub cuts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostToricBase {
    pub boundary: Vec<BoundaryEdge>,
    pub outline: Vec<Segment>,
    pub seams: Vec<Seam>,
    pub cuts: Vec<Cut>,
    pub singular_points: Vec<SingularPoint>,
    /// Allow blow-up triangles to share a side with an earlier cut.
    pub relaxed_cuts: bool,
    /// Product of the refinements applied so far.
    pub scale: i128,
}

fn rot90(w: Pt) -> Pt {
    pt(-w.y, w.x)
}

/// Rays of the fan of a smooth complete toric surface with the given cycle,
/// starting from `(1,0), (0,1)`.
pub fn fan_from_toric_cycle(c: &Cycle) -> Result<Vec<Pt>> {
    let d = c.entries();
    let n = d.len();
    let not_toric = || SurgeryError::NotToric(c.clone());
    if n < 3 {
        return Err(not_toric());
    }
    let mut w = vec![pt(1, 0), pt(0, 1)];
    // w_{i+1} = d_i w_i - w_{i-1}, with d indexed so that d[i] belongs to w[i]
    for i in 1..=n {
        let next = w[i].scale(d[i % n] as i128) - w[i - 1];
        w.push(next);
    }
    if w[n] != w[0] || w[n + 1] != w[1] {
        return Err(not_toric());
    }
    w.truncate(n);
    if winding_number(&w) != 1 {
        return Err(not_toric());
    }
    Ok(w)
}

/// Number of times the cyclic sequence of rays turns past the positive x axis.
fn winding_number(w: &[Pt]) -> usize {
    let u = pt(1, 0);
    let n = w.len();
    (0..n)
        .filter(|&i| {
            let a = w[i];
            let b = w[(i + 1) % n];
            cross(a, b) > 0 && cross(a, u) > 0 && cross(u, b) >= 0
        })
        .count()
}

/// The self-intersection numbers of a cyclic sequence of primitive rays.
pub fn cycle_of_rays(w: &[Pt]) -> Option<Cycle> {
    let n = w.len();
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let s = w[(i + n - 1) % n] + w[(i + 1) % n];
        d.push(ratio(s, w[i])?);
    }
    Cycle::new(d).ok()
}

/// The integer `k` with `s = k u`, if any.
pub(crate) fn ratio(s: Pt, u: Pt) -> Option<i64> {
    if cross(s, u) != 0 {
        return None;
    }
    let k = if u.x != 0 { s.x / u.x } else { s.y / u.y };
    (u.scale(k) == s).then_some(k as i64)
}

/// Least positive lengths on `support` (zero elsewhere) closing the polygon
/// with edge directions `rays[i]` rotated by a quarter turn.
///
/// Returns the solution of least total length, searching by increasing total.
pub fn solve_lengths(rays: &[Pt], support: &[usize]) -> Result<Vec<i128>> {
    let z: Vec<Pt> = rays.iter().map(|&w| rot90(w)).collect();
    let mut sup: Vec<usize> = support.to_vec();
    sup.sort_unstable();
    sup.dedup();
    if sup.is_empty() || sup.iter().any(|&i| i >= z.len()) {
        return Err(SurgeryError::NoSolution);
    }
    let zs: Vec<Pt> = sup.iter().map(|&i| z[i]).collect();
    let k = zs.len();
    let build = |m: &[i128]| {
        let mut out = vec![0; z.len()];
        for (j, &i) in sup.iter().enumerate() {
            out[i] = m[j];
        }
        out
    };
    if k == 3 {
        // the kernel of a 2x3 matrix of rank 2 is spanned by the cofactors
        let mut m = [cross(zs[1], zs[2]), cross(zs[2], zs[0]), cross(zs[0], zs[1])];
        if m.iter().all(|&v| v < 0) {
            m.iter_mut().for_each(|v| *v = -*v);
        }
        if m.iter().any(|&v| v <= 0) {
            return Err(SurgeryError::NoSolution);
        }
        let g = num_integer::gcd(num_integer::gcd(m[0], m[1]), m[2]);
        return Ok(build(&m.map(|v| v / g)));
    }
    const MAX_TOTAL: i128 = 400;
    let mut m = vec![0i128; k];
    for total in k as i128..=MAX_TOTAL {
        if search_lengths(&zs, &mut m, 0, total, pt(0, 0)) {
            return Ok(build(&m));
        }
    }
    Err(SurgeryError::NoSolution)
}

fn search_lengths(zs: &[Pt], m: &mut [i128], i: usize, remaining: i128, acc: Pt) -> bool {
    let k = zs.len();
    if i == k {
        return remaining == 0 && acc == pt(0, 0);
    }
    let left = (k - i - 1) as i128;
    if i == k - 1 {
        m[i] = remaining;
        return acc + zs[i].scale(remaining) == pt(0, 0);
    }
    for v in 1..=(remaining - left) {
        m[i] = v;
        if search_lengths(zs, m, i + 1, remaining - v, acc + zs[i].scale(v)) {
            return true;
        }
    }
    false
}

/// Result of checking where a blow-up triangle sits relative to the region.
struct Fit {
    cancel_prev: bool,
    cancel_next: bool,
}

/// Placement of a blow-up triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupPlacement {
    pub edge: usize,
    pub size: i128,
    /// Distance from the start of the component, measured along it.
    pub offset: Option<i128>,
    /// Multiples of the edge direction added to the default apex direction.
    pub shear: Option<i128>,
}

impl AlmostToricBase {
    /// The polygon with edge `i` of direction `rays[i]` rotated by a quarter
    /// turn and lattice length `lengths[i]`, first vertex at the origin.
    pub fn moment_polygon(rays: &[Pt], lengths: &[i128]) -> Result<Self> {
        let n = rays.len();
        if lengths.len() != n || n < 3 {
            return Err(SurgeryError::Degenerate);
        }
        if lengths.iter().any(|&m| m < 0) {
            return Err(SurgeryError::Degenerate);
        }
        let z: Vec<Pt> = rays.iter().map(|&w| rot90(w)).collect();
        let mut corners = vec![pt(0, 0)];
        for i in 0..n {
            let last = *corners.last().unwrap();
            corners.push(last + z[i].scale(lengths[i]));
        }
        let sum = corners[n];
        if sum != pt(0, 0) {
            return Err(SurgeryError::NonClosing(sum));
        }
        corners.pop();
        let positive: Vec<usize> = (0..n).filter(|&i| lengths[i] > 0).collect();
        let poly: Vec<Pt> = positive.iter().map(|&i| corners[i]).collect();
        if positive.len() < 3 || crate::exactgeom::lattice::area2(&poly) <= 0 {
            return Err(SurgeryError::Degenerate);
        }
        let toric = cycle_of_rays(rays).ok_or(SurgeryError::Degenerate)?;
        let boundary = (0..n)
            .map(|i| BoundaryEdge { label: i, direction: z[i], length: lengths[i], d: toric.entries()[i] })
            .collect();
        // zero-length components sit at the start of the next positive one
        let mut outline = Vec::new();
        let first = positive[0];
        // markers before `first` in cyclic order come after the last positive edge
        let mut carry: Vec<Marker> = Vec::new();
        for step in 0..n {
            let i = (first + step) % n;
            if lengths[i] > 0 {
                let mut seg = Segment::edge(corners[i], corners[(i + 1) % n], i);
                seg.markers = std::mem::take(&mut carry);
                outline.push(seg);
            } else {
                carry.push(Marker { label: i, dir: z[i] });
            }
        }
        if !carry.is_empty() {
            outline[0].markers.splice(0..0, carry);
        }
        let mut base = AlmostToricBase {
            boundary,
            outline,
            seams: Vec::new(),
            cuts: Vec::new(),
            singular_points: Vec::new(),
            relaxed_cuts: false,
            scale: 1,
        };
        base.normalize()?;
        Ok(base)
    }

    pub fn with_relaxed_cuts(mut self, relaxed: bool) -> Self {
        self.relaxed_cuts = relaxed;
        self
    }

    /// Cycle of self-intersection numbers carried through the surgeries.
    pub fn bookkeeping_cycle(&self) -> Cycle {
        Cycle::new(self.boundary.iter().map(|e| e.d).collect()).expect("boundary is never empty")
    }

    pub fn total_boundary_length(&self) -> i128 {
        self.boundary.iter().map(|e| e.length).sum()
    }

    pub fn vertices(&self) -> Vec<Pt> {
        self.outline.iter().map(|s| s.start).collect()
    }

    fn boundary_position(&self, label: usize) -> Result<usize> {
        self.boundary.iter().position(|e| e.label == label).ok_or(SurgeryError::UnknownEdge(label))
    }

    /// Blow up with an automatically chosen placement where not given.
    pub fn internal_blowup(&self, edge: usize, size: i128, offset: i128) -> Result<Self> {
        self.internal_blowup_with(&BlowupPlacement { edge, size, offset: Some(offset), shear: None })
    }

    pub fn internal_blowup_with(&self, p: &BlowupPlacement) -> Result<Self> {
        let bpos = self.boundary_position(p.edge)?;
        if p.size <= 0 {
            return Err(SurgeryError::DoesNotFit("size must be positive".into()));
        }
        let length = self.boundary[bpos].length;
        if p.size > length {
            return Err(SurgeryError::EdgeTooShort { edge: p.edge, length, size: p.size });
        }
        let pieces = self.pieces_of(p.edge)?;
        let offsets: Vec<i128> = match p.offset {
            Some(o) => vec![o],
            None => {
                // prefer placements away from the corners of the component
                let mut v: Vec<i128> = (1..length - p.size).collect();
                v.push(0);
                if length > p.size {
                    v.push(length - p.size);
                }
                v
            }
        };
        let shears: Vec<i128> = match p.shear {
            Some(s) => vec![s],
            None => {
                let mut v = vec![0];
                for k in 1..=16 {
                    v.push(-k);
                    v.push(k);
                }
                v
            }
        };
        let mut last_err = SurgeryError::DoesNotFit("no placement tried".into());
        for &o in &offsets {
            if o < 0 || o + p.size > length {
                last_err = SurgeryError::DoesNotFit(format!("offset {o} outside component {}", p.edge));
                continue;
            }
            // find the piece containing [o, o + size]
            let mut acc = 0;
            let mut found = None;
            for &(idx, len) in &pieces {
                if acc <= o && o + p.size <= acc + len {
                    found = Some((idx, o - acc));
                    break;
                }
                acc += len;
            }
            let Some((idx, local)) = found else {
                last_err = SurgeryError::DoesNotFit(format!("base at offset {o} straddles an earlier cut"));
                continue;
            };
            let seg = &self.outline[idx];
            let t = seg.direction();
            let ppt = seg.start + t.scale(local);
            let qpt = ppt + t.scale(p.size);
            let w0 = default_apex_direction(t);
            for &s in &shears {
                let w = w0 + t.scale(s);
                let v = ppt + w.scale(p.size);
                let split = if self.relaxed_cuts { self.split_for_overlap(idx, ppt, qpt, v)? } else { None };
                let (base, at) = match &split {
                    Some((b, i)) => (b, *i),
                    None => (self, idx),
                };
                match base.check_triangle(at, ppt, qpt, v) {
                    Ok(fit) => {
                        let mut next = base.clone();
                        next.insert_blowup(at, bpos, p, ppt, qpt, v, t, w, fit)?;
                        return Ok(next);
                    }
                    Err(e) => last_err = e,
                }
            }
        }
        Err(last_err)
    }

    /// Chain indices and lattice lengths of the pieces of a component, in walk order.
    fn pieces_of(&self, label: usize) -> Result<Vec<(usize, i128)>> {
        let n = self.outline.len();
        let idx: Vec<usize> = (0..n).filter(|&i| self.outline[i].label() == Some(label)).collect();
        if idx.is_empty() {
            return Ok(Vec::new());
        }
        // rotate so that the list starts where the component starts
        let start = idx
            .iter()
            .position(|&i| self.starts_component(i))
            .ok_or_else(|| SurgeryError::Corrupt(format!("component {label} has no start")))?;
        let mut ordered: Vec<usize> = idx[start..].to_vec();
        ordered.extend_from_slice(&idx[..start]);
        Ok(ordered.into_iter().map(|i| (i, self.outline[i].length())).collect())
    }

    /// Segment `i` is the first piece of its component.
    fn starts_component(&self, i: usize) -> bool {
        let n = self.outline.len();
        let Some(label) = self.outline[i].label() else { return false };
        if !self.outline[i].markers.is_empty() {
            return true;
        }
        let mut j = i;
        for _ in 0..n {
            j = (j + n - 1) % n;
            match self.outline[j].label() {
                Some(l) => return l != label,
                None => {
                    if !self.outline[j].markers.is_empty() {
                        return true;
                    }
                }
            }
        }
        // the only component with positive length
        i == (0..n).find(|&k| self.outline[k].label() == Some(label)).unwrap()
    }

    /// When a side of the triangle on segment `idx` runs back along only part
    /// of the neighbouring cut side, split that seam at the apex so that the
    /// side is shared whole. Returns the split base and the new index of the
    /// segment.
    fn split_for_overlap(&self, idx: usize, p: Pt, q: Pt, v: Pt) -> Result<Option<(Self, usize)>> {
        let n = self.outline.len();
        let seg = &self.outline[idx];
        let prev = &self.outline[(idx + n - 1) % n];
        let next = &self.outline[(idx + 1) % n];
        let mut splits = Vec::new();
        if let SegmentKind::Cut { seam, side: Side::B } = prev.kind {
            if p == seg.start && prev.end == p && on_segment_interior(prev.start, prev.end, v) {
                splits.push((seam, Side::B));
            }
        }
        if let SegmentKind::Cut { seam, side: Side::A } = next.kind {
            if q == seg.end && next.start == q && on_segment_interior(next.start, next.end, v) {
                splits.push((seam, Side::A));
            }
        }
        if splits.is_empty() {
            return Ok(None);
        }
        let mut b = self.clone();
        for (seam, side) in splits {
            b.split_seam(seam, side, v)?;
        }
        let kind = seg.kind;
        let at = b
            .outline
            .iter()
            .position(|s| s.kind == kind && s.start == seg.start && s.end == seg.end)
            .ok_or_else(|| SurgeryError::Corrupt("segment lost while splitting a seam".into()))?;
        Ok(Some((b, at)))
    }

    /// Split `seam` at the point `x` of its `side` into an outer seam, which
    /// keeps the id, and a new inner seam, both glued by the same map.
    fn split_seam(&mut self, seam: usize, side: Side, x: Pt) -> Result<()> {
        let g = self.seams[seam].map;
        let ginv = g.inverse().ok_or_else(|| SurgeryError::Corrupt("gluing map not invertible".into()))?;
        let (xa, yb) = match side {
            Side::A => (x, ginv.apply(x)),
            Side::B => (g.apply(x), x),
        };
        let ia = self.find_side(seam, Side::A)?;
        let ib = self.find_side(seam, Side::B)?;
        let (a, b) = (self.outline[ia].clone(), self.outline[ib].clone());
        if !on_segment_interior(a.start, a.end, xa) || !on_segment_interior(b.start, b.end, yb) {
            return Err(SurgeryError::Corrupt(format!("split point {x} is not inside seam {seam}")));
        }
        let inner = self.seams.len();
        self.seams.push(Seam { map: g, cuts: self.seams[seam].cuts.clone(), alive: true });
        let mut a_outer = Segment::side(a.start, xa, seam, Side::A);
        a_outer.markers = a.markers;
        let a_inner = Segment::side(xa, a.end, inner, Side::A);
        let mut b_inner = Segment::side(b.start, yb, inner, Side::B);
        b_inner.markers = b.markers;
        let b_outer = Segment::side(yb, b.end, seam, Side::B);
        // replace the later index first so the earlier stays valid
        let (first, second) = if ia < ib {
            ((ia, [a_outer, a_inner]), (ib, [b_inner, b_outer]))
        } else {
            ((ib, [b_inner, b_outer]), (ia, [a_outer, a_inner]))
        };
        self.outline.splice(second.0..second.0 + 1, second.1);
        self.outline.splice(first.0..first.0 + 1, first.1);
        Ok(())
    }

    fn check_triangle(&self, idx: usize, p: Pt, q: Pt, v: Pt) -> Result<Fit> {
        let n = self.outline.len();
        let seg = &self.outline[idx];
        let prev = (idx + n - 1) % n;
        let next = (idx + 1) % n;
        let is_side = |k: usize| matches!(self.outline[k].kind, SegmentKind::Cut { .. });
        let cancel_prev =
            p == seg.start && is_side(prev) && self.outline[prev].start == v && self.outline[prev].end == p;
        let cancel_next = q == seg.end && is_side(next) && self.outline[next].start == q && self.outline[next].end == v;
        if (cancel_prev || cancel_next) && !self.relaxed_cuts {
            return Err(SurgeryError::DoesNotFit(
                "triangle shares a side with an earlier cut (allowed only with relaxed cuts)".into(),
            ));
        }
        let poly = self.vertices();
        if !cancel_prev && !cancel_next && locate(&poly, v) != Location::Inside {
            return Err(SurgeryError::DoesNotFit(format!("apex {v} is not in the interior")));
        }
        let inside_t = |a: Pt| orient(p, q, a) > 0 && orient(q, v, a) > 0 && orient(v, p, a) > 0;
        let sides = [(p, v), (v, q)];
        for k in 0..n {
            if k == idx || (cancel_prev && k == prev) || (cancel_next && k == next) {
                continue;
            }
            let s = &self.outline[k];
            let (a, b) = (s.start, s.end);
            if inside_t(a) || inside_t(b) {
                return Err(SurgeryError::DoesNotFit(format!("boundary point {a} or {b} inside the triangle")));
            }
            if on_segment_interior(p, q, a) || on_segment_interior(p, q, b) {
                return Err(SurgeryError::DoesNotFit("boundary point on the base".into()));
            }
            for &(c, d) in &sides {
                if segments_cross(c, d, a, b) || segments_overlap(c, d, a, b) {
                    return Err(SurgeryError::DoesNotFit(format!("side {c}-{d} meets boundary segment {a}-{b}")));
                }
                if on_segment_interior(c, d, a) || on_segment_interior(c, d, b) {
                    return Err(SurgeryError::DoesNotFit(format!("boundary point on side {c}-{d}")));
                }
            }
            let shares_apex = (cancel_prev || cancel_next) && (a == v || b == v);
            if on_segment(a, b, v) && !shares_apex {
                if self.relaxed_cuts {
                    return Err(SurgeryError::Unsupported(format!(
                        "apex {v} touches the boundary without sharing a whole side"
                    )));
                }
                return Err(SurgeryError::DoesNotFit(format!("apex {v} touches the boundary")));
            }
        }
        Ok(Fit { cancel_prev, cancel_next })
    }

    #[allow(clippy::too_many_arguments)]
    fn insert_blowup(
        &mut self,
        idx: usize,
        bpos: usize,
        p: &BlowupPlacement,
        ppt: Pt,
        qpt: Pt,
        v: Pt,
        t: Pt,
        w: Pt,
        fit: Fit,
    ) -> Result<()> {
        let e1 = -w;
        let e2 = t - w;
        // L e2 = e1 and L t = t
        let lin = IMat2::from_cols(e1, t) * IMat2::from_cols(e2, t).inverse().expect("det(e2, t) = 1");
        let gluing = IAffine::fixing(lin, v);
        debug_assert_eq!(gluing.apply(qpt), ppt);
        let cut_id = self.cuts.len();
        self.cuts.push(Cut {
            kind: CutKind::InternalBlowup,
            apex: v,
            anchor: Anchor::Edge(p.edge),
            size: p.size,
            gluing,
            e1: e1.primitive(),
            e2: e2.primitive(),
        });
        let seam_id = self.seams.len();
        self.seams.push(Seam { map: gluing, cuts: vec![cut_id], alive: true });
        let be = &mut self.boundary[bpos];
        be.length -= p.size;
        be.d += 1;
        let consumed = be.length == 0;

        let old = self.outline[idx].clone();
        let mut repl = Vec::new();
        let mut markers = old.markers.clone();
        if old.start != ppt {
            let mut s = Segment::edge(old.start, ppt, p.edge);
            s.markers = std::mem::take(&mut markers);
            repl.push(s);
        }
        if consumed {
            markers.push(Marker { label: p.edge, dir: t });
        }
        let mut a = Segment::side(ppt, v, seam_id, Side::A);
        a.markers = markers;
        repl.push(a);
        repl.push(Segment::side(v, qpt, seam_id, Side::B));
        if qpt != old.end {
            repl.push(Segment::edge(qpt, old.end, p.edge));
        }
        self.outline.splice(idx..idx + 1, repl);
        self.add_singular(v, cut_id);
        if fit.cancel_prev || fit.cancel_next {
            self.cancel_shared_sides(seam_id, fit)?;
        }
        self.normalize()
    }

    fn add_singular(&mut self, v: Pt, cut: usize) {
        match self.singular_points.iter_mut().find(|s| s.position == v) {
            Some(s) => s.cuts.push(cut),
            None => self.singular_points.push(SingularPoint { position: v, cuts: vec![cut] }),
        }
    }

    fn find_side(&self, seam: usize, side: Side) -> Result<usize> {
        self.outline
            .iter()
            .position(|s| s.kind == SegmentKind::Cut { seam, side })
            .ok_or_else(|| SurgeryError::Corrupt(format!("seam {seam} lost its {side:?} side")))
    }

    /// Remove the sides of the fresh seam `new` that run back along an
    /// adjacent earlier cut, composing the gluing maps.
    fn cancel_shared_sides(&mut self, new: usize, fit: Fit) -> Result<()> {
        let g = self.seams[new].map;
        let n = self.outline.len();
        let ia = self.find_side(new, Side::A)?;
        let ib = (ia + 1) % n;
        let mut map = g;
        // seam whose A side survives, and seam whose B side survives
        let mut keep_a = new;
        let mut keep_b = new;
        let mut doomed: Vec<usize> = Vec::new();
        // markers that lose their vertex, with the chart change to apply
        if fit.cancel_prev {
            let ip = (ia + n - 1) % n;
            let SegmentKind::Cut { seam: s1, side } = self.outline[ip].kind else { unreachable!() };
            if side != Side::B {
                return Err(SurgeryError::Unsupported("shared side is the opening side of a cut".into()));
            }
            map = self.seams[s1].map.compose(&map);
            keep_a = s1;
            doomed.push(ip);
            doomed.push(ia);
            // the vertex p vanishes; its markers travel across the new cut to q
            let ginv = g.inverse().unwrap();
            let moved: Vec<Marker> = std::mem::take(&mut self.outline[ia].markers)
                .into_iter()
                .map(|m| Marker { label: m.label, dir: ginv.apply_linear(m.dir) })
                .collect();
            let mut carried = std::mem::take(&mut self.outline[ip].markers);
            carried.extend(moved);
            let target = (ib + 1) % n;
            let mut existing = std::mem::take(&mut self.outline[target].markers);
            carried.append(&mut existing);
            // markers at the start of the doomed b-side stay where they are in walk order
            self.outline[target].markers = carried;
        }
        if fit.cancel_next {
            let inx = (ib + 1) % n;
            let SegmentKind::Cut { seam: s2, side } = self.outline[inx].kind else { unreachable!() };
            if side != Side::A {
                return Err(SurgeryError::Unsupported("shared side is the closing side of a cut".into()));
            }
            map = map.compose(&self.seams[s2].map);
            keep_b = s2;
            doomed.push(ib);
            doomed.push(inx);
            // the vertex q vanishes; its markers move past the group of s2
            let close = self.find_side(s2, Side::B)?;
            let after = (close + 1) % n;
            let hinv = self.seams[s2].map.inverse().unwrap();
            let moved: Vec<Marker> = std::mem::take(&mut self.outline[inx].markers)
                .into_iter()
                .map(|m| Marker { label: m.label, dir: hinv.apply_linear(m.dir) })
                .collect();
            let mut carried = moved;
            let mut existing = std::mem::take(&mut self.outline[after].markers);
            carried.append(&mut existing);
            self.outline[after].markers = carried;
        }
        // one seam keeps both surviving sides
        let target = keep_a;
        self.seams[target].map = map;
        let mut cuts: Vec<usize> = Vec::new();
        for s in [keep_a, new, keep_b] {
            for &c in &self.seams[s].cuts {
                if !cuts.contains(&c) {
                    cuts.push(c);
                }
            }
        }
        self.seams[target].cuts = cuts;
        for s in [new, keep_b] {
            if s != target {
                self.seams[s].alive = false;
            }
        }
        let b_idx = self.find_side(keep_b, Side::B)?;
        self.outline[b_idx].kind = SegmentKind::Cut { seam: target, side: Side::B };
        if keep_a != target {
            let a_idx = self.find_side(keep_a, Side::A)?;
            self.outline[a_idx].kind = SegmentKind::Cut { seam: target, side: Side::A };
        }
        for &k in &doomed {
            if !self.outline[k].markers.is_empty() {
                return Err(SurgeryError::Corrupt("markers left on a cancelled side".into()));
            }
        }
        doomed.sort_unstable();
        for &k in doomed.iter().rev() {
            self.outline.remove(k);
        }
        Ok(())
    }

    /// Smooth the corner at the end of component `vertex` by a slit of
    /// lattice length `n` along the diagonal of the corner.
    pub fn node_smoothing(&self, vertex: usize, n: i128) -> Result<Self> {
        let bpos = self.boundary_position(vertex)?;
        if n <= 0 {
            return Err(SurgeryError::CutCollision("slit length must be positive".into()));
        }
        let len = self.outline.len();
        let k = (0..len)
            .find(|&k| {
                let prev = &self.outline[(k + len - 1) % len];
                let cur = &self.outline[k];
                prev.label() == Some(vertex)
                    && cur.label().is_some_and(|l| l != vertex)
                    && cur.markers.is_empty()
                    && prev.end == cur.start
            })
            .ok_or_else(|| {
                SurgeryError::Unsupported(format!(
                    "the corner after component {vertex} is not a corner between two components of positive length"
                ))
            })?;
        let prev = &self.outline[(k + len - 1) % len];
        let cur = &self.outline[k];
        let next_label = cur.label().unwrap();
        let c = cur.start;
        let x = cur.direction();
        let y = -prev.direction();
        if cross(x, y) != 1 {
            return Err(SurgeryError::Unsupported(format!("corner at {c} is not smooth")));
        }
        let diag = x + y;
        let v = c + diag.scale(n);
        let poly = self.vertices();
        if locate(&poly, v) != Location::Inside {
            return Err(SurgeryError::CutCollision(format!("slit end {v} is not in the interior")));
        }
        for (j, s) in self.outline.iter().enumerate() {
            if j == k || j == (k + len - 1) % len {
                continue;
            }
            let (a, b) = (s.start, s.end);
            if segments_cross(c, v, a, b) || segments_overlap(c, v, a, b) {
                return Err(SurgeryError::CutCollision(format!("slit meets boundary segment {a}-{b}")));
            }
            if (a != c && on_segment(c, v, a)) || (b != c && on_segment(c, v, b)) {
                return Err(SurgeryError::CutCollision(format!("slit passes through {a} or {b}")));
            }
        }
        let mut next = self.clone();
        // L x = -y and L (x+y) = x+y
        let lin = IMat2::from_cols(-y, diag) * IMat2::from_cols(x, diag).inverse().expect("det(x, y) = 1");
        let gluing = IAffine::fixing(lin, c);
        let cut_id = next.cuts.len();
        let e1 = (-diag).primitive();
        next.cuts.push(Cut {
            kind: CutKind::NodeSmoothing,
            apex: v,
            anchor: Anchor::Vertex(vertex),
            size: n,
            gluing,
            e1,
            e2: e1,
        });
        let seam_id = next.seams.len();
        next.seams.push(Seam { map: gluing, cuts: vec![cut_id], alive: true });
        next.outline.splice(k..k, [Segment::side(c, v, seam_id, Side::A), Segment::side(v, c, seam_id, Side::B)]);
        // the next component becomes part of this one
        for s in next.outline.iter_mut() {
            if s.kind == (SegmentKind::Edge { label: next_label }) {
                s.kind = SegmentKind::Edge { label: vertex };
            }
            for m in s.markers.iter_mut() {
                if m.label == next_label {
                    m.label = vertex;
                }
            }
        }
        let jpos = next.boundary_position(next_label)?;
        let merged = apply_surgery(&next.bookkeeping_cycle(), &SurgeryOnCycle::NodeSmoothing(bpos))
            .map_err(|e| SurgeryError::Corrupt(e.to_string()))?;
        debug_assert_eq!((bpos + 1) % next.boundary.len(), jpos);
        let extra = next.boundary[jpos].length;
        next.boundary[bpos].length += extra;
        next.boundary.remove(jpos);
        for (e, &d) in next.boundary.iter_mut().zip(merged.entries()) {
            e.d = d;
        }
        next.add_singular(v, cut_id);
        next.normalize()?;
        Ok(next)
    }

    /// Scale every coordinate by `k`.
    pub fn refine(&self, k: i128) -> Self {
        assert!(k >= 1, "refinement factor must be positive");
        let mut b = self.clone();
        for s in b.outline.iter_mut() {
            s.start = s.start.scale(k);
            s.end = s.end.scale(k);
        }
        for e in b.boundary.iter_mut() {
            e.length *= k;
        }
        for c in b.cuts.iter_mut() {
            c.apex = c.apex.scale(k);
            c.size *= k;
            c.gluing.t = c.gluing.t.scale(k);
        }
        for s in b.seams.iter_mut() {
            s.map.t = s.map.t.scale(k);
        }
        for sp in b.singular_points.iter_mut() {
            sp.position = sp.position.scale(k);
        }
        b.scale *= k;
        b
    }

    /// Parse the chain from `r`; `true` if every cut side closes in order.
    fn balanced_from(&self, r: usize) -> bool {
        let n = self.outline.len();
        let mut stack: Vec<usize> = Vec::new();
        for step in 0..n {
            let s = &self.outline[(r + step) % n];
            if !s.markers.is_empty() && !stack.is_empty() {
                return false;
            }
            match s.kind {
                SegmentKind::Edge { .. } => {
                    if !stack.is_empty() {
                        return false;
                    }
                }
                SegmentKind::Cut { seam, side: Side::A } => stack.push(seam),
                SegmentKind::Cut { seam, side: Side::B } => {
                    if stack.pop() != Some(seam) {
                        return false;
                    }
                }
            }
        }
        stack.is_empty()
    }

    /// Chain positions where no cut is open.
    pub fn junctions(&self) -> Vec<usize> {
        let n = self.outline.len();
        let mut out = Vec::new();
        let mut depth = 0usize;
        for i in 0..n {
            if depth == 0 {
                out.push(i);
            }
            match self.outline[i].kind {
                SegmentKind::Cut { side: Side::A, .. } => depth += 1,
                SegmentKind::Cut { side: Side::B, .. } => depth -= 1,
                SegmentKind::Edge { .. } => {}
            }
        }
        out
    }

    /// Rotate the chain so that it starts at a junction, at the start of a
    /// component where possible.
    fn normalize(&mut self) -> Result<()> {
        let n = self.outline.len();
        let junctions: Vec<usize> = (0..n).filter(|&r| self.balanced_from(r)).collect();
        let Some(&first) = junctions.first() else {
            return Err(SurgeryError::Corrupt("cut sides are not nested".into()));
        };
        let r = junctions.iter().copied().find(|&r| self.starts_component(r)).unwrap_or(first);
        self.outline.rotate_left(r);
        Ok(())
    }

    /// Developed boundary, starting from the first segment of the chain.
    pub fn develop(&self) -> Result<Development> {
        develop::develop(self)
    }

    /// Self-intersection numbers of the boundary components, read off the
    /// developed boundary, in the order of `self.boundary`.
    pub fn boundary_d_values(&self) -> Result<Cycle> {
        if self.total_boundary_length() == 0 {
            return Err(SurgeryError::EmptyBoundary);
        }
        self.develop()?.d_values_by_label(self)
    }

    /// As [`Self::boundary_d_values`], but also defined when every component
    /// has length zero, using the directions remembered by the markers.
    pub fn marker_d_values(&self) -> Result<Cycle> {
        self.develop()?.d_values_by_label(self)
    }

    pub fn singular_positions(&self) -> Vec<Pt> {
        self.singular_points.iter().map(|s| s.position).collect()
    }

    pub fn live_seams(&self) -> impl Iterator<Item = (usize, &Seam)> {
        self.seams.iter().enumerate().filter(|(_, s)| s.alive)
    }
}

/// Solution `w` of `det(t, w) = 1` closest to perpendicular to `t`.
pub fn default_apex_direction(t: Pt) -> Pt {
    // extended Euclid: a t.x + b t.y = 1, then w = (-b, a) has det(t, w) = 1
    let (g, a, b) = ext_gcd(t.x, t.y);
    debug_assert_eq!(g, 1);
    let w = pt(-b, a);
    let tt = t.dot(t);
    // shift by multiples of t to minimise |<w, t>|, ties to the nonpositive side
    let k = floor_div(w.dot(t) + tt / 2, tt);
    let mut best = w - t.scale(k);
    for cand in [best - t, best + t] {
        let (c, bb) = (cand.dot(t), best.dot(t));
        if c.abs() < bb.abs() || (c.abs() == bb.abs() && c < bb) {
            best = cand;
        }
    }
    best
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}
