//! Triangulated integral-affine spheres and the Type III checks.
//!
//! Faces carry their own chart: the positions of their corners. Every
//! half-edge knows its twin and the affine map taking the twin's chart to
//! its own, so quantities are computed by transporting one neighbouring
//! triangle at a time.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compactify::ClosedSurface;
use crate::cycles::{apply_surgery, Cycle, CycleError, SurgeryOnCycle};
use crate::exactgeom::lattice::{cross, orient, IAffine, IMat2, Pt};
use crate::surgery::{ratio, CutKind};

mod json;
mod mesh;
mod verify;

pub use json::ComplexJson;
pub use verify::{star, verify_type_iii, Star, TypeIIIReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("input is not integral: {0}")]
    NonIntegralInput(String),
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error("gluing failed: {0}")]
    Gluing(String),
    #[error("edge {0} has no integral self-intersection")]
    NonIntegralEdge(usize),
    #[error("malformed complex: {0}")]
    Malformed(String),
    #[error(transparent)]
    Cycle(#[from] CycleError),
}

pub type Result<T> = std::result::Result<T, ComplexError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Patch {
    Base,
    Cone,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexInfo {
    /// A representative position, in the refined chart of `patch`.
    pub pos: Pt,
    pub patch: Patch,
    pub singular: bool,
    /// Star cycle predicted from the planar fan and the surgeries at this point.
    pub expected_cycle: Option<Cycle>,
}

/// A closed triangulated surface with integral-affine charts on its faces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriComplex {
    pub vertices: Vec<VertexInfo>,
    pub faces: Vec<[usize; 3]>,
    /// Corner positions of each face in its own chart.
    pub charts: Vec<[Pt; 3]>,
    /// Map from a face chart to the chart of the base, where one exists.
    pub base_charts: Vec<Option<IAffine>>,
    pub twin: Vec<usize>,
    /// `twin_maps[h]` takes the chart of the twin's face to the chart of `h`'s face.
    pub twin_maps: Vec<IAffine>,
    /// Self-intersection number of each directed edge.
    pub d: Vec<i64>,
    pub v0: usize,
    pub scale: i128,
    pub flips: usize,
}

impl TriComplex {
    pub fn he_count(&self) -> usize {
        self.faces.len() * 3
    }

    pub fn from(&self, h: usize) -> usize {
        self.faces[h / 3][h % 3]
    }

    pub fn to(&self, h: usize) -> usize {
        self.faces[h / 3][(h + 1) % 3]
    }

    pub fn next(&self, h: usize) -> usize {
        h / 3 * 3 + (h + 1) % 3
    }

    pub fn prev(&self, h: usize) -> usize {
        h / 3 * 3 + (h + 2) % 3
    }

    /// Start and end of `h` in its face chart.
    pub fn ends(&self, h: usize) -> (Pt, Pt) {
        let c = &self.charts[h / 3];
        (c[h % 3], c[(h + 1) % 3])
    }

    /// The emanating half-edge following `h` counterclockwise around its start.
    pub fn rotate(&self, h: usize) -> usize {
        self.twin[self.prev(h)]
    }

    /// Emanating half-edges of `v` in counterclockwise order.
    pub fn around(&self, v: usize) -> Option<Vec<usize>> {
        let start = (0..self.he_count()).find(|&h| self.from(h) == v)?;
        let mut out = vec![start];
        let mut h = self.rotate(start);
        while h != start {
            if out.len() > self.he_count() {
                return None;
            }
            out.push(h);
            h = self.rotate(h);
        }
        Some(out)
    }

    pub fn edge_count(&self) -> usize {
        self.he_count() / 2
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// `d` from `d (b - a) = (c - a) + (x - a)`, with `c` opposite `h` and
    /// `x` opposite its twin, both in the chart of `h`.
    pub fn compute_d(&self, h: usize) -> Result<i64> {
        let (a, b) = self.ends(h);
        let c = self.charts[h / 3][(h + 2) % 3];
        let t = self.twin[h];
        let x = self.twin_maps[h].apply(self.charts[t / 3][(t + 2) % 3]);
        ratio((c - a) + (x - a), b - a).ok_or(ComplexError::NonIntegralEdge(h))
    }
}

/// Annotate every directed edge with its self-intersection number.
pub fn edge_d_values(t: &TriComplex) -> Result<TriComplex> {
    let mut out = t.clone();
    out.d = (0..t.he_count()).map(|h| t.compute_d(h)).collect::<Result<_>>()?;
    Ok(out)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Working state while patches are glued together.
struct Assembly {
    pos: Vec<Pt>,
    patch_of: Vec<Patch>,
    faces: Vec<[usize; 3]>,
    twin: Vec<Option<usize>>,
    twin_maps: Vec<IAffine>,
    boundary: HashMap<(Patch, Pt, Pt), usize>,
    uf: UnionFind,
}

impl Assembly {
    fn add_patch(&mut self, m: &mesh::PatchMesh, patch: Patch) {
        let voff = self.pos.len();
        let hoff = self.faces.len() * 3;
        self.pos.extend(&m.pos);
        self.patch_of.extend(std::iter::repeat_n(patch, m.pos.len()));
        self.uf.0.extend(voff..voff + m.pos.len());
        for f in &m.faces {
            self.faces.push([f[0] + voff, f[1] + voff, f[2] + voff]);
        }
        for t in &m.twin {
            self.twin.push(t.map(|t| t + hoff));
            self.twin_maps.push(IAffine::IDENTITY);
        }
        for ((a, b), h) in m.boundary_map() {
            self.boundary.insert((patch, a, b), h + hoff);
        }
    }

    fn from(&self, h: usize) -> usize {
        self.faces[h / 3][h % 3]
    }

    fn to(&self, h: usize) -> usize {
        self.faces[h / 3][(h + 1) % 3]
    }

    /// Unit boundary half-edges along `start -> end` in `patch`.
    fn units(&self, patch: Patch, start: Pt, end: Pt) -> Result<Vec<usize>> {
        let step = (end - start).primitive();
        let len = (end - start).gcd();
        (0..len)
            .map(|t| {
                let (a, b) = (start + step.scale(t), start + step.scale(t + 1));
                self.boundary
                    .get(&(patch, a, b))
                    .copied()
                    .ok_or_else(|| ComplexError::Gluing(format!("no boundary edge {a} -> {b} in {patch:?}")))
            })
            .collect()
    }

    /// Glue side `b` onto side `a` reversed; `g` maps the chart of `b` to that of `a`.
    fn glue(&mut self, b: &[usize], a: &[usize], g: IAffine) -> Result<()> {
        if a.len() != b.len() {
            return Err(ComplexError::Gluing(format!("sides of lengths {} and {}", a.len(), b.len())));
        }
        let ginv = g.inverse().ok_or_else(|| ComplexError::Gluing("gluing map not invertible".into()))?;
        let l = a.len();
        for t in 0..l {
            let (hb, ha) = (b[t], a[l - 1 - t]);
            if self.twin[hb].is_some() || self.twin[ha].is_some() {
                return Err(ComplexError::Gluing("edge glued twice".into()));
            }
            let (bf, bt, af, at) = (self.from(hb), self.to(hb), self.from(ha), self.to(ha));
            if g.apply(self.pos[bf]) != self.pos[at] || g.apply(self.pos[bt]) != self.pos[af] {
                return Err(ComplexError::Gluing(format!("map does not carry {} onto {}", self.pos[bf], self.pos[at])));
            }
            self.twin[hb] = Some(ha);
            self.twin[ha] = Some(hb);
            self.twin_maps[hb] = ginv;
            self.twin_maps[ha] = g;
            self.uf.union(bf, at);
            self.uf.union(bt, af);
        }
        Ok(())
    }
}

/// Triangulate the base and the cone into basis triangles and glue them
/// along cuts, the boundary and the cone seam.
pub fn triangulate(s: &ClosedSurface) -> Result<TriComplex> {
    let base = &s.base;
    let mut asm = Assembly {
        pos: Vec::new(),
        patch_of: Vec::new(),
        faces: Vec::new(),
        twin: Vec::new(),
        twin_maps: Vec::new(),
        boundary: HashMap::new(),
        uf: UnionFind(Vec::new()),
    };
    let base_mesh = mesh::PatchMesh::from_polygon(&base.vertices())?;
    asm.add_patch(&base_mesh, Patch::Base);
    let base_faces = asm.faces.len();
    if let Some(cone) = &s.cone {
        let cone_mesh = mesh::PatchMesh::from_polygon(&cone.fundamental)?;
        asm.add_patch(&cone_mesh, Patch::Cone);
    }
    // cut seams
    for (id, seam) in base.live_seams() {
        let find = |side| {
            base.outline
                .iter()
                .find(|s| s.kind == crate::surgery::SegmentKind::Cut { seam: id, side })
                .ok_or_else(|| ComplexError::Gluing(format!("seam {id} lost a side")))
        };
        let (sa, sb) = (find(crate::surgery::Side::A)?, find(crate::surgery::Side::B)?);
        let a = asm.units(Patch::Base, sa.start, sa.end)?;
        let b = asm.units(Patch::Base, sb.start, sb.end)?;
        asm.glue(&b, &a, seam.map)?;
    }
    let v0_vertex;
    if let Some(cone) = &s.cone {
        for m in &s.boundary_matching {
            let seg = &base.outline[m.chain_index];
            let a = asm.units(Patch::Base, seg.start, seg.end)?;
            let f = &cone.fundamental;
            let b = asm.units(Patch::Cone, f[m.cone_edge], f[m.cone_edge + 1])?;
            asm.glue(&b, &a, m.cone_to_base)?;
        }
        let f = &cone.fundamental;
        let a = asm.units(Patch::Cone, f[0], f[1])?;
        let b = asm.units(Patch::Cone, f[f.len() - 1], f[0])?;
        asm.glue(&b, &a, cone.identification)?;
        v0_vertex = (0..asm.pos.len())
            .find(|&v| asm.patch_of[v] == Patch::Cone && asm.pos[v] == cone.apex())
            .ok_or_else(|| ComplexError::Triangulation("cone apex is not a vertex".into()))?;
    } else {
        let p = base.outline[0].start;
        v0_vertex = (0..asm.pos.len())
            .find(|&v| asm.patch_of[v] == Patch::Base && asm.pos[v] == p)
            .ok_or_else(|| ComplexError::Triangulation("collapsed boundary point is not a vertex".into()))?;
    }
    let twin: Vec<usize> = asm
        .twin
        .iter()
        .enumerate()
        .map(|(h, t)| t.ok_or_else(|| ComplexError::Gluing(format!("half-edge {h} left on the boundary"))))
        .collect::<Result<_>>()?;

    // vertex classes
    let nv = asm.pos.len();
    let mut class_of = vec![usize::MAX; nv];
    let mut vertices = Vec::new();
    for v in 0..nv {
        let r = asm.uf.find(v);
        if class_of[r] == usize::MAX {
            class_of[r] = vertices.len();
            vertices.push(VertexInfo {
                pos: asm.pos[r],
                patch: asm.patch_of[r],
                singular: false,
                expected_cycle: None,
            });
        }
        class_of[v] = class_of[r];
    }
    let faces: Vec<[usize; 3]> = asm.faces.iter().map(|f| f.map(|v| class_of[v])).collect();
    let charts: Vec<[Pt; 3]> = asm.faces.iter().map(|f| f.map(|v| asm.pos[v])).collect();
    let base_charts = (0..faces.len()).map(|f| (f < base_faces).then_some(IAffine::IDENTITY)).collect();
    let v0 = class_of[v0_vertex];
    for sp in &base.singular_points {
        let v = (0..nv)
            .find(|&v| asm.patch_of[v] == Patch::Base && asm.pos[v] == sp.position)
            .ok_or_else(|| ComplexError::Triangulation(format!("singular point {} is not a vertex", sp.position)))?;
        vertices[class_of[v]].singular = true;
    }
    vertices[v0].singular = true;
    let n_he = faces.len() * 3;
    Ok(TriComplex {
        vertices,
        faces,
        charts,
        base_charts,
        twin,
        twin_maps: asm.twin_maps,
        d: vec![0; n_he],
        v0,
        scale: base.scale,
        flips: 0,
    })
}

/// Flip the edge of `h`: the two triangles on it form a parallelogram, and
/// the other diagonal replaces it. Charts of the new faces are that of `h`.
fn flip(t: &mut TriComplex, h: usize) -> Result<()> {
    let o = t.twin[h];
    let (f1, f2) = (h / 3, o / 3);
    if f1 == f2 {
        return Err(ComplexError::Malformed(format!("edge {h} bounds a single face")));
    }
    let tm = t.twin_maps[h];
    let tinv = tm.inverse().unwrap();
    let (kh, ko) = (h % 3, o % 3);
    let v1 = t.faces[f1];
    let v2 = t.faces[f2];
    let (a, b, c) = (v1[kh], v1[(kh + 1) % 3], v1[(kh + 2) % 3]);
    let x = v2[(ko + 2) % 3];
    let (pa, pb, pc) = (t.charts[f1][kh], t.charts[f1][(kh + 1) % 3], t.charts[f1][(kh + 2) % 3]);
    let px = tm.apply(t.charts[f2][(ko + 2) % 3]);
    if orient(px, pb, pc) != 1 || orient(pc, pa, px) != 1 {
        return Err(ComplexError::Malformed(format!("edge {h} is not the diagonal of a unit parallelogram")));
    }
    // old outer half-edges: (old id, chart change into the new chart)
    let h1 = f1 * 3 + (kh + 1) % 3; // b -> c
    let h2 = f1 * 3 + (kh + 2) % 3; // c -> a
    let t1 = f2 * 3 + (ko + 1) % 3; // a -> x
    let t2 = f2 * 3 + (ko + 2) % 3; // x -> b
                                    // new faces: f1 = (x, b, c), f2 = (c, a, x)
    let remap = |e: usize| -> usize {
        if e == t2 {
            f1 * 3
        } else if e == h1 {
            f1 * 3 + 1
        } else if e == h2 {
            f2 * 3
        } else if e == t1 {
            f2 * 3 + 1
        } else {
            e
        }
    };
    let conv = |e: usize| -> IAffine {
        if e == t1 || e == t2 {
            tm
        } else {
            IAffine::IDENTITY
        }
    };
    let outer = [h1, h2, t1, t2];
    let old: Vec<(usize, usize, IAffine, i64)> =
        outer.iter().map(|&e| (e, t.twin[e], t.twin_maps[e], t.d[e])).collect();
    let mut updates: Vec<(usize, usize, IAffine)> = Vec::new();
    for &(e, tw, map, _) in &old {
        let ne = remap(e);
        if outer.contains(&tw) {
            let nt = remap(tw);
            let m = conv(e).compose(&map).compose(&conv(tw).inverse().unwrap());
            updates.push((ne, nt, m));
        } else {
            updates.push((ne, tw, conv(e).compose(&map)));
            let back = t.twin_maps[tw].compose(&conv(e).inverse().unwrap());
            updates.push((tw, ne, back));
        }
    }
    t.faces[f1] = [x, b, c];
    t.faces[f2] = [c, a, x];
    t.charts[f1] = [px, pb, pc];
    t.charts[f2] = [pc, pa, px];
    let bc = t.base_charts[f1].or_else(|| t.base_charts[f2].map(|m| m.compose(&tinv)));
    t.base_charts[f1] = bc;
    t.base_charts[f2] = bc;
    for (e, tw, m) in updates {
        t.twin[e] = tw;
        t.twin_maps[e] = m;
    }
    let (d1, d2) = (f1 * 3 + 2, f2 * 3 + 2);
    t.twin[d1] = d2;
    t.twin[d2] = d1;
    t.twin_maps[d1] = IAffine::IDENTITY;
    t.twin_maps[d2] = IAffine::IDENTITY;
    let mut touched: Vec<usize> = (0..3).flat_map(|k| [f1 * 3 + k, f2 * 3 + k]).collect();
    let outer_twins: Vec<usize> = touched.iter().map(|&e| t.twin[e]).collect();
    touched.extend(outer_twins);
    for e in touched {
        t.d[e] = t.compute_d(e)?;
    }
    t.flips += 1;
    Ok(())
}

/// Flip edges at `v0` with self-intersection one until none is left.
pub fn minimize_star(t: &TriComplex, v0: usize) -> Result<TriComplex> {
    let mut out = t.clone();
    loop {
        let star = out.around(v0).ok_or_else(|| ComplexError::Malformed("star of v0 is not a disc".into()))?;
        let candidate = star.into_iter().find(|&h| {
            out.d[h] == 1 && {
                let o = out.twin[h];
                let c = out.faces[h / 3][(h + 2) % 3];
                let x = out.faces[o / 3][(o + 2) % 3];
                c != x && h / 3 != o / 3
            }
        });
        match candidate {
            Some(h) => flip(&mut out, h)?,
            None => return Ok(out),
        }
    }
}

/// Star cycle after the surgeries at a point, starting from the star cycle
/// of the smooth point before them.
pub fn expected_star_cycle(toric_star: &Cycle, incident: &[SurgeryOnCycle]) -> Result<Cycle> {
    let mut c = toric_star.clone();
    for s in incident {
        c = apply_surgery(&c, s)?;
    }
    Ok(c)
}

fn half(u: Pt) -> u8 {
    if u.y > 0 || (u.y == 0 && u.x > 0) {
        0
    } else {
        1
    }
}

/// Sort primitive directions counterclockwise starting from the positive x axis.
fn sort_by_angle(v: &mut [Pt]) {
    v.sort_by(|&a, &b| half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(a, b))));
}

/// Predict the star cycle of every singular vertex other than `v0` from the
/// directions of its edges in the base chart and the cuts ending there.
pub fn annotate_expected(t: &mut TriComplex, s: &ClosedSurface) -> Result<()> {
    let base = &s.base;
    let mut site: HashMap<Pt, usize> = HashMap::new();
    for h in 0..t.he_count() {
        if t.base_charts[h / 3] == Some(IAffine::IDENTITY) {
            site.entry(t.ends(h).0).or_insert(t.from(h));
        }
    }
    for sp in &base.singular_points {
        let Some(&v) = site.get(&sp.position) else { continue };
        if v == t.v0 {
            continue;
        }
        let Some(mut star) = t.around(v) else { continue };
        // start from a face lying at this copy of the point
        let Some(k0) =
            star.iter().position(|&h| t.base_charts[h / 3] == Some(IAffine::IDENTITY) && t.ends(h).0 == sp.position)
        else {
            continue;
        };
        star.rotate_left(k0);
        // faces at other copies of the point are carried back through the
        // transition maps; faces at this copy are read in the base chart
        let mut dirs = Vec::new();
        let mut to_here = IAffine::IDENTITY;
        let mut complete = true;
        for (k, &h) in star.iter().enumerate() {
            let (a, b) = t.ends(h);
            match t.base_charts[h / 3] {
                Some(m) if m.apply(a) == sp.position => to_here = m,
                _ if k > 0 => to_here = to_here.compose(&t.twin_maps[t.prev(star[k - 1])]),
                _ => {}
            }
            if to_here.apply(a) != sp.position {
                complete = false;
                break;
            }
            dirs.push(to_here.apply_linear(b - a).primitive());
        }
        if !complete {
            continue;
        }
        for &ci in &sp.cuts {
            let cut = &base.cuts[ci];
            dirs.push(cut.e1);
            dirs.push(cut.e2);
        }
        sort_by_angle(&mut dirs);
        dirs.dedup();
        let n = dirs.len();
        let mut d = Vec::with_capacity(n);
        let mut fan_ok = true;
        for k in 0..n {
            let (p, u, q) = (dirs[(k + n - 1) % n], dirs[k], dirs[(k + 1) % n]);
            match ratio(p + q, u) {
                Some(x) if cross(u, q) == 1 => d.push(x),
                _ => fan_ok = false,
            }
        }
        if !fan_ok {
            continue;
        }
        let mut cycle = Cycle::new(d)?;
        // aliases[i] is the direction that now stands for dirs[i]
        let mut current = dirs.clone();
        let mut alias: HashMap<Pt, Pt> = HashMap::new();
        let resolve = |alias: &HashMap<Pt, Pt>, mut p: Pt| {
            while let Some(&q) = alias.get(&p) {
                p = q;
            }
            p
        };
        let mut ok = true;
        for &ci in &sp.cuts {
            let cut = &base.cuts[ci];
            let e1 = resolve(&alias, cut.e1);
            let Some(i) = current.iter().position(|&u| u == e1) else {
                ok = false;
                break;
            };
            match cut.kind {
                CutKind::InternalBlowup => {
                    let e2 = resolve(&alias, cut.e2);
                    let j = (i + 1) % current.len();
                    if current[j] != e2 {
                        ok = false;
                        break;
                    }
                    cycle = apply_surgery(&cycle, &SurgeryOnCycle::NodeSmoothing(i))?;
                    current.remove(j);
                    alias.insert(e2, e1);
                }
                CutKind::NodeSmoothing => {
                    cycle = apply_surgery(&cycle, &SurgeryOnCycle::InternalBlowup(i))?;
                }
            }
        }
        if ok {
            t.vertices[v].expected_cycle = Some(cycle);
        }
    }
    Ok(())
}

/// Triangulate, annotate, minimize at `v0` and predict singular stars.
pub fn build_complex(s: &ClosedSurface) -> Result<TriComplex> {
    let t = edge_d_values(&triangulate(s)?)?;
    let mut t = minimize_star(&t, t.v0)?;
    annotate_expected(&mut t, s)?;
    Ok(t)
}

/// Holonomy of the charts around `v`: the composite of the transition maps
/// met while turning once counterclockwise.
pub fn holonomy(t: &TriComplex, v: usize) -> Option<IMat2> {
    let star = t.around(v)?;
    let mut m = IAffine::IDENTITY;
    for &h in &star {
        m = m.compose(&t.twin_maps[t.prev(h)]);
    }
    Some(m.m)
}

#[cfg(test)]
mod tests;
