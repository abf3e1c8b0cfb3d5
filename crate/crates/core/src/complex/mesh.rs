//! Triangulating a single planar patch into basis triangles.

use std::collections::HashMap;

use super::{ComplexError, Result};
use crate::exactgeom::lattice::{on_segment, orient, segments_cross, Pt};

/// Triangulation of one weakly simple lattice polygon.
///
/// Vertex ids are per copy: the two sides of a slit carry distinct vertices
/// even where their positions agree.
#[derive(Clone, Debug)]
pub(crate) struct PatchMesh {
    pub pos: Vec<Pt>,
    pub faces: Vec<[usize; 3]>,
    pub twin: Vec<Option<usize>>,
}

impl PatchMesh {
    pub fn from_polygon(poly: &[Pt]) -> Result<Self> {
        let n = poly.len();
        // drop vertices where the boundary runs straight on; refinement restores them
        let keep: Vec<Pt> = (0..n)
            .filter(|&i| {
                let (p, c, q) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
                !(orient(p, c, q) == 0 && (c - p).dot(q - c) > 0)
            })
            .map(|i| poly[i])
            .collect();
        let faces = ear_clip(&keep)?;
        let mut m = PatchMesh { pos: keep, faces: Vec::new(), twin: Vec::new() };
        m.replace(&[], faces);
        m.refine();
        Ok(m)
    }

    pub fn he_from(&self, h: usize) -> usize {
        self.faces[h / 3][h % 3]
    }

    pub fn he_to(&self, h: usize) -> usize {
        self.faces[h / 3][(h + 1) % 3]
    }

    fn area2(&self, f: usize) -> i128 {
        let [a, b, c] = self.faces[f];
        orient(self.pos[a], self.pos[b], self.pos[c])
    }

    /// Remove `old` faces and add `new` ones, relinking twins by endpoints.
    fn replace(&mut self, old: &[usize], new: Vec<[usize; 3]>) {
        let mut outer: HashMap<(usize, usize), usize> = HashMap::new();
        for &f in old {
            for k in 0..3 {
                let h = f * 3 + k;
                if let Some(o) = self.twin[h] {
                    if !old.contains(&(o / 3)) {
                        outer.insert((self.he_from(h), self.he_to(h)), o);
                    }
                }
            }
        }
        let mut slots: Vec<usize> = old.to_vec();
        slots.sort_unstable();
        let mut placed = Vec::with_capacity(new.len());
        for (i, f) in new.into_iter().enumerate() {
            let slot = if i < slots.len() {
                slots[i]
            } else {
                self.faces.push([0; 3]);
                self.twin.extend([None, None, None]);
                self.faces.len() - 1
            };
            self.faces[slot] = f;
            placed.push(slot);
        }
        let mut local: HashMap<(usize, usize), usize> = HashMap::new();
        for &f in &placed {
            for k in 0..3 {
                let h = f * 3 + k;
                local.insert((self.he_from(h), self.he_to(h)), h);
            }
        }
        for &f in &placed {
            for k in 0..3 {
                let h = f * 3 + k;
                let (u, v) = (self.he_from(h), self.he_to(h));
                let t = local.get(&(v, u)).copied().or_else(|| outer.get(&(u, v)).copied());
                self.twin[h] = t;
                if let Some(o) = t {
                    self.twin[o] = Some(h);
                }
            }
        }
    }

    /// Split faces of twice-area above one until all are basis triangles.
    /// The lowest-index such face is split first, at its lexicographically
    /// smallest lattice point other than a vertex.
    fn refine(&mut self) {
        let mut i = 0;
        while i < self.faces.len() {
            if self.area2(i) == 1 {
                i += 1;
                continue;
            }
            let [a, b, c] = self.faces[i];
            let (pa, pb, pc) = (self.pos[a], self.pos[b], self.pos[c]);
            let p = first_lattice_point(pa, pb, pc)
                .expect("a lattice triangle of area above 1/2 has another lattice point");
            let new = self.pos.len();
            self.pos.push(p);
            let edge = [(a, b), (b, c), (c, a)].iter().position(|&(u, v)| on_segment(self.pos[u], self.pos[v], p));
            match edge {
                None => {
                    self.replace(&[i], vec![[a, b, new], [b, c, new], [c, a, new]]);
                }
                Some(k) => {
                    let h = i * 3 + k;
                    let f = self.faces[i];
                    let (u, w, x) = (f[k], f[(k + 1) % 3], f[(k + 2) % 3]);
                    match self.twin[h] {
                        None => self.replace(&[i], vec![[u, new, x], [new, w, x]]),
                        Some(t) => {
                            let g = self.faces[t / 3];
                            let kk = t % 3;
                            let y = g[(kk + 2) % 3];
                            self.replace(&[i, t / 3], vec![[u, new, x], [new, w, x], [w, new, y], [new, u, y]]);
                        }
                    }
                }
            }
        }
    }

    /// Boundary half-edges keyed by their endpoint positions.
    pub fn boundary_map(&self) -> HashMap<(Pt, Pt), usize> {
        (0..self.faces.len() * 3)
            .filter(|&h| self.twin[h].is_none())
            .map(|h| ((self.pos[self.he_from(h)], self.pos[self.he_to(h)]), h))
            .collect()
    }
}

/// Ear clipping of a counterclockwise weakly simple polygon.
pub(crate) fn ear_clip(pts: &[Pt]) -> Result<Vec<[usize; 3]>> {
    let mut poly: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::new();
    while poly.len() > 3 {
        let n = poly.len();
        let ear = (0..n).find(|&i| {
            let (ip, ic, inx) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
            let (p, c, q) = (pts[ip], pts[ic], pts[inx]);
            if orient(p, c, q) <= 0 {
                return false;
            }
            let blocked = poly.iter().any(|&r| {
                let x = pts[r];
                if x == p || x == c || x == q {
                    return false;
                }
                orient(p, c, x) >= 0 && orient(c, q, x) >= 0 && orient(q, p, x) >= 0
            });
            if blocked {
                return false;
            }
            !(0..n).any(|j| segments_cross(p, q, pts[poly[j]], pts[poly[(j + 1) % n]]))
        });
        let Some(i) = ear else {
            return Err(ComplexError::Triangulation(format!("no ear among {n} vertices")));
        };
        out.push([poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]]);
        poly.remove(i);
    }
    let [a, b, c] = [poly[0], poly[1], poly[2]];
    if orient(pts[a], pts[b], pts[c]) <= 0 {
        return Err(ComplexError::Triangulation("degenerate final triangle".into()));
    }
    out.push([a, b, c]);
    Ok(out)
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

/// Lexicographically least lattice point of the closed triangle that is not
/// one of its corners.
pub(crate) fn first_lattice_point(a: Pt, b: Pt, c: Pt) -> Option<Pt> {
    let xmin = a.x.min(b.x).min(c.x);
    let xmax = a.x.max(b.x).max(c.x);
    let edges = [(a, b), (b, c), (c, a)];
    for x in xmin..=xmax {
        // y range of the vertical line through x as fractions num/den, den > 0
        let mut lo: Option<(i128, i128)> = None;
        let mut hi: Option<(i128, i128)> = None;
        let mut push = |num: i128, den: i128| {
            let lower = lo.is_none_or(|(ln, ld)| num * ld < ln * den);
            if lower {
                lo = Some((num, den));
            }
            let higher = hi.is_none_or(|(hn, hd)| num * hd > hn * den);
            if higher {
                hi = Some((num, den));
            }
        };
        for &(p, q) in &edges {
            if p.x == q.x {
                if p.x == x {
                    push(p.y, 1);
                    push(q.y, 1);
                }
                continue;
            }
            let (p, q) = if p.x < q.x { (p, q) } else { (q, p) };
            if x < p.x || x > q.x {
                continue;
            }
            let den = q.x - p.x;
            push(p.y * den + (q.y - p.y) * (x - p.x), den);
        }
        let (Some((ln, ld)), Some((hn, hd))) = (lo, hi) else { continue };
        for y in ceil_div(ln, ld)..=floor_div(hn, hd) {
            let p = Pt { x, y };
            if p != a && p != b && p != c {
                return Some(p);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::lattice::{area2, pt};

    fn check(poly: &[Pt]) -> PatchMesh {
        let m = PatchMesh::from_polygon(poly).unwrap();
        assert_eq!(m.faces.len() as i128, area2(poly));
        for f in 0..m.faces.len() {
            assert_eq!(m.area2(f), 1);
        }
        for h in 0..m.faces.len() * 3 {
            if let Some(t) = m.twin[h] {
                assert_eq!(m.twin[t], Some(h));
                assert_eq!(m.he_from(t), m.he_to(h));
            }
        }
        m
    }

    #[test]
    fn unit_square() {
        assert_eq!(check(&[pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)]).faces.len(), 2);
    }

    #[test]
    fn thin_triangle_is_split_on_its_long_side() {
        let m = check(&[pt(0, 0), pt(2, 0), pt(0, 1)]);
        assert_eq!(m.faces.len(), 2);
        assert!(m.pos.contains(&pt(1, 0)));
    }

    #[test]
    fn slit_square() {
        // square with a slit from the bottom middle up to (2,2)
        let poly = [pt(0, 0), pt(2, 0), pt(2, 2), pt(2, 0), pt(4, 0), pt(4, 4), pt(0, 4)];
        let m = check(&poly);
        // the slit sides stay unglued
        let b = m.boundary_map();
        assert!(b.contains_key(&(pt(2, 0), pt(2, 1))));
        assert!(b.contains_key(&(pt(2, 1), pt(2, 0))));
        assert_eq!(b.len(), 16 + 4);
    }

    #[test]
    fn lattice_point_search() {
        assert_eq!(first_lattice_point(pt(0, 0), pt(2, 0), pt(0, 1)), Some(pt(1, 0)));
        assert_eq!(first_lattice_point(pt(0, 0), pt(1, 0), pt(0, 1)), None);
        assert_eq!(first_lattice_point(pt(0, 0), pt(3, 1), pt(1, 3)), Some(pt(1, 1)));
    }
}
