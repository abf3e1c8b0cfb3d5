//! Stars of vertices and the Type III checks.

use serde::{Serialize, Serializer};

use super::{holonomy, Result, TriComplex};
use crate::cycles::{
    charge, cycles_equal, cycles_equal_oriented, dual_side_monodromy, is_negative_definite, monodromy, sl2z_word,
    Cycle, CyclicWord,
};
use crate::exactgeom::lattice::{orient, IMat2};
use crate::exactgeom::Mat2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Star {
    pub center: usize,
    pub singular: bool,
    /// Self-intersections of the emanating edges, counterclockwise.
    pub cycle: Cycle,
    pub charge: i64,
    /// Product of `[[0,1],[-1,d]]` over the cycle.
    #[serde(serialize_with = "matrix_as_strings")]
    pub local_monodromy: Mat2,
    /// Linear holonomy of the charts around the vertex.
    pub holonomy: IMat2,
    pub expected: Option<Cycle>,
}

fn matrix_as_strings<S: Serializer>(m: &Mat2, s: S) -> std::result::Result<S::Ok, S::Error> {
    [[m.a.to_string(), m.b.to_string()], [m.c.to_string(), m.d.to_string()]].serialize(s)
}

pub fn star(t: &TriComplex, v: usize) -> Result<Star> {
    let around = t.around(v).ok_or_else(|| super::ComplexError::Malformed(format!("vertex {v} has no disc star")))?;
    let cycle = Cycle::new(around.iter().map(|&h| t.d[h]).collect())?;
    let hol = holonomy(t, v).expect("star exists");
    Ok(Star {
        center: v,
        singular: t.vertices[v].singular,
        charge: charge(&cycle),
        local_monodromy: monodromy(&cycle),
        holonomy: hol,
        cycle,
        expected: t.vertices[v].expected_cycle.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeIIIReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    /// Every face has twice-area one in its chart.
    pub unimodular_ok: bool,
    /// Stored self-intersections agree with the charts.
    pub d_consistent_ok: bool,
    /// `d_ij + d_ji = 2` on every edge.
    pub triple_point_ok: bool,
    /// Closed, connected, orientable, every link a circle, `V - E + F = 2`.
    pub sphere_ok: bool,
    pub charge_total: i64,
    pub charge_ok: bool,
    pub v0: usize,
    pub v0_valence: usize,
    pub v0_cycle: Cycle,
    pub v0_charge: i64,
    pub v0_negative_definite: bool,
    pub expected_dual: Cycle,
    pub v0_matches_dual: bool,
    pub v0_word: String,
    pub dual_word: String,
    pub v0_word_ok: bool,
    /// Smooth vertices have charge zero and trivial monodromy.
    pub nonsingular_ok: bool,
    pub expected_stars_checked: usize,
    pub expected_stars_ok: bool,
    pub flips: usize,
    pub stars: Vec<Star>,
}

impl TypeIIIReport {
    pub fn all_ok(&self) -> bool {
        self.unimodular_ok
            && self.d_consistent_ok
            && self.triple_point_ok
            && self.sphere_ok
            && self.charge_ok
            && self.v0_negative_definite
            && self.v0_matches_dual
            && self.v0_word_ok
            && self.nonsingular_ok
            && self.expected_stars_ok
    }

    /// Names of the failed checks.
    pub fn failures(&self) -> Vec<&'static str> {
        let checks = [
            ("unimodular", self.unimodular_ok),
            ("d_consistent", self.d_consistent_ok),
            ("triple_point", self.triple_point_ok),
            ("sphere", self.sphere_ok),
            ("charge", self.charge_ok),
            ("v0_negative_definite", self.v0_negative_definite),
            ("v0_matches_dual", self.v0_matches_dual),
            ("v0_word", self.v0_word_ok),
            ("nonsingular", self.nonsingular_ok),
            ("expected_stars", self.expected_stars_ok),
        ];
        checks.iter().filter(|c| !c.1).map(|c| c.0).collect()
    }
}

fn is_sphere(t: &TriComplex) -> bool {
    let n = t.he_count();
    if t.twin.len() != n {
        return false;
    }
    for h in 0..n {
        let o = t.twin[h];
        if o >= n || t.twin[o] != h || o == h || t.from(o) != t.to(h) || t.to(o) != t.from(h) {
            return false;
        }
    }
    // each vertex link is a single circle
    let mut seen = vec![false; n];
    let mut links = vec![0usize; t.vertices.len()];
    for h in 0..n {
        if seen[h] {
            continue;
        }
        let v = t.from(h);
        let mut e = h;
        loop {
            seen[e] = true;
            e = t.rotate(e);
            if e == h {
                break;
            }
        }
        links[v] += 1;
    }
    if links.iter().any(|&k| k != 1) {
        return false;
    }
    // connected
    let mut reached = vec![false; t.faces.len()];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(f) = stack.pop() {
        for k in 0..3 {
            let g = t.twin[f * 3 + k] / 3;
            if !reached[g] {
                reached[g] = true;
                stack.push(g);
            }
        }
    }
    reached.iter().all(|&r| r) && t.euler_characteristic() == 2
}

/// Run every check on an annotated complex.
pub fn verify_type_iii(t: &TriComplex, expected_dual: &Cycle) -> Result<TypeIIIReport> {
    let n = t.he_count();
    let unimodular_ok = t.charts.iter().all(|c| orient(c[0], c[1], c[2]) == 1);
    let sphere_ok = is_sphere(t);
    let d_consistent_ok = sphere_ok && (0..n).all(|h| t.compute_d(h).is_ok_and(|d| d == t.d[h]));
    let triple_point_ok =
        t.d.len() == n && (0..n).all(|h| t.twin.get(h).is_some_and(|&o| o < n && t.d[h] + t.d[o] == 2));
    if !sphere_ok {
        return Err(super::ComplexError::Malformed("not a closed surface with disc stars".into()));
    }
    let stars: Vec<Star> = (0..t.vertices.len()).map(|v| star(t, v)).collect::<Result<_>>()?;
    let charge_total: i64 = stars.iter().map(|s| s.charge).sum();
    let nonsingular_ok = stars
        .iter()
        .filter(|s| !s.singular)
        .all(|s| s.charge == 0 && s.local_monodromy.is_identity() && s.holonomy == IMat2::IDENTITY);
    let mut checked = 0;
    let mut expected_ok = true;
    for s in stars.iter().filter(|s| s.singular && s.center != t.v0) {
        if let Some(e) = &s.expected {
            checked += 1;
            expected_ok &= cycles_equal_oriented(&s.cycle, e);
        }
    }
    let s0 = &stars[t.v0];
    let v0_word = sl2z_word(&s0.holonomy.to_mat2()).ok();
    // the boundary runs clockwise as seen from v0, so the dual may appear reversed
    let seen =
        if cycles_equal_oriented(&s0.cycle, expected_dual) { expected_dual.clone() } else { expected_dual.reversed() };
    let dual_word = sl2z_word(&dual_side_monodromy(&seen)).ok();
    let v0_word_ok = match (&v0_word, &dual_word) {
        (Some(a), Some(b)) => a.cyclic_eq(b),
        _ => false,
    };
    let show = |w: &Option<CyclicWord>| w.as_ref().map(|w| w.to_string()).unwrap_or_default();
    Ok(TypeIIIReport {
        vertices: t.vertices.len(),
        edges: t.edge_count(),
        faces: t.faces.len(),
        euler_characteristic: t.euler_characteristic(),
        unimodular_ok,
        d_consistent_ok,
        triple_point_ok,
        sphere_ok,
        charge_total,
        charge_ok: charge_total == 24,
        v0: t.v0,
        v0_valence: s0.cycle.len(),
        v0_cycle: s0.cycle.clone(),
        v0_charge: s0.charge,
        v0_negative_definite: is_negative_definite(&s0.cycle),
        expected_dual: expected_dual.clone(),
        v0_matches_dual: cycles_equal(&s0.cycle, expected_dual),
        v0_word: show(&v0_word),
        dual_word: show(&dual_word),
        v0_word_ok,
        nonsingular_ok,
        expected_stars_checked: checked,
        expected_stars_ok: expected_ok,
        flips: t.flips,
        stars,
    })
}
