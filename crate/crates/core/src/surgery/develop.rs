//! Developing the boundary of a base into the plane.
//!
//! Walking the chain, every closed group of cut sides is stepped over by
//! composing with the gluing map of its outermost seam. The chart reached
//! after a full turn is the affine monodromy of the boundary.

use serde::{Deserialize, Serialize};

use super::{ratio, AlmostToricBase, Result, SegmentKind, Side, SurgeryError};
use crate::cycles::Cycle;
use crate::exactgeom::lattice::{cross, IAffine, Pt};

/// A positive-length boundary piece placed in the developing chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DevEdge {
    pub chain_index: usize,
    pub label: usize,
    pub start: Pt,
    pub end: Pt,
    /// Map from the base chart into the developing chart on this piece.
    pub chart: IAffine,
}

/// A zero-length component placed in the developing chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DevMarker {
    pub chain_index: usize,
    pub label: usize,
    pub dir: Pt,
    pub at: Pt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DevItem {
    Edge(DevEdge),
    Marker(DevMarker),
}

impl DevItem {
    pub fn label(&self) -> usize {
        match self {
            DevItem::Edge(e) => e.label,
            DevItem::Marker(m) => m.label,
        }
    }

    fn direction(&self) -> Pt {
        match self {
            DevItem::Edge(e) => (e.end - e.start).primitive(),
            DevItem::Marker(m) => m.dir,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Development {
    pub items: Vec<DevItem>,
    /// Chart at the end of the walk; maps the start of the chain to its developed end.
    pub monodromy: IAffine,
    /// Developed image of the chain start.
    pub start: Pt,
}

pub(super) fn develop(base: &AlmostToricBase) -> Result<Development> {
    let out = &base.outline;
    let n = out.len();
    let mut d = IAffine::IDENTITY;
    let mut items = Vec::new();
    let mut i = 0;
    while i < n {
        let s = &out[i];
        for m in &s.markers {
            items.push(DevItem::Marker(DevMarker {
                chain_index: i,
                label: m.label,
                dir: d.apply_linear(m.dir),
                at: d.apply(s.start),
            }));
        }
        match s.kind {
            SegmentKind::Edge { label } => {
                items.push(DevItem::Edge(DevEdge {
                    chain_index: i,
                    label,
                    start: d.apply(s.start),
                    end: d.apply(s.end),
                    chart: d,
                }));
                i += 1;
            }
            SegmentKind::Cut { seam, side: Side::A } => {
                let j = closing_side(base, i)?;
                if out[j].kind != (SegmentKind::Cut { seam, side: Side::B }) {
                    return Err(SurgeryError::Corrupt(format!("seam {seam} is not closed by its own side")));
                }
                d = d.compose(&base.seams[seam].map);
                i = j + 1;
            }
            SegmentKind::Cut { side: Side::B, .. } => {
                return Err(SurgeryError::Corrupt("chain starts inside a cut".into()));
            }
        }
    }
    Ok(Development { items, monodromy: d, start: out[0].start })
}

/// Index of the side closing the group opened at `i`.
fn closing_side(base: &AlmostToricBase, i: usize) -> Result<usize> {
    let out = &base.outline;
    let mut depth = 0usize;
    for (j, s) in out.iter().enumerate().skip(i) {
        if j > i && (!s.markers.is_empty() || s.label().is_some()) && depth > 0 {
            return Err(SurgeryError::Corrupt("boundary inside a cut".into()));
        }
        match s.kind {
            SegmentKind::Cut { side: Side::A, .. } => depth += 1,
            SegmentKind::Cut { side: Side::B, .. } => {
                depth -= 1;
                if depth == 0 {
                    return Ok(j);
                }
            }
            SegmentKind::Edge { .. } => {}
        }
    }
    Err(SurgeryError::Corrupt("unclosed cut".into()))
}

impl Development {
    /// Developed vertices of the positive-length boundary, from the start of
    /// the chain to its image under the monodromy.
    pub fn path(&self) -> Vec<Pt> {
        let mut v = Vec::new();
        for it in &self.items {
            if let DevItem::Edge(e) = it {
                if v.last() != Some(&e.start) {
                    v.push(e.start);
                }
                v.push(e.end);
            }
        }
        v
    }

    pub fn edges(&self) -> impl Iterator<Item = &DevEdge> {
        self.items.iter().filter_map(|it| match it {
            DevItem::Edge(e) => Some(e),
            DevItem::Marker(_) => None,
        })
    }

    /// One `(label, primitive direction)` per boundary component, in walk
    /// order, starting at a change of label.
    pub fn components(&self) -> Result<Vec<(usize, Pt)>> {
        let mut items: Vec<(usize, Pt)> = self.items.iter().map(|it| (it.label(), it.direction())).collect();
        if items.is_empty() {
            return Err(SurgeryError::EmptyBoundary);
        }
        let distinct = items.iter().any(|x| x.0 != items[0].0);
        if distinct {
            // leading items continuing the last component belong to the next turn
            let k = items.iter().position(|x| x.0 != items[0].0).unwrap();
            if items.last().unwrap().0 == items[0].0 {
                let lead: Vec<(usize, Pt)> =
                    items.drain(..k).map(|(l, u)| (l, self.monodromy.apply_linear(u))).collect();
                items.extend(lead);
            }
        }
        let mut comps: Vec<(usize, Pt)> = Vec::new();
        for (l, u) in items {
            match comps.last() {
                Some(&(pl, pu)) if pl == l => {
                    if pu != u {
                        return Err(SurgeryError::Corrupt(format!("component {l} bends from {pu} to {u}")));
                    }
                }
                _ => comps.push((l, u)),
            }
        }
        if distinct && comps.len() > 1 && comps.first().unwrap().0 == comps.last().unwrap().0 {
            comps.pop();
        }
        Ok(comps)
    }

    /// Self-intersection numbers `d_k` from `u_{k-1} + u_{k+1} = d_k u_k`,
    /// ordered as the components of `base`.
    pub fn d_values_by_label(&self, base: &AlmostToricBase) -> Result<Cycle> {
        let comps = self.components()?;
        let n = comps.len();
        if n != base.boundary.len() {
            return Err(SurgeryError::Corrupt(format!(
                "developed boundary has {n} components, base has {}",
                base.boundary.len()
            )));
        }
        let m = self.monodromy;
        let minv = m.inverse().ok_or_else(|| SurgeryError::Corrupt("monodromy not invertible".into()))?;
        let u = |k: isize| -> Pt {
            if k < 0 {
                minv.apply_linear(comps[n - 1].1)
            } else if k as usize >= n {
                m.apply_linear(comps[0].1)
            } else {
                comps[k as usize].1
            }
        };
        let mut by_label = Vec::with_capacity(n);
        for k in 0..n as isize {
            let (prev, cur, next) = (u(k - 1), u(k), u(k + 1));
            if cross(cur, next) != 1 {
                return Err(SurgeryError::Corrupt(format!("corner {cur}, {next} is not smooth")));
            }
            let d =
                ratio(prev + next, cur).ok_or_else(|| SurgeryError::Corrupt(format!("no d for direction {cur}")))?;
            by_label.push((comps[k as usize].0, d));
        }
        let start = by_label
            .iter()
            .position(|&(l, _)| l == base.boundary[0].label)
            .ok_or(SurgeryError::UnknownEdge(base.boundary[0].label))?;
        by_label.rotate_left(start);
        for (e, &(l, _)) in base.boundary.iter().zip(&by_label) {
            if e.label != l {
                return Err(SurgeryError::Corrupt("components out of order".into()));
            }
        }
        Cycle::new(by_label.into_iter().map(|(_, d)| d).collect()).map_err(|e| SurgeryError::Corrupt(e.to_string()))
    }
}
