//! Serialized form of a [`TriComplex`].

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{ComplexError, Patch, Result, TriComplex, VertexInfo};
use crate::cycles::Cycle;
use crate::exactgeom::lattice::{pt, IAffine, IMat2, Pt};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    /// Position in the unrefined chart, each coordinate as `[num, den]`.
    pub pos: [[i128; 2]; 2],
    pub singular: bool,
    pub patch: Patch,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_cycle: Option<Cycle>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: usize,
    pub to: usize,
    pub d: i64,
    pub face: usize,
    pub side: usize,
    pub twin: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineJson {
    pub matrix: [[i128; 2]; 2],
    pub translation: [i128; 2],
}

impl From<IAffine> for AffineJson {
    fn from(a: IAffine) -> Self {
        AffineJson { matrix: [[a.m.a, a.m.b], [a.m.c, a.m.d]], translation: [a.t.x, a.t.y] }
    }
}

impl From<AffineJson> for IAffine {
    fn from(a: AffineJson) -> Self {
        let [[p, q], [r, s]] = a.matrix;
        IAffine::new(IMat2::new(p, q, r, s), pt(a.translation[0], a.translation[1]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentificationJson {
    /// A half-edge and its twin.
    pub edge_pair: [usize; 2],
    /// Takes the chart of the twin's face to the chart of the first face.
    pub matrix: [[i128; 2]; 2],
    pub translation: [i128; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub kind: String,
    pub scale: i128,
    pub v0: usize,
    pub flips: usize,
    pub vertices: Vec<VertexJson>,
    pub faces: Vec<[usize; 3]>,
    pub charts: Vec<[[i128; 2]; 3]>,
    pub base_charts: Vec<Option<AffineJson>>,
    pub edges: Vec<EdgeJson>,
    pub identifications: Vec<IdentificationJson>,
}

pub const COMPLEX_KIND: &str = "tri_complex";

fn frac(n: i128, d: i128) -> [i128; 2] {
    let g = n.gcd(&d);
    [n / g, d / g]
}

impl ComplexJson {
    pub fn from_complex(t: &TriComplex) -> Self {
        let vertices = t
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| VertexJson {
                id,
                pos: [frac(v.pos.x, t.scale), frac(v.pos.y, t.scale)],
                singular: v.singular,
                patch: v.patch,
                expected_cycle: v.expected_cycle.clone(),
            })
            .collect();
        let edges = (0..t.he_count())
            .map(|h| EdgeJson { from: t.from(h), to: t.to(h), d: t.d[h], face: h / 3, side: h % 3, twin: t.twin[h] })
            .collect();
        let identifications = (0..t.he_count())
            .filter(|&h| !t.twin_maps[h].is_identity())
            .map(|h| {
                let a = AffineJson::from(t.twin_maps[h]);
                IdentificationJson { edge_pair: [h, t.twin[h]], matrix: a.matrix, translation: a.translation }
            })
            .collect();
        ComplexJson {
            kind: COMPLEX_KIND.into(),
            scale: t.scale,
            v0: t.v0,
            flips: t.flips,
            vertices,
            faces: t.faces.clone(),
            charts: t.charts.iter().map(|c| c.map(|p| [p.x, p.y])).collect(),
            base_charts: t.base_charts.iter().map(|m| m.map(Into::into)).collect(),
            edges,
            identifications,
        }
    }

    pub fn into_complex(self) -> Result<TriComplex> {
        let bad = |m: &str| ComplexError::Malformed(m.to_string());
        if self.kind != COMPLEX_KIND {
            return Err(bad("kind is not tri_complex"));
        }
        let nf = self.faces.len();
        let nv = self.vertices.len();
        if self.charts.len() != nf || self.base_charts.len() != nf || self.edges.len() != 3 * nf {
            return Err(bad("face, chart and edge counts disagree"));
        }
        if self.scale < 1 || self.v0 >= nv {
            return Err(bad("bad scale or v0"));
        }
        if self.faces.iter().flatten().any(|&v| v >= nv) {
            return Err(bad("face refers to a missing vertex"));
        }
        let mut twin = vec![0; 3 * nf];
        let mut d = vec![0; 3 * nf];
        for (h, e) in self.edges.iter().enumerate() {
            if e.face != h / 3 || e.side != h % 3 || e.twin >= 3 * nf {
                return Err(bad("edges are not listed face by face"));
            }
            if e.from != self.faces[h / 3][h % 3] || e.to != self.faces[h / 3][(h + 1) % 3] {
                return Err(bad("edge endpoints disagree with faces"));
            }
            twin[h] = e.twin;
            d[h] = e.d;
        }
        let mut twin_maps = vec![IAffine::IDENTITY; 3 * nf];
        for i in &self.identifications {
            let [h, o] = i.edge_pair;
            if h >= 3 * nf || twin[h] != o {
                return Err(bad("identification is not between twins"));
            }
            twin_maps[h] = AffineJson { matrix: i.matrix, translation: i.translation }.into();
        }
        let vertices = self
            .vertices
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if v.id != i || v.pos.iter().any(|c| c[1] <= 0) {
                    return Err(bad("vertex ids must be consecutive with positive denominators"));
                }
                let coord = |c: [i128; 2]| {
                    let n = c[0] * self.scale;
                    if n % c[1] != 0 {
                        Err(ComplexError::NonIntegralInput(format!("vertex {i} is not on the refined lattice")))
                    } else {
                        Ok(n / c[1])
                    }
                };
                Ok(VertexInfo {
                    pos: Pt { x: coord(v.pos[0])?, y: coord(v.pos[1])? },
                    patch: v.patch,
                    singular: v.singular,
                    expected_cycle: v.expected_cycle,
                })
            })
            .collect::<Result<_>>()?;
        Ok(TriComplex {
            vertices,
            faces: self.faces,
            charts: self.charts.iter().map(|c| c.map(|p| pt(p[0], p[1]))).collect(),
            base_charts: self.base_charts.into_iter().map(|m| m.map(Into::into)).collect(),
            twin,
            twin_maps,
            d,
            v0: self.v0,
            scale: self.scale,
            flips: self.flips,
        })
    }
}
