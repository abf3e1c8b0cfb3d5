//! Exact rational and integer planar geometry.
//!
//! `Rat`, `Vec2`, `Mat2` and `AffineMap` are arbitrary precision and are what
//! the public API speaks. The `lattice` submodule has fixed width integer
//! counterparts used on hot paths (surgery regions and meshes), where every
//! coordinate is integral by construction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub mod lattice;

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `[num, den]` with a positive denominator, the on-disk form of a rational.
pub fn rat_to_pair(r: &Rat) -> [BigInt; 2] {
    [r.numer().clone(), r.denom().clone()]
}

pub fn rat_from_pair(p: &[BigInt; 2]) -> Option<Rat> {
    if p[1].is_zero() {
        None
    } else {
        Some(Rat::new(p[0].clone(), p[1].clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2 {
    pub x: Rat,
    pub y: Rat,
}

impl Vec2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        Vec2 { x, y }
    }

    pub fn int(x: i64, y: i64) -> Self {
        Vec2 { x: rat(x), y: rat(y) }
    }

    pub fn zero() -> Self {
        Vec2::int(0, 0)
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    pub fn scale(&self, k: &Rat) -> Vec2 {
        Vec2::new(&self.x * k, &self.y * k)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for &Vec2 {
    type Output = Vec2;
    fn add(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &o.x, &self.y + &o.y)
    }
}

impl Sub for &Vec2 {
    type Output = Vec2;
    fn sub(self, o: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &o.x, &self.y - &o.y)
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }
}

pub fn det2(u: &Vec2, v: &Vec2) -> Rat {
    &u.x * &v.y - &u.y * &v.x
}

/// 2x2 integer matrix `[[a, b], [c, d]]` acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Mat2::from_i64(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity()
    }

    /// Inverse of a determinant one matrix.
    pub fn inverse_unimodular(&self) -> Option<Mat2> {
        if !self.det().is_one() {
            return None;
        }
        Some(Mat2::new(self.d.clone(), -&self.b, -&self.c, self.a.clone()))
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        let a = Rat::from_integer(self.a.clone());
        let b = Rat::from_integer(self.b.clone());
        let c = Rat::from_integer(self.c.clone());
        let d = Rat::from_integer(self.d.clone());
        Vec2::new(&a * &v.x + &b * &v.y, &c * &v.x + &d * &v.y)
    }

    pub fn rows(&self) -> [[BigInt; 2]; 2] {
        [[self.a.clone(), self.b.clone()], [self.c.clone(), self.d.clone()]]
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Left-to-right product; the empty product is the identity.
pub fn mat_product(ms: &[Mat2]) -> Mat2 {
    ms.iter().fold(Mat2::identity(), |acc, m| &acc * m)
}

/// `x -> linear * x + translation`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub linear: Mat2,
    pub translation: Vec2,
}

impl AffineMap {
    pub fn identity() -> Self {
        AffineMap { linear: Mat2::identity(), translation: Vec2::zero() }
    }

    pub fn apply(&self, p: &Vec2) -> Vec2 {
        &self.linear.apply(p) + &self.translation
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap { linear: &self.linear * &other.linear, translation: self.apply(&other.translation) }
    }

    pub fn inverse(&self) -> Option<AffineMap> {
        let inv = self.linear.inverse_unimodular()?;
        let t = -&inv.apply(&self.translation);
        Some(AffineMap { linear: inv, translation: t })
    }
}

/// Polygon with integral vertices listed counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolygon {
    pub vertices: Vec<Vec2>,
}

impl LatticePolygon {
    pub fn from_ints(pts: &[(i64, i64)]) -> Self {
        LatticePolygon { vertices: pts.iter().map(|&(x, y)| Vec2::int(x, y)).collect() }
    }
}

/// Twice the signed area; positive for counterclockwise order.
pub fn polygon_area2(p: &LatticePolygon) -> BigInt {
    let n = p.vertices.len();
    let mut s = Rat::zero();
    for i in 0..n {
        s += det2(&p.vertices[i], &p.vertices[(i + 1) % n]);
    }
    s.to_integer()
}

/// All lattice points in the closed polygon, sorted lexicographically.
pub fn lattice_points(p: &LatticePolygon) -> Vec<Vec2> {
    let vs = &p.vertices;
    if vs.is_empty() {
        return Vec::new();
    }
    let floor = |r: &Rat| r.floor().to_integer();
    let ceil = |r: &Rat| r.ceil().to_integer();
    let xmin = vs.iter().map(|v| ceil(&v.x)).min().unwrap();
    let xmax = vs.iter().map(|v| floor(&v.x)).max().unwrap();
    let ymin = vs.iter().map(|v| ceil(&v.y)).min().unwrap();
    let ymax = vs.iter().map(|v| floor(&v.y)).max().unwrap();
    let mut out = Vec::new();
    let mut x = xmin;
    while x <= xmax {
        let mut y = ymin.clone();
        while y <= ymax {
            let q = Vec2::new(Rat::from_integer(x.clone()), Rat::from_integer(y.clone()));
            if contains_closed(vs, &q) {
                out.push(q);
            }
            y += 1;
        }
        x += 1;
    }
    out
}

fn on_closed_segment(a: &Vec2, b: &Vec2, q: &Vec2) -> bool {
    if !det2(&(b - a), &(q - a)).is_zero() {
        return false;
    }
    let within = |s: &Rat, t: &Rat, u: &Rat| (s <= u && u <= t) || (t <= u && u <= s);
    within(&a.x, &b.x, &q.x) && within(&a.y, &b.y, &q.y)
}

fn contains_closed(vs: &[Vec2], q: &Vec2) -> bool {
    let n = vs.len();
    let mut winding = 0i64;
    for i in 0..n {
        let a = &vs[i];
        let b = &vs[(i + 1) % n];
        if on_closed_segment(a, b, q) {
            return true;
        }
        let side = det2(&(b - a), &(q - a));
        if a.y <= q.y {
            if b.y > q.y && side.is_positive() {
                winding += 1;
            }
        } else if b.y <= q.y && side.is_negative() {
            winding -= 1;
        }
    }
    winding != 0
}

/// Least common multiple of the denominators of both coordinates.
pub fn denominator_lcm(v: &Vec2) -> BigInt {
    v.x.denom().lcm(v.y.denom())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det2_of_basis_and_swaps() {
        assert_eq!(det2(&Vec2::int(1, 0), &Vec2::int(0, 1)), rat(1));
        assert_eq!(det2(&Vec2::int(2, 1), &Vec2::int(1, 1)), rat(1));
        assert_eq!(det2(&Vec2::int(0, 1), &Vec2::int(1, 0)), rat(-1));
    }

    #[test]
    fn mat_product_examples() {
        let m = Mat2::from_i64(0, 1, -1, 3);
        assert_eq!(mat_product(&[m]), Mat2::from_i64(0, 1, -1, 3));
        assert_eq!(mat_product(&[]), Mat2::identity());
        let r = Mat2::from_i64(1, 1, 0, 1);
        let l = Mat2::from_i64(1, 0, 1, 1);
        assert_eq!(mat_product(&[r, l]), Mat2::from_i64(2, 1, 1, 1));
    }

    #[test]
    fn lattice_point_counts() {
        let sq = LatticePolygon::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(lattice_points(&sq).len(), 4);
        let tri = LatticePolygon::from_ints(&[(0, 0), (2, 0), (0, 2)]);
        assert_eq!(lattice_points(&tri).len(), 6);
        let basis = LatticePolygon::from_ints(&[(0, 0), (1, 0), (0, 1)]);
        assert_eq!(lattice_points(&basis).len(), 3);
    }

    #[test]
    fn area2_examples() {
        assert_eq!(polygon_area2(&LatticePolygon::from_ints(&[(0, 0), (1, 0), (0, 1)])), 1.into());
        assert_eq!(polygon_area2(&LatticePolygon::from_ints(&[(0, 0), (1, 0), (1, 1), (0, 1)])), 2.into());
        assert_eq!(polygon_area2(&LatticePolygon::from_ints(&[(0, 0), (2, 0), (0, 1)])), 2.into());
    }

    #[test]
    fn affine_inverse_round_trip() {
        let g = AffineMap { linear: Mat2::from_i64(2, 1, -1, 0), translation: Vec2::int(3, -4) };
        let h = g.inverse().unwrap();
        let p = Vec2::new(rat_frac(1, 3), rat(7));
        assert_eq!(h.apply(&g.apply(&p)), p);
        assert_eq!(g.compose(&h), AffineMap::identity());
    }

    // Pick's theorem as an independent count: 2A = 2I + B - 2.
    #[test]
    fn pick_agrees_with_enumeration() {
        let p = LatticePolygon::from_ints(&[(0, 0), (5, 1), (3, 4), (-1, 2)]);
        let pts = lattice_points(&p);
        let a2 = polygon_area2(&p);
        let n = p.vertices.len();
        let mut boundary = BigInt::zero();
        for i in 0..n {
            let d = &p.vertices[(i + 1) % n] - &p.vertices[i];
            boundary += d.x.to_integer().abs().gcd(&d.y.to_integer().abs());
        }
        let interior = BigInt::from(pts.len()) - &boundary;
        assert_eq!(a2, BigInt::from(2) * interior + boundary - 2);
    }
}
