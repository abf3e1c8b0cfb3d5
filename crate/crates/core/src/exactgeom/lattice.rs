//! Integral points and integral affine maps in fixed width arithmetic.
//!
//! Values that arise in the constructions here stay far below `i128` range;
//! the conversions from the arbitrary precision types fail loudly instead of
//! truncating.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{rat, AffineMap, Mat2, Rat, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Pt {
    pub x: i128,
    pub y: i128,
}

pub const fn pt(x: i128, y: i128) -> Pt {
    Pt { x, y }
}

impl Pt {
    pub fn to_vec2(self) -> Vec2 {
        Vec2::new(Rat::from_integer(self.x.into()), Rat::from_integer(self.y.into()))
    }

    /// `None` unless both coordinates are integers in range.
    pub fn from_vec2(v: &Vec2) -> Option<Pt> {
        if !v.is_integral() {
            return None;
        }
        Some(pt(v.x.to_integer().to_i128()?, v.y.to_integer().to_i128()?))
    }

    pub fn scale(self, k: i128) -> Pt {
        pt(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Pt) -> i128 {
        self.x * o.x + self.y * o.y
    }

    pub fn gcd(self) -> i128 {
        self.x.gcd(&self.y)
    }

    pub fn is_primitive(self) -> bool {
        self.gcd() == 1
    }

    /// Divides out the content; the zero vector is returned unchanged.
    pub fn primitive(self) -> Pt {
        let g = self.gcd();
        if g == 0 {
            self
        } else {
            pt(self.x / g, self.y / g)
        }
    }
}

impl fmt::Display for Pt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Pt {
    type Output = Pt;
    fn add(self, o: Pt) -> Pt {
        pt(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Pt {
    type Output = Pt;
    fn sub(self, o: Pt) -> Pt {
        pt(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Pt {
    type Output = Pt;
    fn neg(self) -> Pt {
        pt(-self.x, -self.y)
    }
}

pub fn cross(u: Pt, v: Pt) -> i128 {
    u.x * v.y - u.y * v.x
}

/// Twice the signed area of the triangle `abc`.
pub fn orient(a: Pt, b: Pt, c: Pt) -> i128 {
    cross(b - a, c - a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IMat2 {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl IMat2 {
    pub const IDENTITY: IMat2 = IMat2 { a: 1, b: 0, c: 0, d: 1 };

    pub const fn new(a: i128, b: i128, c: i128, d: i128) -> Self {
        IMat2 { a, b, c, d }
    }

    /// Matrix with the given columns.
    pub fn from_cols(u: Pt, v: Pt) -> Self {
        IMat2::new(u.x, v.x, u.y, v.y)
    }

    pub fn det(&self) -> i128 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> i128 {
        self.a + self.d
    }

    pub fn apply(&self, v: Pt) -> Pt {
        pt(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn inverse(&self) -> Option<IMat2> {
        match self.det() {
            1 => Some(IMat2::new(self.d, -self.b, -self.c, self.a)),
            -1 => Some(IMat2::new(-self.d, self.b, self.c, -self.a)),
            _ => None,
        }
    }

    pub fn to_mat2(&self) -> Mat2 {
        Mat2::new(self.a.into(), self.b.into(), self.c.into(), self.d.into())
    }

    pub fn from_mat2(m: &Mat2) -> Option<IMat2> {
        Some(IMat2::new(m.a.to_i128()?, m.b.to_i128()?, m.c.to_i128()?, m.d.to_i128()?))
    }
}

impl Mul for IMat2 {
    type Output = IMat2;
    fn mul(self, o: IMat2) -> IMat2 {
        IMat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Integral affine map `x -> m x + t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IAffine {
    pub m: IMat2,
    pub t: Pt,
}

impl IAffine {
    pub const IDENTITY: IAffine = IAffine { m: IMat2::IDENTITY, t: Pt { x: 0, y: 0 } };

    pub fn new(m: IMat2, t: Pt) -> Self {
        IAffine { m, t }
    }

    /// The map with linear part `m` that fixes `center`.
    pub fn fixing(m: IMat2, center: Pt) -> Self {
        IAffine { m, t: center - m.apply(center) }
    }

    pub fn translation(t: Pt) -> Self {
        IAffine { m: IMat2::IDENTITY, t }
    }

    pub fn apply(&self, p: Pt) -> Pt {
        self.m.apply(p) + self.t
    }

    pub fn apply_linear(&self, v: Pt) -> Pt {
        self.m.apply(v)
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &IAffine) -> IAffine {
        IAffine { m: self.m * o.m, t: self.apply(o.t) }
    }

    pub fn inverse(&self) -> Option<IAffine> {
        let mi = self.m.inverse()?;
        Some(IAffine { m: mi, t: -mi.apply(self.t) })
    }

    pub fn is_identity(&self) -> bool {
        *self == IAffine::IDENTITY
    }

    pub fn to_affine(&self) -> AffineMap {
        AffineMap { linear: self.m.to_mat2(), translation: self.t.to_vec2() }
    }

    pub fn from_affine(a: &AffineMap) -> Option<IAffine> {
        Some(IAffine { m: IMat2::from_mat2(&a.linear)?, t: Pt::from_vec2(&a.translation)? })
    }
}

/// `q` lies on the closed segment `[a, b]`.
pub fn on_segment(a: Pt, b: Pt, q: Pt) -> bool {
    orient(a, b, q) == 0 && a.x.min(b.x) <= q.x && q.x <= a.x.max(b.x) && a.y.min(b.y) <= q.y && q.y <= a.y.max(b.y)
}

/// `q` lies on `[a, b]` and is neither endpoint.
pub fn on_segment_interior(a: Pt, b: Pt, q: Pt) -> bool {
    q != a && q != b && on_segment(a, b, q)
}

/// The open segments `(a, b)` and `(c, d)` cross at a single point interior to both.
pub fn segments_cross(a: Pt, b: Pt, c: Pt, d: Pt) -> bool {
    let d1 = orient(a, b, c).signum();
    let d2 = orient(a, b, d).signum();
    let d3 = orient(c, d, a).signum();
    let d4 = orient(c, d, b).signum();
    d1 * d2 < 0 && d3 * d4 < 0
}

/// The closed segments share a subsegment of positive length.
pub fn segments_overlap(a: Pt, b: Pt, c: Pt, d: Pt) -> bool {
    if orient(a, b, c) != 0 || orient(a, b, d) != 0 || a == b || c == d {
        return false;
    }
    let dir = b - a;
    let (s0, s1) = (0, dir.dot(dir));
    let (mut t0, mut t1) = ((c - a).dot(dir), (d - a).dot(dir));
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    t0.max(s0) < t1.min(s1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    Boundary,
}

/// Location of `q` relative to the closed polygonal curve `vs`.
///
/// Slits (boundary traversed once in each direction) contribute zero winding,
/// so a point on the far side of a slit is still reported inside.
pub fn locate(vs: &[Pt], q: Pt) -> Location {
    let n = vs.len();
    let mut winding = 0i64;
    for i in 0..n {
        let a = vs[i];
        let b = vs[(i + 1) % n];
        if on_segment(a, b, q) {
            return Location::Boundary;
        }
        if a.y <= q.y {
            if b.y > q.y && orient(a, b, q) > 0 {
                winding += 1;
            }
        } else if b.y <= q.y && orient(a, b, q) < 0 {
            winding -= 1;
        }
    }
    if winding != 0 {
        Location::Inside
    } else {
        Location::Outside
    }
}

pub fn area2(vs: &[Pt]) -> i128 {
    let n = vs.len();
    (0..n).map(|i| cross(vs[i], vs[(i + 1) % n])).sum()
}

/// Lattice length of an integral segment.
pub fn lattice_length(a: Pt, b: Pt) -> i128 {
    (b - a).gcd()
}

pub fn big(v: i128) -> BigInt {
    BigInt::from(v)
}

pub fn rat_of(v: i128) -> Rat {
    if v.is_zero() {
        rat(0)
    } else {
        Rat::from_integer(v.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixing_map_fixes_center() {
        let g = IAffine::fixing(IMat2::new(2, 1, -1, 0), pt(3, -2));
        assert_eq!(g.apply(pt(3, -2)), pt(3, -2));
        let h = g.inverse().unwrap();
        assert_eq!(h.apply(g.apply(pt(7, 11))), pt(7, 11));
    }

    #[test]
    fn crossing_and_overlap() {
        assert!(segments_cross(pt(0, 0), pt(2, 2), pt(0, 2), pt(2, 0)));
        assert!(!segments_cross(pt(0, 0), pt(2, 2), pt(1, 1), pt(2, 0)));
        assert!(segments_overlap(pt(0, 0), pt(3, 0), pt(2, 0), pt(5, 0)));
        assert!(!segments_overlap(pt(0, 0), pt(2, 0), pt(2, 0), pt(5, 0)));
    }

    #[test]
    fn locate_handles_slits() {
        // square with a slit from the middle of the bottom edge up to (2,2)
        let vs = [pt(0, 0), pt(2, 0), pt(2, 2), pt(2, 0), pt(4, 0), pt(4, 4), pt(0, 4)];
        assert_eq!(locate(&vs, pt(1, 1)), Location::Inside);
        assert_eq!(locate(&vs, pt(3, 1)), Location::Inside);
        assert_eq!(locate(&vs, pt(2, 1)), Location::Boundary);
        assert_eq!(locate(&vs, pt(5, 1)), Location::Outside);
    }

    #[test]
    fn conversions_round_trip() {
        let a = IAffine::new(IMat2::new(1, 2, 3, 7), pt(-4, 5));
        assert_eq!(IAffine::from_affine(&a.to_affine()), Some(a));
        assert_eq!(Pt::from_vec2(&pt(9, -9).to_vec2()), Some(pt(9, -9)));
    }
}
