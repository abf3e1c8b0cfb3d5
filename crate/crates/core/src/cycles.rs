//! Cusp cycles: charge, duality, monodromy and the `SL_2(Z)` conjugacy word.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactgeom::{mat_product, Mat2};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("a cycle needs at least one entry")]
    Empty,
    #[error("cannot parse cycle {0:?}")]
    Parse(String),
    #[error("cycle {0} is not negative-definite")]
    NotNegativeDefinite(Cycle),
    #[error("matrix {0} is not hyperbolic (trace must exceed 2)")]
    NotHyperbolic(String),
    #[error("index {index} out of range for a cycle of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("cannot smooth the node of a cycle with a single component")]
    SingleComponentSmoothing,
}

/// Cyclically ordered self-intersection data `d_1, ..., d_n` with `d_i = -D_i^2`
/// (or `2 - D_1^2` when `n = 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Cycle(Vec<i64>);

impl Cycle {
    pub fn new(entries: Vec<i64>) -> Result<Cycle, CycleError> {
        if entries.is_empty() {
            Err(CycleError::Empty)
        } else {
            Ok(Cycle(entries))
        }
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rotated(&self, k: usize) -> Cycle {
        let mut v = self.0.clone();
        v.rotate_left(k % self.len());
        Cycle(v)
    }

    pub fn reversed(&self) -> Cycle {
        Cycle(self.0.iter().rev().copied().collect())
    }
}

impl TryFrom<Vec<i64>> for Cycle {
    type Error = CycleError;
    fn try_from(v: Vec<i64>) -> Result<Self, Self::Error> {
        Cycle::new(v)
    }
}

impl From<Cycle> for Vec<i64> {
    fn from(c: Cycle) -> Vec<i64> {
        c.0
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Cycle {
    type Err = CycleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let entries = s
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CycleError::Parse(s.to_string()))?;
        Cycle::new(entries)
    }
}

pub fn charge(c: &Cycle) -> i64 {
    12 + c.0.iter().map(|d| d - 3).sum::<i64>()
}

pub fn is_negative_definite(c: &Cycle) -> bool {
    c.0.iter().all(|&d| d >= 2) && c.0.iter().any(|&d| d >= 3)
}

/// Blocks `(a_i, b_i)` of `(a_1, 2^{b_1}, ..., a_k, 2^{b_k})`, starting at the first entry `>= 3`.
fn blocks(c: &Cycle) -> Vec<(i64, usize)> {
    let start = c.0.iter().position(|&d| d >= 3).expect("caller checked definiteness");
    let r = c.rotated(start);
    let mut out: Vec<(i64, usize)> = Vec::new();
    for &d in r.entries() {
        if d == 2 {
            out.last_mut().expect("rotation starts at a block head").1 += 1;
        } else {
            out.push((d, 0));
        }
    }
    out
}

/// The dual cusp cycle.
///
/// The run of 2s after the block head `a_{i+1}` has length `a_{i+1} - 3`
/// and follows the head `b_i + 3`, so that the result satisfies the
/// conjugacy identity with the monodromy of `c` in the orientation used by
/// [`monodromy`].
pub fn dual_cycle(c: &Cycle) -> Result<Cycle, CycleError> {
    if !is_negative_definite(c) {
        return Err(CycleError::NotNegativeDefinite(c.clone()));
    }
    let bl = blocks(c);
    let k = bl.len();
    let mut out = Vec::new();
    for i in 0..k {
        out.push(bl[i].1 as i64 + 3);
        let twos = bl[(i + 1) % k].0 - 3;
        out.extend(std::iter::repeat_n(2, twos as usize));
    }
    Ok(Cycle(out))
}

pub fn edge_matrix(d: i64) -> Mat2 {
    Mat2::from_i64(0, 1, -1, d)
}

/// `prod [[0,1],[-1,d_i]]`, left to right.
pub fn monodromy(c: &Cycle) -> Mat2 {
    let ms: Vec<Mat2> = c.0.iter().map(|&d| edge_matrix(d)).collect();
    mat_product(&ms)
}

/// `prod [[0,-1],[1,d_i]]`, left to right: the monodromy of the pseudo-fan
/// read from the opposite side.
pub fn dual_side_monodromy(c: &Cycle) -> Mat2 {
    let ms: Vec<Mat2> = c.0.iter().map(|&d| Mat2::from_i64(0, -1, 1, d)).collect();
    mat_product(&ms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    R,
    L,
}

impl Letter {
    pub fn matrix(self) -> Mat2 {
        match self {
            Letter::R => Mat2::from_i64(1, 1, 0, 1),
            Letter::L => Mat2::from_i64(1, 0, 1, 1),
        }
    }
}

/// A word in `R = [[1,1],[0,1]]` and `L = [[1,0],[1,1]]` read cyclically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        CyclicWord(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn matrix(&self) -> Mat2 {
        let ms: Vec<Mat2> = self.0.iter().map(|l| l.matrix()).collect();
        mat_product(&ms)
    }

    /// Least rotation, with `R < L`.
    pub fn canonical(&self) -> CyclicWord {
        let n = self.0.len();
        let best = (0..n)
            .map(|k| {
                let mut v = self.0.clone();
                v.rotate_left(k);
                v
            })
            .min()
            .unwrap_or_default();
        CyclicWord(best)
    }

    pub fn cyclic_eq(&self, other: &CyclicWord) -> bool {
        self.0.len() == other.0.len() && self.canonical() == other.canonical()
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            f.write_str(match l {
                Letter::R => "R",
                Letter::L => "L",
            })?;
        }
        Ok(())
    }
}

impl FromStr for CyclicWord {
    type Err = CycleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|ch| match ch {
                'R' => Ok(Letter::R),
                'L' => Ok(Letter::L),
                _ => Err(CycleError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(CyclicWord)
    }
}

/// Conjugacy invariant of a hyperbolic matrix with positive trace, returned
/// in canonical rotation.
///
/// The attracting fixed point of `m` acting by Möbius transformations is a
/// quadratic irrational whose continued fraction is eventually periodic.
/// The period, read as alternating exponents of `R` and `L`, spells a word
/// conjugate to a root of `m`; the starting letter depends on the parity of
/// the preperiod because an odd preperiod corresponds to a conjugation of
/// determinant `-1`, which swaps `R` and `L`.
pub fn sl2z_word(m: &Mat2) -> Result<CyclicWord, CycleError> {
    let t = m.trace();
    if t <= BigInt::from(2) || !m.det().is_one() {
        return Err(CycleError::NotHyperbolic(m.to_string()));
    }
    let disc: BigInt = &t * &t - 4;
    let s = disc.sqrt();
    // alpha = (p + sqrt(disc)) / q
    let mut p = &m.a - &m.d;
    let mut q = BigInt::from(2) * &m.c;
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut quotients: Vec<BigInt> = Vec::new();
    while !seen.contains_key(&(p.clone(), q.clone())) {
        seen.insert((p.clone(), q.clone()), quotients.len());
        let num: BigInt = &p + &s;
        let a: BigInt = if q.is_positive() {
            num.div_floor(&q)
        } else {
            let mq: BigInt = -&q;
            -(num.div_floor(&mq) + BigInt::one())
        };
        let p_next = &a * &q - &p;
        let q_next = (&disc - &p_next * &p_next) / &q;
        quotients.push(a);
        p = p_next;
        q = q_next;
    }
    let start = seen[&(p, q)];
    let mut period: Vec<BigInt> = quotients[start..].to_vec();
    if period.len() % 2 == 1 {
        period.extend(period.clone());
    }
    let (first, second) = if start.is_multiple_of(2) { (Letter::R, Letter::L) } else { (Letter::L, Letter::R) };
    let mut root = Vec::new();
    for (i, e) in period.iter().enumerate() {
        let letter = if i % 2 == 0 { first } else { second };
        let n: usize = e.try_into().expect("partial quotients of a reduced period are small and positive");
        root.extend(std::iter::repeat_n(letter, n));
    }
    let root_m = CyclicWord(root.clone()).matrix();
    let mut letters = root.clone();
    let mut acc = root_m.clone();
    while acc.trace() < t {
        acc = &acc * &root_m;
        letters.extend(root.iter().copied());
    }
    debug_assert_eq!(acc.trace(), t);
    Ok(CyclicWord(letters).canonical())
}

/// Factor a matrix with nonnegative entries and determinant one into `R` and `L`.
pub fn factor_nonnegative(m: &Mat2) -> Option<CyclicWord> {
    if !m.det().is_one() || [&m.a, &m.b, &m.c, &m.d].iter().any(|e| e.is_negative()) {
        return None;
    }
    let mut cur = m.clone();
    let mut letters = Vec::new();
    while !cur.is_identity() {
        if cur.a >= cur.c && cur.b >= cur.d {
            cur = Mat2::new(&cur.a - &cur.c, &cur.b - &cur.d, cur.c.clone(), cur.d.clone());
            letters.push(Letter::R);
        } else if cur.c >= cur.a && cur.d >= cur.b {
            cur = Mat2::new(cur.a.clone(), cur.b.clone(), &cur.c - &cur.a, &cur.d - &cur.b);
            letters.push(Letter::L);
        } else {
            return None;
        }
    }
    Some(CyclicWord(letters))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum SurgeryOnCycle {
    /// Blow up a general point of `D_i`.
    InternalBlowup(usize),
    /// Blow up the node `D_i ∩ D_{i+1}`.
    CornerBlowup(usize),
    /// Smooth the node `D_i ∩ D_{i+1}`.
    NodeSmoothing(usize),
}

pub fn apply_surgery(c: &Cycle, s: &SurgeryOnCycle) -> Result<Cycle, CycleError> {
    let n = c.len();
    let i = match *s {
        SurgeryOnCycle::InternalBlowup(i) | SurgeryOnCycle::CornerBlowup(i) | SurgeryOnCycle::NodeSmoothing(i) => i,
    };
    if i >= n {
        return Err(CycleError::IndexOutOfRange { index: i, len: n });
    }
    let mut d = c.0.clone();
    match *s {
        SurgeryOnCycle::InternalBlowup(_) => d[i] += 1,
        SurgeryOnCycle::CornerBlowup(_) => {
            if n == 1 {
                // both branches of the node lie on D_1
                d[0] += 2;
                d.push(1);
            } else {
                let j = (i + 1) % n;
                d[i] += 1;
                d[j] += 1;
                d.insert(i + 1, 1);
            }
        }
        SurgeryOnCycle::NodeSmoothing(_) => {
            if n == 1 {
                return Err(CycleError::SingleComponentSmoothing);
            }
            let j = (i + 1) % n;
            let merged = d[i] + d[j] - 2;
            d[i] = merged;
            d.remove(j);
        }
    }
    Ok(Cycle(d))
}

/// Equality up to rotation and reversal.
pub fn cycles_equal(a: &Cycle, b: &Cycle) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    let rb = b.reversed();
    (0..n).any(|k| a.rotated(k) == *b || a.rotated(k) == rb)
}

/// Equality up to rotation only.
pub fn cycles_equal_oriented(a: &Cycle, b: &Cycle) -> bool {
    a.len() == b.len() && (0..a.len()).any(|k| a.rotated(k) == *b)
}
