//! The Picard lattice of a degree-1 del Pezzo surface.
//!
//! Classes are written in the orthogonal basis `h, e1..e8` with intersection
//! form `diag(1, -1, ..., -1)`. Everything here is exact; the 240 (-1)-curve
//! classes and the 240 roots are built once and shared.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::rational::{common_denominator, fmt_q, q, qi, Q};

pub const RANK: usize = 9;

/// A rational divisor class `b*h + sum b_i e_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivClass([Q; RANK]);

impl DivClass {
    pub fn new(coeffs: [Q; RANK]) -> Self {
        DivClass(coeffs)
    }

    pub fn from_ints(c: [i64; RANK]) -> Self {
        DivClass(c.map(qi))
    }

    pub fn zero() -> Self {
        DivClass::from_ints([0; RANK])
    }

    pub fn h() -> Self {
        Self::basis(0)
    }

    /// The exceptional class `e_i`, `i` in `1..=8`.
    pub fn e(i: usize) -> Self {
        assert!((1..=8).contains(&i), "exceptional index {i} out of range");
        Self::basis(i)
    }

    fn basis(k: usize) -> Self {
        let mut c = [0i64; RANK];
        c[k] = 1;
        DivClass::from_ints(c)
    }

    pub fn coeffs(&self) -> &[Q; RANK] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    /// Integer coefficients, if the class is integral and fits in `i64`.
    pub fn to_ints(&self) -> Option<[i64; RANK]> {
        let mut out = [0i64; RANK];
        for (o, c) in out.iter_mut().zip(&self.0) {
            if !c.is_integer() {
                return None;
            }
            *o = c.numer().to_i64()?;
        }
        Some(out)
    }

    /// Write the class as `numerators / denominator` with a positive common denominator.
    pub fn integer_scaling(&self) -> ([BigInt; RANK], BigInt) {
        let den = common_denominator(self.0.iter());
        let nums = std::array::from_fn(|k| {
            let c = &self.0[k];
            c.numer() * (&den / c.denom())
        });
        (nums, den)
    }

    pub fn scale(&self, t: &Q) -> DivClass {
        DivClass(std::array::from_fn(|k| &self.0[k] * t))
    }

    /// The intersection number with another class.
    pub fn dot(&self, other: &DivClass) -> Q {
        intersect(self, other)
    }

    /// Pairing with an integral class, cheaper than [`DivClass::dot`].
    pub fn dot_ints(&self, other: &[i64; RANK]) -> Q {
        let mut acc = &self.0[0] * qi(other[0]);
        for k in 1..RANK {
            if other[k] != 0 {
                acc -= &self.0[k] * qi(other[k]);
            }
        }
        acc
    }

    /// Comma separated coefficient list, the input format of the CLI.
    pub fn to_csv_string(&self) -> String {
        self.0.iter().map(fmt_q).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for DivClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_csv_string())
    }
}

impl Serialize for DivClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(fmt_q))
    }
}

impl<'a> Add<&'a DivClass> for &'a DivClass {
    type Output = DivClass;
    fn add(self, rhs: &DivClass) -> DivClass {
        DivClass(std::array::from_fn(|k| &self.0[k] + &rhs.0[k]))
    }
}

impl Add for DivClass {
    type Output = DivClass;
    fn add(self, rhs: DivClass) -> DivClass {
        &self + &rhs
    }
}

impl<'a> Sub<&'a DivClass> for &'a DivClass {
    type Output = DivClass;
    fn sub(self, rhs: &DivClass) -> DivClass {
        DivClass(std::array::from_fn(|k| &self.0[k] - &rhs.0[k]))
    }
}

impl Sub for DivClass {
    type Output = DivClass;
    fn sub(self, rhs: DivClass) -> DivClass {
        &self - &rhs
    }
}

impl Neg for &DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        DivClass(std::array::from_fn(|k| -&self.0[k]))
    }
}

impl Neg for DivClass {
    type Output = DivClass;
    fn neg(self) -> DivClass {
        -&self
    }
}

impl Mul<&DivClass> for &Q {
    type Output = DivClass;
    fn mul(self, rhs: &DivClass) -> DivClass {
        rhs.scale(self)
    }
}

/// `a.b = b0*b0' - sum bi*bi'`.
pub fn intersect(a: &DivClass, b: &DivClass) -> Q {
    let mut acc = &a.0[0] * &b.0[0];
    for k in 1..RANK {
        acc -= &a.0[k] * &b.0[k];
    }
    acc
}

pub fn intersect_ints(a: &[i64; RANK], b: &[i64; RANK]) -> i64 {
    a[0] * b[0] - (1..RANK).map(|k| a[k] * b[k]).sum::<i64>()
}

pub const CANONICAL_INTS: [i64; RANK] = [-3, 1, 1, 1, 1, 1, 1, 1, 1];
pub const ANTICANONICAL_INTS: [i64; RANK] = [3, -1, -1, -1, -1, -1, -1, -1, -1];

/// `K = -3h + sum e_i`.
pub fn canonical_class() -> DivClass {
    DivClass::from_ints(CANONICAL_INTS)
}

pub fn anticanonical_class() -> DivClass {
    DivClass::from_ints(ANTICANONICAL_INTS)
}

/// The seven families of (-1)-curve classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CurveKind {
    /// `e_i`
    Exceptional,
    /// `h - e_i - e_j`
    Line,
    /// `2h - e_i - e_j - e_k - e_l - e_m`
    Conic5,
    /// `-K + e_i - e_j`
    KPlus,
    /// `-2K - (2h - e_i - e_j - e_k - e_l - e_m)`
    TwoKConic,
    /// `-2K - (h - e_i - e_j)`
    TwoKLine,
    /// `-2K - e_i`
    TwoKExc,
}

impl CurveKind {
    pub const ALL: [CurveKind; 7] = [
        CurveKind::Exceptional,
        CurveKind::Line,
        CurveKind::Conic5,
        CurveKind::KPlus,
        CurveKind::TwoKConic,
        CurveKind::TwoKLine,
        CurveKind::TwoKExc,
    ];
}

/// A (-1)-curve class together with the family it was built from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveClass {
    pub cls: DivClass,
    pub ints: [i64; RANK],
    pub kind: CurveKind,
    /// 1-based exceptional indices. Ordered pair `(i, j)` for [`CurveKind::KPlus`].
    pub indices: Vec<u8>,
}

impl CurveClass {
    /// Rebuild a curve class from its family and indices.
    pub fn from_kind(kind: CurveKind, indices: &[u8]) -> CurveClass {
        let ints = family_ints(kind, indices);
        CurveClass {
            cls: DivClass::from_ints(ints),
            ints,
            kind,
            indices: indices.to_vec(),
        }
    }

    /// Short human-readable label, e.g. `e1`, `h-e1-e2`, `-K+e1-e2`.
    pub fn label(&self) -> String {
        let idx = |v: &[u8]| v.iter().map(|i| format!("-e{i}")).collect::<String>();
        match self.kind {
            CurveKind::Exceptional => format!("e{}", self.indices[0]),
            CurveKind::Line => format!("h{}", idx(&self.indices)),
            CurveKind::Conic5 => format!("2h{}", idx(&self.indices)),
            CurveKind::KPlus => format!("-K+e{}-e{}", self.indices[0], self.indices[1]),
            CurveKind::TwoKConic => format!("-2K-(2h{})", idx(&self.indices)),
            CurveKind::TwoKLine => format!("-2K-(h{})", idx(&self.indices)),
            CurveKind::TwoKExc => format!("-2K-e{}", self.indices[0]),
        }
    }
}

fn family_ints(kind: CurveKind, idx: &[u8]) -> [i64; RANK] {
    let mut c = [0i64; RANK];
    let minus_k = ANTICANONICAL_INTS;
    let sub_e = |c: &mut [i64; RANK], is: &[u8]| {
        for &i in is {
            c[i as usize] -= 1;
        }
    };
    match kind {
        CurveKind::Exceptional => c[idx[0] as usize] = 1,
        CurveKind::Line => {
            c[0] = 1;
            sub_e(&mut c, idx);
        }
        CurveKind::Conic5 => {
            c[0] = 2;
            sub_e(&mut c, idx);
        }
        CurveKind::KPlus => {
            c = minus_k;
            c[idx[0] as usize] += 1;
            c[idx[1] as usize] -= 1;
        }
        CurveKind::TwoKConic | CurveKind::TwoKLine | CurveKind::TwoKExc => {
            let inner = match kind {
                CurveKind::TwoKConic => family_ints(CurveKind::Conic5, idx),
                CurveKind::TwoKLine => family_ints(CurveKind::Line, idx),
                _ => family_ints(CurveKind::Exceptional, idx),
            };
            for k in 0..RANK {
                c[k] = 2 * minus_k[k] - inner[k];
            }
        }
    }
    c
}

fn subsets(n: u8, k: usize) -> Vec<Vec<u8>> {
    fn go(start: u8, n: u8, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

fn build_curves() -> Vec<CurveClass> {
    let mut out = Vec::with_capacity(240);
    for kind in CurveKind::ALL {
        let index_sets: Vec<Vec<u8>> = match kind {
            CurveKind::Exceptional | CurveKind::TwoKExc => subsets(8, 1),
            CurveKind::Line | CurveKind::TwoKLine => subsets(8, 2),
            CurveKind::Conic5 | CurveKind::TwoKConic => subsets(8, 5),
            CurveKind::KPlus => (1..=8u8)
                .flat_map(|i| (1..=8u8).filter(move |&j| j != i).map(move |j| vec![i, j]))
                .collect(),
        };
        out.extend(index_sets.iter().map(|ix| CurveClass::from_kind(kind, ix)));
    }
    out
}

struct CurveTable {
    curves: Vec<CurveClass>,
    index: HashMap<[i64; RANK], usize>,
}

fn curve_table() -> &'static CurveTable {
    static TABLE: OnceLock<CurveTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let curves = build_curves();
        let index = curves.iter().enumerate().map(|(k, c)| (c.ints, k)).collect();
        CurveTable { curves, index }
    })
}

/// All 240 (-1)-curve classes, ordered by family and then by indices.
pub fn enumerate_curves() -> &'static [CurveClass] {
    &curve_table().curves
}

/// Position of a class in [`enumerate_curves`], if it is a (-1)-curve class.
pub fn curve_index(x: &DivClass) -> Option<usize> {
    curve_index_ints(&x.to_ints()?)
}

pub fn curve_index_ints(x: &[i64; RANK]) -> Option<usize> {
    curve_table().index.get(x).copied()
}

/// The 240 curve classes as plain [`DivClass`] values, same order.
pub fn curve_classes() -> &'static [DivClass] {
    static CLASSES: OnceLock<Vec<DivClass>> = OnceLock::new();
    CLASSES.get_or_init(|| enumerate_curves().iter().map(|c| c.cls.clone()).collect())
}

/// The 2160 conic classes (`B.B = 0`, `B.K = -2`), each written as the sum
/// of two (-1)-curves meeting once. Sorted lexicographically.
pub fn enumerate_conics() -> &'static [DivClass] {
    static CONICS: OnceLock<Vec<DivClass>> = OnceLock::new();
    CONICS.get_or_init(|| {
        let curves = enumerate_curves();
        let mut set = std::collections::BTreeSet::new();
        for (i, c) in curves.iter().enumerate() {
            for d in &curves[i + 1..] {
                if intersect_ints(&c.ints, &d.ints) == 1 {
                    set.insert(std::array::from_fn::<i64, RANK, _>(|k| c.ints[k] + d.ints[k]));
                }
            }
        }
        set.into_iter().map(DivClass::from_ints).collect()
    })
}

/// Solve `target = sum x_k basis[k]` exactly. `None` when the target is
/// outside the span or the basis is linearly dependent.
pub fn solve_in_span(target: &DivClass, basis: &[DivClass]) -> Option<Vec<Q>> {
    let n = basis.len();
    // Augmented RANK x (n+1) system, columns are the basis vectors.
    let mut m: Vec<Vec<Q>> = (0..RANK)
        .map(|r| {
            let mut row: Vec<Q> = basis.iter().map(|b| b.coeffs()[r].clone()).collect();
            row.push(target.coeffs()[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(n);
    for col in 0..n {
        let p = (pivot_row..RANK).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot_row, p);
        let inv = Q::from_integer(1.into()) / &m[pivot_row][col];
        for c in col..=n {
            m[pivot_row][c] = &m[pivot_row][c] * &inv;
        }
        for r in 0..RANK {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let v = &f * &m[pivot_row][c];
                    m[r][c] -= v;
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if (pivot_row..RANK).any(|r| !m[r][n].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&r| m[r][n].clone()).collect())
}

/// Integral, `x.x = -1` and `x.K = -1`.
pub fn is_minus_one_class(x: &DivClass) -> bool {
    match x.to_ints() {
        Some(c) => intersect_ints(&c, &c) == -1 && intersect_ints(&c, &CANONICAL_INTS) == -1,
        None => false,
    }
}

/// An E8 root: integral, `r.r = -2`, `r.K = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    pub cls: DivClass,
    pub ints: [i64; RANK],
}

impl Root {
    pub fn new(cls: DivClass) -> Option<Root> {
        let ints = cls.to_ints()?;
        (intersect_ints(&ints, &ints) == -2 && intersect_ints(&ints, &CANONICAL_INTS) == 0)
            .then_some(Root { cls, ints })
    }

    fn from_ints(ints: [i64; RANK]) -> Root {
        Root {
            cls: DivClass::from_ints(ints),
            ints,
        }
    }
}

fn build_roots() -> Vec<Root> {
    let mut pos: Vec<[i64; RANK]> = Vec::new();
    for i in 1..=8 {
        for j in 1..=8 {
            if i < j {
                let mut c = [0; RANK];
                c[i] = 1;
                c[j] = -1;
                pos.push(c);
            }
        }
    }
    for s in subsets(8, 3) {
        let mut c = [0; RANK];
        c[0] = 1;
        s.iter().for_each(|&i| c[i as usize] = -1);
        pos.push(c);
    }
    for s in subsets(8, 6) {
        let mut c = [0; RANK];
        c[0] = 2;
        s.iter().for_each(|&i| c[i as usize] = -1);
        pos.push(c);
    }
    for i in 1..=8 {
        let mut c = [-1; RANK];
        c[0] = 3;
        c[i] = -2;
        pos.push(c);
    }
    let neg: Vec<[i64; RANK]> = pos.iter().map(|c| c.map(|x| -x)).collect();
    pos.into_iter().chain(neg).map(Root::from_ints).collect()
}

/// The 240 roots of the E8 lattice `K^perp`.
pub fn enumerate_roots() -> &'static [Root] {
    static ROOTS: OnceLock<Vec<Root>> = OnceLock::new();
    ROOTS.get_or_init(build_roots)
}

/// Simple roots `e1-e2, ..., e7-e8, h-e1-e2-e3`.
pub fn simple_roots() -> Vec<Root> {
    let mut out: Vec<Root> = (1..8)
        .map(|i| {
            let mut c = [0; RANK];
            c[i] = 1;
            c[i + 1] = -1;
            Root::from_ints(c)
        })
        .collect();
    out.push(Root::from_ints([1, -1, -1, -1, 0, 0, 0, 0, 0]));
    out
}

/// Reflection in a root: `x + (x.r) r`.
pub fn reflect(x: &DivClass, r: &Root) -> DivClass {
    let t = x.dot_ints(&r.ints);
    if t.is_zero() {
        return x.clone();
    }
    x + &r.cls.scale(&t)
}

pub fn reflect_ints(x: &[i64; RANK], r: &Root) -> [i64; RANK] {
    let t = intersect_ints(x, &r.ints);
    std::array::from_fn(|k| x[k] + t * r.ints[k])
}

/// Apply a word of reflections, leftmost first.
pub fn apply_word(x: &DivClass, word: &[Root]) -> DivClass {
    word.iter().fold(x.clone(), |acc, r| reflect(&acc, r))
}

/// Named classes used by the multiplicity arguments.
pub mod named {
    use super::*;

    /// `l_i = h - e1 - e_i`.
    pub fn l(i: usize) -> DivClass {
        &(&DivClass::h() - &DivClass::e(1)) - &DivClass::e(i)
    }

    /// `Q = 2h - e1 - e5 - e6 - e7 - e8`.
    pub fn conic_q() -> DivClass {
        DivClass::from_ints([2, -1, 0, 0, 0, -1, -1, -1, -1])
    }

    /// `C_i = 3h - 2e1 - sum_{j>=2} e_j + e_i`.
    pub fn cubic(i: usize) -> DivClass {
        let mut c = [3, -2, -1, -1, -1, -1, -1, -1, -1];
        c[i] += 1;
        DivClass::from_ints(c)
    }

    /// `Z = 6h - 3e1 - 2 sum_{j>=2} e_j`.
    pub fn z_curve() -> DivClass {
        DivClass::from_ints([6, -3, -2, -2, -2, -2, -2, -2, -2])
    }

    /// `-K + sum a_i e_i`, the normal form of a birational polarization.
    pub fn anticanonical_plus(a: &[Q]) -> DivClass {
        let mut c = anticanonical_class();
        for (i, ai) in a.iter().enumerate() {
            c = &c + &DivClass::e(i + 1).scale(ai);
        }
        c
    }

    /// Convenience for tests and examples: `-K + (n/d) e_i`.
    pub fn anticanonical_plus_e(i: usize, n: i64, d: i64) -> DivClass {
        &anticanonical_class() + &DivClass::e(i).scale(&q(n, d))
    }
}
