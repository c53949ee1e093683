//! Independent oracles for integration tests. Nothing here calls the LP or the
//! curve tables of the library; classes are plain integer arrays.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use dp1kstab_core::lattice::DivClass;
use dp1kstab_core::rational::Q;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type V = [i64; 9];

pub const MINUS_K: V = [3, -1, -1, -1, -1, -1, -1, -1, -1];

pub fn dot(a: &V, b: &V) -> i64 {
    a[0] * b[0] - (1..9).map(|k| a[k] * b[k]).sum::<i64>()
}

/// All `(d; m_1..m_8)` with `x.x = -1`, `x.(-K) = 1`, found by brute force
/// over `0 <= d <= 6` and `-1 <= m_i <= d`.
pub fn exhaustive_curves() -> BTreeSet<V> {
    let mut out = BTreeSet::new();
    for d in 0..=6i64 {
        let mut m = [-1i64; 8];
        loop {
            let x: V = std::array::from_fn(|k| if k == 0 { d } else { -m[k - 1] });
            if dot(&x, &x) == -1 && dot(&x, &MINUS_K) == 1 {
                out.insert(x);
            }
            let mut k = 0;
            while k < 8 {
                m[k] += 1;
                if m[k] <= d {
                    break;
                }
                m[k] = -1;
                k += 1;
            }
            if k == 8 {
                break;
            }
        }
    }
    out
}

/// All `x` with `x.x = -2`, `x.K = 0`, by brute force over `|d| <= 3`, `|m_i| <= 2`.
pub fn exhaustive_roots() -> BTreeSet<V> {
    let mut out = BTreeSet::new();
    for d in -3..=3i64 {
        let mut m = [-2i64; 8];
        loop {
            let x: V = std::array::from_fn(|k| if k == 0 { d } else { m[k - 1] });
            if dot(&x, &x) == -2 && dot(&x, &MINUS_K) == 0 {
                out.insert(x);
            }
            let mut k = 0;
            while k < 8 {
                m[k] += 1;
                if m[k] <= 2 {
                    break;
                }
                m[k] = -2;
                k += 1;
            }
            if k == 8 {
                break;
            }
        }
    }
    out
}

fn simple_roots() -> Vec<V> {
    let mut out = Vec::new();
    for i in 1..8 {
        let mut r = [0; 9];
        r[i] = 1;
        r[i + 1] = -1;
        out.push(r);
    }
    out.push([1, -1, -1, -1, 0, 0, 0, 0, 0]);
    out
}

fn reflect(x: &V, r: &V) -> V {
    let t = dot(x, r);
    std::array::from_fn(|k| x[k] + t * r[k])
}

/// Orbit of `seed` under the group generated by the simple reflections.
pub fn weyl_orbit(seed: V) -> Vec<V> {
    let gens = simple_roots();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([seed]);
    seen.insert(seed);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        out.push(x);
        for r in &gens {
            let y = reflect(&x, r);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    out.sort();
    out
}

/// Extremal rays of the nef cone: the 17280 images of `h` and the 2160 images of `h - e1`.
pub fn nef_rays() -> &'static [V] {
    static RAYS: std::sync::OnceLock<Vec<V>> = std::sync::OnceLock::new();
    RAYS.get_or_init(|| {
        let mut rays = weyl_orbit([1, 0, 0, 0, 0, 0, 0, 0, 0]);
        rays.extend(weyl_orbit([1, -1, 0, 0, 0, 0, 0, 0, 0]));
        rays
    })
}

/// A class as an integer vector together with the common denominator.
pub fn scaled(x: &DivClass) -> (Vec<BigInt>, BigInt) {
    let (n, d) = x.integer_scaling();
    (n.to_vec(), d)
}

fn ray_dot_big(r: &V, x: &[BigInt]) -> BigInt {
    let mut acc = &x[0] * r[0];
    for k in 1..9 {
        acc -= &x[k] * r[k];
    }
    acc
}

/// `x` lies in the effective cone iff it pairs non-negatively with every nef ray.
pub fn ray_pseff(x: &DivClass) -> bool {
    let (n, _) = scaled(x);
    nef_rays().iter().all(|r| !ray_dot_big(r, &n).is_negative())
}

fn scaled_i128(x: &DivClass) -> ([i128; 9], i128) {
    let (n, d) = x.integer_scaling();
    (std::array::from_fn(|k| n[k].to_i128().expect("fits")), d.to_i128().expect("fits"))
}

fn ray_dot_i128(r: &V, x: &[i128; 9]) -> i128 {
    let mut acc = x[0] * r[0] as i128;
    for k in 1..9 {
        acc -= x[k] * r[k] as i128;
    }
    acc
}

/// `max over rays N of (-K.N)/(A.N)`.
pub fn ray_mu(a: &DivClass) -> Q {
    let (x, den) = scaled_i128(a);
    // Best fraction nk/na, compared by cross multiplication (na > 0 for ample A).
    let (mut bn, mut bd) = (0i128, 1i128);
    for r in nef_rays() {
        let nk = dot(r, &MINUS_K) as i128;
        let na = ray_dot_i128(r, &x);
        if nk * bd > bn * na {
            bn = nk;
            bd = na;
        }
    }
    BigRational::new((bn * den).into(), bd.into())
}

/// Largest `t` with `x - t*pivot` effective: min of `N.x / N.pivot` over rays with `N.pivot > 0`.
pub fn ray_max_mult(x: &DivClass, pivot: &V) -> Q {
    let (xi, den) = scaled_i128(x);
    let mut best: Option<(i128, i128)> = None;
    for r in nef_rays() {
        let np = dot(r, pivot) as i128;
        if np <= 0 {
            continue;
        }
        let nx = ray_dot_i128(r, &xi);
        if best.is_none_or(|(bn, bd)| nx * bd < bn * np) {
            best = Some((nx, np));
        }
    }
    let (bn, bd) = best.expect("some ray pairs positively");
    BigRational::new(bn.into(), (bd * den).into())
}

/// `min(1, 1/M)` with `M` the largest multiplicity along `-K` and the 240 curves.
pub fn ray_alpha_c(mu_a: &DivClass) -> Q {
    let mut m = ray_max_mult(mu_a, &MINUS_K);
    for c in cached_curves() {
        let v = ray_max_mult(mu_a, c);
        if v > m {
            m = v;
        }
    }
    if m <= Q::one() {
        Q::one()
    } else {
        m.recip()
    }
}

pub fn cached_curves() -> &'static BTreeSet<V> {
    static CURVES: std::sync::OnceLock<BTreeSet<V>> = std::sync::OnceLock::new();
    CURVES.get_or_init(exhaustive_curves)
}

/// Integer pairings `(N.(-K), N.A_int)` per ray, with `A = A_int / den`.
pub struct RayTable {
    pub nk: Vec<i128>,
    pub na: Vec<i128>,
    pub den: i128,
}

impl RayTable {
    pub fn new(a: &DivClass) -> RayTable {
        let (n, d) = scaled(a);
        let na = nef_rays().iter().map(|r| ray_dot_big(r, &n).to_i128().expect("fits")).collect();
        let nk = nef_rays().iter().map(|r| dot(r, &MINUS_K) as i128).collect();
        RayTable { nk, na, den: d.to_i128().expect("fits") }
    }

    /// Is `K + (p/q) A` effective? Exact for `|p|, q` below 2^40.
    pub fn member(&self, p: i128, q: i128) -> bool {
        // N.(K + (p/q) A) * q * den = -q*den*nk + p*na
        self.nk.iter().zip(&self.na).all(|(nk, na)| -q * self.den * nk + p * na >= 0)
    }
}

pub struct MuBracket {
    /// `K + lo*A` is not effective.
    pub lo: Q,
    /// `K + hi*A` is effective.
    pub hi: Q,
    /// The only rational in `(lo, hi]` with denominator at most the bound, if effective.
    pub candidate: Option<Q>,
}

/// Bisection on `lambda` with the ray membership test until the bracket is
/// narrower than `1/(4 max_den^2)`, then the fraction of bounded denominator inside it.
pub fn bisect_mu(a: &DivClass, max_den: i128) -> MuBracket {
    let t = RayTable::new(a);
    // Bracket (lo/scale, hi/scale].
    let mut scale: i128 = 1;
    let mut hi: i128 = 1;
    while !t.member(hi, scale) {
        hi *= 2;
    }
    let mut lo: i128 = 0;
    while (hi - lo) * 4 * max_den * max_den > scale {
        lo *= 2;
        hi *= 2;
        scale *= 2;
        let mid = (lo + hi) / 2;
        if t.member(mid, scale) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut candidate = None;
    for q in 1..=max_den {
        let p = lo * q / scale + 1;
        if p * scale <= hi * q {
            if t.member(p, q) {
                candidate = Some(BigRational::new(p.into(), q.into()));
            }
            break;
        }
    }
    MuBracket {
        lo: BigRational::new(lo.into(), scale.into()),
        hi: BigRational::new(hi.into(), scale.into()),
        candidate,
    }
}

pub fn to_v(x: &DivClass) -> V {
    x.to_ints().expect("integral class")
}

pub fn zero_q() -> Q {
    Q::zero()
}
