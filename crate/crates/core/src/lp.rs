//! Exact linear programming over cones in the Picard lattice.
//!
//! Every program has the same shape: nine equality rows (one per lattice
//! coordinate), one nonnegative column per cone generator and optionally a
//! nonnegative scalar column along a direction,
//!
//! ```text
//!     target = lambda * direction + sum_g c_g * g,    lambda, c_g >= 0.
//! ```
//!
//! The solver is a two-phase revised simplex over arbitrary-precision
//! rationals with Bland's rule, so it terminates without perturbation and
//! gives the same answer for the same column order. Columns are scaled to
//! integers up front; pricing runs in `i128` when the dual vector fits and
//! falls back to big integers otherwise.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::lattice::{DivClass, RANK};
use crate::rational::{common_denominator, Q};

const ART_BASE: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Objective {
    Feasibility,
    /// Maximize `lambda` in `target = lambda * direction + sum c_g g`.
    MaximizeScalar { direction: DivClass },
    /// Maximize the coefficient of one generator.
    MaximizeCoefficient { generator_index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeProgram {
    pub generators: Vec<DivClass>,
    pub target: DivClass,
    pub objective: Objective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// `target = scalar * direction + sum coefficients[g] * generators[g]`.
    Combination { scalar: Option<Q>, coefficients: Vec<Q> },
    /// A class `f` with `f.g >= 0` for every column and `f.target < 0`.
    Separation(DivClass),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Objective value at the optimum (zero for feasibility programs).
    pub value: Option<Q>,
    pub certificate: Option<Certificate>,
    /// Optimal dual as a class `y`: `y.g >= cost_g` for every column and
    /// `y.target = value`.
    pub dual: Option<DivClass>,
    pub iterations: usize,
}

impl LpOutcome {
    pub fn coefficients(&self) -> Option<&[Q]> {
        match &self.certificate {
            Some(Certificate::Combination { coefficients, .. }) => Some(coefficients),
            _ => None,
        }
    }

    pub fn scalar(&self) -> Option<&Q> {
        match &self.certificate {
            Some(Certificate::Combination { scalar, .. }) => scalar.as_ref(),
            _ => None,
        }
    }

    pub fn separation(&self) -> Option<&DivClass> {
        match &self.certificate {
            Some(Certificate::Separation(f)) => Some(f),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("cone program has no generators")]
    NoGenerators,
    #[error("generator index {0} out of range")]
    BadGeneratorIndex(usize),
    #[error("target is not in the cone")]
    NotInCone { separation: Box<DivClass> },
    #[error("objective is unbounded")]
    Unbounded,
}

/// A column scaled to integers: the original column is `ints / scale`.
#[derive(Clone, Debug)]
struct Column {
    ints: [BigInt; RANK],
    small: Option<[i64; RANK]>,
    scale: BigInt,
}

impl Column {
    fn new(v: &DivClass, row_sign: &[i8; RANK]) -> Column {
        let (mut ints, scale) = v.integer_scaling();
        for (x, s) in ints.iter_mut().zip(row_sign) {
            if *s < 0 {
                *x = -&*x;
            }
        }
        let small = ints
            .iter()
            .map(|x| x.to_i64())
            .collect::<Option<Vec<_>>>()
            .map(|v| std::array::from_fn(|k| v[k]));
        Column { ints, small, scale }
    }
}

/// Dual vector `y = Y / den` with `den > 0`.
enum DualInts {
    Small([i128; RANK], i128),
    Big([BigInt; RANK], BigInt),
}

impl DualInts {
    fn from_q(y: &[Q; RANK]) -> DualInts {
        let den = common_denominator(y.iter());
        let nums: [BigInt; RANK] = std::array::from_fn(|k| y[k].numer() * (&den / y[k].denom()));
        let small = nums.iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>();
        match (small, den.to_i128()) {
            (Some(v), Some(d)) if v.iter().all(|x| x.abs() < (1i128 << 100)) && d < (1i128 << 100) => {
                DualInts::Small(std::array::from_fn(|k| v[k]), d)
            }
            _ => DualInts::Big(nums, den),
        }
    }

    /// Sign of `cost * den - Y.a`, i.e. of the reduced cost `cost - y.a`.
    fn reduced_cost_sign(&self, col: &Column, cost: &BigInt) -> i32 {
        if let (DualInts::Small(y, den), Some(a)) = (self, &col.small) {
            if let Some(c) = cost.to_i128() {
                let mut acc: Option<i128> = c.checked_mul(*den);
                for k in 0..RANK {
                    acc = acc.and_then(|s| y[k].checked_mul(a[k] as i128).and_then(|p| s.checked_sub(p)));
                }
                if let Some(v) = acc {
                    return v.signum() as i32;
                }
            }
        }
        let (y, den) = match self {
            DualInts::Small(y, d) => (y.map(BigInt::from), BigInt::from(*d)),
            DualInts::Big(y, d) => (y.clone(), d.clone()),
        };
        let mut acc = cost * den;
        for k in 0..RANK {
            acc -= &y[k] * &col.ints[k];
        }
        match acc.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }
}

fn mul_big(x: &Q, k: &BigInt) -> Q {
    if k.is_zero() || x.is_zero() {
        return Q::zero();
    }
    if k.is_one() {
        return x.clone();
    }
    BigRational::new(x.numer() * k, x.denom().clone())
}

#[derive(Clone)]
struct Tableau {
    row_sign: [i8; RANK],
    cols: Vec<Column>,
    binv: [[Q; RANK]; RANK],
    basis: [usize; RANK],
    xb: [Q; RANK],
    iterations: usize,
}

enum Phase2 {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(columns: &[DivClass], target: &DivClass) -> Tableau {
        let row_sign: [i8; RANK] = std::array::from_fn(|k| if target.coeffs()[k].is_negative() { -1 } else { 1 });
        let cols = columns.iter().map(|c| Column::new(c, &row_sign)).collect();
        let binv = std::array::from_fn(|i| std::array::from_fn(|k| if i == k { Q::one() } else { Q::zero() }));
        Tableau {
            row_sign,
            cols,
            binv,
            basis: std::array::from_fn(|i| ART_BASE + i),
            xb: std::array::from_fn(|k| target.coeffs()[k].abs()),
            iterations: 0,
        }
    }

    fn push_column(&mut self, v: &DivClass) -> usize {
        self.cols.push(Column::new(v, &self.row_sign));
        self.cols.len() - 1
    }

    fn is_art(j: usize) -> bool {
        j >= ART_BASE
    }

    fn cost_of(costs: &[(usize, BigInt)], j: usize, phase1: bool) -> BigInt {
        if phase1 {
            return if Self::is_art(j) { BigInt::from(-1) } else { BigInt::zero() };
        }
        costs.iter().find(|(k, _)| *k == j).map(|(_, c)| c.clone()).unwrap_or_default()
    }

    fn dual(&self, costs: &[(usize, BigInt)], phase1: bool) -> [Q; RANK] {
        let mut y: [Q; RANK] = std::array::from_fn(|_| Q::zero());
        for i in 0..RANK {
            let c = Self::cost_of(costs, self.basis[i], phase1);
            if c.is_zero() {
                continue;
            }
            for k in 0..RANK {
                y[k] += mul_big(&self.binv[i][k], &c);
            }
        }
        y
    }

    fn column_image(&self, j: usize) -> [Q; RANK] {
        if Self::is_art(j) {
            let k = j - ART_BASE;
            return std::array::from_fn(|i| self.binv[i][k].clone());
        }
        let col = &self.cols[j];
        std::array::from_fn(|i| {
            let mut acc = Q::zero();
            for k in 0..RANK {
                if !col.ints[k].is_zero() && !self.binv[i][k].is_zero() {
                    acc += mul_big(&self.binv[i][k], &col.ints[k]);
                }
            }
            acc
        })
    }

    fn pivot(&mut self, r: usize, j: usize, u: &[Q; RANK]) {
        let p = u[r].clone();
        for k in 0..RANK {
            if !self.binv[r][k].is_zero() {
                self.binv[r][k] = &self.binv[r][k] / &p;
            }
        }
        self.xb[r] = &self.xb[r] / &p;
        let row_r = self.binv[r].clone();
        let x_r = self.xb[r].clone();
        for i in 0..RANK {
            if i == r || u[i].is_zero() {
                continue;
            }
            for k in 0..RANK {
                if !row_r[k].is_zero() {
                    self.binv[i][k] -= &u[i] * &row_r[k];
                }
            }
            if !x_r.is_zero() {
                self.xb[i] -= &u[i] * &x_r;
            }
        }
        self.basis[r] = j;
        self.iterations += 1;
    }

    /// Bland: lowest-index improving column.
    fn entering(&self, costs: &[(usize, BigInt)], phase1: bool, allowed: &dyn Fn(usize) -> bool) -> Option<usize> {
        let y = DualInts::from_q(&self.dual(costs, phase1));
        (0..self.cols.len()).find(|&j| {
            allowed(j)
                && !self.basis.contains(&j)
                && y.reduced_cost_sign(&self.cols[j], &Self::cost_of(costs, j, phase1)) > 0
        })
    }

    /// Bland ratio test: minimum ratio, ties to the lowest basic index.
    fn leaving(&self, u: &[Q; RANK]) -> Option<usize> {
        let mut best: Option<(Q, usize)> = None;
        for i in 0..RANK {
            if !u[i].is_positive() {
                continue;
            }
            let ratio = &self.xb[i] / &u[i];
            let better = match &best {
                None => true,
                Some((b, r)) => ratio < *b || (ratio == *b && self.basis[i] < self.basis[*r]),
            };
            if better {
                best = Some((ratio, i));
            }
        }
        best.map(|(_, i)| i)
    }

    fn run(&mut self, costs: &[(usize, BigInt)], phase1: bool, allowed: &dyn Fn(usize) -> bool) -> Phase2 {
        loop {
            let Some(j) = self.entering(costs, phase1, allowed) else {
                return Phase2::Optimal;
            };
            let u = self.column_image(j);
            let Some(r) = self.leaving(&u) else {
                return Phase2::Unbounded;
            };
            self.pivot(r, j, &u);
        }
    }

    fn artificial_sum(&self) -> Q {
        (0..RANK).filter(|&i| Self::is_art(self.basis[i])).map(|i| self.xb[i].clone()).sum()
    }

    /// Phase one. `Err` carries a separating class when infeasible.
    fn phase1(&mut self, allowed: &dyn Fn(usize) -> bool) -> Result<(), Box<DivClass>> {
        self.run(&[], true, allowed);
        if self.artificial_sum().is_positive() {
            return Err(Box::new(self.dual_class(&self.dual(&[], true))));
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..RANK {
            if !Self::is_art(self.basis[r]) {
                continue;
            }
            let candidate = (0..self.cols.len()).find_map(|j| {
                if !allowed(j) || self.basis.contains(&j) {
                    return None;
                }
                let u = self.column_image(j);
                (!u[r].is_zero()).then_some((j, u))
            });
            if let Some((j, u)) = candidate {
                self.pivot(r, j, &u);
            }
        }
        Ok(())
    }

    /// Convert a row-space functional into a class under the intersection pairing.
    fn dual_class(&self, y: &[Q; RANK]) -> DivClass {
        DivClass::new(std::array::from_fn(|k| {
            let v = if self.row_sign[k] < 0 { -&y[k] } else { y[k].clone() };
            if k == 0 {
                v
            } else {
                -v
            }
        }))
    }

    fn primal(&self, j: usize) -> Q {
        match self.basis.iter().position(|&b| b == j) {
            Some(i) => mul_big(&self.xb[i], &self.cols[j].scale),
            None => Q::zero(),
        }
    }

    fn objective_value(&self, costs: &[(usize, BigInt)]) -> Q {
        (0..RANK)
            .map(|i| mul_big(&self.xb[i], &Self::cost_of(costs, self.basis[i], false)))
            .sum()
    }
}

fn infeasible(separation: DivClass, iterations: usize) -> LpOutcome {
    LpOutcome {
        status: LpStatus::Infeasible,
        value: None,
        certificate: Some(Certificate::Separation(separation)),
        dual: None,
        iterations,
    }
}

/// Solve a cone program exactly.
pub fn solve(p: &ConeProgram) -> Result<LpOutcome, LpError> {
    if p.generators.is_empty() {
        return Err(LpError::NoGenerators);
    }
    let n = p.generators.len();
    let mut columns = p.generators.clone();
    let mut costs: Vec<(usize, BigInt)> = Vec::new();
    let mut tab;
    match &p.objective {
        Objective::Feasibility => {
            tab = Tableau::new(&columns, &p.target);
        }
        Objective::MaximizeScalar { direction } => {
            columns.push(direction.clone());
            tab = Tableau::new(&columns, &p.target);
            costs.push((n, tab.cols[n].scale.clone()));
        }
        Objective::MaximizeCoefficient { generator_index } => {
            if *generator_index >= n {
                return Err(LpError::BadGeneratorIndex(*generator_index));
            }
            tab = Tableau::new(&columns, &p.target);
            costs.push((*generator_index, tab.cols[*generator_index].scale.clone()));
        }
    }
    let all = |_j: usize| true;
    if let Err(sep) = tab.phase1(&all) {
        return Ok(infeasible(*sep, tab.iterations));
    }
    Ok(finish(tab, &costs, n, &all))
}

fn finish(mut tab: Tableau, costs: &[(usize, BigInt)], n_generators: usize, allowed: &dyn Fn(usize) -> bool) -> LpOutcome {
    let status = match tab.run(costs, false, allowed) {
        Phase2::Optimal => LpStatus::Optimal,
        Phase2::Unbounded => {
            return LpOutcome {
                status: LpStatus::Unbounded,
                value: None,
                certificate: None,
                dual: None,
                iterations: tab.iterations,
            }
        }
    };
    let coefficients = (0..n_generators).map(|j| tab.primal(j)).collect();
    let scalar = (tab.cols.len() > n_generators).then(|| tab.primal(n_generators));
    let y = tab.dual(costs, false);
    LpOutcome {
        status,
        value: Some(tab.objective_value(costs)),
        certificate: Some(Certificate::Combination { scalar, coefficients }),
        dual: Some(tab.dual_class(&y)),
        iterations: tab.iterations,
    }
}

/// Feasibility of `target` in the cone; on success the certificate is a combination.
pub fn cone_member(target: &DivClass, generators: &[DivClass]) -> (bool, Certificate) {
    if target.is_zero() || generators.is_empty() {
        let member = target.is_zero();
        let cert = if member {
            Certificate::Combination { scalar: None, coefficients: vec![Q::zero(); generators.len()] }
        } else {
            // Nothing but zero lies in the empty cone; any functional negative on the target separates.
            Certificate::Separation(-target)
        };
        return (member, cert);
    }
    let out = solve(&ConeProgram {
        generators: generators.to_vec(),
        target: target.clone(),
        objective: Objective::Feasibility,
    })
    .expect("nonempty generators");
    let member = out.status == LpStatus::Optimal;
    (member, out.certificate.expect("feasibility always certifies"))
}

/// Largest `alpha >= 0` with `target - alpha * pivot` in the cone.
pub fn max_coefficient(target: &DivClass, generators: &[DivClass], pivot: &DivClass) -> Result<Q, LpError> {
    ConeSolver::new(generators, target)?.max_along(pivot).map(|o| o.value)
}

/// The optimum of a directional query together with its dual certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionalMax {
    pub value: Q,
    /// A class `y` with `y.g >= 0` on the generators, `y.direction >= 1` and `y.target = value`.
    pub dual: DivClass,
    pub iterations: usize,
}

/// A feasible basis for `target` in a fixed cone, reused across many
/// directional or coefficient queries.
#[derive(Clone)]
pub struct ConeSolver {
    tab: Tableau,
    n: usize,
}

impl ConeSolver {
    pub fn new(generators: &[DivClass], target: &DivClass) -> Result<ConeSolver, LpError> {
        if generators.is_empty() {
            return Err(LpError::NoGenerators);
        }
        let mut tab = Tableau::new(generators, target);
        let all = |_j: usize| true;
        tab.phase1(&all).map_err(|separation| LpError::NotInCone { separation })?;
        tab.iterations = 0;
        Ok(ConeSolver { tab, n: generators.len() })
    }

    pub fn max_along(&self, direction: &DivClass) -> Result<DirectionalMax, LpError> {
        let mut tab = self.tab.clone();
        let j = tab.push_column(direction);
        let costs = [(j, tab.cols[j].scale.clone())];
        let out = finish(tab, &costs, self.n, &|_j| true);
        match out.status {
            LpStatus::Optimal => Ok(DirectionalMax {
                value: out.value.expect("optimal value"),
                dual: out.dual.expect("optimal dual"),
                iterations: out.iterations,
            }),
            _ => Err(LpError::Unbounded),
        }
    }

    /// Largest coefficient of generator `k` over all representations of the target.
    pub fn max_generator_coefficient(&self, k: usize) -> Result<Q, LpError> {
        if k >= self.n {
            return Err(LpError::BadGeneratorIndex(k));
        }
        let tab = self.tab.clone();
        let costs = [(k, tab.cols[k].scale.clone())];
        let out = finish(tab, &costs, self.n, &|_j| true);
        match out.status {
            LpStatus::Optimal => Ok(out.value.expect("optimal value")),
            _ => Err(LpError::Unbounded),
        }
    }

    pub fn generator_count(&self) -> usize {
        self.n
    }

    /// Lcm of the generator scale factors; useful for sizing.
    pub fn scale_lcm(&self) -> BigInt {
        self.tab.cols.iter().fold(BigInt::one(), |acc, c| acc.lcm(&c.scale))
    }
}
