//! Polyhedral cones `{x : A·x = 0, B·x ≥ 0}` with exact data.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::lp::{LpBuilder, LpResult, LpStatus};
use super::mat::Mat;
use super::rat::Rat;

/// A polyhedral cone `{x ∈ ℚ^dim : eq·x = 0, ineq·x ≥ 0}`.
///
/// The zero vector always satisfies the description, so a cone is never
/// empty.
#[derive(Clone, Debug)]
pub struct ConeDesc {
    pub dim: usize,
    /// Equality rows `A`.
    pub eq: Mat,
    /// Inequality rows `B`.
    pub ineq: Mat,
}

impl ConeDesc {
    pub fn new(dim: usize, eq: Mat, ineq: Mat) -> Self {
        assert_eq!(eq.cols(), dim, "equality row width must equal dim");
        assert_eq!(ineq.cols(), dim, "inequality row width must equal dim");
        ConeDesc { dim, eq, ineq }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        assert_eq!(x.len(), self.dim);
        self.eq.iter_rows().all(|row| Rat::dot(row, x).is_zero())
            && self.ineq.iter_rows().all(|row| !Rat::dot(row, x).is_negative())
    }
}

/// Maximizes `objective` over the cone intersected with extra equality
/// constraints `row·x = rhs`.
pub fn lp(objective: &[Rat], cone: &ConeDesc, extra_eq: &[(Vec<Rat>, Rat)]) -> LpResult {
    assert_eq!(objective.len(), cone.dim, "objective width must equal dim");
    let mut b = LpBuilder::new(cone.dim);
    b.maximize(objective.to_vec());
    for row in cone.eq.iter_rows() {
        b.eq(row.to_vec(), Rat::zero());
    }
    for (row, rhs) in extra_eq {
        b.eq(row.clone(), rhs.clone());
    }
    for row in cone.ineq.iter_rows() {
        b.ge(row.to_vec(), Rat::zero());
    }
    b.solve()
}

/// A point in the relative interior of a cone, together with the set of
/// implicit equality rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelintPoint {
    pub point: Vec<Rat>,
    /// Inequality rows on which every element of the cone vanishes.
    pub tight_rows: BTreeSet<usize>,
}

/// Computes a relative-interior point of the cone and its implicit
/// equalities: `point` satisfies `(B·x)_j > 0` exactly on the non-tight
/// rows, and a row is tight only when all cone elements vanish on it.
///
/// A first capped-slack LP (maximize Σ t_j with t_j ≤ (B·x)_j, t_j ≤ 1,
/// inside the box |x_i| ≤ 1) settles most rows at once: an optimum of zero
/// proves every row implicit, and rows with positive slack are certified
/// non-implicit by the optimal point itself. Rows the seed LP leaves at
/// zero are then resolved one by one with a witness LP per row (maximize
/// `(B·x)_j` capped at 1 over the cone), because a sum-of-slacks optimum
/// may park a non-implicit row at zero when raising it would cost more on
/// other rows. Witnesses are accumulated by summation, which keeps every
/// already-positive row positive.
pub fn relint_point(cone: &ConeDesc) -> RelintPoint {
    let dim = cone.dim;
    let nrows = cone.ineq.rows();
    let all_rows: BTreeSet<usize> = (0..nrows).collect();
    if dim == 0 || nrows == 0 {
        return RelintPoint {
            point: vec![Rat::zero(); dim],
            tight_rows: all_rows,
        };
    }

    let mut point = vec![Rat::zero(); dim];
    let mut undecided: BTreeSet<usize> = all_rows.clone();

    let row_value = |x: &[Rat], j: usize| Rat::dot(cone.ineq.row(j), x);
    let absorb = |point: &mut Vec<Rat>, witness: &[Rat], undecided: &mut BTreeSet<usize>| {
        for (p, w) in point.iter_mut().zip(witness.iter()) {
            *p += w;
        }
        undecided.retain(|&j| !row_value(point, j).is_positive());
    };

    // Seed: capped-slack LP over (x, t).
    let nvars = dim + nrows;
    let mut seed = LpBuilder::new(nvars);
    let mut obj = vec![Rat::zero(); nvars];
    for v in obj.iter_mut().skip(dim) {
        *v = Rat::one();
    }
    seed.maximize(obj);
    for row in cone.eq.iter_rows() {
        let mut r = row.to_vec();
        r.resize(nvars, Rat::zero());
        seed.eq(r, Rat::zero());
    }
    for (j, row) in cone.ineq.iter_rows().enumerate() {
        let mut r = row.to_vec();
        r.resize(nvars, Rat::zero());
        r[dim + j] = -Rat::one();
        seed.ge(r, Rat::zero());
        let mut tj = vec![Rat::zero(); nvars];
        tj[dim + j] = Rat::one();
        seed.ge(tj.clone(), Rat::zero());
        seed.le(tj, Rat::one());
    }
    for i in 0..dim {
        let mut xi = vec![Rat::zero(); nvars];
        xi[i] = Rat::one();
        seed.ge(xi.clone(), -Rat::one());
        seed.le(xi, Rat::one());
    }
    let res = seed.solve();
    debug_assert_eq!(res.status, LpStatus::Optimal, "seed LP is feasible and boxed");
    if let Some(opt) = res.point {
        if res.objective.as_ref().is_some_and(Rat::is_zero) {
            // Every slack capped at zero: all rows are implicit equalities.
            return RelintPoint {
                point: vec![Rat::zero(); dim],
                tight_rows: all_rows,
            };
        }
        absorb(&mut point, &opt[..dim], &mut undecided);
    }

    // Per-row witnesses for whatever the seed left unresolved.
    while let Some(&j) = undecided.iter().next() {
        let mut b = LpBuilder::new(dim);
        b.maximize(cone.ineq.row_vec(j));
        for row in cone.eq.iter_rows() {
            b.eq(row.to_vec(), Rat::zero());
        }
        for row in cone.ineq.iter_rows() {
            b.ge(row.to_vec(), Rat::zero());
        }
        b.le(cone.ineq.row_vec(j), Rat::one());
        let res = b.solve();
        debug_assert_eq!(res.status, LpStatus::Optimal, "witness LP is feasible and capped");
        let positive = res.objective.as_ref().is_some_and(Rat::is_positive);
        if positive {
            let witness = res.point.expect("optimal LP carries a point");
            absorb(&mut point, &witness, &mut undecided);
            debug_assert!(!undecided.contains(&j));
        } else {
            // Row j is an implicit equality; it can never become positive.
            undecided.remove(&j);
        }
    }

    // Scale to a max-abs of one for tidy output; scaling preserves the
    // zero pattern and cone membership.
    if let Some(max) = point.iter().map(Rat::abs).max() {
        if max.is_positive() {
            for p in point.iter_mut() {
                *p = &*p / &max;
            }
        }
    }
    let tight_rows: BTreeSet<usize> = (0..nrows)
        .filter(|&j| row_value(&point, j).is_zero())
        .collect();
    RelintPoint { point, tight_rows }
}

/// Rescales to an integer vector with coprime entries, preserving direction.
pub fn primitive(v: &[Rat]) -> Vec<Rat> {
    use num::bigint::BigInt;
    use num::Integer;
    use num::{One, Zero};
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let mut gcd = BigInt::zero();
    for s in &scaled {
        gcd = gcd.gcd(s);
    }
    if gcd.is_zero() {
        return vec![Rat::zero(); v.len()];
    }
    scaled
        .into_iter()
        .map(|s| Rat::from_big(s / &gcd, BigInt::one()))
        .collect()
}

/// Extreme rays of a pointed cone by exhaustive tight-set enumeration.
///
/// Exponential in the number of inequality rows; meant for the small
/// instances used in facial cross-checks and CLI reports.
pub fn extreme_rays(cone: &ConeDesc) -> Vec<Vec<Rat>> {
    let dim = cone.dim;
    if dim == 0 {
        return Vec::new();
    }
    let m = cone.ineq.rows();
    let mut rays: Vec<Vec<Rat>> = Vec::new();
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();

    let mut subsets: Vec<Vec<usize>> = vec![Vec::new()];
    for j in 0..m {
        let mut next = Vec::new();
        for s in &subsets {
            if s.len() < dim {
                let mut t = s.clone();
                t.push(j);
                next.push(t);
            }
        }
        subsets.extend(next);
    }

    for tight in &subsets {
        let mut rows: Vec<Vec<Rat>> = cone.eq.iter_rows().map(|r| r.to_vec()).collect();
        for &j in tight {
            rows.push(cone.ineq.row_vec(j));
        }
        if rows.is_empty() {
            continue;
        }
        let stacked = Mat::from_rows(rows);
        if stacked.rank() != dim - 1 {
            continue;
        }
        let kernel = super::mat::kernel_basis(&stacked);
        debug_assert_eq!(kernel.rows(), 1);
        let dir = primitive(kernel.row(0));
        for candidate in [dir.clone(), dir.iter().map(|v| -v).collect::<Vec<_>>()] {
            if cone.contains(&candidate) && candidate.iter().any(|v| !v.is_zero()) {
                let key: Vec<String> = candidate.iter().map(|v| v.to_string()).collect();
                if seen.insert(key) {
                    rays.push(candidate);
                }
            }
        }
    }
    rays
}
