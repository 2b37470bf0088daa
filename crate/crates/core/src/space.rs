//! Ground sets, function systems, functionals, and views.
//!
//! A [`FunctionSystem`] is a finite set of labeled points together with an
//! exact evaluation matrix whose rows are the basis functions and whose
//! columns are the points; column `j` is the coordinate image of point `j`.
//! Points are identified by string labels so that abstract ground sets are
//! first class; grid-built sets additionally carry exact coordinates.

use std::collections::BTreeSet;

use crate::exact::{Mat, Rat};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
    coords: Option<Vec<Vec<Rat>>>,
}

impl GroundSet {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        Self::with_coords(labels, None)
    }

    pub fn with_coords(labels: Vec<String>, coords: Option<Vec<Vec<Rat>>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l.clone()) {
                return Err(Error::InvalidInput(format!("duplicate point label `{l}`")));
            }
        }
        if let Some(c) = &coords {
            if c.len() != labels.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} coordinate tuples for {} labels",
                    c.len(),
                    labels.len()
                )));
            }
        }
        Ok(GroundSet { labels, coords })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coords(&self) -> Option<&Vec<Vec<Rat>>> {
        self.coords.as_ref()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A finite-dimensional space of functions on a finite ground set, held as
/// its exact evaluation matrix. Rows are checked to be linearly independent
/// at construction: a dependent input would silently change the space
/// dimension and with it every atom-count bound downstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSystem {
    ground: GroundSet,
    basis_names: Vec<String>,
    evals: Mat,
}

impl FunctionSystem {
    pub fn new(ground: GroundSet, basis_names: Vec<String>, evals: Mat) -> Result<Self> {
        if evals.rows() != basis_names.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} basis names for {} evaluation rows",
                basis_names.len(),
                evals.rows()
            )));
        }
        if evals.cols() != ground.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} evaluation columns for {} points",
                evals.cols(),
                ground.len()
            )));
        }
        let rank = evals.rank();
        if rank < evals.rows() {
            return Err(Error::DependentBasis {
                rank,
                rows: evals.rows(),
            });
        }
        Ok(FunctionSystem {
            ground,
            basis_names,
            evals,
        })
    }

    /// Builds a system from labels and an evaluation matrix, naming the
    /// basis functions `f0, f1, …`.
    pub fn from_matrix(labels: Vec<String>, evals: Mat) -> Result<Self> {
        let names = (0..evals.rows()).map(|i| format!("f{i}")).collect();
        Self::new(GroundSet::new(labels)?, names, evals)
    }

    /// All monomials of total degree at most `degree` in `nvars` variables,
    /// evaluated on the full grid `axis^nvars`.
    ///
    /// Monomials are ordered by total degree, then lexicographically by
    /// exponent tuple within a degree block, so the one-variable basis reads
    /// `1, x, x², …`. Grid points are odometer-ordered with the first
    /// variable slowest.
    pub fn monomial_grid(nvars: usize, degree: usize, axis: &[Rat]) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::InvalidInput("need at least one variable".into()));
        }
        if axis.is_empty() {
            return Err(Error::InvalidInput("empty axis".into()));
        }
        let exponents = monomial_exponents(nvars, degree);
        let mut points: Vec<Vec<Rat>> = vec![Vec::new()];
        for _ in 0..nvars {
            let mut next = Vec::with_capacity(points.len() * axis.len());
            for p in &points {
                for a in axis {
                    let mut q = p.clone();
                    q.push(a.clone());
                    next.push(q);
                }
            }
            points = next;
        }
        let labels: Vec<String> = points.iter().map(|p| coord_label(p)).collect();
        let mut rows = Vec::with_capacity(exponents.len());
        for alpha in &exponents {
            let row: Vec<Rat> = points.iter().map(|p| eval_monomial(alpha, p)).collect();
            rows.push(row);
        }
        let names = exponents.iter().map(|a| monomial_name(a)).collect();
        let ground = GroundSet::with_coords(labels, Some(points))?;
        Self::new(ground, names, Mat::from_rows(rows))
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn evals(&self) -> &Mat {
        &self.evals
    }

    /// Dimension of the function space (number of basis functions).
    pub fn dim(&self) -> usize {
        self.evals.rows()
    }

    pub fn npoints(&self) -> usize {
        self.ground.len()
    }

    /// Coordinate image of point `j` — the evaluation column `(f_i(s_j))_i`.
    pub fn eval_column(&self, j: usize) -> Vec<Rat> {
        self.evals.col_vec(j)
    }

    /// Values of the function with coefficient vector `c` on every point.
    pub fn values(&self, c: &[Rat]) -> Vec<Rat> {
        self.evals.vec_mul(c)
    }

    /// Value of the function with coefficient vector `c` at point `j`.
    pub fn value_at(&self, c: &[Rat], j: usize) -> Rat {
        (0..self.dim()).fold(Rat::zero(), |acc, i| acc + &c[i] * self.evals.at(i, j))
    }

    pub fn functional(&self, coeffs: Vec<Rat>) -> Result<Functional> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a {}-dimensional system",
                coeffs.len(),
                self.dim()
            )));
        }
        Ok(Functional { coeffs })
    }

    /// The point evaluation functional at the labeled point, represented in
    /// the dual basis; its coordinates are the evaluation column.
    pub fn point_evaluation(&self, label: &str) -> Result<Functional> {
        let j = self
            .ground
            .index_of(label)
            .ok_or_else(|| Error::UnknownLabel(label.into()))?;
        Ok(Functional {
            coeffs: self.eval_column(j),
        })
    }

    /// Restricts to a subset of points. Returns the view and the dimension
    /// of the quotient space of restricted functions, i.e. the rank of the
    /// retained evaluation columns.
    pub fn restrict(&self, active: &BTreeSet<usize>) -> (SubsetView, usize) {
        for &j in active {
            assert!(j < self.npoints(), "point index {j} out of range");
        }
        let view = SubsetView {
            active: active.clone(),
        };
        let dim = if active.is_empty() {
            0
        } else {
            let cols: Vec<usize> = active.iter().copied().collect();
            self.evals.select_cols(&cols).rank()
        };
        (view, dim)
    }

    pub fn full_view(&self) -> SubsetView {
        SubsetView {
            active: (0..self.npoints()).collect(),
        }
    }

    /// Builds the quotient system of restrictions to `view`, together with
    /// the induced functional. The quotient basis is the subset of original
    /// basis rows that stays independent on the view; the functional
    /// descends only when it vanishes on every function that restricts to
    /// zero, which is verified exactly.
    pub fn quotient(
        &self,
        view: &SubsetView,
        functional: &Functional,
    ) -> Result<(FunctionSystem, Functional, Vec<usize>)> {
        let cols: Vec<usize> = view.iter().collect();
        let restricted = self.evals.select_cols(&cols);
        // Pivot rows of the transposed restriction form an independent row set.
        let (_, pivots, _) = restricted.transpose().rref();
        let keep: Vec<usize> = pivots;
        let kept_rows: Vec<Vec<Rat>> = keep.iter().map(|&r| restricted.row_vec(r)).collect();
        let quotient_evals = if kept_rows.is_empty() {
            Mat::zeros(0, cols.len())
        } else {
            Mat::from_rows(kept_rows)
        };

        // Express every dropped row over the kept ones and check that the
        // functional is consistent with the dependency; otherwise it does
        // not descend to the quotient.
        let solve_cols = quotient_evals.rows();
        for r in 0..self.dim() {
            if keep.contains(&r) {
                continue;
            }
            let target = restricted.row_vec(r);
            let combo = solve_row_combination(&quotient_evals, &target).ok_or_else(|| {
                Error::InternalInfeasible("dependent row not in kept row span".into())
            })?;
            debug_assert_eq!(combo.len(), solve_cols);
            let implied = keep
                .iter()
                .zip(combo.iter())
                .fold(Rat::zero(), |acc, (&kr, c)| acc + c * &functional.coeffs[kr]);
            if implied != functional.coeffs[r] {
                return Err(Error::InvalidInput(
                    "functional does not descend to the quotient on this view".into(),
                ));
            }
        }

        let labels: Vec<String> = cols
            .iter()
            .map(|&j| self.ground.labels[j].clone())
            .collect();
        let coords = self
            .ground
            .coords
            .as_ref()
            .map(|cs| cols.iter().map(|&j| cs[j].clone()).collect());
        let names: Vec<String> = keep
            .iter()
            .map(|&r| self.basis_names[r].clone())
            .collect();
        let system = FunctionSystem::new(GroundSet::with_coords(labels, coords)?, names, quotient_evals)?;
        let coeffs: Vec<Rat> = keep.iter().map(|&r| functional.coeffs[r].clone()).collect();
        let f = system.functional(coeffs)?;
        Ok((system, f, keep))
    }
}

/// Solves `combo · rows(m) = target` exactly; `None` if `target` is outside
/// the row span.
fn solve_row_combination(m: &Mat, target: &[Rat]) -> Option<Vec<Rat>> {
    // Transpose to a column problem: m^T · combo = target^T.
    let mt = m.transpose();
    let rows = mt.rows();
    let cols = mt.cols();
    let mut aug = Mat::zeros(rows, cols + 1);
    for r in 0..rows {
        for c in 0..cols {
            *aug.at_mut(r, c) = mt.at(r, c).clone();
        }
        *aug.at_mut(r, cols) = target[r].clone();
    }
    let (red, pivots, _) = aug.rref();
    if pivots.contains(&cols) {
        return None; // inconsistent system
    }
    let mut combo = vec![Rat::zero(); cols];
    for (pr, &pc) in pivots.iter().enumerate() {
        combo[pc] = red.at(pr, cols).clone();
    }
    Some(combo)
}

/// A linear functional in the dual basis of a system: coordinate `i` is the
/// value on basis function `i` (a truncated moment vector).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functional {
    coeffs: Vec<Rat>,
}

impl Functional {
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    /// Applies the functional to the function with coefficient vector `c`.
    pub fn apply(&self, c: &[Rat]) -> Rat {
        Rat::dot(&self.coeffs, c)
    }

    pub fn negated(&self) -> Functional {
        Functional {
            coeffs: self.coeffs.iter().map(|v| -v).collect(),
        }
    }

    pub fn scaled(&self, by: &Rat) -> Functional {
        Functional {
            coeffs: self.coeffs.iter().map(|v| v * by).collect(),
        }
    }

    pub fn add(&self, other: &Functional) -> Functional {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        Functional {
            coeffs: self
                .coeffs
                .iter()
                .zip(other.coeffs.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Functional) -> Functional {
        self.add(&other.negated())
    }
}

/// A sorted set of active point indices into a system's ground set.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SubsetView {
    active: BTreeSet<usize>,
}

impl SubsetView {
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        SubsetView {
            active: indices.into_iter().collect(),
        }
    }

    pub fn indices(&self) -> &BTreeSet<usize> {
        &self.active
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.active.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.active.contains(&j)
    }

    pub fn is_subset(&self, other: &SubsetView) -> bool {
        self.active.is_subset(&other.active)
    }

    pub fn intersection(&self, other: &SubsetView) -> SubsetView {
        SubsetView {
            active: self.active.intersection(&other.active).copied().collect(),
        }
    }

    pub fn labels<'a>(&self, system: &'a FunctionSystem) -> Vec<&'a str> {
        self.iter()
            .map(|j| system.ground().labels()[j].as_str())
            .collect()
    }
}

pub(crate) fn monomial_exponents(nvars: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for deg in 0..=degree {
        let mut block = Vec::new();
        enumerate_degree(nvars, deg, &mut Vec::new(), &mut block);
        // Lexicographically descending exponent tuples within a degree
        // block: x before y, x² before x·y before y².
        block.sort();
        block.reverse();
        out.extend(block);
    }
    out
}

fn enumerate_degree(nvars: usize, deg: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if nvars == 1 {
        let mut alpha = prefix.clone();
        alpha.push(deg);
        out.push(alpha);
        return;
    }
    for first in 0..=deg {
        prefix.push(first);
        enumerate_degree(nvars - 1, deg - first, prefix, out);
        prefix.pop();
    }
}

fn var_name(i: usize, nvars: usize) -> String {
    if nvars <= 3 {
        ["x", "y", "z"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

pub(crate) fn monomial_name(alpha: &[usize]) -> String {
    let nvars = alpha.len();
    let parts: Vec<String> = alpha
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            if e == 1 {
                var_name(i, nvars)
            } else {
                format!("{}^{}", var_name(i, nvars), e)
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

pub(crate) fn eval_monomial(alpha: &[usize], point: &[Rat]) -> Rat {
    alpha
        .iter()
        .zip(point.iter())
        .fold(Rat::one(), |acc, (&e, x)| acc * x.pow(e as u32))
}

pub(crate) fn coord_label(coords: &[Rat]) -> String {
    coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    /// The two-function system on the grid {-1, -1/2, 0, 1/2, 1}: an
    /// indicator of the origin and its complement against the constant one.
    pub(crate) fn indicator_grid_system() -> FunctionSystem {
        let labels = ["-1", "-1/2", "0", "1/2", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let evals = Mat::from_i64(&[&[0, 0, 1, 0, 0], &[1, 1, 0, 1, 1]]);
        FunctionSystem::from_matrix(labels, evals).unwrap()
    }

    #[test]
    fn from_matrix_accepts_independent_rows() {
        let sys = FunctionSystem::from_matrix(
            vec!["a".into(), "b".into()],
            Mat::from_i64(&[&[1, 1], &[1, -1]]),
        )
        .unwrap();
        assert_eq!(sys.dim(), 2);
    }

    #[test]
    fn from_matrix_rejects_dependent_rows() {
        let err = FunctionSystem::from_matrix(
            vec!["a".into(), "b".into()],
            Mat::from_i64(&[&[1, 1], &[2, 2]]),
        )
        .unwrap_err();
        assert_eq!(err, Error::DependentBasis { rank: 1, rows: 2 });
    }

    #[test]
    fn indicator_grid_system_is_two_dimensional() {
        let sys = indicator_grid_system();
        assert_eq!(sys.dim(), 2);
        assert_eq!(sys.npoints(), 5);
    }

    #[test]
    fn monomial_grid_univariate_quadratic() {
        let axis = [r(-1), r(0), r(1)];
        let sys = FunctionSystem::monomial_grid(1, 2, &axis).unwrap();
        assert_eq!(sys.basis_names(), &["1", "x", "x^2"]);
        assert_eq!(
            sys.evals(),
            &Mat::from_i64(&[&[1, 1, 1], &[-1, 0, 1], &[1, 0, 1]])
        );
    }

    #[test]
    fn monomial_grid_too_small_is_dependent() {
        let axis = [r(0), r(1)];
        let err = FunctionSystem::monomial_grid(1, 2, &axis).unwrap_err();
        assert!(matches!(err, Error::DependentBasis { .. }));
    }

    #[test]
    fn monomial_grid_two_vars_linear() {
        let axis = [r(0), r(1)];
        let sys = FunctionSystem::monomial_grid(2, 1, &axis).unwrap();
        assert_eq!(sys.basis_names(), &["1", "x", "y"]);
        assert_eq!(sys.dim(), 3);
        assert_eq!(sys.npoints(), 4);
        assert_eq!(sys.evals().rank(), 3);
    }

    #[test]
    fn point_evaluation_picks_columns() {
        let axis = [r(-1), r(0), r(1)];
        let sys = FunctionSystem::monomial_grid(1, 2, &axis).unwrap();
        let at_zero = sys.point_evaluation("0").unwrap();
        assert_eq!(at_zero.coeffs(), &[r(1), r(0), r(0)]);
        let at_one = sys.point_evaluation("1").unwrap();
        assert_eq!(at_one.coeffs(), &[r(1), r(1), r(1)]);
        assert_eq!(
            sys.point_evaluation("7").unwrap_err(),
            Error::UnknownLabel("7".into())
        );
    }

    #[test]
    fn restrict_reports_quotient_dimension() {
        let sys = indicator_grid_system();
        let full: BTreeSet<usize> = (0..5).collect();
        assert_eq!(sys.restrict(&full).1, 2);
        assert_eq!(sys.restrict(&BTreeSet::new()).1, 0);
        // Dropping the origin collapses all nonzero points to one column.
        let nonzero: BTreeSet<usize> = [0, 1, 3, 4].into_iter().collect();
        assert_eq!(sys.restrict(&nonzero).1, 1);
    }

    #[test]
    fn quotient_carries_functional_when_consistent() {
        let sys = indicator_grid_system();
        let l = sys.functional(vec![r(0), r(2)]).unwrap();
        let view = SubsetView::from_indices([0usize, 1, 3, 4]);
        let (qsys, ql, keep) = sys.quotient(&view, &l).unwrap();
        assert_eq!(qsys.dim(), 1);
        assert_eq!(qsys.npoints(), 4);
        assert_eq!(keep.len(), 1);
        // The surviving basis function takes value 1 on the view, so the
        // induced functional is total mass 2.
        assert_eq!(ql.coeffs()[0], r(2));
    }

    #[test]
    fn quotient_rejects_non_descending_functional() {
        // Restrict to the origin only: both basis functions restrict to
        // scalars there, with f ≡ 1 and g ≡ 0; any functional with
        // L(g) ≠ 0 cannot descend.
        let sys = indicator_grid_system();
        let l = sys.functional(vec![r(0), r(2)]).unwrap();
        let view = SubsetView::from_indices([2usize]);
        assert!(sys.quotient(&view, &l).is_err());
    }

    #[test]
    fn functional_application_is_dual_pairing() {
        let sys = indicator_grid_system();
        let l = sys.functional(vec![r(3), r(5)]).unwrap();
        // L(2f - g) = 2*3 - 5 = 1.
        assert_eq!(l.apply(&[r(2), r(-1)]), r(1));
    }

    proptest! {
        /// Point evaluations agree with evaluation columns on arbitrary
        /// coefficient vectors.
        #[test]
        fn point_evaluation_consistency(c in proptest::collection::vec(-4i64..=4, 2)) {
            let sys = indicator_grid_system();
            let c: Vec<Rat> = c.into_iter().map(Rat::from_int).collect();
            for (j, label) in sys.ground().labels().to_vec().iter().enumerate() {
                let ls = sys.point_evaluation(label).unwrap();
                let expected = (0..sys.dim())
                    .fold(Rat::zero(), |acc, i| acc + &c[i] * sys.evals().at(i, j));
                prop_assert_eq!(ls.apply(&c), expected);
            }
        }

        /// Restriction is monotone in the active set.
        #[test]
        fn restrict_monotone(mask1 in 0u32..32, mask2 in 0u32..32) {
            let sys = indicator_grid_system();
            let small: BTreeSet<usize> =
                (0..5).filter(|j| (mask1 & mask2) & (1 << j) != 0).collect();
            let large: BTreeSet<usize> = (0..5).filter(|j| mask2 & (1 << j) != 0).collect();
            let (_, d_small) = sys.restrict(&small);
            let (_, d_large) = sys.restrict(&large);
            prop_assert!(d_small <= d_large);
        }

        /// Monomial grid columns match an independent evaluation by repeated
        /// multiplication.
        #[test]
        fn monomial_columns_match_naive_powers(deg in 0usize..4) {
            let axis = [Rat::new(-1, 2), r(0), r(1), r(2)];
            let sys = FunctionSystem::monomial_grid(1, deg, &axis).unwrap();
            let coords = sys.ground().coords().unwrap().clone();
            for (j, point) in coords.iter().enumerate() {
                for (i, _) in sys.basis_names().iter().enumerate() {
                    // Row i is x^i in the univariate case.
                    let mut expected = Rat::one();
                    for _ in 0..i {
                        expected = expected * &point[0];
                    }
                    prop_assert_eq!(sys.evals().at(i, j), &expected);
                }
            }
        }
    }
}
