//! Positive extensions from a subspace and finite truncation towers.
//!
//! On a finite ground set the cone of representable functionals is closed,
//! so a functional on a subspace extends to a functional nonnegative on all
//! nonnegative functions of the big space exactly when it is a nonnegative
//! combination of the subspace-restricted point evaluations — a single
//! conic feasibility solve. The boundary-functional hypothesis that drives
//! the general statement is vacuous here and is not exposed as a parameter.

use std::collections::BTreeSet;

use crate::corevar::{core_variety, decide, DecisionStatus};
use crate::exact::{simplex, LpBuilder, LpStatus, Mat, Rat};
use crate::measure::AtomicMeasure;
use crate::space::{FunctionSystem, Functional, SubsetView};
use crate::{Error, Result};

/// A sub-system of basis rows `U` inside a full system `V`, with a
/// functional given on `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionProblem {
    sub_rows: Vec<usize>,
    l_on_sub: Vec<Rat>,
}

impl ExtensionProblem {
    pub fn new(system: &FunctionSystem, sub_rows: Vec<usize>, l_on_sub: Vec<Rat>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &r in &sub_rows {
            if r >= system.dim() {
                return Err(Error::InvalidInput(format!(
                    "basis row {r} out of range for dimension {}",
                    system.dim()
                )));
            }
            if !seen.insert(r) {
                return Err(Error::InvalidInput(format!("duplicate basis row {r}")));
            }
        }
        if sub_rows.is_empty() {
            return Err(Error::InvalidInput("empty subspace".into()));
        }
        if sub_rows.len() != l_on_sub.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} subspace rows",
                l_on_sub.len(),
                sub_rows.len()
            )));
        }
        Ok(ExtensionProblem { sub_rows, l_on_sub })
    }

    pub fn sub_rows(&self) -> &[usize] {
        &self.sub_rows
    }

    pub fn l_on_sub(&self) -> &[Rat] {
        &self.l_on_sub
    }

    /// Restriction of a full functional to the subspace rows.
    pub fn restrict(&self, l: &Functional) -> Vec<Rat> {
        self.sub_rows
            .iter()
            .map(|&r| l.coeffs()[r].clone())
            .collect()
    }
}

/// Searches for an extension of the subspace functional that is nonnegative
/// on every nonnegative function of the full system.
///
/// Returns the extended functional together with an atomic measure
/// realizing it, or `None` when no extension exists. The measure's atom
/// count is bounded by the subspace dimension, since only the subspace
/// moments constrain the solve.
pub fn v_positive_extension(
    system: &FunctionSystem,
    problem: &ExtensionProblem,
) -> Result<Option<(Functional, AtomicMeasure)>> {
    let n = system.npoints();
    let rows: Vec<Vec<Rat>> = problem
        .sub_rows
        .iter()
        .map(|&r| system.evals().row_vec(r))
        .collect();
    let objective = vec![Rat::zero(); n];
    let res = simplex(&objective, &rows, &problem.l_on_sub);
    match res.status {
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => unreachable!("feasibility objective is constant"),
        LpStatus::Optimal => {
            let point = res.point.expect("optimal solve carries a point");
            let atoms: Vec<(usize, Rat)> = point
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .collect();
            let measure = AtomicMeasure::new(atoms)?;
            let extension = system.functional(measure.moments(system))?;
            // Round trip: the extension restricts back to the input.
            if problem.restrict(&extension) != problem.l_on_sub {
                return Err(Error::InternalInfeasible(
                    "extension fails exact restriction check".into(),
                ));
            }
            Ok(Some((extension, measure)))
        }
    }
}

/// A function nonnegative on the ground set, built from the subspace rows
/// only, on which the subspace functional is negative — the separating
/// certificate that no positive extension can exist. Coefficients are over
/// the subspace rows.
pub fn u_positivity_witness(
    system: &FunctionSystem,
    problem: &ExtensionProblem,
) -> Option<Vec<Rat>> {
    let k = problem.sub_rows.len();
    let mut sum_row = vec![Rat::zero(); k];
    let mut b = LpBuilder::new(k);
    for j in 0..system.npoints() {
        let col: Vec<Rat> = problem
            .sub_rows
            .iter()
            .map(|&r| system.evals().at(r, j).clone())
            .collect();
        for (acc, v) in sum_row.iter_mut().zip(col.iter()) {
            *acc += v;
        }
        b.ge(col, Rat::zero());
    }
    b.eq(sum_row, Rat::one());
    b.maximize(problem.l_on_sub.iter().map(|v| -v).collect());
    let res = b.solve();
    match res.status {
        LpStatus::Optimal => {
            let minimum = -res.objective.expect("optimal solve carries a value");
            if minimum.is_negative() {
                res.point
            } else {
                None
            }
        }
        _ => None,
    }
}

/// One row of the vanishing-ratio report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailRatio {
    pub basis_name: String,
    pub max_ratio: Rat,
    pub at_label: String,
}

/// Advisory diagnostic for grid discretizations of unbounded domains:
/// the largest `|f(s)/ρ(s)|` over the flagged far points, per subspace
/// basis function. Large values warn that the finite grid misrepresents
/// decay at infinity; no theorem is claimed.
pub fn tail_diagnostic(
    system: &FunctionSystem,
    problem: &ExtensionProblem,
    rho_row: usize,
    tail: &BTreeSet<usize>,
) -> Result<Vec<TailRatio>> {
    if rho_row >= system.dim() {
        return Err(Error::InvalidInput(format!(
            "rho row {rho_row} out of range"
        )));
    }
    let rho_values = system.evals().row_vec(rho_row);
    if rho_values.iter().any(|v| !v.is_positive()) {
        return Err(Error::InvalidInput(
            "rho must be strictly positive on the ground set".into(),
        ));
    }
    for &j in tail {
        if j >= system.npoints() {
            return Err(Error::InvalidInput(format!("tail point {j} out of range")));
        }
    }
    if tail.is_empty() {
        return Ok(Vec::new());
    }
    let mut report = Vec::with_capacity(problem.sub_rows.len());
    for &r in &problem.sub_rows {
        let mut best: Option<(Rat, usize)> = None;
        for &j in tail {
            let ratio = (system.evals().at(r, j) / &rho_values[j]).abs();
            let better = match &best {
                None => true,
                Some((cur, _)) => ratio > *cur,
            };
            if better {
                best = Some((ratio, j));
            }
        }
        let (max_ratio, at) = best.expect("tail is nonempty");
        report.push(TailRatio {
            basis_name: system.basis_names()[r].clone(),
            max_ratio,
            at_label: system.ground().labels()[at].clone(),
        });
    }
    Ok(report)
}

/// A strictly nested sequence of basis-row subsets over one system; level
/// functionals are truncations of a single functional on the full system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSpec {
    levels: Vec<Vec<usize>>,
}

impl TowerSpec {
    pub fn new(system: &FunctionSystem, levels: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidNesting("tower has no levels".into()));
        }
        let mut previous: Option<BTreeSet<usize>> = None;
        for (i, level) in levels.iter().enumerate() {
            let set: BTreeSet<usize> = level.iter().copied().collect();
            if set.len() != level.len() {
                return Err(Error::InvalidNesting(format!(
                    "level {} repeats a basis row",
                    i + 1
                )));
            }
            if level.iter().any(|&r| r >= system.dim()) {
                return Err(Error::InvalidNesting(format!(
                    "level {} references a basis row out of range",
                    i + 1
                )));
            }
            if let Some(prev) = &previous {
                if !prev.is_subset(&set) || prev.len() == set.len() {
                    return Err(Error::InvalidNesting(format!(
                        "level {} does not strictly extend level {}",
                        i + 1,
                        i
                    )));
                }
            }
            previous = Some(set);
        }
        Ok(TowerSpec { levels })
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    /// Builds the level's system and the truncated functional.
    pub fn level_instance(
        &self,
        system: &FunctionSystem,
        top: &Functional,
        level: usize,
    ) -> Result<(FunctionSystem, Functional)> {
        let rows = &self.levels[level];
        let evals = Mat::from_rows(rows.iter().map(|&r| system.evals().row_vec(r)).collect());
        let names = rows
            .iter()
            .map(|&r| system.basis_names()[r].clone())
            .collect();
        let sub = FunctionSystem::new(system.ground().clone(), names, evals)?;
        let coeffs = rows.iter().map(|&r| top.coeffs()[r].clone()).collect();
        let l = sub.functional(coeffs)?;
        Ok((sub, l))
    }
}

/// Per-level core varieties and their intersection. Truncating a
/// functional to fewer basis functions can only grow the step cones, so
/// deeper levels have smaller core varieties; the nesting is asserted.
pub fn tower_core_variety(
    system: &FunctionSystem,
    top: &Functional,
    spec: &TowerSpec,
) -> Result<(SubsetView, Vec<SubsetView>)> {
    let mut cores = Vec::with_capacity(spec.levels.len());
    for level in 0..spec.levels.len() {
        let (sub, l) = spec.level_instance(system, top, level)?;
        let trace = core_variety(&sub, &l);
        let core = trace.core().clone();
        if let Some(prev) = cores.last() {
            if !core.is_subset(prev) {
                return Err(Error::InternalInfeasible(
                    "tower core varieties are not nested".into(),
                ));
            }
        }
        cores.push(core);
    }
    let mut intersection = system.full_view();
    for core in &cores {
        intersection = intersection.intersection(core);
    }
    Ok((intersection, cores))
}

/// Fixed disclaimer attached to tower reports.
pub const TOWER_SCOPE_NOTE: &str =
    "per-level results for a finite tower; no claim is made about any infinite limit";

/// Hypothesis note attached to every extension report.
pub const EXTENSION_SCOPE_NOTE: &str = "finite ground set: the rescaled evaluation points form a \
     closed set, so the boundary-functional hypothesis is vacuous and \
     existence reduces to exact conic feasibility";

#[derive(Clone, Debug)]
pub struct LevelReport {
    pub level: usize,
    pub status: DecisionStatus,
    pub sign_flipped: bool,
    pub core: SubsetView,
}

#[derive(Clone, Debug)]
pub struct TowerReport {
    pub levels: Vec<LevelReport>,
    /// Every level carries a measure for the functional as given.
    pub overall_has_measure: bool,
    /// First level that fails, 1-based.
    pub first_failure: Option<usize>,
}

/// Decides each level of the tower; the tower passes exactly when every
/// truncation is representable.
pub fn tower_decide(
    system: &FunctionSystem,
    top: &Functional,
    spec: &TowerSpec,
) -> Result<TowerReport> {
    let mut levels = Vec::with_capacity(spec.levels.len());
    let mut first_failure = None;
    for level in 0..spec.levels.len() {
        let (sub, l) = spec.level_instance(system, top, level)?;
        let d = decide(&sub, &l);
        let ok = d.status == DecisionStatus::HasMeasure && !d.sign_flipped;
        if !ok && first_failure.is_none() {
            first_failure = Some(level + 1);
        }
        levels.push(LevelReport {
            level: level + 1,
            status: d.status,
            sign_flipped: d.sign_flipped,
            core: d.trace.core().clone(),
        });
    }
    Ok(TowerReport {
        overall_has_measure: first_failure.is_none(),
        first_failure,
        levels,
    })
}
