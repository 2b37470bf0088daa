//! Facial structure of the moment cone.
//!
//! On a finite ground set the moment cone is the conical hull of the
//! evaluation columns, hence polyhedral and closed. A representable
//! functional determines the face of all representable functionals whose
//! core variety sits inside its own; faces are compared and reported
//! through their core varieties, which compare exactly as point sets.

use std::collections::BTreeSet;

use crate::corevar::{core_variety, decide, step, DecisionStatus};
use crate::exact::{primitive, ConeDesc, Mat, Rat};
use crate::measure::{representation_over, strictly_positive_on};
use crate::space::{FunctionSystem, Functional, SubsetView};
use crate::{Error, Result};

/// A face of the moment cone, described by its core variety.
#[derive(Clone, Debug)]
pub struct FaceDescriptor {
    /// Core variety cutting out the face.
    pub core: SubsetView,
    pub exposed: bool,
    /// The conjugate face: nonnegative functions vanishing on the core.
    pub dual_face: ConeDesc,
}

/// The face determined by a representable functional, with its conjugate
/// face `{p ≥ 0 : p ≡ 0 on the core}` as an explicit cone.
pub fn face_of(system: &FunctionSystem, l: &Functional) -> Result<FaceDescriptor> {
    let d = decide(system, l);
    if d.status != DecisionStatus::HasMeasure || d.sign_flipped {
        return Err(Error::NoRepresentingMeasure);
    }
    let core = d.trace.core().clone();
    let exposed = core == d.trace.chain[1];
    Ok(FaceDescriptor {
        dual_face: dual_face_cone(system, &core),
        core,
        exposed,
    })
}

/// The cone of nonnegative functions vanishing on `core`.
pub fn dual_face_cone(system: &FunctionSystem, core: &SubsetView) -> ConeDesc {
    let dim = system.dim();
    let eq_rows: Vec<Vec<Rat>> = core.iter().map(|j| system.eval_column(j)).collect();
    let ineq_rows: Vec<Vec<Rat>> = (0..system.npoints())
        .filter(|j| !core.contains(*j))
        .map(|j| system.eval_column(j))
        .collect();
    let eq = if eq_rows.is_empty() {
        Mat::zeros(0, dim)
    } else {
        Mat::from_rows(eq_rows)
    };
    let ineq = if ineq_rows.is_empty() {
        Mat::zeros(0, dim)
    } else {
        Mat::from_rows(ineq_rows)
    };
    ConeDesc::new(dim, eq, ineq)
}

/// Face membership: the functional is representable and its core variety
/// lies inside the face's core.
pub fn member(system: &FunctionSystem, m: &Functional, face: &FaceDescriptor) -> bool {
    let d = decide(system, m);
    if d.status != DecisionStatus::HasMeasure || d.sign_flipped {
        return false;
    }
    d.trace.core().is_subset(&face.core)
}

/// Relative-interior test: two representable functionals sit in the
/// relative interior of the same face exactly when their core varieties
/// coincide.
pub fn in_relint(system: &FunctionSystem, m: &Functional, l: &Functional) -> Result<bool> {
    for f in [m, l] {
        let d = decide(system, f);
        if d.status != DecisionStatus::HasMeasure || d.sign_flipped {
            return Err(Error::NoRepresentingMeasure);
        }
    }
    Ok(core_variety(system, m).core() == core_variety(system, l).core())
}

/// Whether the face of `l` is exposed: the first iterate already equals the
/// core variety. On finite ground sets the moment cone is polyhedral, every
/// face of a polyhedral cone is exposed, and indeed the iteration always
/// stabilizes at the first iterate; the independent polyhedral route is
/// [`exposed_bruteforce`].
pub fn is_exposed(system: &FunctionSystem, l: &Functional) -> Result<bool> {
    let d = decide(system, l);
    if d.status != DecisionStatus::HasMeasure || d.sign_flipped {
        return Err(Error::NoRepresentingMeasure);
    }
    Ok(d.trace.core() == &d.trace.chain[1])
}

/// Facet normals of the moment cone, by exhaustive enumeration of
/// `(dim − 1)`-subsets of evaluation columns. Each normal is returned as a
/// primitive coefficient vector of a nonnegative function. Exponential in
/// the number of points; for small instances and cross-checks.
pub fn facet_normals(system: &FunctionSystem) -> Vec<Vec<Rat>> {
    let dim = system.dim();
    let n = system.npoints();
    if dim == 0 {
        return Vec::new();
    }
    let mut normals: Vec<Vec<Rat>> = Vec::new();
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut consider = |h: Vec<Rat>, system: &FunctionSystem| {
        let values = system.values(&h);
        let keep = if values.iter().all(|v| !v.is_negative()) {
            Some(h)
        } else if values.iter().all(|v| !v.is_positive()) {
            Some(h.iter().map(|v| -v).collect())
        } else {
            None
        };
        if let Some(h) = keep {
            if h.iter().any(|v| !v.is_zero()) {
                let key: Vec<String> = h.iter().map(|v| v.to_string()).collect();
                if seen.insert(key) {
                    normals.push(h);
                }
            }
        }
    };

    let mut subsets: Vec<Vec<usize>> = vec![Vec::new()];
    for j in 0..n {
        let mut extended = Vec::new();
        for s in &subsets {
            if s.len() < dim - 1 {
                let mut t = s.clone();
                t.push(j);
                extended.push(t);
            }
        }
        subsets.extend(extended);
    }
    for subset in subsets.iter().filter(|s| s.len() == dim.saturating_sub(1)) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&j| system.eval_column(j)).collect();
        let stacked = if rows.is_empty() {
            Mat::zeros(0, dim)
        } else {
            Mat::from_rows(rows)
        };
        if stacked.rank() != dim - 1 {
            continue;
        }
        let kernel = crate::exact::kernel_basis(&stacked);
        debug_assert_eq!(kernel.rows(), 1);
        consider(primitive(kernel.row(0)), system);
    }
    normals
}

/// Independent exposedness route: intersect the facets of the moment cone
/// that vanish on the candidate core and compare the resulting point set
/// with the core itself.
pub fn exposed_bruteforce(system: &FunctionSystem, core: &SubsetView) -> bool {
    let normals = facet_normals(system);
    let vanishing: Vec<&Vec<Rat>> = normals
        .iter()
        .filter(|h| core.iter().all(|j| system.value_at(h, j).is_zero()))
        .collect();
    let cut: BTreeSet<usize> = (0..system.npoints())
        .filter(|&j| vanishing.iter().all(|h| system.value_at(h, j).is_zero()))
        .collect();
    SubsetView::from_indices(cut) == *core
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastpathClass {
    Interior,
    Boundary,
    Outside,
}

/// Outcome of the finite-set termination fast path.
#[derive(Clone, Debug)]
pub struct FastpathDecision {
    pub class: FastpathClass,
    /// The core variety this classification predicts.
    pub core: SubsetView,
}

/// Classifies a functional against the cone of measures supported on a
/// view, predicting the rest of the iteration in one shot: interior means
/// the view is already the core variety, boundary means exactly one more
/// shrink, outside means the next iterate is empty.
///
/// The outside case presumes some function strictly positive on the view
/// has positive value under the functional (with constants in the system,
/// positive mass suffices); without that, a functional outside the cone
/// may still have a nonempty core variety through its negation.
pub fn finite_fastpath(
    system: &FunctionSystem,
    l: &Functional,
    view: &SubsetView,
) -> FastpathDecision {
    if representation_over(system, l, view).is_none() {
        return FastpathDecision {
            class: FastpathClass::Outside,
            core: SubsetView::from_indices(std::iter::empty()),
        };
    }
    let (interior, _) = strictly_positive_on(system, l, view);
    if interior {
        FastpathDecision {
            class: FastpathClass::Interior,
            core: view.clone(),
        }
    } else {
        let (next, _) = step(system, l, view);
        FastpathDecision {
            class: FastpathClass::Boundary,
            core: next,
        }
    }
}
