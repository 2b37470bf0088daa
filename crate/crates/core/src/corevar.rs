//! The core-variety iteration and the existence decision.
//!
//! Starting from the full ground set, each step forms the cone of functions
//! that annihilate the functional and are nonnegative on the current point
//! set, takes a relative-interior element of that cone, and keeps exactly
//! the points where it vanishes. A relative-interior element vanishes
//! precisely where the whole cone does (if some cone element were positive
//! at a kept point, subtracting a small multiple of it from the witness
//! would leave the cone), so one element certifies the entire shrink.
//!
//! On a finite ground set the iteration stabilizes immediately after the
//! first shrink: a relative-interior witness of the first step is strictly
//! positive on every removed point, so any function that is nonnegative on
//! the surviving set can be repaired into a globally nonnegative kernel
//! element by adding a large multiple of that witness, and must therefore
//! vanish on the surviving set. The chain is recorded anyway, one
//! certificate per step, and every certificate re-verifies exactly.

use std::collections::BTreeSet;

use crate::exact::{relint_point, ConeDesc, LpBuilder, LpStatus, Mat, Rat};
use crate::space::{FunctionSystem, Functional, SubsetView};

/// One step of the iteration: which points were removed and the witness
/// function (coefficients over the basis) that removed them.
///
/// The witness lies in the kernel of the functional, is nonnegative on the
/// step's point set, and is strictly positive exactly on the removed
/// points. A step that removes nothing carries the zero witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCertificate {
    pub step: usize,
    pub removed: BTreeSet<usize>,
    pub witness: Vec<Rat>,
}

/// The full chain `S₀ ⊇ S₁ ⊇ …` with certificates.
///
/// The chain strictly decreases until the final entry, which either repeats
/// its predecessor (witnessing the fixpoint) or is empty (the iteration
/// stops there and the core variety is empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreVarietyTrace {
    pub chain: Vec<SubsetView>,
    pub certificates: Vec<StepCertificate>,
    pub stabilized_at: usize,
}

impl CoreVarietyTrace {
    /// The terminal set — the core variety.
    pub fn core(&self) -> &SubsetView {
        self.chain.last().expect("chain is never empty")
    }

    /// Number of strictly shrinking steps.
    pub fn strict_steps(&self) -> usize {
        self.chain
            .windows(2)
            .filter(|w| w[1].len() < w[0].len())
            .count()
    }
}

/// The iteration cone at `view`: coefficient vectors `c` with `L(c) = 0`
/// and `c` nonnegative on every active point.
pub fn step_cone(system: &FunctionSystem, l: &Functional, view: &SubsetView) -> ConeDesc {
    let dim = system.dim();
    let eq = Mat::from_rows(vec![l.coeffs().to_vec()]);
    let rows: Vec<Vec<Rat>> = view.iter().map(|j| system.eval_column(j)).collect();
    let ineq = if rows.is_empty() {
        Mat::zeros(0, dim)
    } else {
        Mat::from_rows(rows)
    };
    ConeDesc::new(dim, eq, ineq)
}

/// One iteration step from `view`.
pub fn step(
    system: &FunctionSystem,
    l: &Functional,
    view: &SubsetView,
) -> (SubsetView, StepCertificate) {
    step_indexed(system, l, view, 0)
}

fn step_indexed(
    system: &FunctionSystem,
    l: &Functional,
    view: &SubsetView,
    index: usize,
) -> (SubsetView, StepCertificate) {
    let cone = step_cone(system, l, view);
    let rp = relint_point(&cone);
    let points: Vec<usize> = view.iter().collect();
    let kept: BTreeSet<usize> = rp.tight_rows.iter().map(|&row| points[row]).collect();
    let removed: BTreeSet<usize> = view.iter().filter(|j| !kept.contains(j)).collect();
    let witness = if removed.is_empty() {
        vec![Rat::zero(); system.dim()]
    } else {
        rp.point
    };
    (
        SubsetView::from_indices(kept),
        StepCertificate {
            step: index,
            removed,
            witness,
        },
    )
}

/// Runs the iteration to its fixpoint and records the chain.
pub fn core_variety(system: &FunctionSystem, l: &Functional) -> CoreVarietyTrace {
    let mut chain = vec![system.full_view()];
    let mut certificates = Vec::new();
    loop {
        let cur = chain.last().unwrap().clone();
        if cur.is_empty() {
            break;
        }
        let (next, cert) = step_indexed(system, l, &cur, chain.len() - 1);
        certificates.push(cert);
        let stable = next == cur;
        chain.push(next);
        if stable {
            break;
        }
        // Each strict step drops the quotient dimension by at least one, so
        // a chain past the dimension budget means a bug.
        debug_assert!(
            chain.len() <= system.dim() + 2,
            "chain exceeds dimension bound"
        );
    }
    let last = chain.len() - 1;
    let stabilized_at = if chain[last].is_empty() { last } else { last - 1 };
    CoreVarietyTrace {
        chain,
        certificates,
        stabilized_at,
    }
}

/// Which positivity hypothesis backs an existence claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    /// A strictly positive function with positive value under the
    /// (possibly sign-flipped) functional.
    Standing,
    /// The weaker condition at the terminal set: some function nonnegative
    /// and not identically zero there, with nonnegative value.
    WeakTerminal,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecisionStatus {
    NoMeasure,
    HasMeasure,
    InconclusiveHypotheses,
}

/// Outcome of [`decide`]. `sign_flipped` records that the negated
/// functional was the one analyzed; a flip is never silent.
#[derive(Clone, Debug)]
pub struct Decision {
    pub status: DecisionStatus,
    pub trace: CoreVarietyTrace,
    pub sign_flipped: bool,
    pub hypothesis: Hypothesis,
    /// Witness for the hypothesis, when one exists.
    pub rho: Option<Vec<Rat>>,
}

#[derive(Clone, Copy, Debug)]
pub struct DecideOptions {
    /// Allow analyzing `-L` when the sign test asks for it.
    pub flip_allowed: bool,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions { flip_allowed: true }
    }
}

/// Result of the hypothesis checks.
#[derive(Clone, Debug)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub rho: Option<Vec<Rat>>,
    pub sign_flip: bool,
    /// Set when a strictly positive function lies in the kernel of the
    /// functional, which empties the first iterate outright.
    pub strictly_positive_kernel: bool,
}

/// The cone `P` of functions nonnegative on the whole ground set.
pub fn nonneg_cone(system: &FunctionSystem) -> ConeDesc {
    let rows: Vec<Vec<Rat>> = (0..system.npoints())
        .map(|j| system.eval_column(j))
        .collect();
    let ineq = if rows.is_empty() {
        Mat::zeros(0, system.dim())
    } else {
        Mat::from_rows(rows)
    };
    ConeDesc::new(system.dim(), Mat::zeros(0, system.dim()), ineq)
}

/// Tests the Standing Assumption and, failing that, the weak terminal-set
/// condition on the trace's core.
///
/// Standing requires a strictly positive function: one exists exactly when
/// the relative interior of `P` has no tight evaluation rows (no common
/// zeros). The sign of the functional on such a relative-interior element
/// settles whether the functional or its negation is the one to analyze; a
/// zero value means a strictly positive kernel element, which empties the
/// first iterate.
pub fn check_hypotheses(
    system: &FunctionSystem,
    l: &Functional,
    trace: &CoreVarietyTrace,
    options: DecideOptions,
) -> HypothesisCheck {
    let p = nonneg_cone(system);
    let rp = relint_point(&p);
    if rp.tight_rows.is_empty() && system.npoints() > 0 {
        // Z(P) is empty: rp.point is strictly positive.
        let value = l.apply(&rp.point);
        if value.is_positive() {
            return HypothesisCheck {
                hypothesis: Hypothesis::Standing,
                rho: Some(rp.point),
                sign_flip: false,
                strictly_positive_kernel: false,
            };
        }
        if value.is_negative() {
            if options.flip_allowed {
                return HypothesisCheck {
                    hypothesis: Hypothesis::Standing,
                    rho: Some(rp.point),
                    sign_flip: true,
                    strictly_positive_kernel: false,
                };
            }
            return HypothesisCheck {
                hypothesis: Hypothesis::None,
                rho: Some(rp.point),
                sign_flip: false,
                strictly_positive_kernel: false,
            };
        }
        // L vanishes on a strictly positive function: S₁ = ∅.
        return HypothesisCheck {
            hypothesis: Hypothesis::None,
            rho: Some(rp.point),
            sign_flip: false,
            strictly_positive_kernel: true,
        };
    }

    // Standing is impossible; try the weak condition on the terminal set.
    let core = trace.core();
    if core.is_empty() {
        return HypothesisCheck {
            hypothesis: Hypothesis::None,
            rho: None,
            sign_flip: false,
            strictly_positive_kernel: false,
        };
    }
    if let Some(rho) = weak_condition_witness(system, l, core) {
        return HypothesisCheck {
            hypothesis: Hypothesis::WeakTerminal,
            rho: Some(rho),
            sign_flip: false,
            strictly_positive_kernel: false,
        };
    }
    if options.flip_allowed {
        if let Some(rho) = weak_condition_witness(system, &l.negated(), core) {
            return HypothesisCheck {
                hypothesis: Hypothesis::WeakTerminal,
                rho: Some(rho),
                sign_flip: true,
                strictly_positive_kernel: false,
            };
        }
    }
    HypothesisCheck {
        hypothesis: Hypothesis::None,
        rho: None,
        sign_flip: false,
        strictly_positive_kernel: false,
    }
}

/// Searches for `ρ` nonnegative on the view, not identically zero there,
/// with `L(ρ) ≥ 0`: maximize the sum of values capped at one; the condition
/// holds exactly when the optimum is positive.
fn weak_condition_witness(
    system: &FunctionSystem,
    l: &Functional,
    view: &SubsetView,
) -> Option<Vec<Rat>> {
    let dim = system.dim();
    let mut sum_row = vec![Rat::zero(); dim];
    let mut b = LpBuilder::new(dim);
    for j in view.iter() {
        let col = system.eval_column(j);
        for (acc, v) in sum_row.iter_mut().zip(col.iter()) {
            *acc += v;
        }
        b.ge(col, Rat::zero());
    }
    b.ge(l.coeffs().to_vec(), Rat::zero());
    b.le(sum_row.clone(), Rat::one());
    b.maximize(sum_row);
    let res = b.solve();
    debug_assert_eq!(res.status, LpStatus::Optimal);
    if res.objective.as_ref().is_some_and(Rat::is_positive) {
        res.point
    } else {
        None
    }
}

/// Decides existence of a representing measure.
///
/// `NoMeasure` is returned exactly when the core variety is empty — with
/// one caveat inherited from the construction: the zero functional also has
/// an empty core variety even though the zero measure trivially represents
/// it. `HasMeasure` with `sign_flipped` set means the *negated* functional
/// is the one carrying a measure.
pub fn decide(system: &FunctionSystem, l: &Functional) -> Decision {
    decide_with(system, l, DecideOptions::default())
}

pub fn decide_with(system: &FunctionSystem, l: &Functional, options: DecideOptions) -> Decision {
    let trace = core_variety(system, l);
    let check = check_hypotheses(system, l, &trace, options);
    let status = if trace.core().is_empty() {
        DecisionStatus::NoMeasure
    } else if check.hypothesis != Hypothesis::None {
        DecisionStatus::HasMeasure
    } else {
        DecisionStatus::InconclusiveHypotheses
    };
    Decision {
        status,
        trace,
        sign_flipped: check.sign_flip,
        hypothesis: check.hypothesis,
        rho: check.rho,
    }
}

/// Builds a staircase instance: `k+3` points `p0 … p{k+2}` and a system of
/// dimension `k+2` spanned by the constant function and `k+1` "stair"
/// differences, with the functional evaluating at the two terminal points.
///
/// The single iteration step removes all of `p0 … pk` at once — the stair
/// functions chain into one relative-interior witness that is strictly
/// positive on every stair point — and the core variety is the two-point
/// terminal set. On a finite ground set this is the longest chain possible:
/// one strict shrink, then stabilization. Longer chains exist only over
/// infinite ground sets, where the nonnegative repair of a later witness by
/// an earlier one can be blocked by unbounded ratios; on a finite set that
/// repair always succeeds, forcing every function in the second step's cone
/// to vanish on the survivors of the first.
///
/// The construction certifies itself: the iteration is run and the claimed
/// chain is asserted exactly.
pub fn make_staircase(k: usize) -> (FunctionSystem, Functional) {
    assert!(k >= 1, "staircase needs k >= 1");
    let npoints = k + 3;
    let labels: Vec<String> = (0..npoints).map(|j| format!("p{j}")).collect();
    let dim = k + 2;
    let mut rows = vec![vec![Rat::one(); npoints]]; // the constant function
    for i in 0..=k {
        let mut row = vec![Rat::zero(); npoints];
        row[i] = Rat::one();
        if i >= 1 {
            row[i - 1] = -Rat::one();
        }
        rows.push(row);
    }
    let mut names = vec!["rho".to_string()];
    names.extend((0..=k).map(|i| format!("f{i}")));
    let system = FunctionSystem::new(
        crate::space::GroundSet::new(labels).unwrap(),
        names,
        Mat::from_rows(rows),
    )
    .expect("stair rows are independent");
    debug_assert_eq!(system.dim(), dim);

    // Evaluation at the two terminal points: value 2 on the constant, 0 on
    // every stair function.
    let mut coeffs = vec![Rat::zero(); dim];
    coeffs[0] = Rat::from_int(2);
    let l = system.functional(coeffs).unwrap();

    // Self-certification: one strict shrink removing exactly p0..pk.
    let trace = core_variety(&system, &l);
    let expected_removed: BTreeSet<usize> = (0..=k).collect();
    assert_eq!(
        trace.stabilized_at, 1,
        "staircase must stabilize after one shrink"
    );
    assert_eq!(
        trace.certificates[0].removed, expected_removed,
        "first step must remove every stair point"
    );
    let core: BTreeSet<usize> = trace.core().iter().collect();
    assert_eq!(core, BTreeSet::from([k + 1, k + 2]));
    (system, l)
}
