//! Atomic representing measures: existence via direct conic feasibility,
//! extraction, support coverage, and moment-preserving compression.
//!
//! A measure here is a list of (point index, positive rational weight)
//! atoms. Every operation that returns a measure re-verifies it against the
//! target functional in exact arithmetic before handing it out.

use std::collections::BTreeSet;

use crate::corevar::{decide, DecisionStatus};
use crate::exact::{simplex, LpBuilder, LpResult, LpStatus, Rat};
use crate::space::{self, FunctionSystem, Functional, SubsetView};
use crate::{Error, Result};

/// A finitely atomic measure: distinct point indices with strictly positive
/// weights, sorted by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomicMeasure {
    atoms: Vec<(usize, Rat)>,
}

impl AtomicMeasure {
    pub fn new(mut atoms: Vec<(usize, Rat)>) -> Result<Self> {
        atoms.sort_by_key(|(j, _)| *j);
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!(
                    "duplicate atom at point index {}",
                    w[0].0
                )));
            }
        }
        if let Some((j, _)) = atoms.iter().find(|(_, w)| !w.is_positive()) {
            return Err(Error::InvalidInput(format!(
                "non-positive weight at point index {j}"
            )));
        }
        Ok(AtomicMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(usize, Rat)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.atoms.iter().map(|(j, _)| *j).collect()
    }

    pub fn weight_of(&self, j: usize) -> Option<&Rat> {
        self.atoms
            .iter()
            .find(|(i, _)| *i == j)
            .map(|(_, w)| w)
    }

    /// The functional `Σ aₛ·φ(s)` this measure integrates to.
    pub fn moments(&self, system: &FunctionSystem) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); system.dim()];
        for (j, w) in &self.atoms {
            let col = system.eval_column(*j);
            for (acc, v) in out.iter_mut().zip(col.iter()) {
                *acc += w * v;
            }
        }
        out
    }

    /// Exact check that the measure represents the functional.
    pub fn represents(&self, system: &FunctionSystem, l: &Functional) -> bool {
        self.moments(system) == l.coeffs()
    }
}

/// Direct conic-feasibility solve: nonnegative weights on the view's points
/// reproducing the functional. Returns `None` when infeasible. The point is
/// a basic solution, so its support size never exceeds the rank of the
/// evaluation columns on the view.
pub fn representation_over(
    system: &FunctionSystem,
    l: &Functional,
    view: &SubsetView,
) -> Option<AtomicMeasure> {
    let cols: Vec<usize> = view.iter().collect();
    let rows: Vec<Vec<Rat>> = (0..system.dim())
        .map(|i| cols.iter().map(|&j| system.evals().at(i, j).clone()).collect())
        .collect();
    let objective = vec![Rat::zero(); cols.len()];
    let res = simplex(&objective, &rows, l.coeffs());
    match res.status {
        LpStatus::Optimal => {
            let point = res.point.expect("optimal solve carries a point");
            let atoms: Vec<(usize, Rat)> = cols
                .iter()
                .zip(point.into_iter())
                .filter(|(_, w)| !w.is_zero())
                .map(|(&j, w)| (j, w))
                .collect();
            let m = AtomicMeasure::new(atoms).expect("basic solution weights are positive");
            debug_assert!(m.represents(system, l));
            Some(m)
        }
        LpStatus::Infeasible => None,
        LpStatus::Unbounded => unreachable!("feasibility objective is constant"),
    }
}

/// Whether `l` is representable at all (over the full ground set).
pub fn is_representable(system: &FunctionSystem, l: &Functional) -> bool {
    representation_over(system, l, &system.full_view()).is_some()
}

/// Strict positivity of a functional: `L(f) > 0` for every nonzero
/// nonnegative `f`. Decided by minimizing `L` over the nonnegative cone
/// normalized to total value one — a slice every nonzero ray crosses, since
/// basis independence rules out nonzero functions vanishing everywhere.
/// On failure the minimizer is returned: a nonzero nonnegative function
/// with `L(f) ≤ 0`.
pub fn is_strictly_positive(
    system: &FunctionSystem,
    l: &Functional,
) -> (bool, Option<Vec<Rat>>) {
    strictly_positive_on(system, l, &system.full_view())
}

/// Strict positivity of the induced functional on a view. Callers must
/// ensure the functional vanishes on every function vanishing on the view
/// (automatic when it is representable there), else the slice LP can be
/// unbounded below; that case reports `false` without a witness.
pub(crate) fn strictly_positive_on(
    system: &FunctionSystem,
    l: &Functional,
    view: &SubsetView,
) -> (bool, Option<Vec<Rat>>) {
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
    b.eq(sum_row, Rat::one());
    b.maximize(l.coeffs().iter().map(|v| -v).collect());
    let res = b.solve();
    match res.status {
        // Empty slice: the cone on the view is trivial and positivity is
        // vacuous.
        LpStatus::Infeasible => (true, None),
        LpStatus::Unbounded => (false, None),
        LpStatus::Optimal => {
            let minimum = -res.objective.expect("optimal solve carries a value");
            if minimum.is_positive() {
                (true, None)
            } else {
                (false, res.point)
            }
        }
    }
}

/// Extracts a finitely atomic representing measure supported on the core
/// variety.
///
/// The atom count never exceeds the rank of the evaluation columns on the
/// core (redundant moment rows are dropped by the solver before the basis
/// forms). An infeasible solve under a clean `HasMeasure` verdict is a bug
/// by the structure of the theory and aborts loudly.
pub fn extract(system: &FunctionSystem, l: &Functional) -> Result<AtomicMeasure> {
    let d = decide(system, l);
    let core = d.trace.core();
    if core.is_empty() {
        return Err(Error::NoRepresentingMeasure);
    }
    match representation_over(system, l, core) {
        Some(m) => {
            if !m.represents(system, l) {
                return Err(Error::InternalInfeasible(
                    "extracted measure fails exact re-verification".into(),
                ));
            }
            Ok(m)
        }
        None => {
            if d.status == DecisionStatus::HasMeasure && !d.sign_flipped {
                Err(Error::InternalInfeasible(
                    "existence verdict contradicts conic feasibility".into(),
                ))
            } else {
                Err(Error::NoRepresentingMeasure)
            }
        }
    }
}

/// A representing measure whose support contains the given point.
///
/// Peels off as much of the point evaluation as stays representable —
/// maximize ε with `L − ε·L_s` in the cone of core evaluations — then takes
/// half that maximum (or 1 when unbounded, which happens only for points
/// where every basis function vanishes) and extracts the remainder.
pub fn cover_point(system: &FunctionSystem, l: &Functional, label: &str) -> Result<AtomicMeasure> {
    let j = system
        .ground()
        .index_of(label)
        .ok_or_else(|| Error::UnknownLabel(label.into()))?;
    let d = decide(system, l);
    let core = d.trace.core();
    if core.is_empty() || d.status != DecisionStatus::HasMeasure || d.sign_flipped {
        return Err(Error::NoRepresentingMeasure);
    }
    if !core.contains(j) {
        return Err(Error::NotInCoreVariety(label.into()));
    }

    // Variables: one weight per core point, then ε last; maximize ε.
    let cols: Vec<usize> = core.iter().collect();
    let n = cols.len() + 1;
    let target_col = system.eval_column(j);
    let rows: Vec<Vec<Rat>> = (0..system.dim())
        .map(|i| {
            let mut row: Vec<Rat> = cols
                .iter()
                .map(|&s| system.evals().at(i, s).clone())
                .collect();
            row.push(target_col[i].clone());
            row
        })
        .collect();
    let mut objective = vec![Rat::zero(); n];
    objective[n - 1] = Rat::one();
    let res = simplex(&objective, &rows, l.coeffs());
    let epsilon = match res.status {
        LpStatus::Optimal => {
            let max = res.objective.expect("optimal solve carries a value");
            if !max.is_positive() {
                return Err(Error::InternalInfeasible(
                    "no positive mass can be placed on a core point".into(),
                ));
            }
            max / Rat::from_int(2)
        }
        LpStatus::Unbounded => Rat::one(),
        LpStatus::Infeasible => {
            return Err(Error::InternalInfeasible(
                "cover LP infeasible for a representable functional".into(),
            ))
        }
    };

    let mut rest_coeffs = l.coeffs().to_vec();
    for (c, v) in rest_coeffs.iter_mut().zip(target_col.iter()) {
        *c -= &epsilon * v;
    }
    let rest = system.functional(rest_coeffs)?;
    let base = representation_over(system, &rest, core).ok_or_else(|| {
        Error::InternalInfeasible("remainder after peeling ε is not representable".into())
    })?;

    let mut atoms = base.atoms().to_vec();
    match atoms.iter_mut().find(|(s, _)| *s == j) {
        Some((_, w)) => *w += &epsilon,
        None => atoms.push((j, epsilon)),
    }
    let m = AtomicMeasure::new(atoms)?;
    if !m.represents(system, l) {
        return Err(Error::InternalInfeasible(
            "covered measure fails exact re-verification".into(),
        ));
    }
    Ok(m)
}

/// An atom's evaluation column cleared to integers: the integer vector and
/// the scale it was multiplied by.
type IntColumn = (Vec<num::BigInt>, num::BigInt);

/// Fraction-free Gauss–Jordan tableau over integer columns, kept alive
/// through the elimination so kernel vectors can be read off and columns
/// deleted incrementally.
///
/// Both elimination passes use Bareiss cross-multiplication with exact
/// division, so every entry is an integer minor of the input; in the fully
/// reduced state every pivot entry equals one shared `scale`, and the
/// kernel vector attached to a free column `f` is `scale` at `f` and the
/// negated column entries at the pivot positions.
struct KernelTableau {
    rows: Vec<Vec<num::BigInt>>,
    /// (row, column) of each pivot.
    pivots: Vec<(usize, usize)>,
    /// Free (dependent) column indices, ascending.
    free: Vec<usize>,
    /// Common value of every pivot entry.
    scale: num::BigInt,
}

impl KernelTableau {
    fn new(columns: &[&[num::BigInt]], dim: usize) -> Self {
        use num::{BigInt, Zero};
        let n = columns.len();
        let mut rows: Vec<Vec<BigInt>> = (0..dim)
            .map(|i| columns.iter().map(|c| c[i].clone()).collect())
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut scale = BigInt::from(1);
        let mut next_row = 0usize;
        for col in 0..n {
            if next_row == dim {
                break;
            }
            let Some(src) = (next_row..dim).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(next_row, src);
            Self::eliminate_round(&mut rows, next_row, col, &scale);
            scale = rows[next_row][col].clone();
            pivots.push((next_row, col));
            next_row += 1;
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let free = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        KernelTableau {
            rows,
            pivots,
            free,
            scale,
        }
    }

    /// One fraction-free Jordan round with pivot (pivot_row, pivot_col):
    /// cross-multiplies every other row against the pivot row and divides
    /// by the previous scale, which is exact by the Bareiss identity.
    fn eliminate_round(
        rows: &mut [Vec<num::BigInt>],
        pivot_row: usize,
        pivot_col: usize,
        prev_scale: &num::BigInt,
    ) {
        use num::Zero;
        let pivot = rows[pivot_row][pivot_col].clone();
        let prow = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == pivot_row {
                continue;
            }
            if row[pivot_col].is_zero() {
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        let x = &*v * &pivot / prev_scale;
                        *v = x;
                    }
                }
                continue;
            }
            let factor = row[pivot_col].clone();
            for (v, pv) in row.iter_mut().zip(prow.iter()) {
                let x = (&*v * &pivot - &factor * pv) / prev_scale;
                *v = x;
            }
        }
    }

    fn nullity(&self) -> usize {
        self.free.len()
    }

    /// Kernel vector attached to free column `f`, oriented so the entry at
    /// `f` is positive — that keeps the free column itself an eligible
    /// ratio candidate, and deleting a free column costs nothing.
    fn read_off(&self, f: usize) -> Vec<num::BigInt> {
        use num::{BigInt, Signed, Zero};
        let n = self.rows.first().map_or(0, Vec::len);
        let negate = self.scale.is_negative();
        let mut z = vec![BigInt::zero(); n];
        z[f] = self.scale.abs();
        for &(r, c) in &self.pivots {
            debug_assert_eq!(self.rows[r][c], self.scale);
            if !self.rows[r][f].is_zero() {
                z[c] = if negate {
                    self.rows[r][f].clone()
                } else {
                    -&self.rows[r][f]
                };
            }
        }
        z
    }

    /// Deletes column `d`. A free column vanishes for free; deleting a
    /// pivot column re-pivots its row onto a free column carrying a nonzero
    /// entry, which exists whenever `d` sat in the support of some kernel
    /// vector.
    fn delete_column(&mut self, d: usize) {
        use num::Zero;
        if let Some(pos) = self.free.iter().position(|&c| c == d) {
            self.free.remove(pos);
        } else {
            let ppos = self
                .pivots
                .iter()
                .position(|&(_, c)| c == d)
                .expect("column is pivot or free");
            let (r, _) = self.pivots[ppos];
            let fpos = self
                .free
                .iter()
                .position(|&fc| !self.rows[r][fc].is_zero())
                .expect("a dropped pivot column is spanned by a free column");
            let new_col = self.free.remove(fpos);
            Self::eliminate_round(&mut self.rows, r, new_col, &self.scale);
            self.scale = self.rows[r][new_col].clone();
            self.pivots[ppos] = (r, new_col);
        }
        for row in self.rows.iter_mut() {
            row.remove(d);
        }
        for (_, c) in self.pivots.iter_mut() {
            if *c > d {
                *c -= 1;
            }
        }
        for c in self.free.iter_mut() {
            if *c > d {
                *c -= 1;
            }
        }
    }
}

/// Kernel basis of the matrix whose columns are the given integer vectors.
/// Returned vectors are primitive integer vectors.
#[cfg(test)]
fn integer_kernel(columns: &[&[num::BigInt]], dim: usize) -> Vec<Vec<num::BigInt>> {
    let tab = KernelTableau::new(columns, dim);
    tab.free.iter().map(|&f| tab.read_off(f)).collect()
}

#[cfg(test)]
/// Divides an integer vector by the gcd of its entries.
fn reduce_content(v: &mut [num::BigInt]) {
    use num::{BigInt, Integer, One, Zero};
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
        }
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in v.iter_mut() {
        if !x.is_zero() {
            let q = &*x / &g;
            *x = q;
        }
    }
}

/// Divides the shared-denominator weight representation by its joint content.
fn joint_reduce(nums: &mut [num::BigInt], denom: &mut num::BigInt) {
    use num::{BigInt, Integer, One, Zero};
    let mut g: BigInt = denom.clone();
    for u in nums.iter() {
        if !u.is_zero() {
            g = g.gcd(u);
        }
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for u in nums.iter_mut() {
        if !u.is_zero() {
            let q = &*u / &g;
            *u = q;
        }
    }
    let q = &*denom / &g;
    *denom = q;
}

/// Clears denominators of a rational column; returns the integer column
/// together with the scaling factor applied.
fn scaled_integer_column(col: &[Rat]) -> IntColumn {
    use num::{BigInt, Integer, One};
    let mut lcm = BigInt::one();
    for v in col {
        lcm = lcm.lcm(v.denom());
    }
    let ints = col
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    (ints, lcm)
}

/// Eliminates every dependency in one block: computes the full kernel basis
/// of the atom columns once, then consumes the basis vector by vector. Each
/// ratio step zeroes at least one weight (ties break toward the lowest
/// point index, and simultaneous zeros are all dropped); the remaining
/// kernel vectors are re-closed over the surviving columns by an integer
/// cross-multiplication instead of a fresh elimination.
///
/// Weights are carried as integer numerators over one shared denominator,
/// so a ratio step costs plain integer multiplications and a single joint
/// content reduction — no per-operation rational normalization. Surviving
/// atoms keep their columns, which callers thread through recursions.
#[cfg(test)]
pub(crate) static PHASE_NANOS: [std::sync::atomic::AtomicU64; 6] = [
    std::sync::atomic::AtomicU64::new(0),
    std::sync::atomic::AtomicU64::new(0),
    std::sync::atomic::AtomicU64::new(0),
    std::sync::atomic::AtomicU64::new(0),
    std::sync::atomic::AtomicU64::new(0),
    std::sync::atomic::AtomicU64::new(0),
];

#[cfg(test)]
macro_rules! phase {
    ($idx:expr, $e:expr) => {{
        let t = std::time::Instant::now();
        let out = $e;
        PHASE_NANOS[$idx]
            .fetch_add(t.elapsed().as_nanos() as u64, std::sync::atomic::Ordering::Relaxed);
        out
    }};
}
#[cfg(not(test))]
macro_rules! phase {
    ($idx:expr, $e:expr) => {
        $e
    };
}

fn prune_block(
    dim: usize,
    atoms: Vec<(usize, Rat)>,
    columns: Vec<IntColumn>,
) -> (Vec<(usize, Rat)>, Vec<IntColumn>, usize) {
    use num::{BigInt, Integer, One, Signed, Zero};
    debug_assert_eq!(atoms.len(), columns.len());

    // Merge duplicate points so parallel columns never enter the kernel.
    let mut work: Vec<(usize, Rat)> = Vec::with_capacity(atoms.len());
    let mut cols: Vec<IntColumn> = Vec::with_capacity(columns.len());
    for ((point, weight), col) in atoms.into_iter().zip(columns.into_iter()) {
        if weight.is_zero() {
            continue;
        }
        match work.iter_mut().find(|(p, _)| *p == point) {
            Some((_, w)) => *w += &weight,
            None => {
                work.push((point, weight));
                cols.push(col);
            }
        }
    }
    if work.len() <= 1 {
        return (work, cols, 0);
    }

    // Heaviest atoms first: the tableau picks its pivot columns from the
    // front, and ratio-minimal drops skew toward light atoms, so deletions
    // mostly hit free columns, where they cost nothing.
    let mut order: Vec<usize> = (0..work.len()).collect();
    order.sort_by(|&a, &b| {
        work[b]
            .1
            .cmp(&work[a].1)
            .then_with(|| work[a].0.cmp(&work[b].0))
    });
    let mut sorted_work = Vec::with_capacity(work.len());
    let mut sorted_cols = Vec::with_capacity(cols.len());
    for &i in &order {
        sorted_work.push(work[i].clone());
        sorted_cols.push(std::mem::take(&mut cols[i]));
    }
    let mut work = sorted_work;
    let mut cols = sorted_cols;

    // Kernel over the integer-scaled columns, kept as a live tableau.
    // Scaling column j by L_j turns a null vector z of the scaled columns
    // into z_j·L_j for the originals, applied at each read-off.
    let int_cols: Vec<&[BigInt]> = cols.iter().map(|(c, _)| c.as_slice()).collect();
    let mut tab = phase!(0, KernelTableau::new(&int_cols, dim));
    let nsteps = tab.nullity();
    if nsteps == 0 {
        return (work, cols, 0);
    }

    // Shared-denominator weights: weight_i = nums[i] / denom.
    let mut denom = BigInt::one();
    for (_, w) in &work {
        denom = denom.lcm(w.denom());
    }
    let mut nums: Vec<BigInt> = work
        .iter()
        .map(|(_, w)| w.numer() * (&denom / w.denom()))
        .collect();

    while let Some(&f) = tab.free.first() {
        let mut z = phase!(1, tab.read_off(f));
        for (v, (_, s)) in z.iter_mut().zip(cols.iter()) {
            if !v.is_zero() && !s.is_one() {
                *v *= s;
            }
        }
        if !z.iter().any(|v| v.is_positive()) {
            for v in z.iter_mut() {
                if !v.is_zero() {
                    let neg = -&*v;
                    *v = neg;
                }
            }
        }
        // argmin of nums_i / z_i over z_i > 0, lowest point index on ties;
        // compared by cross-multiplication to stay in integers.
        let _scan_t = std::time::Instant::now();
        let mut best: Option<(BigInt, BigInt, usize, usize)> = None; // (num, den, point, idx)
        for (i, (point, _)) in work.iter().enumerate() {
            if !z[i].is_positive() {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bn, bd, bp, _)) => {
                    let lhs = &nums[i] * bd;
                    let rhs = bn * &z[i];
                    lhs < rhs || (lhs == rhs && *point < *bp)
                }
            };
            if better {
                best = Some((nums[i].clone(), z[i].clone(), *point, i));
            }
        }
        #[cfg(test)]
        PHASE_NANOS[2].fetch_add(
            _scan_t.elapsed().as_nanos() as u64,
            std::sync::atomic::Ordering::Relaxed,
        );
        let (ustar, zp, _, drop_idx) =
            best.expect("a nonzero kernel vector with a positive entry has a ratio");
        if !ustar.is_zero() {
            // nums_i/denom − (u*/(denom·zp))·z_i = (nums_i·zp − u*·z_i)/(denom·zp)
            for (u, zv) in nums.iter_mut().zip(z.iter()) {
                let v = &*u * &zp - &ustar * zv;
                *u = v;
            }
            denom *= &zp;
            if denom.bits() > 1 << 10 {
                phase!(3, joint_reduce(&mut nums, &mut denom));
            }
        }
        debug_assert!(nums[drop_idx].is_zero());
        debug_assert!(nums.iter().all(|u| !u.is_negative()));
        phase!(4, tab.delete_column(drop_idx));
        work.remove(drop_idx);
        nums.remove(drop_idx);
        cols.remove(drop_idx);
    }

    // Reassemble exact weights; simultaneous ratio ties leave zero weights
    // behind, which are off the measure either way.
    let mut out_atoms = Vec::with_capacity(work.len());
    let mut out_cols = Vec::with_capacity(cols.len());
    for (((point, _), u), col) in work.into_iter().zip(nums.into_iter()).zip(cols.into_iter()) {
        if !u.is_zero() {
            out_atoms.push((point, Rat::from_big(u, denom.clone())));
            out_cols.push(col);
        }
    }
    (out_atoms, out_cols, nsteps)
}

/// Prunes an atom list to at most `rank` survivors by divide and conquer:
/// halves are pruned independently (in parallel under rayon) and their
/// concatenation is pruned again. Splitting keeps every exact solve small,
/// bounds the arithmetic depth of any final weight logarithmically in the
/// input size, and lets each atom's column be evaluated exactly once.
fn prune_atoms<F>(
    column_of: &F,
    dim: usize,
    atoms: &[(usize, Rat)],
    chunk: usize,
) -> (Vec<(usize, Rat)>, usize)
where
    F: Fn(usize) -> IntColumn + Sync,
{
    let (out, _, steps) = prune_atoms_rec(column_of, dim, atoms, chunk);
    (out, steps)
}

fn prune_atoms_rec<F>(
    column_of: &F,
    dim: usize,
    atoms: &[(usize, Rat)],
    chunk: usize,
) -> (Vec<(usize, Rat)>, Vec<IntColumn>, usize)
where
    F: Fn(usize) -> IntColumn + Sync,
{
    if atoms.len() <= chunk {
        let columns = atoms.iter().map(|(p, _)| column_of(*p)).collect();
        return prune_block(dim, atoms.to_vec(), columns);
    }
    let mid = atoms.len() / 2;
    let ((mut latoms, mut lcols, lsteps), (ratoms, rcols, rsteps)) = rayon::join(
        || prune_atoms_rec(column_of, dim, &atoms[..mid], chunk),
        || prune_atoms_rec(column_of, dim, &atoms[mid..], chunk),
    );
    latoms.extend(ratoms);
    lcols.extend(rcols);
    let (out, cols, msteps) = prune_block(dim, latoms, lcols);
    (out, cols, lsteps + rsteps + msteps)
}

// Leaf size balancing the one-off elimination cost (quadratic in the
// nullity, which is roughly chunk − dim) against per-block overhead.
fn default_chunk(dim: usize) -> usize {
    (2 * (dim + 1)).max(8)
}

/// Reduces a measure to at most `rank(evaluation columns on its support)`
/// atoms with identical moments, exactly.
pub fn caratheodory_prune(system: &FunctionSystem, m: &AtomicMeasure) -> AtomicMeasure {
    caratheodory_prune_with_stats(system, m).0
}

/// Like [`caratheodory_prune`], also reporting the number of kernel steps.
pub fn caratheodory_prune_with_stats(
    system: &FunctionSystem,
    m: &AtomicMeasure,
) -> (AtomicMeasure, usize) {
    let column_of = |j: usize| scaled_integer_column(&system.eval_column(j));
    let dim = system.dim();
    let (atoms, steps) = prune_atoms(&column_of, dim, m.atoms(), default_chunk(dim));
    let out = AtomicMeasure::new(atoms).expect("pruned weights stay positive");
    debug_assert_eq!(out.moments(system), m.moments(system));
    (out, steps)
}

/// Exact monomial moments of a weighted cloud up to total degree `degree`.
pub fn cloud_moments(points: &[Vec<Rat>], weights: &[Rat], degree: usize) -> Vec<Rat> {
    let nvars = points.first().map_or(1, Vec::len);
    let exponents = space::monomial_exponents(nvars, degree);
    let mut out = vec![Rat::zero(); exponents.len()];
    for (p, w) in points.iter().zip(weights.iter()) {
        let pows = power_table(p, degree);
        for (acc, alpha) in out.iter_mut().zip(exponents.iter()) {
            let mut v = w.clone();
            for (i, &e) in alpha.iter().enumerate() {
                if e > 0 {
                    v *= &pows[i][e];
                }
            }
            *acc += v;
        }
    }
    out
}

/// Power table `coord^0 … coord^degree` per coordinate of a point.
fn power_table(point: &[Rat], degree: usize) -> Vec<Vec<Rat>> {
    point
        .iter()
        .map(|c| {
            let mut pows = Vec::with_capacity(degree + 1);
            pows.push(Rat::one());
            for e in 1..=degree {
                let next = &pows[e - 1] * c;
                pows.push(next);
            }
            pows
        })
        .collect()
}

/// Compresses a weighted point cloud to at most `dim 𝒫_degree` atoms drawn
/// from the cloud itself, preserving every monomial moment up to the given
/// total degree exactly.
///
/// The cloud is halved recursively: each half is compressed, the
/// concatenation is compressed again. The recursion keeps the arithmetic
/// dependency depth of any final weight logarithmic in the cloud size,
/// which keeps rational bit growth in check on large clouds; halves are
/// independent, so they run in parallel when `threads` allows.
pub fn compress_cloud(
    points: &[Vec<Rat>],
    weights: &[Rat],
    degree: usize,
    threads: Option<usize>,
) -> Result<AtomicMeasure> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty cloud".into()));
    }
    if points.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} points with {} weights",
            points.len(),
            weights.len()
        )));
    }
    let nvars = points[0].len();
    if nvars == 0 || points.iter().any(|p| p.len() != nvars) {
        return Err(Error::InvalidInput(
            "points must share a positive coordinate dimension".into(),
        ));
    }
    if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
        return Err(Error::InvalidInput(format!(
            "weight at cloud index {i} is not positive"
        )));
    }

    let exponents = space::monomial_exponents(nvars, degree);
    let dim = exponents.len();
    // Integer-scaled monomial column straight from the coordinates: with
    // numerators n_i and denominators d_i, the α-entry is
    // Π n_i^{α_i} · d_i^{degree − α_i}, a rescale of the monomial value by
    // the fixed factor Π d_i^{degree}. Integer coordinates take the pure
    // product path with no normalization at all.
    let column_of = move |j: usize| -> IntColumn {
        use num::{BigInt, One};
        let point = &points[j];
        let npows: Vec<Vec<BigInt>> = point
            .iter()
            .map(|c| {
                let mut pows = Vec::with_capacity(degree + 1);
                pows.push(BigInt::one());
                for e in 1..=degree {
                    let next = &pows[e - 1] * c.numer();
                    pows.push(next);
                }
                pows
            })
            .collect();
        let all_integer = point.iter().all(|c| c.denom().is_one());
        if all_integer {
            let col = exponents
                .iter()
                .map(|alpha| {
                    let mut v = BigInt::one();
                    for (i, &e) in alpha.iter().enumerate() {
                        if e > 0 {
                            v *= &npows[i][e];
                        }
                    }
                    v
                })
                .collect();
            return (col, BigInt::one());
        }
        let dpows: Vec<Vec<BigInt>> = point
            .iter()
            .map(|c| {
                let mut pows = Vec::with_capacity(degree + 1);
                pows.push(BigInt::one());
                for e in 1..=degree {
                    let next = &pows[e - 1] * c.denom();
                    pows.push(next);
                }
                pows
            })
            .collect();
        let scale = dpows.iter().fold(BigInt::one(), |acc, p| acc * &p[degree]);
        let col = exponents
            .iter()
            .map(|alpha| {
                let mut v = BigInt::one();
                for (i, &e) in alpha.iter().enumerate() {
                    v *= &npows[i][e];
                    v *= &dpows[i][degree - e];
                }
                v
            })
            .collect();
        (col, scale)
    };
    let atoms: Vec<(usize, Rat)> = weights.iter().cloned().enumerate().collect();

    let chunk = default_chunk(dim);
    let run = || prune_atoms(&column_of, dim, &atoms, chunk).0;
    let pruned = match threads {
        Some(1) => run(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    AtomicMeasure::new(pruned)
}

/// Exposes the direct feasibility solve with its basic-solution structure,
/// for callers that want the raw LP outcome.
pub fn representation_lp(system: &FunctionSystem, l: &Functional, view: &SubsetView) -> LpResult {
    let cols: Vec<usize> = view.iter().collect();
    let rows: Vec<Vec<Rat>> = (0..system.dim())
        .map(|i| cols.iter().map(|&j| system.evals().at(i, j).clone()).collect())
        .collect();
    let objective = vec![Rat::zero(); cols.len()];
    simplex(&objective, &rows, l.coeffs())
}


#[cfg(test)]
mod bench {
    use super::*;
    use num::BigInt;
    use std::time::Instant;

    #[test]
    #[ignore]
    fn bench_prune_profile() {
        // 2-var degree-4 columns over random integer coords, timed per phase.
        let exps = crate::space::monomial_exponents(2, 4);
        let dim = exps.len();
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 33) % 101) as i64 - 50
        };
        let n = 8192usize;
        let points: Vec<Vec<Rat>> = (0..n)
            .map(|_| vec![Rat::from_int(next()), Rat::from_int(next())])
            .collect();
        let column_of = |j: usize| -> IntColumn {
            let col: Vec<Rat> = exps
                .iter()
                .map(|a| crate::space::eval_monomial(a, &points[j]))
                .collect();
            scaled_integer_column(&col)
        };
        let atoms: Vec<(usize, Rat)> =
            (0..n).map(|j| (j, Rat::new(1 + (j as i64 % 7), 7))).collect();

        let t0 = Instant::now();
        let cols: Vec<IntColumn> = (0..n).map(column_of).collect();
        eprintln!("column eval+scale: {:?}", t0.elapsed());

        let t1 = Instant::now();
        let mut kcount = 0usize;
        for chunk in cols.chunks(32) {
            let refs: Vec<&[BigInt]> = chunk.iter().map(|(c, _)| c.as_slice()).collect();
            kcount += integer_kernel(&refs, dim).len();
        }
        eprintln!("kernel per 32-chunk: {:?} ({kcount} vectors)", t1.elapsed());

        let t2 = Instant::now();
        let (out, steps) = prune_atoms(&column_of, dim, &atoms, 32);
        eprintln!(
            "full prune chunk=32: {:?} ({} atoms, {} steps)",
            t2.elapsed(),
            out.len(),
            steps
        );
        let p: Vec<u64> = PHASE_NANOS
            .iter()
            .map(|a| a.load(std::sync::atomic::Ordering::Relaxed) / 1_000_000)
            .collect();
        eprintln!(
            "phases ms: tableau={} readoff={} scan={} joint_reduce={} delete={}",
            p[0], p[1], p[2], p[3], p[4]
        );
    }
}
