//! Exact-pivot linear programming.
//!
//! The kernel solves `maximize c·x  s.t.  A·x = b, x ≥ 0` by two-phase
//! simplex over rationals with Bland's lowest-index rule for both the
//! entering and the leaving variable. Lowest-index pivoting guarantees
//! finite termination and makes every answer reproducible; a basic optimal
//! point is supported on at most as many variables as there are equality
//! rows, which is what realizes the Carathéodory atom-count bounds
//! elsewhere in the crate.

use super::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of an LP solve. `Infeasible` and `Unbounded` are results, not errors.
#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    /// Satisfies every constraint exactly when present.
    pub point: Option<Vec<Rat>>,
    pub objective: Option<Rat>,
    /// Indices of the basic columns of the optimal basis, ascending.
    pub basis: Option<Vec<usize>>,
}

impl LpResult {
    fn infeasible() -> Self {
        LpResult {
            status: LpStatus::Infeasible,
            point: None,
            objective: None,
            basis: None,
        }
    }

    fn unbounded() -> Self {
        LpResult {
            status: LpStatus::Unbounded,
            point: None,
            objective: None,
            basis: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveStats {
    pub pivots: usize,
}

struct Tableau {
    ncols: usize,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    objrow: Vec<Rat>,
    pivots: usize,
}

impl Tableau {
    /// Installs reduced costs for objective `c`, eliminating basic columns.
    fn set_objective(&mut self, c: &[Rat]) {
        let mut objrow = c.to_vec();
        objrow.resize(self.ncols, Rat::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            if objrow[b].is_zero() {
                continue;
            }
            let factor = objrow[b].clone();
            for j in 0..self.ncols {
                let v = &objrow[j] - &factor * &self.rows[r][j];
                objrow[j] = v;
            }
        }
        self.objrow = objrow;
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let inv = self.rows[r][j].recip();
        for v in self.rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        self.rhs[r] = &self.rhs[r] * &inv;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][j].is_zero() {
                continue;
            }
            let factor = self.rows[i][j].clone();
            for c in 0..self.ncols {
                let v = &self.rows[i][c] - &factor * &self.rows[r][c];
                self.rows[i][c] = v;
            }
            let v = &self.rhs[i] - &factor * &self.rhs[r];
            self.rhs[i] = v;
        }
        if !self.objrow[j].is_zero() {
            let factor = self.objrow[j].clone();
            for c in 0..self.ncols {
                let v = &self.objrow[c] - &factor * &self.rows[r][c];
                self.objrow[c] = v;
            }
        }
        self.basis[r] = j;
        self.pivots += 1;
    }

    /// Runs simplex to optimality with Bland's rule. Returns false on
    /// unboundedness.
    fn run(&mut self) -> bool {
        loop {
            // Entering: lowest-index non-basic column with positive reduced cost.
            let entering = (0..self.ncols)
                .find(|&j| !self.basis.contains(&j) && self.objrow[j].is_positive());
            let Some(j) = entering else {
                return true;
            };
            // Leaving: minimum ratio, ties broken by lowest basic variable index.
            let mut best: Option<(Rat, usize, usize)> = None; // (ratio, basis var, row)
            for r in 0..self.rows.len() {
                if !self.rows[r][j].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][j];
                let key = (ratio, self.basis[r], r);
                best = match best {
                    None => Some(key),
                    Some(cur) => {
                        if (&key.0, key.1) < (&cur.0, cur.1) {
                            Some(key)
                        } else {
                            Some(cur)
                        }
                    }
                };
            }
            let Some((_, _, r)) = best else {
                return false;
            };
            self.pivot(r, j);
            let budget = 50 * (self.rows.len() + self.ncols).pow(2) + 1000;
            assert!(
                self.pivots <= budget,
                "simplex exceeded its pivot budget; Bland's rule should make this unreachable"
            );
        }
    }

    fn objective_value(&self, c: &[Rat]) -> Rat {
        self.basis
            .iter()
            .zip(self.rhs.iter())
            .filter(|(&b, _)| b < c.len())
            .fold(Rat::zero(), |acc, (&b, v)| acc + &c[b] * v)
    }
}

/// Maximizes `c·x` subject to `rows·x = rhs`, `x ≥ 0`.
pub fn simplex(objective: &[Rat], rows: &[Vec<Rat>], rhs: &[Rat]) -> LpResult {
    simplex_with_stats(objective, rows, rhs).0
}

pub fn simplex_with_stats(
    objective: &[Rat],
    rows: &[Vec<Rat>],
    rhs: &[Rat],
) -> (LpResult, SolveStats) {
    let n = objective.len();
    let m = rows.len();
    assert_eq!(rhs.len(), m, "rhs length mismatch");
    for row in rows {
        assert_eq!(row.len(), n, "constraint row length mismatch");
    }

    // Phase 1 tableau: one artificial column per row, rhs normalized to ≥ 0.
    let mut trows = Vec::with_capacity(m);
    let mut trhs = Vec::with_capacity(m);
    for (row, b) in rows.iter().zip(rhs.iter()) {
        let flip = b.is_negative();
        let mut full = Vec::with_capacity(n + m);
        full.extend(row.iter().map(|v| if flip { -v } else { v.clone() }));
        full.resize(n + m, Rat::zero());
        trows.push(full);
        trhs.push(if flip { -b } else { b.clone() });
    }
    for (r, row) in trows.iter_mut().enumerate() {
        row[n + r] = Rat::one();
    }
    let mut t = Tableau {
        ncols: n + m,
        rows: trows,
        rhs: trhs,
        basis: (n..n + m).collect(),
        objrow: Vec::new(),
        pivots: 0,
    };

    let mut phase1_obj = vec![Rat::zero(); n + m];
    for v in phase1_obj.iter_mut().skip(n) {
        *v = -Rat::one();
    }
    t.set_objective(&phase1_obj);
    let bounded = t.run();
    debug_assert!(bounded, "phase 1 is bounded by construction");
    if t.objective_value(&phase1_obj).is_negative() {
        return (LpResult::infeasible(), SolveStats { pivots: t.pivots });
    }

    // Drive remaining artificials out of the basis; rows that cannot pivot
    // on any structural column are redundant and get dropped.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            let col = (0..n).find(|&j| !t.rows[r][j].is_zero());
            match col {
                Some(j) => t.pivot(r, j),
                None => {
                    t.rows.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }
    for row in t.rows.iter_mut() {
        row.truncate(n);
    }
    t.ncols = n;

    t.set_objective(objective);
    if !t.run() {
        return (LpResult::unbounded(), SolveStats { pivots: t.pivots });
    }

    let mut point = vec![Rat::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        point[b] = t.rhs[r].clone();
    }
    let mut basis = t.basis.clone();
    basis.sort_unstable();
    let objective_value = t.objective_value(objective);
    (
        LpResult {
            status: LpStatus::Optimal,
            point: Some(point),
            objective: Some(objective_value),
            basis: Some(basis),
        },
        SolveStats { pivots: t.pivots },
    )
}

/// General-form problem over free variables, lowered to standard form.
///
/// Free variables are split `x = u − v`; every `≥` row gets a slack. All
/// derived quantities are reported in the original variables.
pub struct LpBuilder {
    n: usize,
    objective: Vec<Rat>,
    eqs: Vec<(Vec<Rat>, Rat)>,
    ges: Vec<(Vec<Rat>, Rat)>,
}

impl LpBuilder {
    pub fn new(n: usize) -> Self {
        LpBuilder {
            n,
            objective: vec![Rat::zero(); n],
            eqs: Vec::new(),
            ges: Vec::new(),
        }
    }

    pub fn maximize(&mut self, c: Vec<Rat>) -> &mut Self {
        assert_eq!(c.len(), self.n);
        self.objective = c;
        self
    }

    pub fn eq(&mut self, row: Vec<Rat>, rhs: Rat) -> &mut Self {
        assert_eq!(row.len(), self.n);
        self.eqs.push((row, rhs));
        self
    }

    pub fn ge(&mut self, row: Vec<Rat>, rhs: Rat) -> &mut Self {
        assert_eq!(row.len(), self.n);
        self.ges.push((row, rhs));
        self
    }

    pub fn le(&mut self, row: Vec<Rat>, rhs: Rat) -> &mut Self {
        let row = row.into_iter().map(|v| -v).collect();
        self.ge(row, -rhs)
    }

    pub fn solve(&self) -> LpResult {
        let n = self.n;
        let nge = self.ges.len();
        let ncols = 2 * n + nge;
        let lower = |row: &[Rat], slack: Option<usize>| -> Vec<Rat> {
            let mut out = Vec::with_capacity(ncols);
            out.extend(row.iter().cloned());
            out.extend(row.iter().map(|v| -v));
            let mut tail = vec![Rat::zero(); nge];
            if let Some(s) = slack {
                tail[s] = -Rat::one();
            }
            out.extend(tail);
            out
        };

        let mut rows = Vec::with_capacity(self.eqs.len() + nge);
        let mut rhs = Vec::with_capacity(self.eqs.len() + nge);
        for (row, b) in &self.eqs {
            rows.push(lower(row, None));
            rhs.push(b.clone());
        }
        for (s, (row, b)) in self.ges.iter().enumerate() {
            rows.push(lower(row, Some(s)));
            rhs.push(b.clone());
        }
        let objective = lower(&self.objective, None);

        let mut res = simplex(&objective, &rows, &rhs);
        if let Some(std_point) = res.point.take() {
            let point: Vec<Rat> = (0..n)
                .map(|i| &std_point[i] - &std_point[n + i])
                .collect();
            res.point = Some(point);
        }
        res
    }
}
