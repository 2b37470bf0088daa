//! Acceptance suite: one test per criterion, each ending with a single
//! `criterion N: PASS` line (failures panic with a FAIL line instead).
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//!
//! One check is expected to fail and is kept failing on purpose:
//! `criterion2_staircase_chain_length_equality` pins a chain-length target
//! for the staircase generator that is provably unattainable on finite
//! ground sets — see the assertion message and the README for the argument.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use corevariety::corevar::{
    core_variety, decide, make_staircase, DecisionStatus,
};
use corevariety::exact::{LpStatus, Mat, Rat};
use corevariety::extend::{
    u_positivity_witness, v_positive_extension, tower_core_variety, tower_decide,
    ExtensionProblem, TowerSpec,
};
use corevariety::faces::{
    exposed_bruteforce, face_of, finite_fastpath, in_relint, is_exposed, member, FastpathClass,
};
use corevariety::measure::{
    caratheodory_prune_with_stats, cloud_moments, compress_cloud, cover_point, extract,
    representation_lp, AtomicMeasure,
};
use corevariety::space::{FunctionSystem, Functional};

fn r(n: i64) -> Rat {
    Rat::from_int(n)
}

fn small_rat(rng: &mut StdRng) -> Rat {
    Rat::new(rng.random_range(-3..=3), rng.random_range(1..=2))
}

/// Random system with constants in the basis (so a strictly positive
/// function always exists), independent rows, small rational entries.
fn random_system(rng: &mut StdRng) -> FunctionSystem {
    loop {
        let npoints = rng.random_range(2..=8usize);
        let dim = rng.random_range(2..=5usize.min(npoints));
        let mut rows = vec![vec![Rat::one(); npoints]];
        for _ in 1..dim {
            rows.push((0..npoints).map(|_| small_rat(rng)).collect());
        }
        let labels = (0..npoints).map(|j| format!("s{j}")).collect();
        if let Ok(sys) = FunctionSystem::from_matrix(labels, Mat::from_rows(rows)) {
            return sys;
        }
    }
}

/// A conic combination of point evaluations with the given support size:
/// representable by construction.
fn random_representable(rng: &mut StdRng, sys: &FunctionSystem) -> Functional {
    let natoms = rng.random_range(1..=sys.npoints());
    let mut coeffs = vec![Rat::zero(); sys.dim()];
    for _ in 0..natoms {
        let j = rng.random_range(0..sys.npoints());
        let w = Rat::new(rng.random_range(1..=4), rng.random_range(1..=2));
        for (c, v) in coeffs.iter_mut().zip(sys.eval_column(j)) {
            *c += &w * &v;
        }
    }
    sys.functional(coeffs).unwrap()
}

/// Arbitrary nonzero functional with small rational coordinates.
fn random_functional(rng: &mut StdRng, sys: &FunctionSystem) -> Functional {
    loop {
        let coeffs: Vec<Rat> = (0..sys.dim())
            .map(|_| Rat::new(rng.random_range(-4..=4), rng.random_range(1..=3)))
            .collect();
        if coeffs.iter().any(|c| !c.is_zero()) {
            return sys.functional(coeffs).unwrap();
        }
    }
}

fn representable_via_lp(sys: &FunctionSystem, l: &Functional) -> bool {
    representation_lp(sys, l, &sys.full_view()).status == LpStatus::Optimal
}

/// The five-point indicator-of-origin instance.
fn indicator_instance() -> (FunctionSystem, Functional) {
    let labels = ["-1", "-1/2", "0", "1/2", "1"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let evals = Mat::from_i64(&[&[0, 0, 1, 0, 0], &[1, 1, 0, 1, 1]]);
    let sys = FunctionSystem::from_matrix(labels, evals).unwrap();
    let l = sys.functional(vec![r(0), r(2)]).unwrap();
    (sys, l)
}

/// Grid port of the weak-hypothesis instance on [-1, 2].
fn weak_instance() -> (FunctionSystem, Functional) {
    let labels = ["-1", "-1/2", "0", "1/2", "1", "3/2", "2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let evals = Mat::from_i64(&[
        &[0, 0, 1, 0, 0, 0, 0],
        &[1, 1, 1, 1, 1, -1, -1],
        &[1, 0, 0, 0, 0, 0, 0],
    ]);
    let sys = FunctionSystem::from_matrix(labels, evals).unwrap();
    let l = sys.functional(vec![r(0), r(2), r(1)]).unwrap();
    (sys, l)
}

/// Criterion 1 — existence decisions agree with the direct conic
/// feasibility solve on 5000 random instances, exactly.
#[test]
fn criterion1_oracle_equivalence() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE01);
    let mut has = 0usize;
    for trial in 0..5000 {
        let sys = random_system(&mut rng);
        let l = if trial % 2 == 0 {
            random_representable(&mut rng, &sys)
        } else {
            random_functional(&mut rng, &sys)
        };
        if l.is_zero() {
            continue;
        }
        let d = decide(&sys, &l);
        let decided = d.status == DecisionStatus::HasMeasure && !d.sign_flipped;
        let oracle = representable_via_lp(&sys, &l);
        assert_eq!(
            decided, oracle,
            "criterion 1: FAIL — disagreement at trial {trial} (status {:?}, flipped {})",
            d.status, d.sign_flipped
        );
        if oracle {
            has += 1;
        }
    }
    println!("criterion 1: PASS — 5000 instances, 0 disagreements ({has} representable)");
}

/// Criterion 2a — the stabilization index never exceeds dim V − 1, on the
/// random suite and on staircase instances.
#[test]
fn criterion2_termination_bound() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE02);
    for _ in 0..5000 {
        let sys = random_system(&mut rng);
        let l = random_functional(&mut rng, &sys);
        if l.is_zero() {
            continue;
        }
        let trace = core_variety(&sys, &l);
        assert!(
            trace.stabilized_at <= sys.dim() - 1,
            "criterion 2: FAIL — stabilized_at {} exceeds dim-1 {}",
            trace.stabilized_at,
            sys.dim() - 1
        );
    }
    for k in 1..=8usize {
        let (sys, l) = make_staircase(k);
        let trace = core_variety(&sys, &l);
        assert!(trace.stabilized_at <= sys.dim() - 1);
    }
    println!("criterion 2: PASS — stabilization bound dim V - 1 held on 5000 random + 8 staircase instances");
}

/// Criterion 2b — staircase instances are pinned to chain length
/// `dim V − 1 = k + 1` exactly. This is *provably unattainable* on a finite
/// ground set, and the check is kept failing rather than weakened:
///
/// after the first strict shrink with relative-interior witness F (strictly
/// positive on every removed point), any kernel element p that is
/// nonnegative on the survivors becomes globally nonnegative after adding
/// `max_removed(-p/F) · F` — a finite maximum because the ground set is
/// finite — so p already vanishes on the survivors and the second iterate
/// equals the first. Every chain therefore stabilizes at index ≤ 1, while
/// this check demands k + 1 ≥ 2. Chains longer than one strict step exist
/// only over infinite ground sets, where that maximum can be unbounded.
#[test]
fn criterion2_staircase_chain_length_equality() {
    for k in 1..=8usize {
        let (sys, l) = make_staircase(k);
        let trace = core_variety(&sys, &l);
        assert_eq!(
            trace.stabilized_at,
            sys.dim() - 1,
            "criterion 2 (staircase equality): FAIL, and provably so on finite ground sets — \
             the iteration stabilizes after one strict shrink (got {}, demanded {}); \
             see this test's doc comment and the README",
            trace.stabilized_at,
            sys.dim() - 1
        );
    }
    println!("criterion 2 (staircase equality): PASS");
}

/// Criterion 3 — extracted supports live inside the core variety, and every
/// core point is covered by some representing measure.
#[test]
fn criterion3_union_of_supports() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE03);
    let mut checked = 0usize;
    let mut covers = 0usize;
    while checked < 500 {
        let sys = random_system(&mut rng);
        let l = random_representable(&mut rng, &sys);
        if l.is_zero() {
            continue;
        }
        let d = decide(&sys, &l);
        if d.status != DecisionStatus::HasMeasure || d.sign_flipped {
            continue;
        }
        let core = d.trace.core().clone();
        let m = extract(&sys, &l).expect("criterion 3: FAIL — extraction refused");
        assert!(
            m.support().iter().all(|j| core.contains(*j)),
            "criterion 3: FAIL — extracted atom outside the core variety"
        );
        assert!(m.represents(&sys, &l));
        for j in core.iter() {
            let label = sys.ground().labels()[j].clone();
            let cm = cover_point(&sys, &l, &label)
                .expect("criterion 3: FAIL — cover_point refused a core point");
            assert!(
                cm.support().contains(&j),
                "criterion 3: FAIL — cover measure misses the requested point"
            );
            assert!(
                cm.represents(&sys, &l),
                "criterion 3: FAIL — cover measure moments mismatch"
            );
            assert!(cm.support().iter().all(|s| core.contains(*s)));
            covers += 1;
        }
        checked += 1;
    }
    println!("criterion 3: PASS — 500 instances, {covers} cover measures, 0 failures");
}

/// Criterion 4 — compress a 100000-point two-variable cloud at degree 4 to
/// at most 15 atoms with every moment preserved exactly, within 60 seconds.
#[test]
fn criterion4_cloud_compression() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE04);
    let n = 100_000usize;
    let points: Vec<Vec<Rat>> = (0..n)
        .map(|_| {
            vec![
                r(rng.random_range(-50..=50)),
                r(rng.random_range(-50..=50)),
            ]
        })
        .collect();
    let weights: Vec<Rat> = (0..n)
        .map(|_| Rat::new(rng.random_range(1..=9), 7))
        .collect();

    let start = Instant::now();
    let m = compress_cloud(&points, &weights, 4, None).unwrap();
    let elapsed = start.elapsed();

    assert!(
        m.len() <= 15,
        "criterion 4: FAIL — {} atoms exceed dim P_4 = 15",
        m.len()
    );
    let expected = cloud_moments(&points, &weights, 4);
    let sub_points: Vec<Vec<Rat>> = m.atoms().iter().map(|(j, _)| points[*j].clone()).collect();
    let sub_weights: Vec<Rat> = m.atoms().iter().map(|(_, w)| w.clone()).collect();
    assert_eq!(
        cloud_moments(&sub_points, &sub_weights, 4),
        expected,
        "criterion 4: FAIL — nonzero moment residual"
    );
    assert!(
        elapsed.as_secs() <= 60,
        "criterion 4: FAIL — took {:.1}s (> 60s)",
        elapsed.as_secs_f64()
    );
    println!(
        "criterion 4: PASS — 100000 points -> {} atoms, 15/15 moments exact, {:.1}s",
        m.len(),
        elapsed.as_secs_f64()
    );
}

/// Criterion 5 — the anchored instances reproduce their published sets.
#[test]
fn criterion5_anchored_instances() {
    // Indicator grid: core is everything but the origin; any two distinct
    // nonzero points support a 2-atomic representing measure.
    let (sys, l) = indicator_instance();
    let d = decide(&sys, &l);
    assert_eq!(d.status, DecisionStatus::HasMeasure);
    let core: BTreeSet<usize> = d.trace.core().iter().collect();
    assert_eq!(core, BTreeSet::from([0, 1, 3, 4]), "criterion 5: FAIL — indicator core");
    for a in [0usize, 1, 3, 4] {
        for b in [0usize, 1, 3, 4] {
            if a >= b {
                continue;
            }
            // Mass 2 split across the pair reproduces L exactly.
            let m = AtomicMeasure::new(vec![(a, r(1)), (b, r(1))]).unwrap();
            assert!(
                m.represents(&sys, &l),
                "criterion 5: FAIL — pair ({a},{b}) is not a representing measure"
            );
        }
    }

    // Four faces: cores S, S∖{0}, {0}, and the empty face of the zero
    // functional.
    let origin = sys.point_evaluation("0").unwrap();
    let both = l.add(&origin);
    let f_both = face_of(&sys, &both).unwrap();
    assert_eq!(f_both.core, sys.full_view());
    let f_l = face_of(&sys, &l).unwrap();
    assert_eq!(
        f_l.core.iter().collect::<BTreeSet<_>>(),
        BTreeSet::from([0, 1, 3, 4])
    );
    let f_o = face_of(&sys, &origin).unwrap();
    assert_eq!(f_o.core.iter().collect::<BTreeSet<_>>(), BTreeSet::from([2]));
    let zero = sys.functional(vec![r(0), r(0)]).unwrap();
    let zero_trace = core_variety(&sys, &zero);
    assert!(zero_trace.core().is_empty(), "criterion 5: FAIL — zero face");

    // Weak-hypothesis instance: no strictly positive function, the weak
    // terminal condition holds, core is S∖{0}, and measures exist.
    let (wsys, wl) = weak_instance();
    let wd = decide(&wsys, &wl);
    assert_eq!(wd.status, DecisionStatus::HasMeasure);
    assert_eq!(
        corevariety::io::hypothesis_str(wd.hypothesis),
        "weak-terminal",
        "criterion 5: FAIL — expected the weak hypothesis"
    );
    let wcore: BTreeSet<usize> = wd.trace.core().iter().collect();
    assert_eq!(wcore, BTreeSet::from([0, 1, 3, 4, 5, 6]));
    let rho = wd.rho.clone().expect("weak witness present");
    let values = wsys.values(&rho);
    assert!(wd.trace.core().iter().all(|j| !values[j].is_negative()));
    assert!(wd.trace.core().iter().any(|j| values[j].is_positive()));
    assert!(!wl.apply(&rho).is_negative());
    let wm = extract(&wsys, &wl).unwrap();
    assert!(wm.represents(&wsys, &wl));
    assert!(!wm.support().contains(&2));

    println!("criterion 5: PASS — indicator grid, four faces, and weak-hypothesis instance all reproduce their sets");
}

/// Criterion 6 — facial machinery: exposedness agrees with the polyhedral
/// brute force on small instances, relative-interior equality partitions
/// representable functionals by core, and faces are closed under summands.
#[test]
fn criterion6_facial_consistency() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE06);

    // Exposedness cross-validation on exhaustive small families.
    let mut exposed_checked = 0usize;
    let mut small_systems: Vec<FunctionSystem> = vec![
        FunctionSystem::from_matrix(
            vec!["a".into(), "b".into(), "c".into()],
            Mat::identity(3),
        )
        .unwrap(),
        FunctionSystem::monomial_grid(1, 2, &[r(-1), r(0), r(1)]).unwrap(),
        FunctionSystem::monomial_grid(1, 1, &[r(-1), r(0), r(1), r(2)]).unwrap(),
        indicator_instance().0,
    ];
    for _ in 0..6 {
        // A few random small systems keep the family honest.
        loop {
            let npoints = rng.random_range(2..=5usize);
            let dim = rng.random_range(2..=3usize.min(npoints));
            let mut rows = vec![vec![Rat::one(); npoints]];
            for _ in 1..dim {
                rows.push((0..npoints).map(|_| small_rat(&mut rng)).collect());
            }
            let labels = (0..npoints).map(|j| format!("s{j}")).collect();
            if let Ok(sys) = FunctionSystem::from_matrix(labels, Mat::from_rows(rows)) {
                small_systems.push(sys);
                break;
            }
        }
    }
    for sys in &small_systems {
        // Exhaustive small functional lattice: all conic 0/1/2-combinations
        // of up to two evaluations, plus each single evaluation.
        let mut candidates: Vec<Functional> = Vec::new();
        for j in 0..sys.npoints() {
            candidates.push(sys.functional(sys.eval_column(j)).unwrap());
            for k in j..sys.npoints() {
                for (wa, wb) in [(1i64, 1i64), (2, 1), (1, 2)] {
                    let mut coeffs = vec![Rat::zero(); sys.dim()];
                    for (c, v) in coeffs.iter_mut().zip(sys.eval_column(j)) {
                        *c += &r(wa) * &v;
                    }
                    for (c, v) in coeffs.iter_mut().zip(sys.eval_column(k)) {
                        *c += &r(wb) * &v;
                    }
                    candidates.push(sys.functional(coeffs).unwrap());
                }
            }
        }
        for l in candidates {
            if l.is_zero() {
                continue;
            }
            let d = decide(&sys.clone(), &l);
            if d.status != DecisionStatus::HasMeasure || d.sign_flipped {
                continue;
            }
            let fast = is_exposed(sys, &l).unwrap();
            let brute = exposed_bruteforce(sys, d.trace.core());
            assert_eq!(
                fast, brute,
                "criterion 6: FAIL — exposedness mismatch on a small instance"
            );
            exposed_checked += 1;
        }
    }

    // Partition of 200 random representable functionals by core variety.
    let sys = random_system(&mut rng);
    let mut classes: Vec<(BTreeSet<usize>, Functional)> = Vec::new();
    let mut sampled = 0usize;
    while sampled < 200 {
        let l = random_representable(&mut rng, &sys);
        if l.is_zero() {
            continue;
        }
        let d = decide(&sys, &l);
        if d.status != DecisionStatus::HasMeasure || d.sign_flipped {
            continue;
        }
        let core: BTreeSet<usize> = d.trace.core().iter().collect();
        let mut matched = 0usize;
        for (class_core, representative) in &classes {
            let eq = in_relint(&sys, &l, representative).unwrap();
            assert_eq!(
                eq,
                *class_core == core,
                "criterion 6: FAIL — relint equality disagrees with core equality"
            );
            if eq {
                matched += 1;
            }
        }
        assert!(matched <= 1, "criterion 6: FAIL — functional in two classes");
        if matched == 0 {
            classes.push((core, l));
        }
        sampled += 1;
    }

    // Face axiom: a sum landing in a face drags both summands in.
    let mut axiom_checked = 0usize;
    for _ in 0..200 {
        let l = random_representable(&mut rng, &sys);
        let l1 = random_representable(&mut rng, &sys);
        let l2 = random_representable(&mut rng, &sys);
        if l.is_zero() || l1.is_zero() || l2.is_zero() {
            continue;
        }
        let face = match face_of(&sys, &l) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let sum = l1.add(&l2);
        if member(&sys, &sum, &face) {
            assert!(
                member(&sys, &l1, &face) && member(&sys, &l2, &face),
                "criterion 6: FAIL — face axiom violated"
            );
            axiom_checked += 1;
        }
    }

    println!(
        "criterion 6: PASS — {exposed_checked} exposedness cross-checks, {} relint classes over 200 functionals, {axiom_checked} face-axiom sums",
        classes.len()
    );
}

/// Criterion 7 — the one-shot classification against the first iterate's
/// cone agrees with running the iteration out, on 1000 instances.
#[test]
fn criterion7_fastpath_agreement() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE07);
    let mut counts = [0usize; 3];
    let mut trials = 0usize;
    while trials < 1000 {
        let sys = random_system(&mut rng);
        let mut l = if trials % 2 == 0 {
            random_representable(&mut rng, &sys)
        } else {
            random_functional(&mut rng, &sys)
        };
        // Positive mass keeps the outside case of the classification sound.
        if !l.coeffs()[0].is_positive() {
            let mut coeffs = l.coeffs().to_vec();
            coeffs[0] = coeffs[0].abs() + Rat::one();
            l = sys.functional(coeffs).unwrap();
        }
        if l.is_zero() {
            continue;
        }
        let fp = finite_fastpath(&sys, &l, &sys.full_view());
        let trace = core_variety(&sys, &l);
        assert_eq!(
            &fp.core,
            trace.core(),
            "criterion 7: FAIL — fast path predicted a different core (class {:?})",
            fp.class
        );
        counts[match fp.class {
            FastpathClass::Interior => 0,
            FastpathClass::Boundary => 1,
            FastpathClass::Outside => 2,
        }] += 1;
        trials += 1;
    }
    println!(
        "criterion 7: PASS — 1000 instances agree (interior {}, boundary {}, outside {})",
        counts[0], counts[1], counts[2]
    );
}

/// Criterion 8 — positive extension with the full space agrees with the
/// existence decision; proper subspaces round-trip exactly on success and
/// carry an independently verified separating function on failure.
#[test]
fn criterion8_extension_equivalence() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE08);
    let mut successes = 0usize;
    let mut refusals = 0usize;
    for trial in 0..1000 {
        let sys = random_system(&mut rng);
        let l = if trial % 2 == 0 {
            random_representable(&mut rng, &sys)
        } else {
            random_functional(&mut rng, &sys)
        };
        if l.is_zero() {
            continue;
        }

        // U = V: agreement with decide.
        let full_problem =
            ExtensionProblem::new(&sys, (0..sys.dim()).collect(), l.coeffs().to_vec()).unwrap();
        let ext = v_positive_extension(&sys, &full_problem).unwrap();
        let d = decide(&sys, &l);
        let decided = d.status == DecisionStatus::HasMeasure && !d.sign_flipped;
        assert_eq!(
            ext.is_some(),
            decided,
            "criterion 8: FAIL — full-space extension disagrees with decide at trial {trial}"
        );

        // Proper subspace: a strict prefix of the basis rows.
        let sub_dim = rng.random_range(1..sys.dim());
        let sub_rows: Vec<usize> = (0..sub_dim).collect();
        let l_sub: Vec<Rat> = sub_rows.iter().map(|&i| l.coeffs()[i].clone()).collect();
        let problem = ExtensionProblem::new(&sys, sub_rows.clone(), l_sub.clone()).unwrap();
        match v_positive_extension(&sys, &problem).unwrap() {
            Some((extension, measure)) => {
                assert_eq!(
                    problem.restrict(&extension),
                    l_sub,
                    "criterion 8: FAIL — extension does not restrict to the input"
                );
                assert!(
                    measure.represents(&sys, &extension),
                    "criterion 8: FAIL — extension measure mismatch"
                );
                successes += 1;
            }
            None => {
                let witness = u_positivity_witness(&sys, &problem)
                    .expect("criterion 8: FAIL — refusal without separating function");
                // Independent verification by direct evaluation: the witness
                // is nonnegative on every point and negative under L.
                for j in 0..sys.npoints() {
                    let value = sub_rows
                        .iter()
                        .zip(witness.iter())
                        .fold(Rat::zero(), |acc, (&row, w)| {
                            acc + w * sys.evals().at(row, j)
                        });
                    assert!(
                        !value.is_negative(),
                        "criterion 8: FAIL — separating function negative on the ground set"
                    );
                }
                let pairing = Rat::dot(&witness, &l_sub);
                assert!(
                    pairing.is_negative(),
                    "criterion 8: FAIL — separating function does not separate"
                );
                refusals += 1;
            }
        }
    }
    println!(
        "criterion 8: PASS — 1000 instances ({successes} subspace extensions, {refusals} certified refusals)"
    );
}

/// Criterion 9 — truncation towers have nested per-level core varieties
/// whose intersection matches the tower computation.
#[test]
fn criterion9_tower_nesting() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE09);
    let mut towers = 0usize;
    while towers < 200 {
        let sys = random_system(&mut rng);
        if sys.dim() < 3 {
            continue;
        }
        let top = if towers % 2 == 0 {
            random_representable(&mut rng, &sys)
        } else {
            random_functional(&mut rng, &sys)
        };
        if top.is_zero() {
            continue;
        }
        // Nested prefixes of the basis rows, 3 to min(5, dim) levels.
        let max_levels = 3.max(sys.dim().min(5));
        let nlevels = rng.random_range(3..=max_levels);
        let mut sizes: Vec<usize> = (1..sys.dim()).collect();
        // Choose nlevels - 1 distinct strict sizes plus the full space.
        let mut levels: Vec<Vec<usize>> = Vec::new();
        while sizes.len() > nlevels - 1 {
            sizes.remove(rng.random_range(0..sizes.len()));
        }
        for &s in &sizes {
            levels.push((0..s).collect());
        }
        levels.push((0..sys.dim()).collect());
        let spec = match TowerSpec::new(&sys, levels) {
            Ok(s) => s,
            Err(_) => continue,
        };

        let (intersection, cores) = tower_core_variety(&sys, &top, &spec).unwrap();
        for w in cores.windows(2) {
            assert!(
                w[1].is_subset(&w[0]),
                "criterion 9: FAIL — deeper level escaped its predecessor"
            );
        }
        let mut expect = sys.full_view();
        for core in &cores {
            expect = expect.intersection(core);
        }
        assert_eq!(
            intersection, expect,
            "criterion 9: FAIL — intersection mismatch"
        );
        // Per-level decisions are consistent with the overall verdict.
        let report = tower_decide(&sys, &top, &spec).unwrap();
        let all_levels_ok = report
            .levels
            .iter()
            .all(|lr| lr.status == DecisionStatus::HasMeasure && !lr.sign_flipped);
        assert_eq!(report.overall_has_measure, all_levels_ok);
        towers += 1;
    }
    println!("criterion 9: PASS — 200 towers nested and intersected consistently");
}

/// Compression invariants at the measure level, exercised alongside the
/// acceptance criteria: pruning preserves moments exactly and never uses
/// more kernel steps than input atoms.
#[test]
fn prune_progress_and_exactness() {
    let mut rng = StdRng::seed_from_u64(0xC0FFEE0A);
    for _ in 0..50 {
        let npoints = rng.random_range(6..=60usize);
        let axis: Vec<Rat> = (0..npoints).map(|i| Rat::new(i as i64, 3)).collect();
        let sys = FunctionSystem::monomial_grid(1, 2, &axis).unwrap();
        let atoms: Vec<(usize, Rat)> = (0..npoints)
            .map(|j| (j, Rat::new(rng.random_range(1..=9), rng.random_range(1..=4))))
            .collect();
        let m = AtomicMeasure::new(atoms).unwrap();
        let before = m.moments(&sys);
        let (pruned, steps) = caratheodory_prune_with_stats(&sys, &m);
        assert!(pruned.len() <= 3);
        assert_eq!(pruned.moments(&sys), before);
        assert!(steps <= m.len());
        assert!(pruned.support().is_subset(&m.support()));
    }
    println!("prune invariants: PASS — 50 randomized prunes exact");
}
