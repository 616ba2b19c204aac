//! Seeded property suites run by `freefactor verify`.
//!
//! Every suite draws from its own ChaCha stream, so results depend only on
//! the seed and trial count, not on scheduling.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{make_trace, make_uniform, StateAlgebra};
use crate::classify::classify_pair;
use crate::expansion::{
    ef_commutative_closed, ef_exact, ef_matrix_closed, m2_rational_function, ExpansionError,
    ExpansionFactor,
};
use crate::fock::build_fock;
use crate::groups::{intersect, modular_invariant_group, ClosedSubgroup};
use crate::modular::{build_modular, witness_check};
use crate::random::{
    random_algebra, random_algebra_at_most_half, random_centered, random_element,
    random_rational_between, random_weights,
};
use crate::rational::{int, q, Rational};

pub type ClosedForm = fn(&[Rational]) -> Result<ExpansionFactor, ExpansionError>;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub commutative_closed: ClosedForm,
    pub matrix_closed: ClosedForm,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 50,
            seed: 0,
            commutative_closed: ef_commutative_closed,
            matrix_closed: ef_matrix_closed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {:<28} {}/{} cases",
            self.name,
            self.cases - self.failures,
            self.cases
        )?;
        if let Some(msg) = &self.first_failure {
            write!(f, "  first failure: {msg}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn check(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            first_failure: self.first_failure,
        }
    }
}

type Suite = fn(&VerifyConfig, &mut ChaCha8Rng) -> SuiteResult;

const SUITES: &[Suite] = &[
    closed_form_table,
    oracle_equivalence,
    half_weight_bound,
    matrix_dominates_commutative,
    m2_rational_identity,
    invariant_group_witness,
    delta_constructions,
    intersection_laws,
    fock_identities,
    classify_symmetry,
];

pub fn run_verify(cfg: &VerifyConfig) -> VerifyReport {
    let suites = SUITES
        .par_iter()
        .enumerate()
        .map(|(i, suite)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            suite(cfg, &mut rng)
        })
        .collect();
    VerifyReport {
        seed: cfg.seed,
        trials: cfg.trials,
        suites,
    }
}

fn finite(r: Rational) -> ExpansionFactor {
    ExpansionFactor::Finite(r)
}

fn closed_form_table(_: &VerifyConfig, _: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("closed_form_table");
    for n in 2..=8usize {
        let got = ef_exact(&make_uniform(n).expect("n ≥ 1"));
        let want = finite(int(n as i64 - 1));
        t.check(got.as_ref() == Ok(&want), || format!("C^{n}: {got:?}"));
    }
    for n in 2..=5usize {
        let got = ef_exact(&make_trace(n).expect("n ≥ 1"));
        let want = finite(int((n * n) as i64 - 1));
        t.check(got.as_ref() == Ok(&want), || format!("M_{n}: {got:?}"));
    }
    t.finish()
}

fn oracle_equivalence(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("oracle_equivalence");
    for i in 0..cfg.trials {
        let commutative = i % 2 == 0;
        let n = if commutative {
            rng.random_range(2..=6)
        } else {
            rng.random_range(2..=4)
        };
        let w = random_weights(rng, n, 9);
        let (algebra, closed) = if commutative {
            (
                StateAlgebra::commutative("C", w.clone()),
                (cfg.commutative_closed)(&w),
            )
        } else {
            (
                StateAlgebra::matrix("M", w.clone()),
                (cfg.matrix_closed)(&w),
            )
        };
        let exact = ef_exact(&algebra);
        let ok = matches!((&exact, &closed), (Ok(a), Ok(b)) if a == b);
        t.check(ok, || {
            format!("weights {w:?}: exact {exact:?}, closed {closed:?}")
        });
    }
    t.finish()
}

fn half_weight_bound(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("half_weight_bound");
    for _ in 0..cfg.trials {
        let a = random_algebra_at_most_half(rng, 3, 3, 10);
        let ef = ef_exact(&a);
        let ok = matches!(&ef, Ok(e) if *e >= finite(int(1)));
        t.check(ok, || format!("{a:?}: {ef:?}"));
    }
    t.finish()
}

fn matrix_dominates_commutative(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("matrix_dominates_commutative");
    for _ in 0..cfg.trials {
        let n = rng.random_range(2..=3);
        let w = random_weights(rng, n, 9);
        let m = ef_exact(&StateAlgebra::matrix("M", w.clone()));
        let c = ef_exact(&StateAlgebra::commutative("C", w.clone()));
        let ok = matches!((&m, &c), (Ok(a), Ok(b)) if a >= b);
        t.check(ok, || {
            format!("weights {w:?}: matrix {m:?}, commutative {c:?}")
        });
    }
    t.finish()
}

fn m2_rational_identity(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("m2_rational_identity");
    for _ in 0..cfg.trials {
        let l = random_rational_between(rng, &q(1, 2), &int(1), 97);
        let got = ef_exact(&StateAlgebra::matrix("M2", vec![l.clone(), int(1) - &l]));
        let want = finite(m2_rational_function(&l));
        t.check(got.as_ref() == Ok(&want), || {
            format!("lambda {l}: {got:?} vs {want}")
        });
    }
    t.finish()
}

fn invariant_group_witness(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("invariant_group_witness");
    for _ in 0..cfg.trials {
        let a = random_algebra(rng, 3, 3, 14);
        let seed = rng.random();
        let result = modular_invariant_group(&a)
            .map_err(|e| e.to_string())
            .and_then(|g| {
                let flow = build_modular(&a).map_err(|e| e.to_string())?;
                witness_check(&flow, &g, seed).map_err(|e| format!("{g}: {e}"))
            });
        t.check(result.is_ok(), || format!("{a:?}: {}", result.unwrap_err()));
    }
    t.finish()
}

fn delta_constructions(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("delta_constructions");
    for _ in 0..cfg.trials {
        let a = random_algebra(rng, 3, 3, 14);
        let d = build_modular(&a).map(|f| f.delta_discrepancy());
        let ok = matches!(d, Ok(x) if x <= 1e-10);
        t.check(ok, || format!("{a:?}: discrepancy {d:?}"));
    }
    t.finish()
}

fn intersection_laws(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("intersection_laws");
    let bases = [
        int(2),
        int(3),
        int(4),
        int(8),
        int(9),
        int(6),
        q(9, 4),
        q(27, 8),
    ];
    let draw = |rng: &mut ChaCha8Rng| -> ClosedSubgroup {
        match rng.random_range(0..10) {
            0 => ClosedSubgroup::Full,
            1 => ClosedSubgroup::Trivial,
            _ => {
                let b = &bases[rng.random_range(0..bases.len())];
                ClosedSubgroup::log_cyclic(b, rng.random_range(1..=4)).expect("base above 1")
            }
        }
    };
    for _ in 0..cfg.trials {
        let (a, b, c) = (draw(rng), draw(rng), draw(rng));
        let ab = intersect(&a, &b);
        t.check(ab == intersect(&b, &a), || {
            format!("commutativity for {a}, {b}")
        });
        t.check(
            intersect(&ab, &c) == intersect(&a, &intersect(&b, &c)),
            || format!("associativity for {a}, {b}, {c}"),
        );
        t.check(intersect(&a, &a) == a, || format!("idempotence for {a}"));
        if let (Some(g), Some(ga), Some(gb)) = (ab.generator(), a.generator(), b.generator()) {
            // the intersection sits inside both operands
            let divides =
                |x: f64| ((g / x) - (g / x).round()).abs() <= 1e-10 * (g / x).abs().max(1.0);
            t.check(divides(ga) && divides(gb), || {
                format!("generator of {ab} is not a multiple of those of {a}, {b}")
            });
        }
    }
    t.finish()
}

fn fock_identities(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("fock_identities");
    let trials = cfg.trials.div_ceil(5);
    for _ in 0..trials {
        let a1 = random_algebra(rng, 2, 2, 5);
        let a2 = random_algebra(rng, 2, 2, 5);
        let fock = match build_fock(&a1, &a2, 4) {
            Ok(f) => f,
            Err(e) => {
                t.check(false, || format!("build failed: {e}"));
                continue;
            }
        };
        let s1 = a1.blocks().expect("matrix blocks");
        let s2 = a2.blocks().expect("matrix blocks");
        for iota in 0..2 {
            let shape = if iota == 0 { s1 } else { s2 };
            let x = random_element(rng, shape);
            let time = rng.random_range(-50.0..50.0);
            let r = fock.vacuum_modular_residual(iota, &x, time);
            t.check(matches!(r, Ok(v) if v <= 1e-9), || {
                format!("residual {r:?} at t = {time}")
            });
        }
        let a = random_centered(rng, s1);
        let b = random_centered(rng, s2);
        let ab = fock.free_moment(&[(0, a.clone()), (1, b.clone())]);
        let abab = fock.free_moment(&[(0, a.clone()), (1, b.clone()), (0, a), (1, b)]);
        for m in [ab, abab] {
            t.check(matches!(m, Ok(z) if z.norm() <= 1e-12), || {
                format!("centered moment {m:?}")
            });
        }
    }
    t.finish()
}

fn classify_symmetry(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut t = Tally::new("classify_symmetry");
    for _ in 0..cfg.trials.div_ceil(2) {
        let pick = |rng: &mut ChaCha8Rng| {
            if rng.random_bool(0.2) {
                StateAlgebra::diffuse_abelian("L")
            } else {
                random_algebra(rng, 2, 2, 8)
            }
        };
        let (a, b) = (pick(rng), pick(rng));
        let ok = match (classify_pair(&a, &b), classify_pair(&b, &a)) {
            (Ok(x), Ok(y)) => {
                x.verdict == y.verdict
                    && x.t_invariant == y.t_invariant
                    && x.type_candidates == y.type_candidates
            }
            _ => false,
        };
        t.check(ok, || format!("{a:?} vs {b:?}"));
    }
    t.finish()
}
