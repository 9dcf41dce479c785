//! The executable law suite: every identity the engine promises is packaged
//! as a named check that runs against randomized finite models (and any
//! user-supplied model) with exact arithmetic.
//!
//! Checks are keyed by short law ids (for example `6.6` is the tower
//! property); the CLI's `check` subcommand and the acceptance tests both go
//! through [`run_checks`]. Everything is deterministic given the seed.

mod calculus;
mod densities;
mod foundations;
mod gen;
mod integrals;
mod nulls;
mod scms;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measure::{MeasureKind, RationalMeasure};
use crate::object::RandomObject;
use crate::scm::Scm;

pub use gen::{
    random_acyclic_scm, random_constraint, random_event, random_partition_pair,
    random_product_scenario, random_scenario, random_variable, ProductScenario,
};

/// A probability space with a family of random objects on it: the unit every
/// scenario-driven check consumes.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub base: RationalMeasure,
    pub objects: Vec<RandomObject>,
}

impl Scenario {
    pub fn new(name: String, base: RationalMeasure, objects: Vec<RandomObject>) -> Scenario {
        debug_assert!(base.kind() == MeasureKind::Probability);
        debug_assert!(!objects.is_empty());
        Scenario {
            name,
            base,
            objects,
        }
    }

    /// Role assignment: checks that speak of "the k-th object" cycle
    /// through whatever the scenario provides.
    pub fn role(&self, k: usize) -> &RandomObject {
        &self.objects[k % self.objects.len()]
    }
}

/// Outcome of one check over all supplied models.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub id: &'static str,
    pub label: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Mutable context handed to each check: the models to run on and a
/// deterministic rng for sampling events, variables and exponents.
pub struct CheckCtx<'a> {
    pub scenarios: &'a [Scenario],
    pub scms: &'a [Scm],
    pub rng: ChaCha8Rng,
    cases: usize,
    failures: Vec<String>,
}

impl<'a> CheckCtx<'a> {
    /// Records one verified case.
    pub fn pass(&mut self) {
        self.cases += 1;
    }

    /// Records a failed case with a description.
    pub fn fail(&mut self, description: String) {
        self.cases += 1;
        if self.failures.len() < 8 {
            self.failures.push(description);
        }
    }

    /// Convenience: count a boolean assertion.
    pub fn assert_case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        if ok {
            self.pass();
        } else {
            self.fail(describe());
        }
    }
}

type CheckFn = fn(&mut CheckCtx);

/// One entry of the law catalog.
pub struct Check {
    pub id: &'static str,
    pub label: &'static str,
    run: CheckFn,
}

/// The full catalog, ordered by id.
pub fn catalog() -> &'static [Check] {
    &[
        Check {
            id: "2.6",
            label: "co-occurrence measure consistency",
            run: foundations::check_cooc_consistency,
        },
        Check {
            id: "2.7",
            label: "pointwise conditional defining equation",
            run: foundations::check_pointwise_defining,
        },
        Check {
            id: "2.11",
            label: "conditional kernel defining equation",
            run: foundations::check_kernel_defining,
        },
        Check {
            id: "3.1",
            label: "kernel target restriction",
            run: calculus::check_fix_target,
        },
        Check {
            id: "3.2",
            label: "condition shift round trip",
            run: calculus::check_bayes_shift,
        },
        Check {
            id: "3.4",
            label: "two-step condition shift",
            run: calculus::check_two_step_shift,
        },
        Check {
            id: "3.5",
            label: "kernel-marginal joint rebuild",
            run: calculus::check_joint_rebuild,
        },
        Check {
            id: "3.7",
            label: "kernel composition",
            run: calculus::check_composition,
        },
        Check {
            id: "3.8",
            label: "independence propagation",
            run: calculus::check_independence_propagation,
        },
        Check {
            id: "3.9",
            label: "conditional independence equivalences",
            run: calculus::check_ci_equivalences,
        },
        Check {
            id: "4.1",
            label: "density defining equation and absolute continuity",
            run: densities::check_density_defining,
        },
        Check {
            id: "4.2",
            label: "marginal densities and factorization",
            run: densities::check_marginals_and_factorization,
        },
        Check {
            id: "4.3",
            label: "kernels from densities",
            run: densities::check_kernel_from_density,
        },
        Check {
            id: "4.7",
            label: "change of base",
            run: densities::check_change_of_base,
        },
        Check {
            id: "5.1",
            label: "restricted integrals reduce to indicators",
            run: integrals::check_restricted_integrals,
        },
        Check {
            id: "5.4",
            label: "rectangle integration identity",
            run: integrals::check_rectangle_identity,
        },
        Check {
            id: "5.7",
            label: "conditional E-integral defining equation",
            run: integrals::check_eintegral_defining,
        },
        Check {
            id: "6.1",
            label: "iterated decomposition",
            run: integrals::check_iterated_decomposition,
        },
        Check {
            id: "6.2",
            label: "additivity in a fixed constraint",
            run: integrals::check_constraint_additivity,
        },
        Check {
            id: "6.3",
            label: "integral condition shift",
            run: integrals::check_integral_shift,
        },
        Check {
            id: "6.4",
            label: "independence transfer",
            run: integrals::check_independence_transfer,
        },
        Check {
            id: "6.5",
            label: "linearity and monotonicity",
            run: integrals::check_linearity_monotonicity,
        },
        Check {
            id: "6.6",
            label: "tower property",
            run: integrals::check_tower,
        },
        Check {
            id: "6.7",
            label: "monotone convergence given events",
            run: integrals::check_monotone_convergence_events,
        },
        Check {
            id: "6.8",
            label: "monotone convergence given objects",
            run: integrals::check_monotone_convergence_objects,
        },
        Check {
            id: "6.9",
            label: "lower and upper limit bounds",
            run: integrals::check_fatou,
        },
        Check {
            id: "6.10",
            label: "dominated convergence",
            run: integrals::check_dominated_convergence,
        },
        Check {
            id: "6.11",
            label: "pull-out of measurable factors",
            run: integrals::check_pull_out,
        },
        Check {
            id: "6.12",
            label: "Hoelder inequality",
            run: integrals::check_hoelder,
        },
        Check {
            id: "6.13",
            label: "Minkowski inequality",
            run: integrals::check_minkowski,
        },
        Check {
            id: "6.14",
            label: "Jensen inequality",
            run: integrals::check_jensen,
        },
        Check {
            id: "scm.1",
            label: "observational distribution vs enumeration",
            run: scms::check_observational,
        },
        Check {
            id: "scm.2",
            label: "unsolvable and ambiguous mechanisms",
            run: scms::check_pathological,
        },
        Check {
            id: "scm.3",
            label: "interventions",
            run: scms::check_interventions,
        },
        Check {
            id: "null",
            label: "null-condition conventions",
            run: nulls::check_null_conventions,
        },
    ]
}

/// Options for a suite run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Randomized scenarios to generate.
    pub cases: usize,
    /// Master seed; everything derives from it.
    pub seed: u64,
    /// Law ids to run; empty means all.
    pub only: Vec<String>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            cases: 25,
            seed: 0,
            only: Vec::new(),
        }
    }
}

fn check_seed(master: u64, id: &str) -> u64 {
    // FNV-1a over the id, mixed with the master seed: checks draw
    // independent, order-insensitive streams.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in id.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^ master
}

/// Runs the selected checks over `cases` generated scenarios (plus any
/// user-supplied ones) and a matching batch of generated structural models.
/// Deterministic given the options.
pub fn run_checks(options: &RunOptions, user_scenarios: &[Scenario], user_scms: &[Scm]) -> Vec<CheckReport> {
    let mut gen_rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut scenarios: Vec<Scenario> = user_scenarios.to_vec();
    for k in 0..options.cases {
        scenarios.push(gen::random_scenario(&mut gen_rng, &format!("random-{k}")));
    }
    let mut scms: Vec<Scm> = user_scms.to_vec();
    let scm_count = options.cases.max(1);
    for _ in 0..scm_count {
        scms.push(gen::random_acyclic_scm(&mut gen_rng));
    }
    let selected: Vec<&Check> = catalog()
        .iter()
        .filter(|c| options.only.is_empty() || options.only.iter().any(|id| id == c.id))
        .collect();
    let mut reports = Vec::with_capacity(selected.len());
    for check in selected {
        let mut ctx = CheckCtx {
            scenarios: &scenarios,
            scms: &scms,
            rng: ChaCha8Rng::seed_from_u64(check_seed(options.seed, check.id)),
            cases: 0,
            failures: Vec::new(),
        };
        (check.run)(&mut ctx);
        reports.push(CheckReport {
            id: check.id,
            label: check.label,
            cases: ctx.cases,
            failures: ctx.failures,
        });
    }
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_ids_are_unique_and_sorted_reports_deterministic() {
        let ids: Vec<&str> = catalog().iter().map(|c| c.id).collect();
        let mut dedup = ids.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), ids.len());
    }

    #[test]
    fn filtering_selects_one_check() {
        let options = RunOptions {
            cases: 2,
            seed: 7,
            only: vec!["6.6".to_string()],
        };
        let reports = run_checks(&options, &[], &[]);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].id, "6.6");
        assert!(reports[0].cases > 0);
    }

    #[test]
    fn same_seed_same_counts() {
        let options = RunOptions {
            cases: 3,
            seed: 11,
            only: vec!["2.7".to_string(), "3.2".to_string()],
        };
        let a = run_checks(&options, &[], &[]);
        let b = run_checks(&options, &[], &[]);
        let counts = |rs: &[CheckReport]| rs.iter().map(|r| (r.id, r.cases)).collect::<Vec<_>>();
        assert_eq!(counts(&a), counts(&b));
    }
}
