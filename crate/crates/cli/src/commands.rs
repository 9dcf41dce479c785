//! Subcommand implementations over a resolved model.

use std::collections::BTreeMap;
use std::process::ExitCode;

use serde::Deserialize;

use cooc_core::checks::{run_checks, RunOptions};
use cooc_core::conditioning::{
    check_cond_independence, cond_kernel, IndependencePattern,
};
use cooc_core::cooccurrence::{cond_prob_objects, cooc_measure, Constraint};
use cooc_core::density::{density_wrt_base, density_wrt_marginals, BaseFamily};
use cooc_core::eintegral::{cond_expectation_event, cond_expectation_object, e_integral};
use cooc_core::model::{ConstraintSpec, DensityDoc, KernelDoc, ModelFile, ResolvedModel};
use cooc_core::space::{Event, IndexSet};
use cooc_core::{Error, RandomObject, Scm};

use crate::output::{csv_line, scalar_line, CheckDoc, CheckRunDoc, PointwiseDoc};
use crate::{query_failure, Cli, Command, Failure};

pub(crate) fn dispatch(cli: &Cli) -> Result<ExitCode, Failure> {
    let model = load_model(cli)?;
    match &cli.command {
        Command::Prob { query } => cmd_prob(cli, &model, query),
        Command::Kernel { query } => cmd_kernel(cli, &model, query),
        Command::Density { query } => cmd_density(cli, &model, query),
        Command::Eint { query } => cmd_eint(cli, &model, query),
        Command::Ci { query } => cmd_ci(cli, &model, query),
        Command::Scm {
            name,
            interventions,
            action,
        } => cmd_scm(&model, name, interventions, action),
        Command::Check {
            theorems,
            cases,
            seed,
        } => cmd_check(cli, &model, theorems.as_deref(), *cases, *seed),
    }
}

fn load_model(cli: &Cli) -> Result<ResolvedModel, Failure> {
    let path = cli
        .model
        .as_ref()
        .ok_or_else(|| Failure::load("--model <path> is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::load(format!("cannot read {}: {e}", path.display())))?;
    let file = ModelFile::from_json(&text).map_err(|e| Failure::load(e.to_string()))?;
    file.resolve().map_err(|e| Failure::load(e.to_string()))
}

/// Resolves `--query`: inline JSON when it looks like an object, otherwise
/// a named query from the model file.
fn query_json(model: &ResolvedModel, query: &str) -> Result<serde_json::Value, Failure> {
    let trimmed = query.trim();
    if trimmed.starts_with('{') {
        serde_json::from_str(trimmed)
            .map_err(|e| Failure::load(format!("inline query does not parse: {e}")))
    } else {
        model
            .query(trimmed)
            .cloned()
            .map_err(|e| Failure::load(e.to_string()))
    }
}

fn parse_query<T: for<'de> Deserialize<'de>>(
    model: &ResolvedModel,
    query: &str,
) -> Result<T, Failure> {
    let value = query_json(model, query)?;
    serde_json::from_value(value).map_err(|e| Failure::load(format!("bad query shape: {e}")))
}

fn constraints(
    model: &ResolvedModel,
    specs: &[ConstraintSpec],
) -> Result<Vec<Constraint>, Failure> {
    specs.iter().map(|s| model.constraint(s).map_err(query_failure)).collect()
}

#[derive(Deserialize)]
struct ProbQuery {
    measure: Option<String>,
    #[serde(default)]
    targets: Vec<ConstraintSpec>,
    #[serde(default)]
    conditions: Vec<ConstraintSpec>,
}

fn cmd_prob(cli: &Cli, model: &ResolvedModel, query: &str) -> Result<ExitCode, Failure> {
    let q: ProbQuery = parse_query(model, query)?;
    let base = model
        .base_measure(q.measure.as_deref())
        .map_err(|e| Failure::load(e.to_string()))?;
    let targets = constraints(model, &q.targets)?;
    let conditions = constraints(model, &q.conditions)?;
    let result = cond_prob_objects(base, &targets, &conditions).map_err(query_failure)?;
    println!(
        "{}",
        scalar_line(&result.value, result.null_condition, cli.decimal)
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct KernelQuery {
    measure: Option<String>,
    given: String,
    subject: String,
    #[serde(default)]
    conditions: Vec<ConstraintSpec>,
    #[serde(default)]
    target_conditions: Vec<ConstraintSpec>,
}

fn cmd_kernel(_cli: &Cli, model: &ResolvedModel, query: &str) -> Result<ExitCode, Failure> {
    let q: KernelQuery = parse_query(model, query)?;
    let base = model
        .base_measure(q.measure.as_deref())
        .map_err(|e| Failure::load(e.to_string()))?;
    let given = model.object(&q.given).map_err(|e| Failure::load(e.to_string()))?;
    let subject = model
        .object(&q.subject)
        .map_err(|e| Failure::load(e.to_string()))?;
    let conditions = constraints(model, &q.conditions)?;
    let target_conditions = constraints(model, &q.target_conditions)?;
    let kernel = cond_kernel(base, given, subject, &conditions, &target_conditions)
        .map_err(query_failure)?;
    let doc = KernelDoc::from_kernel(&kernel, &q.given, &q.subject);
    println!("{}", serde_json::to_string(&doc).expect("kernel serializes"));
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct DensityQuery {
    measure: Option<String>,
    /// index (as text) → object id
    objects: BTreeMap<String, String>,
    /// index (as text) → base measure id; absent means the product of
    /// marginals
    bases: Option<BTreeMap<String, String>>,
}

fn cmd_density(cli: &Cli, model: &ResolvedModel, query: &str) -> Result<ExitCode, Failure> {
    let q: DensityQuery = parse_query(model, query)?;
    let base = model
        .base_measure(q.measure.as_deref())
        .map_err(|e| Failure::load(e.to_string()))?;
    let mut objects: BTreeMap<usize, RandomObject> = BTreeMap::new();
    for (key, id) in &q.objects {
        let index: usize = key
            .parse()
            .map_err(|_| Failure::load(format!("object index {key:?} is not a number")))?;
        objects.insert(index, model.object(id).map_err(|e| Failure::load(e.to_string()))?.clone());
    }
    let index_set = IndexSet::new(objects.keys().copied()).map_err(query_failure)?;
    let (density, base_tag) = match &q.bases {
        None => (
            density_wrt_marginals(base, &objects, &index_set).map_err(query_failure)?,
            "marginals",
        ),
        Some(map) => {
            let mut bases = Vec::new();
            for i in index_set.iter() {
                let id = map
                    .get(&i.to_string())
                    .ok_or_else(|| Failure::load(format!("no base for index {i}")))?;
                bases.push(
                    model
                        .measure(id)
                        .map_err(|e| Failure::load(e.to_string()))?
                        .clone(),
                );
            }
            let family = BaseFamily::new(index_set.clone(), bases).map_err(query_failure)?;
            (
                density_wrt_base(base, &objects, &index_set, &family).map_err(query_failure)?,
                "bases",
            )
        }
    };
    if cli.json {
        let doc = DensityDoc::from_density(&density, base_tag);
        println!("{}", serde_json::to_string(&doc).expect("density serializes"));
    } else {
        println!("{}", csv_line(density.values()));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct EintQuery {
    measure: Option<String>,
    variable: String,
    subject: String,
    #[serde(default)]
    targets: Vec<ConstraintSpec>,
    #[serde(default)]
    conditions: Vec<ConstraintSpec>,
    given: Option<String>,
}

fn cmd_eint(cli: &Cli, model: &ResolvedModel, query: &str) -> Result<ExitCode, Failure> {
    let q: EintQuery = parse_query(model, query)?;
    let base = model
        .base_measure(q.measure.as_deref())
        .map_err(|e| Failure::load(e.to_string()))?;
    let variable = model
        .variable(&q.variable)
        .map_err(|e| Failure::load(e.to_string()))?;
    let subject = model
        .object(&q.subject)
        .map_err(|e| Failure::load(e.to_string()))?;
    let targets = constraints(model, &q.targets)?;
    let conditions = constraints(model, &q.conditions)?;
    match &q.given {
        None if conditions.is_empty() => {
            let measure = cooc_measure(base, subject, &targets).map_err(query_failure)?;
            let result = e_integral(variable, &measure).map_err(query_failure)?;
            println!("{}", scalar_line(&result.value, false, cli.decimal));
        }
        None => {
            let result = cond_expectation_event(base, variable, subject, &targets, &conditions)
                .map_err(query_failure)?;
            println!(
                "{}",
                scalar_line(&result.value, result.null_condition, cli.decimal)
            );
        }
        Some(given_id) => {
            let given = model
                .object(given_id)
                .map_err(|e| Failure::load(e.to_string()))?;
            let pc = cond_expectation_object(base, variable, subject, given, &conditions, &targets)
                .map_err(query_failure)?;
            let doc = PointwiseDoc {
                source: given_id.clone(),
                support: pc.reference().support(),
                values: pc
                    .values()
                    .iter()
                    .map(cooc_core::rational::format_rat)
                    .collect(),
            };
            println!("{}", serde_json::to_string(&doc).expect("pointwise serializes"));
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Deserialize)]
struct CiQuery {
    measure: Option<String>,
    /// Exhaustive object-versus-object sweep.
    left: Option<String>,
    right: Option<String>,
    /// Optional conditioning constraint for the sweep.
    given: Option<ConstraintSpec>,
    /// Single-pattern mode.
    pattern: Option<u8>,
    subject: Option<String>,
    with: Option<ConstraintSpec>,
    event: Option<ConstraintSpec>,
    left_subject: Option<String>,
    left_with: Option<ConstraintSpec>,
    right_subject: Option<String>,
    right_with: Option<ConstraintSpec>,
    given_object: Option<String>,
    given_event: Option<ConstraintSpec>,
}

fn require<T>(value: Option<T>, what: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::load(format!("ci query missing {what}")))
}

fn cmd_ci(_cli: &Cli, model: &ResolvedModel, query: &str) -> Result<ExitCode, Failure> {
    let q: CiQuery = parse_query(model, query)?;
    let base = model
        .base_measure(q.measure.as_deref())
        .map_err(|e| Failure::load(e.to_string()))?;
    if let Some(pattern) = q.pattern {
        let c = |spec: &Option<ConstraintSpec>, what: &str| -> Result<Constraint, Failure> {
            let spec = spec
                .as_ref()
                .ok_or_else(|| Failure::load(format!("ci query missing {what}")))?;
            model.constraint(spec).map_err(query_failure)
        };
        let obj = |id: &Option<String>, what: &str| -> Result<RandomObject, Failure> {
            let id = id
                .as_ref()
                .ok_or_else(|| Failure::load(format!("ci query missing {what}")))?;
            Ok(model.object(id).map_err(|e| Failure::load(e.to_string()))?.clone())
        };
        let pattern = match pattern {
            1 => IndependencePattern::EventEvent {
                left: c(&q.with, "with")?,
                right: c(&q.event, "event")?,
                given: c(&q.given, "given")?,
            },
            2 => IndependencePattern::MeasureEvent {
                subject: obj(&q.subject, "subject")?,
                with: c(&q.with, "with")?,
                event: c(&q.event, "event")?,
                given: c(&q.given, "given")?,
            },
            3 => IndependencePattern::MeasureMeasure {
                left: (obj(&q.left_subject, "left_subject")?, c(&q.left_with, "left_with")?),
                right: (
                    obj(&q.right_subject, "right_subject")?,
                    c(&q.right_with, "right_with")?,
                ),
                given: c(&q.given, "given")?,
            },
            4 => IndependencePattern::EventEventGivenObject {
                left: c(&q.with, "with")?,
                right: c(&q.event, "event")?,
                given: obj(&q.given_object, "given_object")?,
                given_event: c(&q.given_event, "given_event")?,
            },
            5 => IndependencePattern::MeasureEventGivenObject {
                subject: obj(&q.subject, "subject")?,
                with: c(&q.with, "with")?,
                event: c(&q.event, "event")?,
                given: obj(&q.given_object, "given_object")?,
                given_event: c(&q.given_event, "given_event")?,
            },
            6 => IndependencePattern::MeasureMeasureGivenObject {
                left: (obj(&q.left_subject, "left_subject")?, c(&q.left_with, "left_with")?),
                right: (
                    obj(&q.right_subject, "right_subject")?,
                    c(&q.right_with, "right_with")?,
                ),
                given: obj(&q.given_object, "given_object")?,
                given_event: c(&q.given_event, "given_event")?,
            },
            other => return Err(Failure::load(format!("unknown pattern {other}"))),
        };
        let verdict = check_cond_independence(base, &pattern).map_err(query_failure)?;
        let marker = if verdict.vacuous { " [vacuous]" } else { "" };
        println!("holds: {}{marker}", verdict.holds);
        return Ok(ExitCode::SUCCESS);
    }

    // exhaustive sweep: every event pair must satisfy the product identity
    let left = model
        .object(&require(q.left, "left")?)
        .map_err(|e| Failure::load(e.to_string()))?;
    let right = model
        .object(&require(q.right, "right")?)
        .map_err(|e| Failure::load(e.to_string()))?;
    for (side, object) in [("left", left), ("right", right)] {
        if object.codomain().size() > 12 {
            return Err(Failure {
                exit: 3,
                message: format!(
                    "{side} codomain has {} outcomes; the exhaustive sweep handles at most 12",
                    object.codomain().size()
                ),
            });
        }
    }
    let given = match &q.given {
        Some(spec) => model.constraint(spec).map_err(query_failure)?,
        None => Constraint::new(left.clone(), Event::full(left.codomain().clone()))
            .map_err(query_failure)?,
    };
    let mut independent = true;
    for a in Event::enumerate_all(left.codomain()) {
        for b in Event::enumerate_all(right.codomain()) {
            let verdict = check_cond_independence(
                base,
                &IndependencePattern::EventEvent {
                    left: Constraint::new(left.clone(), a.clone()).map_err(query_failure)?,
                    right: Constraint::new(right.clone(), b.clone()).map_err(query_failure)?,
                    given: given.clone(),
                },
            )
            .map_err(query_failure)?;
            if !verdict.holds {
                independent = false;
            }
        }
    }
    println!("independent: {independent}");
    Ok(ExitCode::SUCCESS)
}

fn parse_intervention(text: &str) -> Result<(usize, usize), Failure> {
    let (index, value) = text
        .split_once('=')
        .ok_or_else(|| Failure::load(format!("intervention {text:?} is not INDEX=VALUE")))?;
    let index = index
        .trim()
        .parse()
        .map_err(|_| Failure::load(format!("bad intervention index in {text:?}")))?;
    let value = value
        .trim()
        .parse()
        .map_err(|_| Failure::load(format!("bad intervention value in {text:?}")))?;
    Ok((index, value))
}

fn coords_text(coords: &[usize]) -> String {
    let inner = coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!("({inner})")
}

fn cmd_scm(
    model: &ResolvedModel,
    name: &str,
    interventions: &[String],
    action: &str,
) -> Result<ExitCode, Failure> {
    let mut scm: Scm = model
        .scm(name)
        .map_err(|e| Failure::load(e.to_string()))?
        .clone();
    for text in interventions {
        let (index, value) = parse_intervention(text)?;
        scm = scm.intervene(index, value).map_err(query_failure)?;
    }
    match action {
        "solve" => {
            let solutions = scm.solve();
            let mut witness: Option<Error> = None;
            for (e, fixed) in solutions.entries() {
                let tuples = fixed
                    .iter()
                    .map(|&x| coords_text(&scm.endo_product().coords(x)))
                    .collect::<Vec<_>>()
                    .join(" ");
                println!(
                    "exo {}: {} solution(s){}{}",
                    coords_text(&scm.exo_product().coords(*e)),
                    fixed.len(),
                    if tuples.is_empty() { "" } else { ": " },
                    tuples
                );
                if witness.is_none() && fixed.len() != 1 {
                    let tuple = scm.exo_product().coords(*e);
                    witness = Some(if fixed.is_empty() {
                        Error::NoSolution { point: *e, tuple }
                    } else {
                        Error::NonUniqueSolution { point: *e, tuple }
                    });
                }
            }
            if let Some(err) = witness {
                return Err(query_failure(err));
            }
            Ok(ExitCode::SUCCESS)
        }
        "dist" => {
            let law = scm.observational_distribution().map_err(query_failure)?;
            println!("{}", csv_line(law.weights()));
            Ok(ExitCode::SUCCESS)
        }
        other => Err(Failure::load(format!(
            "unknown scm action {other:?}; expected solve or dist"
        ))),
    }
}

fn cmd_check(
    cli: &Cli,
    model: &ResolvedModel,
    theorems: Option<&str>,
    cases: usize,
    seed: u64,
) -> Result<ExitCode, Failure> {
    let only: Vec<String> = theorems
        .map(|t| t.split(',').map(|s| s.trim().to_string()).collect())
        .unwrap_or_default();
    let known: Vec<&str> = cooc_core::checks::catalog().iter().map(|c| c.id).collect();
    for id in &only {
        if !known.contains(&id.as_str()) {
            return Err(Failure::load(format!("unknown law id {id:?}")));
        }
    }
    let user_scenarios: Vec<cooc_core::checks::Scenario> = model
        .base_measure(None)
        .ok()
        .and_then(|base| model.scenario(base))
        .into_iter()
        .collect();
    let user_scms: Vec<Scm> = model.scms.values().cloned().collect();
    let options = RunOptions { cases, seed, only };
    let reports = run_checks(&options, &user_scenarios, &user_scms);
    let all_passed = reports.iter().all(|r| r.passed());
    if cli.json {
        let doc = CheckRunDoc {
            checks: reports
                .iter()
                .map(|r| CheckDoc {
                    cases: r.cases,
                    failures: r.failures.clone(),
                    id: r.id.to_string(),
                    label: r.label.to_string(),
                })
                .collect(),
            passed: all_passed,
        };
        println!("{}", serde_json::to_string(&doc).expect("report serializes"));
    } else {
        for r in &reports {
            println!(
                "{} {}: {} cases, {} failures",
                r.id,
                r.label,
                r.cases,
                r.failures.len()
            );
            for f in &r.failures {
                println!("  failure: {f}");
            }
        }
        println!(
            "{}",
            if all_passed {
                "all checks passed"
            } else {
                "CHECKS FAILED"
            }
        );
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
