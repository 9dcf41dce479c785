//! The JSON model-file format: spaces, partitions, measures, objects,
//! variables, structural models and named queries, with exact rationals
//! serialized as `"p/q"` strings (never decimals).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::conditioning::Kernel;
use crate::cooccurrence::Constraint;
use crate::density::Density;
use crate::eintegral::RandomVariable;
use crate::error::{Error, Result};
use crate::measure::{MeasureKind, RationalMeasure};
use crate::object::RandomObject;
use crate::rational::{format_rat, parse_rat, Rat};
use crate::scm::Scm;
use crate::space::{Event, FiniteSpace, IndexSet, Partition, SpaceRef};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDef {
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionDef {
    pub space: String,
    pub blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureDef {
    pub space: String,
    pub weights: Vec<String>,
    pub kind: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectDef {
    pub domain: String,
    pub codomain: String,
    pub map: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain_field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codomain_field: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableDef {
    pub space: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExoLawDef {
    pub weights: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MechanismDef {
    /// Output tuples indexed `[endo point][exo point]`, both lexicographic;
    /// each entry lists the output endogenous coordinates in ascending
    /// index order.
    pub table: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScmDef {
    pub endo: BTreeMap<String, SpaceDef>,
    pub exo: BTreeMap<String, SpaceDef>,
    pub exo_law: ExoLawDef,
    pub mechanism: MechanismDef,
}

/// A constraint in query JSON: an object id plus codomain outcome indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub object: String,
    pub event: Vec<usize>,
}

/// The whole model file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub spaces: BTreeMap<String, SpaceDef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub partitions: BTreeMap<String, PartitionDef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measures: BTreeMap<String, MeasureDef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub objects: BTreeMap<String, ObjectDef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub variables: BTreeMap<String, VariableDef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scms: BTreeMap<String, ScmDef>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub queries: BTreeMap<String, serde_json::Value>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<ModelFile> {
        serde_json::from_str(text).map_err(|e| Error::BadModel(e.to_string()))
    }

    pub fn resolve(&self) -> Result<ResolvedModel> {
        ResolvedModel::build(self)
    }
}

/// All model-file entities resolved into engine values.
#[derive(Debug, Clone)]
pub struct ResolvedModel {
    pub spaces: BTreeMap<String, SpaceRef>,
    pub partitions: BTreeMap<String, Partition>,
    pub measures: BTreeMap<String, RationalMeasure>,
    pub objects: BTreeMap<String, RandomObject>,
    pub variables: BTreeMap<String, RandomVariable>,
    pub scms: BTreeMap<String, Scm>,
    pub queries: BTreeMap<String, serde_json::Value>,
}

fn unresolved(kind: &'static str, id: &str) -> Error {
    Error::UnresolvedReference {
        kind,
        id: id.to_string(),
    }
}

impl ResolvedModel {
    fn build(file: &ModelFile) -> Result<ResolvedModel> {
        let mut spaces = BTreeMap::new();
        for (name, def) in &file.spaces {
            spaces.insert(name.clone(), FiniteSpace::new(def.size, def.labels.clone())?);
        }
        let lookup_space = |spaces: &BTreeMap<String, SpaceRef>, id: &str| {
            spaces.get(id).cloned().ok_or(unresolved("space", id))
        };
        let mut partitions = BTreeMap::new();
        for (name, def) in &file.partitions {
            let space = lookup_space(&spaces, &def.space)?;
            partitions.insert(name.clone(), Partition::new(space, def.blocks.clone())?);
        }
        let mut measures = BTreeMap::new();
        for (name, def) in &file.measures {
            let space = lookup_space(&spaces, &def.space)?;
            let weights = def
                .weights
                .iter()
                .map(|w| parse_rat(w))
                .collect::<Result<Vec<Rat>>>()?;
            measures.insert(
                name.clone(),
                RationalMeasure::new(space, weights, MeasureKind::parse(&def.kind)?)?,
            );
        }
        let mut objects = BTreeMap::new();
        for (name, def) in &file.objects {
            let domain = lookup_space(&spaces, &def.domain)?;
            let codomain = lookup_space(&spaces, &def.codomain)?;
            let domain_field = match &def.domain_field {
                Some(id) => partitions
                    .get(id)
                    .cloned()
                    .ok_or(unresolved("partition", id))?,
                None => Partition::discrete(domain.clone()),
            };
            let codomain_field = match &def.codomain_field {
                Some(id) => partitions
                    .get(id)
                    .cloned()
                    .ok_or(unresolved("partition", id))?,
                None => Partition::discrete(codomain.clone()),
            };
            objects.insert(
                name.clone(),
                RandomObject::with_fields(domain, domain_field, codomain, codomain_field, def.map.clone())?,
            );
        }
        let mut variables = BTreeMap::new();
        for (name, def) in &file.variables {
            let space = lookup_space(&spaces, &def.space)?;
            let values = def
                .values
                .iter()
                .map(|v| parse_rat(v))
                .collect::<Result<Vec<Rat>>>()?;
            variables.insert(name.clone(), RandomVariable::new(space, values)?);
        }
        let mut scms = BTreeMap::new();
        for (name, def) in &file.scms {
            scms.insert(name.clone(), resolve_scm(def)?);
        }
        Ok(ResolvedModel {
            spaces,
            partitions,
            measures,
            objects,
            variables,
            scms,
            queries: file.queries.clone(),
        })
    }

    pub fn space(&self, id: &str) -> Result<&SpaceRef> {
        self.spaces.get(id).ok_or(unresolved("space", id))
    }

    pub fn measure(&self, id: &str) -> Result<&RationalMeasure> {
        self.measures.get(id).ok_or(unresolved("measure", id))
    }

    pub fn object(&self, id: &str) -> Result<&RandomObject> {
        self.objects.get(id).ok_or(unresolved("object", id))
    }

    pub fn variable(&self, id: &str) -> Result<&RandomVariable> {
        self.variables.get(id).ok_or(unresolved("variable", id))
    }

    pub fn scm(&self, id: &str) -> Result<&Scm> {
        self.scms.get(id).ok_or(unresolved("scm", id))
    }

    pub fn query(&self, id: &str) -> Result<&serde_json::Value> {
        self.queries.get(id).ok_or(unresolved("query", id))
    }

    /// The base probability measure for queries: the named one, or the
    /// unique probability-kind measure when exactly one exists.
    pub fn base_measure(&self, named: Option<&str>) -> Result<&RationalMeasure> {
        if let Some(id) = named {
            let m = self.measure(id)?;
            if m.kind() != MeasureKind::Probability {
                return Err(Error::InvalidMeasure(format!(
                    "measure {id:?} is not a probability measure"
                )));
            }
            return Ok(m);
        }
        let mut candidates = self
            .measures
            .iter()
            .filter(|(_, m)| m.kind() == MeasureKind::Probability);
        match (candidates.next(), candidates.next()) {
            (Some((_, m)), None) => Ok(m),
            (None, _) => Err(Error::BadModel(
                "no probability measure to serve as the query base".into(),
            )),
            (Some(_), Some(_)) => Err(Error::BadModel(
                "several probability measures; name one in the query".into(),
            )),
        }
    }

    /// Builds a constraint from its query JSON form.
    pub fn constraint(&self, spec: &ConstraintSpec) -> Result<Constraint> {
        let object = self.object(&spec.object)?.clone();
        let event = Event::new(object.codomain().clone(), spec.event.iter().copied())?;
        Constraint::new(object, event)
    }

    /// Builds the check-suite scenario for a base measure: the measure plus
    /// every object rooted at its space.
    pub fn scenario(&self, base: &RationalMeasure) -> Option<crate::checks::Scenario> {
        let objects: Vec<RandomObject> = self
            .objects
            .values()
            .filter(|o| o.domain() == base.space())
            .cloned()
            .collect();
        if objects.is_empty() {
            return None;
        }
        Some(crate::checks::Scenario::new(
            "model".to_string(),
            base.clone(),
            objects,
        ))
    }
}

fn resolve_scm(def: &ScmDef) -> Result<Scm> {
    let parse_indices = |m: &BTreeMap<String, SpaceDef>, what: &'static str| -> Result<(IndexSet, Vec<SpaceRef>)> {
        let mut pairs: Vec<(usize, SpaceRef)> = Vec::with_capacity(m.len());
        for (key, sdef) in m {
            let index: usize = key
                .parse()
                .map_err(|_| Error::BadModel(format!("{what} index {key:?} is not a number")))?;
            pairs.push((index, FiniteSpace::new(sdef.size, sdef.labels.clone())?));
        }
        pairs.sort_by_key(|(i, _)| *i);
        let indices = IndexSet::new(pairs.iter().map(|(i, _)| *i))?;
        Ok((indices, pairs.into_iter().map(|(_, s)| s).collect()))
    };
    let (endo_indices, endo_spaces) = parse_indices(&def.endo, "endogenous")?;
    let (exo_indices, exo_spaces) = parse_indices(&def.exo, "exogenous")?;
    let exo_law = def
        .exo_law
        .weights
        .iter()
        .map(|w| parse_rat(w))
        .collect::<Result<Vec<Rat>>>()?;
    // flatten the nested tuple table into point ids
    let endo_product =
        crate::space::ProductSpace::new(endo_indices.clone(), endo_spaces.clone())?;
    let exo_len: usize = exo_spaces.iter().map(|s| s.size()).product();
    if def.mechanism.table.len() != endo_product.len() {
        return Err(Error::BadModel(format!(
            "mechanism table has {} endogenous rows, expected {}",
            def.mechanism.table.len(),
            endo_product.len()
        )));
    }
    let mut mechanism = Vec::with_capacity(endo_product.len() * exo_len);
    for row in &def.mechanism.table {
        if row.len() != exo_len {
            return Err(Error::BadModel(format!(
                "mechanism row has {} exogenous columns, expected {exo_len}",
                row.len()
            )));
        }
        for tuple in row {
            if tuple.len() != endo_indices.len() {
                return Err(Error::BadModel("mechanism output tuple has wrong arity".into()));
            }
            for (k, &v) in tuple.iter().enumerate() {
                if v >= endo_spaces[k].size() {
                    return Err(Error::BadModel(format!(
                        "mechanism output coordinate {v} out of range"
                    )));
                }
            }
            mechanism.push(endo_product.point(tuple));
        }
    }
    Scm::new(
        endo_indices,
        exo_indices,
        endo_spaces,
        exo_spaces,
        exo_law,
        mechanism,
    )
}

/// Kernel serialization: rows of rationals in target point order, support
/// indices, and the endpoint ids chosen by the caller.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelDoc {
    pub rows: Vec<Vec<String>>,
    pub source: String,
    pub support: Vec<usize>,
    pub target: String,
}

impl KernelDoc {
    pub fn from_kernel(kernel: &Kernel, source: &str, target: &str) -> KernelDoc {
        KernelDoc {
            rows: kernel
                .rows()
                .iter()
                .map(|r| r.weights().iter().map(format_rat).collect())
                .collect(),
            source: source.to_string(),
            support: kernel.support().to_vec(),
            target: target.to_string(),
        }
    }
}

/// Density serialization: the base tag, the index set, and the values in
/// lexicographic point order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityDoc {
    pub base: String,
    pub indices: Vec<usize>,
    pub values: Vec<String>,
}

/// Convex piecewise-linear function serialization: rational breakpoints and
/// slopes as exact strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexDoc {
    pub breakpoints: Vec<String>,
    pub slopes: Vec<String>,
}

impl ConvexDoc {
    pub fn from_function(f: &crate::eintegral::PiecewiseLinearConvex) -> ConvexDoc {
        ConvexDoc {
            breakpoints: f.breakpoints().iter().map(format_rat).collect(),
            slopes: f.slopes().iter().map(format_rat).collect(),
        }
    }

    pub fn resolve(&self) -> Result<crate::eintegral::PiecewiseLinearConvex> {
        let breakpoints = self
            .breakpoints
            .iter()
            .map(|b| parse_rat(b))
            .collect::<Result<Vec<Rat>>>()?;
        let slopes = self
            .slopes
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<Rat>>>()?;
        crate::eintegral::PiecewiseLinearConvex::new(breakpoints, slopes)
    }
}

impl DensityDoc {
    pub fn from_density(density: &Density, base: &str) -> DensityDoc {
        DensityDoc {
            base: base.to_string(),
            indices: density.index_set().iter().collect(),
            values: density.values().iter().map(format_rat).collect(),
        }
    }
}

/// The four-point uniform reference model: parity and high-bit observables
/// over a uniform base, plus the 0/1 variable on the high bit. Used by the
/// built-in examples and the golden tests.
pub fn reference_model_json() -> String {
    serde_json::to_string_pretty(&reference_model()).expect("static model serializes")
}

pub fn reference_model() -> ModelFile {
    let mut file = ModelFile::default();
    file.spaces.insert(
        "omega".into(),
        SpaceDef {
            size: 4,
            labels: None,
        },
    );
    file.spaces.insert(
        "parity".into(),
        SpaceDef {
            size: 2,
            labels: Some(vec!["e".into(), "o".into()]),
        },
    );
    file.spaces.insert(
        "level".into(),
        SpaceDef {
            size: 2,
            labels: Some(vec!["lo".into(), "hi".into()]),
        },
    );
    file.measures.insert(
        "P".into(),
        MeasureDef {
            space: "omega".into(),
            weights: vec!["1/4".into(), "1/4".into(), "1/4".into(), "1/4".into()],
            kind: "probability".into(),
        },
    );
    file.objects.insert(
        "X1".into(),
        ObjectDef {
            domain: "omega".into(),
            codomain: "parity".into(),
            map: vec![0, 1, 0, 1],
            domain_field: None,
            codomain_field: None,
        },
    );
    file.objects.insert(
        "X2".into(),
        ObjectDef {
            domain: "omega".into(),
            codomain: "level".into(),
            map: vec![0, 0, 1, 1],
            domain_field: None,
            codomain_field: None,
        },
    );
    file.objects.insert(
        "X3".into(),
        ObjectDef {
            domain: "omega".into(),
            codomain: "omega".into(),
            map: vec![0, 1, 2, 3],
            domain_field: None,
            codomain_field: None,
        },
    );
    file.variables.insert(
        "Y".into(),
        VariableDef {
            space: "level".into(),
            values: vec!["0".into(), "1".into()],
        },
    );
    file
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooccurrence::prob_cooc_objects;
    use crate::rational::ratio;

    #[test]
    fn reference_model_round_trips_and_resolves() {
        let json = reference_model_json();
        let file = ModelFile::from_json(&json).unwrap();
        let resolved = file.resolve().unwrap();
        assert_eq!(resolved.space("omega").unwrap().size(), 4);
        assert_eq!(resolved.object("X1").unwrap().codomain().size(), 2);
        let base = resolved.base_measure(None).unwrap();
        assert_eq!(base.total(), ratio(1, 1));
        // P[X1 ∈ {e}; X2 ∈ {hi}] = 1/4
        let c1 = resolved
            .constraint(&ConstraintSpec {
                object: "X1".into(),
                event: vec![0],
            })
            .unwrap();
        let c2 = resolved
            .constraint(&ConstraintSpec {
                object: "X2".into(),
                event: vec![1],
            })
            .unwrap();
        assert_eq!(prob_cooc_objects(base, &[c1, c2]).unwrap(), ratio(1, 4));
    }

    #[test]
    fn unresolved_references_name_the_offender() {
        let mut file = reference_model();
        file.objects.get_mut("X1").unwrap().domain = "nowhere".into();
        match file.resolve().unwrap_err() {
            Error::UnresolvedReference { kind: "space", id } => assert_eq!(id, "nowhere"),
            other => panic!("expected UnresolvedReference, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_measure_rejected_at_load() {
        let mut file = reference_model();
        file.measures.get_mut("P").unwrap().weights[0] = "1/2".into();
        assert!(matches!(
            file.resolve().unwrap_err(),
            Error::InvalidMeasure(_)
        ));
    }

    #[test]
    fn scm_json_round_trip() {
        let mut file = ModelFile::default();
        file.scms.insert(
            "copy".into(),
            ScmDef {
                endo: BTreeMap::from([(
                    "1".to_string(),
                    SpaceDef {
                        size: 2,
                        labels: None,
                    },
                )]),
                exo: BTreeMap::from([(
                    "101".to_string(),
                    SpaceDef {
                        size: 2,
                        labels: None,
                    },
                )]),
                exo_law: ExoLawDef {
                    weights: vec!["1/3".into(), "2/3".into()],
                },
                mechanism: MechanismDef {
                    table: vec![vec![vec![0], vec![1]], vec![vec![0], vec![1]]],
                },
            },
        );
        let resolved = file.resolve().unwrap();
        let law = resolved
            .scm("copy")
            .unwrap()
            .observational_distribution()
            .unwrap();
        assert_eq!(law.weights(), &[ratio(1, 3), ratio(2, 3)]);
        // serialization round trip
        let json = serde_json::to_string(&file).unwrap();
        let re = ModelFile::from_json(&json).unwrap();
        let law2 = re
            .resolve()
            .unwrap()
            .scm("copy")
            .unwrap()
            .observational_distribution()
            .unwrap();
        assert_eq!(law.weights(), law2.weights());
    }

    #[test]
    fn convex_doc_round_trip() {
        let phi = crate::eintegral::PiecewiseLinearConvex::new(
            vec![ratio(-1, 2), ratio(3, 4)],
            vec![ratio(-2, 1), ratio(0, 1), ratio(5, 3)],
        )
        .unwrap();
        let doc = ConvexDoc::from_function(&phi);
        let json = serde_json::to_string(&doc).unwrap();
        let back: ConvexDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.resolve().unwrap(), phi);
        // non-convex data is rejected in resolution
        let bad = ConvexDoc {
            breakpoints: vec!["0".into()],
            slopes: vec!["1".into(), "0".into()],
        };
        assert!(bad.resolve().is_err());
    }

    #[test]
    fn kernel_doc_round_trip() {
        let file = reference_model();
        let resolved = file.resolve().unwrap();
        let base = resolved.base_measure(None).unwrap();
        let k = crate::conditioning::cond_kernel(
            base,
            resolved.object("X1").unwrap(),
            resolved.object("X2").unwrap(),
            &[],
            &[],
        )
        .unwrap();
        let doc = KernelDoc::from_kernel(&k, "X1", "X2");
        let json = serde_json::to_string(&doc).unwrap();
        let back: KernelDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.rows, doc.rows);
        assert_eq!(back.support, doc.support);
        for (row, orig) in back.rows.iter().zip(k.rows()) {
            for (w, ow) in row.iter().zip(orig.weights()) {
                assert_eq!(&parse_rat(w).unwrap(), ow);
            }
        }
    }
}
