//! The comparison pipeline: names first, then structure, then levels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correspondence::{
    assign_level, build_link, check_references, has_syn_sem, CorrespondenceError, Decision,
    PairVerdicts, WModel, WModelRef,
};
use crate::lexical::{compare_syntactic, ClassBridge, SyntacticVerdict};
use crate::model::{validate_model, ElementKind, Model, ModelError, ModelIndex};
use crate::resources::Resources;
use crate::semantic::{compare_semantic, SemanticKind, SemanticVerdict};
use crate::structural::{
    PhaseOneEntry, PhaseOneMatrix, StructuralError, StructuralVerdict, Structure,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct CompareConfig {
    pub local_coverage: f64,
    pub emit_homonyms: bool,
    /// Emit member pairs with no name evidence whose global and local structure agree.
    pub include_self_evident_pairs: bool,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            local_coverage: 1.0,
            emit_homonyms: true,
            include_self_evident_pairs: false,
        }
    }
}

impl CompareConfig {
    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        let cfg: CompareConfig =
            serde_json::from_str(text).map_err(|e| EngineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if !(0.0..=1.0).contains(&self.local_coverage) {
            return Err(EngineError::Config(format!(
                "localCoverage must lie in [0, 1], got {}",
                self.local_coverage
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("model `{model}`: {source}")]
    Model {
        model: String,
        #[source]
        source: ModelError,
    },
    #[error(transparent)]
    Structural(#[from] StructuralError),
    #[error(transparent)]
    Correspondence(#[from] CorrespondenceError),
}

fn ensure_valid(model: &Model) -> Result<(), EngineError> {
    match validate_model(model).into_iter().next() {
        Some(v) => Err(EngineError::Model {
            model: model.id.clone(),
            source: v.into(),
        }),
        None => Ok(()),
    }
}

fn cross<'m>(
    left: &ModelIndex<'m>,
    right: &ModelIndex<'m>,
    kind: ElementKind,
) -> Vec<(&'m str, &'m str)> {
    let ids = |idx: &ModelIndex<'m>| -> Vec<&'m str> {
        idx.elements()
            .into_iter()
            .filter(|(k, _)| *k == kind)
            .map(|(_, id)| id)
            .collect()
    };
    let rights = ids(right);
    ids(left)
        .into_iter()
        .flat_map(|a| rights.iter().map(move |b| (a, *b)))
        .collect()
}

fn member_name<'m>(idx: &ModelIndex<'m>, kind: ElementKind, id: &str) -> &'m str {
    match kind {
        ElementKind::Attribute => &idx.attribute(id).expect("attribute id").name,
        ElementKind::Operation => &idx.operation(id).expect("operation id").name,
        ElementKind::Relation => &idx.relation(id).expect("relation id").name,
        ElementKind::Class => &idx.class(id).expect("class id").name,
        ElementKind::Generalization => "",
    }
}

/// Syntactic and semantic verdicts for every same-kind pair.
///
/// Classes go first so that member comparisons can use the class results.
pub fn phase_one(left: &ModelIndex<'_>, right: &ModelIndex<'_>, res: &Resources) -> PhaseOneMatrix {
    let mut matrix = PhaseOneMatrix::new();
    for (a, b) in cross(left, right, ElementKind::Class) {
        let (na, nb) = (
            member_name(left, ElementKind::Class, a),
            member_name(right, ElementKind::Class, b),
        );
        let entry = PhaseOneEntry {
            syntactic: compare_syntactic(na, nb, res, None),
            semantic: compare_semantic(na, nb, ElementKind::Class, res),
        };
        matrix.record(ElementKind::Class, a, b, entry);
    }
    let classes = matrix.clone();
    let structure = Structure::new(left, right, &classes);
    for kind in [
        ElementKind::Attribute,
        ElementKind::Operation,
        ElementKind::Relation,
    ] {
        for (a, b) in cross(left, right, kind) {
            let (na, nb) = (member_name(left, kind, a), member_name(right, kind, b));
            let bridge = match (left.owner_of(a), right.owner_of(b)) {
                (Some(oa), Some(ob)) if structure.classes_related(oa, ob) => Some(ClassBridge {
                    left_owner: &left.class(oa).expect("owner").name,
                    right_owner: &right.class(ob).expect("owner").name,
                }),
                _ => None,
            };
            let entry = PhaseOneEntry {
                syntactic: compare_syntactic(na, nb, res, bridge),
                semantic: compare_semantic(na, nb, kind, res),
            };
            matrix.record(kind, a, b, entry);
        }
    }
    matrix
}

/// Compares two validated models and returns the correspondence model.
pub fn compare_models(
    m1: &Model,
    m2: &Model,
    res: &Resources,
    cfg: &CompareConfig,
) -> Result<WModel, EngineError> {
    cfg.validate()?;
    ensure_valid(m1)?;
    ensure_valid(m2)?;
    let (left, right) = (ModelIndex::new(m1), ModelIndex::new(m2));
    let matrix = phase_one(&left, &right, res);
    let structure = Structure::new(&left, &right, &matrix).with_local_coverage(cfg.local_coverage);

    let mut candidates = Vec::new();
    for kind in [
        ElementKind::Class,
        ElementKind::Attribute,
        ElementKind::Operation,
        ElementKind::Relation,
    ] {
        for (a, b) in cross(&left, &right, kind) {
            let entry = matrix.get(kind, a, b).copied();
            if entry.is_none() && kind != ElementKind::Class && !cfg.include_self_evident_pairs {
                continue;
            }
            let entry = entry.unwrap_or(PhaseOneEntry {
                syntactic: SyntacticVerdict::NONE,
                semantic: SemanticVerdict::NONE,
            });
            candidates.push(PairVerdicts {
                kind,
                left: a.to_string(),
                right: b.to_string(),
                syntactic: entry.syntactic,
                semantic: entry.semantic,
                structural: structure.verdict(kind, a, b)?,
            });
        }
    }
    for (a, b) in cross(&left, &right, ElementKind::Generalization) {
        candidates.push(PairVerdicts {
            kind: ElementKind::Generalization,
            left: a.to_string(),
            right: b.to_string(),
            syntactic: SyntacticVerdict::NONE,
            semantic: SemanticVerdict::NONE,
            structural: structure.verdict(ElementKind::Generalization, a, b)?,
        });
    }

    let mut links = Vec::new();
    for pair in candidates {
        let syn_sem = has_syn_sem(&pair.syntactic, &pair.semantic);
        let hyponym = pair.semantic.kind == SemanticKind::Hyponymy;
        let StructuralVerdict { global, local } = pair.structural;
        let level = match assign_level(pair.kind, syn_sem, hyponym, global, local)? {
            Some(level) => level,
            None if cfg.include_self_evident_pairs
                && pair.kind != ElementKind::Class
                && global
                && local =>
            {
                crate::correspondence::LevelVerdict {
                    level: 1,
                    confidence: crate::correspondence::Confidence::Improbable,
                    homonym: false,
                    hyponym: false,
                }
            }
            None => continue,
        };
        if level.homonym && !cfg.emit_homonyms {
            continue;
        }
        links.push(build_link(&pair, &level)?);
    }

    let mut wm = WModel {
        name: format!("{}-{}", m1.id, m2.id),
        description: format!("Correspondences between {} and {}", m1.name, m2.name),
        left: WModelRef {
            model_id: m1.id.clone(),
            location: m1.id.clone(),
        },
        right: WModelRef {
            model_id: m2.id.clone(),
            location: m2.id.clone(),
        },
        links,
    };
    wm.assign_ids();
    Ok(wm)
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Unmatched {
    pub left_only: Vec<String>,
    pub right_only: Vec<String>,
}

/// Elements of each model that appear in no surviving (non-deleted) link.
pub fn unmatched_elements(wm: &WModel, m1: &Model, m2: &Model) -> Result<Unmatched, EngineError> {
    check_references(wm, m1, m2)?;
    let live: Vec<_> = wm
        .links
        .iter()
        .filter(|l| l.decision != Decision::Deleted)
        .collect();
    let side = |m: &Model, used: &dyn Fn(&str) -> bool| {
        let mut ids: Vec<(ElementKind, String)> = ModelIndex::new(m)
            .elements()
            .into_iter()
            .filter(|(_, id)| !used(id))
            .map(|(k, id)| (k, id.to_string()))
            .collect();
        ids.sort();
        ids.into_iter().map(|(_, id)| id).collect::<Vec<_>>()
    };
    Ok(Unmatched {
        left_only: side(m1, &|id| live.iter().any(|l| l.left.element_id == id)),
        right_only: side(m2, &|id| live.iter().any(|l| l.right.element_id == id)),
    })
}

/// Hand-off artifact: validated links plus what stayed unmatched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExportDocument {
    pub correspondence: WModel,
    pub unmatched: Unmatched,
    pub pending: usize,
}

pub fn export_document(wm: &WModel, m1: &Model, m2: &Model) -> Result<ExportDocument, EngineError> {
    Ok(ExportDocument {
        correspondence: wm.validated_subset(),
        unmatched: unmatched_elements(wm, m1, m2)?,
        pending: wm.pending_count(),
    })
}
