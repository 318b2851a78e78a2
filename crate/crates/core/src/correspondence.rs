//! Correspondence metamodel: weaving links between two models, equivalence
//! levels, serialization and the validate/delete decision log.

use std::collections::BTreeSet;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexical::{SyntacticKind, SyntacticVerdict};
use crate::model::{ElementKind, Model, ModelIndex};
use crate::semantic::{SemanticKind, SemanticVerdict};
use crate::structural::StructuralVerdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LinkKind {
    Equivalence,
    Identity,
    Acronymy,
    Inclusion,
    Abbreviation,
    Syntactic,
    Synonymy,
    Disjunction,
    Inverse,
    EquivOnto,
    Semantic,
    Global,
    Local,
    Structural,
    Hyponymy,
    Sure,
    ModeratelySure,
    Improbable,
    Homonym,
}

impl LinkKind {
    pub const ALL: [LinkKind; 19] = [
        LinkKind::Equivalence,
        LinkKind::Identity,
        LinkKind::Acronymy,
        LinkKind::Inclusion,
        LinkKind::Abbreviation,
        LinkKind::Syntactic,
        LinkKind::Synonymy,
        LinkKind::Disjunction,
        LinkKind::Inverse,
        LinkKind::EquivOnto,
        LinkKind::Semantic,
        LinkKind::Global,
        LinkKind::Local,
        LinkKind::Structural,
        LinkKind::Hyponymy,
        LinkKind::Sure,
        LinkKind::ModeratelySure,
        LinkKind::Improbable,
        LinkKind::Homonym,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Equivalence => "Equivalence",
            LinkKind::Identity => "Identity",
            LinkKind::Acronymy => "Acronymy",
            LinkKind::Inclusion => "Inclusion",
            LinkKind::Abbreviation => "Abbreviation",
            LinkKind::Syntactic => "Syntactic",
            LinkKind::Synonymy => "Synonymy",
            LinkKind::Disjunction => "Disjunction",
            LinkKind::Inverse => "Inverse",
            LinkKind::EquivOnto => "EquivOnto",
            LinkKind::Semantic => "Semantic",
            LinkKind::Global => "Global",
            LinkKind::Local => "Local",
            LinkKind::Structural => "Structural",
            LinkKind::Hyponymy => "Hyponymy",
            LinkKind::Sure => "Sure",
            LinkKind::ModeratelySure => "ModeratelySure",
            LinkKind::Improbable => "Improbable",
            LinkKind::Homonym => "Homonym",
        }
    }

    pub fn is_top_level(self) -> bool {
        matches!(
            self,
            LinkKind::Equivalence | LinkKind::Hyponymy | LinkKind::Inverse | LinkKind::Disjunction
        )
    }

    fn confidence(self) -> Option<Confidence> {
        match self {
            LinkKind::Sure => Some(Confidence::Sure),
            LinkKind::ModeratelySure => Some(Confidence::ModeratelySure),
            LinkKind::Improbable => Some(Confidence::Improbable),
            _ => None,
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for LinkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LinkKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown link kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Confidence {
    Sure,
    ModeratelySure,
    Improbable,
}

impl Confidence {
    pub fn as_str(self) -> &'static str {
        match self {
            Confidence::Sure => "sure",
            Confidence::ModeratelySure => "moderatelySure",
            Confidence::Improbable => "improbable",
        }
    }

    fn link_kind(self) -> LinkKind {
        match self {
            Confidence::Sure => LinkKind::Sure,
            Confidence::ModeratelySure => LinkKind::ModeratelySure,
            Confidence::Improbable => LinkKind::Improbable,
        }
    }
}

impl std::str::FromStr for Confidence {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Confidence::Sure,
            Confidence::ModeratelySure,
            Confidence::Improbable,
        ]
        .into_iter()
        .find(|c| c.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown confidence `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Decision {
    Pending,
    Validated,
    Deleted,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Pending => "pending",
            Decision::Validated => "validated",
            Decision::Deleted => "deleted",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Decision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pending" => Ok(Decision::Pending),
            "validated" => Ok(Decision::Validated),
            "deleted" => Ok(Decision::Deleted),
            _ => Err(format!("unknown decision `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelVerdict {
    pub level: u8,
    pub confidence: Confidence,
    pub homonym: bool,
    pub hyponym: bool,
}

impl LevelVerdict {
    fn new(level: u8, confidence: Confidence) -> Self {
        LevelVerdict {
            level,
            confidence,
            homonym: false,
            hyponym: false,
        }
    }

    fn homonym(mut self) -> Self {
        self.homonym = true;
        self
    }
}

/// Numeric level implied by a confidence for an element kind.
pub fn level_number(kind: ElementKind, confidence: Confidence, hyponym: bool) -> u8 {
    match (kind, confidence) {
        (ElementKind::Class, Confidence::Sure) if hyponym => 4,
        (ElementKind::Class, Confidence::Sure) => 3,
        (ElementKind::Class, Confidence::ModeratelySure) => 2,
        (ElementKind::Generalization, _) => 1,
        (ElementKind::Class, Confidence::Improbable) => 1,
        (_, Confidence::Sure) => 2,
        _ => 1,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrespondenceError {
    #[error("correspondence parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid correspondence: {0}")]
    Invalid(String),
    #[error(
        "link {link_id}: {side} element `{element_id}` ({kind}) not found in model `{model_id}`"
    )]
    DanglingReference {
        link_id: String,
        side: &'static str,
        element_id: String,
        kind: ElementKind,
        model_id: String,
    },
    #[error("{side} model ref `{declared}` does not match model `{actual}`")]
    ModelMismatch {
        side: &'static str,
        declared: String,
        actual: String,
    },
    #[error("hyponymy applies to classes only, not {0}")]
    HyponymOnNonClass(ElementKind),
    #[error("inconsistent verdicts: {0}")]
    Inconsistent(String),
    #[error("unknown link `{0}`")]
    UnknownLink(String),
    #[error("link `{link_id}` is already {decision}")]
    AlreadyDecided { link_id: String, decision: Decision },
    #[error("decision must be validated or deleted")]
    PendingDecision,
    #[error("audit log line {line}: {message}")]
    Audit { line: usize, message: String },
}

/// Equivalence level for a pair from its rule outcomes.
///
/// `syn_sem` is any syntactic or semantic evidence other than hyponymy. For
/// generalizations `global` and `local` mean matched superclass and subclass.
pub fn assign_level(
    kind: ElementKind,
    syn_sem: bool,
    hyponym: bool,
    global: bool,
    local: bool,
) -> Result<Option<LevelVerdict>, CorrespondenceError> {
    use Confidence::*;
    if hyponym {
        if kind != ElementKind::Class {
            return Err(CorrespondenceError::HyponymOnNonClass(kind));
        }
        return Ok(Some(LevelVerdict {
            level: 4,
            confidence: Sure,
            homonym: false,
            hyponym: true,
        }));
    }
    Ok(match kind {
        ElementKind::Class => match (syn_sem, global, local) {
            (true, true, true) => Some(LevelVerdict::new(3, Sure)),
            (true, false, false) => Some(LevelVerdict::new(1, Improbable).homonym()),
            (true, _, _) => Some(LevelVerdict::new(2, ModeratelySure)),
            (false, true, true) => Some(LevelVerdict::new(2, ModeratelySure)),
            (false, false, false) => None,
            (false, _, _) => Some(LevelVerdict::new(1, Improbable)),
        },
        ElementKind::Attribute | ElementKind::Operation | ElementKind::Relation => {
            match (syn_sem, global, local) {
                (false, _, _) => None,
                (true, true, true) => Some(LevelVerdict::new(2, Sure)),
                (true, true, false) => Some(LevelVerdict::new(1, ModeratelySure)),
                (true, false, _) => Some(LevelVerdict::new(1, Improbable).homonym()),
            }
        }
        ElementKind::Generalization => (global && local).then(|| LevelVerdict::new(1, Sure)),
    })
}

/// Syntactic or semantic evidence as counted by `assign_level`.
pub fn has_syn_sem(syntactic: &SyntacticVerdict, semantic: &SemanticVerdict) -> bool {
    !syntactic.is_none()
        || matches!(
            semantic.kind,
            SemanticKind::EquivOnto
                | SemanticKind::Inverse
                | SemanticKind::Disjunction
                | SemanticKind::Synonymy
        )
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct WModelRef {
    pub model_id: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct WElementRef {
    pub element_id: String,
    pub element_kind: ElementKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum LinkSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WLinkEnd<'a> {
    pub element: &'a WElementRef,
    pub side: LinkSide,
}

/// Annotation link nested under a top-level link; it refers to the same pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChildLink {
    pub kind: LinkKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ChildLink>,
}

impl ChildLink {
    fn leaf(kind: LinkKind) -> Self {
        ChildLink {
            kind,
            children: Vec::new(),
        }
    }

    fn with(kind: LinkKind, child: LinkKind) -> Self {
        ChildLink {
            kind,
            children: vec![ChildLink::leaf(child)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WLink {
    pub id: String,
    pub kind: LinkKind,
    pub left: WElementRef,
    pub right: WElementRef,
    pub children: Vec<ChildLink>,
    pub decision: Decision,
}

impl WLink {
    pub fn ends(&self) -> [WLinkEnd<'_>; 2] {
        [
            WLinkEnd {
                element: &self.left,
                side: LinkSide::Left,
            },
            WLinkEnd {
                element: &self.right,
                side: LinkSide::Right,
            },
        ]
    }

    pub fn element_kind(&self) -> ElementKind {
        self.left.element_kind
    }

    fn has_child(&self, kind: LinkKind) -> bool {
        self.children.iter().any(|c| c.kind == kind)
    }

    pub fn confidence(&self) -> Option<Confidence> {
        self.children.iter().find_map(|c| c.kind.confidence())
    }

    pub fn is_hyponymy(&self) -> bool {
        self.kind == LinkKind::Hyponymy
    }

    pub fn is_homonym(&self) -> bool {
        self.has_child(LinkKind::Homonym)
    }

    pub fn global(&self) -> bool {
        self.has_child(LinkKind::Global)
    }

    pub fn local(&self) -> bool {
        self.has_child(LinkKind::Local)
    }

    pub fn level(&self) -> u8 {
        let confidence = self.confidence().unwrap_or(Confidence::Improbable);
        level_number(self.element_kind(), confidence, self.is_hyponymy())
    }

    /// Syntactic or Semantic child, if any.
    pub fn evidence(&self) -> Option<(LinkKind, LinkKind)> {
        self.children
            .iter()
            .find(|c| matches!(c.kind, LinkKind::Syntactic | LinkKind::Semantic))
            .and_then(|c| c.children.first().map(|d| (c.kind, d.kind)))
    }

    fn sort_key(&self) -> (ElementKind, &str, &str) {
        (
            self.element_kind(),
            &self.left.element_id,
            &self.right.element_id,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WModel {
    pub name: String,
    pub description: String,
    pub left: WModelRef,
    pub right: WModelRef,
    pub links: Vec<WLink>,
}

impl WModel {
    pub fn link(&self, id: &str) -> Option<&WLink> {
        self.links.iter().find(|l| l.id == id)
    }

    /// Sorts links canonically and renumbers them `L0001`, `L0002`, ...
    pub fn assign_ids(&mut self) {
        self.links.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        for (i, link) in self.links.iter_mut().enumerate() {
            link.id = format!("L{:04}", i + 1);
        }
    }

    pub fn pending_count(&self) -> usize {
        self.links
            .iter()
            .filter(|l| l.decision == Decision::Pending)
            .count()
    }

    /// Copy holding only validated links.
    pub fn validated_subset(&self) -> WModel {
        WModel {
            links: self
                .links
                .iter()
                .filter(|l| l.decision == Decision::Validated)
                .cloned()
                .collect(),
            ..self.clone()
        }
    }
}

/// Rule outcomes for one element pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairVerdicts {
    pub kind: ElementKind,
    pub left: String,
    pub right: String,
    pub syntactic: SyntacticVerdict,
    pub semantic: SemanticVerdict,
    pub structural: StructuralVerdict,
}

fn syntactic_link(kind: SyntacticKind) -> Option<LinkKind> {
    match kind {
        SyntacticKind::Identity => Some(LinkKind::Identity),
        SyntacticKind::Inclusion => Some(LinkKind::Inclusion),
        SyntacticKind::Acronym => Some(LinkKind::Acronymy),
        SyntacticKind::Abbreviation => Some(LinkKind::Abbreviation),
        SyntacticKind::None => None,
    }
}

/// Builds a pending link with its annotation children.
///
/// Hyponymy links carry only the level child. Otherwise the evidence child is
/// chosen inverse, disjunction, syntactic, then ontology equivalence or synonymy.
pub fn build_link(pair: &PairVerdicts, level: &LevelVerdict) -> Result<WLink, CorrespondenceError> {
    let hyponym = pair.semantic.kind == SemanticKind::Hyponymy;
    if hyponym && pair.kind != ElementKind::Class {
        return Err(CorrespondenceError::HyponymOnNonClass(pair.kind));
    }
    if level.hyponym != hyponym {
        return Err(CorrespondenceError::Inconsistent(format!(
            "level hyponym flag {} but semantic verdict is {:?}",
            level.hyponym, pair.semantic.kind
        )));
    }
    if level.hyponym && (level.level != 4 || level.confidence != Confidence::Sure) {
        return Err(CorrespondenceError::Inconsistent(
            "hyponymy must be level 4, sure".into(),
        ));
    }
    if level.homonym && level.confidence != Confidence::Improbable {
        return Err(CorrespondenceError::Inconsistent(
            "homonyms must be improbable".into(),
        ));
    }
    if level.level != level_number(pair.kind, level.confidence, level.hyponym) {
        return Err(CorrespondenceError::Inconsistent(format!(
            "level {} does not fit {} confidence {}",
            level.level,
            pair.kind,
            level.confidence.as_str()
        )));
    }
    let syn_sem = has_syn_sem(&pair.syntactic, &pair.semantic);
    let StructuralVerdict { global, local } = pair.structural;
    if !syn_sem && !hyponym && !global && !local {
        return Err(CorrespondenceError::Inconsistent(format!(
            "no evidence for {} / {}",
            pair.left, pair.right
        )));
    }

    let mut children = Vec::new();
    let kind = if hyponym {
        LinkKind::Hyponymy
    } else {
        let sem = pair.semantic.kind;
        let (top, evidence) = match sem {
            SemanticKind::Inverse => (
                LinkKind::Inverse,
                Some(ChildLink::with(LinkKind::Semantic, LinkKind::Inverse)),
            ),
            SemanticKind::Disjunction => (
                LinkKind::Disjunction,
                Some(ChildLink::with(LinkKind::Semantic, LinkKind::Disjunction)),
            ),
            _ => {
                let evidence = syntactic_link(pair.syntactic.kind)
                    .map(|k| ChildLink::with(LinkKind::Syntactic, k))
                    .or(match sem {
                        SemanticKind::EquivOnto => {
                            Some(ChildLink::with(LinkKind::Semantic, LinkKind::EquivOnto))
                        }
                        SemanticKind::Synonymy => {
                            Some(ChildLink::with(LinkKind::Semantic, LinkKind::Synonymy))
                        }
                        _ => None,
                    });
                (LinkKind::Equivalence, evidence)
            }
        };
        children.extend(evidence);
        if global {
            children.push(ChildLink::leaf(LinkKind::Global));
        }
        if local {
            children.push(ChildLink::leaf(LinkKind::Local));
        }
        if global || local {
            children.push(ChildLink::leaf(LinkKind::Structural));
        }
        top
    };
    children.push(ChildLink::leaf(level.confidence.link_kind()));
    if level.homonym {
        children.push(ChildLink::leaf(LinkKind::Homonym));
    }
    Ok(WLink {
        id: String::new(),
        kind,
        left: WElementRef {
            element_id: pair.left.clone(),
            element_kind: pair.kind,
        },
        right: WElementRef {
            element_id: pair.right.clone(),
            element_kind: pair.kind,
        },
        children,
        decision: Decision::Pending,
    })
}

/// One row of the review tables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkView {
    pub link_id: String,
    pub element_kind: ElementKind,
    pub left_id: String,
    pub right_id: String,
    pub left_name: String,
    pub right_name: String,
    pub syn_or_sem: String,
    pub explanation: String,
    pub global: String,
    pub local: String,
    pub level: String,
    pub confidence: Confidence,
    pub homonym: bool,
    pub kind: LinkKind,
    pub decision: Decision,
}

fn yes_no(b: bool) -> String {
    if b { "Yes" } else { "No" }.to_string()
}

/// Projects a link onto the display columns, resolving names in the models.
pub fn link_view(link: &WLink, left: &ModelIndex<'_>, right: &ModelIndex<'_>) -> LinkView {
    let name =
        |idx: &ModelIndex<'_>, id: &str| idx.element_name(id).unwrap_or_else(|| id.to_string());
    let hyponymy = link.is_hyponymy();
    let (syn_or_sem, explanation) = match (hyponymy, link.evidence()) {
        (true, _) => ("-".to_string(), "-".to_string()),
        (false, Some((group, detail))) => (group.to_string(), detail.to_string()),
        (false, None) => ("No".to_string(), "-".to_string()),
    };
    let structural = |b: bool| if hyponymy { "-".to_string() } else { yes_no(b) };
    LinkView {
        link_id: link.id.clone(),
        element_kind: link.element_kind(),
        left_id: link.left.element_id.clone(),
        right_id: link.right.element_id.clone(),
        left_name: name(left, &link.left.element_id),
        right_name: name(right, &link.right.element_id),
        syn_or_sem,
        explanation,
        global: structural(link.global()),
        local: structural(link.local()),
        level: if hyponymy {
            "4:Hyponymy".to_string()
        } else {
            link.level().to_string()
        },
        confidence: link.confidence().unwrap_or(Confidence::Improbable),
        homonym: link.is_homonym(),
        kind: link.kind,
        decision: link.decision,
    }
}

fn parse_error(e: serde_json::Error) -> CorrespondenceError {
    CorrespondenceError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Canonical JSON text: links in (kind, left id, right id) order.
pub fn serialize_correspondence(wm: &WModel) -> String {
    let mut wm = wm.clone();
    wm.links.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut text = serde_json::to_string_pretty(&wm).expect("correspondence serializes");
    text.push('\n');
    text
}

/// Parses a correspondence document and checks its internal consistency.
pub fn parse_correspondence(text: &str) -> Result<WModel, CorrespondenceError> {
    let wm: WModel = serde_json::from_str(text).map_err(parse_error)?;
    validate_links(&wm)?;
    Ok(wm)
}

fn validate_links(wm: &WModel) -> Result<(), CorrespondenceError> {
    let invalid = |msg: String| Err(CorrespondenceError::Invalid(msg));
    let mut ids = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for link in &wm.links {
        if link.id.is_empty() || !ids.insert(link.id.as_str()) {
            return invalid(format!("duplicate or empty link id `{}`", link.id));
        }
        if !pairs.insert(link.sort_key()) {
            return invalid(format!("link `{}` repeats an element pair", link.id));
        }
        if !link.kind.is_top_level() {
            return invalid(format!(
                "link `{}` has non top-level kind {}",
                link.id, link.kind
            ));
        }
        if link.left.element_kind != link.right.element_kind {
            return invalid(format!(
                "link `{}` joins elements of different kinds",
                link.id
            ));
        }
        if link.is_hyponymy() && link.element_kind() != ElementKind::Class {
            return invalid(format!("hyponymy link `{}` between non-classes", link.id));
        }
        let levels = link
            .children
            .iter()
            .filter(|c| c.kind.confidence().is_some())
            .count();
        if levels != 1 {
            return invalid(format!(
                "link `{}` has {levels} level children, expected 1",
                link.id
            ));
        }
        for c in &link.children {
            if c.kind.is_top_level() && c.kind != LinkKind::Hyponymy {
                return invalid(format!(
                    "link `{}` nests top-level kind {}",
                    link.id, c.kind
                ));
            }
        }
    }
    Ok(())
}

/// Checks model refs and that every link end names an element of its model.
pub fn check_references(
    wm: &WModel,
    left: &Model,
    right: &Model,
) -> Result<(), CorrespondenceError> {
    for (side, r, m) in [("left", &wm.left, left), ("right", &wm.right, right)] {
        if r.model_id != m.id {
            return Err(CorrespondenceError::ModelMismatch {
                side,
                declared: r.model_id.clone(),
                actual: m.id.clone(),
            });
        }
    }
    let (li, ri) = (ModelIndex::new(left), ModelIndex::new(right));
    for link in &wm.links {
        for (side, end, idx) in [("left", &link.left, &li), ("right", &link.right, &ri)] {
            if idx.kind_of(&end.element_id) != Some(end.element_kind) {
                return Err(CorrespondenceError::DanglingReference {
                    link_id: link.id.clone(),
                    side,
                    element_id: end.element_id.clone(),
                    kind: end.element_kind,
                    model_id: idx.model.id.clone(),
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AuditEntry {
    pub link_id: String,
    pub decision: Decision,
    pub actor: String,
    pub timestamp: DateTime<Utc>,
}

impl AuditEntry {
    /// One JSON line, newline included.
    pub fn to_line(&self) -> String {
        let mut line = serde_json::to_string(self).expect("audit entry serializes");
        line.push('\n');
        line
    }
}

pub fn parse_audit_log(text: &str) -> Result<Vec<AuditEntry>, CorrespondenceError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CorrespondenceError::Audit {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Records a decision on a pending link, returning the new model and its audit entry.
pub fn apply_decision(
    wm: &WModel,
    link_id: &str,
    decision: Decision,
    actor: &str,
    timestamp: DateTime<Utc>,
) -> Result<(WModel, AuditEntry), CorrespondenceError> {
    if decision == Decision::Pending {
        return Err(CorrespondenceError::PendingDecision);
    }
    let pos = wm
        .links
        .iter()
        .position(|l| l.id == link_id)
        .ok_or_else(|| CorrespondenceError::UnknownLink(link_id.to_string()))?;
    let current = wm.links[pos].decision;
    if current != Decision::Pending {
        return Err(CorrespondenceError::AlreadyDecided {
            link_id: link_id.to_string(),
            decision: current,
        });
    }
    let mut next = wm.clone();
    next.links[pos].decision = decision;
    let entry = AuditEntry {
        link_id: link_id.to_string(),
        decision,
        actor: actor.to_string(),
        timestamp,
    };
    Ok((next, entry))
}

/// Applies audit entries in order over an initial model.
pub fn replay(initial: &WModel, log: &[AuditEntry]) -> Result<WModel, CorrespondenceError> {
    log.iter().try_fold(initial.clone(), |wm, e| {
        apply_decision(&wm, &e.link_id, e.decision, &e.actor, e.timestamp).map(|(next, _)| next)
    })
}
