//! Simplified UML class-diagram models.
//!
//! A [`Model`] holds classes (with attributes and operations), named binary
//! associations, and generalization edges. Models are read from and written to
//! a neutral JSON exchange format; see [`parse_model`] and [`serialize_model`].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The kinds of model element a correspondence can point at.
///
/// The declaration order is the canonical ordering used when sorting links
/// and unmatched-element reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ElementKind {
    Class,
    Attribute,
    Operation,
    Relation,
    Generalization,
}

impl ElementKind {
    pub const ALL: [ElementKind; 5] = [
        ElementKind::Class,
        ElementKind::Attribute,
        ElementKind::Operation,
        ElementKind::Relation,
        ElementKind::Generalization,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Class => "class",
            ElementKind::Attribute => "attribute",
            ElementKind::Operation => "operation",
            ElementKind::Relation => "relation",
            ElementKind::Generalization => "generalization",
        }
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ElementKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ElementKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown element kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Model {
    pub id: String,
    pub name: String,
    pub classes: Vec<ClassDef>,
    pub relations: Vec<RelationDef>,
    pub generalizations: Vec<GeneralizationDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDef {
    pub id: String,
    pub name: String,
    pub attributes: Vec<AttributeDef>,
    pub operations: Vec<OperationDef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttributeDef {
    pub id: String,
    pub name: String,
    #[serde(rename = "type")]
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperationDef {
    pub id: String,
    pub name: String,
    #[serde(rename = "returns")]
    pub return_type: String,
    #[serde(rename = "params")]
    pub parameters: Vec<Parameter>,
}

impl OperationDef {
    /// Name plus ordered parameter types; unique within a class.
    pub fn signature(&self) -> String {
        let types: Vec<&str> = self
            .parameters
            .iter()
            .map(|p| p.type_name.as_str())
            .collect();
        format!("{}({})", self.name, types.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameter {
    pub name: String,
    #[serde(rename = "type")]
    pub type_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationDef {
    pub id: String,
    pub name: String,
    #[serde(rename = "source")]
    pub source_class: String,
    #[serde(rename = "target")]
    pub target_class: String,
    #[serde(rename = "sourceMult")]
    pub source_multiplicity: String,
    #[serde(rename = "targetMult")]
    pub target_multiplicity: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralizationDef {
    pub id: String,
    #[serde(rename = "sub")]
    pub sub_class: String,
    #[serde(rename = "super")]
    pub super_class: String,
}

/// A parsed multiplicity interval. `upper == None` means unbounded (`*`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Multiplicity {
    pub lower: u64,
    pub upper: Option<u64>,
}

impl Multiplicity {
    /// Parses `INT | INT..INT | INT..* | *`.
    pub fn parse(text: &str) -> Option<Multiplicity> {
        fn int(s: &str) -> Option<u64> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            s.parse().ok()
        }
        if text == "*" {
            return Some(Multiplicity {
                lower: 0,
                upper: None,
            });
        }
        match text.split_once("..") {
            None => int(text).map(|n| Multiplicity {
                lower: n,
                upper: Some(n),
            }),
            Some((lo, "*")) => int(lo).map(|lower| Multiplicity { lower, upper: None }),
            Some((lo, hi)) => {
                let (lower, upper) = (int(lo)?, int(hi)?);
                (lower <= upper).then_some(Multiplicity {
                    lower,
                    upper: Some(upper),
                })
            }
        }
    }
}

/// Which model invariant a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Invariant {
    DuplicateId,
    DuplicateClassName,
    DuplicateAttributeName,
    DuplicateOperationSignature,
    DuplicateParameterName,
    EmptyName,
    EmptyType,
    DanglingReference,
    SelfGeneralization,
    GeneralizationCycle,
    MultiplicityGrammar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub element_id: String,
    pub invariant: Invariant,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element_id, self.message)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate name: {0}")]
    DuplicateName(Violation),
    #[error("dangling reference: {0}")]
    DanglingReference(Violation),
    #[error("bad multiplicity: {0}")]
    Multiplicity(Violation),
    #[error("generalization cycle: {0}")]
    Cycle(Violation),
    #[error("invalid model: {0}")]
    Invalid(Violation),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
}

impl From<Violation> for ModelError {
    fn from(v: Violation) -> Self {
        match v.invariant {
            Invariant::DuplicateId
            | Invariant::DuplicateClassName
            | Invariant::DuplicateAttributeName
            | Invariant::DuplicateOperationSignature
            | Invariant::DuplicateParameterName => ModelError::DuplicateName(v),
            Invariant::DanglingReference => ModelError::DanglingReference(v),
            Invariant::MultiplicityGrammar => ModelError::Multiplicity(v),
            Invariant::GeneralizationCycle => ModelError::Cycle(v),
            Invariant::EmptyName | Invariant::EmptyType | Invariant::SelfGeneralization => {
                ModelError::Invalid(v)
            }
        }
    }
}

impl From<serde_json::Error> for ModelError {
    fn from(e: serde_json::Error) -> Self {
        ModelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

// Exchange-format documents. Ids are optional on input and always written on output.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    id: String,
    name: String,
    #[serde(default)]
    classes: Vec<ClassDoc>,
    #[serde(default)]
    relations: Vec<RelationDoc>,
    #[serde(default)]
    generalizations: Vec<GeneralizationDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    id: Option<String>,
    name: String,
    #[serde(default)]
    attributes: Vec<AttributeDoc>,
    #[serde(default)]
    operations: Vec<OperationDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeDoc {
    id: Option<String>,
    name: String,
    #[serde(rename = "type")]
    type_name: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OperationDoc {
    id: Option<String>,
    name: String,
    returns: String,
    #[serde(default)]
    params: Vec<Parameter>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationDoc {
    id: Option<String>,
    name: String,
    source: String,
    target: String,
    #[serde(rename = "sourceMult")]
    source_mult: String,
    #[serde(rename = "targetMult")]
    target_mult: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralizationDoc {
    id: Option<String>,
    sub: String,
    #[serde(rename = "super")]
    super_: String,
}

/// Parses a model document and checks every model invariant.
///
/// The first violation found by [`validate_model`] is turned into the
/// matching [`ModelError`] variant.
pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let model = parse_model_unchecked(text)?;
    match validate_model(&model).into_iter().next() {
        Some(v) => Err(v.into()),
        None => Ok(model),
    }
}

/// Parses a model document without checking invariants.
///
/// Endpoint references that resolve to neither a class id nor a unique class
/// name are kept verbatim so that [`validate_model`] can report them.
pub fn parse_model_unchecked(text: &str) -> Result<Model, ModelError> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    let mid = doc.id;

    let classes: Vec<ClassDef> = doc
        .classes
        .into_iter()
        .map(|c| {
            let cname = c.name;
            ClassDef {
                id: c.id.unwrap_or_else(|| format!("{mid}.class.{cname}")),
                attributes: c
                    .attributes
                    .into_iter()
                    .map(|a| AttributeDef {
                        id: a
                            .id
                            .unwrap_or_else(|| format!("{mid}.attribute.{cname}.{}", a.name)),
                        name: a.name,
                        type_name: a.type_name,
                    })
                    .collect(),
                operations: c
                    .operations
                    .into_iter()
                    .map(|o| {
                        let mut op = OperationDef {
                            id: String::new(),
                            name: o.name,
                            return_type: o.returns,
                            parameters: o.params,
                        };
                        op.id = o.id.unwrap_or_else(|| {
                            format!("{mid}.operation.{cname}.{}", op.signature())
                        });
                        op
                    })
                    .collect(),
                name: cname,
            }
        })
        .collect();

    let ids: HashSet<&str> = classes.iter().map(|c| c.id.as_str()).collect();
    let mut by_name: HashMap<&str, Vec<&str>> = HashMap::new();
    for c in &classes {
        by_name
            .entry(c.name.as_str())
            .or_default()
            .push(c.id.as_str());
    }
    let resolve = |r: &str| -> (String, String) {
        if ids.contains(r) {
            let name = classes.iter().find(|c| c.id == r).map(|c| c.name.clone());
            return (r.to_string(), name.unwrap_or_default());
        }
        match by_name.get(r).map(Vec::as_slice) {
            Some([only]) => (only.to_string(), r.to_string()),
            _ => (r.to_string(), r.to_string()),
        }
    };

    let relations = doc
        .relations
        .into_iter()
        .map(|r| {
            let (source, source_name) = resolve(&r.source);
            let (target, _) = resolve(&r.target);
            RelationDef {
                id: r
                    .id
                    .unwrap_or_else(|| format!("{mid}.relation.{source_name}.{}", r.name)),
                name: r.name,
                source_class: source,
                target_class: target,
                source_multiplicity: r.source_mult,
                target_multiplicity: r.target_mult,
            }
        })
        .collect();

    let generalizations = doc
        .generalizations
        .into_iter()
        .map(|g| {
            let (sub, sub_name) = resolve(&g.sub);
            let (sup, sup_name) = resolve(&g.super_);
            GeneralizationDef {
                id: g
                    .id
                    .unwrap_or_else(|| format!("{mid}.generalization.{sub_name}.{sup_name}")),
                sub_class: sub,
                super_class: sup,
            }
        })
        .collect();

    Ok(Model {
        id: mid,
        name: doc.name,
        classes,
        relations,
        generalizations,
    })
}

/// Canonical pretty-printed JSON for a model, newline terminated.
pub fn serialize_model(model: &Model) -> String {
    let mut s = serde_json::to_string_pretty(model).expect("model serialization is infallible");
    s.push('\n');
    s
}

/// Checks every model invariant. An empty result means the model is valid.
pub fn validate_model(model: &Model) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |element_id: &str, invariant: Invariant, message: String| {
        out.push(Violation {
            element_id: element_id.to_string(),
            invariant,
            message,
        })
    };

    let mut seen_ids = HashSet::new();
    let all_ids = model
        .classes
        .iter()
        .flat_map(|c| {
            std::iter::once(c.id.as_str())
                .chain(c.attributes.iter().map(|a| a.id.as_str()))
                .chain(c.operations.iter().map(|o| o.id.as_str()))
        })
        .chain(model.relations.iter().map(|r| r.id.as_str()))
        .chain(model.generalizations.iter().map(|g| g.id.as_str()));
    for id in all_ids {
        if !seen_ids.insert(id) {
            push(
                id,
                Invariant::DuplicateId,
                format!("element id `{id}` is used more than once"),
            );
        }
    }

    let mut class_names = HashSet::new();
    for c in &model.classes {
        if c.name.is_empty() {
            push(&c.id, Invariant::EmptyName, "class name is empty".into());
        }
        if !class_names.insert(c.name.as_str()) {
            push(
                &c.id,
                Invariant::DuplicateClassName,
                format!("class name `{}` is not unique", c.name),
            );
        }
        let mut attr_names = HashSet::new();
        for a in &c.attributes {
            if a.name.is_empty() {
                push(
                    &a.id,
                    Invariant::EmptyName,
                    "attribute name is empty".into(),
                );
            }
            if a.type_name.is_empty() {
                push(
                    &a.id,
                    Invariant::EmptyType,
                    "attribute type is empty".into(),
                );
            }
            if !attr_names.insert(a.name.as_str()) {
                push(
                    &a.id,
                    Invariant::DuplicateAttributeName,
                    format!("attribute `{}` declared twice in `{}`", a.name, c.name),
                );
            }
        }
        let mut sigs = HashSet::new();
        for o in &c.operations {
            if o.name.is_empty() {
                push(
                    &o.id,
                    Invariant::EmptyName,
                    "operation name is empty".into(),
                );
            }
            if !sigs.insert(o.signature()) {
                push(
                    &o.id,
                    Invariant::DuplicateOperationSignature,
                    format!(
                        "operation `{}` declared twice in `{}`",
                        o.signature(),
                        c.name
                    ),
                );
            }
            let mut params = HashSet::new();
            for p in &o.parameters {
                if !params.insert(p.name.as_str()) {
                    push(
                        &o.id,
                        Invariant::DuplicateParameterName,
                        format!("parameter `{}` repeated", p.name),
                    );
                }
            }
        }
    }

    let class_ids: HashSet<&str> = model.classes.iter().map(|c| c.id.as_str()).collect();
    for r in &model.relations {
        if r.name.is_empty() {
            push(&r.id, Invariant::EmptyName, "relation name is empty".into());
        }
        for end in [&r.source_class, &r.target_class] {
            if !class_ids.contains(end.as_str()) {
                push(
                    &r.id,
                    Invariant::DanglingReference,
                    format!("unknown class `{end}`"),
                );
            }
        }
        for m in [&r.source_multiplicity, &r.target_multiplicity] {
            if Multiplicity::parse(m).is_none() {
                push(
                    &r.id,
                    Invariant::MultiplicityGrammar,
                    format!("malformed multiplicity `{m}`"),
                );
            }
        }
    }

    for g in &model.generalizations {
        for end in [&g.sub_class, &g.super_class] {
            if !class_ids.contains(end.as_str()) {
                push(
                    &g.id,
                    Invariant::DanglingReference,
                    format!("unknown class `{end}`"),
                );
            }
        }
        if g.sub_class == g.super_class {
            push(
                &g.id,
                Invariant::SelfGeneralization,
                "class generalizes itself".into(),
            );
        }
    }

    for cycle in generalization_cycles(model) {
        push(
            &cycle[0],
            Invariant::GeneralizationCycle,
            format!("generalization cycle through {}", cycle.join(", ")),
        );
    }

    out
}

/// Generalization ids grouped by non-trivial strongly connected component.
fn generalization_cycles(model: &Model) -> Vec<Vec<String>> {
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    let mut pred: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for g in &model.generalizations {
        if g.sub_class == g.super_class {
            continue;
        }
        succ.entry(&g.sub_class).or_default().push(&g.super_class);
        pred.entry(&g.super_class).or_default().push(&g.sub_class);
    }
    let nodes: BTreeSet<&str> = succ.keys().chain(pred.keys()).copied().collect();

    // Kosaraju: finishing order on the forward graph, then components on the reverse.
    let mut visited = HashSet::new();
    let mut order = Vec::new();
    for &start in &nodes {
        if !visited.insert(start) {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        while let Some((node, i)) = stack.pop() {
            let next = succ.get(node).and_then(|v| v.get(i)).copied();
            match next {
                Some(n) => {
                    stack.push((node, i + 1));
                    if visited.insert(n) {
                        stack.push((n, 0));
                    }
                }
                None => order.push(node),
            }
        }
    }
    let mut component: HashMap<&str, usize> = HashMap::new();
    let mut sizes = Vec::new();
    for &start in order.iter().rev() {
        if component.contains_key(start) {
            continue;
        }
        let idx = sizes.len();
        let mut size = 0;
        let mut stack = vec![start];
        component.insert(start, idx);
        while let Some(node) = stack.pop() {
            size += 1;
            for &p in pred.get(node).into_iter().flatten() {
                if !component.contains_key(p) {
                    component.insert(p, idx);
                    stack.push(p);
                }
            }
        }
        sizes.push(size);
    }

    let mut cycles: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for g in &model.generalizations {
        let (Some(&a), Some(&b)) = (
            component.get(g.sub_class.as_str()),
            component.get(g.super_class.as_str()),
        ) else {
            continue;
        };
        if a == b && sizes[a] > 1 {
            cycles.entry(a).or_default().push(g.id.clone());
        }
    }
    let mut cycles: Vec<Vec<String>> = cycles
        .into_values()
        .map(|mut ids| {
            ids.sort();
            ids
        })
        .collect();
    cycles.sort();
    cycles
}

/// Own members of a class plus everything inherited through generalizations.
///
/// Inherited members whose name is already present (own or nearer ancestor)
/// are shadowed. Terminates on cyclic input.
pub fn flattened_members<'m>(
    model: &'m Model,
    class_id: &str,
) -> Result<(Vec<&'m AttributeDef>, Vec<&'m OperationDef>), ModelError> {
    let index = ModelIndex::new(model);
    index
        .class(class_id)
        .ok_or_else(|| ModelError::UnknownClass(class_id.to_string()))?;
    Ok(index.flattened_members(class_id))
}

/// Lookup tables over a [`Model`].
#[derive(Debug)]
pub struct ModelIndex<'m> {
    pub model: &'m Model,
    classes: HashMap<&'m str, &'m ClassDef>,
    supers: HashMap<&'m str, Vec<&'m str>>,
    subs: HashMap<&'m str, Vec<&'m str>>,
    kinds: HashMap<&'m str, ElementKind>,
    owners: HashMap<&'m str, &'m str>,
}

impl<'m> ModelIndex<'m> {
    pub fn new(model: &'m Model) -> Self {
        let mut classes = HashMap::new();
        let mut kinds = HashMap::new();
        let mut owners = HashMap::new();
        for c in &model.classes {
            classes.insert(c.id.as_str(), c);
            kinds.insert(c.id.as_str(), ElementKind::Class);
            for a in &c.attributes {
                kinds.insert(a.id.as_str(), ElementKind::Attribute);
                owners.insert(a.id.as_str(), c.id.as_str());
            }
            for o in &c.operations {
                kinds.insert(o.id.as_str(), ElementKind::Operation);
                owners.insert(o.id.as_str(), c.id.as_str());
            }
        }
        for r in &model.relations {
            kinds.insert(r.id.as_str(), ElementKind::Relation);
        }
        let mut supers: HashMap<&str, Vec<&str>> = HashMap::new();
        let mut subs: HashMap<&str, Vec<&str>> = HashMap::new();
        for g in &model.generalizations {
            kinds.insert(g.id.as_str(), ElementKind::Generalization);
            supers.entry(&g.sub_class).or_default().push(&g.super_class);
            subs.entry(&g.super_class).or_default().push(&g.sub_class);
        }
        ModelIndex {
            model,
            classes,
            supers,
            subs,
            kinds,
            owners,
        }
    }

    pub fn class(&self, id: &str) -> Option<&'m ClassDef> {
        self.classes.get(id).copied()
    }

    pub fn class_by_name(&self, name: &str) -> Option<&'m ClassDef> {
        self.model.classes.iter().find(|c| c.name == name)
    }

    pub fn kind_of(&self, element_id: &str) -> Option<ElementKind> {
        self.kinds.get(element_id).copied()
    }

    /// Owning class id of an attribute or operation.
    pub fn owner_of(&self, member_id: &str) -> Option<&'m str> {
        self.owners.get(member_id).copied()
    }

    /// Every element id with its kind, in declaration order.
    pub fn elements(&self) -> Vec<(ElementKind, &'m str)> {
        let m = self.model;
        let mut out = Vec::new();
        for c in &m.classes {
            out.push((ElementKind::Class, c.id.as_str()));
        }
        for c in &m.classes {
            out.extend(
                c.attributes
                    .iter()
                    .map(|a| (ElementKind::Attribute, a.id.as_str())),
            );
        }
        for c in &m.classes {
            out.extend(
                c.operations
                    .iter()
                    .map(|o| (ElementKind::Operation, o.id.as_str())),
            );
        }
        out.extend(
            m.relations
                .iter()
                .map(|r| (ElementKind::Relation, r.id.as_str())),
        );
        out.extend(
            m.generalizations
                .iter()
                .map(|g| (ElementKind::Generalization, g.id.as_str())),
        );
        out
    }

    /// Display name of an element; generalizations render as `Sub -> Super`.
    pub fn element_name(&self, element_id: &str) -> Option<String> {
        match self.kind_of(element_id)? {
            ElementKind::Class => self.class(element_id).map(|c| c.name.clone()),
            ElementKind::Attribute => self
                .model
                .classes
                .iter()
                .flat_map(|c| &c.attributes)
                .find(|a| a.id == element_id)
                .map(|a| a.name.clone()),
            ElementKind::Operation => self
                .model
                .classes
                .iter()
                .flat_map(|c| &c.operations)
                .find(|o| o.id == element_id)
                .map(|o| o.name.clone()),
            ElementKind::Relation => self
                .model
                .relations
                .iter()
                .find(|r| r.id == element_id)
                .map(|r| r.name.clone()),
            ElementKind::Generalization => {
                let g = self
                    .model
                    .generalizations
                    .iter()
                    .find(|g| g.id == element_id)?;
                let name = |id: &str| self.class(id).map_or(id.to_string(), |c| c.name.clone());
                Some(format!(
                    "{} -> {}",
                    name(&g.sub_class),
                    name(&g.super_class)
                ))
            }
        }
    }

    fn closure(&self, start: &'m str, edges: &HashMap<&'m str, Vec<&'m str>>) -> Vec<&'m str> {
        let mut seen = HashSet::from([start]);
        let mut out = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for &n in edges.get(c).into_iter().flatten() {
                if seen.insert(n) {
                    out.push(n);
                    queue.push_back(n);
                }
            }
        }
        out
    }

    /// The class followed by its transitive superclasses, nearest first.
    pub fn ancestors_or_self(&self, class_id: &'m str) -> Vec<&'m str> {
        self.closure(class_id, &self.supers)
    }

    /// The class followed by its transitive subclasses, nearest first.
    pub fn descendants_or_self(&self, class_id: &'m str) -> Vec<&'m str> {
        self.closure(class_id, &self.subs)
    }

    pub fn flattened_members(
        &self,
        class_id: &str,
    ) -> (Vec<&'m AttributeDef>, Vec<&'m OperationDef>) {
        let Some(start) = self.class(class_id) else {
            return (Vec::new(), Vec::new());
        };
        let mut attrs = Vec::new();
        let mut ops = Vec::new();
        let mut attr_names = HashSet::new();
        let mut op_names = HashSet::new();
        for cid in self.ancestors_or_self(&start.id) {
            let Some(c) = self.class(cid) else { continue };
            for a in &c.attributes {
                if attr_names.insert(a.name.as_str()) {
                    attrs.push(a);
                }
            }
            for o in &c.operations {
                if op_names.insert(o.name.as_str()) {
                    ops.push(o);
                }
            }
        }
        (attrs, ops)
    }

    pub fn relation(&self, id: &str) -> Option<&'m RelationDef> {
        self.model.relations.iter().find(|r| r.id == id)
    }

    pub fn attribute(&self, id: &str) -> Option<&'m AttributeDef> {
        let owner = self.class(self.owner_of(id)?)?;
        owner.attributes.iter().find(|a| a.id == id)
    }

    pub fn operation(&self, id: &str) -> Option<&'m OperationDef> {
        let owner = self.class(self.owner_of(id)?)?;
        owner.operations.iter().find(|o| o.id == id)
    }

    pub fn generalization(&self, id: &str) -> Option<&'m GeneralizationDef> {
        self.model.generalizations.iter().find(|g| g.id == id)
    }
}
