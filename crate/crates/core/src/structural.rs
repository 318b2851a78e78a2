//! Global- and local-structure equivalence over the phase-one matrix.
//!
//! Structure is evaluated strictly after the syntactic and semantic phase and
//! reads only its results; nothing discovered here feeds back into phase one.
//! A relation incident to a class, or a member owned by it, also applies to
//! every subclass of that class.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lexical::SyntacticVerdict;
use crate::model::{ElementKind, ModelIndex, Multiplicity, RelationDef};
use crate::semantic::{SemanticKind, SemanticVerdict};

/// Name-level verdicts for one same-kind pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseOneEntry {
    pub syntactic: SyntacticVerdict,
    pub semantic: SemanticVerdict,
}

/// Every same-kind pair with a non-none syntactic or semantic verdict.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhaseOneMatrix {
    entries: BTreeMap<(ElementKind, String, String), PhaseOneEntry>,
}

impl PhaseOneMatrix {
    pub fn new() -> Self {
        PhaseOneMatrix::default()
    }

    /// Records the pair if either verdict is non-none.
    pub fn record(&mut self, kind: ElementKind, left: &str, right: &str, entry: PhaseOneEntry) {
        if !entry.syntactic.is_none() || !entry.semantic.is_none() {
            self.entries
                .insert((kind, left.to_string(), right.to_string()), entry);
        }
    }

    pub fn get(&self, kind: ElementKind, left: &str, right: &str) -> Option<&PhaseOneEntry> {
        self.entries
            .get(&(kind, left.to_string(), right.to_string()))
    }

    pub fn contains(&self, kind: ElementKind, left: &str, right: &str) -> bool {
        self.get(kind, left, right).is_some()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ElementKind, &str, &str, &PhaseOneEntry)> {
        self.entries
            .iter()
            .map(|((k, l, r), e)| (*k, l.as_str(), r.as_str(), e))
    }

    fn is_inverse(&self, left: &str, right: &str) -> bool {
        self.get(ElementKind::Relation, left, right)
            .is_some_and(|e| e.semantic.kind == SemanticKind::Inverse)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StructuralVerdict {
    pub global: bool,
    pub local: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructuralError {
    #[error("unknown {kind} `{id}`")]
    UnknownElement { kind: ElementKind, id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Source,
    Target,
}

/// Structural rules over two indexed models and their phase-one matrix.
pub struct Structure<'a, 'm> {
    pub left: &'a ModelIndex<'m>,
    pub right: &'a ModelIndex<'m>,
    pub matrix: &'a PhaseOneMatrix,
    /// Fraction of flattened members that must be matched on each side.
    pub local_coverage: f64,
}

impl<'a, 'm> Structure<'a, 'm> {
    pub fn new(
        left: &'a ModelIndex<'m>,
        right: &'a ModelIndex<'m>,
        matrix: &'a PhaseOneMatrix,
    ) -> Self {
        Structure {
            left,
            right,
            matrix,
            local_coverage: 1.0,
        }
    }

    pub fn with_local_coverage(mut self, coverage: f64) -> Self {
        self.local_coverage = coverage;
        self
    }

    pub fn verdict(
        &self,
        kind: ElementKind,
        a: &str,
        b: &str,
    ) -> Result<StructuralVerdict, StructuralError> {
        Ok(StructuralVerdict {
            global: self.global_equiv(kind, a, b)?,
            local: self.local_equiv(kind, a, b)?,
        })
    }

    fn check(&self, kind: ElementKind, a: &str, b: &str) -> Result<(), StructuralError> {
        for (idx, id) in [(self.left, a), (self.right, b)] {
            if idx.kind_of(id) != Some(kind) {
                return Err(StructuralError::UnknownElement {
                    kind,
                    id: id.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Some subclass-or-self of `a` corresponds to some subclass-or-self of `b`.
    pub fn classes_related(&self, a: &str, b: &str) -> bool {
        let (Some(ca), Some(cb)) = (self.left.class(a), self.right.class(b)) else {
            return false;
        };
        let lefts = self.left.descendants_or_self(&ca.id);
        let rights = self.right.descendants_or_self(&cb.id);
        lefts.iter().any(|x| {
            rights
                .iter()
                .any(|y| self.matrix.contains(ElementKind::Class, x, y))
        })
    }

    pub fn global_equiv(
        &self,
        kind: ElementKind,
        a: &str,
        b: &str,
    ) -> Result<bool, StructuralError> {
        self.check(kind, a, b)?;
        Ok(match kind {
            ElementKind::Class => self.class_global(a, b),
            ElementKind::Attribute | ElementKind::Operation => {
                let (oa, ob) = (self.left.owner_of(a), self.right.owner_of(b));
                matches!((oa, ob), (Some(x), Some(y)) if self.classes_related(x, y))
            }
            ElementKind::Relation => {
                let (ra, rb) = (
                    self.left.relation(a).unwrap(),
                    self.right.relation(b).unwrap(),
                );
                let straight = self.classes_related(&ra.source_class, &rb.source_class)
                    || self.classes_related(&ra.target_class, &rb.target_class);
                let reversed = self.matrix.is_inverse(a, b)
                    && (self.classes_related(&ra.source_class, &rb.target_class)
                        || self.classes_related(&ra.target_class, &rb.source_class));
                straight || reversed
            }
            ElementKind::Generalization => {
                let (ga, gb) = (
                    self.left.generalization(a).unwrap(),
                    self.right.generalization(b).unwrap(),
                );
                self.matrix
                    .contains(ElementKind::Class, &ga.super_class, &gb.super_class)
            }
        })
    }

    fn neighbourhood(
        idx: &ModelIndex<'m>,
        class_id: &'m str,
    ) -> Vec<(&'m RelationDef, Role, &'m str)> {
        let lineage = idx.ancestors_or_self(class_id);
        let mut out = Vec::new();
        for r in &idx.model.relations {
            if lineage.contains(&r.source_class.as_str()) {
                out.push((r, Role::Source, r.target_class.as_str()));
            }
            if lineage.contains(&r.target_class.as_str()) {
                out.push((r, Role::Target, r.source_class.as_str()));
            }
        }
        out
    }

    fn class_global(&self, a: &str, b: &str) -> bool {
        let (ca, cb) = (self.left.class(a).unwrap(), self.right.class(b).unwrap());
        let na = Self::neighbourhood(self.left, &ca.id);
        let nb = Self::neighbourhood(self.right, &cb.id);
        if na.is_empty() && nb.is_empty() {
            return true;
        }
        na.iter().any(|(ra, role_a, opp_a)| {
            nb.iter().any(|(rb, role_b, opp_b)| {
                if self.classes_related(opp_a, opp_b) {
                    return true;
                }
                if !self.matrix.contains(ElementKind::Relation, &ra.id, &rb.id) {
                    return false;
                }
                let inverse = self.matrix.is_inverse(&ra.id, &rb.id);
                (role_a == role_b) != inverse
            })
        })
    }

    pub fn local_equiv(
        &self,
        kind: ElementKind,
        a: &str,
        b: &str,
    ) -> Result<bool, StructuralError> {
        self.check(kind, a, b)?;
        Ok(match kind {
            ElementKind::Class => self.class_local(a, b),
            ElementKind::Attribute => {
                let (x, y) = (
                    self.left.attribute(a).unwrap(),
                    self.right.attribute(b).unwrap(),
                );
                self.types_equivalent(&x.type_name, &y.type_name)
            }
            ElementKind::Operation => {
                let (x, y) = (
                    self.left.operation(a).unwrap(),
                    self.right.operation(b).unwrap(),
                );
                self.types_equivalent(&x.return_type, &y.return_type)
                    && x.parameters.len() == y.parameters.len()
                    && x.parameters
                        .iter()
                        .zip(&y.parameters)
                        .all(|(p, q)| self.types_equivalent(&p.type_name, &q.type_name))
            }
            ElementKind::Relation => {
                let (ra, rb) = (
                    self.left.relation(a).unwrap(),
                    self.right.relation(b).unwrap(),
                );
                let (rb_src, rb_tgt) = if self.matrix.is_inverse(a, b) {
                    (&rb.target_multiplicity, &rb.source_multiplicity)
                } else {
                    (&rb.source_multiplicity, &rb.target_multiplicity)
                };
                same_interval(&ra.source_multiplicity, rb_src)
                    && same_interval(&ra.target_multiplicity, rb_tgt)
            }
            ElementKind::Generalization => {
                let (ga, gb) = (
                    self.left.generalization(a).unwrap(),
                    self.right.generalization(b).unwrap(),
                );
                self.matrix
                    .contains(ElementKind::Class, &ga.sub_class, &gb.sub_class)
            }
        })
    }

    fn class_of<'i>(idx: &'i ModelIndex<'m>, type_name: &str) -> Option<&'m str> {
        idx.class(type_name)
            .or_else(|| idx.class_by_name(type_name))
            .map(|c| c.id.as_str())
    }

    /// Identical primitive names, or class types whose classes correspond.
    pub fn types_equivalent(&self, ta: &str, tb: &str) -> bool {
        match (
            Self::class_of(self.left, ta),
            Self::class_of(self.right, tb),
        ) {
            (Some(x), Some(y)) => self.matrix.contains(ElementKind::Class, x, y),
            (None, None) => ta == tb,
            _ => false,
        }
    }

    fn class_local(&self, a: &str, b: &str) -> bool {
        let (la, lo) = self.left.flattened_members(a);
        let (ra, ro) = self.right.flattened_members(b);
        let mut edges: Vec<Vec<usize>> = Vec::new();
        for x in &la {
            edges.push(
                ra.iter()
                    .enumerate()
                    .filter(|(_, y)| self.matrix.contains(ElementKind::Attribute, &x.id, &y.id))
                    .map(|(j, _)| j)
                    .collect(),
            );
        }
        for x in &lo {
            edges.push(
                ro.iter()
                    .enumerate()
                    .filter(|(_, y)| self.matrix.contains(ElementKind::Operation, &x.id, &y.id))
                    .map(|(j, _)| ra.len() + j)
                    .collect(),
            );
        }
        let matched = max_bipartite_matching(&edges, ra.len() + ro.len());
        coverage_met(matched, la.len() + lo.len(), self.local_coverage)
            && coverage_met(matched, ra.len() + ro.len(), self.local_coverage)
    }
}

fn same_interval(a: &str, b: &str) -> bool {
    match (Multiplicity::parse(a), Multiplicity::parse(b)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// `matched / total >= threshold`, with an empty side counting as fully covered.
pub fn coverage_met(matched: usize, total: usize, threshold: f64) -> bool {
    total == 0 || matched as f64 >= threshold * total as f64
}

/// Size of a maximum matching; `edges[i]` lists right vertices adjacent to left vertex `i`.
pub fn max_bipartite_matching(edges: &[Vec<usize>], right_len: usize) -> usize {
    fn augment(
        u: usize,
        edges: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &v in &edges[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|w| augment(w, edges, seen, owner)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right_len];
    let mut count = 0;
    for u in 0..edges.len() {
        let mut seen = vec![false; right_len];
        if augment(u, edges, &mut seen, &mut owner) {
            count += 1;
        }
    }
    count
}
