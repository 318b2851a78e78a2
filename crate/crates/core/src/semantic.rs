//! Semantic comparison rules backed by the ontology and the synonym lexicon.

use serde::{Deserialize, Serialize};

use crate::lexical::{align, anchor_to_ontology};
use crate::model::ElementKind;
use crate::resources::{lexicon_lookup, AnchorSpace, LexiconKind, Resources};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SemanticKind {
    Hyponymy,
    EquivOnto,
    Inverse,
    Disjunction,
    Synonymy,
    None,
}

/// Side of a pair. For hyponymy, the side holding the subclass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SemanticVerdict {
    pub kind: SemanticKind,
    pub hyponym_side: Option<Side>,
}

impl SemanticVerdict {
    pub const NONE: SemanticVerdict = SemanticVerdict {
        kind: SemanticKind::None,
        hyponym_side: None,
    };

    fn of(kind: SemanticKind) -> Self {
        SemanticVerdict {
            kind,
            hyponym_side: None,
        }
    }

    pub fn is_none(&self) -> bool {
        self.kind == SemanticKind::None
    }

    pub fn flipped(self) -> Self {
        SemanticVerdict {
            kind: self.kind,
            hyponym_side: self.hyponym_side.map(Side::flipped),
        }
    }
}

fn anchor(name: &str, res: &Resources, space: AnchorSpace) -> Option<String> {
    anchor_to_ontology(name, res, space).ok().flatten()
}

fn synonymous(a: &str, b: &str, res: &Resources) -> bool {
    let lex = &res.lexicon;
    if lexicon_lookup(lex, LexiconKind::Synonym, a, b) {
        return true;
    }
    let (ta, tb) = (
        crate::lexical::normalize_name(a),
        crate::lexical::normalize_name(b),
    );
    let al = align(ta.tokens(), tb.tokens());
    if al.left.is_empty() || al.right.is_empty() {
        return false;
    }
    if al.shared > 0
        && lexicon_lookup(
            lex,
            LexiconKind::Synonym,
            &al.left.join(" "),
            &al.right.join(" "),
        )
    {
        return true;
    }
    al.left.len() == al.right.len()
        && al
            .left
            .iter()
            .zip(al.right)
            .all(|(x, y)| x == y || lexicon_lookup(lex, LexiconKind::Synonym, x, y))
}

/// Compares two same-kind element names through the ontology and synonyms.
///
/// Order: hyponymy (classes), ontology equivalence, inverse (relations),
/// disjunction (attributes), synonymy, none.
pub fn compare_semantic(a: &str, b: &str, kind: ElementKind, res: &Resources) -> SemanticVerdict {
    let onto = &res.ontology;
    match kind {
        ElementKind::Class => {
            if let (Some(x), Some(y)) = (
                anchor(a, res, AnchorSpace::Concept),
                anchor(b, res, AnchorSpace::Concept),
            ) {
                if x != y {
                    if onto.is_subconcept(&x, &y).unwrap_or(false) {
                        return SemanticVerdict {
                            kind: SemanticKind::Hyponymy,
                            hyponym_side: Some(Side::Left),
                        };
                    }
                    if onto.is_subconcept(&y, &x).unwrap_or(false) {
                        return SemanticVerdict {
                            kind: SemanticKind::Hyponymy,
                            hyponym_side: Some(Side::Right),
                        };
                    }
                }
                if onto.concepts_equivalent(&x, &y).unwrap_or(false) {
                    return SemanticVerdict::of(SemanticKind::EquivOnto);
                }
            }
        }
        ElementKind::Relation | ElementKind::Operation => {
            let space = AnchorSpace::ObjectProperty;
            if let (Some(p), Some(q)) = (anchor(a, res, space), anchor(b, res, space)) {
                if onto.properties_equivalent(&p, &q).unwrap_or(false) {
                    return SemanticVerdict::of(SemanticKind::EquivOnto);
                }
                if kind == ElementKind::Relation && onto.properties_inverse(&p, &q).unwrap_or(false)
                {
                    return SemanticVerdict::of(SemanticKind::Inverse);
                }
            }
        }
        ElementKind::Attribute => {
            let space = AnchorSpace::DataProperty;
            if let (Some(p), Some(q)) = (anchor(a, res, space), anchor(b, res, space)) {
                if p == q {
                    return SemanticVerdict::of(SemanticKind::EquivOnto);
                }
            }
            let space = AnchorSpace::Value;
            if let (Some(x), Some(y)) = (anchor(a, res, space), anchor(b, res, space)) {
                if onto.are_disjoint(&x, &y).unwrap_or(false) {
                    return SemanticVerdict::of(SemanticKind::Disjunction);
                }
            }
        }
        ElementKind::Generalization => return SemanticVerdict::NONE,
    }
    if synonymous(a, b, res) {
        return SemanticVerdict::of(SemanticKind::Synonymy);
    }
    SemanticVerdict::NONE
}
