//! Domain ontology and lexicons.
//!
//! The ontology is used as a lookup table, not a reasoner: the only inference
//! is the reflexive-transitive closure of `subConceptOf` and the
//! symmetric-transitive closure of the equivalence axioms. Both are computed
//! once at load time.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Deserialize;
use thiserror::Error;

use crate::lexical::normalize_name;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OntologyError {
    #[error("ontology parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("axiom `{axiom}` references undeclared name `{name}`")]
    Dangling { axiom: String, name: String },
    #[error("subConceptOf cycle through `{0}`")]
    Cycle(String),
    #[error("unknown ontology name `{0}`")]
    Unknown(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("lexicon line {line}: {message}")]
pub struct LexiconError {
    pub line: usize,
    pub message: String,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct OntologyDoc {
    #[serde(default)]
    concepts: Vec<String>,
    #[serde(default)]
    sub_concept_of: Vec<(String, String)>,
    #[serde(default)]
    equivalent_concepts: Vec<(String, String)>,
    #[serde(default)]
    disjoint: Vec<(String, String)>,
    #[serde(default)]
    values: Vec<String>,
    #[serde(default)]
    object_properties: Vec<ObjectPropertyDoc>,
    #[serde(default)]
    data_properties: Vec<DataPropertyDoc>,
    #[serde(default)]
    inverse: Vec<(String, String)>,
    #[serde(default)]
    equivalent_properties: Vec<(String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectPropertyDoc {
    name: String,
    domain: String,
    range: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DataPropertyDoc {
    name: String,
    domain: String,
}

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Which family of ontology names a model name is anchored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnchorSpace {
    Concept,
    ObjectProperty,
    DataProperty,
    /// Names taking part in a disjointness axiom.
    Value,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    concepts: BTreeSet<String>,
    sub_concept_of: BTreeSet<(String, String)>,
    equivalent_concepts: BTreeSet<(String, String)>,
    disjoint: BTreeSet<(String, String)>,
    values: BTreeSet<String>,
    object_properties: BTreeMap<String, (String, String)>,
    data_properties: BTreeMap<String, String>,
    inverse: BTreeSet<(String, String)>,
    equivalent_properties: BTreeSet<(String, String)>,
    // reflexive-transitive ancestors of each concept
    ancestors: HashMap<String, BTreeSet<String>>,
    concept_class: HashMap<String, usize>,
    property_class: HashMap<String, usize>,
    disjoint_names: BTreeSet<String>,
}

/// Parses an ontology document and prepares the closure tables.
///
/// Blank input yields the empty ontology.
pub fn load_ontology(text: &str) -> Result<Ontology, OntologyError> {
    let doc: OntologyDoc = if text.trim().is_empty() {
        OntologyDoc::default()
    } else {
        serde_json::from_str(text).map_err(|e| OntologyError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?
    };
    Ontology::from_doc(doc)
}

impl Ontology {
    pub fn empty() -> Self {
        Ontology::default()
    }

    fn from_doc(doc: OntologyDoc) -> Result<Self, OntologyError> {
        let concepts: BTreeSet<String> = doc.concepts.into_iter().collect();
        let dangling = |axiom: String, name: &str| OntologyError::Dangling {
            axiom,
            name: name.to_string(),
        };
        let need_concept = |axiom: &str, name: &str| {
            if concepts.contains(name) {
                Ok(())
            } else {
                Err(dangling(axiom.to_string(), name))
            }
        };

        let mut object_properties = BTreeMap::new();
        for p in doc.object_properties {
            let axiom = format!("objectProperty({})", p.name);
            need_concept(&axiom, &p.domain)?;
            need_concept(&axiom, &p.range)?;
            object_properties.insert(p.name, (p.domain, p.range));
        }
        let mut data_properties = BTreeMap::new();
        for p in doc.data_properties {
            need_concept(&format!("dataProperty({})", p.name), &p.domain)?;
            data_properties.insert(p.name, p.domain);
        }

        let mut sub_concept_of = BTreeSet::new();
        for (c, p) in doc.sub_concept_of {
            let axiom = format!("subConceptOf({c}, {p})");
            need_concept(&axiom, &c)?;
            need_concept(&axiom, &p)?;
            sub_concept_of.insert((c, p));
        }
        let mut equivalent_concepts = BTreeSet::new();
        for (a, b) in doc.equivalent_concepts {
            let axiom = format!("equivalentConcepts({a}, {b})");
            need_concept(&axiom, &a)?;
            need_concept(&axiom, &b)?;
            equivalent_concepts.insert(unordered(&a, &b));
        }

        let values: BTreeSet<String> = doc.values.into_iter().collect();
        let declared = |n: &str| {
            concepts.contains(n)
                || values.contains(n)
                || object_properties.contains_key(n)
                || data_properties.contains_key(n)
        };
        let mut disjoint = BTreeSet::new();
        for (a, b) in doc.disjoint {
            let axiom = format!("disjoint({a}, {b})");
            for n in [&a, &b] {
                if !declared(n) {
                    return Err(dangling(axiom, n));
                }
            }
            disjoint.insert(unordered(&a, &b));
        }

        let need_property = |axiom: &str, name: &str| {
            if object_properties.contains_key(name) {
                Ok(())
            } else {
                Err(dangling(axiom.to_string(), name))
            }
        };
        let mut inverse = BTreeSet::new();
        for (p, q) in doc.inverse {
            let axiom = format!("inverse({p}, {q})");
            need_property(&axiom, &p)?;
            need_property(&axiom, &q)?;
            inverse.insert(unordered(&p, &q));
        }
        let mut equivalent_properties = BTreeSet::new();
        for (p, q) in doc.equivalent_properties {
            let axiom = format!("equivalentProperties({p}, {q})");
            need_property(&axiom, &p)?;
            need_property(&axiom, &q)?;
            equivalent_properties.insert(unordered(&p, &q));
        }

        let ancestors = ancestor_closure(&concepts, &sub_concept_of)?;
        let concept_class = equivalence_classes(concepts.iter(), &equivalent_concepts);
        let property_class = equivalence_classes(object_properties.keys(), &equivalent_properties);
        let disjoint_names = disjoint
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();

        Ok(Ontology {
            concepts,
            sub_concept_of,
            equivalent_concepts,
            disjoint,
            values,
            object_properties,
            data_properties,
            inverse,
            equivalent_properties,
            ancestors,
            concept_class,
            property_class,
            disjoint_names,
        })
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.concepts.iter().map(String::as_str)
    }

    pub fn object_properties(&self) -> impl Iterator<Item = &str> {
        self.object_properties.keys().map(String::as_str)
    }

    pub fn data_properties(&self) -> impl Iterator<Item = &str> {
        self.data_properties.keys().map(String::as_str)
    }

    /// Names usable in [`Ontology::are_disjoint`] queries.
    pub fn is_declared(&self, name: &str) -> bool {
        self.concepts.contains(name)
            || self.values.contains(name)
            || self.object_properties.contains_key(name)
            || self.data_properties.contains_key(name)
    }

    /// Candidate names for anchoring in the given space.
    pub fn names_in(&self, space: AnchorSpace) -> Vec<&str> {
        match space {
            AnchorSpace::Concept => self.concepts().collect(),
            AnchorSpace::ObjectProperty => self.object_properties().collect(),
            AnchorSpace::DataProperty => self.data_properties().collect(),
            AnchorSpace::Value => self.disjoint_names.iter().map(String::as_str).collect(),
        }
    }

    fn concept(&self, name: &str) -> Result<(), OntologyError> {
        if self.concepts.contains(name) {
            Ok(())
        } else {
            Err(OntologyError::Unknown(name.to_string()))
        }
    }

    fn property(&self, name: &str) -> Result<(), OntologyError> {
        if self.object_properties.contains_key(name) {
            Ok(())
        } else {
            Err(OntologyError::Unknown(name.to_string()))
        }
    }

    /// Reflexive-transitive subconcept test.
    pub fn is_subconcept(&self, child: &str, parent: &str) -> Result<bool, OntologyError> {
        self.concept(child)?;
        self.concept(parent)?;
        Ok(self
            .ancestors
            .get(child)
            .is_some_and(|a| a.contains(parent)))
    }

    pub fn concepts_equivalent(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        self.concept(a)?;
        self.concept(b)?;
        Ok(a == b || self.concept_class.get(a) == self.concept_class.get(b))
    }

    /// Stated disjointness only; no inference.
    pub fn are_disjoint(&self, a: &str, b: &str) -> Result<bool, OntologyError> {
        for n in [a, b] {
            if !self.is_declared(n) {
                return Err(OntologyError::Unknown(n.to_string()));
            }
        }
        Ok(self.disjoint.contains(&unordered(a, b)))
    }

    pub fn properties_inverse(&self, p: &str, q: &str) -> Result<bool, OntologyError> {
        self.property(p)?;
        self.property(q)?;
        Ok(self.inverse.contains(&unordered(p, q)))
    }

    pub fn properties_equivalent(&self, p: &str, q: &str) -> Result<bool, OntologyError> {
        self.property(p)?;
        self.property(q)?;
        Ok(p == q || self.property_class.get(p) == self.property_class.get(q))
    }
}

fn ancestor_closure(
    concepts: &BTreeSet<String>,
    edges: &BTreeSet<(String, String)>,
) -> Result<HashMap<String, BTreeSet<String>>, OntologyError> {
    let mut parents: HashMap<&str, Vec<&str>> = HashMap::new();
    for (c, p) in edges {
        parents.entry(c).or_default().push(p);
    }
    let mut out = HashMap::new();
    for c in concepts {
        let mut seen = BTreeSet::from([c.clone()]);
        let mut stack = vec![c.as_str()];
        while let Some(n) = stack.pop() {
            for &p in parents.get(n).into_iter().flatten() {
                if p == c {
                    return Err(OntologyError::Cycle(c.clone()));
                }
                if seen.insert(p.to_string()) {
                    stack.push(p);
                }
            }
        }
        out.insert(c.clone(), seen);
    }
    Ok(out)
}

/// Union-find over the axiom pairs; returns a class index per name.
fn equivalence_classes<'a>(
    names: impl Iterator<Item = &'a String>,
    pairs: &BTreeSet<(String, String)>,
) -> HashMap<String, usize> {
    let names: Vec<&String> = names.collect();
    let pos: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut parent: Vec<usize> = (0..names.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (a, b) in pairs {
        if let (Some(&i), Some(&j)) = (pos.get(a.as_str()), pos.get(b.as_str())) {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri] = rj;
        }
    }
    names
        .iter()
        .enumerate()
        .map(|(i, n)| ((*n).clone(), find(&mut parent, i)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LexiconKind {
    Synonym,
    Abbreviation,
    Acronym,
}

/// Synonym, abbreviation and acronym dictionaries.
///
/// Entries are stored by normalized key (lowercase tokens joined by a space),
/// so `UnitOfMeasure` and `Unit of measure` hit the same entry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    synonyms: HashSet<(String, String)>,
    abbreviations: HashMap<String, BTreeSet<String>>,
    acronyms: HashMap<String, BTreeSet<String>>,
}

/// Normalized dictionary key for a name or phrase.
pub fn lexicon_key(text: &str) -> String {
    normalize_name(text).tokens().join(" ")
}

fn initials(key: &str) -> String {
    key.split(' ').filter_map(|t| t.chars().next()).collect()
}

/// Reads a two-column tab-separated dictionary. `#` starts a comment line.
pub fn parse_tsv_pairs(text: &str) -> Result<Vec<(String, String)>, LexiconError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        match (cols.next(), cols.next(), cols.next()) {
            (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => {
                out.push((a.trim().to_string(), b.trim().to_string()))
            }
            _ => {
                return Err(LexiconError {
                    line: i + 1,
                    message: format!("expected two tab-separated columns, got `{line}`"),
                })
            }
        }
    }
    Ok(out)
}

impl Lexicon {
    pub fn empty() -> Self {
        Lexicon::default()
    }

    pub fn from_pairs(
        synonyms: &[(String, String)],
        abbreviations: &[(String, String)],
        acronyms: &[(String, String)],
    ) -> Self {
        let mut lex = Lexicon::default();
        for (a, b) in synonyms {
            let (a, b) = (lexicon_key(a), lexicon_key(b));
            lex.synonyms.insert((a.clone(), b.clone()));
            lex.synonyms.insert((b, a));
        }
        for (short, long) in abbreviations {
            lex.abbreviations
                .entry(lexicon_key(short))
                .or_default()
                .insert(lexicon_key(long));
        }
        for (acr, expansion) in acronyms {
            lex.acronyms
                .entry(lexicon_key(acr))
                .or_default()
                .insert(lexicon_key(expansion));
        }
        lex
    }

    /// Builds a lexicon from the three TSV dictionaries.
    pub fn load(synonyms: &str, abbreviations: &str, acronyms: &str) -> Result<Self, LexiconError> {
        Ok(Lexicon::from_pairs(
            &parse_tsv_pairs(synonyms)?,
            &parse_tsv_pairs(abbreviations)?,
            &parse_tsv_pairs(acronyms)?,
        ))
    }

    pub fn add_synonym(&mut self, a: &str, b: &str) {
        let (a, b) = (lexicon_key(a), lexicon_key(b));
        self.synonyms.insert((a.clone(), b.clone()));
        self.synonyms.insert((b, a));
    }

    fn synonym(&self, a: &str, b: &str) -> bool {
        self.synonyms.contains(&(a.to_string(), b.to_string()))
    }

    fn abbreviation(&self, short: &str, long: &str) -> bool {
        self.abbreviations
            .get(short)
            .is_some_and(|l| l.contains(long))
    }

    fn acronym(&self, acr: &str, long: &str) -> bool {
        let target = initials(long);
        // a single-token candidate would make any acronym of one letter match itself
        long.contains(' ')
            && self
                .acronyms
                .get(acr)
                .is_some_and(|exps| exps.iter().any(|e| initials(e) == target))
    }

    /// Is `short` (as given) the dictionary short form of `long`? One direction only.
    pub fn is_short_form(&self, kind: LexiconKind, short: &str, long: &str) -> bool {
        let (s, l) = (lexicon_key(short), lexicon_key(long));
        match kind {
            LexiconKind::Synonym => self.synonym(&s, &l),
            LexiconKind::Abbreviation => self.abbreviation(&s, &l),
            LexiconKind::Acronym => self.acronym(&s, &l),
        }
    }
}

/// Case-insensitive dictionary lookup, in either direction.
pub fn lexicon_lookup(lex: &Lexicon, kind: LexiconKind, a: &str, b: &str) -> bool {
    lex.is_short_form(kind, a, b) || lex.is_short_form(kind, b, a)
}

/// The ontology and lexicons a comparison runs against.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub ontology: Ontology,
    pub lexicon: Lexicon,
}

impl Resources {
    pub fn new(ontology: Ontology, lexicon: Lexicon) -> Self {
        Resources { ontology, lexicon }
    }

    pub fn empty() -> Self {
        Resources::default()
    }
}
