//! Name normalization and the syntactic comparison rules.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resources::{lexicon_lookup, AnchorSpace, LexiconKind, Ontology, Resources};

/// Lowercase word tokens of a name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Tokens concatenated without separators.
    pub fn concat(&self) -> String {
        self.0.concat()
    }
}

impl fmt::Display for TokenSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("_"))
    }
}

/// Splits a model name into lowercase tokens.
///
/// Boundaries are any non-alphanumeric character, a lowercase letter or digit
/// followed by an uppercase letter, and the last capital of an all-caps run
/// that is followed by a lowercase letter (`XMLParser` -> `xml`, `parser`).
pub fn normalize_name(name: &str) -> TokenSeq {
    let chars: Vec<char> = name.chars().collect();
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !c.is_alphanumeric() {
            if !cur.is_empty() {
                tokens.push(std::mem::take(&mut cur));
            }
            continue;
        }
        if c.is_uppercase() && !cur.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|n| n.is_lowercase());
            if prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower) {
                tokens.push(std::mem::take(&mut cur));
            }
        }
        cur.extend(c.to_lowercase());
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    TokenSeq(tokens)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SyntacticKind {
    Identity,
    Inclusion,
    Acronym,
    Abbreviation,
    None,
}

/// Which side holds the shorter (contained, abbreviated, acronym) form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Direction {
    Symmetric,
    Left,
    Right,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::Symmetric => Direction::Symmetric,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyntacticVerdict {
    pub kind: SyntacticKind,
    pub direction: Direction,
}

impl SyntacticVerdict {
    pub const NONE: SyntacticVerdict = SyntacticVerdict {
        kind: SyntacticKind::None,
        direction: Direction::Symmetric,
    };

    fn new(kind: SyntacticKind, direction: Direction) -> Self {
        SyntacticVerdict { kind, direction }
    }

    pub fn is_none(&self) -> bool {
        self.kind == SyntacticKind::None
    }

    pub fn flipped(self) -> Self {
        SyntacticVerdict::new(self.kind, self.direction.flipped())
    }
}

/// Names of the owning classes of two members whose owners already correspond.
///
/// Lets the composite inclusion rule bridge residual tokens that name the
/// owners, e.g. `id_Client` in `Clients` against `idPerson` in `Person`.
#[derive(Debug, Clone, Copy)]
pub struct ClassBridge<'a> {
    pub left_owner: &'a str,
    pub right_owner: &'a str,
}

impl ClassBridge<'_> {
    fn flipped(self) -> Self {
        ClassBridge {
            left_owner: self.right_owner,
            right_owner: self.left_owner,
        }
    }
}

/// Shared token prefix/suffix lengths and the residual token slices.
pub(crate) struct Alignment<'a> {
    pub shared: usize,
    pub left: &'a [String],
    pub right: &'a [String],
}

pub(crate) fn align<'a>(a: &'a [String], b: &'a [String]) -> Alignment<'a> {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let max_suffix = a.len().min(b.len()) - prefix;
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take(max_suffix)
        .take_while(|(x, y)| x == y)
        .count();
    Alignment {
        shared: prefix + suffix,
        left: &a[prefix..a.len() - suffix],
        right: &b[prefix..b.len() - suffix],
    }
}

/// `short` is obtained from `long` by removing a nonempty prefix and/or suffix.
fn char_included(short: &str, long: &str) -> bool {
    !short.is_empty() && short.len() < long.len() && long.contains(short)
}

fn char_inclusion(a: &str, b: &str) -> Option<Direction> {
    if char_included(a, b) {
        Some(Direction::Left)
    } else if char_included(b, a) {
        Some(Direction::Right)
    } else {
        None
    }
}

fn dictionary(lex_kind: LexiconKind, res: &Resources, a: &str, b: &str) -> Option<Direction> {
    let lex = &res.lexicon;
    if lex.is_short_form(lex_kind, a, b) {
        Some(Direction::Left)
    } else if lex.is_short_form(lex_kind, b, a) {
        Some(Direction::Right)
    } else {
        None
    }
}

/// Residual token runs correspond pairwise (or as a whole) under `unit`,
/// where at least one pair is not an identity.
fn residuals_bridge(left: &[String], right: &[String], unit: &dyn Fn(&str, &str) -> bool) -> bool {
    if left.is_empty() || right.is_empty() {
        return false;
    }
    if unit(&left.join(" "), &right.join(" ")) {
        return true;
    }
    left.len() == right.len()
        && left.iter().zip(right).all(|(x, y)| x == y || unit(x, y))
        && left.iter().zip(right).any(|(x, y)| x != y)
}

fn concepts_match(onto: &Ontology, res: &Resources, a: &str, b: &str) -> bool {
    let anchor = |n: &str| {
        anchor_to_ontology(n, res, AnchorSpace::Concept)
            .ok()
            .flatten()
    };
    match (anchor(a), anchor(b)) {
        (Some(x), Some(y)) => onto.concepts_equivalent(&x, &y).unwrap_or(false),
        _ => false,
    }
}

fn names_class(residual: &str, class_name: &str) -> bool {
    let r: String = residual.split(' ').collect();
    let c = normalize_name(class_name).concat();
    r == c || char_inclusion(&r, &c).is_some()
}

/// Compares two element names.
///
/// Rules are tried in order and the first hit wins: identity, acronym,
/// abbreviation (whole name or aligned residual tokens), inclusion
/// (character-level or token-level composite), none.
pub fn compare_syntactic(
    a: &str,
    b: &str,
    res: &Resources,
    bridge: Option<ClassBridge<'_>>,
) -> SyntacticVerdict {
    let (ta, tb) = (normalize_name(a), normalize_name(b));
    if ta.is_empty() || tb.is_empty() {
        return SyntacticVerdict::NONE;
    }
    if ta == tb {
        return SyntacticVerdict::new(SyntacticKind::Identity, Direction::Symmetric);
    }
    let al = align(ta.tokens(), tb.tokens());
    let residual = |k: LexiconKind| -> Option<Direction> {
        if al.shared == 0 {
            return None;
        }
        dictionary(k, res, &al.left.join(" "), &al.right.join(" "))
    };

    if let Some(d) =
        dictionary(LexiconKind::Acronym, res, a, b).or_else(|| residual(LexiconKind::Acronym))
    {
        return SyntacticVerdict::new(SyntacticKind::Acronym, d);
    }

    if let Some(d) = dictionary(LexiconKind::Abbreviation, res, a, b)
        .or_else(|| residual(LexiconKind::Abbreviation))
    {
        return SyntacticVerdict::new(SyntacticKind::Abbreviation, d);
    }
    let abbrev_unit =
        |x: &str, y: &str| lexicon_lookup(&res.lexicon, LexiconKind::Abbreviation, x, y);
    if residuals_bridge(al.left, al.right, &abbrev_unit) {
        let d = match al.left.concat().len().cmp(&al.right.concat().len()) {
            std::cmp::Ordering::Less => Direction::Left,
            std::cmp::Ordering::Greater => Direction::Right,
            std::cmp::Ordering::Equal => Direction::Symmetric,
        };
        return SyntacticVerdict::new(SyntacticKind::Abbreviation, d);
    }

    if let Some(d) = char_inclusion(&ta.concat(), &tb.concat()) {
        return SyntacticVerdict::new(SyntacticKind::Inclusion, d);
    }
    if al.shared > 0 {
        let unit = |x: &str, y: &str| {
            lexicon_lookup(&res.lexicon, LexiconKind::Synonym, x, y)
                || concepts_match(&res.ontology, res, x, y)
                || bridge.is_some_and(|br| {
                    names_class(x, br.left_owner) && names_class(y, br.right_owner)
                })
        };
        if residuals_bridge(al.left, al.right, &unit) {
            return SyntacticVerdict::new(SyntacticKind::Inclusion, Direction::Symmetric);
        }
    }
    SyntacticVerdict::NONE
}

/// `compare_syntactic` with sides exchanged, for symmetry checks.
pub fn compare_syntactic_swapped(
    a: &str,
    b: &str,
    res: &Resources,
    bridge: Option<ClassBridge<'_>>,
) -> SyntacticVerdict {
    compare_syntactic(b, a, res, bridge.map(ClassBridge::flipped)).flipped()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("`{name}` matches several ontology entities equally well: {candidates:?}")]
pub struct AmbiguousAnchor {
    pub name: String,
    pub candidates: Vec<String>,
}

/// Finds the ontology entity a model name refers to.
///
/// Candidates are ranked identity first, then dictionary matches (acronym or
/// abbreviation), then character-level inclusion with the fewest added
/// characters. Several candidates sharing the best rank is an error.
pub fn anchor_to_ontology(
    name: &str,
    res: &Resources,
    space: AnchorSpace,
) -> Result<Option<String>, AmbiguousAnchor> {
    let key = normalize_name(name);
    if key.is_empty() {
        return Ok(None);
    }
    let concat = key.concat();
    let mut best: Option<(usize, usize)> = None;
    let mut found: Vec<&str> = Vec::new();
    for entity in res.ontology.names_in(space) {
        let ek = normalize_name(entity);
        let rank = if ek == key {
            Some((0, 0))
        } else if lexicon_lookup(&res.lexicon, LexiconKind::Acronym, name, entity)
            || lexicon_lookup(&res.lexicon, LexiconKind::Abbreviation, name, entity)
        {
            Some((1, 0))
        } else {
            let ec = ek.concat();
            char_inclusion(&concat, &ec).map(|_| (2, concat.len().abs_diff(ec.len())))
        };
        let Some(rank) = rank else { continue };
        match best {
            Some(b) if rank > b => {}
            Some(b) if rank == b => found.push(entity),
            _ => {
                best = Some(rank);
                found = vec![entity];
            }
        }
    }
    match found.as_slice() {
        [] => Ok(None),
        [one] => Ok(Some(one.to_string())),
        many => Err(AmbiguousAnchor {
            name: name.to_string(),
            candidates: many.iter().map(|s| s.to_string()).collect(),
        }),
    }
}
