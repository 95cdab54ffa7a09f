//! Relation-type universe: metatype grouping, polarity of each relation type
//! and the sign algebra used to compose polarities along chains.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Signed direction of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Increase,
    Decrease,
    Affect,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Increase, Polarity::Decrease, Polarity::Affect];

    /// Swaps `Increase` and `Decrease`; `Affect` is a fixed point.
    pub fn opposite(self) -> Polarity {
        match self {
            Polarity::Increase => Polarity::Decrease,
            Polarity::Decrease => Polarity::Increase,
            Polarity::Affect => Polarity::Affect,
        }
    }

    /// Sign multiplication with `Affect` absorbing.
    pub fn compose(self, other: Polarity) -> Polarity {
        match (self, other) {
            (Polarity::Affect, _) | (_, Polarity::Affect) => Polarity::Affect,
            (a, b) if a == b => Polarity::Increase,
            _ => Polarity::Decrease,
        }
    }

    /// `true` for `Increase` and `Decrease`.
    pub fn is_signed(self) -> bool {
        self != Polarity::Affect
    }

    /// Prefix used in grounded type names: `++`, `--` or `→`.
    pub fn symbol(self) -> &'static str {
        match self {
            Polarity::Increase => "++",
            Polarity::Decrease => "--",
            Polarity::Affect => "→",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Increase => "increase",
            Polarity::Decrease => "decrease",
            Polarity::Affect => "affect",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_lowercase().as_str() {
            "increase" | "++" => Ok(Polarity::Increase),
            "decrease" | "--" => Ok(Polarity::Decrease),
            "affect" | "→" | "->" => Ok(Polarity::Affect),
            other => Err(format!("unknown polarity `{other}`")),
        }
    }
}

/// Free function form of [`Polarity::compose`].
pub fn compose_polarity(first: Polarity, second: Polarity) -> Polarity {
    first.compose(second)
}

/// Free function form of [`Polarity::opposite`].
pub fn opposite(p: Polarity) -> Polarity {
    p.opposite()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metatype {
    RegulateActivity,
    Modification,
    Other,
}

impl Metatype {
    pub fn as_str(self) -> &'static str {
        match self {
            Metatype::RegulateActivity => "regulate_activity",
            Metatype::Modification => "modification",
            Metatype::Other => "other",
        }
    }

    pub fn display(self) -> &'static str {
        match self {
            Metatype::RegulateActivity => "RegulateActivity",
            Metatype::Modification => "Modification",
            Metatype::Other => "Other",
        }
    }

    /// Role nouns for the (subject, object) argument positions. `Other`
    /// relations carry no role categorization.
    pub fn roles(self) -> Option<(Role, Role)> {
        match self {
            Metatype::RegulateActivity => Some((Role::Subject, Role::Object)),
            Metatype::Modification => Some((Role::Enzyme, Role::Substrate)),
            Metatype::Other => None,
        }
    }
}

impl fmt::Display for Metatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metatype {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let folded: String = s.trim().to_lowercase().chars().filter(|c| *c != '_').collect();
        match folded.as_str() {
            "regulateactivity" => Ok(Metatype::RegulateActivity),
            "modification" => Ok(Metatype::Modification),
            "other" => Ok(Metatype::Other),
            _ => Err(format!("unknown metatype `{}`", s.trim())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Subject,
    Object,
    Enzyme,
    Substrate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationType {
    pub name: String,
    pub metatype: Metatype,
    pub polarity: Polarity,
}

impl RelationType {
    pub fn roles(&self) -> Option<(Role, Role)> {
        self.metatype.roles()
    }
}

/// Immutable lookup table from relation-type names to their classification.
///
/// Lookups are case-insensitive and total: names that were never configured
/// resolve to the fallback classification `(Other, Affect)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    types: BTreeMap<String, RelationType>,
}

#[derive(Deserialize)]
struct TaxonomyDoc {
    #[serde(default)]
    relation_types: Vec<EntryDoc>,
}

#[derive(Deserialize)]
struct EntryDoc {
    name: String,
    metatype: String,
    polarity: String,
}

const DEFAULT_TAXONOMY: &str = include_str!("default_taxonomy.toml");

impl Taxonomy {
    /// Parses a TOML document with a top-level `relation_types` array.
    pub fn from_toml_str(source: &str) -> Result<Taxonomy, ConfigError> {
        let doc: TaxonomyDoc =
            toml::from_str(source).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let mut types = BTreeMap::new();
        for (position, entry) in doc.relation_types.into_iter().enumerate() {
            let name = entry.name.trim().to_string();
            if name.is_empty() {
                return Err(ConfigError::InvalidEntry {
                    entry: position,
                    name,
                    reason: "empty relation type name".into(),
                });
            }
            let metatype = entry.metatype.parse::<Metatype>().map_err(|reason| {
                ConfigError::InvalidEntry { entry: position, name: name.clone(), reason }
            })?;
            let polarity = entry.polarity.parse::<Polarity>().map_err(|reason| {
                ConfigError::InvalidEntry { entry: position, name: name.clone(), reason }
            })?;
            let key = name.to_lowercase();
            if types.contains_key(&key) {
                return Err(ConfigError::DuplicateType(name));
            }
            types.insert(key, RelationType { name, metatype, polarity });
        }
        Ok(Taxonomy { types })
    }

    /// The bundled taxonomy covering the protein-protein and knowledge-graph
    /// relation types.
    pub fn builtin() -> Taxonomy {
        Taxonomy::from_toml_str(DEFAULT_TAXONOMY).expect("bundled taxonomy is valid")
    }

    pub fn from_types(types: impl IntoIterator<Item = RelationType>) -> Result<Taxonomy, ConfigError> {
        let mut map = BTreeMap::new();
        for t in types {
            let key = t.name.to_lowercase();
            if map.contains_key(&key) {
                return Err(ConfigError::DuplicateType(t.name));
            }
            map.insert(key, t);
        }
        Ok(Taxonomy { types: map })
    }

    pub fn lookup(&self, name: &str) -> RelationType {
        let trimmed = name.trim();
        match self.types.get(&trimmed.to_lowercase()) {
            Some(t) => t.clone(),
            None => RelationType {
                name: trimmed.to_string(),
                metatype: Metatype::Other,
                polarity: Polarity::Affect,
            },
        }
    }

    pub fn is_known(&self, name: &str) -> bool {
        self.types.contains_key(&name.trim().to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RelationType> {
        self.types.values()
    }
}
