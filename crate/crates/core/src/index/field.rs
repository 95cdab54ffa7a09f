use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::QueryError;
use crate::ingest::{AliasMap, PairKind, PublishDate, Source};
use crate::taxonomy::Metatype;

/// Facetable fields. Every field has a posting list per term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Subject,
    Object,
    RelationType,
    Metatype,
    RoleSubject,
    RoleObject,
    RoleEnzyme,
    RoleSubstrate,
    Chemical,
    Gene,
    Disease,
    Journal,
    Author,
    PublishTime,
    FunctionalType,
    PairKind,
    Source,
    AbstractKeyword,
}

impl Field {
    pub const ALL: [Field; 18] = [
        Field::Subject,
        Field::Object,
        Field::RelationType,
        Field::Metatype,
        Field::RoleSubject,
        Field::RoleObject,
        Field::RoleEnzyme,
        Field::RoleSubstrate,
        Field::Chemical,
        Field::Gene,
        Field::Disease,
        Field::Journal,
        Field::Author,
        Field::PublishTime,
        Field::FunctionalType,
        Field::PairKind,
        Field::Source,
        Field::AbstractKeyword,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Field::Subject => "subject",
            Field::Object => "object",
            Field::RelationType => "relation_type",
            Field::Metatype => "metatype",
            Field::RoleSubject => "role_subject",
            Field::RoleObject => "role_object",
            Field::RoleEnzyme => "role_enzyme",
            Field::RoleSubstrate => "role_substrate",
            Field::Chemical => "chemical",
            Field::Gene => "gene",
            Field::Disease => "disease",
            Field::Journal => "journal",
            Field::Author => "author",
            Field::PublishTime => "publish_time",
            Field::FunctionalType => "functional_type",
            Field::PairKind => "pair_kind",
            Field::Source => "source",
            Field::AbstractKeyword => "abstract_keyword",
        }
    }

    /// Fields whose terms are entity names and therefore go through alias
    /// canonicalization.
    pub fn is_entity(self) -> bool {
        matches!(
            self,
            Field::Subject
                | Field::Object
                | Field::RoleSubject
                | Field::RoleObject
                | Field::RoleEnzyme
                | Field::RoleSubstrate
                | Field::Chemical
                | Field::Gene
                | Field::Disease
        )
    }

    /// Maps a user-supplied term onto the posting key for this field.
    pub fn normalize(self, term: &str, aliases: &AliasMap) -> String {
        let folded = term.trim().to_lowercase();
        match self {
            f if f.is_entity() => aliases.canonical_key(term),
            Field::Metatype => term.parse::<Metatype>().map(|m| m.as_str().to_string()).unwrap_or(folded),
            Field::PairKind => term.parse::<PairKind>().map(|p| p.as_str().to_string()).unwrap_or(folded),
            Field::Source => term.parse::<Source>().map(|s| s.as_str().to_string()).unwrap_or(folded),
            Field::PublishTime => term.parse::<PublishDate>().map(|d| d.month_key()).unwrap_or(folded),
            _ => folded,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Field {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Field::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| QueryError::UnknownField(s.to_string()))
    }
}
