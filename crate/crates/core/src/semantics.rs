//! Parameter reduction: grounding relations into functional types, second-order
//! (upstream) regulators, and chemical–gene–disease triplet joins.
//!
//! A functional type is keyed by `(object, polarity, metatype)`. Its members
//! are exactly the direct subjects of records with that object and
//! classification. Chained contributors are reported by
//! [`upstream_regulators`] rather than folded into membership.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::index::{Index, RecordId, StoredRecord};
use crate::ingest::PairKind;
use crate::taxonomy::{Metatype, Polarity, Taxonomy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub entity: String,
    pub display: String,
    /// Supporting records in record order.
    pub record_ids: Vec<String>,
}

/// A grounded type-level entity such as `COVID-19 Activator`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalType {
    /// Stable key `{object}|{polarity}|{metatype}`.
    pub id: String,
    pub name: String,
    pub object: String,
    pub object_display: String,
    pub polarity: Polarity,
    pub metatype: Metatype,
    /// The relation type of every supporting record, when they all agree.
    pub specific_relation: Option<String>,
    /// Sorted by canonical entity.
    pub members: Vec<Member>,
}

impl FunctionalType {
    pub fn has_member(&self, entity: &str) -> bool {
        self.members.binary_search_by(|m| m.entity.as_str().cmp(entity)).is_ok()
    }

    pub fn member_entities(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(|m| m.entity.as_str())
    }
}

pub fn functional_type_id(object: &str, polarity: Polarity, metatype: Metatype) -> String {
    format!("{object}|{polarity}|{metatype}")
}

/// Display name for a functional type.
///
/// `RegulateActivity` types read "X Activator" / "X Inhibitor" when every
/// supporting relation is Activation / Inhibition; other combinations fall back
/// to the symbolic "++X Regulator" form. Modification types read
/// "X Phosphorylation target" (or "X Modifier" when the relation is mixed).
pub fn functional_type_name(
    object_display: &str,
    polarity: Polarity,
    metatype: Metatype,
    specific_relation: Option<&str>,
) -> String {
    let specific = specific_relation.map(str::trim).filter(|s| !s.is_empty());
    let symbolic = || format!("{}{object_display} Regulator", polarity.symbol());
    match metatype {
        Metatype::RegulateActivity => match specific.map(str::to_lowercase).as_deref() {
            Some("activation") => format!("{object_display} Activator"),
            Some("inhibition") => format!("{object_display} Inhibitor"),
            _ => symbolic(),
        },
        Metatype::Modification => match specific {
            Some(t) => format!("{object_display} {t} target"),
            None => format!("{object_display} Modifier"),
        },
        Metatype::Other => symbolic(),
    }
}

/// Groups records into functional types. Also returns, per input record, the
/// ordinal of the functional type it supports.
pub(crate) fn ground_records(
    records: &[StoredRecord],
    display: impl Fn(&str) -> String,
) -> (Vec<FunctionalType>, Vec<u32>) {
    struct Group<'a> {
        members: BTreeMap<&'a str, Vec<usize>>,
        relations: BTreeSet<&'a str>,
    }
    let mut groups: BTreeMap<(&str, Polarity, Metatype), Group> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let g = groups
            .entry((r.object.canonical.as_str(), r.polarity, r.metatype))
            .or_insert_with(|| Group { members: BTreeMap::new(), relations: BTreeSet::new() });
        g.members.entry(r.subject.canonical.as_str()).or_default().push(i);
        g.relations.insert(r.relation.as_str());
    }
    let mut assignment = vec![0u32; records.len()];
    let mut types = Vec::with_capacity(groups.len());
    for (ordinal, ((object, polarity, metatype), group)) in groups.into_iter().enumerate() {
        let specific = (group.relations.len() == 1).then(|| group.relations.iter().next().unwrap().to_string());
        let object_display = display(object);
        let members = group
            .members
            .into_iter()
            .map(|(entity, rs)| {
                for &r in &rs {
                    assignment[r] = ordinal as u32;
                }
                Member {
                    entity: entity.to_string(),
                    display: display(entity),
                    record_ids: rs.into_iter().map(|r| records[r].id.clone()).collect(),
                }
            })
            .collect();
        types.push(FunctionalType {
            id: functional_type_id(object, polarity, metatype),
            name: functional_type_name(&object_display, polarity, metatype, specific.as_deref()),
            object: object.to_string(),
            object_display,
            polarity,
            metatype,
            specific_relation: specific,
            members,
        });
    }
    (types, assignment)
}

/// Grounds every functional type of the index's records under `taxonomy`.
///
/// With the taxonomy the index was built with, this equals
/// [`Index::functional_types`].
pub fn ground_functional_types(index: &Index, taxonomy: &Taxonomy) -> Vec<FunctionalType> {
    let reclassified: Vec<StoredRecord> = index
        .records()
        .iter()
        .map(|r| {
            let class = taxonomy.lookup(&r.relation);
            StoredRecord { relation: class.name, metatype: class.metatype, polarity: class.polarity, ..r.clone() }
        })
        .collect();
    ground_records(&reclassified, |c| index.entity_display(c).to_string()).0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpstreamRegulator {
    pub entity: String,
    pub display: String,
    pub via_member: String,
    pub via_display: String,
    pub record_ids: Vec<String>,
}

/// Why a second-order query returned nothing by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpstreamNote {
    /// Unsigned functional types have no same/opposite relation.
    AffectPolarity,
    /// Modification functional types are not chained.
    ModificationExcluded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpstreamSet {
    pub regulators: Vec<UpstreamRegulator>,
    pub note: Option<UpstreamNote>,
}

impl UpstreamSet {
    /// Distinct regulator entities.
    pub fn entities(&self) -> BTreeSet<&str> {
        self.regulators.iter().map(|r| r.entity.as_str()).collect()
    }
}

fn second_order(index: &Index, ft: &FunctionalType, wanted: Polarity) -> UpstreamSet {
    if !ft.polarity.is_signed() {
        return UpstreamSet { regulators: Vec::new(), note: Some(UpstreamNote::AffectPolarity) };
    }
    if ft.metatype == Metatype::Modification {
        return UpstreamSet { regulators: Vec::new(), note: Some(UpstreamNote::ModificationExcluded) };
    }
    let mut found: BTreeMap<(&str, &str), Vec<RecordId>> = BTreeMap::new();
    for m in &ft.members {
        for &r in index.records_with_object(&m.entity) {
            let rec = index.record(r);
            if rec.metatype == Metatype::RegulateActivity && rec.polarity == wanted {
                found.entry((rec.subject.canonical.as_str(), m.entity.as_str())).or_default().push(r);
            }
        }
    }
    let regulators = found
        .into_iter()
        .map(|((entity, via), records)| UpstreamRegulator {
            entity: entity.to_string(),
            display: index.entity_display(entity).to_string(),
            via_member: via.to_string(),
            via_display: index.entity_display(via).to_string(),
            record_ids: records.into_iter().map(|r| index.record(r).id.clone()).collect(),
        })
        .collect();
    UpstreamSet { regulators, note: None }
}

/// Entities `x` with a same-polarity `RegulateActivity` relation onto some
/// member of `ft`, each with the witnessing member and records.
pub fn upstream_regulators(index: &Index, ft: &FunctionalType) -> UpstreamSet {
    second_order(index, ft, ft.polarity)
}

/// As [`upstream_regulators`] with the opposite polarity.
pub fn opposite_upstream_regulators(index: &Index, ft: &FunctionalType) -> UpstreamSet {
    second_order(index, ft, ft.polarity.opposite())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TripletRelation {
    pub chemical: String,
    pub gene: String,
    pub disease: String,
    pub cg_relation: String,
    pub gd_relation: String,
    /// Records from both sides, in record order.
    pub evidence: Vec<String>,
}

/// Natural join of chemical–gene and gene–disease records on the gene.
pub fn join_triplets(index: &Index) -> Vec<TripletRelation> {
    type Side<'a> = BTreeMap<(&'a str, &'a str), Vec<RecordId>>;
    let mut cg: HashMap<&str, Side> = HashMap::new();
    let mut gd: HashMap<&str, Side> = HashMap::new();
    for (i, r) in index.records().iter().enumerate() {
        match r.pair_kind {
            PairKind::ChemicalGene => cg
                .entry(r.object.canonical.as_str())
                .or_default()
                .entry((r.subject.canonical.as_str(), r.relation.as_str()))
                .or_default()
                .push(i as RecordId),
            PairKind::GeneDisease => gd
                .entry(r.subject.canonical.as_str())
                .or_default()
                .entry((r.object.canonical.as_str(), r.relation.as_str()))
                .or_default()
                .push(i as RecordId),
            _ => {}
        }
    }
    let mut out = Vec::new();
    for (gene, chems) in &cg {
        let Some(diseases) = gd.get(gene) else { continue };
        for ((chemical, cg_rel), left) in chems {
            for ((disease, gd_rel), right) in diseases {
                let mut evidence: Vec<RecordId> = left.iter().chain(right).copied().collect();
                evidence.sort_unstable();
                evidence.dedup();
                out.push(TripletRelation {
                    chemical: chemical.to_string(),
                    gene: gene.to_string(),
                    disease: disease.to_string(),
                    cg_relation: cg_rel.to_string(),
                    gd_relation: gd_rel.to_string(),
                    evidence: evidence.into_iter().map(|r| index.record(r).id.clone()).collect(),
                });
            }
        }
    }
    out.sort_by(|a, b| {
        (&a.chemical, &a.gene, &a.disease, &a.cg_relation, &a.gd_relation)
            .cmp(&(&b.chemical, &b.gene, &b.disease, &b.cg_relation, &b.gd_relation))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naming_examples() {
        assert_eq!(
            functional_type_name("COVID-19", Polarity::Increase, Metatype::RegulateActivity, Some("Activation")),
            "COVID-19 Activator"
        );
        assert_eq!(
            functional_type_name("CASP3", Polarity::Decrease, Metatype::Other, Some("Decrease Reaction")),
            "--CASP3 Regulator"
        );
        assert_eq!(functional_type_name("TNF", Polarity::Affect, Metatype::Other, None), "→TNF Regulator");
        assert_eq!(
            functional_type_name("IFNB1", Polarity::Decrease, Metatype::RegulateActivity, Some("Inhibition")),
            "IFNB1 Inhibitor"
        );
        assert_eq!(
            functional_type_name("MAVS", Polarity::Increase, Metatype::RegulateActivity, None),
            "++MAVS Regulator"
        );
        assert_eq!(
            functional_type_name("STAT1", Polarity::Affect, Metatype::Modification, Some("Phosphorylation")),
            "STAT1 Phosphorylation target"
        );
        assert_eq!(functional_type_name("STAT1", Polarity::Affect, Metatype::Modification, None), "STAT1 Modifier");
    }

    #[test]
    fn naming_is_referentially_transparent() {
        let a = functional_type_name("X", Polarity::Increase, Metatype::Other, Some("IncreaseAmount"));
        let b = functional_type_name("X", Polarity::Increase, Metatype::Other, Some("IncreaseAmount"));
        assert_eq!(a, b);
    }
}
