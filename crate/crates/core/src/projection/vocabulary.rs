use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::DataError;

/// Name of the computed aggregate region. Never stored in a series.
pub const GLOBAL_REGION: &str = "global";

/// The fixed end-of-life fate set, in canonical order.
pub const EOL_FATES: [&str; 4] = [
    "eolRecyclingMT",
    "eolIncinerationMT",
    "eolLandfillMT",
    "eolMismanagedMT",
];

/// Index into [`EOL_FATES`] of the fate that receives unassigned waste.
pub const MISMANAGED_FATE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    pub display_name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeKind {
    ConsumptionSector,
    EolFate,
    Production,
    Trade,
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AttributeKind::ConsumptionSector => "consumption-sector",
            AttributeKind::EolFate => "eol-fate",
            AttributeKind::Production => "production",
            AttributeKind::Trade => "trade",
        };
        f.write_str(s)
    }
}

fn default_unit() -> String {
    "MT/year".to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub id: String,
    pub kind: AttributeKind,
    #[serde(default = "default_unit")]
    pub unit: String,
    /// Display grouping used by the details views. Optional.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

/// Mean product lifetime (years) per consumption-sector attribute.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LifetimeConfig {
    means: BTreeMap<String, f64>,
}

impl LifetimeConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, attribute: &str, mean_lifetime: f64) -> Self {
        self.means.insert(attribute.to_string(), mean_lifetime);
        self
    }

    pub fn mean_lifetime(&self, attribute: &str) -> Option<f64> {
        self.means.get(attribute).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.means.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VocabularyDocument {
    regions: Vec<Region>,
    attributes: Vec<Attribute>,
    lifetimes: LifetimeConfig,
}

/// Regions, attributes and lifetime means declared for a baseline.
///
/// Built from the vocabulary JSON document; construction validates every
/// invariant, so a `Vocabulary` in hand is always well formed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "VocabularyDocument", into = "VocabularyDocument")]
pub struct Vocabulary {
    regions: Vec<Region>,
    attributes: Vec<Attribute>,
    lifetimes: LifetimeConfig,
    region_index: HashMap<String, usize>,
    attribute_index: HashMap<String, usize>,
    consumption: Vec<usize>,
    fates: [usize; 4],
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.regions == other.regions
            && self.attributes == other.attributes
            && self.lifetimes == other.lifetimes
    }
}

impl From<Vocabulary> for VocabularyDocument {
    fn from(v: Vocabulary) -> Self {
        VocabularyDocument {
            regions: v.regions,
            attributes: v.attributes,
            lifetimes: v.lifetimes,
        }
    }
}

impl TryFrom<VocabularyDocument> for Vocabulary {
    type Error = DataError;

    fn try_from(doc: VocabularyDocument) -> Result<Self, DataError> {
        Vocabulary::new(doc.regions, doc.attributes, doc.lifetimes)
    }
}

fn is_region_id(id: &str) -> bool {
    let mut chars = id.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
}

fn is_attribute_id(id: &str) -> bool {
    let mut chars = id.chars();
    matches!(chars.next(), Some('a'..='z')) && chars.all(|c| c.is_ascii_alphanumeric())
}

impl Vocabulary {
    pub fn new(
        regions: Vec<Region>,
        attributes: Vec<Attribute>,
        lifetimes: LifetimeConfig,
    ) -> Result<Self, DataError> {
        let invalid = |msg: String| Err(DataError::InvalidVocabulary(msg));

        if regions.is_empty() {
            return invalid("at least one region is required".into());
        }
        let mut region_index = HashMap::new();
        for (i, region) in regions.iter().enumerate() {
            if !is_region_id(&region.id) {
                return invalid(format!("region id `{}` must match [a-z][a-z0-9]*", region.id));
            }
            if region.id == GLOBAL_REGION {
                return invalid("`global` is a computed aggregate and cannot be declared".into());
            }
            if region_index.insert(region.id.clone(), i).is_some() {
                return invalid(format!("duplicate region `{}`", region.id));
            }
        }

        let mut attribute_index = HashMap::new();
        let mut consumption = Vec::new();
        let mut fates = [usize::MAX; 4];
        for (i, attr) in attributes.iter().enumerate() {
            if !is_attribute_id(&attr.id) {
                return invalid(format!("attribute id `{}` is not a lowercase camel token", attr.id));
            }
            if attribute_index.insert(attr.id.clone(), i).is_some() {
                return invalid(format!("duplicate attribute `{}`", attr.id));
            }
            match attr.kind {
                AttributeKind::EolFate => match EOL_FATES.iter().position(|f| *f == attr.id) {
                    Some(slot) => fates[slot] = i,
                    None => {
                        return invalid(format!(
                            "eol-fate attribute `{}` is not one of {:?}",
                            attr.id, EOL_FATES
                        ))
                    }
                },
                AttributeKind::ConsumptionSector => {
                    match lifetimes.mean_lifetime(&attr.id) {
                        Some(mean) if mean.is_finite() && mean > 0.0 => {}
                        Some(mean) => {
                            return invalid(format!(
                                "mean lifetime for `{}` must be finite and > 0 (got {mean})",
                                attr.id
                            ))
                        }
                        None => return invalid(format!("no lifetime configured for `{}`", attr.id)),
                    }
                    consumption.push(i);
                }
                AttributeKind::Production | AttributeKind::Trade => {}
            }
        }
        if let Some(slot) = fates.iter().position(|&i| i == usize::MAX) {
            return invalid(format!("eol-fate attribute `{}` is not declared", EOL_FATES[slot]));
        }
        for (name, _) in lifetimes.iter() {
            match attribute_index.get(name) {
                Some(&i) if attributes[i].kind == AttributeKind::ConsumptionSector => {}
                _ => return invalid(format!("lifetime given for non-consumption attribute `{name}`")),
            }
        }

        Ok(Vocabulary {
            regions,
            attributes,
            lifetimes,
            region_index,
            attribute_index,
            consumption,
            fates,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, DataError> {
        serde_json::from_str(text).map_err(|e| DataError::InvalidVocabulary(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("vocabulary serializes")
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn lifetimes(&self) -> &LifetimeConfig {
        &self.lifetimes
    }

    pub fn region_index(&self, id: &str) -> Option<usize> {
        self.region_index.get(id).copied()
    }

    pub fn attribute_index(&self, id: &str) -> Option<usize> {
        self.attribute_index.get(id).copied()
    }

    pub fn attribute(&self, id: &str) -> Option<&Attribute> {
        self.attribute_index(id).map(|i| &self.attributes[i])
    }

    /// Attribute indices of the consumption sectors, in declaration order.
    pub fn consumption_sectors(&self) -> &[usize] {
        &self.consumption
    }

    /// Attribute indices of the four fates, in [`EOL_FATES`] order.
    pub fn fate_indices(&self) -> [usize; 4] {
        self.fates
    }

    /// Mean lifetime of the consumption sector at attribute index `i`.
    pub fn lifetime_at(&self, i: usize) -> Option<f64> {
        self.lifetimes.mean_lifetime(&self.attributes[i].id)
    }

    pub fn has_same_shape(&self, other: &Vocabulary) -> bool {
        self.regions.len() == other.regions.len()
            && self.attributes.len() == other.attributes.len()
            && self.regions.iter().zip(&other.regions).all(|(a, b)| a.id == b.id)
            && self.attributes.iter().zip(&other.attributes).all(|(a, b)| a.id == b.id)
    }
}
