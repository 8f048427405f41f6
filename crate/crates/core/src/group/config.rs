use serde::{Deserialize, Serialize};

use super::coset::{GroupPair, Peripheral, PeripheralStructure};
use super::{GroupKind, GroupModel};
use crate::error::{Error, Result};

/// JSON description of a group model, e.g.
/// `{"kind":"free_product","factors":[{"kind":"free_abelian","n":2},{"kind":"free_abelian","n":2}]}`.
///
/// Kept as a flat struct rather than a tagged enum so that deserialization
/// errors carry full field paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub kind: GroupSpecKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<GroupSpec>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupSpecKind {
    FreeAbelian,
    FreeGroup,
    FreeProduct,
}

impl GroupSpec {
    pub fn free_abelian(n: u32) -> Self {
        GroupSpec { kind: GroupSpecKind::FreeAbelian, n: Some(n), rank: None, factors: None }
    }

    pub fn free_group(rank: u32) -> Self {
        GroupSpec { kind: GroupSpecKind::FreeGroup, n: None, rank: Some(rank), factors: None }
    }

    pub fn free_product(factors: Vec<GroupSpec>) -> Self {
        GroupSpec { kind: GroupSpecKind::FreeProduct, n: None, rank: None, factors: Some(factors) }
    }

    pub fn to_kind(&self) -> Result<GroupKind> {
        self.to_kind_at("group")
    }

    fn to_kind_at(&self, path: &str) -> Result<GroupKind> {
        let fields = (self.n, self.rank, &self.factors);
        match (self.kind, fields) {
            (GroupSpecKind::FreeAbelian, (Some(n), None, None)) => Ok(GroupKind::FreeAbelian(n)),
            (GroupSpecKind::FreeGroup, (None, Some(r), None)) => Ok(GroupKind::FreeGroup(r)),
            (GroupSpecKind::FreeProduct, (None, None, Some(fs))) => fs
                .iter()
                .enumerate()
                .map(|(i, f)| f.to_kind_at(&format!("{path}.factors[{i}]")))
                .collect::<Result<Vec<_>>>()
                .map(GroupKind::FreeProduct),
            (GroupSpecKind::FreeAbelian, _) => Err(Error::config(path, "free_abelian takes exactly the field `n`")),
            (GroupSpecKind::FreeGroup, _) => Err(Error::config(path, "free_group takes exactly the field `rank`")),
            (GroupSpecKind::FreeProduct, _) => Err(Error::config(path, "free_product takes exactly the field `factors`")),
        }
    }
}

/// Either `{"factor": i}` (the whole i-th free factor) or
/// `{"generators": [g, ...]}` (subgroup generated by basis generators).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeripheralSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub group: GroupSpec,
    #[serde(default)]
    pub peripherals: Vec<PeripheralSpec>,
}

impl PairSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::config(e.path().to_string(), e.inner().to_string()))
    }

    pub fn build(&self) -> Result<GroupPair> {
        let model = GroupModel::new(self.group.to_kind()?).map_err(|e| match e {
            Error::InvalidConfig { .. } => e,
            other => Error::config("group", other.to_string()),
        })?;
        let mut subgroups = Vec::with_capacity(self.peripherals.len());
        for (idx, p) in self.peripherals.iter().enumerate() {
            let path = format!("peripherals[{idx}]");
            let sub = match (p.factor, &p.generators) {
                (Some(f), None) => Peripheral::from_factor(&model, f),
                (None, Some(gens)) => Peripheral::from_generators(&model, gens.clone()),
                _ => Err(Error::config(&path, "give exactly one of `factor` or `generators`")),
            }
            .map_err(|e| match e {
                Error::InvalidConfig { message, .. } => Error::config(&path, message),
                other => other,
            })?;
            subgroups.push(sub);
        }
        Ok(GroupPair::new(model, PeripheralStructure::new(subgroups)))
    }
}
