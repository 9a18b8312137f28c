use std::collections::BTreeMap;
use std::fmt;

use mgrestore_milp::VarId;
use serde::{Deserialize, Serialize};

use crate::network::{BusId, Phase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarClass {
    /// Bus energized.
    BusOn,
    /// Line closed.
    LineOn,
    /// Grid-following generator on.
    GenOn,
    /// Load picked up.
    LoadOn,
    /// Bus block energized.
    BlockOn,
    GenP,
    GenQ,
    LineP,
    LineQ,
    /// Squared voltage magnitude.
    Voltage,
    /// Maximum load step of a grid-forming generator.
    MaxLoadStep,
}

impl VarClass {
    pub fn symbol(&self) -> &'static str {
        match self {
            VarClass::BusOn => "xB",
            VarClass::LineOn => "xK",
            VarClass::GenOn => "xG",
            VarClass::LoadOn => "xL",
            VarClass::BlockOn => "xBK",
            VarClass::GenP => "PG",
            VarClass::GenQ => "QG",
            VarClass::LineP => "PK",
            VarClass::LineQ => "QK",
            VarClass::Voltage => "U",
            VarClass::MaxLoadStep => "MLS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Element {
    Bus(BusId),
    Block(usize),
    Line(String),
    Load(String),
    Generator(String),
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Bus(b) => write!(f, "{b}"),
            Element::Block(b) => write!(f, "blk{b}"),
            Element::Line(s) | Element::Load(s) | Element::Generator(s) => f.write_str(s),
        }
    }
}

/// Semantic name of one MILP variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarKey {
    pub class: VarClass,
    pub element: Element,
    pub phase: Option<Phase>,
    /// Horizon step, 1-based.
    pub step: usize,
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}", self.class.symbol(), self.element)?;
        if let Some(p) = self.phase {
            write!(f, ",{}", p.letter())?;
        }
        write!(f, ",{}]", self.step)
    }
}

/// Two-way map between variable ids and their meaning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelIndex {
    pub microgrid: usize,
    pub horizon: usize,
    keys: Vec<VarKey>,
    ids: BTreeMap<VarKey, VarId>,
}

impl ModelIndex {
    /// Register `key` as the next variable id. Panics on a duplicate key.
    pub(crate) fn push(&mut self, key: VarKey) -> VarId {
        let id = self.keys.len();
        let prev = self.ids.insert(key.clone(), id);
        assert!(prev.is_none(), "duplicate variable {key}");
        self.keys.push(key);
        id
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, id: VarId) -> &VarKey {
        &self.keys[id]
    }

    pub fn id(&self, key: &VarKey) -> Option<VarId> {
        self.ids.get(key).copied()
    }

    pub fn get(
        &self,
        class: VarClass,
        element: Element,
        phase: Option<Phase>,
        step: usize,
    ) -> Option<VarId> {
        self.id(&VarKey {
            class,
            element,
            phase,
            step,
        })
    }

    pub fn keys(&self) -> impl Iterator<Item = (VarId, &VarKey)> {
        self.keys.iter().enumerate()
    }

    pub fn count(&self, class: VarClass, step: usize) -> usize {
        self.keys
            .iter()
            .filter(|k| k.class == class && k.step == step)
            .count()
    }
}
