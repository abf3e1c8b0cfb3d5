//! Surgery recipes as read from JSON.

use serde::{Deserialize, Serialize};

/// Lengths of the moment polygon's edges, given outright or as the edges
/// allowed to be nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lengths {
    Explicit(Vec<i64>),
    Support { support: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Step {
    /// Internal blow-up on the boundary component descending from toric edge
    /// `edge`. Without `size` the triangle spans the whole component.
    Blowup {
        edge: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        size: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shear: Option<i64>,
    },
    /// Node smoothing at the corner where component `vertex` meets the next
    /// one, with a slit of `n` lattice steps.
    Smooth { vertex: usize, n: i64 },
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::Blowup { .. } => "internal_blowup",
            Step::Smooth { .. } => "node_smoothing",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub toric_cycle: Vec<i64>,
    pub lengths: Lengths,
    #[serde(default)]
    pub surgeries: Vec<Step>,
    #[serde(default)]
    pub relaxed_cuts: bool,
}

impl Recipe {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
