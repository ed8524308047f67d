//! Step-by-step solver traces, one JSON object per step.

use serde::{Deserialize, Serialize};

use crate::model::Allocation;
use crate::value::{serde_value_vec, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Init,
    /// Bundles rotated along an envy cycle.
    Rotate,
    /// Agents picked one good each from a block.
    Pick,
    /// An agent swapped its bundle for a subset of the unallocated goods.
    Replace,
    /// Leftover goods handed out.
    Complete,
    /// A good moved one step along an alternating path.
    Transfer,
    PriceRise,
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub kind: StepKind,
    pub allocation: Allocation,
    #[serde(
        with = "serde_value_vec",
        default,
        skip_serializing_if = "Vec::is_empty"
    )]
    pub prices: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TraceStep {
    pub fn new(kind: StepKind, allocation: &Allocation) -> Self {
        Self {
            kind,
            allocation: allocation.clone(),
            prices: Vec::new(),
            note: None,
        }
    }

    pub fn with_prices(mut self, prices: &[Value]) -> Self {
        self.prices = prices.to_vec();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Renders a trace as JSON lines.
pub fn to_json_lines(trace: &[TraceStep]) -> String {
    let mut out = String::new();
    for step in trace {
        out.push_str(&serde_json::to_string(step).expect("trace steps serialize"));
        out.push('\n');
    }
    out
}
