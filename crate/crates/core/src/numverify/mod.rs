//! Floating-point verification: numeric Jacobian arithmetic, pushing points
//! and classes through the correspondence, and the flow checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub mod cantor;
pub mod checks;
pub mod flow;
pub mod push;
pub mod real;
pub mod roots;

pub use cantor::{CPoint, NumDivisor};
pub use checks::{c2_edge, kernel_check, kernel_check_edge, KernelSide, mult2_check, mult2_check_edge, trace_check, trace_check_edge};
pub use flow::{dubrovin_check, dubrovin_flow, flow_transport_check, top_to_curve_check, FlowState};
pub use push::{Affine, Chart, NumEdge};
pub use real::{DoubleDouble, Real};

/// Outcome of one verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub samples: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub precision_bits: u32,
    /// Every threshold the run used, by name.
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl Report {
    pub(crate) fn new<T: Real>(check: &str, samples: usize, max_error: f64, tolerance: f64) -> Self {
        Report {
            check: check.into(),
            params: BTreeMap::new(),
            samples,
            max_error,
            tolerance,
            pass: max_error <= tolerance,
            precision_bits: T::BITS,
            tolerances: BTreeMap::from([("max_error".to_string(), tolerance)]),
            details: Value::Null,
        }
    }

    pub(crate) fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.params.insert(key.into(), serde_json::to_value(v).expect("serializable"));
        self
    }

    pub(crate) fn tol(mut self, key: &str, v: f64) -> Self {
        self.tolerances.insert(key.into(), v);
        self
    }
}
