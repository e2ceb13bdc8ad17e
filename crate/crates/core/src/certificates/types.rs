use serde::{Deserialize, Serialize};

use crate::asymptotics::EstimatorParams;
use crate::geometry::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Unknown,
}

impl Status {
    pub fn from_flags(holds: bool, stable: bool) -> Status {
        match (holds, stable) {
            (_, false) => Status::Unknown,
            (true, true) => Status::Holds,
            (false, true) => Status::Fails,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub u: Direction,
    /// Constraint qualification of the theorem at `u` (`None` if it has none).
    pub qualification: Option<bool>,
    /// The theorem's condition at `u`.
    pub condition: Option<bool>,
    /// Smallest stability score of the estimates used.
    pub stability: f64,
    /// Re-checkable vectors behind the verdict.
    pub witnesses: Vec<Vec<f64>>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub theorem: String,
    pub status: Status,
    pub directions: Vec<DirectionReport>,
    pub summary: String,
    /// Independent brute-force numbers; labeled empirical.
    pub oracle: serde_json::Value,
    pub params: EstimatorParams,
    pub warnings: Vec<String>,
}
