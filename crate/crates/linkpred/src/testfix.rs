//! Shared fixtures for unit tests.

use crate::graph::BipartiteGraph;
use crate::ingest::CheckIn;

pub(crate) fn checkin(user: &str, venue: &str, t: i64) -> CheckIn {
    CheckIn {
        user_id: user.into(),
        venue_id: venue.into(),
        category: "Bar".into(),
        latitude: 1.0,
        longitude: 2.0,
        timestamp: t,
    }
}

/// The worked example graph: U1: {V1, V2}, U2: {V1, V2, V3}, U3: {V3, V4},
/// every pair count 1. Venue binary degrees are V1=2, V2=2, V3=2, V4=1.
pub(crate) fn toy_graph() -> BipartiteGraph {
    BipartiteGraph::from_checkins(&[
        checkin("U1", "V1", 10),
        checkin("U1", "V2", 20),
        checkin("U2", "V1", 30),
        checkin("U2", "V2", 40),
        checkin("U2", "V3", 50),
        checkin("U3", "V3", 60),
        checkin("U3", "V4", 70),
    ])
}
