//! Degree and metadata baselines.
//!
//! The global ranking method scores every venue by its degree regardless of
//! the user; assortativity prefers venues whose degree matches the mean
//! degree of the user's venues. The two metadata baselines score a candidate
//! by proximity to the user's mean check-in location and by the fraction of
//! the user's check-ins sharing the candidate's venue type — they exist to
//! measure how much signal the metadata itself carries.

use std::collections::HashMap;

use log::debug;

use crate::graph::{BipartiteGraph, UserIdx, VenueIdx};

use super::PredictError;

/// Mean Earth radius, km.
const EARTH_RADIUS_KM: f64 = 6371.0;

/// Great-circle distance between two (lat, lon) points in degrees, km.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let dlat = (lat2 - lat1).to_radians();
    let dlon = (lon2 - lon1).to_radians();
    let a = (dlat / 2.0).sin().powi(2)
        + lat1.to_radians().cos() * lat2.to_radians().cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin()
}

/// Global ranking method: the venue's distinct-user degree, independent of
/// the querying user. A venue stripped of all edges scores zero.
pub fn score_grm(g: &BipartiteGraph, v: VenueIdx) -> f64 {
    g.venue_degrees(v).binary as f64
}

/// GRM scores for all venues.
pub fn grm_vector(g: &BipartiteGraph) -> Vec<f64> {
    g.venues().map(|v| score_grm(g, v)).collect()
}

/// Mean binary degree over the user's distinct venues; `None` when isolated.
pub fn mean_neighbor_degree(g: &BipartiteGraph, u: UserIdx) -> Option<f64> {
    let venues = g.user_venues(u);
    if venues.is_empty() {
        return None;
    }
    let sum: u64 = venues
        .iter()
        .map(|&(v, _)| g.venue_degrees(v).binary as u64)
        .sum();
    Some(sum as f64 / venues.len() as f64)
}

/// Assortativity: `-|meanDeg(u) - degree(v)|`, so venues whose degree
/// matches the user's habit rank first. An isolated user scores zero for
/// every venue (flagged in the log).
pub fn score_assortativity(g: &BipartiteGraph, u: UserIdx, v: VenueIdx) -> f64 {
    match mean_neighbor_degree(g, u) {
        Some(mean) => -(mean - g.venue_degrees(v).binary as f64).abs(),
        None => {
            debug!("assortativity: user {} is isolated, scoring 0", g.user_id(u));
            0.0
        }
    }
}

/// Assortativity scores for all venues.
pub fn assort_vector(g: &BipartiteGraph, u: UserIdx) -> Vec<f64> {
    match mean_neighbor_degree(g, u) {
        Some(mean) => g
            .venues()
            .map(|v| -(mean - g.venue_degrees(v).binary as f64).abs())
            .collect(),
        None => {
            debug!("assortativity: user {} is isolated, scoring 0", g.user_id(u));
            vec![0.0; g.n_venues()]
        }
    }
}

/// Multiplicity-weighted mean of the user's venue coordinates, or `None`
/// when no visited venue carries coordinates. Arithmetic mean over raw
/// degrees — fine at city scale, not across the antimeridian.
pub fn mean_location(g: &BipartiteGraph, u: UserIdx) -> Option<(f64, f64)> {
    let mut lat = 0.0;
    let mut lon = 0.0;
    let mut weight = 0u64;
    for &(v, c) in g.user_venues(u) {
        if let Some(meta) = g.venue_meta(v) {
            lat += meta.latitude * c as f64;
            lon += meta.longitude * c as f64;
            weight += c as u64;
        }
    }
    (weight > 0).then(|| (lat / weight as f64, lon / weight as f64))
}

/// Location baseline: negated distance from the user's mean check-in
/// location to the venue, km. Closer venues score higher; the maximum
/// possible score is zero.
pub fn score_loc_baseline(
    g: &BipartiteGraph,
    u: UserIdx,
    v: VenueIdx,
) -> Result<f64, PredictError> {
    let meta = g.venue_meta(v).ok_or_else(|| PredictError::MissingVenueMeta {
        venue: g.venue_id(v).to_string(),
        what: "coordinates",
    })?;
    if g.user_venues(u).is_empty() {
        return Err(PredictError::IsolatedUser {
            user: g.user_id(u).to_string(),
        });
    }
    let (lat, lon) = mean_location(g, u).ok_or_else(|| PredictError::NoUserLocation {
        user: g.user_id(u).to_string(),
    })?;
    Ok(-haversine_km(lat, lon, meta.latitude, meta.longitude))
}

/// Location-baseline scores for all venues. Venues without coordinates rank
/// below any reachable point on Earth.
pub fn loc_vector(g: &BipartiteGraph, u: UserIdx) -> Result<Vec<f64>, PredictError> {
    if g.user_venues(u).is_empty() {
        return Err(PredictError::IsolatedUser {
            user: g.user_id(u).to_string(),
        });
    }
    let (lat, lon) = mean_location(g, u).ok_or_else(|| PredictError::NoUserLocation {
        user: g.user_id(u).to_string(),
    })?;
    Ok(g.venues()
        .map(|v| match g.venue_meta(v) {
            Some(meta) => -haversine_km(lat, lon, meta.latitude, meta.longitude),
            None => -2.0 * std::f64::consts::PI * EARTH_RADIUS_KM,
        })
        .collect())
}

/// Venue-type baseline: the fraction of the user's check-ins (by
/// multiplicity) at venues sharing the candidate's category.
pub fn score_type_baseline(
    g: &BipartiteGraph,
    u: UserIdx,
    v: VenueIdx,
) -> Result<f64, PredictError> {
    let meta = g.venue_meta(v).ok_or_else(|| PredictError::MissingVenueMeta {
        venue: g.venue_id(v).to_string(),
        what: "category",
    })?;
    let total = g.user_degrees(u).weighted;
    if total == 0 {
        return Err(PredictError::IsolatedUser {
            user: g.user_id(u).to_string(),
        });
    }
    let matching: u64 = g
        .user_venues(u)
        .iter()
        .filter(|&&(v2, _)| {
            g.venue_meta(v2)
                .is_some_and(|m| m.category == meta.category)
        })
        .map(|&(_, c)| c as u64)
        .sum();
    Ok(matching as f64 / total as f64)
}

/// Type-baseline scores for all venues, via one category histogram of the
/// user's check-ins. Venues without a category score zero.
pub fn type_vector(g: &BipartiteGraph, u: UserIdx) -> Result<Vec<f64>, PredictError> {
    let total = g.user_degrees(u).weighted;
    if total == 0 {
        return Err(PredictError::IsolatedUser {
            user: g.user_id(u).to_string(),
        });
    }
    let mut histogram: HashMap<&str, u64> = HashMap::new();
    for &(v, c) in g.user_venues(u) {
        if let Some(meta) = g.venue_meta(v) {
            *histogram.entry(meta.category.as_str()).or_insert(0) += c as u64;
        }
    }
    Ok(g.venues()
        .map(|v| match g.venue_meta(v) {
            Some(meta) => histogram
                .get(meta.category.as_str())
                .map(|&c| c as f64 / total as f64)
                .unwrap_or(0.0),
            None => 0.0,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CheckIn;
    use crate::testfix::toy_graph;
    use approx::assert_relative_eq;

    #[test]
    fn grm_is_venue_degree_for_every_user() {
        let g = toy_graph();
        let expected = [2.0, 2.0, 2.0, 1.0];
        for (v, want) in g.venues().zip(expected) {
            assert_eq!(score_grm(&g, v), want);
        }
        // Argmax never selects V4.
        let v4 = g.venue_idx("V4").unwrap();
        let best = g
            .venues()
            .max_by(|a, b| score_grm(&g, *a).total_cmp(&score_grm(&g, *b)))
            .unwrap();
        assert_ne!(best, v4);
    }

    #[test]
    fn grm_zero_after_holdout() {
        let mut g = toy_graph();
        let u3 = g.user_idx("U3").unwrap();
        let v4 = g.venue_idx("V4").unwrap();
        g.remove_pair(u3, v4).unwrap();
        assert_eq!(score_grm(&g, v4), 0.0);
    }

    #[test]
    fn assortativity_toy_values() {
        let g = toy_graph();
        let u1 = g.user_idx("U1").unwrap();
        let v3 = g.venue_idx("V3").unwrap();
        let v4 = g.venue_idx("V4").unwrap();
        // meanDeg(U1) = (2+2)/2 = 2.
        assert_eq!(mean_neighbor_degree(&g, u1), Some(2.0));
        assert_eq!(score_assortativity(&g, u1, v3), 0.0);
        assert_eq!(score_assortativity(&g, u1, v4), -1.0);
        // Zero is the maximum possible score.
        for v in g.venues() {
            assert!(score_assortativity(&g, u1, v) <= 0.0);
        }
    }

    #[test]
    fn assortativity_isolated_user_scores_zero() {
        let mut g = toy_graph();
        let u3 = g.user_idx("U3").unwrap();
        let v3 = g.venue_idx("V3").unwrap();
        let v4 = g.venue_idx("V4").unwrap();
        g.remove_pair(u3, v3).unwrap();
        g.remove_pair(u3, v4).unwrap();
        assert_eq!(score_assortativity(&g, u3, v4), 0.0);
        assert_eq!(assort_vector(&g, u3), vec![0.0; 4]);
    }

    #[test]
    fn haversine_quarter_circumference() {
        // (0,0) to (0,90): a quarter of the equator, 10007.5 km +- 0.1%.
        let d = haversine_km(0.0, 0.0, 0.0, 90.0);
        assert_relative_eq!(d, 10_007.543, max_relative = 1e-3);
        assert_eq!(haversine_km(10.0, 20.0, 10.0, 20.0), 0.0);
        // Symmetry.
        assert_relative_eq!(
            haversine_km(48.85, 2.35, 40.71, -74.0),
            haversine_km(40.71, -74.0, 48.85, 2.35),
            max_relative = 1e-12
        );
    }

    fn located(user: &str, venue: &str, lat: f64, lon: f64, category: &str) -> CheckIn {
        CheckIn {
            user_id: user.into(),
            venue_id: venue.into(),
            category: category.into(),
            latitude: lat,
            longitude: lon,
            timestamp: 0,
        }
    }

    #[test]
    fn loc_baseline_prefers_closer_venues() {
        let g = BipartiteGraph::from_checkins(&[
            located("u", "home", 0.0, 0.0, "Home"),
            located("u", "near", 0.0, 0.01, "Cafe"),
            located("x", "far", 0.0, 1.0, "Cafe"),
            located("x", "near", 0.0, 0.01, "Cafe"),
        ]);
        let u = g.user_idx("u").unwrap();
        let near = g.venue_idx("near").unwrap();
        let far = g.venue_idx("far").unwrap();
        let s_near = score_loc_baseline(&g, u, near).unwrap();
        let s_far = score_loc_baseline(&g, u, far).unwrap();
        assert!(s_near > s_far, "closer venue ranks higher");
        assert!(s_near <= 0.0);

        // A venue exactly at the mean location scores the maximum, zero.
        let g = BipartiteGraph::from_checkins(&[
            located("u", "a", 10.0, 20.0, "X"),
            located("u", "b", 10.0, 20.0, "Y"),
        ]);
        let u = g.user_idx("u").unwrap();
        let a = g.venue_idx("a").unwrap();
        assert_eq!(score_loc_baseline(&g, u, a).unwrap(), 0.0);
    }

    #[test]
    fn mean_location_is_multiplicity_weighted() {
        let g = BipartiteGraph::from_checkins(&[
            located("u", "a", 0.0, 0.0, "X"),
            located("u", "a", 0.0, 0.0, "X"),
            located("u", "a", 0.0, 0.0, "X"),
            located("u", "b", 4.0, 8.0, "Y"),
        ]);
        let u = g.user_idx("u").unwrap();
        let (lat, lon) = mean_location(&g, u).unwrap();
        assert_relative_eq!(lat, 1.0, max_relative = 1e-12);
        assert_relative_eq!(lon, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn type_baseline_fractions() {
        // 4 check-ins, 2 at "Bar" venues.
        let g = BipartiteGraph::from_checkins(&[
            located("u", "b1", 0.0, 0.0, "Bar"),
            located("u", "b1", 0.0, 0.0, "Bar"),
            located("u", "c1", 0.0, 0.0, "Cafe"),
            located("u", "p1", 0.0, 0.0, "Park"),
            located("x", "b2", 0.0, 0.0, "Bar"),
            located("x", "t1", 0.0, 0.0, "Tea"),
        ]);
        let u = g.user_idx("u").unwrap();
        let b2 = g.venue_idx("b2").unwrap();
        let t1 = g.venue_idx("t1").unwrap();
        let c1 = g.venue_idx("c1").unwrap();
        assert_eq!(score_type_baseline(&g, u, b2).unwrap(), 0.5);
        assert_eq!(score_type_baseline(&g, u, t1).unwrap(), 0.0, "unseen category");
        assert_eq!(score_type_baseline(&g, u, c1).unwrap(), 0.25);

        // All of a user's check-ins share the candidate's category -> 1.
        let g2 = BipartiteGraph::from_checkins(&[
            located("y", "b1", 0.0, 0.0, "Bar"),
            located("y", "b2", 0.0, 0.0, "Bar"),
            located("z", "b3", 0.0, 0.0, "Bar"),
        ]);
        let y = g2.user_idx("y").unwrap();
        let b3 = g2.venue_idx("b3").unwrap();
        assert_eq!(score_type_baseline(&g2, y, b3).unwrap(), 1.0);
    }

    #[test]
    fn vector_forms_match_pairwise() {
        let g = toy_graph();
        for u in g.users() {
            let loc = loc_vector(&g, u).unwrap();
            let ty = type_vector(&g, u).unwrap();
            let assort = assort_vector(&g, u);
            for v in g.venues() {
                assert_eq!(loc[v.as_usize()], score_loc_baseline(&g, u, v).unwrap());
                assert_eq!(ty[v.as_usize()], score_type_baseline(&g, u, v).unwrap());
                assert_eq!(assort[v.as_usize()], score_assortativity(&g, u, v));
            }
        }
    }
}
