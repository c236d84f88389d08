//! Bipartite multigraph of users and venues.
//!
//! Node ids are interned to dense indexes ([`UserIdx`], [`VenueIdx`]) for
//! scoring speed; every external interface speaks original string ids. The
//! graph keeps per-pair check-in counts (multilinks), both adjacency
//! directions, venue metadata and per-pair timestamp multisets.
//!
//! The structure is immutable for all scoring reads and safe to share across
//! threads; [`BipartiteGraph::remove_pair`] / [`BipartiteGraph::restore_pair`]
//! are the one mutation pair and require exclusive access.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::CheckIn;

/// Dense index of a user within one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UserIdx(pub u32);

/// Dense index of a venue within one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VenueIdx(pub u32);

impl UserIdx {
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

impl VenueIdx {
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }
}

/// Category and coordinates of a venue, taken from the last check-in seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VenueMeta {
    pub category: String,
    pub latitude: f64,
    pub longitude: f64,
}

/// Binary (distinct neighbors) and weighted (check-in count) degree of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degrees {
    pub binary: u32,
    pub weighted: u64,
}

/// Which degree a threshold applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeKind {
    Binary,
    Weighted,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("pair ({user}, {venue}) not present in graph")]
    PairNotPresent { user: String, venue: String },
    #[error("unknown user id {0:?}")]
    UnknownUser(String),
    #[error("unknown venue id {0:?}")]
    UnknownVenue(String),
    #[error("bad edge list at line {line}: {reason}")]
    BadEdgeList { line: u64, reason: String },
}

/// Everything needed to undo one [`BipartiteGraph::remove_pair`] call.
#[derive(Debug, Clone)]
pub struct RemovedPair {
    pub user: UserIdx,
    pub venue: VenueIdx,
    pub count: u32,
    pub times: Vec<i64>,
}

/// Bipartite user-venue multigraph with metadata indexes.
///
/// Indexes are canonical: users and venues are interned in sorted-id order,
/// so any construction path (check-ins, edge list, filters) that yields the
/// same logical graph yields the same indexes, the same iteration orders and
/// therefore bit-identical downstream scores.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    user_ids: Vec<String>,
    venue_ids: Vec<String>,
    user_index: HashMap<String, UserIdx>,
    venue_index: HashMap<String, VenueIdx>,
    /// Per-user adjacency, each list sorted by venue index.
    user_adj: Vec<Vec<(VenueIdx, u32)>>,
    /// Per-venue adjacency, each list sorted by user index.
    venue_adj: Vec<Vec<(UserIdx, u32)>>,
    user_weighted: Vec<u64>,
    venue_weighted: Vec<u64>,
    venue_meta: Vec<Option<VenueMeta>>,
    /// Sorted timestamp multiset per connected pair. Empty for graphs
    /// reloaded from an edge list without a times file.
    times: HashMap<(UserIdx, VenueIdx), Vec<i64>>,
    total_checkins: u64,
}

impl BipartiteGraph {
    /// Build the graph from a list of check-ins. Venue metadata takes the
    /// category and coordinates of the last check-in seen for that venue.
    pub fn from_checkins(checkins: &[CheckIn]) -> Self {
        let mut g = BipartiteGraph::empty();
        // Canonical interning pass: sorted distinct ids.
        let mut users: Vec<&str> = checkins.iter().map(|c| c.user_id.as_str()).collect();
        users.sort_unstable();
        users.dedup();
        let mut venues: Vec<&str> = checkins.iter().map(|c| c.venue_id.as_str()).collect();
        venues.sort_unstable();
        venues.dedup();
        for id in users {
            g.intern_user(id);
        }
        for id in venues {
            g.intern_venue(id);
        }

        let mut pair_counts: HashMap<(UserIdx, VenueIdx), u32> = HashMap::new();
        for c in checkins {
            let u = g.user_index[&c.user_id];
            let v = g.venue_index[&c.venue_id];
            *pair_counts.entry((u, v)).or_insert(0) += 1;
            g.times.entry((u, v)).or_default().push(c.timestamp);
            g.venue_meta[v.as_usize()] = Some(VenueMeta {
                category: c.category.clone(),
                latitude: c.latitude,
                longitude: c.longitude,
            });
        }
        for times in g.times.values_mut() {
            times.sort_unstable();
        }
        let mut pairs: Vec<((UserIdx, VenueIdx), u32)> = pair_counts.into_iter().collect();
        pairs.sort_unstable_by_key(|(pair, _)| *pair);
        for ((u, v), count) in pairs {
            g.insert_pair(u, v, count);
        }
        g
    }

    fn empty() -> Self {
        BipartiteGraph {
            user_ids: Vec::new(),
            venue_ids: Vec::new(),
            user_index: HashMap::new(),
            venue_index: HashMap::new(),
            user_adj: Vec::new(),
            venue_adj: Vec::new(),
            user_weighted: Vec::new(),
            venue_weighted: Vec::new(),
            venue_meta: Vec::new(),
            times: HashMap::new(),
            total_checkins: 0,
        }
    }

    fn intern_user(&mut self, id: &str) -> UserIdx {
        if let Some(&u) = self.user_index.get(id) {
            return u;
        }
        let u = UserIdx(self.user_ids.len() as u32);
        self.user_ids.push(id.to_string());
        self.user_index.insert(id.to_string(), u);
        self.user_adj.push(Vec::new());
        self.user_weighted.push(0);
        u
    }

    fn intern_venue(&mut self, id: &str) -> VenueIdx {
        if let Some(&v) = self.venue_index.get(id) {
            return v;
        }
        let v = VenueIdx(self.venue_ids.len() as u32);
        self.venue_ids.push(id.to_string());
        self.venue_index.insert(id.to_string(), v);
        self.venue_adj.push(Vec::new());
        self.venue_weighted.push(0);
        self.venue_meta.push(None);
        v
    }

    /// Insert a pair keeping both adjacency lists sorted. The pair must not
    /// already exist.
    fn insert_pair(&mut self, u: UserIdx, v: VenueIdx, count: u32) {
        let ua = &mut self.user_adj[u.as_usize()];
        let pos = ua.binary_search_by_key(&v, |&(v2, _)| v2).unwrap_err();
        ua.insert(pos, (v, count));
        let va = &mut self.venue_adj[v.as_usize()];
        let pos = va.binary_search_by_key(&u, |&(u2, _)| u2).unwrap_err();
        va.insert(pos, (u, count));
        self.user_weighted[u.as_usize()] += count as u64;
        self.venue_weighted[v.as_usize()] += count as u64;
        self.total_checkins += count as u64;
    }

    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn n_venues(&self) -> usize {
        self.venue_ids.len()
    }

    /// Total check-ins, i.e. the sum of all pair counts.
    pub fn n_checkins(&self) -> u64 {
        self.total_checkins
    }

    /// Number of distinct connected (user, venue) pairs.
    pub fn n_pairs(&self) -> usize {
        self.user_adj.iter().map(Vec::len).sum()
    }

    pub fn users(&self) -> impl Iterator<Item = UserIdx> + '_ {
        (0..self.user_ids.len() as u32).map(UserIdx)
    }

    pub fn venues(&self) -> impl Iterator<Item = VenueIdx> + '_ {
        (0..self.venue_ids.len() as u32).map(VenueIdx)
    }

    pub fn user_id(&self, u: UserIdx) -> &str {
        &self.user_ids[u.as_usize()]
    }

    pub fn venue_id(&self, v: VenueIdx) -> &str {
        &self.venue_ids[v.as_usize()]
    }

    pub fn user_idx(&self, id: &str) -> Option<UserIdx> {
        self.user_index.get(id).copied()
    }

    pub fn venue_idx(&self, id: &str) -> Option<VenueIdx> {
        self.venue_index.get(id).copied()
    }

    /// Venues of a user with pair counts, sorted by venue index.
    pub fn user_venues(&self, u: UserIdx) -> &[(VenueIdx, u32)] {
        &self.user_adj[u.as_usize()]
    }

    /// Users of a venue with pair counts, sorted by user index.
    pub fn venue_users(&self, v: VenueIdx) -> &[(UserIdx, u32)] {
        &self.venue_adj[v.as_usize()]
    }

    /// Check-in count for a pair, zero when unconnected.
    pub fn pair_count(&self, u: UserIdx, v: VenueIdx) -> u32 {
        self.user_adj[u.as_usize()]
            .binary_search_by_key(&v, |&(v2, _)| v2)
            .map(|pos| self.user_adj[u.as_usize()][pos].1)
            .unwrap_or(0)
    }

    pub fn is_connected(&self, u: UserIdx, v: VenueIdx) -> bool {
        self.pair_count(u, v) > 0
    }

    pub fn user_degrees(&self, u: UserIdx) -> Degrees {
        Degrees {
            binary: self.user_adj[u.as_usize()].len() as u32,
            weighted: self.user_weighted[u.as_usize()],
        }
    }

    pub fn venue_degrees(&self, v: VenueIdx) -> Degrees {
        Degrees {
            binary: self.venue_adj[v.as_usize()].len() as u32,
            weighted: self.venue_weighted[v.as_usize()],
        }
    }

    pub fn venue_meta(&self, v: VenueIdx) -> Option<&VenueMeta> {
        self.venue_meta[v.as_usize()].as_ref()
    }

    /// Sorted timestamps of a pair's check-ins; empty when unconnected or
    /// when the graph was loaded without time information.
    pub fn times(&self, u: UserIdx, v: VenueIdx) -> &[i64] {
        self.times
            .get(&(u, v))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// True when at least one pair carries timestamps.
    pub fn has_times(&self) -> bool {
        !self.times.is_empty()
    }

    /// All connected pairs with counts, sorted by (user, venue). The
    /// canonical iteration order for anything that must be deterministic.
    pub fn pairs_sorted(&self) -> Vec<(UserIdx, VenueIdx, u32)> {
        let mut pairs = Vec::with_capacity(self.n_pairs());
        for u in self.users() {
            for &(v, count) in self.user_venues(u) {
                pairs.push((u, v, count));
            }
        }
        pairs
    }

    /// Keep exactly the venues whose degree of the given kind is at least
    /// `min_degree`, with all their edges. Users with no remaining edges
    /// stay in the user set.
    pub fn filter_low_degree_venues(&self, min_degree: u64, kind: DegreeKind) -> Self {
        self.filter_venues(|g, v| {
            let d = g.venue_degrees(v);
            let degree = match kind {
                DegreeKind::Binary => d.binary as u64,
                DegreeKind::Weighted => d.weighted,
            };
            degree >= min_degree
        })
    }

    /// Remove every venue where a single user accounts for at least
    /// `dominance` of its check-ins. `dominance` must lie in (0, 1].
    pub fn filter_dominated_venues(&self, dominance: f64) -> Self {
        assert!(
            dominance > 0.0 && dominance <= 1.0,
            "dominance must be in (0, 1]"
        );
        self.filter_venues(|g, v| {
            let weighted = g.venue_degrees(v).weighted;
            if weighted == 0 {
                return true;
            }
            let max_count = g
                .venue_users(v)
                .iter()
                .map(|&(_, c)| c as u64)
                .max()
                .unwrap_or(0);
            (max_count as f64) < dominance * weighted as f64
        })
    }

    /// Rebuild the graph keeping venues passing the predicate. Venue indexes
    /// are re-interned preserving relative order; the user set is untouched.
    fn filter_venues(&self, keep: impl Fn(&Self, VenueIdx) -> bool) -> Self {
        let mut g = BipartiteGraph::empty();
        g.user_ids = self.user_ids.clone();
        g.user_index = self.user_index.clone();
        g.user_adj = vec![Vec::new(); self.n_users()];
        g.user_weighted = vec![0; self.n_users()];
        let mut remap: Vec<Option<VenueIdx>> = vec![None; self.n_venues()];
        for v in self.venues() {
            if keep(self, v) {
                let nv = g.intern_venue(self.venue_id(v));
                g.venue_meta[nv.as_usize()] = self.venue_meta[v.as_usize()].clone();
                remap[v.as_usize()] = Some(nv);
            }
        }
        for (u, v, count) in self.pairs_sorted() {
            if let Some(nv) = remap[v.as_usize()] {
                g.insert_pair(u, nv, count);
                if let Some(ts) = self.times.get(&(u, v)) {
                    g.times.insert((u, nv), ts.clone());
                }
            }
        }
        g
    }

    /// Delete all check-ins between `u` and `v`, returning a record that
    /// [`BipartiteGraph::restore_pair`] inverts exactly. Venue metadata is
    /// kept so the venue can still be scored.
    pub fn remove_pair(&mut self, u: UserIdx, v: VenueIdx) -> Result<RemovedPair, GraphError> {
        let ua = &mut self.user_adj[u.as_usize()];
        let pos = ua
            .binary_search_by_key(&v, |&(v2, _)| v2)
            .map_err(|_| GraphError::PairNotPresent {
                user: self.user_ids[u.as_usize()].clone(),
                venue: self.venue_ids[v.as_usize()].clone(),
            })?;
        let (_, count) = ua.remove(pos);
        let va = &mut self.venue_adj[v.as_usize()];
        let pos = va
            .binary_search_by_key(&u, |&(u2, _)| u2)
            .expect("adjacency lists out of sync");
        va.remove(pos);
        self.user_weighted[u.as_usize()] -= count as u64;
        self.venue_weighted[v.as_usize()] -= count as u64;
        self.total_checkins -= count as u64;
        let times = self.times.remove(&(u, v)).unwrap_or_default();
        Ok(RemovedPair {
            user: u,
            venue: v,
            count,
            times,
        })
    }

    /// Exactly invert a [`BipartiteGraph::remove_pair`] call. The record must
    /// come from this graph and the pair must still be absent.
    pub fn restore_pair(&mut self, record: RemovedPair) {
        assert!(
            !self.is_connected(record.user, record.venue),
            "restore_pair: pair already present"
        );
        self.insert_pair(record.user, record.venue, record.count);
        if !record.times.is_empty() {
            self.times.insert((record.user, record.venue), record.times);
        }
    }

    /// Weighted one-mode projection onto users: an edge connects two users
    /// sharing at least one venue, weighted by the count of common distinct
    /// venues.
    pub fn project_users(&self) -> UserProjection {
        let mut weights: HashMap<(UserIdx, UserIdx), u32> = HashMap::new();
        for v in self.venues() {
            let users = self.venue_users(v);
            for (i, &(a, _)) in users.iter().enumerate() {
                for &(b, _) in &users[i + 1..] {
                    *weights.entry((a, b)).or_insert(0) += 1;
                }
            }
        }
        let mut edges: Vec<(UserIdx, UserIdx, u32)> =
            weights.into_iter().map(|((a, b), w)| (a, b, w)).collect();
        edges.sort_unstable();
        UserProjection {
            user_ids: self.user_ids.clone(),
            edges,
        }
    }

    /// Serialize as a TSV edge list: user, venue, count, category, lat, lon.
    /// One row per distinct pair, in canonical (user, venue) order.
    /// Timestamps are not part of this format; see
    /// [`BipartiteGraph::write_times_tsv`].
    pub fn write_edge_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (u, v, count) in self.pairs_sorted() {
            let meta = self.venue_meta(v);
            let (category, lat, lon) = match meta {
                Some(m) => (m.category.as_str(), m.latitude, m.longitude),
                None => ("", 0.0, 0.0),
            };
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                self.user_id(u),
                self.venue_id(v),
                count,
                category,
                lat,
                lon
            )?;
        }
        Ok(())
    }

    /// Companion file to the edge list preserving per-pair timestamps:
    /// user, venue, time — one row per check-in, canonical order.
    pub fn write_times_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (u, v, _) in self.pairs_sorted() {
            for t in self.times(u, v) {
                writeln!(out, "{}\t{}\t{}", self.user_id(u), self.venue_id(v), t)?;
            }
        }
        Ok(())
    }

    /// Rebuild a graph from [`BipartiteGraph::write_edge_tsv`] output and an
    /// optional times file. Without times the graph cannot serve time-window
    /// sampling or trendiness scoring.
    pub fn read_edge_tsv<R: BufRead>(edges: R, times: Option<R>) -> Result<Self, GraphError> {
        struct Row {
            user: String,
            venue: String,
            count: u32,
            meta: VenueMeta,
        }
        let mut rows = Vec::new();
        for (idx, line) in edges.lines().enumerate() {
            let line = line.map_err(|e| GraphError::BadEdgeList {
                line: idx as u64 + 1,
                reason: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: &str| GraphError::BadEdgeList {
                line: idx as u64 + 1,
                reason: reason.to_string(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 6 {
                return Err(bad("expected 6 columns"));
            }
            let count: u32 = fields[2].parse().map_err(|_| bad("bad count"))?;
            if count == 0 {
                return Err(bad("zero count"));
            }
            let latitude: f64 = fields[4].parse().map_err(|_| bad("bad latitude"))?;
            let longitude: f64 = fields[5].parse().map_err(|_| bad("bad longitude"))?;
            rows.push(Row {
                user: fields[0].to_string(),
                venue: fields[1].to_string(),
                count,
                meta: VenueMeta {
                    category: fields[3].to_string(),
                    latitude,
                    longitude,
                },
            });
        }
        let mut g = BipartiteGraph::empty();
        let mut users: Vec<&str> = rows.iter().map(|r| r.user.as_str()).collect();
        users.sort_unstable();
        users.dedup();
        let mut venues: Vec<&str> = rows.iter().map(|r| r.venue.as_str()).collect();
        venues.sort_unstable();
        venues.dedup();
        for id in users {
            g.intern_user(id);
        }
        for id in venues {
            g.intern_venue(id);
        }
        let mut pairs = Vec::with_capacity(rows.len());
        for row in &rows {
            let u = g.user_index[&row.user];
            let v = g.venue_index[&row.venue];
            g.venue_meta[v.as_usize()] = Some(row.meta.clone());
            pairs.push((u, v, row.count));
        }
        pairs.sort_unstable_by_key(|&(u, v, _)| (u, v));
        for window in pairs.windows(2) {
            if (window[0].0, window[0].1) == (window[1].0, window[1].1) {
                return Err(GraphError::BadEdgeList {
                    line: 0,
                    reason: format!(
                        "duplicate pair ({}, {})",
                        g.user_id(window[0].0),
                        g.venue_id(window[0].1)
                    ),
                });
            }
        }
        for (u, v, count) in pairs {
            g.insert_pair(u, v, count);
        }
        if let Some(times) = times {
            for (idx, line) in times.lines().enumerate() {
                let line = line.map_err(|e| GraphError::BadEdgeList {
                    line: idx as u64 + 1,
                    reason: e.to_string(),
                })?;
                if line.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = line.split('\t').collect();
                let bad = |reason: &str| GraphError::BadEdgeList {
                    line: idx as u64 + 1,
                    reason: reason.to_string(),
                };
                if fields.len() != 3 {
                    return Err(bad("expected 3 columns"));
                }
                let u = g
                    .user_idx(fields[0])
                    .ok_or_else(|| GraphError::UnknownUser(fields[0].to_string()))?;
                let v = g
                    .venue_idx(fields[1])
                    .ok_or_else(|| GraphError::UnknownVenue(fields[1].to_string()))?;
                let t: i64 = fields[2].parse().map_err(|_| bad("bad timestamp"))?;
                g.times.entry((u, v)).or_default().push(t);
            }
            for ts in g.times.values_mut() {
                ts.sort_unstable();
            }
        }
        Ok(g)
    }
}

/// Weighted unipartite graph over users produced by [`BipartiteGraph::project_users`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserProjection {
    user_ids: Vec<String>,
    /// Edges (a, b, weight) with a < b, sorted.
    edges: Vec<(UserIdx, UserIdx, u32)>,
}

impl UserProjection {
    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(UserIdx, UserIdx, u32)] {
        &self.edges
    }

    pub fn user_id(&self, u: UserIdx) -> &str {
        &self.user_ids[u.as_usize()]
    }

    /// Weight of the edge between two users, zero when not adjacent.
    pub fn weight(&self, a: UserIdx, b: UserIdx) -> u32 {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by_key(&key, |&(x, y, _)| (x, y))
            .map(|pos| self.edges[pos].2)
            .unwrap_or(0)
    }
}
