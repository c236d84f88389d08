//! Independent oracles and random-instance generators shared by the
//! integration suites. Everything here recomputes expected values from the
//! definitions directly (dense matrices, double loops) and never calls the
//! code paths it is used to check.

#![allow(dead_code)]

use linkpred::ingest::CheckIn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A bipartite instance as a dense count matrix plus the check-ins that
/// realize it. `counts[u][v]` is the multiplicity of pair (u, v); user `u`
/// is named `u{u}`, venue `v` is named `v{v}`.
pub struct DenseInstance {
    pub counts: Vec<Vec<u32>>,
    pub checkins: Vec<CheckIn>,
}

impl DenseInstance {
    pub fn n_users(&self) -> usize {
        self.counts.len()
    }

    pub fn n_venues(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    pub fn user_name(u: usize) -> String {
        format!("u{u}")
    }

    pub fn venue_name(v: usize) -> String {
        format!("v{v}")
    }

    pub fn venue_binary_degree(&self, v: usize) -> usize {
        (0..self.n_users()).filter(|&u| self.counts[u][v] > 0).count()
    }

    pub fn venue_weighted_degree(&self, v: usize) -> u64 {
        (0..self.n_users()).map(|u| self.counts[u][v] as u64).sum()
    }

    pub fn user_binary_degree(&self, u: usize) -> usize {
        (0..self.n_venues()).filter(|&v| self.counts[u][v] > 0).count()
    }

    pub fn user_weighted_degree(&self, u: usize) -> u64 {
        (0..self.n_venues()).map(|v| self.counts[u][v] as u64).sum()
    }
}

/// Random instance with up to `max_users` x `max_venues` nodes. Every venue
/// column gets at least one edge so the built graph has the same venue set
/// as the matrix. Check-ins carry random categories, coordinates and times.
pub fn random_instance(rng: &mut ChaCha8Rng, max_users: usize, max_venues: usize) -> DenseInstance {
    let n_users = rng.gen_range(2..=max_users.max(2));
    let n_venues = rng.gen_range(2..=max_venues.max(2));
    let mut counts = vec![vec![0u32; n_venues]; n_users];
    for row in counts.iter_mut() {
        for cell in row.iter_mut() {
            if rng.gen_bool(0.4) {
                *cell = rng.gen_range(1..=5);
            }
        }
    }
    for v in 0..n_venues {
        if (0..n_users).all(|u| counts[u][v] == 0) {
            let u = rng.gen_range(0..n_users);
            counts[u][v] = rng.gen_range(1..=5);
        }
    }
    let categories = ["Bar", "Cafe", "Park", "Gym"];
    let mut checkins = Vec::new();
    for (u, row) in counts.iter().enumerate() {
        for (v, &count) in row.iter().enumerate() {
            for _ in 0..count {
                checkins.push(CheckIn {
                    user_id: DenseInstance::user_name(u),
                    venue_id: DenseInstance::venue_name(v),
                    category: categories[v % categories.len()].to_string(),
                    latitude: (v as f64 * 7.0 % 120.0) - 60.0,
                    longitude: (v as f64 * 13.0 % 300.0) - 150.0,
                    timestamp: rng.gen_range(0..1_000),
                });
            }
        }
    }
    DenseInstance { counts, checkins }
}

/// Dense-matrix evaluation of the two-phase resource flow. `weighted`
/// selects count-proportional shares; otherwise equal splits over distinct
/// neighbors. Returns venue resources after `steps` rounds for the user.
pub fn nbi_oracle(inst: &DenseInstance, user: usize, weighted: bool, steps: u32) -> Vec<f64> {
    nbi_oracle_with_user_seed(inst, user, weighted, steps, None)
}

/// [`nbi_oracle`] with an optional per-user resource bonus added after every
/// step A (the user-similarity variant). The bonus vector is indexed by user.
pub fn nbi_oracle_with_user_seed(
    inst: &DenseInstance,
    user: usize,
    weighted: bool,
    steps: u32,
    user_bonus: Option<&[f64]>,
) -> Vec<f64> {
    let n_users = inst.n_users();
    let n_venues = inst.n_venues();
    let m = |u: usize, v: usize| -> f64 {
        if weighted {
            inst.counts[u][v] as f64
        } else {
            (inst.counts[u][v] > 0) as u8 as f64
        }
    };
    let venue_deg: Vec<f64> = (0..n_venues)
        .map(|v| (0..n_users).map(|u| m(u, v)).sum())
        .collect();
    let user_deg: Vec<f64> = (0..n_users)
        .map(|u| (0..n_venues).map(|v| m(u, v)).sum())
        .collect();

    let mut f: Vec<f64> = (0..n_venues)
        .map(|v| (inst.counts[user][v] > 0) as u8 as f64)
        .collect();
    for _ in 0..steps {
        let mut r = vec![0.0; n_users];
        for u in 0..n_users {
            for v in 0..n_venues {
                if venue_deg[v] > 0.0 {
                    r[u] += m(u, v) / venue_deg[v] * f[v];
                }
            }
        }
        if let Some(bonus) = user_bonus {
            for (ri, bi) in r.iter_mut().zip(bonus) {
                *ri += bi;
            }
        }
        f = vec![0.0; n_venues];
        for v in 0..n_venues {
            for u in 0..n_users {
                if user_deg[u] > 0.0 {
                    f[v] += m(u, v) / user_deg[u] * r[u];
                }
            }
        }
    }
    f
}

/// Direct-formula Adamic-Adar: sum of 1/ln(binary degree) over common
/// venues, skipping venues with degree <= 1.
pub fn aa_oracle(inst: &DenseInstance, u1: usize, u2: usize) -> f64 {
    let mut sum = 0.0;
    for v in 0..inst.n_venues() {
        if inst.counts[u1][v] > 0 && inst.counts[u2][v] > 0 {
            let deg = inst.venue_binary_degree(v);
            if deg > 1 {
                sum += 1.0 / (deg as f64).ln();
            }
        }
    }
    sum
}

/// Direct-formula collaborative filtering score.
pub fn cf_oracle(inst: &DenseInstance, user: usize, venue: usize) -> f64 {
    let mut total = 0.0;
    let mut at_venue = 0.0;
    for other in 0..inst.n_users() {
        if other == user {
            continue;
        }
        let sim = aa_oracle(inst, user, other);
        total += sim;
        if inst.counts[other][venue] > 0 {
            at_venue += sim;
        }
    }
    if total <= 0.0 {
        0.0
    } else {
        at_venue / total
    }
}

/// Brute-force AUC: every (positive, negative) comparison, ties half.
pub fn auc_oracle(pos: &[f64], neg: &[f64]) -> f64 {
    let mut score = 0.0;
    for &p in pos {
        for &q in neg {
            if p > q {
                score += 1.0;
            } else if p == q {
                score += 0.5;
            }
        }
    }
    score / (pos.len() as f64 * neg.len() as f64)
}

/// Largest relative difference between two vectors (0 denominators compare
/// absolutely).
pub fn max_relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let scale = x.abs().max(y.abs());
            if scale == 0.0 {
                0.0
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
