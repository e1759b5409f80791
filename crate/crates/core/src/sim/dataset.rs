//! Recorded-trajectory handling and scenario generation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::config::SimConfig;
use super::scenario::{Scenario, ScenarioSource};

/// Number of recorded samples kept per trajectory before mirroring.
pub const HALF_LENGTH: usize = 250;

/// One row of a recorded-trajectory file (25 Hz frames).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub vehicle_id: u64,
    pub frame: u64,
    pub lane_id: i64,
    pub x: f64,
    pub v: f64,
    pub a: f64,
}

/// Longitudinal signals of one lane-following vehicle, in frame order.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub vehicle_id: u64,
    pub lane_id: i64,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.acceleration.len()
    }

    pub fn is_empty(&self) -> bool {
        self.acceleration.is_empty()
    }
}

/// Groups rows per vehicle (ascending id, frames sorted) and drops every
/// vehicle whose lane id changes.
pub fn group_trajectories(rows: &[TrajectoryRow]) -> Vec<Trajectory> {
    let mut per_vehicle: BTreeMap<u64, Vec<TrajectoryRow>> = BTreeMap::new();
    for row in rows {
        per_vehicle.entry(row.vehicle_id).or_default().push(*row);
    }
    per_vehicle
        .into_iter()
        .filter_map(|(vehicle_id, mut rows)| {
            rows.sort_by_key(|r| r.frame);
            let lane_id = rows[0].lane_id;
            if rows.iter().any(|r| r.lane_id != lane_id) {
                return None;
            }
            Some(Trajectory {
                vehicle_id,
                lane_id,
                velocity: rows.iter().map(|r| r.v).collect(),
                acceleration: rows.iter().map(|r| r.a).collect(),
            })
        })
        .collect()
}

/// Scenario pool split into training and test sets.
#[derive(Clone, Debug, Default)]
pub struct ScenarioSplit {
    pub train: Vec<Scenario>,
    pub test: Vec<Scenario>,
    /// Trajectories shorter than [`HALF_LENGTH`].
    pub dropped: usize,
}

/// Turns trajectories into dataset scenarios.
///
/// Signals shorter than `max_steps / 2` are dropped; the rest are cut to that
/// length and followed by their mirror image, `[a0..a249, a249..a0]`. The
/// leader starts at the recorded initial velocity; ego velocity and placement
/// offset are drawn from the configured ranges. The pool is shuffled and split
/// 70/30 into train/test.
pub fn preprocess(trajectories: &[Trajectory], cfg: &SimConfig, rng: &mut crate::Rng) -> ScenarioSplit {
    let half = cfg.max_steps / 2;
    let mut pool = Vec::new();
    let mut dropped = 0;
    for traj in trajectories {
        if traj.len() < half || half == 0 {
            dropped += 1;
            continue;
        }
        let mut accel: Vec<f64> = traj.acceleration[..half].to_vec();
        accel.extend(traj.acceleration[..half].iter().rev());
        accel.resize(cfg.max_steps, 0.0);
        let offset = rng.random_range(cfg.offset_range.0..=cfg.offset_range.1);
        let ego_velocity = rng.random_range(cfg.ego_velocity_range.0..=cfg.ego_velocity_range.1);
        let lead_velocity = traj.velocity[0].max(0.0);
        // Only non-finite recordings fail validation; skip them.
        match Scenario::new(ScenarioSource::Dataset, offset, ego_velocity, lead_velocity, accel, cfg) {
            Ok(s) => pool.push(s),
            Err(_) => dropped += 1,
        }
    }
    pool.shuffle(rng);
    let n_train = pool.len() * 7 / 10;
    let test = pool.split_off(n_train);
    ScenarioSplit { train: pool, test, dropped }
}

/// Random test scenario: piecewise-constant leader acceleration in 25-step
/// segments, each level uniform in `[-5, 5]` m/s².
pub fn generate_random_scenario(rng: &mut crate::Rng, cfg: &SimConfig) -> Scenario {
    const SEGMENT: usize = 25;
    const LEVEL: f64 = 5.0;
    let offset = rng.random_range(cfg.offset_range.0..=cfg.offset_range.1);
    let ego_velocity = rng.random_range(cfg.ego_velocity_range.0..=cfg.ego_velocity_range.1);
    let lead_velocity = rng.random_range(cfg.lead_velocity_range.0..=cfg.lead_velocity_range.1);
    let mut accel = Vec::with_capacity(cfg.max_steps);
    while accel.len() < cfg.max_steps {
        let level = rng.random_range(-LEVEL..=LEVEL);
        let n = SEGMENT.min(cfg.max_steps - accel.len());
        accel.extend(core::iter::repeat_n(level, n));
    }
    Scenario::new(ScenarioSource::Random, offset, ego_velocity, lead_velocity, accel, cfg)
        .expect("random scenario respects the configured ranges")
}

/// Intelligent-driver-model parameters of the synthetic follower.
struct Idm {
    desired_speed: f64,
    headway: f64,
    min_gap: f64,
    accel: f64,
    comfort_decel: f64,
}

impl Idm {
    fn acceleration(&self, v: f64, gap: f64, v_lead: f64) -> f64 {
        let dv = v - v_lead;
        let s_star = self.min_gap
            + (v * self.headway + v * dv / (2.0 * libm::sqrt(self.accel * self.comfort_decel))).max(0.0);
        let free = 1.0 - libm::pow(v / self.desired_speed, 4.0);
        self.accel * (free - (s_star / gap.max(0.1)) * (s_star / gap.max(0.1)))
    }
}

/// Writes `n` synthetic vehicles as trajectory rows: an IDM follower behind
/// a scripted leader, with bounded acceleration noise. About 10% of the
/// vehicles change lane once. Lengths are uniform in 150..=750 frames, so
/// roughly three quarters survive the lane filter and the length cut.
pub fn generate_synthetic_dataset(n: usize, rng: &mut crate::Rng, cfg: &SimConfig) -> Vec<TrajectoryRow> {
    let dt = cfg.dt;
    let mut rows = Vec::new();
    for id in 1..=n as u64 {
        let len = rng.random_range(150..=750usize);
        let lane = rng.random_range(1..=3i64);
        let lane_change_at = if rng.random::<f64>() < 0.1 {
            Some(rng.random_range(1..len))
        } else {
            None
        };
        let idm = Idm {
            desired_speed: rng.random_range(25.0..38.0),
            headway: rng.random_range(0.9..1.6),
            min_gap: 2.0,
            accel: rng.random_range(1.0..2.0),
            comfort_decel: 2.0,
        };

        let mut v_lead = rng.random_range(20.0..33.0);
        let mut v = (v_lead + rng.random_range(-2.0..2.0f64)).max(0.0);
        let mut x = rng.random_range(0.0..100.0);
        let mut x_lead = x + rng.random_range(25.0..60.0);
        let mut lead_accel = 0.0;
        let mut segment_left = 0usize;

        for frame in 0..len {
            if segment_left == 0 {
                segment_left = rng.random_range(25..100);
                lead_accel = if rng.random::<f64>() < 0.05 {
                    -6.0
                } else {
                    rng.random_range(-2.5..1.5)
                };
            }
            segment_left -= 1;
            let mut a_l = lead_accel;
            if (v_lead > 40.0 && a_l > 0.0) || (v_lead < 8.0 && a_l < 0.0) {
                a_l = 0.0;
            }
            v_lead = (v_lead + a_l * dt).max(0.0);
            x_lead += v_lead * dt;

            let noise = rng.random_range(-0.3..0.3);
            let a = (idm.acceleration(v, x_lead - x, v_lead) + noise).clamp(-cfg.a_max, cfg.a_max);
            let a = if v + a * dt < 0.0 { -v / dt } else { a };
            v = (v + a * dt).max(0.0);
            x += v * dt;

            let lane_id = match lane_change_at {
                Some(at) if frame >= at => if lane == 3 { 2 } else { lane + 1 },
                _ => lane,
            };
            rows.push(TrajectoryRow { vehicle_id: id, frame: frame as u64, lane_id, x, v, a });
        }
    }
    rows
}
