//! Synthetic booking demand and campus room inventories.
//!
//! Team sizes follow a Gamma distribution fitted to booking data; stay lengths
//! come from a duration histogram; arrivals per day are Poisson.

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Beds per unit of campus scaling factor.
pub const BEDS_PER_SCALE_UNIT: u32 = 57;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomSpec {
    pub id: usize,
    /// Number of beds in the room.
    pub capacity: u32,
}

/// Room mix for one scale unit, as `(capacity, count)` pairs.
pub type RoomMix = Vec<(u32, u32)>;

/// Default per-unit mix: 5×1 + 10×2 + 4×4 + 2×8 = 57 beds.
pub fn default_unit_mix() -> RoomMix {
    vec![(1, 5), (2, 10), (4, 4), (8, 2)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampusConfig {
    pub rooms: Vec<RoomSpec>,
    pub scaling_factor: u32,
}

impl CampusConfig {
    /// Builds a campus with `scaling_factor` copies of a per-unit room mix.
    /// Rooms are numbered from 0, largest capacity first.
    pub fn from_unit_mix(mix: &[(u32, u32)], scaling_factor: u32) -> Result<Self> {
        if scaling_factor < 1 {
            return Err(Error::argument("scaling factor must be at least 1"));
        }
        if mix.iter().any(|&(cap, _)| cap == 0) {
            return Err(Error::Config("room capacity must be at least 1".into()));
        }
        let unit_beds: u32 = mix.iter().map(|&(cap, count)| cap * count).sum();
        if unit_beds != BEDS_PER_SCALE_UNIT {
            return Err(Error::Config(format!(
                "room mix holds {unit_beds} beds per unit, expected {BEDS_PER_SCALE_UNIT}"
            )));
        }
        let mut sorted: Vec<(u32, u32)> = mix.to_vec();
        sorted.sort_by(|a, b| b.0.cmp(&a.0));
        let mut rooms = Vec::new();
        for (cap, count) in sorted {
            for _ in 0..count * scaling_factor {
                rooms.push(RoomSpec { id: rooms.len(), capacity: cap });
            }
        }
        Ok(Self { rooms, scaling_factor })
    }

    pub fn default_for_scale(scaling_factor: u32) -> Result<Self> {
        Self::from_unit_mix(&default_unit_mix(), scaling_factor)
    }

    pub fn total_beds(&self) -> u32 {
        self.rooms.iter().map(|r| r.capacity).sum()
    }

    /// Largest room capacity, `S_max`.
    pub fn max_capacity(&self) -> u32 {
        self.rooms.iter().map(|r| r.capacity).max().unwrap_or(0)
    }

    /// Per-unit `(capacity, count)` mix, largest capacity first.
    pub fn unit_mix(&self) -> Result<RoomMix> {
        let mut counts = std::collections::BTreeMap::<u32, u32>::new();
        for r in &self.rooms {
            *counts.entry(r.capacity).or_default() += 1;
        }
        let s = self.scaling_factor.max(1);
        let mut mix = Vec::new();
        for (cap, count) in counts.into_iter().rev() {
            if count % s != 0 {
                return Err(Error::Config(format!(
                    "{count} rooms of capacity {cap} do not divide into {s} scale units"
                )));
            }
            mix.push((cap, count / s));
        }
        Ok(mix)
    }
}

/// Rescales a campus to `s` units, keeping the base room mix per unit.
pub fn scale_campus(base: &CampusConfig, s: u32) -> Result<CampusConfig> {
    if s < 1 {
        return Err(Error::argument("scaling factor must be at least 1"));
    }
    CampusConfig::from_unit_mix(&base.unit_mix()?, s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BookingRequest {
    pub id: usize,
    /// Beds requested, `R_x`.
    pub beds: u32,
    pub start_day: u32,
    /// Days of stay, `D_i`; the request occupies `[start_day, start_day + duration)`.
    pub duration: u32,
}

impl BookingRequest {
    pub fn end_day(&self) -> u32 {
        self.start_day + self.duration
    }

    pub fn days(&self) -> std::ops::Range<u32> {
        self.start_day..self.end_day()
    }

    pub fn overlaps(&self, other: &BookingRequest) -> bool {
        self.start_day < other.end_day() && other.start_day < self.end_day()
    }

    pub fn bed_days(&self) -> u64 {
        self.beds as u64 * self.duration as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandModel {
    /// Gamma shape `α` of the team-size distribution.
    pub gamma_shape: f64,
    /// Gamma scale `θ`.
    pub gamma_scale: f64,
    /// `(days, probability)` pairs.
    pub duration_histogram: Vec<(u32, f64)>,
    pub horizon_days: u32,
    /// Mean Poisson arrivals per day.
    pub arrivals_per_day: f64,
}

/// Default mean arrivals per day per campus scale unit.
pub const DEFAULT_ARRIVALS_PER_UNIT: f64 = 0.6;

impl Default for DemandModel {
    fn default() -> Self {
        Self {
            gamma_shape: 5.86,
            gamma_scale: 5.72,
            // Synthetic: peaks at 3 and 5 days plus a tail of long training camps.
            duration_histogram: vec![
                (1, 0.05),
                (2, 0.08),
                (3, 0.22),
                (4, 0.10),
                (5, 0.20),
                (6, 0.06),
                (7, 0.10),
                (10, 0.07),
                (14, 0.08),
                (21, 0.04),
            ],
            horizon_days: 30,
            arrivals_per_day: DEFAULT_ARRIVALS_PER_UNIT,
        }
    }
}

impl DemandModel {
    /// Default model with arrivals scaled to a campus of `s` units.
    pub fn for_scale(s: u32) -> Self {
        Self { arrivals_per_day: DEFAULT_ARRIVALS_PER_UNIT * s as f64, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_shape > 0.0 && self.gamma_scale > 0.0) {
            return Err(Error::Config("gamma parameters must be positive".into()));
        }
        if self.duration_histogram.is_empty() {
            return Err(Error::Config("duration histogram is empty".into()));
        }
        if self.duration_histogram.iter().any(|&(d, p)| d == 0 || !(p >= 0.0)) {
            return Err(Error::Config("histogram needs positive durations and non-negative probabilities".into()));
        }
        let total: f64 = self.duration_histogram.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!("histogram probabilities sum to {total}")));
        }
        if !(self.arrivals_per_day >= 0.0) || !self.arrivals_per_day.is_finite() {
            return Err(Error::Config("arrival rate must be finite and non-negative".into()));
        }
        Ok(())
    }

    pub fn mean_team_size(&self) -> f64 {
        self.gamma_shape * self.gamma_scale
    }

    pub fn team_size_variance(&self) -> f64 {
        self.gamma_shape * self.gamma_scale * self.gamma_scale
    }

    pub fn max_duration(&self) -> u32 {
        self.duration_histogram.iter().map(|&(d, _)| d).max().unwrap_or(0)
    }
}

/// Beds requested for a raw Gamma draw: rounded, at least one.
pub fn beds_from_draw(draw: f64) -> u32 {
    draw.round().max(1.0) as u32
}

/// Samplers prepared once from a validated [`DemandModel`].
#[derive(Debug, Clone)]
pub struct DemandSampler {
    gamma: Gamma<f64>,
    durations: Vec<u32>,
    duration_index: WeightedIndex<f64>,
    arrivals: Option<Poisson<f64>>,
}

impl DemandSampler {
    pub fn new(model: &DemandModel) -> Result<Self> {
        model.validate()?;
        let gamma = Gamma::new(model.gamma_shape, model.gamma_scale)
            .map_err(|e| Error::Config(format!("gamma distribution: {e}")))?;
        let duration_index = WeightedIndex::new(model.duration_histogram.iter().map(|&(_, p)| p))
            .map_err(|e| Error::Config(format!("duration histogram: {e}")))?;
        let arrivals = if model.arrivals_per_day > 0.0 {
            Some(Poisson::new(model.arrivals_per_day).map_err(|e| Error::Config(format!("arrival rate: {e}")))?)
        } else {
            None
        };
        Ok(Self {
            gamma,
            durations: model.duration_histogram.iter().map(|&(d, _)| d).collect(),
            duration_index,
            arrivals,
        })
    }

    pub fn team_size_draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng)
    }

    pub fn request<R: Rng + ?Sized>(&self, id: usize, day: u32, rng: &mut R) -> BookingRequest {
        let beds = beds_from_draw(self.gamma.sample(rng));
        let duration = self.durations[self.duration_index.sample(rng)];
        BookingRequest { id, beds, start_day: day, duration }
    }

    pub fn arrivals<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.arrivals.as_ref().map_or(0, |p| p.sample(rng) as u32)
    }
}

/// Draws one booking request arriving on `day`.
pub fn sample_request<R: Rng + ?Sized>(
    model: &DemandModel,
    day: u32,
    id: usize,
    rng: &mut R,
) -> Result<BookingRequest> {
    Ok(DemandSampler::new(model)?.request(id, day, rng))
}

/// Generates the requests arriving over `days` days, in arrival order.
/// Stays running past the last day are truncated at the horizon.
pub fn generate_stream<R: Rng + ?Sized>(model: &DemandModel, days: u32, rng: &mut R) -> Result<Vec<BookingRequest>> {
    if days < 1 {
        return Err(Error::argument("stream needs at least one day"));
    }
    let sampler = DemandSampler::new(model)?;
    let mut out = Vec::new();
    for day in 0..days {
        for _ in 0..sampler.arrivals(rng) {
            let mut req = sampler.request(out.len(), day, rng);
            req.duration = req.duration.min(days - day);
            out.push(req);
        }
    }
    Ok(out)
}
