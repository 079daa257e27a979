//! JSON-facing report types shared between the library and the CLI.
//! Reports are byte-stable for a fixed config and seed, except for the
//! wall-clock field isolated in `meta.elapsed_ms`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::equilibrium::{BandCdf, SingularScan};
use crate::periodic::{BandStructure, Discriminant};

/// Round to the given number of significant digits; angles are reported
/// with 12.
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - mag);
    (x * factor).round() / factor
}

fn angle(x: f64) -> f64 {
    round_sig(x, 12)
}

#[derive(Debug, Serialize)]
pub struct Meta {
    pub elapsed_ms: u64,
}

/// Report envelope: config echo, library version, tolerances, timing, data.
#[derive(Debug, Serialize)]
pub struct Report<C: Serialize, R: Serialize> {
    pub command: String,
    pub config: C,
    pub library_version: String,
    pub tolerances: BTreeMap<String, f64>,
    pub meta: Meta,
    pub result: R,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(
        command: &str,
        config: C,
        tolerances: BTreeMap<String, f64>,
        elapsed_ms: u64,
        result: R,
    ) -> Self {
        Self {
            command: command.to_string(),
            config,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances,
            meta: Meta { elapsed_ms },
            result,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EdgeEntry {
    pub theta: f64,
    pub delta_sign: i8,
    pub is_resonance: bool,
    pub warning: bool,
}

#[derive(Debug, Serialize)]
pub struct BandEntry {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Serialize)]
pub struct VSample {
    pub theta: f64,
    pub v: f64,
}

#[derive(Debug, Serialize)]
pub struct CdfSample {
    pub theta: f64,
    pub k: f64,
}

#[derive(Debug, Serialize)]
pub struct BandsResult {
    pub effective_p: usize,
    pub bands: Vec<BandEntry>,
    pub closed_gaps: Vec<f64>,
    pub resonances: Vec<f64>,
    pub edges: Vec<EdgeEntry>,
    pub v_samples: Vec<VSample>,
    pub cdf_total_raw: f64,
    pub cdf: Vec<CdfSample>,
}

impl BandsResult {
    pub fn build(
        d: &Discriminant<f64>,
        bands: &BandStructure<f64>,
        cdf: &BandCdf<f64>,
        v_samples: Vec<(f64, f64)>,
        cdf_samples_per_band: usize,
    ) -> Self {
        Self {
            effective_p: d.p(),
            bands: bands
                .bands
                .iter()
                .map(|b| BandEntry {
                    start: angle(b.start),
                    end: angle(b.end),
                })
                .collect(),
            closed_gaps: bands.closed_gaps.iter().map(|&t| angle(t)).collect(),
            resonances: bands.resonances.iter().map(|&t| angle(t)).collect(),
            edges: bands
                .edges
                .iter()
                .map(|e| EdgeEntry {
                    theta: angle(e.theta),
                    delta_sign: e.delta_sign,
                    is_resonance: e.is_resonance,
                    warning: e.warning,
                })
                .collect(),
            v_samples: v_samples
                .into_iter()
                .map(|(t, v)| VSample {
                    theta: angle(t),
                    v,
                })
                .collect(),
            cdf_total_raw: cdf.total_raw(),
            cdf: cdf
                .sample_table(d, cdf_samples_per_band)
                .into_iter()
                .map(|(t, k)| CdfSample {
                    theta: angle(t),
                    k,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SingularEntry {
    pub theta: f64,
    pub s: usize,
    pub residual: f64,
    pub band: usize,
}

#[derive(Debug, Serialize)]
pub struct SingularPerS {
    pub s: usize,
    pub points: Vec<SingularEntry>,
    pub near_misses: Vec<SingularEntry>,
    pub boundary_hits: Vec<SingularEntry>,
}

#[derive(Debug, Serialize)]
pub struct SingularResult {
    pub per_s: Vec<SingularPerS>,
    /// True when every s produced the same singular-point angles.
    pub common_to_all_s: bool,
}

fn singular_entries(points: &[crate::equilibrium::SingularPoint<f64>]) -> Vec<SingularEntry> {
    points
        .iter()
        .map(|pt| SingularEntry {
            theta: angle(pt.theta),
            s: pt.s,
            residual: pt.residual,
            band: pt.band,
        })
        .collect()
}

impl SingularResult {
    pub fn build(scans: Vec<(usize, SingularScan<f64>)>) -> Self {
        let mut common = true;
        if let Some((_, first)) = scans.first() {
            for (_, scan) in &scans {
                if scan.points.len() != first.points.len() {
                    common = false;
                    break;
                }
                for (a, b) in scan.points.iter().zip(&first.points) {
                    if crate::scalar::angle_dist(a.theta, b.theta) > 1e-6 {
                        common = false;
                    }
                }
            }
        }
        Self {
            per_s: scans
                .into_iter()
                .map(|(s, scan)| SingularPerS {
                    s,
                    points: singular_entries(&scan.points),
                    near_misses: singular_entries(&scan.near_misses),
                    boundary_hits: singular_entries(&scan.boundary_hits),
                })
                .collect(),
            common_to_all_s: common,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct UniversalityRow {
    pub n: usize,
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub ratio: [f64; 2],
    pub predicted: [f64; 2],
    pub abs_error: f64,
}

#[derive(Debug, Serialize)]
pub struct TrendPoint {
    pub n: usize,
    pub max_abs_error: f64,
}

#[derive(Debug, Serialize)]
pub struct UniversalityResult {
    pub regime: crate::periodic::RegimeLabel,
    pub theta: f64,
    /// V(theta) in the bulk / closed-gap regimes, W(theta) at edges.
    pub scale_parameter: f64,
    pub rows: Vec<UniversalityRow>,
    pub trend_all_n: Vec<TrendPoint>,
    /// Trend restricted to degrees n with n + 1 divisible by the period.
    pub trend_aligned_n: Vec<TrendPoint>,
    pub monotone_trend: bool,
    pub final_max_error: f64,
}
