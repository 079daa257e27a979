//! The cumulative distribution function k(theta) of the band measure and
//! the singular-point solver: band points where the Szego-asymptotic limit
//! function j_s vanishes, located through the phase equation
//! 2 e^{-i pi p k(theta)} = -eta(e^{i theta}; psi_s/phi_s).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::periodic::{v_density_raw, BandStructure, Discriminant};
use crate::scalar::{angle_dist, c, unit, wrap_angle, Scalar};
use crate::szego::VerblunskyPeriod;

/// Gauss-Legendre 8-point nodes and weights on [-1, 1].
const GL8_X: [f64; 8] = [
    -0.960289856497536,
    -0.796666477413627,
    -0.525532409916329,
    -0.183434642495650,
    0.183434642495650,
    0.525532409916329,
    0.796666477413627,
    0.960289856497536,
];
const GL8_W: [f64; 8] = [
    0.101228536290376,
    0.222381034453374,
    0.313706645877887,
    0.362683783378362,
    0.362683783378362,
    0.313706645877887,
    0.222381034453374,
    0.101228536290376,
];

/// Residual below which a phase-equation minimum counts as a singular point.
pub const SINGULAR_ACCEPT_TOL: f64 = 1e-6;
/// Residual band reported as a near-miss diagnostic, never as a point.
pub const SINGULAR_NEAR_MISS_TOL: f64 = 1e-3;

#[derive(Debug, Clone)]
struct CdfBand<T: Scalar> {
    start_lift: T,
    width: T,
    /// Original-coordinate midpoint and half-width of the arc; the
    /// substitution theta = mid + half sin(u) absorbs the inverse-square-root
    /// edge singularity of V.
    mid: T,
    half: T,
    /// Normalized cumulative values at the cell boundaries in u.
    cum: Vec<T>,
    u_step: T,
    /// Normalized k at the start of the band.
    cum_start: T,
}

/// Normalized CDF of the band measure: k(x_1) = 0, k = 1 at the end of the
/// last band, constant across gaps. `total_raw` keeps the unnormalized
/// integral of V dtheta/2pi for diagnostic purposes.
#[derive(Debug, Clone)]
pub struct BandCdf<T: Scalar> {
    base: T,
    total_raw: T,
    bands: Vec<CdfBand<T>>,
}

fn density_in_u<T: Scalar>(d: &Discriminant<T>, mid: T, half: T, u: T) -> T {
    let theta = mid + half * u.sin();
    v_density_raw(d, theta) * half * u.cos() / T::TAU()
}

fn gl8_integrate<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> T {
    let half = (b - a) * T::of(0.5);
    let mid = (a + b) * T::of(0.5);
    let mut acc = T::zero();
    for i in 0..8 {
        acc = acc + T::of(GL8_W[i]) * f(mid + half * T::of(GL8_X[i]));
    }
    acc * half
}

/// Integrate V(theta) dtheta/2pi over each band with the sine substitution
/// and accumulate the normalized CDF. `quad_points_per_band` is the total
/// number of quadrature nodes per band (8 per cell), at least 64.
pub fn band_cdf<T: Scalar>(
    d: &Discriminant<T>,
    bands: &BandStructure<T>,
    quad_points_per_band: usize,
) -> Result<BandCdf<T>> {
    if quad_points_per_band < 64 {
        return Err(Error::InvalidArgument(format!(
            "band_cdf: quad_points_per_band = {quad_points_per_band} must be at least 64"
        )));
    }
    if bands.bands.is_empty() {
        return Err(Error::Numeric("band_cdf: empty band structure".to_string()));
    }
    let cells = quad_points_per_band / 8;
    let base = bands.x1();
    let mut cdf_bands: Vec<CdfBand<T>> = Vec::with_capacity(bands.bands.len());
    let half_pi = T::FRAC_PI_2();
    for (id, arc) in bands.bands.iter().enumerate() {
        // Continuous coordinates of this arc relative to the base point.
        let start_lift = if bands.is_full_circle() {
            T::zero()
        } else {
            wrap_angle(arc.start - base)
        };
        let width = arc.width();
        let mid = base + start_lift + width * T::of(0.5);
        let half = width * T::of(0.5);
        let u_step = T::PI() / T::of(cells as f64);
        let mut cum = Vec::with_capacity(cells + 1);
        cum.push(T::zero());
        let dens = |u: T| density_in_u(d, mid, half, u);
        let mut acc = T::zero();
        for j in 0..cells {
            let a = -half_pi + u_step * T::of(j as f64);
            let b = a + u_step;
            let inc = gl8_integrate(&dens, a, b);
            if !inc.is_finite() {
                return Err(Error::Numeric(format!(
                    "band_cdf: non-finite integrand in band {id} on u-cell {j}"
                )));
            }
            acc = acc + inc;
            cum.push(acc);
        }
        cdf_bands.push(CdfBand {
            start_lift,
            width,
            mid,
            half,
            cum,
            u_step,
            cum_start: T::zero(),
        });
    }
    let total_raw = cdf_bands
        .iter()
        .fold(T::zero(), |acc, b| acc + *b.cum.last().unwrap());
    if !(total_raw > T::zero()) {
        return Err(Error::Numeric(
            "band_cdf: total band mass is not positive".to_string(),
        ));
    }
    // Order bands along the circuit from the base point and normalize.
    cdf_bands.sort_by(|a, b| a.start_lift.partial_cmp(&b.start_lift).unwrap());
    let inv = total_raw.recip();
    let mut running = T::zero();
    for band in cdf_bands.iter_mut() {
        band.cum_start = running;
        let mass = *band.cum.last().unwrap();
        for v in band.cum.iter_mut() {
            *v = running + *v * inv;
        }
        running = running + mass * inv;
    }
    Ok(BandCdf {
        base,
        total_raw,
        bands: cdf_bands,
    })
}

impl<T: Scalar> BandCdf<T> {
    /// Unnormalized integral of V dtheta/2pi over all bands.
    pub fn total_raw(&self) -> T {
        self.total_raw
    }

    /// The base point x_1 where k vanishes.
    pub fn base(&self) -> T {
        self.base
    }

    /// k(theta): normalized mass of the bands between x_1 and theta going
    /// counterclockwise; constant across gaps.
    pub fn k(&self, d: &Discriminant<T>, theta: T) -> T {
        let lift = wrap_angle(theta - self.base);
        let mut plateau = T::zero();
        for band in &self.bands {
            if lift < band.start_lift {
                return plateau;
            }
            if lift <= band.start_lift + band.width {
                let x = (lift - band.start_lift - band.width * T::of(0.5)) / band.half;
                let u = x.max(-T::one()).min(T::one()).asin();
                let rel = (u + T::FRAC_PI_2()) / band.u_step;
                let cell = rel
                    .floor()
                    .to_usize()
                    .unwrap_or(0)
                    .min(band.cum.len().saturating_sub(2));
                let a = -T::FRAC_PI_2() + band.u_step * T::of(cell as f64);
                let dens = |uu: T| density_in_u(d, band.mid, band.half, uu);
                let partial = gl8_integrate(&dens, a, u) / self.total_raw;
                return band.cum[cell] + partial;
            }
            plateau = *band.cum.last().unwrap();
        }
        plateau
    }

    /// (theta, k) samples across each band, for reporting.
    pub fn sample_table(&self, d: &Discriminant<T>, per_band: usize) -> Vec<(T, T)> {
        let mut out = Vec::new();
        for band in &self.bands {
            for j in 0..=per_band {
                let t = self.base + band.start_lift
                    + band.width * T::of(j as f64) / T::of(per_band as f64);
                out.push((wrap_angle(t), self.k(d, t)));
            }
        }
        out
    }
}

/// A detected zero of j_s on a band.
#[derive(Debug, Clone, Copy)]
pub struct SingularPoint<T: Scalar> {
    pub theta: T,
    pub s: usize,
    pub residual: T,
    pub band: usize,
}

/// Scan result: accepted singular points, near-miss minima (residual in
/// (1e-6, 1e-3]) and minima that land on band edges or closed gaps.
#[derive(Debug, Clone)]
pub struct SingularScan<T: Scalar> {
    pub points: Vec<SingularPoint<T>>,
    pub near_misses: Vec<SingularPoint<T>>,
    pub boundary_hits: Vec<SingularPoint<T>>,
}

impl<T: Scalar> Default for SingularScan<T> {
    fn default() -> Self {
        Self {
            points: Vec::new(),
            near_misses: Vec::new(),
            boundary_hits: Vec::new(),
        }
    }
}

fn golden_min<T: Scalar, F: Fn(T) -> T>(f: &F, mut a: T, mut b: T) -> (T, T) {
    let inv_phi = T::of(0.618_033_988_749_894_8);
    let tol = T::of(1e-10);
    let mut x1 = b - (b - a) * inv_phi;
    let mut x2 = a + (b - a) * inv_phi;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * inv_phi;
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * inv_phi;
            f2 = f(x2);
        }
    }
    let xm = (a + b) * T::of(0.5);
    (xm, f(xm))
}

/// Minimize the phase-equation residual
/// rho(theta) = |2 e^{-i pi p k(theta)} + eta(e^{i theta}; psi_s/phi_s)|
/// on every band; accept local minima with rho < 1e-6.
pub fn find_singular_points<T: Scalar>(
    d: &Discriminant<T>,
    bands: &BandStructure<T>,
    cdf: &BandCdf<T>,
    s: usize,
    scan_size: usize,
) -> Result<SingularScan<T>> {
    let p = d.p();
    if s >= p {
        return Err(Error::InvalidArgument(format!(
            "find_singular_points: s = {s} must be below the effective period {p}"
        )));
    }
    if scan_size < 16 {
        return Err(Error::InvalidArgument(
            "find_singular_points: scan_size must be at least 16".to_string(),
        ));
    }
    let quad = d.quad(s);
    let phi_floor = T::of(1e-9)
        * (T::one()
            + quad
                .phi
                .coeffs()
                .iter()
                .fold(T::zero(), |acc, cc| acc + cc.norm()));
    let pi_p = T::PI() * T::of(p as f64);
    let rho = |theta: T| -> Result<T> {
        let z = unit(theta);
        let phi_s = quad.phi.eval(z);
        if phi_s.norm() < phi_floor {
            return Err(Error::Numeric(format!(
                "find_singular_points: phi_{s}(e^{{i theta}}) vanishes near theta = {theta}"
            )));
        }
        let sigma = quad.psi.eval(z) / phi_s;
        let phase = -pi_p * cdf.k(d, theta);
        let lhs = c::<T>(2.0, 0.0) * Complex::new(phase.cos(), phase.sin());
        Ok((lhs + d.eta_at(z, sigma)).norm())
    };

    let mut scan = SingularScan::default();
    let boundary_tol = T::of(1e-6);
    for (band_id, arc) in bands.bands.iter().enumerate() {
        // Guard pass: phi_s must not vanish anywhere on the scan grid.
        let width = arc.width();
        let vals: Vec<(T, T)> = (0..scan_size)
            .map(|i| {
                let t = arc.start + width * (T::of(i as f64) + T::of(0.5)) / T::of(scan_size as f64);
                rho(t).map(|r| (t, r))
            })
            .collect::<Result<_>>()?;
        let mut brackets: Vec<(T, T)> = Vec::new();
        for i in 0..vals.len() {
            let here = vals[i].1;
            let left = if i == 0 { T::infinity() } else { vals[i - 1].1 };
            let right = if i + 1 == vals.len() {
                T::infinity()
            } else {
                vals[i + 1].1
            };
            if here <= left && here <= right {
                let lo = if i == 0 { arc.start } else { vals[i - 1].0 };
                let hi = if i + 1 == vals.len() {
                    arc.start + width
                } else {
                    vals[i + 1].0
                };
                brackets.push((lo, hi));
            }
        }
        let mut found: Vec<SingularPoint<T>> = Vec::new();
        for (lo, hi) in brackets {
            let f = |t: T| rho(t).unwrap_or_else(|_| T::infinity());
            let (tm, fm) = golden_min(&f, lo, hi);
            if fm > T::of(SINGULAR_NEAR_MISS_TOL) {
                continue;
            }
            if found.iter().any(|q| angle_dist(q.theta, tm) < T::of(1e-8)) {
                continue;
            }
            found.push(SingularPoint {
                theta: wrap_angle(tm),
                s,
                residual: fm,
                band: band_id,
            });
        }
        for pt in found {
            if pt.residual > T::of(SINGULAR_ACCEPT_TOL) {
                scan.near_misses.push(pt);
                continue;
            }
            let near_start = angle_dist(pt.theta, wrap_angle(arc.start)) <= boundary_tol;
            let near_end = angle_dist(pt.theta, wrap_angle(arc.end)) <= boundary_tol;
            let near_gap = bands
                .nearest_closed_gap(pt.theta)
                .map(|g| angle_dist(g, pt.theta) <= boundary_tol)
                .unwrap_or(false);
            let near_edge = bands
                .nearest_edge(pt.theta)
                .map(|e| angle_dist(e.theta, pt.theta) <= boundary_tol)
                .unwrap_or(false);
            if near_start || near_end || near_gap || near_edge {
                scan.boundary_hits.push(pt);
            } else {
                scan.points.push(pt);
            }
        }
    }
    scan.points
        .sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
    Ok(scan)
}

/// The period-p sequence {0, ..., 0, alpha} with p-1 leading zeros.
pub fn make_spike_family<T: Scalar>(p: usize, alpha: Complex<T>) -> Result<VerblunskyPeriod<T>> {
    if p < 2 || p % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "make_spike_family: p = {p} must be a positive even integer"
        )));
    }
    if !(alpha.norm() < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "make_spike_family: |alpha| = {} must be strictly less than 1",
            alpha.norm()
        )));
    }
    let mut alphas = vec![Complex::new(T::zero(), T::zero()); p - 1];
    alphas.push(alpha);
    VerblunskyPeriod::new(alphas)
}

/// alpha = -c + i sqrt(c - c^2), which satisfies Re(alpha) = -|alpha|^2 for
/// c in (0, 1): the critical circle on which the spike family has exactly
/// p/2 singular points.
pub fn critical_spike_alpha<T: Scalar>(c_param: T) -> Complex<T> {
    Complex::new(-c_param, (c_param - c_param * c_param).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodic::{band_structure, v_density_closed_gap, Discriminant};
    use std::f64::consts::PI;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit(theta: f64) -> Complex64 {
        Complex64::new(theta.cos(), theta.sin())
    }

    #[test]
    fn free_case_cdf_is_linear() {
        let v = VerblunskyPeriod::<f64>::free(2);
        let d = Discriminant::new(&v);
        let b = band_structure(&d, 4096).unwrap();
        let cdf = band_cdf(&d, &b, 512).unwrap();
        // V = 1/2 integrates to 1/2 before normalization: the raw total
        // documents the factor-two normalization gap of the density formula.
        assert!((cdf.total_raw() - 0.5).abs() < 1e-9, "{}", cdf.total_raw());
        assert!((cdf.k(&d, PI) - 0.5).abs() < 1e-6);
        for j in 0..40 {
            let th = 2.0 * PI * (j as f64) / 40.0;
            assert!((cdf.k(&d, th) - th / (2.0 * PI)).abs() < 1e-6, "theta={th}");
        }
    }

    #[test]
    fn spike_cdf_increases_on_bands_and_plateaus_on_gaps() {
        let alpha = critical_spike_alpha::<f64>(0.25);
        let v = make_spike_family(4, alpha).unwrap();
        let d = Discriminant::new(&v);
        let b = band_structure(&d, 16384).unwrap();
        assert_eq!(b.bands.len(), 4);
        let cdf = band_cdf(&d, &b, 512).unwrap();
        for arc in &b.bands {
            let mut prev = cdf.k(&d, arc.start + 1e-9);
            for j in 1..20 {
                let th = arc.start + arc.width() * (j as f64) / 20.0 - 1e-9;
                let now = cdf.k(&d, th);
                assert!(now > prev, "k not increasing inside band");
                prev = now;
            }
        }
        // plateau on the gap after band 0
        let gap_mid = (b.bands[0].end + b.bands[1].start) / 2.0;
        let end_val = cdf.k(&d, b.bands[0].end);
        assert!((cdf.k(&d, gap_mid) - end_val).abs() < 1e-12);
        // each of the four bands carries mass 1/4
        assert!((end_val - 0.25).abs() < 1e-9, "{end_val}");
    }

    #[test]
    fn cdf_stable_under_refinement() {
        let alpha = critical_spike_alpha::<f64>(0.25);
        let v = make_spike_family(2, alpha).unwrap();
        let d = Discriminant::new(&v);
        let b = band_structure(&d, 8192).unwrap();
        let c1 = band_cdf(&d, &b, 512).unwrap();
        let c2 = band_cdf(&d, &b, 1024).unwrap();
        for j in 0..30 {
            let th = 2.0 * PI * (j as f64) / 30.0;
            assert!((c1.k(&d, th) - c2.k(&d, th)).abs() < 1e-10);
        }
    }

    #[test]
    fn spike_family_constructors() {
        let v = make_spike_family::<f64>(4, c(0.5, 0.0)).unwrap();
        assert_eq!(v.alphas(), &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        let v = make_spike_family::<f64>(2, c(0.0, 0.5)).unwrap();
        assert_eq!(v.alphas(), &[c(0.0, 0.0), c(0.0, 0.5)]);
        assert!(make_spike_family::<f64>(4, c(1.0, 0.0)).is_err());
        assert!(make_spike_family::<f64>(3, c(0.1, 0.0)).is_err());

        // the critical circle: Re alpha = -|alpha|^2
        for cc in [0.1, 0.25, 0.6] {
            let a = critical_spike_alpha::<f64>(cc);
            assert!((a.re + a.norm_sqr()).abs() < 1e-14);
            assert!((a.norm_sqr() - cc).abs() < 1e-14);
        }
    }

    #[test]
    fn critical_spike_p2_has_one_singular_point_for_all_s() {
        let alpha = critical_spike_alpha::<f64>(0.25);
        let v = make_spike_family(2, alpha).unwrap();
        let d = Discriminant::new(&v);
        let b = band_structure(&d, 8192).unwrap();
        let cdf = band_cdf(&d, &b, 512).unwrap();
        let mut thetas = Vec::new();
        for s in 0..2 {
            let scan = find_singular_points(&d, &b, &cdf, s, 2048).unwrap();
            assert_eq!(scan.points.len(), 1, "s={s}: {:?}", scan.points);
            assert!(scan.points[0].residual <= 1e-6);
            thetas.push(scan.points[0].theta);
        }
        assert!(angle_dist(thetas[0], thetas[1]) <= 1e-6);
    }

    #[test]
    fn off_critical_spike_has_no_singular_points() {
        let alpha = critical_spike_alpha::<f64>(0.25) + c(0.05, 0.0);
        let v = make_spike_family(4, alpha).unwrap();
        let d = Discriminant::new(&v);
        let b = band_structure(&d, 8192).unwrap();
        let cdf = band_cdf(&d, &b, 512).unwrap();
        let scan = find_singular_points(&d, &b, &cdf, 0, 1024).unwrap();
        assert!(scan.points.is_empty(), "{:?}", scan.points);
        assert!(scan.near_misses.is_empty());
    }

    #[test]
    fn free_case_minimum_is_a_boundary_hit() {
        // rho = |2 e^{-i pi p k} - 2| vanishes only where k = 0 mod 2/p,
        // which in the free case is the closed gap at theta = 0.
        let v = VerblunskyPeriod::<f64>::free(2);
        let d = Discriminant::new(&v);
        let b = band_structure(&d, 4096).unwrap();
        let cdf = band_cdf(&d, &b, 512).unwrap();
        let scan = find_singular_points(&d, &b, &cdf, 0, 2048).unwrap();
        assert!(scan.points.is_empty(), "{:?}", scan.points);
        assert!(
            !scan.boundary_hits.is_empty(),
            "expected the theta = 0 closed-gap hit to be flagged"
        );
        assert!(angle_dist(scan.boundary_hits[0].theta, 0.0) < 1e-5);
    }

    #[test]
    fn free_case_cdf_matches_gamma_phase() {
        // pi p k(theta) - arg(Gamma_+(r e^{i theta})) is constant on the band
        // for r slightly above 1 (free case sanity link).
        let v = VerblunskyPeriod::<f64>::free(2);
        let d = Discriminant::new(&v);
        let b = band_structure(&d, 4096).unwrap();
        let cdf = band_cdf(&d, &b, 512).unwrap();
        let r = 1.0 + 1e-6;
        let mut prev_arg = 0.0f64;
        let mut diffs: Vec<f64> = Vec::new();
        for j in 0..200 {
            let th = 0.05 + 6.1 * (j as f64) / 200.0;
            let (gp, _) = crate::periodic::gamma_pm(&d, c(r, 0.0) * unit(th)).unwrap();
            // unwrap continuously
            let mut a = gp.arg();
            while a < prev_arg - PI {
                a += 2.0 * PI;
            }
            prev_arg = a;
            diffs.push(2.0 * PI * cdf.k(&d, th) - a);
        }
        let max = diffs.iter().cloned().fold(f64::MIN, f64::max);
        let min = diffs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max - min <= 1e-5, "spread = {}", max - min);
    }

    #[test]
    fn closed_gap_density_consistent_with_interior_limit() {
        // Approaching the free-case closed gap, the interior formula tends
        // to the L'Hopital extension.
        let v = VerblunskyPeriod::<f64>::free(2);
        let d = Discriminant::new(&v);
        let ext = v_density_closed_gap(&d, 0.0);
        let near = v_density_raw(&d, 1e-5);
        assert!((ext - near).abs() < 1e-6, "ext={ext} near={near}");
    }
}
