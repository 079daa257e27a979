//! Christoffel-Darboux kernels (direct sum and two-term formula), the sinc
//! and half-integer Bessel limit kernels, and scaled universality ratios
//! with their predicted limits per point regime.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::periodic::{
    band_structure, classify_point, closed_form_phi, v_density, BandStructure, Discriminant,
    RegimeLabel,
};
use crate::scalar::{cr, unit, wrap_angle, Scalar};
use crate::szego::QuadRecursion;

/// Below this |1 - z conj(w)| the two-term formula falls back to the
/// direct sum (the numerator cancellation grows as the denominator
/// vanishes).
pub const CD_DIAGONAL_TOL: f64 = 1e-8;

/// K_n(z, w) = sum_{j=0}^n phi_j(z) conj(phi_j(w)) by running the pointwise
/// recursion incrementally; O(n) time.
pub fn cd_kernel_direct<T: Scalar>(
    v: &crate::szego::VerblunskyPeriod<T>,
    n: usize,
    z: Complex<T>,
    w: Complex<T>,
) -> Complex<T> {
    let mut rz = QuadRecursion::new(v, z);
    let mut rw = QuadRecursion::new(v, w);
    let mut acc = Complex::new(T::one(), T::zero()); // j = 0 term
    for _ in 0..n {
        rz.advance();
        rw.advance();
        acc += rz.values().phi * rw.values().phi.conj();
    }
    acc
}

/// K_n(z, w) by the Christoffel-Darboux formula with phi_{n+1} from the
/// Chebyshev closed form; falls back to the direct sum near the diagonal.
pub fn cd_kernel_fast<T: Scalar>(
    d: &Discriminant<T>,
    n: usize,
    z: Complex<T>,
    w: Complex<T>,
) -> Result<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    let denom = one - z * w.conj();
    if denom.norm() <= T::of(CD_DIAGONAL_TOL) {
        return Ok(cd_kernel_direct(d.verblunsky(), n, z, w));
    }
    let p = d.p();
    let m = n + 1;
    let (k, s) = (m / p, m % p);
    let (phi_z, phi_star_z) = closed_form_phi(d, k, s, z)?;
    let (phi_w, phi_star_w) = closed_form_phi(d, k, s, w)?;
    Ok((phi_star_z * phi_star_w.conj() - phi_z * phi_w.conj()) / denom)
}

/// sin(x)/x, with the series on |x| < 1e-4 so the removable singularity is
/// smooth.
pub fn sinc<T: Scalar>(x: Complex<T>) -> Complex<T> {
    if x.norm() < T::of(1e-4) {
        let x2 = x * x;
        let one = Complex::new(T::one(), T::zero());
        one - x2 / cr(T::of(6.0)) + x2 * x2 / cr(T::of(120.0))
    } else {
        x.sin() / x
    }
}

/// Bulk limit kernel e^{i(a - conj b)/2} sinc(V (a - conj b)).
pub fn sinc_kernel<T: Scalar>(v_theta: T, a: Complex<T>, b: Complex<T>) -> Complex<T> {
    let d = a - b.conj();
    let i = Complex::new(T::zero(), T::one());
    (i * d * cr(T::of(0.5))).exp() * sinc(d * cr(v_theta))
}

/// Order of the edge limit kernel: s = -1/2 (resonant edge) or s = +1/2
/// (non-resonant edge).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JstarOrder {
    MinusHalf,
    PlusHalf,
}

impl JstarOrder {
    /// Only the half-integer orders +-1/2 are supported.
    pub fn from_value(s: f64) -> Result<Self> {
        if s == -0.5 {
            Ok(Self::MinusHalf)
        } else if s == 0.5 {
            Ok(Self::PlusHalf)
        } else {
            Err(Error::Unsupported(format!(
                "bessel_jstar: order s = {s} is not supported; only +-1/2 occur at band edges"
            )))
        }
    }
}

/// sinc(sqrt(w)) as an entire function of w (branch-independent).
fn sinc_sqrt<T: Scalar>(w: Complex<T>) -> Complex<T> {
    sinc(w.sqrt())
}

/// Divided difference (S(p) - S(q))/(q - p) of S(w) = sinc(sqrt(w)),
/// switching to the power series when p and q are close.
fn sinc_sqrt_divdiff<T: Scalar>(p: Complex<T>, q: Complex<T>) -> Complex<T> {
    let sep = (p - q).norm();
    if sep >= T::of(1e-3) * (T::one() + p.norm() + q.norm()) {
        return (sinc_sqrt(p) - sinc_sqrt(q)) / (q - p);
    }
    // sum_m (-1)^{m+1} h_m / (2m+1)!  with  h_m = (p^m - q^m)/(p - q),
    // h_{m+1} = p h_m + q^m.
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut h = Complex::new(T::one(), T::zero()); // h_1
    let mut qpow = q; // q^m at m = 1
    let mut factorial = T::of(6.0); // (2*1+1)!
    let mut sign = T::one();
    for m in 1..=90u32 {
        let term = h * cr(sign / factorial);
        acc += term;
        if term.norm() <= acc.norm() * T::epsilon() && m > 4 {
            break;
        }
        h = p * h + qpow;
        qpow *= q;
        sign = -sign;
        let mf = T::of((2 * m + 2) as f64) * T::of((2 * m + 3) as f64);
        factorial = factorial * mf;
    }
    acc
}

/// The edge limit kernels in elementary form. Writing x = sqrt(a),
/// y = sqrt(b), P = (x-y)^2 and Q = (x+y)^2:
///   J*_{-1/2}(a,b) = (sinc(x+y) + sinc(x-y)) / (2 pi)
///   J*_{+1/2}(a,b) = (sinc(x-y) - sinc(x+y)) / (2 pi x y)
/// both entire on C^2 and independent of the square-root branches.
pub fn bessel_jstar<T: Scalar>(order: JstarOrder, a: Complex<T>, b: Complex<T>) -> Complex<T> {
    let g = (a * b).sqrt();
    let sum = a + b;
    let two = cr(T::of(2.0));
    let p = sum - two * g; // (x - y)^2
    let q = sum + two * g; // (x + y)^2
    let pi = cr(T::PI());
    match order {
        JstarOrder::MinusHalf => (sinc_sqrt(p) + sinc_sqrt(q)) / (two * pi),
        // (sinc(x-y) - sinc(x+y))/(2xy) = 2 (S(P) - S(Q))/(Q - P)
        JstarOrder::PlusHalf => sinc_sqrt_divdiff(p, q) * two / pi,
    }
}

/// The scaling sequence for a regime: 1/n in the bulk and at closed gaps,
/// -1/n^2 at band edges. `edge_sign` lets callers probe the +1/n^2
/// direction as well (the default -1 matches the into-band convention).
pub fn sigma_n<T: Scalar>(regime: RegimeLabel, n: usize, edge_sign: i8) -> T {
    let nf = T::of(n as f64);
    match regime {
        RegimeLabel::InteriorBulk | RegimeLabel::ClosedGap => nf.recip(),
        _ => T::of(edge_sign as f64) / (nf * nf),
    }
}

/// K_n(e^{i(theta + a sigma_n)}, e^{i(theta + b sigma_n)}) /
/// K_n(e^{i theta}, e^{i theta}) with the direct kernel sum.
pub fn universality_ratio<T: Scalar>(
    d: &Discriminant<T>,
    bands: &BandStructure<T>,
    theta: T,
    a: Complex<T>,
    b: Complex<T>,
    n: usize,
) -> Result<Complex<T>> {
    universality_ratio_signed(d, bands, theta, a, b, n, -1)
}

/// Same as `universality_ratio` with an explicit edge sigma sign.
pub fn universality_ratio_signed<T: Scalar>(
    d: &Discriminant<T>,
    bands: &BandStructure<T>,
    theta: T,
    a: Complex<T>,
    b: Complex<T>,
    n: usize,
    edge_sign: i8,
) -> Result<Complex<T>> {
    if n < 10 {
        return Err(Error::InvalidArgument(format!(
            "universality_ratio: n = {n} must be at least 10"
        )));
    }
    let regime = classify_point(d, bands, theta, T::of(1e-9));
    if regime == RegimeLabel::OutsideBands {
        return Err(Error::Domain(format!(
            "universality_ratio: theta = {theta} lies outside the bands (regime OutsideBands)"
        )));
    }
    let sigma = sigma_n::<T>(regime, n, edge_sign);
    let i = Complex::new(T::zero(), T::one());
    let z_theta = unit(theta);
    let za = (i * (cr(theta) + a * cr(sigma))).exp();
    let zb = (i * (cr(theta) + b * cr(sigma))).exp();
    let v = d.verblunsky();
    let num = cd_kernel_direct(v, n, za, zb);
    let den = cd_kernel_direct(v, n, z_theta, z_theta);
    Ok(num / den)
}

/// The regime-dependent predicted limit of the universality ratio.
/// Delta = -2 edges are handled only through the opt-in rotation reduction;
/// by default they produce a typed unsupported-case error.
pub fn predicted_limit<T: Scalar>(
    d: &Discriminant<T>,
    bands: &BandStructure<T>,
    theta: T,
    a: Complex<T>,
    b: Complex<T>,
    experimental_neg_edge: bool,
) -> Result<Complex<T>> {
    let regime = classify_point(d, bands, theta, T::of(1e-9));
    match regime {
        RegimeLabel::OutsideBands => Err(Error::Domain(format!(
            "predicted_limit: theta = {theta} lies outside the bands"
        ))),
        RegimeLabel::InteriorBulk | RegimeLabel::ClosedGap => {
            let v = v_density(d, bands, theta)?;
            Ok(sinc_kernel(v, a, b))
        }
        RegimeLabel::EdgeNonResonant | RegimeLabel::EdgeResonant => {
            let edge = bands
                .nearest_edge(theta)
                .ok_or_else(|| Error::Numeric("predicted_limit: no edge record found".to_string()))?;
            if edge.delta_sign < 0 {
                if !experimental_neg_edge {
                    return Err(Error::Unsupported(
                        "predicted_limit: Delta = -2 edge; rerun with the experimental rotation \
                         reduction enabled to map it onto a Delta = +2 edge"
                            .to_string(),
                    ));
                }
                // Rotating alpha_n -> e^{i(n+1) 2 pi/p} alpha_n leaves the
                // kernel ratio invariant and maps theta to theta - 2 pi/p
                // with the discriminant sign flipped.
                let lambda = T::TAU() / T::of(d.p() as f64);
                let v_rot = d.verblunsky().rotate(lambda);
                let d_rot = Discriminant::new(&v_rot);
                let bands_rot = band_structure(&d_rot, 16384)?;
                let theta_rot = wrap_angle(theta - lambda);
                return predicted_limit(&d_rot, &bands_rot, theta_rot, a, b, false);
            }
            let order = if regime == RegimeLabel::EdgeResonant {
                JstarOrder::MinusHalf
            } else {
                JstarOrder::PlusHalf
            };
            let w = d.w_theta(theta);
            let p2 = T::of((d.p() * d.p()) as f64);
            let scale = cr(w / p2);
            let zero = Complex::new(T::zero(), T::zero());
            let num = bessel_jstar(order, a * scale, b.conj() * scale);
            let den = bessel_jstar(order, zero, zero);
            Ok(num / den)
        }
    }
}

/// One entry of a universality sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow<T: Scalar> {
    pub n: usize,
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub ratio: Complex<T>,
    pub predicted: Complex<T>,
    pub abs_error: T,
}

/// Ratio vs predicted limit over an (a, b) grid and a list of degrees.
pub fn universality_sweep<T: Scalar>(
    d: &Discriminant<T>,
    bands: &BandStructure<T>,
    theta: T,
    pairs: &[(Complex<T>, Complex<T>)],
    ns: &[usize],
    experimental_neg_edge: bool,
    edge_sign: i8,
) -> Result<Vec<SweepRow<T>>> {
    let mut rows = Vec::with_capacity(pairs.len() * ns.len());
    for &n in ns {
        for &(a, b) in pairs {
            let ratio = universality_ratio_signed(d, bands, theta, a, b, n, edge_sign)?;
            let predicted = predicted_limit(d, bands, theta, a, b, experimental_neg_edge)?;
            rows.push(SweepRow {
                n,
                a,
                b,
                ratio,
                predicted,
                abs_error: (ratio - predicted).norm(),
            });
        }
    }
    Ok(rows)
}

/// Maximum absolute error per n, in the order the degrees appear in `rows`.
pub fn max_error_per_n<T: Scalar>(rows: &[SweepRow<T>]) -> Vec<(usize, T)> {
    let mut out: Vec<(usize, T)> = Vec::new();
    for row in rows {
        match out.iter_mut().find(|(n, _)| *n == row.n) {
            Some((_, e)) => {
                if row.abs_error > *e {
                    *e = row.abs_error;
                }
            }
            None => out.push((row.n, row.abs_error)),
        }
    }
    out
}
