//! Wall polynomials, the Schur and Caratheodory functions of the measure,
//! the generating function of {phi_n}, the Chebyshev period-rescaling
//! identity, zero classification for phi_kp - phi*_kp, and ratio
//! asymptotics.

use num_complex::Complex;

use crate::cheb::{cheb_u, cpowi};
use crate::error::{Error, Result};
use crate::periodic::{gamma_pm, szego_asymptotics, Discriminant};
use crate::poly::{ComplexPoly, LaurentPoly};
use crate::scalar::{cr, Scalar};
use crate::szego::{eval_quad_at, iterate_polys, QuadRecursion, VerblunskyPeriod};

/// Tolerance for the Laurent-to-polynomial cancellation in the Wall
/// assembly (relative to the largest coefficient).
pub const WALL_CANCEL_TOL: f64 = 1e-10;

/// Wall rational approximants A_{kp-1}/B_{kp-1} -> Schur function f.
#[derive(Debug, Clone)]
pub struct WallPair<T: Scalar> {
    pub k: usize,
    pub a: ComplexPoly<T>,
    pub b: ComplexPoly<T>,
}

/// U_0(Delta/2), ..., U_k(Delta/2) as Laurent polynomials via the
/// three-term recurrence U_{j+1} = Delta U_j - U_{j-1}.
fn cheb_of_delta<T: Scalar>(d: &Discriminant<T>, k: usize) -> Vec<LaurentPoly<T>> {
    let mut out: Vec<LaurentPoly<T>> = Vec::with_capacity(k + 1);
    let one = LaurentPoly::from_poly(&ComplexPoly::one(), 0);
    out.push(one);
    if k == 0 {
        return out;
    }
    out.push(d.delta.clone());
    for j in 1..k {
        let next = d.delta.mul(&out[j]).add(&out[j - 1].scale(cr(-T::one())));
        out.push(next);
    }
    out
}

/// Wall polynomials at index kp-1 from the Chebyshev closed form, assembled
/// as genuine polynomials (negative powers must cancel).
pub fn wall_polys<T: Scalar>(d: &Discriminant<T>, k: usize) -> Result<WallPair<T>> {
    wall_polys_inner(d, k, T::one())
}

/// Test hook: assemble with psi scaled by a wrong factor. Any factor other
/// than 1 must trip the cancellation assertion.
#[doc(hidden)]
pub fn wall_polys_with_psi_scale<T: Scalar>(
    d: &Discriminant<T>,
    k: usize,
    psi_scale: T,
) -> Result<WallPair<T>> {
    wall_polys_inner(d, k, psi_scale)
}

fn wall_polys_inner<T: Scalar>(d: &Discriminant<T>, k: usize, psi_scale: T) -> Result<WallPair<T>> {
    if k < 1 {
        return Err(Error::InvalidArgument(
            "wall_polys: k must be at least 1".to_string(),
        ));
    }
    let p = d.p() as i64;
    let q = d.quad(d.p());
    let scale = cr(psi_scale);
    let psi_star = q.psi_star.scale(scale);
    let psi = q.psi.scale(scale);
    let r_pow = cr(d.r().powi(k as i32));
    let us = cheb_of_delta(d, k);
    let tol = T::of(WALL_CANCEL_TOL);

    // A_{kp-1} = r^k z^{(k-1)p/2 - 1} U_{k-1}(Delta/2) (psi_p^* - phi_p^*)/2
    let diff = psi_star.sub(&q.phi_star);
    let a_laurent = us[k - 1]
        .mul(&LaurentPoly::from_poly(&diff, 0))
        .shift((k as i64 - 1) * p / 2 - 1)
        .scale(r_pow * cr(T::of(0.5)));
    let a = a_laurent.to_poly(tol)?;

    // B_{kp-1} = r^k [ z^{kp/2} U_k - z^{(k-1)p/2} U_{k-1} (psi_p + phi_p)/2 ]
    let sum = psi.add(&q.phi);
    let b_first = us[k].shift(k as i64 * p / 2);
    let b_second = us[k - 1]
        .mul(&LaurentPoly::from_poly(&sum, 0))
        .shift((k as i64 - 1) * p / 2)
        .scale(cr(-T::of(0.5)));
    let b = b_first.add(&b_second).scale(r_pow).to_poly(tol)?;

    Ok(WallPair { k, a, b })
}

/// 2 z^{p/2} Gamma_+(z) in entire form: G + sqrt(G^2 - 4 z^p) with
/// G = z^{p/2} Delta(z) = (phi_p + phi_p^* + psi_p + psi_p^*)/2 and the
/// root chosen with the larger modulus (the Gamma_+ side). Well defined on
/// the whole disk, including z = 0.
fn two_zp2_gamma_plus<T: Scalar>(d: &Discriminant<T>, z: Complex<T>) -> Complex<T> {
    let g = d.half_sum.eval(z);
    let zp = cpowi(z, d.p() as i64);
    let root = (g * g - zp * cr(T::of(4.0))).sqrt();
    if (g + root).norm() >= (g - root).norm() {
        g + root
    } else {
        g - root
    }
}

/// The Schur function f(z) = (psi_p^* - phi_p^*)/(2 Gamma_+ z^{p/2+1} -
/// z (psi_p + phi_p)) on |z| < 1. Near z = 0 the 0/0 form is replaced by
/// the Wall ratio, which agrees to far below the working precision.
pub fn schur_f<T: Scalar>(d: &Discriminant<T>, z: Complex<T>) -> Result<Complex<T>> {
    if !(z.norm() < T::one()) {
        return Err(Error::Domain(format!(
            "schur_f: |z| = {} must be strictly less than 1",
            z.norm()
        )));
    }
    if z.norm() < T::of(1e-4) {
        // |f - A/B| = O(|z|^{kp}); kp >= 16 puts the error below 1e-64.
        let k = (16 + d.p() - 1) / d.p();
        let wall = wall_polys(d, k)?;
        let denom = wall.b.eval(z);
        if denom.norm() == T::zero() {
            return Err(Error::Numeric(
                "schur_f: Wall denominator B vanished inside the disk".to_string(),
            ));
        }
        return Ok(wall.a.eval(z) / denom);
    }
    let q = d.quad(d.p());
    let num = q.psi_star.sub(&q.phi_star).eval(z);
    let denom = z * (two_zp2_gamma_plus(d, z) - q.psi.add(&q.phi).eval(z));
    if denom.norm() <= T::of(1e-300) {
        return Err(Error::Numeric(format!(
            "schur_f: denominator vanished at z = {z} inside the disk (unexpected pole)"
        )));
    }
    Ok(num / denom)
}

/// The Caratheodory function F(z) = 1 + 2(psi_p^* - phi_p^*)/(2 z^{p/2}
/// Gamma_+ + phi_p^* - phi_p - psi_p - psi_p^*) on |z| < 1; F(0) = 1.
pub fn caratheodory_f<T: Scalar>(d: &Discriminant<T>, z: Complex<T>) -> Result<Complex<T>> {
    if !(z.norm() < T::one()) {
        return Err(Error::Domain(format!(
            "caratheodory_f: |z| = {} must be strictly less than 1",
            z.norm()
        )));
    }
    let q = d.quad(d.p());
    let num = q.psi_star.sub(&q.phi_star).eval(z) * cr(T::of(2.0));
    let tail = q.phi_star.sub(&q.phi).sub(&q.psi).sub(&q.psi_star).eval(z);
    let denom = two_zp2_gamma_plus(d, z) + tail;
    if denom.norm() <= T::of(1e-300) {
        return Err(Error::Numeric(format!(
            "caratheodory_f: denominator vanished at z = {z}"
        )));
    }
    Ok(Complex::new(T::one(), T::zero()) + num / denom)
}

/// |sum_{n<=N} phi_n(z) t^n - (2 nu(z,t;0) + t^p g(z,t)) / D(z,t)| with the
/// closed-form right-hand side; tends to 0 as N grows inside the guard
/// region |t|^p |z^{p/2} Gamma_+| < 0.9.
pub fn generating_function_residual<T: Scalar>(
    d: &Discriminant<T>,
    z: Complex<T>,
    t: Complex<T>,
    n_terms: usize,
) -> Result<T> {
    if z.norm() == T::zero() {
        return Err(Error::Domain("generating_function_residual: z = 0".to_string()));
    }
    let p = d.p();
    // Growth of |phi_{kp} t^{kp}| per period: |t|^p |z^{p/2} Gamma_+|. On a
    // band |Gamma_+| continues to 1, so the factor degrades to |z|^{p/2}.
    let zp2_norm = z.norm().powi((p / 2) as i32);
    let growth = match gamma_pm(d, z) {
        Ok((gp, _)) => zp2_norm * gp.norm(),
        Err(Error::Domain(_)) => zp2_norm,
        Err(e) => return Err(e),
    };
    if !(t.norm().powi(p as i32) * growth < T::of(0.9)) {
        return Err(Error::Domain(format!(
            "generating_function_residual: |t|^p * growth = {} violates the < 0.9 guard",
            t.norm().powi(p as i32) * growth
        )));
    }

    // left side: truncated series from the recursion oracle
    let mut rec = QuadRecursion::new(d.verblunsky(), z);
    let mut lhs = Complex::new(T::one(), T::zero());
    let mut tp = t;
    for _ in 1..=n_terms {
        rec.advance();
        lhs += rec.values().phi * tp;
        tp *= t;
    }

    // right side: (2 nu(z,t;0) + t^p g(z,t)) / (2 (1 - Delta z^{p/2} t^p + z^p t^{2p}))
    let mut nu0 = Complex::new(T::zero(), T::zero());
    let mut nu_psi = Complex::new(T::zero(), T::zero());
    let mut ts = Complex::new(T::one(), T::zero());
    for s in 0..p {
        let q = d.quad(s);
        nu0 += q.phi.eval(z) * ts;
        nu_psi += q.psi.eval(z) * ts;
        ts *= t;
    }
    let qp = d.quad(p);
    let g = d.phi_diff.eval(z) * nu_psi - d.psi_sum.eval(z) * nu0;
    let tpow = cpowi(t, p as i64);
    let big_g = qp
        .phi
        .add(&qp.phi_star)
        .add(&qp.psi)
        .add(&qp.psi_star)
        .eval(z)
        * cr(T::of(0.5));
    let zp = cpowi(z, p as i64);
    let den = (Complex::new(T::one(), T::zero()) - big_g * tpow + zp * tpow * tpow) * cr(T::of(2.0));
    let rhs = (nu0 * cr(T::of(2.0)) + tpow * g) / den;
    Ok((lhs - rhs).norm())
}

/// Scalar discriminant data of the same sequence viewed with period j
/// (j a multiple of the effective period): Delta_j(z) and eta_j(z; 1).
fn delta_eta_at_period<T: Scalar>(
    v: &VerblunskyPeriod<T>,
    j: usize,
    z: Complex<T>,
) -> (Complex<T>, Complex<T>) {
    let q = eval_quad_at(v, j, z);
    let zj2 = cpowi(z, (j / 2) as i64);
    let delta = (q.phi + q.phi_star + q.psi + q.psi_star) / (zj2 * cr(T::of(2.0)));
    let eta = (q.phi - q.phi_star) - q.psi - q.psi_star;
    (delta, eta)
}

/// |LHS - RHS| of the period-rescaling identity relating the period-mp
/// Chebyshev form at index k to the period-p form at index mk:
/// U_k(D_mp/2) + eta_mp/(2 z^{mp/2}) U_{k-1}(D_mp/2)
///   = U_{mk}(D_p/2) + eta_p/(2 z^{p/2}) U_{mk-1}(D_p/2).
pub fn cheb_period_identity_residual<T: Scalar>(
    v: &VerblunskyPeriod<T>,
    m: usize,
    k: usize,
    z: Complex<T>,
) -> Result<T> {
    if m < 1 || k < 1 {
        return Err(Error::InvalidArgument(
            "cheb_period_identity_residual: m and k must be positive".to_string(),
        ));
    }
    if z.norm() == T::zero() {
        return Err(Error::Domain("cheb_period_identity_residual: z = 0".to_string()));
    }
    let p = v.effective_p();
    let mp = m * p;
    let (d_mp, eta_mp) = delta_eta_at_period(v, mp, z);
    let (d_p, eta_p) = delta_eta_at_period(v, p, z);
    let half = cr(T::of(0.5));
    let lhs = cheb_u(k as i64, d_mp * half)
        + eta_mp / (cpowi(z, (mp / 2) as i64) * cr(T::of(2.0)))
            * cheb_u(k as i64 - 1, d_mp * half);
    let rhs = cheb_u((m * k) as i64, d_p * half)
        + eta_p / (cpowi(z, (p / 2) as i64) * cr(T::of(2.0)))
            * cheb_u((m * k) as i64 - 1, d_p * half);
    Ok((lhs - rhs).norm())
}

/// Classification of a zero of Phi_kp - Phi_kp^*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ZeroLabel {
    /// Zero of phi_p - phi_p^*.
    Resonance,
    /// Preimage of a zero of U_{k-1} under Delta(z)/2.
    ChebPreimage,
    /// Satisfies both residual tests.
    Both,
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroClassification<T: Scalar> {
    pub root: Complex<T>,
    pub label: ZeroLabel,
    pub resonance_residual: T,
    pub cheb_residual: T,
}

/// Every zero of Phi_kp - Phi_kp^* is a resonance or a Chebyshev preimage;
/// a root matching neither test is a property violation.
pub fn classify_zeros_phi_diff<T: Scalar>(
    d: &Discriminant<T>,
    k: usize,
) -> Result<Vec<ZeroClassification<T>>> {
    let p = d.p();
    if k < 1 || k > 8 || p > 6 {
        return Err(Error::InvalidArgument(format!(
            "classify_zeros_phi_diff: need 1 <= k <= 8 and effective p <= 6, got k = {k}, p = {p}"
        )));
    }
    let q = iterate_polys(d.verblunsky(), k * p);
    let diff = q.monic_phi().sub(&q.monic_phi_star());
    let roots = diff.roots()?;
    let tol = T::of(1e-6);
    let res_scale = T::one()
        + d.phi_diff
            .coeffs()
            .iter()
            .fold(T::zero(), |acc, cc| acc + cc.norm());
    // max |U_{k-1}'| on [-1,1] is (k-1)k(k+1)/3
    let kk = T::of(k as f64);
    let cheb_scale = ((kk - T::one()) * kk * (kk + T::one()) / T::of(3.0)).max(T::one());
    let mut out = Vec::with_capacity(roots.len());
    for root in roots {
        let res_residual = d.phi_diff.eval(root).norm();
        let x = d.delta_at(root)? * cr(T::of(0.5));
        let cheb_residual = cheb_u(k as i64 - 1, x).norm();
        let is_res = res_residual <= tol * res_scale;
        let is_cheb = cheb_residual <= tol * cheb_scale;
        let label = match (is_res, is_cheb) {
            (true, true) => ZeroLabel::Both,
            (true, false) => ZeroLabel::Resonance,
            (false, true) => ZeroLabel::ChebPreimage,
            (false, false) => {
                return Err(Error::PropertyViolation(format!(
                    "classify_zeros_phi_diff: root {root} of Phi_{{kp}} - Phi_{{kp}}^* is neither \
                     a resonance (residual {res_residual:e}) nor a U_{{k-1}} preimage (residual {cheb_residual:e})"
                )))
            }
        };
        out.push(ZeroClassification {
            root,
            label,
            resonance_residual: res_residual,
            cheb_residual,
        });
    }
    Ok(out)
}

/// lim_k phi_{kp+s}/phi_{kp+s+1} for z off the bands: j_s/j_{s+1} for
/// s < p-1 and j_{p-1}/(z^{p/2} Gamma_+ j_0) at the index rollover.
pub fn ratio_asymptotic<T: Scalar>(
    d: &Discriminant<T>,
    s: usize,
    z: Complex<T>,
) -> Result<Complex<T>> {
    let p = d.p();
    if s >= p {
        return Err(Error::InvalidArgument(format!(
            "ratio_asymptotic: s = {s} must be below the effective period {p}"
        )));
    }
    let (js, _) = szego_asymptotics(d, s, z)?;
    let denom = if s + 1 < p {
        szego_asymptotics(d, s + 1, z)?.0
    } else {
        let (gp, _) = gamma_pm(d, z)?;
        let (j0, _) = szego_asymptotics(d, 0, z)?;
        cpowi(z, (p / 2) as i64) * gp * j0
    };
    if denom.norm() <= T::of(1e-12) * (T::one() + js.norm()) {
        return Err(Error::Domain(format!(
            "ratio_asymptotic: the next limit function vanishes at z = {z} (singular point; see the singular-point scanner)"
        )));
    }
    Ok(js / denom)
}
