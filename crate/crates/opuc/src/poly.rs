//! Dense complex polynomials and Laurent polynomials: evaluation,
//! derivative, reversal-star and root finding. Substrate for every other
//! module.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cr, Scalar};

/// Relative threshold below which trailing coefficients are treated as zero
/// when determining the degree (double-precision noise floor).
pub const TRIM_REL_TOL: f64 = 1e-14;

/// Dense complex polynomial; `coeffs[j]` is the coefficient of z^j.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPoly<T: Scalar> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexPoly<T> {
    pub fn new(coeffs: Vec<Complex<T>>) -> Self {
        let mut p = Self { coeffs };
        if p.coeffs.is_empty() {
            p.coeffs.push(Complex::new(T::zero(), T::zero()));
        }
        p
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn one() -> Self {
        Self::new(vec![cr(T::one())])
    }

    /// The monomial z^k.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex::new(T::zero(), T::zero()); k + 1];
        c[k] = cr(T::one());
        Self::new(c)
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        let mut p = Self::one();
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, cr(T::one())]));
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex<T> {
        self.coeffs
            .get(j)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn max_coeff_norm(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// Degree after trimming coefficients below `TRIM_REL_TOL` relative to
    /// the largest one. `None` for the (numerically) zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let scale = self.max_coeff_norm();
        if scale == T::zero() {
            return None;
        }
        let tol = scale * T::of(TRIM_REL_TOL);
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Naive power-sum evaluation; independent oracle for `eval`.
    pub fn eval_naive(&self, z: Complex<T>) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        let mut zp = cr(T::one());
        for &c in &self.coeffs {
            acc += c * zp;
            zp *= z;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| c * cr(T::of(j as f64)))
            .collect();
        Self::new(coeffs)
    }

    /// Reversal-star at degree n: coefficient j of the result is the
    /// conjugate of coefficient n-j of `self`. Errors if degree(self) > n.
    pub fn star(&self, n: usize) -> Result<Self> {
        if let Some(d) = self.degree() {
            if d > n {
                return Err(Error::InvalidArgument(format!(
                    "star: polynomial degree {d} exceeds requested degree {n}"
                )));
            }
        }
        let coeffs = (0..=n).map(|j| self.coeff(n - j).conj()).collect();
        Ok(Self::new(coeffs))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|j| self.coeff(j) + other.coeff(j)).collect();
        Self::new(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|j| self.coeff(j) - other.coeff(j)).collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Multiply by z^m.
    pub fn shift_up(&self, m: usize) -> Self {
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); m];
        coeffs.extend_from_slice(&self.coeffs);
        Self::new(coeffs)
    }

    /// All complex roots with multiplicity, by Aberth-Ehrlich iteration with
    /// Newton polish. Residual contract:
    /// |P(root)| <= 1e-8 * max|coeff| * max(1,|root|)^deg.
    pub fn roots(&self) -> Result<Vec<Complex<T>>> {
        let scale = self.max_coeff_norm();
        let deg = self.degree().ok_or_else(|| {
            Error::InvalidArgument("roots: zero polynomial".to_string())
        })?;
        if deg < 1 {
            return Err(Error::InvalidArgument(
                "roots: degree must be at least 1 after trimming".to_string(),
            ));
        }

        // Trimmed working copy, normalized to a monic polynomial.
        let tol = scale * T::of(TRIM_REL_TOL);
        let mut work: Vec<Complex<T>> = self.coeffs[..=deg].to_vec();
        for c in work.iter_mut() {
            if c.norm() <= tol {
                *c = Complex::new(T::zero(), T::zero());
            }
        }
        let lead = work[deg];
        for c in work.iter_mut() {
            *c /= lead;
        }

        // Factor out roots at the origin.
        let mut zeros_at_origin = 0usize;
        while zeros_at_origin < deg && work[zeros_at_origin].norm() == T::zero() {
            zeros_at_origin += 1;
        }
        let mut roots = vec![Complex::new(T::zero(), T::zero()); zeros_at_origin];
        let work = &work[zeros_at_origin..];
        let n = work.len() - 1;
        if n == 0 {
            return Ok(roots);
        }

        let poly = ComplexPoly::new(work.to_vec());
        let dpoly = poly.derivative();

        // Cauchy-style inclusion radius for the initial circle of guesses.
        let mut radius = T::zero();
        for c in &work[..n] {
            radius = radius.max(c.norm());
        }
        let radius = T::one() + radius;
        let offset = T::of(0.40);
        let mut zs: Vec<Complex<T>> = (0..n)
            .map(|k| {
                let ang = T::TAU() * T::of(k as f64) / T::of(n as f64) + offset;
                Complex::new(ang.cos(), ang.sin()) * cr(radius)
            })
            .collect();

        let step_tol = T::epsilon() * T::of(4.0);
        for _ in 0..200 {
            let mut max_step = T::zero();
            for i in 0..n {
                let pz = poly.eval(zs[i]);
                let dz = dpoly.eval(zs[i]);
                if pz.norm() == T::zero() {
                    continue;
                }
                let newton = if dz.norm() > T::zero() {
                    pz / dz
                } else {
                    // Derivative vanished at the iterate; nudge off it.
                    zs[i] += Complex::new(T::of(1e-6), T::of(1e-6));
                    continue;
                };
                let mut repulse = Complex::new(T::zero(), T::zero());
                for j in 0..n {
                    if j != i {
                        let d = zs[i] - zs[j];
                        if d.norm() > T::zero() {
                            repulse += Complex::new(T::one(), T::zero()) / d;
                        }
                    }
                }
                let denom = Complex::new(T::one(), T::zero()) - newton * repulse;
                let w = if denom.norm() > T::of(1e-30) {
                    newton / denom
                } else {
                    newton
                };
                zs[i] -= w;
                max_step = max_step.max(w.norm() / (T::one() + zs[i].norm()));
            }
            if max_step <= step_tol {
                break;
            }
        }

        // Newton polish.
        for z in zs.iter_mut() {
            for _ in 0..3 {
                let pz = poly.eval(*z);
                let dz = dpoly.eval(*z);
                if dz.norm() > T::zero() {
                    let step = pz / dz;
                    if step.norm() < T::one() {
                        *z -= step;
                    }
                }
            }
        }

        // Residual contract check against the original coefficients.
        let res_tol = T::of(1e-8).max(T::epsilon() * T::of(100.0));
        for &z in &zs {
            let bound = scale * res_tol * z.norm().max(T::one()).powi(deg as i32);
            let res = self.eval(z).norm();
            if !(res <= bound) {
                return Err(Error::Numeric(format!(
                    "roots: residual {res:e} at root {z} exceeds contract bound {bound:e}"
                )));
            }
        }
        roots.extend(zs);
        Ok(roots)
    }
}

/// Finite Laurent polynomial; exponents may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly<T: Scalar> {
    coeffs: BTreeMap<i64, Complex<T>>,
}

impl<T: Scalar> LaurentPoly<T> {
    pub fn new(coeffs: BTreeMap<i64, Complex<T>>) -> Self {
        Self { coeffs }
    }

    /// Embed a polynomial shifted by z^shift.
    pub fn from_poly(p: &ComplexPoly<T>, shift: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for (j, &c) in p.coeffs().iter().enumerate() {
            if c.norm() > T::zero() {
                coeffs.insert(j as i64 + shift, c);
            }
        }
        Self { coeffs }
    }

    pub fn coeff(&self, j: i64) -> Complex<T> {
        self.coeffs
            .get(&j)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex<T>> {
        &self.coeffs
    }

    pub fn min_exp(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(0)
    }

    pub fn max_exp(&self) -> i64 {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    pub fn max_coeff_norm(&self) -> T {
        self.coeffs
            .values()
            .fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// Evaluate at z. Errors at z = 0 when negative exponents are present.
    pub fn eval(&self, z: Complex<T>) -> Result<Complex<T>> {
        if self.min_exp() < 0 && z.norm() == T::zero() {
            return Err(Error::Domain(
                "Laurent polynomial with negative exponents evaluated at z = 0".to_string(),
            ));
        }
        if self.coeffs.is_empty() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        // Horner over the dense exponent range, then shift by z^min.
        let lo = self.min_exp();
        let hi = self.max_exp();
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in (lo..=hi).rev() {
            acc = acc * z + self.coeff(j);
        }
        Ok(acc * z.powi(lo as i32))
    }

    /// d/dz.
    pub fn derivative(&self) -> Self {
        let mut coeffs = BTreeMap::new();
        for (&j, &c) in &self.coeffs {
            if j != 0 {
                coeffs.insert(j - 1, c * cr(T::of(j as f64)));
            }
        }
        Self { coeffs }
    }

    /// Evaluate (d/dtheta)^m of theta -> L(e^{i theta}); m = 0 is the value
    /// itself. Each derivative multiplies the j-th coefficient by (i j).
    pub fn theta_deriv_eval(&self, m: u32, theta: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (&j, &c) in &self.coeffs {
            let jj = T::of(j as f64);
            let ij = Complex::new(T::zero(), jj);
            let phase = Complex::new((jj * theta).cos(), (jj * theta).sin());
            let mut term = c * phase;
            for _ in 0..m {
                term *= ij;
            }
            acc += term;
        }
        acc
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs: BTreeMap<i64, Complex<T>> = BTreeMap::new();
        for (&i, &a) in &self.coeffs {
            for (&j, &b) in &other.coeffs {
                *coeffs
                    .entry(i + j)
                    .or_insert_with(|| Complex::new(T::zero(), T::zero())) += a * b;
            }
        }
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&j, &b) in &other.coeffs {
            *coeffs
                .entry(j)
                .or_insert_with(|| Complex::new(T::zero(), T::zero())) += b;
        }
        Self { coeffs }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&j, &c)| (j, c * s)).collect(),
        }
    }

    /// Multiply by z^m (m may be negative).
    pub fn shift(&self, m: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(&j, &c)| (j + m, c)).collect(),
        }
    }

    /// Convert to an ordinary polynomial, asserting that all negative-power
    /// coefficients cancel to within `tol` times the largest coefficient.
    pub fn to_poly(&self, tol: T) -> Result<ComplexPoly<T>> {
        let scale = self.max_coeff_norm().max(T::one());
        let mut worst = T::zero();
        for (&j, &c) in &self.coeffs {
            if j < 0 {
                worst = worst.max(c.norm());
            }
        }
        if worst > tol * scale {
            return Err(Error::Consistency(format!(
                "Laurent-to-polynomial reduction: residual negative-power coefficient {:e} exceeds {:e}",
                worst, tol * scale
            )));
        }
        let hi = self.max_exp().max(0);
        let coeffs = (0..=hi).map(|j| self.coeff(j)).collect();
        Ok(ComplexPoly::new(coeffs))
    }
}
