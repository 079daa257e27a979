//! Szego recursion engine: monic and orthonormal first- and second-kind
//! polynomials for a periodic Verblunsky sequence. Every closed form in the
//! rest of the crate is tested against this oracle.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::poly::ComplexPoly;
use crate::scalar::{cr, Scalar};

/// One period of Verblunsky coefficients, all strictly inside the unit disk.
#[derive(Debug, Clone, PartialEq)]
pub struct VerblunskyPeriod<T: Scalar> {
    alphas: Vec<Complex<T>>,
}

impl<T: Scalar> VerblunskyPeriod<T> {
    pub fn new(alphas: Vec<Complex<T>>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidArgument(
                "VerblunskyPeriod: the coefficient list must be nonempty".to_string(),
            ));
        }
        for (j, a) in alphas.iter().enumerate() {
            if !(a.norm() < T::one()) {
                return Err(Error::InvalidArgument(format!(
                    "VerblunskyPeriod: |alpha_{j}| = {} must be strictly less than 1",
                    a.norm()
                )));
            }
        }
        Ok(Self { alphas })
    }

    /// All coefficients zero (the free case, Lebesgue measure).
    pub fn free(p: usize) -> Self {
        Self {
            alphas: vec![Complex::new(T::zero(), T::zero()); p.max(1)],
        }
    }

    /// Parse from a JSON array of [re, im] pairs.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let pairs: Vec<[f64; 2]> = serde_json::from_str(s).map_err(|e| {
            Error::InvalidArgument(format!("alphas: expected a JSON array of [re, im] pairs: {e}"))
        })?;
        let alphas = pairs
            .iter()
            .map(|&[re, im]| Complex::new(T::of(re), T::of(im)))
            .collect();
        Self::new(alphas)
    }

    pub fn p(&self) -> usize {
        self.alphas.len()
    }

    /// Even working period: p if p is even, else 2p (a period-p sequence is
    /// also a period-2p sequence, and z^{p/2} must be an integer power).
    pub fn effective_p(&self) -> usize {
        if self.alphas.len() % 2 == 0 {
            self.alphas.len()
        } else {
            2 * self.alphas.len()
        }
    }

    pub fn alphas(&self) -> &[Complex<T>] {
        &self.alphas
    }

    /// alpha_n for any n >= 0, extended periodically.
    pub fn alpha(&self, n: usize) -> Complex<T> {
        self.alphas[n % self.alphas.len()]
    }

    /// prod sqrt(1 - |alpha_j|^2) over one (original) period.
    pub fn r(&self) -> T {
        self.alphas
            .iter()
            .fold(T::one(), |acc, a| acc * (T::one() - a.norm_sqr()).sqrt())
    }

    /// Same product over the effective (even) period.
    pub fn effective_r(&self) -> T {
        if self.alphas.len() % 2 == 0 {
            self.r()
        } else {
            self.r() * self.r()
        }
    }

    /// kappa_n = 1 / prod_{j<n} sqrt(1 - |alpha_j|^2), the orthonormalizing
    /// leading coefficient of phi_n.
    pub fn kappa(&self, n: usize) -> T {
        let mut acc = T::one();
        for j in 0..n {
            acc = acc * (T::one() - self.alpha(j).norm_sqr()).sqrt();
        }
        acc.recip()
    }

    pub fn is_free(&self) -> bool {
        self.alphas.iter().all(|a| a.norm() == T::zero())
    }

    /// The rotated sequence beta_n = e^{i (n+1) lambda} alpha_n. When
    /// lambda = 2 pi m / p the result is again periodic with period p and
    /// its orthonormal polynomials are phase-rotated evaluations of the
    /// originals.
    pub fn rotate(&self, lambda: T) -> Self {
        let alphas = self
            .alphas
            .iter()
            .enumerate()
            .map(|(n, &a)| {
                let ang = lambda * T::of((n + 1) as f64);
                a * Complex::new(ang.cos(), ang.sin())
            })
            .collect();
        Self { alphas }
    }
}

/// 2x2 one-step transfer matrix of the Szego recursion acting on
/// (Phi_n, Phi_n^*)^T.
#[derive(Debug, Clone, Copy)]
pub struct TransferMatrix<T: Scalar> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Scalar> TransferMatrix<T> {
    pub fn new(z: Complex<T>, alpha: Complex<T>) -> Self {
        Self {
            m: [[z, -alpha.conj()], [-alpha * z, Complex::new(T::one(), T::zero())]],
        }
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, v: (Complex<T>, Complex<T>)) -> (Complex<T>, Complex<T>) {
        (
            self.m[0][0] * v.0 + self.m[0][1] * v.1,
            self.m[1][0] * v.0 + self.m[1][1] * v.1,
        )
    }
}

/// Coefficient vectors of the four orthonormal polynomials at degree n.
/// `phi`/`phi_star` come from the recursion with alpha, `psi`/`psi_star`
/// from the recursion with -alpha; both share kappa_n.
#[derive(Debug, Clone)]
pub struct PolyQuad<T: Scalar> {
    pub n: usize,
    pub kappa: T,
    pub phi: ComplexPoly<T>,
    pub phi_star: ComplexPoly<T>,
    pub psi: ComplexPoly<T>,
    pub psi_star: ComplexPoly<T>,
}

impl<T: Scalar> PolyQuad<T> {
    pub fn monic_phi(&self) -> ComplexPoly<T> {
        self.phi.scale(cr(self.kappa.recip()))
    }
    pub fn monic_phi_star(&self) -> ComplexPoly<T> {
        self.phi_star.scale(cr(self.kappa.recip()))
    }
    pub fn monic_psi(&self) -> ComplexPoly<T> {
        self.psi.scale(cr(self.kappa.recip()))
    }
    pub fn monic_psi_star(&self) -> ComplexPoly<T> {
        self.psi_star.scale(cr(self.kappa.recip()))
    }
}

/// Iterate the Szego recursion on coefficient vectors up to degree n.
pub fn iterate_polys<T: Scalar>(v: &VerblunskyPeriod<T>, n: usize) -> PolyQuad<T> {
    let one = ComplexPoly::one();
    let mut phi = one.clone();
    let mut phi_star = one.clone();
    let mut psi = one.clone();
    let mut psi_star = one;
    for j in 0..n {
        let a = v.alpha(j);
        let next_phi = phi.shift_up(1).sub(&phi_star.scale(a.conj()));
        let next_phi_star = phi_star.sub(&phi.shift_up(1).scale(a));
        phi = next_phi;
        phi_star = next_phi_star;
        let next_psi = psi.shift_up(1).sub(&psi_star.scale(-a.conj()));
        let next_psi_star = psi_star.sub(&psi.shift_up(1).scale(-a));
        psi = next_psi;
        psi_star = next_psi_star;
    }
    let kappa = v.kappa(n);
    let k = cr(kappa);
    PolyQuad {
        n,
        kappa,
        phi: phi.scale(k),
        phi_star: phi_star.scale(k),
        psi: psi.scale(k),
        psi_star: psi_star.scale(k),
    }
}

/// Pointwise values of the four orthonormal polynomials at z.
#[derive(Debug, Clone, Copy)]
pub struct QuadValues<T: Scalar> {
    pub phi: Complex<T>,
    pub phi_star: Complex<T>,
    pub psi: Complex<T>,
    pub psi_star: Complex<T>,
}

/// Incremental pointwise Szego recursion at a fixed z: after `advance` has
/// been called n times the values are those of degree n. Each step applies
/// the transfer matrix and divides by sqrt(1 - |alpha_n|^2) so the values
/// stay orthonormal throughout.
#[derive(Debug, Clone)]
pub struct QuadRecursion<'a, T: Scalar> {
    v: &'a VerblunskyPeriod<T>,
    z: Complex<T>,
    n: usize,
    phi: (Complex<T>, Complex<T>),
    psi: (Complex<T>, Complex<T>),
}

impl<'a, T: Scalar> QuadRecursion<'a, T> {
    pub fn new(v: &'a VerblunskyPeriod<T>, z: Complex<T>) -> Self {
        let one = Complex::new(T::one(), T::zero());
        Self {
            v,
            z,
            n: 0,
            phi: (one, one),
            psi: (one, one),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> QuadValues<T> {
        QuadValues {
            phi: self.phi.0,
            phi_star: self.phi.1,
            psi: self.psi.0,
            psi_star: self.psi.1,
        }
    }

    pub fn advance(&mut self) {
        let a = self.v.alpha(self.n);
        let rho = (T::one() - a.norm_sqr()).sqrt();
        let inv = cr(rho.recip());
        let tp = TransferMatrix::new(self.z, a);
        let p = tp.apply(self.phi);
        self.phi = (p.0 * inv, p.1 * inv);
        let tm = TransferMatrix::new(self.z, -a);
        let q = tm.apply(self.psi);
        self.psi = (q.0 * inv, q.1 * inv);
        self.n += 1;
    }
}

/// Orthonormal (phi_n, phi_n^*, psi_n, psi_n^*) at z by an O(n) pointwise
/// transfer-matrix recursion.
pub fn eval_quad_at<T: Scalar>(v: &VerblunskyPeriod<T>, n: usize, z: Complex<T>) -> QuadValues<T> {
    let mut rec = QuadRecursion::new(v, z);
    for _ in 0..n {
        rec.advance();
    }
    rec.values()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit(theta: f64) -> Complex64 {
        Complex64::new(theta.cos(), theta.sin())
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
    }

    #[test]
    fn rejects_alpha_on_or_outside_circle() {
        let err = VerblunskyPeriod::<f64>::new(vec![c(0.1, 0.0), c(1.0, 0.0)]);
        match err {
            Err(Error::InvalidArgument(msg)) => assert!(msg.contains("alpha_1"), "{msg}"),
            other => panic!("expected invalid-argument error, got {other:?}"),
        }
    }

    #[test]
    fn free_case_polys_are_monomials() {
        let v = VerblunskyPeriod::<f64>::free(2);
        let q = iterate_polys(&v, 5);
        for j in 0..5 {
            assert_eq!(q.phi.coeff(j), c(0.0, 0.0));
            assert_eq!(q.psi.coeff(j), c(0.0, 0.0));
        }
        assert!(close(q.phi.coeff(5), c(1.0, 0.0), 1e-15));
        assert!(close(q.psi.coeff(5), c(1.0, 0.0), 1e-15));
        assert!(close(q.phi_star.coeff(0), c(1.0, 0.0), 1e-15));
        assert!(close(q.psi_star.coeff(0), c(1.0, 0.0), 1e-15));
        assert_eq!(q.phi_star.degree(), Some(0));
    }

    #[test]
    fn one_step_monic_recursion() {
        let v = VerblunskyPeriod::new(vec![c(0.5, 0.0)]).unwrap();
        let q = iterate_polys(&v, 1);
        let phi1 = q.monic_phi();
        let psi1 = q.monic_psi();
        assert!(close(phi1.coeff(0), c(-0.5, 0.0), 1e-15));
        assert!(close(phi1.coeff(1), c(1.0, 0.0), 1e-15));
        assert!(close(psi1.coeff(0), c(0.5, 0.0), 1e-15));
        assert!(close(psi1.coeff(1), c(1.0, 0.0), 1e-15));
        // Phi_{n+1}(0) = -conj(alpha_n)
        assert!(close(q.monic_phi().coeff(0), -c(0.5, 0.0).conj(), 1e-15));
    }

    #[test]
    fn transfer_matrix_determinant() {
        let z = c(0.7, -0.4);
        let a = c(0.3, 0.2);
        let tm = TransferMatrix::new(z, a);
        let want = z * c(1.0 - (0.3f64 * 0.3 + 0.2 * 0.2), 0.0);
        assert!(close(tm.det(), want, 1e-12));
    }

    #[test]
    fn eval_quad_matches_iterated_coefficients() {
        // Independent routes: coefficient recursion + Horner vs pointwise
        // transfer-matrix products.
        let v = VerblunskyPeriod::new(vec![c(0.3, 0.1), c(-0.2, 0.0)]).unwrap();
        let q = iterate_polys(&v, 7);
        for z in [c(0.9, 0.4), unit(1.0), c(-1.3, 0.2)] {
            let vals = eval_quad_at(&v, 7, z);
            assert!(close(vals.phi, q.phi.eval(z), 1e-10));
            assert!(close(vals.phi_star, q.phi_star.eval(z), 1e-10));
            assert!(close(vals.psi, q.psi.eval(z), 1e-10));
            assert!(close(vals.psi_star, q.psi_star.eval(z), 1e-10));
        }
    }

    #[test]
    fn eval_quad_free_case_and_degree_zero() {
        let v = VerblunskyPeriod::<f64>::free(2);
        let vals = eval_quad_at(&v, 4, c(2.0, 0.0));
        assert!(close(vals.phi, c(16.0, 0.0), 1e-12));
        assert!(close(vals.phi_star, c(1.0, 0.0), 1e-12));
        assert!(close(vals.psi, c(16.0, 0.0), 1e-12));
        assert!(close(vals.psi_star, c(1.0, 0.0), 1e-12));

        let v = VerblunskyPeriod::new(vec![c(0.4, -0.3)]).unwrap();
        let vals = eval_quad_at(&v, 0, c(0.3, 0.8));
        for val in [vals.phi, vals.phi_star, vals.psi, vals.psi_star] {
            assert_eq!(val, c(1.0, 0.0));
        }
    }

    #[test]
    fn eval_quad_period_one_doubled_matches_iterate() {
        let alpha = c(-0.25, 0.4330127);
        let v = VerblunskyPeriod::new(vec![alpha]).unwrap();
        assert_eq!(v.effective_p(), 2);
        let z = unit(1.0);
        let q = iterate_polys(&v, 6);
        let vals = eval_quad_at(&v, 6, z);
        assert!(close(vals.phi, q.phi.eval(z), 1e-10));
        assert!(close(vals.psi_star, q.psi_star.eval(z), 1e-10));
    }

    #[test]
    fn leading_coefficient_is_kappa() {
        let v = VerblunskyPeriod::new(vec![c(0.3, 0.1), c(-0.2, 0.0), c(0.0, 0.55)]).unwrap();
        for n in [1usize, 4, 9] {
            let q = iterate_polys(&v, n);
            let lead = q.phi.coeff(n);
            assert!(
                (lead.re - v.kappa(n)).abs() <= 1e-12 * v.kappa(n) && lead.im.abs() <= 1e-12,
                "n={n} lead={lead}"
            );
        }
    }

    #[test]
    fn wronskian_identity_on_circle() {
        // psi*_n phi_n + psi_n phi*_n = 2 z^n
        let v = VerblunskyPeriod::new(vec![c(0.3, 0.1), c(-0.2, 0.0), c(0.1, -0.4), c(0.2, 0.2)])
            .unwrap();
        for n in [1usize, 7, 40, 100] {
            for th in [0.3f64, 2.1, 4.9] {
                let z = unit(th);
                let vals = eval_quad_at(&v, n, z);
                let lhs = vals.psi_star * vals.phi + vals.psi * vals.phi_star;
                let rhs = crate::cheb::cpowi(z, n as i64) * c(2.0, 0.0);
                assert!(close(lhs, rhs, 1e-9), "n={n} th={th}");
            }
        }
    }

    #[test]
    fn star_reflection_matches_recursion() {
        let v = VerblunskyPeriod::new(vec![c(0.35, -0.2), c(0.1, 0.5)]).unwrap();
        for n in [1usize, 3, 8] {
            let q = iterate_polys(&v, n);
            let starred = q.phi.star(n).unwrap();
            for j in 0..=n {
                assert!(
                    (starred.coeff(j) - q.phi_star.coeff(j)).norm() <= 1e-12 * (1.0 + q.kappa),
                    "n={n} j={j}"
                );
            }
        }
    }

    #[test]
    fn modulus_identity_on_circle() {
        // |phi_n| = |phi_n^*| on |z| = 1
        let v = VerblunskyPeriod::new(vec![c(0.6, 0.1), c(0.0, -0.35)]).unwrap();
        for th in [0.0f64, 1.234, 3.5, 5.9] {
            let vals = eval_quad_at(&v, 9, unit(th));
            assert!((vals.phi.norm() - vals.phi_star.norm()).abs() <= 1e-10 * vals.phi.norm());
        }
    }

    #[test]
    fn from_json_parses_pairs() {
        let v = VerblunskyPeriod::<f64>::from_json_str("[[0.3, 0.1], [-0.2, 0.0]]").unwrap();
        assert_eq!(v.p(), 2);
        assert!(close(v.alpha(0), c(0.3, 0.1), 1e-15));
        assert!(VerblunskyPeriod::<f64>::from_json_str("[[1.5, 0.0]]").is_err());
        assert!(VerblunskyPeriod::<f64>::from_json_str("not json").is_err());
    }
}
