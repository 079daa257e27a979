//! Chebyshev polynomials of the second kind U_n for complex arguments,
//! with method selection that keeps each formula inside its
//! well-conditioned region, plus normalized variants that stay finite
//! where raw U_n values would overflow.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cr, Scalar};

/// Which formula produced a Chebyshev value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChebMethod {
    /// Three-term recurrence (used for small n, valid everywhere).
    Recurrence,
    /// sin((n+1) t)/sin(t) with t = arccos(x), including the Taylor limit
    /// at x near +-1.
    Trig,
    /// ((x+s)^{n+1} - (x+s)^{-(n+1)})/(2 s) with s = sqrt(x^2-1) chosen so
    /// |x+s| >= 1.
    Hyperbolic,
}

/// A single evaluation of U_n(x) together with the method that produced it.
#[derive(Debug, Clone, Copy)]
pub struct ChebEval<T: Scalar> {
    pub n: i64,
    pub x: Complex<T>,
    pub value: Complex<T>,
    pub method: ChebMethod,
}

/// Proximity of x to the segment [-1,1] below which the trig form is used.
const TRIG_BAND: f64 = 1e-8;
/// Proximity to +-1 below which the Taylor limit is used.
const EDGE_BAND: f64 = 1e-6;
/// Largest n for which the recurrence is used directly.
const RECURRENCE_MAX_N: i64 = 64;

/// Integer power by binary exponentiation (keeps rounding growth at
/// O(log n) instead of the polar-form powf path).
pub(crate) fn cpow<T: Scalar>(w: Complex<T>, n: u64) -> Complex<T> {
    let mut base = w;
    let mut e = n;
    let mut acc = Complex::new(T::one(), T::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Signed integer power of a complex number.
pub(crate) fn cpowi<T: Scalar>(w: Complex<T>, n: i64) -> Complex<T> {
    if n >= 0 {
        cpow(w, n as u64)
    } else {
        Complex::new(T::one(), T::zero()) / cpow(w, (-n) as u64)
    }
}

fn u_recurrence<T: Scalar>(n: i64, x: Complex<T>) -> Complex<T> {
    let mut prev = Complex::new(T::zero(), T::zero()); // U_{-1}
    let mut cur = Complex::new(T::one(), T::zero()); // U_0
    let two_x = x * cr(T::of(2.0));
    for _ in 0..n {
        let next = two_x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn u_trig<T: Scalar>(n: i64, x: Complex<T>) -> Complex<T> {
    let t = x.acos();
    let np1 = cr::<T>(T::of((n + 1) as f64));
    (t * np1).sin() / t.sin()
}

fn u_edge_taylor<T: Scalar>(n: i64, x: Complex<T>) -> Complex<T> {
    let nf = T::of(n as f64);
    let np1 = T::of((n + 1) as f64);
    // U_n'(1) = n(n+1)(n+2)/3; first-order expansion around the endpoint.
    let slope = nf * (nf + T::of(2.0)) / T::of(3.0);
    if (x - cr(T::one())).norm() < (x + cr(T::one())).norm() {
        let eps = x - cr(T::one());
        cr(np1) * (Complex::new(T::one(), T::zero()) + eps * cr(slope))
    } else {
        let eps = x + cr(T::one());
        let sign = if n % 2 == 0 { T::one() } else { -T::one() };
        cr(sign * np1) * (Complex::new(T::one(), T::zero()) - eps * cr(slope))
    }
}

/// sqrt(x^2 - 1) with the branch fixed by |x + s| >= 1 (so that x + s is
/// the large root Gamma_+ of w^2 - 2xw + 1).
pub(crate) fn sqrt_x2m1_large_branch<T: Scalar>(x: Complex<T>) -> Complex<T> {
    let s = (x * x - Complex::new(T::one(), T::zero())).sqrt();
    if (x + s).norm() >= (x - s).norm() {
        s
    } else {
        -s
    }
}

fn u_hyperbolic<T: Scalar>(n: i64, x: Complex<T>) -> Complex<T> {
    let s = sqrt_x2m1_large_branch(x);
    let w = x + s;
    // |w|^{n+1} past f64 range: saturate to a directionless infinity
    // instead of letting inf - 1/inf produce NaN.
    if T::of((n + 1) as f64) * w.norm().ln() > T::of(700.0) {
        return Complex::new(T::infinity(), T::infinity());
    }
    // w - 1/w = 2 s exactly, so the denominator is cancellation-free.
    let wp = cpow(w, (n + 1) as u64);
    (wp - wp.inv()) / (s * cr(T::of(2.0)))
}

fn near_segment<T: Scalar>(x: Complex<T>) -> bool {
    x.im.abs() <= T::of(TRIG_BAND) && x.re.abs() <= T::one() + T::of(TRIG_BAND)
}

fn near_edge<T: Scalar>(x: Complex<T>) -> bool {
    (x - cr(T::one())).norm() < T::of(EDGE_BAND) || (x + cr(T::one())).norm() < T::of(EDGE_BAND)
}

/// U_n(x) with the method label; n >= -1 (U_{-1} = 0).
pub fn cheb_u_eval<T: Scalar>(n: i64, x: Complex<T>) -> ChebEval<T> {
    let (value, method) = if n <= 0 {
        let v = if n < 0 {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(T::one(), T::zero())
        };
        (v, ChebMethod::Recurrence)
    } else if n <= RECURRENCE_MAX_N {
        (u_recurrence(n, x), ChebMethod::Recurrence)
    } else if near_edge(x) {
        (u_edge_taylor(n, x), ChebMethod::Trig)
    } else if near_segment(x) {
        (u_trig(n, x), ChebMethod::Trig)
    } else {
        (u_hyperbolic(n, x), ChebMethod::Hyperbolic)
    };
    ChebEval { n, x, value, method }
}

/// U_n(x); n >= -1 with U_{-1} = 0.
pub fn cheb_u<T: Scalar>(n: i64, x: Complex<T>) -> Complex<T> {
    cheb_u_eval(n, x).value
}

/// (U_k(x), U_{k-1}(x)) computed with a shared method so the pair is
/// consistent. k >= 0.
pub fn cheb_u_pair<T: Scalar>(k: i64, x: Complex<T>) -> (Complex<T>, Complex<T>) {
    if k <= RECURRENCE_MAX_N {
        let mut prev = Complex::new(T::zero(), T::zero());
        let mut cur = Complex::new(T::one(), T::zero());
        let two_x = x * cr(T::of(2.0));
        for _ in 0..k {
            let next = two_x * cur - prev;
            prev = cur;
            cur = next;
        }
        (cur, prev)
    } else if near_edge(x) || near_segment(x) {
        (cheb_u(k, x), cheb_u(k - 1, x))
    } else {
        let s = sqrt_x2m1_large_branch(x);
        let w = x + s;
        if T::of((k + 1) as f64) * w.norm().ln() > T::of(700.0) {
            let inf = Complex::new(T::infinity(), T::infinity());
            return (inf, inf);
        }
        let wk = cpow(w, k as u64);
        let wk1 = wk * w;
        let two_s = s * cr(T::of(2.0));
        ((wk1 - wk1.inv()) / two_s, (wk - wk.inv()) / two_s)
    }
}

/// Explicit binomial sum for U_n; test oracle only (n <= 40 so the
/// binomials stay exact in double precision).
pub fn cheb_u_sum_form<T: Scalar>(n: u32, x: Complex<T>) -> Result<Complex<T>> {
    if n > 40 {
        return Err(Error::InvalidArgument(format!(
            "cheb_u_sum_form: n = {n} exceeds the overflow guard 40"
        )));
    }
    let two_x = x * cr(T::of(2.0));
    let mut acc = Complex::new(T::zero(), T::zero());
    for j in 0..=(n / 2) {
        // C(n - j, j)
        let mut binom = 1.0f64;
        for i in 0..j {
            binom = binom * ((n - j - i) as f64) / ((i + 1) as f64);
        }
        let sign = if j % 2 == 0 { T::one() } else { -T::one() };
        acc += cr(sign * T::of(binom)) * cpow(two_x, (n - 2 * j) as u64);
    }
    Ok(acc)
}

/// Partial sum of the generating series sum_{n=0}^{N} U_n(x) t^n, which
/// converges to 1/(1 - 2 x t + t^2) inside the guard region. The guard
/// uses |x| + sqrt(|x|^2 + 1), an upper bound for the large root of
/// w^2 - 2xw + 1 and hence for limsup |U_n(x)|^{1/n}.
pub fn cheb_generating_series<T: Scalar>(
    x: Complex<T>,
    t: Complex<T>,
    n_terms: usize,
) -> Result<Complex<T>> {
    let growth = t.norm() * (x.norm() + (x.norm() * x.norm() + T::one()).sqrt());
    if !(growth < T::of(0.99)) {
        return Err(Error::Domain(format!(
            "cheb_generating_series: |t| (|x| + sqrt(|x|^2+1)) = {growth} violates the < 0.99 convergence guard"
        )));
    }
    let two_x = x * cr(T::of(2.0));
    let mut prev = Complex::new(T::zero(), T::zero());
    let mut cur = Complex::new(T::one(), T::zero());
    let mut tp = Complex::new(T::one(), T::zero());
    let mut acc = Complex::new(T::zero(), T::zero());
    for _ in 0..=n_terms {
        acc += cur * tp;
        tp *= t;
        let next = two_x * cur - prev;
        prev = cur;
        cur = next;
    }
    Ok(acc)
}

/// (U_k / gamma^k, U_{k-1} / gamma^k) where gamma is the large root of
/// w^2 - 2 x w + 1 = 0 (so x = (gamma + 1/gamma)/2). The normalized
/// two-term recurrence never overflows for |gamma| >= 1.
pub fn cheb_u_ratio_pair<T: Scalar>(k: u32, gamma: Complex<T>) -> (Complex<T>, Complex<T>) {
    let g2inv = (gamma * gamma).inv();
    let a = Complex::new(T::one(), T::zero()) + g2inv;
    // u_j = U_j / gamma^j:  u_{j+1} = (1 + gamma^{-2}) u_j - gamma^{-2} u_{j-1}
    let mut prev = Complex::new(T::zero(), T::zero()); // u_{-1} (any finite value; weight 0 at j=0)
    let mut cur = Complex::new(T::one(), T::zero()); // u_0
    for _ in 0..k {
        let next = a * cur - g2inv * prev;
        prev = cur;
        cur = next;
    }
    // prev = u_{k-1} = U_{k-1}/gamma^{k-1}; rescale so both carry gamma^k.
    (cur, prev / gamma)
}
