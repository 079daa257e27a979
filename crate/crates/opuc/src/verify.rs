//! The cross-check suite behind the `verify` CLI subcommand: runs the
//! oracle equivalences, kernel agreement, Wall/Schur properties and the
//! closed-form identities on a given or randomized coefficient set and
//! reports per-property residual maxima.

use num_complex::Complex64;

use crate::cheb::cpowi;
use crate::equilibrium::band_cdf;
use crate::kernels::{cd_kernel_direct, cd_kernel_fast};
use crate::periodic::{band_structure, closed_form_phi, Discriminant};
use crate::poly::ComplexPoly;
use crate::schur::{
    caratheodory_f, cheb_period_identity_residual, generating_function_residual, schur_f,
    wall_polys, wall_polys_with_psi_scale,
};
use crate::szego::{eval_quad_at, iterate_polys, VerblunskyPeriod};

/// Outcome of one verified property.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PropertyResult {
    pub name: String,
    /// The measured residual (or bound-violation) maximum.
    pub residual: f64,
    /// The documented tolerance it must stay below.
    pub tolerance: f64,
    pub pass: bool,
    /// Worst-case input, serialized for replay, when the property failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_case: Option<String>,
}

impl PropertyResult {
    fn new(name: &str, residual: f64, tolerance: f64, failing_case: Option<String>) -> Self {
        let pass = residual <= tolerance;
        Self {
            name: name.to_string(),
            residual,
            tolerance,
            pass,
            failing_case: if pass { None } else { failing_case },
        }
    }
}

/// Deterministic 64-bit generator (SplitMix64), platform-independent so
/// reports are byte-stable for a given seed.
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// A random period of the requested length with |alpha_j| <= 0.65.
pub fn random_verblunsky(seed: u64, p: usize) -> VerblunskyPeriod<f64> {
    let mut rng = SplitMix64::new(seed);
    let alphas = (0..p.max(1))
        .map(|_| {
            let radius = rng.range(0.05, 0.65);
            let angle = rng.range(0.0, std::f64::consts::TAU);
            Complex64::from_polar(radius, angle)
        })
        .collect();
    VerblunskyPeriod::new(alphas).expect("random alphas are inside the disk")
}

fn unit_c(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// Run the full property suite. `break_psi_norm` injects a wrong
/// second-kind normalization into the Wall assembly so the cancellation
/// assertion must fail (a negative self-test of the suite).
pub fn run_verify(
    v: &VerblunskyPeriod<f64>,
    seed: u64,
    break_psi_norm: bool,
) -> Vec<PropertyResult> {
    let mut rng = SplitMix64::new(seed ^ 0xc0ffee);
    let d = Discriminant::new(v);
    let p = d.p();
    let mut out = Vec::new();

    // 1. closed form vs recursion oracle
    {
        let mut worst = 0.0f64;
        let mut case = None;
        for _ in 0..60 {
            let k = 1 + (rng.next_u64() % (180 / p as u64).max(1)) as usize;
            let s = (rng.next_u64() % p as u64) as usize;
            let radius = rng.range(0.5, 2.0);
            let z = Complex64::from_polar(radius, rng.range(0.0, std::f64::consts::TAU));
            if let Ok((phi, phi_star)) = closed_form_phi(&d, k, s, z) {
                let q = eval_quad_at(v, k * p + s, z);
                let err = ((phi - q.phi).norm() / (1.0 + q.phi.norm()))
                    .max((phi_star - q.phi_star).norm() / (1.0 + q.phi_star.norm()));
                if err > worst {
                    worst = err;
                    case = Some(format!("k={k} s={s} z={z}"));
                }
            }
        }
        out.push(PropertyResult::new(
            "closed_form_vs_recursion",
            worst,
            1e-9,
            case,
        ));
    }

    // 2. CD kernel: two-term formula vs direct sum
    {
        let mut worst = 0.0f64;
        let mut case = None;
        for _ in 0..60 {
            let n = 10 + (rng.next_u64() % 290) as usize;
            let (z, w) = if rng.next_f64() < 0.5 {
                (unit_c(rng.range(0.0, 6.28)), unit_c(rng.range(0.0, 6.28)))
            } else {
                (
                    Complex64::from_polar(rng.range(0.6, 1.4), rng.range(0.0, 6.28)),
                    Complex64::from_polar(rng.range(0.6, 1.4), rng.range(0.0, 6.28)),
                )
            };
            if let Ok(fast) = cd_kernel_fast(&d, n, z, w) {
                let direct = cd_kernel_direct(v, n, z, w);
                let err = (fast - direct).norm() / (1.0 + direct.norm());
                if err > worst {
                    worst = err;
                    case = Some(format!("n={n} z={z} w={w}"));
                }
            }
        }
        out.push(PropertyResult::new("cd_kernel_fast_vs_direct", worst, 1e-8, case));
    }

    // 3. Wall polynomials vs Pinter-Nevai, and the cancellation assertion
    {
        let mut worst = 0.0f64;
        let mut case = None;
        let mut cancel_failed: Option<String> = None;
        for k in 1..=10usize {
            let result = if break_psi_norm {
                wall_polys_with_psi_scale(&d, k, 1.01)
            } else {
                wall_polys(&d, k)
            };
            match result {
                Ok(wall) => {
                    let q = iterate_polys(v, k * p);
                    let num = q.monic_psi_star().sub(&q.monic_phi_star());
                    let a_pn = ComplexPoly::new(
                        num.coeffs()[1..]
                            .iter()
                            .map(|&x| x / Complex64::new(2.0, 0.0))
                            .collect(),
                    );
                    let b_pn = q
                        .monic_psi_star()
                        .add(&q.monic_phi_star())
                        .scale(Complex64::new(0.5, 0.0));
                    let scale = b_pn.max_coeff_norm().max(1.0);
                    for j in 0..=(k * p) {
                        let err = (wall.a.coeff(j) - a_pn.coeff(j))
                            .norm()
                            .max((wall.b.coeff(j) - b_pn.coeff(j)).norm())
                            / scale;
                        if err > worst {
                            worst = err;
                            case = Some(format!("k={k} coeff={j}"));
                        }
                    }
                }
                Err(e) => {
                    cancel_failed = Some(format!("k={k}: {e}"));
                    break;
                }
            }
        }
        if let Some(msg) = cancel_failed {
            out.push(PropertyResult::new("wall_cancellation", 1.0, 0.0, Some(msg)));
        } else {
            out.push(PropertyResult::new("wall_vs_pinter_nevai", worst, 1e-9, case));
        }
    }

    // 4. Schur function bounded by 1 and consistent with Caratheodory
    {
        let mut worst_bound = 0.0f64;
        let mut worst_rel = 0.0f64;
        let mut worst_re = 0.0f64;
        let mut case = None;
        for i in 0..10 {
            for j in 0..12 {
                let z = Complex64::from_polar(
                    0.05 + 0.85 * (i as f64) / 9.0,
                    std::f64::consts::TAU * (j as f64) / 12.0,
                );
                let f = schur_f(&d, z).unwrap();
                let big_f = caratheodory_f(&d, z).unwrap();
                worst_bound = worst_bound.max(f.norm() - 1.0);
                worst_re = worst_re.max(-big_f.re);
                let want = (Complex64::new(1.0, 0.0) + z * f) / (Complex64::new(1.0, 0.0) - z * f);
                let rel = (big_f - want).norm();
                if rel > worst_rel {
                    worst_rel = rel;
                    case = Some(format!("z={z}"));
                }
            }
        }
        out.push(PropertyResult::new("schur_modulus_below_one", worst_bound, 0.0, None));
        out.push(PropertyResult::new("caratheodory_positive_real_part", worst_re, 0.0, None));
        out.push(PropertyResult::new(
            "caratheodory_schur_consistency",
            worst_rel,
            1e-8,
            case,
        ));
    }

    // 5. generating function closed form
    {
        let mut worst = 0.0f64;
        let mut case = None;
        for _ in 0..20 {
            let z = unit_c(rng.range(0.0, 6.28));
            let t = Complex64::from_polar(rng.range(0.0, 0.2), rng.range(0.0, 6.28));
            match generating_function_residual(&d, z, t, 60) {
                Ok(res) => {
                    if res > worst {
                        worst = res;
                        case = Some(format!("z={z} t={t}"));
                    }
                }
                Err(_) => continue,
            }
        }
        out.push(PropertyResult::new("generating_function_residual", worst, 1e-8, case));
    }

    // 6. period-rescaling identity
    {
        let mut worst = 0.0f64;
        let mut case = None;
        for m in [2usize, 3] {
            for _ in 0..10 {
                let k = 1 + (rng.next_u64() % 20) as usize;
                let z = Complex64::from_polar(rng.range(0.5, 2.0), rng.range(0.0, 6.28));
                let res = cheb_period_identity_residual(v, m, k, z).unwrap();
                let q = eval_quad_at(v, m * k * p, z);
                let scale = (q.phi / cpowi(z, (m * k * p / 2) as i64)).norm().max(1.0);
                let scaled = res / scale;
                if scaled > worst {
                    worst = scaled;
                    case = Some(format!("m={m} k={k} z={z}"));
                }
            }
        }
        out.push(PropertyResult::new("period_rescaling_identity", worst, 1e-9, case));
    }

    // 7. Wronskian identity on the circle
    {
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let n = 1 + (rng.next_u64() % 100) as usize;
            let z = unit_c(rng.range(0.0, 6.28));
            let q = eval_quad_at(v, n, z);
            let lhs = q.psi_star * q.phi + q.psi * q.phi_star;
            let rhs = Complex64::new(2.0, 0.0) * cpowi(z, n as i64);
            worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
        }
        out.push(PropertyResult::new("wronskian_identity", worst, 1e-9, None));
    }

    // 8. resonance value identity on the band closure
    {
        let mut worst = 0.0f64;
        let mut case = None;
        if let Ok(bands) = band_structure(&d, 8192) {
            for &theta in &bands.resonances {
                let delta = d.delta_theta(theta);
                if (delta.abs() - 2.0).abs() > 1e-6 {
                    continue;
                }
                let u = if delta > 0.0 { 1.0 } else { -1.0 };
                let z = unit_c(theta);
                let val = d.psi_sum.eval(z) / (cpowi(z, (p / 2) as i64) * Complex64::new(2.0, 0.0));
                let err = (val - Complex64::new(u, 0.0)).norm();
                if err > worst {
                    worst = err;
                    case = Some(format!("theta={theta}"));
                }
            }
            // CDF sanity: total normalized mass reachable
            if let Ok(cdf) = band_cdf(&d, &bands, 512) {
                let k_end = bands
                    .bands
                    .last()
                    .map(|arc| cdf.k(&d, arc.end - 1e-12))
                    .unwrap_or(0.0);
                out.push(PropertyResult::new(
                    "band_cdf_normalization",
                    (k_end - 1.0).abs(),
                    1e-6,
                    None,
                ));
            }
        }
        out.push(PropertyResult::new("resonance_value_identity", worst, 1e-7, case));
    }

    out
}
