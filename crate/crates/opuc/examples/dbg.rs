use num_complex::Complex64;
use opuc::equilibrium::band_cdf;
use opuc::periodic::{band_structure, Discriminant};
use opuc::szego::{eval_quad_at, VerblunskyPeriod};

fn main() {
    // constant 1/2
    let v = VerblunskyPeriod::new(vec![Complex64::new(0.5, 0.0)]).unwrap();
    let d = Discriminant::new(&v);
    let b = band_structure(&d, 8192).unwrap();
    println!("constant 1/2:");
    println!("  bands: {:?}", b.bands);
    println!("  closed gaps: {:?}", b.closed_gaps);
    println!("  gap deltas: {:?}", b.closed_gaps.iter().map(|&t| d.delta_theta(t)).collect::<Vec<_>>());
    println!("  gap Ws: {:?}", b.closed_gaps.iter().map(|&t| d.w_theta(t)).collect::<Vec<_>>());
    println!("  edges: {:?}", b.edges.iter().map(|e| (e.theta, e.delta_sign, e.warning)).collect::<Vec<_>>());

    // free CDF
    let v = VerblunskyPeriod::<f64>::free(2);
    let d = Discriminant::new(&v);
    let b = band_structure(&d, 4096).unwrap();
    println!("free: bands {:?} gaps {:?}", b.bands, b.closed_gaps);
    let cdf = band_cdf(&d, &b, 512).unwrap();
    println!("free: total_raw = {}", cdf.total_raw());
    for th in [0.5f64, 1.0, std::f64::consts::PI, 5.0] {
        println!("  k({th}) = {} want {}", cdf.k(&d, th), th / std::f64::consts::TAU);
    }

    // wronskian error size
    let v = VerblunskyPeriod::new(vec![
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.2, 0.0),
        Complex64::new(0.1, -0.4),
        Complex64::new(0.2, 0.2),
    ]).unwrap();
    for n in [40usize, 100] {
        for th in [0.3f64, 2.1, 4.9] {
            let z = Complex64::new(th.cos(), th.sin());
            let q = eval_quad_at(&v, n, z);
            let lhs = q.psi_star * q.phi + q.psi * q.phi_star;
            let rhs = Complex64::new(2.0, 0.0) * z.powi(n as i32);
            println!("wronskian n={n} th={th}: err = {:e}", (lhs - rhs).norm());
        }
    }
}
