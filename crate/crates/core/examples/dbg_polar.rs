use nhmetric_core::algebra::*;
use nhmetric_core::evolution::*;
use nhmetric_core::model::*;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 { Complex64::new(re, im) }

fn main() {
    let s = 1e140;
    let w = Matrix2C::new(c(0.8, 0.0), c(-0.6, 0.0), c(0.6, 0.0), c(0.8, 0.0));
    let v = Matrix2C::new(c(0.28, 0.0), c(-0.96, 0.0), c(0.96, 0.0), c(0.28, 0.0));
    let u = w * Matrix2C::from_reals(s, 0.0, 0.0, 1.0 / s) * v.adjoint();
    let q = polar_unitary(&u).unwrap();
    let expect = w * v.adjoint();
    println!("q = {q:?}");
    println!("expect = {expect:?}");
    println!("diff = {:e}", (q - expect).max_abs());
    println!("unitarity = {:e}", (q * q.adjoint() - Matrix2C::identity()).max_abs());

    let p = ModeParams::new(0.5, 0.0, 0.4).unwrap();
    let mut cfg = IntegratorConfig::for_window(&p, 80.0);
    cfg.sample_count = 41;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-12;
    let traj = evolve_trajectory(&p, &cfg).unwrap();
    let mut worst = 0.0f64;
    for s in &traj.samples {
        worst = worst.max((s.rho - Matrix2C::identity()).max_abs());
    }
    println!("gamma=0 worst |rho - 1| = {worst:e}");
}
