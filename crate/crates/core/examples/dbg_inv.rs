use core::f64::consts::PI;
use nhmetric_core::defects::*;
use nhmetric_core::evolution::*;
use nhmetric_core::model::ModeParams;
use nhmetric_core::observables::*;

fn mode(k: f64, g: f64, f: f64) -> ModeParams { ModeParams::new(k, g, f).unwrap() }

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let nudge = 1e-9 * (b - a);
    let (a, b) = (a + nudge, b - nudge);
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn main() {
    let gamma = 1.0;
    // which case diverges?
    for method in ExpectationMethod::BOTH {
        for rate in [QuenchRate::Adiabatic, QuenchRate::Finite(gamma * gamma / 400.0)] {
            let s = defect_density(gamma, rate, method, PI).unwrap();
            let f = |k: f64| -> f64 {
                match rate {
                    QuenchRate::Adiabatic => adiabatic_sigma_z(&mode(k, gamma, 1.0), method).value,
                    QuenchRate::Finite(force) => asymptotic_sigma_z(&mode(k, gamma, force), method).unwrap().value,
                }
            };
            let ptb = simpson(&f, -gamma, gamma, 1_000_000) / (2.0 * PI);
            let pts = (simpson(&f, -PI, -gamma, 1_000_000) + simpson(&f, gamma, PI, 1_000_000)) / (2.0 * PI);
            println!("{method:?} {rate:?}: ptb {} vs {} (d={:.2e}); pts {} vs {} (d={:.2e})",
                s.sigma_ptb, ptb, (s.sigma_ptb - ptb).abs(),
                s.sigma_pts, pts, (s.sigma_pts - pts).abs());
        }
    }
    // gauge threshold comparison detail
    let p = mode(0.2, 1.0, 0.4);
    let mut cfg = IntegratorConfig::for_window(&p, 80.0);
    cfg.sample_count = 9;
    let base = evolve_trajectory(&p, &cfg).unwrap();
    cfg.rescale_threshold = 20.0;
    let wide = evolve_trajectory(&p, &cfg).unwrap();
    for (a, b) in base.samples.iter().zip(wide.samples.iter()) {
        println!("t={:8.2} lg={:6.3}/{:6.3} dzm={:9.2e} dzn={:9.2e} dbn0={:9.2e}",
            a.t, a.log_gauge, b.log_gauge,
            (a.sigma_z_metric - b.sigma_z_metric).abs(),
            (a.sigma_z_norm - b.sigma_z_norm).abs(),
            (a.bloch_norm[0] - b.bloch_norm[0]).abs());
    }
}
