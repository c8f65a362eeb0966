use std::sync::Arc;

use mueg::fields::GridSpec;
use mueg::kernels::ShiftedFermiKernel;
use mueg::rdm::{
    check_integrated_bound, check_pointwise_bounds, kernel_observables, FdOptions, GaussianOrbital, GaussianPrimitive,
    LowRankRdm, Orbital,
};
use mueg::Complex64;

fn prim(alpha: f64, c: [f64; 3], k: [f64; 3], coeff: Complex64) -> GaussianPrimitive {
    GaussianPrimitive { coeff, center: c, alpha, k }
}

fn grid() -> GridSpec {
    GridSpec::cube(3, -3.0, 3.0, 25).unwrap()
}

fn mixed_set() -> LowRankRdm {
    let one = Complex64::new(1.0, 0.0);
    let raw = vec![
        GaussianOrbital { terms: vec![prim(0.8, [0.2, 0.0, 0.0], [0.7, 0.0, -0.4], one)] },
        GaussianOrbital {
            terms: vec![
                prim(1.1, [-0.3, 0.2, 0.1], [0.0, 1.2, 0.0], Complex64::new(0.3, 0.8)),
                prim(0.6, [0.0, -0.2, 0.3], [0.5, 0.0, 0.9], one),
            ],
        },
        GaussianOrbital { terms: vec![prim(0.9, [0.1, 0.4, -0.2], [-1.0, 0.3, 0.2], one)] },
    ];
    let orbs = GaussianOrbital::orthonormalize(&raw).unwrap();
    let orbs: Vec<Arc<dyn Orbital>> = orbs.into_iter().map(|o| Arc::new(o) as Arc<dyn Orbital>).collect();
    LowRankRdm::from_orbitals(&grid(), orbs, vec![1.0, 0.6, 0.3]).unwrap()
}

#[test]
fn real_orbital_carries_no_current() {
    let o: Arc<dyn Orbital> = Arc::new(prim(0.7, [0.0; 3], [0.0; 3], Complex64::new(0.9, 0.0)));
    let rdm = LowRankRdm::from_orbitals(&grid(), vec![o], vec![1.0]).unwrap();
    let obs = rdm.observables().unwrap();
    for i in 0..obs.grid.len() {
        for a in 0..3 {
            assert!(obs.jp.values[i][a].abs() < 1e-15);
        }
    }
    let (p1, _) = check_pointwise_bounds(&obs, false, 1e-10);
    assert!(p1.passed);
    // one real orbital: equality in the pointwise bound
    assert!(p1.min_margin.abs() < 1e-12 && p1.mean_margin.abs() < 1e-12);
}

#[test]
fn plane_wave_gaussian_current_and_kinetic_density() {
    let k = [0.4, -1.1, 0.6];
    let o: Arc<dyn Orbital> = Arc::new(prim(0.5, [0.1, 0.0, -0.1], k, Complex64::new(1.0, 0.0)));
    let rdm = LowRankRdm::from_orbitals(&grid(), vec![o], vec![1.0]).unwrap();
    let obs = rdm.observables().unwrap();
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    for i in (0..obs.grid.len()).step_by(7) {
        let r = obs.rho.values[i];
        for a in 0..3 {
            assert!((obs.jp.values[i][a] - r * k[a]).abs() <= 1e-13 * (1.0 + r));
        }
        if obs.mask[i] {
            let expect = obs.weizsacker_density(i) + r * k2;
            assert!((obs.tau.values[i] - expect).abs() <= 1e-12 * (1.0 + expect));
        }
    }
}

#[test]
fn omega_antisymmetric_part_matches_velocity_curl() {
    let obs = mixed_set().observables().unwrap();
    let mut checked = 0;
    for i in 0..obs.grid.len() {
        if !obs.mask[i] || obs.rho.values[i] < 1e-3 {
            continue;
        }
        let w = obs.omega.values[i];
        let v = obs.velocity_jacobian.values[i];
        let r = obs.rho.values[i];
        for a in 0..3 {
            for b in 0..3 {
                let lhs = (w[a][b] - w[b][a]) / Complex64::new(0.0, 2.0);
                let rhs = r * 0.5 * (v[a][b] - v[b][a]);
                assert!((lhs.re - rhs).abs() < 1e-10 * (1.0 + rhs.abs()) && lhs.im.abs() < 1e-12, "{lhs} {rhs}");
            }
        }
        assert!(obs.omega_min_eigenvalue(i) >= -1e-10 * obs.tau.values[i]);
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn real_part_of_zeta_is_half_density_gradient() {
    use mueg::rdm::Kernel;
    let rdm = mixed_set();
    let obs = rdm.observables().unwrap();
    let h = 1e-4;
    let rho = |x: [f64; 3]| rdm.eval(x, x).re;
    for i in (0..obs.grid.len()).step_by(11) {
        let x = obs.grid.point(i);
        for a in 0..3 {
            let (mut xp, mut xm) = (x, x);
            xp[a] += h;
            xm[a] -= h;
            let d = (rho(xp) - rho(xm)) / (2.0 * h);
            assert!((obs.zeta.values[i][a].re - 0.5 * d).abs() < 1e-8);
        }
    }
}

#[test]
fn mixed_set_satisfies_bounds() {
    let rdm = mixed_set();
    let obs = rdm.observables().unwrap();
    for strict in [false, true] {
        let (p1, p2) = check_pointwise_bounds(&obs, strict, 1e-10);
        assert!(p1.passed && p2.passed, "{}{}", p1.to_text(), p2.to_text());
        let t = rdm.kinetic_energy().unwrap();
        let r = check_integrated_bound(&obs, t, strict, 1e-8).unwrap();
        assert!(r.passed, "{}", r.to_text());
    }
}

#[test]
fn shifted_fermi_observables_by_finite_differences() {
    let k = ShiftedFermiKernel::new(3, 0.7, [0.3, -0.2, 0.5]).unwrap();
    let g = GridSpec::cube(3, -0.5, 0.5, 5).unwrap();
    let obs = kernel_observables(&k, &g, FdOptions::default()).unwrap();
    let ex = k.observables();
    for i in 0..g.len() {
        assert!((obs.rho.values[i] - ex.density).abs() < 1e-12);
        for a in 0..3 {
            assert!((obs.jp.values[i][a] - ex.current[a]).abs() < 1e-7 * ex.density);
        }
        assert!((obs.tau.values[i] - ex.kinetic_density).abs() < 1e-6 * ex.kinetic_density);
    }
}
