use std::sync::Arc;
use std::time::Instant;

use mueg::constructor::{
    convergence_study, kinetic_bound_ledger, kinetic_upper_functional, verify_marginals, ConstructedRdm,
    ConstructorSpec, CurrentDecomposition, WidthPolicy,
};
use mueg::fields::GridSpec;
use mueg::rdm::{hermiticity_defect, GaussianDensity, Kernel, LinearVector, Quadratic, ScalarFunction};

fn density() -> Arc<dyn ScalarFunction> {
    Arc::new(GaussianDensity { dim: 3, mass: 2.0, center: [0.0; 3], sigma: 1.0 })
}

fn grid(n: usize) -> GridSpec {
    GridSpec::cube(3, -4.0, 4.0, n).unwrap()
}

#[test]
fn constant_velocity_marginals() {
    let dec = CurrentDecomposition::new(None, Arc::new(LinearVector::constant([0.3, -0.2, 0.5])));
    let g = grid(12);
    let t = Instant::now();
    let gamma = ConstructedRdm::build(3, density(), dec, ConstructorSpec::default(), &g).unwrap();
    let (e, rep) = verify_marginals(&gamma, &g, 1e-6).unwrap();
    eprintln!("{e:?} {:?}", t.elapsed());
    assert!(rep.passed, "{}", rep.to_text());
}

#[test]
fn symmetric_gauge_marginals_and_ledger() {
    let dec = CurrentDecomposition::new(None, Arc::new(LinearVector::symmetric_gauge([0.0, 0.0, 1.0])));
    let g = grid(12);
    let gamma = ConstructedRdm::build(3, density(), dec, ConstructorSpec::default(), &g).unwrap();
    let (e, rep) = verify_marginals(&gamma, &g, 1e-6).unwrap();
    eprintln!("{e:?}");
    assert!(rep.passed, "{}", rep.to_text());
    let t = Instant::now();
    let l = kinetic_bound_ledger(&gamma, &g).unwrap();
    eprintln!("{l:?} {:?}", t.elapsed());
    assert!(l.pass);
}

#[test]
fn hermitian_kernel() {
    let g = Arc::new(Quadratic::product(0, 1, 0.5));
    let dec = CurrentDecomposition::new(Some(g), Arc::new(LinearVector::symmetric_gauge([0.0, 0.0, 1.0])));
    let gamma = ConstructedRdm::build(3, density(), dec, ConstructorSpec::default(), &grid(8)).unwrap();
    let pairs: Vec<_> = (0..20)
        .map(|i| {
            let s = i as f64 * 0.37;
            ([s.sin(), (2.0 * s).cos(), 0.3 * s - 1.0], [0.5 * s.cos(), -s.sin(), 0.2])
        })
        .collect();
    assert!(hermiticity_defect(&gamma, &pairs) < 1e-12 * gamma.eval([0.0; 3], [0.0; 3]).norm());
}

#[test]
fn convergence_in_order() {
    let dec = CurrentDecomposition::new(None, Arc::new(LinearVector::constant([0.3, -0.2, 0.5])));
    let rows = convergence_study(3, density(), &dec, ConstructorSpec::default(), &grid(8), &[8, 16, 32]).unwrap();
    eprintln!("{rows:?}");
    assert!(rows[0].density >= 4.0 * rows[1].density);
    assert!(rows[1].density >= 4.0 * rows[2].density);
}

#[test]
fn upper_functional_of_zero_density_is_zero() {
    let zero = Arc::new(GaussianDensity { dim: 3, mass: 0.0, center: [0.0; 3], sigma: 1.0 });
    let dec = CurrentDecomposition::new(None, Arc::new(LinearVector::constant([0.0; 3])));
    let u = kinetic_upper_functional(3, zero.as_ref(), &dec, WidthPolicy::Pointwise { floor: 1e-3 }, &grid(8)).unwrap();
    assert_eq!(u.value, 0.0);
}
