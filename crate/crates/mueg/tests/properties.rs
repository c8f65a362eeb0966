//! Randomized invariants across the modules.

use std::sync::Arc;

use mueg::config::Config;
use mueg::fields::io::FieldData;
use mueg::fields::ops::{gradient, integrate};
use mueg::fields::{GridSpec, ScalarField};
use mueg::kernels::{FermiKernel, ShiftedFermiKernel};
use mueg::rdm::{
    hermiticity_defect, sample_matrix_spectrum, AffineKernel, AffineMap, GaugedKernel, Kernel, Quadratic,
};
use mueg::tiling::{IndicatorSum, Mollifier, SmearedIndicator, TetraDecomposition};
use mueg::ueg::{symmetric_gauge_residuals, DeltaPolicy, Domain};
use mueg::{Complex64, Point};
use proptest::prelude::*;

fn point(r: f64) -> impl Strategy<Value = Point> {
    [-r..r, -r..r, -r..r]
}

fn small_grid() -> GridSpec {
    GridSpec::cube(3, -1.0, 1.0, 7).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradient_and_integral_are_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, k in point(2.0)) {
        let g = small_grid();
        let f = ScalarField::from_fn(&g, |x| (k[0] * x[0] + k[1] * x[1]).sin() + x[2] * x[2]);
        let h = ScalarField::from_fn(&g, |x| (x[0] * x[1] - k[2] * x[2]).cos());
        let combo = ScalarField::new(g.clone(), f.values.iter().zip(&h.values).map(|(u, v)| a * u + b * v).collect()).unwrap();
        let (gf, gh, gc) = (gradient(&f).unwrap(), gradient(&h).unwrap(), gradient(&combo).unwrap());
        for i in 0..g.len() {
            for c in 0..3 {
                let want = a * gf.values[i][c] + b * gh.values[i][c];
                prop_assert!((gc.values[i][c] - want).abs() <= 1e-11 * (1.0 + want.abs()));
            }
        }
        let want = a * integrate(&f).unwrap() + b * integrate(&h).unwrap();
        prop_assert!((integrate(&combo).unwrap() - want).abs() <= 1e-11 * (1.0 + want.abs()));
    }

    #[test]
    fn field_files_round_trip(vals in prop::collection::vec(-1e6..1e6f64, 2 * 7 * 7 * 7)) {
        let g = small_grid();
        let f = ScalarField::new(g, vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()).unwrap();
        let data = FieldData::from_complex(&f);
        let back = FieldData::parse(&data.to_text()).unwrap();
        prop_assert_eq!(&back, &data);
        prop_assert_eq!(back.to_complex().unwrap().values, f.values);
    }

    #[test]
    fn fermi_kernel_peaks_on_the_diagonal(d in 1usize..=3, t in 0.01..5.0f64, z in point(4.0)) {
        let k = FermiKernel::new(d, t).unwrap();
        prop_assert!((k.value([0.0; 3]) - t).abs() <= 1e-12 * t);
        let mut z = z;
        for c in z.iter_mut().skip(d) {
            *c = 0.0;
        }
        let v = k.value(z);
        prop_assert!(v.abs() <= t * (1.0 + 1e-12));
        prop_assert!((v - k.value([-z[0], -z[1], -z[2]])).abs() <= 1e-14 * t);
    }

    #[test]
    fn fermi_gram_matrices_are_between_zero_and_one(t in 0.05..0.5f64, pts in prop::collection::vec(point(1.5), 12)) {
        // spacing below the Fermi wavelength keeps the sampled operator meaningful
        let k = FermiKernel::new(3, t).unwrap();
        let (lo, _) = sample_matrix_spectrum(&k, &pts, 1.0).unwrap();
        prop_assert!(lo >= -1e-10 * t);
    }

    #[test]
    fn shifted_kernel_observables(t in 0.01..3.0f64, u in point(2.0)) {
        let k = ShiftedFermiKernel::new(3, t, u).unwrap();
        let o = k.observables();
        prop_assert_eq!(o.density, t);
        let j2: f64 = o.current.iter().map(|c| c * c).sum();
        // |j|^2 <= rho * tau
        prop_assert!(j2 <= o.density * o.kinetic_density * (1.0 + 1e-12));
    }

    #[test]
    fn gauge_leaves_diagonal_and_modulus(t in 0.1..2.0f64, s in -2.0..2.0f64, x in point(2.0), y in point(2.0)) {
        let base = FermiKernel::new(3, t).unwrap();
        let g = GaugedKernel { inner: base, g: Arc::new(Quadratic::product(0, 1, s)) };
        prop_assert!((g.eval(x, x) - base.eval(x, x)).norm() <= 1e-14);
        prop_assert!((g.eval(x, y).norm() - base.eval(x, y).norm()).abs() <= 1e-13);
        prop_assert!(hermiticity_defect(&g, &[(x, y)]) <= 1e-13);
    }

    #[test]
    fn affine_maps_compose_with_their_inverse(m in [point(2.0), point(2.0), point(2.0)], a in point(3.0), x in point(3.0)) {
        let map = AffineMap { m, a };
        prop_assume!(map.det().abs() > 1e-2);
        let inv = map.inverse().unwrap();
        let back = inv.apply(map.apply(x));
        let id = map.after(&inv).apply(x);
        for c in 0..3 {
            prop_assert!((back[c] - x[c]).abs() <= 1e-8 * (1.0 + x[c].abs()));
            prop_assert!((id[c] - x[c]).abs() <= 1e-8 * (1.0 + x[c].abs()));
        }
        let t = 0.7;
        let k = AffineKernel::new(FermiKernel::new(3, t).unwrap(), map).unwrap();
        let diag = k.eval(x, x);
        prop_assert!((diag.re - map.det().abs() * t).abs() <= 1e-12 * map.det().abs());
        prop_assert_eq!(diag.im, 0.0);
    }

    #[test]
    fn tetra_tiling_is_a_partition(x in point(10.0), ell in 0.2..4.0f64) {
        let dec = TetraDecomposition::build();
        match dec.pou_indicator_sum(x, ell) {
            IndicatorSum::Value(v) => prop_assert_eq!(v, 1.0),
            IndicatorSum::OnFace => {}
        }
        for j in 0..dec.len() {
            let b = dec.barycentric(j, x);
            prop_assert!((b.iter().sum::<f64>() - 1.0).abs() <= 1e-9 * (1.0 + x.iter().map(|c| c.abs()).sum::<f64>()));
        }
    }

    #[test]
    fn smeared_indicator_is_a_fraction(x in point(1.5), delta in 0.05..0.6f64) {
        let poly = TetraDecomposition::build().reference_polyhedron();
        let s = SmearedIndicator::new(&poly, &Mollifier::ueg(delta).unwrap()).unwrap();
        let v = s.value(x);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn domains_scale_by_volume(f in 0.2..10.0f64, hx in 0.1..2.0f64, hy in 0.1..2.0f64, hz in 0.1..2.0f64) {
        for d in [Domain::Box { half: [hx, hy, hz] }, Domain::Tetra { ell: hx }] {
            let v0 = d.polyhedron().unwrap().volume();
            let v1 = d.scaled(f).polyhedron().unwrap().volume();
            prop_assert!((v1 - f.powi(3) * v0).abs() <= 1e-10 * v1);
        }
    }

    #[test]
    fn thermodynamic_width_shrinks_with_scale(ell in 1.0..100.0f64, rho0 in 0.1..10.0f64) {
        let p = DeltaPolicy::Thermodynamic;
        let (a, b) = (p.delta(ell, rho0).unwrap(), p.delta(2.0 * ell, rho0).unwrap());
        prop_assert!(b < a);
        prop_assert!((a / b - 2f64.powf(1.0 / 3.0)).abs() <= 1e-12);
    }

    #[test]
    fn symmetric_gauge_has_uniform_curl(nu in point(3.0), pts in prop::collection::vec(point(5.0), 8)) {
        let (curl, dw, sym) = symmetric_gauge_residuals(nu, &pts, 1e-3);
        let n = nu.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assert!(curl <= 1e-8 * (1.0 + n));
        prop_assert!(dw <= 1e-14 * (1.0 + n));
        prop_assert_eq!(sym, 0.0);
    }

    #[test]
    fn config_hash_ignores_order(a in 0u64..1000, b in -10.0..10.0f64) {
        let one = Config::parse(&format!("seed = {a}\n[ueg]\nrho0 = {b}\ngrid = 8\n")).unwrap();
        let two = Config::parse(&format!("[ueg]\ngrid=8\nrho0={b}\n[job]\nseed={a}\n")).unwrap();
        prop_assert_eq!(one.hash(), two.hash());
    }
}
