use itokit::algebra::{check_axioms, Element, ItoAlgebra};
use itokit::catalog::{self, FiniteGroupData, PositiveDefiniteFunction};
use itokit::cli::{json, AlgebraDocument};
use itokit::decomposition::{classify, decompose, thermal_split, Kind};
use itokit::fock::{self, ToyFockConfig};
use itokit::linalg::{self, c, CMat, C64};
use itokit::representation::gns_build;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| c(re, im))
}

fn small_catalog() -> Vec<ItoAlgebra> {
    vec![
        catalog::newton(),
        catalog::wiener(),
        catalog::poisson(),
        catalog::hp(),
        catalog::thermal_brownian(2.0, 1.0).unwrap(),
        catalog::mixed_wiener_poisson(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_floats_round_trip(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        let text = json::to_canonical_string(&serde_json::json!(x));
        let back: f64 = serde_json::from_str(text.trim()).unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn documents_round_trip(n in 1usize..4, seed in prop::collection::vec(any::<u64>(), 64)) {
        let mut bits = seed.into_iter().cycle().map(|b| {
            let x = f64::from_bits(b);
            if x.is_finite() { x } else { (b % 1000) as f64 / 7.0 }
        });
        let mut doc = AlgebraDocument::from_algebra(&catalog::newton(), None, None);
        doc.dim = n;
        doc.basis = (0..n).map(|i| format!("x{i}")).collect();
        let mut pair = || [bits.next().unwrap(), bits.next().unwrap()];
        doc.mul = (0..n).map(|_| (0..n).map(|_| (0..n).map(|_| pair()).collect()).collect()).collect();
        doc.star = (0..n).map(|_| (0..n).map(|_| pair()).collect()).collect();
        doc.death = (0..n).map(|_| pair()).collect();
        doc.state = (0..n).map(|_| pair()).collect();
        let text = doc.emit();
        let back: AlgebraDocument = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.emit(), text);
    }

    #[test]
    fn fundamental_representation_is_a_star_homomorphism(
        which in 0usize..6,
        xs in prop::collection::vec(complex(), 4),
        ys in prop::collection::vec(complex(), 4),
    ) {
        let alg = &small_catalog()[which];
        let rep = gns_build(alg).unwrap();
        let n = alg.dim();
        let x = Element::from_coeffs(xs[..n].to_vec());
        let y = Element::from_coeffs(ys[..n].to_vec());
        let g = rep.metric().matrix();
        let m = |z: &Element| itokit::representation::fundamental_matrix(&rep, z).unwrap();
        let hom = linalg::max_abs(&(m(&alg.mul(&x, &y).unwrap()) - m(&x) * m(&y)));
        let adj = linalg::max_abs(&(&g * m(&x).adjoint() * &g - m(&alg.star(&x).unwrap())));
        prop_assert!(hom <= 1e-9 && adj <= 1e-9, "hom {hom:e} adj {adj:e}");
    }

    #[test]
    fn periodic_wiener_is_brownian(k in 0usize..3, rho in prop::collection::vec(0.2..5.0f64, 3)) {
        let spectrum = catalog::self_inverse_spectrum(&rho[..k]);
        let alg = catalog::build_periodic_wiener(k, &spectrum, 1e-9).unwrap();
        prop_assert_eq!(alg.dim(), 2 * k + 2);
        prop_assert!(check_axioms(&alg).pass);
        let rep = gns_build(&alg).unwrap();
        prop_assert_eq!(classify(&alg, &rep).unwrap().kind, Kind::Brownian);
        for i in 1..alg.dim() {
            for j in 1..alg.dim() {
                let p = alg.mul(&alg.basis_element(i), &alg.basis_element(j)).unwrap();
                prop_assert!(p.0.iter().skip(1).all(|z| z.norm() == 0.0));
            }
        }
    }

    #[test]
    fn cyclic_group_poisson_is_commutative_levy(order in 1usize..7) {
        let g = FiniteGroupData::cyclic(order);
        let gp = catalog::build_group_poisson(&g, &PositiveDefiniteFunction::delta(&g), 1e-9).unwrap();
        prop_assert!(gp.report.pass);
        let alg = &gp.algebra;
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let (a, b) = (alg.basis_element(i), alg.basis_element(j));
                let comm = &alg.mul(&a, &b).unwrap() - &alg.mul(&b, &a).unwrap();
                prop_assert!(comm.max_abs() <= 1e-12);
            }
        }
        let d = decompose(alg, &gns_build(alg).unwrap()).unwrap();
        prop_assert!(d.verified(alg.dim()));
        prop_assert!(d.brownian_basis.is_empty());
        prop_assert_eq!(d.levy_basis.len(), order);
    }

    #[test]
    fn thermal_brownian_splits_agree(rho_minus in 0.1..3.0f64, gap in 0.0..3.0f64) {
        let rho_plus = rho_minus + gap;
        let alg = catalog::thermal_brownian(rho_plus, rho_minus).unwrap();
        let form = catalog::thermal_brownian_form(rho_plus, rho_minus).unwrap();
        let generic = decompose(&alg, &gns_build(&alg).unwrap()).unwrap();
        let thermal = thermal_split(&alg, &form).unwrap();
        prop_assert!(thermal.levy_basis.is_empty());
        let dist = linalg::subspace_distance(&generic.brownian_matrix(3), &thermal.brownian_matrix(3), 1e-9);
        prop_assert!(dist <= 1e-9, "{dist:e}");
    }

    #[test]
    fn spectral_round_trip_on_cyclic_groups(order in 1usize..6, weights in prop::collection::vec(0.0..3.0f64, 6)) {
        let g = FiniteGroupData::cyclic(order);
        let irreps = catalog::cyclic_irreps(order);
        let rho: Vec<CMat> = weights[..order].iter().map(|w| CMat::from_element(1, 1, c(*w, 0.0))).collect();
        let lambda = catalog::synthesize(&g, &irreps, &rho).unwrap();
        let r = catalog::spectral_decompose(&g, &irreps, &lambda, 1e-9).unwrap();
        prop_assert!(r.residual <= 1e-10);
        for (a, b) in rho.iter().zip(&r.rho) {
            prop_assert!(linalg::max_abs(&(a - b)) <= 1e-10);
        }
        prop_assert!(r.min_eigenvalues.iter().all(|&e| e >= -1e-10));
    }

    #[test]
    fn fock_process_respects_star(coeffs in prop::collection::vec(complex(), 4), steps in 1usize..4) {
        let hp = catalog::hp();
        let rep = gns_build(&hp).unwrap();
        let a = Element::from_coeffs(coeffs);
        let config = ToyFockConfig::new(0.1, steps).unwrap();
        let states = fock::simulate_process(&rep, &a, &config).unwrap();
        let starred = fock::simulate_process(&rep, &hp.star(&a).unwrap(), &config).unwrap();
        for (s, t) in states.iter().zip(&starred) {
            let dense = s.to_dense().unwrap();
            prop_assert!(linalg::max_abs(&(t.to_dense().unwrap() - dense.adjoint())) <= 1e-14);
            let want = rep.l(&a) * (s.step as f64 * 0.1);
            prop_assert!((s.vacuum_mean() - want).norm() <= 1e-12);
        }
    }
}

#[test]
fn disjoint_cell_increments_commute() {
    let hp = catalog::hp();
    let rep = gns_build(&hp).unwrap();
    let inc_a = fock::build_cell_increment(&rep, &hp.basis_element(1), 0.1).unwrap();
    let inc_b = fock::build_cell_increment(&rep, &hp.basis_element(2), 0.1).unwrap();
    let psi = itokit::linalg::CVec::from_fn(8, |i, _| c(i as f64, 1.0 - i as f64));
    let ab = fock::apply_in_slot(&inc_a.matrix, 0, &fock::apply_in_slot(&inc_b.matrix, 2, &psi));
    let ba = fock::apply_in_slot(&inc_b.matrix, 2, &fock::apply_in_slot(&inc_a.matrix, 0, &psi));
    assert_eq!(ab, ba);
}
