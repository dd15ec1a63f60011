use floquet_core::linalg::eigenvalues;
use floquet_core::markovianity::{branch_log, candidate_mu, is_conditionally_cp};
use floquet_core::propagator::{driven_qubit, model_series};
use floquet_core::*;
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

fn complex_matrix(n: usize) -> impl Strategy<Value = DMatrix<Complex<f64>>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| DMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| Complex::new(a, b))))
}

fn lindblad_form(n: usize) -> impl Strategy<Value = LindbladForm64> {
    (complex_matrix(n), complex_matrix(n * n - 1)).prop_map(move |(h, a)| {
        let mut h = (&h + h.adjoint()) * Complex::new(0.5, 0.0);
        let shift = h.trace() / Complex::new(n as f64, 0.0);
        for i in 0..n {
            h[(i, i)] -= shift;
        }
        LindbladForm::new(h, &a * a.adjoint()).unwrap()
    })
}

fn density_matrix(n: usize) -> impl Strategy<Value = Operator64> {
    complex_matrix(n).prop_map(move |a| {
        let rho = &a * a.adjoint();
        let tr = rho.trace();
        Operator::new(rho / tr).unwrap()
    })
}

fn superop_commutator(a: &LindbladForm64, b: &LindbladForm64) -> Superoperator64 {
    lindblad_to_superop(a).commutator(&lindblad_to_superop(b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lindbladians_annihilate_the_trace(form in lindblad_form(2), rho in density_matrix(2)) {
        let out = lindblad_to_superop(&form).apply(&rho);
        prop_assert!(out.trace().norm() < 1e-12);
    }

    #[test]
    fn lindbladians_annihilate_the_trace_qutrit(form in lindblad_form(3), rho in density_matrix(3)) {
        let out = lindblad_to_superop(&form).apply(&rho);
        prop_assert!(out.trace().norm() < 1e-12);
    }

    #[test]
    fn superop_round_trip(form in lindblad_form(2)) {
        let s = lindblad_to_superop(&form);
        let back = superop_to_quasi_lindblad(&s).unwrap();
        prop_assert!((back.hamiltonian() - form.hamiltonian()).norm() < 1e-10);
        prop_assert!((back.kossakowski() - form.kossakowski()).norm() < 1e-10);
        prop_assert!((lindblad_to_superop(&back).matrix() - s.matrix()).norm() < 1e-10);
    }

    #[test]
    fn structured_commutator_matches_matrix(a in lindblad_form(2), b in lindblad_form(2)) {
        let c = lindblad_commutator(&a, &b).unwrap();
        prop_assert!((lindblad_to_superop(&c).matrix() - superop_commutator(&a, &b).matrix()).norm() < 1e-10);
    }

    #[test]
    fn structured_commutator_is_antisymmetric(a in lindblad_form(2), b in lindblad_form(2)) {
        let ab = lindblad_commutator(&a, &b).unwrap();
        let ba = lindblad_commutator(&b, &a).unwrap();
        prop_assert!((ab.hamiltonian() + ba.hamiltonian()).norm() < 1e-12);
        prop_assert!((ab.kossakowski() + ba.kossakowski()).norm() < 1e-12);
    }

    #[test]
    fn structured_commutator_satisfies_jacobi(a in lindblad_form(2), b in lindblad_form(2), c in lindblad_form(2)) {
        let br = |x: &LindbladForm64, y: &LindbladForm64| lindblad_commutator(x, y).unwrap();
        let sum = br(&a, &br(&b, &c)).add(&br(&b, &br(&c, &a))).add(&br(&c, &br(&a, &b)));
        prop_assert!(sum.hamiltonian().norm() < 1e-9);
        prop_assert!(sum.kossakowski().norm() < 1e-9);
    }
}

fn model_params() -> impl Strategy<Value = ModelParams64> {
    (0.0f64..0.2, 0.0f64..2.0, 0.5f64..6.0, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(g, e, w, phi)| ModelParams::new(g, e, w, phi).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn propagation_composes(p in model_params()) {
        let gen = driven_qubit(&p).unwrap();
        let t = p.period();
        let full = propagate(&gen, 0.0, t, 2000).unwrap();
        let first = propagate(&gen, 0.0, t / 2.0, 2000).unwrap();
        let second = propagate(&gen, t / 2.0, t, 2000).unwrap();
        prop_assert!((full.matrix() - (&second * &first).matrix()).norm() < 1e-9);
    }

    #[test]
    fn one_cycle_spectrum_is_conjugation_closed(p in model_params()) {
        let ev = eigenvalues(one_cycle_map(&p, 0.0, 2000).unwrap().matrix());
        for l in &ev {
            prop_assert!(ev.iter().any(|m| (m - l.conj()).norm() < 1e-8));
        }
    }

    #[test]
    fn branches_exponentiate_back(p in model_params()) {
        let map = one_cycle_map(&p, 0.0, 2000).unwrap();
        if let Ok(dec) = spectral_decompose(&map) {
            for x in -3..=3 {
                let branch = vec![x; dec.n_c()];
                if let Ok(k) = branch_log(&dec, &branch, p.period()) {
                    prop_assert!(((k.scale(Complex::new(p.period(), 0.0))).exp().matrix() - map.matrix()).norm() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn positive_verdict_has_lindblad_form(p in model_params()) {
        let map = one_cycle_map(&p, 0.0, 2000).unwrap();
        let v = floquet_verdict(&map, p.period(), 5, Some(&propagator::model_static(p.gamma))).unwrap();
        if v.has_floquet_lindbladian {
            let form = superop_to_quasi_lindblad(v.generator.as_ref().unwrap()).unwrap();
            prop_assert!(form.is_valid_lindblad());
        }
    }

    #[test]
    fn phase_is_a_time_shift(p in model_params()) {
        let shifted = ModelParams::new(p.gamma, p.drive_e, p.omega, 0.0).unwrap();
        let t0 = (-p.phi / p.omega).rem_euclid(p.period());
        let a = one_cycle_map(&p, 0.0, 2000).unwrap();
        let b = one_cycle_map(&shifted, t0, 2000).unwrap();
        prop_assert!((a.matrix() - b.matrix()).norm() < 1e-8);
        let va = floquet_verdict(&a, p.period(), 5, None).unwrap();
        let vb = floquet_verdict(&b, p.period(), 5, None).unwrap();
        prop_assert_eq!(va.has_floquet_lindbladian, vb.has_floquet_lindbladian);
        if va.mu_min.is_finite() && vb.mu_min.is_finite() {
            prop_assert!((va.mu_min - vb.mu_min).abs() < 1e-5);
        }
    }

    #[test]
    fn expansions_preserve_hermiticity_and_trace(p in model_params()) {
        let s = model_series(&ModelParams::new(p.gamma, p.drive_e, p.omega, 0.0).unwrap());
        let mut gens = Vec::new();
        for k in 1..=3 {
            gens.push(magnus_order(&s, p.omega, k).unwrap().generator);
            gens.push(vanvleck_keff(&s, p.omega, k).unwrap().generator);
            gens.push(vanvleck_floquet_generator(&s, p.omega, k, 0.3).unwrap().generator);
        }
        for g in &gens {
            prop_assert!(g.hermiticity_defect().is_none());
            prop_assert!(g.trace_defect() < 1e-9);
        }
    }
}

#[test]
fn feasibility_is_monotone_in_noise() {
    let mut checked = 0;
    for i in 0..20 {
        let p = ModelParams::new(0.01 + 0.01 * (i % 4) as f64, 0.3 + 0.1 * i as f64, 0.6 + 0.15 * i as f64, 0.0).unwrap();
        let map = one_cycle_map(&p, 0.0, 2000).unwrap();
        let Ok(dec) = spectral_decompose(&map) else { continue };
        let Ok(k) = branch_log(&dec, &vec![0; dec.n_c()], p.period()) else { continue };
        let mu = candidate_mu(&k);
        if !mu.is_finite() {
            continue;
        }
        for factor in [1.0, 1.5, 2.0, 10.0] {
            assert!(is_conditionally_cp(&k, mu * factor + if mu == 0.0 { 1e-3 * factor } else { 0.0 }));
        }
        checked += 1;
    }
    assert!(checked >= 10);
}

#[test]
fn high_frequency_selects_principal_branch() {
    let p = ModelParams::new(0.01, 1.0, 20.0, 0.0).unwrap();
    let map = one_cycle_map(&p, 0.0, 2000).unwrap();
    let dec = spectral_decompose(&map).unwrap();
    for x in -3..=3 {
        let k = branch_log(&dec, &vec![x; dec.n_c()], p.period()).unwrap();
        let valid = superop_to_quasi_lindblad(&k).unwrap().is_valid_lindblad();
        assert_eq!(valid, x == 0, "branch {x}");
    }
}
