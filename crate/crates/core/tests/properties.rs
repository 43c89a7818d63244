use fermi_ent::bogoliubov::{
    diagonalize_qsp, quadratic_expectation, quasiparticle_amplitudes, BogoliubovMap, QuadraticOperator,
};
use fermi_ent::densities::{entropy_qsp, entropy_sc, entropy_sp, qsp_matrix, sp_matrix};
use fermi_ent::quartet::{
    concurrence_of, dual_state, mixed_concurrence, normal_form, optimal_decomposition, werner_mixture, QuartetState,
};
use fermi_ent::random::{random_state, seeded};
use fermi_ent::{FockState, MixedState, Parity};
use proptest::prelude::*;

fn parity(odd: bool) -> Parity {
    if odd {
        Parity::Odd
    } else {
        Parity::Even
    }
}

fn state(n: usize, odd: bool, seed: u64) -> FockState {
    random_state(n, parity(odd), &mut seeded(seed, 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_maps_are_canonical_and_compose(n in 1usize..6, seed in any::<u64>()) {
        let mut rng = seeded(seed, 1);
        let a = BogoliubovMap::random(n, &mut rng);
        let b = BogoliubovMap::random(n, &mut rng);
        prop_assert!(a.defect() < 1e-10);
        prop_assert!(BogoliubovMap::compose(&a, &b).unwrap().defect() < 1e-10);
    }

    #[test]
    fn entropy_chain(n in 1usize..6, odd in any::<bool>(), seed in any::<u64>()) {
        let psi = state(n, odd, seed);
        let sc = entropy_sc(&psi, None).unwrap();
        let sp = entropy_sp(&psi).unwrap();
        let qsp = entropy_qsp(&psi).unwrap();
        prop_assert!(sc >= sp - 1e-9 && sp >= qsp - 1e-9);
        prop_assert!(qsp <= n as f64 + 1e-9);
    }

    #[test]
    fn qsp_spectrum_pairs(n in 1usize..6, odd in any::<bool>(), seed in any::<u64>()) {
        let ev = qsp_matrix(&state(n, odd, seed)).unwrap().eigenvalues();
        let m = ev.len();
        for k in 0..m / 2 {
            prop_assert!((ev[k] + ev[m - 1 - k] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sp_occupation_bounds(n in 1usize..6, odd in any::<bool>(), seed in any::<u64>()) {
        let ev = sp_matrix(&state(n, odd, seed)).unwrap().eigenvalues();
        prop_assert!(ev.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
    }

    #[test]
    fn quasiparticle_diagonalization_reaches_entropy(n in 1usize..5, odd in any::<bool>(), seed in any::<u64>()) {
        let psi = state(n, odd, seed);
        let d = diagonalize_qsp(&qsp_matrix(&psi).unwrap()).unwrap();
        let moved = quasiparticle_amplitudes(&psi, &d.map).unwrap();
        let diag = sp_matrix(&moved).unwrap().matrix().map_diagonal(|z| z.re);
        let direct: f64 = diag.iter().map(|&x| fermi_ent::binary_entropy(x.clamp(0.0, 1.0))).sum();
        prop_assert!((direct - entropy_qsp(&psi).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn quadratic_expectation_is_real_and_invariant_under_phase(n in 1usize..5, seed in any::<u64>()) {
        let mut rng = seeded(seed, 2);
        let psi = random_state(n, Parity::Even, &mut rng);
        let op = QuadraticOperator::random(n, &mut rng);
        let phased = psi.scaled(fermi_ent::C64::from_polar(1.0, 0.7));
        let a = quadratic_expectation(&psi, &op).unwrap();
        let b = quadratic_expectation(&phased, &op).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn concurrence_bounds_and_dual(odd in any::<bool>(), seed in any::<u64>()) {
        let psi = state(4, odd, seed);
        let c = concurrence_of(&psi).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        let dual = dual_state(&psi).unwrap();
        prop_assert!((concurrence_of(&dual).unwrap() - c).abs() < 1e-10);
        prop_assert!((dual.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_form_reconstructs(odd in any::<bool>(), seed in any::<u64>()) {
        let psi = state(4, odd, seed);
        let q = QuartetState::from_fock(&psi).unwrap();
        let nf = normal_form(&q).unwrap();
        prop_assert!((nf.alpha * nf.alpha + nf.beta.norm_sqr() - 1.0).abs() < 1e-9);
        prop_assert!((2.0 * nf.alpha * nf.beta.norm() - concurrence_of(&psi).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn concurrence_is_convex(odd in any::<bool>(), seed in any::<u64>(), p in 0.0f64..1.0) {
        let a = state(4, odd, seed);
        let b = state(4, odd, seed.wrapping_add(1));
        let rho = MixedState::mixture(4, &[(p, a.clone()), (1.0 - p, b.clone())]).unwrap();
        let mixed = mixed_concurrence(&rho).unwrap().concurrence;
        let bound = p * concurrence_of(&a).unwrap() + (1.0 - p) * concurrence_of(&b).unwrap();
        prop_assert!(mixed <= bound + 1e-9);
    }

    #[test]
    fn werner_bounded_and_monotone(p in 0.0f64..0.95, odd in any::<bool>(), seed in any::<u64>()) {
        let psi = state(4, odd, seed);
        let c = concurrence_of(&psi).unwrap();
        let lo = mixed_concurrence(&werner_mixture(&psi, p).unwrap()).unwrap().concurrence;
        let hi = mixed_concurrence(&werner_mixture(&psi, p + 0.05).unwrap()).unwrap().concurrence;
        prop_assert!(lo <= p * c + 1e-9);
        prop_assert!(lo <= hi + 1e-9);
    }

    #[test]
    fn decomposition_reconstructs(odd in any::<bool>(), seed in any::<u64>(), rank in 1usize..=8) {
        let mut rng = seeded(seed, 3);
        let parts: Vec<(f64, FockState)> = (0..rank)
            .map(|k| (1.0 / (k as f64 + 1.0), random_state(4, parity(odd), &mut rng)))
            .collect();
        let total: f64 = parts.iter().map(|x| x.0).sum();
        let parts: Vec<_> = parts.into_iter().map(|(w, s)| (w / total, s)).collect();
        let rho = MixedState::mixture(4, &parts).unwrap();
        let dec = optimal_decomposition(&rho).unwrap();
        let err = (dec.reconstruct().unwrap() - rho.matrix()).norm();
        prop_assert!(err < 1e-8);
        let c = mixed_concurrence(&rho).unwrap().concurrence;
        prop_assert!((dec.average_concurrence() - c).abs() < 1e-8);
    }
}
