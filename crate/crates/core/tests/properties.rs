use std::f64::consts::PI;
use std::sync::OnceLock;

use planar_squeeze::bound::{cj_exact, DEFAULT_TOL};
use planar_squeeze::entanglement::{s2, MultiSiteState, SignConfig};
use planar_squeeze::interferometer::{
    noise_bound, output_distribution_in, signal_variance, JxEigenbasis, PhaseSetting,
};
use planar_squeeze::spin::shifted_sums;
use planar_squeeze::{SpinQuantumNumber, SpinState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bounds() -> &'static [f64] {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    CACHE.get_or_init(|| {
        (0..=24u32)
            .map(|t| {
                cj_exact(SpinQuantumNumber::from_two_j(t), DEFAULT_TOL)
                    .unwrap()
                    .c_exact
            })
            .collect()
    })
}

fn random_state(two_j: u32, seed: u64) -> SpinState {
    SpinState::random(
        SpinQuantumNumber::from_two_j(two_j),
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn total_spin_is_casimir(two_j in 0u32..=24, seed in any::<u64>()) {
        let psi = random_state(two_j, seed);
        let j = psi.j();
        let m = psi.moments();
        prop_assert!((m.total_spin() - j.casimir()).abs() <= 1e-9 * j.casimir().max(1.0));
    }

    #[test]
    fn planar_sum_is_rotation_invariant(two_j in 1u32..=24, seed in any::<u64>(), angle in -PI..PI) {
        let psi = random_state(two_j, seed);
        let a = psi.moments().planar_sum;
        let b = psi.rotate_about_z(angle).moments().planar_sum;
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn planar_sum_respects_bound(two_j in 1u32..=24, seed in any::<u64>()) {
        let psi = random_state(two_j, seed);
        prop_assert!(psi.moments().planar_sum >= bounds()[two_j as usize] - 1e-9);
    }

    #[test]
    fn separable_products_respect_witness(two_j in 1u32..=2, seed in any::<u64>(), anti in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = SpinQuantumNumber::from_two_j(two_j);
        let state = MultiSiteState::product(&[SpinState::random(j, &mut rng), SpinState::random(j, &mut rng)]).unwrap();
        let signs = if anti {
            SignConfig::new(vec![1, -1], vec![1, 1]).unwrap()
        } else {
            SignConfig::all_plus(2)
        };
        prop_assert!(s2(&state, &signs).unwrap() >= 2.0 * bounds()[two_j as usize] - 1e-9);
    }

    #[test]
    fn three_site_products_respect_witness(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = SpinQuantumNumber::from_two_j(1);
        let sites: Vec<_> = (0..3).map(|_| SpinState::random(j, &mut rng)).collect();
        let state = MultiSiteState::product(&sites).unwrap();
        let signs = SignConfig::new(vec![1, -1, 1], vec![-1, 1, 1]).unwrap();
        prop_assert!(s2(&state, &signs).unwrap() >= 3.0 * bounds()[1] - 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distribution_matches_moments(two_j in 1u32..=16, seed in any::<u64>(), alpha in -PI..PI) {
        let psi = random_state(two_j, seed);
        let basis = JxEigenbasis::new(psi.j()).unwrap();
        let d = output_distribution_in(&basis, &psi, PhaseSetting::from_alpha(alpha)).unwrap();
        let m = psi.rotate_about_z(-alpha).moments();
        prop_assert!((d.total_probability() - 1.0).abs() <= 1e-12);
        prop_assert!(d.probabilities.iter().all(|&p| p >= 0.0));
        prop_assert!((d.mean() - 2.0 * m.mean_x()).abs() <= 1e-8);
        prop_assert!((d.variance() - 4.0 * m.var_x()).abs() <= 1e-8);
    }

    #[test]
    fn signal_variance_below_planar_sum(two_j in 1u32..=16, seed in any::<u64>()) {
        let m = random_state(two_j, seed).moments();
        for k in 0..100 {
            let a = -PI + 2.0 * PI * k as f64 / 100.0;
            prop_assert!(signal_variance(&m, a) <= noise_bound(&m) + 1e-12);
        }
    }

    #[test]
    fn shifted_sums_match_operator_moments(two_j in 1u32..=30, seed in any::<u64>()) {
        let j = SpinQuantumNumber::from_two_j(two_j);
        let psi = SpinState::random_real(j, &mut ChaCha8Rng::seed_from_u64(seed));
        let r: Vec<f64> = psi.amplitudes().iter().map(|z| z.re).collect();
        let m = psi.moments();
        let (xx, yy) = shifted_sums::squared_components(j, &r);
        prop_assert!((shifted_sums::mean_x(j, &r) - m.mean_x()).abs() <= 1e-10 * j.value().max(1.0));
        prop_assert!((xx - m.second[0][0]).abs() <= 1e-9 * j.casimir());
        prop_assert!((yy - m.second[1][1]).abs() <= 1e-9 * j.casimir());
        let sq = shifted_sums::squared_planar_projection(j, &r);
        prop_assert!((sq - (m.second[0][0] + m.second[1][1])).abs() <= 1e-9 * j.casimir());
    }
}
