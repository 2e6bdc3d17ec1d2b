use geokit_core::linalg::reigenvalues;
use geokit_core::pencils::uncontrollable_eigenvalues;
use geokit_core::sysmodel::random_uncontrollable_system;
use geokit_core::{GenSpec, RMat, Tol};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn uncontrollable_eigenvalues_survive_every_feedback() {
    let t = Tol::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..40u64 {
        let n = 2 + (seed as usize % 6);
        let m = 1 + (seed as usize % 2);
        let k = 1 + (seed as usize % (n - 1));
        let sys = random_uncontrollable_system(&GenSpec::new(n, m, 0, seed), k).unwrap();
        let fixed = uncontrollable_eigenvalues(&sys.a, &sys.b, t);
        assert_eq!(fixed.len(), k, "seed {seed}");
        for _ in 0..5 {
            let f = RMat::from_fn(m, n, |_, _| rng.random_range(-3.0..3.0));
            let closed = reigenvalues(&(&sys.a + &sys.b * &f));
            for z in &fixed {
                let gap = closed.iter().map(|c| (c - z).norm()).fold(f64::INFINITY, f64::min);
                assert!(gap < 1e-6 * z.norm().max(1.0), "seed {seed}: {z} moved by {gap:e}");
            }
        }
    }
}
