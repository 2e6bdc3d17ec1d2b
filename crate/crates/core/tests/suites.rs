use geokit_core::verify::{run, TheoremId};
use geokit_core::Tol;

#[test]
fn every_suite_passes_on_two_seeds() {
    for id in TheoremId::ALL {
        for seed in [0, 1234] {
            let s = run(id, 40, seed, 8, Tol::default());
            assert!(s.all_passed(), "{id} seed {seed}: {:?} ({:?})", s.first_failure, s.first_failing_seed);
            assert_eq!(s.passed, 40);
        }
    }
}

#[test]
fn suites_are_reproducible() {
    let t = Tol::default();
    assert_eq!(run(TheoremId::Thlast, 10, 7, 6, t), run(TheoremId::Thlast, 10, 7, 6, t));
}
