use levelgan_web::{random_level, Evolver};

#[test]
fn random_level_renders_every_pixel() {
    let v = random_level(7, true, 3);
    assert_eq!(v.pixels().len(), v.width() * v.height() * 4);
    assert!(v.segments() >= 1);
    assert!((0.0..=1.0).contains(&v.connectivity()));
    if v.segments() >= 2 {
        assert!((0.0..=1.0).contains(&v.novelty()));
    }
}

#[test]
fn same_seed_same_level() {
    assert_eq!(
        random_level(3, false, 2).pixels(),
        random_level(3, false, 2).pixels()
    );
}

#[test]
fn evolver_champion_never_regresses() {
    let mut e = Evolver::new(1, 8, 8, true).ok().unwrap();
    e.step(5);
    assert_eq!(e.generation(), 5);
    let h = e.history();
    assert_eq!(h.len(), 6);
    assert!(h.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(e.champion(1).path_length(), e.best_path());
}
