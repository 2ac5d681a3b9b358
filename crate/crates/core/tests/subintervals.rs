use ou_crossing::crossing::{
    bridge_crossing_prob, interval_crossing_subbarriers, Grid, KernelSettings,
};
use ou_crossing::eigen::build_eigensystem;
use ou_crossing::fpt::fpt_survival;
use ou_crossing::OuParams;

fn grid() -> Grid {
    Grid::new(-5.0, 5.0, 1001).unwrap()
}

#[test]
fn one_piece_is_the_first_passage_probability() {
    let s = KernelSettings::default();
    let got = interval_crossing_subbarriers(0.2, None, &[0.0, 0.8], &[1.3], &grid(), &s).unwrap();
    let want = 1.0 - fpt_survival(&OuParams::standard(), 0.2, 1.3, 0.8, 80).unwrap().prob;
    assert!((got - want).abs() < 1e-6, "{got} vs {want}");
}

#[test]
fn splitting_a_constant_barrier_changes_nothing() {
    let s = KernelSettings::default();
    let whole = interval_crossing_subbarriers(0.0, None, &[0.0, 1.0], &[1.2], &grid(), &s).unwrap();
    let split =
        interval_crossing_subbarriers(0.0, None, &[0.0, 0.5, 1.0], &[1.2, 1.2], &grid(), &s).unwrap();
    assert!((whole - split).abs() < 1e-5, "{whole} vs {split}");
}

#[test]
fn one_piece_with_end_state_is_the_bridge_probability() {
    let s = KernelSettings::default();
    // the time-domain bridge integral converges only algebraically in K
    let es = build_eigensystem(1.3, 200).unwrap();
    for zn in [-0.5, 0.4, 1.0] {
        let got =
            interval_crossing_subbarriers(0.2, Some(zn), &[0.0, 0.8], &[1.3], &grid(), &s).unwrap();
        let want = bridge_crossing_prob(0.2, zn, 1.3, 0.8, &es, 32).unwrap();
        assert!((got / want - 1.0).abs() < 1e-3, "z_next={zn}: {got} vs {want}");
    }
}
