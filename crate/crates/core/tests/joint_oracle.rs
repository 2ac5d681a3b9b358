//! Joint crossing probabilities against a separate NumPy/mpmath
//! implementation of the same spectral kernels (16 terms, eigenvalues and
//! norms in 30-digit arithmetic, dense kernel matrices on the default grid).

use ou_crossing::crossing::{
    joint_survival_quadrature, joint_survival_simplified, Direction, Grid, JointProblem,
    KernelSettings,
};

const TWO_INTERVALS: [(f64, f64, f64); 7] = [
    (1.0, 1.0, 0.15228752376949234),
    (1.0, 2.0, 0.014283224611249567),
    (2.0, 1.0, 0.005823017278434488),
    (2.0, 2.0, 0.002720797300321092),
    (2.0, 3.0, 5.0808397342049656e-05),
    (3.0, 2.0, 1.45791172372713e-05),
    (3.0, 3.0, 5.466598167278029e-06),
];

/// Barrier 2 on N unit intervals: (N, nested, product form).
const BARRIER_TWO: [(usize, f64, f64); 3] = [
    (3, 0.00037144346395930424, 0.000757732454405699),
    (4, 6.455091202651942e-05, 0.00019657779759336754),
    (5, 1.0568965218155869e-05, 5.053749108988188e-05),
];

#[test]
fn two_intervals() {
    let (g, s) = (Grid::default(), KernelSettings::default());
    for (b1, b2, want) in TWO_INTERVALS {
        let p = JointProblem::unit_intervals(0.0, &[b1, b2], Direction::AllAbove).unwrap();
        let got = joint_survival_quadrature(&p, &g, &s).unwrap().prob;
        assert!(
            (got - want).abs() < 1e-7 * want + 1e-11,
            "({b1}, {b2}): {got} vs {want}"
        );
    }
}

#[test]
fn more_intervals() {
    let (g, s) = (Grid::default(), KernelSettings::default());
    for (n, nested, product) in BARRIER_TWO {
        let p = JointProblem::unit_intervals(0.0, &vec![2.0; n], Direction::AllAbove).unwrap();
        let got = joint_survival_quadrature(&p, &g, &s).unwrap().prob;
        assert!(
            (got - nested).abs() < 1e-7 * nested,
            "N={n}: {got} vs {nested}"
        );
        let got = joint_survival_simplified(&p, &g, &s).unwrap().prob;
        assert!(
            (got - product).abs() < 1e-7 * product,
            "N={n}: product {got} vs {product}"
        );
    }
}
