use fracpq_core::*;

fn params() -> OperatorParams {
    OperatorParams::new(2.0, 2.0, 0.75, 0.35).unwrap()
}

#[test]
fn supersolution_constant_positive_along_alpha_sweep() {
    let g = Grid::new(0.0, 1.0, 512, 1.0).unwrap();
    let mut alpha = 0.1;
    while alpha <= 0.74 + 1e-12 {
        let r = verify_barrier_super(&g, &BarrierSpec::new(alpha, 0.0, 0.25), &params(), 0.25).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.inf_scaled_p_value > 0.0);
        alpha += 0.16;
    }
}

#[test]
fn supersolution_constant_with_shift() {
    let g = Grid::new(0.0, 1.0, 512, 1.0).unwrap();
    for kappa in [0.0, 1e-3, 1e-2] {
        let r = verify_barrier_super(&g, &BarrierSpec::new(0.4, kappa, 0.25), &params(), 0.25).unwrap();
        assert!(r.inf_scaled_p_value > 0.0, "{r:?}");
    }
}

#[test]
fn barrier_reports_are_scale_consistent() {
    // (-Δ)_p^{s1} is homogeneous of degree ps1 - α(p-1) on w̄ under dilation,
    // which the scaled infimum cancels.
    for alpha in [0.2, 0.6] {
        let small = Grid::new(0.0, 0.5, 256, 0.5).unwrap();
        let large = Grid::new(0.0, 1.0, 256, 1.0).unwrap();
        let a = verify_barrier_super(&small, &BarrierSpec::new(alpha, 0.0, 0.1), &params(), 0.1).unwrap();
        let b = verify_barrier_super(&large, &BarrierSpec::new(alpha, 0.0, 0.2), &params(), 0.2).unwrap();
        let ratio = b.inf_scaled_p_value / a.inf_scaled_p_value;
        assert!((ratio - 1.0).abs() <= 0.1, "alpha {alpha}: {ratio}");
    }
}

#[test]
fn q_operator_bounded_off_resonance() {
    let g = Grid::new(0.0, 0.5, 512, 0.5).unwrap();
    let r = verify_barrier_q_bounded(&g, &params(), 0.1, None, 0.0, 0.1).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.alpha, 0.75);
    assert!(r.band_nodes > 0);
}
