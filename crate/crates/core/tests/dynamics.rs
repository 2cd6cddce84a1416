use spinnet::dynamics::unitarity_defect;
use spinnet::oracles::analytic::complete_graph_u11;
use spinnet::{
    expm_step, generator_from_graph, run_trajectory, AdjacencyMatrix, EnsembleSpec, Propagator, TrajectoryParams,
    TrajectorySeed,
};

#[test]
fn unitarity_holds_for_ten_thousand_steps_at_n32() {
    let spec = EnsembleSpec::gilbert(32, 0.3).unwrap();
    let sampler = spec.sampler().unwrap();
    let mut rng = TrajectorySeed::new(77, 0).rng();
    let mut p = Propagator::identity(32);
    let mut worst_step = 0.0f64;
    for k in 0..10_000 {
        let u = expm_step(&generator_from_graph(&sampler.sample(&mut rng).unwrap(), 1.0).unwrap(), 0.015).unwrap();
        worst_step = worst_step.max(unitarity_defect(u.matrix()));
        // U = Uᵀ for a real symmetric generator
        assert!((u.matrix() - u.matrix().transpose()).iter().all(|z| z.norm() < 1e-12));
        p = p.compose(&u).unwrap();
        if k % 1000 == 999 {
            assert!(unitarity_defect(p.matrix()) <= 1e-10, "step {k}");
        }
    }
    assert!(worst_step <= 1e-10, "{worst_step:e}");
}

#[test]
fn single_edge_follows_cosine_to_t100() {
    let a = AdjacencyMatrix::from_edges(2, &[(0, 1)]).unwrap();
    let dt = 0.015;
    let u = expm_step(&generator_from_graph(&a, 1.0).unwrap(), dt).unwrap();
    let mut p = Propagator::identity(2);
    let steps = (100.0 / dt) as usize;
    for k in 1..=steps {
        p = p.compose(&u).unwrap();
        let t = k as f64 * dt;
        assert!((p.amplitude(0, 0).re - t.cos()).abs() <= 1e-9, "t={t}");
        assert!(p.amplitude(0, 0).im.abs() <= 1e-9);
    }
}

#[test]
fn records_keep_unit_row_norm() {
    for (spec, steps) in [
        (EnsembleSpec::gilbert(32, 0.3).unwrap(), 1000),
        (EnsembleSpec::thermal(9, 1.5).unwrap(), 2000),
        (EnsembleSpec::gilbert(2, 0.5).unwrap(), 2000),
    ] {
        let recs = run_trajectory(&spec, &TrajectoryParams::new(0.015, steps), TrajectorySeed::new(1, 2)).unwrap();
        assert_eq!(recs.len(), steps + 1);
        for r in &recs {
            assert!((r.m_norm_check - 2.0).abs() <= 1e-10, "step {}", r.step_index);
        }
    }
}

#[test]
fn complete_graph_trajectory_at_step_100() {
    let params = TrajectoryParams::new(0.015, 100);
    let recs = run_trajectory(&EnsembleSpec::gilbert(32, 1.0).unwrap(), &params, TrajectorySeed::new(9, 9)).unwrap();
    assert!((recs[100].u11 - complete_graph_u11(32, 1.5)).norm() < 1e-10);
}

#[test]
fn coupling_scale_rescales_time() {
    let spec = EnsembleSpec::gilbert(6, 1.0).unwrap();
    let mut fast = TrajectoryParams::new(0.01, 50);
    fast.coupling_scale = 4.0;
    let slow = TrajectoryParams::new(0.04, 50);
    let a = run_trajectory(&spec, &fast, TrajectorySeed::new(0, 0)).unwrap();
    let b = run_trajectory(&spec, &slow, TrajectorySeed::new(0, 0)).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.u11 - y.u11).norm() < 1e-12);
    }
}
