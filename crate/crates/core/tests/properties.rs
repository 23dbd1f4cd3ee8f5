use approx::assert_relative_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use finray_core::design::{
    calibrate_loss, required_fingertip_force, rom_check, sweep, Axis, CalibrationDataset,
    CalibrationPoint, CalibrationSettings, CountRange, DesignSpace, Digit, RomLimits,
};
use finray_core::io::format::sig9;
use finray_core::{
    conform, fingertip_force, solve_equilibrium, GraspScenario, LoadedChain, OracleOptions,
    PhalangeDesign, SegmentGeometry, StaticsOptions, TerminalReading, Tolerances,
};

#[derive(Debug, Clone)]
struct Instance {
    n: usize,
    length: f64,
    depth: f64,
    loss: f64,
    tension: f64,
    wrap: f64,
}

impl Instance {
    fn design(&self) -> PhalangeDesign {
        PhalangeDesign::new(
            self.n,
            SegmentGeometry::new(self.length, self.depth).unwrap(),
            self.loss,
        )
        .unwrap()
    }

    fn scenario(&self) -> GraspScenario {
        GraspScenario::cylinder(self.n as f64 * self.length / self.wrap, self.tension).unwrap()
    }
}

fn instance() -> impl Strategy<Value = Instance> {
    (
        1usize..=6,
        8.0..25.0,
        3.0..10.0,
        0.6..=1.0,
        1.0..60.0,
        0.05..2.5,
    )
        .prop_map(|(n, length, depth, loss, tension, wrap)| Instance {
            n,
            length,
            depth,
            loss,
            tension,
            wrap,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn segments_stay_rigid(inst in instance()) {
        let cfg = conform(&inst.design(), &inst.scenario(), &Tolerances::default()).unwrap();
        for w in cfg.joints.windows(2) {
            prop_assert!(((w[1] - w[0]).norm() - inst.length).abs() < 1e-9 * inst.length);
        }
        prop_assert!(cfg.joints[inst.n].norm() <= inst.n as f64 * inst.length * (1.0 + 1e-12));
    }

    #[test]
    fn conformation_angles_decrease(inst in instance()) {
        let cfg = conform(&inst.design(), &inst.scenario(), &Tolerances::default()).unwrap();
        for w in cfg.theta.windows(2) {
            prop_assert!(w[0] > w[1]);
        }
        for i in 0..inst.n {
            prop_assert!((cfg.phi[i] - cfg.theta[i + 1] / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn kinematics_match_complex_chain(inst in instance()) {
        let cfg = conform(&inst.design(), &inst.scenario(), &Tolerances::default()).unwrap();
        let mut joint = Complex64::new(0.0, 0.0);
        for i in 0..inst.n {
            let u = Complex64::from_polar(1.0, -cfg.theta[i]);
            let m = Complex64::new(0.0, -1.0) * u;
            let hole = joint + u * (inst.length / 2.0) + m * inst.depth;
            joint += u * inst.length;
            prop_assert!((hole.re - cfg.holes[i].x).abs() < 1e-9);
            prop_assert!((hole.im - cfg.holes[i].y).abs() < 1e-9);
            prop_assert!((joint.re - cfg.joints[i + 1].x).abs() < 1e-9);
            prop_assert!((joint.im - cfg.joints[i + 1].y).abs() < 1e-9);
        }
        let tip = joint + Complex64::from_polar(inst.length / 2.0, -cfg.theta[inst.n - 1]);
        prop_assert!((tip.re - cfg.tip.x).abs() < 1e-9 && (tip.im - cfg.tip.y).abs() < 1e-9);
    }

    #[test]
    fn tension_is_conserved(inst in instance()) {
        let sol = fingertip_force(&inst.design(), &inst.scenario(), &StaticsOptions::default()).unwrap();
        let t = &sol.tensions;
        let total: f64 = t.frictions.iter().sum::<f64>() + t.terminal_tension;
        prop_assert!((total - inst.tension).abs() <= 1e-12 * inst.tension);
    }

    #[test]
    fn force_is_homogeneous_in_tension(inst in instance(), k in 0.01..100.0f64) {
        let opts = StaticsOptions::default();
        let a = fingertip_force(&inst.design(), &inst.scenario(), &opts).unwrap();
        let scaled = inst.scenario().with_tension(k * inst.tension).unwrap();
        let b = fingertip_force(&inst.design(), &scaled, &opts).unwrap();
        prop_assert!((b.p_tip - k * a.p_tip).abs() <= 1e-12 * b.p_tip.abs().max(1.0));
    }

    #[test]
    fn terminal_tension_grows_with_loss(inst in instance(), dc in 0.001..0.3f64) {
        let opts = StaticsOptions::default();
        let lo = fingertip_force(&inst.design(), &inst.scenario(), &opts).unwrap();
        let c_hi = (inst.loss + dc).min(1.0);
        prop_assume!(c_hi > inst.loss);
        let hi_design = inst.design().with_loss(c_hi).unwrap();
        let hi = fingertip_force(&hi_design, &inst.scenario(), &opts).unwrap();
        prop_assert!(hi.tensions.terminal_tension > lo.tensions.terminal_tension);
        let shed = |s: &finray_core::StaticsSolution| s.tensions.frictions.iter().sum::<f64>();
        prop_assert!(shed(&hi) < shed(&lo));
    }

    #[test]
    fn tip_moment_balances_sum(inst in instance()) {
        let sol = fingertip_force(&inst.design(), &inst.scenario(), &StaticsOptions::default()).unwrap();
        let lhs = sol.configuration.tip.cross(sol.p_tip_vector).abs();
        prop_assert!((lhs - sol.moment_sum()).abs() <= 1e-10 * sol.moment_sum());
        prop_assert!(sol.signed_moments.is_consistent(1e-12));
    }

    #[test]
    fn equilibrium_solve_agrees(inst in instance()) {
        let design = inst.design();
        let opts = StaticsOptions::default();
        let sol = fingertip_force(&design, &inst.scenario(), &opts).unwrap();
        let chain = LoadedChain::from_model(
            &design,
            &sol.configuration,
            &sol.tensions,
            &sol.kink_forces,
            0.0,
            TerminalReading::TipDirection,
        )
        .unwrap();
        let o = solve_equilibrium(&chain, &OracleOptions::default()).unwrap();
        prop_assert!((o.p_tip - sol.p_tip).abs() <= 1e-6 * sol.p_tip);
    }

    #[test]
    fn requirement_is_linear_in_mass(m in 0.01..20.0f64, k in 0.1..10.0f64) {
        let a = required_fingertip_force(m, 0.4, 2.0, 2).unwrap();
        let b = required_fingertip_force(k * m, 0.4, 2.0, 2).unwrap();
        assert_relative_eq!(b, k * a, max_relative = 1e-12);
    }

    #[test]
    fn tighter_objects_never_relax_rom(r in 5.0..200.0f64, shrink in 0.1..1.0f64) {
        let design = PhalangeDesign::new(3, SegmentGeometry::new(15.0, 6.0).unwrap(), 0.7).unwrap();
        let tol = Tolerances::default();
        let limits = RomLimits::default();
        let loose = rom_check(&design, &GraspScenario::cylinder(r, 10.0).unwrap(), &limits, Digit::Finger, 0.0, &tol).unwrap();
        let tight = rom_check(&design, &GraspScenario::cylinder(r * shrink, 10.0).unwrap(), &limits, Digit::Finger, 0.0, &tol).unwrap();
        for (a, b) in loose.joints.iter().zip(&tight.joints) {
            prop_assert!(a.pass || !b.pass);
        }
        prop_assert!(loose.pass || !tight.pass);
    }

    #[test]
    fn sig9_round_trips(x in prop::num::f64::NORMAL) {
        let y: f64 = sig9(x).parse().unwrap();
        prop_assert!((y - x).abs() <= 5e-9 * x.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn calibration_recovers_loss(inst in instance()) {
        let design = inst.design();
        let opts = StaticsOptions::default();
        let ratio = fingertip_force(&design, &inst.scenario().with_tension(1.0).unwrap(), &opts)
            .unwrap()
            .p_tip;
        let points = [10.0, 20.0, 44.0]
            .iter()
            .map(|&t| CalibrationPoint { tension: t, force: t * ratio })
            .collect();
        let data = CalibrationDataset::new("synthetic", points).unwrap();
        let report = calibrate_loss(&design, &inst.scenario(), &data, &opts, &CalibrationSettings::default()).unwrap();
        let refit = fingertip_force(&design.with_loss(report.loss).unwrap(), &inst.scenario().with_tension(1.0).unwrap(), &opts)
            .unwrap()
            .p_tip;
        prop_assert!((refit - ratio).abs() <= 1e-9 * ratio);
    }
}

#[test]
fn sweep_is_deterministic() {
    let space = DesignSpace {
        segments: CountRange { min: 2, max: 4 },
        length: Axis::range(8.0, 25.0, 4),
        depth: Axis::range(3.0, 10.0, 4),
        loss: Axis::range(0.6, 1.0, 3),
        tip_length: None,
        tip_inclination: 0.0,
        scenario: GraspScenario::cylinder(45.0, 44.0).unwrap(),
    };
    let a = sweep(&space, &StaticsOptions::default()).unwrap();
    let b = sweep(&space, &StaticsOptions::default()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.rows.len(), 3 * 4 * 4 * 3);
    assert!(a.rows.iter().enumerate().all(|(i, r)| r.index == i));
}
