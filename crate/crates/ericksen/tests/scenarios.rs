use ericksen::io::ledger_string;
use ericksen::scenario::{builtin, builtin_names, convergence_suite, run_scenario, ExitStatus};

#[test]
fn ledgers_are_bit_for_bit_reproducible() {
    for name in ["gl-nonlinear", "oseen-frank-flow"] {
        let sc = builtin(name).unwrap();
        let a = run_scenario(&sc, None).unwrap();
        let b = run_scenario(&sc, None).unwrap();
        assert_eq!(ledger_string(&a.trajectory.records), ledger_string(&b.trajectory.records));
        assert_eq!(a.status, ExitStatus::Pass, "{}", a.report);
    }
}

#[test]
fn short_builtins_pass_their_expectations() {
    for name in builtin_names() {
        if matches!(name, "energy-decay" | "director-relaxation" | "stokes-decay") {
            continue;
        }
        let out = run_scenario(&builtin(name).unwrap(), None).unwrap();
        assert_eq!(out.status, ExitStatus::Pass, "{name}\n{}", out.report);
    }
}

#[test]
fn nonlinear_run_converges_at_fourth_order() {
    let cfg = builtin("gl-nonlinear").unwrap().config;
    let r = convergence_suite(&cfg).unwrap();
    println!("{}", r.table());
    assert!(!r.exact);
    for o in r.state_orders {
        let o = o.expect("errors above roundoff");
        assert!((3.5..=4.5).contains(&o), "order {o}");
    }
}

#[test]
fn linear_relaxation_is_integrated_exactly() {
    let mut cfg = builtin("director-relaxation").unwrap().config;
    cfg.time.dt = 0.05;
    cfg.time.t_end = 0.2;
    let r = convergence_suite(&cfg).unwrap();
    assert!(r.exact, "{}", r.table());
}
