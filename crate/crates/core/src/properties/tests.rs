use super::*;

fn quick() -> CheckConfig {
    CheckConfig {
        instances: Some(5),
        max_len: 4,
        dilation_len: 5,
        ..CheckConfig::default()
    }
}

#[test]
fn every_check_passes_on_a_small_run() {
    for report in run_all(&quick(), 0) {
        assert!(report.verdict.is_pass(), "{report:#?}");
        assert!(report.instances >= 5, "{}", report.name);
        assert!(report.witnesses.len() <= MAX_WITNESSES);
    }
}

#[test]
fn reports_are_deterministic() {
    let a = run_check("convexity", &quick(), 9).unwrap();
    let b = run_check("convexity", &quick(), 9).unwrap();
    assert_eq!(a, b);
    let c = run_check("convexity", &quick(), 10).unwrap();
    assert_ne!(a.witnesses, c.witnesses);
}

#[test]
fn unknown_and_empty_filters_are_errors() {
    match run_check("nonsense", &quick(), 0) {
        Err(Error::UnknownCheck { registry, .. }) => assert_eq!(registry.len(), 15),
        other => panic!("{other:?}"),
    }
    assert!(run_selected(&[], &quick(), 0).is_err());
    let one = run_selected(&["dilation".to_string()], &quick(), 0).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].name, "dilation");
}

#[test]
fn selected_reports_follow_registry_order() {
    let names = vec!["variational".to_string(), "bound_log_cells".to_string()];
    let reports = run_selected(&names, &quick(), 0).unwrap();
    assert_eq!(reports[0].name, "bound_log_cells");
    assert_eq!(reports[1].name, "variational");
}

#[test]
fn small_budget_surfaces_as_error_verdict() {
    let config = CheckConfig {
        budget: 3,
        ..quick()
    };
    let reports = run_all(&config, 0);
    let errors = reports
        .iter()
        .filter(|r| matches!(r.verdict, Verdict::Error(_)))
        .count();
    assert!(errors > 0);
    for r in &reports {
        if let Verdict::Error(msg) = &r.verdict {
            assert!(msg.contains("budget"), "{msg}");
        }
    }
}

#[test]
fn witnesses_keep_the_worst_comparisons() {
    let config = CheckConfig::default();
    let mut ctx = Ctx {
        rng: Rng64::seed_from_u64(0),
        config: &config,
        instances: 0,
        enumerator: Enumerator::default(),
        evaluated: 0,
        max_violation: 0.0,
        witnesses: Vec::new(),
    };
    for (i, v) in [0.1, 0.5, 0.0, 0.3, 0.2].into_iter().enumerate() {
        ctx.le(v, 0.0, || i.to_string());
    }
    ctx.eq(1.0, 1.0, || "eq".into());
    let kept: Vec<&str> = ctx.witnesses.iter().map(|w| w.inputs.as_str()).collect();
    assert_eq!(kept, ["1", "3", "4"]);
    assert_eq!(ctx.max_violation, 0.5);
}
