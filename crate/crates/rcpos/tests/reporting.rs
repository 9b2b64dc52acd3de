//! End-to-end tests of the sweep/suite runners and the report contract:
//! exit codes, JSON round trips, determinism, and witness replay.

use rcpos::certify::Verdict;
use rcpos::report::{
    comparable_json, parallelism_invariant_json, render_json, CheckReport, Overall, ReportError,
    SuiteReport, SweepConfig,
};
use rcpos::suite::{explain_item, run_check, run_paper_suite};

fn config(metric: &str, notions: &[&str], points: usize) -> SweepConfig {
    SweepConfig {
        metric: metric.into(),
        notions: notions.iter().map(|s| s.to_string()).collect(),
        points,
        seed: 7,
        ..SweepConfig::default()
    }
}

#[test]
fn check_certifies_fubini_study_and_round_trips() {
    let cfg = config("fubini_study:2", &["rc+", "griffiths", "hsc"], 3);
    let report = run_check(&cfg).expect("sweep runs");
    assert_eq!(report.overall, Overall::Certified);
    assert_eq!(report.exit_code(), 0);
    assert_eq!(report.items.len(), 9);
    assert_eq!(report.items[0].id, "p000-rc+");
    for item in &report.items {
        assert_eq!(item.certificate.verdict, Verdict::Certified);
        assert!(item.certificate.margin > 0.0);
        assert!(!item.certificate.witness_section.is_empty());
    }

    // The JSON rendering is the interchange contract: a report read back
    // from it must re-render to the same bytes.
    let json = render_json(&report).unwrap();
    let back: CheckReport = serde_json::from_str(&json).expect("report round-trips");
    assert_eq!(comparable_json(&report).unwrap(), comparable_json(&back).unwrap());
}

#[test]
fn flat_lands_in_the_inconclusive_band() {
    let report = run_check(&config("flat:2", &["rc+"], 4)).expect("sweep runs");
    assert_eq!(report.overall, Overall::Inconclusive);
    assert_eq!(report.exit_code(), 2);
    for item in &report.items {
        assert_eq!(item.certificate.verdict, Verdict::Inconclusive);
        assert_eq!(item.certificate.margin, 0.0);
    }
}

#[test]
fn poincare_disc_refutes_rc_positivity_with_witnesses() {
    let cfg = config("poincare_disc:1", &["rc+", "rc-"], 4);
    let report = run_check(&cfg).expect("sweep runs");
    assert_eq!(report.overall, Overall::Refuted);
    assert_eq!(report.exit_code(), 1);
    for item in &report.items {
        match item.notion.as_str() {
            "rc+" => {
                assert_eq!(item.certificate.verdict, Verdict::Refuted);
                assert!(item.certificate.margin < 0.0);
                assert!(!item.certificate.witness_section.is_empty());
            }
            "rc-" => assert_eq!(item.certificate.verdict, Verdict::Certified),
            other => panic!("unexpected notion {other}"),
        }
    }
}

#[test]
fn identical_configs_render_identical_reports() {
    let cfg = config("fubini_study:1", &["rc+", "hsc"], 3);
    let a = comparable_json(&run_check(&cfg).unwrap()).unwrap();
    let b = comparable_json(&run_check(&cfg).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn reports_do_not_depend_on_parallelism_degree() {
    let mut cfg = config("fubini_study:2", &["rc+", "griffiths"], 4);
    cfg.jobs = 1;
    let serial = parallelism_invariant_json(&run_check(&cfg).unwrap()).unwrap();
    cfg.jobs = 4;
    let parallel = parallelism_invariant_json(&run_check(&cfg).unwrap()).unwrap();
    assert_eq!(serial, parallel);

    let mut scfg = config("fubini_study:2", &["rc+"], 2);
    scfg.jobs = 1;
    let serial = parallelism_invariant_json(&run_paper_suite(&scfg).unwrap()).unwrap();
    scfg.jobs = 3;
    let parallel = parallelism_invariant_json(&run_paper_suite(&scfg).unwrap()).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn explain_replays_every_item_kind() {
    // rc- on Fubini-Study is refuted, so this also exercises replay of
    // refuted witnesses.
    let cfg = config("fubini_study:2", &["rc+", "rc-", "griffiths", "hsc"], 2);
    let report = run_check(&cfg).unwrap();
    let json = render_json(&report).unwrap();
    for item in &report.items {
        let text = explain_item(&json, &item.id).expect("explain replays");
        assert!(text.contains(&item.id));
        assert!(text.contains("witness section"));
        assert!(text.contains("replayed margin"));
    }

    let scfg = config("fubini_study:2", &["rc+"], 2);
    let sreport = run_paper_suite(&scfg).unwrap();
    let sjson = render_json(&sreport).unwrap();
    assert_eq!(sreport.minimizer_items.len(), 2);
    for item in &sreport.minimizer_items {
        let text = explain_item(&sjson, &item.id).expect("minimizer explain replays");
        assert!(text.contains("relation residuals"));
        assert!(text.contains("first-variation"));
    }
}

#[test]
fn explain_rejects_missing_and_tampered_items() {
    let cfg = config("fubini_study:1", &["rc+"], 1);
    let report = run_check(&cfg).unwrap();
    let json = render_json(&report).unwrap();

    match explain_item(&json, "p999-rc+") {
        Err(ReportError::MissingItem(id)) => assert_eq!(id, "p999-rc+"),
        other => panic!("expected MissingItem, got {other:?}"),
    }

    // A margin edited after the fact must fail the replay comparison.
    let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
    value["items"][0]["certificate"]["margin"] = serde_json::Value::from(123.0);
    let tampered = serde_json::to_string(&value).unwrap();
    match explain_item(&tampered, "p000-rc+") {
        Err(ReportError::ReplayMismatch { stored, .. }) => assert_eq!(stored, 123.0),
        other => panic!("expected ReplayMismatch, got {other:?}"),
    }
}

#[test]
fn suite_rows_cover_the_battery_in_order() {
    let cfg = config("fubini_study:2", &["rc+"], 2);
    let report = run_paper_suite(&cfg).expect("suite runs");
    let names: Vec<&str> = report.rows.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "quotient-rc-inheritance",
            "power-trace-positivity",
            "hyperplane-line-curvature",
            "splitting-monotonicity",
            "minimizer-relations",
            "sphere-averaging",
            "scalar-trace-identity",
        ]
    );
    assert!(report.passed);
    assert_eq!(report.exit_code(), 0);
    for row in &report.rows {
        assert!(row.passed, "row {} failed: {:?}", row.name, row.failures);
        assert!(row.failures.is_empty());
    }
    // Wall-clock accounting exists for every row, whatever its outcome.
    assert_eq!(report.timing.rows_ms.len(), report.rows.len());

    let json = render_json(&report).unwrap();
    let back: SuiteReport = serde_json::from_str(&json).unwrap();
    assert_eq!(comparable_json(&report).unwrap(), comparable_json(&back).unwrap());
}

#[test]
fn flat_suite_passes_vacuously_or_with_equality() {
    let cfg = config("flat:3", &["rc+"], 2);
    let report = run_paper_suite(&cfg).expect("suite runs");
    assert!(report.passed);
    for row in &report.rows {
        assert!(
            row.worst_residual == 0.0 || row.worst_residual < 1e-12,
            "flat row {} has residual {}",
            row.name,
            row.worst_residual
        );
    }
    // The strict-positivity hypotheses cannot be met by the zero tensor.
    let quotient = &report.rows[0];
    assert_eq!(quotient.hypothesis_met, 0);
    assert!(quotient.gated > 0);
}

#[test]
fn non_kahler_suite_runs_minimizer_row_in_expect_failure_mode() {
    let cfg = config("hopf:2", &["rc+"], 2);
    let report = run_paper_suite(&cfg).expect("suite runs");
    assert!(report.passed, "algebraic rows must still pass on hopf");
    let row = report.rows.iter().find(|r| r.name == "minimizer-relations").unwrap();
    assert_eq!(row.hypothesis_met, 0);
    assert_eq!(row.gated, 2);
    assert!(row.note.contains("expect-failure"));
}

#[test]
fn hmet_metrics_resolve_and_gate_non_square_rows() {
    let src = "metric twisted dim=1 rank=2\n\
               h[1][1] = (1 + absq(z1))^-2\n\
               h[2][2] = (1 + absq(z1))^-2\n\
               h[1][2] = 0.05 * z1\n";
    let dir = std::env::temp_dir().join("rcpos-reporting-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("twisted.hmet");
    std::fs::write(&path, src).unwrap();

    let mut cfg = config(path.to_str().unwrap(), &["rc+", "griffiths"], 3);
    let report = run_check(&cfg).expect("hmet sweep runs");
    assert_eq!(report.overall, Overall::Certified);

    cfg.notions = vec!["rc+".into()];
    let suite = run_paper_suite(&cfg).expect("hmet suite runs");
    assert!(suite.passed);
    for name in ["minimizer-relations", "sphere-averaging", "scalar-trace-identity"] {
        let row = suite.rows.iter().find(|r| r.name == name).unwrap();
        assert_eq!(row.hypothesis_met, 0, "{name} must gate on rank != dim");
        assert_eq!(row.gated, 3);
        assert!(row.passed);
    }
    let quotient = suite.rows.iter().find(|r| r.name == "quotient-rc-inheritance").unwrap();
    assert!(quotient.hypothesis_met > 0, "rank-2 positive example must exercise quotients");
    assert_eq!(quotient.conclusion_verified, quotient.hypothesis_met);
}

#[test]
fn markdown_renders_from_the_json_schema() {
    use rcpos::report::{check_markdown, suite_markdown};
    let cfg = config("fubini_study:1", &["rc+", "rc-"], 2);
    let report = run_check(&cfg).unwrap();
    let md = check_markdown(&report);
    assert!(md.contains("| id |"));
    assert!(md.contains("p000-rc+"));
    assert!(md.contains("refuted"));

    let suite = run_paper_suite(&config("fubini_study:1", &["rc+"], 2)).unwrap();
    let md = suite_markdown(&suite);
    assert!(md.contains("quotient-rc-inheritance"));
    assert!(md.contains("sphere-averaging"));
}

#[test]
fn configuration_errors_are_reported_not_panicked() {
    let mut cfg = config("fubini_study:1", &["banana"], 1);
    assert!(matches!(run_check(&cfg), Err(ReportError::UnknownNotion(_))));

    cfg.notions = vec!["rc+".into()];
    cfg.metric = "no_such_metric:2".into();
    assert!(matches!(run_check(&cfg), Err(ReportError::Metric(_))));

    cfg.metric = "/nonexistent/path/metric.hmet".into();
    assert!(matches!(run_check(&cfg), Err(ReportError::Io { .. })));

    cfg.metric = "fubini_study:1".into();
    cfg.bundle = "wedge(base, 1)".into();
    assert!(matches!(run_check(&cfg), Err(ReportError::Bundle(_))));

    cfg.bundle = "base".into();
    cfg.notions = vec![];
    assert!(run_check(&cfg).is_err());
}
