use std::fs;

use kerr_coupler::scenario::{
    config_from_csv_header, load_config, parse_config, run_scenario, run_sweep, sweep_jobs, ConfigError, Scenario,
};
use kerr_coupler::selfcheck::{run_criteria, SelfCheckOptions};

#[test]
fn load_applies_defaults_and_names_problems() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.conf");
    fs::write(&path, "# minimal\nscenario = truncation\n").unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.scenario, Scenario::Truncation);
    assert_eq!(cfg.grid.len(), 2001);

    fs::write(&path, "scenario = truncation\nsteps = 5\n").unwrap();
    let err = load_config(&path).unwrap_err();
    assert!(err.to_string().contains("'steps'"), "{err}");

    fs::write(&path, "scenario = damped\nkappa_a = -0.5\n").unwrap();
    assert!(matches!(load_config(&path), Err(ConfigError::Invalid { .. })));

    assert!(matches!(
        load_config(&dir.path().join("missing.conf")),
        Err(ConfigError::Io { .. })
    ));
}

#[test]
fn csv_is_deterministic_and_self_describing() {
    let cfg = parse_config("scenario = bell_fidelities\ndim = 6\nn_steps = 50\ntargets = B1, P2\n").unwrap();
    let first = run_scenario(&cfg).unwrap().to_csv();
    let second = run_scenario(&cfg).unwrap().to_csv();
    assert_eq!(first, second);

    let rebuilt = config_from_csv_header(&first).unwrap();
    assert_eq!(run_scenario(&rebuilt).unwrap().to_csv(), first);
}

#[test]
fn probabilities_first_row() {
    let cfg = parse_config("scenario = probabilities\nn_steps = 10\n").unwrap();
    let csv = run_scenario(&cfg).unwrap().to_csv();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "t,p_2_0,p_0_2,p_1_2");
    let first = csv.lines().skip_while(|l| l.starts_with('#')).nth(1).unwrap();
    let values: Vec<f64> = first.split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(values, vec![0.0, 1.0, 0.0, 0.0]);
}

#[test]
fn stronger_damping_lowers_the_b2_peak() {
    let peak = |kappa: &str| {
        let cfg = parse_config(&format!(
            "scenario = damped\ndim = 4\nkappa = 1e8/{kappa}\nt_end = 4e-7\nn_steps = 200\n"
        ))
        .unwrap();
        run_scenario(&cfg)
            .unwrap()
            .column_values("fid_uhlmann_B2")
            .unwrap()
            .into_iter()
            .fold(0.0, f64::max)
    };
    assert!(peak("500") > peak("50"));
}

#[test]
fn sweep_output_is_independent_of_order() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        ("a.conf", "scenario = entropy\ndim = 5\nn_steps = 30\n"),
        ("b.conf", "scenario = chsh\ndim = 5\nn_steps = 30\nepsilon = pi/5\n"),
        ("c.conf", "scenario = probabilities\ndim = 5\nn_steps = 30\noutput_path = out/c.csv\n"),
    ];
    for (name, text) in configs {
        fs::write(dir.path().join(name), text).unwrap();
    }
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();

    let jobs = sweep_jobs(dir.path()).unwrap();
    assert_eq!(jobs.len(), 3);
    let read_all = |jobs: &[kerr_coupler::scenario::SweepJob]| {
        let outcomes = run_sweep(jobs);
        let mut out: Vec<(String, String)> = outcomes
            .into_iter()
            .map(|o| {
                o.result.unwrap();
                (
                    o.job.output_path.display().to_string(),
                    fs::read_to_string(&o.job.output_path).unwrap(),
                )
            })
            .collect();
        out.sort();
        out
    };
    let forward = read_all(&jobs);
    let mut reversed = jobs.clone();
    reversed.reverse();
    assert_eq!(read_all(&reversed), forward);
    assert!(dir.path().join("out/c.csv").exists());
}

#[test]
fn perturbed_hamiltonian_fails_truncation_criterion() {
    let ids = |id: &str| id == "1";
    let clean = run_criteria(SelfCheckOptions::default(), ids, |_| {});
    assert!(clean.all_passed());
    let perturbed = run_criteria(
        SelfCheckOptions {
            perturb_hamiltonian: true,
        },
        ids,
        |_| {},
    );
    assert!(!perturbed.all_passed());
    assert!(perturbed.criteria[0].runtime.as_secs_f64() >= 0.0);
}
