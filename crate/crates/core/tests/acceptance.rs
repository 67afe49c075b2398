//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use milnor_core::config::Settings;
use milnor_core::germ::{builtin_germ, catalog, GermSpec};
use milnor_core::harness::{verify_section_suite, verify_sphere, verify_task, verify_transport, VerifyReport};
use milnor_core::linalg::{dist, norm};
use milnor_core::taskplan::tc_value;
use milnor_core::transport::monodromy;
use milnor_core::tube::{sample_tube_point, TubePoint};

const SEED: u64 = 0x5eed;

struct Outcome {
    pass: bool,
    detail: String,
}

fn worst(r: &VerifyReport, key: &str) -> f64 {
    r.worst.get(key).copied().unwrap_or(f64::NAN)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn regions_and_time() -> (Outcome, Vec<VerifyReport>) {
    let mut pass = true;
    let mut detail = Vec::new();
    let mut reports = Vec::new();
    for (m, want) in [(1, 2), (2, 3), (3, 2)] {
        let (r, dt) = timed(|| verify_sphere(m, 10_000, SEED, 256));
        let ok = r.regions_observed.len() == want && dt < Duration::from_secs(5);
        pass &= ok;
        detail.push(format!("S{m}: {:?} in {:.2}s", r.regions_observed, dt.as_secs_f64()));
        reports.push(r);
    }
    (Outcome { pass, detail: detail.join("; ") }, reports)
}

fn sphere_contract(reports: &[VerifyReport]) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for r in reports {
        let (e, n) = (worst(r, "endpoint_error"), worst(r, "norm_error"));
        pass &= r.pass && r.trials >= 10_000 && e <= 1e-9 && n <= 1e-9;
        detail.push(format!("{} failures={} endpoint={e:.1e} norm={n:.1e}", r.suite, r.failures));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn lifting(germs: &[GermSpec]) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for g in germs {
        let (r, dt) = timed(|| verify_transport(g, 2048, SEED));
        let res = worst(&r, "dense_level_residual");
        let ratio = r.moduli.get("convergence_ratio").copied().unwrap_or(f64::NAN);
        let ok = r.pass && res <= 1e-6 && dt < Duration::from_secs(10);
        pass &= ok;
        detail.push(format!("{} res={res:.1e} ratio={ratio:.1} {:.1}s", g.name, dt.as_secs_f64()));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn sections() -> Outcome {
    let s = Settings::default();
    let mut pass = true;
    let mut detail = Vec::new();
    for name in ["projection3to2", "complex-z2w2", "complex-z2w3", "arrangement-braid2"] {
        let g = builtin_germ(name).unwrap();
        let (r, dt) = timed(|| verify_section_suite(&g, &s, None));
        let (res, cl) = (worst(&r, "max_residual"), worst(&r, "closure_defect"));
        pass &= r.pass && res <= 1e-6 && cl <= 1e-5 && dt < Duration::from_secs(30);
        detail.push(format!("{name} res={res:.1e} closure={cl:.1e} {:.1}s", dt.as_secs_f64()));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn tasks(germs: &[GermSpec]) -> Outcome {
    let s = Settings::default();
    let mut pass = true;
    let mut detail = Vec::new();
    for g in germs {
        let (r, dt) = timed(|| verify_task(g, &s, 1000));
        let tc = tc_value(g);
        let ok = r.pass
            && r.trials >= 1000
            && worst(&r, "end_residual") <= 1e-6
            && r.regions_observed.iter().all(|&i| (1..=tc).contains(&i))
            && dt < Duration::from_secs(60);
        pass &= ok;
        detail.push(format!(
            "{} tc={tc} regions={:?} end={:.1e} {:.1}s",
            g.name,
            r.regions_observed,
            worst(&r, "end_residual"),
            dt.as_secs_f64()
        ));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn monodromy_evidence() -> Outcome {
    let g = builtin_germ("complex-z2w2").unwrap();
    let x0 = sample_tube_point(&g, SEED, 0).unwrap();
    let fwd = monodromy(&g, &x0, 1, 2048).unwrap();
    let disp = dist(&fwd.endpoint.x, &x0.x);
    let landed = dist(&g.map.eval(&fwd.endpoint.x).unwrap(), &x0.fx);
    let generic = disp > 0.1 * norm(&x0.x) && landed <= 1e-6;

    // oracle: for real (z, w) the lift of δe^{iφ} is e^{iφ/2}·x0, so one
    // loop sends x0 to −x0
    let r = g.delta.sqrt();
    let real = TubePoint::new(&g, vec![r * 0.6, 0.0, r * 0.8, 0.0]).unwrap();
    let end = monodromy(&g, &real, 1, 2048).unwrap().endpoint.x;
    let minus: Vec<f64> = real.x.iter().map(|v| -v).collect();
    let oracle = dist(&end, &minus);

    let p = builtin_germ("projection3to2").unwrap();
    let y0 = sample_tube_point(&p, SEED, 0).unwrap();
    let trivial = dist(&monodromy(&p, &y0, 1, 2048).unwrap().endpoint.x, &y0.x);

    Outcome {
        pass: generic && oracle <= 1e-6 && trivial <= 1e-5,
        detail: format!(
            "z2w2 disp/|x0|={:.3} landed={landed:.1e} oracle_err={oracle:.1e}; projection disp={trivial:.1e}",
            disp / norm(&x0.x)
        ),
    }
}

fn faults() -> Outcome {
    let dir = std::env::temp_dir().join(format!("milnor-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad-radii.json");
    std::fs::write(&cfg, r#"{"delta": 0.4, "epsilon": 0.5}"#).unwrap();
    let code = |args: &[&str], extra: Option<&std::path::Path>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_milnor"));
        c.args(args);
        if let Some(p) = extra {
            c.arg("--config").arg(p);
        }
        c.output().unwrap().status.code()
    };
    let clean_tube = code(&["verify", "tube", "--germ", "complex-z2w2"], None);
    let bad_tube = code(&["verify", "tube", "--germ", "complex-z2w2"], Some(&cfg));
    let clean_section = code(&["verify", "section", "--germ", "complex-z2w2"], None);
    let bad_section = code(&["verify", "section", "--germ", "complex-z2w2", "--perturb", "1e-2"], None);
    let _ = std::fs::remove_dir_all(&dir);
    Outcome {
        pass: clean_tube == Some(0)
            && clean_section == Some(0)
            && matches!(bad_tube, Some(c) if c != 0)
            && matches!(bad_section, Some(c) if c != 0),
        detail: format!(
            "tube clean={clean_tube:?} delta=0.4 {bad_tube:?}; section clean={clean_section:?} perturbed={bad_section:?}"
        ),
    }
}

fn main() -> ExitCode {
    let germs = catalog();
    let (c1, sphere_reports) = regions_and_time();
    let results = [
        ("TC region counts", c1),
        ("sphere planner contract", sphere_contract(&sphere_reports)),
        ("lifting fidelity", lifting(&germs)),
        ("cross-sections", sections()),
        ("tasking planner", tasks(&germs)),
        ("monodromy evidence", monodromy_evidence()),
        ("fault sensitivity", faults()),
    ];
    let mut all = true;
    for (k, (name, o)) in results.iter().enumerate() {
        all &= o.pass;
        println!(
            "criterion {} [{}] {name}: {}",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
