//! Drive the full config -> solve -> analyze -> report pipeline in-process,
//! exactly as the `brlab analyze` subcommand does, and inspect the artifacts
//! it writes (`report.json`, `runs.csv`).
//!
//! Run with `cargo run --example scenario_pipeline`.

use brlab::config::{AnalysisPlan, Ball, Eta0Choice, Scenario, ScenarioConfig};
use brlab::runner::{read_report, run_analyze, summarize_report};
use brlab::{GridSpec, PotentialKind, SolveParams};

fn main() {
    let config = ScenarioConfig {
        grid: GridSpec { n: 1, h: 1.0 / 64.0, half_widths: vec![1.0], height: 1.0 },
        potential: PotentialKind::QuarticDoubleWell,
        scenario: Scenario::TwoPhase,
        epsilons: vec![0.2, 0.1, 0.05],
        solver: SolveParams::default(),
        analysis: AnalysisPlan {
            eta0: Eta0Choice::Fixed(1.2),
            balls: vec![
                Ball { center: [0.0, 0.0], radius: 0.2 },
                Ball { center: [0.6, 0.0], radius: 0.15 },
            ],
            battery_centers: vec![[0.45, 0.0], [-0.45, 0.0]],
            battery_scales: vec![0.1],
            decay_lo: [0.3, 0.0],
            decay_hi: [0.9, 0.0],
            ..AnalysisPlan::default()
        },
        output_dir: None,
        seed: 7,
    };
    config.validate().expect("config invariants");

    let out = std::env::temp_dir().join("brlab_scenario_pipeline");
    let report = run_analyze(&config, &out, None).expect("pipeline run");
    println!(
        "analyzed {} members into {}",
        report.runs.len(),
        out.display()
    );
    for name in ["report.json", "runs.csv"] {
        let path = out.join(name);
        println!("  {:>12}: {} bytes", name, std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0));
    }

    println!();
    let v = read_report(&out.join("report.json")).expect("readable report");
    println!("{}", summarize_report(&v));
}
