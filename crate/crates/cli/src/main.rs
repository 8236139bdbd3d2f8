mod args;
mod config;

use std::process::ExitCode;
use std::str::FromStr;

use clap::Parser;

use suprank::centrality::Measure;
use suprank::graph::ingest_edge_list;
use suprank::pipeline::{
    run_analyze, run_simulate, run_snapshot, run_top, AnalyzeSummary, RunConfig,
};
use suprank::Result;

use args::{Cli, Command, TopArgs};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help / --version are successes, not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let file = config::load_file_config(cli)?;
    let resolved = config::resolve(cli, &file)?;

    match &cli.command {
        Command::Snapshot => cmd_snapshot(&resolved),
        Command::Analyze => cmd_analyze(&resolved),
        Command::Simulate(args) => cmd_simulate(args, &resolved, &file.synth),
        Command::Top(args) => cmd_top(args, &resolved),
    }
}

fn build_run_config(resolved: &config::Resolved) -> Result<RunConfig> {
    let input = resolved.require_input()?;
    // Peek at the data only when the range is not fully specified.
    let snapshot = if resolved.start.is_some() && resolved.end.is_some() {
        resolved.snapshot_config(None)?
    } else {
        let (list, _) = ingest_edge_list(&input, &resolved.ingest)?;
        resolved.snapshot_config(list.time_range())?
    };
    Ok(RunConfig::new(
        input,
        resolved.ingest.clone(),
        snapshot,
        resolved.trajectory.clone(),
        resolved.out_dir.clone(),
        resolved.format,
        resolved.svg.clone(),
    ))
}

fn cmd_snapshot(resolved: &config::Resolved) -> Result<()> {
    let run = build_run_config(resolved)?;
    let output = run_snapshot(&run)?;
    println!(
        "ingested {} rows ({} self-loops dropped, {} duplicates merged, {} out of bounds)",
        output.ingest.rows_read,
        output.ingest.self_loops_dropped,
        output.ingest.duplicates_merged,
        output.ingest.rows_skipped_out_of_bounds
    );
    println!("{:>6}  {:>7}  {:>8}  {:>8}  {:>10}", "t", "partial", "nodes", "edges", "weight");
    for s in &output.stats {
        println!(
            "{:>6}  {:>7}  {:>8}  {:>8}  {:>10}",
            s.t,
            if s.partial { "yes" } else { "" },
            s.nodes,
            s.edges,
            s.total_weight
        );
    }
    println!("cache: {}", output.cache_path.display());
    println!("stats: {}", output.stats_path.display());
    Ok(())
}

fn print_analyze_summary(summary: &AnalyzeSummary) {
    println!(
        "analyzed {} snapshots, {} nodes in the final one, {} trajectory points",
        summary.snapshots, summary.final_nodes, summary.points
    );
    if !summary.nonconverged.is_empty() {
        println!(
            "warning: pagerank hit the iteration cap at t = {:?}",
            summary.nonconverged
        );
    }
    println!(
        "wrote {} artifacts (config {})",
        summary.artifacts.len(),
        summary.config_hash
    );
}

fn cmd_analyze(resolved: &config::Resolved) -> Result<()> {
    let run = build_run_config(resolved)?;
    let summary = run_analyze(&run)?;
    print_analyze_summary(&summary);
    println!("out dir: {}", run.out_dir.display());
    Ok(())
}

fn cmd_simulate(
    args: &args::SimulateArgs,
    resolved: &config::Resolved,
    synth_file: &config::SynthSection,
) -> Result<()> {
    let synth = config::resolve_synth(args, resolved, synth_file)?;
    let summary = run_simulate(
        &synth,
        resolved.trajectory.clone(),
        &resolved.out_dir,
        resolved.format,
    )?;
    println!(
        "generated seed {} -> {}",
        synth.seed,
        summary.edges_path.display()
    );
    print_analyze_summary(&summary.analyze);
    match &summary.shock {
        None => println!("no shock configured"),
        Some(report) => {
            println!(
                "shock target {} at t={}: {}",
                report.target,
                report.shock_t,
                if report.detected { "DETECTED" } else { "not detected" }
            );
            if let (Some(bits), Some(rank)) = (report.target_shock_bits, report.target_rank_at_shock)
            {
                println!(
                    "  shock-step surprise {bits:.3} bits, rank {rank}/{} in the target's own trajectory",
                    report.target_steps_with_evidence
                );
            }
            if let (Some(p90), Some(frac)) = (report.control_p90, report.control_fraction_below) {
                println!(
                    "  controls: {} nodes, p90 {p90:.3} bits, {:.1}% below the target",
                    report.control_count,
                    frac * 100.0
                );
            }
            if let Some(reason) = &report.reason {
                println!("  undetectable: {reason}");
            }
        }
    }
    Ok(())
}

fn cmd_top(args: &TopArgs, resolved: &config::Resolved) -> Result<()> {
    let measure = Measure::from_str(&args.measure)?;
    let listing = run_top(&resolved.out_dir, measure, args.at, args.k)?;
    println!(
        "top {} by {} at t={}",
        listing.rows.len(),
        measure,
        listing.t
    );
    println!("{:>4}  {:<24}  {:>12}  {:>8}  {:>10}", "g", "node", "score", "x", "bits");
    for row in &listing.rows {
        println!(
            "{:>4}  {:<24}  {:>12.6e}  {:>8.4}  {:>10}",
            row.g,
            row.node,
            row.score,
            row.x,
            row.total_bits
                .map(|b| format!("{b:.4}"))
                .unwrap_or_else(|| "-".to_string())
        );
    }
    Ok(())
}
