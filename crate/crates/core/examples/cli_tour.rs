// The `hamframe` subcommands driven in-process on the shipped minimal config.

use clap::Parser;
use hamframe::experiment::cli::{execute, Cli};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/minimal.json");
    let out = std::env::temp_dir().join(format!("hamframe-cli-tour-{}", std::process::id()));
    let out_str = out.to_string_lossy().into_owned();

    for args in [
        vec!["framebounds", config],
        vec!["flow", config, "--t", "0.25"],
        vec!["checkdef", config, "--t", "-0.1"],
        vec!["stft", config, "--t", "0.1"],
    ] {
        let mut argv = vec!["hamframe", "--quiet", "--out", &out_str];
        argv.extend(args.iter().copied());
        let cli = Cli::try_parse_from(&argv)?;
        let outcome = execute(&cli).map_err(|e| e.message)?;
        let files: Vec<String> = outcome
            .files
            .iter()
            .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect();
        println!("{:<12} exit {} -> {}", args[0], outcome.code, files.join(", "));
    }
    let flow_csv = std::fs::read_to_string(out.join("flow.csv"))?;
    println!("flow.csv: {} nodes, header {}", flow_csv.lines().count() - 1, flow_csv.lines().next().unwrap_or_default());
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
