mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 2 {
                // one-line diagnostic; clap's full text includes usage hints
                let msg = e.kind().as_str().unwrap_or("invalid arguments");
                let detail = e.to_string();
                let first = detail.lines().next().unwrap_or(msg);
                eprintln!("{first}");
            } else {
                let _ = e.print();
            }
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::args::*;
    use clap::{CommandFactory, Parser};

    fn parse(argv: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("perculab").chain(argv.iter().copied()))
    }

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn config_round_trips_through_json() {
        let cases: &[&[&str]] = &[
            &["simulate", "--rule", "T", "--lambda", "0.5", "--delta", "1", "--radius", "64", "--steps", "fixation", "--seed", "7", "--output", "o.snap"],
            &["--threads", "3", "simulate", "--rule", "Q:01,23,45", "--steps", "12", "--seed", "1", "--output", "x", "--boundary", "shrinking", "--margin", "12"],
            &["experiment", "scaling", "--deltas", "0.125,0.0625", "--steps", "0,5,fixation", "--seeds", "0..20", "--out", "d"],
            &["experiment", "clusters", "--radius", "32,64", "--seed", "3", "--out", "d", "--steps", "fixation"],
            &["verify", "--seeds", "1,2,3", "--radius", "16", "--steps", "50", "--no-parent"],
            &["distance", "a.curves", "b.curves", "--densify-step", "0.01"],
        ];
        for argv in cases {
            let cli = parse(argv).unwrap();
            let v = serde_json::to_value(&cli).unwrap();
            let back: Cli = serde_json::from_value(v).unwrap();
            assert_eq!(back, cli, "{argv:?}");
        }
    }

    #[test]
    fn validation() {
        let base = ["simulate", "--seed", "1", "--output", "o"];
        let with = |extra: &[&str]| parse(&[&base[..], extra].concat());
        assert!(with(&[]).is_ok());
        assert!(with(&["--lambda", "1.5"]).is_err());
        assert!(with(&["--lambda", "-0.1"]).is_err());
        assert!(with(&["--delta", "0"]).is_err());
        assert!(with(&["--radius", "3"]).is_err());
        assert!(with(&["--steps", "forever"]).is_err());
        assert!(with(&["--rule", "X"]).is_err());
        assert!(with(&["--input", "f"]).is_err());
        assert!(with(&["--bogus"]).is_err());
        assert!(parse(&["experiment", "decay", "--seed", "1", "--seeds", "1,2", "--out", "d"]).is_err());
        assert!(parse(&["experiment", "decay", "--out", "d"]).is_err());
        assert!(parse(&["experiment", "decay", "--seeds", "5..5", "--out", "d"]).is_err());
        assert!(parse(&["verify", "--seed", "1", "--seeds", "1,2"]).is_err());
        assert!(parse(&["verify", "--input", "f", "--seed", "1"]).is_err());
    }

    #[test]
    fn seed_lists() {
        assert_eq!("0..3".parse::<SeedList>().unwrap().0, vec![0, 1, 2]);
        assert_eq!("4, 9".parse::<SeedList>().unwrap().0, vec![4, 9]);
        assert!("a".parse::<SeedList>().is_err());
    }
}
