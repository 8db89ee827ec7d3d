use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use semiflux::cli::{self, Cli};
use semiflux::Error;

fn threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("SEMIFLUX_THREADS") {
        let n: usize = v.parse().with_context(|| format!("SEMIFLUX_THREADS={v:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match real_main(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            // bad input and failed numerics are told apart by exit status
            let invalid = e.downcast_ref::<Error>().is_none_or(|e| {
                matches!(
                    e,
                    Error::InvalidArgument(_)
                        | Error::BadOrientation(_)
                        | Error::TopologyMismatch(_)
                        | Error::NotElliptic { .. }
                        | Error::NoDecay(_)
                )
            });
            ExitCode::from(if invalid { 2 } else { 1 })
        }
    }
}

fn real_main(args: &Cli) -> anyhow::Result<bool> {
    threads()?;
    let config = match &args.config {
        Some(p) => Some(std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?),
        None => None,
    };
    let emission = cli::run(&args.command, config.as_deref())?;
    let rendered = emission.render(args.format);
    match &args.out {
        Some(path) => {
            std::fs::write(path, &rendered).with_context(|| format!("writing {}", path.display()))?;
            if matches!(args.command, cli::Command::CheckAll) {
                println!("{}", emission.text);
            }
        }
        None => print!("{rendered}"),
    }
    Ok(emission.success)
}
