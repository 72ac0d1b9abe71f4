mod args;
mod config;
mod error;
mod stages;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::ConfigFile;
use error::{CliError, Result};

fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if let Some(n) = cli.threads.or(cfg.threads) {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let c = &cfg;
    match &cli.command {
        Command::Cluster {
            common,
            input,
            cluster,
        } => {
            stages::cluster(
                &config::common(common, c),
                &config::input(input, c)?,
                &config::cluster(cluster, c)?,
            )?;
        }
        Command::Reduce {
            common,
            interactions,
            reduce,
        } => {
            stages::reduce(
                &config::common(common, c),
                &config::interactions(interactions, c)?,
                config::reduce(reduce, c),
            )?;
        }
        Command::Negatives {
            common,
            interactions,
            negatives,
        } => {
            stages::negatives(
                &config::common(common, c),
                &config::interactions(interactions, c)?,
                &config::negatives(negatives, c)?,
            )?;
        }
        Command::Split { common, split } => {
            stages::split(&config::common(common, c), config::split(split, c)?)?;
        }
        Command::Augment { common, augment } => {
            stages::augment(&config::common(common, c), &config::augment(augment, c))?;
        }
        Command::Encode { common, encode } => {
            stages::encode_splits(&config::common(common, c), &config::encode(encode, c)?)?;
        }
        Command::Audit { common, audit } => {
            stages::audit(&config::common(common, c), config::audit(audit, c)?)?;
        }
        Command::Stats { common, stats } => {
            stages::stats(&config::common(common, c), config::stats(stats, c)?)?;
        }
        Command::Render(r) => {
            let fasta = r
                .fasta
                .clone()
                .or(c.fasta.clone())
                .ok_or_else(|| CliError::Usage("--fasta is required".into()))?;
            let minus = match (&r.minus_fasta, &r.minus_organism) {
                (None, None) => None,
                (Some(p), org) => Some((p.as_path(), org.as_deref())),
                (None, Some(org)) => Some((fasta.as_path(), Some(org.as_str()))),
            };
            stages::render(
                &fasta,
                r.organism.as_deref(),
                minus,
                &r.output,
                config::format(r, c)?,
                &config::encode(&r.encode, c)?,
            )?;
        }
        Command::Pipeline {
            common,
            input,
            cluster,
            interactions,
            reduce,
            negatives,
            split,
            augment,
            encode,
            audit,
            stats,
        } => {
            // resolve everything first so a bad setting fails before any work
            let common = config::common(common, c);
            let input = config::input(input, c)?;
            let cluster = config::cluster(cluster, c)?;
            let interactions = config::interactions(interactions, c)?;
            let order = config::reduce(reduce, c);
            let negatives = config::negatives(negatives, c)?;
            let fractions = config::split(split, c)?;
            let augment = config::augment(augment, c);
            let encode = config::encode(encode, c)?;
            let neighbors = config::audit(audit, c)?;
            let naive = config::stats(stats, c)?;
            let manifests = vec![
                stages::cluster(&common, &input, &cluster)?,
                stages::reduce(&common, &interactions, order)?,
                stages::negatives(&common, &interactions, &negatives)?,
                stages::split(&common, fractions)?,
                stages::augment(&common, &augment)?,
                stages::encode_splits(&common, &encode)?,
                stages::audit(&common, neighbors)?,
                stages::stats(&common, naive)?,
            ];
            let merged = stages::merge(&manifests);
            let path = common.out.join(stages::MANIFEST);
            grandcgr::tensorio::write_manifest(&path, &merged)
                .map_err(|e| CliError::io_at(&path, e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grandcgr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
