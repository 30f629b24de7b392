//! `ionnet`: command-line front end for the ionnet-core calculators.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Arg, ArgAction, ArgMatches};

use commands::RunError;
use config::{
    flag_name, load_config_file, validate, Command, KeySpec, RunConfig, COMMON_KEYS, OUTPUT_DIR_ENV,
};

fn value_arg(entry: &KeySpec) -> Arg {
    Arg::new(entry.key)
        .long(flag_name(entry.key))
        .value_name("VALUE")
        .help(entry.help)
        .allow_hyphen_values(true)
        .action(ArgAction::Set)
}

fn cli() -> clap::Command {
    let mut app = clap::Command::new("ionnet")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Heralded-entanglement, ion-crystal, photon-collection and network-time calculators")
        .after_help(format!(
            "Outputs go to --output, else ${OUTPUT_DIR_ENV}/<command>.<ext>, else stdout.\n\
             Exit status: 0 success, 1 invalid configuration, 2 numerical failure."
        ))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for cmd in Command::ALL {
        let mut sub = clap::Command::new(cmd.name()).about(cmd.about()).arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .help("Flat key = value file; flags override its entries"),
        );
        for entry in cmd.keys().iter().chain(COMMON_KEYS) {
            sub = sub.arg(value_arg(entry));
        }
        app = app.subcommand(sub);
    }
    app
}

fn flags_of(cmd: Command, m: &ArgMatches) -> BTreeMap<String, String> {
    cmd.keys()
        .iter()
        .chain(COMMON_KEYS)
        .filter_map(|s| {
            m.get_one::<String>(s.key)
                .map(|v| (s.key.to_string(), v.clone()))
        })
        .collect()
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), RunError> {
    let io = |e: std::io::Error, p: &Path| {
        RunError::Validation(vec![format!("`output` = {}: {e}", p.display())])
    };
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(RunError::Numerical(format!("cannot write stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| io(e, p))?;
            }
            std::fs::write(p, text).map_err(|e| io(e, p))?;
            log::info!("wrote {}", p.display());
            Ok(())
        }
    }
}

fn real_main() -> Result<(), RunError> {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let _ = e.print();
            return if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                Ok(())
            } else {
                Err(RunError::Validation(Vec::new()))
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let cmd: Command = name.parse().map_err(|e| RunError::Validation(vec![e]))?;
    let file = match sub.get_one::<String>("config") {
        Some(path) => {
            load_config_file(Path::new(path)).map_err(|e| RunError::Validation(vec![e]))?
        }
        None => BTreeMap::new(),
    };
    let config = RunConfig::merged(cmd, file, flags_of(cmd, sub));
    let violations = validate(&config);
    if !violations.is_empty() {
        return Err(RunError::Validation(violations));
    }
    let text = commands::run(&config)?;
    let env_dir = std::env::var(OUTPUT_DIR_ENV).ok();
    write_output(config.output_path(env_dir.as_deref()).as_deref(), &text)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
