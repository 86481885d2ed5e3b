use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gpake::attack::WrongGuessBehavior;
use gpake::protocol::{Password, SessionIds, Variant};
use gpake::sim::{
    run_scenario, selftest, to_canonical_json, write_report, write_transcript, AdversaryKind,
    GroupChoice, ScenarioConfig, SelftestHooks, SimError,
};

#[derive(Parser)]
#[command(name = "gpake", version, about = "Gateway-based PAKE simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one honest session.
    Honest {
        #[command(flatten)]
        common: Common,
        /// Include both session keys in the transcript.
        #[arg(long)]
        reveal_keys: bool,
        /// Password the client uses, if different from the registered one.
        #[arg(long)]
        client_password: Option<String>,
        /// Write the transcript here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an on-line dictionary attack against an honest gateway and server.
    Attack {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dict: PathBuf,
        /// Try every word even after a hit.
        #[arg(long)]
        exhaustive: bool,
        /// Send a random AuthC after a wrong guess instead of going silent.
        #[arg(long)]
        adversary_sends_garbage: bool,
        /// Keep per-guess transcripts in the report.
        #[arg(long)]
        verbose: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the full channel transcript.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Run the toy-group oracle checks.
    Selftest {
        #[arg(long, hide = true)]
        corrupt_exp: bool,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    variant: Variant,
    /// `toy`, `modp2048` or a parameter file.
    #[arg(long)]
    group: GroupChoice,
    #[arg(long)]
    seed: u64,
    /// Password registered with the server.
    #[arg(long, default_value = "correct horse")]
    password: String,
    #[arg(long, default_value = "client")]
    id_c: String,
    #[arg(long, default_value = "gateway")]
    id_g: String,
}

impl Common {
    fn config(self) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::honest(self.variant, self.group, self.seed, &self.password);
        cfg.ids = SessionIds::new(self.id_c, self.id_g);
        cfg
    }
}

fn emit(
    json: &str,
    out: Option<&PathBuf>,
    write: impl FnOnce(&PathBuf) -> Result<(), SimError>,
) -> Result<(), SimError> {
    match out {
        Some(path) => write(path),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<u8, SimError> {
    match command {
        Command::Honest {
            common,
            reveal_keys,
            client_password,
            out,
        } => {
            let mut cfg = common.config();
            cfg.reveal_keys = reveal_keys;
            cfg.client_password = client_password.map(Password::new);
            let transcript = match run_scenario(&cfg) {
                Ok(output) => output.transcript,
                Err(SimError::Protocol {
                    step,
                    source,
                    transcript,
                }) => {
                    emit(&to_canonical_json(&transcript), out.as_ref(), |p| {
                        write_transcript(&transcript, p)
                    })?;
                    eprintln!("gpake: protocol failure at {step}: {source}");
                    return Ok(3);
                }
                Err(e) => return Err(e),
            };
            emit(&to_canonical_json(&transcript), out.as_ref(), |p| {
                write_transcript(&transcript, p)
            })?;
            Ok(0)
        }
        Command::Attack {
            common,
            dict,
            exhaustive,
            adversary_sends_garbage,
            verbose,
            out,
            transcript,
        } => {
            let mut cfg = common.config();
            cfg.adversary = AdversaryKind::DictionaryAttacker;
            cfg.dictionary_path = Some(dict);
            cfg.exhaustive = exhaustive;
            cfg.verbose = verbose;
            if adversary_sends_garbage {
                cfg.on_wrong_guess = WrongGuessBehavior::SendGarbage;
            }
            let output = run_scenario(&cfg)?;
            let report = output.report.expect("attack scenarios produce a report");
            if let Some(path) = transcript {
                write_transcript(&output.transcript, path)?;
            }
            emit(&to_canonical_json(&report), out.as_ref(), |p| {
                write_report(&report, p)
            })?;
            Ok(0)
        }
        Command::Selftest { corrupt_exp } => {
            let results = selftest(SelftestHooks { corrupt_exp });
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("[{status}] {}: {}", r.name, r.detail);
            }
            Ok(if results.iter().all(|r| r.passed) {
                0
            } else {
                4
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gpake: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
