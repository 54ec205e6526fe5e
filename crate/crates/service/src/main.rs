use std::io::{self, Write};
use std::net::SocketAddr;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use setsquare::census::{ReportFormat, ReportView};
use setsquare::game::Player;
use setsquare::SquareType;
use setsquare_service::commands::{self, Output};
use setsquare_service::generate::{generate, GenerationRequest};
use setsquare_service::play::play;

#[derive(Parser)]
#[command(name = "setsquare", version, about = "Magic SET squares and SET tic-tac-toe")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CensusFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl From<Format> for Output {
    fn from(f: Format) -> Output {
        match f {
            Format::Json => Output::Json,
            Format::Text => Output::Text,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum First {
    Human,
    Engine,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate every magic SET square and print the counts.
    Census {
        #[arg(long, conflicts_with = "by_type")]
        by_order: bool,
        #[arg(long)]
        by_type: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: CensusFormat,
    },
    /// Classify a square given as nine cards, row-major from the top row.
    Classify {
        #[arg(required = true, num_args = 1..)]
        cards: Vec<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Generate a random square, optionally of a given type or order.
    Generate {
        #[arg(long = "type")]
        square_type: Option<SquareType>,
        #[arg(long)]
        order: Option<u8>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Recompute every published count and theorem and report each check.
    Verify {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Play SET tic-tac-toe against the engine in the terminal.
    Play {
        #[arg(long, value_enum, default_value = "human")]
        first: First,
        #[arg(long = "type")]
        square_type: Option<SquareType>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Seconds a game may sit idle before it is discarded.
        #[arg(long, default_value_t = 1800)]
        idle_timeout: u64,
    },
}

fn exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Census { by_order, by_type: _, format } => {
            let view = if by_order { ReportView::ByOrder } else { ReportView::ByType };
            let format = match format {
                CensusFormat::Json => ReportFormat::Json,
                CensusFormat::Csv => ReportFormat::Csv,
            };
            Ok(commands::census(format, view, &mut stdout, &mut io::stderr())?)
        }
        Command::Classify { cards, format } => {
            commands::classify(&cards, format.into(), &mut stdout)?;
            Ok(true)
        }
        Command::Generate { square_type, order, seed, format } => {
            let req = GenerationRequest { square_type, order, seed };
            let seed = commands::generate_square(&req, format.into(), &mut stdout)?;
            eprintln!("seed {seed}");
            Ok(true)
        }
        Command::Verify { format } => Ok(commands::verify(format.into(), &mut stdout)?),
        Command::Play { first, square_type, seed } => {
            let (pool, _) = generate(&GenerationRequest { square_type, order: None, seed })?;
            let human = match first {
                First::Human => Player::First,
                First::Engine => Player::Second,
            };
            play(io::stdin().lock(), &mut stdout, pool, human)?;
            stdout.flush()?;
            Ok(true)
        }
        Command::Serve { port, host, idle_timeout } => {
            let runtime = tokio::runtime::Runtime::new()?;
            let addr = SocketAddr::new(host, port);
            runtime.block_on(setsquare_service::api::serve(addr, Duration::from_secs(idle_timeout)))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(ok) => exit(ok),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
