use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use combridge::bridgeio::Mode;
use combridge::operators::{Integrity, GROUP_RANK, ITEM_PK};

mod commands;

/// Compress bridge tables into combinatorial group keys and query them.
#[derive(Debug, Parser)]
#[command(name = "combridge", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct IntegrityFlags {
    /// Fail on dangling references (default).
    #[arg(long, conflicts_with = "permissive")]
    strict: bool,
    /// Drop rows with dangling references instead of failing.
    #[arg(long)]
    permissive: bool,
}

impl IntegrityFlags {
    fn integrity(self) -> Integrity {
        if self.permissive {
            Integrity::Permissive
        } else {
            Integrity::Strict
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replace a classic bridge by one group key per group.
    Compress {
        #[arg(long)]
        items: PathBuf,
        #[arg(long)]
        bridge: PathBuf,
        /// Group relation; in grouped mode its attributes are carried into the output.
        #[arg(long)]
        groups: Option<PathBuf>,
        #[arg(long, default_value_t = Mode::Grouped)]
        mode: Mode,
        #[command(flatten)]
        integrity: IntegrityFlags,
        #[arg(long, default_value = ITEM_PK)]
        item_key: String,
        /// Universe manifest to write.
        #[arg(long)]
        out_universe: PathBuf,
        /// Compressed bridge to write (G_rankc or B_rankc).
        #[arg(long)]
        out: PathBuf,
        /// Group_PK → groupRank correspondence (direct mode).
        #[arg(long)]
        out_sidecar: Option<PathBuf>,
    },
    /// Expand group keys into (groupRank, item) rows.
    Expand {
        #[arg(long)]
        compressed: PathBuf,
        #[arg(long)]
        universe: PathBuf,
        #[arg(long, default_value = GROUP_RANK)]
        column: String,
        #[arg(long, default_value = ITEM_PK)]
        item_key: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank-Join a compressed relation with the item relation.
    Join {
        /// G_rankc (grouped) or B_rankc (direct).
        #[arg(long)]
        groups: PathBuf,
        #[arg(long)]
        items: PathBuf,
        #[arg(long)]
        universe: PathBuf,
        #[arg(long, default_value_t = Mode::Grouped)]
        mode: Mode,
        #[arg(long, default_value = GROUP_RANK)]
        column: String,
        #[arg(long, default_value = ITEM_PK)]
        item_key: String,
        #[command(flatten)]
        integrity: IntegrityFlags,
        #[arg(long)]
        out: PathBuf,
    },
    /// Row and byte comparison of a classic bridge and its compressed form.
    Stats {
        #[arg(long, requires = "compressed", conflicts_with_all = ["group_count", "bridge_rows"])]
        bridge: Option<PathBuf>,
        #[arg(long, requires = "bridge")]
        compressed: Option<PathBuf>,
        /// Sidecar for direct-mode input, used to count merged groups.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Cost a bridge from counts alone.
        #[arg(long, requires = "bridge_rows")]
        group_count: Option<u64>,
        #[arg(long, requires = "group_count")]
        bridge_rows: Option<u64>,
    },
    /// Check that compression loses nothing and rank joins match the classic join.
    Verify {
        #[arg(long)]
        items: PathBuf,
        #[arg(long)]
        bridge: PathBuf,
        #[arg(long)]
        groups: Option<PathBuf>,
        /// Previously compressed bridge to check instead of compressing afresh.
        #[arg(long)]
        compressed: Option<PathBuf>,
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[arg(long)]
        universe: Option<PathBuf>,
        #[arg(long, default_value = ITEM_PK)]
        item_key: String,
    },
    /// Generate a synthetic bridge with the inpatient group-width distribution.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Divide every bucket count by this.
        #[arg(long, default_value_t = 1000)]
        scale: u64,
        /// Number of distinct items.
        #[arg(long, default_value_t = 700)]
        n: u32,
        #[arg(long)]
        out_items: PathBuf,
        #[arg(long)]
        out_bridge: PathBuf,
        #[arg(long)]
        out_groups: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.exit_code)
        }
    }
}
