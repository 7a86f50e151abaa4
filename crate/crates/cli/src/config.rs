use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Text,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sweep {
    #[default]
    All,
    Epi,
    Support,
}

/// One invocation. Also accepted as a JSON file via `--config`.
#[derive(Debug, Clone, PartialEq, Eq, Parser, Serialize, Deserialize)]
#[command(name = "ttgeo", version, about = "Spectra, supports and ideals for families of finite groups")]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Family spec: inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,

    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    #[serde(default = "default_stage_cap")]
    pub stage_cap: u64,

    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    #[serde(default = "default_order_cap")]
    pub order_cap: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    #[serde(default)]
    pub format: Format,

    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,

    /// Plain ASCII instead of Unicode mathematics.
    #[arg(long, global = true)]
    #[serde(default)]
    pub ascii: bool,
}

fn default_stage_cap() -> u64 {
    8
}

fn default_order_cap() -> u64 {
    64
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Command {
    /// Points, structure and Cantor–Bendixson rank of the spectrum.
    Spectrum {
        /// Emit the stage poset as DOT (same as `--format dot`).
        #[arg(long)]
        #[serde(default)]
        dot: bool,
        /// Stage rendered by the DOT export; defaults to the stage cap.
        #[arg(long)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stage: Option<u64>,
        /// Include the limit points visible at the stage in the DOT export.
        #[arg(long)]
        #[serde(default)]
        with_limits: bool,
    },
    /// Cantor–Bendixson rank of the spectrum.
    CbRank {},
    /// Homological support of an object.
    Hsupp {
        #[arg(long)]
        expr: String,
    },
    /// Thick ideals: generation, membership, inclusion and classification.
    Ideal {
        /// Generator of the ideal; repeatable.
        #[arg(long = "gen")]
        #[serde(default)]
        gens: Vec<String>,
        /// Object to test for membership; repeatable.
        #[arg(long)]
        #[serde(default)]
        member: Vec<String>,
        /// Generators of a second ideal to compare against; repeatable.
        #[arg(long)]
        #[serde(default)]
        leq: Vec<String>,
        /// Describe the whole ideal lattice.
        #[arg(long)]
        #[serde(default)]
        classify: bool,
    },
    /// The tt-class of a derived VI-module.
    ViClassify {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 2)]
        #[serde(default = "default_p")]
        p: u64,
        /// Largest rank of the homology cross-check.
        #[arg(long, default_value_t = 6)]
        #[serde(default = "default_window")]
        window: usize,
    },
    /// The exponent chain of family primes in A(p).
    Chain {
        #[arg(long, default_value_t = 2)]
        #[serde(default = "default_p")]
        p: u64,
        #[arg(long, default_value_t = 8)]
        #[serde(default = "default_length")]
        length: u32,
    },
    /// Agreement sweeps between fast rules and brute-force oracles.
    Oracle {
        #[arg(long, value_enum, default_value_t = Sweep::All)]
        #[serde(default)]
        sweep: Sweep,
        /// Primes of the epimorphism sweep.
        #[arg(long, value_delimiter = ',', default_values_t = [2, 3])]
        #[serde(default = "default_primes")]
        primes: Vec<u64>,
        /// The support sweep runs over the quotients of this group.
        #[arg(long, default_value = "2:[2,1]")]
        #[serde(default = "default_group")]
        group: String,
        #[arg(long, default_value_t = 50)]
        #[serde(default = "default_count")]
        count: usize,
        #[arg(long, default_value_t = 3)]
        #[serde(default = "default_depth")]
        depth: usize,
    },
    /// Bounded verification of a closure property.
    CheckPredicate {
        /// One of unital, downward_closed, widely_closed, multiplicative_global, r_submultiplicative:<r>.
        #[arg(long)]
        predicate: String,
    },
}

fn default_p() -> u64 {
    2
}

fn default_window() -> usize {
    6
}

fn default_length() -> u32 {
    8
}

fn default_primes() -> Vec<u64> {
    vec![2, 3]
}

fn default_group() -> String {
    "2:[2,1]".into()
}

fn default_count() -> usize {
    50
}

fn default_depth() -> usize {
    3
}
