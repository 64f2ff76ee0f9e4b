//! Command implementations behind the `burniat` binary. Each command builds a
//! [`Report`] that renders as text or JSON.

pub mod commands;
pub mod corpus;
pub mod divexpr;
pub mod report;

pub use commands::{prop4_minimizer, PROP4_PATTERN, cmd_check, cmd_eigensystem, cmd_glct_upper, cmd_invariants, cmd_lct, CheckMode, CliError};
pub use corpus::{default_cert_dir, load_corpus, load_index, CertFile, IndexEntry, CERT_DIR_ENV};
pub use divexpr::{parse_divexpr, DivExprError};
pub use report::{Format, Item, Report};
