//! Session runner and command-line front end for `vir-core`.

pub mod run;
pub mod session;
pub mod table;

pub use run::{classify_lines, run_session, RunOutput};
pub use session::{parse_session, Command, Session, SessionError};
pub use table::{format_table, parse_table};
