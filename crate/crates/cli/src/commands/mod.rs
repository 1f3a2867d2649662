pub mod analyze;
pub mod correct;
pub mod corrupt;
pub mod eval_ap;
pub mod simulate;

use std::path::Path;

use serde::Serialize;

use boxnoise::coco::{save_json, to_canonical_json};
use boxnoise::Result;

/// Version of the report JSON layout. Bump on breaking changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Envelope wrapped around every report: a schema version, the subcommand
/// that produced it, and the effective configuration of the run, so any
/// result can be reproduced from the report alone.
#[derive(Serialize)]
pub struct Report<C: Serialize, B: Serialize> {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: C,
    #[serde(flatten)]
    pub body: B,
}

impl<C: Serialize, B: Serialize> Report<C, B> {
    pub fn new(command: &'static str, config: C, body: B) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command,
            config,
            body,
        }
    }

    /// Prints the report to stdout and optionally writes it to a file.
    pub fn emit(&self, file: Option<&Path>) -> Result<()> {
        print!("{}", to_canonical_json(self)?);
        if let Some(path) = file {
            save_json(path, self)?;
        }
        Ok(())
    }
}
