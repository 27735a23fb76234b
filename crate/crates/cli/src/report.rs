use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the command name, every input file and the effective
    /// options, each length-prefixed.
    pub inputs_digest: String,
    pub seed: u64,
    pub payload: Value,
    /// Excluded from determinism comparisons.
    pub wall_time_s: f64,
}

#[derive(Debug, Default, Clone)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new(command: &str) -> Self {
        let mut d = Self::default();
        d.add(command.as_bytes());
        d
    }

    pub fn add(&mut self, chunk: &[u8]) -> &mut Self {
        self.0.update((chunk.len() as u64).to_le_bytes());
        self.0.update(chunk);
        self
    }

    pub fn finish(self) -> String {
        self.0
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
