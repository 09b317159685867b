//! File-exchange channel for the interactive protocols.
//!
//! Each pass is written to `<dir>/<pass>-<name>.json` through a temporary file and a
//! rename, so a reader never sees half a message. Either side can end the run by
//! writing `abort.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::thread::sleep;
use std::time::{Duration, Instant};

use nomsig_core::algebra::Bn254;
use nomsig_core::envelope::{Envelope, ProtocolMessage};
use nomsig_core::zkproto::{ProtocolKind, TranscriptEntry};

use crate::Failure;

const POLL: Duration = Duration::from_millis(20);
const ABORT_FILE: &str = "abort.json";

pub struct FileChannel {
    dir: PathBuf,
    session: String,
    protocol: ProtocolKind,
    timeout: Duration,
}

// short-lived and matched on immediately
#[allow(clippy::large_enum_variant)]
pub enum Incoming {
    Message(TranscriptEntry<Bn254>),
    Aborted(String),
}

fn file_name(pass: u8) -> String {
    let name = ["commitment", "first", "opening", "response", "verdict"][pass as usize - 1];
    format!("{pass}-{name}.json")
}

impl FileChannel {
    pub fn open(dir: &Path, session: &str, protocol: ProtocolKind, timeout: Duration) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Malformed(format!("{}: {e}", dir.display())))?;
        Ok(FileChannel {
            dir: dir.to_path_buf(),
            session: session.into(),
            protocol,
            timeout,
        })
    }

    pub fn send(&self, entry: TranscriptEntry<Bn254>) -> Result<(), Failure> {
        let msg = ProtocolMessage {
            session: self.session.clone(),
            protocol: self.protocol,
            entry,
        };
        self.write_atomic(&file_name(msg.pass_index()), &msg.to_envelope().to_json())
    }

    pub fn abort(&self, reason: &str) -> Result<(), Failure> {
        let mut env = Envelope::new("transcript-msg", "abort", Default::default());
        env.fields.insert("session".into(), self.session.clone().into());
        env.fields.insert("reason".into(), reason.into());
        self.write_atomic(ABORT_FILE, &env.to_json())
    }

    fn write_atomic(&self, name: &str, body: &str) -> Result<(), Failure> {
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let dest = self.dir.join(name);
        fs::write(&tmp, body)
            .and_then(|_| fs::rename(&tmp, &dest))
            .map_err(|e| Failure::Malformed(format!("{}: {e}", dest.display())))
    }

    /// Waits for pass `pass`, or for a verdict notice when `or_verdict` is set.
    pub fn recv(&self, pass: u8, or_verdict: bool) -> Result<Incoming, Failure> {
        let start = Instant::now();
        let wanted = self.dir.join(file_name(pass));
        let verdict = self.dir.join(file_name(5));
        let abort = self.dir.join(ABORT_FILE);
        loop {
            if abort.exists() {
                let env = read_envelope(&abort)?;
                let reason = env.fields.get("reason").and_then(|r| r.as_str()).unwrap_or("").to_string();
                return Ok(Incoming::Aborted(reason));
            }
            for path in [&wanted, &verdict] {
                if (path == &wanted || or_verdict) && path.exists() {
                    let msg = ProtocolMessage::<Bn254>::from_envelope(&read_envelope(path)?)
                        .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
                    if msg.session != self.session || msg.protocol != self.protocol {
                        return Err(Failure::Malformed(format!("{}: session mismatch", path.display())));
                    }
                    return Ok(Incoming::Message(msg.entry));
                }
            }
            if start.elapsed() > self.timeout {
                return Err(Failure::Malformed(format!("timed out waiting for {}", wanted.display())));
            }
            sleep(POLL);
        }
    }
}

fn read_envelope(path: &Path) -> Result<Envelope, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
    Envelope::from_json(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
}
