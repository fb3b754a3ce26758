//! Append-only JSON-lines session logs. Each session has one file of
//! events; replaying the events through a fresh [`Session`] rebuilds it,
//! because every agent decision is a function of the seed and the moves.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use hba_core::matrix::MatrixKind;
use hba_core::record::MatchRecord;
use serde::{Deserialize, Serialize};

use crate::session::Session;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Created {
        id: String,
        game: MatrixKind,
        seed: u64,
        created_ms: u64,
    },
    Move {
        match_index: usize,
        round: usize,
        action: String,
        ts: u64,
    },
    MatchComplete {
        record: Box<MatchRecord>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("i/o on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path} line {line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
}

/// Session logs under `root/sessions`, finished match records under
/// `root/records`.
#[derive(Debug, Clone)]
pub struct Store {
    root: Option<PathBuf>,
}

impl Store {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: Some(root.into()) }
    }

    /// A store that keeps nothing.
    pub fn disabled() -> Self {
        Self { root: None }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    fn dir(&self, sub: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(sub))
    }

    pub fn session_path(&self, id: &str) -> Option<PathBuf> {
        self.dir("sessions").map(|d| d.join(format!("{id}.jsonl")))
    }

    pub fn record_path(&self, id: &str, match_index: usize) -> Option<PathBuf> {
        self.dir("records").map(|d| d.join(format!("{id}-m{match_index}.json")))
    }

    pub fn append(&self, id: &str, event: &Event) -> Result<(), StoreError> {
        let Some(path) = self.session_path(id) else {
            return Ok(());
        };
        let io = |source| StoreError::Io { path: path.clone(), source };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io)?;
        }
        let mut line = serde_json::to_string(event).expect("events serialise");
        line.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        f.write_all(line.as_bytes()).map_err(io)?;
        f.sync_data().map_err(io)
    }

    /// Writes a finished match as a standalone record file.
    pub fn write_record(&self, record: &MatchRecord) -> Result<(), StoreError> {
        let id = record.session_id.as_deref().unwrap_or("match");
        let Some(path) = self.record_path(id, record.match_index) else {
            return Ok(());
        };
        let io = |source| StoreError::Io { path: path.clone(), source };
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io)?;
        }
        let json = serde_json::to_string_pretty(record).expect("records serialise");
        fs::write(&path, json + "\n").map_err(io)
    }

    /// Rebuilds every logged session. Sessions whose log cannot be replayed
    /// are skipped with a warning.
    pub fn recover(&self) -> Result<Vec<Session>, StoreError> {
        let Some(dir) = self.dir("sessions") else {
            return Ok(Vec::new());
        };
        let entries = match fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(source) => return Err(StoreError::Io { path: dir, source }),
        };
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        let mut out = Vec::new();
        for path in paths {
            match replay_log(&path) {
                Ok(s) => out.push(s),
                Err(e) => log::warn!("skipping session log: {e}"),
            }
        }
        out.sort_by(|a, b| (a.created_ms, &a.id).cmp(&(b.created_ms, &b.id)));
        Ok(out)
    }
}

/// Reads the events of one log. A final line without a newline that fails to
/// parse is a write cut short by a crash and is dropped.
pub fn read_events(path: &Path) -> Result<Vec<Event>, StoreError> {
    let f = File::open(path).map_err(|source| StoreError::Io { path: path.into(), source })?;
    let mut reader = BufReader::new(f);
    let mut events = Vec::new();
    let mut buf = String::new();
    let mut line = 0;
    loop {
        buf.clear();
        let n = reader
            .read_line(&mut buf)
            .map_err(|source| StoreError::Io { path: path.into(), source })?;
        if n == 0 {
            break;
        }
        line += 1;
        let complete = buf.ends_with('\n');
        if buf.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(buf.trim_end()) {
            Ok(e) => events.push(e),
            Err(_) if !complete => {
                log::warn!("{}: dropping truncated final line {line}", path.display());
                break;
            }
            Err(e) => {
                return Err(StoreError::Corrupt {
                    path: path.into(),
                    line,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(events)
}

fn replay_log(path: &Path) -> Result<Session, StoreError> {
    let corrupt = |line: usize, message: String| StoreError::Corrupt {
        path: path.into(),
        line,
        message,
    };
    let events = read_events(path)?;
    let mut it = events.into_iter().enumerate();
    let mut session = match it.next() {
        Some((
            _,
            Event::Created {
                id,
                game,
                seed,
                created_ms,
            },
        )) => Session::new(id, game, seed, created_ms).map_err(|e| corrupt(1, e.to_string()))?,
        _ => return Err(corrupt(1, "log does not start with a created event".into())),
    };
    for (i, ev) in it {
        match ev {
            Event::Created { .. } => return Err(corrupt(i + 1, "duplicate created event".into())),
            Event::Move {
                match_index,
                round,
                action,
                ts,
            } => {
                if match_index != session.match_index() {
                    return Err(corrupt(i + 1, format!("move for match {match_index} out of order")));
                }
                session
                    .submit(&action, Some(round), ts)
                    .map_err(|e| corrupt(i + 1, e.to_string()))?;
            }
            Event::MatchComplete { record } => {
                let ok = session
                    .completed()
                    .get(record.match_index)
                    .is_some_and(|r| same_play(r, &record));
                if !ok {
                    return Err(corrupt(i + 1, "logged match record differs from the replay".into()));
                }
            }
        }
    }
    Ok(session)
}

/// Actions and scores agree round by round.
fn same_play(a: &MatchRecord, b: &MatchRecord) -> bool {
    a.rounds.len() == b.rounds.len()
        && a.rounds.iter().zip(&b.rounds).all(|(x, y)| {
            x.human_action == y.human_action && x.agent_action == y.agent_action && x.cumulative == y.cumulative
        })
}
