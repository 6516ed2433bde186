use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::Source;

/// One line of the cache journal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalEntry {
    pub digest: String,
    pub model: String,
    pub variant: u32,
    /// `None` when the request ultimately failed.
    pub response: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub attempts: u32,
    pub source: Source,
    pub timestamp_ms: u64,
}

/// Digest → response map backed by an append-only JSONL journal.
#[derive(Debug)]
pub struct ResponseCache {
    entries: Mutex<HashMap<String, String>>,
    journal: Option<Mutex<File>>,
    path: Option<PathBuf>,
}

impl ResponseCache {
    pub fn in_memory() -> Self {
        ResponseCache {
            entries: Mutex::new(HashMap::new()),
            journal: None,
            path: None,
        }
    }

    /// Replays `path` if it exists and opens it for appending.
    pub fn open(path: &Path) -> io::Result<Self> {
        let entries = if path.exists() { replay(path)? } else { HashMap::new() };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        log::debug!("cache {}: {} entries replayed", path.display(), entries.len());
        Ok(ResponseCache {
            entries: Mutex::new(entries),
            journal: Some(Mutex::new(file)),
            path: Some(path.to_path_buf()),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, digest: &str) -> Option<String> {
        self.entries.lock().unwrap().get(digest).cloned()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends `entry` to the journal. A successful response is cached unless the
    /// digest already has one; the text actually held for the digest is returned.
    pub fn record(&self, entry: &JournalEntry) -> io::Result<Option<String>> {
        if let Some(journal) = &self.journal {
            let mut line = serde_json::to_string(entry).map_err(io::Error::other)?;
            line.push('\n');
            let mut file = journal.lock().unwrap();
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        Ok(entry.response.as_ref().map(|text| {
            self.entries
                .lock()
                .unwrap()
                .entry(entry.digest.clone())
                .or_insert_with(|| text.clone())
                .clone()
        }))
    }

    pub fn snapshot(&self) -> BTreeMap<String, String> {
        self.entries.lock().unwrap().iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

/// Rebuilds the digest → response map from a journal. The first successful
/// entry per digest wins; a torn final line is skipped.
pub fn replay(path: &Path) -> io::Result<HashMap<String, String>> {
    let reader = BufReader::new(File::open(path)?);
    let mut map = HashMap::new();
    let lines: Vec<String> = reader.lines().collect::<Result<_, _>>()?;
    let last = lines.len();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JournalEntry>(line) {
            Ok(entry) => {
                if let Some(text) = entry.response {
                    map.entry(entry.digest).or_insert(text);
                }
            }
            Err(e) if i + 1 == last => log::warn!("{}: ignoring torn final line: {e}", path.display()),
            Err(e) => {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{} line {}: {e}", path.display(), i + 1),
                ))
            }
        }
    }
    Ok(map)
}
