//! Line-delimited JSON for chain records and attack events.

use std::io::{BufRead, Write};

use super::{AttackEvent, ChainRecord};
use crate::error::{Error, Result};

/// Reads one `{"slot", "priority", "endorsements"}` object per line.
/// Blank lines are skipped; anything else malformed is reported with its
/// 1-based line number. Slot continuity is checked by
/// [`ChainHistory::new`](super::ChainHistory::new).
pub fn read_chain<R: BufRead>(reader: R) -> Result<Vec<ChainRecord>> {
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: ChainRecord = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        record.validate().map_err(|e| Error::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_chain<W: Write>(mut writer: W, records: &[ChainRecord]) -> Result<()> {
    for r in records {
        writeln!(
            writer,
            r#"{{"slot":{},"priority":{},"endorsements":{}}}"#,
            r.slot, r.priority, r.endorsements
        )?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_events<R: BufRead>(reader: R) -> Result<Vec<AttackEvent>> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        events.push(serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(events)
}

pub fn write_events<W: Write>(mut writer: W, events: &[AttackEvent]) -> Result<()> {
    for ev in events {
        writeln!(writer, r#"{{"executed_at":{},"fork_length":{}}}"#, ev.executed_at, ev.fork_length)?;
    }
    writer.flush()?;
    Ok(())
}
