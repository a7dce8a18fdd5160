//! Grouping frames by station and segmenting user-active traffic traces.
//!
//! A station's frame stream is binned into consecutive 1-second bins anchored
//! at its first frame. A trace is the concatenation of frames in a maximal
//! run of consecutive bins that each hold at least `gamma` frames; everything
//! below the rate threshold is treated as background traffic and dropped.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mac::MacAddr;
use crate::wire::canonical;
use crate::wire::frame::FrameRecord;

pub const MICROS_PER_SECOND: i64 = 1_000_000;

/// Default activity threshold in frames per second.
pub const DEFAULT_GAMMA: f64 = 3.0;

/// A maximal user-active frame sequence of one station.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficTrace {
    pub station: MacAddr,
    pub trace_index: usize,
    pub frames: Vec<FrameRecord>,
}

impl TrafficTrace {
    /// Time span from first to last frame, in seconds.
    pub fn duration_s(&self) -> f64 {
        self.duration_us() as f64 / MICROS_PER_SECOND as f64
    }

    pub fn duration_us(&self) -> i64 {
        match (self.frames.first(), self.frames.last()) {
            (Some(a), Some(b)) => b.timestamp_us - a.timestamp_us,
            _ => 0,
        }
    }

    pub fn start_us(&self) -> i64 {
        self.frames.first().map(|f| f.timestamp_us).unwrap_or(0)
    }
}

/// All traces of a capture, indexed by (station, trace index).
#[derive(Clone, Debug, Default)]
pub struct TraceSet {
    pub traces: Vec<TrafficTrace>,
}

impl TraceSet {
    /// Total trace count.
    pub fn trace_count(&self) -> usize {
        self.traces.len()
    }

    /// Number of distinct stations that produced at least one trace.
    pub fn station_count(&self) -> usize {
        let mut stations: Vec<MacAddr> = self.traces.iter().map(|t| t.station).collect();
        stations.sort();
        stations.dedup();
        stations.len()
    }

    /// Per-station trace counts; their sum equals `trace_count`.
    pub fn traces_per_station(&self) -> BTreeMap<MacAddr, usize> {
        let mut map = BTreeMap::new();
        for t in &self.traces {
            *map.entry(t.station).or_insert(0) += 1;
        }
        map
    }
}

/// Partition time-sorted records by station, preserving per-station order.
pub fn group_by_station(records: &[FrameRecord]) -> BTreeMap<MacAddr, Vec<FrameRecord>> {
    let mut map: BTreeMap<MacAddr, Vec<FrameRecord>> = BTreeMap::new();
    for r in records {
        map.entry(r.station).or_default().push(*r);
    }
    map
}

/// Segment one station's time-sorted frames into user-active traces.
///
/// Bins are 1 second wide, anchored at the station's first frame. `gamma` is
/// in frames per second; a bin qualifies when its frame count is >= gamma.
pub fn segment_traces(
    station: MacAddr,
    frames: &[FrameRecord],
    gamma: f64,
) -> Result<Vec<TrafficTrace>> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::config(format!(
            "gamma must be positive and finite, got {gamma}"
        )));
    }
    if frames.is_empty() {
        return Ok(Vec::new());
    }
    let t0 = frames[0].timestamp_us;
    let bin_of = |ts: i64| ((ts - t0) / MICROS_PER_SECOND) as usize;
    let n_bins = bin_of(frames[frames.len() - 1].timestamp_us) + 1;

    let mut counts = vec![0usize; n_bins];
    for f in frames {
        counts[bin_of(f.timestamp_us)] += 1;
    }
    let qualifies: Vec<bool> = counts.iter().map(|&c| c as f64 >= gamma).collect();

    let mut traces = Vec::new();
    let mut bin_start = 0usize;
    while bin_start < n_bins {
        if !qualifies[bin_start] {
            bin_start += 1;
            continue;
        }
        let mut bin_end = bin_start;
        while bin_end + 1 < n_bins && qualifies[bin_end + 1] {
            bin_end += 1;
        }
        let members: Vec<FrameRecord> = frames
            .iter()
            .filter(|f| {
                let b = bin_of(f.timestamp_us);
                b >= bin_start && b <= bin_end
            })
            .copied()
            .collect();
        traces.push(TrafficTrace {
            station,
            trace_index: traces.len(),
            frames: members,
        });
        bin_start = bin_end + 1;
    }
    Ok(traces)
}

/// Group then segment every station of a capture.
pub fn segment_all(records: &[FrameRecord], gamma: f64) -> Result<TraceSet> {
    let mut set = TraceSet::default();
    for (station, frames) in group_by_station(records) {
        set.traces
            .extend(segment_traces(station, &frames, gamma)?);
    }
    Ok(set)
}

/// Write a trace set as one directory per station with one canonical-format
/// file per trace, named `trace_<i>_<j>.frames`.
pub fn dump_traces(dir: &Path, set: &TraceSet) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut station_index: BTreeMap<MacAddr, usize> = BTreeMap::new();
    for t in &set.traces {
        let next = station_index.len();
        let i = *station_index.entry(t.station).or_insert(next);
        let sub = dir.join(t.station.to_dir_name());
        fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
        let file = sub.join(format!("trace_{}_{}.frames", i, t.trace_index));
        canonical::write_records(&file, &t.frames)?;
    }
    Ok(())
}

/// Load every `*.frames` file below `dir` back into a trace set.
pub fn load_traces(dir: &Path) -> Result<TraceSet> {
    let mut set = TraceSet::default();
    let mut files = Vec::new();
    collect_frames_files(dir, &mut files)?;
    files.sort();
    for file in files {
        let read = canonical::read_records(&file)?;
        if read.records.is_empty() {
            continue;
        }
        let station = read.records[0].station;
        let idx = set
            .traces
            .iter()
            .filter(|t| t.station == station)
            .count();
        set.traces.push(TrafficTrace {
            station,
            trace_index: idx,
            frames: read.records,
        });
    }
    Ok(set)
}

fn collect_frames_files(dir: &Path, out: &mut Vec<std::path::PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            collect_frames_files(&path, out)?;
        } else if path.extension().map(|e| e == "frames").unwrap_or(false) {
            out.push(path);
        }
    }
    Ok(())
}
