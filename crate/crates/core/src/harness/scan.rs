use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::fields::{fields_for_conductor, ConductorStream};
use crate::norms::{rank_record, RankRecord};

use super::checkpoint::{Checkpoint, ShardState};
use super::report::{MomentReport, Partial};
use super::{HarnessError, ScanConfig};

const FIRST_CONDUCTOR: u64 = 7;
/// Conductors processed by a shard between checkpoint writes.
const CHECKPOINT_EVERY: u64 = 2048;

/// Hooks for stopping a scan early.
#[derive(Debug, Default, Clone)]
pub struct ScanControl {
    /// Stop once this many conductors have been processed in total.
    pub stop_after_conductors: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanStatus {
    Completed,
    Interrupted,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub status: ScanStatus,
    /// Present when the scan completed.
    pub report: Option<MomentReport>,
    pub wall_time: Duration,
}

/// Split `[7, max]` into `shards` contiguous inclusive ranges of near-equal
/// length. Ranges may be empty (`start > end`) when there are more shards
/// than integers.
pub fn shard_ranges(max_conductor: u64, shards: usize) -> Vec<(u64, u64)> {
    let len = max_conductor.saturating_sub(FIRST_CONDUCTOR) + 1;
    let n = shards as u64;
    let (q, rem) = (len / n, len % n);
    let mut start = FIRST_CONDUCTOR;
    (0..n)
        .map(|i| {
            let size = q + u64::from(i < rem);
            let range = (start, start + size - 1);
            start += size;
            range
        })
        .collect()
}

pub fn scan(cfg: &ScanConfig) -> Result<ScanOutcome, HarnessError> {
    scan_with(cfg, &ScanControl::default())
}

pub fn scan_with(cfg: &ScanConfig, control: &ScanControl) -> Result<ScanOutcome, HarnessError> {
    cfg.validate()?;
    let t0 = Instant::now();
    let ranges = shard_ranges(cfg.max_conductor, cfg.shard_count);
    let checkpoint = match &cfg.checkpoint_path {
        Some(path) => Checkpoint::load(path, cfg)?,
        None => None,
    }
    .unwrap_or_else(|| Checkpoint::fresh(cfg, &ranges));

    let state = Mutex::new(checkpoint);
    let processed = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let shard_count = state.lock().unwrap().shards.len();

    let results: Vec<Result<(), HarnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..shard_count)
            .map(|idx| {
                let (state, processed, stop) = (&state, &processed, &stop);
                scope.spawn(move || run_shard(idx, cfg, control, state, processed, stop))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard thread panicked")).collect()
    });
    results.into_iter().collect::<Result<(), _>>()?;

    let checkpoint = state.into_inner().unwrap();
    if let Some(path) = &cfg.checkpoint_path {
        checkpoint.save(path)?;
    }
    if !checkpoint.shards.iter().all(ShardState::is_done) {
        return Ok(ScanOutcome { status: ScanStatus::Interrupted, report: None, wall_time: t0.elapsed() });
    }

    let mut total = Partial::new(cfg.k_max);
    for shard in &checkpoint.shards {
        total.merge(&shard.partial);
    }
    let report = MomentReport::from_partial(cfg.max_conductor, &total);
    if let Some(out) = &cfg.output_path {
        fs::write(out, report.to_json()).map_err(|e| HarnessError::io(out, e))?;
    }
    if cfg.emit_per_field {
        let csv_path = cfg.per_field_path().expect("validated");
        write_per_field_csv(&csv_path, cfg.max_conductor)?;
    }
    Ok(ScanOutcome { status: ScanStatus::Completed, report: Some(report), wall_time: t0.elapsed() })
}

fn run_shard(
    idx: usize,
    cfg: &ScanConfig,
    control: &ScanControl,
    state: &Mutex<Checkpoint>,
    processed: &AtomicU64,
    stop: &AtomicBool,
) -> Result<(), HarnessError> {
    let mut local = state.lock().unwrap().shards[idx].clone();
    if local.is_done() {
        return Ok(());
    }
    let publish = |local: &ShardState| -> Result<(), HarnessError> {
        let mut cp = state.lock().unwrap();
        cp.shards[idx] = local.clone();
        match &cfg.checkpoint_path {
            Some(path) => cp.save(path),
            None => Ok(()),
        }
    };

    let mut since_save = 0u64;
    for conductor in ConductorStream::new(local.next, local.end) {
        if stop.load(Ordering::Relaxed) {
            break;
        }
        if let Some(limit) = control.stop_after_conductors {
            if processed.fetch_add(1, Ordering::SeqCst) >= limit {
                stop.store(true, Ordering::Relaxed);
                break;
            }
        }
        for field in fields_for_conductor(&conductor) {
            local.partial.record(rank_record(&field)?.s);
        }
        local.next = conductor.value() + 1;
        since_save += 1;
        if since_save == CHECKPOINT_EVERY {
            publish(&local)?;
            since_save = 0;
        }
    }
    if !stop.load(Ordering::Relaxed) {
        local.next = local.end + 1;
    }
    publish(&local)
}

/// Rank records for every canonical field with conductor `≤ max_conductor`,
/// ordered by conductor and then selector string.
pub fn field_records(max_conductor: u64) -> impl Iterator<Item = Result<RankRecord, HarnessError>> {
    ConductorStream::new(FIRST_CONDUCTOR, max_conductor)
        .flat_map(|c| fields_for_conductor(&c))
        .map(|f| rank_record(&f).map_err(HarnessError::from))
}

pub fn write_per_field_csv(path: &Path, max_conductor: u64) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let io = |e| HarnessError::io(path, e);
    writeln!(w, "conductor,char_signature,r,m,s").map_err(io)?;
    for rec in field_records(max_conductor) {
        let rec = rec?;
        writeln!(w, "{},{},{},{},{}", rec.conductor, rec.char_signature, rec.r, rec.m, rec.s).map_err(io)?;
    }
    w.flush().map_err(io)
}
