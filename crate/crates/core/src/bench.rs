//! MRLS-versus-QOA comparison runs and their CSV report.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::format::fmt_sig17;
use crate::generator::{generate_instance, GenSpec};
use crate::local_search::mrls_run;
use crate::model::CopInstance;
use crate::rng::derive_seed;
use crate::solver::{run_qoa, SolverConfig};

pub const REPORT_HEADER: &str = "instance,algorithm,trials,cost,seconds,improvement_pct";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Qoa,
    Mrls,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Qoa => "qoa",
            Algorithm::Mrls => "mrls",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "qoa" => Ok(Algorithm::Qoa),
            "mrls" => Ok(Algorithm::Mrls),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub instance_id: String,
    pub algorithm: Algorithm,
    pub trials: usize,
    /// `None` when the run faulted; see `error`.
    pub cost: Option<f64>,
    pub wall_seconds: f64,
    /// Present on QOA rows when both runs of the instance succeeded.
    pub improvement_pct: Option<f64>,
    pub error: Option<String>,
}

/// Relative gain of QOA over MRLS in percent, measured against the QOA cost:
/// `100 · (mrls − qoa) / qoa`.
pub fn improvement_pct(mrls_cost: f64, qoa_cost: f64) -> Result<f64> {
    if !(qoa_cost > 0.0) {
        return Err(Error::Contract(format!("improvement undefined for QOA cost {qoa_cost}")));
    }
    Ok(100.0 * (mrls_cost - qoa_cost) / qoa_cost)
}

/// Rounds half up to two decimals.
pub fn round_pct(x: f64) -> f64 {
    (x * 100.0 + 0.5).floor() / 100.0
}

/// Display form of an improvement value, e.g. `5.76`.
pub fn fmt_pct(x: f64) -> String {
    format!("{:.2}", round_pct(x))
}

#[derive(Debug, Clone)]
pub enum BatchItem {
    Generated(GenSpec),
    Loaded { id: String, instance: CopInstance },
}

impl BatchItem {
    fn id(&self, index: usize) -> String {
        match self {
            BatchItem::Generated(_) => format!("g{}", index + 1),
            BatchItem::Loaded { id, .. } => id.clone(),
        }
    }
}

/// Seeds for instance `index`: `(mrls_seed, qoa_seed)`.
pub fn instance_seeds(master_seed: u64, index: usize) -> (u64, u64) {
    let base = derive_seed(master_seed, index as u64);
    (derive_seed(base, 0), derive_seed(base, 1))
}

fn compare_one(
    item: &BatchItem,
    index: usize,
    restarts: usize,
    qoa_cfg: &SolverConfig,
    master_seed: u64,
) -> [BenchRecord; 2] {
    let id = item.id(index);
    let failed = |algorithm, trials, msg: &str| BenchRecord {
        instance_id: id.clone(),
        algorithm,
        trials,
        cost: None,
        wall_seconds: 0.0,
        improvement_pct: None,
        error: Some(msg.to_string()),
    };

    let generated;
    let inst = match item {
        BatchItem::Generated(spec) => match generate_instance(spec) {
            Ok(inst) => {
                generated = inst;
                &generated
            }
            Err(e) => {
                let msg = e.to_string();
                return [failed(Algorithm::Mrls, restarts, &msg), failed(Algorithm::Qoa, 1, &msg)];
            }
        },
        BatchItem::Loaded { instance, .. } => instance,
    };

    let (mrls_seed, qoa_seed) = instance_seeds(master_seed, index);
    let ls = mrls_run(inst, restarts, mrls_seed);
    let mrls = BenchRecord {
        instance_id: id.clone(),
        algorithm: Algorithm::Mrls,
        trials: restarts,
        cost: Some(ls.cost),
        wall_seconds: ls.wall_seconds,
        improvement_pct: None,
        error: None,
    };

    let cfg = SolverConfig { seed: qoa_seed, ..qoa_cfg.clone() };
    let qoa = match run_qoa(inst, &cfg) {
        Ok(report) => BenchRecord {
            instance_id: id.clone(),
            algorithm: Algorithm::Qoa,
            trials: 1,
            cost: Some(report.cost),
            wall_seconds: report.wall_seconds,
            improvement_pct: improvement_pct(ls.cost, report.cost).ok(),
            error: None,
        },
        Err(e) => failed(Algorithm::Qoa, 1, &e.to_string()),
    };
    [mrls, qoa]
}

/// Runs MRLS (`restarts` trials) and a single QOA trial on every batch item.
/// Records come back in batch order, MRLS row first, whatever `jobs` is.
/// Solver faults are recorded on the affected rows and do not stop the batch.
pub fn run_comparison(
    batch: &[BatchItem],
    restarts: usize,
    qoa_cfg: &SolverConfig,
    master_seed: u64,
    jobs: usize,
) -> Result<Vec<BenchRecord>> {
    if batch.is_empty() {
        return Err(Error::Contract("comparison batch is empty".into()));
    }
    if restarts == 0 {
        return Err(Error::Contract("restarts must be at least 1".into()));
    }
    qoa_cfg.validate()?;

    let jobs = jobs.clamp(1, batch.len());
    let slots: Mutex<Vec<Option<[BenchRecord; 2]>>> = Mutex::new(vec![None; batch.len()]);
    if jobs == 1 {
        for (index, item) in batch.iter().enumerate() {
            let rows = compare_one(item, index, restarts, qoa_cfg, master_seed);
            slots.lock().unwrap()[index] = Some(rows);
        }
    } else {
        let next = AtomicUsize::new(0);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let index = next.fetch_add(1, Ordering::Relaxed);
                    let Some(item) = batch.get(index) else { break };
                    let rows = compare_one(item, index, restarts, qoa_cfg, master_seed);
                    slots.lock().unwrap()[index] = Some(rows);
                });
            }
        });
    }
    Ok(slots
        .into_inner()
        .unwrap()
        .into_iter()
        .flat_map(|rows| rows.expect("every slot filled"))
        .collect())
}

pub fn write_report(records: &[BenchRecord]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in records {
        writer
            .write_record([
                r.instance_id.clone(),
                r.algorithm.to_string(),
                r.trials.to_string(),
                r.cost.map(fmt_sig17).unwrap_or_default(),
                format!("{:.3}", r.wall_seconds),
                r.improvement_pct.map(fmt_pct).unwrap_or_default(),
            ])
            .expect("writing to memory");
    }
    out.push_str(&String::from_utf8(writer.into_inner().expect("in-memory writer")).unwrap());
    out
}

/// Parses a report back into records. Improvement values are recomputed from
/// the instance's MRLS and QOA costs, so they carry full precision; the
/// printed two-decimal value must agree with the recomputed one.
pub fn parse_report(text: &str) -> Result<Vec<BenchRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::parse(1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != REPORT_HEADER {
        return Err(Error::parse(1, "unexpected report header"));
    }
    let mut records = Vec::new();
    let mut printed = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let line = idx + 2;
        let row = row.map_err(|e| Error::parse(line, e.to_string()))?;
        if row.len() != 6 {
            return Err(Error::parse(line, format!("expected 6 fields, found {}", row.len())));
        }
        let algorithm: Algorithm = row[1].parse().map_err(|e: String| Error::parse(line, e))?;
        let trials = row[2].parse().map_err(|_| Error::parse(line, "bad trials field"))?;
        let cost = match &row[3] {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|_| Error::parse(line, "bad cost field"))?),
        };
        let wall_seconds = row[4].parse().map_err(|_| Error::parse(line, "bad seconds field"))?;
        let shown = match &row[5] {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|_| Error::parse(line, "bad improvement field"))?),
        };
        printed.push((line, shown));
        records.push(BenchRecord {
            instance_id: row[0].to_string(),
            algorithm,
            trials,
            cost,
            wall_seconds,
            improvement_pct: None,
            error: None,
        });
    }

    for k in 0..records.len() {
        let (line, Some(shown)) = printed[k] else { continue };
        let qoa = &records[k];
        let mrls = records
            .iter()
            .find(|r| r.algorithm == Algorithm::Mrls && r.instance_id == qoa.instance_id)
            .and_then(|r| r.cost);
        let raw = match (qoa.algorithm, mrls, qoa.cost) {
            (Algorithm::Qoa, Some(m), Some(q)) => improvement_pct(m, q).map_err(|e| Error::parse(line, e.to_string()))?,
            _ => return Err(Error::parse(line, "improvement without a matching MRLS/QOA cost pair")),
        };
        if fmt_pct(raw) != format!("{shown:.2}") {
            return Err(Error::parse(line, format!("improvement {shown} disagrees with costs ({raw})")));
        }
        records[k].improvement_pct = Some(raw);
    }
    Ok(records)
}
