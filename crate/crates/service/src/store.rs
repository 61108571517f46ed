use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use dashmap::DashMap;
use serde::{Deserialize, Serialize};

use taugraph::dataset::{parse_csv, write_csv, ColumnSpec, RankedDataset};
use taugraph::kendall::{tau_b_fast, KendallError, TauResult};

use crate::ServiceError;

/// An uploaded dataset. Never mutated after insertion.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecord {
    pub id: String,
    pub dataset: RankedDataset,
    /// Unix time in milliseconds.
    pub created_at: u64,
    pub tau: TauResult,
}

/// Sidecar written next to each persisted CSV.
#[derive(Debug, Serialize, Deserialize)]
struct RecordMeta {
    id: String,
    created_at: u64,
    x_name: String,
    y_name: String,
}

/// 128 random bits as 32 lowercase hex digits.
pub fn new_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

fn now_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn valid_id(id: &str) -> bool {
    id.len() == 32 && id.bytes().all(|b| b.is_ascii_hexdigit())
}

/// Concurrent id → record map with optional write-through to a directory.
#[derive(Debug, Default)]
pub struct DatasetStore {
    records: DashMap<String, Arc<DatasetRecord>>,
    dir: Option<PathBuf>,
}

impl DatasetStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens a persistent store, loading every record already in `dir`.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let store = Self {
            records: DashMap::new(),
            dir: Some(dir.clone()),
        };
        let mut entries: Vec<_> = fs::read_dir(&dir)?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        entries.sort();
        for meta_path in entries {
            let record = load_record(&meta_path)?;
            store.records.insert(record.id.clone(), Arc::new(record));
        }
        Ok(store)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<Arc<DatasetRecord>> {
        self.records.get(id).map(|r| Arc::clone(r.value()))
    }

    /// Computes τ, assigns a fresh id and stores the record.
    pub fn insert(&self, dataset: RankedDataset) -> Result<Arc<DatasetRecord>, KendallError> {
        let tau = tau_b_fast(&dataset)?;
        loop {
            let record = DatasetRecord {
                id: new_id(),
                dataset: dataset.clone(),
                created_at: now_millis(),
                tau: tau.clone(),
            };
            let entry = self.records.entry(record.id.clone());
            if let dashmap::Entry::Vacant(slot) = entry {
                let record = Arc::new(record);
                slot.insert(Arc::clone(&record));
                return Ok(record);
            }
        }
    }

    /// Writes `record` into the store directory, if there is one.
    pub fn persist(&self, record: &DatasetRecord) -> Result<(), ServiceError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        fs::write(dir.join(format!("{}.csv", record.id)), write_csv(&record.dataset))?;
        let meta = RecordMeta {
            id: record.id.clone(),
            created_at: record.created_at,
            x_name: record.dataset.x_name.clone(),
            y_name: record.dataset.y_name.clone(),
        };
        let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        fs::write(dir.join(format!("{}.json", record.id)), json)?;
        Ok(())
    }
}

fn load_record(meta_path: &Path) -> Result<DatasetRecord, ServiceError> {
    let bad = |why: String| ServiceError::Store(format!("{}: {why}", meta_path.display()));
    let meta: RecordMeta = serde_json::from_slice(&fs::read(meta_path)?).map_err(|e| bad(e.to_string()))?;
    if !valid_id(&meta.id) {
        return Err(bad(format!("invalid id {:?}", meta.id)));
    }
    let raw = fs::read(meta_path.with_extension("csv"))?;
    let spec = ColumnSpec::new(1usize, 2usize).with_label(0usize);
    let mut dataset = parse_csv(&raw, &spec).map_err(|e| bad(e.to_string()))?.dataset;
    dataset.x_name = meta.x_name;
    dataset.y_name = meta.y_name;
    let tau = tau_b_fast(&dataset).map_err(|e| bad(e.to_string()))?;
    Ok(DatasetRecord {
        id: meta.id,
        dataset,
        created_at: meta.created_at,
        tau,
    })
}
