//! Project store, result caches and the SMAA worker pool.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use catsd::document::{Model, ProblemDocument, SmaaSettings};
use catsd::engine::{self, FeasibilityReport};
use catsd::export::{self, DistributionDocument};
use catsd::smaa::AssignmentDistribution;
use catsd::Result;
use serde::{Deserialize, Serialize};
use tokio::sync::{OwnedMutexGuard, Semaphore};

use crate::api::ClassifyResponse;

const DOCUMENT_FILE: &str = "document.json";
const META_FILE: &str = "meta.json";

#[derive(Clone, Debug)]
pub struct Config {
    pub data_dir: PathBuf,
    /// When set, every request needs `Authorization: Bearer <token>`.
    pub token: Option<String>,
    /// Concurrent SMAA computations.
    pub workers: usize,
    /// Default sample count for what-if comparisons.
    pub whatif_samples: usize,
}

impl Config {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        Config { data_dir: data_dir.into(), token: None, workers: 2, whatif_samples: 5000 }
    }
}

pub(crate) type SettingsKey = (usize, u64, usize, usize);

pub(crate) fn settings_key(s: &SmaaSettings) -> SettingsKey {
    (s.samples, s.seed, s.burn_in, s.thinning)
}

/// The current revision of a project. Cheap to clone.
#[derive(Clone)]
pub struct Snapshot {
    pub revision: u64,
    pub document: Arc<ProblemDocument>,
    pub model: Arc<Model>,
}

#[derive(Default)]
struct Caches {
    revision: u64,
    feasibility: Option<Arc<FeasibilityReport>>,
    distributions: HashMap<SettingsKey, Arc<AssignmentDistribution>>,
    classifications: HashMap<(SettingsKey, String), Arc<ClassifyResponse>>,
}

pub struct Project {
    pub id: String,
    dir: PathBuf,
    edit: Arc<tokio::sync::Mutex<()>>,
    current: RwLock<Snapshot>,
    caches: Mutex<Caches>,
}

#[derive(Serialize, Deserialize)]
struct Meta {
    revision: u64,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

impl Project {
    fn load(id: String, dir: PathBuf) -> Result<Self> {
        let text = fs::read_to_string(dir.join(DOCUMENT_FILE))?;
        let meta: Meta = serde_json::from_str(&fs::read_to_string(dir.join(META_FILE))?)?;
        let document = ProblemDocument::from_json(&text)?;
        let model = document.compile()?;
        Ok(Project::with(id, dir, meta.revision, document, model))
    }

    fn with(id: String, dir: PathBuf, revision: u64, document: ProblemDocument, model: Model) -> Self {
        Project {
            id,
            dir,
            edit: Arc::new(tokio::sync::Mutex::new(())),
            current: RwLock::new(Snapshot { revision, document: Arc::new(document), model: Arc::new(model) }),
            caches: Mutex::new(Caches { revision, ..Caches::default() }),
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        self.current.read().unwrap().clone()
    }

    /// Takes the edit lock without waiting. `None` while another edit runs.
    pub fn try_lock(&self) -> Option<OwnedMutexGuard<()>> {
        self.edit.clone().try_lock_owned().ok()
    }

    /// Stores a new revision. The caller holds the edit lock.
    pub(crate) fn replace(&self, document: ProblemDocument, model: Model) -> Result<Snapshot> {
        let revision = self.snapshot().revision + 1;
        write_atomic(&self.dir.join(DOCUMENT_FILE), document.to_json()?.as_bytes())?;
        write_atomic(&self.dir.join(META_FILE), serde_json::to_string(&Meta { revision })?.as_bytes())?;
        let snap = Snapshot { revision, document: Arc::new(document), model: Arc::new(model) };
        *self.current.write().unwrap() = snap.clone();
        *self.caches.lock().unwrap() = Caches { revision, ..Caches::default() };
        Ok(snap)
    }

    pub(crate) fn cached_feasibility(&self, revision: u64) -> Option<Arc<FeasibilityReport>> {
        let c = self.caches.lock().unwrap();
        if c.revision == revision {
            c.feasibility.clone()
        } else {
            None
        }
    }

    pub(crate) fn store_feasibility(&self, revision: u64, r: Arc<FeasibilityReport>) {
        let mut c = self.caches.lock().unwrap();
        if c.revision == revision {
            c.feasibility = Some(r);
        }
    }

    pub(crate) fn cached_distribution(&self, revision: u64, key: SettingsKey) -> Option<Arc<AssignmentDistribution>> {
        let c = self.caches.lock().unwrap();
        if c.revision == revision {
            c.distributions.get(&key).cloned()
        } else {
            None
        }
    }

    pub(crate) fn store_distribution(&self, revision: u64, key: SettingsKey, d: Arc<AssignmentDistribution>) {
        let mut c = self.caches.lock().unwrap();
        if c.revision == revision {
            c.distributions.insert(key, d);
        }
    }

    pub(crate) fn cached_classification(&self, revision: u64, key: &(SettingsKey, String)) -> Option<Arc<ClassifyResponse>> {
        let c = self.caches.lock().unwrap();
        if c.revision == revision {
            c.classifications.get(key).cloned()
        } else {
            None
        }
    }

    pub(crate) fn store_classification(&self, revision: u64, key: (SettingsKey, String), r: Arc<ClassifyResponse>) {
        let mut c = self.caches.lock().unwrap();
        if c.revision == revision {
            c.classifications.insert(key, r);
        }
    }

    pub fn run_dir(&self, revision: u64, s: &SmaaSettings) -> PathBuf {
        self.dir
            .join("runs")
            .join(format!("r{revision}-seed{}-n{}-b{}-t{}", s.seed, s.samples, s.burn_in, s.thinning))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Queued,
    Running,
    Done,
    Failed,
}

pub struct Job {
    pub id: String,
    pub project: String,
    pub revision: u64,
    pub settings: SmaaSettings,
    pub(crate) state: Mutex<(JobStatus, Option<String>, Option<Arc<DistributionDocument>>)>,
}

impl Job {
    pub fn status(&self) -> JobStatus {
        self.state.lock().unwrap().0.clone()
    }
}

struct Inner {
    config: Config,
    projects: RwLock<BTreeMap<String, Arc<Project>>>,
    jobs: Mutex<BTreeMap<String, Arc<Job>>>,
    next_project: AtomicU64,
    next_job: AtomicU64,
    pool: Arc<Semaphore>,
}

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    /// Opens the data directory and loads every stored project.
    pub fn open(config: Config) -> io::Result<Self> {
        fs::create_dir_all(&config.data_dir)?;
        let mut projects = BTreeMap::new();
        let mut max_id = 0;
        for entry in fs::read_dir(&config.data_dir)? {
            let entry = entry?;
            if !entry.file_type()?.is_dir() {
                continue;
            }
            let id = entry.file_name().to_string_lossy().into_owned();
            match Project::load(id.clone(), entry.path()) {
                Ok(p) => {
                    if let Some(n) = id.strip_prefix('p').and_then(|n| n.parse::<u64>().ok()) {
                        max_id = max_id.max(n);
                    }
                    projects.insert(id, Arc::new(p));
                }
                Err(e) => eprintln!("skipping {}: {e}", entry.path().display()),
            }
        }
        let workers = config.workers.max(1);
        Ok(AppState {
            inner: Arc::new(Inner {
                config,
                projects: RwLock::new(projects),
                jobs: Mutex::new(BTreeMap::new()),
                next_project: AtomicU64::new(max_id + 1),
                next_job: AtomicU64::new(1),
                pool: Arc::new(Semaphore::new(workers)),
            }),
        })
    }

    pub fn config(&self) -> &Config {
        &self.inner.config
    }

    pub fn project(&self, id: &str) -> Option<Arc<Project>> {
        self.inner.projects.read().unwrap().get(id).cloned()
    }

    pub fn projects(&self) -> Vec<Arc<Project>> {
        self.inner.projects.read().unwrap().values().cloned().collect()
    }

    pub(crate) fn create(&self, document: ProblemDocument, model: Model) -> Result<Arc<Project>> {
        let id = format!("p{}", self.inner.next_project.fetch_add(1, Ordering::SeqCst));
        let dir = self.inner.config.data_dir.join(&id);
        fs::create_dir_all(&dir)?;
        write_atomic(&dir.join(DOCUMENT_FILE), document.to_json()?.as_bytes())?;
        write_atomic(&dir.join(META_FILE), serde_json::to_string(&Meta { revision: 1 })?.as_bytes())?;
        let p = Arc::new(Project::with(id.clone(), dir, 1, document, model));
        self.inner.projects.write().unwrap().insert(id, p.clone());
        Ok(p)
    }

    pub(crate) fn delete(&self, id: &str) -> Result<bool> {
        let removed = self.inner.projects.write().unwrap().remove(id);
        match removed {
            Some(p) => {
                fs::remove_dir_all(&p.dir)?;
                Ok(true)
            }
            None => Ok(false),
        }
    }

    pub fn job(&self, id: &str) -> Option<Arc<Job>> {
        self.inner.jobs.lock().unwrap().get(id).cloned()
    }

    pub(crate) fn new_job(&self, project: &str, revision: u64, settings: SmaaSettings) -> Arc<Job> {
        let id = format!("j{}", self.inner.next_job.fetch_add(1, Ordering::SeqCst));
        let job = Arc::new(Job {
            id: id.clone(),
            project: project.to_string(),
            revision,
            settings,
            state: Mutex::new((JobStatus::Queued, None, None)),
        });
        self.inner.jobs.lock().unwrap().insert(id, job.clone());
        job
    }

    pub(crate) fn pool(&self) -> Arc<Semaphore> {
        self.inner.pool.clone()
    }
}

/// Feasibility of the snapshot, computed once per revision.
pub(crate) async fn feasibility(p: &Project, snap: &Snapshot) -> Arc<FeasibilityReport> {
    if let Some(r) = p.cached_feasibility(snap.revision) {
        return r;
    }
    let model = snap.model.clone();
    let r = Arc::new(
        tokio::task::spawn_blocking(move || engine::feasibility(&model)).await.expect("feasibility task panicked"),
    );
    p.store_feasibility(snap.revision, r.clone());
    r
}

/// Assignment distribution of the snapshot under `settings`. Looks in the
/// in-memory cache, then in the stored runs, then computes on the pool.
pub(crate) async fn distribution(
    state: &AppState,
    p: &Project,
    snap: &Snapshot,
    settings: SmaaSettings,
    persist: bool,
) -> Result<Arc<AssignmentDistribution>> {
    let key = settings_key(&settings);
    if let Some(d) = p.cached_distribution(snap.revision, key) {
        return Ok(d);
    }
    let dir = p.run_dir(snap.revision, &settings);
    if let Ok(d) = export::read_distribution(&dir) {
        let d = Arc::new(d);
        p.store_distribution(snap.revision, key, d.clone());
        return Ok(d);
    }
    let d = Arc::new(compute(state, snap.model.clone(), settings).await?);
    if persist {
        let input = snap.document.to_json()?;
        export::write_run(&dir, input.as_bytes(), &settings, &snap.model.problem.hierarchy, &d)?;
    }
    p.store_distribution(snap.revision, key, d.clone());
    Ok(d)
}

/// Runs SMAA on the worker pool without touching any cache.
pub(crate) async fn compute(state: &AppState, model: Arc<Model>, settings: SmaaSettings) -> Result<AssignmentDistribution> {
    let _permit = state.pool().acquire_owned().await.expect("pool closed");
    tokio::task::spawn_blocking(move || engine::smaa(&model, &settings)).await.expect("SMAA task panicked")
}
