//! Executes configurations, writes artifacts and replays completed runs.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::artifacts::{sha256_hex, Outcome, Status, ARTIFACT_VERSION, CONFIG_FILE, MANIFEST_FILE, SUMMARY_FILE};
use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::experiments;
use crate::manifest::RunManifest;

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: Status,
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::ConfigInvalid("threads: must be at least 1".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// `summary.json`: the echoed configuration and every reported number.
pub fn render_summary(config: &ExperimentConfig, outcome: &Outcome) -> String {
    let canonical: Value = serde_json::from_str(&config.canonical_json()).expect("canonical config is JSON");
    let summary = json!({
        "artifact_version": ARTIFACT_VERSION,
        "config": canonical,
        "config_hash": config.hash(),
        "status": outcome.status,
        "quantities": outcome.quantities,
        "facts": outcome.facts,
        "trials_file": config.format.trials_file(),
        "columns": outcome.table.columns,
    });
    let mut s = serde_json::to_string_pretty(&summary).expect("summary serialises");
    s.push('\n');
    s
}

/// Sole writer of a run directory; records the hash of each data file.
struct ArtifactWriter {
    dir: PathBuf,
    data_files: Vec<(String, String)>,
}

impl ArtifactWriter {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            data_files: Vec::new(),
        })
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(path, e))
    }

    fn write_data(&mut self, name: &str, contents: &str) -> Result<()> {
        self.write(name, contents)?;
        self.data_files.push((name.to_string(), sha256_hex(contents.as_bytes())));
        Ok(())
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Validates, executes and writes `summary.json`, the trial table,
/// `config.json` and `manifest.txt` into `config.output_path`. Nothing is
/// written if validation or execution fails.
pub fn run(config: &ExperimentConfig, threads: Option<usize>) -> Result<RunResult> {
    let plan = config.plan()?;
    let started = now();
    let outcome = with_threads(threads, || experiments::execute(&plan))??;
    let dir = PathBuf::from(if config.output_path.is_empty() { "out" } else { &config.output_path });
    let mut writer = ArtifactWriter::create(&dir)?;
    writer.write_data(SUMMARY_FILE, &render_summary(config, &outcome))?;
    let table = match config.format {
        crate::config::Format::Csv => outcome.table.to_csv(),
        crate::config::Format::Json => outcome.table.to_json(),
    };
    writer.write_data(config.format.trials_file(), &table)?;
    writer.write(CONFIG_FILE, &config.to_json())?;
    let manifest = RunManifest {
        artifact_version: ARTIFACT_VERSION,
        config_hash: config.hash(),
        config_file: CONFIG_FILE.to_string(),
        subcommand: config.subcommand.clone(),
        status: outcome.status.as_str().to_string(),
        started,
        finished: now(),
        modules: vec![
            ("thresholdlab".into(), thresholdlab::VERSION.into()),
            (env!("CARGO_PKG_NAME").into(), env!("CARGO_PKG_VERSION").into()),
        ],
        data_files: writer.data_files.clone(),
    };
    writer.write(MANIFEST_FILE, &manifest.render())?;
    Ok(RunResult {
        status: outcome.status,
        dir,
        manifest,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub files_compared: usize,
    pub recorded_status: String,
}

fn first_difference(file: &str, recorded: &str, replayed: &str) -> CliError {
    let mut a = recorded.lines();
    let mut b = replayed.lines();
    let mut line = 1;
    loop {
        match (a.next(), b.next()) {
            (Some(x), Some(y)) if x == y => line += 1,
            (x, y) => {
                return CliError::ReplayMismatch {
                    file: file.to_string(),
                    line,
                    recorded: x.unwrap_or("<end of file>").to_string(),
                    replayed: y.unwrap_or("<end of file>").to_string(),
                }
            }
        }
    }
}

/// Re-runs the configuration recorded next to `manifest_path` in a scratch
/// directory and compares every data file byte for byte.
pub fn replay(manifest_path: &Path, threads: Option<usize>) -> Result<ReplayReport> {
    let text = fs::read_to_string(manifest_path).map_err(|e| CliError::io(manifest_path, e))?;
    let manifest = RunManifest::parse(&text)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let config_path = dir.join(&manifest.config_file);
    let config_text = fs::read_to_string(&config_path).map_err(|e| CliError::io(&config_path, e))?;
    let mut config = ExperimentConfig::from_json(&config_text)?;
    let hash = config.hash();
    if hash != manifest.config_hash {
        return Err(CliError::ConfigInvalid(format!(
            "config hash mismatch: manifest records {}, {} hashes to {hash}",
            manifest.config_hash,
            config_path.display()
        )));
    }
    let scratch = tempfile::tempdir().map_err(|e| CliError::io(std::env::temp_dir(), e))?;
    config.output_path = scratch.path().to_string_lossy().into_owned();
    let rerun = run(&config, threads)?;
    let replayed_names: Vec<&String> = rerun.manifest.data_files.iter().map(|(n, _)| n).collect();
    let recorded_names: Vec<&String> = manifest.data_files.iter().map(|(n, _)| n).collect();
    if replayed_names != recorded_names {
        return Err(CliError::ReplayMismatch {
            file: MANIFEST_FILE.into(),
            line: 0,
            recorded: format!("{recorded_names:?}"),
            replayed: format!("{replayed_names:?}"),
        });
    }
    for (name, _) in &manifest.data_files {
        let recorded_path = dir.join(name);
        let recorded = fs::read(&recorded_path).map_err(|e| CliError::io(&recorded_path, e))?;
        let replayed_path = rerun.dir.join(name);
        let replayed = fs::read(&replayed_path).map_err(|e| CliError::io(&replayed_path, e))?;
        if recorded != replayed {
            return Err(first_difference(
                name,
                &String::from_utf8_lossy(&recorded),
                &String::from_utf8_lossy(&replayed),
            ));
        }
    }
    Ok(ReplayReport {
        files_compared: manifest.data_files.len(),
        recorded_status: manifest.status,
    })
}
