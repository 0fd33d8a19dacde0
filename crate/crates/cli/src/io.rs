use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use tasksyn::error::FormatError;
use tasksyn::format::{task_from_json, task_to_json};
use tasksyn::lang::{parse, print};
use tasksyn::model::{Program, Task, TaskCode};
use tasksyn::scoring::ScoringConfig;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn read_task(path: &Path) -> Result<Task> {
    let text = read(path)?;
    task_from_json(&text).map_err(|e| match e {
        FormatError::Json {
            line,
            column,
            message,
        } => {
            anyhow!("{}:{line}:{column}: {message}", path.display())
        }
        other => anyhow!("{}: {other}", path.display()),
    })
}

pub fn read_code(path: &Path) -> Result<Program> {
    let text = read(path)?;
    parse(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

pub fn read_pair(task: &Path, code: &Path) -> Result<TaskCode> {
    Ok(TaskCode::new(read_task(task)?, read_code(code)?))
}

pub fn read_config(path: Option<&Path>) -> Result<ScoringConfig> {
    match path {
        None => Ok(ScoringConfig::default()),
        Some(p) => ScoringConfig::from_toml(&read(p)?).map_err(|e| anyhow!("{}: {e}", p.display())),
    }
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes `<stem>.task.json` and `<stem>.xlc` under `dir`.
pub fn write_pair(dir: &Path, stem: &str, pair: &TaskCode) -> Result<()> {
    write(
        &dir.join(format!("{stem}.task.json")),
        &(task_to_json(&pair.task) + "\n"),
    )?;
    write(
        &dir.join(format!("{stem}.xlc")),
        &(print(&pair.code) + "\n"),
    )
}
