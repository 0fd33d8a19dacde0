use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use tasksyn::baselines::rotate_flip;
use tasksyn::emulator::{check_constraint, evaluate};
use tasksyn::model::{Difficulty, TaskCode};
use tasksyn::render::render_svg;
use tasksyn::scoring::ScoringConfig;
use tasksyn::suite;
use tasksyn::synth::{output_stem, report_json, synthesize, SynthRequest};

use crate::io::{read_code, read_config, read_pair, read_task, write, write_pair};
use crate::{BaselineArgs, BatchArgs, PairArgs, RenderArgs, SynthArgs, EXIT_CHECK, EXIT_EMPTY};

fn difficulty(name: &str) -> Difficulty {
    Difficulty::from_name(name).expect("clap restricts the value")
}

/// Runs one synthesis request and writes its files; returns the output count.
fn run_synth(
    reference: TaskCode,
    level: Difficulty,
    k: usize,
    seed: u64,
    scoring: ScoringConfig,
    out: &Path,
    render: bool,
) -> Result<usize> {
    let mut req = SynthRequest::new(reference, level, k, seed);
    req.scoring = scoring;
    let report = synthesize(&req).context("synthesis failed")?;
    for (i, cand) in report.outputs.iter().enumerate() {
        let stem = output_stem(i);
        let pair = TaskCode::new(cand.task.clone(), cand.code.clone());
        write_pair(out, &stem, &pair)?;
        if render {
            write(
                &out.join(format!("{stem}.svg")),
                &render_svg(&pair.task, Some(&pair.code)),
            )?;
        }
    }
    write(
        &out.join("report.json"),
        &(report_json(&req, &report) + "\n"),
    )?;
    eprintln!(
        "{} {}: {:.2}s",
        out.display(),
        level,
        report.elapsed.as_secs_f64()
    );
    Ok(report.outputs.len())
}

pub fn synth(a: SynthArgs) -> Result<u8> {
    let reference = read_pair(&a.pair.task, &a.pair.code)?;
    let scoring = read_config(a.opts.config.as_deref())?;
    let level = difficulty(&a.difficulty);
    let n = run_synth(
        reference,
        level,
        a.k as usize,
        a.opts.seed,
        scoring,
        &a.opts.out,
        a.opts.render,
    )?;
    println!("wrote {n} task(s) to {}", a.opts.out.display());
    Ok(if n == 0 { EXIT_EMPTY } else { 0 })
}

pub fn check(a: PairArgs) -> Result<u8> {
    let pair = read_pair(&a.task, &a.code)?;
    let verdict = evaluate(&pair.task, &pair.code);
    let mark = |ok: bool| if ok { "pass" } else { "fail" };
    if let Some(reason) = verdict.result.trajectory.crash {
        println!("crash: {}", reason.name());
    }
    println!("goal: {}", mark(verdict.goal_met));
    println!("constraints: {}", mark(verdict.constraints_met));
    for c in &pair.task.constraints {
        println!("  {}: {c}", mark(check_constraint(c, &pair.code)));
    }
    println!(
        "{}",
        if verdict.solved() {
            "solved"
        } else {
            "not solved"
        }
    );
    Ok(if verdict.solved() { 0 } else { EXIT_CHECK })
}

pub fn baseline(a: BaselineArgs) -> Result<u8> {
    let reference = read_pair(&a.pair.task, &a.pair.code)?;
    let out = rotate_flip(&reference, difficulty(&a.difficulty));
    write_pair(&a.out, &output_stem(0), &out)?;
    println!("wrote 1 task to {}", a.out.display());
    Ok(0)
}

pub fn render(a: RenderArgs) -> Result<u8> {
    let task = read_task(&a.task)?;
    let code = a.code.as_deref().map(read_code).transpose()?;
    write(&a.out, &render_svg(&task, code.as_ref()))?;
    Ok(0)
}

/// Tasks per level for one reference.
pub const BATCH_PROFILE: [(Difficulty, usize); 3] = [
    (Difficulty::Easy, 3),
    (Difficulty::Medium, 4),
    (Difficulty::Hard, 3),
];

pub fn batch(a: BatchArgs) -> Result<u8> {
    let scoring = read_config(a.opts.config.as_deref())?;
    let references: Vec<(String, TaskCode)> = match (&a.task, &a.code) {
        (Some(task), Some(code)) => {
            let name = task
                .file_name()
                .and_then(|n| n.to_str())
                .map(|n| {
                    n.trim_end_matches(".json")
                        .trim_end_matches(".task")
                        .to_string()
                })
                .unwrap_or_else(|| "reference".into());
            vec![(name, read_pair(task, code)?)]
        }
        _ => suite::references()
            .into_iter()
            .map(|r| (r.name.to_string(), r.pair))
            .collect(),
    };
    let started = Instant::now();
    let mut empty = false;
    for (name, pair) in references {
        for (level, k) in BATCH_PROFILE {
            let dir = a.opts.out.join(&name).join(level.name());
            let n = run_synth(
                pair.clone(),
                level,
                k,
                a.opts.seed,
                scoring,
                &dir,
                a.opts.render,
            )?;
            println!("{name} {level} {n}/{k}");
            empty |= n == 0;
        }
    }
    eprintln!("batch: {:.2}s", started.elapsed().as_secs_f64());
    Ok(if empty { EXIT_EMPTY } else { 0 })
}
