//! Bundled reference tasks with their solution codes.

use crate::format::task_from_json;
use crate::lang::parse;
use crate::model::TaskCode;

macro_rules! entry {
    ($name:literal) => {
        (
            $name,
            include_str!(concat!("../suite/", $name, ".task.json")),
            include_str!(concat!("../suite/", $name, ".xlc")),
        )
    };
}

const FILES: [(&str, &str, &str); 6] = [
    entry!("find_strawberry"),
    entry!("find_lemon_repeat"),
    entry!("collect_apples"),
    entry!("collect_bananas"),
    entry!("draw_square"),
    entry!("draw_colored"),
];

#[derive(Debug, Clone)]
pub struct Reference {
    pub name: &'static str,
    pub pair: TaskCode,
}

/// Raw `(name, task json, code)` triples.
pub fn files() -> &'static [(&'static str, &'static str, &'static str)] {
    &FILES
}

pub fn references() -> Vec<Reference> {
    FILES
        .iter()
        .map(|&(name, task, code)| Reference {
            name,
            pair: TaskCode::new(
                task_from_json(task).expect("bundled task parses"),
                parse(code).expect("bundled code parses"),
            ),
        })
        .collect()
}
