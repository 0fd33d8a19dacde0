use std::collections::BTreeSet;

use tasksyn::baselines::{flip, rotate_ccw, rotate_flip};
use tasksyn::emulator::{check_constraints, is_solution};
use tasksyn::model::{code_length, Difficulty, GoalKind};
use tasksyn::scoring::ScoringConfig;
use tasksyn::suite::references;
use tasksyn::synth::{report_json, synthesize, SynthRequest};

#[test]
fn outputs_conform_to_their_level() {
    for r in references() {
        let ref_len = code_length(&r.pair.code);
        let ref_constraints = r.pair.task.constraints.len();
        let ref_kind = r.pair.task.goal.kind();
        for &level in Difficulty::ALL {
            let req = SynthRequest::new(r.pair.clone(), level, 3, 11);
            let report = synthesize(&req).unwrap();
            assert!(!report.outputs.is_empty(), "{} {level}", r.name);
            let hashes: BTreeSet<_> = report.outputs.iter().map(|o| o.hash.clone()).collect();
            assert_eq!(hashes.len(), report.outputs.len());
            for out in &report.outputs {
                assert!(is_solution(&out.task, &out.code));
                assert!(check_constraints(&out.task.constraints, &out.code));
                assert!(out.total >= req.scoring.threshold);
                let len = code_length(&out.code);
                let n = out.task.constraints.len();
                let kind = out.task.goal.kind();
                match level {
                    Difficulty::Easy => {
                        assert_eq!((len, n, kind), (ref_len, ref_constraints, ref_kind))
                    }
                    Difficulty::Medium => {
                        assert!(len == ref_len + 1 || len == ref_len + 2);
                        assert_eq!((n, kind), (ref_constraints, ref_kind));
                    }
                    Difficulty::Hard => {
                        assert_eq!((len, n), (ref_len + 2, ref_constraints + 1));
                        assert_eq!(kind == GoalKind::Draw, ref_kind == GoalKind::Draw);
                    }
                }
            }
        }
    }
}

#[test]
fn strict_threshold_can_empty_the_output() {
    let r = &references()[0];
    let mut req = SynthRequest::new(r.pair.clone(), Difficulty::Easy, 2, 0);
    req.scoring = ScoringConfig {
        threshold: 1.0,
        ..ScoringConfig::default()
    };
    req.budgets.max_instantiations = 5;
    let report = synthesize(&req).unwrap();
    assert!(report.outputs.iter().all(|o| o.total >= 1.0));
    assert!(report.counters.instantiations_tried <= 5);
}

#[test]
fn same_seed_same_report() {
    let r = &references()[3];
    let req = SynthRequest::new(r.pair.clone(), Difficulty::Hard, 3, 5);
    let (a, b) = (synthesize(&req).unwrap(), synthesize(&req).unwrap());
    assert_eq!(report_json(&req, &a), report_json(&req, &b));
    assert_eq!(a.outputs, b.outputs);
}

#[test]
fn baselines_preserve_solvability() {
    for r in references() {
        for &level in Difficulty::ALL {
            let out = rotate_flip(&r.pair, level);
            assert!(is_solution(&out.task, &out.code), "{} {level}", r.name);
            assert_eq!(code_length(&out.code), code_length(&r.pair.code));
        }
        let w = &r.pair.task.world;
        assert_eq!(&flip(&flip(w)), w);
        assert_eq!(&rotate_ccw(&rotate_ccw(&rotate_ccw(&rotate_ccw(w)))), w);
        let twice = rotate_flip(
            &rotate_flip(&r.pair, Difficulty::Medium),
            Difficulty::Medium,
        );
        assert_eq!(twice, r.pair);
    }
}
