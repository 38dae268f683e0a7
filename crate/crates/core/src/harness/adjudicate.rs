use serde::{Deserialize, Serialize};

use super::{Answer, RunRecord, Subtrack};
use crate::aiger::Status;
use crate::verify::VerdictStatus;

/// Outcome of adjudicating one benchmark.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjudication {
    pub status: Status,
    /// Per record: `Some(true)` correct, `Some(false)` wrong, `None` not
    /// judged (timeout, crash, undecided benchmark, or an unverified
    /// synthesis solution).
    pub correct: Vec<Option<bool>>,
    /// Undecided with conflicting answers; needs an organizer.
    pub inspect: bool,
    /// Status was unknown beforehand and the vote decided it.
    pub newly_solved: bool,
}

/// Judges the records of one benchmark. A known status rules; otherwise a
/// strict majority of the realizability answers decides. In the synthesis
/// subtrack a realizable answer counts only with a verified solution, and
/// a falsified solution is wrong.
pub fn adjudicate(records: &[RunRecord], known: Status) -> Adjudication {
    let realizable = records.iter().filter(|r| r.answer == Answer::Realizable).count();
    let unrealizable = records.iter().filter(|r| r.answer == Answer::Unrealizable).count();
    let answers = realizable + unrealizable;
    let (status, newly_solved, inspect) = if known != Status::Unknown {
        (known, false, false)
    } else if 2 * realizable > answers {
        (Status::Realizable, true, false)
    } else if 2 * unrealizable > answers {
        (Status::Unrealizable, true, false)
    } else {
        (Status::Unknown, false, answers > 0)
    };
    let correct = records
        .iter()
        .map(|r| {
            let said = match r.answer {
                Answer::Realizable => Status::Realizable,
                Answer::Unrealizable => Status::Unrealizable,
                Answer::Timeout | Answer::Crash => return None,
            };
            if status == Status::Unknown {
                return None;
            }
            if said != status {
                return Some(false);
            }
            if r.subtrack == Subtrack::Synthesis && said == Status::Realizable {
                return match r.verdict.as_ref().map(|v| v.status) {
                    Some(VerdictStatus::Verified) => Some(true),
                    Some(VerdictStatus::Falsified) => Some(false),
                    _ => None,
                };
            }
            Some(true)
        })
        .collect();
    Adjudication {
        status,
        correct,
        inspect,
        newly_solved,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Mode;
    use crate::verify::{Method, Verdict};

    fn rec(answer: Answer) -> RunRecord {
        RunRecord::new("t", "b", Subtrack::Realizability, Mode::Sequential, answer)
    }

    #[test]
    fn known_status_rules() {
        let a = adjudicate(&[rec(Answer::Unrealizable), rec(Answer::Unrealizable)], Status::Realizable);
        assert_eq!(a.status, Status::Realizable);
        assert_eq!(a.correct, vec![Some(false), Some(false)]);
    }

    #[test]
    fn majority() {
        let a = adjudicate(
            &[rec(Answer::Realizable), rec(Answer::Realizable), rec(Answer::Unrealizable)],
            Status::Unknown,
        );
        assert_eq!(a.status, Status::Realizable);
        assert_eq!(a.correct, vec![Some(true), Some(true), Some(false)]);
        assert!(a.newly_solved && !a.inspect);
    }

    #[test]
    fn tie_is_unknown() {
        let a = adjudicate(&[rec(Answer::Realizable), rec(Answer::Unrealizable), rec(Answer::Timeout)], Status::Unknown);
        assert_eq!(a.status, Status::Unknown);
        assert_eq!(a.correct, vec![None, None, None]);
        assert!(a.inspect && !a.newly_solved);
        let none = adjudicate(&[rec(Answer::Crash)], Status::Unknown);
        assert!(!none.inspect);
    }

    #[test]
    fn synthesis_needs_verified_solution() {
        let mut verified = rec(Answer::Realizable);
        verified.subtrack = Subtrack::Synthesis;
        let mut bad = verified.clone();
        let mut missing = verified.clone();
        let verdict = |status| Verdict { status, method: Method::ModelCheck, detail: String::new(), counterexample: None };
        verified.verdict = Some(verdict(VerdictStatus::Verified));
        bad.verdict = Some(verdict(VerdictStatus::Falsified));
        missing.verdict = Some(verdict(VerdictStatus::Inconclusive));
        let a = adjudicate(&[verified, bad, missing], Status::Realizable);
        assert_eq!(a.correct, vec![Some(true), Some(false), None]);
    }
}
