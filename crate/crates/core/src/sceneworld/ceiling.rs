//! Exact brute-force ceiling on achievable expected accuracy.
//!
//! Problems are grouped by everything an agent can observe before its
//! first query: the template, its slot fillers, and the scene caption.
//! Within a group the scene is hidden state; a deterministic strategy is a
//! decision tree of queries followed by a final answer chosen from the
//! observed answers. The recursion below evaluates the Bayes-optimal such
//! tree exactly, marginalizing observer noise analytically, and therefore
//! upper-bounds any policy that sees only the problem surface, the caption
//! and query answers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::problem::Problem;
use super::query::{caption, oracle_answer, AnswerToken, QueryAction};
use super::types::Scene;
use crate::error::{Error, Result};

/// Hard cap on query-node expansions across one ceiling computation.
pub const STRATEGY_EVAL_CAP: u64 = 1_000_000;

/// Result of a ceiling computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CeilingReport {
    /// Expected accuracy of the best deterministic strategy per group,
    /// averaged over the problem set.
    pub expected_accuracy: f64,
    /// Number of observable-context groups.
    pub groups: usize,
    /// Query-node expansions performed.
    pub strategy_evaluations: u64,
    pub turns: usize,
    pub epsilon: f64,
}

/// A hidden-state hypothesis: the oracle answer to every query plus the
/// ground truth, with the fraction of group members it represents.
#[derive(Debug, Clone)]
struct MemberType {
    weight: f64,
    truths: [u8; 15],
    ground_truth: u8,
}

/// Computes the exact optimal expected accuracy over deterministic
/// adaptive query strategies with `turns` queries and observer noise
/// `epsilon`.
pub fn brute_force_ceiling(
    problems: &[(Scene, Problem)],
    turns: usize,
    epsilon: f64,
) -> Result<CeilingReport> {
    if problems.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be in [0, 1], got {epsilon}"
        )));
    }
    let queries = QueryAction::all();
    let vocabs: Vec<Vec<AnswerToken>> = queries.iter().map(|q| q.answer_vocab()).collect();

    // Group by the initial observable context.
    let mut groups: BTreeMap<String, Vec<&(Scene, Problem)>> = BTreeMap::new();
    for entry in problems {
        let (scene, problem) = entry;
        let key = format!(
            "{}|{}|{}",
            problem.template_id.as_str(),
            serde_json::to_string(&problem.slots).expect("slots serialize"),
            caption(scene)
        );
        groups.entry(key).or_default().push(entry);
    }

    let mut evaluations: u64 = 0;
    let mut total = 0.0;
    let n = problems.len() as f64;
    let group_count = groups.len();
    for members in groups.values() {
        let group_weight = members.len() as f64 / n;
        let answer_vocab: Vec<u8> = members[0]
            .1
            .template_id
            .answer_vocab()
            .iter()
            .map(|t| t.index() as u8)
            .collect();

        // Merge members with identical hidden behavior.
        let mut types: BTreeMap<([u8; 15], u8), f64> = BTreeMap::new();
        let share = 1.0 / members.len() as f64;
        for (scene, problem) in members {
            let mut truths = [0u8; 15];
            for (i, q) in queries.iter().enumerate() {
                truths[i] = oracle_answer(scene, q).index() as u8;
            }
            *types
                .entry((truths, problem.ground_truth.index() as u8))
                .or_insert(0.0) += share;
        }
        let belief: Vec<MemberType> = types
            .into_iter()
            .map(|((truths, ground_truth), weight)| MemberType {
                weight,
                truths,
                ground_truth,
            })
            .collect();
        let v = value(
            &belief,
            turns,
            epsilon,
            &vocabs,
            &answer_vocab,
            &mut evaluations,
        )?;
        total += group_weight * v;
    }

    Ok(CeilingReport {
        expected_accuracy: total,
        groups: group_count,
        strategy_evaluations: evaluations,
        turns,
        epsilon,
    })
}

fn value(
    belief: &[MemberType],
    remaining: usize,
    epsilon: f64,
    vocabs: &[Vec<AnswerToken>],
    answer_vocab: &[u8],
    evaluations: &mut u64,
) -> Result<f64> {
    // Best final answer given the current belief.
    let final_value = |belief: &[MemberType]| -> f64 {
        answer_vocab
            .iter()
            .map(|&a| {
                belief
                    .iter()
                    .filter(|m| m.ground_truth == a)
                    .map(|m| m.weight)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    };
    if remaining == 0 || belief.len() == 1 {
        // A single hypothesis is already decided; extra queries cannot help.
        return Ok(final_value(belief));
    }

    let mut best = 0.0f64;
    for (qi, vocab) in vocabs.iter().enumerate() {
        *evaluations += 1;
        if *evaluations > STRATEGY_EVAL_CAP {
            return Err(Error::StrategyCapExceeded {
                evaluated: *evaluations,
                cap: STRATEGY_EVAL_CAP,
            });
        }
        let wrong_mass = epsilon / (vocab.len() as f64 - 1.0);
        let mut expected = 0.0;
        for token in vocab {
            let obs = token.index() as u8;
            let mut posterior = Vec::with_capacity(belief.len());
            let mut z = 0.0;
            for m in belief {
                let p = if m.truths[qi] == obs {
                    1.0 - epsilon
                } else {
                    wrong_mass
                };
                if p > 0.0 && m.weight > 0.0 {
                    z += m.weight * p;
                    posterior.push(MemberType {
                        weight: m.weight * p,
                        truths: m.truths,
                        ground_truth: m.ground_truth,
                    });
                }
            }
            if z <= 0.0 {
                continue;
            }
            for m in &mut posterior {
                m.weight /= z;
            }
            expected +=
                z * value(&posterior, remaining - 1, epsilon, vocabs, answer_vocab, evaluations)?;
        }
        best = best.max(expected);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sceneworld::problem::generate_problem;
    use crate::sceneworld::types::generate_scene;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn sample_problems(n: usize, seed: u64) -> Vec<(Scene, Problem)> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        while out.len() < n {
            let scene = generate_scene(&mut rng, 2, 5).unwrap();
            if let Ok(problem) = generate_problem(&scene, &mut rng) {
                out.push((scene, problem));
            }
        }
        out
    }

    #[test]
    fn noiseless_ceiling_is_one() {
        let problems = sample_problems(400, 3);
        let report = brute_force_ceiling(&problems, 2, 0.0).unwrap();
        assert!(
            (report.expected_accuracy - 1.0).abs() < 1e-12,
            "ceiling {}",
            report.expected_accuracy
        );
    }

    #[test]
    fn full_noise_ceiling_at_least_best_constant_guess() {
        let problems = sample_problems(300, 4);
        let report = brute_force_ceiling(&problems, 2, 1.0).unwrap();

        // Best constant guess per observable context.
        let mut groups: BTreeMap<String, Vec<&AnswerToken>> = BTreeMap::new();
        for (scene, problem) in &problems {
            let key = format!(
                "{}|{}|{}",
                problem.template_id.as_str(),
                serde_json::to_string(&problem.slots).unwrap(),
                caption(scene)
            );
            groups.entry(key).or_default().push(&problem.ground_truth);
        }
        let mut constant = 0.0;
        for truths in groups.values() {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for t in truths {
                *counts.entry(t.index()).or_insert(0) += 1;
            }
            constant += *counts.values().max().unwrap() as f64;
        }
        constant /= problems.len() as f64;

        assert!(report.expected_accuracy >= constant - 1e-12);
        assert!(report.expected_accuracy < 1.0);
    }

    #[test]
    fn more_turns_never_hurt() {
        let problems = sample_problems(200, 5);
        let r0 = brute_force_ceiling(&problems, 0, 0.3).unwrap();
        let r1 = brute_force_ceiling(&problems, 1, 0.3).unwrap();
        let r2 = brute_force_ceiling(&problems, 2, 0.3).unwrap();
        assert!(r1.expected_accuracy >= r0.expected_accuracy - 1e-12);
        assert!(r2.expected_accuracy >= r1.expected_accuracy - 1e-12);
    }

    #[test]
    fn noisy_ceiling_strictly_below_one() {
        let problems = sample_problems(300, 6);
        let report = brute_force_ceiling(&problems, 2, 0.3).unwrap();
        assert!(report.expected_accuracy < 1.0);
        assert!(report.expected_accuracy > 0.5);
    }

    #[test]
    fn cap_is_enforced() {
        let problems = sample_problems(600, 7);
        let err = brute_force_ceiling(&problems, 6, 0.3).unwrap_err();
        assert!(matches!(err, Error::StrategyCapExceeded { .. }));
    }
}
