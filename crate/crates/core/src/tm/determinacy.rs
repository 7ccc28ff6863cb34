use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::solver::{solve_patch, Mode, SolveRequest, Status};
use crate::wang::{MacroColors, Patch, TileSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    /// Check at most `samples` ambiguous border classes, chosen with `seed`.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminacyReport {
    pub deterministic: bool,
    pub blocks: usize,
    pub classes_checked: usize,
    /// Two different 2×2 blocks that fit the same 12-tile ring.
    pub counterexample: Option<(Patch, Patch)>,
    pub exhausted: bool,
}

/// 2×2 determinacy: the 12 tiles around a 2×2 block determine the block.
///
/// The ring touches the block only through the block's 8 outer edges, so two
/// blocks with the same outer edge colors fit exactly the same rings. It is
/// therefore enough to group the valid 2×2 blocks by outer colors and, for every
/// group with more than one member, ask whether some ring fits at all.
pub fn check_determinacy(ts: &TileSet, sampling: Sampling, budget: u64) -> Result<DeterminacyReport> {
    let blocks = solve_patch(&SolveRequest::new(ts, 2, 2).mode(Mode::Enumerate).budget(budget))?;
    let mut report = DeterminacyReport {
        deterministic: true,
        blocks: blocks.patches.len(),
        classes_checked: 0,
        counterexample: None,
        exhausted: blocks.status == Status::BudgetExhausted,
    };
    let mut groups: BTreeMap<Vec<u32>, Vec<Patch>> = BTreeMap::new();
    for b in blocks.patches {
        let c = MacroColors::of_body(ts, &b);
        let key: Vec<u32> = [c.left, c.right, c.top, c.bottom].concat().into_iter().map(|x| x.0).collect();
        groups.entry(key).or_default().push(b);
    }
    let mut ambiguous: Vec<Vec<Patch>> = groups.into_values().filter(|g| g.len() > 1).collect();
    if let Sampling::Sampled { samples, seed } = sampling {
        ambiguous.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        ambiguous.truncate(samples);
    }
    for group in ambiguous {
        report.classes_checked += 1;
        let b = &group[0];
        let mut req = SolveRequest::new(ts, 4, 4).budget(budget);
        for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            req = req.fix(x + 1, y + 1, b.get(x, y).expect("enumerated blocks are full"));
        }
        match solve_patch(&req)?.status {
            Status::Sat => {
                report.deterministic = false;
                report.counterexample = Some((group[0].clone(), group[1].clone()));
                return Ok(report);
            }
            Status::BudgetExhausted => report.exhausted = true,
            Status::Unsat => {}
        }
    }
    Ok(report)
}
