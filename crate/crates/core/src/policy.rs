//! The interface every rate adaptation policy implements, plus two trivial
//! policies used for fixtures and replays.

use crate::session::EpochFeedback;

/// What the client knows when it requests the next segment.
#[derive(Debug, Clone, Copy)]
pub struct DecisionContext<'a> {
    /// 0-based index of the segment about to be requested.
    pub epoch: usize,
    pub horizon: usize,
    pub bitrates_kbps: &'a [f64],
    /// Sizes of the segment about to be requested, one per quality level.
    pub next_sizes_kbit: &'a [f64],
    pub segment_duration_s: f64,
    pub b_max_s: f64,
    pub buffer_s: f64,
}

/// A rate adaptation policy. Quality indices are 0-based.
pub trait AbrPolicy {
    fn name(&self) -> String;

    /// Picks the quality of the next segment. `feedback` is `None` only for the
    /// first segment of a session.
    fn decide(&mut self, ctx: &DecisionContext<'_>, feedback: Option<&EpochFeedback>) -> usize;

    /// Decision distribution behind the most recent choice, for policies that
    /// keep one.
    fn distribution(&self) -> Option<&[f64]> {
        None
    }
}

impl<P: AbrPolicy + ?Sized> AbrPolicy for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn decide(&mut self, ctx: &DecisionContext<'_>, feedback: Option<&EpochFeedback>) -> usize {
        (**self).decide(ctx, feedback)
    }

    fn distribution(&self) -> Option<&[f64]> {
        (**self).distribution()
    }
}

/// Always requests the same quality level (after the startup segment).
#[derive(Debug, Clone)]
pub struct FixedPolicy {
    pub level: usize,
}

impl AbrPolicy for FixedPolicy {
    fn name(&self) -> String {
        format!("fixed-{}", self.level + 1)
    }

    fn decide(&mut self, _ctx: &DecisionContext<'_>, _feedback: Option<&EpochFeedback>) -> usize {
        self.level
    }
}

/// Plays back a recorded sequence of quality levels.
#[derive(Debug, Clone)]
pub struct ScriptedPolicy {
    levels: Vec<usize>,
}

impl ScriptedPolicy {
    pub fn new(levels: Vec<usize>) -> Self {
        ScriptedPolicy { levels }
    }
}

impl AbrPolicy for ScriptedPolicy {
    fn name(&self) -> String {
        "scripted".to_string()
    }

    fn decide(&mut self, ctx: &DecisionContext<'_>, _feedback: Option<&EpochFeedback>) -> usize {
        self.levels[ctx.epoch]
    }
}
