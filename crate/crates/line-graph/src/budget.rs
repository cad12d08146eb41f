/// Three-valued evaluation outcome. `Unknown` marks a search that ran out
/// of budget (or a guided pass that found no witness) without settling the
/// answer; it is never conflated with a definite `False`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    #[inline]
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }

    #[inline]
    pub fn is_true(self) -> bool {
        self == Tri::True
    }

    #[inline]
    pub fn is_definite(self) -> bool {
        self != Tri::Unknown
    }
}

/// Quantifier search strategy.
///
/// `Blind` enumerates candidate assignments exhaustively (definite answers,
/// budget permitting). `Guided` only tries witnesses suggested by a
/// provider — sound for `True` (witnesses are re-verified) but inconclusive
/// when the provider comes up empty. `GuidedThenBlind` falls back to the
/// blind search when guidance fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Blind,
    Guided,
    GuidedThenBlind,
}

/// Budget shared by the predicate evaluators: a cap on quantifier search
/// nodes, the evaluation mode, and the seed recorded in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    pub max_nodes: u64,
    pub mode: Mode,
    pub seed: u64,
}

impl EvalBudget {
    pub const DEFAULT_MAX_NODES: u64 = u64::MAX;

    pub fn blind() -> Self {
        EvalBudget {
            max_nodes: Self::DEFAULT_MAX_NODES,
            mode: Mode::Blind,
            seed: 0,
        }
    }

    pub fn guided() -> Self {
        EvalBudget {
            mode: Mode::Guided,
            ..Self::blind()
        }
    }

    pub fn guided_then_blind() -> Self {
        EvalBudget {
            mode: Mode::GuidedThenBlind,
            ..Self::blind()
        }
    }

    pub fn with_max_nodes(mut self, max_nodes: u64) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

impl Default for EvalBudget {
    fn default() -> Self {
        Self::blind()
    }
}
