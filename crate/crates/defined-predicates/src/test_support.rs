//! Shared fixtures for the unit tests: coordinate spaces paired with their
//! intersection models, cached per geometry so expensive tables are built
//! once per test binary.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use finite_geometry::{Kind, Space, TripleClass};
use line_graph::{EvalBudget, IntersectionModel, LineId, PredicateTable};

use crate::Eval;

pub struct Fix {
    pub space: Space,
    pub model: IntersectionModel,
    pub tables: PredicateTable,
}

impl Fix {
    /// Unordered pairwise-meeting triples `a < b < c`.
    pub fn meeting_triples(&self) -> Vec<(LineId, LineId, LineId)> {
        let l = self.model.line_count() as LineId;
        let mut out = Vec::new();
        for a in 0..l {
            for b in (a + 1)..l {
                if !self.model.sim(a, b) {
                    continue;
                }
                for c in (b + 1)..l {
                    if self.model.sim(a, c) && self.model.sim(b, c) {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }

    pub fn concurrent(&self, a: LineId, b: LineId, c: LineId) -> bool {
        self.space.oracle_concurrent(a, b, c)
    }

    pub fn classify(&self, a: LineId, b: LineId, c: LineId) -> TripleClass {
        self.space.oracle_classify3(a, b, c)
    }

    pub fn coplanar3(&self, a: LineId, b: LineId, c: LineId) -> bool {
        self.space.oracle_span_dim(&[a, b, c]).unwrap() <= 2
    }

    pub fn first_meeting_pair(&self) -> (LineId, LineId) {
        self.pair_where(|m, a, b| m.sim(a, b))
    }

    pub fn first_skew_pair(&self) -> (LineId, LineId) {
        self.pair_where(|m, a, b| {
            !m.sim(a, b) && !matches!(self.space.meet(a, b), finite_geometry::MeetResult::Parallel)
        })
    }

    pub fn first_parallel_pair(&self) -> (LineId, LineId) {
        self.pair_where(|_, a, b| {
            matches!(self.space.meet(a, b), finite_geometry::MeetResult::Parallel)
        })
    }

    fn pair_where(&self, pred: impl Fn(&IntersectionModel, LineId, LineId) -> bool) -> (LineId, LineId) {
        let l = self.model.line_count() as LineId;
        for a in 0..l {
            for b in (a + 1)..l {
                if pred(&self.model, a, b) {
                    return (a, b);
                }
            }
        }
        panic!("no pair with the requested relation in this model");
    }
}

/// Build (or fetch) the fixture for one geometry. Tables persist across
/// tests in the same binary, so dense triple tables are built once.
pub fn fixture(kind: &str, n: u32, q: u32) -> Arc<Fix> {
    static CACHE: OnceLock<Mutex<HashMap<(String, u32, u32), Arc<Fix>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (kind.to_string(), n, q);
    let mut map = cache.lock().unwrap();
    map.entry(key)
        .or_insert_with(|| {
            let space = Space::build(Kind::from_tag(kind).unwrap(), n, q).unwrap();
            let model = IntersectionModel::from_space(&space);
            Arc::new(Fix {
                space,
                model,
                tables: PredicateTable::default(),
            })
        })
        .clone()
}

/// Blind evaluator with an effectively unlimited budget.
pub fn eval(fix: &Fix) -> Eval<'_> {
    Eval::new(&fix.model, &fix.tables, EvalBudget::blind())
}

/// Blind evaluator with a node cap.
pub fn eval_capped(fix: &Fix, max_nodes: u64) -> Eval<'_> {
    Eval::new(&fix.model, &fix.tables, EvalBudget::blind().with_max_nodes(max_nodes))
}
