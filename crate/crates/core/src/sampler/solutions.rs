use indexmap::IndexMap;
use serde::Serialize;

use super::DedupScope;

/// Progress after one GD iteration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationStats {
    /// 1-based.
    pub iteration: usize,
    pub cumulative_unique: usize,
    pub new_unique: usize,
    /// Wall time since the run started.
    pub elapsed_ms: f64,
    /// Mean per-sample loss before this iteration's step.
    pub loss_mean: f64,
}

fn pack(bits: impl Iterator<Item = bool>) -> Box<[u64]> {
    let mut words = Vec::new();
    for (i, b) in bits.enumerate() {
        if i % 64 == 0 {
            words.push(0u64);
        }
        if b {
            *words.last_mut().unwrap() |= 1 << (i % 64);
        }
    }
    words.into_boxed_slice()
}

fn unpack(words: &[u64], n: usize) -> Vec<bool> {
    (0..n).map(|i| words[i / 64] >> (i % 64) & 1 == 1).collect()
}

/// Distinct verified assignments in discovery order.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    input_names: Vec<String>,
    cone: Vec<usize>,
    scope: DedupScope,
    /// dedup key -> first full assignment seen with that key
    entries: IndexMap<Box<[u64]>, Box<[u64]>>,
    pub stats: Vec<IterationStats>,
}

impl SolutionSet {
    pub fn new(input_names: Vec<String>, cone: Vec<usize>, scope: DedupScope) -> Self {
        SolutionSet {
            input_names,
            cone,
            scope,
            entries: IndexMap::new(),
            stats: Vec::new(),
        }
    }

    /// Adds a full primary-input assignment, returning whether its key was new.
    pub fn insert(&mut self, assignment: &[bool]) -> bool {
        assert_eq!(assignment.len(), self.input_names.len());
        let key = match self.scope {
            DedupScope::Cone => pack(self.cone.iter().map(|&j| assignment[j])),
            DedupScope::AllInputs => pack(assignment.iter().copied()),
        };
        if self.entries.contains_key(&key) {
            return false;
        }
        self.entries.insert(key, pack(assignment.iter().copied()));
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scope(&self) -> DedupScope {
        self.scope
    }

    /// Every primary input, in circuit order.
    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    /// Positions of the support-cone inputs within `input_names`.
    pub fn cone_positions(&self) -> &[usize] {
        &self.cone
    }

    pub fn cone_names(&self) -> Vec<&str> {
        self.cone.iter().map(|&j| self.input_names[j].as_str()).collect()
    }

    /// Full assignments. With cone dedup the don't-care bits are those of
    /// the first sample that found each cone assignment.
    pub fn iter(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        let n = self.input_names.len();
        self.entries.values().map(move |w| unpack(w, n))
    }

    /// Assignments projected onto the cone inputs.
    pub fn cone_rows(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        self.iter().map(|full| self.cone.iter().map(|&j| full[j]).collect())
    }
}
