use crate::corpus::Corpus;
use crate::criterion::{is_improvement, CriterionKind, CriterionState, REBUILD_INTERVAL};
use crate::error::{Error, Result};
use crate::sparse::SparseVector;

/// An assignment of a document set to `k` non-empty clusters, with the
/// criterion state kept in sync.
///
/// The document set is either the whole corpus or a subset of it (a cluster
/// being bisected). Positions `0..n()` index into that set; [`Self::ids`]
/// maps them back to corpus document ids.
#[derive(Debug, Clone)]
pub struct Partition<'c> {
    docs: Vec<&'c SparseVector>,
    ids: Vec<usize>,
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
    /// Index of each position inside `members[assignment[pos]]`.
    slot: Vec<usize>,
    state: CriterionState,
    dim: usize,
}

impl<'c> Partition<'c> {
    /// A partition of the whole corpus. Cluster ids must cover `0..k` with no
    /// empty cluster.
    pub fn new(corpus: &'c Corpus, assignment: Vec<usize>) -> Result<Self> {
        Self::on_subset(corpus, (0..corpus.n()).collect(), assignment)
    }

    /// A partition of the corpus documents `ids`; `assignment[i]` is the
    /// cluster of document `ids[i]`.
    pub fn on_subset(corpus: &'c Corpus, ids: Vec<usize>, assignment: Vec<usize>) -> Result<Self> {
        if ids.len() != assignment.len() {
            return Err(Error::LengthMismatch {
                expected: ids.len(),
                found: assignment.len(),
            });
        }
        if let Some(&bad) = ids.iter().find(|&&i| i >= corpus.n()) {
            return Err(Error::InvalidInput(format!("document id {bad} out of range")));
        }
        let docs: Vec<&SparseVector> = ids.iter().map(|&i| corpus.doc(i)).collect();
        Self::build(docs, ids, assignment, corpus.vocab_size())
    }

    fn build(
        docs: Vec<&'c SparseVector>,
        ids: Vec<usize>,
        assignment: Vec<usize>,
        dim: usize,
    ) -> Result<Self> {
        let k = assignment.iter().max().map_or(0, |m| m + 1);
        if k == 0 {
            return Err(Error::InvalidInput("cannot partition an empty document set".into()));
        }
        let state = CriterionState::new(&docs, &assignment, k, dim)?;
        let mut members = vec![Vec::new(); k];
        let mut slot = vec![0; assignment.len()];
        for (pos, &c) in assignment.iter().enumerate() {
            slot[pos] = members[c].len();
            members[c].push(pos);
        }
        Ok(Partition {
            docs,
            ids,
            assignment,
            members,
            slot,
            state,
            dim,
        })
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    /// Cluster of each position.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Corpus document id of each position.
    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Positions in `cluster`, ascending.
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        let mut m = self.members[cluster].clone();
        m.sort_unstable();
        m
    }

    /// Corpus document ids in `cluster`, ascending.
    pub fn member_ids(&self, cluster: usize) -> Vec<usize> {
        let mut m: Vec<usize> = self.members[cluster].iter().map(|&p| self.ids[p]).collect();
        m.sort_unstable();
        m
    }

    pub fn state(&self) -> &CriterionState {
        &self.state
    }

    pub fn value(&self, kind: CriterionKind) -> Result<f64> {
        self.state.value(kind)
    }

    fn check_move(&self, pos: usize, from: usize, to: usize) -> Result<()> {
        if pos >= self.n() || from >= self.k() || to >= self.k() || from == to {
            return Err(Error::InvalidInput(format!(
                "invalid move of position {pos} from {from} to {to}"
            )));
        }
        if self.assignment[pos] != from {
            return Err(Error::NotInCluster { doc: pos, cluster: from });
        }
        if self.members[from].len() < 2 {
            return Err(Error::WouldEmptyCluster { doc: pos, cluster: from });
        }
        Ok(())
    }

    /// `value(after) - value(before)` for moving position `pos` from `from`
    /// to `to`, without changing the partition.
    pub fn delta_move(&self, pos: usize, from: usize, to: usize, kind: CriterionKind) -> Result<f64> {
        self.check_move(pos, from, to)?;
        Ok(self.state.move_delta(self.docs[pos], pos, from, to, kind))
    }

    pub fn apply_move(&mut self, pos: usize, from: usize, to: usize) -> Result<()> {
        self.check_move(pos, from, to)?;
        self.move_unchecked(pos, from, to);
        Ok(())
    }

    fn move_unchecked(&mut self, pos: usize, from: usize, to: usize) {
        self.state.apply_move(self.docs[pos], pos, from, to);
        let s = self.slot[pos];
        self.members[from].swap_remove(s);
        if let Some(&moved) = self.members[from].get(s) {
            self.slot[moved] = s;
        }
        self.slot[pos] = self.members[to].len();
        self.members[to].push(pos);
        self.assignment[pos] = to;
        if self.state.updates_since_rebuild() >= REBUILD_INTERVAL {
            self.rebuild();
        }
    }

    /// Recomputes all composites from the member documents.
    pub fn rebuild(&mut self) {
        let mut ordered = self.members.clone();
        ordered.iter_mut().for_each(|m| m.sort_unstable());
        self.state.rebuild(&self.docs, &ordered);
    }

    /// Best move for the document at `pos`: the target cluster with the
    /// most improving delta, ties to the lowest cluster index.
    fn best_move(&self, pos: usize, kind: CriterionKind) -> Option<(usize, f64)> {
        let from = self.assignment[pos];
        if self.members[from].len() < 2 {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for to in (0..self.k()).filter(|&c| c != from) {
            let delta = self.state.move_delta(self.docs[pos], pos, from, to, kind);
            if !is_improvement(delta, kind) {
                continue;
            }
            if best.is_none_or(|(_, b)| kind.better(delta, b)) {
                best = Some((to, delta));
            }
        }
        best
    }

    /// Greedy move-based refinement: visit every position, applying the
    /// best improving move for each; repeat until a sweep moves nothing or
    /// `max_sweeps` sweeps ran. `next_order` supplies the visiting order
    /// for each sweep. `on_move` observes the partition after each move.
    pub fn refine_with(
        &mut self,
        kind: CriterionKind,
        max_sweeps: usize,
        mut next_order: impl FnMut(usize) -> Vec<usize>,
        mut on_move: impl FnMut(&Partition<'c>),
    ) -> RefineStats {
        let mut stats = RefineStats::default();
        for _ in 0..max_sweeps {
            stats.sweeps += 1;
            let mut moved = 0;
            for pos in next_order(self.n()) {
                if let Some((to, _)) = self.best_move(pos, kind) {
                    let from = self.assignment[pos];
                    self.move_unchecked(pos, from, to);
                    moved += 1;
                    on_move(self);
                }
            }
            stats.moves += moved;
            if moved == 0 {
                break;
            }
        }
        stats
    }

    /// Relabels clusters in order of first appearance along the positions.
    pub fn canonicalize(&mut self) {
        let mut map = vec![usize::MAX; self.k()];
        let mut next = 0;
        for &c in &self.assignment {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
        }
        if map.iter().enumerate().all(|(i, &m)| i == m) {
            return;
        }
        let assignment = self.assignment.iter().map(|&c| map[c]).collect();
        let docs = std::mem::take(&mut self.docs);
        let ids = std::mem::take(&mut self.ids);
        *self = Self::build(docs, ids, assignment, self.dim)
            .expect("relabeling keeps every cluster non-empty");
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RefineStats {
    pub sweeps: usize,
    pub moves: usize,
}
