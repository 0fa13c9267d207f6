//! STW: spatial-orientation tree wavelet coding with a four-state model.
//!
//! Every node carries a state describing what the decoder already knows
//! about its own value and about its descendants:
//!
//! | state | value         | descendants   |
//! |-------|---------------|---------------|
//! | `IR`  | insignificant | insignificant |
//! | `IV`  | insignificant | significant   |
//! | `SR`  | significant   | insignificant |
//! | `SV`  | significant   | significant   |
//!
//! A pass walks the nodes parents-first and codes only state transitions:
//! `IR` sends the value bit then (for non-leaves) the descendant bit, `IV`
//! sends the value bit, `SR` the descendant bit, `SV` nothing. A sign bit
//! follows each value bit that turns on. Nodes below a parent in `IR` or
//! `SR` are skipped since their insignificance is implied.

use crate::bitstream::{BitBuf, Truncated};
use crate::dwt::{CoefficientPyramid, SubbandLayout, Wavelet};
use crate::zerotree::{BitplaneSchedule, NodeIndex, OrientationTrees, ZerotreeError};

use super::{decode_with, encode_with, CoderIo, DecodedChannel, EncodedChannel, EncoderIo, IntegerCoefficients};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StwState {
    #[default]
    IR,
    IV,
    SR,
    SV,
}

impl StwState {
    fn from_flags(value: bool, descendants: bool) -> Self {
        match (value, descendants) {
            (false, false) => StwState::IR,
            (false, true) => StwState::IV,
            (true, false) => StwState::SR,
            (true, true) => StwState::SV,
        }
    }

    pub fn value_significant(self) -> bool {
        matches!(self, StwState::SR | StwState::SV)
    }

    pub fn descendants_significant(self) -> bool {
        matches!(self, StwState::IV | StwState::SV)
    }

    /// Whether `self -> next` follows the lattice `IR -> {IV, SR} -> SV`.
    pub fn can_become(self, next: StwState) -> bool {
        (!self.value_significant() || next.value_significant())
            && (!self.descendants_significant() || next.descendants_significant())
    }
}

/// Per-node states plus the data the traversal needs.
pub struct StwStateMap {
    order: Vec<usize>,
    parent: Vec<Option<usize>>,
    leaf: Vec<bool>,
    states: Vec<StwState>,
    /// Significant nodes in the order they were found, with their plane.
    significant: Vec<(usize, u32)>,
    /// Nodes reached by the current sorting pass.
    visited: Vec<bool>,
    n: u32,
}

impl StwStateMap {
    pub fn new(trees: &OrientationTrees, n0: u32) -> Self {
        let len = trees.layout().len();
        let mut parent = vec![None; len];
        let mut leaf = vec![true; len];
        let order: Vec<usize> = trees
            .scan_order()
            .into_iter()
            .map(|m| {
                let i = trees.index(m);
                parent[i] = trees.parent(m).expect("in bounds").map(|p| trees.index(p));
                leaf[i] = trees.is_leaf(m);
                i
            })
            .collect();
        Self {
            order,
            parent,
            leaf,
            states: vec![StwState::IR; len],
            significant: Vec::new(),
            visited: vec![false; len],
            n: n0,
        }
    }

    pub fn states(&self) -> &[StwState] {
        &self.states
    }

    pub fn plane(&self) -> u32 {
        self.n
    }

    /// A node is visited when its parent's descendants are known to be
    /// significant; roots are always visited.
    pub fn is_visible(&self, idx: usize) -> bool {
        self.parent[idx].map_or(true, |p| self.states[p].descendants_significant())
    }

    fn sorting_pass<I: CoderIo>(&mut self, io: &mut I) -> Result<(), Truncated> {
        let n = self.n;
        self.visited.fill(false);
        for k in 0..self.order.len() {
            let idx = self.order[k];
            if !self.is_visible(idx) {
                continue;
            }
            self.visited[idx] = true;
            let leaf = self.leaf[idx];
            let before = self.states[idx];
            let mut value = before.value_significant();
            let mut desc = before.descendants_significant();
            if !value {
                value = io.pixel(idx, n)?;
                if value {
                    io.sign(idx, n)?;
                    self.significant.push((idx, n));
                }
            }
            if !desc && !leaf {
                desc = io.descendants(idx, n)?;
            }
            let after = StwState::from_flags(value, desc);
            debug_assert!(before.can_become(after));
            debug_assert!(!leaf || !after.descendants_significant());
            self.states[idx] = after;
        }
        Ok(())
    }

    fn refinement_pass<I: CoderIo>(&self, io: &mut I, earlier: usize) -> Result<(), Truncated> {
        for &(idx, _) in &self.significant[..earlier] {
            io.refine(idx, self.n)?;
        }
        Ok(())
    }
}

/// Encodes `p` and returns, for each pass, its bit plane and the nodes the
/// sorting pass skipped because an ancestor ruled them out.
pub fn stw_skipped_nodes(p: &CoefficientPyramid, loops: u32) -> Result<Vec<(u32, Vec<NodeIndex>)>, ZerotreeError> {
    let ints = IntegerCoefficients::new(p);
    let Some(n0) = ints.n0() else {
        BitplaneSchedule::new(0, loops)?;
        return Ok(Vec::new());
    };
    let schedule = BitplaneSchedule::new(n0, loops)?;
    let trees = OrientationTrees::new(p.layout());
    let mut io = EncoderIo::new(&trees, &ints);
    let mut map = StwStateMap::new(&trees, n0);
    let positions: Vec<NodeIndex> = {
        let mut v = vec![NodeIndex::new(0, 0); trees.layout().len()];
        for m in trees.scan_order() {
            v[trees.index(m)] = m;
        }
        v
    };
    let mut out = Vec::with_capacity(schedule.len());
    for n in schedule.planes() {
        map.n = n;
        let earlier = map.significant.len();
        map.sorting_pass(&mut io).expect("encoder never runs dry");
        let skipped = map
            .order
            .iter()
            .filter(|&&i| !map.visited[i])
            .map(|&i| positions[i])
            .collect();
        out.push((n, skipped));
        map.refinement_pass(&mut io, earlier).expect("encoder never runs dry");
        io.pass_done();
    }
    Ok(out)
}

pub(crate) fn run<I: CoderIo>(
    io: &mut I,
    trees: &OrientationTrees,
    schedule: BitplaneSchedule,
) -> Result<(), Truncated> {
    let mut map = StwStateMap::new(trees, schedule.n0());
    for n in schedule.planes() {
        map.n = n;
        let earlier = map.significant.len();
        map.sorting_pass(io)?;
        map.refinement_pass(io, earlier)?;
        io.pass_done();
    }
    Ok(())
}

pub fn stw_encode(p: &CoefficientPyramid, loops: u32) -> Result<EncodedChannel, ZerotreeError> {
    encode_with(p, loops, |io, trees, schedule| run(io, trees, schedule))
}

pub fn stw_decode(
    bits: &BitBuf,
    n0: Option<u32>,
    loops: u32,
    layout: SubbandLayout,
    wavelet: Wavelet,
) -> Result<DecodedChannel, ZerotreeError> {
    decode_with(bits, n0, loops, layout, wavelet, |io, trees, schedule| {
        run(io, trees, schedule)
    })
}
