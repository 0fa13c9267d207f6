//! SPIHT: set partitioning in hierarchical trees.
//!
//! Each pass at plane `n` runs a sorting pass over the list of insignificant
//! pixels (LIP) and the list of insignificant sets (LIS), then a refinement
//! pass emitting bit `n` of every coefficient found significant in an
//! earlier pass (LSP). LIS entries of kind A stand for all descendants of a
//! node, kind B for the descendants minus the direct offspring.

use crate::bitstream::{BitBuf, Truncated};
use crate::dwt::{CoefficientPyramid, SubbandLayout, Wavelet};
use crate::zerotree::{BitplaneSchedule, NodeIndex, OrientationTrees, ZerotreeError};

use super::{decode_with, encode_with, CoderIo, DecodedChannel, EncodedChannel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    /// `D(m)`: every descendant.
    A,
    /// `L(m)`: descendants excluding the direct offspring.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LisEntry {
    pub node: NodeIndex,
    pub kind: SetKind,
}

/// The three SPIHT lists plus the current plane.
#[derive(Debug, Clone)]
pub struct SpihtCoderState {
    n: u32,
    lip: Vec<NodeIndex>,
    lis: Vec<LisEntry>,
    /// Significant pixels with the plane at which each became significant.
    lsp: Vec<(NodeIndex, u32)>,
}

impl SpihtCoderState {
    pub fn new(trees: &OrientationTrees, n0: u32) -> Self {
        let roots: Vec<NodeIndex> = trees
            .root_region()
            .positions()
            .map(|(r, c)| NodeIndex::new(r, c))
            .collect();
        let lis = roots
            .iter()
            .filter(|&&m| !trees.is_leaf(m))
            .map(|&node| LisEntry { node, kind: SetKind::A })
            .collect();
        Self {
            n: n0,
            lip: roots,
            lis,
            lsp: Vec::new(),
        }
    }

    pub fn plane(&self) -> u32 {
        self.n
    }

    pub fn lip(&self) -> &[NodeIndex] {
        &self.lip
    }

    pub fn lis(&self) -> &[LisEntry] {
        &self.lis
    }

    pub fn lsp(&self) -> &[(NodeIndex, u32)] {
        &self.lsp
    }

    /// LIP and LSP are disjoint, no node repeats within a list, and LIS
    /// entries only describe non-empty sets.
    pub fn lists_consistent(&self, trees: &OrientationTrees) -> bool {
        let len = trees.layout().len();
        let mut in_lip = vec![false; len];
        for &m in &self.lip {
            let i = trees.index(m);
            if in_lip[i] {
                return false;
            }
            in_lip[i] = true;
        }
        let mut in_lsp = vec![false; len];
        for &(m, _) in &self.lsp {
            let i = trees.index(m);
            if in_lip[i] || in_lsp[i] {
                return false;
            }
            in_lsp[i] = true;
        }
        let mut in_lis = vec![false; len];
        self.lis.iter().all(|e| {
            let i = trees.index(e.node);
            let fresh = !std::mem::replace(&mut in_lis[i], true);
            fresh
                && match e.kind {
                    SetKind::A => !trees.is_leaf(e.node),
                    SetKind::B => trees.has_grandchildren(e.node),
                }
        })
    }

    fn sorting_pass<I: CoderIo>(&mut self, io: &mut I, trees: &OrientationTrees) -> Result<(), Truncated> {
        let n = self.n;
        let mut still_insignificant = Vec::with_capacity(self.lip.len());
        for &m in &self.lip {
            let idx = trees.index(m);
            if io.pixel(idx, n)? {
                io.sign(idx, n)?;
                self.lsp.push((m, n));
            } else {
                still_insignificant.push(m);
            }
        }
        self.lip = still_insignificant;

        // The LIS grows while it is walked; entries appended during this
        // pass are processed in this pass too.
        let mut retired = vec![false; self.lis.len()];
        let mut i = 0;
        while i < self.lis.len() {
            let LisEntry { node, kind } = self.lis[i];
            let idx = trees.index(node);
            match kind {
                SetKind::A => {
                    if io.descendants(idx, n)? {
                        let kids = trees.offspring_block(node).expect("kind-A entries have offspring");
                        for k in kids {
                            let kidx = trees.index(k);
                            if io.pixel(kidx, n)? {
                                io.sign(kidx, n)?;
                                self.lsp.push((k, n));
                            } else {
                                self.lip.push(k);
                            }
                        }
                        retired[i] = true;
                        if trees.has_grandchildren(node) {
                            self.lis.push(LisEntry { node, kind: SetKind::B });
                            retired.push(false);
                        }
                    }
                }
                SetKind::B => {
                    if io.grand_descendants(idx, n)? {
                        retired[i] = true;
                        for k in trees.offspring_block(node).expect("kind-B entries have offspring") {
                            self.lis.push(LisEntry {
                                node: k,
                                kind: SetKind::A,
                            });
                            retired.push(false);
                        }
                    }
                }
            }
            i += 1;
        }
        let mut flags = retired.into_iter();
        self.lis.retain(|_| !flags.next().unwrap());
        Ok(())
    }

    fn refinement_pass<I: CoderIo>(
        &self,
        io: &mut I,
        trees: &OrientationTrees,
        earlier: usize,
    ) -> Result<(), Truncated> {
        for &(m, _) in &self.lsp[..earlier] {
            io.refine(trees.index(m), self.n)?;
        }
        Ok(())
    }
}

pub(crate) fn run<I: CoderIo>(
    io: &mut I,
    trees: &OrientationTrees,
    schedule: BitplaneSchedule,
) -> Result<(), Truncated> {
    let mut state = SpihtCoderState::new(trees, schedule.n0());
    for n in schedule.planes() {
        state.n = n;
        let earlier = state.lsp.len();
        state.sorting_pass(io, trees)?;
        state.refinement_pass(io, trees, earlier)?;
        io.pass_done();
        debug_assert!(state.lists_consistent(trees));
    }
    Ok(())
}

/// Encodes the integer-rounded pyramid with at most `loops` passes.
pub fn spiht_encode(p: &CoefficientPyramid, loops: u32) -> Result<EncodedChannel, ZerotreeError> {
    encode_with(p, loops, |io, trees, schedule| run(io, trees, schedule))
}

/// Decodes a stream from [`spiht_encode`]; a short stream yields the
/// best-effort reconstruction with `truncated` set.
pub fn spiht_decode(
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
