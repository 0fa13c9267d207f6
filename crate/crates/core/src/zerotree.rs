//! Spatial-orientation trees over a wavelet pyramid.
//!
//! Every coefficient outside the root region has exactly one parent one
//! level coarser, and every non-leaf node owns a 2x2 block of offspring.
//! The root region is the approximation band when both of its dimensions are
//! even. Roots are grouped 2x2; the top-left member of each group has no
//! offspring and the other three own the co-located 2x2 block in the
//! `LH`, `HL` and `HH` band of the top level respectively. When the
//! approximation band has an odd side (e.g. 1x1 after a full-depth
//! decomposition) the root region grows to include the top-level detail
//! bands, i.e. the trees are rooted one level lower.
//!
//! Everything below the root region uses the doubling rule
//! `(r, c) -> {(2r, 2c), (2r, 2c+1), (2r+1, 2c), (2r+1, 2c+1)}`.

use thiserror::Error;

use crate::dwt::{Band, CoefficientPyramid, Rect, SubbandLayout};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIndex {
    pub row: usize,
    pub col: usize,
}

impl NodeIndex {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZerotreeError {
    #[error("node ({row}, {col}) outside {width}x{height} pyramid")]
    OutOfBounds {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },
    #[error("loop count must be at least 1")]
    ZeroLoops,
}

/// The bit-plane sequence `n0, n0-1, ...` visited by the coders, at most
/// `loops` planes and never below plane 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitplaneSchedule {
    n0: u32,
    loops: u32,
}

impl BitplaneSchedule {
    pub fn new(n0: u32, loops: u32) -> Result<Self, ZerotreeError> {
        if loops == 0 {
            return Err(ZerotreeError::ZeroLoops);
        }
        Ok(Self { n0, loops })
    }

    pub fn n0(&self) -> u32 {
        self.n0
    }

    pub fn final_plane(&self) -> u32 {
        self.n0.saturating_sub(self.loops - 1)
    }

    pub fn planes(&self) -> impl Iterator<Item = u32> {
        (self.final_plane()..=self.n0).rev()
    }

    pub fn len(&self) -> usize {
        (self.n0 - self.final_plane() + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Index of the most significant bit plane: `floor(log2(max |c|))`, or
/// `None` when every coefficient is below 1 in magnitude.
pub fn initial_bitplane(p: &CoefficientPyramid) -> Option<u32> {
    max_bitplane(p.coeffs().iter().map(|c| c.abs()))
}

pub(crate) fn max_bitplane(magnitudes: impl Iterator<Item = f64>) -> Option<u32> {
    let max = magnitudes.fold(0.0, f64::max);
    if max < 1.0 {
        return None;
    }
    // floor(log2(x)) == floor(log2(floor(x))) for x >= 1; integer route avoids
    // rounding trouble right at powers of two.
    let m = max.min(u64::MAX as f64).floor() as u64;
    Some(63 - m.leading_zeros())
}

#[inline]
pub fn threshold(n: u32) -> f64 {
    2f64.powi(n as i32)
}

/// `|c| >= 2^n`.
#[inline]
pub fn is_significant(c: f64, n: u32) -> bool {
    c.abs() >= threshold(n)
}

/// Parent/offspring relations and the canonical scan order for a layout.
#[derive(Debug, Clone)]
pub struct OrientationTrees {
    layout: SubbandLayout,
    root: Rect,
    root_level: usize,
}

impl OrientationTrees {
    pub fn new(layout: SubbandLayout) -> Self {
        let levels = layout.levels();
        let ll = layout.subband_rect(Band::LL, levels).expect("top level has LL");
        let root_level = if ll.height % 2 == 0 && ll.width % 2 == 0 {
            levels
        } else {
            levels - 1
        };
        let root = Rect {
            row: 0,
            col: 0,
            height: layout.height() >> root_level,
            width: layout.width() >> root_level,
        };
        Self {
            layout,
            root,
            root_level,
        }
    }

    pub fn layout(&self) -> SubbandLayout {
        self.layout
    }

    /// The tree roots, scanned in raster order by both coders.
    pub fn root_region(&self) -> Rect {
        self.root
    }

    fn check(&self, m: NodeIndex) -> Result<(), ZerotreeError> {
        if m.row < self.layout.height() && m.col < self.layout.width() {
            Ok(())
        } else {
            Err(ZerotreeError::OutOfBounds {
                row: m.row,
                col: m.col,
                width: self.layout.width(),
                height: self.layout.height(),
            })
        }
    }

    #[inline]
    pub fn index(&self, m: NodeIndex) -> usize {
        m.row * self.layout.width() + m.col
    }

    /// Top-left corner of the 2x2 offspring block, if `m` has offspring.
    #[inline]
    pub(crate) fn offspring_origin(&self, m: NodeIndex) -> Option<NodeIndex> {
        let (h, w) = (self.layout.height(), self.layout.width());
        let (r, c) = if self.root.contains(m.row, m.col) {
            let (rodd, codd) = (m.row % 2, m.col % 2);
            if rodd == 0 && codd == 0 {
                return None;
            }
            (
                m.row - rodd + rodd * self.root.height,
                m.col - codd + codd * self.root.width,
            )
        } else {
            (2 * m.row, 2 * m.col)
        };
        (r + 1 < h && c + 1 < w).then_some(NodeIndex::new(r, c))
    }

    #[inline]
    pub(crate) fn offspring_block(&self, m: NodeIndex) -> Option<[NodeIndex; 4]> {
        self.offspring_origin(m).map(|o| {
            [
                o,
                NodeIndex::new(o.row, o.col + 1),
                NodeIndex::new(o.row + 1, o.col),
                NodeIndex::new(o.row + 1, o.col + 1),
            ]
        })
    }

    /// Direct offspring of `m`: four nodes, or none for leaves and for the
    /// even/even member of each root group.
    pub fn offspring(&self, m: NodeIndex) -> Result<Vec<NodeIndex>, ZerotreeError> {
        self.check(m)?;
        Ok(self.offspring_block(m).map(Vec::from).unwrap_or_default())
    }

    pub fn is_leaf(&self, m: NodeIndex) -> bool {
        self.offspring_origin(m).is_none()
    }

    /// True when `m` has descendants beyond its direct offspring (the
    /// grand-descendant set `L(m)` is non-empty).
    pub fn has_grandchildren(&self, m: NodeIndex) -> bool {
        self.offspring_origin(m)
            .is_some_and(|o| self.offspring_origin(o).is_some())
    }

    pub fn parent(&self, m: NodeIndex) -> Result<Option<NodeIndex>, ZerotreeError> {
        self.check(m)?;
        if self.root.contains(m.row, m.col) {
            return Ok(None);
        }
        let (hr, wr) = (self.root.height, self.root.width);
        if m.row < 2 * hr && m.col < 2 * wr {
            let br = usize::from(m.row >= hr);
            let bc = usize::from(m.col >= wr);
            let (r, c) = (m.row - br * hr, m.col - bc * wr);
            Ok(Some(NodeIndex::new((r & !1) | br, (c & !1) | bc)))
        } else {
            Ok(Some(NodeIndex::new(m.row / 2, m.col / 2)))
        }
    }

    /// Every node, parents before children: the root region in raster order,
    /// then `LH`, `HL`, `HH` per level from coarse to fine, each in raster
    /// order.
    pub fn scan_order(&self) -> Vec<NodeIndex> {
        let mut out = Vec::with_capacity(self.layout.len());
        out.extend(self.root.positions().map(|(r, c)| NodeIndex::new(r, c)));
        for level in (1..=self.root_level).rev() {
            for band in [Band::LH, Band::HL, Band::HH] {
                let rect = self.layout.subband_rect(band, level).expect("valid level");
                out.extend(rect.positions().map(|(r, c)| NodeIndex::new(r, c)));
            }
        }
        out
    }
}

/// Per-node maxima of descendant magnitudes, giving O(1) set-significance
/// tests. `desc[m]` covers all strict descendants of `m`, `grand[m]` the
/// descendants excluding direct offspring.
#[derive(Debug, Clone)]
pub struct SubtreeMax {
    desc: Vec<f64>,
    grand: Vec<f64>,
}

impl SubtreeMax {
    pub fn new(trees: &OrientationTrees, magnitudes: &[f64]) -> Self {
        let n = magnitudes.len();
        let mut desc = vec![0.0f64; n];
        let mut grand = vec![0.0f64; n];
        for &m in trees.scan_order().iter().rev() {
            if let Some(kids) = trees.offspring_block(m) {
                let mut d = 0.0f64;
                let mut g = 0.0f64;
                for k in kids {
                    let i = trees.index(k);
                    d = d.max(magnitudes[i].abs()).max(desc[i]);
                    g = g.max(desc[i]);
                }
                let i = trees.index(m);
                desc[i] = d;
                grand[i] = g;
            }
        }
        Self { desc, grand }
    }

    pub fn for_pyramid(trees: &OrientationTrees, p: &CoefficientPyramid) -> Self {
        Self::new(trees, p.coeffs())
    }

    #[inline]
    pub fn max_descendant(&self, index: usize) -> f64 {
        self.desc[index]
    }

    #[inline]
    pub fn max_grand_descendant(&self, index: usize) -> f64 {
        self.grand[index]
    }

    #[inline]
    pub fn descendants_significant(&self, index: usize, n: u32) -> bool {
        self.desc[index] >= threshold(n)
    }

    #[inline]
    pub fn grand_descendants_significant(&self, index: usize, n: u32) -> bool {
        self.grand[index] >= threshold(n)
    }
}

/// Whether any strict descendant of `m` is significant at plane `n`.
///
/// Builds the subtree table on each call; coders keep a [`SubtreeMax`]
/// around instead.
pub fn descendants_significant(p: &CoefficientPyramid, m: NodeIndex, n: u32) -> Result<bool, ZerotreeError> {
    let trees = OrientationTrees::new(p.layout());
    trees.check(m)?;
    let table = SubtreeMax::for_pyramid(&trees, p);
    Ok(table.descendants_significant(trees.index(m), n))
}
