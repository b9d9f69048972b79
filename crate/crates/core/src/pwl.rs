//! Scalar piecewise-linear functions on an interval and their linear regions.
//!
//! A [`PiecewiseLinear1D`] is kept canonical: adjacent pieces always differ in
//! slope, so its pieces are exactly the maximal linear regions of the
//! function. Regions are closed intervals that share endpoints; only their
//! lengths enter the metrics.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for continuity at a breakpoint.
pub const CONTINUITY_TOL: f64 = 1e-9;
/// Relative tolerance under which two adjacent slopes are considered equal.
pub const SLOPE_MERGE_TOL: f64 = 1e-9;
/// Absolute tolerance for matching breakpoints across functions.
pub const BREAKPOINT_MATCH_TOL: f64 = 1e-9;

#[inline]
pub fn slopes_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= SLOPE_MERGE_TOL * (1.0 + a.abs().max(b.abs()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
}

impl Interval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if !(left.is_finite() && right.is_finite() && left < right) {
            return Err(Error::Precondition(format!("[{left}, {right}] is not a bounded non-empty interval")));
        }
        Ok(Interval { left, right })
    }

    pub const UNIT: Interval = Interval { left: 0.0, right: 1.0 };

    #[inline]
    pub fn len(&self) -> f64 {
        self.right - self.left
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left + self.right)
    }
}

/// `slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub slope: f64,
    pub intercept: f64,
}

impl AffinePiece {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Line through `(x0, y0)` and `(x1, y1)`.
    pub fn through(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        let slope = (y1 - y0) / (x1 - x0);
        AffinePiece { slope, intercept: y0 - slope * x0 }
    }
}

/// Canonical continuous piecewise-linear function on `[a, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear1D {
    domain: Interval,
    breakpoints: Vec<f64>,
    pieces: Vec<AffinePiece>,
}

impl PiecewiseLinear1D {
    /// Validating constructor; rejects discontinuities and fake breakpoints.
    pub fn new(domain: Interval, breakpoints: Vec<f64>, pieces: Vec<AffinePiece>) -> Result<Self> {
        let pwl = PiecewiseLinear1D { domain, breakpoints, pieces };
        pwl.check_structure()?;
        for (i, &t) in pwl.breakpoints.iter().enumerate() {
            let (a, b) = (pwl.pieces[i], pwl.pieces[i + 1]);
            let (va, vb) = (a.eval(t), b.eval(t));
            if (va - vb).abs() > CONTINUITY_TOL * (1.0 + va.abs().max(vb.abs())) {
                return Err(Error::Precondition(format!("discontinuity at x = {t}: {va} vs {vb}")));
            }
            if slopes_equal(a.slope, b.slope) {
                return Err(Error::Precondition(format!("breakpoint at x = {t} is not a kink")));
            }
        }
        Ok(pwl)
    }

    fn check_structure(&self) -> Result<()> {
        if self.pieces.len() != self.breakpoints.len() + 1 {
            return Err(Error::Shape(format!(
                "{} breakpoints need {} pieces, got {}",
                self.breakpoints.len(),
                self.breakpoints.len() + 1,
                self.pieces.len()
            )));
        }
        let mut prev = self.domain.left;
        for &t in &self.breakpoints {
            if !(t > prev) {
                return Err(Error::Precondition(format!("breakpoints must increase strictly inside the domain (at {t})")));
            }
            prev = t;
        }
        if !(prev < self.domain.right) {
            return Err(Error::Precondition(format!("breakpoint {prev} is not inside the domain")));
        }
        Ok(())
    }

    /// Build from possibly redundant cuts: cuts outside the open domain are
    /// dropped and neighbouring pieces with equal slopes are merged.
    /// `pieces[i]` is the map on the `i`-th cell of `cuts`.
    pub fn canonical(domain: Interval, cuts: &[f64], pieces: &[AffinePiece]) -> Result<Self> {
        if pieces.len() != cuts.len() + 1 {
            return Err(Error::Shape(format!("{} cuts need {} pieces, got {}", cuts.len(), cuts.len() + 1, pieces.len())));
        }
        // Cells as (left, right, piece); empty or out-of-domain cells vanish.
        let mut cells: Vec<(f64, f64, AffinePiece)> = Vec::with_capacity(pieces.len());
        let mut left = domain.left;
        for (i, piece) in pieces.iter().enumerate() {
            let right = cuts.get(i).copied().unwrap_or(domain.right).clamp(domain.left, domain.right);
            if right > left {
                cells.push((left, right, *piece));
                left = right;
            }
        }
        if cells.is_empty() {
            return Err(Error::Precondition("no cell of positive length inside the domain".into()));
        }
        let mut merged: Vec<(f64, f64, AffinePiece)> = Vec::with_capacity(cells.len());
        for (l, r, p) in cells {
            match merged.last_mut() {
                Some(last) if slopes_equal(last.2.slope, p.slope) => {
                    let y0 = last.2.eval(last.0);
                    let y1 = p.eval(r);
                    last.2 = AffinePiece::through(last.0, y0, r, y1);
                    last.1 = r;
                }
                _ => merged.push((l, r, p)),
            }
        }
        let breakpoints = merged[..merged.len() - 1].iter().map(|c| c.1).collect();
        let pieces = merged.into_iter().map(|c| c.2).collect();
        PiecewiseLinear1D::new(domain, breakpoints, pieces)
    }

    /// Linear interpolation through points sorted by `x`; the first and last
    /// `x` become the domain.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Precondition("need at least two points".into()));
        }
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::Precondition("points must have strictly increasing x".into()));
        }
        let domain = Interval::new(points[0].0, points[points.len() - 1].0)?;
        let cuts: Vec<f64> = points[1..points.len() - 1].iter().map(|p| p.0).collect();
        let pieces: Vec<AffinePiece> = points.windows(2).map(|w| AffinePiece::through(w[0].0, w[0].1, w[1].0, w[1].1)).collect();
        PiecewiseLinear1D::canonical(domain, &cuts, &pieces)
    }

    pub fn linear(domain: Interval, slope: f64, intercept: f64) -> Self {
        PiecewiseLinear1D { domain, breakpoints: Vec::new(), pieces: vec![AffinePiece { slope, intercept }] }
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Each piece with the interval it covers.
    pub fn cells(&self) -> impl Iterator<Item = (Interval, AffinePiece)> + '_ {
        let lefts = std::iter::once(self.domain.left).chain(self.breakpoints.iter().copied());
        let rights = self.breakpoints.iter().copied().chain(std::iter::once(self.domain.right));
        lefts.zip(rights).zip(self.pieces.iter().copied()).map(|((left, right), p)| (Interval { left, right }, p))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&t| t < x);
        self.pieces[i].eval(x)
    }

    /// Slope jump `|s_{i+1} - s_i|` at each breakpoint.
    pub fn slope_jumps(&self) -> Vec<f64> {
        self.pieces.windows(2).map(|w| (w[1].slope - w[0].slope).abs()).collect()
    }

    pub fn regions(&self) -> RegionSet {
        RegionSet { domain: self.domain, regions: self.cells().map(|(iv, _)| iv).collect() }
    }

    pub fn fineness(&self) -> f64 {
        self.regions().fineness()
    }

    /// `self ∘ inner`, where `inner` maps its domain into `self`'s domain.
    pub fn compose(&self, inner: &PiecewiseLinear1D) -> Result<PiecewiseLinear1D> {
        let span = inner.domain.len();
        let tol = 1e-12 * span;
        let mut cuts = Vec::new();
        let mut pieces = Vec::new();
        for (iv, g) in inner.cells() {
            let mut split: Vec<f64> = Vec::new();
            if g.slope != 0.0 {
                for &t in &self.breakpoints {
                    let x = (t - g.intercept) / g.slope;
                    if x > iv.left + tol && x < iv.right - tol {
                        split.push(x);
                    }
                }
                split.sort_by(f64::total_cmp);
                split.dedup_by(|a, b| (*a - *b).abs() <= tol);
            }
            let bounds: Vec<f64> = std::iter::once(iv.left).chain(split.iter().copied()).chain(std::iter::once(iv.right)).collect();
            for w in bounds.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let outer = self.pieces[self.breakpoints.partition_point(|&t| t < g.eval(mid))];
                pieces.push(AffinePiece { slope: outer.slope * g.slope, intercept: outer.slope * g.intercept + outer.intercept });
            }
            cuts.extend(split);
            cuts.push(iv.right);
        }
        cuts.pop();
        PiecewiseLinear1D::canonical(inner.domain, &cuts, &pieces)
    }

    /// One row per piece: `left,right,slope,intercept`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("left,right,slope,intercept\n");
        for (iv, p) in self.cells() {
            let _ = writeln!(out, "{},{},{},{}", fmt_f64(iv.left), fmt_f64(iv.right), fmt_f64(p.slope), fmt_f64(p.intercept));
        }
        out
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// The linear regions of a function, in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionSet {
    pub domain: Interval,
    pub regions: Vec<Interval>,
}

impl RegionSet {
    pub fn count(&self) -> usize {
        self.regions.len()
    }

    pub fn lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.regions.iter().map(Interval::len)
    }

    pub fn total_length(&self) -> f64 {
        self.lengths().sum()
    }

    /// Largest region length over the domain length.
    pub fn fineness(&self) -> f64 {
        self.lengths().fold(0.0, f64::max) / self.domain.len()
    }

    /// The regions tile the domain without gaps.
    pub fn is_partition(&self) -> bool {
        let Some(first) = self.regions.first() else { return false };
        let last = self.regions.last().expect("non-empty");
        first.left == self.domain.left
            && last.right == self.domain.right
            && self.regions.windows(2).all(|w| w[0].right == w[1].left && w[0].len() > 0.0)
            && (self.total_length() - self.domain.len()).abs() <= 1e-12
    }

    pub fn region_count_check(&self) -> RegionCountCheck {
        let bound = 1.0 / self.fineness();
        let count = self.count();
        RegionCountCheck { count, bound, holds: count as f64 >= bound - 1e-12 }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("left,right,length\n");
        for r in &self.regions {
            let _ = writeln!(out, "{},{},{}", fmt_f64(r.left), fmt_f64(r.right), fmt_f64(r.len()));
        }
        out
    }
}

/// Number of regions against the lower bound `1 / fineness`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionCountCheck {
    pub count: usize,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RefinementWitness {
    /// A breakpoint of the coarser function that the finer one lacks.
    MissingBreakpoint(f64),
}

/// Whether `g` refines `f`, and with which ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementReport {
    pub holds: bool,
    /// Smallest valid `r` when `holds`; `NaN` otherwise.
    pub r: f64,
    /// The region of `f` and the region of `g` inside it that attain `r`.
    pub attained_by: Option<(Interval, Interval)>,
    pub witness: Option<RefinementWitness>,
}

/// Every region `U` of `f` must be a union of regions of `g`; `r` is the
/// largest `|V| / |U|` over regions `V` of `g` lying in `U`.
pub fn check_refinement(g: &PiecewiseLinear1D, f: &PiecewiseLinear1D) -> RefinementReport {
    let g_bps = g.breakpoints();
    let is_g_breakpoint = |t: f64| {
        let i = g_bps.partition_point(|&x| x < t - BREAKPOINT_MATCH_TOL);
        g_bps.get(i).is_some_and(|&x| (x - t).abs() <= BREAKPOINT_MATCH_TOL)
    };
    if let Some(&missing) = f.breakpoints().iter().find(|&&t| !is_g_breakpoint(t)) {
        return RefinementReport {
            holds: false,
            r: f64::NAN,
            attained_by: None,
            witness: Some(RefinementWitness::MissingBreakpoint(missing)),
        };
    }
    let mut best = (f64::NEG_INFINITY, None);
    for u in f.regions().regions {
        let lo = g_bps.partition_point(|&x| x <= u.left + BREAKPOINT_MATCH_TOL);
        let hi = g_bps.partition_point(|&x| x < u.right - BREAKPOINT_MATCH_TOL);
        let edges: Vec<f64> = std::iter::once(u.left).chain(g_bps[lo..hi].iter().copied()).chain(std::iter::once(u.right)).collect();
        for w in edges.windows(2) {
            let v = Interval { left: w[0], right: w[1] };
            let ratio = v.len() / u.len();
            if ratio > best.0 {
                best = (ratio, Some((u, v)));
            }
        }
    }
    RefinementReport { holds: true, r: best.0, attained_by: best.1, witness: None }
}

/// Whether every piece of `h` maps its region onto `codomain`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentificationReport {
    pub holds: bool,
    /// Number of pieces `K`.
    pub pieces: usize,
    /// First offending piece: its region and the image of that region.
    pub witness: Option<(Interval, (f64, f64))>,
}

/// Each piece must send its endpoints onto the codomain endpoints (in either
/// order), so every linear region is mapped onto the same image.
pub fn check_identification(h: &PiecewiseLinear1D, codomain: Interval) -> IdentificationReport {
    let close = |a: f64, b: f64| (a - b).abs() <= BREAKPOINT_MATCH_TOL;
    let witness = h.cells().find_map(|(iv, p)| {
        let (y0, y1) = (p.eval(iv.left), p.eval(iv.right));
        let forward = close(y0, codomain.left) && close(y1, codomain.right);
        let backward = close(y0, codomain.right) && close(y1, codomain.left);
        (!(forward || backward)).then_some((iv, (y0, y1)))
    });
    IdentificationReport { holds: witness.is_none(), pieces: h.piece_count(), witness }
}
