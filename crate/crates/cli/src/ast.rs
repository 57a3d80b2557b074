//! Region-expression syntax tree with source positions and a canonical
//! printer.

use std::fmt;

use regionops::{geometry::Region, Result};

/// 1-based source position of a node's first token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Parse tree over the region grammar.
///
/// Equality compares structure and numeric bit patterns but ignores spans,
/// so a parse → print → parse round trip yields an equal tree regardless of
/// the original formatting.
#[derive(Clone, Debug)]
pub enum RegionExpr {
    Point { span: Span },
    Seg { length: f64, theta: f64, span: Span },
    Line { theta: f64, offset: f64, span: Span },
    Rect { x0: f64, k0: f64, a: f64, b: f64, span: Span },
    Disk { cx: f64, cy: f64, diameter: f64, span: Span },
    Tri { a: f64, sides: u32, span: Span },
    Poly { a: f64, sides: u32, span: Span },
    Rot { angle: f64, inner: Box<RegionExpr>, span: Span },
    Refl { inner: Box<RegionExpr>, span: Span },
    Disp { s: f64, t: f64, inner: Box<RegionExpr>, span: Span },
    Union { members: Vec<RegionExpr>, span: Span },
}

impl RegionExpr {
    pub fn span(&self) -> Span {
        match self {
            RegionExpr::Point { span }
            | RegionExpr::Seg { span, .. }
            | RegionExpr::Line { span, .. }
            | RegionExpr::Rect { span, .. }
            | RegionExpr::Disk { span, .. }
            | RegionExpr::Tri { span, .. }
            | RegionExpr::Poly { span, .. }
            | RegionExpr::Rot { span, .. }
            | RegionExpr::Refl { span, .. }
            | RegionExpr::Disp { span, .. }
            | RegionExpr::Union { span, .. } => *span,
        }
    }

    /// Canonical single-line form: keyword syntax without whitespace, with
    /// numbers printed in the shortest representation that reparses to the
    /// same bits.
    pub fn canonical(&self) -> String {
        self.to_string()
    }

    /// Lowers the expression to a geometric region.
    pub fn to_region(&self) -> Result<Region<f64>> {
        match self {
            RegionExpr::Point { .. } => Ok(Region::point()),
            RegionExpr::Seg { length, theta, .. } => Region::segment(*length, *theta),
            RegionExpr::Line { theta, offset, .. } => Region::line(*theta, *offset),
            RegionExpr::Rect { x0, k0, a, b, .. } => Region::rectangle(*x0, *k0, *a, *b),
            RegionExpr::Disk {
                cx, cy, diameter, ..
            } => Region::disk(*cx, *cy, *diameter),
            RegionExpr::Tri { a, sides, .. } => Region::triangle(*a, *sides as usize),
            RegionExpr::Poly { a, sides, .. } => Region::polygon(*a, *sides as usize),
            RegionExpr::Rot { angle, inner, .. } => Region::rotated(*angle, inner.to_region()?),
            RegionExpr::Refl { inner, .. } => Ok(Region::reflected(inner.to_region()?)),
            RegionExpr::Disp { s, t, inner, .. } => Region::displaced(*s, *t, inner.to_region()?),
            RegionExpr::Union { members, .. } => Region::union(
                members
                    .iter()
                    .map(RegionExpr::to_region)
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

impl fmt::Display for RegionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionExpr::Point { .. } => write!(f, "point"),
            RegionExpr::Seg { length, theta, .. } => write!(f, "seg({length},{theta})"),
            RegionExpr::Line { theta, offset, .. } => write!(f, "line({theta},{offset})"),
            RegionExpr::Rect { x0, k0, a, b, .. } => write!(f, "rect({x0},{k0},{a},{b})"),
            RegionExpr::Disk {
                cx, cy, diameter, ..
            } => write!(f, "disk({cx},{cy},{diameter})"),
            RegionExpr::Tri { a, sides, .. } => write!(f, "tri({a},{sides})"),
            RegionExpr::Poly { a, sides, .. } => write!(f, "poly({a},{sides})"),
            RegionExpr::Rot { angle, inner, .. } => write!(f, "rot({angle},{inner})"),
            RegionExpr::Refl { inner, .. } => write!(f, "refl({inner})"),
            RegionExpr::Disp { s, t, inner, .. } => write!(f, "disp({s},{t},{inner})"),
            RegionExpr::Union { members, .. } => {
                write!(f, "union(")?;
                for (i, m) in members.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl PartialEq for RegionExpr {
    fn eq(&self, other: &Self) -> bool {
        // distinct f64 bit patterns always print distinctly, so the
        // canonical form is a faithful structural key that ignores spans
        self.canonical() == other.canonical()
    }
}

impl Eq for RegionExpr {}
