use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A labeled tensor factor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labeled subsystems.
///
/// Basis index convention: `index = Σ_k digit_k · stride_k` with the first
/// part most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, usize)>", into = "Vec<(String, usize)>")]
pub struct SubsystemLayout {
    parts: Vec<Subsystem>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(parts: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let parts: Vec<Subsystem> = parts
            .into_iter()
            .map(|(label, dim)| Subsystem {
                label: label.into(),
                dim,
            })
            .collect();
        if parts.is_empty() {
            return Err(Error::Argument("layout needs at least one subsystem".into()));
        }
        let mut seen = HashSet::new();
        for p in &parts {
            if !seen.insert(p.label.as_str()) {
                return Err(Error::Argument(format!("duplicate subsystem label {:?}", p.label)));
            }
            if p.dim < 2 {
                return Err(Error::Argument(format!(
                    "subsystem {:?} has dimension {}; every part needs dim >= 2",
                    p.label, p.dim
                )));
            }
        }
        let total = parts
            .iter()
            .try_fold(1usize, |acc, p| acc.checked_mul(p.dim).filter(|&t| t <= tol::MAX_DIM));
        if total.is_none() {
            return Err(Error::Size(
                parts.iter().map(|p| p.dim).fold(1usize, |a, d| a.saturating_mul(d)),
            ));
        }
        Ok(Self { parts })
    }

    /// All parts are qubits.
    pub fn qubits(labels: &[&str]) -> Result<Self> {
        Self::new(labels.iter().map(|&l| (l, 2)))
    }

    /// `A1 B1 A2 B2` with local dimensions `(a1, b1, a2, b2)`.
    pub fn four_party(dims: [usize; 4]) -> Result<Self> {
        Self::new(FOUR_PARTY.iter().zip(dims).map(|(&l, d)| (l, d)))
    }

    pub fn parts(&self) -> &[Subsystem] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|p| p.dim).product()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parts.iter().map(|p| p.label.as_str()).collect()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.parts.iter().position(|p| p.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Option<usize> {
        self.position(label).map(|i| self.parts[i].dim)
    }

    /// Positions of `labels`, sorted into layout order. Errors on unknown or
    /// repeated labels.
    pub fn positions(&self, labels: &[impl AsRef<str>]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let l = l.as_ref();
            let pos = self
                .position(l)
                .ok_or_else(|| Error::Argument(format!("unknown subsystem label {l:?}")))?;
            if out.contains(&pos) {
                return Err(Error::Argument(format!("label {l:?} listed twice")));
            }
            out.push(pos);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Layout made of the parts at `positions`, in the given order.
    pub fn select(&self, positions: &[usize]) -> Self {
        Self {
            parts: positions.iter().map(|&i| self.parts[i].clone()).collect(),
        }
    }

    /// Concatenation; labels must stay unique.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        Self::new(
            self.parts
                .iter()
                .chain(&other.parts)
                .map(|p| (p.label.clone(), p.dim)),
        )
    }

    /// True when the labels are exactly `A1, B1, A2, B2` in any order.
    pub fn is_four_party(&self) -> bool {
        self.len() == 4 && FOUR_PARTY.iter().all(|l| self.position(l).is_some())
    }

    /// For each new basis index, the old basis index, when the parts are
    /// reordered to `order` (a permutation of positions).
    pub(crate) fn permutation(&self, order: &[usize]) -> Vec<usize> {
        let dims = self.dims();
        let strides = strides(&dims);
        let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
        let total = self.total_dim();
        let mut map = Vec::with_capacity(total);
        let mut digits = vec![0usize; order.len()];
        for _ in 0..total {
            map.push(
                digits
                    .iter()
                    .zip(order)
                    .map(|(&d, &k)| d * strides[k])
                    .sum(),
            );
            // increment the big-endian counter over new_dims
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                if digits[pos] < new_dims[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
        map
    }
}

pub const FOUR_PARTY: [&str; 4] = ["A1", "B1", "A2", "B2"];

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

impl TryFrom<Vec<(String, usize)>> for SubsystemLayout {
    type Error = Error;

    fn try_from(parts: Vec<(String, usize)>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<SubsystemLayout> for Vec<(String, usize)> {
    fn from(layout: SubsystemLayout) -> Self {
        layout.parts.into_iter().map(|p| (p.label, p.dim)).collect()
    }
}

/// A split of the layout labels into two nonempty, disjoint, covering sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side_x: Vec<usize>,
    side_y: Vec<usize>,
}

impl Bipartition {
    /// `side_x` as given; the other side is its complement.
    pub fn new(layout: &SubsystemLayout, side_x: &[impl AsRef<str>]) -> Result<Self> {
        let x = layout.positions(side_x)?;
        let y: Vec<usize> = (0..layout.len()).filter(|k| !x.contains(k)).collect();
        if x.is_empty() || y.is_empty() {
            return Err(Error::Argument("both sides of a bipartition must be nonempty".into()));
        }
        Ok(Self { side_x: x, side_y: y })
    }

    /// Both sides given explicitly; they must be disjoint and cover the layout.
    pub fn from_sides(
        layout: &SubsystemLayout,
        side_x: &[impl AsRef<str>],
        side_y: &[impl AsRef<str>],
    ) -> Result<Self> {
        let cut = Self::new(layout, side_x)?;
        let y = layout.positions(side_y)?;
        if y != cut.side_y {
            return Err(Error::Argument(
                "bipartition sides must be disjoint and cover every label".into(),
            ));
        }
        Ok(cut)
    }

    /// Positions (layout order) on the first side.
    pub fn side_x(&self) -> &[usize] {
        &self.side_x
    }

    pub fn side_y(&self) -> &[usize] {
        &self.side_y
    }

    pub fn swapped(&self) -> Self {
        Self {
            side_x: self.side_y.clone(),
            side_y: self.side_x.clone(),
        }
    }

    /// Side X positions followed by side Y positions.
    pub(crate) fn order(&self) -> Vec<usize> {
        self.side_x.iter().chain(&self.side_y).copied().collect()
    }

    pub(crate) fn check_layout(&self, layout: &SubsystemLayout) -> Result<()> {
        let n = layout.len();
        if self.side_x.len() + self.side_y.len() != n
            || self.side_x.iter().chain(&self.side_y).any(|&k| k >= n)
        {
            return Err(Error::Argument("bipartition does not match the state layout".into()));
        }
        Ok(())
    }
}
