//! Closed-path classes and their combinatorics.
//!
//! A closed path of length l visits row indices gamma(0), ..., gamma(l-1)
//! and returns to gamma(0). Up to relabeling of the visited indices it is a
//! set partition of the cyclic index set {0, ..., l-1}; block I_a collects
//! the steps that visit the a-th distinct index. Classes are stored as
//! restricted-growth strings: labels assigned in order of first occurrence.

mod reduce;
mod weight;

use serde::Serialize;

use crate::combinatorics::narayana;
use crate::error::{bail, Result};

pub use reduce::{
    applicable_steps, apply_step, reduce, reduce_with, ReductionStep, ReductionTrace, StepCase, Terminal,
};
pub use weight::{
    brute_force_w, exact_expected_moment, exact_expected_moment_rational, verify_class, ClassReport, W_BUDGET,
};

/// Longest path length enumerated (Bell(10) = 115975 classes).
pub const MAX_ENUMERATED_LENGTH: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PathClass {
    labels: Vec<u8>,
}

impl PathClass {
    /// Canonical class of an arbitrary labeling (values of gamma).
    pub fn from_labels<T: Copy + Eq>(values: &[T]) -> Result<Self> {
        if values.is_empty() {
            bail!(Usage, "a closed path needs length >= 1");
        }
        if values.len() > 255 {
            bail!(Usage, "path length {} is beyond the supported 255", values.len());
        }
        let mut seen: Vec<T> = Vec::new();
        let labels = values
            .iter()
            .map(|v| match seen.iter().position(|s| s == v) {
                Some(i) => i as u8,
                None => {
                    seen.push(*v);
                    (seen.len() - 1) as u8
                }
            })
            .collect();
        Ok(PathClass { labels })
    }

    /// Class from explicit blocks partitioning {0, ..., l-1}.
    pub fn from_blocks(blocks: &[Vec<usize>]) -> Result<Self> {
        let l: usize = blocks.iter().map(Vec::len).sum();
        let mut values = vec![usize::MAX; l];
        for (a, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                bail!(Usage, "empty block");
            }
            for &u in block {
                if u >= l || values[u] != usize::MAX {
                    bail!(Usage, "blocks do not partition 0..{l}");
                }
                values[u] = a;
            }
        }
        Self::from_labels(&values)
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Path length l.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of distinct visited indices v.
    pub fn vertex_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m as usize + 1)
    }

    /// Blocks I_a in label order, each sorted.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.vertex_count()];
        for (u, &a) in self.labels.iter().enumerate() {
            out[a as usize].push(u);
        }
        out
    }

    /// Reduced: l = v = 1, or v >= 2 with every block of size >= 2 and no
    /// block holding cyclically consecutive indices.
    pub fn is_reduced(&self) -> bool {
        let (l, v) = (self.len(), self.vertex_count());
        if l == 1 {
            return true;
        }
        if v < 2 {
            return false;
        }
        let sizes_ok = self.blocks().iter().all(|b| b.len() >= 2);
        let no_repeat = (0..l).all(|u| self.labels[u] != self.labels[(u + 1) % l]);
        sizes_ok && no_repeat
    }

    /// Membership in Gamma: the reduction ends at the trivial or empty path.
    pub fn in_gamma(&self) -> bool {
        reduce(self).terminal().in_gamma()
    }
}

/// Every class of length l, once each, in increasing restricted-growth order.
pub fn enumerate_path_classes(l: usize) -> Result<PathClasses> {
    if l == 0 || l > MAX_ENUMERATED_LENGTH {
        bail!(
            Resource,
            "path enumeration supports 1 <= l <= {MAX_ENUMERATED_LENGTH}, got {l}"
        );
    }
    Ok(PathClasses {
        current: Some(vec![0; l]),
    })
}

pub struct PathClasses {
    current: Option<Vec<u8>>,
}

impl Iterator for PathClasses {
    type Item = PathClass;

    fn next(&mut self) -> Option<PathClass> {
        let labels = self.current.take()?;
        let out = PathClass { labels: labels.clone() };
        // advance: bump the rightmost position that may still grow
        let l = labels.len();
        let mut prefix_max = vec![0u8; l];
        for i in 1..l {
            prefix_max[i] = prefix_max[i - 1].max(labels[i - 1]);
        }
        if let Some(i) = (1..l).rev().find(|&i| labels[i] <= prefix_max[i]) {
            let mut next = labels;
            next[i] += 1;
            for x in next.iter_mut().skip(i + 1) {
                *x = 0;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

/// Number of classes in Gamma with length l and v blocks: the Narayana
/// number (1/v) C(l, v-1) C(l-1, v-1).
pub fn count_gamma(l: u64, v: u64) -> Result<u128> {
    if v == 0 || v > l {
        bail!(Usage, "count_gamma needs 1 <= v <= l, got l = {l}, v = {v}");
    }
    u128::try_from(narayana(l, v)).map_err(|_| crate::Error::Range(format!("N({l},{v}) exceeds u128")))
}
