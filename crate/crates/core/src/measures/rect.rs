//! Disjoint rectangle decomposition of subsets of a finite product `X_1 × .. × X_d`.

use std::collections::BTreeMap;

use crate::space::{state_set, StateSet};

/// Splits `cell` (indices in mixed radix `dims`, first coordinate most significant)
/// into pairwise disjoint rectangles `S_1 × .. × S_d`. A rectangle comes back as a
/// single piece.
pub(crate) fn decompose(cell: &StateSet, dims: &[usize]) -> Vec<Vec<StateSet>> {
    let members: Vec<usize> = cell.ones().collect();
    split(&members, dims)
}

fn split(members: &[usize], dims: &[usize]) -> Vec<Vec<StateSet>> {
    if members.is_empty() {
        return Vec::new();
    }
    let Some((&head, rest)) = dims.split_first() else {
        return vec![Vec::new()];
    };
    let stride: usize = rest.iter().product();
    let mut sections: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &m in members {
        sections.entry(m / stride).or_default().push(m % stride);
    }
    // Group leading coordinates that share the same section.
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (x, section) in sections {
        groups.entry(section).or_default().push(x);
    }
    let mut out = Vec::new();
    for (section, xs) in groups {
        let lead = state_set(head, xs);
        for mut tail in split(&section, rest) {
            tail.insert(0, lead.clone());
            out.push(tail);
        }
    }
    out
}
