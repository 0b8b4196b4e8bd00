use super::{Tree, TreeError};

pub const MAX_ENUMERATION_LEAVES: usize = 12;

/// All trees with `n` leaves (only binary ones if `binary_only`), ordered
/// by internal edge count and then by serialized form.
pub fn enumerate_trees(n: usize, binary_only: bool) -> Result<Vec<Tree>, TreeError> {
    if n == 0 || n > MAX_ENUMERATION_LEAVES {
        return Err(TreeError::EnumerationRange(n));
    }
    // by_leaves[k] = all trees with k leaves
    let mut by_leaves: Vec<Vec<Tree>> = vec![Vec::new(), vec![Tree::Leaf]];
    for k in 2..=n {
        let mut out = Vec::new();
        let mut parts = Vec::new();
        compositions(k, binary_only, &mut parts, &mut |parts| {
            let mut acc: Vec<Vec<Tree>> = vec![Vec::new()];
            for &part in parts {
                let mut next = Vec::with_capacity(acc.len() * by_leaves[part].len());
                for prefix in &acc {
                    for t in &by_leaves[part] {
                        let mut v = prefix.clone();
                        v.push(t.clone());
                        next.push(v);
                    }
                }
                acc = next;
            }
            out.extend(acc.into_iter().map(Tree::Node));
        });
        by_leaves.push(out);
    }
    let mut result = by_leaves.swap_remove(n);
    let mut keyed: Vec<(usize, String, Tree)> =
        result.drain(..).map(|t| (t.internal_edge_count(), t.serialize(), t)).collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(keyed.into_iter().map(|(_, _, t)| t).collect())
}

/// Ordered compositions of `n` into at least two positive parts (exactly
/// two when `binary`).
fn compositions(n: usize, binary: bool, parts: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    let used: usize = parts.iter().sum();
    let left = n - used;
    if left == 0 {
        if parts.len() >= 2 {
            emit(parts);
        }
        return;
    }
    if binary && parts.len() == 1 {
        parts.push(left);
        emit(parts);
        parts.pop();
        return;
    }
    // a single part equal to n would be a node of arity one
    let max = if parts.is_empty() { n - 1 } else { left };
    for first in 1..=max {
        parts.push(first);
        compositions(n, binary, parts, emit);
        parts.pop();
    }
}
