//! Maximum bipartite matching by augmenting paths.

/// Matches left vertices `0..candidates.len()` to right vertices
/// `0..right_count`; `candidates[i]` lists the rights allowed for `i`, tried
/// in the given order. Returns the partner of every left vertex.
pub fn maximum_bipartite_matching(candidates: &[Vec<usize>], right_count: usize) -> Vec<Option<usize>> {
    let mut left = vec![None; candidates.len()];
    let mut right: Vec<Option<usize>> = vec![None; right_count];

    // cheap greedy start
    for (i, cands) in candidates.iter().enumerate() {
        if let Some(&r) = cands.iter().find(|&&r| right[r].is_none()) {
            right[r] = Some(i);
            left[i] = Some(r);
        }
    }

    let mut seen = vec![usize::MAX; right_count];
    for i in 0..candidates.len() {
        if left[i].is_none() {
            augment(i, i, candidates, &mut left, &mut right, &mut seen);
        }
    }
    left
}

fn augment(
    i: usize,
    round: usize,
    candidates: &[Vec<usize>],
    left: &mut [Option<usize>],
    right: &mut [Option<usize>],
    seen: &mut [usize],
) -> bool {
    for &r in &candidates[i] {
        if seen[r] == round {
            continue;
        }
        seen[r] = round;
        let free = match right[r] {
            None => true,
            Some(j) => augment(j, round, candidates, left, right, seen),
        };
        if free {
            right[r] = Some(i);
            left[i] = Some(r);
            return true;
        }
    }
    false
}
