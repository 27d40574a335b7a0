//! Closure at the level of Gauss codes.

use super::ClosureError;
use crate::diagram::{GaussCode, GaussPassage, GaussStrand};
use crate::involution::Involution;

/// Close an open code along `sigma`.
///
/// Each segment cycle becomes one closed strand. Traversal starts at the
/// smallest unvisited label and follows its strand from that end, so a
/// strand entered at its head is walked backwards. A crossing changes sign
/// when exactly one of its two strands is walked backwards. Closed strands
/// of the input follow, unchanged.
pub fn gauss_closure(g: &GaussCode, sigma: &Involution) -> Result<GaussCode, ClosureError> {
    let tau = g.open_permutation()?;
    if tau.n() != sigma.n() {
        return Err(ClosureError::SizeMismatch(tau.n(), sigma.n()));
    }
    let strands = g.strands();
    // label -> (strand index, is foot)
    let mut at = vec![(0usize, false); 2 * tau.n() + 1];
    for (i, s) in strands.iter().enumerate() {
        if let Some((a, b)) = s.ends {
            at[a as usize] = (i, true);
            at[b as usize] = (i, false);
        }
    }
    let mut reversed = vec![false; strands.len()];
    let mut visited = vec![false; strands.len()];
    let mut cycles: Vec<Vec<(usize, bool)>> = Vec::new();
    for start in 1..=2 * tau.n() as u32 {
        let (s0, _) = at[start as usize];
        if visited[s0] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut label = start;
        loop {
            let (s, foot) = at[label as usize];
            visited[s] = true;
            reversed[s] = !foot;
            cycle.push((s, !foot));
            let exit = tau.apply(label);
            label = sigma.apply(exit);
            if label == start {
                break;
            }
        }
        cycles.push(cycle);
    }

    let mut owner = std::collections::BTreeMap::new();
    for (i, s) in strands.iter().enumerate() {
        for p in &s.passages {
            owner.entry(p.crossing).or_insert_with(Vec::new).push(i);
        }
    }
    let flips = |c: u32| {
        let o = &owner[&c];
        reversed[o[0]] != reversed[o[1]]
    };
    let fix = |p: &GaussPassage| GaussPassage {
        crossing: p.crossing,
        role: p.role,
        sign: if flips(p.crossing) { p.sign.flip() } else { p.sign },
    };
    let mut out = Vec::new();
    for cycle in cycles {
        let mut passages = Vec::new();
        for (s, back) in cycle {
            let ps = &strands[s].passages;
            if back {
                passages.extend(ps.iter().rev().map(fix));
            } else {
                passages.extend(ps.iter().map(fix));
            }
        }
        out.push(GaussStrand { passages, ends: None });
    }
    for s in strands.iter().filter(|s| s.ends.is_none()) {
        out.push(GaussStrand { passages: s.passages.iter().map(fix).collect(), ends: None });
    }
    Ok(GaussCode::new(out)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Role;

    fn code(s: &str) -> GaussCode {
        s.parse().unwrap()
    }

    #[test]
    fn strand_closure_closes_each_strand() {
        let g = code("1-2: O1+ U2+; 3-4: U1+ O2+");
        let c = gauss_closure(&g, &"(1 2)(3 4)".parse().unwrap()).unwrap();
        assert_eq!(c.to_string(), "loop: O1+ U2+; loop: U1+ O2+");
    }

    #[test]
    fn reversal_flips_mixed_crossings() {
        let g = code("1-2: O1+ O2+; 3-4: U1+ U2+");
        // 1 -> 2 -> sigma 3 -> 4 -> sigma 1: both forward
        let c = gauss_closure(&g, &"(2 3)(1 4)".parse().unwrap()).unwrap();
        assert_eq!(c.to_string(), "loop: O1+ O2+ U1+ U2+");
        // 1 -> 2 -> sigma 4 -> 3 -> sigma 1: second strand backwards
        let c = gauss_closure(&g, &"(1 3)(2 4)".parse().unwrap()).unwrap();
        assert_eq!(c.to_string(), "loop: O1- O2- U2- U1-");
        let overs = c.strands()[0].passages.iter().filter(|p| p.role == Role::Over).count();
        assert_eq!(overs, 2);
    }

    #[test]
    fn crossingless_two_strands_give_one_loop() {
        let g = code("1-2:; 3-4:");
        let c = gauss_closure(&g, &"(2 3)(1 4)".parse().unwrap()).unwrap();
        assert_eq!(c.to_string(), "loop:");
    }

    #[test]
    fn size_mismatch() {
        let g = code("1-2:");
        assert!(matches!(
            gauss_closure(&g, &"(1 2)(3 4)".parse().unwrap()),
            Err(ClosureError::SizeMismatch(1, 2))
        ));
    }
}
