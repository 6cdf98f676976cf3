use super::OptResult;
use crate::error::{Error, Result};
use crate::feasibility::is_minla;
use crate::instance::{replay_components, RevealTrace};
use crate::perm::Permutation;

/// Largest `n` accepted by [`exhaustive_opt`].
pub const EXHAUSTIVE_MAX_N: usize = 7;

/// Exact optimum over all schedules by brute force: a shortest path through
/// layers, layer `i` holding every minimum linear arrangement of the graph
/// after `i` events, with edges weighted by the number of discordant pairs.
///
/// The witness is the lexicographically smallest optimal final permutation.
pub fn exhaustive_opt(t: &RevealTrace) -> Result<OptResult> {
    if t.n > EXHAUSTIVE_MAX_N {
        return Err(Error::Capacity {
            what: "exhaustive optimum",
            items: t.n,
            cap: EXHAUSTIVE_MAX_N,
        });
    }
    let all = all_orders(t.n);
    let positions: Vec<Vec<usize>> = all.iter().map(|o| inverse(o)).collect();

    let start = t.pi0.as_slice().to_vec();
    let mut layer: Vec<(usize, u64)> = vec![(all.iter().position(|o| *o == start).expect("pi0 enumerated"), 0)];
    for i in 1..=t.k() {
        let parts = replay_components(t, i)?;
        let mut next = Vec::new();
        for (idx, order) in all.iter().enumerate() {
            let p = Permutation::from_order(order.clone())?;
            if !is_minla(&p, &parts) {
                continue;
            }
            let best = layer
                .iter()
                .map(|&(prev, d)| d + discordant(&positions[prev], &positions[idx]))
                .min()
                .expect("previous layer is nonempty");
            next.push((idx, best));
        }
        layer = next;
    }
    // layers are in lexicographic order, so min_by_key keeps the first minimum
    let &(idx, cost) = layer.iter().min_by_key(|&&(_, d)| d).expect("nonempty layer");
    Ok(OptResult {
        cost,
        witness: Permutation::from_order(all[idx].clone())?,
    })
}

fn inverse(order: &[usize]) -> Vec<usize> {
    let mut pos = vec![0; order.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

fn discordant(a: &[usize], b: &[usize]) -> u64 {
    let n = a.len();
    let mut count = 0;
    for x in 0..n {
        for y in x + 1..n {
            if (a[x] < a[y]) != (b[x] < b[y]) {
                count += 1;
            }
        }
    }
    count
}

/// Every ordering of `0..n` in lexicographic order.
pub fn all_orders(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Model, RevealEvent};

    fn trace(model: Model, pi0: &[usize], pairs: &[(usize, usize)]) -> RevealTrace {
        RevealTrace::new(
            model,
            Permutation::from_order(pi0.to_vec()).unwrap(),
            pairs.iter().map(|&(u, v)| RevealEvent::new(u, v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn enumerates_all_orders() {
        let all = all_orders(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all[1], vec![0, 1, 3, 2]);
        assert_eq!(all.last().unwrap(), &vec![3, 2, 1, 0]);
        assert_eq!(all_orders(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn empty_trace() {
        let t = trace(Model::Lines, &[2, 0, 1], &[]);
        let opt = exhaustive_opt(&t).unwrap();
        assert_eq!(opt.cost, 0);
        assert_eq!(opt.witness, t.pi0);
    }

    #[test]
    fn edge_then_triangle() {
        let t = trace(Model::Cliques, &[0, 1, 2], &[(0, 2), (0, 1)]);
        let opt = exhaustive_opt(&t).unwrap();
        assert_eq!(opt.cost, 1);
        assert_eq!(opt.witness.as_slice(), &[0, 2, 1]);
    }

    #[test]
    fn rejects_large_n() {
        let t = trace(Model::Lines, &(0..8).collect::<Vec<_>>(), &[]);
        assert!(matches!(exhaustive_opt(&t), Err(Error::Capacity { .. })));
    }
}
