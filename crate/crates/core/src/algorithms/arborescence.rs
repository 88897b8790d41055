//! Minimum-weight out-arborescence (Chu-Liu/Edmonds).

/// Arcs are `(from, to, weight)`. Returns the index of the chosen arc
/// entering every node except `root`, or `None` if some node cannot be
/// reached. Among equal-weight arcs the one listed first wins.
pub fn min_arborescence(n: usize, root: usize, arcs: &[(usize, usize, f64)]) -> Option<Vec<usize>> {
    let tagged: Vec<(usize, usize, f64, usize)> = arcs.iter().enumerate().map(|(i, &(u, v, w))| (u, v, w, i)).collect();
    let mut picked = solve(n, root, &tagged)?;
    picked.sort_by_key(|&i| arcs[i].1);
    Some(picked)
}

/// Returns indices into `arcs` (the fourth field is ignored here and only
/// carried for the caller's mapping).
fn solve(n: usize, root: usize, arcs: &[(usize, usize, f64, usize)]) -> Option<Vec<usize>> {
    let mut inc: Vec<Option<usize>> = vec![None; n];
    for (i, &(u, v, w, _)) in arcs.iter().enumerate() {
        if u == v || v == root {
            continue;
        }
        if inc[v].is_none_or(|j| w < arcs[j].2) {
            inc[v] = Some(i);
        }
    }
    if (0..n).any(|v| v != root && inc[v].is_none()) {
        return None;
    }
    let mut id = vec![usize::MAX; n];
    let mut visit = vec![usize::MAX; n];
    let mut on_cycle = vec![false; n];
    let mut count = 0;
    for v in 0..n {
        let mut u = v;
        while u != root && visit[u] != v && id[u] == usize::MAX {
            visit[u] = v;
            u = arcs[inc[u].unwrap()].0;
        }
        if u != root && id[u] == usize::MAX && visit[u] == v {
            let mut x = u;
            loop {
                id[x] = count;
                on_cycle[x] = true;
                x = arcs[inc[x].unwrap()].0;
                if x == u {
                    break;
                }
            }
            count += 1;
        }
    }
    if count == 0 {
        return Some(arcs_of(&inc, root));
    }
    for x in id.iter_mut() {
        if *x == usize::MAX {
            *x = count;
            count += 1;
        }
    }
    let mut sub = Vec::new();
    for (i, &(u, v, w, _)) in arcs.iter().enumerate() {
        let (cu, cv) = (id[u], id[v]);
        if cu != cv {
            let adj = if on_cycle[v] { arcs[inc[v].unwrap()].2 } else { 0.0 };
            sub.push((cu, cv, w - adj, i));
        }
    }
    let chosen = solve(count, id[root], &sub)?;
    let mut out: Vec<usize> = chosen.iter().map(|&j| sub[j].3).collect();
    let entered: Vec<usize> = out.iter().map(|&i| arcs[i].1).collect();
    for x in 0..n {
        if on_cycle[x] && !entered.contains(&x) {
            out.push(inc[x].unwrap());
        }
    }
    Some(out)
}

fn arcs_of(inc: &[Option<usize>], root: usize) -> Vec<usize> {
    inc.iter().enumerate().filter(|&(v, _)| v != root).map(|(_, a)| a.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weight(arcs: &[(usize, usize, f64)], sel: &[usize]) -> f64 {
        sel.iter().map(|&i| arcs[i].2).sum()
    }

    #[test]
    fn contracts_a_cycle() {
        // 1 <-> 2 is cheap but one of them must be entered from the root.
        let arcs = vec![(0, 1, 10.0), (0, 2, 12.0), (1, 2, 1.0), (2, 1, 1.0), (2, 3, 2.0), (0, 3, 20.0)];
        let sel = min_arborescence(4, 0, &arcs).unwrap();
        assert_eq!(weight(&arcs, &sel), 13.0);
        assert_eq!(sel.len(), 3);
    }

    #[test]
    fn unreachable_node() {
        assert!(min_arborescence(3, 0, &[(0, 1, 1.0)]).is_none());
    }

    #[test]
    fn matches_enumeration_on_small_digraphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let mut arcs = Vec::new();
            for u in 0..n {
                for v in 1..n {
                    if u != v && rng.gen_bool(0.8) {
                        arcs.push((u, v, rng.gen_range(0..10) as f64));
                    }
                }
            }
            let got = min_arborescence(n, 0, &arcs).map(|s| weight(&arcs, &s));
            assert_eq!(got, brute(n, &arcs));
        }
    }

    fn brute(n: usize, arcs: &[(usize, usize, f64)]) -> Option<f64> {
        let choices: Vec<Vec<usize>> = (1..n).map(|v| (0..arcs.len()).filter(|&i| arcs[i].1 == v).collect()).collect();
        let mut best: Option<f64> = None;
        let mut idx = vec![0usize; n - 1];
        if choices.iter().any(|c| c.is_empty()) {
            return None;
        }
        loop {
            let par: Vec<usize> = (0..n - 1).map(|k| arcs[choices[k][idx[k]]].0).collect();
            let ok = (1..n).all(|v| {
                let mut x = v;
                for _ in 0..n {
                    if x == 0 {
                        return true;
                    }
                    x = par[x - 1];
                }
                x == 0
            });
            if ok {
                let w: f64 = (0..n - 1).map(|k| arcs[choices[k][idx[k]]].2).sum();
                best = Some(best.map_or(w, |b: f64| b.min(w)));
            }
            let mut k = 0;
            loop {
                if k == n - 1 {
                    return best;
                }
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}
