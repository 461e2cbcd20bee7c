//! Independent oracle for the lattice: kernels of homomorphisms onto the
//! groups of order `p` and `p²`, which are all abelian.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use pgrad::cosets::CosetTable;
use pgrad::words::Presentation;

/// Translation action of `Z/m1 × Z/m2` on itself, point `(a, b)` stored
/// as `a * m2 + b`.
fn translation(m1: u32, m2: u32, by: (u32, u32)) -> Vec<u32> {
    let mut perm = Vec::with_capacity((m1 * m2) as usize);
    for a in 0..m1 {
        for b in 0..m2 {
            perm.push((a + by.0) % m1 * m2 + (b + by.1) % m2);
        }
    }
    perm
}

/// Keys of kernels of all homomorphisms to `Z/p²` and `Z/p × Z/p`,
/// grouped by index `p^j` for `j ≤ 2`.
pub fn kernel_levels(pres: &Arc<Presentation>, p: u32) -> Vec<BTreeSet<Vec<u8>>> {
    let mut levels = vec![BTreeSet::new(); 3];
    let r = pres.n_generators();
    for (m1, m2) in [(p * p, 1), (p, p)] {
        let order = (m1 * m2) as usize;
        let elems: Vec<(u32, u32)> = (0..m1).flat_map(|a| (0..m2).map(move |b| (a, b))).collect();
        for choice in 0..order.pow(r as u32) {
            let mut c = choice;
            let perms: Vec<Vec<u32>> = (0..r)
                .map(|_| {
                    let e = elems[c % order];
                    c /= order;
                    translation(m1, m2, e)
                })
                .collect();
            // fails exactly when the images do not satisfy the relators
            let Ok(t) = CosetTable::from_permutations(pres.clone(), &perms, 0) else {
                continue;
            };
            let index = t.n_cosets();
            let j = [1, p as usize, (p * p) as usize]
                .iter()
                .position(|&n| n == index)
                .expect("p-power index");
            levels[j].insert(t.key().as_bytes().to_vec());
        }
    }
    levels
}

pub fn parse(text: &str) -> Arc<Presentation> {
    Arc::new(Presentation::parse(text).unwrap())
}
