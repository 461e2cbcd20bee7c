mod common;

use std::collections::BTreeSet;

use pgrad::corpus;
use pgrad::lattice::{enumerate, LatticeConfig};

#[test]
fn first_two_levels_match_abelian_kernels() {
    for name in [
        "f1", "f2", "f3", "a2", "f2xz2", "bs12", "z4", "z6", "v4", "z2xz4", "q8", "s4", "z3xz3",
    ] {
        let pres = corpus::get(name).unwrap().presentation();
        for p in [2, 3] {
            let lattice = enumerate(pres.clone(), p, 2, LatticeConfig::default()).unwrap();
            let oracle = common::kernel_levels(&pres, p);
            for (j, expected) in oracle.iter().enumerate() {
                let got: BTreeSet<Vec<u8>> = lattice
                    .levels
                    .get(j)
                    .map(|l| l.iter().map(|n| n.key().as_bytes().to_vec()).collect())
                    .unwrap_or_default();
                assert_eq!(&got, expected, "{name} p={p} level {j}");
            }
        }
    }
}

#[test]
fn free_group_level_sizes() {
    // index 2 in F2: 3 nonzero functionals; index 4: 12 epimorphisms onto
    // Z/4 up to its 2 automorphisms, plus the kernel onto Z/2 x Z/2
    let f2 = corpus::get("f2").unwrap().presentation();
    let oracle = common::kernel_levels(&f2, 2);
    let sizes: Vec<usize> = oracle.iter().map(|s| s.len()).collect();
    assert_eq!(sizes, vec![1, 3, 7]);
    let f3 = corpus::get("f3").unwrap().presentation();
    let sizes: Vec<usize> = common::kernel_levels(&f3, 3).iter().map(|s| s.len()).collect();
    let lattice = enumerate(f3, 3, 2, LatticeConfig::default()).unwrap();
    assert_eq!(sizes, lattice.level_sizes());
    assert_eq!(sizes[1], 13);
}
