//! Built-in presentations used by the verification suites. The same
//! texts are shipped as `groups/<name>.grp` in the repository.

use std::sync::Arc;

use crate::words::Presentation;

#[derive(Debug, Clone, Copy)]
pub struct Group {
    pub name: &'static str,
    pub text: &'static str,
    /// Group order when finite.
    pub order: Option<usize>,
}

impl Group {
    pub fn presentation(&self) -> Arc<Presentation> {
        Arc::new(Presentation::parse(self.text).expect("corpus presentations parse"))
    }
}

const fn g(name: &'static str, text: &'static str, order: Option<usize>) -> Group {
    Group { name, text, order }
}

pub const FREE: &[Group] = &[
    g("f1", "# free group of rank 1\ngens: a\n", None),
    g("f2", "# free group of rank 2\ngens: a b\n", None),
    g("f3", "# free group of rank 3\ngens: a b c\n", None),
];

pub const FINITE: &[Group] = &[
    g("trivial", "# trivial group\ngens: a\nrel: a\n", Some(1)),
    g("z3", "# cyclic of order 3\ngens: a\nrel: a^3\n", Some(3)),
    g("z4", "# cyclic of order 4\ngens: a\nrel: a^4\n", Some(4)),
    g("z6", "# cyclic of order 6\ngens: a\nrel: a^6\n", Some(6)),
    g("z8", "# cyclic of order 8\ngens: a\nrel: a^8\n", Some(8)),
    g(
        "v4",
        "# Klein four-group\ngens: a b\nrel: a^2\nrel: b^2\nrel: [a,b]\n",
        Some(4),
    ),
    g(
        "s3",
        "# symmetric group on 3 points\ngens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^2\n",
        Some(6),
    ),
    g(
        "d4",
        "# dihedral of order 8\ngens: a b\nrel: a^4\nrel: b^2\nrel: (a b)^2\n",
        Some(8),
    ),
    g(
        "q8",
        "# quaternion group\ngens: a b\nrel: a^4\nrel: a^2 b^-2\nrel: b^-1 a b a\n",
        Some(8),
    ),
    g(
        "z2xz4",
        "# Z/2 x Z/4\ngens: a b\nrel: a^2\nrel: b^4\nrel: [a,b]\n",
        Some(8),
    ),
    g(
        "z3xz3",
        "# Z/3 x Z/3\ngens: a b\nrel: a^3\nrel: b^3\nrel: [a,b]\n",
        Some(9),
    ),
    g(
        "a4",
        "# alternating group on 4 points\ngens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^3\n",
        Some(12),
    ),
    g(
        "s3xz2",
        "# S3 x Z/2\ngens: a b c\nrel: a^2\nrel: b^3\nrel: (a b)^2\nrel: c^2\nrel: [a,c]\nrel: [b,c]\n",
        Some(12),
    ),
    g(
        "d8",
        "# dihedral of order 16\ngens: a b\nrel: a^8\nrel: b^2\nrel: (a b)^2\n",
        Some(16),
    ),
    g(
        "s4",
        "# symmetric group on 4 points\ngens: a b\nrel: a^2\nrel: b^3\nrel: (a b)^4\n",
        Some(24),
    ),
    g(
        "s4xz2",
        "# S4 x Z/2\ngens: a b c\nrel: a^2\nrel: b^3\nrel: (a b)^4\nrel: c^2\nrel: [a,c]\nrel: [b,c]\n",
        Some(48),
    ),
];

pub const INFINITE: &[Group] = &[
    g("a2", "# free product Z/2 * Z\ngens: a b\nrel: a^2\n", None),
    g(
        "f2xz2",
        "# F2 x Z/2\ngens: x y z\nrel: z^2\nrel: [x,z]\nrel: [y,z]\n",
        None,
    ),
    g(
        "bs12",
        "# Baumslag-Solitar BS(1,2)\ngens: a b\nrel: b^-1 a b a^-2\n",
        None,
    ),
    g(
        "bs23",
        "# Baumslag-Solitar BS(2,3); coset enumeration never closes\ngens: a b\nrel: b^-1 a^2 b a^-3\n",
        None,
    ),
];

pub fn all() -> impl Iterator<Item = &'static Group> {
    FREE.iter().chain(FINITE).chain(INFINITE)
}

pub fn get(name: &str) -> Option<&'static Group> {
    all().find(|g| g.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosets::todd_coxeter;

    #[test]
    fn corpus_parses_and_orders_match_enumeration() {
        for g in all() {
            let p = g.presentation();
            if let Some(n) = g.order {
                assert_eq!(todd_coxeter(p, &[], 1 << 16).unwrap().n_cosets(), n, "{}", g.name);
            }
        }
    }
}
