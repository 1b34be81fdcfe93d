use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Monomial orders used by the kernel.
///
/// `Block` puts the variables listed in `elim` in a first block that
/// dominates the rest; both blocks are compared with graded reverse
/// lexicographic order. It is the elimination order for `elim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    #[default]
    GrevLex,
    Lex,
    Block {
        elim: Vec<usize>,
    },
}

impl MonomialOrder {
    pub fn block(mut elim: Vec<usize>) -> Self {
        elim.sort_unstable();
        elim.dedup();
        MonomialOrder::Block { elim }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::GrevLex => grevlex(a.iter().copied(), b.iter().copied()),
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::Block { elim } => {
                let split = |e: &[u32], inside: bool| -> Vec<u32> {
                    (0..e.len()).filter(|i| elim.binary_search(i).is_ok() == inside).map(|i| e[i]).collect()
                };
                let first = grevlex(split(a, true).into_iter(), split(b, true).into_iter());
                if first != Ordering::Equal {
                    return first;
                }
                grevlex(split(a, false).into_iter(), split(b, false).into_iter())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonomialOrder::GrevLex => "grevlex",
            MonomialOrder::Lex => "lex",
            MonomialOrder::Block { .. } => "block",
        }
    }
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonomialOrder::Block { elim } => write!(f, "block{elim:?}"),
            other => f.write_str(other.name()),
        }
    }
}

fn grevlex<I>(a: I, b: I) -> Ordering
where
    I: Iterator<Item = u32> + Clone,
{
    let da: u64 = a.clone().map(u64::from).sum();
    let db: u64 = b.clone().map(u64::from).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    // rightmost differing exponent: the smaller one wins
    let mut last = Ordering::Equal;
    for (x, y) in a.zip(b) {
        if x != y {
            last = y.cmp(&x);
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_basics() {
        let o = MonomialOrder::GrevLex;
        // x^2 > x*y > y^2 > x > y > 1 in two variables
        let seq: [&[u32]; 6] = [&[2, 0], &[1, 1], &[0, 2], &[1, 0], &[0, 1], &[0, 0]];
        for w in seq.windows(2) {
            assert_eq!(o.cmp(w[0], w[1]), Ordering::Greater, "{:?} vs {:?}", w[0], w[1]);
        }
        // x*z^0*y^2 vs x^2*z: degree 3 both; grevlex prefers smaller last exponent
        assert_eq!(o.cmp(&[1, 2, 0], &[2, 0, 1]), Ordering::Greater);
    }

    #[test]
    fn block_eliminates() {
        let o = MonomialOrder::block(alloc::vec![0]);
        // any monomial containing x0 beats every monomial without it
        assert_eq!(o.cmp(&[1, 0, 0], &[0, 5, 5]), Ordering::Greater);
        assert_eq!(o.cmp(&[0, 2, 0], &[0, 1, 0]), Ordering::Greater);
    }
}
