//! Independent reference implementations (direct bit manipulation, no
//! schemas) and a differencing harness for comparing two integer functions
//! over a domain.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn popcount(x: u64) -> u64 {
    x.count_ones() as u64
}

pub fn popcount_mod(x: u64, n: u32) -> u64 {
    x.count_ones() as u64 % n as u64
}

/// Least `i ≤ bound` with `r(i)`, or the sentinel `bound + 1`.
pub fn mu_brute(bound: u64, r: impl Fn(u64) -> bool) -> u64 {
    (0..=bound).find(|&i| r(i)).unwrap_or(bound + 1)
}

/// The input domain of a comparison.
#[derive(Debug, Clone)]
pub enum Domain {
    /// Every argument tuple in `lo..hi` per position (cartesian up to
    /// arity 2; beyond that use `Samples`).
    Range { lo: u64, hi: u64, arity: usize },
    /// `count` tuples of `arity` values below `limit`, drawn from a seeded
    /// generator.
    Samples { seed: u64, count: usize, arity: usize, limit: u64 },
}

impl Domain {
    pub fn tuples(&self) -> Vec<Vec<BigInt>> {
        match *self {
            Domain::Range { lo, hi, arity } => {
                assert!(arity >= 1 && arity <= 2, "exhaustive ranges up to arity 2");
                let mut out = Vec::new();
                for a in lo..hi {
                    if arity == 1 {
                        out.push(vec![BigInt::from(a)]);
                    } else {
                        for b in lo..hi {
                            out.push(vec![BigInt::from(a), BigInt::from(b)]);
                        }
                    }
                }
                out
            }
            Domain::Samples { seed, count, arity, limit } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|_| {
                        (0..arity)
                            .map(|_| BigInt::from(rng.gen_range(0..limit)))
                            .collect()
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub args: Vec<BigInt>,
    pub left: String,
    pub right: String,
}

/// Result of diffing two functions over a domain. At most `CAP` mismatches
/// are retained; the totals count everything.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffReport {
    pub total: usize,
    pub mismatch_count: usize,
    pub mismatches: Vec<Mismatch>,
}

impl DiffReport {
    pub const CAP: usize = 20;

    pub fn passed(&self) -> bool {
        self.mismatch_count == 0
    }

    /// One line per mismatch plus a summary line; stable and parseable.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for m in &self.mismatches {
            let args: Vec<String> = m.args.iter().map(|a| a.to_string()).collect();
            let _ = writeln!(s, "mismatch\t({})\t{}\t{}", args.join(", "), m.left, m.right);
        }
        if self.mismatch_count > self.mismatches.len() {
            let _ = writeln!(s, "… and {} more", self.mismatch_count - self.mismatches.len());
        }
        let _ = writeln!(
            s,
            "{}: {} points, {} mismatches",
            if self.passed() { "PASS" } else { "FAIL" },
            self.total,
            self.mismatch_count
        );
        s
    }
}

/// Compare two fallible functions pointwise; errors count as mismatches and
/// are rendered in place of a value.
pub fn diff<L, R>(domain: &Domain, mut left: L, mut right: R) -> DiffReport
where
    L: FnMut(&[BigInt]) -> Result<BigInt, String>,
    R: FnMut(&[BigInt]) -> Result<BigInt, String>,
{
    let tuples = domain.tuples();
    let mut report = DiffReport { total: tuples.len(), mismatch_count: 0, mismatches: Vec::new() };
    for args in tuples {
        let l = left(&args);
        let r = right(&args);
        if l != r {
            report.mismatch_count += 1;
            if report.mismatches.len() < DiffReport::CAP {
                let show = |v: Result<BigInt, String>| match v {
                    Ok(v) => v.to_string(),
                    Err(e) => format!("error: {e}"),
                };
                report.mismatches.push(Mismatch { args, left: show(l), right: show(r) });
            }
        }
    }
    report
}

/// Convenience: does a program entry match an oracle on small inputs?
pub fn entry_matches_u64(
    prog: &crate::engine::Program,
    domain: &Domain,
    oracle: impl Fn(&[u64]) -> u64,
) -> DiffReport {
    let mut ev = crate::engine::Evaluator::new(prog);
    let entry = prog.entry.clone().expect("program has an entry");
    diff(
        domain,
        |args| ev.eval(&entry, args).map_err(|e| e.to_string()),
        |args| {
            let small: Vec<u64> = args.iter().map(|a| a.to_u64().expect("oracle domain")).collect();
            Ok(BigInt::from(oracle(&small)))
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn popcount_oracles() {
        assert_eq!(popcount(0b1011), 3);
        assert_eq!(popcount_mod(0b1111, 3), 1);
        assert_eq!(mu_brute(5, |i| i >= 3), 3);
        assert_eq!(mu_brute(5, |_| false), 6);
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = Domain::Samples { seed: 7, count: 10, arity: 2, limit: 100 };
        assert_eq!(d.tuples(), d.tuples());
        assert_eq!(d.tuples().len(), 10);
    }

    #[test]
    fn diff_reports_mismatches() {
        let d = Domain::Range { lo: 0, hi: 10, arity: 1 };
        let rep = diff(
            &d,
            |a| Ok(a[0].clone()),
            |a| Ok(if a[0] == BigInt::from(7) { BigInt::from(0) } else { a[0].clone() }),
        );
        assert!(!rep.passed());
        assert_eq!(rep.mismatch_count, 1);
        assert!(rep.render().contains("FAIL"));
    }
}
