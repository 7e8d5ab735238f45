//! d-detecting families: set families whose subset sums identify any function
//! `U → {0,…,d−1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::mask_to_vec;

/// Default bound on the number of difference vectors `(2d−1)^U` a verifier
/// will enumerate.
pub const DEFAULT_VERIFY_CAP: u64 = 100_000_000;
/// Random draws attempted by [`build_family`] before falling back.
pub const DEFAULT_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectingFamily {
    universe_size: usize,
    d: usize,
    sets: Vec<Vec<usize>>,
    #[serde(default)]
    verified: bool,
}

impl DetectingFamily {
    /// Unverified family. Sets are sorted and deduplicated internally.
    pub fn new(universe_size: usize, d: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        if universe_size == 0 || d < 2 {
            return Err(Error::params(format!(
                "need universe_size ≥ 1 and d ≥ 2, got {universe_size} and {d}"
            )));
        }
        let mut clean = Vec::with_capacity(sets.len());
        for mut s in sets {
            s.sort_unstable();
            s.dedup();
            if let Some(&x) = s.iter().find(|&&x| x >= universe_size) {
                return Err(Error::params(format!(
                    "element {x} outside universe of size {universe_size}"
                )));
            }
            clean.push(s);
        }
        Ok(DetectingFamily {
            universe_size,
            d,
            sets: clean,
            verified: false,
        })
    }

    pub fn singletons(universe_size: usize, d: usize) -> Result<Self> {
        let mut fam = Self::new(universe_size, d, (0..universe_size).map(|x| vec![x]).collect())?;
        // each value is read off directly
        fam.verified = true;
        Ok(fam)
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// Runs [`verify_family`] and records the outcome.
    pub fn verify(&mut self, cap: u64) -> Result<bool> {
        let ok = verify_family(self, cap)?;
        self.verified = ok;
        Ok(ok)
    }

    fn masks(&self) -> Vec<u64> {
        self.sets
            .iter()
            .map(|s| s.iter().fold(0u64, |m, &x| m | 1 << x))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.universe_size, self.d, self.sets.len());
        for s in &self.sets {
            let line: Vec<String> = s.iter().map(usize::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the text format. The result is unverified.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: 1,
                message: format!("malformed header '{header}'"),
            })?;
        let [universe, d, count] = nums[..] else {
            return Err(Error::Parse {
                line: 1,
                message: "header must be 'universe d count'".into(),
            });
        };
        let mut sets = Vec::with_capacity(count);
        for i in 0..count {
            let line_no = i + 2;
            let line = lines.next().ok_or(Error::Parse {
                line: line_no,
                message: format!("expected {count} sets, found {i}"),
            })?;
            let set = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<Vec<usize>, _>>()
                .map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad set '{line}'"),
                })?;
            sets.push(set);
        }
        Self::new(universe, d, sets)
    }
}

fn vector_count(universe_size: usize, d: usize, cap: u64) -> Result<u64> {
    let base = 2 * d as u64 - 1;
    let mut total: u64 = 1;
    for _ in 0..universe_size {
        total = match total.checked_mul(base) {
            Some(t) if t <= cap => t,
            _ => {
                return Err(Error::capacity(format!(
                    "(2·{d}−1)^{universe_size} difference vectors exceed the cap of {cap}"
                )))
            }
        };
    }
    Ok(total)
}

/// Kernel check: every nonzero `δ ∈ {−(d−1),…,d−1}^U` has some set with a
/// nonzero sum over it. Equivalent to the pairwise definition because the
/// differences `f − g` range over exactly those vectors.
pub fn verify_family(fam: &DetectingFamily, cap: u64) -> Result<bool> {
    let u = fam.universe_size;
    let d = fam.d as i64;
    vector_count(u, fam.d, cap)?;
    let masks = fam.masks();
    // sets containing each element
    let containing: Vec<Vec<usize>> = (0..u)
        .map(|x| (0..masks.len()).filter(|&s| masks[s] >> x & 1 == 1).collect())
        .collect();

    // odometer over δ starting from all −(d−1)
    let low = -(d - 1);
    let mut delta = vec![low; u];
    let mut sums: Vec<i64> = masks.iter().map(|m| low * i64::from(m.count_ones())).collect();
    let mut nonzero = sums.iter().filter(|&&s| s != 0).count();
    let mut zeros_in_delta = 0usize;

    loop {
        if nonzero == 0 && zeros_in_delta < u {
            return Ok(false);
        }
        // advance
        let mut x = 0;
        loop {
            if x == u {
                return Ok(true);
            }
            let step = if delta[x] == d - 1 { 2 * low } else { 1 };
            let old = delta[x];
            delta[x] += step;
            zeros_in_delta = zeros_in_delta + usize::from(delta[x] == 0) - usize::from(old == 0);
            for &s in &containing[x] {
                let before = sums[s] != 0;
                sums[s] += step;
                let after = sums[s] != 0;
                nonzero = nonzero + usize::from(after) - usize::from(before);
            }
            if step == 1 {
                break;
            }
            x += 1;
        }
    }
}

/// Deterministic halving construction. Each round scans candidate sets in
/// increasing bitmask order and keeps the first one that separates at least
/// half of the difference vectors not yet separated. A uniformly random set
/// separates any fixed nonzero vector with probability at least 1/2, so such a
/// candidate always exists and the family has at most
/// `⌈U·log2(2d−1)⌉ ≤ ⌈2U·log2 d⌉` sets.
pub fn greedy_family(universe_size: usize, d: usize, cap: u64) -> Result<DetectingFamily> {
    if universe_size == 0 || d < 2 {
        return Err(Error::params(format!(
            "need universe_size ≥ 1 and d ≥ 2, got {universe_size} and {d}"
        )));
    }
    if universe_size > 32 {
        return Err(Error::capacity("greedy search is limited to 32 elements"));
    }
    let total = vector_count(universe_size, d, cap)?;
    let base = 2 * d as i64 - 1;
    let offset = d as i64 - 1;
    let center = (total - 1) / 2; // index of the zero vector
    let mut remaining: Vec<u64> = (0..total).filter(|&i| i != center).collect();
    let digit_sum = |mut idx: u64, mask: u64| -> i64 {
        let mut sum = 0;
        for x in 0..universe_size {
            let digit = (idx % base as u64) as i64 - offset;
            idx /= base as u64;
            if mask >> x & 1 == 1 {
                sum += digit;
            }
        }
        sum
    };

    let mut sets = Vec::new();
    let limit = 1u64 << universe_size;
    while !remaining.is_empty() {
        let mut chosen = None;
        for mask in 1..limit {
            let hits = remaining.iter().filter(|&&i| digit_sum(i, mask) != 0).count();
            if 2 * hits >= remaining.len() {
                chosen = Some(mask);
                break;
            }
        }
        let mask = chosen.expect("a halving set always exists");
        remaining.retain(|&i| digit_sum(i, mask) == 0);
        sets.push(mask_to_vec(mask));
    }
    let mut fam = DetectingFamily::new(universe_size, d, sets)?;
    fam.verified = true;
    Ok(fam)
}

/// Seeded randomized construction: up to `attempts` draws of `target_size`
/// uniformly random nonempty subsets, each checked with [`verify_family`].
/// Falls back to [`greedy_family`] and then to singletons, so the result is
/// always a verified family. When the universe is too large to verify at all,
/// singletons are returned directly.
pub fn build_family(
    universe_size: usize,
    d: usize,
    seed: u64,
    target_size: usize,
    attempts: usize,
    cap: u64,
) -> Result<DetectingFamily> {
    if universe_size == 0 || d < 2 {
        return Err(Error::params(format!(
            "need universe_size ≥ 1 and d ≥ 2, got {universe_size} and {d}"
        )));
    }
    if universe_size > 63 || vector_count(universe_size, d, cap).is_err() {
        return DetectingFamily::singletons(universe_size, d);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = 1u64 << universe_size;
    if target_size > 0 {
        for _ in 0..attempts {
            let sets = (0..target_size).map(|_| mask_to_vec(rng.gen_range(1..limit))).collect();
            let mut fam = DetectingFamily::new(universe_size, d, sets)?;
            if fam.verify(cap)? {
                return Ok(fam);
            }
        }
    }
    match greedy_family(universe_size, d, cap) {
        Ok(fam) => Ok(fam),
        Err(_) => DetectingFamily::singletons(universe_size, d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(u: usize, d: usize, sets: &[&[usize]]) -> DetectingFamily {
        DetectingFamily::new(u, d, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    #[test]
    fn verify_examples() {
        for d in 2..5 {
            assert!(verify_family(&fam(3, d, &[&[0], &[1], &[2]]), DEFAULT_VERIFY_CAP).unwrap());
        }
        assert!(!verify_family(&fam(2, 2, &[&[0, 1]]), DEFAULT_VERIFY_CAP).unwrap());
        assert!(verify_family(&fam(2, 2, &[&[0], &[0, 1]]), DEFAULT_VERIFY_CAP).unwrap());
        assert!(!verify_family(&fam(2, 2, &[]), DEFAULT_VERIFY_CAP).unwrap());
        assert!(verify_family(&fam(20, 4, &[]), DEFAULT_VERIFY_CAP).is_err());
    }

    #[test]
    fn binary_weighing_detects_two_values() {
        // {0,1},{0} on two elements with d = 2: sums (f0+f1, f0) determine f.
        assert!(verify_family(&fam(2, 2, &[&[0, 1], &[0]]), DEFAULT_VERIFY_CAP).unwrap());
        // {0,1,2},{0,1},{0,2} with d = 2 is detecting: δ with δ0+δ1+δ2 = 0,
        // δ0+δ1 = 0 forces δ2 = 0, then δ0 = 0 from the third, then δ1 = 0.
        assert!(verify_family(&fam(3, 2, &[&[0, 1, 2], &[0, 1], &[0, 2]]), DEFAULT_VERIFY_CAP).unwrap());
    }

    #[test]
    fn greedy_examples() {
        let f = greedy_family(1, 3, DEFAULT_VERIFY_CAP).unwrap();
        assert_eq!(f.sets(), &[vec![0]]);
        let f = greedy_family(4, 2, DEFAULT_VERIFY_CAP).unwrap();
        assert!(f.len() <= 9 && verify_family(&f, DEFAULT_VERIFY_CAP).unwrap());
        let f = greedy_family(6, 4, DEFAULT_VERIFY_CAP).unwrap();
        assert!(f.len() <= 25 && verify_family(&f, DEFAULT_VERIFY_CAP).unwrap());
    }

    #[test]
    fn build_examples() {
        let f = build_family(2, 4, 3, 2, DEFAULT_ATTEMPTS, DEFAULT_VERIFY_CAP).unwrap();
        assert_eq!(f.len(), 2);
        assert!(verify_family(&f, DEFAULT_VERIFY_CAP).unwrap());
        let f = build_family(8, 4, 7, 8, DEFAULT_ATTEMPTS, DEFAULT_VERIFY_CAP).unwrap();
        assert!(f.is_verified() && verify_family(&f, DEFAULT_VERIFY_CAP).unwrap());
        let f = build_family(1, 2, 9, 1, DEFAULT_ATTEMPTS, DEFAULT_VERIFY_CAP).unwrap();
        assert_eq!(f.sets(), &[vec![0]]);
        let a = build_family(5, 3, 11, 6, DEFAULT_ATTEMPTS, DEFAULT_VERIFY_CAP).unwrap();
        let b = build_family(5, 3, 11, 6, DEFAULT_ATTEMPTS, DEFAULT_VERIFY_CAP).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn text_round_trip() {
        let f = fam(4, 3, &[&[0, 2], &[], &[3, 1]]);
        let text = f.to_text();
        assert_eq!(text, "4 3 3\n0 2\n\n1 3\n");
        assert_eq!(DetectingFamily::from_text(&text).unwrap(), f);
        assert!(DetectingFamily::from_text("4 3 2\n0\n").is_err());
        assert!(DetectingFamily::from_text("4 3 1\n7\n").is_err());
    }
}
