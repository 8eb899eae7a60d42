use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use super::{DatasetManifest, ManifestEntry, Split};
use crate::seed::{self, tags};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitSizes {
    /// Fractions for train / val / test, summing to 1.
    Ratios([f64; 3]),
    /// Exact unit counts for train / val / test.
    Counts([usize; 3]),
}

impl SplitSizes {
    /// Units per split for `n` units.
    ///
    /// Ratios use cumulative flooring: split boundaries sit at
    /// `floor(n * (r0))` and `floor(n * (r0 + r1))`, and test takes the rest.
    fn resolve(self, n: usize) -> Result<[usize; 3]> {
        match self {
            SplitSizes::Counts(c) => {
                if c.iter().sum::<usize>() != n {
                    return Err(Error::Validation(format!(
                        "split counts {c:?} do not add up to {n} units"
                    )));
                }
                Ok(c)
            }
            SplitSizes::Ratios(r) => {
                if r.iter().any(|&x| !(x >= 0.0)) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return Err(Error::Validation(format!("split ratios {r:?} must be non-negative and sum to 1")));
                }
                let boundary = |cum: f64| ((cum * n as f64 + 1e-9).floor() as usize).min(n);
                let b1 = boundary(r[0]);
                let b2 = boundary(r[0] + r[1]).max(b1);
                let b2 = if r[2] == 0.0 { n } else { b2 };
                Ok([b1, b2 - b1, n - b2])
            }
        }
    }
}

/// Seeded split of `entries` into train / val / test.
///
/// With `by_group` every entry sharing a `group` key lands in the same split
/// and the sizes count groups; entries without a key form their own group.
/// Units are ordered by key, shuffled with the seed, and assigned
/// contiguously.
pub fn split(name: &str, mut entries: Vec<ManifestEntry>, sizes: SplitSizes, seed: u64, by_group: bool) -> Result<DatasetManifest> {
    if entries.is_empty() {
        return Err(Error::Validation("cannot split an empty entry list".into()));
    }
    let key = |e: &ManifestEntry| match (&e.group, by_group) {
        (Some(g), true) => format!("g:{g}"),
        _ => format!("f:{}", e.frame),
    };
    let mut units: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        units.entry(key(e)).or_default().push(i);
    }
    let mut order: Vec<Vec<usize>> = units.into_values().collect();
    order.shuffle(&mut seed::rng(seed, tags::SPLIT, 0));

    let counts = sizes.resolve(order.len())?;
    let mut splits = Split::ALL.iter().zip(counts).flat_map(|(&s, c)| std::iter::repeat_n(s, c));
    for unit in &order {
        let s = splits.next().expect("counts cover every unit");
        for &i in unit {
            entries[i].split = s;
        }
    }
    let mut manifest = DatasetManifest::new(name);
    manifest.entries = entries;
    manifest.validate()?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Mode;

    fn entries(n: usize, groups: usize) -> Vec<ManifestEntry> {
        (0..n)
            .map(|i| ManifestEntry {
                frame: format!("{i:06}"),
                frame_index: Some(i as u64),
                split: Split::Train,
                mode: Mode::Real,
                group: (groups > 0).then(|| format!("person{}", i % groups)),
                files: Default::default(),
            })
            .collect()
    }

    #[test]
    fn cumulative_floor_counts() {
        assert_eq!(SplitSizes::Ratios([0.6, 0.1, 0.3]).resolve(1101).unwrap(), [660, 110, 331]);
        assert_eq!(SplitSizes::Ratios([0.8, 0.2, 0.0]).resolve(10).unwrap(), [8, 2, 0]);
        assert_eq!(SplitSizes::Ratios([1.0, 0.0, 0.0]).resolve(7).unwrap(), [7, 0, 0]);
        assert!(SplitSizes::Ratios([0.5, 0.1, 0.1]).resolve(7).is_err());
        assert!(SplitSizes::Counts([1, 1, 1]).resolve(4).is_err());
    }

    #[test]
    fn grouped_split_keeps_people_together() {
        let m = split("mr", entries(200, 10), SplitSizes::Ratios([0.8, 0.2, 0.0]), 3, true).unwrap();
        let mut by_person: BTreeMap<String, Vec<Split>> = BTreeMap::new();
        for e in &m.entries {
            by_person.entry(e.group.clone().unwrap()).or_default().push(e.split);
        }
        let person_splits: Vec<Split> = by_person
            .values()
            .map(|s| {
                assert!(s.iter().all(|x| *x == s[0]));
                s[0]
            })
            .collect();
        assert_eq!(person_splits.iter().filter(|s| **s == Split::Train).count(), 8);
        assert_eq!(person_splits.iter().filter(|s| **s == Split::Val).count(), 2);
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = split("x", entries(50, 0), SplitSizes::Ratios([0.6, 0.2, 0.2]), 9, false).unwrap();
        let b = split("x", entries(50, 0), SplitSizes::Ratios([0.6, 0.2, 0.2]), 9, false).unwrap();
        let c = split("x", entries(50, 0), SplitSizes::Ratios([0.6, 0.2, 0.2]), 10, false).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.counts(), [30, 10, 10]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(split("x", Vec::new(), SplitSizes::Ratios([1.0, 0.0, 0.0]), 0, false).is_err());
    }
}
