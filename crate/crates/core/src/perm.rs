//! Permutations of `0..n` and closure of generated groups.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("point {point} out of range for degree {degree}")]
    OutOfRange { point: usize, degree: usize },
    #[error("point {0} appears twice")]
    Repeated(usize),
    #[error("malformed cycle notation: {0}")]
    Syntax(String),
    #[error("generated group exceeds {0} elements")]
    TooLarge(usize),
}

/// A permutation of `0..degree`, stored as its image vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &i in &images {
            if i >= degree {
                return Err(PermError::OutOfRange { point: i, degree });
            }
            if seen[i] {
                return Err(PermError::Repeated(i));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    pub fn transposition(degree: usize, a: usize, b: usize) -> Self {
        let mut p = Perm::identity(degree);
        p.images.swap(a, b);
        p
    }

    /// Parses cycle notation with 1-based points, e.g. `(1 2)(3 4 5)` or `()`.
    pub fn parse_cycles(degree: usize, text: &str) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let Some(stripped) = rest.strip_prefix('(') else {
                return Err(PermError::Syntax(text.to_string()));
            };
            let Some(close) = stripped.find(')') else {
                return Err(PermError::Syntax(text.to_string()));
            };
            let cycle: Vec<usize> = stripped[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| PermError::Syntax(text.to_string()))
                })
                .collect::<Result<_, _>>()?;
            for &p in &cycle {
                if p == 0 || p > degree {
                    return Err(PermError::OutOfRange { point: p, degree });
                }
                if touched[p - 1] {
                    return Err(PermError::Repeated(p));
                }
                touched[p - 1] = true;
            }
            for (k, &p) in cycle.iter().enumerate() {
                images[p - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
            rest = stripped[close + 1..].trim_start();
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Perm { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycle notation with 1-based points; the identity prints as `()`.
    pub fn cycles(&self) -> String {
        let mut seen = vec![false; self.degree()];
        let mut out = String::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start + 1];
            seen[start] = true;
            let mut i = self.images[start];
            while i != start {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i];
            }
            out.push('(');
            out.push_str(
                &cycle
                    .iter()
                    .map(|p| p.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycles())
    }
}

/// All elements of the group generated by `gens`, sorted. Fails past `limit` elements.
pub fn generate_group(degree: usize, gens: &[Perm], limit: usize) -> Result<Vec<Perm>, PermError> {
    let mut seen: BTreeSet<Perm> = BTreeSet::new();
    let mut queue = VecDeque::new();
    let id = Perm::identity(degree);
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = p.then(g);
            if seen.insert(q.clone()) {
                if seen.len() > limit {
                    return Err(PermError::TooLarge(limit));
                }
                queue.push_back(q);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// A small generating set of `group`, picked greedily in sorted order.
pub fn generators_of(degree: usize, group: &[Perm]) -> Vec<Perm> {
    let mut gens: Vec<Perm> = Vec::new();
    let mut span: BTreeSet<Perm> = BTreeSet::new();
    span.insert(Perm::identity(degree));
    for p in group {
        if span.contains(p) {
            continue;
        }
        gens.push(p.clone());
        span = generate_group(degree, &gens, usize::MAX)
            .expect("unbounded")
            .into_iter()
            .collect();
    }
    gens
}

/// Every permutation of `0..n` in lexicographic order of image vectors.
pub fn all_permutations(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(Perm {
            images: current.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}
