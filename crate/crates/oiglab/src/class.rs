//! Finite hypothesis classes, their projections, and VC dimension.
//!
//! A class is a set of distinct [`BitVector`] hypotheses over a common
//! indexed domain, held in canonical (lexicographic) order so that every
//! downstream iteration is deterministic. Everything here is immutable
//! after construction and safe to share across threads.

use std::fs;
use std::path::Path;

use crate::bits::{k_subsets, BitVector};
use crate::error::{Error, Result};

/// Soft limit on the domain size for exhaustive routines.
pub const MAX_DOMAIN: usize = 24;
/// Soft limit on the number of hypotheses.
pub const MAX_HYPOTHESES: usize = 1 << 20;

/// A finite set of distinct hypotheses over `domain_size` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedClass {
    domain_size: usize,
    hypotheses: Vec<BitVector>,
}

impl ProjectedClass {
    /// Builds a class from hypotheses, sorting canonically and collapsing
    /// duplicates (classes are sets).
    pub fn new(domain_size: usize, mut hypotheses: Vec<BitVector>) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::Input("domain size must be at least 1".into()));
        }
        if hypotheses.is_empty() {
            return Err(Error::Input("a class must contain a hypothesis".into()));
        }
        for h in &hypotheses {
            if h.len() != domain_size {
                return Err(Error::Input(format!(
                    "hypothesis {h} has length {}, expected {domain_size}",
                    h.len()
                )));
            }
        }
        hypotheses.sort();
        hypotheses.dedup();
        Ok(ProjectedClass {
            domain_size,
            hypotheses,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    /// Hypotheses in canonical lexicographic order.
    pub fn hypotheses(&self) -> &[BitVector] {
        &self.hypotheses
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-emptiness is a construction invariant
    }

    pub fn contains(&self, h: &BitVector) -> bool {
        self.index_of(h).is_some()
    }

    /// Index of a hypothesis in canonical order.
    pub fn index_of(&self, h: &BitVector) -> Option<usize> {
        self.hypotheses.binary_search(h).ok()
    }

    /// Restricts every hypothesis to the positions where `subset` is 1.
    ///
    /// Restrictions that collide are collapsed silently; the projection of a
    /// set is a set.
    pub fn project(&self, subset: &BitVector) -> Result<ProjectedClass> {
        if subset.len() != self.domain_size {
            return Err(Error::Input(format!(
                "subset length {} does not match domain size {}",
                subset.len(),
                self.domain_size
            )));
        }
        let positions: Vec<usize> = subset.iter_ones().collect();
        if positions.is_empty() {
            return Err(Error::Input("cannot project onto the empty subset".into()));
        }
        let mut projected: Vec<BitVector> = self
            .hypotheses
            .iter()
            .map(|h| {
                let mut r = BitVector::zeros(positions.len());
                for (dst, &src) in positions.iter().enumerate() {
                    if h.get(src) {
                        r.set(dst, true);
                    }
                }
                r
            })
            .collect();
        projected.sort();
        projected.dedup();
        Ok(ProjectedClass {
            domain_size: positions.len(),
            hypotheses: projected,
        })
    }

    /// Whether `points` (a subset given as positions) is shattered.
    fn shatters(&self, points: &BitVector) -> bool {
        let k = points.ones_count();
        match self.project(points) {
            Ok(p) => p.len() == 1usize << k,
            Err(_) => false,
        }
    }

    /// Exact VC dimension by exhaustive shattering search.
    ///
    /// Subset sizes are scanned in increasing order; shattering is downward
    /// closed, so the scan stops at the first size with no shattered set.
    pub fn vc_dimension(&self) -> usize {
        let max_size = {
            // |F| >= 2^d, so d <= log2 |F|; also d <= domain size.
            let mut b = 0;
            while (1usize << (b + 1)) <= self.hypotheses.len() {
                b += 1;
            }
            b.min(self.domain_size)
        };
        let mut dim = 0;
        for size in 1..=max_size {
            let mut any = false;
            for candidate in k_subsets(self.domain_size, size) {
                if self.shatters(&candidate) {
                    any = true;
                    break;
                }
            }
            if !any {
                break;
            }
            dim = size;
        }
        dim
    }

    /// The zero function plus the indicator of each single point.
    pub fn indicators(m: usize) -> ProjectedClass {
        assert!(m >= 1);
        let mut hs = vec![BitVector::zeros(m)];
        hs.extend((0..m).map(|p| BitVector::unit(m, p)));
        ProjectedClass::new(m, hs).expect("indicator class is well-formed")
    }

    /// All hypotheses taking the value 1 at most `d` times.
    pub fn bounded_ones(m: usize, d: usize) -> Result<ProjectedClass> {
        if d == 0 || d > m {
            return Err(Error::Input(format!(
                "bounded-ones class requires 1 <= d <= m, got d={d}, m={m}"
            )));
        }
        if m > MAX_DOMAIN {
            return Err(Error::Capacity(format!(
                "bounded-ones enumeration capped at m <= {MAX_DOMAIN}, got {m}"
            )));
        }
        let mut size: usize = 0;
        let mut hs = Vec::new();
        for k in 0..=d {
            size = size.saturating_add(binomial_usize(m, k));
            if size > MAX_HYPOTHESES {
                return Err(Error::Capacity(format!(
                    "bounded-ones class would exceed {MAX_HYPOTHESES} hypotheses"
                )));
            }
            hs.extend(k_subsets(m, k));
        }
        ProjectedClass::new(m, hs)
    }

    /// True when this is exactly the indicator class on its domain.
    pub fn is_indicator_class(&self) -> bool {
        let m = self.domain_size;
        if self.hypotheses.len() != m + 1 {
            return false;
        }
        if self.hypotheses[0].ones_count() != 0 {
            return false;
        }
        // Sorted and distinct, so m singletons cover every position exactly once.
        self.hypotheses[1..].iter().all(|h| h.ones_count() == 1)
    }

    /// Parses the plain-text class file format.
    ///
    /// First data line: `m h`. Then `h` lines of exactly `m` characters from
    /// `{0,1}`; bit `i` of a line is the value on domain point `i`. Lines
    /// starting with `#` are comments.
    pub fn parse_file_text(text: &str) -> Result<ProjectedClass> {
        let mut header: Option<(usize, usize)> = None;
        let mut hypotheses: Vec<BitVector> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match header {
                None => {
                    let mut parts = line.split_whitespace();
                    let m = parts
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse {
                            line: line_no,
                            msg: "expected header \"m h\"".into(),
                        })?;
                    let h = parts
                        .next()
                        .and_then(|s| s.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse {
                            line: line_no,
                            msg: "expected header \"m h\"".into(),
                        })?;
                    if parts.next().is_some() {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "trailing tokens after header".into(),
                        });
                    }
                    if m == 0 || h == 0 {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: "domain size and hypothesis count must be positive".into(),
                        });
                    }
                    if h > MAX_HYPOTHESES {
                        return Err(Error::Capacity(format!(
                            "class files are capped at {MAX_HYPOTHESES} hypotheses"
                        )));
                    }
                    header = Some((m, h));
                }
                Some((m, _)) => {
                    let v = BitVector::parse(line).map_err(|e| Error::Parse {
                        line: line_no,
                        msg: e.to_string(),
                    })?;
                    if v.len() != m {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("hypothesis has {} bits, expected {m}", v.len()),
                        });
                    }
                    if hypotheses.contains(&v) {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("duplicate hypothesis {v}"),
                        });
                    }
                    hypotheses.push(v);
                }
            }
        }
        let (m, h) = header.ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        if hypotheses.len() != h {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {h} hypotheses, found {}", hypotheses.len()),
            });
        }
        ProjectedClass::new(m, hypotheses)
    }

    /// Loads a class from a file, see [`ProjectedClass::parse_file_text`].
    pub fn load_file(path: impl AsRef<Path>) -> Result<ProjectedClass> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        ProjectedClass::parse_file_text(&text)
    }
}

fn binomial_usize(m: usize, k: usize) -> usize {
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    acc.min(usize::MAX as u128) as usize
}

/// The canonical star witnesses on an `m`-point domain: the all-zeros center
/// and one single-point indicator per position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSystem {
    center: BitVector,
    petals: Vec<BitVector>,
}

impl StarSystem {
    pub fn canonical(m: usize) -> StarSystem {
        assert!(m >= 1);
        StarSystem {
            center: BitVector::zeros(m),
            petals: (0..m).map(|p| BitVector::unit(m, p)).collect(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &BitVector {
        &self.center
    }

    pub fn petals(&self) -> &[BitVector] {
        &self.petals
    }
}

/// Whether `class` witnesses the star system: it must contain the center and
/// every petal, each petal differing from the center exactly on its point.
pub fn is_star_system(class: &ProjectedClass, star: &StarSystem) -> bool {
    if star.domain_size() != class.domain_size() {
        return false;
    }
    if !class.contains(star.center()) {
        return false;
    }
    star.petals().iter().enumerate().all(|(i, petal)| {
        class.contains(petal)
            && petal
                .single_difference(star.center())
                .ok()
                .flatten()
                .is_some_and(|p| p == i)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn indicator_strings(class: &ProjectedClass) -> Vec<String> {
        class.hypotheses().iter().map(|h| h.to_string()).collect()
    }

    #[test]
    fn indicator_class_shape() {
        let c = ProjectedClass::indicators(2);
        assert_eq!(indicator_strings(&c), vec!["00", "01", "10"]);
        assert_eq!(ProjectedClass::indicators(4).len(), 5);
    }

    #[test]
    fn vc_dimension_examples() {
        assert_eq!(ProjectedClass::indicators(6).vc_dimension(), 1);
        assert_eq!(ProjectedClass::indicators(8).vc_dimension(), 1);
        let cube: Vec<BitVector> = crate::bits::all_vectors(3).unwrap().collect();
        let full = ProjectedClass::new(3, cube).unwrap();
        assert_eq!(full.vc_dimension(), 3);
        let singleton = ProjectedClass::new(3, vec![BitVector::zeros(3)]).unwrap();
        assert_eq!(singleton.vc_dimension(), 0);
    }

    #[test]
    fn bounded_ones_counts_and_dimension() {
        // m=3, d=1 coincides with the indicator class
        let c = ProjectedClass::bounded_ones(3, 1).unwrap();
        assert_eq!(c, ProjectedClass::indicators(3));
        // 1 + 4 + 6 hypotheses
        assert_eq!(ProjectedClass::bounded_ones(4, 2).unwrap().len(), 11);
        assert_eq!(ProjectedClass::bounded_ones(6, 2).unwrap().vc_dimension(), 2);
        assert!(ProjectedClass::bounded_ones(3, 4).is_err());
    }

    #[test]
    fn bounded_ones_dimension_is_d_exhaustively() {
        for m in 1..=8 {
            for d in 1..=m {
                let c = ProjectedClass::bounded_ones(m, d).unwrap();
                assert_eq!(c.vc_dimension(), d, "m={m} d={d}");
            }
        }
    }

    #[test]
    fn projection_examples() {
        let find4 = ProjectedClass::indicators(4);
        let full = find4.project(&BitVector::parse("1111").unwrap()).unwrap();
        assert_eq!(full, find4);

        let p = find4.project(&BitVector::parse("1110").unwrap()).unwrap();
        assert_eq!(indicator_strings(&p), vec!["000", "001", "010", "100"]);

        let two = ProjectedClass::new(
            3,
            vec![
                BitVector::parse("000").unwrap(),
                BitVector::parse("111").unwrap(),
            ],
        )
        .unwrap();
        let q = two.project(&BitVector::parse("0100").unwrap());
        assert!(q.is_err(), "subset length mismatch is an input error");
        let q = two.project(&BitVector::parse("010").unwrap()).unwrap();
        assert_eq!(indicator_strings(&q), vec!["0", "1"]);
    }

    #[test]
    fn projection_of_empty_subset_fails() {
        let c = ProjectedClass::indicators(3);
        assert!(c.project(&BitVector::zeros(3)).is_err());
    }

    #[test]
    fn projection_monotonicity() {
        let c = ProjectedClass::bounded_ones(6, 2).unwrap();
        for s in crate::bits::all_vectors(6).unwrap() {
            if s.ones_count() == 0 {
                continue;
            }
            let p = c.project(&s).unwrap();
            assert!(p.len() <= c.len());
            assert!(p.vc_dimension() <= c.vc_dimension());
        }
    }

    #[test]
    fn indicator_projection_size_is_k_plus_one() {
        let m = 7;
        let c = ProjectedClass::indicators(m);
        for s in crate::bits::all_vectors(m).unwrap() {
            let k = s.ones_count();
            if k == 0 || k == m {
                continue;
            }
            assert_eq!(c.project(&s).unwrap().len(), k + 1);
        }
    }

    #[test]
    fn star_system_checks() {
        let find4 = ProjectedClass::indicators(4);
        assert!(is_star_system(&find4, &StarSystem::canonical(4)));
        assert!(!is_star_system(&find4, &StarSystem::canonical(3)));

        let bad = ProjectedClass::new(
            3,
            vec![
                BitVector::parse("000").unwrap(),
                BitVector::parse("110").unwrap(),
            ],
        )
        .unwrap();
        assert!(!is_star_system(&bad, &StarSystem::canonical(3)));

        // Bounded-ones classes contain the canonical witnesses too.
        let b = ProjectedClass::bounded_ones(5, 2).unwrap();
        assert!(is_star_system(&b, &StarSystem::canonical(5)));
    }

    #[test]
    fn file_parsing_round_trip_and_errors() {
        let c = ProjectedClass::parse_file_text("3 2\n000\n111\n").unwrap();
        assert_eq!(c.domain_size(), 3);
        assert_eq!(c.len(), 2);

        let commented = ProjectedClass::parse_file_text("# star\n3 2\n# up\n000\n111\n").unwrap();
        assert_eq!(commented, c);

        match ProjectedClass::parse_file_text("3 2\n000\n00\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match ProjectedClass::parse_file_text("3 2\n010\n010\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected duplicate error, got {other:?}"),
        }
        match ProjectedClass::parse_file_text("3 3\n010\n011\n") {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected count mismatch, got {other:?}"),
        }
        assert!(ProjectedClass::parse_file_text("").is_err());
    }

    #[test]
    fn is_indicator_class_detects_only_the_real_thing() {
        assert!(ProjectedClass::indicators(5).is_indicator_class());
        assert!(!ProjectedClass::bounded_ones(5, 2).unwrap().is_indicator_class());
        let missing = ProjectedClass::new(
            3,
            vec![
                BitVector::parse("000").unwrap(),
                BitVector::parse("100").unwrap(),
                BitVector::parse("010").unwrap(),
            ],
        )
        .unwrap();
        assert!(!missing.is_indicator_class());
    }
}
