//! Finite topological spaces with explicit open-set families, and verified
//! homeomorphisms between them.
//!
//! Spaces here are small (at most a handful of points), so the topology is
//! stored as the full family of open sets and every check is exhaustive.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::TopologyError;

/// Cap for brute-force homeomorphism search.
pub const HOMEO_SEARCH_CAP: usize = 8;

/// Stable, serializable point identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub String);

impl PointId {
    pub fn new(s: impl Into<String>) -> Self {
        PointId(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Open sets are index sets into the point list.
pub type OpenSet = BTreeSet<usize>;

/// A finite topological space with its opens stored explicitly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopSpace {
    points: Vec<PointId>,
    opens: BTreeSet<OpenSet>,
}

impl TopSpace {
    /// Build a space, completing the family with ∅ and the full set and
    /// closing it under union and intersection.
    pub fn new(points: Vec<PointId>, opens: impl IntoIterator<Item = OpenSet>) -> TopSpace {
        let n = points.len();
        let mut family: BTreeSet<OpenSet> = opens.into_iter().collect();
        family.insert(OpenSet::new());
        family.insert((0..n).collect());
        let family = close_family(family);
        TopSpace {
            points,
            opens: family,
        }
    }

    /// The discrete topology.
    pub fn discrete(points: Vec<PointId>) -> TopSpace {
        let n = points.len();
        let mut family = BTreeSet::new();
        for mask in 0..(1u32 << n) {
            let s: OpenSet = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            family.insert(s);
        }
        TopSpace {
            points,
            opens: family,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn point_index(&self, p: &PointId) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    pub fn opens(&self) -> &BTreeSet<OpenSet> {
        &self.opens
    }

    pub fn full(&self) -> OpenSet {
        (0..self.len()).collect()
    }

    pub fn is_open(&self, s: &OpenSet) -> bool {
        self.opens.contains(s)
    }

    pub fn is_discrete(&self) -> bool {
        (0..self.len()).all(|i| self.opens.contains(&OpenSet::from([i])))
    }

    /// The subspace on a subset of points, with the induced topology.
    /// Points keep their identities; indices are renumbered.
    pub fn subspace(&self, subset: &OpenSet) -> TopSpace {
        let points: Vec<PointId> = subset.iter().map(|&i| self.points[i].clone()).collect();
        let reindex: std::collections::BTreeMap<usize, usize> = subset
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let opens: BTreeSet<OpenSet> = self
            .opens
            .iter()
            .map(|o| {
                o.iter()
                    .filter(|i| subset.contains(i))
                    .map(|i| reindex[i])
                    .collect()
            })
            .collect();
        TopSpace { points, opens }
    }
}

fn close_family(mut family: BTreeSet<OpenSet>) -> BTreeSet<OpenSet> {
    loop {
        let mut next = family.clone();
        for a in &family {
            for b in &family {
                next.insert(a.union(b).copied().collect());
                next.insert(a.intersection(b).copied().collect());
            }
        }
        if next == family {
            return family;
        }
        family = next;
    }
}

/// A verified homeomorphism between two finite spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homeo {
    pub domain: TopSpace,
    pub codomain: TopSpace,
    /// forward[i] = index in the codomain of the image of point i.
    pub forward: Vec<usize>,
    pub inverse: Vec<usize>,
}

impl Homeo {
    /// Verify bijectivity and that images of opens are open, both directions.
    pub fn new(domain: TopSpace, codomain: TopSpace, forward: Vec<usize>) -> Result<Homeo, TopologyError> {
        let n = domain.len();
        if codomain.len() != n || forward.len() != n {
            return Err(TopologyError::NotHomeomorphism {
                reason: format!("point counts differ: {} vs {}", n, codomain.len()),
            });
        }
        let mut inverse = vec![usize::MAX; n];
        for (i, &j) in forward.iter().enumerate() {
            if j >= n || inverse[j] != usize::MAX {
                return Err(TopologyError::NotHomeomorphism {
                    reason: "not a bijection".into(),
                });
            }
            inverse[j] = i;
        }
        for o in domain.opens() {
            let img: OpenSet = o.iter().map(|&i| forward[i]).collect();
            if !codomain.is_open(&img) {
                return Err(TopologyError::NotHomeomorphism {
                    reason: format!("image of an open is not open: {o:?}"),
                });
            }
        }
        for o in codomain.opens() {
            let img: OpenSet = o.iter().map(|&j| inverse[j]).collect();
            if !domain.is_open(&img) {
                return Err(TopologyError::NotHomeomorphism {
                    reason: format!("preimage of an open is not open: {o:?}"),
                });
            }
        }
        Ok(Homeo {
            domain,
            codomain,
            forward,
            inverse,
        })
    }

    pub fn identity(space: &TopSpace) -> Homeo {
        let n = space.len();
        Homeo {
            domain: space.clone(),
            codomain: space.clone(),
            forward: (0..n).collect(),
            inverse: (0..n).collect(),
        }
    }

    pub fn inverted(&self) -> Homeo {
        Homeo {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// other ∘ self.
    pub fn compose(&self, other: &Homeo) -> Result<Homeo, TopologyError> {
        if self.codomain != other.domain {
            return Err(TopologyError::NotHomeomorphism {
                reason: "composition domain mismatch".into(),
            });
        }
        let forward: Vec<usize> = self.forward.iter().map(|&j| other.forward[j]).collect();
        Homeo::new(self.domain.clone(), other.codomain.clone(), forward)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.forward[i]
    }
}

/// Exhaustive bijection search for a homeomorphism; spaces of at most
/// [`HOMEO_SEARCH_CAP`] points.
pub fn is_homeomorphic_bruteforce(
    x: &TopSpace,
    y: &TopSpace,
) -> Result<Option<Homeo>, TopologyError> {
    if x.len() > HOMEO_SEARCH_CAP || y.len() > HOMEO_SEARCH_CAP {
        return Err(TopologyError::TooLarge {
            size: x.len().max(y.len()),
            cap: HOMEO_SEARCH_CAP,
        });
    }
    if x.len() != y.len() {
        return Ok(None);
    }
    let n = x.len();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        if let Ok(h) = Homeo::new(x.clone(), y.clone(), perm.clone()) {
            return Ok(Some(h));
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Tagged disjoint union; opens are the unions of one open per summand.
pub fn disjoint_union(spaces: &[(String, &TopSpace)]) -> TopSpace {
    assert!(!spaces.is_empty(), "disjoint union of an empty list");
    let mut points = Vec::new();
    let mut offsets = Vec::new();
    for (tag, s) in spaces {
        offsets.push(points.len());
        for p in s.points() {
            points.push(PointId::new(format!("{tag}:{p}")));
        }
    }
    // opens: all combinations of one open from each summand
    let mut opens: Vec<OpenSet> = vec![OpenSet::new()];
    for (k, (_, s)) in spaces.iter().enumerate() {
        let mut next = Vec::new();
        for base in &opens {
            for o in s.opens() {
                let mut u = base.clone();
                u.extend(o.iter().map(|&i| i + offsets[k]));
                next.push(u);
            }
        }
        opens = next;
    }
    TopSpace {
        points,
        opens: opens.into_iter().collect(),
    }
}

/// The Sierpiński space on two named points, with {first} the only proper open.
pub fn sierpinski(open_point: impl Into<String>, closed_point: impl Into<String>) -> TopSpace {
    TopSpace::new(
        vec![PointId::new(open_point), PointId::new(closed_point)],
        [OpenSet::from([0])],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(names: &[&str]) -> Vec<PointId> {
        names.iter().map(|n| PointId::new(*n)).collect()
    }

    #[test]
    fn opens_contain_empty_and_full_and_close() {
        let s = TopSpace::new(pts(&["a", "b", "c"]), [OpenSet::from([0]), OpenSet::from([1])]);
        assert!(s.is_open(&OpenSet::new()));
        assert!(s.is_open(&s.full()));
        assert!(s.is_open(&OpenSet::from([0, 1])), "closed under union");
    }

    #[test]
    fn discrete_two_point_vs_sierpinski_not_homeomorphic() {
        // 2 bijections, each fails openness
        let d = TopSpace::discrete(pts(&["a", "b"]));
        let s = sierpinski("a", "b");
        assert!(is_homeomorphic_bruteforce(&d, &s).unwrap().is_none());
    }

    #[test]
    fn discrete_two_point_self_homeomorphic() {
        let d = TopSpace::discrete(pts(&["a", "b"]));
        let h = is_homeomorphic_bruteforce(&d, &d).unwrap().unwrap();
        assert_eq!(h.forward, vec![0, 1], "identity found first");
    }

    #[test]
    fn subspace_topology() {
        let s = sierpinski("a", "b");
        let sub = s.subspace(&OpenSet::from([1]));
        assert_eq!(sub.len(), 1);
        assert!(sub.is_discrete());
    }

    #[test]
    fn disjoint_union_of_singletons_is_discrete() {
        let one = TopSpace::discrete(pts(&["x"]));
        let u = disjoint_union(&[("t0".into(), &one), ("t1".into(), &one)]);
        assert_eq!(u.len(), 2);
        assert!(u.is_discrete());
    }

    #[test]
    fn union_of_sierpinski_keeps_non_discreteness() {
        let s = sierpinski("a", "b");
        let one = TopSpace::discrete(pts(&["x"]));
        let u = disjoint_union(&[("s".into(), &s), ("p".into(), &one)]);
        assert_eq!(u.len(), 3);
        assert!(!u.is_discrete());
    }

    #[test]
    fn homeo_verifies_openness_both_ways() {
        let s = sierpinski("a", "b");
        let t = TopSpace::new(pts(&["u", "v"]), [OpenSet::from([1])]);
        // a ↦ v (open to open) works; a ↦ u fails
        assert!(Homeo::new(s.clone(), t.clone(), vec![1, 0]).is_ok());
        assert!(Homeo::new(s, t, vec![0, 1]).is_err());
    }
}
