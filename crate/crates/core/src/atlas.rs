//! Affine charts and atlases on a topological space.
//!
//! An atlas is validated against three conditions: every chart ring belongs
//! to the pseudogroup and the chart map is a homeomorphism onto its spectrum;
//! the chart opens cover the space (and form a base of its topology); and
//! through every point of every overlap there is a sub-chart whose induced
//! localization isomorphism lies in the pseudogroup. Violations are data, not
//! errors.
//!
//! Maximal atlases are never materialized: a [`StructureHandle`] denotes the
//! unique complete atlas determined by a validated base, and equality of the
//! determined structures is decided by the compatibility predicate.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::AtlasError;
use crate::pseudogroup::Pseudogroup;
use crate::ring::{Ring, RingElement, RingId, RingPool};
use crate::spectrum::{
    distinguished_open, least_element_cutting, localization_spec_homeo, spec, spec_functor,
    SpecSpace,
};
use crate::topology::{Homeo, OpenSet, PointId, TopSpace};

/// An affine chart: an open set with a homeomorphism onto the spectrum of a
/// named ring.
#[derive(Debug, Clone)]
pub struct AffineChart {
    pub open_set: OpenSet,
    pub ring: RingId,
    /// Homeomorphism from the subspace on `open_set` onto spec(ring).
    pub phi: Homeo,
}

impl PartialEq for AffineChart {
    fn eq(&self, other: &Self) -> bool {
        self.open_set == other.open_set
            && self.ring == other.ring
            && self.phi.forward == other.phi.forward
    }
}
impl Eq for AffineChart {}

impl AffineChart {
    /// Build and verify a chart from the point map `forward` (indexed by the
    /// position of each point inside the sorted open set).
    pub fn new(
        space: &TopSpace,
        open_set: OpenSet,
        ring: &Arc<Ring>,
        forward: Vec<usize>,
    ) -> Result<AffineChart, AtlasError> {
        let sub = space.subspace(&open_set);
        let sp = spec(ring).map_err(|e| AtlasError::InvalidAtlas {
            reason: e.to_string(),
        })?;
        let phi = Homeo::new(sub, sp.space.clone(), forward).map_err(|e| {
            AtlasError::InvalidAtlas {
                reason: e.to_string(),
            }
        })?;
        Ok(AffineChart {
            open_set,
            ring: ring.id().clone(),
            phi,
        })
    }

    /// Index of an ambient point inside the chart's subspace ordering.
    pub fn local_index(&self, x: usize) -> Option<usize> {
        self.open_set.iter().position(|&i| i == x)
    }

    /// The spectrum point index the chart assigns to an ambient point.
    pub fn spec_index(&self, x: usize) -> Option<usize> {
        self.local_index(x).map(|l| self.phi.forward[l])
    }
}

/// An atlas: charts on a space together with the pseudogroup they live over.
#[derive(Debug, Clone)]
pub struct AtlasData {
    pub space: TopSpace,
    pub charts: Vec<AffineChart>,
    pub gamma: Pseudogroup,
}

/// Denotes the unique complete atlas determined by a validated base.
#[derive(Debug, Clone)]
pub struct StructureHandle {
    pub base: AtlasData,
}

/// Machine-readable violation codes for atlas validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    RingNotInGamma,
    OpenNotOpen,
    PhiNotHomeo,
    NotCovering,
    BaseConditionFailed,
    OverlapWitnessMissing,
}

impl ViolationCode {
    pub fn label(&self) -> &'static str {
        match self {
            ViolationCode::RingNotInGamma => "ring-not-in-gamma",
            ViolationCode::OpenNotOpen => "open-not-open",
            ViolationCode::PhiNotHomeo => "phi-not-homeo",
            ViolationCode::NotCovering => "not-covering",
            ViolationCode::BaseConditionFailed => "base-condition-failed",
            ViolationCode::OverlapWitnessMissing => "overlap-witness-missing",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub code: ViolationCode,
    pub chart: Option<usize>,
    pub other_chart: Option<usize>,
    pub point: Option<PointId>,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Spec computations memoized per ring id for one validation run.
pub struct SpecCache {
    specs: HashMap<RingId, SpecSpace>,
}

impl SpecCache {
    pub fn new() -> Self {
        SpecCache {
            specs: HashMap::new(),
        }
    }

    pub fn spec_of(&mut self, ring: &Arc<Ring>) -> Result<&SpecSpace, AtlasError> {
        if !self.specs.contains_key(ring.id()) {
            let s = spec(ring).map_err(|e| AtlasError::InvalidAtlas {
                reason: e.to_string(),
            })?;
            self.specs.insert(ring.id().clone(), s);
        }
        Ok(&self.specs[ring.id()])
    }
}

impl Default for SpecCache {
    fn default() -> Self {
        Self::new()
    }
}

/// The localization of a chart ring over a sub-open of the chart, with the
/// correspondence between ambient points and primes of the localization.
pub struct LocalizedChart {
    pub loc_ring: Arc<Ring>,
    pub loc_spec: SpecSpace,
    pub cutting_element: RingElement,
    /// ambient point index → prime index in `loc_spec`
    pub point_to_prime: BTreeMap<usize, usize>,
}

/// Localize a chart over a sub-open W of its open set.
pub fn localize_chart(
    chart: &AffineChart,
    ring: &Arc<Ring>,
    ring_spec: &SpecSpace,
    w: &OpenSet,
) -> Result<LocalizedChart, AtlasError> {
    let image: OpenSet = w
        .iter()
        .map(|&x| {
            chart.spec_index(x).ok_or(AtlasError::InvalidAtlas {
                reason: format!("point {x} outside chart"),
            })
        })
        .collect::<Result<_, _>>()?;
    let f = least_element_cutting(ring, ring_spec, &image).ok_or_else(|| {
        AtlasError::InvalidAtlas {
            reason: format!("no element of `{}` cuts the open {:?}", ring.id(), image),
        }
    })?;
    let (loc_ring, loc_hom) =
        crate::ring::localize(ring, &f).map_err(|e| AtlasError::InvalidAtlas {
            reason: e.to_string(),
        })?;
    let loc_spec = spec(&loc_ring).map_err(|e| AtlasError::InvalidAtlas {
        reason: e.to_string(),
    })?;
    let (d_set, h) =
        localization_spec_homeo(ring, ring_spec, &loc_ring, &loc_hom, &loc_spec).map_err(|e| {
            AtlasError::InvalidAtlas {
                reason: e.to_string(),
            }
        })?;
    debug_assert_eq!(d_set, image, "localization cuts exactly the target open");
    let order: Vec<usize> = d_set.iter().copied().collect();
    let mut point_to_prime = BTreeMap::new();
    for &x in w {
        let p = chart.spec_index(x).unwrap();
        let sub_idx = order.iter().position(|&q| q == p).unwrap();
        point_to_prime.insert(x, h.inverse[sub_idx]);
    }
    Ok(LocalizedChart {
        loc_ring,
        loc_spec,
        cutting_element: f,
        point_to_prime,
    })
}

/// Does gamma contain an iso from the localized ring of `cj` over W onto the
/// localized ring of `ci` over W whose induced point map matches the chart
/// transition on W?
fn overlap_iso_in_gamma(
    li: &LocalizedChart,
    lj: &LocalizedChart,
    w: &OpenSet,
    gamma: &Pseudogroup,
) -> bool {
    let candidates = gamma.isos_between(lj.loc_ring.id(), li.loc_ring.id());
    'cand: for iso in candidates {
        // the induced homeomorphism spec(L_i) → spec(L_j) must carry the
        // prime of each ambient point to the prime of the same point
        let Ok(h) = spec_functor(&lj.loc_ring, &li.loc_ring, iso, &lj.loc_spec, &li.loc_spec)
        else {
            continue;
        };
        for &x in w {
            let pi = li.point_to_prime[&x];
            let pj = lj.point_to_prime[&x];
            if h.forward[pi] != pj {
                continue 'cand;
            }
        }
        return true;
    }
    false
}

/// Cond-3 style witness search: through the point x of the overlap of charts
/// `ci` and `cj`, find a candidate chart W with x ∈ W ⊆ U_i ∩ U_j whose
/// induced localization iso lies in gamma. Returns the candidate index.
fn witness_through_point(
    ci: &AffineChart,
    cj: &AffineChart,
    x: usize,
    candidates: &[&AffineChart],
    gamma: &Pseudogroup,
    cache: &mut SpecCache,
) -> Result<Option<usize>, AtlasError> {
    let overlap: OpenSet = ci.open_set.intersection(&cj.open_set).copied().collect();
    for (idx, w_chart) in candidates.iter().enumerate() {
        if !w_chart.open_set.contains(&x) || !w_chart.open_set.is_subset(&overlap) {
            continue;
        }
        let ring_i = match gamma.pool.get(&ci.ring) {
            Ok(r) => r.clone(),
            Err(_) => continue,
        };
        let ring_j = match gamma.pool.get(&cj.ring) {
            Ok(r) => r.clone(),
            Err(_) => continue,
        };
        let spec_i = cache.spec_of(&ring_i)?.clone();
        let spec_j = cache.spec_of(&ring_j)?.clone();
        let li = localize_chart(ci, &ring_i, &spec_i, &w_chart.open_set)?;
        let lj = localize_chart(cj, &ring_j, &spec_j, &w_chart.open_set)?;
        if overlap_iso_in_gamma(&li, &lj, &w_chart.open_set, gamma) {
            return Ok(Some(idx));
        }
    }
    Ok(None)
}

/// Validate an atlas against the chart, covering/base, and overlap conditions.
pub fn validate_atlas(data: &AtlasData) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut cache = SpecCache::new();
    // condition 1: rings in gamma, opens open, phi onto the right spectrum
    for (i, chart) in data.charts.iter().enumerate() {
        if !data.gamma.contains_ring(&chart.ring) {
            report.violations.push(Violation {
                code: ViolationCode::RingNotInGamma,
                chart: Some(i),
                other_chart: None,
                point: None,
                detail: format!("chart ring `{}` not in the pseudogroup", chart.ring),
            });
        }
        if !data.space.is_open(&chart.open_set) {
            report.violations.push(Violation {
                code: ViolationCode::OpenNotOpen,
                chart: Some(i),
                other_chart: None,
                point: None,
                detail: format!("chart open {:?} is not open", chart.open_set),
            });
        }
        let expected_domain = data.space.subspace(&chart.open_set);
        let phi_ok = chart.phi.domain == expected_domain
            && match data.gamma.pool.get(&chart.ring) {
                Ok(ring) => match cache.spec_of(ring) {
                    Ok(sp) => {
                        chart.phi.codomain == sp.space
                            && Homeo::new(
                                chart.phi.domain.clone(),
                                chart.phi.codomain.clone(),
                                chart.phi.forward.clone(),
                            )
                            .is_ok()
                    }
                    Err(_) => false,
                },
                // ring unknown to gamma: verify the homeo shape alone
                Err(_) => Homeo::new(
                    chart.phi.domain.clone(),
                    chart.phi.codomain.clone(),
                    chart.phi.forward.clone(),
                )
                .is_ok(),
            };
        if !phi_ok {
            report.violations.push(Violation {
                code: ViolationCode::PhiNotHomeo,
                chart: Some(i),
                other_chart: None,
                point: None,
                detail: format!(
                    "chart {i} map is not a homeomorphism onto spec({})",
                    chart.ring
                ),
            });
        }
    }
    // condition 2: covering
    let mut covered = OpenSet::new();
    for chart in &data.charts {
        covered.extend(chart.open_set.iter().copied());
    }
    if covered != data.space.full() {
        let missing = data.space.full().difference(&covered).next().copied();
        report.violations.push(Violation {
            code: ViolationCode::NotCovering,
            chart: None,
            other_chart: None,
            point: missing.map(|i| data.space.points()[i].clone()),
            detail: "chart opens do not cover the space".into(),
        });
    }
    // base condition, completion reading: the determined complete atlas
    // contains every distinguished sub-chart, so the transported
    // distinguished opens of the charts must form a base of the topology
    let mut base_opens: Vec<OpenSet> = Vec::new();
    for chart in &data.charts {
        if let Ok(ring) = data.gamma.pool.get(&chart.ring) {
            let ring = ring.clone();
            if let Ok(sp) = cache.spec_of(&ring) {
                let sp = sp.clone();
                for f in ring.elements() {
                    base_opens.push(chart_distinguished_open(chart, &sp, &f));
                }
                if ring.number_field().is_some() {
                    base_opens.push(chart.open_set.clone());
                }
            }
        }
    }
    'opens: for open in data.space.opens() {
        for &x in open {
            let covered_at_x = base_opens
                .iter()
                .any(|o| o.contains(&x) && o.is_subset(open));
            if !covered_at_x {
                report.violations.push(Violation {
                    code: ViolationCode::BaseConditionFailed,
                    chart: None,
                    other_chart: None,
                    point: Some(data.space.points()[x].clone()),
                    detail: format!(
                        "open {open:?} is not a union of transported distinguished opens"
                    ),
                });
                break 'opens;
            }
        }
    }
    if !report.is_ok() {
        // overlap checks assume well-formed charts
        return report;
    }
    // condition 3: per-point overlap witnesses, in canonical chart-index order
    let candidates: Vec<&AffineChart> = data.charts.iter().collect();
    for i in 0..data.charts.len() {
        for j in 0..data.charts.len() {
            if i == j {
                continue;
            }
            let ci = &data.charts[i];
            let cj = &data.charts[j];
            let overlap: OpenSet = ci.open_set.intersection(&cj.open_set).copied().collect();
            for &x in &overlap {
                match witness_through_point(ci, cj, x, &candidates, &data.gamma, &mut cache) {
                    Ok(Some(w_idx)) => {
                        let w = &data.charts[w_idx];
                        // flag witness charts whose own map disagrees with
                        // both restrictions while sharing a ring with the pair
                        let mut agrees_somewhere = false;
                        for c in [ci, cj] {
                            if w.ring == c.ring {
                                let same = w
                                    .open_set
                                    .iter()
                                    .all(|&y| w.spec_index(y) == c.spec_index(y));
                                agrees_somewhere |= same;
                            }
                        }
                        if (w.ring == ci.ring || w.ring == cj.ring) && !agrees_somewhere {
                            report.warnings.push(format!(
                                "witness chart {w_idx} disagrees with both restrictions on the overlap of charts {i} and {j}"
                            ));
                        }
                    }
                    Ok(None) => report.violations.push(Violation {
                        code: ViolationCode::OverlapWitnessMissing,
                        chart: Some(i),
                        other_chart: Some(j),
                        point: Some(data.space.points()[x].clone()),
                        detail: format!(
                            "no sub-chart through `{}` of the overlap of charts {i} and {j} has its induced iso in the pseudogroup",
                            data.space.points()[x]
                        ),
                    }),
                    Err(e) => report.violations.push(Violation {
                        code: ViolationCode::OverlapWitnessMissing,
                        chart: Some(i),
                        other_chart: Some(j),
                        point: Some(data.space.points()[x].clone()),
                        detail: e.to_string(),
                    }),
                }
            }
        }
    }
    report
}

/// A compatibility witness: for the overlap of a chart of `a` and a chart of
/// `b` at a point, the shared chart that mediates.
#[derive(Debug, Clone)]
pub struct CompatWitness {
    pub chart_a: usize,
    pub chart_b: usize,
    pub point: PointId,
    pub shared_chart: usize,
}

#[derive(Debug, Clone)]
pub struct CompatibilityOutcome {
    pub compatible: bool,
    pub witnesses: Vec<CompatWitness>,
    pub failure: Option<Violation>,
}

/// Are two atlases on one space compatible over gamma: for every overlapping
/// cross pair and every point of the intersection, a chart shared by both
/// atlases mediates with its induced iso in gamma.
pub fn compatible(
    a: &AtlasData,
    b: &AtlasData,
    gamma: &Pseudogroup,
) -> Result<CompatibilityOutcome, AtlasError> {
    if a.space != b.space {
        return Err(AtlasError::SpaceMismatch);
    }
    let shared: Vec<&AffineChart> = a
        .charts
        .iter()
        .filter(|c| b.charts.iter().any(|d| d == *c))
        .collect();
    let mut cache = SpecCache::new();
    let mut witnesses = Vec::new();
    for (i, ca) in a.charts.iter().enumerate() {
        for (j, cb) in b.charts.iter().enumerate() {
            let overlap: OpenSet = ca.open_set.intersection(&cb.open_set).copied().collect();
            for &x in &overlap {
                match witness_through_point(ca, cb, x, &shared, gamma, &mut cache)? {
                    Some(w_idx) => witnesses.push(CompatWitness {
                        chart_a: i,
                        chart_b: j,
                        point: a.space.points()[x].clone(),
                        shared_chart: w_idx,
                    }),
                    None => {
                        return Ok(CompatibilityOutcome {
                            compatible: false,
                            witnesses,
                            failure: Some(Violation {
                                code: ViolationCode::OverlapWitnessMissing,
                                chart: Some(i),
                                other_chart: Some(j),
                                point: Some(a.space.points()[x].clone()),
                                detail: format!(
                                    "no shared chart through `{}` inside the overlap has its induced iso in gamma",
                                    a.space.points()[x]
                                ),
                            }),
                        })
                    }
                }
            }
        }
    }
    Ok(CompatibilityOutcome {
        compatible: true,
        witnesses,
        failure: None,
    })
}

/// Decide equality of the complete structures determined by two validated
/// bases over one pseudogroup.
pub fn same_structure(a: &StructureHandle, b: &StructureHandle) -> Result<bool, AtlasError> {
    if a.base.space != b.base.space {
        return Err(AtlasError::SpaceMismatch);
    }
    if !a.base.gamma.same_as(&b.base.gamma) {
        return Err(AtlasError::GammaMismatch);
    }
    Ok(compatible(&a.base, &b.base, &a.base.gamma)?.compatible)
}

/// Cap for chart enumeration.
pub const ENUMERATION_CAP: usize = 8;

/// All charts (U, φ, A) with U a nonempty open of X, A drawn from the given
/// rings, and φ any homeomorphism of U onto spec(A).
pub fn enumerate_charts(
    space: &TopSpace,
    universe: &[Arc<Ring>],
) -> Result<Vec<AffineChart>, AtlasError> {
    if space.len() > ENUMERATION_CAP {
        return Err(AtlasError::TooLarge {
            reason: format!("space has {} points, cap {}", space.len(), ENUMERATION_CAP),
        });
    }
    let mut cache = SpecCache::new();
    let mut out = Vec::new();
    for open in space.opens() {
        if open.is_empty() {
            continue;
        }
        let sub = space.subspace(open);
        for ring in universe {
            let sp = cache.spec_of(ring)?.clone();
            if sp.len() != open.len() {
                continue;
            }
            let n = open.len();
            let mut perm: Vec<usize> = (0..n).collect();
            loop {
                if let Ok(phi) = Homeo::new(sub.clone(), sp.space.clone(), perm.clone()) {
                    out.push(AffineChart {
                        open_set: open.clone(),
                        ring: ring.id().clone(),
                        phi,
                    });
                }
                if !next_perm(&mut perm) {
                    break;
                }
            }
        }
    }
    Ok(out)
}

fn next_perm(p: &mut [usize]) -> bool {
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

/// Would adding this chart keep the atlas valid: every overlap with an
/// existing chart admits a witness among the enlarged chart list.
pub fn chart_compatible_with_atlas(
    chart: &AffineChart,
    atlas: &AtlasData,
) -> Result<bool, AtlasError> {
    if !atlas.gamma.contains_ring(&chart.ring) {
        return Ok(false);
    }
    let mut enlarged: Vec<&AffineChart> = atlas.charts.iter().collect();
    enlarged.push(chart);
    let mut cache = SpecCache::new();
    for existing in &atlas.charts {
        let overlap: OpenSet = chart
            .open_set
            .intersection(&existing.open_set)
            .copied()
            .collect();
        for &x in &overlap {
            for (ci, cj) in [(chart, existing), (existing, chart)] {
                if witness_through_point(ci, cj, x, &enlarged, &atlas.gamma, &mut cache)?.is_none()
                {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Decide whether an open set belongs to the complete structure a handle
/// denotes: some chart on that open, over a ring of the pseudogroup drawn
/// from the candidates, is compatible with the base.
pub fn structure_contains_open(
    handle: &StructureHandle,
    open: &OpenSet,
    candidate_rings: &[Arc<Ring>],
) -> Result<bool, AtlasError> {
    if !handle.base.space.is_open(open) || open.is_empty() {
        return Ok(false);
    }
    let sub = handle.base.space.subspace(open);
    let mut cache = SpecCache::new();
    for ring in candidate_rings {
        if !handle.base.gamma.contains_ring(ring.id()) {
            continue;
        }
        let sp = cache.spec_of(ring)?.clone();
        if sp.len() != open.len() {
            continue;
        }
        let n = open.len();
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            if let Ok(phi) = Homeo::new(sub.clone(), sp.space.clone(), perm.clone()) {
                let chart = AffineChart {
                    open_set: open.clone(),
                    ring: ring.id().clone(),
                    phi,
                };
                if chart_compatible_with_atlas(&chart, &handle.base)? {
                    return Ok(true);
                }
            }
            if !next_perm(&mut perm) {
                break;
            }
        }
    }
    Ok(false)
}

/// The distinct rings a validated atlas mentions, in chart order.
pub fn chart_rings(data: &AtlasData) -> Result<Vec<Arc<Ring>>, AtlasError> {
    let mut pool = RingPool::new();
    let mut out = Vec::new();
    for chart in &data.charts {
        let ring = data
            .gamma
            .pool
            .get(&chart.ring)
            .map_err(|e| AtlasError::InvalidAtlas {
                reason: e.to_string(),
            })?;
        if !pool.contains(ring.id()) {
            pool.insert(ring.clone()).ok();
            out.push(ring.clone());
        }
    }
    Ok(out)
}

/// Image of the distinguished open D(f) of a chart back in the ambient space.
pub fn chart_distinguished_open(
    chart: &AffineChart,
    ring_spec: &SpecSpace,
    f: &RingElement,
) -> OpenSet {
    let d = distinguished_open(ring_spec, f);
    chart
        .open_set
        .iter()
        .filter(|&&x| {
            chart
                .spec_index(x)
                .map(|p| d.contains(&p))
                .unwrap_or(false)
        })
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudogroup::{close, Generators};
    use crate::ring::{make_ring, nf_iso_from_witness, RingPresentation};
    use num::bigint::BigInt;
    use num::rational::BigRational;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn cbrt2_field(id: &str) -> Arc<Ring> {
        make_ring(&RingPresentation::number_field(
            id,
            vec![rat(-2), rat(0), rat(0), rat(1)],
            false,
        ))
        .unwrap()
    }

    fn z6_single_chart_atlas() -> AtlasData {
        let z6 = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let gamma = close(&Generators::from_rings(vec![z6.clone()])).unwrap();
        let sp = spec(&z6).unwrap();
        let space = sp.space.clone();
        let chart = AffineChart::new(&space, space.full(), &z6, vec![0, 1]).unwrap();
        AtlasData {
            space,
            charts: vec![chart],
            gamma,
        }
    }

    #[test]
    fn single_chart_atlas_validates() {
        let atlas = z6_single_chart_atlas();
        let report = validate_atlas(&atlas);
        assert!(report.is_ok(), "violations: {:?}", report.violations);
    }

    #[test]
    fn one_point_space_two_chart_atlas_over_gamma2() {
        // two charts on the same single point, one to spec(k), one to spec(k')
        let k = cbrt2_field("k");
        let kp = cbrt2_field("kprime");
        let gen = k.number_field().unwrap().generator();
        let sigma = nf_iso_from_witness(&k, &kp, gen.clone(), gen).unwrap();
        let gamma2 = close(&Generators {
            rings: vec![k.clone(), kp.clone()],
            isos: vec![sigma],
            ..Default::default()
        })
        .unwrap();
        let space = TopSpace::discrete(vec![PointId::new("x")]);
        let u = AffineChart::new(&space, space.full(), &k, vec![0]).unwrap();
        let v = AffineChart::new(&space, space.full(), &kp, vec![0]).unwrap();
        let atlas = AtlasData {
            space: space.clone(),
            charts: vec![u.clone(), v.clone()],
            gamma: gamma2,
        };
        assert!(validate_atlas(&atlas).is_ok());
        // the same two charts over gamma1 violate the overlap condition
        let gamma1 = close(&Generators::from_rings(vec![k.clone(), kp.clone()])).unwrap();
        let bad = AtlasData {
            space,
            charts: vec![u, v],
            gamma: gamma1,
        };
        let report = validate_atlas(&bad);
        assert!(!report.is_ok());
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::OverlapWitnessMissing));
    }

    #[test]
    fn uncovered_space_fails() {
        let z6 = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let z3 = make_ring(&RingPresentation::zmod("Z3", 3)).unwrap();
        let gamma = close(&Generators::from_rings(vec![z6.clone(), z3.clone()])).unwrap();
        let sp6 = spec(&z6).unwrap();
        let space = sp6.space.clone();
        // one chart on a single point of a two-point space
        let chart = AffineChart::new(&space, OpenSet::from([0]), &z3, vec![0]).unwrap();
        let atlas = AtlasData {
            space,
            charts: vec![chart],
            gamma,
        };
        let report = validate_atlas(&atlas);
        assert!(report
            .violations
            .iter()
            .any(|v| v.code == ViolationCode::NotCovering));
    }

    #[test]
    fn compatible_is_reflexive_on_validated_atlases() {
        let atlas = z6_single_chart_atlas();
        let out = compatible(&atlas, &atlas, &atlas.gamma).unwrap();
        assert!(out.compatible);
    }

    #[test]
    fn disjoint_single_chart_atlases_vacuously_compatible() {
        let z3 = make_ring(&RingPresentation::zmod("Z3", 3)).unwrap();
        let gamma = close(&Generators::from_rings(vec![z3.clone()])).unwrap();
        let space = TopSpace::discrete(vec![PointId::new("a"), PointId::new("b")]);
        let ca = AffineChart::new(&space, OpenSet::from([0]), &z3, vec![0]).unwrap();
        let cb = AffineChart::new(&space, OpenSet::from([1]), &z3, vec![0]).unwrap();
        let a = AtlasData {
            space: space.clone(),
            charts: vec![ca],
            gamma: gamma.clone(),
        };
        let b = AtlasData {
            space,
            charts: vec![cb],
            gamma: gamma.clone(),
        };
        assert!(compatible(&a, &b, &gamma).unwrap().compatible);
    }

    #[test]
    fn example_atlases_share_chart_and_are_compatible() {
        // the one-chart atlas to spec(k) against the two-chart atlas, over
        // the larger pseudogroup, sharing the k-chart
        let k = cbrt2_field("k");
        let kp = cbrt2_field("kprime");
        let gen = k.number_field().unwrap().generator();
        let sigma = nf_iso_from_witness(&k, &kp, gen.clone(), gen).unwrap();
        let gamma2 = close(&Generators {
            rings: vec![k.clone(), kp.clone()],
            isos: vec![sigma],
            ..Default::default()
        })
        .unwrap();
        let space = TopSpace::discrete(vec![PointId::new("x")]);
        let u = AffineChart::new(&space, space.full(), &k, vec![0]).unwrap();
        let v = AffineChart::new(&space, space.full(), &kp, vec![0]).unwrap();
        let a1 = AtlasData {
            space: space.clone(),
            charts: vec![u.clone()],
            gamma: gamma2.clone(),
        };
        let a2 = AtlasData {
            space,
            charts: vec![u, v],
            gamma: gamma2.clone(),
        };
        assert!(compatible(&a1, &a2, &gamma2).unwrap().compatible);
    }

    #[test]
    fn same_structure_requires_matching_gamma() {
        let atlas = z6_single_chart_atlas();
        let h1 = StructureHandle {
            base: atlas.clone(),
        };
        let h2 = StructureHandle { base: atlas };
        assert!(same_structure(&h1, &h2).unwrap());
        let z3 = make_ring(&RingPresentation::zmod("Z3", 3)).unwrap();
        let other_gamma = close(&Generators::from_rings(vec![z3])).unwrap();
        let mut base = h1.base.clone();
        base.gamma = other_gamma;
        let h3 = StructureHandle { base };
        assert!(matches!(
            same_structure(&h1, &h3),
            Err(AtlasError::GammaMismatch)
        ));
    }

    #[test]
    fn subsets_of_one_validated_atlas_same_structure() {
        // a two-chart cover of spec(Z6) by its distinguished opens, compared
        // with the full three-chart atlas
        let z6 = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let gamma = close(&Generators::from_rings(vec![z6.clone()])).unwrap();
        let sp = spec(&z6).unwrap();
        let space = sp.space.clone();
        let l2 = gamma.pool.get(&RingId::new("loc(Z6;4)")).unwrap().clone();
        let l3 = gamma.pool.get(&RingId::new("loc(Z6;3)")).unwrap().clone();
        let two = z6.element(vec![2]).unwrap();
        let three = z6.element(vec![3]).unwrap();
        let d2 = distinguished_open(&sp, &two);
        let d3 = distinguished_open(&sp, &three);
        let c_full = AffineChart::new(&space, space.full(), &z6, vec![0, 1]).unwrap();
        let c2 = AffineChart::new(&space, d2, &l2, vec![0]).unwrap();
        let c3 = AffineChart::new(&space, d3, &l3, vec![0]).unwrap();
        let big = AtlasData {
            space: space.clone(),
            charts: vec![c_full.clone(), c2.clone(), c3.clone()],
            gamma: gamma.clone(),
        };
        let report = validate_atlas(&big);
        assert!(report.is_ok(), "violations: {:?}", report.violations);
        let small = AtlasData {
            space: space.clone(),
            charts: vec![c2, c3],
            gamma: gamma.clone(),
        };
        assert!(validate_atlas(&small).is_ok());
        let ha = StructureHandle { base: big };
        let hb = StructureHandle { base: small };
        assert!(same_structure(&ha, &hb).unwrap());
    }

    #[test]
    fn enumerate_charts_on_one_point_space() {
        let q =
            make_ring(&RingPresentation::number_field("Q", vec![rat(0), rat(1)], false)).unwrap();
        let q2 = make_ring(&RingPresentation::number_field(
            "Qsqrt2",
            vec![rat(-2), rat(0), rat(1)],
            false,
        ))
        .unwrap();
        let space = TopSpace::discrete(vec![PointId::new("x")]);
        let charts = enumerate_charts(&space, &[q, q2]).unwrap();
        assert_eq!(charts.len(), 2);
    }

    #[test]
    fn enumerate_charts_on_sierpinski() {
        // charts only on the open singleton; the full space has no
        // homeomorphism onto a discrete two-point spectrum
        let z3 = make_ring(&RingPresentation::zmod("Z3", 3)).unwrap();
        let z6 = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let space = crate::topology::sierpinski("a", "b");
        let charts = enumerate_charts(&space, &[z3, z6]).unwrap();
        assert_eq!(charts.len(), 1);
        assert_eq!(charts[0].open_set, OpenSet::from([0]));
        assert_eq!(charts[0].ring, RingId::new("Z3"));
    }

    #[test]
    fn enumerate_charts_empty_universe() {
        let space = TopSpace::discrete(vec![PointId::new("x")]);
        assert!(enumerate_charts(&space, &[]).unwrap().is_empty());
    }

    #[test]
    fn base_condition_reads_through_distinguished_opens() {
        // a single full-space chart on a discrete 2-point space: the
        // singleton opens are transported distinguished opens of the chart,
        // so the completed atlas has a base and validation passes
        let p = RingPresentation::product(
            "P",
            vec![
                RingPresentation::zmod("Z3a", 3),
                RingPresentation::zmod("Z3b", 3),
            ],
        );
        let prod = make_ring(&p).unwrap();
        let gamma = close(&Generators::from_rings(vec![prod.clone()])).unwrap();
        let sp = spec(&prod).unwrap();
        let space = sp.space.clone();
        let chart = AffineChart::new(&space, space.full(), &prod, vec![0, 1]).unwrap();
        let atlas = AtlasData {
            space,
            charts: vec![chart],
            gamma,
        };
        let report = validate_atlas(&atlas);
        assert!(report.is_ok(), "violations: {:?}", report.violations);
    }
}
