//! Basis sheaves on finite spaces and the extension construction.
//!
//! An extension of a validated affine structure assigns to every basic open
//! (every nonempty subset of a chart open) a nominal ring: chart opens get
//! their chart ring, everything else the localization of the first chart
//! that contains it. Sections are tied together through stalks: every basic
//! section ring embeds into the product of the stalks over its points, and
//! restriction maps are computed through these embeddings, which makes
//! functoriality structural. Admissibility fails exactly when two charts
//! demand nominally different rings on one open, or when a stalk connector
//! required by an overlapping chart is missing from the pseudogroup.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::atlas::{localize_chart, validate_atlas, AffineChart, SpecCache, StructureHandle};
use crate::error::SheafError;
use crate::pseudogroup::Pseudogroup;
use crate::ring::{iso_search, HomMap, Ring, RingElement, RingHom, RingId, RingIso, RingPool};
use crate::topology::{Homeo, OpenSet, TopSpace};

/// Why an extension could not be built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConflictKind {
    /// Two charts on one open demand nominally different rings.
    DemandConflict,
    /// A chart overlapping a stalk has no connector iso in the pseudogroup.
    ConnectorMissing,
    /// A section ring does not match the product of its stalks.
    SheafConditionFailed,
}

/// Conflict witness for a failed admissibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictReport {
    pub kind: ConflictKind,
    pub open: Vec<String>,
    pub first_chart: Option<usize>,
    pub second_chart: Option<usize>,
    pub first_ring: Option<RingId>,
    pub second_ring: Option<RingId>,
    pub detail: String,
}

impl fmt::Display for ConflictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on open {{{}}}", self.detail, self.open.join(","))
    }
}

/// The section assigned to one basic open.
#[derive(Debug, Clone)]
pub struct SectionData {
    pub ring: RingId,
    /// Index of the chart whose transport realizes the section.
    pub transport_chart: usize,
    /// Ring element index → stalk element index for each point of the open,
    /// points in sorted order. None for number-field sections (single point,
    /// where the section is the stalk).
    pub embedding: Option<Vec<Vec<u16>>>,
}

/// A view of a section on an arbitrary open, basic or derived.
#[derive(Debug, Clone)]
pub struct SectionView {
    pub open: OpenSet,
    pub ring: Arc<Ring>,
    pub embedding: Option<Vec<Vec<u16>>>,
}

/// A scheme: a space with a basis sheaf and the structure it extends.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub space: TopSpace,
    pub declared: StructureHandle,
    /// Canonical order: by size, then lexicographically.
    pub basis: Vec<OpenSet>,
    pub sections: BTreeMap<OpenSet, SectionData>,
    /// Restriction maps for every nested basic pair (U, V), V ⊆ U.
    pub restrictions: BTreeMap<(OpenSet, OpenSet), RingHom>,
    /// Every section ring, stalk, and chart-localization, by id.
    pub pool: RingPool,
    /// (chart index, point) → iso from the chart's localization at the point
    /// onto the stalk.
    pub connectors: BTreeMap<(usize, usize), RingIso>,
}

impl Scheme {
    pub fn stalk(&self, x: usize) -> &SectionData {
        &self.sections[&OpenSet::from([x])]
    }

    pub fn stalk_ring(&self, x: usize) -> &Arc<Ring> {
        self.pool
            .get(&self.stalk(x).ring)
            .expect("stalk ring pooled")
    }

    pub fn section_ring(&self, open: &OpenSet) -> Option<&Arc<Ring>> {
        self.sections
            .get(open)
            .and_then(|s| self.pool.get(&s.ring).ok())
    }

    pub fn is_basic(&self, open: &OpenSet) -> bool {
        self.sections.contains_key(open)
    }

    /// The section over an arbitrary nonempty open: the stored ring on basic
    /// opens, the agreement tuple over the singleton cover otherwise (a plain
    /// product on a discrete space).
    pub fn section_on(&self, open: &OpenSet) -> Result<SectionView, SheafError> {
        if open.is_empty() {
            return Err(SheafError::TooLarge {
                reason: "no section on the empty open".into(),
            });
        }
        if let Some(s) = self.sections.get(open) {
            return Ok(SectionView {
                open: open.clone(),
                ring: self.pool.get(&s.ring)?.clone(),
                embedding: s.embedding.clone(),
            });
        }
        // derived: product of the stalks in point order
        let stalks: Vec<Arc<Ring>> = open.iter().map(|&x| self.stalk_ring(x).clone()).collect();
        if stalks.iter().any(|r| !r.is_finite()) {
            return Err(SheafError::UniverseEscape {
                reason: "derived section over a number-field stalk is not representable".into(),
            });
        }
        let ids: Vec<String> = stalks.iter().map(|r| r.id().to_string()).collect();
        let id = RingId::new(format!("prod({})", ids.join("|")));
        let ring = product_of_rings(id, &stalks)?;
        // embedding: coordinates split per factor
        let fins: Vec<&crate::ring::FiniteRing> =
            stalks.iter().map(|r| r.finite().unwrap()).collect();
        let arities: Vec<usize> = fins.iter().map(|f| f.elems[0].len()).collect();
        let rf = ring.finite().unwrap();
        let mut embedding = Vec::with_capacity(rf.size());
        for coords in &rf.elems {
            let mut row = Vec::with_capacity(fins.len());
            let mut pos = 0;
            for (k, f) in fins.iter().enumerate() {
                let part = coords[pos..pos + arities[k]].to_vec();
                row.push(f.idx(&part).expect("product coordinate in factor"));
                pos += arities[k];
            }
            embedding.push(row);
        }
        Ok(SectionView {
            open: open.clone(),
            ring,
            embedding: Some(embedding),
        })
    }

    /// The restriction map between any nested nonempty opens.
    pub fn restriction_between(&self, u: &OpenSet, v: &OpenSet) -> Result<RingHom, SheafError> {
        debug_assert!(v.is_subset(u));
        if let Some(h) = self.restrictions.get(&(u.clone(), v.clone())) {
            return Ok(h.clone());
        }
        let su = self.section_on(u)?;
        let sv = self.section_on(v)?;
        restriction_from_embeddings(&su, &sv)
    }

    /// The prime of the section ring over `open` that corresponds to an
    /// ambient point: the elements whose stalk value at the point is not a
    /// unit.
    pub fn point_prime(&self, view: &SectionView, x: usize) -> Result<usize, SheafError> {
        let sp = crate::spectrum::spec(&view.ring)?;
        let Some(fin) = view.ring.finite() else {
            // number-field section: the single zero-ideal point
            return Ok(0);
        };
        let emb = view
            .embedding
            .as_ref()
            .ok_or_else(|| SheafError::TooLarge {
                reason: "missing embedding".into(),
            })?;
        let pos = view
            .open
            .iter()
            .position(|&y| y == x)
            .ok_or_else(|| SheafError::TooLarge {
                reason: "point outside the open".into(),
            })?;
        let stalk = self.stalk_ring(x);
        let mut ideal: BTreeSet<Vec<u64>> = BTreeSet::new();
        for (i, coords) in fin.elems.iter().enumerate() {
            let sidx = emb[i][pos];
            let sval = RingElement::finite(
                stalk.id().clone(),
                stalk.finite().unwrap().elems[sidx as usize].clone(),
            );
            if !stalk.is_unit(&sval) {
                ideal.insert(coords.clone());
            }
        }
        sp.index_of_ideal(&ideal)
            .ok_or_else(|| SheafError::SectionIsoMissing {
                reason: format!(
                    "non-units over point do not form a prime of `{}`",
                    view.ring.id()
                ),
            })
    }
}

/// Product of already-built finite rings, with concatenated coordinates.
pub fn product_of_rings(id: RingId, parts: &[Arc<Ring>]) -> Result<Arc<Ring>, SheafError> {
    use crate::ring::{FiniteRing, RingCtor, RingData, RingPresentation, SIZE_CAP};
    for r in parts {
        if !r.is_finite() {
            return Err(SheafError::UniverseEscape {
                reason: "product parts must be finite".into(),
            });
        }
    }
    let total: usize = parts.iter().map(|r| r.size().unwrap()).product();
    if total > SIZE_CAP {
        return Err(SheafError::UniverseEscape {
            reason: format!("derived product has {total} elements, above {SIZE_CAP}"),
        });
    }
    let fins: Vec<&FiniteRing> = parts.iter().map(|r| r.finite().unwrap()).collect();
    let mut elems: Vec<Vec<u64>> = vec![vec![]];
    for f in &fins {
        let mut next = Vec::with_capacity(elems.len() * f.size());
        for prefix in &elems {
            for e in &f.elems {
                let mut c = prefix.clone();
                c.extend_from_slice(e);
                next.push(c);
            }
        }
        elems = next;
    }
    let arities: Vec<usize> = fins.iter().map(|f| f.elems[0].len()).collect();
    let split = |c: &Vec<u64>| -> Vec<Vec<u64>> {
        let mut out = Vec::with_capacity(arities.len());
        let mut pos = 0;
        for &a in &arities {
            out.push(c[pos..pos + a].to_vec());
            pos += a;
        }
        out
    };
    let add_op = |a: &Vec<u64>, b: &Vec<u64>| -> Vec<u64> {
        let (xa, xb) = (split(a), split(b));
        let mut out = Vec::new();
        for (k, part) in parts.iter().enumerate() {
            let f = part.finite().unwrap();
            let i = f.idx(&xa[k]).unwrap();
            let j = f.idx(&xb[k]).unwrap();
            out.extend_from_slice(&f.elems[f.add_idx(i, j) as usize]);
        }
        out
    };
    let mul_op = |a: &Vec<u64>, b: &Vec<u64>| -> Vec<u64> {
        let (xa, xb) = (split(a), split(b));
        let mut out = Vec::new();
        for (k, part) in parts.iter().enumerate() {
            let f = part.finite().unwrap();
            let i = f.idx(&xa[k]).unwrap();
            let j = f.idx(&xb[k]).unwrap();
            out.extend_from_slice(&f.elems[f.mul_idx(i, j) as usize]);
        }
        out
    };
    let zero: Vec<u64> = fins
        .iter()
        .flat_map(|f| f.elems[f.zero as usize].clone())
        .collect();
    let one: Vec<u64> = fins
        .iter()
        .flat_map(|f| f.elems[f.one as usize].clone())
        .collect();
    let fin = FiniteRing::from_ops(elems, add_op, mul_op, zero, one);
    let pres = RingPresentation {
        id: id.clone(),
        ctor: RingCtor::Product {
            parts: parts.iter().map(|r| r.presentation.clone()).collect(),
        },
    };
    Ok(Arc::new(Ring {
        presentation: pres,
        data: RingData::Finite(fin),
        root: id,
    }))
}

/// Compute the restriction map from stalk embeddings: the image of a section
/// is the unique section of the smaller open with the same stalk values.
fn restriction_from_embeddings(su: &SectionView, sv: &SectionView) -> Result<RingHom, SheafError> {
    match (&su.embedding, &sv.embedding) {
        (Some(eu), Some(ev)) => {
            let positions: Vec<usize> = sv
                .open
                .iter()
                .map(|x| su.open.iter().position(|y| y == x).unwrap())
                .collect();
            let lookup: BTreeMap<&Vec<u16>, u16> = ev
                .iter()
                .enumerate()
                .map(|(i, row)| (row, i as u16))
                .collect();
            let mut table = Vec::with_capacity(eu.len());
            for row in eu {
                let projected: Vec<u16> = positions.iter().map(|&p| row[p]).collect();
                let target = lookup.get(&projected).copied().ok_or_else(|| {
                    SheafError::SectionIsoMissing {
                        reason: format!(
                            "no section of `{}` matches the stalk values of a section of `{}`",
                            sv.ring.id(),
                            su.ring.id()
                        ),
                    }
                })?;
                table.push(target);
            }
            Ok(RingHom {
                domain: su.ring.id().clone(),
                codomain: sv.ring.id().clone(),
                map: HomMap::FiniteTable(table),
            })
        }
        // number-field sections live on single points; the only nested open
        // is the open itself
        _ => {
            if su.open == sv.open && su.ring.same_ring(&sv.ring) {
                Ok(RingHom::identity(&su.ring))
            } else {
                Err(SheafError::SectionIsoMissing {
                    reason: "number-field sections restrict only to themselves".into(),
                })
            }
        }
    }
}

fn canonical_basis(charts: &[AffineChart]) -> Vec<OpenSet> {
    let mut set: BTreeSet<OpenSet> = BTreeSet::new();
    for chart in charts {
        let pts: Vec<usize> = chart.open_set.iter().copied().collect();
        let n = pts.len();
        for mask in 1u32..(1 << n) {
            let v: OpenSet = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pts[i])
                .collect();
            set.insert(v);
        }
    }
    let mut out: Vec<OpenSet> = set.into_iter().collect();
    out.sort_by(|a, b| (a.len(), a.clone()).cmp(&(b.len(), b.clone())));
    out
}

/// Build the extension of a validated structure, charts considered in their
/// declared order.
pub fn build_extension(handle: &StructureHandle) -> Result<Scheme, SheafError> {
    let order: Vec<usize> = (0..handle.base.charts.len()).collect();
    build_extension_ordered(handle, &order)
}

/// Build the extension with an explicit chart precedence, used to exercise
/// extension uniqueness: different precedences may pick different owner
/// charts for the same basic open.
pub fn build_extension_ordered(
    handle: &StructureHandle,
    order: &[usize],
) -> Result<Scheme, SheafError> {
    let atlas = &handle.base;
    let report = validate_atlas(atlas);
    if !report.is_ok() {
        return Err(SheafError::InvalidBase {
            reason: report
                .violations
                .first()
                .map(|v| v.detail.clone())
                .unwrap_or_default(),
        });
    }
    let space = &atlas.space;
    let gamma = &atlas.gamma;
    let mut pool = RingPool::new();
    let mut cache = SpecCache::new();
    let label = |open: &OpenSet| -> Vec<String> {
        open.iter().map(|&x| space.points()[x].to_string()).collect()
    };

    // chart demands: charts with equal opens must agree nominally
    let mut demands: BTreeMap<OpenSet, (usize, RingId)> = BTreeMap::new();
    for &i in order {
        let chart = &atlas.charts[i];
        match demands.get(&chart.open_set) {
            None => {
                demands.insert(chart.open_set.clone(), (i, chart.ring.clone()));
            }
            Some((j, ring)) if ring != &chart.ring => {
                return Err(SheafError::NotAdmissible(ConflictReport {
                    kind: ConflictKind::DemandConflict,
                    open: label(&chart.open_set),
                    first_chart: Some(*j),
                    second_chart: Some(i),
                    first_ring: Some(ring.clone()),
                    second_ring: Some(chart.ring.clone()),
                    detail: format!(
                        "charts {j} and {i} demand nominally different rings `{ring}` and `{}`",
                        chart.ring
                    ),
                }));
            }
            Some(_) => {}
        }
    }

    let basis = canonical_basis(&atlas.charts);
    // section assignment
    let mut sections: BTreeMap<OpenSet, SectionData> = BTreeMap::new();
    for v in &basis {
        let (transport_chart, ring) = match demands.get(v) {
            Some((i, ring_id)) => (*i, gamma.pool.get(ring_id)?.clone()),
            None => {
                let owner = *order
                    .iter()
                    .find(|&&i| v.is_subset(&atlas.charts[i].open_set))
                    .expect("basis opens lie inside chart opens");
                let chart = &atlas.charts[owner];
                let ring = gamma.pool.get(&chart.ring)?.clone();
                let spec = cache.spec_of(&ring)?.clone();
                let lc = localize_chart(chart, &ring, &spec, v)?;
                (owner, lc.loc_ring)
            }
        };
        pool.insert(ring.clone())?;
        sections.insert(
            v.clone(),
            SectionData {
                ring: ring.id().clone(),
                transport_chart,
                embedding: None,
            },
        );
    }

    // stalk connectors: for every chart and every point it contains, an iso
    // from the chart's localization at the point onto the stalk
    let mut connectors: BTreeMap<(usize, usize), RingIso> = BTreeMap::new();
    for (i, chart) in atlas.charts.iter().enumerate() {
        let ring = gamma.pool.get(&chart.ring)?.clone();
        let spec = cache.spec_of(&ring)?.clone();
        for &x in &chart.open_set {
            let lc = localize_chart(chart, &ring, &spec, &OpenSet::from([x]))?;
            pool.insert(lc.loc_ring.clone())?;
            let stalk_id = sections[&OpenSet::from([x])].ring.clone();
            if lc.loc_ring.id() == &stalk_id {
                connectors.insert((i, x), RingIso::identity(&lc.loc_ring));
                continue;
            }
            // both spectra are single points, so any pseudogroup iso matches
            let found = gamma
                .isos_between(lc.loc_ring.id(), &stalk_id)
                .first()
                .cloned()
                .cloned();
            match found {
                Some(iso) => {
                    connectors.insert((i, x), iso);
                }
                None => {
                    return Err(SheafError::NotAdmissible(ConflictReport {
                        kind: ConflictKind::ConnectorMissing,
                        open: label(&OpenSet::from([x])),
                        first_chart: Some(i),
                        second_chart: None,
                        first_ring: Some(lc.loc_ring.id().clone()),
                        second_ring: Some(stalk_id),
                        detail: format!(
                            "no pseudogroup iso connects chart {i} to the stalk at `{}`",
                            space.points()[x]
                        ),
                    }))
                }
            }
        }
    }

    // stalk embeddings for every basic open, through the transport chart
    let mut filled: BTreeMap<OpenSet, SectionData> = BTreeMap::new();
    for v in &basis {
        let data = &sections[v];
        let ring = pool.get(&data.ring)?.clone();
        if ring.number_field().is_some() {
            filled.insert(v.clone(), data.clone());
            continue;
        }
        let chart = &atlas.charts[data.transport_chart];
        let chart_ring = gamma.pool.get(&chart.ring)?.clone();
        let chart_spec = cache.spec_of(&chart_ring)?.clone();
        let fin = ring.finite().unwrap();
        let mut embedding: Vec<Vec<u16>> = vec![Vec::with_capacity(v.len()); fin.size()];
        for &x in v.iter() {
            let lc = localize_chart(chart, &chart_ring, &chart_spec, &OpenSet::from([x]))?;
            let kappa = &connectors[&(data.transport_chart, x)];
            let stalk = pool.get(&sections[&OpenSet::from([x])].ring)?.clone();
            let (_, loc_hom) = crate::ring::localize(&chart_ring, &lc.cutting_element)?;
            for (idx, coords) in fin.elems.iter().enumerate() {
                // section elements are carried by the chart ring's coordinates
                let as_chart_elem = RingElement::finite(chart_ring.id().clone(), coords.clone());
                let cut = loc_hom.apply(&chart_ring, &lc.loc_ring, &as_chart_elem)?;
                let on_stalk = kappa.forward.apply(&lc.loc_ring, &stalk, &cut)?;
                let sidx = stalk
                    .finite()
                    .unwrap()
                    .idx(on_stalk.coords().unwrap())
                    .expect("stalk value in stalk");
                embedding[idx].push(sidx);
            }
        }
        // the sheaf condition: sections are exactly the stalk tuples
        let expected: usize = v
            .iter()
            .map(|&x| {
                pool.get(&sections[&OpenSet::from([x])].ring)
                    .unwrap()
                    .size()
                    .unwrap_or(1)
            })
            .product();
        let mut seen: BTreeSet<&Vec<u16>> = BTreeSet::new();
        for row in &embedding {
            seen.insert(row);
        }
        if seen.len() != fin.size() || fin.size() != expected {
            return Err(SheafError::NotAdmissible(ConflictReport {
                kind: ConflictKind::SheafConditionFailed,
                open: label(v),
                first_chart: Some(data.transport_chart),
                second_chart: None,
                first_ring: Some(ring.id().clone()),
                second_ring: None,
                detail: format!(
                    "section `{}` does not match the product of its stalks ({} vs {expected})",
                    ring.id(),
                    fin.size()
                ),
            }));
        }
        filled.insert(
            v.clone(),
            SectionData {
                ring: data.ring.clone(),
                transport_chart: data.transport_chart,
                embedding: Some(embedding),
            },
        );
    }

    // restriction tables for every nested basic pair
    let mut restrictions: BTreeMap<(OpenSet, OpenSet), RingHom> = BTreeMap::new();
    for u in &basis {
        for v in &basis {
            if !v.is_subset(u) {
                continue;
            }
            let su = SectionView {
                open: u.clone(),
                ring: pool.get(&filled[u].ring)?.clone(),
                embedding: filled[u].embedding.clone(),
            };
            let sv = SectionView {
                open: v.clone(),
                ring: pool.get(&filled[v].ring)?.clone(),
                embedding: filled[v].embedding.clone(),
            };
            restrictions.insert(
                (u.clone(), v.clone()),
                restriction_from_embeddings(&su, &sv)?,
            );
        }
    }

    Ok(Scheme {
        space: space.clone(),
        declared: handle.clone(),
        basis,
        sections: filled,
        restrictions,
        pool,
        connectors,
    })
}

/// A scheme isomorphism: a point map with per-open section isomorphisms.
#[derive(Debug, Clone)]
pub struct SchemeIso {
    pub point_map: Vec<usize>,
    /// Keyed by the domain basic open.
    pub section_isos: BTreeMap<OpenSet, RingIso>,
}

/// A bank of available ring isomorphisms: pseudogroup members, supplied deck
/// witnesses, and brute-force search for finite rings.
#[derive(Debug, Clone, Default)]
pub struct IsoBank {
    pub pool: RingPool,
    isos: Vec<RingIso>,
}

impl IsoBank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_ring(&mut self, ring: Arc<Ring>) {
        self.pool.insert(ring).ok();
    }

    pub fn add_iso(&mut self, iso: RingIso) {
        self.isos.push(iso);
    }

    pub fn add_pseudogroup(&mut self, gamma: &Pseudogroup) {
        for r in gamma.pool.rings() {
            self.pool.insert(r.clone()).ok();
        }
        for e in gamma.isos() {
            self.isos.push(e.iso.clone());
        }
    }

    /// An iso between the named rings: identity if nominally equal, then
    /// recorded isos (including inverses of recorded ones), then brute-force
    /// search for finite rings.
    pub fn find(&self, dom: &Arc<Ring>, cod: &Arc<Ring>) -> Option<RingIso> {
        if dom.same_ring(cod) {
            return Some(RingIso::identity(dom));
        }
        for iso in &self.isos {
            if iso.domain() == dom.id() && iso.range() == cod.id() {
                return Some(iso.clone());
            }
            if iso.range() == dom.id() && iso.domain() == cod.id() {
                return Some(iso.inverted());
            }
        }
        if dom.is_finite() && cod.is_finite() {
            if let Ok(mut found) = iso_search(dom, cod, &[]) {
                if !found.is_empty() {
                    return Some(found.remove(0));
                }
            }
        }
        None
    }
}

/// Assemble and verify a scheme isomorphism over a given point homeomorphism,
/// drawing stalk isomorphisms from the bank.
pub fn scheme_iso_over_map(
    s1: &Scheme,
    s2: &Scheme,
    point_map: &Homeo,
    bank: &IsoBank,
) -> Result<SchemeIso, SheafError> {
    if point_map.domain != s1.space || point_map.codomain != s2.space {
        return Err(SheafError::SectionIsoMissing {
            reason: "point map endpoints do not match the schemes".into(),
        });
    }
    // stalk isos
    let mut stalk_isos: BTreeMap<usize, RingIso> = BTreeMap::new();
    for x in 0..s1.space.len() {
        let t1 = s1.stalk_ring(x).clone();
        let t2 = s2.stalk_ring(point_map.forward[x]).clone();
        let iso = bank
            .find(&t1, &t2)
            .ok_or_else(|| SheafError::SectionIsoMissing {
                reason: format!("no iso between stalks `{}` and `{}`", t1.id(), t2.id()),
            })?;
        stalk_isos.insert(x, iso);
    }
    // per-open isos via embeddings, over both bases
    let mut opens: Vec<OpenSet> = s1.basis.clone();
    for o in s2.basis.iter() {
        let pre: OpenSet = o.iter().map(|&y| point_map.inverse[y]).collect();
        if !opens.contains(&pre) {
            opens.push(pre);
        }
    }
    opens.sort_by(|a, b| (a.len(), a.clone()).cmp(&(b.len(), b.clone())));
    let mut section_isos: BTreeMap<OpenSet, RingIso> = BTreeMap::new();
    for v in &opens {
        let image: OpenSet = v.iter().map(|&x| point_map.forward[x]).collect();
        let sv1 = s1.section_on(v)?;
        let sv2 = s2.section_on(&image)?;
        let iso = section_iso_from_stalks(s1, s2, &sv1, &sv2, v, point_map, &stalk_isos)?;
        section_isos.insert(v.clone(), iso);
    }
    // verify commutation with restrictions on every nested pair
    for u in &opens {
        for v in &opens {
            if !v.is_subset(u) || u == v {
                continue;
            }
            let iu = &section_isos[u];
            let iv = &section_isos[v];
            let im_u: OpenSet = u.iter().map(|&x| point_map.forward[x]).collect();
            let im_v: OpenSet = v.iter().map(|&x| point_map.forward[x]).collect();
            let r1 = s1.restriction_between(u, v)?;
            let r2 = s2.restriction_between(&im_u, &im_v)?;
            let ru1 = s1.section_on(u)?;
            let rv1 = s1.section_on(v)?;
            let ru2 = s2.section_on(&im_u)?;
            let rv2 = s2.section_on(&im_v)?;
            for elem in ru1.ring.elements() {
                let path1 = iv.forward.apply(
                    &rv1.ring,
                    &rv2.ring,
                    &r1.apply(&ru1.ring, &rv1.ring, &elem)?,
                )?;
                let path2 = r2.apply(
                    &ru2.ring,
                    &rv2.ring,
                    &iu.forward.apply(&ru1.ring, &ru2.ring, &elem)?,
                )?;
                if path1 != path2 {
                    return Err(SheafError::SectionIsoMissing {
                        reason: format!(
                            "section isos do not commute with restrictions at {u:?} → {v:?}"
                        ),
                    });
                }
            }
        }
    }
    Ok(SchemeIso {
        point_map: point_map.forward.clone(),
        section_isos,
    })
}

fn section_iso_from_stalks(
    s1: &Scheme,
    s2: &Scheme,
    sv1: &SectionView,
    sv2: &SectionView,
    v: &OpenSet,
    point_map: &Homeo,
    stalk_isos: &BTreeMap<usize, RingIso>,
) -> Result<RingIso, SheafError> {
    match (&sv1.embedding, &sv2.embedding) {
        (Some(e1), Some(e2)) => {
            // transport each stalk tuple through the stalk isos and find the
            // unique matching section on the other side
            let order1: Vec<usize> = v.iter().copied().collect();
            let image: OpenSet = v.iter().map(|&x| point_map.forward[x]).collect();
            let order2: Vec<usize> = image.iter().copied().collect();
            let lookup: BTreeMap<&Vec<u16>, u16> = e2
                .iter()
                .enumerate()
                .map(|(i, row)| (row, i as u16))
                .collect();
            let mut table = Vec::with_capacity(e1.len());
            for row in e1 {
                let mut transported = vec![0u16; row.len()];
                for (pos1, &x) in order1.iter().enumerate() {
                    let iso = &stalk_isos[&x];
                    let t1 = s1.stalk_ring(x);
                    let t2 = s2.stalk_ring(point_map.forward[x]);
                    let val = RingElement::finite(
                        t1.id().clone(),
                        t1.finite().unwrap().elems[row[pos1] as usize].clone(),
                    );
                    let img = iso.forward.apply(t1, t2, &val)?;
                    let pos2 = order2
                        .iter()
                        .position(|&y| y == point_map.forward[x])
                        .unwrap();
                    transported[pos2] = t2
                        .finite()
                        .unwrap()
                        .idx(img.coords().unwrap())
                        .expect("stalk image in stalk");
                }
                let target = lookup.get(&transported).copied().ok_or_else(|| {
                    SheafError::SectionIsoMissing {
                        reason: format!(
                            "transported stalk tuple misses every section of `{}`",
                            sv2.ring.id()
                        ),
                    }
                })?;
                table.push(target);
            }
            let hom = RingHom {
                domain: sv1.ring.id().clone(),
                codomain: sv2.ring.id().clone(),
                map: HomMap::FiniteTable(table),
            };
            crate::ring::hom_to_iso(&sv1.ring, &sv2.ring, hom).map_err(|e| {
                SheafError::SectionIsoMissing {
                    reason: e.to_string(),
                }
            })
        }
        // number-field sections: single point, take the stalk iso directly
        _ => {
            let x = *v.iter().next().unwrap();
            Ok(stalk_isos[&x].clone())
        }
    }
}

/// Verify two schemes extend one structure and produce the section-matching
/// isomorphism over the identity point map.
pub fn extensions_isomorphic(s1: &Scheme, s2: &Scheme) -> Result<SchemeIso, SheafError> {
    match crate::atlas::same_structure(&s1.declared, &s2.declared) {
        Ok(true) => {}
        Ok(false) | Err(_) => return Err(SheafError::NotExtensionsOfSameStructure),
    }
    let mut bank = IsoBank::new();
    bank.add_pseudogroup(&s1.declared.base.gamma);
    bank.add_pseudogroup(&s2.declared.base.gamma);
    let id_map = Homeo::identity(&s1.space);
    scheme_iso_over_map(s1, s2, &id_map, &bank)
}
