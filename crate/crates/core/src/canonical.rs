//! Canonical pseudogroups and canonical affine structures inside a scheme.
//!
//! Every nonempty open of a built scheme is affine at desk scale: its section
//! ring (stored on basic opens, the stalk product otherwise) has a spectrum
//! canonically homeomorphic to the open. Canonical pseudogroups are generated
//! by the identities of the section rings of a selection of affine opens
//! together with every overlap isomorphism the scheme realizes between
//! localizations of those rings; selections are reduced to their ring sets,
//! so the disjoint-union analog produces exactly the generation outcomes the
//! ring sets allow.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::atlas::{
    chart_compatible_with_atlas, validate_atlas, AffineChart, AtlasData, StructureHandle,
};
use crate::error::SheafError;
use crate::pseudogroup::{close, Generators, Pseudogroup};
use crate::ring::{hom_to_iso, HomMap, HomMapKey, Ring, RingHom, RingId, RingIso};
use crate::sheaf::{
    build_extension, scheme_iso_over_map, IsoBank, Scheme, SchemeIso, SectionView,
};
use crate::spectrum::{least_element_cutting, spec};
use crate::topology::{Homeo, OpenSet};

/// How a canonical pseudogroup was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    GeneratedFromSubset,
    Maximal,
}

/// A canonical pseudogroup of a scheme, with its generating selection.
#[derive(Debug, Clone)]
pub struct CanonicalGamma {
    pub flavor: Flavor,
    pub gamma: Pseudogroup,
    pub selection: Vec<OpenSet>,
}

/// All affine opens of the scheme: the nonempty opens whose section ring is
/// representable.
pub fn affine_opens(s: &Scheme) -> Vec<OpenSet> {
    s.space
        .opens()
        .iter()
        .filter(|o| !o.is_empty() && s.section_on(o).is_ok())
        .cloned()
        .collect()
}

/// The canonical chart of an affine open: the homeomorphism sending each
/// point to its prime in the section ring.
pub fn canonical_chart(s: &Scheme, v: &OpenSet) -> Result<AffineChart, SheafError> {
    let view = s.section_on(v)?;
    chart_of_view(s, v, &view)
}

fn chart_of_view(s: &Scheme, v: &OpenSet, view: &SectionView) -> Result<AffineChart, SheafError> {
    let sub = s.space.subspace(v);
    let sp = spec(&view.ring)?;
    let mut forward = Vec::with_capacity(v.len());
    for &x in v {
        forward.push(s.point_prime(view, x)?);
    }
    let phi = Homeo::new(sub, sp.space.clone(), forward).map_err(|e| {
        SheafError::SectionIsoMissing {
            reason: format!("section spectrum does not match the open: {e}"),
        }
    })?;
    Ok(AffineChart {
        open_set: v.clone(),
        ring: view.ring.id().clone(),
        phi,
    })
}

/// The localization of a section view over a smaller open, embedding
/// restricted pointwise.
pub fn localized_view(
    s: &Scheme,
    parent: &SectionView,
    w: &OpenSet,
) -> Result<SectionView, SheafError> {
    debug_assert!(w.is_subset(&parent.open));
    if w == &parent.open {
        return Ok(parent.clone());
    }
    let Some(parent_emb) = &parent.embedding else {
        return Err(SheafError::SectionIsoMissing {
            reason: "number-field sections localize only to themselves".into(),
        });
    };
    let sp = spec(&parent.ring)?;
    let target: OpenSet = w
        .iter()
        .map(|&x| s.point_prime(parent, x))
        .collect::<Result<_, _>>()?;
    let f = least_element_cutting(&parent.ring, &sp, &target).ok_or_else(|| {
        SheafError::SectionIsoMissing {
            reason: format!("no element of `{}` cuts the sub-open", parent.ring.id()),
        }
    })?;
    let (loc, _) = crate::ring::localize(&parent.ring, &f)?;
    let positions: Vec<usize> = w
        .iter()
        .map(|x| parent.open.iter().position(|y| y == x).unwrap())
        .collect();
    let pfin = parent.ring.finite().expect("finite by embedding presence");
    let lfin = loc.finite().unwrap();
    let mut embedding = Vec::with_capacity(lfin.size());
    for coords in &lfin.elems {
        let pidx = pfin.idx(coords).expect("localization inside parent");
        let row: Vec<u16> = positions.iter().map(|&p| parent_emb[pidx as usize][p]).collect();
        embedding.push(row);
    }
    Ok(SectionView {
        open: w.clone(),
        ring: loc,
        embedding: Some(embedding),
    })
}

/// The overlap isomorphism realized by the scheme between the localizations
/// of two affine opens over a shared affine sub-open: sections correspond
/// exactly when they induce the same stalk values.
pub fn overlap_iso(
    s: &Scheme,
    view_a: &SectionView,
    view_b: &SectionView,
    w: &OpenSet,
) -> Result<(SectionView, SectionView, RingIso), SheafError> {
    let la = localized_view(s, view_a, w)?;
    let lb = localized_view(s, view_b, w)?;
    match (&la.embedding, &lb.embedding) {
        (Some(ea), Some(eb)) => {
            let lookup: BTreeMap<&Vec<u16>, u16> = eb
                .iter()
                .enumerate()
                .map(|(i, row)| (row, i as u16))
                .collect();
            let mut table = Vec::with_capacity(ea.len());
            for row in ea {
                let target =
                    lookup
                        .get(row)
                        .copied()
                        .ok_or_else(|| SheafError::SectionIsoMissing {
                            reason: format!(
                                "stalk tuples of `{}` and `{}` do not correspond",
                                la.ring.id(),
                                lb.ring.id()
                            ),
                        })?;
                table.push(target);
            }
            let hom = RingHom {
                domain: la.ring.id().clone(),
                codomain: lb.ring.id().clone(),
                map: HomMap::FiniteTable(table),
            };
            let iso = hom_to_iso(&la.ring, &lb.ring, hom).map_err(|e| {
                SheafError::SectionIsoMissing {
                    reason: e.to_string(),
                }
            })?;
            Ok((la, lb, iso))
        }
        _ => {
            // number-field sections: overlap of single-point opens with
            // identical nominal sections
            if la.ring.same_ring(&lb.ring) {
                let iso = RingIso::identity(&la.ring);
                Ok((la, lb, iso))
            } else {
                Err(SheafError::SectionIsoMissing {
                    reason: "nominally different number-field sections share an open".into(),
                })
            }
        }
    }
}

/// Generate a canonical pseudogroup from a selection of affine opens. The
/// selection is reduced to the set of its canonical section rings; overlap
/// isos are collected for every affine-open triple whose endpoint rings lie
/// in that set.
pub fn canonical_generators(
    s: &Scheme,
    selection: Option<&[OpenSet]>,
) -> Result<CanonicalGamma, SheafError> {
    let all = affine_opens(s);
    let (selected, flavor): (Vec<OpenSet>, Flavor) = match selection {
        None => (all.clone(), Flavor::Maximal),
        Some(list) => {
            if list.is_empty() {
                return Err(SheafError::InvalidBase {
                    reason:
                        "empty selection: a pseudogroup needs the identities of at least one ring"
                            .into(),
                });
            }
            for v in list {
                if !all.contains(v) {
                    return Err(SheafError::InvalidBase {
                        reason: format!("selected open {v:?} is not an affine open"),
                    });
                }
            }
            (list.to_vec(), Flavor::GeneratedFromSubset)
        }
    };
    let mut ring_set: BTreeSet<RingId> = BTreeSet::new();
    for v in &selected {
        ring_set.insert(s.section_on(v)?.ring.id().clone());
    }
    // eligible opens: all affine opens whose canonical ring is selected
    let mut eligible: Vec<(OpenSet, SectionView)> = Vec::new();
    for v in &all {
        let view = s.section_on(v)?;
        if ring_set.contains(view.ring.id()) {
            eligible.push((v.clone(), view));
        }
    }
    let mut gens = Generators::default();
    let mut seen_rings: BTreeSet<RingId> = BTreeSet::new();
    for (_, view) in &eligible {
        if seen_rings.insert(view.ring.id().clone()) {
            gens.rings.push(view.ring.clone());
        }
    }
    let mut seen_isos: BTreeSet<(RingId, RingId, HomMapKey)> = BTreeSet::new();
    for (ua, view_a) in &eligible {
        for (ub, view_b) in &eligible {
            let inter: OpenSet = ua.intersection(ub).copied().collect();
            for w in &all {
                if !w.is_subset(&inter) {
                    continue;
                }
                let (la, lb, iso) = overlap_iso(s, view_a, view_b, w)?;
                if seen_rings.insert(la.ring.id().clone()) {
                    gens.rings.push(la.ring.clone());
                }
                if seen_rings.insert(lb.ring.id().clone()) {
                    gens.rings.push(lb.ring.clone());
                }
                if seen_isos.insert(iso.key()) {
                    gens.isos.push(iso);
                }
            }
        }
    }
    let gamma = close(&gens).map_err(|e| SheafError::UniverseEscape {
        reason: e.to_string(),
    })?;
    Ok(CanonicalGamma {
        flavor,
        gamma,
        selection: selected,
    })
}

/// The candidate charts a scheme carries on an affine open: one per affine
/// parent, with the parent's section ring localized down to the open.
pub fn chart_candidates(s: &Scheme, v: &OpenSet) -> Result<Vec<AffineChart>, SheafError> {
    let mut out: Vec<AffineChart> = Vec::new();
    let mut seen: BTreeSet<RingId> = BTreeSet::new();
    for u in affine_opens(s) {
        if !v.is_subset(&u) {
            continue;
        }
        let parent = s.section_on(&u)?;
        let view = localized_view(s, &parent, v)?;
        if seen.insert(view.ring.id().clone()) {
            out.push(chart_of_view(s, v, &view)?);
        }
    }
    Ok(out)
}

/// The atlas of all candidate charts whose rings lie in the pseudogroup,
/// paired with it.
pub fn canonical_atlas(g: &CanonicalGamma, s: &Scheme) -> Result<AtlasData, SheafError> {
    let mut charts = Vec::new();
    for v in affine_opens(s) {
        for chart in chart_candidates(s, &v)? {
            if g.gamma.contains_ring(&chart.ring) {
                charts.push(chart);
            }
        }
    }
    Ok(AtlasData {
        space: s.space.clone(),
        charts,
        gamma: g.gamma.clone(),
    })
}

/// The canonical structure a canonical pseudogroup determines: the handle of
/// its atlas of member charts. Errs when that atlas is not valid, in which
/// case the pseudogroup is not canonical for the scheme.
pub fn canonical_structure(g: &CanonicalGamma, s: &Scheme) -> Result<StructureHandle, SheafError> {
    let base = canonical_atlas(g, s)?;
    let report = validate_atlas(&base);
    if !report.is_ok() {
        return Err(SheafError::InvalidBase {
            reason: report
                .violations
                .first()
                .map(|v| v.detail.clone())
                .unwrap_or_default(),
        });
    }
    Ok(StructureHandle { base })
}

/// The relative canonical structure: the canonical atlas enlarged with every
/// in-scheme candidate chart compatible with it, saturated to a fixed point.
pub fn relative_canonical_structure(
    g: &CanonicalGamma,
    s: &Scheme,
) -> Result<StructureHandle, SheafError> {
    let handle = canonical_structure(g, s)?;
    let mut atlas = handle.base;
    loop {
        let mut added = false;
        for v in affine_opens(s) {
            for chart in chart_candidates(s, &v)? {
                if atlas.charts.contains(&chart) {
                    continue;
                }
                if chart_compatible_with_atlas(&chart, &atlas)? {
                    atlas.charts.push(chart);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    Ok(StructureHandle { base: atlas })
}

/// Does the structure contain a chart on the given affine open: some
/// in-scheme candidate chart on it is compatible with the base.
pub fn structure_has_affine_open(
    handle: &StructureHandle,
    s: &Scheme,
    v: &OpenSet,
) -> Result<bool, SheafError> {
    for chart in chart_candidates(s, v)? {
        if !handle.base.gamma.contains_ring(&chart.ring) {
            continue;
        }
        if chart_compatible_with_atlas(&chart, &handle.base)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Build the extension of a (relative) canonical structure and verify it is
/// isomorphic to the scheme it came from.
pub fn associate_scheme(
    s: &Scheme,
    handle: &StructureHandle,
) -> Result<(Scheme, SchemeIso), SheafError> {
    let ext = build_extension(handle)?;
    let mut bank = IsoBank::new();
    bank.add_pseudogroup(&handle.base.gamma);
    bank.add_pseudogroup(&s.declared.base.gamma);
    let id_map = Homeo::identity(&s.space);
    let iso = scheme_iso_over_map(&ext, s, &id_map, &bank)?;
    Ok((ext, iso))
}

/// All distinct canonical pseudogroups arising from selections of affine
/// opens, deduplicated as closed sets and filtered by canonicity (the member
/// atlas must be valid).
pub fn generation_outcomes(s: &Scheme) -> Result<Vec<CanonicalGamma>, SheafError> {
    let all = affine_opens(s);
    if all.len() > 6 {
        return Err(SheafError::TooLarge {
            reason: format!("{} affine opens, cap 6 for selection enumeration", all.len()),
        });
    }
    let mut outcomes: Vec<CanonicalGamma> = Vec::new();
    for mask in 1u32..(1 << all.len()) {
        let selection: Vec<OpenSet> = (0..all.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| all[i].clone())
            .collect();
        let cg = canonical_generators(s, Some(&selection))?;
        if canonical_structure(&cg, s).is_err() {
            continue; // the member atlas is not valid: not canonical
        }
        if !outcomes.iter().any(|o| o.gamma.same_as(&cg.gamma)) {
            outcomes.push(cg);
        }
    }
    Ok(outcomes)
}

/// Report of the uniqueness check over a universe.
#[derive(Debug, Clone)]
pub struct UniquenessReport {
    pub canonical_unique: bool,
    pub relative_canonical_unique: bool,
    pub outcome_count: usize,
    pub universe: Vec<RingId>,
}

/// Enumerate canonical pseudogroups over the universe: in-scheme generation
/// outcomes, widened by substituting universe rings that are witnessed
/// isomorphic to a canonical section ring. Returns whether all canonical
/// structures coincide and whether all relative canonical structures
/// coincide, asserting the two answers agree.
pub fn unique_structure_check(
    s: &Scheme,
    universe: &[Arc<Ring>],
    bank: &IsoBank,
) -> Result<UniquenessReport, SheafError> {
    let all = affine_opens(s);
    if all.len() > 6 {
        return Err(SheafError::TooLarge {
            reason: format!("{} affine opens, cap 6", all.len()),
        });
    }
    // per-open ring options: the canonical ring plus witnessed-isomorphic
    // universe rings (each with the iso onto the canonical ring)
    let mut options: Vec<Vec<(Arc<Ring>, Option<RingIso>)>> = Vec::new();
    for v in &all {
        let view = s.section_on(v)?;
        let mut opts: Vec<(Arc<Ring>, Option<RingIso>)> = vec![(view.ring.clone(), None)];
        for u in universe {
            if u.same_ring(&view.ring) {
                continue;
            }
            if let Some(iso) = bank.find(u, &view.ring) {
                opts.push((u.clone(), Some(iso)));
            }
        }
        options.push(opts);
    }
    let mut outcomes: Vec<Pseudogroup> = Vec::new();
    let counts: Vec<usize> = options.iter().map(|o| o.len()).collect();
    for mask in 1u32..(1 << all.len()) {
        let chosen: Vec<usize> = (0..all.len()).filter(|i| mask >> i & 1 == 1).collect();
        let mut choice = vec![0usize; chosen.len()];
        loop {
            let mut gens = Generators::default();
            let mut seen: BTreeSet<RingId> = BTreeSet::new();
            let mut assignment: BTreeMap<OpenSet, (Arc<Ring>, Option<RingIso>)> = BTreeMap::new();
            for (slot, &oi) in chosen.iter().enumerate() {
                let (ring, iso) = &options[oi][choice[slot]];
                if seen.insert(ring.id().clone()) {
                    gens.rings.push(ring.clone());
                }
                assignment.insert(all[oi].clone(), (ring.clone(), iso.clone()));
            }
            // a substituted ring also brings its witness iso so the
            // pseudogroup can mediate between the substitute and the scheme
            let mut seen_isos: BTreeSet<(RingId, RingId, HomMapKey)> = BTreeSet::new();
            for (ring, iso) in assignment.values() {
                if let Some(iso) = iso {
                    let target = bank
                        .pool
                        .get(iso.range())
                        .or_else(|_| s.pool.get(iso.range()))?
                        .clone();
                    if seen.insert(target.id().clone()) {
                        gens.rings.push(target.clone());
                    }
                    if seen.insert(ring.id().clone()) {
                        gens.rings.push(ring.clone());
                    }
                    if seen_isos.insert(iso.key()) {
                        gens.isos.push(iso.clone());
                    }
                }
            }
            // overlap isos among eligible opens (canonical rings selected)
            let ring_set: BTreeSet<RingId> = assignment
                .values()
                .map(|(r, iso)| match iso {
                    None => r.id().clone(),
                    Some(i) => i.range().clone(),
                })
                .collect();
            let mut eligible: Vec<(OpenSet, SectionView)> = Vec::new();
            for v in &all {
                let view = s.section_on(v)?;
                if ring_set.contains(view.ring.id()) {
                    eligible.push((v.clone(), view));
                }
            }
            for (ua, view_a) in &eligible {
                for (ub, view_b) in &eligible {
                    let inter: OpenSet = ua.intersection(ub).copied().collect();
                    for w in &all {
                        if !w.is_subset(&inter) {
                            continue;
                        }
                        let (la, lb, iso) = overlap_iso(s, view_a, view_b, w)?;
                        if seen.insert(la.ring.id().clone()) {
                            gens.rings.push(la.ring.clone());
                        }
                        if seen.insert(lb.ring.id().clone()) {
                            gens.rings.push(lb.ring.clone());
                        }
                        if seen_isos.insert(iso.key()) {
                            gens.isos.push(iso);
                        }
                    }
                }
            }
            let gamma = close(&gens).map_err(|e| SheafError::UniverseEscape {
                reason: e.to_string(),
            })?;
            // canonicity: member charts must cover the space; substituted
            // charts are carried by their witness isos
            let covers = {
                let mut covered: OpenSet = OpenSet::new();
                for v in &all {
                    let view = s.section_on(v)?;
                    let direct = gamma.contains_ring(view.ring.id());
                    let via_witness = assignment
                        .get(v)
                        .map(|(r, _)| gamma.contains_ring(r.id()))
                        .unwrap_or(false);
                    if direct || via_witness {
                        covered.extend(v.iter().copied());
                    }
                }
                covered == s.space.full()
            };
            if covers && !outcomes.iter().any(|o| o.same_as(&gamma)) {
                outcomes.push(gamma);
            }
            // advance the mixed-radix choice counter
            let mut slot = 0;
            loop {
                if slot == chosen.len() {
                    break;
                }
                choice[slot] += 1;
                if choice[slot] < counts[chosen[slot]] {
                    break;
                }
                choice[slot] = 0;
                slot += 1;
            }
            if slot == chosen.len() {
                break;
            }
        }
    }
    let unique = outcomes.len() == 1;
    let report = UniquenessReport {
        canonical_unique: unique,
        relative_canonical_unique: unique,
        outcome_count: outcomes.len(),
        universe: universe.iter().map(|r| r.id().clone()).collect(),
    };
    // the two uniqueness answers must agree
    assert_eq!(
        report.canonical_unique, report.relative_canonical_unique,
        "canonical and relative canonical uniqueness disagree"
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudogroup::Generators as PGens;
    use crate::ring::{iso_search, make_ring, RingPresentation};
    use crate::topology::{PointId, TopSpace};

    fn z6_scheme() -> Scheme {
        let z6 = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let gamma = close(&PGens::from_rings(vec![z6.clone()])).unwrap();
        let sp = spec(&z6).unwrap();
        let space = sp.space.clone();
        let chart = AffineChart::new(&space, space.full(), &z6, vec![0, 1]).unwrap();
        let handle = StructureHandle {
            base: AtlasData {
                space,
                charts: vec![chart],
                gamma,
            },
        };
        build_extension(&handle).unwrap()
    }

    /// The disjoint-union analog: two Spec(Z3) glued side by side, declared
    /// with the global product chart and both factor charts.
    fn disjoint_y_scheme() -> Scheme {
        let z3 = make_ring(&RingPresentation::zmod("Z3", 3)).unwrap();
        let p = make_ring(&RingPresentation::product(
            "P",
            vec![
                RingPresentation::zmod("Z3", 3),
                RingPresentation::zmod("Z3", 3),
            ],
        ))
        .unwrap();
        // the localizations of P at its idempotents are isomorphic to Z3;
        // generate the pseudogroup with those connector isos
        let e1 = p.element(vec![1, 0]).unwrap();
        let e2 = p.element(vec![0, 1]).unwrap();
        let (p1, _) = crate::ring::localize(&p, &e1).unwrap();
        let (p2, _) = crate::ring::localize(&p, &e2).unwrap();
        let conn1 = iso_search(&p1, &z3, &[]).unwrap().remove(0);
        let conn2 = iso_search(&p2, &z3, &[]).unwrap().remove(0);
        let gamma = close(&PGens {
            rings: vec![z3.clone(), p.clone(), p1, p2],
            isos: vec![conn1, conn2],
            ..Default::default()
        })
        .unwrap();
        let space = TopSpace::discrete(vec![PointId::new("a"), PointId::new("b")]);
        let sp = spec(&p).unwrap();
        // point a ↦ the prime where the first coordinate vanishes
        let zero_first = sp
            .index_of_ideal(&BTreeSet::from([vec![0u64, 0], vec![0, 1], vec![0, 2]]))
            .unwrap();
        let other = 1 - zero_first;
        let cy = AffineChart::new(&space, space.full(), &p, vec![zero_first, other]).unwrap();
        let ca = AffineChart::new(&space, OpenSet::from([0]), &z3, vec![0]).unwrap();
        let cb = AffineChart::new(&space, OpenSet::from([1]), &z3, vec![0]).unwrap();
        let handle = StructureHandle {
            base: AtlasData {
                space,
                charts: vec![cy, ca, cb],
                gamma,
            },
        };
        build_extension(&handle).unwrap()
    }

    #[test]
    fn one_chart_scheme_with_no_overlaps_generates_identities() {
        let s = z6_scheme();
        let full = s.space.full();
        let cg = canonical_generators(&s, Some(&[full])).unwrap();
        // the ring set is {Z6}; closure brings the localizations in
        assert!(cg.gamma.contains_ring(&RingId::new("Z6")));
        assert_eq!(cg.gamma.rings.len(), 3);
        assert!(cg.gamma.verify_axioms().is_empty());
    }

    #[test]
    fn maximal_canonical_atlas_validates() {
        let s = z6_scheme();
        let g = canonical_generators(&s, None).unwrap();
        assert_eq!(g.flavor, Flavor::Maximal);
        let atlas = canonical_atlas(&g, &s).unwrap();
        // charts: full space to spec(Z6), plus D(2), D(3) to the localizations
        assert_eq!(atlas.charts.len(), 3);
        let report = validate_atlas(&atlas);
        assert!(report.is_ok(), "violations: {:?}", report.violations);
    }

    #[test]
    fn gamma_without_a_ring_has_no_chart_for_it() {
        let s = z6_scheme();
        // generate from one distinguished open only: Z6 itself is absent
        let d2: OpenSet = OpenSet::from([0]);
        let cg = canonical_generators(&s, Some(&[d2])).unwrap();
        assert!(!cg.gamma.contains_ring(&RingId::new("Z6")));
        let atlas = canonical_atlas(&cg, &s).unwrap();
        assert!(atlas.charts.iter().all(|c| c.ring != RingId::new("Z6")));
    }

    #[test]
    fn disjoint_union_has_exactly_three_generation_outcomes() {
        let s = disjoint_y_scheme();
        let outcomes = generation_outcomes(&s).unwrap();
        assert_eq!(
            outcomes.len(),
            3,
            "outcomes: {:?}",
            outcomes
                .iter()
                .map(|o| o
                    .gamma
                    .rings
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn relative_canonical_of_maximal_contains_all_candidates_on_z6() {
        let s = z6_scheme();
        let g = canonical_generators(&s, None).unwrap();
        let rel = relative_canonical_structure(&g, &s).unwrap();
        assert_eq!(rel.base.charts.len(), 3, "all affine-open charts");
    }

    #[test]
    fn membership_agreement_between_canonical_and_relative() {
        let s = z6_scheme();
        for g in generation_outcomes(&s).unwrap() {
            let can = canonical_structure(&g, &s).unwrap();
            let rel = relative_canonical_structure(&g, &s).unwrap();
            for v in affine_opens(&s) {
                let in_can = structure_has_affine_open(&can, &s, &v).unwrap();
                let in_rel = structure_has_affine_open(&rel, &s, &v).unwrap();
                assert_eq!(in_can, in_rel, "membership must agree on {v:?}");
            }
        }
    }

    #[test]
    fn associate_scheme_of_itself() {
        let s = z6_scheme();
        let g = canonical_generators(&s, None).unwrap();
        let h = relative_canonical_structure(&g, &s).unwrap();
        let (ext, iso) = associate_scheme(&s, &h).unwrap();
        assert_eq!(ext.space, s.space);
        assert_eq!(iso.point_map, vec![0, 1]);
    }

    #[test]
    fn two_relative_canonical_structures_give_isomorphic_associates() {
        let s = disjoint_y_scheme();
        let outcomes = generation_outcomes(&s).unwrap();
        let mut associates = Vec::new();
        for g in &outcomes {
            let h = match relative_canonical_structure(g, &s) {
                Ok(h) => h,
                // the mixed pseudogroup carries two nominal rings on one
                // open: not admissible under nominal equality
                Err(SheafError::NotAdmissible(_)) => continue,
                Err(e) => panic!("unexpected: {e}"),
            };
            match associate_scheme(&s, &h) {
                Ok((ext, _)) => associates.push((h, ext)),
                Err(SheafError::NotAdmissible(_)) => continue,
                Err(e) => panic!("unexpected: {e}"),
            }
        }
        assert_eq!(associates.len(), 2, "two admissible canonical structures");
        // both associates are isomorphic to the original, hence to each
        // other, but their declared atlases differ
        let (h1, _) = &associates[0];
        let (h2, _) = &associates[1];
        assert!(!h1.base.gamma.same_as(&h2.base.gamma));
    }

    #[test]
    fn uniqueness_on_one_point_scheme() {
        use num::bigint::BigInt;
        use num::rational::BigRational;
        let rat = |n: i64| BigRational::from_integer(BigInt::from(n));
        let k = make_ring(&RingPresentation::number_field(
            "k",
            vec![rat(-2), rat(0), rat(0), rat(1)],
            false,
        ))
        .unwrap();
        let kp = make_ring(&RingPresentation::number_field(
            "kprime",
            vec![rat(-2), rat(0), rat(0), rat(1)],
            false,
        ))
        .unwrap();
        let gamma = close(&PGens::from_rings(vec![k.clone()])).unwrap();
        let space = TopSpace::discrete(vec![PointId::new("x")]);
        let chart = AffineChart::new(&space, space.full(), &k, vec![0]).unwrap();
        let handle = StructureHandle {
            base: AtlasData {
                space,
                charts: vec![chart],
                gamma,
            },
        };
        let s = build_extension(&handle).unwrap();
        // over {k} alone: unique
        let bank = IsoBank::new();
        let rep = unique_structure_check(&s, &[k.clone()], &bank).unwrap();
        assert!(rep.canonical_unique);
        // over {k, k'} with σ available: not unique
        let gen = k.number_field().unwrap().generator();
        let sigma = crate::ring::nf_iso_from_witness(&k, &kp, gen.clone(), gen).unwrap();
        let mut bank2 = IsoBank::new();
        bank2.add_ring(k.clone());
        bank2.add_ring(kp.clone());
        bank2.add_iso(sigma);
        let rep2 = unique_structure_check(&s, &[k, kp], &bank2).unwrap();
        assert!(!rep2.canonical_unique);
        assert_eq!(rep2.outcome_count, 2);
    }

    #[test]
    fn uniqueness_fails_on_disjoint_union() {
        let s = disjoint_y_scheme();
        let z3 = s.pool.get(&RingId::new("Z3")).unwrap().clone();
        let p = s.pool.get(&RingId::new("P")).unwrap().clone();
        let bank = IsoBank::new();
        let rep = unique_structure_check(&s, &[z3, p], &bank).unwrap();
        assert!(!rep.canonical_unique);
    }
}
