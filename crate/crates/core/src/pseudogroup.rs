//! Pseudogroups of affine transformations as finite closed sets of rings and
//! isomorphisms.
//!
//! A pseudogroup is closed under inverses, contains the identity of every
//! domain, contains the isomorphism induced on the localization of any domain
//! at any nonzero element, and contains every factorized composite. Closure
//! is computed by saturation to a fixed point; it terminates because
//! localizations of finite rings are idempotent-cut subrings keyed by the
//! root ancestor and field localizations are identities, so the reachable
//! ring set is finite.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{PseudoError, RingError};
use crate::ring::{
    localize, verify_iso, HomMap, HomMapKey, Ring, RingElement, RingHom, RingId, RingIso, RingPool,
};

/// Which closure rule produced an isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureRule {
    Generator,
    InverseClosure,
    IdentityClosure,
    LocalizationInduced,
    FactorizedComposite,
}

impl ClosureRule {
    pub fn label(&self) -> &'static str {
        match self {
            ClosureRule::Generator => "generator",
            ClosureRule::InverseClosure => "inverse-closure",
            ClosureRule::IdentityClosure => "identity-closure",
            ClosureRule::LocalizationInduced => "localization-induced",
            ClosureRule::FactorizedComposite => "factorized-composite",
        }
    }
}

/// Semantic identity of an iso: domain, range, element-level map.
pub type IsoKey = (RingId, RingId, HomMapKey);

#[derive(Debug, Clone)]
pub struct IsoEntry {
    pub iso: RingIso,
    pub rule: ClosureRule,
    /// How many distinct derivations produced this iso.
    pub multiplicity: usize,
}

/// One line of the closure report.
#[derive(Debug, Clone)]
pub struct ClosureEntry {
    pub domain: RingId,
    pub range: RingId,
    pub rule: ClosureRule,
    pub multiplicity: usize,
}

/// The declared universe the closure was computed over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniverseStamp {
    pub declared: Vec<RingId>,
    pub note: String,
}

impl UniverseStamp {
    pub fn new(declared: Vec<RingId>) -> Self {
        UniverseStamp {
            declared,
            note: "localization closure saturated over elements of reachable rings only; \
                   composites over reachable targets only"
                .into(),
        }
    }
}

/// A closed pseudogroup of affine transformations.
#[derive(Debug, Clone)]
pub struct Pseudogroup {
    /// Every ring mentioned, with its arithmetic.
    pub pool: RingPool,
    pub rings: BTreeSet<RingId>,
    isos: BTreeMap<IsoKey, IsoEntry>,
    pub base_field: Option<RingId>,
    /// Recorded k-algebra structure maps, when the base field is declared.
    pub algebra_maps: BTreeMap<RingId, RingHom>,
    pub universe: UniverseStamp,
}

impl Pseudogroup {
    pub fn iso_count(&self) -> usize {
        self.isos.len()
    }

    pub fn isos(&self) -> impl Iterator<Item = &IsoEntry> {
        self.isos.values()
    }

    /// True iff an iso with identical domain id, range id, and element map is
    /// in the closed set.
    pub fn contains_iso(&self, iso: &RingIso) -> bool {
        self.isos.contains_key(&iso.key())
    }

    pub fn contains_ring(&self, id: &RingId) -> bool {
        self.rings.contains(id)
    }

    /// All member isos from one nominal ring to another.
    pub fn isos_between(&self, dom: &RingId, rang: &RingId) -> Vec<&RingIso> {
        self.isos
            .values()
            .filter(|e| e.iso.domain() == dom && e.iso.range() == rang)
            .map(|e| &e.iso)
            .collect()
    }

    pub fn report(&self) -> Vec<ClosureEntry> {
        self.isos
            .values()
            .map(|e| ClosureEntry {
                domain: e.iso.domain().clone(),
                range: e.iso.range().clone(),
                rule: e.rule,
                multiplicity: e.multiplicity,
            })
            .collect()
    }

    /// Equality as closed sets: same rings and same iso keys.
    pub fn same_as(&self, other: &Pseudogroup) -> bool {
        self.rings == other.rings
            && self.isos.keys().collect::<Vec<_>>() == other.isos.keys().collect::<Vec<_>>()
    }

    /// Set inclusion on the iso keys.
    pub fn subset_of(&self, other: &Pseudogroup) -> bool {
        self.rings.is_subset(&other.rings)
            && self.isos.keys().all(|k| other.isos.contains_key(k))
    }

    /// Exhaustive audit of the five closure conditions. Returns the list of
    /// violations, empty when the pseudogroup is closed.
    pub fn verify_axioms(&self) -> Vec<String> {
        let mut bad = Vec::new();
        // 1: endpoints are member rings carried by the pool, and isos verify
        for e in self.isos.values() {
            let iso = &e.iso;
            for end in [iso.domain(), iso.range()] {
                if !self.rings.contains(end) || !self.pool.contains(end) {
                    bad.push(format!("iso endpoint `{end}` is not a member ring"));
                }
            }
            if let (Ok(d), Ok(r)) = (self.pool.get(iso.domain()), self.pool.get(iso.range())) {
                if verify_iso(d, r, iso).is_err() {
                    bad.push(format!(
                        "iso {} -> {} fails verification",
                        iso.domain(),
                        iso.range()
                    ));
                }
            }
        }
        // 2: inverses present
        for e in self.isos.values() {
            if !self.contains_iso(&e.iso.inverted()) {
                bad.push(format!(
                    "missing inverse of {} -> {}",
                    e.iso.domain(),
                    e.iso.range()
                ));
            }
        }
        // 3: identity present for every domain
        for e in self.isos.values() {
            let dom = e.iso.domain();
            if let Ok(ring) = self.pool.get(dom) {
                if !self.contains_iso(&RingIso::identity(ring)) {
                    bad.push(format!("missing identity on `{dom}`"));
                }
            }
        }
        // 4: localization-induced isos present for every nonzero element
        let entries: Vec<RingIso> = self.isos.values().map(|e| e.iso.clone()).collect();
        for iso in &entries {
            let Ok(dom) = self.pool.get(iso.domain()) else {
                continue;
            };
            let Ok(rang) = self.pool.get(iso.range()) else {
                continue;
            };
            for f in dom.elements() {
                if dom.is_zero(&f) {
                    continue;
                }
                match induced_localization_iso(dom, rang, iso, &f) {
                    Ok(Some((_, _, induced))) => {
                        if !self.contains_iso(&induced) {
                            bad.push(format!(
                                "missing localization-induced iso of {} -> {} at {f}",
                                iso.domain(),
                                iso.range()
                            ));
                        }
                    }
                    Ok(None) => {} // unit localization: the iso itself
                    Err(e) => bad.push(format!("localization failed during audit: {e}")),
                }
            }
        }
        // 5: factorized composites: composition closure over composable pairs
        for a in &entries {
            for b in &entries {
                if a.range() != b.domain() {
                    continue;
                }
                let (Ok(d), Ok(m), Ok(c)) = (
                    self.pool.get(a.domain()),
                    self.pool.get(a.range()),
                    self.pool.get(b.range()),
                ) else {
                    continue;
                };
                match compose_isos(a, b, d, m, c) {
                    Ok(comp) => {
                        if !self.contains_iso(&comp) {
                            bad.push(format!(
                                "missing composite {} -> {} -> {}",
                                a.domain(),
                                a.range(),
                                b.range()
                            ));
                        }
                    }
                    Err(e) => bad.push(format!("composition failed during audit: {e}")),
                }
            }
        }
        bad
    }
}

/// The isomorphism induced by σ on the localization of its domain at f.
/// Returns None when f is a unit, where the induced iso is σ itself.
pub fn induced_localization_iso(
    dom: &Arc<Ring>,
    rang: &Arc<Ring>,
    iso: &RingIso,
    f: &RingElement,
) -> Result<Option<(Arc<Ring>, Arc<Ring>, RingIso)>, RingError> {
    let (dom_loc, dom_map) = localize(dom, f)?;
    if dom_loc.same_ring(dom) {
        return Ok(None);
    }
    let f_img = iso.forward.apply(dom, rang, f)?;
    let (rang_loc, rang_map) = localize(rang, &f_img)?;
    // the induced map sends ea to σ(e)σ(a); on the cut subrings this is just σ
    let dl = dom_loc.finite().expect("finite localization");
    let rl = rang_loc.finite().expect("finite localization");
    let mut table = Vec::with_capacity(dl.size());
    for coords in &dl.elems {
        let x = RingElement::finite(dom.id().clone(), coords.clone());
        let img = iso.forward.apply(dom, rang, &x)?;
        let idx = rl
            .idx(img.coords().unwrap())
            .ok_or_else(|| RingError::ForeignElement {
                ring: rang_loc.id().to_string(),
                coords: format!("{img}"),
            })?;
        table.push(idx);
    }
    let mut inv_table = Vec::with_capacity(rl.size());
    for coords in &rl.elems {
        let y = RingElement::finite(rang.id().clone(), coords.clone());
        let img = iso.inverse.apply(rang, dom, &y)?;
        let idx = dl
            .idx(img.coords().unwrap())
            .ok_or_else(|| RingError::ForeignElement {
                ring: dom_loc.id().to_string(),
                coords: format!("{img}"),
            })?;
        inv_table.push(idx);
    }
    let induced = RingIso {
        forward: RingHom {
            domain: dom_loc.id().clone(),
            codomain: rang_loc.id().clone(),
            map: HomMap::FiniteTable(table),
        },
        inverse: RingHom {
            domain: rang_loc.id().clone(),
            codomain: dom_loc.id().clone(),
            map: HomMap::FiniteTable(inv_table),
        },
    };
    let _ = (dom_map, rang_map);
    Ok(Some((dom_loc, rang_loc, induced)))
}

/// δ ∘ σ for σ: A → B, δ: B → C.
pub fn compose_isos(
    sigma: &RingIso,
    delta: &RingIso,
    dom: &Ring,
    mid: &Ring,
    cod: &Ring,
) -> Result<RingIso, RingError> {
    Ok(RingIso {
        forward: sigma.forward.compose(&delta.forward, dom, mid, cod)?,
        inverse: delta.inverse.compose(&sigma.inverse, cod, mid, dom)?,
    })
}

/// Generator data for a closure run.
#[derive(Debug, Clone, Default)]
pub struct Generators {
    pub rings: Vec<Arc<Ring>>,
    pub isos: Vec<RingIso>,
    pub base_field: Option<RingId>,
    /// k-algebra structure maps for the generator rings, keyed by ring id.
    pub algebra_maps: BTreeMap<RingId, RingHom>,
}

impl Generators {
    pub fn from_rings(rings: Vec<Arc<Ring>>) -> Self {
        Generators {
            rings,
            ..Default::default()
        }
    }
}

/// Saturate the generators to the least pseudogroup satisfying the closure
/// conditions. Every generator ring contributes its identity.
pub fn close(generators: &Generators) -> Result<Pseudogroup, PseudoError> {
    let mut pool = RingPool::new();
    for r in &generators.rings {
        pool.insert(r.clone())
            .map_err(|e| PseudoError::InvalidGenerator {
                reason: e.to_string(),
            })?;
    }
    let mut declared: Vec<RingId> = generators.rings.iter().map(|r| r.id().clone()).collect();
    declared.sort();
    declared.dedup();

    let mut isos: BTreeMap<IsoKey, IsoEntry> = BTreeMap::new();
    let mut frontier: Vec<RingIso> = Vec::new();
    let mut insert = |isos: &mut BTreeMap<IsoKey, IsoEntry>,
                      frontier: &mut Vec<RingIso>,
                      iso: RingIso,
                      rule: ClosureRule| {
        let key = iso.key();
        match isos.get_mut(&key) {
            Some(entry) => entry.multiplicity += 1,
            None => {
                isos.insert(
                    key,
                    IsoEntry {
                        iso: iso.clone(),
                        rule,
                        multiplicity: 1,
                    },
                );
                frontier.push(iso);
            }
        }
    };

    // seed: generator isos (verified) and the identity of every generator ring
    for iso in &generators.isos {
        let dom = pool
            .get(iso.domain())
            .map_err(|e| PseudoError::InvalidGenerator {
                reason: format!("iso domain not among generator rings: {e}"),
            })?
            .clone();
        let rang = pool
            .get(iso.range())
            .map_err(|e| PseudoError::InvalidGenerator {
                reason: format!("iso range not among generator rings: {e}"),
            })?
            .clone();
        verify_iso(&dom, &rang, iso).map_err(|e| PseudoError::InvalidGenerator {
            reason: format!("generator iso {} -> {}: {e}", iso.domain(), iso.range()),
        })?;
        insert(&mut isos, &mut frontier, iso.clone(), ClosureRule::Generator);
    }
    for r in &generators.rings {
        insert(
            &mut isos,
            &mut frontier,
            RingIso::identity(r),
            ClosureRule::IdentityClosure,
        );
    }

    let mut algebra_maps = generators.algebra_maps.clone();

    // saturation: inverse, identity, localization-induced, composites
    while !frontier.is_empty() {
        let batch = std::mem::take(&mut frontier);
        for iso in &batch {
            insert(
                &mut isos,
                &mut frontier,
                iso.inverted(),
                ClosureRule::InverseClosure,
            );
            for end in [iso.domain().clone(), iso.range().clone()] {
                let ring = pool.get(&end).expect("endpoint pooled").clone();
                insert(
                    &mut isos,
                    &mut frontier,
                    RingIso::identity(&ring),
                    ClosureRule::IdentityClosure,
                );
            }
        }
        for iso in &batch {
            let dom = pool.get(iso.domain()).expect("pooled").clone();
            let rang = pool.get(iso.range()).expect("pooled").clone();
            if !dom.is_finite() {
                continue; // field localizations are identities; nothing new
            }
            for f in dom.elements() {
                if dom.is_zero(&f) {
                    continue;
                }
                let induced = induced_localization_iso(&dom, &rang, iso, &f).map_err(|e| {
                    PseudoError::UniverseEscape {
                        reason: e.to_string(),
                    }
                })?;
                let Some((dl, rl, ind)) = induced else {
                    continue;
                };
                for new_ring in [&dl, &rl] {
                    pool.insert(new_ring.clone())
                        .map_err(|e| PseudoError::UniverseEscape {
                            reason: e.to_string(),
                        })?;
                    // carry the base-field structure down to the cut subring
                    if let Some(k) = &generators.base_field {
                        if !algebra_maps.contains_key(new_ring.id()) {
                            let parent_root = &new_ring.root;
                            if let (Some(parent_map), Ok(parent)) =
                                (algebra_maps.get(parent_root).cloned(), pool.get(parent_root))
                            {
                                if let Ok(k_ring) = pool.get(k) {
                                    if let Ok((_, loc_hom)) = crate::ring::localize(
                                        &parent.clone(),
                                        &element_of_localization_identity(new_ring, parent),
                                    ) {
                                        if let Ok(comp) = parent_map.compose(
                                            &loc_hom,
                                            k_ring,
                                            parent,
                                            new_ring,
                                        ) {
                                            algebra_maps.insert(new_ring.id().clone(), comp);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                insert(
                    &mut isos,
                    &mut frontier,
                    ind,
                    ClosureRule::LocalizationInduced,
                );
            }
        }
        // composites: new × all, both orders
        let all: Vec<RingIso> = isos.values().map(|e| e.iso.clone()).collect();
        for a in &batch {
            for b in &all {
                for (first, second) in [(a, b), (b, a)] {
                    if first.range() != second.domain() {
                        continue;
                    }
                    let d = pool.get(first.domain()).expect("pooled").clone();
                    let m = pool.get(first.range()).expect("pooled").clone();
                    let c = pool.get(second.range()).expect("pooled").clone();
                    let comp = compose_isos(first, second, &d, &m, &c).map_err(|e| {
                        PseudoError::UniverseEscape {
                            reason: e.to_string(),
                        }
                    })?;
                    insert(
                        &mut isos,
                        &mut frontier,
                        comp,
                        ClosureRule::FactorizedComposite,
                    );
                }
            }
        }
    }

    let rings: BTreeSet<RingId> = pool.ids().cloned().collect();
    Ok(Pseudogroup {
        pool,
        rings,
        isos,
        base_field: generators.base_field.clone(),
        algebra_maps,
        universe: UniverseStamp::new(declared),
    })
}

/// The identity element of a localization ring, as an element of the parent.
fn element_of_localization_identity(loc: &Arc<Ring>, parent: &Arc<Ring>) -> RingElement {
    let fin = loc.finite().expect("finite localization");
    RingElement::finite(
        parent.id().clone(),
        fin.elems[fin.one as usize].clone(),
    )
}

/// True iff every ring carries a recorded k-algebra structure and every iso
/// commutes with it.
pub fn is_k_pseudogroup(gamma: &Pseudogroup, k: &Arc<Ring>) -> bool {
    for id in &gamma.rings {
        let Some(eta) = gamma.algebra_maps.get(id) else {
            return false;
        };
        if &eta.domain != k.id() || &eta.codomain != id {
            return false;
        }
    }
    for entry in gamma.isos() {
        let iso = &entry.iso;
        let eta_dom = gamma.algebra_maps.get(iso.domain()).unwrap();
        let eta_rang = gamma.algebra_maps.get(iso.range()).unwrap();
        let dom = gamma.pool.get(iso.domain()).expect("pooled");
        let rang = gamma.pool.get(iso.range()).expect("pooled");
        // test elements: all of k when finite, the generator when a number field
        let test_elems: Vec<RingElement> = match k.number_field() {
            Some(nf) => vec![RingElement {
                ring: k.id().clone(),
                value: crate::ring::ElemValue::Nf(nf.generator()),
            }],
            None => k.elements(),
        };
        for x in test_elems {
            let via_dom = match eta_dom.apply(k, dom, &x) {
                Ok(v) => match iso.forward.apply(dom, rang, &v) {
                    Ok(w) => w,
                    Err(_) => return false,
                },
                Err(_) => return false,
            };
            let direct = match eta_rang.apply(k, rang, &x) {
                Ok(v) => v,
                Err(_) => return false,
            };
            if via_dom != direct {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{iso_search, make_ring, nf_iso_from_witness, RingPresentation};
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

    #[test]
    fn gamma1_is_just_the_identity() {
        let k = cbrt2_field("k");
        let gens = Generators::from_rings(vec![k.clone()]);
        let gamma = close(&gens).unwrap();
        assert_eq!(gamma.rings.len(), 1);
        assert_eq!(gamma.iso_count(), 1);
        assert!(gamma.contains_iso(&RingIso::identity(&k)));
        assert!(gamma.verify_axioms().is_empty());
    }

    #[test]
    fn gamma2_contains_the_inverse() {
        let k = cbrt2_field("k");
        let kp = cbrt2_field("kprime");
        let gen = k.number_field().unwrap().generator();
        let sigma = nf_iso_from_witness(&k, &kp, gen.clone(), gen).unwrap();
        let gens = Generators {
            rings: vec![k.clone(), kp.clone()],
            isos: vec![sigma.clone()],
            ..Default::default()
        };
        let gamma = close(&gens).unwrap();
        assert!(gamma.contains_iso(&sigma));
        assert!(gamma.contains_iso(&sigma.inverted()));
        assert!(gamma.contains_iso(&RingIso::identity(&k)));
        assert!(gamma.contains_iso(&RingIso::identity(&kp)));
        assert_eq!(gamma.iso_count(), 4);
        assert!(gamma.verify_axioms().is_empty());
        // gamma1 lacks the cross iso
        let gamma1 = close(&Generators::from_rings(vec![k.clone()])).unwrap();
        assert!(!gamma1.contains_iso(&sigma));
    }

    #[test]
    fn closure_of_z6_identity_reaches_localizations() {
        let z6 = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let gamma = close(&Generators::from_rings(vec![z6.clone()])).unwrap();
        // rings: Z6 plus the two proper localizations (idempotents 4 and 3)
        assert_eq!(gamma.rings.len(), 3);
        assert!(gamma.contains_ring(&RingId::new("loc(Z6;4)")));
        assert!(gamma.contains_ring(&RingId::new("loc(Z6;3)")));
        assert_eq!(gamma.iso_count(), 3, "three identities");
        assert!(gamma.verify_axioms().is_empty());
    }

    #[test]
    fn closure_of_renaming_iso() {
        let a = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let b = make_ring(&RingPresentation::zmod("Z6ren", 6)).unwrap();
        let ren = iso_search(&a, &b, &[]).unwrap().remove(0);
        let gens = Generators {
            rings: vec![a, b],
            isos: vec![ren],
            ..Default::default()
        };
        let gamma = close(&gens).unwrap();
        assert_eq!(gamma.rings.len(), 6);
        assert_eq!(gamma.iso_count(), 12);
        assert!(gamma.verify_axioms().is_empty());
    }

    #[test]
    fn closure_is_idempotent() {
        let a = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let b = make_ring(&RingPresentation::zmod("Z6ren", 6)).unwrap();
        let ren = iso_search(&a, &b, &[]).unwrap().remove(0);
        let gamma = close(&Generators {
            rings: vec![a, b],
            isos: vec![ren],
            ..Default::default()
        })
        .unwrap();
        let again = close(&Generators {
            rings: gamma.pool.rings().cloned().collect(),
            isos: gamma.isos().map(|e| e.iso.clone()).collect(),
            ..Default::default()
        })
        .unwrap();
        assert!(gamma.same_as(&again));
    }

    #[test]
    fn closure_monotone_in_generators() {
        let a = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let b = make_ring(&RingPresentation::zmod("Z6ren", 6)).unwrap();
        let ren = iso_search(&a, &b, &[]).unwrap().remove(0);
        let small = close(&Generators::from_rings(vec![a.clone()])).unwrap();
        let big = close(&Generators {
            rings: vec![a, b],
            isos: vec![ren],
            ..Default::default()
        })
        .unwrap();
        assert!(small.subset_of(&big));
    }

    #[test]
    fn contains_generators() {
        let f4 = make_ring(&RingPresentation::galois("F4", 2, vec![1, 1, 1])).unwrap();
        let frob = iso_search(&f4, &f4, &[])
            .unwrap()
            .into_iter()
            .find(|i| i.forward != RingHom::identity(&f4))
            .unwrap();
        let gamma = close(&Generators {
            rings: vec![f4.clone()],
            isos: vec![frob.clone()],
            ..Default::default()
        })
        .unwrap();
        assert!(gamma.contains_iso(&frob));
        assert!(gamma.verify_axioms().is_empty());
    }

    #[test]
    fn k_pseudogroup_detection() {
        let k = cbrt2_field("k");
        let mut algebra_maps = BTreeMap::new();
        algebra_maps.insert(k.id().clone(), RingHom::identity(&k));
        let gamma = close(&Generators {
            rings: vec![k.clone()],
            isos: vec![],
            base_field: Some(k.id().clone()),
            algebra_maps,
        })
        .unwrap();
        assert!(is_k_pseudogroup(&gamma, &k));
        // a pseudogroup containing Z6 has no Q-algebra structure
        let z6 = make_ring(&RingPresentation::zmod("Z6", 6)).unwrap();
        let plain = close(&Generators::from_rings(vec![z6])).unwrap();
        let q = make_ring(&RingPresentation::number_field("Q", vec![rat(0), rat(1)], false))
            .unwrap();
        assert!(!is_k_pseudogroup(&plain, &q));
    }

    #[test]
    fn empty_iso_pseudogroup_over_k_is_k_affine() {
        let q = make_ring(&RingPresentation::number_field("Q", vec![rat(0), rat(1)], false))
            .unwrap();
        let mut algebra_maps = BTreeMap::new();
        algebra_maps.insert(q.id().clone(), RingHom::identity(&q));
        let gamma = close(&Generators {
            rings: vec![q.clone()],
            isos: vec![],
            base_field: Some(q.id().clone()),
            algebra_maps,
        })
        .unwrap();
        assert!(is_k_pseudogroup(&gamma, &q));
    }
}
