//! The acceptance suite: one test per criterion, each printing a PASS or
//! FAIL line (run with --nocapture to see them). Tolerances are exact and
//! the stated time budgets are asserted.

mod common;

use std::time::{Duration, Instant};

use common::*;
use gad::connection;
use gad::diamond;
use gad::fixtures;
use gad::graph;
use gad::homology::{self, AbelianGroup, Coefficients};
use gad::lie::{self, LieBasis};
use gad::matrix::{
    apply_moves, global_dimension, matrices_equivalent, orthogonal_product, Equivalence,
    EquivalenceOptions,
};
use gad::snf::solve_integer;
use gad::weight::{self, WeightTable};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn criterion(number: u32, ok: bool, description: &str, detail: &str) {
    println!(
        "criterion {number:2}: {} — {description}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {number} failed ({description}): {detail}");
}

fn within(started: Instant, budget: Duration) -> bool {
    started.elapsed() <= budget
}

#[test]
fn criterion_01_torsion_class_of_the_bundled_complex() {
    let started = Instant::now();
    let cg = fixtures::ex13_chain();
    let h = cg.homology(Coefficients::Integers);
    let only_group = h.group(2) == AbelianGroup::cyclic(2) && h.groups().len() == 1;

    // the 2-cycle with one class of order two
    let cx = cg.complex();
    let basis2 = cx.basis(2);
    let coeff = |id: &str| -> BigInt {
        match id {
            "v2,3" | "v3,4" => BigInt::from(1),
            "v2,4" => BigInt::from(-1),
            _ => BigInt::zero(),
        }
    };
    let z: Vec<BigInt> = basis2.iter().map(|id| coeff(id)).collect();
    let d2 = cx.boundary(2);
    let is_cycle = (0..d2.nrows()).all(|i| {
        (0..d2.ncols())
            .map(|j| d2.get(i, j) * &z[j])
            .sum::<BigInt>()
            .is_zero()
    });
    let d3 = cx.boundary(3);
    let nonbounding = solve_integer(&d3, &z).is_none();
    let doubled: Vec<BigInt> = z.iter().map(|x| x * 2).collect();
    let order_two = solve_integer(&d3, &doubled).is_some();

    criterion(
        1,
        only_group
            && is_cycle
            && nonbounding
            && order_two
            && within(started, Duration::from_secs(1)),
        "bundled complex has one order-two class in degree two, carried by the stated cycle",
        &format!(
            "groups {:?}, cycle {is_cycle}, nonbounding {nonbounding}, order two {order_two}",
            h.groups()
        ),
    );
}

#[test]
fn criterion_02_ungradable_diamond_fixture() {
    let started = Instant::now();
    let g = fixtures::d1_graph();
    let diamond_ok = diamond::is_diamond_graph(&g).is_diamond;
    let rank = diamond::diamond_rank(&g).unwrap_or(0);
    let ungradable = graph::is_gradable(&g).is_none();
    criterion(
        2,
        diamond_ok && rank == 5 && ungradable && within(started, Duration::from_secs(1)),
        "16-vertex fixture is a rank-5 diamond graph with no gradation",
        &format!("diamond {diamond_ok}, rank {rank}, ungradable {ungradable}"),
    );
}

#[test]
fn criterion_03_obstructed_signature_fixture() {
    let started = Instant::now();
    let gg = fixtures::d2_graph();
    let g = gg.graph();
    let gradable = graph::is_gradable(g).is_some();
    let diamond_ok = diamond::is_diamond_graph(g).is_diamond;
    let (p1, p2) = connection::part_sizes(g).unwrap();
    let rank = diamond::diamond_rank(g).unwrap_or(0);
    let search = diamond::find_signature(g).unwrap();
    let agree = search.signature.is_none() && search.obstruction.is_some();
    let obstruction = search.obstruction.clone().unwrap_or_default();
    criterion(
        3,
        gradable
            && diamond_ok
            && p1 == 11
            && p2 == 11
            && rank == 5
            && agree
            && obstruction.contains("odd volume 11")
            && within(started, Duration::from_secs(1)),
        "22-vertex fixture: gradable diamond graph, volume 11, rank 5, no signature, \
         filter and search agree",
        &format!("parts ({p1},{p2}), rank {rank}, obstruction {obstruction:?}"),
    );
}

#[test]
fn criterion_04_admissible_weights_sweep() {
    let started = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for n in 2..=4 {
        let table = WeightTable::build(n);
        let nonempty = weight::verify_nonempty_iff_admissible(&table);
        let connected = weight::verify_connectivity_and_witnesses(&table).unwrap();
        if !(nonempty.ok && connected.ok) {
            ok = false;
            detail = format!(
                "n = {n}: nonempty {} connected {}",
                nonempty.ok, connected.ok
            );
        }
    }
    let in_time = within(started, Duration::from_secs(60));
    criterion(
        4,
        ok && in_time,
        "admissible weights are exactly the non-empty subgraphs and all subgraphs are \
         connected (n = 2, 3, 4)",
        &format!("{detail}; elapsed {:?}", started.elapsed()),
    );
}

#[test]
fn criterion_05_rank_formula_sweep() {
    let mut ok = true;
    let mut detail = String::new();
    for n in 1..=4 {
        let table = WeightTable::build(n);
        let report = weight::verify_rank_formula(&table).unwrap();
        if !report.ok {
            ok = false;
            detail = format!(
                "n = {n}: {:?}",
                report.lines.iter().filter(|l| !l.ok).collect::<Vec<_>>()
            );
        }
    }
    criterion(
        5,
        ok,
        "closed-form rank equals counted valence and every adjacent shift changes it by i-j-1 (n <= 4)",
        &detail,
    );
}

#[test]
fn criterion_06_free_part_counts() {
    let mut ok = true;
    let mut detail = String::new();
    for n in 2..=3usize {
        let lb = LieBasis::type_a(n);
        let cg = lie::exterior_chain_graph(&lb).unwrap();
        let decomp = lie::component_decomposition(&cg).unwrap();
        let factorial: usize = (1..=n + 1).product();
        let rank_zero = decomp.free_component_count();
        // oracle: Smith-normal-form homology of the undecomposed complex
        let total = cg.homology(Coefficients::Integers);
        let total_free = total.total_free_rank();
        let component_sum = decomp.total_homology();
        if !(rank_zero == factorial && total_free == factorial && component_sum == total) {
            ok = false;
            detail = format!(
                "n = {n}: rank-zero {rank_zero}, total free {total_free}, expected {factorial}, \
                 tables equal {}",
                component_sum == total
            );
        }
    }
    criterion(
        6,
        ok,
        "rank-zero components and the total free rank both count (n+1)! (n = 2, 3), \
         full-complex homology equals the component sum",
        &detail,
    );
}

#[test]
fn criterion_07_torsion_duality_per_component() {
    let lb = LieBasis::type_a(3);
    let cg = lie::exterior_chain_graph(&lb).unwrap();
    let decomp = lie::component_decomposition(&cg).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    let mut checked = 0;
    for entry in &decomp.components {
        if entry.rank == 0 {
            continue;
        }
        checked += 1;
        let report = homology::verify_torsion_duality(&entry.chain).unwrap();
        if !report.ok {
            ok = false;
            detail = format!(
                "component of {}: {:?}",
                entry.chain.graph().id(0),
                report.lines.iter().filter(|l| !l.ok).collect::<Vec<_>>()
            );
        }
    }
    criterion(
        7,
        ok && checked > 0,
        "every positive-rank component has pure-torsion homology with the degree-shift duality",
        &format!("{checked} components checked; {detail}"),
    );
}

#[test]
fn criterion_08_characteristic_square_identity() {
    let lb = LieBasis::type_a(3);
    let cg = lie::exterior_chain_graph(&lb).unwrap();
    let decomp = lie::component_decomposition(&cg).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for entry in &decomp.components {
        let g = entry.chain.graph();
        let chi = connection::characteristic_number(g, entry.chain.nu()).unwrap();
        let volume = if g.len() == 1 {
            0
        } else {
            connection::volume(g, entry.chain.nu()).unwrap()
        };
        if chi.clone() * chi.clone() != BigInt::from(entry.rank).pow(volume as u32) {
            ok = false;
            detail = format!(
                "component of {}: chi {chi}, rank {}, volume {volume}",
                g.id(0),
                entry.rank
            );
        }
    }
    let mut rng = StdRng::seed_from_u64(801);
    for case in 0..200 {
        let chain = random_deformation_chain(&mut rng, 10, true);
        let g = chain.graph();
        let rank = connection::graph_rank(g, chain.nu()).unwrap();
        let volume = if g.len() == 1 {
            0
        } else {
            connection::volume(g, chain.nu()).unwrap()
        };
        let chi = connection::characteristic_number(g, chain.nu()).unwrap();
        if chi.clone() * chi.clone() != BigInt::from(rank).pow(volume as u32) {
            ok = false;
            detail = format!("random case {case}: chi {chi}, rank {rank}, volume {volume}");
        }
    }
    criterion(
        8,
        ok,
        "chi^2 = rank^volume on every weight component and 200 random deformation graphs",
        &detail,
    );
}

#[test]
fn criterion_09_lifting_relations() {
    // the four-cycle fixture
    let cycle = c4_chain("c.", 1, 1);
    let (_, bottoms) = cycle.graded().extreme_vertices();
    let v = cycle.graph().id(bottoms[0]).to_string();
    let report = homology::lift_homology_report(&cycle, &v).unwrap();
    let mut ok = report.report.ok && report.k == BigInt::from(2);
    let mut detail = format!("cycle fixture k = {}", report.k);

    let lb = LieBasis::type_a(3);
    let cg = lie::exterior_chain_graph(&lb).unwrap();
    let decomp = lie::component_decomposition(&cg).unwrap();
    let mut checked = 0;
    for entry in decomp.components.iter().filter(|e| e.rank > 0) {
        if checked == 10 {
            break;
        }
        let (_, bottoms) = entry.chain.graded().extreme_vertices();
        let v = entry.chain.graph().id(bottoms[0]).to_string();
        match homology::lift_homology_report(&entry.chain, &v) {
            Ok(lift) => {
                if !(lift.report.ok && (BigInt::from(entry.rank) % &lift.k).is_zero()) {
                    ok = false;
                    detail = format!("component of {v}: k = {}", lift.k);
                }
            }
            Err(e) => {
                ok = false;
                detail = format!("component of {v}: {e}");
            }
        }
        checked += 1;
    }
    criterion(
        9,
        ok && checked == 10,
        "lifting a bottom vertex satisfies the three divisor relations (cycle fixture and \
         ten positive-rank components)",
        &format!("{checked} components; {detail}"),
    );
}

#[test]
fn criterion_10_product_theorems() {
    let mut ok = true;
    let mut detail = String::new();
    // associated complex of a product equals the tensor complex
    let mut rng = StdRng::seed_from_u64(1001);
    for case in 0..12 {
        let a = random_deformation_chain(&mut rng, 8, true);
        let b = random_deformation_chain(&mut rng, 4, true);
        let p = homology::product(&a, &b).unwrap();
        let t = homology::tensor_complex(&a, &b).unwrap();
        let pc = p.complex();
        let same = pc
            .degrees()
            .collect::<Vec<_>>()
            .into_iter()
            .all(|k| pc.basis(k) == t.basis(k) && pc.boundary(k) == t.boundary(k));
        if !same {
            ok = false;
            detail = format!("tensor mismatch in case {case}");
        }
    }
    // orthogonal products against product-graph representation matrices
    let opts = EquivalenceOptions::default();
    for case in 0..24 {
        let a = random_deformation_chain(&mut rng, 6, false);
        let b = random_deformation_chain(&mut rng, 6, false);
        let ra = connection::representation_matrix(a.graph(), a.nu()).unwrap();
        let rb = connection::representation_matrix(b.graph(), b.nu()).unwrap();
        let ortho = orthogonal_product(&ra, &rb).unwrap();
        let product = homology::product(&a, &b).unwrap();
        let rp = connection::representation_matrix(product.graph(), product.nu()).unwrap();
        match matrices_equivalent(&ortho.mat, &rp.mat, opts).unwrap() {
            Equivalence::Equivalent(w) => {
                if apply_moves(&ortho.mat, &w.moves).unwrap() != rp.mat {
                    ok = false;
                    detail = format!("witness replay failed in case {case}");
                }
            }
            Equivalence::Partial { invariants_match } => {
                if !invariants_match {
                    ok = false;
                    detail = format!("invariants differ in case {case}");
                }
            }
            Equivalence::NotEquivalent => {
                ok = false;
                detail = format!("inequivalent matrices in case {case}");
            }
        }
    }
    // reducible weights of the n = 4 table factor as products
    let table = WeightTable::build(4);
    let reducibles = weight::verify_reducible_products(&table).unwrap();
    if !reducibles.ok {
        ok = false;
        detail = format!(
            "reducible weights: {:?}",
            reducibles
                .lines
                .iter()
                .filter(|l| !l.ok)
                .collect::<Vec<_>>()
        );
    }
    // degenerate factor insertions reproduce the base subgraphs
    let collapse = weight::verify_collapse_rules(&table, &WeightTable::build(3)).unwrap();
    if !collapse.ok {
        ok = false;
        detail = format!(
            "collapse rules: {:?}",
            collapse.lines.iter().filter(|l| !l.ok).collect::<Vec<_>>()
        );
    }
    criterion(
        10,
        ok,
        "tensor complexes, orthogonal products and reducible-weight factorizations all match",
        &detail,
    );
}

#[test]
fn criterion_11_global_dimension_invariance() {
    let mut rng = StdRng::seed_from_u64(1101);
    let mut ok = true;
    let mut detail = String::new();
    for case in 0..100 {
        let cg = random_deformation_union(&mut rng, 12);
        let rep = connection::representation_matrix(cg.graph(), cg.nu()).unwrap();
        let d = global_dimension(&rep);
        for walk in 0..5 {
            let steps = rng.random_range(0..8);
            let walked = random_gradation_walk(&mut rng, &cg, steps);
            let free = walked.homology(Coefficients::Integers).total_free_rank();
            if free != d {
                ok = false;
                detail = format!("case {case} walk {walk}: D = {d}, free rank = {free}");
            }
        }
    }
    criterion(
        11,
        ok,
        "representation-matrix global dimension equals the total free rank under five \
         equivalent gradations each, 100 random graphs",
        &detail,
    );
}

#[test]
fn criterion_12_root_system_axioms_and_classification() {
    let mut ok = true;
    let mut detail = String::new();
    for n in 1..=4 {
        let report = lie::is_diamond_root_system(&LieBasis::type_a(n)).unwrap();
        if !report.ok {
            ok = false;
            detail = format!("matrix algebra n = {n}: {:?}", report.first_violation);
        }
    }
    // the symplectic fixture is a genuine Lie algebra but fails the axioms
    let file = sp6_structure_constants();
    let text = serde_json::to_string(&file).unwrap();
    let parsed: gad::io::StructureConstantsFile = serde_json::from_str(&text).unwrap();
    let lb = LieBasis::from_file(&parsed).unwrap();
    let jacobi = lie::validate_lie(&lb);
    let axioms = lie::is_diamond_root_system(&lb).unwrap();
    let fails_at_two = matches!(axioms.first_violation, Some((2, _)));
    if !(jacobi.ok && !axioms.ok && fails_at_two) {
        ok = false;
        detail = format!(
            "symplectic fixture: jacobi {}, axioms {:?}",
            jacobi.ok, axioms.first_violation
        );
    }
    // every diamond of the 64-vertex exterior graph gets exactly one label
    let lb3 = LieBasis::type_a(3);
    let cg = lie::exterior_chain_graph(&lb3).unwrap();
    let diamonds = diamond::enumerate_diamonds(cg.graph()).unwrap();
    let mut counts = std::collections::BTreeMap::new();
    for dm in &diamonds {
        match lie::classify_diamond(&lb3, dm) {
            Ok(t) => *counts.entry(t.tag()).or_insert(0usize) += 1,
            Err(e) => {
                ok = false;
                detail = format!("{dm:?}: {e}");
            }
        }
    }
    criterion(
        12,
        ok && !diamonds.is_empty(),
        "matrix algebras pass the root-system axioms, the symplectic fixture fails at the \
         unit-coefficient axiom, and every diamond classifies uniquely",
        &format!("{} diamonds by type {counts:?}; {detail}", diamonds.len()),
    );
}

#[test]
fn criterion_13_field_vanishing_and_torsion_exclusion() {
    let lb = LieBasis::type_a(3);
    let cg = lie::exterior_chain_graph(&lb).unwrap();
    let decomp = lie::component_decomposition(&cg).unwrap();
    let mut ok = true;
    let mut detail = String::new();
    for p in [2u64, 3, 5] {
        let report = lie::torsion_exclusion_check(&decomp, p).unwrap();
        if !report.ok {
            ok = false;
            detail = format!(
                "p = {p}: {:?}",
                report.lines.iter().filter(|l| !l.ok).collect::<Vec<_>>()
            );
        }
        for entry in decomp.components.iter().filter(|e| e.rank > 0) {
            if entry.rank % p == 0 {
                continue;
            }
            let vanish = homology::field_vanishing_check(&entry.chain, p).unwrap();
            if !vanish.ok {
                ok = false;
                detail = format!(
                    "vanishing fails for p = {p} at {}",
                    entry.chain.graph().id(0)
                );
            }
        }
    }
    criterion(
        13,
        ok,
        "mod-p dimensions equal free ranks and positive-rank components vanish over fields \
         away from the rank (p = 2, 3, 5)",
        &detail,
    );
}
