use super::*;
use crate::group::{GroupElement, GroupModel};
use crate::walk::measure::SparseMeasure;

fn f2() -> GroupModel {
    GroupModel::free_group(2).unwrap()
}

fn zz_t() -> GroupModel {
    GroupModel::free_product(vec![
        GroupModel::free_abelian(2).unwrap(),
        GroupModel::free_abelian(1).unwrap(),
    ])
    .unwrap()
}

fn f2_engine() -> GreenEngine {
    let mu = SparseMeasure::uniform_generators(f2()).unwrap();
    GreenEngine::new(mu, GreenParams::default()).unwrap()
}

fn zz_engine() -> GreenEngine {
    let mu = SparseMeasure::uniform_generators(zz_t()).unwrap();
    GreenEngine::new(mu, GreenParams::default()).unwrap()
}

/// First-passage oracle for the F₂ SRW: F solves 3F² − 4F + 1 = 0, F = 1/3.
fn f2_first_passage_oracle() -> f64 {
    let (a, b, c) = (3.0f64, -4.0, 1.0);
    (-b - (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
}

#[test]
fn f2_green_closed_forms() {
    let eng = f2_engine();
    let m = f2();
    let f = f2_first_passage_oracle();
    assert!((f - 1.0 / 3.0).abs() < 1e-15);
    let gee_oracle = 1.0 / (1.0 - f); // U = 4·(1/4)·F = F
    assert!((gee_oracle - 1.5).abs() < 1e-15);

    assert_eq!(eng.kind(), EngineKind::Factorized);
    assert!((eng.green_ee() - 1.5).abs() < 1e-6);
    let a = m.parse_word("a").unwrap();
    let est = eng.green_value(&m.identity(), &a, 60).unwrap();
    assert!((est.value - 0.5).abs() < 1e-6, "G(e,a) = {}", est.value);
    assert!((eng.green_distance(&m.identity(), &a).unwrap() - 3f64.ln()).abs() < 1e-5);
    let ab = m.parse_word("ab").unwrap();
    assert!((eng.distance_from_e(&ab).unwrap() - 2.0 * 3f64.ln()).abs() < 1e-5);
    // d_G = (log 3)·d_w across the radius-5 ball
    let ball = m.cayley_ball(5).unwrap();
    for g in ball.elements() {
        let dw = ball.distance(g).unwrap() as f64;
        let dg = eng.distance_from_e(g).unwrap();
        assert!((dg - 3f64.ln() * dw).abs() < 1e-5, "dev at {g:?}");
    }
}

#[test]
fn green_estimate_bracketing() {
    let eng = f2_engine();
    let m = f2();
    for w in ["e", "a", "ab", "a^3 b A"] {
        let g = m.parse_word(w).unwrap();
        let est = eng.green_value(&m.identity(), &g, 60).unwrap();
        assert!(est.value > 0.0);
        assert!(est.truncation_lower_bound <= est.value + 1e-15);
        assert!(est.value <= est.truncation_lower_bound + est.tail_estimate + 1e-12);
        assert!(est.tail_reliable);
    }
    // N = 0: only the empty path
    let est0 = eng.green_value(&m.identity(), &m.identity(), 0).unwrap();
    assert_eq!(est0.truncation_lower_bound, 1.0);
    let esta = eng
        .green_value(&m.identity(), &m.parse_word("a").unwrap(), 0)
        .unwrap();
    assert_eq!(esta.truncation_lower_bound, 0.0);
}

#[test]
fn green_symmetric_bounds() {
    let eng = f2_engine();
    let m = f2();
    assert!(eng.green_ee() >= 1.0);
    let ball = m.cayley_ball(4).unwrap();
    for g in ball.elements() {
        let v = eng.green_value(&m.identity(), g, 60).unwrap().value;
        assert!(v <= eng.green_ee() + 1e-12);
    }
}

#[test]
fn ancona_tree_exact() {
    let eng = f2_engine();
    let m = f2();
    let e = m.identity();
    // y = x cancels exactly
    let x = m.parse_word("ab").unwrap();
    let r = ancona_ratio(&eng, &x, &x, &m.parse_word("abab").unwrap()).unwrap();
    assert!((r - 1.0).abs() < 1e-10);
    // triples along geodesics in the radius-6 ball
    let ball = m.cayley_ball(6).unwrap();
    for (i, z) in ball.elements().iter().enumerate() {
        if z.is_identity() || i % 7 != 0 {
            continue;
        }
        if let GroupElement::Word(w) = z {
            let y = GroupElement::Word(w[..w.len() / 2].to_vec());
            let r = ancona_ratio(&eng, &e, &y, z).unwrap();
            assert!((r - 1.0).abs() <= 1e-4, "ancona {r} at {z:?}");
        }
    }
}

#[test]
fn zz_fixed_point_frozen_values() {
    // frozen from the independent self-consistency computation:
    // F1 = P(e→e1) and Ft = P(e→t) solve the excursion fixed point
    let eng = zz_engine();
    let m = zz_t();
    let e = m.identity();
    let f1 = eng.first_passage(&e, &m.parse_word("a").unwrap()).unwrap();
    let ft = eng.first_passage(&e, &m.parse_word("c").unwrap()).unwrap();
    assert!((f1 - 0.219879929085).abs() < 1e-8, "F1 = {f1}");
    assert!((ft - 0.203371544764).abs() < 1e-8, "Ft = {ft}");
    assert!((eng.green_ee() - 1.272875375291).abs() < 1e-8);
    // the converged weights satisfy their own equations
    let alphas = eng.excursion_weights().unwrap();
    assert!((alphas[0] - (2.0 / 6.0) * ft).abs() < 1e-12);
    assert!((alphas[1] - (4.0 / 6.0) * f1).abs() < 1e-12);
}

#[test]
fn zz_ancona_ratios_decreasing() {
    let eng = zz_engine();
    let m = zz_t();
    let e = m.identity();
    let frozen = [
        (4, 0.575684128),
        (6, 0.459024086),
        (8, 0.392184725),
        (10, 0.348482937),
        (12, 0.317028823),
    ];
    let mut prev = f64::INFINITY;
    for (mm, expect) in frozen {
        let y = m.parse_word(&format!("a^{mm}")).unwrap();
        let z = m.parse_word(&format!("a^{}", 2 * mm)).unwrap();
        let r = ancona_ratio(&eng, &e, &y, &z).unwrap();
        assert!((r - expect).abs() < 2e-3, "m={mm}: {r} vs {expect}");
        assert!(r < prev, "not decreasing at m={mm}");
        prev = r;
    }
}

#[test]
fn direct_engine_cross_validates_factorized() {
    // Z²∗Z within radius 2: radius-capped truncated convolution agrees
    let mu = SparseMeasure::uniform_generators(zz_t()).unwrap();
    let params = GreenParams { truncation: 100, radius_cap: 7, ..GreenParams::default() };
    let fact = GreenEngine::new(mu.clone(), params).unwrap();
    let m = zz_t();
    for w in ["a", "ab", "ac", "c"] {
        let g = m.parse_word(w).unwrap();
        let d = fact.direct_green_e(&g).unwrap();
        let f = (fact.log_green_e(&g).unwrap()).exp();
        assert!((d - f).abs() / f < 5e-3, "at {w}: direct {d} vs {f}");
    }
}

#[test]
fn translation_lengths() {
    let eng = f2_engine();
    let m = f2();
    let ab = m.parse_word("ab").unwrap();
    let t = translation_length(&eng, &ab, TranslationMetric::Word, 12).unwrap();
    assert_eq!(t.value, 2.0);
    assert_eq!(t.exact_word, Some(2));
    assert_eq!(t.rational, (2, 1));

    let conj = m.parse_word("abA").unwrap();
    let t = translation_length(&eng, &conj, TranslationMetric::Word, 12).unwrap();
    assert_eq!(t.exact_word, Some(1));

    let a = m.parse_word("a").unwrap();
    let t = translation_length(&eng, &a, TranslationMetric::Green, 12).unwrap();
    assert!((t.value - 3f64.ln()).abs() < 1e-3, "l^G(a) = {}", t.value);
    let ai = m.parse_word("A").unwrap();
    let ti = translation_length(&eng, &ai, TranslationMetric::Green, 12).unwrap();
    assert!((t.value - ti.value).abs() < 1e-9);

    // torsion and factor-conjugate elements are rejected
    let zc = GroupModel::free_product(vec![
        GroupModel::finite_cyclic(4).unwrap(),
        GroupModel::free_abelian(1).unwrap(),
    ])
    .unwrap();
    let muc = SparseMeasure::uniform_generators(zc.clone()).unwrap();
    let engc = GreenEngine::new(muc, GreenParams::default()).unwrap();
    let a_tors = zc.parse_word("a").unwrap();
    assert!(matches!(
        translation_length(&engc, &a_tors, TranslationMetric::Word, 8),
        Err(crate::error::Error::Torsion(_)) | Err(crate::error::Error::NotLoxodromic(_))
    ));
    let ac = zc.parse_word("ab").unwrap();
    let t = translation_length(&engc, &ac, TranslationMetric::Word, 8).unwrap();
    assert_eq!(t.exact_word, Some(2));
}

#[test]
fn naim_kernel_tree_values() {
    let eng = f2_engine();
    let m = f2();
    let a_minus = BoundaryRay::new(&m, m.identity(), m.parse_word("A").unwrap()).unwrap();
    let b_plus = BoundaryRay::new(&m, m.identity(), m.parse_word("b").unwrap()).unwrap();
    let a_plus = BoundaryRay::new(&m, m.identity(), m.parse_word("a").unwrap()).unwrap();

    let th = naim_kernel(&eng, &a_minus, &b_plus, &DEFAULT_DEPTHS, 1e-3).unwrap();
    assert!((th.value - 2.0 / 3.0).abs() < 1e-3, "theta = {}", th.value);
    assert!(th.stabilized);
    assert!(th.diagnostic >= 0.0);

    // geodesic through e: same value
    let th2 = naim_kernel(&eng, &a_minus, &a_plus, &DEFAULT_DEPTHS, 1e-3).unwrap();
    assert!((th2.value - 2.0 / 3.0).abs() < 1e-3);

    // degenerate pair
    assert!(naim_kernel(&eng, &a_plus, &a_plus, &DEFAULT_DEPTHS, 1e-3).is_err());
}

#[test]
fn cross_ratio_tree_values() {
    let eng = f2_engine();
    let m = f2();
    let a_plus = BoundaryRay::new(&m, m.identity(), m.parse_word("a").unwrap()).unwrap();
    let a_minus = BoundaryRay::new(&m, m.identity(), m.parse_word("A").unwrap()).unwrap();
    let b_plus = BoundaryRay::new(&m, m.identity(), m.parse_word("b").unwrap()).unwrap();
    let b_minus = BoundaryRay::new(&m, m.identity(), m.parse_word("B").unwrap()).unwrap();

    // ξ3 = ξ4 → exactly 1
    let cr = cross_ratio(&eng, [&a_minus, &b_minus, &a_plus, &a_plus], &[8], 1e-3).unwrap();
    assert_eq!(cr.value, 1.0);

    // [a⁻, b⁻, a⁺, b⁺] = 1 (all four Naim kernels equal on the tree)
    let cr = cross_ratio(&eng, [&a_minus, &b_minus, &a_plus, &b_plus], &DEFAULT_DEPTHS, 0.05)
        .unwrap();
    assert!((cr.value - 1.0).abs() < 0.05, "cr = {}", cr.value);

    // [a⁻, a⁺, a·ξ₀, ξ₀] = e^{−2·l_G(a)} = 1/9
    let xi0 = b_plus.clone();
    let a_xi0 = xi0.translated(&m, &m.parse_word("a").unwrap()).unwrap();
    let cr = cross_ratio(&eng, [&a_minus, &a_plus, &a_xi0, &xi0], &DEFAULT_DEPTHS, 0.05).unwrap();
    assert!((cr.value - 1.0 / 9.0).abs() < 0.05 / 9.0 * 5.0, "cr = {}", cr.value);
}

#[test]
fn boundary_identities_f2() {
    let eng = f2_engine();
    let m = f2();
    let a = m.parse_word("a").unwrap();
    let b = m.parse_word("b").unwrap();
    let xi0 = BoundaryRay::new(&m, m.identity(), b.clone()).unwrap();
    let quad = QuadrupleSpec {
        x: BoundaryRay::new(&m, m.identity(), m.parse_word("A").unwrap()).unwrap(),
        y: BoundaryRay::new(&m, m.identity(), a.clone()).unwrap(),
        x_prime: BoundaryRay::new(&m, m.identity(), m.parse_word("A").unwrap()).unwrap(),
        y_prime: BoundaryRay::new(&m, m.identity(), a.clone()).unwrap(),
    };
    let report = boundary_identity_audit(&eng, &a, &b, &xi0, 12, Some(&quad)).unwrap();
    // e^{-2 l_G(a)} = 1/9 and the cross-ratio agrees within 5%
    let (_, lhs, rhs) = report.translation_identity.last().unwrap();
    assert!((lhs - 1.0 / 9.0).abs() < 1e-3, "lhs {lhs}");
    assert!(((rhs - lhs) / lhs).abs() < 0.05, "rhs {rhs}");
    // exponent → 0, cross-ratio → 1
    for (_, exponent, cr) in &report.pair_identity {
        assert!(exponent.abs() < 1e-6, "exponent {exponent}");
        assert!((cr - 1.0).abs() < 0.05);
    }
    // identical sequences: quadruple ratio exactly 1
    for (_, r) in &report.quadruple_ratios {
        assert!((r - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rough_similarity_audits() {
    let eng = f2_engine();
    let audit = rough_similarity_audit(&eng, 5).unwrap();
    assert!(audit.max_deviation <= 1e-4, "F2 deviation {}", audit.max_deviation);
    assert!(audit.ancona_min > 1.0 - 1e-4 && audit.ancona_max < 1.0 + 1e-4);

    let audit0 = rough_similarity_audit(&eng, 0).unwrap();
    assert_eq!(audit0.max_deviation, 0.0);

    // Z²∗Z: no uniform rough-similarity constant — deviation grows in radius
    let engz = zz_engine();
    let auditz = rough_similarity_audit(&engz, 6).unwrap();
    let by_r = &auditz.max_deviation_by_radius;
    assert!(by_r[6].1 > by_r[3].1, "deviation should grow: {by_r:?}");
}

#[test]
fn green_triangle_inequality_sampled() {
    let eng = zz_engine();
    let m = zz_t();
    let ball = m.cayley_ball(3).unwrap();
    let els = ball.elements();
    let step = els.len() / 11 + 1;
    let mut idx = 0usize;
    for _ in 0..200 {
        let x = &els[idx % els.len()];
        let y = &els[(idx + step) % els.len()];
        let z = &els[(idx + 2 * step) % els.len()];
        idx += 3 * step + 1;
        let dxz = eng.green_distance(x, z).unwrap();
        let dxy = eng.green_distance(x, y).unwrap();
        let dyz = eng.green_distance(y, z).unwrap();
        assert!(dxz <= dxy + dyz + 1e-9, "triangle violated");
    }
}

#[test]
fn quasi_isometry_window() {
    let eng = zz_engine();
    let m = zz_t();
    let ball = m.cayley_ball(5).unwrap();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for g in ball.elements() {
        if g.is_identity() {
            continue;
        }
        let ratio = eng.distance_from_e(g).unwrap() / ball.distance(g).unwrap() as f64;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    assert!(lo > 0.5, "lower QI bound {lo}");
    assert!(hi < 3.0, "upper QI bound {hi}");
}

#[test]
fn amenable_models_flagged() {
    let z2 = GroupModel::free_abelian(2).unwrap();
    let mu = SparseMeasure::uniform_generators(z2.clone()).unwrap();
    let eng = GreenEngine::new(mu, GreenParams::default()).unwrap();
    assert!(!eng.tail_reliable());
    let est = eng
        .green_value(&z2.identity(), &z2.identity(), 50)
        .unwrap();
    assert!(!est.tail_reliable);
}

#[test]
fn lazy_transform_doubles_green() {
    // paper device: μ̃ = ½δ_e + ½μ gives G̃ = 2G
    let mu = SparseMeasure::uniform_generators(f2()).unwrap();
    let eng = GreenEngine::new(mu.clone(), GreenParams::default()).unwrap();
    let lazy_params = GreenParams { lazy: true, ..GreenParams::default() };
    let eng_lazy = GreenEngine::new(mu, lazy_params).unwrap();
    assert!((eng_lazy.green_ee() - 2.0 * eng.green_ee()).abs() < 1e-6);
    let m = f2();
    let g = m.parse_word("ab").unwrap();
    let v = eng.green_value(&m.identity(), &g, 80).unwrap().value;
    let vl = eng_lazy.green_value(&m.identity(), &g, 80).unwrap().value;
    assert!((vl - 2.0 * v).abs() < 1e-6);
}
