//! Library values against closed forms computed here by hand, independent of
//! the realization machinery. For the Blaschke factor `b(μ) = (μ − 1)/(μ + 1)`:
//! `K_o(μ, λ) = 2/((μ + 1)(λ̄ + 1))`, `K_c` the same, and the off-diagonal
//! kernel entry is `−2/((μ + 1)(λ̄* + 1))`.

use dbr_core::corpus;
use dbr_core::kernel::{k_c, k_o, k_s};
use dbr_core::linalg::c;
use dbr_core::model::{apply, control_section, resolvent};
use dbr_core::past_future::cross_gram;
use dbr_core::realize::{bilateral_image, iso_resolvent};
use dbr_core::sampling::Sampler;
use dbr_core::schur::SchurJson;
use dbr_core::span::{evaluate, gram, norm, SectionJson};
use dbr_core::{CVector, KernelPoint, Section, SpanElement, StateSpaceSchur, C64};

fn b_closed(mu: C64) -> C64 {
    (mu - 1.0) / (mu + 1.0)
}

fn one(v: f64) -> CVector {
    CVector::from_element(1, c(v, 0.0))
}

#[test]
fn blaschke_matches_closed_form() {
    let b = StateSpaceSchur::blaschke();
    let mut s = Sampler::new(1);
    for _ in 0..10 {
        let mu = s.half_plane_point();
        assert!((b.eval(mu).unwrap()[(0, 0)] - b_closed(mu)).norm() < 1e-15);
    }
}

#[test]
fn blaschke_kernel_blocks_match_closed_form() {
    let b = StateSpaceSchur::blaschke();
    let mut s = Sampler::new(2);
    for _ in 0..10 {
        let (mu, la) = (s.kernel_point(), s.kernel_point());
        let k = k_s(&b, mu, la).unwrap();
        let ko = 2.0 / ((mu.lambda + 1.0) * (la.lambda.conj() + 1.0));
        let kc = 2.0 / ((mu.lambda_star + 1.0) * (la.lambda_star.conj() + 1.0));
        let k12 = -2.0 / ((mu.lambda + 1.0) * (la.lambda_star.conj() + 1.0));
        let k21 = -2.0 / ((mu.lambda_star + 1.0) * (la.lambda.conj() + 1.0));
        assert!((k.k11[(0, 0)] - ko).norm() < 1e-14);
        assert!((k.k22[(0, 0)] - kc).norm() < 1e-14);
        assert!((k.k12[(0, 0)] - k12).norm() < 1e-14);
        assert!((k.k21[(0, 0)] - k21).norm() < 1e-14);
        assert!((k_o(&b, mu.lambda, la.lambda).unwrap()[(0, 0)] - ko).norm() < 1e-14);
        assert!((k_c(&b, mu.lambda_star, la.lambda_star).unwrap()[(0, 0)] - kc).norm() < 1e-14);
    }
}

#[test]
fn all_ones_block_and_gram() {
    let b = StateSpaceSchur::blaschke();
    let p = KernelPoint::diagonal(c(1.0, 0.0)).unwrap();
    let k = k_s(&b, p, p).unwrap().to_matrix();
    let want = [[0.5, -0.5], [-0.5, 0.5]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((k[(i, j)] - c(want[i][j], 0.0)).norm() < 1e-15);
        }
    }
    let g = gram(
        &b,
        &[
            (p, CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])),
            (p, CVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)])),
        ],
    )
    .unwrap();
    assert!((g - k).norm() < 1e-15);
}

#[test]
fn section_values_and_norm() {
    let b = StateSpaceSchur::blaschke();
    let p = KernelPoint::diagonal(c(1.0, 0.0)).unwrap();
    let x = SpanElement::single(Section::new(p, one(1.0), one(0.0)));
    let mut s = Sampler::new(3);
    for _ in 0..5 {
        let at = s.kernel_point();
        let v = evaluate(&b, &x, at).unwrap();
        assert!((v[0] - 1.0 / (at.lambda + 1.0)).norm() < 1e-15);
        assert!((v[1] + 1.0 / (at.lambda_star + 1.0)).norm() < 1e-15);
    }
    assert!((norm(&b, &x).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn model_action_on_all_ones_section() {
    // z is the [−1; 0]-section at the same point, i.e. z = −x; u = b(1) = 0 and y = 1.
    let b = StateSpaceSchur::blaschke();
    let p = KernelPoint::diagonal(c(1.0, 0.0)).unwrap();
    let x = SpanElement::single(Section::new(p, one(1.0), one(0.0)));
    let pair = apply(&b, &x).unwrap();
    assert!(pair.u[0].norm() < 1e-15 && (pair.y[0] - 1.0).norm() < 1e-15);
    let at = KernelPoint::new(c(2.0, 0.0), c(2.0, 0.0)).unwrap();
    let z = evaluate(&b, &pair.z, at).unwrap();
    let x_at = evaluate(&b, &x, at).unwrap();
    assert!((z + &x_at).norm() < 1e-15);
    assert!((x_at[1] + 1.0 / 3.0).norm() < 1e-15);
}

#[test]
fn control_section_and_resolvent_closed_form() {
    // The control section is K_s(·,(·,ᾱ))[0; 1]: entries K₁₂(μ, ᾱ) and K₂₂(μ*, ᾱ).
    let b = StateSpaceSchur::blaschke();
    let alpha = c(2.0, 0.5);
    let cs = control_section(&b, alpha, &one(1.0)).unwrap();
    let mut s = Sampler::new(4);
    for _ in 0..5 {
        let at = s.kernel_point();
        let v = evaluate(&b, &cs, at).unwrap();
        let w1 = -2.0 / ((at.lambda + 1.0) * (alpha + 1.0));
        let w2 = 2.0 / ((at.lambda_star + 1.0) * (alpha + 1.0));
        assert!((v[0] - w1).norm() < 1e-14, "{v} vs {w1}");
        assert!((v[1] - w2).norm() < 1e-14);
    }
    let p = KernelPoint::diagonal(c(1.0, 0.0)).unwrap();
    let x = SpanElement::single(Section::new(p, one(1.0), one(0.0)));
    let r = resolvent(&b, c(2.0, 0.0), &x).unwrap();
    assert!((evaluate(&b, &r, p).unwrap()[0] - 1.0 / 6.0).norm() < 1e-15);
}

#[test]
fn state_space_values_for_blaschke() {
    let b = StateSpaceSchur::blaschke();
    let s = iso_resolvent(&b, c(2.0, 0.0)).unwrap();
    let r = 2f64.sqrt();
    assert!((s.xx[(0, 0)] - 1.0 / 3.0).norm() < 1e-15);
    assert!((s.xu[(0, 0)] - r / 3.0).norm() < 1e-15);
    assert!((s.yx[(0, 0)] + r / 3.0).norm() < 1e-15);
    assert!((s.yu[(0, 0)] - b_closed(c(2.0, 0.0))).norm() < 1e-15);

    let p = KernelPoint::diagonal(c(1.0, 0.0)).unwrap();
    let state = bilateral_image(&b, &Section::new(p, one(1.0), one(0.0))).unwrap();
    assert!((state[0] + r / 2.0).norm() < 1e-15);
    let x = cross_gram(&b, &[(c(1.0, 0.0), one(1.0))], &[(c(1.0, 0.0), one(1.0))]).unwrap();
    assert!((x[(0, 0)] + 0.5).norm() < 1e-15);
}

#[test]
fn json_round_trips() {
    for e in corpus::full().unwrap() {
        let text = serde_json::to_string(&e.phi.to_json()).unwrap();
        let back =
            StateSpaceSchur::from_json(&serde_json::from_str::<SchurJson>(&text).unwrap()).unwrap();
        assert_eq!(back, e.phi, "{}", e.name);
    }
    let mut s = Sampler::new(5);
    let x = s.span(2, 1, 4);
    let items: Vec<SectionJson> =
        serde_json::from_str(&serde_json::to_string(&x.to_json().unwrap()).unwrap()).unwrap();
    assert_eq!(SpanElement::from_json(&items).unwrap(), x);
}

#[test]
fn direct_sum_kernel_is_block_diagonal() {
    let e = corpus::direct_sum().unwrap();
    let mut s = Sampler::new(6);
    let (mu, la) = (s.kernel_point(), s.kernel_point());
    let k = k_s(&e.phi, mu, la).unwrap();
    assert!(k.k11[(0, 1)].norm() < 1e-15 && k.k11[(1, 0)].norm() < 1e-15);
    let kb = k_s(&StateSpaceSchur::blaschke(), mu, la).unwrap();
    assert!((k.k11[(0, 0)] - kb.k11[(0, 0)]).norm() < 1e-14);
}
