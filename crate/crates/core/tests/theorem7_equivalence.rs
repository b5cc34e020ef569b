//! The fixed-point/H-degree equivalences: over a structured family of
//! blocks, the degree of H drops below i exactly when the chain conditions
//! hold from index i up, and H vanishes identically exactly at the fixed
//! point, where the average sequence is constant.

use orbit_core::averages::{
    brute_force_average, expand_average_block, expand_average_system, fixed_point, h_polynomial,
    theorem7_condition, AvgBlockExpansion, HRule,
};
use orbit_core::jordan::{nilpotent_index, BlockVector, JordanSystem};
use orbit_core::sampling::fixed_point_perturbation_family;
use orbit_core::Scalar;

#[test]
fn h_degree_matches_the_chain_conditions() {
    let family = fixed_point_perturbation_family();
    assert!(family.len() >= 100, "family has {} blocks", family.len());
    let mut checked_blocks = 0;
    for (idx, case) in family.iter().enumerate() {
        let s = nilpotent_index(&case.x);
        let t = nilpotent_index(&case.c);
        let expansion = expand_average_block(&case.block, &case.x, &case.c);
        let g = match &expansion {
            AvgBlockExpansion::Geometric(g) => g,
            AvgBlockExpansion::Unit(_) => panic!("family excludes lambda = 1"),
        };
        let analysis = h_polynomial(g).unwrap();

        if s != t {
            // perturbation degenerated the x chain: H is governed by a
            // dominant-coefficient rule and x cannot be the fixed point
            assert_ne!(analysis.rule, HRule::Degree, "case {idx}");
            assert!(case.perturbed.is_some(), "case {idx}");
            continue;
        }

        // s = t: the paper's H. For x = fixed point, H vanishes; for a
        // perturbation along e_q the degree is exactly q.
        match case.perturbed {
            None => assert!(analysis.h.is_identically_zero(), "case {idx}: H at the fixed point"),
            Some(q) => {
                assert_eq!(analysis.h.degree(), Some(q), "case {idx}: H degree");
            }
        }

        // deg H <= i-1 if and only if condition (i) holds, for every i,
        // and condition (i) implies all higher conditions.
        let deg: i64 = analysis.h.degree().map(|d| d as i64).unwrap_or(-1);
        for i in 1..t {
            let cond = theorem7_condition(&case.block, &case.x, &case.c, i).unwrap();
            assert_eq!(deg <= i as i64 - 1, cond, "case {idx}: condition at i={i}");
            if cond {
                for l in i..t {
                    assert!(
                        theorem7_condition(&case.block, &case.x, &case.c, l).unwrap(),
                        "case {idx}: condition at l={l} implied by i={i}"
                    );
                }
            }
        }
        checked_blocks += 1;
    }
    assert!(checked_blocks >= 100, "only {checked_blocks} s = t blocks checked");
}

#[test]
fn h_vanishes_exactly_at_the_fixed_point() {
    for (idx, case) in fixed_point_perturbation_family().iter().enumerate() {
        let sys = JordanSystem::new(
            vec![case.block.clone()],
            BlockVector { segments: vec![case.c.clone()] },
            BlockVector { segments: vec![case.x.clone()] },
        )
        .unwrap();
        let star = fixed_point(&sys).unwrap();
        let at_fixed_point = star.segments[0] == case.x;
        assert_eq!(at_fixed_point, case.perturbed.is_none(), "case {idx}");

        let expansion = expand_average_block(&case.block, &case.x, &case.c);
        if let AvgBlockExpansion::Geometric(g) = &expansion {
            let analysis = h_polynomial(g).unwrap();
            assert_eq!(
                analysis.h.is_identically_zero() && analysis.rule == HRule::Degree,
                at_fixed_point,
                "case {idx}: H vanishes iff x is the fixed point"
            );
        }
    }
}

#[test]
fn averages_at_the_fixed_point_equal_e_for_every_k() {
    for case in fixed_point_perturbation_family().iter().filter(|c| c.perturbed.is_none()) {
        let sys = JordanSystem::new(
            vec![case.block.clone()],
            BlockVector { segments: vec![case.c.clone()] },
            BlockVector { segments: vec![case.x.clone()] },
        )
        .unwrap();
        let e = match &expand_average_system(&sys).blocks[0] {
            AvgBlockExpansion::Geometric(g) => g.e.clone(),
            _ => unreachable!(),
        };
        assert_eq!(e, case.x, "E is the fixed point itself");
        // definitional averages: exactly E at every k
        let trace = brute_force_average(&sys, 40).unwrap();
        for (k0, ave) in trace.averages.iter().enumerate() {
            assert_eq!(ave.segments[0], e, "oracle average at k={}", k0 + 1);
        }
        // closed form agrees on its validity range
        let expansion = expand_average_system(&sys);
        for k in expansion.valid_from()..=40 {
            assert_eq!(expansion.eval(k as i64, &sys).unwrap().segments[0], e);
        }
    }
}

#[test]
fn g_factorizes_through_h_on_s_equals_t_blocks() {
    let mut checked = 0;
    for case in fixed_point_perturbation_family() {
        let s = nilpotent_index(&case.x);
        let t = nilpotent_index(&case.c);
        if s != t || s == 0 {
            continue;
        }
        let expansion = expand_average_block(&case.block, &case.x, &case.c);
        let g = match &expansion {
            AvgBlockExpansion::Geometric(g) => g,
            _ => unreachable!(),
        };
        let analysis = h_polynomial(g).unwrap();
        let size = case.c.len();
        for k in expansion.valid_from() as i64..expansion.valid_from() as i64 + 20 {
            let direct = expansion.eval_g(k).unwrap();
            let factor = &case.block.lambda.pow(k).unwrap() / &Scalar::from_int(k);
            let via_h: Vec<Scalar> = analysis
                .h
                .eval(k, size)
                .iter()
                .map(|h| h * &factor)
                .collect();
            assert_eq!(direct, via_h, "k={k}");
        }
        checked += 1;
        if checked >= 30 {
            break;
        }
    }
    assert!(checked >= 20);
}
