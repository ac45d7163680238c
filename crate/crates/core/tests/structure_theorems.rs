use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use structinfo::entropy::{
    conditional_entropy_cols_given_rows, entropy, kl_divergence, mutual_information,
};
use structinfo::notions::{d_kl_s, h_s, h_s_via_q, Direction, StructuredJoint};
use structinfo::random::{random_distribution, random_joint, random_structure};
use structinfo::{Alphabet, Distribution, JointDistribution, PartitionStructure};

struct JointCase {
    joint: JointDistribution,
    sa: PartitionStructure,
    sb: PartitionStructure,
}

fn joint_case(seed: u64, n: usize, m: usize) -> JointCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Alphabet::indexed(n).unwrap();
    let b = Alphabet::new((0..m).map(|i| format!("b{i}"))).unwrap();
    JointCase {
        joint: random_joint(a.clone(), b.clone(), &mut rng).unwrap(),
        sa: random_structure(a, 4, &mut rng).unwrap(),
        sb: random_structure(b, 4, &mut rng).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn chain_rule_and_mutual_information(seed in any::<u64>(), n in 2usize..6, m in 2usize..6) {
        let c = joint_case(seed, n, m);
        let j = StructuredJoint::new(c.joint, c.sa, c.sb).unwrap();
        let joint = j.h_s_joint();
        let b_given_a = j.h_s_conditional(Direction::BGivenA);
        let a_given_b = j.h_s_conditional(Direction::AGivenB);
        prop_assert!((joint - (j.h_s_a() + b_given_a)).abs() < 1e-9);
        prop_assert!((joint - (j.h_s_b() + a_given_b)).abs() < 1e-9);
        let i = j.i_s();
        prop_assert!((i - (j.h_s_a() - a_given_b)).abs() < 1e-9);
        prop_assert!((i - (j.h_s_b() - b_given_a)).abs() < 1e-9);
        prop_assert!(i >= -1e-12 && b_given_a >= -1e-12 && a_given_b >= -1e-12);
    }

    #[test]
    fn entropy_bounds_and_q_form(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Alphabet::indexed(n).unwrap();
        let p = random_distribution(a.clone(), &mut rng).unwrap();
        let s = random_structure(a, 5, &mut rng).unwrap();
        let hs = h_s(&p, &s).unwrap();
        prop_assert!(hs >= -1e-12);
        prop_assert!(hs <= p.entropy() + 1e-9);
        prop_assert!((h_s_via_q(&p, &s).unwrap() - hs).abs() < 1e-9);
    }

    #[test]
    fn concavity(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Alphabet::indexed(n).unwrap();
        let p = random_distribution(a.clone(), &mut rng).unwrap();
        let q = random_distribution(a.clone(), &mut rng).unwrap();
        let s = random_structure(a.clone(), 5, &mut rng).unwrap();
        let lambda: f64 = rng.random();
        let mix: Vec<f64> = p.probs().iter().zip(q.probs()).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
        let mix = Distribution::new_renormalized(a, mix).unwrap();
        let lhs = h_s(&mix, &s).unwrap();
        let rhs = lambda * h_s(&p, &s).unwrap() + (1.0 - lambda) * h_s(&q, &s).unwrap();
        prop_assert!(lhs >= rhs - 1e-9);
    }

    #[test]
    fn additivity_in_structure(seed in any::<u64>(), n in 2usize..6, m in 2usize..5) {
        let c1 = joint_case(seed, n, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let sa2 = random_structure(c1.sa.alphabet().clone(), 3, &mut rng).unwrap();
        let p = c1.joint.marginal_rows();
        let p2 = random_distribution(p.alphabet().clone(), &mut rng).unwrap();
        let sum = c1.sa.combine(&sa2).unwrap();
        prop_assert!((h_s(&p, &sum).unwrap() - h_s(&p, &c1.sa).unwrap() - h_s(&p, &sa2).unwrap()).abs() < 1e-9);
        let kl = d_kl_s(&p, &p2, &sum).unwrap() - d_kl_s(&p, &p2, &c1.sa).unwrap() - d_kl_s(&p, &p2, &sa2).unwrap();
        prop_assert!(kl.abs() < 1e-9);

        // Joint notions are bilinear in the pair of structures: adding to
        // the row structure adds the corresponding terms.
        let base = StructuredJoint::new(c1.joint.clone(), c1.sa.clone(), c1.sb.clone()).unwrap();
        let extra = StructuredJoint::new(c1.joint.clone(), sa2.clone(), c1.sb.clone()).unwrap();
        let both = StructuredJoint::new(c1.joint.clone(), sum, c1.sb.clone()).unwrap();
        prop_assert!((both.h_s_joint() - base.h_s_joint() - extra.h_s_joint()).abs() < 1e-9);
        prop_assert!((both.i_s() - base.i_s() - extra.i_s()).abs() < 1e-9);
        let cond = both.h_s_conditional(Direction::BGivenA)
            - base.h_s_conditional(Direction::BGivenA)
            - extra.h_s_conditional(Direction::BGivenA);
        prop_assert!(cond.abs() < 1e-9);
    }

    #[test]
    fn relative_entropy_is_non_negative(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Alphabet::indexed(n).unwrap();
        let p = random_distribution(a.clone(), &mut rng).unwrap();
        let q = random_distribution(a.clone(), &mut rng).unwrap();
        let s = random_structure(a, 4, &mut rng).unwrap();
        prop_assert!(d_kl_s(&p, &q, &s).unwrap() >= -1e-12);
        prop_assert!(d_kl_s(&p, &p, &s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn traditional_structure_is_classical(seed in any::<u64>(), n in 2usize..7, m in 2usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Alphabet::indexed(n).unwrap();
        let b = Alphabet::new((0..m).map(|i| format!("b{i}"))).unwrap();
        let joint = random_joint(a.clone(), b.clone(), &mut rng).unwrap();
        let p = joint.marginal_rows();
        let q = random_distribution(a.clone(), &mut rng).unwrap();
        let ta = PartitionStructure::traditional(a);
        let tb = PartitionStructure::traditional(b);
        prop_assert!((h_s(&p, &ta).unwrap() - p.entropy()).abs() < 1e-12);
        prop_assert!((d_kl_s(&p, &q, &ta).unwrap() - kl_divergence(p.probs(), q.probs())).abs() < 1e-12);
        let j = StructuredJoint::new(joint.clone(), ta, tb).unwrap();
        prop_assert!((j.h_s_joint() - entropy(joint.probs())).abs() < 1e-12);
        prop_assert!((j.i_s() - mutual_information(joint.probs(), n, m)).abs() < 1e-12);
        let cond = conditional_entropy_cols_given_rows(joint.probs(), n, m);
        prop_assert!((j.h_s_conditional(Direction::BGivenA) - cond).abs() < 1e-12);
    }
}

#[test]
fn independent_joint_is_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = Alphabet::indexed(4).unwrap();
    let b = Alphabet::new(["x", "y", "z"]).unwrap();
    let pa = random_distribution(a.clone(), &mut rng).unwrap();
    let pb = random_distribution(b.clone(), &mut rng).unwrap();
    let sa = random_structure(a, 3, &mut rng).unwrap();
    let sb = random_structure(b, 3, &mut rng).unwrap();
    let j = StructuredJoint::new(
        JointDistribution::independent(&pa, &pb),
        sa.clone(),
        sb.clone(),
    )
    .unwrap();
    let expected = h_s(&pa, &sa).unwrap() + h_s(&pb, &sb).unwrap();
    assert!((j.h_s_joint() - expected).abs() < 1e-9);
    assert!(j.i_s().abs() < 1e-12);
    assert!((j.h_s_conditional(Direction::AGivenB) - h_s(&pa, &sa).unwrap()).abs() < 1e-9);
}
