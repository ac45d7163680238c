//! Structure-sensitive entropy, joint and conditional entropy, mutual
//! information and relative entropy.
//!
//! Each notion is the measure-weighted sum of its classical counterpart
//! evaluated on reduced alphabets. Joint notions weight a pair of partitions
//! by the product measure `Ŝ_A(s_A) Ŝ_B(s_B)`.

use crate::alphabet::{Distribution, JointDistribution};
use crate::entropy::{
    conditional_entropy_cols_given_rows, conditional_entropy_rows_given_cols, entropy,
    kl_divergence, mutual_information, pairwise_sum,
};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::structure::{PartitionStructure, StructureSource, StructuredSpace};

/// The triple `(A, P, Ŝ)`.
#[derive(Clone, Debug)]
pub struct StructuredAlphabet<S: StructureSource = PartitionStructure> {
    p: Distribution,
    s: S,
}

impl<S: StructureSource> StructuredAlphabet<S> {
    pub fn new(p: Distribution, s: S) -> Result<Self> {
        p.alphabet()
            .ensure_same(s.alphabet(), "distribution and structure")?;
        Ok(StructuredAlphabet { p, s })
    }

    pub fn distribution(&self) -> &Distribution {
        &self.p
    }

    pub fn structure(&self) -> &S {
        &self.s
    }

    /// `H_S(A, P, Ŝ)`.
    pub fn h_s(&self) -> f64 {
        h_s_unchecked(&self.p, &self.s)
    }

    /// `H(Q) - H(Ŝ)` over the structured space.
    pub fn h_s_via_q(&self) -> Result<f64> {
        h_s_via_q(&self.p, &self.s)
    }

    /// `D_S(P || other)` under this structure.
    pub fn d_kl_s(&self, other: &Distribution) -> Result<f64> {
        d_kl_s(&self.p, other, &self.s)
    }
}

fn h_s_unchecked(p: &Distribution, s: &dyn StructureSource) -> f64 {
    let mut terms = Vec::with_capacity(s.num_terms());
    s.for_each_term(&mut |part, m| {
        if m > 0.0 {
            terms.push(m * entropy(&part.reduce(p.probs())));
        }
    });
    pairwise_sum(&terms)
}

/// Structure-sensitive entropy `H_S = Σ Ŝ(s) H(P^s)`.
///
/// The structure need not be normalized.
pub fn h_s(p: &Distribution, s: &dyn StructureSource) -> Result<f64> {
    p.alphabet()
        .ensure_same(s.alphabet(), "distribution and structure")?;
    Ok(h_s_unchecked(p, s))
}

/// `H_S` computed as `H(Q) - H(Ŝ)`; requires a normalized structure.
pub fn h_s_via_q(p: &Distribution, s: &dyn StructureSource) -> Result<f64> {
    let q = StructuredSpace::new(p, s)?;
    if !q.is_probability() {
        return Err(Error::NotNormalized(format!(
            "structure has total measure {}",
            q.total_mass()
        )));
    }
    let mut measures = Vec::with_capacity(s.num_terms());
    s.for_each_term(&mut |_, m| measures.push(m));
    Ok(q.entropy() - entropy(&measures))
}

/// Relative entropy `D_S(P_A || P_B) = Σ Ŝ(s) D(P_A^s || P_B^s)`.
///
/// Returns `+inf` when some positive-measure partition has a component that
/// `P_B` gives zero mass but `P_A` does not.
pub fn d_kl_s(pa: &Distribution, pb: &Distribution, s: &dyn StructureSource) -> Result<f64> {
    pa.alphabet()
        .ensure_same(s.alphabet(), "distribution and structure")?;
    pb.alphabet()
        .ensure_same(s.alphabet(), "distribution and structure")?;
    let mut terms = Vec::with_capacity(s.num_terms());
    s.for_each_term(&mut |part, m| {
        if m > 0.0 {
            terms.push(m * kl_divergence(&part.reduce(pa.probs()), &part.reduce(pb.probs())));
        }
    });
    if terms.iter().any(|t| t.is_infinite()) {
        return Ok(f64::INFINITY);
    }
    Ok(pairwise_sum(&terms))
}

/// Which variable is conditioned on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `H_S(P_{A|B})`: uncertainty in the row variable given the column.
    AGivenB,
    /// `H_S(P_{B|A})`.
    BGivenA,
}

/// A joint distribution on `A x B` with structures on both alphabets.
#[derive(Clone, Debug)]
pub struct StructuredJoint {
    joint: JointDistribution,
    sa: PartitionStructure,
    sb: PartitionStructure,
}

impl StructuredJoint {
    pub fn new(
        joint: JointDistribution,
        sa: PartitionStructure,
        sb: PartitionStructure,
    ) -> Result<Self> {
        joint
            .rows()
            .ensure_same(sa.alphabet(), "row alphabet and its structure")?;
        joint
            .cols()
            .ensure_same(sb.alphabet(), "column alphabet and its structure")?;
        Ok(StructuredJoint { joint, sa, sb })
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn structure_a(&self) -> &PartitionStructure {
        &self.sa
    }

    pub fn structure_b(&self) -> &PartitionStructure {
        &self.sb
    }

    /// The implied product structure `Ŝ_A × Ŝ_B` on `A x B`.
    pub fn product_structure(&self) -> Result<PartitionStructure> {
        self.sa.product(&self.sb)
    }

    /// Reduced joint `P_AB^{s_A,s_B}`, row-major.
    pub fn reduced_joint(&self, sa: &Partition, sb: &Partition) -> Result<Vec<f64>> {
        self.joint.reduce(sa, sb)
    }

    /// Sums `Ŝ_A(s_A) Ŝ_B(s_B) f(reduced joint, rows, cols)` over all pairs.
    fn weighted(&self, f: impl Fn(&[f64], usize, usize) -> f64) -> f64 {
        let mut terms = Vec::with_capacity(self.sa.len() * self.sb.len());
        for (s, ma) in self.sa.terms() {
            for (t, mb) in self.sb.terms() {
                let w = ma * mb;
                if w > 0.0 {
                    let r = self.joint.reduce(s, t).expect("partitions match the joint");
                    terms.push(w * f(&r, s.num_blocks(), t.num_blocks()));
                }
            }
        }
        pairwise_sum(&terms)
    }

    /// Joint structure-sensitive entropy `H_S(P_AB)`.
    pub fn h_s_joint(&self) -> f64 {
        self.weighted(|r, _, _| entropy(r))
    }

    /// Conditional structure-sensitive entropy. A conditioning component with
    /// zero mass contributes nothing.
    pub fn h_s_conditional(&self, direction: Direction) -> f64 {
        match direction {
            Direction::AGivenB => self.weighted(conditional_entropy_rows_given_cols),
            Direction::BGivenA => self.weighted(conditional_entropy_cols_given_rows),
        }
    }

    /// Structure-sensitive mutual information `I_S(P_A; P_B)`.
    pub fn i_s(&self) -> f64 {
        self.weighted(mutual_information)
    }

    /// `H_S` of the row marginal under `Ŝ_A`.
    pub fn h_s_a(&self) -> f64 {
        h_s_unchecked(&self.joint.marginal_rows(), &self.sa)
    }

    /// `H_S` of the column marginal under `Ŝ_B`.
    pub fn h_s_b(&self) -> f64 {
        h_s_unchecked(&self.joint.marginal_cols(), &self.sb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::entropy::binary_entropy;

    fn abcd() -> Alphabet {
        Alphabet::new(["a", "b", "c", "d"]).unwrap()
    }

    fn pairs() -> Partition {
        Partition::from_components(4, &[vec![0, 1], vec![2, 3]]).unwrap()
    }

    fn mixed() -> PartitionStructure {
        PartitionStructure::new(
            abcd(),
            vec![(Partition::singletons(4), 0.6), (pairs(), 0.4)],
        )
        .unwrap()
    }

    #[test]
    fn h_s_examples() {
        let p = Distribution::new(abcd(), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let trad = PartitionStructure::traditional(abcd());
        assert_eq!(h_s(&p, &trad).unwrap(), p.entropy());

        let u = Distribution::uniform(abcd());
        assert!((h_s(&u, &mixed()).unwrap() - 1.6).abs() < 1e-12);
    }

    #[test]
    fn q_form_examples() {
        let u = Distribution::uniform(abcd());
        let q = StructuredSpace::new(&u, &mixed()).unwrap();
        assert!((q.entropy() - 2.570950594454669).abs() < 1e-12);
        assert!((h_s_via_q(&u, &mixed()).unwrap() - 1.6).abs() < 1e-12);
        assert!((binary_entropy(0.6) - 0.9709505944546686).abs() < 1e-15);

        let p = Distribution::new(abcd(), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let trad = PartitionStructure::traditional(abcd());
        assert!((h_s_via_q(&p, &trad).unwrap() - p.entropy()).abs() < 1e-12);
        let single = PartitionStructure::new(abcd(), vec![(pairs(), 1.0)]).unwrap();
        assert!((h_s_via_q(&p, &single).unwrap() - entropy(&[0.3, 0.7])).abs() < 1e-12);

        let doubled = mixed().scale(2.0).unwrap();
        assert!(matches!(
            h_s_via_q(&u, &doubled),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn joint_examples() {
        let u = Distribution::uniform(abcd());
        let j =
            StructuredJoint::new(JointDistribution::independent(&u, &u), mixed(), mixed()).unwrap();
        assert!((j.h_s_joint() - 3.2).abs() < 1e-12);
        assert!((j.h_s_conditional(Direction::AGivenB) - 1.6).abs() < 1e-12);
        assert!(j.i_s().abs() < 1e-12);

        let p = Distribution::new(abcd(), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let trad = PartitionStructure::traditional(abcd());
        let joint = JointDistribution::identity_coupling(&p);
        let j = StructuredJoint::new(joint.clone(), trad.clone(), trad).unwrap();
        assert!((j.h_s_joint() - p.entropy()).abs() < 1e-12);
        assert!(j.h_s_conditional(Direction::BGivenA).abs() < 1e-12);
        assert!((j.i_s() - p.entropy()).abs() < 1e-12);
    }

    #[test]
    fn identity_coupling_with_one_partition() {
        let p = Distribution::new(abcd(), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let s = PartitionStructure::new(abcd(), vec![(pairs(), 1.0)]).unwrap();
        let j = StructuredJoint::new(
            JointDistribution::identity_coupling(&p),
            s.clone(),
            s.clone(),
        )
        .unwrap();
        let hs = h_s(&p, &s).unwrap();
        assert!((j.i_s() - hs).abs() < 1e-12);
        assert!(j.h_s_conditional(Direction::AGivenB).abs() < 1e-12);
    }

    #[test]
    fn identity_coupling_with_two_partitions_is_not_h_s() {
        // With several partitions, cross terms pair different partitions of
        // the same letter, so the mutual information falls short of H_S.
        let u = Distribution::uniform(abcd());
        let j = StructuredJoint::new(JointDistribution::identity_coupling(&u), mixed(), mixed())
            .unwrap();
        assert!((j.i_s() - 1.36).abs() < 1e-12);
        assert!((h_s(&u, &mixed()).unwrap() - 1.6).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let p = Distribution::new(abcd(), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(d_kl_s(&p, &p, &mixed()).unwrap(), 0.0);
        let u = Distribution::uniform(abcd());
        let trad = PartitionStructure::traditional(abcd());
        assert!(
            (d_kl_s(&p, &u, &trad).unwrap() - kl_divergence(p.probs(), u.probs())).abs() < 1e-12
        );

        let pa = Distribution::new(abcd(), vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        let blind = PartitionStructure::new(abcd(), vec![(pairs(), 1.0)]).unwrap();
        assert_eq!(d_kl_s(&pa, &u, &blind).unwrap(), 0.0);
        assert_eq!(d_kl_s(&u, &pa, &trad).unwrap(), f64::INFINITY);
    }

    #[test]
    fn alphabet_mismatch() {
        let p = Distribution::uniform(Alphabet::indexed(3).unwrap());
        assert!(matches!(h_s(&p, &mixed()), Err(Error::AlphabetMismatch(_))));
    }
}
