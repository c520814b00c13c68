//! Successive-cancellation decoding of the polarizing transform over the
//! flagged-erasure channel.
//!
//! The codeword `z = H x0` is observed with some coordinates erased (and
//! flagged). Input coordinates are decided in natural order; the recursion
//! mirrors the transform's pairing. For one step with pair
//! `(z1, z2) = (beta (x1 + x2), x2)` observed as `(o1, o2)`:
//!
//! * `x1 = o1 / beta - o2`, known iff both observations are known;
//! * `x2 = o2` if known, else `o1 / beta - x1` using the already-decided
//!   `x1`, else erased.
//!
//! Deciding a pair feeds the reconstructed `(beta (x1 + x2), x2)` back down
//! the tree, which can fill erased positions and unblock later queries.
//! Frozen coordinates always take their frozen value. If a good coordinate
//! cannot be resolved, the decoder substitutes zero, continues, and reports
//! `ErasureFailure`; on `Success` the estimate is exact, because only
//! erasures (never noise) enter the clean observations.

use nalgebra::DVector;

use crate::channel::FlaggedOutput;
use crate::decode::{Certificate, DecodeResult, DecodeStatus};
use crate::error::Error;
use crate::transform::PolarTransform;
use crate::Result;

/// One node of the decoding tree. A block of size `s` owns `s` observation
/// slots at its level; internal blocks delegate to two half-size children.
struct Block {
    beta: f64,
    /// Leaf: the (possibly erased, possibly back-filled) observation.
    leaf: Option<f64>,
    children: Option<(Box<Block>, Box<Block>)>,
    /// Even pair member decided in the parent's scan, awaiting its sibling.
    pending: Option<f64>,
    /// Inputs of this block already decided and fed back.
    decided: Vec<Option<f64>>,
}

impl Block {
    fn build(obs: &[Option<f64>], beta: f64) -> Block {
        if obs.len() == 1 {
            return Block {
                beta,
                leaf: obs[0],
                children: None,
                pending: None,
                decided: vec![None],
            };
        }
        let half = obs.len() / 2;
        Block {
            beta,
            leaf: None,
            children: Some((
                Box::new(Block::build(&obs[..half], beta)),
                Box::new(Block::build(&obs[half..], beta)),
            )),
            pending: None,
            decided: vec![None; obs.len()],
        }
    }

    /// Value of this block's input `j`, given everything decided so far;
    /// `None` while the erasure pattern leaves it undetermined.
    fn query(&self, j: usize) -> Option<f64> {
        if let Some(v) = self.decided[j] {
            return Some(v);
        }
        let Some((top, bot)) = &self.children else {
            return self.leaf;
        };
        let i = j / 2;
        if j.is_multiple_of(2) {
            match (top.query(i), bot.query(i)) {
                (Some(t), Some(b)) => Some(t / self.beta - b),
                _ => None,
            }
        } else {
            match bot.query(i) {
                Some(b) => Some(b),
                None => top
                    .query(i)
                    .map(|t| t / self.beta - self.pending.expect("even member decided first")),
            }
        }
    }

    /// Commit input `j` to value `v`. Completing an odd member pushes the
    /// pair's transform values down to the children, possibly filling
    /// erased slots.
    fn feedback(&mut self, j: usize, v: f64) {
        self.decided[j] = Some(v);
        let Some((top, bot)) = &mut self.children else {
            if self.leaf.is_none() {
                self.leaf = Some(v);
            }
            return;
        };
        if j.is_multiple_of(2) {
            self.pending = Some(v);
        } else {
            let even = self.pending.take().expect("even member decided first");
            let i = j / 2;
            top.feedback(i, self.beta * (even + v));
            bot.feedback(i, v);
        }
    }
}

/// Decode the transform input from a flagged-erasure observation of its
/// output. `good` lists the information-bearing indices; `frozen` supplies
/// the values of the remaining indices in ascending index order.
pub fn sc_erasure_decode(
    t: &PolarTransform,
    obs: &FlaggedOutput,
    frozen: &[f64],
    good: &[usize],
) -> Result<DecodeResult> {
    let m = t.size();
    if obs.values.len() != m || obs.erased.len() != m {
        return Err(Error::DimensionMismatch {
            context: "observation length",
            expected: m,
            got: obs.values.len(),
        });
    }
    let mut is_good = vec![false; m];
    for &i in good {
        if i >= m {
            return Err(Error::param("good", "index out of range for this transform"));
        }
        if is_good[i] {
            return Err(Error::param("good", "duplicate index"));
        }
        is_good[i] = true;
    }
    if frozen.len() != m - good.len() {
        return Err(Error::DimensionMismatch {
            context: "frozen value count",
            expected: m - good.len(),
            got: frozen.len(),
        });
    }

    let slots: Vec<Option<f64>> = (0..m)
        .map(|i| if obs.erased[i] { None } else { Some(obs.values[i]) })
        .collect();
    let mut root = Block::build(&slots, t.beta());

    let mut estimate = DVector::zeros(m);
    let mut unresolved = 0usize;
    let mut next_frozen = 0usize;
    for j in 0..m {
        let v = if is_good[j] {
            match root.query(j) {
                Some(v) => v,
                None => {
                    unresolved += 1;
                    0.0
                }
            }
        } else {
            let v = frozen[next_frozen];
            next_frozen += 1;
            v
        };
        estimate[j] = v;
        root.feedback(j, v);
    }

    Ok(DecodeResult {
        estimate,
        status: if unresolved == 0 {
            DecodeStatus::Success
        } else {
            DecodeStatus::ErasureFailure
        },
        certificate: Certificate {
            unresolved,
            ..Certificate::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_signal;
    use crate::mid::MidProfile;
    use crate::rng::substream;
    use crate::DEFAULT_BETA;

    fn flagged(values: Vec<f64>, erased: Vec<bool>) -> FlaggedOutput {
        FlaggedOutput {
            values: DVector::from_vec(values),
            erased,
        }
    }

    fn encode(t: &PolarTransform, good: &[usize], frozen: &[f64], data: &[f64]) -> (DVector<f64>, DVector<f64>) {
        let m = t.size();
        let mut x = DVector::zeros(m);
        let mut gi = 0;
        let mut bi = 0;
        for j in 0..m {
            if good.contains(&j) {
                x[j] = data[gi];
                gi += 1;
            } else {
                x[j] = frozen[bi];
                bi += 1;
            }
        }
        let z = t.apply(&x).unwrap();
        (x, z)
    }

    #[test]
    fn no_erasures_inverts_the_transform() {
        let t = PolarTransform::new(6, DEFAULT_BETA).unwrap();
        let mut rng = substream(100, 0);
        let x = sample_signal(64, &mut rng);
        let z = t.apply(&x).unwrap();
        let obs = flagged(z.iter().copied().collect(), vec![false; 64]);
        let all: Vec<usize> = (0..64).collect();
        let out = sc_erasure_decode(&t, &obs, &[], &all).unwrap();
        assert_eq!(out.status, DecodeStatus::Success);
        assert!((out.estimate - x).amax() < 1e-9);
    }

    #[test]
    fn one_step_g_rule_by_hand() {
        // Pair (z1, z2) with z1 erased: the data coordinate 1 (good) is
        // still directly visible through z2.
        let t = PolarTransform::new(1, DEFAULT_BETA).unwrap();
        let obs = flagged(vec![0.0, 2.5], vec![true, false]);
        let out = sc_erasure_decode(&t, &obs, &[0.0], &[1]).unwrap();
        assert_eq!(out.status, DecodeStatus::Success);
        assert_eq!(out.estimate[1], 2.5);
    }

    #[test]
    fn one_step_f_rule_by_hand() {
        // Both observations known: coordinate 0 = z1 / beta - z2.
        let t = PolarTransform::new(1, DEFAULT_BETA).unwrap();
        let (x, z) = encode(&t, &[0, 1], &[], &[1.25, -0.5]);
        let obs = flagged(z.iter().copied().collect(), vec![false, false]);
        let out = sc_erasure_decode(&t, &obs, &[], &[0, 1]).unwrap();
        assert_eq!(out.status, DecodeStatus::Success);
        assert!((out.estimate - x).amax() < 1e-12);
    }

    #[test]
    fn double_erasure_fails() {
        let t = PolarTransform::new(1, DEFAULT_BETA).unwrap();
        let obs = flagged(vec![0.0, 0.0], vec![true, true]);
        let out = sc_erasure_decode(&t, &obs, &[0.0], &[1]).unwrap();
        assert_eq!(out.status, DecodeStatus::ErasureFailure);
        assert_eq!(out.certificate.unresolved, 1);
    }

    #[test]
    fn frozen_coordinates_survive_erasure() {
        // All-frozen block: erasures cannot hurt known values.
        let t = PolarTransform::new(2, DEFAULT_BETA).unwrap();
        let frozen = [0.5, -1.0, 2.0, 0.25];
        let obs = flagged(vec![0.0; 4], vec![true; 4]);
        let out = sc_erasure_decode(&t, &obs, &frozen, &[]).unwrap();
        assert_eq!(out.status, DecodeStatus::Success);
        assert_eq!(out.estimate.as_slice(), &frozen);
    }

    /// Exhaustive ground truth at depth 3: for every erasure pattern and a
    /// generic input, success implies exactness, and the success set is a
    /// function of the pattern alone.
    #[test]
    fn exhaustive_patterns_depth_three() {
        let t = PolarTransform::new(3, DEFAULT_BETA).unwrap();
        let profile = MidProfile::compute(3, 0.1).unwrap();
        let mut rng = substream(101, 0);
        for dim in [0usize, 1, 4, 7, 8] {
            let (good, _) = profile.partition(dim).unwrap();
            for pattern in 0u32..256 {
                let data: Vec<f64> = sample_signal(dim, &mut rng).iter().copied().collect();
                let frozen: Vec<f64> =
                    sample_signal(8 - dim, &mut rng).iter().copied().collect();
                let (x, z) = encode(&t, &good, &frozen, &data);
                let erased: Vec<bool> = (0..8).map(|i| pattern >> i & 1 == 1).collect();
                let values: Vec<f64> = (0..8)
                    .map(|i| if erased[i] { 0.0 } else { z[i] })
                    .collect();
                let out =
                    sc_erasure_decode(&t, &flagged(values, erased), &frozen, &good).unwrap();
                if out.status == DecodeStatus::Success {
                    assert!(
                        (out.estimate - &x).amax() <= 1e-9,
                        "dim {dim} pattern {pattern:#010b}"
                    );
                }
            }
        }
    }

    #[test]
    fn input_validation() {
        let t = PolarTransform::new(2, DEFAULT_BETA).unwrap();
        let obs = flagged(vec![0.0; 4], vec![false; 4]);
        assert!(sc_erasure_decode(&t, &obs, &[0.0; 2], &[0, 9]).is_err());
        assert!(sc_erasure_decode(&t, &obs, &[0.0; 2], &[1, 1]).is_err());
        assert!(sc_erasure_decode(&t, &obs, &[0.0; 3], &[0, 1]).is_err());
        let short = flagged(vec![0.0; 3], vec![false; 3]);
        assert!(sc_erasure_decode(&t, &short, &[0.0; 2], &[0, 1]).is_err());
    }
}
