use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::Instance;
use crate::exact::{binom, int, ratio_str, Rational};

/// Unnormalised weights of the two Step-1 branches.
///
/// `spread` is the branch that moves demand indices into `Q0`; `bundle` is the
/// branch that places `S ∪ W` together in one block. Which formula `bundle` uses
/// depends on whether the residual block is shorter than the demand (`rho < D`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchWeights {
    #[serde(with = "ratio_str")]
    pub spread: Rational,
    #[serde(with = "ratio_str")]
    pub bundle: Rational,
    pub short_residual: bool,
}

impl BranchWeights {
    pub fn spread_probability(&self) -> Rational {
        &self.spread / (&self.spread + &self.bundle)
    }

    pub fn bundle_probability(&self) -> Rational {
        &self.bundle / (&self.spread + &self.bundle)
    }
}

fn prod(range: impl Iterator<Item = i64>, term: impl Fn(i64) -> BigInt) -> BigInt {
    range.map(term).fold(BigInt::one(), |a, b| a * b)
}

pub fn branch_weights(inst: &Instance) -> BranchWeights {
    let k = inst.k as i64;
    let m = inst.side as i64;
    let d = inst.demand as i64;
    let alpha = m + d;
    let beta = k / alpha;
    let rho = k - alpha * beta;

    // empty products (beta = 1) are 1
    let full_blocks = prod(1..beta, |i| binom(k - i * alpha, alpha));
    let spread = Rational::new(binom(alpha - 1, m), full_blocks);

    if rho < d {
        let num = int(binom(alpha - 1, m + rho) * binom(m + rho, m))
            * (int(alpha * beta) / int(d - rho) - int(1));
        let den = binom(d, rho)
            * binom(k - alpha, rho)
            * prod(1..beta, |i| binom(k - i * alpha - rho, alpha));
        BranchWeights {
            spread,
            bundle: num / int(den),
            short_residual: true,
        }
    } else {
        let num = beta * binom(rho, d) * binom(k - rho, alpha - rho);
        let den = binom(m, rho - d) * prod(0..beta, |i| binom(k - i * alpha - rho, alpha));
        BranchWeights {
            spread,
            bundle: Rational::new(num, den),
            short_residual: false,
        }
    }
}

/// Weights with the `rho > D` bundle term counting residual blocks that contain a
/// fixed demand index, `C(rho-1, D-1)`, in place of all `C(rho, D)` demand-only
/// residual blocks. Identical to [`branch_weights`] whenever `rho <= D`.
///
/// With these weights the spread branch has probability `rho / K` when `rho >= D`,
/// and the exact audit passes on instances where [`branch_weights`] does not.
pub fn count_corrected_weights(inst: &Instance) -> BranchWeights {
    let mut w = branch_weights(inst);
    let d = inst.demand as i64;
    let rho = (inst.k % (inst.side + inst.demand)) as i64;
    if rho > d {
        w.bundle = w.bundle * int(binom(rho - 1, d - 1)) / int(binom(rho, d));
    }
    w
}
