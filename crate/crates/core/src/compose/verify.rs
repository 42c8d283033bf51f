use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolfn::{decode, Evaluator};
use crate::error::{Error, Result};
use crate::polynomial::{MultilinearPoly, MAX_EXHAUSTIVE_VARS};
use crate::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    None,
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub max_deviation: Rational,
    pub exhaustive: bool,
    pub inputs_checked: u64,
    /// An input attaining the maximum deviation.
    pub argmax: Vec<bool>,
}

/// Largest `|p(x) - f(x)|` over the cube or a seeded sample of it.
pub fn verify_error(p: &MultilinearPoly, f: &impl Evaluator, mode: &VerifyMode) -> Result<ErrorReport> {
    let n = f.num_inputs();
    if p.nvars() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: p.nvars(),
        });
    }
    let mut worst = Rational::zero();
    let mut argmax = vec![false; n];
    let mut record = |x: Vec<bool>, v: &Rational| {
        let dev = (v - int(f.eval_bits(&x) as i64)).abs();
        if dev > worst {
            worst = dev;
            argmax = x;
        }
    };
    let (exhaustive, inputs_checked) = match mode {
        VerifyMode::None => return Err(Error::OutOfRange("no verification mode selected".into())),
        VerifyMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_VARS {
                return Err(Error::TooLarge(format!("exhaustive check over {n} inputs")));
            }
            for (x, v) in p.values()?.iter().enumerate() {
                record(decode(x as u64, n), v);
            }
            (true, 1u64 << n)
        }
        VerifyMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..*count {
                let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
                let v = p.eval(&x)?;
                record(x, &v);
            }
            (false, *count)
        }
    };
    Ok(ErrorReport {
        max_deviation: worst,
        exhaustive,
        inputs_checked,
        argmax,
    })
}
