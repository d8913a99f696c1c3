use rand::RngCore;

use super::{Environment, TimeSource, ZPath};
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

/// Step budget used when the caller does not pick one. A recurrent walk to
/// n = 500 takes on the order of 10^9 steps.
pub const DEFAULT_MAX_STEPS: u64 = 100_000_000_000;

const UNSET: u64 = u64::MAX;

#[inline]
fn right_threshold(omega: f64) -> u64 {
    // P(next_u64 < t) = t / 2^64.
    let t = omega * 18_446_744_073_709_551_616.0;
    if t >= (UNSET - 1) as f64 {
        UNSET - 1
    } else {
        t as u64
    }
}

/// Runs the quenched walk from 0 until it first hits `n` and returns the
/// left-step counts read right to left.
pub fn simulate_walk(env: &mut Environment, n: usize, seed: u64, max_steps: u64) -> Result<ZPath> {
    assert!(n >= 1, "n must be positive");
    let mut rng = rng::stream(seed, Domain::Walk, 0);

    // Local arrays cover sites [lo, n]; index = x - lo.
    let mut lo: i64 = 0;
    let mut thr = vec![UNSET; n + 1];
    let mut left = vec![0u64; n + 1];
    let mut i: usize = 0;
    let mut target = n;
    let mut steps: u64 = 0;

    loop {
        let t = thr[i];
        if t == UNSET {
            thr[i] = right_threshold(env.omega(lo + i as i64));
            continue;
        }
        if steps == max_steps {
            return Err(Error::MaxStepsExceeded { steps });
        }
        steps += 1;
        if rng.next_u64() < t {
            i += 1;
            if i == target {
                break;
            }
        } else {
            left[i] += 1;
            if i == 0 {
                let extra = thr.len().max(64);
                let mut t2 = vec![UNSET; extra + thr.len()];
                t2[extra..].copy_from_slice(&thr);
                thr = t2;
                let mut l2 = vec![0u64; extra + left.len()];
                l2[extra..].copy_from_slice(&left);
                left = l2;
                lo -= extra as i64;
                i += extra;
                target += extra;
            }
            i -= 1;
        }
    }

    let z: Vec<u64> = (0..=n).map(|k| left[target - k]).collect();
    let total_left: u64 = left.iter().sum();
    debug_assert_eq!(steps, n as u64 + 2 * total_left);
    Ok(ZPath { n, hitting_time: steps, z, time_source: TimeSource::Walk })
}
