//! Deterministic sample-parallel execution.
//!
//! Every scan derives a per-sample seed from `(base_seed, counter)`, so the
//! result of a reduction is a pure function of the seed and sample count, no
//! matter how work is scheduled. Reductions that pick a winner break ties by
//! the lowest counter. With the `parallel` feature disabled the same loops
//! run sequentially and produce identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// splitmix64 finalizer; decorrelates consecutive counters.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-sample seed for sample `index` of a scan seeded with `base`.
pub fn sample_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ mix64(index.wrapping_add(1)))
}

/// Map `0..n` and keep the item with the smallest key (ties: lowest index).
/// Returns `None` when `n == 0`.
pub fn min_by_key_indexed<T, F>(n: usize, f: F) -> Option<(usize, f64, T)>
where
    T: Send,
    F: Fn(usize) -> (f64, T) + Sync + Send,
{
    let pick = |a: (usize, f64, T), b: (usize, f64, T)| {
        if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };

    #[cfg(feature = "parallel")]
    {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let (k, v) = f(i);
                (i, k, v)
            })
            .reduce_with(|a, b| if a.0 < b.0 { pick(a, b) } else { pick(b, a) })
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut best: Option<(usize, f64, T)> = None;
        for i in 0..n {
            let (k, v) = f(i);
            best = Some(match best {
                None => (i, k, v),
                Some(cur) => pick(cur, (i, k, v)),
            });
        }
        best
    }
}

/// Map `0..n` into a vector, preserving index order.
pub fn collect_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Cap the global worker pool from the `NNLR_THREADS` environment variable.
///
/// No-op when the variable is unset, unparsable, or a pool already exists
/// (rayon only allows one global pool). Without the `parallel` feature the
/// call is a no-op.
pub fn configure_threads_from_env() {
    #[cfg(feature = "parallel")]
    {
        if let Ok(s) = std::env::var("NNLR_THREADS") {
            if let Ok(k) = s.trim().parse::<usize>() {
                if k >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new()
                        .num_threads(k)
                        .build_global();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_seeds_differ_across_counters() {
        let a = sample_seed(7, 0);
        let b = sample_seed(7, 1);
        let c = sample_seed(8, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn min_reduction_breaks_ties_by_lowest_index() {
        // keys: 1, 0, 0, 2 -> winner must be index 1
        let keys = [1.0, 0.0, 0.0, 2.0];
        let got = min_by_key_indexed(4, |i| (keys[i], i)).unwrap();
        assert_eq!(got.0, 1);
        assert_eq!(got.1, 0.0);
    }

    #[test]
    fn empty_range_yields_none() {
        assert!(min_by_key_indexed::<(), _>(0, |_| (0.0, ())).is_none());
    }
}
