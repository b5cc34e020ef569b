//! Deterministic fan-out for grid sweeps. Thread count comes from the
//! ORBIT_VERDICT_THREADS environment variable when set (integer >= 1),
//! otherwise the machine's available parallelism. Results are returned in
//! input order regardless of scheduling.

use std::env;

pub const THREADS_ENV: &str = "ORBIT_VERDICT_THREADS";

pub fn thread_count() -> usize {
    let default = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n.min(default.max(1)),
            _ => default,
        },
        Err(_) => default,
    }
}

/// Apply `f` to every item, fanning out over `thread_count()` workers.
/// All values are computed regardless of failures elsewhere; output order
/// matches input order.
pub fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = thread_count().max(1);
    if workers == 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let mut out: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let f = &f;
        let mut slots = out.as_mut_slice();
        let mut rest = items.as_slice();
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (batch, tail) = rest.split_at(take);
            let (batch_out, tail_out) = slots.split_at_mut(take);
            rest = tail;
            slots = tail_out;
            scope.spawn(move || {
                for (slot, item) in batch_out.iter_mut().zip(batch) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    out.into_iter().map(|r| r.expect("worker filled slot")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..103).collect();
        let out = parallel_map(items, |&n| n * n);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, (i * i) as u64);
        }
    }
}
