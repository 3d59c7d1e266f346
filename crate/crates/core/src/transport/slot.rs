use std::marker::PhantomData;
use std::ptr;
use std::sync::atomic::{AtomicPtr, Ordering};

/// Single-value handoff cell built on one atomic pointer swap.
///
/// `put` and `take` are each a single `swap`, so both sides finish in a
/// fixed number of steps no matter what the other side is doing. Whoever
/// swaps a pointer out owns the box behind it; values are never shared.
pub struct HandoffSlot<T> {
    ptr: AtomicPtr<T>,
    _owns: PhantomData<Box<T>>,
}

// SAFETY: the slot only ever moves whole `Box<T>` values between threads.
unsafe impl<T: Send> Send for HandoffSlot<T> {}
unsafe impl<T: Send> Sync for HandoffSlot<T> {}

impl<T> HandoffSlot<T> {
    pub fn new() -> Self {
        Self {
            ptr: AtomicPtr::new(ptr::null_mut()),
            _owns: PhantomData,
        }
    }

    /// Stores `value`, returning whatever was there before.
    pub fn put(&self, value: Box<T>) -> Option<Box<T>> {
        let old = self.ptr.swap(Box::into_raw(value), Ordering::AcqRel);
        // SAFETY: non-null pointers in the slot always come from Box::into_raw
        // and the swap gave us exclusive ownership of `old`.
        (!old.is_null()).then(|| unsafe { Box::from_raw(old) })
    }

    pub fn take(&self) -> Option<Box<T>> {
        let old = self.ptr.swap(ptr::null_mut(), Ordering::AcqRel);
        // SAFETY: as in `put`.
        (!old.is_null()).then(|| unsafe { Box::from_raw(old) })
    }

    pub fn is_occupied(&self) -> bool {
        !self.ptr.load(Ordering::Acquire).is_null()
    }
}

impl<T> Default for HandoffSlot<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T> Drop for HandoffSlot<T> {
    fn drop(&mut self) {
        drop(self.take());
    }
}

impl<T> std::fmt::Debug for HandoffSlot<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HandoffSlot").field("occupied", &self.is_occupied()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::AtomicUsize;
    use std::sync::Arc;

    #[test]
    fn put_take_round_trip() {
        let slot = HandoffSlot::new();
        assert!(slot.take().is_none());
        assert!(slot.put(Box::new(1)).is_none());
        assert_eq!(slot.put(Box::new(2)).as_deref(), Some(&1));
        assert_eq!(slot.take().as_deref(), Some(&2));
        assert!(!slot.is_occupied());
    }

    struct Counted(Arc<AtomicUsize>);
    impl Drop for Counted {
        fn drop(&mut self) {
            self.0.fetch_add(1, Ordering::SeqCst);
        }
    }

    #[test]
    fn drop_frees_held_value() {
        let drops = Arc::new(AtomicUsize::new(0));
        {
            let slot = HandoffSlot::new();
            slot.put(Box::new(Counted(drops.clone())));
        }
        assert_eq!(drops.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn concurrent_values_never_torn() {
        // each value is [k, k, k, k]; a reader must never see a mix
        let slot = Arc::new(HandoffSlot::<[u64; 4]>::new());
        let writer = {
            let slot = slot.clone();
            std::thread::spawn(move || {
                for k in 0..200_000u64 {
                    slot.put(Box::new([k; 4]));
                }
            })
        };
        let mut last = 0;
        while !writer.is_finished() || slot.is_occupied() {
            if let Some(v) = slot.take() {
                assert!(v.iter().all(|x| *x == v[0]));
                assert!(v[0] >= last);
                last = v[0];
            }
        }
        writer.join().unwrap();
    }
}
