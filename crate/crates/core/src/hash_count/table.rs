use crate::error::{Error, Result};
use crate::graph_io::VertexId;

/// Fixed-size bucketed hash table with an interleaved element layout.
///
/// There are `bucket_count` buckets of `capacity` slots each. Slot `j` of
/// bucket `i` lives at `elements[j * bucket_count + i]`, so row `j` of the
/// flat array holds the `j`-th element of every bucket. Keys hash to
/// `key % bucket_count`; a full home bucket spills into the next non-full
/// bucket (wrapping).
///
/// Resetting only clears the per-bucket lengths; stale elements are never
/// read because every scan is bounded by the bucket length.
#[derive(Debug, Clone)]
pub struct HashTable {
    buckets: usize,
    // `buckets - 1` when the bucket count is a power of two
    mask: Option<usize>,
    capacity: usize,
    len: Vec<u32>,
    elements: Vec<VertexId>,
    spilled: bool,
}

impl HashTable {
    pub fn new(bucket_count: usize, capacity: usize) -> Result<Self> {
        if bucket_count == 0 || capacity == 0 {
            return Err(Error::Config(
                "hash table needs at least one bucket and one slot".into(),
            ));
        }
        Ok(Self {
            buckets: bucket_count,
            mask: bucket_count.is_power_of_two().then(|| bucket_count - 1),
            capacity,
            len: vec![0; bucket_count],
            elements: vec![0; bucket_count * capacity],
            spilled: false,
        })
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Total number of slots.
    pub fn slots(&self) -> usize {
        self.buckets * self.capacity
    }

    #[inline]
    pub fn hash(&self, key: VertexId) -> usize {
        match self.mask {
            Some(mask) => key as usize & mask,
            None => key as usize % self.buckets,
        }
    }

    /// Flat index of slot `j` in bucket `bucket`.
    #[inline]
    pub fn slot_index(&self, bucket: usize, j: usize) -> usize {
        j * self.buckets + bucket
    }

    pub fn bucket_lens(&self) -> &[u32] {
        &self.len
    }

    pub fn raw_elements(&self) -> &[VertexId] {
        &self.elements
    }

    /// Elements currently stored in `bucket`, in insertion order.
    pub fn bucket(&self, bucket: usize) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len[bucket] as usize).map(move |j| self.elements[self.slot_index(bucket, j)])
    }

    pub fn len(&self) -> usize {
        self.len.iter().map(|&l| l as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len.iter().all(|&l| l == 0)
    }

    /// Largest bucket occupancy.
    pub fn max_len(&self) -> usize {
        self.len.iter().copied().max().unwrap_or(0) as usize
    }

    /// Whether any insert since the last reset landed outside its home bucket.
    pub fn spilled(&self) -> bool {
        self.spilled
    }

    pub fn reset(&mut self) {
        self.len.fill(0);
        self.spilled = false;
    }

    /// Inserts `key`, returning the bucket it landed in.
    pub fn insert(&mut self, key: VertexId) -> Result<usize> {
        let home = self.hash(key);
        let mut bucket = home;
        loop {
            let len = self.len[bucket] as usize;
            if len < self.capacity {
                let slot = self.slot_index(bucket, len);
                self.elements[slot] = key;
                self.len[bucket] += 1;
                if bucket != home {
                    self.spilled = true;
                }
                return Ok(bucket);
            }
            bucket += 1;
            if bucket == self.buckets {
                bucket = 0;
            }
            if bucket == home {
                return Err(Error::CapacityExhausted {
                    buckets: self.buckets,
                    capacity: self.capacity,
                });
            }
        }
    }

    /// Resets the table and inserts every key of `keys`.
    pub fn build(&mut self, keys: &[VertexId]) -> Result<()> {
        self.reset();
        if keys.len() > self.slots() {
            return Err(Error::CapacityExhausted {
                buckets: self.buckets,
                capacity: self.capacity,
            });
        }
        keys.iter().try_for_each(|&k| self.insert(k).map(|_| ()))
    }

    /// Linear search of `key`'s home bucket. The scan only moves on to the
    /// following buckets while the bucket just scanned is full.
    #[inline]
    pub fn probe(&self, key: VertexId) -> bool {
        let home = self.hash(key);
        let mut bucket = home;
        loop {
            let len = self.len[bucket] as usize;
            let mut column = self.elements[bucket..].iter().step_by(self.buckets);
            if column.by_ref().take(len).any(|&e| e == key) {
                return true;
            }
            if len < self.capacity {
                return false;
            }
            bucket += 1;
            if bucket == self.buckets {
                bucket = 0;
            }
            if bucket == home {
                return false;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn home_bucket_is_key_mod_b() {
        let mut t = HashTable::new(10, 4).unwrap();
        assert_eq!(t.insert(18).unwrap(), 8);
        assert!(t.probe(18));
        assert!(!t.probe(8));
    }

    #[test]
    fn mod_four_layout() {
        let mut t = HashTable::new(4, 3).unwrap();
        t.build(&[4, 5, 6, 3, 8]).unwrap();
        assert_eq!(t.bucket_lens(), &[2, 1, 1, 1]);
        assert_eq!(t.bucket(0).collect::<Vec<_>>(), vec![4, 8]);
        assert_eq!(t.bucket(1).collect::<Vec<_>>(), vec![5]);
        assert_eq!(t.bucket(2).collect::<Vec<_>>(), vec![6]);
        assert_eq!(t.bucket(3).collect::<Vec<_>>(), vec![3]);
        // row 0 holds the first element of every bucket, row 1 starts with 8
        assert_eq!(&t.raw_elements()[..4], &[4, 5, 6, 3]);
        assert_eq!(t.raw_elements()[4], 8);
        assert!(!t.probe(9));
        assert!(!t.spilled());
    }

    #[test]
    fn empty_table_probes_miss() {
        let t = HashTable::new(32, 128).unwrap();
        assert!(!t.probe(7));
        assert_eq!(t.max_len(), 0);
    }

    #[test]
    fn exhaustion_is_an_error() {
        let mut t = HashTable::new(1, 2).unwrap();
        assert!(matches!(
            t.build(&[0, 1, 2]),
            Err(Error::CapacityExhausted {
                buckets: 1,
                capacity: 2
            })
        ));
        let mut t = HashTable::new(2, 1).unwrap();
        t.insert(0).unwrap();
        t.insert(2).unwrap();
        assert!(t.insert(4).is_err());
    }

    #[test]
    fn spill_goes_to_next_open_bucket_and_stays_findable() {
        let mut t = HashTable::new(4, 2).unwrap();
        t.build(&[1, 5, 9, 13, 2]).unwrap();
        // 1,5 fill bucket 1; 9 and 13 spill to bucket 2; 2 then spills to 3
        assert!(t.spilled());
        assert_eq!(t.bucket_lens(), &[0, 2, 2, 1]);
        for k in [1, 5, 9, 13, 2] {
            assert!(t.probe(k), "lost {k}");
        }
        for k in [0, 3, 6, 17, 21] {
            assert!(!t.probe(k), "phantom {k}");
        }
    }

    #[test]
    fn spill_wraps_around() {
        let mut t = HashTable::new(3, 1).unwrap();
        t.build(&[2, 5]).unwrap();
        assert_eq!(t.bucket_lens(), &[1, 0, 1]);
        assert!(t.probe(5));
        assert!(!t.probe(8));
    }

    #[test]
    fn reset_clears_only_lengths() {
        let mut t = HashTable::new(4, 2).unwrap();
        t.build(&[1, 2, 3]).unwrap();
        t.reset();
        assert!(t.is_empty());
        assert!(!t.probe(1));
        t.build(&[7]).unwrap();
        assert!(t.probe(7));
        assert!(!t.probe(3));
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn zero_sizes_rejected() {
        assert!(HashTable::new(0, 4).is_err());
        assert!(HashTable::new(4, 0).is_err());
    }
}
