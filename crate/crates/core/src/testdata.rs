//! Reference data shared by unit tests: a three-classifier labeling run on a
//! 20,000-item employment survey sample, split by true label.

pub(crate) const TABLE_ACTUAL_A: [u64; 8] = [424, 168, 283, 415, 252, 194, 129, 135];
pub(crate) const TABLE_ACTUAL_B: [u64; 8] = [144, 385, 366, 1398, 3282, 3413, 939, 8073];
pub(crate) const TABLE_OBSERVED: [u64; 8] = [568, 553, 649, 1813, 3534, 3607, 1068, 8208];
/// Published algebraic-evaluation partition, `(a, b)` per pattern.
pub(crate) const TABLE_AE: [(i64, i64); 8] =
    [(399, 169), (133, 420), (253, 396), (416, 1397), (264, 3270), (139, 3468), (84, 984), (88, 8120)];
