//! Counter-mode bit mixing shared by the sampler and internal start vectors.

/// 64-bit finalizer (Stafford mix13). Bijective, full avalanche.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const PHI: u64 = 0x9E37_79B9_7F4A_7C15;
const SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// Random-access hash of a `(master_seed, stream, replication, label)`
/// address. Any word can be computed without generating its predecessors,
/// which is what makes replication-parallel runs order-independent.
pub(crate) fn counter_hash(master_seed: u64, stream: u64, replication: u64, label: u64) -> u64 {
    let mut z = mix64(master_seed ^ SALT);
    z = mix64(z ^ stream.wrapping_mul(PHI));
    z = mix64(z ^ replication.wrapping_mul(PHI));
    mix64(z ^ label.wrapping_mul(PHI))
}

/// Map 64 random bits to a uniform double strictly inside (0, 1).
///
/// Uses 52 bits so the largest value is 1 - 2^-53, which is exactly
/// representable; a 53-bit grid would round its top point to 1.0 and leak
/// an endpoint into the supposedly open interval.
pub(crate) fn uniform_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / 4_503_599_627_370_496.0)
}
