//! Tiny stable content digest (64-bit FNV-1a) for fingerprinting instances
//! and experiment descriptions in exported files. Not cryptographic — just
//! a stable, dependency-free checksum that detects mismatched inputs.

/// Incremental FNV-1a 64-bit hasher.
#[derive(Clone, Debug)]
pub struct Fnv1a {
    state: u64,
}

const OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
const PRIME: u64 = 0x0000_0100_0000_01b3;

impl Fnv1a {
    pub fn new() -> Fnv1a {
        Fnv1a { state: OFFSET_BASIS }
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.state ^= b as u64;
            self.state = self.state.wrapping_mul(PRIME);
        }
    }

    pub fn write_u32(&mut self, v: u32) {
        self.write(&v.to_le_bytes());
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.state
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Fnv1a::new()
    }
}

/// One-shot digest of a byte string.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    let mut d = Fnv1a::new();
    d.write(bytes);
    d.finish()
}
