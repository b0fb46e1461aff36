/// Resource caps that turn combinatorial blowup into [`crate::Error::ResourceLimit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of multi-ideals in a tensor product.
    pub max_tensor: usize,
    /// Maximum number of maps produced by a single enumeration.
    pub max_maps: usize,
    /// Largest lattice size accepted by [`crate::lattice::enumerate_lattices`].
    pub max_lattice_size: usize,
}

pub const MAX_TENSOR_ENV: &str = "MORITA_MAX_TENSOR";

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_tensor: 100_000,
            max_maps: 2_000_000,
            max_lattice_size: 7,
        }
    }
}

impl Limits {
    /// Defaults, with `MORITA_MAX_TENSOR` overriding the tensor cap when it parses.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(cap) = std::env::var(MAX_TENSOR_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&cap| cap > 0)
        {
            limits.max_tensor = cap;
        }
        limits
    }

    pub fn with_max_tensor(mut self, cap: usize) -> Self {
        self.max_tensor = cap;
        self
    }

    pub fn with_max_maps(mut self, cap: usize) -> Self {
        self.max_maps = cap;
        self
    }
}
