//! Seeded random-instance generators: square lattices with nearest-neighbor
//! couplings (open boundary) and Erdős–Rényi-style random graphs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use super::{IsingModel, ModelError, PottsModel};

/// Distribution the coupling (and optional field) strengths are drawn from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingDist {
    /// Uniform on [-1, 1].
    Uniform,
    /// Standard normal.
    Normal,
}

impl CouplingDist {
    fn sample(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            CouplingDist::Uniform => Uniform::new_inclusive(-1.0, 1.0).sample(rng),
            CouplingDist::Normal => Normal::new(0.0, 1.0).unwrap().sample(rng),
        }
    }
}

/// An L x L square lattice with nearest-neighbor couplings drawn from
/// `dist` and, if `field_dist` is given, per-site fields drawn from it.
/// Open boundary: no wrap-around edges.
pub fn generate_lattice(
    l: usize,
    dist: CouplingDist,
    field_dist: Option<CouplingDist>,
    seed: u64,
) -> Result<IsingModel, ModelError> {
    if l == 0 {
        return Err(ModelError::Invalid("lattice side must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let site = |r: usize, c: usize| r * l + c;
    let mut model = IsingModel::with_sites(
        (0..l).flat_map(|r| (0..l).map(move |c| format!("s{r}_{c}"))).collect(),
    );
    for r in 0..l {
        for c in 0..l {
            if c + 1 < l {
                model.set_coupling(site(r, c), site(r, c + 1), dist.sample(&mut rng))?;
            }
            if r + 1 < l {
                model.set_coupling(site(r, c), site(r + 1, c), dist.sample(&mut rng))?;
            }
        }
    }
    if let Some(fd) = field_dist {
        for i in 0..l * l {
            model.set_field(i, fd.sample(&mut rng))?;
        }
    }
    Ok(model)
}

/// A random graph on n sites: each of the n(n-1)/2 edges is present
/// independently with probability `expected_degree / (n - 1)`, with coupling
/// strengths from `dist` and optional fields from `field_dist`.
pub fn generate_random_graph(
    n: usize,
    expected_degree: f64,
    dist: CouplingDist,
    field_dist: Option<CouplingDist>,
    seed: u64,
) -> Result<IsingModel, ModelError> {
    if n == 0 {
        return Err(ModelError::Invalid("need at least one site".into()));
    }
    if !(expected_degree >= 0.0) {
        return Err(ModelError::Invalid("expected degree must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = if n > 1 { (expected_degree / (n - 1) as f64).min(1.0) } else { 0.0 };
    let mut model = IsingModel::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                model.set_coupling(i, j, dist.sample(&mut rng))?;
            }
        }
    }
    if let Some(fd) = field_dist {
        for i in 0..n {
            model.set_field(i, fd.sample(&mut rng))?;
        }
    }
    Ok(model)
}

impl PottsModel {
    /// A standard Potts model on the edge set of an Ising model, with a
    /// single coupling strength `j` and `q` states per site.
    pub fn from_graph(graph: &IsingModel, j: f64, q: u32) -> Self {
        PottsModel::Standard {
            sites: graph.sites.clone(),
            edges: graph.couplings.keys().copied().collect(),
            j,
            q,
        }
    }
}
