//! Model description and elementary operations: group sizes, coupling
//! matrices, spin configurations, group magnetization states, Hamiltonian
//! and enumeration of the magnetization grid.
//!
//! Spins take values +-1 and are partitioned into d groups of sizes n_1..n_d
//! (total n). The energy of a configuration depends only on the vector of
//! group sums s, through H(s) = -(1/2n) sum_{a,b} J_ab s_a s_b,
//! where the double sum over individual spins collapses to s_a * s_b because
//! it runs over all ordered pairs, including equal indices. The probability
//! of a configuration is proportional to exp(-H), so the group-sum vector is
//! a sufficient statistic: each state s carries a multiplicity
//! prod_a C(n_a, k_a) with k_a = (n_a + s_a) / 2.

use serde::{Deserialize, Serialize};

use crate::error::{CwError, Result};
use crate::linalg::{self, SquareMatrix};
use crate::numeric::ln_choose;

/// Group counts beyond this are rejected: the dense linear algebra in this
/// crate is written for small dimensions.
pub const MAX_GROUPS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSizes {
    sizes: Vec<u32>,
}

impl GroupSizes {
    pub fn new(sizes: Vec<u32>) -> Result<Self> {
        if sizes.is_empty() || sizes.len() > MAX_GROUPS {
            return Err(CwError::InvalidInput(format!(
                "need between 1 and {MAX_GROUPS} groups, got {}",
                sizes.len()
            )));
        }
        if sizes.contains(&0) {
            return Err(CwError::InvalidInput("every group must hold at least one spin".into()));
        }
        Ok(Self { sizes })
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn size(&self, group: usize) -> u32 {
        self.sizes[group]
    }

    pub fn total(&self) -> u64 {
        self.sizes.iter().map(|&n| n as u64).sum()
    }

    /// Number of magnetization states, prod (n_a + 1), None on usize overflow.
    pub fn state_count(&self) -> Option<usize> {
        self.sizes
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n as usize + 1))
    }
}

/// Coupling between groups. Homogeneous couplings store the single constant
/// beta and materialize the dense matrix only on demand; heterogeneous
/// couplings are symmetrized to (J + J^T)/2 on construction, with a flag
/// recording whether that changed anything.
#[derive(Clone, Debug, PartialEq)]
pub enum CouplingMatrix {
    Homogeneous { dim: usize, beta: f64 },
    Heterogeneous { entries: SquareMatrix, symmetrized: bool },
}

impl CouplingMatrix {
    pub fn homogeneous(dim: usize, beta: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_GROUPS {
            return Err(CwError::InvalidInput(format!("bad dimension {dim}")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(CwError::InvalidInput(format!(
                "homogeneous coupling needs beta >= 0, got {beta}"
            )));
        }
        Ok(Self::Homogeneous { dim, beta })
    }

    /// Heterogeneous coupling; requires positive definiteness (checked on the
    /// symmetrized matrix).
    pub fn heterogeneous(rows: &[Vec<f64>]) -> Result<Self> {
        let coupling = Self::heterogeneous_indefinite(rows)?;
        if let Self::Heterogeneous { entries, .. } = &coupling {
            if let Err(minor) = linalg::cholesky(entries) {
                return Err(CwError::NotPositiveDefinite { leading_minor: minor });
            }
        }
        Ok(coupling)
    }

    /// Heterogeneous coupling without the positive definiteness check. The
    /// finite-size model (Hamiltonian, pmf, sampling) is well defined for any
    /// symmetric coupling; regime classification and mixture representations
    /// reject couplings that fail their own requirements.
    pub fn heterogeneous_indefinite(rows: &[Vec<f64>]) -> Result<Self> {
        let raw = SquareMatrix::from_rows(rows)?;
        if raw.dim() > MAX_GROUPS {
            return Err(CwError::InvalidInput(format!(
                "coupling dimension {} exceeds {MAX_GROUPS}",
                raw.dim()
            )));
        }
        let (entries, changed) = raw.symmetrized();
        Ok(Self::Heterogeneous { entries, symmetrized: changed })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Homogeneous { dim, .. } => *dim,
            Self::Heterogeneous { entries, .. } => entries.dim(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, Self::Homogeneous { .. })
    }

    pub fn beta(&self) -> Option<f64> {
        match self {
            Self::Homogeneous { beta, .. } => Some(*beta),
            Self::Heterogeneous { .. } => None,
        }
    }

    pub fn was_symmetrized(&self) -> bool {
        matches!(self, Self::Heterogeneous { symmetrized: true, .. })
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            Self::Homogeneous { beta, .. } => *beta,
            Self::Heterogeneous { entries, .. } => entries.get(i, j),
        }
    }

    /// Dense matrix view (materializes the constant matrix if homogeneous).
    pub fn dense(&self) -> SquareMatrix {
        match self {
            Self::Homogeneous { dim, beta } => SquareMatrix::filled(*dim, *beta),
            Self::Heterogeneous { entries, .. } => entries.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub groups: GroupSizes,
    pub coupling: CouplingMatrix,
}

impl ModelSpec {
    pub fn new(groups: GroupSizes, coupling: CouplingMatrix) -> Result<Self> {
        if groups.dim() != coupling.dim() {
            return Err(CwError::InvalidInput(format!(
                "group count {} does not match coupling dimension {}",
                groups.dim(),
                coupling.dim()
            )));
        }
        Ok(Self { groups, coupling })
    }

    pub fn dim(&self) -> usize {
        self.groups.dim()
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Self::from_json_with(json, SymmetryPolicy::Reject).map(|(spec, _)| spec)
    }

    /// Parse with an explicit policy for asymmetric heterogeneous matrices.
    /// With `SymmetryPolicy::Symmetrize` the matrix is replaced by
    /// (J + J^T)/2 and a warning string is returned.
    pub fn from_json_with(json: &str, policy: SymmetryPolicy) -> Result<(Self, Vec<String>)> {
        let raw: RawModelSpec =
            serde_json::from_str(json).map_err(|e| CwError::InvalidInput(e.to_string()))?;
        raw.build(policy)
    }

    pub fn to_json(&self) -> String {
        let raw = RawModelSpec {
            sizes: self.groups.sizes().to_vec(),
            coupling: match &self.coupling {
                CouplingMatrix::Homogeneous { beta, .. } => RawCoupling::Homogeneous(*beta),
                CouplingMatrix::Heterogeneous { entries, .. } => {
                    RawCoupling::Matrix(entries.rows())
                }
            },
        };
        serde_json::to_string(&raw).expect("plain data serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryPolicy {
    Reject,
    Symmetrize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawModelSpec {
    pub sizes: Vec<u32>,
    pub coupling: RawCoupling,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub(crate) enum RawCoupling {
    Homogeneous(f64),
    Matrix(Vec<Vec<f64>>),
}

impl RawModelSpec {
    pub(crate) fn build(self, policy: SymmetryPolicy) -> Result<(ModelSpec, Vec<String>)> {
        self.build_with(policy, true)
    }

    /// With `require_pd = false` a symmetric but indefinite coupling matrix
    /// is accepted, so regime classification can return a verdict on it
    /// instead of failing at construction.
    pub(crate) fn build_with(
        self,
        policy: SymmetryPolicy,
        require_pd: bool,
    ) -> Result<(ModelSpec, Vec<String>)> {
        let groups = GroupSizes::new(self.sizes)?;
        let mut warnings = Vec::new();
        let coupling = match self.coupling {
            RawCoupling::Homogeneous(beta) => CouplingMatrix::homogeneous(groups.dim(), beta)?,
            RawCoupling::Matrix(rows) => {
                let raw = SquareMatrix::from_rows(&rows)?;
                if !raw.is_symmetric(0.0) {
                    match policy {
                        SymmetryPolicy::Reject => {
                            return Err(CwError::InvalidInput(
                                "coupling matrix is not symmetric (pass the symmetrize option to accept (J + J^T)/2)"
                                    .into(),
                            ))
                        }
                        SymmetryPolicy::Symmetrize => warnings.push(
                            "coupling matrix was not symmetric; replaced by (J + J^T)/2".into(),
                        ),
                    }
                }
                if require_pd {
                    CouplingMatrix::heterogeneous(&rows)?
                } else {
                    CouplingMatrix::heterogeneous_indefinite(&rows)?
                }
            }
        };
        Ok((ModelSpec::new(groups, coupling)?, warnings))
    }
}

/// Explicit spin assignment, one vector of +-1 per group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinConfiguration {
    groups: Vec<Vec<i8>>,
}

impl SpinConfiguration {
    pub fn new(groups: Vec<Vec<i8>>) -> Result<Self> {
        for g in &groups {
            if g.iter().any(|&s| s != 1 && s != -1) {
                return Err(CwError::InvalidInput("spins must be +1 or -1".into()));
            }
        }
        Ok(Self { groups })
    }

    pub fn group(&self, i: usize) -> &[i8] {
        &self.groups[i]
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }
}

/// Vector of group spin sums. Each sum satisfies |s_a| <= n_a and has the
/// parity of n_a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagnetizationState {
    sums: Vec<i64>,
}

impl MagnetizationState {
    pub fn new(groups: &GroupSizes, sums: Vec<i64>) -> Result<Self> {
        if sums.len() != groups.dim() {
            return Err(CwError::InvalidInput(format!(
                "state has {} components, expected {}",
                sums.len(),
                groups.dim()
            )));
        }
        for (a, (&s, &n)) in sums.iter().zip(groups.sizes()).enumerate() {
            let n = n as i64;
            if s.abs() > n {
                return Err(CwError::InvalidInput(format!(
                    "group {a}: |sum| = {} exceeds group size {n}",
                    s.abs()
                )));
            }
            if (s - n) % 2 != 0 {
                return Err(CwError::InvalidInput(format!(
                    "group {a}: sum {s} has wrong parity for size {n}"
                )));
            }
        }
        Ok(Self { sums })
    }

    pub(crate) fn from_counts(groups: &GroupSizes, counts: &[u32]) -> Self {
        let sums = counts
            .iter()
            .zip(groups.sizes())
            .map(|(&k, &n)| 2 * k as i64 - n as i64)
            .collect();
        Self { sums }
    }

    pub fn sums(&self) -> &[i64] {
        &self.sums
    }

    /// Up-spin counts k_a = (n_a + s_a) / 2.
    pub fn counts(&self, groups: &GroupSizes) -> Vec<u32> {
        self.sums
            .iter()
            .zip(groups.sizes())
            .map(|(&s, &n)| ((n as i64 + s) / 2) as u32)
            .collect()
    }
}

/// Sum the spins of each group. Errors if the configuration shape does not
/// match the group sizes.
pub fn group_sums(groups: &GroupSizes, config: &SpinConfiguration) -> Result<MagnetizationState> {
    if config.num_groups() != groups.dim() {
        return Err(CwError::InvalidInput(format!(
            "configuration has {} groups, expected {}",
            config.num_groups(),
            groups.dim()
        )));
    }
    let mut sums = Vec::with_capacity(groups.dim());
    for (a, &n) in groups.sizes().iter().enumerate() {
        let g = config.group(a);
        if g.len() != n as usize {
            return Err(CwError::InvalidInput(format!(
                "group {a} has {} spins, expected {n}",
                g.len()
            )));
        }
        sums.push(g.iter().map(|&s| s as i64).sum());
    }
    Ok(MagnetizationState { sums })
}

/// H(s) = -(1/2n) sum_{a,b} J_ab s_a s_b. For a homogeneous coupling this is
/// -beta (sum_a s_a)^2 / (2n) without materializing the matrix.
pub fn hamiltonian(spec: &ModelSpec, state: &MagnetizationState) -> f64 {
    let n = spec.groups.total() as f64;
    match &spec.coupling {
        CouplingMatrix::Homogeneous { beta, .. } => {
            let total: i64 = state.sums().iter().sum();
            let t = total as f64;
            -beta * t * t / (2.0 * n)
        }
        CouplingMatrix::Heterogeneous { entries, .. } => {
            let s: Vec<f64> = state.sums().iter().map(|&v| v as f64).collect();
            -entries.quadratic_form(&s) / (2.0 * n)
        }
    }
}

/// Log of the unnormalized state weight, multiplicity plus Boltzmann factor:
/// sum_a ln C(n_a, k_a) - H(s) with k_a = (n_a + s_a)/2.
pub fn log_weight(spec: &ModelSpec, state: &MagnetizationState) -> f64 {
    let mut lw = 0.0;
    for (&s, &n) in state.sums().iter().zip(spec.groups.sizes()) {
        let k = ((n as i64 + s) / 2) as u64;
        lw += ln_choose(n as u64, k);
    }
    lw - hamiltonian(spec, state)
}

/// Per-group scaling s_a / sqrt(n_a).
pub fn scaled_point(groups: &GroupSizes, state: &MagnetizationState) -> Vec<f64> {
    state
        .sums()
        .iter()
        .zip(groups.sizes())
        .map(|(&s, &n)| s as f64 / (n as f64).sqrt())
        .collect()
}

/// State at a given flat index in enumeration order. Enumeration is
/// lexicographic in the count vector (k_1, ..., k_d) with k_d varying
/// fastest, i.e. row-major over the count grid.
pub fn state_at(groups: &GroupSizes, index: usize) -> MagnetizationState {
    let d = groups.dim();
    let mut counts = vec![0u32; d];
    let mut rem = index;
    for a in (0..d).rev() {
        let base = groups.size(a) as usize + 1;
        counts[a] = (rem % base) as u32;
        rem /= base;
    }
    debug_assert_eq!(rem, 0, "index out of range");
    MagnetizationState::from_counts(groups, &counts)
}

/// Flat index of a state in enumeration order.
pub fn state_index(groups: &GroupSizes, state: &MagnetizationState) -> usize {
    let mut idx = 0usize;
    for (a, &n) in groups.sizes().iter().enumerate() {
        let k = ((n as i64 + state.sums()[a]) / 2) as usize;
        idx = idx * (n as usize + 1) + k;
    }
    idx
}

/// Iterate every magnetization state in enumeration order.
pub fn enumerate_states(groups: &GroupSizes) -> impl Iterator<Item = MagnetizationState> + '_ {
    let count = groups
        .state_count()
        .expect("state count overflows usize; gate on state_count() first");
    (0..count).map(move |i| state_at(groups, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn homog(sizes: &[u32], beta: f64) -> ModelSpec {
        let groups = GroupSizes::new(sizes.to_vec()).unwrap();
        let coupling = CouplingMatrix::homogeneous(groups.dim(), beta).unwrap();
        ModelSpec::new(groups, coupling).unwrap()
    }

    fn hetero(sizes: &[u32], rows: &[&[f64]]) -> ModelSpec {
        let groups = GroupSizes::new(sizes.to_vec()).unwrap();
        let coupling = CouplingMatrix::heterogeneous_indefinite(
            &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
        )
        .unwrap();
        ModelSpec::new(groups, coupling).unwrap()
    }

    /// Literal double sum over individual spins, the defining form of the
    /// energy. Oracle for `hamiltonian`.
    fn hamiltonian_by_spins(spec: &ModelSpec, config: &SpinConfiguration) -> f64 {
        let n = spec.groups.total() as f64;
        let d = spec.dim();
        let mut acc = 0.0;
        for a in 0..d {
            for b in 0..d {
                let j = spec.coupling.entry(a, b);
                for &x in config.group(a) {
                    for &y in config.group(b) {
                        acc += j * (x as f64) * (y as f64);
                    }
                }
            }
        }
        -acc / (2.0 * n)
    }

    /// All 2^n spin configurations for small models (test oracle only).
    fn all_configs(groups: &GroupSizes) -> Vec<SpinConfiguration> {
        let n = groups.total() as u32;
        assert!(n <= 16);
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let mut cfg = Vec::new();
            let mut bit = 0;
            for &size in groups.sizes() {
                let mut g = Vec::with_capacity(size as usize);
                for _ in 0..size {
                    g.push(if mask >> bit & 1 == 1 { 1i8 } else { -1 });
                    bit += 1;
                }
                cfg.push(g);
            }
            out.push(SpinConfiguration::new(cfg).unwrap());
        }
        out
    }

    #[test]
    fn group_sums_examples() {
        let g = GroupSizes::new(vec![3]).unwrap();
        let c = SpinConfiguration::new(vec![vec![1, 1, 1]]).unwrap();
        assert_eq!(group_sums(&g, &c).unwrap().sums(), &[3]);

        let g = GroupSizes::new(vec![2, 2]).unwrap();
        let c = SpinConfiguration::new(vec![vec![1, -1], vec![-1, -1]]).unwrap();
        assert_eq!(group_sums(&g, &c).unwrap().sums(), &[0, -2]);

        let short = SpinConfiguration::new(vec![vec![1], vec![-1, -1]]).unwrap();
        assert!(group_sums(&g, &short).is_err());
    }

    #[test]
    fn hamiltonian_frozen_values() {
        // d=1, n=4, beta=1, s=4: -(1/8) * 16 = -2
        let spec = homog(&[4], 1.0);
        let s = MagnetizationState::new(&spec.groups, vec![4]).unwrap();
        assert_eq!(hamiltonian(&spec, &s), -2.0);

        // d=2, n=(1,1), J=[[0,1],[1,0]], s=(1,1): -(1/4) * 2 = -0.5
        let spec = hetero(&[1, 1], &[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = MagnetizationState::new(&spec.groups, vec![1, 1]).unwrap();
        assert_eq!(hamiltonian(&spec, &s), -0.5);

        // beta = 0 kills the energy for every state
        let spec = homog(&[3, 2], 0.0);
        for st in enumerate_states(&spec.groups) {
            assert_eq!(hamiltonian(&spec, &st), 0.0);
        }
    }

    #[test]
    fn hamiltonian_matches_literal_double_sum() {
        let specs = [
            homog(&[5, 3], 0.7),
            hetero(&[2, 3, 2], &[&[0.5, 0.25, 0.1], &[0.25, 0.5, 0.0], &[0.1, 0.0, 0.4]]),
            hetero(&[1, 1], &[&[0.0, 1.0], &[1.0, 0.0]]),
        ];
        for spec in &specs {
            for cfg in all_configs(&spec.groups) {
                let state = group_sums(&spec.groups, &cfg).unwrap();
                let got = hamiltonian(spec, &state);
                let want = hamiltonian_by_spins(spec, &cfg);
                assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn symmetrizing_leaves_hamiltonian_unchanged() {
        // energy through the symmetrized matrix equals the literal double sum
        // with the original asymmetric entries
        let asym: Vec<Vec<f64>> = vec![vec![0.5, 0.8], vec![0.2, 0.3]];
        let groups = GroupSizes::new(vec![3, 2]).unwrap();
        let coupling = CouplingMatrix::heterogeneous_indefinite(&asym).unwrap();
        assert!(coupling.was_symmetrized());
        let spec = ModelSpec::new(groups.clone(), coupling).unwrap();

        let n = groups.total() as f64;
        for st in enumerate_states(&groups) {
            let s: Vec<f64> = st.sums().iter().map(|&v| v as f64).collect();
            let mut raw = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    raw += asym[a][b] * s[a] * s[b];
                }
            }
            let want = -raw / (2.0 * n);
            assert!((hamiltonian(&spec, &st) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn log_weight_frozen_values() {
        // d=1, n=2, s=0: ln C(2,1) - 0 = ln 2
        let spec = homog(&[2], 0.5);
        let s0 = MagnetizationState::new(&spec.groups, vec![0]).unwrap();
        assert!((log_weight(&spec, &s0) - 2.0f64.ln()).abs() < 1e-14);
        // d=1, n=2, s=2: ln C(2,2) + beta * 4 / 4 = beta
        let s2 = MagnetizationState::new(&spec.groups, vec![2]).unwrap();
        assert!((log_weight(&spec, &s2) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn log_weight_is_even_bitwise() {
        let spec = hetero(&[5, 4], &[&[0.5, 0.25], &[0.25, 0.5]]);
        for st in enumerate_states(&spec.groups) {
            let neg =
                MagnetizationState::new(&spec.groups, st.sums().iter().map(|&s| -s).collect())
                    .unwrap();
            assert_eq!(log_weight(&spec, &st).to_bits(), log_weight(&spec, &neg).to_bits());
        }
    }

    #[test]
    fn partition_function_matches_config_enumeration() {
        let specs = [
            homog(&[4], 1.2),
            homog(&[3, 3], 0.5),
            hetero(&[2, 2], &[&[0.5, 0.25], &[0.25, 0.5]]),
            hetero(&[3, 2, 2], &[&[0.6, 0.2, 0.1], &[0.2, 0.5, 0.15], &[0.1, 0.15, 0.4]]),
        ];
        for spec in &specs {
            let by_states: f64 =
                enumerate_states(&spec.groups).map(|s| log_weight(spec, &s).exp()).sum();
            let by_configs: f64 = all_configs(&spec.groups)
                .iter()
                .map(|c| (-hamiltonian_by_spins(spec, c)).exp())
                .sum();
            assert!(
                (by_states - by_configs).abs() <= 1e-10 * by_configs,
                "states {by_states} vs configs {by_configs}"
            );
        }
    }

    #[test]
    fn scaled_point_examples() {
        let g = GroupSizes::new(vec![4]).unwrap();
        let s = MagnetizationState::new(&g, vec![2]).unwrap();
        assert_eq!(scaled_point(&g, &s), vec![1.0]);

        let g = GroupSizes::new(vec![4, 9]).unwrap();
        let s = MagnetizationState::new(&g, vec![0, 3]).unwrap();
        assert_eq!(scaled_point(&g, &s), vec![0.0, 1.0]);

        let g = GroupSizes::new(vec![2]).unwrap();
        let s = MagnetizationState::new(&g, vec![-2]).unwrap();
        assert!((scaled_point(&g, &s)[0] + 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn enumeration_order_count_and_parity() {
        let g = GroupSizes::new(vec![2]).unwrap();
        let states: Vec<_> = enumerate_states(&g).map(|s| s.sums().to_vec()).collect();
        assert_eq!(states, vec![vec![-2], vec![0], vec![2]]);

        let g = GroupSizes::new(vec![1, 1]).unwrap();
        let states: Vec<_> = enumerate_states(&g).map(|s| s.sums().to_vec()).collect();
        assert_eq!(states, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);

        let g = GroupSizes::new(vec![2, 3]).unwrap();
        assert_eq!(g.state_count().unwrap(), 12);
        let states: Vec<_> = enumerate_states(&g).collect();
        assert_eq!(states.len(), 12);
        for (i, st) in states.iter().enumerate() {
            assert_eq!(state_index(&g, st), i);
            for (&s, &n) in st.sums().iter().zip(g.sizes()) {
                assert!(s.abs() <= n as i64);
                assert_eq!((s - n as i64).rem_euclid(2), 0);
            }
        }
    }

    #[test]
    fn scaled_points_are_distinct_on_the_lattice() {
        let g = GroupSizes::new(vec![3, 4]).unwrap();
        let mut seen = std::collections::HashSet::new();
        for st in enumerate_states(&g) {
            let p = scaled_point(&g, &st);
            // on the lattice: p_a * sqrt(n_a) is an integer with parity n_a
            for (&x, &n) in p.iter().zip(g.sizes()) {
                let back = x * (n as f64).sqrt();
                assert!((back - back.round()).abs() < 1e-9);
            }
            assert!(seen.insert(format!("{:?}", st.sums())));
        }
        assert_eq!(seen.len(), 20);
    }

    #[test]
    fn state_validation() {
        let g = GroupSizes::new(vec![3]).unwrap();
        assert!(MagnetizationState::new(&g, vec![5]).is_err());
        assert!(MagnetizationState::new(&g, vec![2]).is_err()); // parity
        assert!(MagnetizationState::new(&g, vec![1, 1]).is_err()); // length
        assert!(MagnetizationState::new(&g, vec![-3]).is_ok());
    }

    #[test]
    fn construction_guards() {
        assert!(GroupSizes::new(vec![]).is_err());
        assert!(GroupSizes::new(vec![3, 0]).is_err());
        assert!(GroupSizes::new(vec![1; 17]).is_err());
        assert!(CouplingMatrix::homogeneous(2, -0.1).is_err());
        assert!(CouplingMatrix::homogeneous(2, f64::NAN).is_err());
        // indefinite matrix rejected by the checked constructor
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(matches!(
            CouplingMatrix::heterogeneous(&rows),
            Err(CwError::NotPositiveDefinite { leading_minor: 1 })
        ));
        assert!(CouplingMatrix::heterogeneous_indefinite(&rows).is_ok());
        // dimension mismatch between groups and coupling
        let g = GroupSizes::new(vec![2, 2, 2]).unwrap();
        let c = CouplingMatrix::homogeneous(2, 0.5).unwrap();
        assert!(ModelSpec::new(g, c).is_err());
    }

    #[test]
    fn json_round_trip_and_symmetry_policy() {
        let spec = homog(&[8, 8], 0.5);
        let back = ModelSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(spec, back);

        let json = r#"{"sizes":[2,2],"coupling":{"matrix":[[0.5,0.25],[0.25,0.5]]}}"#;
        let spec = ModelSpec::from_json(json).unwrap();
        assert!(!spec.coupling.is_homogeneous());
        assert_eq!(spec.coupling.entry(0, 1), 0.25);

        let asym = r#"{"sizes":[2,2],"coupling":{"matrix":[[0.5,0.3],[0.2,0.5]]}}"#;
        assert!(ModelSpec::from_json(asym).is_err());
        let (spec, warnings) =
            ModelSpec::from_json_with(asym, SymmetryPolicy::Symmetrize).unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(spec.coupling.was_symmetrized());
        assert_eq!(spec.coupling.entry(0, 1), 0.25);

        let unknown = r#"{"sizes":[2],"coupling":{"homogeneous":0.5},"extra":1}"#;
        assert!(ModelSpec::from_json(unknown).is_err());
    }
}
