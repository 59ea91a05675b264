//! Brute-force validation oracle for the symmetric-subspace Hamiltonian.
//!
//! For a handful of atoms the full tensor-product space (3^N atomic
//! configurations × truncated Fock space) is still tiny, so the collective
//! Hamiltonian can be built without any symmetry assumptions and projected
//! onto the symmetric states with an explicit isometry. The projected
//! matrix must match [`super::build_hamiltonian`] element-wise.

use ndarray::Array2;

use super::{Label, SingleModeError, SymmetricBasis};

/// Full-space Hamiltonian, the isometry onto symmetric states, and the
/// projected matrix V†·H·V (ordered like the symmetric basis).
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub full: Array2<f64>,
    pub isometry: Array2<f64>,
    pub projected: Array2<f64>,
}

/// Atomic levels are encoded base-3 per atom (0 = b, 1 = a, 2 = c); the
/// full index is config·(n_max+1) + m.
fn atom_level(config: usize, atom: usize) -> usize {
    (config / 3usize.pow(atom as u32)) % 3
}

fn with_level(config: usize, atom: usize, level: usize) -> usize {
    let p = 3usize.pow(atom as u32);
    let old = atom_level(config, atom);
    config - old * p + level * p
}

/// Build the full tensor-product Hamiltonian for N ≤ 4 atoms and project
/// it onto the symmetric subspace.
pub fn brute_force_oracle(
    n_atoms: usize,
    n_max: usize,
    g: f64,
    omega: f64,
) -> Result<OracleResult, SingleModeError> {
    if n_atoms > 4 {
        return Err(SingleModeError::OracleTooLarge(n_atoms));
    }
    if n_atoms == 0 {
        return Err(SingleModeError::BadBasis("need at least one atom".into()));
    }
    let n_conf = 3usize.pow(n_atoms as u32);
    let n_ph = n_max + 1;
    let dim = n_conf * n_ph;
    let idx = |conf: usize, m: usize| conf * n_ph + m;

    let mut full = Array2::<f64>::zeros((dim, dim));
    for conf in 0..n_conf {
        for m in 0..n_ph {
            let col = idx(conf, m);
            for atom in 0..n_atoms {
                let level = atom_level(conf, atom);
                // g (a sigma_ab + h.c.): |b, m> -> |a, m-1>
                if level == 0 && m >= 1 {
                    let row = idx(with_level(conf, atom, 1), m - 1);
                    let v = g * (m as f64).sqrt();
                    full[[row, col]] += v;
                    full[[col, row]] += v;
                }
                // Omega (sigma_ac + h.c.): |c, m> -> |a, m>
                if level == 2 {
                    let row = idx(with_level(conf, atom, 1), m);
                    full[[row, col]] += omega;
                    full[[col, row]] += omega;
                }
            }
        }
    }

    // Isometry columns: normalized symmetric superpositions.
    let basis = SymmetricBasis::new(n_atoms, n_max);
    let sdim = basis.dim();
    let mut isometry = Array2::<f64>::zeros((dim, sdim));
    for (scol, &Label { k_a, k_c, m }) in basis.labels.iter().enumerate() {
        let mut members = Vec::new();
        for conf in 0..n_conf {
            let counts = (0..n_atoms).fold((0usize, 0usize), |(a, c), atom| {
                match atom_level(conf, atom) {
                    1 => (a + 1, c),
                    2 => (a, c + 1),
                    _ => (a, c),
                }
            });
            if counts == (k_a, k_c) {
                members.push(conf);
            }
        }
        let w = 1.0 / (members.len() as f64).sqrt();
        for conf in members {
            isometry[[idx(conf, m), scol]] = w;
        }
    }

    let projected = isometry.t().dot(&full).dot(&isometry);
    Ok(OracleResult { full, isometry, projected })
}
