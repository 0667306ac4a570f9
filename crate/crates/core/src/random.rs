//! Seeded random generators for states, unitaries, instruments, and
//! protocol trees.
//!
//! Every generator takes the RNG explicitly so a run is reproducible from
//! its seed; [`rng_from_seed`] is the single entry point for creating one.
//! Unitaries are Haar-distributed, instruments are drawn as isometry blocks
//! so completeness holds exactly up to roundoff.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::locc::{Answer, ProtocolTree};
use crate::measure::{Instrument, MeasureError};
use crate::qcore::{CMatrix, CVector, PartyLayout, PureState, QcoreError, TOL};

/// Deterministic RNG for reproducible draws.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary, by QR of a Ginibre matrix with each column
/// rescaled by the phase of the matching diagonal entry of R.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = ginibre(rng, dim, dim).qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > TOL {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Uniformly random pure state on the layout's full space.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, layout: &PartyLayout) -> PureState {
    let v: CVector = ginibre(rng, layout.total_dim(), 1).column(0).into_owned();
    PureState::normalized(layout.clone(), v).expect("Gaussian vector is nonzero")
}

/// Tensor product of an independent random state per party.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R, layout: &PartyLayout) -> PureState {
    let mut factors = layout.dims().iter().map(|&d| {
        let single = PartyLayout::new(vec![d]).expect("positive dimension");
        random_state(rng, &single)
    });
    let first = factors.next().expect("layouts are nonempty");
    let product = factors.fold(first, |acc, f| crate::qcore::tensor(&acc, &f));
    PureState::from_vector(layout.clone(), product.amplitudes().clone())
        .expect("product of unit vectors is a unit vector")
}

/// `count` exactly orthonormal random states: the leading columns of a Haar
/// unitary on the layout's space.
pub fn random_orthonormal_set<R: Rng + ?Sized>(
    rng: &mut R,
    layout: &PartyLayout,
    count: usize,
) -> Result<Vec<PureState>, QcoreError> {
    let d = layout.total_dim();
    if count > d {
        return Err(QcoreError::LengthMismatch {
            got: count,
            expected: d,
        });
    }
    let u = haar_unitary(rng, d);
    Ok((0..count)
        .map(|j| {
            PureState::from_vector(layout.clone(), u.column(j).into_owned())
                .expect("unitary columns are unit vectors")
        })
        .collect())
}

/// Extends the given orthonormal states to a full orthonormal basis of
/// their space, filling the complement with random directions by
/// Gram-Schmidt against everything accepted so far.
pub fn orthogonal_completion<R: Rng + ?Sized>(
    rng: &mut R,
    states: &[PureState],
) -> Result<Vec<PureState>, QcoreError> {
    let layout = states
        .first()
        .ok_or(QcoreError::EmptyLayout)?
        .layout()
        .clone();
    let d = layout.total_dim();
    let mut basis: Vec<CVector> = states.iter().map(|s| s.amplitudes().clone()).collect();
    if basis.len() > d {
        return Err(QcoreError::LengthMismatch {
            got: basis.len(),
            expected: d,
        });
    }
    while basis.len() < d {
        let mut v: CVector = ginibre(rng, d, 1).column(0).into_owned();
        for b in &basis {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
        let norm = v.norm();
        // a Gaussian vector is almost never inside the current span
        if norm > 1e-6 {
            basis.push(v / Complex64::new(norm, 0.0));
        }
    }
    basis
        .into_iter()
        .map(|v| PureState::from_vector(layout.clone(), v))
        .collect()
}

/// Random complete instrument with the given outcome count: the Kraus
/// operators are consecutive blocks of a Haar-random isometry, so
/// ΣK†K = I exactly up to roundoff.
pub fn random_instrument<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    outcomes: usize,
) -> Result<Instrument, MeasureError> {
    let qr = ginibre(rng, outcomes * dim, dim).qr();
    let q = qr.q();
    let kraus: Vec<CMatrix> = (0..outcomes)
        .map(|i| q.rows(i * dim, dim).into_owned())
        .collect();
    let labels = (1..=outcomes).map(|i| format!("k{i}")).collect();
    Instrument::new(kraus, labels)
}

/// Random protocol tree of at most the given depth over the layout. Each
/// node measures a uniformly chosen party with a random instrument of 2 or
/// 3 outcomes; branches close early with probability 0.3, and every leaf
/// carries a random answer bit.
pub fn random_tree<R: Rng + ?Sized>(
    rng: &mut R,
    layout: &PartyLayout,
    depth: usize,
) -> ProtocolTree {
    if depth == 0 || rng.random_bool(0.3) {
        return ProtocolTree::bit(rng.random_range(0..2));
    }
    let party = rng.random_range(0..layout.num_parties());
    let dim = layout.dims()[party];
    let outcomes = rng.random_range(2..=3);
    let instrument =
        random_instrument(rng, dim, outcomes).expect("isometry blocks form an instrument");
    let children = (0..outcomes)
        .map(|_| random_tree(rng, layout, depth - 1))
        .collect();
    ProtocolTree::node(party, instrument, children)
}

/// Random leaf answer, for mutating trees in tests.
pub fn random_answer<R: Rng + ?Sized>(rng: &mut R) -> Answer {
    Answer::Bit(rng.random_range(0..2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locc::{simulate, validate_locc_structure};
    use crate::qcore::{identity, is_unitary, max_abs};

    #[test]
    fn same_seed_reproduces_the_draw() {
        let layout = PartyLayout::new(vec![2, 3]).unwrap();
        let a = random_state(&mut rng_from_seed(7), &layout);
        let b = random_state(&mut rng_from_seed(7), &layout);
        assert!(a.approx_eq(&b, 0.0));
        let c = random_state(&mut rng_from_seed(8), &layout);
        assert!(!a.approx_eq(&c, 1e-3));
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = rng_from_seed(1);
        for dim in [2, 3, 4, 6] {
            let u = haar_unitary(&mut rng, dim);
            assert!(is_unitary(&u, 1e-9), "dim {dim}");
        }
    }

    #[test]
    fn orthonormal_sets_are_orthonormal() {
        let mut rng = rng_from_seed(2);
        let layout = PartyLayout::new(vec![2, 2]).unwrap();
        let set = random_orthonormal_set(&mut rng, &layout, 3).unwrap();
        for (i, a) in set.iter().enumerate() {
            for (j, b) in set.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).norm() - want).abs() < 1e-9);
            }
        }
        assert!(random_orthonormal_set(&mut rng, &layout, 5).is_err());
    }

    #[test]
    fn completion_extends_to_a_full_basis() {
        let mut rng = rng_from_seed(3);
        let layout = PartyLayout::new(vec![3]).unwrap();
        let seed_states = random_orthonormal_set(&mut rng, &layout, 1).unwrap();
        let basis = orthogonal_completion(&mut rng, &seed_states).unwrap();
        assert_eq!(basis.len(), 3);
        let mut gram = CMatrix::zeros(3, 3);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                gram[(i, j)] = a.inner(b);
            }
        }
        assert!(max_abs(&(gram - identity(3))) < 1e-9);
        assert!(basis[0].approx_eq(&seed_states[0], 1e-12));
    }

    #[test]
    fn random_instruments_are_complete() {
        let mut rng = rng_from_seed(4);
        for (dim, outcomes) in [(2, 2), (3, 3), (4, 2)] {
            let instrument = random_instrument(&mut rng, dim, outcomes).unwrap();
            assert_eq!(instrument.len(), outcomes);
        }
    }

    #[test]
    fn random_trees_are_structurally_valid_and_normalized() {
        let mut rng = rng_from_seed(5);
        let layout = PartyLayout::new(vec![2, 3]).unwrap();
        for _ in 0..20 {
            let tree = random_tree(&mut rng, &layout, 3);
            let validation = validate_locc_structure(&tree, &layout);
            assert!(validation.is_valid(), "{:?}", validation.violations);
            let state = random_state(&mut rng, &layout);
            let simulation = simulate(&tree, &state).unwrap();
            let total = simulation.distribution.total() + simulation.pruned_mass;
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn product_states_are_fully_product() {
        let mut rng = rng_from_seed(6);
        let layout = PartyLayout::new(vec![2, 2, 3]).unwrap();
        let state = random_product_state(&mut rng, &layout);
        assert!(crate::qcore::is_fully_product(&state));
    }
}
