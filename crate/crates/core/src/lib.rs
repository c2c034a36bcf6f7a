//! Diamond-norm approximation by convex optimization over fidelity.
//!
//! A super-operator `T(X) = Tr_A(B X C†)` is given by its Stinespring pair
//! `(B, C)`. `‖T‖◇` equals the maximum of `√F(T₁(ρ), T₂(ξ))` over density
//! matrices, where `T₁(X) = Tr_V(B X B†)` and `T₂(X) = Tr_V(C X C†)`. The
//! negated root fidelity is convex in Pauli coordinates, and
//! [`diamond_norm`] minimizes it with an ellipsoid method driven by
//! eigenvalue-based membership and separation oracles.
//!
//! ```
//! use dnorm_core::{diamond_norm, SolverConfig, StinespringPair};
//!
//! let id = StinespringPair::identity(2).unwrap();
//! let r = diamond_norm(&id, &SolverConfig::new(1e-2)).unwrap();
//! assert!((r.value - 1.0).abs() <= 1e-2);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coords;
pub mod error;
pub mod matkernel;
pub mod objective;
pub mod sample;
pub mod solver;
pub mod superop;
pub mod verify;

pub use coords::{
    decode, encode, membership, product_membership, shrink, Cut, FeasibleSetSpec, OracleAnswer,
    PauliBasis, PauliCoordinates,
};
pub use error::{Error, Result};
pub use matkernel::{c64, CMatrix, CVector, HermMatrix};
pub use num_complex::Complex64;
pub use objective::{sqrt_fidelity, Objective};
pub use solver::{
    compute_constants, diamond_norm, minimize, Constants, ConstantsOutcome, DiamondResult,
    SolveReport, SolverConfig, SolverMode,
};
pub use superop::{
    choi_from_stinespring, natural_from_stinespring, stinespring_from_natural,
    stinespring_of_difference, tensor_superop, ChoiMatrix, DerivedMap, DerivedPair, NaturalRep,
    StinespringPair,
};
pub use verify::{bruteforce_diamond, fidelity_seesaw, unitary_diamond, BruteForceConfig};
