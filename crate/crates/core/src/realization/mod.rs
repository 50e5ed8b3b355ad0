//! Realizations of a pure motive at desk scale: Hodge numbers and the
//! archimedean gamma factor, Weil–Deligne representations at a prime with
//! their local factors, Tate twists, and the monodromy filtration.

pub mod hodge;
pub mod linalg;
pub mod monodromy;
pub mod wd;

pub use hodge::{gamma_c, gamma_r, GammaKind, GammaTerm, HodgeData};
pub use linalg::{QMatrix, Subspace};
pub use monodromy::{
    check_purity, check_weight, monodromy_filtration, monodromy_filtration_recursive, polynomial_roots,
    MonodromyFiltration, WEIGHT_TOLERANCE,
};
pub use wd::{
    matches_euler_factor, semisimple_part, wd_from_local_data, LocalFactor, WeilDeligneJson, WeilDeligneRep,
};
