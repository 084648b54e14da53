//! Dirichlet characters, Gauss sums, the cusp decomposition χ = χ₁·conj(χ₂),
//! and level arithmetic for Γ₀(N).

mod characters;
mod level;

pub use characters::{
    character, decompose, enumerate_characters, gauss_sum, quadratic_character, CharacterRef, CharacterSelector,
    Decomposition, DirichletCharacter,
};
pub use level::{
    admissible_level, divisor_count, divisors, euler_phi, factorize, gcd, is_prime, level_data, prime_divisors,
    LevelData,
};
