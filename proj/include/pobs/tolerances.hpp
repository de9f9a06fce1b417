#pragma once

namespace pobs::tol {

// Hermiticity, relative to the largest entry magnitude.
inline constexpr double herm = 1e-10;
// Reconstruction, closure, exclusivity and unitarity residuals (spectral norm).
inline constexpr double recon = 1e-9;
// Eigenvalues within grouping * max(1, spectral radius) form one spectral term.
inline constexpr double grouping = 1e-9;
// Singular values above this threshold count towards numerical rank.
inline constexpr double rank = 1e-8;
// State-vector norm and density trace.
inline constexpr double state_norm = 1e-10;
inline constexpr double density_positivity = 1e-10;
// Inputs to a stepper may be off by this much before they are rejected.
inline constexpr double step_input_norm = 1e-8;

}  // namespace pobs::tol
