#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "strato/modes.hpp"
#include "strato/smallmat.hpp"

namespace strato {

// One resonant triple (p, q) -> n with its quadratic coupling weights.
// beta multiplies advective products of two velocity coefficients, gamma the
// cross products involving one stretched coefficient; both vanish off the
// selection set n = p + q or n = |p - q|.
struct InteractionTriple {
    std::size_t p = 0, q = 0, n = 0;
    double beta = 0.0;
    double gamma = 0.0;
};

// All triples reachable at truncation m, deterministic (p, q, branch) order.
// dropped counts source pairs whose sum target p + q exceeds m; the caller
// reports it so truncation loss is visible, not silent.
struct InteractionTable {
    std::size_t count = 0;
    std::vector<InteractionTriple> triples;
    std::size_t dropped = 0;
};

// M x M row-major Gram matrix of the f-modes under the density weight
// (unit weight in the Boussinesq reduction). Symmetric bit-for-bit; equals
// diag(1/N^2) when the buoyancy frequency is constant. Units 1/frequency^2
// in dimensional runs.
std::vector<double> alpha_matrix(const ModeSet& modes);

// Closed-form coupling weights for the constant-stratification eigenbasis:
// beta = 1/sqrt(2) on the selection set, gamma = +1/sqrt(2) when p + q = n
// and -1/sqrt(2) when |p - q| = n. Indices are 1-based.
InteractionTriple beta_gamma(std::size_t p, std::size_t q, std::size_t n);

// Same integrals by trapezoid quadrature on an explicit constant-N Boussinesq
// mode set: beta = integral g_p g_q g_n, gamma = -N^2 integral f_p f_q g_n.
InteractionTriple beta_gamma_quadrature(std::size_t p, std::size_t q, std::size_t n,
                                        const ModeSet& modes);

InteractionTable build_interactions(std::size_t m);

// A(k)_{nm} = delta_{nm} + k^2 c_n c_m alpha_{nm}; the left-hand operator of
// the dispersive modal system at horizontal wavenumber k. Verified symmetric
// positive definite by an attempted factorization (MassMatrixDegenerate
// otherwise).
SymMatrix coupled_mass_matrix(const std::vector<double>& alpha,
                              const std::vector<double>& speeds, double k);

void write_alpha_csv(const std::vector<double>& alpha, std::size_t m,
                     const std::string& path);

}  // namespace strato
