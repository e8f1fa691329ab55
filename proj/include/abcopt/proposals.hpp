#pragma once

#include <optional>

#include "abcopt/density.hpp"
#include "abcopt/efficiency.hpp"

namespace abcopt {

struct ProposalParams {
    std::optional<double> A_bar;      // bounded-family level
    std::optional<double> A_star;     // solved or supplied optimal level
    std::optional<double> omega_star; // efficiency at A_star
    std::optional<double> bandwidth2; // KDE squared bandwidth
    std::optional<int> order;         // series truncation order
    double sup_ratio = 0.0;           // sup p/prior used in construction
    bool fallback_scan = false;       // golden section found multimodality
};

struct Proposal {
    DensitySpec density;
    Scheme scheme = Scheme::prior;
    ProposalParams params;
};

/// Domain on which ratio-family proposals are constructed: hard
/// supports of p and the prior intersected with the hull of their
/// 12-sigma soft ranges.
Interval construction_domain(const DensitySpec& p, const DensitySpec& prior);

/// q0 proportional to sqrt(p * prior). Closed form when both inputs
/// are Gaussian, numeric normalization otherwise.
Proposal geometric_mean_proposal(const DensitySpec& p,
                                 const DensitySpec& prior);

/// Bounded family q_A proportional to sqrt(p*prior / (2A - p/prior)).
/// A_bar defaults to 3/4 of sup(p/prior); values at or below half the
/// supremum are rejected.
Proposal bounded_proposal(const DensitySpec& p, const DensitySpec& prior,
                          std::optional<double> A_bar = std::nullopt);

/// Maximizes omega over the admissible A-bracket by golden section
/// after a coarse unimodality scan.
Proposal optimal_proposal(const DensitySpec& p, const DensitySpec& prior,
                          double tol = 1e-6);

/// Solves A = A[q_A] by direct iteration from the bounded default;
/// agrees with the golden-section maximizer.
Proposal optimal_proposal_fixed_point(const DensitySpec& p,
                                      const DensitySpec& prior,
                                      double a_tol = 1e-8,
                                      int max_iterations = 100);

/// Truncated binomial-series approximation of the bounded family at
/// level A_star; order 0 reproduces geometric_mean_proposal exactly.
Proposal series_proposal(const DensitySpec& p, const DensitySpec& prior,
                         int order, double A_star);

/// Beaumont-style proposal: p convolved with a Gaussian kernel of
/// variance 2 Var[p].
Proposal beaumont_kde_proposal(const DensitySpec& p);

/// Dispatch by scheme with default parameters. Scheme::series needs
/// explicit order and A_star and is rejected here.
Proposal make_proposal(Scheme scheme, const DensitySpec& p,
                       const DensitySpec& prior);

} // namespace abcopt
