#pragma once

#include "gnormal/model.hpp"

namespace gnormal {

/**
 * Piecewise-cosine eigenfunctions of the G-heat semigroup.
 *
 * phi_beta is 2*pi periodic. On its fundamental interval
 * [-pi/(1+b), (2b+1)pi/(1+b)) it is
 *
 *   2/(1+b)  cos((1+b)x/2)                         for x <  pi/(1+b)
 *   2b/(1+b) cos((1+b)x/(2b) + (b-1)pi/(2b))       for x >= pi/(1+b)
 *
 * so phi_1 = cos. Under a generator with sigma_hi/sigma_lo = b the function
 * satisfies G(phi'') = -(sigma^2/2) phi with sigma = (sigma_lo+sigma_hi)/2,
 * which makes e^{-sigma^2 t/2} phi_b(x) an exact solution of the G-heat
 * equation. All functions below throw ErrorKind::domain for beta < 1.
 */

double phi_eval(double beta, double x);
double phi_d1(double beta, double x);
double phi_d2(double beta, double x);

/// Upper and lower values of phi_beta, attained at x = 0 and x = pi.
double phi_max(double beta);
double phi_min(double beta);

/// Member lambda * phi_beta(c x + theta) of the scaled characteristic family.
struct PhiParams {
    double beta = 1.0;
    double lambda = 1.0;
    double c = 1.0;
    double theta = 0.0;

    /// Throws ErrorKind::domain unless beta >= 1, lambda > 0, c and theta finite.
    void validate() const;
};

double phi_family_eval(const PhiParams& p, double x);

/// Decay rate rho in G(phi'') = -(rho^2/2) phi.
struct EigenRate {
    double rho;
};

/// For phi_{beta_g} under g the rate is sigma_of(g).
EigenRate eigen_rate(const GFunction& g) noexcept;

/// e(alpha, beta) = 2(beta-alpha)/((1+alpha)(1+beta)) = phi_alpha(0) - phi_beta(0),
/// the uniform lower bound of phi_alpha - phi_beta. Requires 1 <= alpha <= beta.
double separation_gap(double alpha, double beta);

/// Max over n_samples points of one period of |G(phi'') + (sigma^2/2) phi|.
/// beta must match beta_of(g) to 1e-12 relative.
double eigen_residual(const GFunction& g, double beta, int n_samples);

}  // namespace gnormal
