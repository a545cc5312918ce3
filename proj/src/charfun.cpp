#include "gnormal/charfun.hpp"

#include "gnormal/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gnormal {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_beta(double beta) {
    if (!(beta >= 1.0) || !std::isfinite(beta))
        fail(ErrorKind::domain, "phi_beta requires finite beta >= 1");
}

// Position in the fundamental interval plus the branch it falls on.
struct Reduced {
    double x;
    bool first_branch;
};

Reduced reduce(double beta, double x) {
    const double left = -kPi / (1.0 + beta);
    const double junction = kPi / (1.0 + beta);
    double r = x - kTwoPi * std::floor((x - left) / kTwoPi);
    if (r >= left + kTwoPi)
        r -= kTwoPi;
    if (r < left)
        r += kTwoPi;
    return {r, r < junction};
}

// Phase of the cosine on the second branch.
double second_phase(double beta, double x) {
    return (1.0 + beta) * x / (2.0 * beta) + (beta - 1.0) * kPi / (2.0 * beta);
}

}  // namespace

double phi_eval(double beta, double x) {
    require_beta(beta);
    const auto [r, first] = reduce(beta, x);
    if (first)
        return 2.0 / (1.0 + beta) * std::cos(0.5 * (1.0 + beta) * r);
    return 2.0 * beta / (1.0 + beta) * std::cos(second_phase(beta, r));
}

double phi_d1(double beta, double x) {
    require_beta(beta);
    const auto [r, first] = reduce(beta, x);
    if (first)
        return -std::sin(0.5 * (1.0 + beta) * r);
    return -std::sin(second_phase(beta, r));
}

double phi_d2(double beta, double x) {
    require_beta(beta);
    const auto [r, first] = reduce(beta, x);
    if (first)
        return -0.5 * (1.0 + beta) * std::cos(0.5 * (1.0 + beta) * r);
    return -(1.0 + beta) / (2.0 * beta) * std::cos(second_phase(beta, r));
}

double phi_max(double beta) {
    require_beta(beta);
    return 2.0 / (1.0 + beta);
}

double phi_min(double beta) {
    require_beta(beta);
    return -2.0 * beta / (1.0 + beta);
}

void PhiParams::validate() const {
    require_beta(beta);
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        fail(ErrorKind::domain, "phi family amplitude lambda must be finite and > 0");
    if (!std::isfinite(c) || !std::isfinite(theta))
        fail(ErrorKind::domain, "phi family scale c and phase theta must be finite");
}

double phi_family_eval(const PhiParams& p, double x) {
    p.validate();
    return p.lambda * phi_eval(p.beta, p.c * x + p.theta);
}

EigenRate eigen_rate(const GFunction& g) noexcept { return {sigma_of(g)}; }

double separation_gap(double alpha, double beta) {
    if (!(alpha >= 1.0) || !(alpha <= beta) || !std::isfinite(beta))
        fail(ErrorKind::domain, "separation_gap requires 1 <= alpha <= beta");
    return 2.0 * (beta - alpha) / ((1.0 + alpha) * (1.0 + beta));
}

double eigen_residual(const GFunction& g, double beta, int n_samples) {
    if (n_samples < 2)
        fail(ErrorKind::domain, "eigen_residual needs at least 2 samples");
    const double beta_g = beta_of(g);
    if (std::abs(beta - beta_g) > 1e-12 * beta_g)
        fail(ErrorKind::domain, "phi_beta is an eigenfunction only for beta = sigma_hi/sigma_lo");
    const double rate = 0.5 * sigma_of(g) * sigma_of(g);
    const double start = -kPi / (1.0 + beta);
    double worst = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        const double x = start + kTwoPi * k / (n_samples - 1);
        worst = std::max(worst, std::abs(g(phi_d2(beta, x)) + rate * phi_eval(beta, x)));
    }
    return worst;
}

}  // namespace gnormal
