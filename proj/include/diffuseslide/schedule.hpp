#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dslide {

/// Strictly decreasing VE noise levels sigma_0 > ... > sigma_{N-1} > sigma_N = 0.
///
/// Levels are power-spaced with exponent `rho`; the terminal zero lets the
/// last solver step land on the clean latent. Immutable once built.
class SigmaSchedule {
public:
    static SigmaSchedule build(std::size_t n_steps, double sigma_min, double sigma_max, double rho);

    std::size_t n_steps() const noexcept { return sigmas_.size() - 1; }
    double sigma_min() const noexcept { return sigma_min_; }
    double sigma_max() const noexcept { return sigma_max_; }
    double rho() const noexcept { return rho_; }
    std::span<const double> sigmas() const noexcept { return sigmas_; }
    double operator[](std::size_t i) const { return sigmas_.at(i); }

    // Level with `remaining` denoise steps left: sigmas[N - remaining].
    double level_at(std::size_t remaining) const;

private:
    SigmaSchedule(std::vector<double> sigmas, double sigma_min, double sigma_max, double rho);

    std::vector<double> sigmas_;
    double sigma_min_;
    double sigma_max_;
    double rho_;
};

/// Injection depth and re-injection controls. `tau` counts remaining steps.
struct InjectionPoint {
    std::size_t tau = 8;
    std::size_t delta = 3;
    std::size_t m_iters = 5;

    void validate(std::size_t n_steps) const;
};

// sqrt(sigma_from^2 - sigma_to^2); throws invalid-state unless sigma_from > sigma_to.
double reinjection_std(double sigma_from, double sigma_to);

// Std of the noise that returns a latent from level_at(tau - 1) back to level_at(tau).
double reinjection_std(const SigmaSchedule& schedule, std::size_t tau);

}  // namespace dslide
