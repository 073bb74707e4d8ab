#include "diffuseslide/schedule.hpp"

#include <cmath>
#include <string>

#include "diffuseslide/errors.hpp"

namespace dslide {

SigmaSchedule::SigmaSchedule(std::vector<double> sigmas, double sigma_min, double sigma_max, double rho)
    : sigmas_(std::move(sigmas)), sigma_min_(sigma_min), sigma_max_(sigma_max), rho_(rho) {}

SigmaSchedule SigmaSchedule::build(std::size_t n_steps, double sigma_min, double sigma_max, double rho) {
    if (n_steps < 2) fail(ErrorKind::InvalidArgument, "schedule needs at least 2 steps");
    if (!(std::isfinite(sigma_min) && std::isfinite(sigma_max) && sigma_min > 0.0 && sigma_min < sigma_max)) {
        fail(ErrorKind::InvalidArgument, "schedule requires 0 < sigma_min < sigma_max");
    }
    if (!(std::isfinite(rho) && rho > 0.0)) fail(ErrorKind::InvalidArgument, "schedule requires rho > 0");

    const double max_root = std::pow(sigma_max, 1.0 / rho);
    const double min_root = std::pow(sigma_min, 1.0 / rho);
    const double last = static_cast<double>(n_steps - 1);

    std::vector<double> sigmas(n_steps + 1);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double frac = static_cast<double>(i) / last;
        sigmas[i] = std::pow(max_root + frac * (min_root - max_root), rho);
    }
    sigmas[0] = sigma_max;
    sigmas[n_steps - 1] = sigma_min;
    sigmas[n_steps] = 0.0;

    for (std::size_t i = 0; i < n_steps; ++i) {
        if (!(std::isfinite(sigmas[i]) && sigmas[i] > sigmas[i + 1])) {
            fail(ErrorKind::InvalidState, "schedule not strictly decreasing at index " + std::to_string(i));
        }
    }
    return SigmaSchedule(std::move(sigmas), sigma_min, sigma_max, rho);
}

double SigmaSchedule::level_at(std::size_t remaining) const {
    if (remaining > n_steps()) {
        fail(ErrorKind::InvalidArgument,
             "remaining steps " + std::to_string(remaining) + " exceeds schedule length " + std::to_string(n_steps()));
    }
    return sigmas_[n_steps() - remaining];
}

void InjectionPoint::validate(std::size_t n_steps) const {
    if (tau == 0 || tau > n_steps) fail(ErrorKind::InvalidArgument, "tau must satisfy 0 < tau <= steps");
    if (delta > tau) fail(ErrorKind::InvalidArgument, "delta must not exceed tau");
}

double reinjection_std(double sigma_from, double sigma_to) {
    if (!(sigma_from > sigma_to)) {
        fail(ErrorKind::InvalidState, "re-injection requires sigma_from > sigma_to");
    }
    return std::sqrt(sigma_from * sigma_from - sigma_to * sigma_to);
}

double reinjection_std(const SigmaSchedule& schedule, std::size_t tau) {
    if (tau == 0) fail(ErrorKind::InvalidArgument, "re-injection needs tau >= 1");
    return reinjection_std(schedule.level_at(tau), schedule.level_at(tau - 1));
}

}  // namespace dslide
