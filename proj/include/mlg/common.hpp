#pragma once
// Shared error types and configuration knobs.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlg {

using cplx = std::complex<double>;

struct MlgError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define MLG_ERROR(Name) \
    struct Name : MlgError { explicit Name(const std::string& m) : MlgError(#Name ": " + m) {} }

MLG_ERROR(NonFinite);
MLG_ERROR(DegenerateFit);
MLG_ERROR(CapExceeded);
MLG_ERROR(DomainError);
MLG_ERROR(OrderNotFound);
MLG_ERROR(BadAngles);
MLG_ERROR(NotElliptic);
MLG_ERROR(NoAdmissibleRadius);
MLG_ERROR(TooLarge);
MLG_ERROR(SeparabilityFallbackTooLarge);
MLG_ERROR(NoCertificate);
MLG_ERROR(StepTooLarge);
MLG_ERROR(Instability);
MLG_ERROR(ConormalPresent);
MLG_ERROR(ValidationError);

#undef MLG_ERROR

// Thresholds shared across modules; single source of truth.
struct Thresholds {
    double slow_slope = 0.1;
    double negligible_min_slope = 8.0;
    double moderate_max_slope = 64.0;
    double tau_dir = 0.15;       // wavefront N(l)-slope threshold
    double n_max = 40.0;         // wavefront N(0) cap
    double tail_fraction = 0.5;  // regression tail window
};

inline const Thresholds& default_thresholds() {
    static Thresholds t;
    return t;
}

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace mlg
