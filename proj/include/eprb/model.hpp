#pragma once

#include "eprb/rng.hpp"

#include <numbers>

namespace eprb {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Parameters shared by both stations of the emitter/polarizer model.
struct ModelConfig {
    double time_scale = 1000.0; ///< T
    int delay_exponent = 2;     ///< d in t* = r T |s|^d; only d = 2 is the original model
    double r_min = 0.0;         ///< lower end of the r range; 1 - c for the narrowed variant

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// Hidden state of one emitted pair. The second photon carries phi + pi/2.
struct PairState {
    double phi = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
};

struct StationConfig {
    double angle = 0.0;
    double time_scale = 1000.0;
    int delay_exponent = 2;

    static StationConfig at(double angle, const ModelConfig& model) noexcept
    {
        return {angle, model.time_scale, model.delay_exponent};
    }
};

struct DetectionEvent {
    int outcome = 1;
    double delay = 0.0;

    friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

/// Draws phi ~ U[0, 2pi) then r1, r2 ~ U[r_min, 1], in that order.
PairState sample_pair(Substream& stream, double r_min);

/// x = sign(cos 2(a - phi)) with sign(0) = +1, t* = r T |sin 2(a - phi)|^d.
DetectionEvent measure(double phi_component, const StationConfig& station, double r) noexcept;

/// -cos 2(a - b).
double quantum_correlation(double a, double b) noexcept;

/// Correlation of the unfiltered model, integrated exactly over phi by
/// splitting [0, 2pi) at the sign changes of both outcome functions.
double sawtooth_correlation(double a, double b);

/// |s|^d for integer d >= 0.
double abs_pow(double s, int d) noexcept;

} // namespace eprb
