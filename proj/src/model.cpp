#include "eprb/model.hpp"

#include "eprb/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace eprb {

void ModelConfig::validate() const
{
    if (!(time_scale > 0.0) || !std::isfinite(time_scale))
        throw ConfigError("time_scale must be positive, got " + std::to_string(time_scale));
    if (delay_exponent < 2 || delay_exponent % 2 != 0)
        throw ConfigError("delay_exponent must be an even integer >= 2, got " + std::to_string(delay_exponent));
    if (!(r_min >= 0.0 && r_min < 1.0))
        throw ConfigError("r_min must lie in [0, 1), got " + std::to_string(r_min));
}

PairState sample_pair(Substream& stream, double r_min)
{
    if (!(r_min >= 0.0 && r_min < 1.0))
        throw ConfigError("r_min must lie in [0, 1), got " + std::to_string(r_min));
    PairState p;
    p.phi = stream.uniform(0.0, two_pi);
    p.r1 = stream.uniform(r_min, 1.0);
    p.r2 = stream.uniform(r_min, 1.0);
    return p;
}

double abs_pow(double s, int d) noexcept
{
    const double a = std::fabs(s);
    double out = 1.0;
    for (int i = 0; i < d; ++i)
        out *= a;
    return out;
}

DetectionEvent measure(double phi_component, const StationConfig& station, double r) noexcept
{
    const double arg = 2.0 * (station.angle - phi_component);
    const double c = std::cos(arg);
    const double s = std::sin(arg);
    return {c >= 0.0 ? 1 : -1, r * station.time_scale * abs_pow(s, station.delay_exponent)};
}

double quantum_correlation(double a, double b) noexcept
{
    return -std::cos(2.0 * (a - b));
}

namespace {

double wrap_two_pi(double x)
{
    double y = std::fmod(x, two_pi);
    if (y < 0.0)
        y += two_pi;
    return y;
}

} // namespace

double sawtooth_correlation(double a, double b)
{
    // cos 2(a - phi) vanishes at phi = a - pi/4 + k pi/2; Bob's component
    // phi + pi/2 shares the same lattice shifted by b.
    std::array<double, 10> cuts{};
    std::size_t n = 0;
    cuts[n++] = 0.0;
    cuts[n++] = two_pi;
    for (int k = 0; k < 4; ++k) {
        cuts[n++] = wrap_two_pi(a - pi / 4.0 + k * pi / 2.0);
        cuts[n++] = wrap_two_pi(b - pi / 4.0 + k * pi / 2.0);
    }
    std::sort(cuts.begin(), cuts.end());

    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0)
            continue;
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const int x1 = std::cos(2.0 * (a - mid)) >= 0.0 ? 1 : -1;
        const int x2 = std::cos(2.0 * (b - mid - pi / 2.0)) >= 0.0 ? 1 : -1;
        integral += len * x1 * x2;
    }
    return std::clamp(integral / two_pi, -1.0, 1.0);
}

} // namespace eprb
