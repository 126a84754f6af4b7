#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace piston::sde {

// Reproducible per-trajectory random stream.
//
// Generator choice (pinned for reproducibility): std::mt19937_64 whose
// state is seeded from (seed, stream_id) through splitmix64, uniforms from
// the top 53 bits, Gaussians via Box-Muller. mt19937_64 output is fully
// specified by the standard; no std::*_distribution is used, so the draw
// sequence is identical across compilers and standard libraries.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
        // splitmix64 sequence fills the engine state
        std::seed_seq::result_type dummy{};
        (void)dummy;
        std::array<std::uint64_t, 312> state;
        for (auto& w : state) w = splitmix64(x);
        std::seed_seq seq(state.begin(), state.end());
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal draw. Box-Muller; the second variate of each pair is
    // cached, so the stream is a deterministic function of the call count.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr double pi = 3.141592653589793238462643383279502884;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Wiener increment: N(0, dt).
inline double wiener(RandomStream& rng, double dt) {
    if (dt < 0.0) throw std::domain_error("sde: dt must be >= 0");
    if (dt == 0.0) return 0.0;
    return std::sqrt(dt) * rng.gaussian();
}

// Complex thermal noise increment with E[|dZ|^2] = occupation * dt and
// E[dZ^2] = 0 (classical Gaussian realization of a thermal input).
inline std::complex<double> complex_thermal_increment(RandomStream& rng,
                                                      double dt,
                                                      double occupation) {
    if (dt < 0.0) throw std::domain_error("sde: dt must be >= 0");
    if (occupation < 0.0) {
        throw std::domain_error("sde: occupation must be >= 0");
    }
    if (dt == 0.0 || occupation == 0.0) return {0.0, 0.0};
    const double s = std::sqrt(0.5 * occupation * dt);
    return {s * rng.gaussian(), s * rng.gaussian()};
}

struct IntegrationError : std::runtime_error {
    IntegrationError(std::size_t step, double time)
        : std::runtime_error("sde: non-finite state at step " +
                             std::to_string(step) + ", t = " +
                             std::to_string(time)),
          step_index(step), time(time) {}
    std::size_t step_index;
    double time;
};

// One Euler-Maruyama step (Ito convention) of a real-valued system with a
// diagonal diffusion driven by independent Wiener processes.
//
// State is any fixed-size array-like of double; Drift and Diffusion map
// state -> per-component coefficients.
template <typename State, typename Drift, typename Diffusion>
State em_step(const State& state, Drift&& drift, Diffusion&& diffusion,
              double dt, RandomStream& rng) {
    if (!(dt > 0.0)) throw std::domain_error("sde: dt must be > 0");
    const auto a = drift(state);
    const auto b = diffusion(state);
    State next = state;
    for (std::size_t i = 0; i < std::size(next); ++i) {
        next[i] = state[i] + a[i] * dt + b[i] * std::sqrt(dt) * rng.gaussian();
        if (!std::isfinite(next[i])) throw IntegrationError(0, 0.0);
    }
    return next;
}

} // namespace piston::sde
