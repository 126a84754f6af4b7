#include "piston/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace piston::sim {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

bool finite(const std::complex<double>& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace

std::string to_string(ModelKind m) {
    return m == ModelKind::Full ? "full" : "reduced";
}

ModelKind model_from_string(const std::string& s) {
    if (s == "full") return ModelKind::Full;
    if (s == "reduced") return ModelKind::Reduced;
    throw std::invalid_argument("sim: unknown model '" + s + "'");
}

FullState step_full(const FullState& s, const model::EngineParams& p,
                    double dt, sde::RandomStream& rng) {
    const double sin_phi = std::sin(s.phi);
    const double delta = p.Delta0 + p.g * std::cos(s.phi);
    const std::complex<double> i_unit{0.0, 1.0};

    // Exponential Euler-Maruyama: the stiff diagonal (detuning rotation and
    // decay) is integrated exactly, coupling and noise to first order. A
    // plain explicit step amplifies the chamber mode whenever
    // (Delta dt)^2 > kappa_C dt, which is hit already at moderate stiffness.
    const std::complex<double> ea =
        std::exp(-(i_unit * delta + 0.5 * p.kappa_C) * dt);
    const double eb = std::exp(-0.5 * p.kappa_H * dt);

    FullState next;
    next.a = ea * s.a - i_unit * p.J * s.b * dt +
             std::sqrt(p.kappa_C) * sde::complex_thermal_increment(rng, dt, p.n_C);
    next.b = eb * s.b - i_unit * p.J * s.a * dt +
             std::sqrt(p.kappa_H) * sde::complex_thermal_increment(rng, dt, p.n_H);
    // |a|^2 is frame-invariant; the rotor force uses the pre-step value.
    next.L = s.L - p.E_c * (p.E_J - p.hbar_g * std::norm(s.a)) * sin_phi * dt;
    next.phi = s.phi + next.L * dt;
    return next;
}

ReducedState step_reduced(const ReducedState& s, const model::EngineParams& p,
                          double dt, sde::RandomStream& rng,
                          std::size_t* clamp_count) {
    const double sin_phi = std::sin(s.phi);
    const auto bath = model::bath_from_cos(std::cos(s.phi), p);

    const double n_eff = std::max(s.n_a, 0.0);
    const double drift = -bath.kappa * (s.n_a - bath.n_bar);
    const double diff = std::sqrt(2.0 * bath.kappa * bath.n_bar * n_eff);

    ReducedState next;
    next.n_a = s.n_a + drift * dt + diff * sde::wiener(rng, dt);
    if (next.n_a < 0.0) {
        next.n_a = 0.0;
        if (clamp_count) ++*clamp_count;
    }
    next.L = s.L - p.E_c * (p.E_J - p.hbar_g * s.n_a) * sin_phi * dt;
    next.phi = s.phi + next.L * dt;
    return next;
}

namespace {

template <typename State>
void check_state(const State& st, std::size_t step, double t);

template <>
void check_state(const FullState& st, std::size_t step, double t) {
    if (!finite(st.a) || !finite(st.b) || !std::isfinite(st.phi) ||
        !std::isfinite(st.L)) {
        throw sde::IntegrationError(step, t);
    }
}

template <>
void check_state(const ReducedState& st, std::size_t step, double t) {
    if (!std::isfinite(st.n_a) || !std::isfinite(st.phi) ||
        !std::isfinite(st.L)) {
        throw sde::IntegrationError(step, t);
    }
}

} // namespace

TrajectoryRecord run_trajectory(ModelKind model, const InitialConditions& init,
                                const model::EngineParams& p, double dt,
                                double t_end, std::size_t sample_stride,
                                std::uint64_t seed, std::uint64_t stream_id) {
    if (t_end < 0.0) throw std::domain_error("sim: t_end must be >= 0");
    if (t_end > 0.0 && !(dt > 0.0)) {
        throw std::domain_error("sim: dt must be > 0");
    }
    if (sample_stride == 0) sample_stride = 1;

    const std::size_t n_steps =
        t_end > 0.0 ? static_cast<std::size_t>(std::llround(t_end / dt)) : 0;

    TrajectoryRecord rec;
    rec.meta = {model, p,  seed, stream_id, dt, sample_stride, n_steps, 0};

    sde::RandomStream rng(seed, stream_id);

    const double n_a0 =
        init.n_a ? *init.n_a : model::bath_at_angle(init.phi, p).n_bar;

    auto sample_reduced = [&](double t, const ReducedState& s) {
        rec.times.push_back(t);
        rec.n_a.push_back(s.n_a);
        rec.phi.push_back(s.phi);
        rec.L.push_back(s.L);
    };
    auto sample_full = [&](double t, const FullState& s) {
        rec.times.push_back(t);
        rec.n_a.push_back(std::norm(s.a));
        rec.n_b.push_back(std::norm(s.b));
        rec.phi.push_back(s.phi);
        rec.L.push_back(s.L);
    };

    if (model == ModelKind::Reduced) {
        ReducedState s{n_a0, init.phi, init.L};
        sample_reduced(0.0, s);
        for (std::size_t k = 1; k <= n_steps; ++k) {
            const double phi_prev = s.phi;
            s = step_reduced(s, p, dt, rng, &rec.meta.clamp_count);
            const double t = static_cast<double>(k) * dt;
            check_state(s, k, t);
            if (std::abs(s.phi - phi_prev) >= pi) {
                throw sde::IntegrationError(k, t);
            }
            if (k % sample_stride == 0 || k == n_steps) sample_reduced(t, s);
        }
    } else {
        // Classical thermal initial amplitude consistent with n_a(0); the
        // phase of a is irrelevant to the rotor force.
        FullState s{std::complex<double>(std::sqrt(n_a0), 0.0),
                    std::complex<double>(std::sqrt(p.n_H), 0.0), init.phi,
                    init.L};
        sample_full(0.0, s);
        for (std::size_t k = 1; k <= n_steps; ++k) {
            const double phi_prev = s.phi;
            s = step_full(s, p, dt, rng);
            const double t = static_cast<double>(k) * dt;
            check_state(s, k, t);
            if (std::abs(s.phi - phi_prev) >= pi) {
                throw sde::IntegrationError(k, t);
            }
            if (k % sample_stride == 0 || k == n_steps) sample_full(t, s);
        }
    }
    return rec;
}

EnsembleRecord run_ensemble(std::size_t n_traj, ModelKind model,
                            const InitialConditions& init,
                            const model::EngineParams& p, double dt,
                            double t_end, std::size_t sample_stride,
                            std::uint64_t seed, unsigned n_threads) {
    if (n_traj == 0) throw std::domain_error("sim: n_traj must be >= 1");
    if (n_threads == 0) {
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    }
    n_threads = static_cast<unsigned>(
        std::min<std::size_t>(n_threads, n_traj));

    std::vector<TrajectoryRecord> results(n_traj);
    std::vector<std::string> errors(n_traj);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t id = next.fetch_add(1);
            if (id >= n_traj) return;
            try {
                results[id] = run_trajectory(model, init, p, dt, t_end,
                                             sample_stride, seed, id);
            } catch (const std::exception& e) {
                errors[id] = e.what();
            }
        }
    };

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    EnsembleRecord out;
    for (std::size_t id = 0; id < n_traj; ++id) {
        if (errors[id].empty()) {
            out.trajectories.push_back(std::move(results[id]));
        } else {
            out.failures.push_back({id, errors[id]});
        }
    }
    return out;
}

} // namespace piston::sim
