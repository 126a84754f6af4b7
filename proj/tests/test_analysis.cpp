#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "piston/analysis.hpp"
#include "piston/model.hpp"
#include "piston/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace piston;

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

model::EngineParams engine(double kappa_H, double alpha, double g,
                           double Delta0, double E_c, double E_J, double n_H,
                           double n_C) {
    model::EngineParams p{};
    p.kappa_H = kappa_H;
    p.alpha = alpha;
    p.g = g;
    p.Delta0 = Delta0;
    p.E_c = E_c;
    p.E_J = E_J;
    p.n_H = n_H;
    p.n_C = n_C;
    return model::make_params(p, model::CouplingSpec::FromAlpha);
}

model::EngineParams default_engine() {
    return engine(10.0, 1.0, 4.0, -4.0, 1.0e-5, 400.0, 100.0, 1.0);
}

} // namespace

TEST_CASE("quasi-static constants against finite differences") {
    const auto p = default_engine();
    const auto qs = analysis::quasi_static_constants(p, 2.0);

    const double h = 1e-6 * p.kappa_H;
    const double fd_slope =
        (model::steady_state_at_detuning(p.Delta0 + h, p).n_a_ss -
         model::steady_state_at_detuning(p.Delta0 - h, p).n_a_ss) /
        (2.0 * h);
    CHECK(qs.C2 == doctest::Approx(p.hbar_g * p.g * fd_slope).epsilon(1e-6));
    CHECK(qs.C1 ==
          doctest::Approx(p.hbar_g *
                              model::steady_state_at_detuning(p.Delta0, p).n_a_ss -
                          p.E_J)
              .epsilon(1e-12));
    CHECK(qs.C3 == doctest::Approx(qs.tau * p.E_c * qs.C2).epsilon(1e-14));
    CHECK(qs.W_cyc_per_Q == doctest::Approx(pi * qs.C3).epsilon(1e-14));
    CHECK(qs.C2 > 0.0); // blue-detuned operating point gives gain
    CHECK_THROWS_AS(analysis::quasi_static_constants(p, -1.0),
                    std::domain_error);
}

TEST_CASE("local gain chi against a delayed-bath finite difference") {
    // chi(phi) = -E_c hbar_g sin(phi) n_bar'(phi) / kappa(phi), with the
    // derivative taken numerically.
    const auto p = default_engine();
    for (double phi : {0.3, 1.0, 0.5 * pi, 2.2, 4.0, 5.9}) {
        const auto bath = model::bath_at_angle(phi, p);
        const double h = 1e-6;
        const double nbar_prime = (model::bath_at_angle(phi + h, p).n_bar -
                                   model::bath_at_angle(phi - h, p).n_bar) /
                                  (2.0 * h);
        const double oracle =
            -p.E_c * p.hbar_g * std::sin(phi) * nbar_prime / bath.kappa;
        CHECK(analysis::chi(phi, p) == doctest::Approx(oracle).epsilon(1e-7));
    }
}

TEST_CASE("chi sign structure") {
    auto p = default_engine();
    CHECK(analysis::chi_mean(p) > 0.0); // blue detuning: gain

    auto red = p;
    red.Delta0 = -p.Delta0;
    CHECK(analysis::chi_mean(red) ==
          doctest::Approx(-analysis::chi_mean(p)).epsilon(1e-12));

    auto unbiased = p;
    unbiased.n_C = unbiased.n_H;
    CHECK(analysis::chi_mean(unbiased) == 0.0);
    for (double phi : {0.5, 1.5, 3.0}) {
        CHECK(analysis::chi(phi, unbiased) == 0.0);
    }
}

TEST_CASE("angle-averaged gain and diffusion: pinned regression values") {
    // Frozen after an independent two-resolution quadrature cross-check.
    const auto p = default_engine();
    CHECK(analysis::chi_mean(p) ==
          doctest::Approx(0.00018907657778746307).epsilon(1e-12));
    CHECK(analysis::variance_diffusion_term(p) ==
          doctest::Approx(1.443612358037408e-06).epsilon(1e-12));
}

TEST_CASE("angle averages against an independent Simpson quadrature") {
    const auto p = default_engine();

    auto simpson_mean = [&](auto&& f) {
        const int n = 1 << 12; // even
        const double h = 2.0 * pi / n;
        double sum = f(0.0) + f(2.0 * pi);
        for (int i = 1; i < n; ++i) {
            sum += (i % 2 ? 4.0 : 2.0) * f(i * h);
        }
        return sum * h / 3.0 / (2.0 * pi);
    };

    const double chi_simpson =
        simpson_mean([&](double phi) { return analysis::chi(phi, p); });
    CHECK(analysis::chi_mean(p) == doctest::Approx(chi_simpson).epsilon(1e-10));

    const double diff_simpson =
        p.E_c * p.E_c * p.hbar_g * p.hbar_g / pi * 2.0 * pi *
        simpson_mean([&](double phi) {
            const auto b = model::bath_at_angle(phi, p);
            return b.n_bar * b.n_bar * std::sin(phi) * std::sin(phi) / b.kappa;
        });
    CHECK(analysis::variance_diffusion_term(p) ==
          doctest::Approx(diff_simpson).epsilon(1e-10));
}

TEST_CASE("variance growth law assembly") {
    const auto p = default_engine();
    const double v = 0.01;
    CHECK(analysis::variance_rate(p, v) ==
          doctest::Approx(2.0 * analysis::chi_mean(p) * v +
                          analysis::variance_diffusion_term(p))
              .epsilon(1e-14));
    CHECK_THROWS_AS(analysis::variance_rate(p, -1.0), std::domain_error);
}

TEST_CASE("optimal detuning against a golden-section maximization") {
    for (double alpha : {0.5, 1.0, 2.0}) {
        auto p = engine(10.0, alpha, 1.0, 0.0, 1.0e-5, 400.0, 100.0, 1.0);
        // Slope of the effective bath occupation (the quantity the delay
        // gain is proportional to), as a function of the bare detuning.
        auto gain = [&](double d) {
            const double u = 4.0 * d * d / (p.kappa_H * p.kappa_H);
            return -d / ((1.0 + alpha + u) * (1.0 + alpha + u));
        };
        double a = -3.0 * p.kappa_H, b = 0.0;
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - r * (b - a), x2 = a + r * (b - a);
        double f1 = gain(x1), f2 = gain(x2);
        while (b - a > 1e-12 * p.kappa_H) {
            if (f1 > f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - r * (b - a);
                f1 = gain(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + r * (b - a);
                f2 = gain(x2);
            }
        }
        const double numeric = 0.5 * (a + b);
        CHECK(std::abs(analysis::optimal_detuning(p) - numeric) <
              1e-8 * p.kappa_H);
    }
}

TEST_CASE("pv loop: area scaling and orientation") {
    auto p = engine(10.0, 1.0, 1.0, -10.0, 1.0, 1.0, 10.0, 1.0);

    const auto qs = analysis::quasi_static_constants(p, 0.0);
    const auto loop1 = analysis::pv_curve(p, 0.02, 2000);
    const auto loop2 = analysis::pv_curve(p, 0.04, 2000);
    const auto still = analysis::pv_curve(p, 0.0, 2000);

    // First order in the delay: area = pi * (tau omega) * C2.
    CHECK(loop1.loop_area == doctest::Approx(pi * 0.02 * qs.C2).epsilon(0.01));
    CHECK(loop2.loop_area / loop1.loop_area == doctest::Approx(2.0).epsilon(0.01));
    CHECK(std::abs(still.loop_area) < 1e-10);

    // The delay shifts the occupation peak past the resonance angle.
    const auto shifted = analysis::pv_curve(p, 0.1, 2000);
    CHECK(shifted.phi_p_max > 0.0);
    CHECK(shifted.phi_p_max < 0.2);

    CHECK_THROWS_AS(analysis::pv_curve(p, 0.02, 4), std::domain_error);
}

TEST_CASE("ensemble statistics on a hand-checked ensemble") {
    const auto p = default_engine();
    sim::EnsembleRecord e;
    auto make = [&](std::vector<double> L, std::vector<double> phi) {
        sim::TrajectoryRecord tr;
        tr.times = {0.0, 1.0, 2.0};
        tr.L = std::move(L);
        tr.phi = std::move(phi);
        tr.n_a = {0.0, 0.0, 0.0};
        tr.meta.params = p;
        e.trajectories.push_back(std::move(tr));
    };
    make({0.0, 1.0, 2.0}, {0.0, 0.5, 1.0});
    make({0.0, 3.0, 4.0}, {0.0, 0.6, 1.2});

    const auto st = analysis::ensemble_stats(e, p, 2.0);
    CHECK(st.mean_L == std::vector<double>{0.0, 2.0, 3.0});
    CHECK(st.var_L[1] == doctest::Approx(2.0).epsilon(1e-15)); // (1,3) sample var
    CHECK(st.mean_L2[1] == doctest::Approx(4.0 + 2.0).epsilon(1e-15));
    CHECK(st.mean_phi[1] == doctest::Approx(0.55).epsilon(1e-15));
    CHECK(st.rate_mean[1] == doctest::Approx((3.0 - 0.0) / 2.0).epsilon(1e-15));
    CHECK(st.snr[1] == doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::isnan(st.snr[0])); // zero variance: undefined

    // Statistics are invariant under trajectory reordering.
    auto swapped = e;
    std::swap(swapped.trajectories[0], swapped.trajectories[1]);
    const auto st2 = analysis::ensemble_stats(swapped, p, 2.0);
    CHECK(st2.mean_L == st.mean_L);
    CHECK(st2.var_L == st.var_L);

    CHECK_THROWS_AS(analysis::ensemble_stats(sim::EnsembleRecord{}, p, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(analysis::ensemble_stats(e, p, 100.0),
                    std::invalid_argument);
}

TEST_CASE("moving average") {
    const std::vector<double> t{0.0, 1.0, 2.0, 3.0, 4.0};
    const std::vector<double> flat{5.0, 5.0, 5.0, 5.0, 5.0};
    const auto fm = analysis::moving_average(t, flat, 2.0);
    for (double v : fm) CHECK(v == doctest::Approx(5.0).epsilon(1e-15));

    const std::vector<double> ramp{0.0, 1.0, 2.0, 3.0, 4.0};
    const auto rm = analysis::moving_average(t, ramp, 2.0);
    CHECK(rm[2] == doctest::Approx(2.0).epsilon(1e-15)); // centered window
    CHECK(rm[0] == doctest::Approx(0.5).epsilon(1e-15)); // truncated at edge
}

TEST_CASE("validity window and aggregates on synthetic law-obeying data") {
    // Build curves that satisfy the first-order laws exactly:
    //   mean_L(t) grows at rate chi_bar * mean_L, var at the full Eq. rate.
    const auto p = default_engine();
    const double chi = analysis::chi_mean(p);
    const double D = analysis::variance_diffusion_term(p);

    // Synthesize an ensemble of two "trajectories" whose mean and variance
    // follow the laws: L_{1,2} = m(t) -+ s(t).
    sim::EnsembleRecord e;
    sim::TrajectoryRecord t1, t2;
    const double dt = 1.0;
    const std::size_t n = 6001;
    double m = 1e-3, v = 1e-8, phi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = i * dt;
        const double s = std::sqrt(v);
        t1.times.push_back(t);
        t2.times.push_back(t);
        t1.L.push_back(m - s);
        t2.L.push_back(m + s);
        t1.phi.push_back(phi);
        t2.phi.push_back(phi);
        t1.n_a.push_back(0.0);
        t2.n_a.push_back(0.0);
        m += chi * m * dt;
        v += (2.0 * chi * v + D) * dt;
        phi += 0.01; // strictly rotating from the start
    }
    t1.meta.params = p;
    t2.meta.params = p;
    e.trajectories = {t1, t2};

    auto st = analysis::ensemble_stats(e, p, 200.0);
    // Sample variance of two points at m -+ s is 2 s^2; halve it back so the
    // synthetic ensemble variance equals v.
    for (auto& x : st.var_L) x *= 0.5;
    for (std::size_t i = 0; i < st.times.size(); ++i) {
        st.mean_L2[i] = st.mean_L[i] * st.mean_L[i] + st.var_L[i];
        st.snr[i] = st.mean_L[i] / std::sqrt(st.var_L[i]);
    }

    const auto win = analysis::validity_window(st, 0.1);
    REQUIRE_FALSE(win.empty);
    // Start: first full turn of the mean angle (0.01 rad per unit time).
    CHECK(win.t_begin == doctest::Approx(2.0 * pi / 0.01).epsilon(0.01));
    CHECK(win.t_end == st.times.back());

    const auto sum = analysis::window_summary(st, 0.1);
    CHECK(sum.norm_gain == doctest::Approx(1.0).epsilon(0.01));
    CHECK(sum.norm_var == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::isnan(sum.crossing_time)); // <L^2> stays below threshold
    CHECK(sum.snr_mean > 0.0);
    CHECK(sum.snr_variation < 0.3); // SNR is slowly varying by construction

    // A variance above threshold ends the window and defines the crossing.
    auto hot = st;
    for (std::size_t i = 4000; i < hot.times.size(); ++i) hot.mean_L2[i] = 0.2;
    const auto win2 = analysis::validity_window(hot, 0.1);
    REQUIRE_FALSE(win2.empty);
    CHECK(win2.t_end == hot.times[3999]);
    CHECK(analysis::threshold_crossing_time(hot, 0.1) == hot.times[4000]);
    CHECK(analysis::window_summary(hot, 0.1).crossing_time == hot.times[4000]);
}

TEST_CASE("window is empty while the rotor librates") {
    const auto p = default_engine();
    sim::EnsembleRecord e;
    for (int k = 0; k < 2; ++k) {
        sim::TrajectoryRecord tr;
        for (int i = 0; i <= 1000; ++i) {
            const double t = i * 1.0;
            tr.times.push_back(t);
            tr.phi.push_back(std::sin(0.05 * t)); // oscillating, no net turn
            tr.L.push_back(0.05 * std::cos(0.05 * t));
            tr.n_a.push_back(0.0);
        }
        tr.meta.params = p;
        e.trajectories.push_back(std::move(tr));
    }
    const auto st = analysis::ensemble_stats(e, p, 100.0);
    CHECK(analysis::validity_window(st, 0.1).empty);
    CHECK(std::isnan(analysis::window_summary(st, 0.1).norm_gain));
}
