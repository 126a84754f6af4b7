#include "piston/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace piston::analysis {

namespace {

constexpr double pi = 3.141592653589793238462643383279502884;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Composite trapezoid over one period of a 2pi-periodic integrand.
template <typename F>
double periodic_quadrature(F&& f, int n) {
    double sum = 0.0;
    const double h = 2.0 * pi / n;
    for (int i = 0; i < n; ++i) sum += f(i * h);
    return sum * h;
}

template <typename F>
double checked_periodic_mean(F&& f) {
    const int n = 1 << 14;
    const double coarse = periodic_quadrature(f, n / 2);
    const double fine = periodic_quadrature(f, n);
    const double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) > 1e-8 * scale) {
        throw std::runtime_error("analysis: periodic quadrature failed to converge");
    }
    return fine / (2.0 * pi);
}

} // namespace

QuasiStaticConstants quasi_static_constants(const model::EngineParams& p,
                                            double tau) {
    if (tau < 0.0) throw std::domain_error("analysis: tau must be >= 0");
    QuasiStaticConstants c;
    c.tau = tau;
    c.C1 = p.hbar_g * model::steady_state_at_detuning(p.Delta0, p).n_a_ss -
           p.E_J;
    c.C2 = p.hbar_g * p.g * model::steady_state_slope(p.Delta0, p);
    c.C3 = tau * p.E_c * c.C2;
    c.W_cyc_per_Q = pi * tau * p.E_c * c.C2;
    return c;
}

double chi(double phi, const model::EngineParams& p) {
    const auto bath = model::bath_at_angle(phi, p);
    const double s = std::sin(phi);
    const double kH2 = p.kappa_H * p.kappa_H;
    const double denom = 1.0 + p.alpha + 4.0 * bath.Delta * bath.Delta / kH2;
    return -(p.hbar_g * p.E_c / bath.kappa) * (p.n_H - p.n_C) * 8.0 * p.alpha *
           s * s * (p.g * bath.Delta / kH2) / (denom * denom);
}

double chi_mean(const model::EngineParams& p) {
    return checked_periodic_mean([&](double phi) { return chi(phi, p); });
}

double variance_diffusion_term(const model::EngineParams& p) {
    const double integral_mean = checked_periodic_mean([&](double phi) {
        const auto bath = model::bath_at_angle(phi, p);
        const double s = std::sin(phi);
        return bath.n_bar * bath.n_bar * s * s / bath.kappa;
    });
    // mean * 2pi recovers the plain integral; prefactor E_c^2 g^2 / pi.
    return p.E_c * p.E_c * p.hbar_g * p.hbar_g / pi * integral_mean * 2.0 * pi;
}

double variance_rate(const model::EngineParams& p, double var_L) {
    if (var_L < 0.0) throw std::domain_error("analysis: var_L must be >= 0");
    return 2.0 * chi_mean(p) * var_L + variance_diffusion_term(p);
}

double optimal_detuning(const model::EngineParams& p) {
    return -std::sqrt((1.0 + p.alpha) / 12.0) * p.kappa_H;
}

CycleRecord pv_curve(const model::EngineParams& p, double tau_times_omega,
                     int n_points) {
    if (n_points < 8) throw std::domain_error("analysis: n_points must be >= 8");

    CycleRecord rec;
    rec.phi.resize(n_points);
    rec.V_samples.resize(n_points);
    rec.p_samples.resize(n_points);

    for (int i = 0; i < n_points; ++i) {
        const double phi = 2.0 * pi * i / n_points;
        const double delayed = phi - tau_times_omega;
        rec.phi[i] = phi;
        rec.V_samples[i] = -std::cos(phi);
        rec.p_samples[i] =
            p.hbar_g * model::steady_state_occupations(delayed, p).n_a_ss;
    }

    // Closed-loop work integral of p dV by the trapezoid/shoelace rule.
    double area = 0.0;
    for (int i = 0; i < n_points; ++i) {
        const int j = (i + 1) % n_points;
        area += 0.5 * (rec.p_samples[i] + rec.p_samples[j]) *
                (rec.V_samples[j] - rec.V_samples[i]);
    }
    rec.loop_area = area;

    const auto [mn, mx] = std::minmax_element(rec.p_samples.begin(),
                                              rec.p_samples.end());
    rec.phi_p_min = rec.phi[mn - rec.p_samples.begin()];
    rec.phi_p_max = rec.phi[mx - rec.p_samples.begin()];
    return rec;
}

EnsembleStats ensemble_stats(const sim::EnsembleRecord& e,
                             double smoothing_window) {
    if (e.trajectories.empty()) {
        throw std::invalid_argument("analysis: empty ensemble");
    }
    return ensemble_stats(e, e.trajectories.front().meta.params,
                          smoothing_window);
}

EnsembleStats ensemble_stats(const sim::EnsembleRecord& e,
                             const model::EngineParams& p,
                             double smoothing_window) {
    if (e.trajectories.size() < 2) {
        throw std::invalid_argument("analysis: need at least 2 trajectories");
    }
    const auto& t0 = e.trajectories.front().times;
    for (const auto& tr : e.trajectories) {
        if (tr.times.size() != t0.size()) {
            throw std::invalid_argument("analysis: inhomogeneous ensemble");
        }
    }
    const std::size_t n_samples = t0.size();
    const std::size_t n_traj = e.trajectories.size();

    EnsembleStats st;
    st.times = t0;
    st.mean_L.assign(n_samples, 0.0);
    st.var_L.assign(n_samples, 0.0);
    st.mean_L2.assign(n_samples, 0.0);
    st.mean_phi.assign(n_samples, 0.0);
    st.smoothing_window = smoothing_window;
    st.chi_bar = chi_mean(p);
    st.diffusion_term = variance_diffusion_term(p);

    for (std::size_t i = 0; i < n_samples; ++i) {
        double sum = 0.0, sum_phi = 0.0;
        for (const auto& tr : e.trajectories) {
            sum += tr.L[i];
            sum_phi += tr.phi[i];
        }
        const double mean = sum / n_traj;
        double ssq = 0.0;
        for (const auto& tr : e.trajectories) {
            const double d = tr.L[i] - mean;
            ssq += d * d;
        }
        st.mean_L[i] = mean;
        st.var_L[i] = ssq / (n_traj - 1);
        st.mean_L2[i] = mean * mean + st.var_L[i];
        st.mean_phi[i] = sum_phi / n_traj;
    }

    // Finite-difference rates over the smoothing window; one-sided at the
    // record edges so every entry stays defined.
    const double dt_sample = n_samples > 1 ? t0[1] - t0[0] : 0.0;
    if (smoothing_window > (n_samples - 1) * dt_sample) {
        throw std::invalid_argument("analysis: smoothing window exceeds record");
    }
    const std::size_t half = dt_sample > 0.0
        ? std::max<std::size_t>(1, static_cast<std::size_t>(
              std::llround(0.5 * smoothing_window / dt_sample)))
        : 1;

    st.snr.assign(n_samples, nan);
    st.rate_mean.assign(n_samples, nan);
    st.rate_var.assign(n_samples, nan);
    st.norm_gain.assign(n_samples, nan);
    st.norm_var.assign(n_samples, nan);

    auto fd = [&](const std::vector<double>& y, std::size_t i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(i + half, n_samples - 1);
        if (hi == lo) return nan;
        return (y[hi] - y[lo]) / (t0[hi] - t0[lo]);
    };

    for (std::size_t i = 0; i < n_samples; ++i) {
        if (st.var_L[i] > 0.0) {
            st.snr[i] = st.mean_L[i] / std::sqrt(st.var_L[i]);
        }
        st.rate_mean[i] = fd(st.mean_L, i);
        st.rate_var[i] = fd(st.var_L, i);
        const double gain_pred = st.chi_bar * st.mean_L[i];
        if (gain_pred != 0.0 && std::isfinite(st.rate_mean[i])) {
            st.norm_gain[i] = st.rate_mean[i] / gain_pred;
        }
        const double var_pred =
            2.0 * st.chi_bar * st.var_L[i] + st.diffusion_term;
        if (var_pred != 0.0 && std::isfinite(st.rate_var[i])) {
            st.norm_var[i] = st.rate_var[i] / var_pred;
        }
    }
    return st;
}

TimeRange validity_window(const EnsembleStats& stats, double threshold) {
    const std::size_t n = stats.times.size();
    TimeRange range;
    if (n < 2) return range;
    const double dt_sample = stats.times[1] - stats.times[0];
    const std::size_t win = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(stats.smoothing_window / dt_sample)));

    // Free rotation: ensemble-mean angle strictly increasing over the
    // trailing window and advanced by at least one full turn, so the
    // initial librating transient is excluded.
    std::size_t begin = n;
    for (std::size_t i = win; i < n; ++i) {
        if (stats.mean_phi[i] - stats.mean_phi[0] < 2.0 * pi) continue;
        bool monotone = true;
        for (std::size_t j = i - win; j < i; ++j) {
            if (!(stats.mean_phi[j + 1] > stats.mean_phi[j])) {
                monotone = false;
                break;
            }
        }
        if (monotone) {
            begin = i;
            break;
        }
    }
    if (begin == n) return range;

    // First-order validity: <L^2> at or below threshold (boundary included).
    std::size_t end = begin;
    for (std::size_t i = begin; i < n; ++i) {
        if (stats.mean_L2[i] <= threshold) end = i;
        else break;
    }
    if (end <= begin) return range;
    range.t_begin = stats.times[begin];
    range.t_end = stats.times[end];
    range.empty = false;
    return range;
}

TimeRange validity_window(const sim::EnsembleRecord& e,
                          const model::EngineParams& p,
                          double smoothing_window, double threshold) {
    return validity_window(ensemble_stats(e, p, smoothing_window), threshold);
}

double threshold_crossing_time(const EnsembleStats& stats, double threshold) {
    for (std::size_t i = 0; i < stats.times.size(); ++i) {
        if (stats.mean_L2[i] >= threshold) return stats.times[i];
    }
    return nan;
}

std::vector<double> moving_average(const std::vector<double>& times,
                                   const std::vector<double>& y, double width) {
    if (times.size() != y.size()) {
        throw std::invalid_argument("analysis: moving_average size mismatch");
    }
    const std::size_t n = times.size();
    std::vector<double> out(n, nan);
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (lo < i && times[i] - times[lo] > 0.5 * width) ++lo;
        while (hi + 1 < n && times[hi + 1] - times[i] <= 0.5 * width) ++hi;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t j = lo; j <= hi; ++j) {
            if (std::isfinite(y[j])) {
                sum += y[j];
                ++count;
            }
        }
        if (count) out[i] = sum / count;
    }
    return out;
}

WindowSummary window_summary(const EnsembleStats& stats, double threshold) {
    WindowSummary s;
    s.window = validity_window(stats, threshold);
    s.crossing_time = threshold_crossing_time(stats, threshold);
    if (s.window.empty) {
        s.norm_gain = s.norm_var = s.snr_mean = s.snr_variation = nan;
        return s;
    }

    const auto& t = stats.times;
    std::size_t b = 0;
    while (t[b] < s.window.t_begin) ++b;
    std::size_t e = b;
    while (e + 1 < t.size() && t[e + 1] <= s.window.t_end) ++e;

    double int_mean = 0.0, int_var = 0.0;
    for (std::size_t i = b; i < e; ++i) {
        const double h = t[i + 1] - t[i];
        int_mean += 0.5 * h * (stats.mean_L[i] + stats.mean_L[i + 1]);
        int_var += 0.5 * h * (stats.var_L[i] + stats.var_L[i + 1]);
    }
    const double span = t[e] - t[b];
    s.norm_gain =
        (stats.mean_L[e] - stats.mean_L[b]) / (stats.chi_bar * int_mean);
    s.norm_var = (stats.var_L[e] - stats.var_L[b]) /
                 (2.0 * stats.chi_bar * int_var + stats.diffusion_term * span);

    const auto smooth = moving_average(t, stats.snr, stats.smoothing_window);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = b; i <= e; ++i) {
        if (std::isfinite(smooth[i])) {
            sum += smooth[i];
            ++count;
        }
    }
    if (count == 0) {
        s.snr_mean = s.snr_variation = nan;
        return s;
    }
    s.snr_mean = sum / count;
    double ssq = 0.0;
    for (std::size_t i = b; i <= e; ++i) {
        if (std::isfinite(smooth[i])) {
            const double d = smooth[i] - s.snr_mean;
            ssq += d * d;
        }
    }
    s.snr_variation = s.snr_mean != 0.0
        ? std::sqrt(ssq / count) / std::abs(s.snr_mean)
        : std::numeric_limits<double>::infinity();
    return s;
}

} // namespace piston::analysis
