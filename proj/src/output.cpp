#include "piston/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace piston::output {

std::string format_double(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    // Try increasing precision until the value round-trips.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

Provenance provenance_for(const model::EngineParams& p) {
    return {
        {"code_version", code_version},
        {"kappa_C", format_double(p.kappa_C)},
        {"kappa_H", format_double(p.kappa_H)},
        {"J", format_double(p.J)},
        {"alpha", format_double(p.alpha)},
        {"Delta0", format_double(p.Delta0)},
        {"g", format_double(p.g)},
        {"E_c", format_double(p.E_c)},
        {"E_J", format_double(p.E_J)},
        {"n_H", format_double(p.n_H)},
        {"n_C", format_double(p.n_C)},
    };
}

CsvWriter::CsvWriter(std::string path) : path_(std::move(path)) {}

void CsvWriter::comment(const std::string& key, const std::string& value) {
    buffer_ += "# " + key + " = " + value + "\n";
}

void CsvWriter::comments(const Provenance& prov) {
    for (const auto& [k, v] : prov) comment(k, v);
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    n_columns_ = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += columns[i];
    }
    buffer_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != n_columns_) {
        throw std::logic_error("CsvWriter: row width mismatch");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += format_double(values[i]);
    }
    buffer_ += '\n';
}

void CsvWriter::save() const {
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path_);
    out << buffer_;
}

void write_trajectory_csv(const std::string& path,
                          const sim::TrajectoryRecord& rec) {
    CsvWriter csv(path);
    csv.comments(provenance_for(rec.meta.params));
    csv.comment("model", sim::to_string(rec.meta.model));
    csv.comment("seed", std::to_string(rec.meta.seed));
    csv.comment("stream_id", std::to_string(rec.meta.stream_id));
    csv.comment("dt", format_double(rec.meta.dt));
    csv.comment("sample_stride", std::to_string(rec.meta.sample_stride));
    csv.comment("clamp_count", std::to_string(rec.meta.clamp_count));

    const bool full = rec.meta.model == sim::ModelKind::Full;
    if (full) {
        csv.header({"t", "n_a", "n_b", "phi", "L"});
        for (std::size_t i = 0; i < rec.times.size(); ++i) {
            csv.row({rec.times[i], rec.n_a[i], rec.n_b[i], rec.phi[i],
                     rec.L[i]});
        }
    } else {
        csv.header({"t", "n_a", "phi", "L"});
        for (std::size_t i = 0; i < rec.times.size(); ++i) {
            csv.row({rec.times[i], rec.n_a[i], rec.phi[i], rec.L[i]});
        }
    }
    csv.save();
}

void write_stats_csv(const std::string& path,
                     const analysis::EnsembleStats& stats,
                     const model::EngineParams& p, std::uint64_t seed) {
    CsvWriter csv(path);
    csv.comments(provenance_for(p));
    csv.comment("seed", std::to_string(seed));
    csv.comment("smoothing_window", format_double(stats.smoothing_window));
    csv.comment("chi_bar", format_double(stats.chi_bar));
    csv.comment("diffusion_term", format_double(stats.diffusion_term));
    csv.header({"t", "mean_L", "var_L", "mean_L2", "mean_phi", "snr",
                "rate_mean", "rate_var", "norm_gain", "norm_var"});
    for (std::size_t i = 0; i < stats.times.size(); ++i) {
        csv.row({stats.times[i], stats.mean_L[i], stats.var_L[i],
                 stats.mean_L2[i], stats.mean_phi[i], stats.snr[i],
                 stats.rate_mean[i], stats.rate_var[i], stats.norm_gain[i],
                 stats.norm_var[i]});
    }
    csv.save();
}

analysis::EnsembleStats read_stats_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stats file: " + path);

    analysis::EnsembleStats stats;
    stats.smoothing_window = 0.0;
    stats.chi_bar = 0.0;
    stats.diffusion_term = 0.0;

    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key, eq, value;
            if (ls >> key >> eq >> value && eq == "=") {
                if (key == "smoothing_window") {
                    stats.smoothing_window = std::stod(value);
                } else if (key == "chi_bar") {
                    stats.chi_bar = std::stod(value);
                } else if (key == "diffusion_term") {
                    stats.diffusion_term = std::stod(value);
                }
            }
            continue;
        }
        if (!saw_header) {
            if (line != "t,mean_L,var_L,mean_L2,mean_phi,snr,rate_mean,"
                        "rate_var,norm_gain,norm_var") {
                throw std::runtime_error("stats file schema mismatch: " + path);
            }
            saw_header = true;
            continue;
        }
        std::vector<double> vals;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            vals.push_back(cell.empty()
                               ? std::numeric_limits<double>::quiet_NaN()
                               : std::stod(cell));
        }
        // A trailing empty cell is dropped by getline; pad.
        while (vals.size() < 10) {
            vals.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        if (vals.size() != 10) {
            throw std::runtime_error("stats file schema mismatch: " + path);
        }
        stats.times.push_back(vals[0]);
        stats.mean_L.push_back(vals[1]);
        stats.var_L.push_back(vals[2]);
        stats.mean_L2.push_back(vals[3]);
        stats.mean_phi.push_back(vals[4]);
        stats.snr.push_back(vals[5]);
        stats.rate_mean.push_back(vals[6]);
        stats.rate_var.push_back(vals[7]);
        stats.norm_gain.push_back(vals[8]);
        stats.norm_var.push_back(vals[9]);
    }
    if (!saw_header) {
        throw std::runtime_error("stats file schema mismatch: " + path);
    }
    return stats;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

} // namespace piston::output
