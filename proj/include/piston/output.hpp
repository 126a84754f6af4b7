#pragma once

#include "piston/analysis.hpp"
#include "piston/model.hpp"
#include "piston/sim.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace piston::output {

inline constexpr const char* code_version = "piston 1.0.0";

// Shortest decimal that round-trips a double; "nan"/"inf" never appear in
// emitted files, undefined entries become empty fields.
std::string format_double(double v);

using Provenance = std::vector<std::pair<std::string, std::string>>;

Provenance provenance_for(const model::EngineParams& p);

// Plain CSV with a leading "# key = value" provenance block.
class CsvWriter {
public:
    explicit CsvWriter(std::string path);
    void comment(const std::string& key, const std::string& value);
    void comments(const Provenance& prov);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void save() const; // atomic enough for our purposes: write whole buffer

private:
    std::string path_;
    std::string buffer_;
    std::size_t n_columns_ = 0;
};

void write_trajectory_csv(const std::string& path,
                          const sim::TrajectoryRecord& rec);
void write_stats_csv(const std::string& path,
                     const analysis::EnsembleStats& stats,
                     const model::EngineParams& p, std::uint64_t seed);

// Stats reader for the analyze subcommand; empty fields become NaN.
analysis::EnsembleStats read_stats_csv(const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);

} // namespace piston::output
