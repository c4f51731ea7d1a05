#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "egokit/eval.hpp"
#include "egokit/mjpf.hpp"
#include "egokit/scenario.hpp"

namespace egokit {

// Training provenance echoed into the model file.
struct Provenance {
    std::uint64_t seed = 0;
    std::string data_hash;        // fnv1a-64 of the training CSV bytes
    std::size_t trained_ticks = 0;
};

nlohmann::json gng_to_json(const GngGraph& graph);
GngGraph gng_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ModelBundle& model, const Provenance& prov);
ModelBundle model_from_json(const nlohmann::json& j);

// Atomic: writes to a temp file in the same directory, then renames.
void save_model(const std::string& path, const ModelBundle& model, const Provenance& prov);
ModelBundle load_model(const std::string& path);

// CSV round trips. Values are printed with full round-trip precision.
void write_series_csv(const std::string& path, const SensorSeries& series);
void write_gt_csv(const std::string& path, const std::vector<double>& timestamps,
                  const GroundTruth& gt);
GroundTruth read_gt_csv(const std::string& path);

struct TraceRow {
    int k = 0;
    double t = 0.0;
    double theta = 0.0;
    int map_word = 0;
};

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(const std::string& path);

// Evaluation report: values rounded to 6 decimals so reruns are byte-stable.
nlohmann::json report_to_json(const std::vector<EvalReport>& ranking, int smooth_window);
void write_roc_csv(const std::string& path, const std::vector<RocPoint>& roc);

std::uint64_t fnv1a_file(const std::string& path);
std::string fnv1a_hex(std::uint64_t h);

}  // namespace egokit
