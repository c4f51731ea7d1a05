#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "egokit/errors.hpp"

namespace egokit {

// Multichannel time series on a uniform clock. Immutable after construction.
struct SensorSeries {
    std::vector<double> timestamps;   // strictly increasing, uniform spacing
    std::vector<std::string> channels;
    Eigen::MatrixXd values;           // ticks x channels

    std::size_t ticks() const { return timestamps.size(); }
    double dt() const;

    // Throws if timestamps are non-monotonic, spacing is non-uniform
    // (1e-9 relative), or the value matrix shape disagrees.
    void validate() const;

    int channel_index(const std::string& name) const;  // -1 if absent
};

// Ordered subset of channels, e.g. SP = steering + power.
struct FeatureCase {
    std::string id;
    std::vector<int> channel_indices;
};

// Per-dimension affine normalization, fitted on training data only.
struct Scaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;

    static Scaler identity(int dim);
    static Scaler fit(const Eigen::MatrixXd& data);   // population std, floored at 1e-12
    Scaler subset(const std::vector<int>& indices) const;

    int dim() const { return static_cast<int>(mean.size()); }
    Eigen::MatrixXd apply(const Eigen::MatrixXd& data) const;
    Eigen::VectorXd apply_row(const Eigen::VectorXd& row) const;
};

// State stacked with its time derivatives up to `order`, in normalized units.
// Layout: columns [block 0 | block 1 | ... | block L], each block `dim` wide.
// Derivative blocks are iterated backward differences of the normalized
// order-0 signal, zeroed at tick 0.
struct GeneralizedSeries {
    double dt = 0.0;
    int order = 0;
    int dim = 0;
    Eigen::MatrixXd states;           // ticks x dim*(order+1)
    Scaler scaler;

    std::size_t ticks() const { return static_cast<std::size_t>(states.rows()); }
    Eigen::Ref<const Eigen::MatrixXd> block(int level) const {
        return states.middleCols(level * dim, dim);
    }
};

// Reads `path` as CSV with header `t,<chan>,...`; returns the schema channels
// in schema order. Extra columns are ignored.
SensorSeries ingest_csv(const std::string& path, const std::vector<std::string>& schema);

SensorSeries select_feature(const SensorSeries& series, const FeatureCase& fc);

// All non-empty channel subsets, ordered by subset size descending then
// lexicographically by index tuple.
std::vector<FeatureCase> enumerate_cases(const std::vector<std::string>& channels);

// Resolves a case id like "SP" (single-letter channels), "steer+power" or
// "steer,power" against a channel list.
FeatureCase case_from_id(const std::vector<std::string>& channels, const std::string& id);

std::string case_id_for(const std::vector<std::string>& names);

// Builds generalized states. Without a scaler one is fitted on this series
// (training mode); with one it is applied (testing mode).
GeneralizedSeries derive_generalized(const SensorSeries& series, int order,
                                     const std::optional<Scaler>& scaler = std::nullopt);

}  // namespace egokit
