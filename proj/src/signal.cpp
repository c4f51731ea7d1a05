#include "egokit/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace egokit {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw RaggedRow("csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

double SensorSeries::dt() const {
    if (timestamps.size() < 2) {
        throw SeriesTooShort("dt undefined for a series with fewer than 2 ticks");
    }
    return timestamps[1] - timestamps[0];
}

int SensorSeries::channel_index(const std::string& name) const {
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (channels[i] == name) return static_cast<int>(i);
    }
    return -1;
}

void SensorSeries::validate() const {
    const auto k = timestamps.size();
    if (values.rows() != static_cast<Eigen::Index>(k) ||
        values.cols() != static_cast<Eigen::Index>(channels.size())) {
        throw DimensionMismatch("series value matrix does not match timestamps/channels");
    }
    for (std::size_t i = 1; i < k; ++i) {
        if (!(timestamps[i] > timestamps[i - 1])) {
            throw NonMonotonicTime("timestamps not strictly increasing at tick " +
                                   std::to_string(i));
        }
    }
    if (k >= 3) {
        const double step = timestamps[1] - timestamps[0];
        for (std::size_t i = 2; i < k; ++i) {
            const double d = timestamps[i] - timestamps[i - 1];
            if (std::abs(d - step) > 1e-9 * std::abs(step)) {
                throw NonUniformTime("non-uniform time spacing at tick " + std::to_string(i));
            }
        }
    }
    if (!values.allFinite()) {
        throw Error("series contains non-finite values");
    }
}

Scaler Scaler::identity(int dim) {
    Scaler s;
    s.mean = Eigen::VectorXd::Zero(dim);
    s.std = Eigen::VectorXd::Ones(dim);
    return s;
}

Scaler Scaler::fit(const Eigen::MatrixXd& data) {
    if (data.rows() == 0) throw SeriesTooShort("cannot fit a scaler on an empty series");
    Scaler s;
    s.mean = data.colwise().mean();
    Eigen::MatrixXd centered = data.rowwise() - s.mean.transpose();
    s.std = (centered.array().square().colwise().mean()).sqrt().matrix();
    s.std = s.std.cwiseMax(1e-12);
    return s;
}

Scaler Scaler::subset(const std::vector<int>& indices) const {
    Scaler s;
    s.mean.resize(indices.size());
    s.std.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        s.mean[i] = mean[indices[i]];
        s.std[i] = std[indices[i]];
    }
    return s;
}

Eigen::MatrixXd Scaler::apply(const Eigen::MatrixXd& data) const {
    if (data.cols() != mean.size()) {
        throw DimensionMismatch("scaler dimension does not match data");
    }
    return (data.rowwise() - mean.transpose()).array().rowwise() /
           std.transpose().array();
}

Eigen::VectorXd Scaler::apply_row(const Eigen::VectorXd& row) const {
    if (row.size() != mean.size()) {
        throw DimensionMismatch("scaler dimension does not match observation");
    }
    return (row - mean).cwiseQuotient(std);
}

SensorSeries ingest_csv(const std::string& path, const std::vector<std::string>& schema) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error("empty csv file '" + path + "'");

    const auto header = split_csv_line(line);
    auto find_col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        return -1;
    };
    const int t_col = find_col("t");
    if (t_col < 0) throw MissingColumn("header lacks column 't'");
    std::vector<int> cols;
    for (const auto& name : schema) {
        const int c = find_col(name);
        if (c < 0) throw MissingColumn("header lacks column '" + name + "'");
        cols.push_back(c);
    }

    std::vector<double> ts;
    std::vector<double> flat;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw RaggedRow("csv line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(header.size()));
        }
        ts.push_back(parse_double(fields[t_col], line_no));
        for (int c : cols) flat.push_back(parse_double(fields[c], line_no));
    }

    SensorSeries series;
    series.timestamps = std::move(ts);
    series.channels = schema;
    series.values.resize(series.timestamps.size(), schema.size());
    for (std::size_t i = 0; i < series.timestamps.size(); ++i) {
        for (std::size_t j = 0; j < schema.size(); ++j) {
            series.values(i, j) = flat[i * schema.size() + j];
        }
    }
    series.validate();
    return series;
}

SensorSeries select_feature(const SensorSeries& series, const FeatureCase& fc) {
    if (fc.channel_indices.empty()) throw EmptyChannelSet("feature case has no channels");
    SensorSeries out;
    out.timestamps = series.timestamps;
    for (int idx : fc.channel_indices) {
        if (idx < 0 || idx >= static_cast<int>(series.channels.size())) {
            throw UnknownChannel("channel index " + std::to_string(idx) + " out of range");
        }
        out.channels.push_back(series.channels[idx]);
    }
    out.values.resize(series.values.rows(), fc.channel_indices.size());
    for (std::size_t j = 0; j < fc.channel_indices.size(); ++j) {
        out.values.col(j) = series.values.col(fc.channel_indices[j]);
    }
    return out;
}

std::string case_id_for(const std::vector<std::string>& names) {
    bool all_single = true;
    for (const auto& n : names) all_single = all_single && n.size() == 1;
    std::string id;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0 && !all_single) id += '+';
        id += names[i];
    }
    return id;
}

std::vector<FeatureCase> enumerate_cases(const std::vector<std::string>& channels) {
    if (channels.empty()) throw EmptyChannelSet("no channels to enumerate");
    if (channels.size() > 16) throw InvalidParams("more than 16 channels");
    const int s = static_cast<int>(channels.size());
    std::vector<std::vector<int>> subsets;
    for (unsigned mask = 1; mask < (1u << s); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < s; ++i) {
            if (mask & (1u << i)) idx.push_back(i);
        }
        subsets.push_back(std::move(idx));
    }
    std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    std::vector<FeatureCase> cases;
    for (auto& idx : subsets) {
        std::vector<std::string> names;
        for (int i : idx) names.push_back(channels[i]);
        cases.push_back(FeatureCase{case_id_for(names), std::move(idx)});
    }
    return cases;
}

FeatureCase case_from_id(const std::vector<std::string>& channels, const std::string& id) {
    if (id.empty()) throw EmptyChannelSet("empty feature id");
    auto index_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < channels.size(); ++i) {
            if (channels[i] == name) return static_cast<int>(i);
        }
        throw UnknownChannel("channel '" + name + "' not in series");
    };

    std::vector<std::string> names;
    if (id.find('+') != std::string::npos || id.find(',') != std::string::npos) {
        std::string cur;
        for (char c : id) {
            if (c == '+' || c == ',') {
                if (!cur.empty()) names.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) names.push_back(cur);
    } else if (std::find(channels.begin(), channels.end(), id) != channels.end()) {
        names.push_back(id);
    } else {
        // Single-letter channel shorthand, e.g. "SP".
        for (char c : id) names.emplace_back(1, c);
    }

    FeatureCase fc;
    for (const auto& n : names) {
        const int idx = index_of(n);
        if (std::find(fc.channel_indices.begin(), fc.channel_indices.end(), idx) !=
            fc.channel_indices.end()) {
            throw InvalidParams("duplicate channel '" + n + "' in feature id '" + id + "'");
        }
        fc.channel_indices.push_back(idx);
    }
    fc.id = case_id_for(names);
    return fc;
}

GeneralizedSeries derive_generalized(const SensorSeries& series, int order,
                                     const std::optional<Scaler>& scaler) {
    if (order < 0) throw InvalidParams("derivative order must be non-negative");
    const auto k = static_cast<Eigen::Index>(series.ticks());
    if (k < order + 1) {
        throw SeriesTooShort("series of " + std::to_string(k) +
                             " ticks cannot support order " + std::to_string(order));
    }
    const int d = static_cast<int>(series.channels.size());

    GeneralizedSeries gen;
    gen.order = order;
    gen.dim = d;
    gen.dt = k >= 2 ? series.dt() : 0.0;
    gen.scaler = scaler ? *scaler : Scaler::fit(series.values);
    if (gen.scaler.dim() != d) {
        throw DimensionMismatch("scaler dimension does not match feature channels");
    }

    gen.states.setZero(k, static_cast<Eigen::Index>(d) * (order + 1));
    gen.states.leftCols(d) = gen.scaler.apply(series.values);
    for (int l = 1; l <= order; ++l) {
        auto prev = gen.states.middleCols((l - 1) * d, d);
        auto cur = gen.states.middleCols(l * d, d);
        // Backward difference; tick 0 stays zero.
        cur.bottomRows(k - 1) =
            (prev.bottomRows(k - 1) - prev.topRows(k - 1)) / gen.dt;
    }
    return gen;
}

}  // namespace egokit
