#pragma once

#include <string>
#include <utility>
#include <vector>

#include "egokit/errors.hpp"

namespace egokit {

// Ground-truth maneuver classes of the U-turn task. Abnormal w.r.t. the
// perimeter-monitoring training data: UturnExecution and InverseCurve.
enum class GtClass {
    EnteringUturn,
    UturnExecution,
    ExitingUturn,
    InverseCurve,
    StraightMotion,
};

bool is_abnormal(GtClass c);
const char* to_string(GtClass c);
GtClass gt_class_from_string(const std::string& s);

struct GroundTruth {
    std::vector<GtClass> classes;

    std::vector<int> labels() const;   // 1 = abnormal
    std::size_t size() const { return classes.size(); }
};

struct RocPoint {
    double threshold = 0.0;   // decision rule: abnormal iff score >= threshold
    double tpr = 0.0;
    double fpr = 0.0;
};

struct EvalReport {
    std::string feature_id;
    std::vector<RocPoint> roc;   // threshold descending, starts at (0,0)
    double auc = 0.0;
    double best_acc = 0.0;
    double best_threshold = 0.0;
};

// Thresholds are the unique scores plus a +inf sentinel, descending.
std::vector<RocPoint> roc_curve(const std::vector<double>& scores,
                                const std::vector<int>& labels);

// Trapezoidal area under the curve over FPR in [0,1].
double auc(const std::vector<RocPoint>& roc);

double accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                double threshold);

// Best accuracy over all ROC thresholds; ties broken by the lower threshold.
std::pair<double, double> best_accuracy(const std::vector<double>& scores,
                                        const std::vector<int>& labels);

// Full report for one feature-case.
EvalReport evaluate_trace(const std::string& feature_id, const std::vector<double>& scores,
                          const std::vector<int>& labels);

// Ranking: AUC descending, ties by best accuracy descending, then id.
std::vector<EvalReport> select_model(std::vector<EvalReport> reports);

// Centered moving average; window 1 = off, window must be odd.
std::vector<double> smooth_scores(const std::vector<double>& scores, int window);

}  // namespace egokit
