#include "egokit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace egokit {

bool is_abnormal(GtClass c) {
    return c == GtClass::UturnExecution || c == GtClass::InverseCurve;
}

const char* to_string(GtClass c) {
    switch (c) {
        case GtClass::EnteringUturn: return "EnteringUturn";
        case GtClass::UturnExecution: return "UturnExecution";
        case GtClass::ExitingUturn: return "ExitingUturn";
        case GtClass::InverseCurve: return "InverseCurve";
        case GtClass::StraightMotion: return "StraightMotion";
    }
    return "?";
}

GtClass gt_class_from_string(const std::string& s) {
    if (s == "EnteringUturn") return GtClass::EnteringUturn;
    if (s == "UturnExecution") return GtClass::UturnExecution;
    if (s == "ExitingUturn") return GtClass::ExitingUturn;
    if (s == "InverseCurve") return GtClass::InverseCurve;
    if (s == "StraightMotion") return GtClass::StraightMotion;
    throw Error("unknown ground-truth class '" + s + "'");
}

std::vector<int> GroundTruth::labels() const {
    std::vector<int> out(classes.size());
    for (std::size_t i = 0; i < classes.size(); ++i) out[i] = is_abnormal(classes[i]) ? 1 : 0;
    return out;
}

namespace {

struct Counts {
    std::size_t pos = 0;
    std::size_t neg = 0;
};

Counts check_inputs(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) {
        throw LengthMismatch("scores (" + std::to_string(scores.size()) + ") vs labels (" +
                             std::to_string(labels.size()) + ")");
    }
    if (scores.empty()) throw LengthMismatch("empty score vector");
    Counts c;
    for (int l : labels) {
        if (l == 1) ++c.pos;
        else ++c.neg;
    }
    if (c.pos == 0 || c.neg == 0) {
        throw SingleClassLabels("both classes must be present");
    }
    return c;
}

// Indices ordered by score descending; ties keep input order.
std::vector<std::size_t> descending_order(const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

}  // namespace

std::vector<RocPoint> roc_curve(const std::vector<double>& scores,
                                const std::vector<int>& labels) {
    const Counts c = check_inputs(scores, labels);
    const auto order = descending_order(scores);

    std::vector<RocPoint> roc;
    roc.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double thr = scores[order[i]];
        // Consume the whole tie group: the decision rule is score >= thr.
        while (i < order.size() && scores[order[i]] == thr) {
            if (labels[order[i]] == 1) ++tp;
            else ++fp;
            ++i;
        }
        roc.push_back({thr, static_cast<double>(tp) / static_cast<double>(c.pos),
                       static_cast<double>(fp) / static_cast<double>(c.neg)});
    }
    return roc;
}

double auc(const std::vector<RocPoint>& roc) {
    double area = 0.0;
    for (std::size_t i = 1; i < roc.size(); ++i) {
        area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2.0;
    }
    return area;
}

double accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                double threshold) {
    const Counts c = check_inputs(scores, labels);
    (void)c;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int pred = scores[i] >= threshold ? 1 : 0;
        if (pred == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(scores.size());
}

std::pair<double, double> best_accuracy(const std::vector<double>& scores,
                                        const std::vector<int>& labels) {
    const Counts c = check_inputs(scores, labels);
    const auto order = descending_order(scores);
    const auto n = scores.size();

    // Sweep thresholds descending; integer counts keep ties exact. The +inf
    // sentinel predicts nothing: correct = negatives.
    std::size_t tp = 0, fp = 0;
    std::size_t best_correct = c.neg;
    double best_thr = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < n) {
        const double thr = scores[order[i]];
        while (i < n && scores[order[i]] == thr) {
            if (labels[order[i]] == 1) ++tp;
            else ++fp;
            ++i;
        }
        const std::size_t correct = tp + (c.neg - fp);
        if (correct >= best_correct) {   // >= keeps the lowest tied threshold
            best_correct = correct;
            best_thr = thr;
        }
    }
    return {static_cast<double>(best_correct) / static_cast<double>(n), best_thr};
}

EvalReport evaluate_trace(const std::string& feature_id, const std::vector<double>& scores,
                          const std::vector<int>& labels) {
    EvalReport report;
    report.feature_id = feature_id;
    report.roc = roc_curve(scores, labels);
    report.auc = auc(report.roc);
    const auto [acc, thr] = best_accuracy(scores, labels);
    report.best_acc = acc;
    report.best_threshold = thr;
    return report;
}

std::vector<EvalReport> select_model(std::vector<EvalReport> reports) {
    if (reports.empty()) throw EmptyReportSet("no reports to rank");
    std::sort(reports.begin(), reports.end(), [](const EvalReport& a, const EvalReport& b) {
        if (a.auc != b.auc) return a.auc > b.auc;
        if (a.best_acc != b.best_acc) return a.best_acc > b.best_acc;
        return a.feature_id < b.feature_id;
    });
    return reports;
}

std::vector<double> smooth_scores(const std::vector<double>& scores, int window) {
    if (window < 1 || window % 2 == 0) {
        throw InvalidParams("smoothing window must be odd and >= 1");
    }
    if (window == 1) return scores;
    const int n = static_cast<int>(scores.size());
    const int half = window / 2;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) sum += scores[j];
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

}  // namespace egokit
