#include "cascade/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "cascade/errors.hpp"
#include "cascade/log.hpp"

namespace cascade {

namespace {

double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// n-1 denominator
double sample_sd(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::string format_pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (const auto& row : counts)
        for (std::size_t c : row) t += c;
    return t;
}

AccuracyTable make_accuracy_table(const std::vector<std::string>& labels,
                                  const std::vector<double>& accuracy_pct) {
    if (labels.size() != accuracy_pct.size()) throw ContractError("one accuracy per label required");
    if (labels.empty()) throw ContractError("empty accuracy table");
    AccuracyTable t;
    t.labels = labels;
    t.accuracy_pct = accuracy_pct;
    t.mean_pct = sample_mean(accuracy_pct);
    return t;
}

std::pair<ConfusionMatrix, AccuracyTable> confusion_and_accuracy(
    const std::vector<Prediction>& predictions, EvalAxis axis) {
    if (predictions.empty()) throw ContractError("no predictions to score");

    std::vector<std::string> labels;
    if (axis == EvalAxis::emotion) {
        for (Emotion e : all_emotions()) labels.emplace_back(emotion_name(e));
    } else {
        std::set<std::string> ids;
        for (const auto& p : predictions) {
            if (!p.predicted_speaker)
                throw ContractError("speaker axis needs predictions with a predicted speaker");
            ids.insert(p.true_speaker);
            ids.insert(*p.predicted_speaker);
        }
        labels.assign(ids.begin(), ids.end());
    }

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = i;

    ConfusionMatrix cm;
    cm.labels = labels;
    cm.counts.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
    for (const auto& p : predictions) {
        const std::string t = axis == EvalAxis::emotion ? emotion_name(p.true_emotion) : p.true_speaker;
        const std::string y =
            axis == EvalAxis::emotion ? emotion_name(p.predicted_emotion) : *p.predicted_speaker;
        cm.counts[index.at(t)][index.at(y)] += 1;
    }

    std::vector<std::string> scored_labels;
    std::vector<double> acc;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::size_t row = 0;
        for (std::size_t c : cm.counts[i]) row += c;
        if (row == 0) {
            log_warn("label '" + labels[i] + "' has no trials; excluded from the accuracy mean");
            continue;
        }
        scored_labels.push_back(labels[i]);
        acc.push_back(100.0 * static_cast<double>(cm.counts[i][i]) / static_cast<double>(row));
    }
    return {std::move(cm), make_accuracy_table(scored_labels, acc)};
}

double pooled_sd(double sd_x, double sd_y) {
    if (sd_x < 0.0 || sd_y < 0.0) throw ContractError("standard deviations must be >= 0");
    return std::sqrt((sd_x * sd_x + sd_y * sd_y) / 2.0);
}

TTestResult t_statistic(const std::vector<double>& x, const std::vector<double>& y,
                        SdConvention convention) {
    if (x.size() != y.size()) throw ContractError("samples must have equal size");
    if (x.size() < 2) throw ContractError("need at least two observations per sample");

    TTestResult r;
    r.n = x.size();
    r.mean_x = sample_mean(x);
    r.mean_y = sample_mean(y);
    r.sd_x = sample_sd(x, r.mean_x);
    r.sd_y = sample_sd(y, r.mean_y);
    if (convention == SdConvention::standard_error) {
        const double root_n = std::sqrt(static_cast<double>(r.n));
        r.sd_x /= root_n;
        r.sd_y /= root_n;
    }
    r.sd_pooled = pooled_sd(r.sd_x, r.sd_y);

    const double diff = r.mean_x - r.mean_y;
    if (r.sd_pooled == 0.0) {
        if (diff == 0.0) {
            r.t_value = 0.0;
        } else {
            r.infinite = true;
            r.t_value = diff > 0.0 ? std::numeric_limits<double>::infinity()
                                   : -std::numeric_limits<double>::infinity();
        }
        return r;
    }
    r.t_value = diff / r.sd_pooled;
    return r;
}

SignificanceVerdict compare_accuracy_tables(const AccuracyTable& a, const AccuracyTable& b,
                                            SdConvention convention) {
    if (a.labels != b.labels) throw ValidationError("accuracy tables cover different label sets");
    SignificanceVerdict v;
    v.t = t_statistic(a.accuracy_pct, b.accuracy_pct, convention);
    v.significant = v.t.t_value > v.threshold;
    return v;
}

std::string render_accuracy_table(const AccuracyTable& table, const std::string& axis_title) {
    std::size_t width = std::max<std::size_t>(axis_title.size(), 7);  // "average"
    for (const auto& l : table.labels) width = std::max(width, l.size());
    const auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
    std::ostringstream out;
    out << pad(axis_title) << "  Accuracy (%)\n";
    for (std::size_t i = 0; i < table.labels.size(); ++i)
        out << pad(table.labels[i]) << "  " << format_pct(table.accuracy_pct[i]) << '\n';
    out << pad("average") << "  " << format_pct(table.mean_pct) << '\n';
    return out.str();
}

std::string render_confusion(const ConfusionMatrix& cm) {
    std::size_t width = 4;
    for (const auto& l : cm.labels) width = std::max(width, l.size());
    for (const auto& row : cm.counts)
        for (std::size_t c : row) width = std::max(width, std::to_string(c).size());
    const auto pad = [&](const std::string& s) {
        std::string p(width - s.size(), ' ');
        return p + s;
    };
    std::ostringstream out;
    out << pad("") << "  ";
    for (const auto& l : cm.labels) out << pad(l) << ' ';
    out << '\n';
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        out << pad(cm.labels[i]) << "  ";
        for (std::size_t c : cm.counts[i]) out << pad(std::to_string(c)) << ' ';
        out << '\n';
    }
    return out.str();
}

}  // namespace cascade
