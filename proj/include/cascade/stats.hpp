#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cascade/recognizer.hpp"

namespace cascade {

enum class EvalAxis { emotion, speaker };

struct ConfusionMatrix {
    std::vector<std::string> labels;               // row = true, column = predicted
    std::vector<std::vector<std::size_t>> counts;  // labels x labels

    std::size_t total() const;
    bool operator==(const ConfusionMatrix&) const = default;
};

struct AccuracyTable {
    std::vector<std::string> labels;  // only labels with at least one trial
    std::vector<double> accuracy_pct;
    double mean_pct = 0.0;

    bool operator==(const AccuracyTable&) const = default;
};

// mean_pct = unweighted arithmetic mean of the entries
AccuracyTable make_accuracy_table(const std::vector<std::string>& labels,
                                  const std::vector<double>& accuracy_pct);

// Per-label accuracy = diagonal / row sum x 100. Labels with zero trials are
// dropped from the table with a warning. Speaker axis requires predictions
// that carry a predicted speaker.
std::pair<ConfusionMatrix, AccuracyTable> confusion_and_accuracy(
    const std::vector<Prediction>& predictions, EvalAxis axis);

// sqrt((sd_x^2 + sd_y^2) / 2)
double pooled_sd(double sd_x, double sd_y);

// Dispersion estimate entering the pooled denominator: the standard error of
// the sample mean (default) or the raw sample standard deviation.
enum class SdConvention { standard_error, sample_sd };

struct TTestResult {
    double t_value = 0.0;
    double sd_pooled = 0.0;
    double mean_x = 0.0, mean_y = 0.0;
    double sd_x = 0.0, sd_y = 0.0;  // per-sample estimates under the chosen convention
    std::size_t n = 0;
    bool infinite = false;  // zero pooled sd with unequal means
};

// Paired samples of equal size n >= 2; sample SD uses the n-1 denominator.
TTestResult t_statistic(const std::vector<double>& x, const std::vector<double>& y,
                        SdConvention convention = SdConvention::standard_error);

inline constexpr double kTCritical = 1.645;  // one-sided, 0.05 level

struct SignificanceVerdict {
    TTestResult t;
    double threshold = kTCritical;
    bool significant = false;  // t_value > threshold
};

// labels must match exactly (same order)
SignificanceVerdict compare_accuracy_tables(const AccuracyTable& a, const AccuracyTable& b,
                                            SdConvention convention = SdConvention::standard_error);

std::string render_accuracy_table(const AccuracyTable& table, const std::string& axis_title);
std::string render_confusion(const ConfusionMatrix& cm);

}  // namespace cascade
