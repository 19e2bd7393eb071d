#pragma once

#include <span>
#include <string>
#include <vector>

namespace fairfly {

enum class FairnessKind { F1, F2, F2Imb };

std::string to_string(FairnessKind kind);
/// Accepts "f1", "f2", "f2imb" (also "f2_imb").
FairnessKind parse_fairness_kind(const std::string& text);

/// Population variance (divides by the count); 0 for fewer than two values.
double variance(std::span<const double> values);

double f1(std::span<const double> alpha);
double f2(std::span<const double> alpha, double w);
double f2_imb(std::span<const double> alpha, double w, std::span<const double> v);

struct FairnessSpec {
    FairnessKind kind = FairnessKind::F2;
    double w = 0.75;
    std::vector<double> v; // f2imb only; one weight per UAV

    /// Throws std::invalid_argument on w outside (0, 1] or bad weights.
    void validate(int uav_count) const;
    double score(std::span<const double> alpha) const;
};

/// Fairness values closer than this are ties.
inline constexpr double kFairnessTieTolerance = 1e-12;

} // namespace fairfly
