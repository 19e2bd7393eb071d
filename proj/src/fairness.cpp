#include "fairfly/fairness.hpp"

#include <stdexcept>

namespace fairfly {

std::string to_string(FairnessKind kind) {
    switch (kind) {
    case FairnessKind::F1:
        return "f1";
    case FairnessKind::F2:
        return "f2";
    case FairnessKind::F2Imb:
        return "f2imb";
    }
    return "?";
}

FairnessKind parse_fairness_kind(const std::string& text) {
    if (text == "f1") {
        return FairnessKind::F1;
    }
    if (text == "f2") {
        return FairnessKind::F2;
    }
    if (text == "f2imb" || text == "f2_imb") {
        return FairnessKind::F2Imb;
    }
    throw std::invalid_argument("unknown fairness function '" + text + "' (expected f1, f2 or f2imb)");
}

double variance(std::span<const double> values) {
    if (values.size() < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (double x : values) {
        mean += x;
    }
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double x : values) {
        acc += (x - mean) * (x - mean);
    }
    return acc / static_cast<double>(values.size());
}

static void check_weight(double w) {
    if (!(w > 0.0 && w <= 1.0)) {
        throw std::invalid_argument("fairness weight w must lie in (0, 1]");
    }
}

double f1(std::span<const double> alpha) { return -variance(alpha); }

double f2(std::span<const double> alpha, double w) {
    check_weight(w);
    double sq = 0.0;
    for (double a : alpha) {
        sq += a * a;
    }
    return -w * variance(alpha) - (1.0 - w) * sq;
}

double f2_imb(std::span<const double> alpha, double w, std::span<const double> v) {
    check_weight(w);
    if (v.size() != alpha.size()) {
        throw std::invalid_argument("f2imb needs one weight per UAV");
    }
    double sq = 0.0;
    for (std::size_t n = 0; n < alpha.size(); ++n) {
        if (!(v[n] > 0.0)) {
            throw std::invalid_argument("f2imb weights must be positive");
        }
        sq += v[n] * alpha[n] * alpha[n];
    }
    return -w * variance(alpha) - (1.0 - w) * sq;
}

void FairnessSpec::validate(int uav_count) const {
    if (kind != FairnessKind::F1) {
        check_weight(w);
    }
    if (kind == FairnessKind::F2Imb) {
        if (static_cast<int>(v.size()) != uav_count) {
            throw std::invalid_argument("f2imb needs " + std::to_string(uav_count) + " weights, got " +
                                        std::to_string(v.size()));
        }
        for (double x : v) {
            if (!(x > 0.0)) {
                throw std::invalid_argument("f2imb weights must be positive");
            }
        }
    }
}

double FairnessSpec::score(std::span<const double> alpha) const {
    switch (kind) {
    case FairnessKind::F1:
        return f1(alpha);
    case FairnessKind::F2:
        return f2(alpha, w);
    case FairnessKind::F2Imb:
        return f2_imb(alpha, w, v);
    }
    return 0.0;
}

} // namespace fairfly
