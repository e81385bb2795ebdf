#include "stats.hpp"

#include <cmath>
#include <stdexcept>

namespace fpp {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

Estimate mean_estimate(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean_estimate: empty sample");
    Estimate e;
    e.replicas = xs.size();
    double sum = 0;
    for (double x : xs) sum += x;
    e.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) {
            const double d = x - e.mean;
            ss += d * d;
        }
        const double var = ss / static_cast<double>(xs.size() - 1);
        e.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return e;
}

double Proportion::point() const {
    if (trials == 0) throw std::invalid_argument("proportion with zero trials");
    return static_cast<double>(successes) / static_cast<double>(trials);
}

namespace {

std::pair<double, double> wilson(std::uint64_t k, std::uint64_t n) {
    const double z = kZ95;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace

double Proportion::lo95() const { return wilson(successes, trials).first; }
double Proportion::hi95() const { return wilson(successes, trials).second; }

double Proportion::stderr_() const {
    const double p = point();
    return std::sqrt(p * (1 - p) / static_cast<double>(trials));
}

Estimate fit_exponent(std::span<const FitPoint> curve, std::size_t lo, std::size_t hi) {
    if (lo > hi || hi >= curve.size()) throw std::invalid_argument("fit window out of range");
    if (hi - lo + 1 < 3) throw std::invalid_argument("fit window needs at least 3 points");
    double sw = 0, swx = 0, swy = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const auto& pt = curve[i];
        if (!(pt.p > 0.0 && pt.p < 1.0))
            throw std::invalid_argument("fit window touches probability 0 or 1");
        if (!(pt.x > 0.0)) throw std::invalid_argument("fit abscissa must be positive");
    }
    // var(log p-hat) ~= (1-p) / (n p) by the delta method.
    auto weight = [](const FitPoint& pt) { return pt.trials * pt.p / (1.0 - pt.p); };
    for (std::size_t i = lo; i <= hi; ++i) {
        const double w = weight(curve[i]);
        sw += w;
        swx += w * std::log(curve[i].x);
        swy += w * (-std::log(curve[i].p));
    }
    const double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double w = weight(curve[i]);
        const double dx = std::log(curve[i].x) - xbar;
        sxx += w * dx * dx;
        sxy += w * dx * (-std::log(curve[i].p) - ybar);
    }
    if (sxx <= 0) throw std::invalid_argument("degenerate abscissas in fit window");
    Estimate e;
    e.mean = sxy / sxx;
    e.stderr_ = std::sqrt(1.0 / sxx);
    e.replicas = hi - lo + 1;
    return e;
}

}  // namespace fpp
