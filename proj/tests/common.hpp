#pragma once

// Shared fixtures and small independent oracles for the test binaries.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cavcool/config.hpp"

namespace testing {

inline cavcool::RunConfig config(const std::string& name, const std::vector<std::string>& overrides = {}) {
    return cavcool::load_config(name, overrides);
}

// Models are expensive to build, keep one per config/override combination.
inline const cavcool::CoolingModel& model_for(const std::string& name, const std::vector<std::string>& overrides = {}) {
    static std::map<std::string, std::unique_ptr<cavcool::CoolingModel>> cache;
    std::string key = name;
    for (const auto& o : overrides) key += "|" + o;
    auto& slot = cache[key];
    if (!slot) slot = std::make_unique<cavcool::CoolingModel>(cavcool::build_model(config(name, overrides)));
    return *slot;
}

// exp(A) by scaling and squaring of a plain Taylor series.
inline Eigen::MatrixXd taylor_exp(const Eigen::MatrixXd& a) {
    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Eigen::MatrixXd s = a / std::ldexp(1.0, squarings);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k < 30; ++k) {
        term = term * s / k;
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

// Golden-section minimum of a unimodal function on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

inline double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace testing
