#include "supertomo/tv.hpp"

#include <cmath>
#include <string>

#include "supertomo/error.hpp"

namespace supertomo {

namespace {

constexpr std::uint64_t kMaxTrials = 1'000'000;

}  // namespace

void SuperiorizationParams::validate() const {
    if (K < 1) throw Error("superiorization: K must be >= 1, got " + std::to_string(K));
    if (!(a > 0.0 && a < 1.0)) throw Error("superiorization: a must lie in (0,1), got " + std::to_string(a));
    if (!(gamma > 0.0)) throw Error("superiorization: gamma must be positive, got " + std::to_string(gamma));
}

double tv_value(const Image& y) {
    if (y.rows < 2 || y.cols < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < y.rows; ++i) {
        for (std::size_t j = 0; j + 1 < y.cols; ++j) {
            const double v = y.at(i, j);
            const double d1 = v - y.at(i + 1, j);
            const double d2 = v - y.at(i, j + 1);
            acc += std::sqrt(d1 * d1 + d2 * d2);
        }
    }
    return acc;
}

Vector tv_descent_direction(const Image& y) {
    Vector grad(y.size(), 0.0);
    if (y.rows < 2 || y.cols < 2) return grad;
    std::vector<char> undefined(y.size(), 0);
    const std::size_t c = y.cols;
    for (std::size_t i = 0; i + 1 < y.rows; ++i) {
        for (std::size_t j = 0; j + 1 < y.cols; ++j) {
            const std::size_t p = i * c + j;
            const std::size_t below = p + c;
            const std::size_t right = p + 1;
            const double d1 = y.data[p] - y.data[below];
            const double d2 = y.data[p] - y.data[right];
            const double arg = d1 * d1 + d2 * d2;
            if (arg > 0.0) {
                const double inv = 1.0 / std::sqrt(arg);
                grad[p] += (d1 + d2) * inv;
                grad[below] -= d1 * inv;
                grad[right] -= d2 * inv;
            } else {
                undefined[p] = undefined[below] = undefined[right] = 1;
            }
        }
    }
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] = undefined[k] ? 0.0 : -grad[k];
    return grad;
}

Vector nonascending_vector(const Image& y) {
    Vector t = tv_descent_direction(y);
    const double n = norm(t);
    if (n == 0.0) return t;
    for (auto& v : t) v /= n;
    return t;
}

PerturbationResult s_tv(const Image& x, SuperiorizationState state, const SuperiorizationParams& params) {
    params.validate();
    Image y = x;
    Image trial(x.rows, x.cols);
    double tv_y = tv_value(y);
    for (int i = 0; i < params.K; ++i) {
        const Vector t = nonascending_vector(y);
        double tv_trial = 0.0;
        std::uint64_t trials = 0;
        do {
            if (++trials > kMaxTrials) {
                throw Error("s_tv: no nonascending step found after " + std::to_string(kMaxTrials) + " trials");
            }
            const double step = params.gamma * std::pow(params.a, static_cast<double>(state.ell));
            for (std::size_t k = 0; k < y.size(); ++k) trial.data[k] = y.data[k] + step * t[k];
            ++state.ell;
            tv_trial = tv_value(trial);
        } while (!(tv_trial <= tv_y));
        std::swap(y.data, trial.data);
        tv_y = tv_trial;
    }
    return {subtract(y.data, x.data), state};
}

}  // namespace supertomo
