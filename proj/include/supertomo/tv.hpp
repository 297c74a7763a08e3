#pragma once

#include <cstdint>

#include "supertomo/linops.hpp"

namespace supertomo {

struct SuperiorizationParams {
    int K = 40;              // nonascending steps per call
    double a = 1.0 - 1e-5;   // step-length diminishing factor, in (0, 1)
    double gamma = 1e-2;     // starting step length

    void validate() const;
};

/// The step-length exponent threaded through successive perturbation calls.
struct SuperiorizationState {
    std::uint64_t ell = 0;
};

struct PerturbationResult {
    Vector s;
    SuperiorizationState state;
};

/// Sum over interior pixels of the forward-difference gradient magnitude; 0 when the
/// image has a single row or column.
[[nodiscard]] double tv_value(const Image& y);

/// Normalized negative TV gradient. Components whose partial derivative is undefined
/// (some square root touching them has a zero argument) are set to zero. Returns the zero
/// vector when nothing remains.
[[nodiscard]] Vector nonascending_vector(const Image& y);

/// The unnormalized vector t-bar behind nonascending_vector.
[[nodiscard]] Vector tv_descent_direction(const Image& y);

/// Generates the superiorization step s with TV(x + s) <= TV(x): K nonascending steps, each
/// backtracking gamma * a^ell (ell incremented per trial) until TV does not increase.
[[nodiscard]] PerturbationResult s_tv(const Image& x, SuperiorizationState state, const SuperiorizationParams& params);

}  // namespace supertomo
