#pragma once

#include <array>

#include "castsim/arm.hpp"
#include "castsim/matching.hpp"
#include "castsim/rng.hpp"
#include "castsim/string_model.hpp"

namespace castsim {

// Internal integration step, stable for the stiffest in-range spring under
// explicit Euler; command samples stay on the 5 ms grid.
constexpr double kDefaultDt = 5e-5;

// Per-parameter search bounds, ordered like StringParams:
// k_s, c_s, k_h, c_h, c_c1, c_c2, k_ph, c_ph.
struct ParamRange {
    std::array<std::array<double, 2>, 8> bounds{{{9.0e3, 9.0e5},
                                                 {0.13, 1.3e3},
                                                 {8.0e-3, 4.0e2},
                                                 {3.0e-7, 0.67},
                                                 {1.0e-4, 10.0},
                                                 {1.0e-4, 10.0},
                                                 {1.0e-3, 5.0},
                                                 {1.1e-6, 0.37}}};

    bool valid() const {
        for (const auto& b : bounds)
            if (!(b[0] > 0.0) || !(b[0] < b[1])) return false;
        return true;
    }
};

// Exponent-space search state; the sampling half-width is (chi_0/M) * beta^m.
// m counts parameter changes within the current estimation session (each
// session anneals afresh from the (chi_0/M)-wide range); M counts executed
// manipulations and is advanced by the manipulation loop.
struct SearchState {
    std::array<double, 8> chi_best{};  // all minima before the first estimate
    long long parameter_changes = 0;   // m
    int manipulations = 1;             // M
    double chi_0 = 0.6;
    double beta = 0.995;
    double best_rate = 0.0;
};

struct EstimationBudget {
    int samples = 2000;  // candidates per round, incumbent included
};

// chi = chi_best + (chi_0/M) * beta^m * RAND(-1,1), clamped to [0,1].
double sample_exponent(double chi_best, double chi_0, int manipulations,
                       double beta, long long m, Rng& rng);

// P = P_min * (P_max/P_min)^chi.
double exponent_to_value(double chi, const std::array<double, 2>& range);
double value_to_exponent(double value, const std::array<double, 2>& range);

StringParams params_from_exponents(const std::array<double, 8>& chi,
                                   const ParamRange& ranges);

// Draws all eight exponents at the state's current search radius.
std::array<double, 8> sample_candidate_exponents(const SearchState& state,
                                                 Rng& rng);
StringParams sample_candidate(const SearchState& state, const ParamRange& ranges,
                              Rng& rng);

struct EstimationResult {
    StringParams params;
    MatchReport report;
    SearchState state;
    double incumbent_rate = 0.0;  // score of the pre-round parameter set
};

// One estimation session: evaluates budget.samples candidates (candidate 0
// is the incumbent chi_best, the rest are drawn), scoring each by rolling
// out the executed hand trajectory from the canonical hanging state and
// matching against the observed series. The session anneals: m restarts at
// zero and grows per drawn candidate, sweeping the radius from chi_0/M down
// to a fine polish, while every improvement re-centers chi_best on the
// retained combination. M counts manipulations and belongs to the caller;
// advance it once per executed manipulation.
// Candidates are drawn in fixed-size batches before parallel evaluation, so
// the RNG stream and the result are independent of the worker count; the
// anchor is frozen within a batch.
// Throws EstimationFailedError if every candidate rollout diverges.
EstimationResult estimate(const FrameSeries& observed,
                          const HandTrajectory& hand_trajectory,
                          const StringGeometry& geometry, SearchState state,
                          const ParamRange& ranges, const EstimationBudget& budget,
                          const CameraModel& camera, const MatchConfig& match_config,
                          Rng& rng, double dt = kDefaultDt,
                          const Vec2& gravity = kStandardGravity);

}  // namespace castsim
