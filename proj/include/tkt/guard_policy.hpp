#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tkt/automaton.hpp"
#include "tkt/ratio.hpp"

namespace tkt {

enum class GammaLevel : std::uint8_t { G95, G99 };

/// Two-sided normal quantile pinned per level: 1.959964 for 0.95,
/// 2.575829 for 0.99.
double z_score(GammaLevel level);

/// Selects how accumulated duration samples become interval guards.
struct PolicyConfig {
    enum class Kind : std::uint8_t { MinMaxEpsilon, GammaConfidence };

    Kind kind = Kind::MinMaxEpsilon;
    Ratio epsilon;                      // min-max policy, in [0, 1]
    GammaLevel gamma = GammaLevel::G95; // gamma policy
    bool absolute_guards = true;
    std::string config_id;              // optional M1..M16 / G1..G4 label

    static PolicyConfig min_max(Ratio epsilon, bool absolute_guards);
    static PolicyConfig gamma_confidence(GammaLevel level, bool absolute_guards);

    std::string describe() const;
};

/// The built-in configuration matrix: M1..M16 cover the min-max policy at
/// epsilon 0.05/0.10/0.15/0.20/0.25/0.50/0.75/1.00 (odd ids with absolute
/// guards, even ids without); G1..G4 cover gamma 0.95/0.99 the same way.
PolicyConfig config_from_id(const std::string& id);
const std::vector<std::string>& all_config_ids();

/// Sample multiset for one clock on one transition.
struct ClockSamples {
    ClockId clock;
    std::vector<std::uint64_t> values;
};

/// Turns a sample multiset into an interval guard, or nothing when only a
/// single observation exists. Min-max: [(1-eps)*min, (1+eps)*max]. Gamma:
/// mean +/- z*s (sample std dev, n-1), widened to contain the observed
/// min/max. Endpoints are rounded outward to denominator 10^6 and the lower
/// bound is clamped at 0.
std::optional<Interval> generate_guard(const ClockSamples& samples,
                                       const PolicyConfig& config);

/// Replaces every transition's equality groups with interval guards.
/// Absolute-clock samples are discarded without generating a guard when
/// absolute_guards is off. States, transitions and resets are untouched.
/// Throws if the automaton already carries interval guards.
TimedAutomaton apply_policy(TimedAutomaton automaton, const PolicyConfig& config);

} // namespace tkt
