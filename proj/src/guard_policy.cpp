#include "tkt/guard_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tkt {

double z_score(GammaLevel level) {
    return level == GammaLevel::G95 ? 1.959964 : 2.575829;
}

PolicyConfig PolicyConfig::min_max(Ratio epsilon, bool absolute_guards) {
    if (epsilon.is_negative() || epsilon > Ratio(1))
        throw std::invalid_argument("min-max policy: epsilon must be in [0, 1]");
    PolicyConfig config;
    config.kind = Kind::MinMaxEpsilon;
    config.epsilon = epsilon;
    config.absolute_guards = absolute_guards;
    return config;
}

PolicyConfig PolicyConfig::gamma_confidence(GammaLevel level, bool absolute_guards) {
    PolicyConfig config;
    config.kind = Kind::GammaConfidence;
    config.gamma = level;
    config.absolute_guards = absolute_guards;
    return config;
}

std::string PolicyConfig::describe() const {
    std::string out = kind == Kind::MinMaxEpsilon
                          ? "min-max eps=" + epsilon.to_decimal()
                          : std::string("gamma=") + (gamma == GammaLevel::G95 ? "0.95" : "0.99");
    out += absolute_guards ? ", absolute guards on" : ", absolute guards off";
    if (!config_id.empty()) out = config_id + " (" + out + ")";
    return out;
}

namespace {

const char* kMinMaxEpsilons[] = {"0.05", "0.10", "0.15", "0.20",
                                 "0.25", "0.50", "0.75", "1.00"};

} // namespace

const std::vector<std::string>& all_config_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> out;
        for (int i = 1; i <= 16; ++i) out.push_back("M" + std::to_string(i));
        for (int i = 1; i <= 4; ++i) out.push_back("G" + std::to_string(i));
        return out;
    }();
    return ids;
}

PolicyConfig config_from_id(const std::string& id) {
    if (id.size() >= 2 && (id[0] == 'M' || id[0] == 'G')) {
        int n = 0;
        bool numeric = true;
        for (std::size_t i = 1; i < id.size(); ++i) {
            if (id[i] < '0' || id[i] > '9') { numeric = false; break; }
            n = n * 10 + (id[i] - '0');
        }
        if (numeric && id[0] == 'M' && n >= 1 && n <= 16) {
            const bool absolute = n % 2 == 1;
            PolicyConfig config = PolicyConfig::min_max(
                Ratio::from_decimal(kMinMaxEpsilons[(n - 1) / 2]), absolute);
            config.config_id = id;
            return config;
        }
        if (numeric && id[0] == 'G' && n >= 1 && n <= 4) {
            const bool absolute = n % 2 == 1;
            PolicyConfig config = PolicyConfig::gamma_confidence(
                n <= 2 ? GammaLevel::G95 : GammaLevel::G99, absolute);
            config.config_id = id;
            return config;
        }
    }
    throw std::invalid_argument("unknown configuration id '" + id + "'");
}

std::optional<Interval> generate_guard(const ClockSamples& samples,
                                       const PolicyConfig& config) {
    const auto& values = samples.values;
    if (values.empty())
        throw std::invalid_argument("generate_guard: empty sample set");
    if (values.size() == 1) return std::nullopt;

    const std::uint64_t min_v = *std::min_element(values.begin(), values.end());
    const std::uint64_t max_v = *std::max_element(values.begin(), values.end());

    Interval interval;
    if (config.kind == PolicyConfig::Kind::MinMaxEpsilon) {
        interval.lo = (Ratio(1) - config.epsilon) * Ratio::from_u64(min_v);
        interval.hi = (Ratio(1) + config.epsilon) * Ratio::from_u64(max_v);
    } else {
        const double n = static_cast<double>(values.size());
        double sum = 0;
        for (std::uint64_t v : values) sum += static_cast<double>(v);
        const double mean = sum / n;
        double ss = 0;
        for (std::uint64_t v : values) {
            const double d = static_cast<double>(v) - mean;
            ss += d * d;
        }
        const double stddev = std::sqrt(ss / (n - 1.0));
        const double z = z_score(config.gamma);
        interval.lo = Ratio::floor_to_micro(mean - z * stddev);
        interval.hi = Ratio::ceil_to_micro(mean + z * stddev);
        if (interval.lo > Ratio::from_u64(min_v)) interval.lo = Ratio::from_u64(min_v);
        if (interval.hi < Ratio::from_u64(max_v)) interval.hi = Ratio::from_u64(max_v);
    }

    // Canonical denominator and outward rounding keep sample containment.
    if (interval.lo.den() != 1 && Ratio::kMicro % interval.lo.den() != 0)
        interval.lo = Ratio::floor_to_micro(interval.lo.to_double());
    if (interval.hi.den() != 1 && Ratio::kMicro % interval.hi.den() != 0)
        interval.hi = Ratio::ceil_to_micro(interval.hi.to_double());
    if (interval.lo.is_negative()) interval.lo = Ratio(0);
    return interval;
}

TimedAutomaton apply_policy(TimedAutomaton automaton, const PolicyConfig& config) {
    for (const Transition& tr : automaton.transitions)
        if (!tr.intervals.empty())
            throw std::logic_error("apply_policy: automaton already carries interval guards");

    for (Transition& tr : automaton.transitions) {
        const auto pooled = pooled_samples(tr);
        tr.groups.clear();
        for (const auto& [clock, values] : pooled) {
            if (clock.is_absolute() && !config.absolute_guards) continue;
            const auto guard = generate_guard(ClockSamples{clock, values}, config);
            if (guard) tr.intervals[clock] = *guard;
        }
    }
    automaton.canonicalize();
    return automaton;
}

} // namespace tkt
