#include "tkt/evaluate.hpp"

#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "tkt/miner.hpp"
#include "tkt/rng.hpp"

namespace tkt {

double harmonic_mean(double sensitivity, double specificity) {
    const double sum = sensitivity + specificity;
    if (sum <= 0) return 0;
    return 2.0 * sensitivity * specificity / sum;
}

namespace {

struct RunTotals {
    double sensitivity_sum = 0;
    std::size_t sensitivity_runs = 0;
    double specificity_sum = 0;
    std::size_t specificity_runs = 0;
    double states_sum = 0;
    double transitions_sum = 0;
    double clocks_sum = 0;
    double events_sum = 0;
    double ms_sum = 0;
    std::size_t models = 0;
};

EvalRow finish_row(const std::string& config_id, double fraction, const RunTotals& t,
                   bool has_specificity) {
    EvalRow row;
    row.config_id = config_id;
    row.fraction = fraction;
    row.sensitivity = t.sensitivity_runs ? t.sensitivity_sum / t.sensitivity_runs : 0;
    row.has_specificity = has_specificity;
    row.specificity = t.specificity_runs ? t.specificity_sum / t.specificity_runs : 0;
    row.harmonic_mean = has_specificity ? harmonic_mean(row.sensitivity, row.specificity) : 0;
    row.mean_states = t.models ? t.states_sum / t.models : 0;
    row.mean_transitions = t.models ? t.transitions_sum / t.models : 0;
    row.mean_clocks = t.models ? t.clocks_sum / t.models : 0;
    row.mean_events = t.models ? t.events_sum / t.models : 0;
    row.mean_inference_ms = t.models ? t.ms_sum / t.models : 0;
    return row;
}

std::vector<std::vector<std::size_t>> partition_folds(std::size_t n, std::uint32_t folds,
                                                      Rng& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> out(folds);
    const std::size_t base = n / folds;
    const std::size_t extra = n % folds;
    std::size_t cursor = 0;
    for (std::uint32_t f = 0; f < folds; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        out[f].assign(order.begin() + cursor, order.begin() + cursor + size);
        cursor += size;
    }
    return out;
}

void run_folds(const std::vector<TimedTrace>& valid, const std::vector<TimedTrace>& invalid,
               const PolicyConfig& config, const EvalOptions& options,
               RunTotals& totals) {
    for (std::uint32_t rep = 0; rep < options.repetitions; ++rep) {
        Rng rng(splitmix64(options.seed ^ splitmix64(rep)));
        const auto folds = partition_folds(valid.size(), options.folds, rng);
        for (std::uint32_t f = 0; f < options.folds; ++f) {
            std::vector<TimedTrace> training;
            training.reserve(valid.size());
            for (std::uint32_t g = 0; g < options.folds; ++g) {
                if (g == f) continue;
                for (std::size_t idx : folds[g]) training.push_back(valid[idx]);
            }
            if (training.empty() || folds[f].empty()) continue;

            MinerConfig miner_config{options.k, config.absolute_guards};
            MiningStats stats;
            const TimedAutomaton model = mine(training, miner_config, config, &stats);

            std::size_t accepted = 0;
            for (std::size_t idx : folds[f])
                if (accepts(model, valid[idx]).accepted) ++accepted;
            totals.sensitivity_sum +=
                static_cast<double>(accepted) / static_cast<double>(folds[f].size());
            ++totals.sensitivity_runs;

            if (!invalid.empty()) {
                std::size_t rejected = 0;
                for (const TimedTrace& trace : invalid)
                    if (!accepts(model, trace).accepted) ++rejected;
                totals.specificity_sum +=
                    static_cast<double>(rejected) / static_cast<double>(invalid.size());
                ++totals.specificity_runs;
            }

            totals.states_sum += model.num_states;
            totals.transitions_sum += static_cast<double>(model.transitions.size());
            totals.clocks_sum += static_cast<double>(model.clocks.size());
            totals.events_sum += static_cast<double>(stats.events);
            totals.ms_sum += stats.elapsed_ms;
            ++totals.models;
        }
    }
}

} // namespace

std::vector<EvalRow> kfold_evaluate(const std::vector<TimedTrace>& valid,
                                    const std::vector<TimedTrace>& invalid,
                                    const std::vector<PolicyConfig>& configs,
                                    const EvalOptions& options) {
    if (options.folds < 2)
        throw std::invalid_argument("kfold_evaluate: need at least 2 folds");
    if (valid.size() < options.folds)
        throw std::invalid_argument("kfold_evaluate: fewer valid traces than folds");
    if (options.repetitions == 0)
        throw std::invalid_argument("kfold_evaluate: need at least 1 repetition");

    std::vector<EvalRow> rows;
    for (const PolicyConfig& config : configs) {
        RunTotals totals;
        run_folds(valid, invalid, config, options, totals);
        rows.push_back(finish_row(config.config_id.empty() ? config.describe() : config.config_id,
                                  1.0, totals, !invalid.empty()));
    }
    return rows;
}

std::vector<EvalRow> subset_study(const std::vector<TimedTrace>& valid,
                                  const std::vector<TimedTrace>& invalid,
                                  const std::vector<PolicyConfig>& configs,
                                  const std::vector<double>& fractions,
                                  std::uint32_t extraction_reps,
                                  const EvalOptions& options) {
    if (extraction_reps == 0)
        throw std::invalid_argument("subset_study: need at least 1 extraction");
    std::vector<EvalRow> rows;
    for (const PolicyConfig& config : configs) {
        for (double fraction : fractions) {
            if (fraction <= 0 || fraction > 1.0)
                throw std::invalid_argument("subset_study: fraction out of (0, 1]");
            const std::size_t take =
                fraction >= 1.0 ? valid.size()
                                : static_cast<std::size_t>(fraction * static_cast<double>(valid.size()));
            if (take < options.folds)
                throw std::invalid_argument("subset_study: fraction yields fewer traces than folds");

            RunTotals totals;
            for (std::uint32_t draw = 0; draw < extraction_reps; ++draw) {
                EvalOptions sub_options = options;
                sub_options.seed = draw == 0 ? options.seed
                                             : splitmix64(options.seed ^ (0xA5A5A5A5ULL + draw));
                std::vector<TimedTrace> subset;
                if (fraction >= 1.0) {
                    subset = valid;
                } else {
                    std::vector<std::size_t> order(valid.size());
                    std::iota(order.begin(), order.end(), 0);
                    Rng rng(splitmix64(sub_options.seed ^ 0xC0FFEEULL));
                    rng.shuffle(order);
                    subset.reserve(take);
                    for (std::size_t i = 0; i < take; ++i) subset.push_back(valid[order[i]]);
                }
                run_folds(subset, invalid, config, sub_options, totals);
            }
            rows.push_back(finish_row(
                config.config_id.empty() ? config.describe() : config.config_id, fraction,
                totals, !invalid.empty()));
        }
    }
    return rows;
}

namespace {

std::string format_double(double value, int precision) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", precision, value);
    return buffer;
}

} // namespace

std::string report_tsv(const std::vector<EvalRow>& rows) {
    std::string out =
        "config_id\tfraction\tsensitivity\tspecificity\tharmonic_mean\t"
        "mean_states\tmean_transitions\tmean_clocks\tmean_events\tmean_inference_ms\n";
    for (const EvalRow& row : rows) {
        out += row.config_id;
        out += '\t';
        out += format_double(row.fraction, 4);
        out += '\t';
        out += format_double(row.sensitivity, 6);
        out += '\t';
        out += row.has_specificity ? format_double(row.specificity, 6) : "na";
        out += '\t';
        out += row.has_specificity ? format_double(row.harmonic_mean, 6) : "na";
        out += '\t';
        out += format_double(row.mean_states, 2);
        out += '\t';
        out += format_double(row.mean_transitions, 2);
        out += '\t';
        out += format_double(row.mean_clocks, 2);
        out += '\t';
        out += format_double(row.mean_events, 2);
        out += '\t';
        out += format_double(row.mean_inference_ms, 3);
        out += '\n';
    }
    return out;
}

std::string report_pretty(const std::vector<EvalRow>& rows) {
    std::string out;
    char buffer[256];
    std::snprintf(buffer, sizeof(buffer), "%-10s %9s %12s %12s %10s %8s %7s %7s %10s %9s\n",
                  "config", "fraction", "sensitivity", "specificity", "harmonic",
                  "states", "trans", "clocks", "events", "ms");
    out += buffer;
    for (const EvalRow& row : rows) {
        std::snprintf(buffer, sizeof(buffer),
                      "%-10s %9.4f %12.4f %12s %10s %8.1f %7.1f %7.1f %10.1f %9.3f\n",
                      row.config_id.c_str(), row.fraction, row.sensitivity,
                      row.has_specificity ? format_double(row.specificity, 4).c_str() : "na",
                      row.has_specificity ? format_double(row.harmonic_mean, 4).c_str() : "na",
                      row.mean_states, row.mean_transitions, row.mean_clocks,
                      row.mean_events, row.mean_inference_ms);
        out += buffer;
    }
    return out;
}

} // namespace tkt
