#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tkt/guard_policy.hpp"
#include "tkt/trace.hpp"

namespace tkt {

/// One report row: metrics for a configuration at a training fraction,
/// averaged over folds, repetitions and (for subset studies) extraction
/// draws. Specificity and the harmonic mean are undefined when no invalid
/// traces were supplied.
struct EvalRow {
    std::string config_id;
    double fraction = 1.0;
    double sensitivity = 0;
    double specificity = 0;
    double harmonic_mean = 0;
    bool has_specificity = false;
    double mean_states = 0;
    double mean_transitions = 0;
    double mean_clocks = 0;
    double mean_events = 0;        // events processed per training set
    double mean_inference_ms = 0;  // pipeline wall clock per mined model
};

struct EvalOptions {
    std::uint32_t folds = 10;
    std::uint32_t repetitions = 5;
    std::uint32_t k = 2;
    std::uint64_t seed = 0;
};

double harmonic_mean(double sensitivity, double specificity);

/// k-fold cross validation: per configuration and repetition, shuffles the
/// valid traces into folds (remainder one-per-fold to the first folds),
/// mines on folds-minus-one, scores sensitivity on the held-out fold and
/// specificity on every invalid trace. Results are averaged across folds
/// and repetitions.
std::vector<EvalRow> kfold_evaluate(const std::vector<TimedTrace>& valid,
                                    const std::vector<TimedTrace>& invalid,
                                    const std::vector<PolicyConfig>& configs,
                                    const EvalOptions& options);

/// Repeats kfold_evaluate on random subsets of the valid traces, one row
/// per (config, fraction), averaged over extraction_reps draws. A fraction
/// of 1.0 uses the full set unshuffled, so with extraction_reps = 1 it is
/// exactly kfold_evaluate.
std::vector<EvalRow> subset_study(const std::vector<TimedTrace>& valid,
                                  const std::vector<TimedTrace>& invalid,
                                  const std::vector<PolicyConfig>& configs,
                                  const std::vector<double>& fractions,
                                  std::uint32_t extraction_reps,
                                  const EvalOptions& options);

/// Tab-separated table, one row per (config, fraction). The elapsed-time
/// column is last so consumers can strip it when diffing runs.
std::string report_tsv(const std::vector<EvalRow>& rows);

/// Human-readable summary table.
std::string report_pretty(const std::vector<EvalRow>& rows);

} // namespace tkt
