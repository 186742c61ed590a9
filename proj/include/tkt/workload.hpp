#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tkt/ratio.hpp"
#include "tkt/trace.hpp"

namespace tkt {

struct DurationDist {
    enum class Kind : std::uint8_t { Uniform, Normal };
    Kind kind = Kind::Uniform;
    std::uint64_t lo = 0; // uniform, inclusive
    std::uint64_t hi = 0;
    double mean = 0;      // normal; draws clamp at 0
    double stddev = 0;
};

struct OperationSpec {
    std::string label;
    std::vector<std::string> children; // emitted in order, each repeated
    std::uint32_t rep_min = 1;         // repetitions when invoked as a child
    std::uint32_t rep_max = 1;
    DurationDist duration;             // self-time, excludes children
};

/// Describes a synthetic workload: which operations exist, how they nest,
/// how often children repeat, and how long each operation's own work
/// takes. Traces draw one root operation each; an operation's total span
/// is its self-time plus its children's spans.
struct WorkloadSpec {
    std::vector<OperationSpec> operations;
    std::vector<std::string> roots;
    std::uint64_t seed = 0;

    const OperationSpec& find(const std::string& label) const;

    /// Throws on undefined/duplicate labels, empty roots, bad
    /// distributions, or a cyclic nesting graph.
    void check() const;
};

/// Loads a workload from its JSON form (see README for the schema).
WorkloadSpec load_workload(const std::string& json_text);

/// Generates n well-formed traces, deterministically from spec.seed.
std::vector<TimedTrace> generate_corpus(const WorkloadSpec& spec, std::size_t n);

struct AnomalySpec {
    enum class Kind : std::uint8_t { Overload, SlowOp, Reorder };
    Kind kind = Kind::Overload;
    Ratio factor = Ratio(2); // Overload / SlowOp, must be > 1
    std::string label;       // SlowOp target
};

AnomalySpec load_anomaly(const std::string& json_text);

/// Produces a well-formed but anomalous variant of the trace.
/// Overload scales every operation's self-time by factor; SlowOp scales
/// only the named operation's; Reorder swaps the labels of the first two
/// adjacent siblings that differ. Timestamps are rebuilt consistently.
TimedTrace inject_anomaly(const TimedTrace& trace, const AnomalySpec& anomaly);

} // namespace tkt
