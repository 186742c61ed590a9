// Shared test fixtures: the order-processing example corpus, independent
// oracles the checker is validated against, and random generators for
// property tests. The oracles must stay independent of the library's
// acceptance path; they are deliberately naive.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tkt/automaton.hpp"
#include "tkt/miner.hpp"
#include "tkt/rng.hpp"
#include "tkt/trace.hpp"
#include "tkt/workload.hpp"

namespace tkt_test {

// Two order-processing traces. Trace 1: a web order followed by two
// processItem/updateStock rounds, shipping and notification; trace 2: a
// phone order with one round. Raw timestamps use large epoch-style
// offsets so normalization is exercised (98483940 -> 0, 98483943 -> 3).
inline const char* kGoldenCorpus =
    "# order processing, web + phone\n"
    "B processWebOrder 98483940\n"
    "E processWebOrder 98483943\n"
    "B processItem 98483944\n"
    "E processItem 98483949\n"
    "B updateStock 98483949\n"
    "E updateStock 98483951\n"
    "B processItem 98483952\n"
    "E processItem 98483958\n"
    "B updateStock 98483958\n"
    "E updateStock 98483959\n"
    "B shipOrder 98483959\n"
    "E shipOrder 98483970\n"
    "B notifyCustomer 98483971\n"
    "E notifyCustomer 98483972\n"
    "\n"
    "B processPhoneOrder 98490000\n"
    "E processPhoneOrder 98490002\n"
    "B processItem 98490003\n"
    "E processItem 98490008\n"
    "B updateStock 98490008\n"
    "E updateStock 98490010\n"
    "B shipOrder 98490016\n"
    "E shipOrder 98490023\n"
    "B notifyCustomer 98490024\n"
    "E notifyCustomer 98490025\n";

inline std::vector<tkt::TimedTrace> golden_corpus() {
    return tkt::parse_corpus(kGoldenCorpus);
}

// Untimed acceptance by exhaustive path enumeration, ignoring every guard
// and reset. No memoization: this is the brute-force reference.
inline bool untimed_bruteforce_accepts(const tkt::TimedAutomaton& automaton,
                                       const tkt::TimedTrace& trace) {
    struct Walker {
        const tkt::TimedAutomaton& automaton;
        const tkt::TimedTrace& trace;
        bool walk(tkt::StateId state, std::size_t event) const {
            if (event == trace.size()) return true;
            for (const tkt::Transition& tr : automaton.transitions) {
                if (tr.source != state) continue;
                if (tr.operation != trace.events[event].operation) continue;
                if (tr.type != trace.events[event].type) continue;
                if (walk(tr.target, event + 1)) return true;
            }
            return false;
        }
    };
    return Walker{automaton, trace}.walk(automaton.initial, 0);
}

// Single-path simulator for deterministic automata (at most one transition
// per (state, operation, type)). Guards are evaluated against explicit
// clock valuations; clocks never reset are unconstrained.
inline bool deterministic_simulate(const tkt::TimedAutomaton& automaton,
                                   const tkt::TimedTrace& trace) {
    const tkt::TimedTrace normalized = tkt::normalize(trace);
    std::map<tkt::ClockId, std::uint64_t> reset_at;
    tkt::StateId state = automaton.initial;
    for (const tkt::TimedEvent& ev : normalized.events) {
        const tkt::Transition* match = nullptr;
        for (const tkt::Transition& tr : automaton.transitions) {
            if (tr.source == state && tr.operation == ev.operation && tr.type == ev.type) {
                match = &tr;
                break;
            }
        }
        if (!match) return false;
        for (const auto& [clock, interval] : match->intervals) {
            auto it = reset_at.find(clock);
            if (it == reset_at.end()) continue;
            if (!interval.contains(ev.timestamp - it->second)) return false;
        }
        if (!match->groups.empty()) {
            bool any = false;
            for (const auto& group : match->groups) {
                bool ok = true;
                for (const auto& [clock, expected] : group) {
                    auto it = reset_at.find(clock);
                    if (it == reset_at.end()) continue;
                    if (ev.timestamp - it->second != expected) { ok = false; break; }
                }
                if (ok) { any = true; break; }
            }
            if (!any) return false;
        }
        for (const tkt::ClockId& c : match->resets) reset_at[c] = ev.timestamp;
        state = match->target;
    }
    return true;
}

// Random well-formed trace: nested begin/end structure over a small label
// pool with non-decreasing integer timestamps.
inline tkt::TimedTrace random_trace(tkt::Rng& rng, std::size_t max_ops = 6,
                                    const std::vector<std::string>& labels = {"a", "b", "c"}) {
    struct Builder {
        tkt::Rng& rng;
        const std::vector<std::string>& labels;
        std::vector<tkt::TimedEvent> events;
        std::uint64_t clock = 0;
        std::size_t budget;

        void emit(std::size_t depth) {
            if (budget == 0) return;
            --budget;
            const std::string& label =
                labels[static_cast<std::size_t>(rng.uniform_u64(0, labels.size() - 1))];
            events.push_back({tkt::EventType::Begin, label, clock});
            clock += rng.uniform_u64(0, 5);
            if (depth < 3) {
                const std::uint64_t children = rng.uniform_u64(0, 2);
                for (std::uint64_t i = 0; i < children && budget > 0; ++i) emit(depth + 1);
            }
            clock += rng.uniform_u64(0, 5);
            events.push_back({tkt::EventType::End, label, clock});
        }
    };
    Builder builder{rng, labels, {}, 0, 1 + static_cast<std::size_t>(rng.uniform_u64(0, max_ops - 1))};
    while (builder.budget > 0) builder.emit(0);
    tkt::TimedTrace trace;
    trace.events = std::move(builder.events);
    // Resolve pairing with the same per-label stack rule as the parser.
    trace.pairing.assign(trace.events.size(), 0);
    std::map<std::string, std::vector<std::size_t>> open;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        if (trace.events[i].type == tkt::EventType::Begin) {
            open[trace.events[i].operation].push_back(i);
        } else {
            auto& stack = open[trace.events[i].operation];
            trace.pairing[stack.back()] = i;
            trace.pairing[i] = stack.back();
            stack.pop_back();
        }
    }
    return trace;
}

// Random small workload spec for corpus-level properties: a root with one
// or two child operations, mixed distributions, optional repetition.
inline tkt::WorkloadSpec random_workload(std::uint64_t seed) {
    tkt::Rng rng(seed);
    tkt::WorkloadSpec spec;
    spec.seed = tkt::splitmix64(seed);
    const std::size_t num_children = static_cast<std::size_t>(rng.uniform_u64(1, 2));
    tkt::OperationSpec root;
    root.label = "root";
    root.duration.kind = tkt::DurationDist::Kind::Uniform;
    root.duration.lo = rng.uniform_u64(2, 6);
    root.duration.hi = root.duration.lo + rng.uniform_u64(0, 6);
    for (std::size_t i = 0; i < num_children; ++i) {
        tkt::OperationSpec child;
        child.label = "step" + std::to_string(i + 1);
        if (rng.uniform_u64(0, 1) == 0) {
            child.duration.kind = tkt::DurationDist::Kind::Uniform;
            child.duration.lo = rng.uniform_u64(1, 8);
            child.duration.hi = child.duration.lo + rng.uniform_u64(0, 8);
        } else {
            child.duration.kind = tkt::DurationDist::Kind::Normal;
            child.duration.mean = static_cast<double>(rng.uniform_u64(4, 12));
            child.duration.stddev = static_cast<double>(rng.uniform_u64(0, 3));
        }
        child.rep_min = 1;
        child.rep_max = static_cast<std::uint32_t>(rng.uniform_u64(1, 2));
        root.children.push_back(child.label);
        spec.operations.push_back(std::move(child));
    }
    spec.operations.push_back(std::move(root));
    spec.roots = {"root"};
    return spec;
}

// Gap-level perturbation of a well-formed trace (used by the refinement
// equivalence checks): multiplies every self-time gap by a small random
// rational, or nudges one gap.
inline tkt::TimedTrace perturb_trace(const tkt::TimedTrace& trace, tkt::Rng& rng) {
    tkt::AnomalySpec anomaly;
    anomaly.kind = tkt::AnomalySpec::Kind::Overload;
    const std::uint64_t pick = rng.uniform_u64(0, 3);
    if (pick == 0) anomaly.factor = tkt::Ratio(2);
    else if (pick == 1) anomaly.factor = tkt::Ratio(3, 2);
    else if (pick == 2) anomaly.factor = tkt::Ratio(3);
    else anomaly.factor = tkt::Ratio(5, 4);
    return tkt::inject_anomaly(trace, anomaly);
}

inline const tkt::Transition* find_transition(const tkt::TimedAutomaton& automaton,
                                              const std::string& op, tkt::EventType type) {
    const tkt::Transition* found = nullptr;
    for (const tkt::Transition& tr : automaton.transitions) {
        if (tr.operation == op && tr.type == type) {
            if (found) return nullptr; // ambiguous
            found = &tr;
        }
    }
    return found;
}

} // namespace tkt_test
