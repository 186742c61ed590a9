#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "tkt/automaton.hpp"
#include "tkt/guard_policy.hpp"
#include "tkt/trace.hpp"

namespace tkt {

struct MinerConfig {
    std::uint32_t k = 2;
    bool absolute_clock = true;
};

/// A label/type walk of length <= k out of a state. Walks shorter than k
/// appear only when they end at a state with no outgoing transitions.
using FutureSequence = std::vector<std::pair<std::string, EventType>>;
using KFuture = std::set<FutureSequence>;

/// Builds the one-branch-per-trace initial automaton. Every Begin event
/// allocates a fresh relative clock (numbered sequentially across the
/// trace set) which is reset on that transition and checked with an
/// equality on the matching End. Each trace's first transition also resets
/// the absolute clock, and every transition carries a t-equality, when the
/// absolute clock is enabled. Traces must be normalized and well-formed.
TimedAutomaton build_initial(const std::vector<TimedTrace>& traces,
                             const MinerConfig& config);

KFuture compute_kfuture(const TimedAutomaton& automaton, StateId state,
                        std::uint32_t k);

/// Collapses transitions sharing (source, target, operation, type) into
/// one, concatenating guard groups and unioning resets. Idempotent.
TimedAutomaton merge_redundant_transitions(TimedAutomaton automaton);

/// Iteratively collapses kFuture-equivalence classes (all members of a
/// class at once), merging redundant transitions and renumbering after
/// each pass, until no two states share a kFuture.
TimedAutomaton merge_states(TimedAutomaton automaton, std::uint32_t k);

/// Unifies redundant relative clocks: clocks reset on the same transition
/// and checked on the same transition collapse onto the lowest-indexed
/// member. The absolute clock is never refined. Throws if some relative
/// clock is not reset-on-one/checked-on-one transition.
TimedAutomaton refine_clocks(TimedAutomaton automaton);

/// Renumbers states breadth-first from the initial state, visiting each
/// state's transitions in (operation, type, target) order. Gives mined
/// models a reproducible state numbering.
TimedAutomaton renumber_canonical(TimedAutomaton automaton);

struct PipelineStages {
    TimedAutomaton initial;
    TimedAutomaton merged;
    TimedAutomaton refined;
};

struct MiningStats {
    double elapsed_ms = 0;
    std::size_t traces = 0;
    std::size_t events = 0;
};

/// Full pipeline: normalize, build, merge states, refine clocks, generate
/// guards. elapsed_ms covers normalization through guard generation.
TimedAutomaton mine(const std::vector<TimedTrace>& traces, const MinerConfig& miner_config,
                    const PolicyConfig& policy_config, MiningStats* stats = nullptr,
                    PipelineStages* stages = nullptr);

} // namespace tkt
