#include "tkt/miner.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>

namespace tkt {

TimedAutomaton build_initial(const std::vector<TimedTrace>& traces,
                             const MinerConfig& config) {
    if (traces.empty())
        throw std::invalid_argument("build_initial: no traces");

    TimedAutomaton automaton;
    automaton.num_states = 1;
    automaton.initial = 0;
    std::uint32_t next_clock = 1;

    for (const TimedTrace& trace : traces) {
        if (trace.empty())
            throw std::invalid_argument("build_initial: empty trace");
        if (trace.events.front().timestamp != 0)
            throw std::invalid_argument("build_initial: trace not normalized");

        // clock_of[i] = relative clock allocated for the Begin event at i.
        std::vector<ClockId> clock_of(trace.size());
        for (std::size_t i = 0; i < trace.size(); ++i)
            if (trace.events[i].type == EventType::Begin) {
                clock_of[i] = ClockId::relative(next_clock++);
                automaton.clocks.insert(clock_of[i]);
            }

        StateId previous = automaton.initial;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const TimedEvent& ev = trace.events[i];
            const StateId next = automaton.num_states++;

            Transition tr;
            tr.source = previous;
            tr.target = next;
            tr.operation = ev.operation;
            tr.type = ev.type;

            EqualityGroup group;
            if (config.absolute_clock)
                group.emplace_back(ClockId::absolute(), ev.timestamp);
            if (ev.type == EventType::Begin) {
                tr.resets.insert(clock_of[i]);
                if (i == 0 && config.absolute_clock)
                    tr.resets.insert(ClockId::absolute());
            } else {
                const std::size_t begin_index = trace.pairing[i];
                group.emplace_back(clock_of[begin_index],
                                   ev.timestamp - trace.events[begin_index].timestamp);
            }
            if (!group.empty()) tr.groups.push_back(std::move(group));

            automaton.alphabet.insert(ev.operation);
            automaton.transitions.push_back(std::move(tr));
            previous = next;
        }
    }
    return renumber_canonical(std::move(automaton));
}

KFuture compute_kfuture(const TimedAutomaton& automaton, StateId state,
                        std::uint32_t k) {
    if (state >= automaton.num_states)
        throw std::invalid_argument("compute_kfuture: state out of range");
    const auto adjacency = automaton.adjacency();

    // futures[d][s] = walks of length <= d from s, shorter ones only at
    // dead ends.
    std::vector<std::vector<KFuture>> futures(k + 1,
                                              std::vector<KFuture>(automaton.num_states));
    for (StateId s = 0; s < automaton.num_states; ++s)
        futures[0][s] = {FutureSequence{}};
    for (std::uint32_t d = 1; d <= k; ++d) {
        for (StateId s = 0; s < automaton.num_states; ++s) {
            if (adjacency[s].empty()) {
                futures[d][s] = {FutureSequence{}};
                continue;
            }
            for (std::size_t idx : adjacency[s]) {
                const Transition& tr = automaton.transitions[idx];
                for (const FutureSequence& tail : futures[d - 1][tr.target]) {
                    FutureSequence seq;
                    seq.reserve(tail.size() + 1);
                    seq.emplace_back(tr.operation, tr.type);
                    seq.insert(seq.end(), tail.begin(), tail.end());
                    futures[d][s].insert(std::move(seq));
                }
            }
        }
    }
    return futures[k][state];
}

namespace {

std::vector<KFuture> all_kfutures(const TimedAutomaton& automaton, std::uint32_t k) {
    const auto adjacency = automaton.adjacency();
    std::vector<KFuture> previous(automaton.num_states, KFuture{FutureSequence{}});
    for (std::uint32_t d = 1; d <= k; ++d) {
        std::vector<KFuture> current(automaton.num_states);
        for (StateId s = 0; s < automaton.num_states; ++s) {
            if (adjacency[s].empty()) {
                current[s] = {FutureSequence{}};
                continue;
            }
            for (std::size_t idx : adjacency[s]) {
                const Transition& tr = automaton.transitions[idx];
                for (const FutureSequence& tail : previous[tr.target]) {
                    FutureSequence seq;
                    seq.reserve(tail.size() + 1);
                    seq.emplace_back(tr.operation, tr.type);
                    seq.insert(seq.end(), tail.begin(), tail.end());
                    current[s].insert(std::move(seq));
                }
            }
        }
        previous = std::move(current);
    }
    return previous;
}

TimedAutomaton remap_states(TimedAutomaton automaton,
                            const std::vector<StateId>& remap,
                            std::uint32_t new_count) {
    automaton.initial = remap[automaton.initial];
    automaton.num_states = new_count;
    for (Transition& tr : automaton.transitions) {
        tr.source = remap[tr.source];
        tr.target = remap[tr.target];
    }
    return automaton;
}

} // namespace

TimedAutomaton merge_redundant_transitions(TimedAutomaton automaton) {
    std::map<std::tuple<StateId, StateId, std::string, EventType>, Transition> merged;
    for (Transition& tr : automaton.transitions) {
        const auto key = std::make_tuple(tr.source, tr.target, tr.operation, tr.type);
        auto it = merged.find(key);
        if (it == merged.end()) {
            merged.emplace(key, std::move(tr));
        } else {
            Transition& dst = it->second;
            dst.groups.insert(dst.groups.end(),
                              std::make_move_iterator(tr.groups.begin()),
                              std::make_move_iterator(tr.groups.end()));
            for (const auto& [clock, interval] : tr.intervals)
                dst.intervals.emplace(clock, interval);
            dst.resets.insert(tr.resets.begin(), tr.resets.end());
        }
    }
    automaton.transitions.clear();
    for (auto& [key, tr] : merged) automaton.transitions.push_back(std::move(tr));
    automaton.canonicalize();
    return automaton;
}

TimedAutomaton merge_states(TimedAutomaton automaton, std::uint32_t k) {
    if (k == 0) throw std::invalid_argument("merge_states: k must be >= 1");
    for (;;) {
        const auto futures = all_kfutures(automaton, k);
        std::map<KFuture, std::vector<StateId>> classes;
        for (StateId s = 0; s < automaton.num_states; ++s)
            classes[futures[s]].push_back(s);

        bool any_merge = false;
        std::vector<StateId> remap(automaton.num_states);
        std::uint32_t next_id = 0;
        for (const auto& [future, members] : classes) {
            const StateId id = next_id++;
            if (members.size() > 1) any_merge = true;
            for (StateId s : members) remap[s] = id;
        }
        if (!any_merge) break;

        automaton = remap_states(std::move(automaton), remap, next_id);
        automaton = merge_redundant_transitions(std::move(automaton));
        automaton = renumber_canonical(std::move(automaton));
    }
    return renumber_canonical(std::move(automaton));
}

TimedAutomaton refine_clocks(TimedAutomaton automaton) {
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::map<ClockId, std::size_t> reset_on;
    std::map<ClockId, std::size_t> checked_on;

    for (std::size_t i = 0; i < automaton.transitions.size(); ++i) {
        const Transition& tr = automaton.transitions[i];
        for (const ClockId& c : tr.resets) {
            if (c.is_absolute()) continue;
            auto [it, inserted] = reset_on.emplace(c, i);
            if (!inserted && it->second != i)
                throw std::invalid_argument("refine_clocks: clock " + c.name() +
                                            " reset on more than one transition");
        }
        std::set<ClockId> seen;
        for (const auto& group : automaton.transitions[i].groups)
            for (const auto& [c, v] : group) { (void)v; if (!c.is_absolute()) seen.insert(c); }
        for (const auto& [c, iv] : tr.intervals) { (void)iv; if (!c.is_absolute()) seen.insert(c); }
        for (const ClockId& c : seen) {
            auto [it, inserted] = checked_on.emplace(c, i);
            if (!inserted && it->second != i)
                throw std::invalid_argument("refine_clocks: clock " + c.name() +
                                            " checked on more than one transition");
        }
    }
    for (const ClockId& c : automaton.clocks) {
        if (c.is_absolute()) continue;
        const auto r = reset_on.count(c) ? reset_on[c] : kNone;
        const auto g = checked_on.count(c) ? checked_on[c] : kNone;
        if (r == kNone || g == kNone)
            throw std::invalid_argument("refine_clocks: clock " + c.name() +
                                        " must be reset once and checked once");
    }

    // Clocks sharing (reset transition, check transition) collapse onto the
    // lowest-indexed member. The clock set iterates in ascending order, so
    // the first member of each group is the survivor.
    std::map<std::pair<std::size_t, std::size_t>, ClockId> survivor;
    std::map<ClockId, ClockId> rename;
    for (const ClockId& c : automaton.clocks) {
        if (c.is_absolute()) continue;
        const auto key = std::make_pair(reset_on[c], checked_on[c]);
        auto [it, inserted] = survivor.emplace(key, c);
        if (!inserted) rename[c] = it->second;
    }

    if (!rename.empty()) {
        for (Transition& tr : automaton.transitions) {
            std::set<ClockId> new_resets;
            for (const ClockId& c : tr.resets) {
                auto it = rename.find(c);
                new_resets.insert(it == rename.end() ? c : it->second);
            }
            tr.resets = std::move(new_resets);
            for (auto& group : tr.groups)
                for (auto& [c, v] : group) {
                    (void)v;
                    auto it = rename.find(c);
                    if (it != rename.end()) c = it->second;
                }
            std::map<ClockId, Interval> new_intervals;
            for (const auto& [c, iv] : tr.intervals) {
                auto it = rename.find(c);
                new_intervals.emplace(it == rename.end() ? c : it->second, iv);
            }
            tr.intervals = std::move(new_intervals);
        }
        for (const auto& [from, to] : rename) { (void)to; automaton.clocks.erase(from); }
    }
    automaton.canonicalize();
    return automaton;
}

TimedAutomaton renumber_canonical(TimedAutomaton automaton) {
    automaton.canonicalize();
    const auto adjacency = automaton.adjacency();

    constexpr StateId kUnvisited = static_cast<StateId>(-1);
    std::vector<StateId> remap(automaton.num_states, kUnvisited);
    std::vector<StateId> queue;
    queue.push_back(automaton.initial);
    remap[automaton.initial] = 0;
    StateId next_id = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const StateId s = queue[head];
        for (std::size_t idx : adjacency[s]) {
            const StateId target = automaton.transitions[idx].target;
            if (remap[target] == kUnvisited) {
                remap[target] = next_id++;
                queue.push_back(target);
            }
        }
    }
    // States unreachable from the initial state (never produced by the
    // pipeline) keep a deterministic numbering after the reachable ones.
    for (StateId s = 0; s < automaton.num_states; ++s)
        if (remap[s] == kUnvisited) remap[s] = next_id++;

    automaton = remap_states(std::move(automaton), remap, automaton.num_states);
    automaton.canonicalize();
    return automaton;
}

TimedAutomaton mine(const std::vector<TimedTrace>& traces, const MinerConfig& miner_config,
                    const PolicyConfig& policy_config, MiningStats* stats,
                    PipelineStages* stages) {
    const auto start = std::chrono::steady_clock::now();

    std::vector<TimedTrace> normalized;
    normalized.reserve(traces.size());
    for (const TimedTrace& t : traces) normalized.push_back(normalize(t));

    TimedAutomaton initial = build_initial(normalized, miner_config);
    if (stages) stages->initial = initial;
    TimedAutomaton merged = merge_states(std::move(initial), miner_config.k);
    if (stages) stages->merged = merged;
    TimedAutomaton refined = refine_clocks(std::move(merged));
    if (stages) stages->refined = refined;
    TimedAutomaton final_model = apply_policy(std::move(refined), policy_config);

    const auto stop = std::chrono::steady_clock::now();
    if (stats) {
        stats->elapsed_ms =
            std::chrono::duration<double, std::milli>(stop - start).count();
        stats->traces = traces.size();
        stats->events = total_events(traces);
    }
    return final_model;
}

} // namespace tkt
