#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tkt/ratio.hpp"
#include "tkt/trace.hpp"

namespace tkt {

enum class ClockKind : std::uint8_t { Absolute, Relative };

/// Identifies a clock. Every automaton owns exactly one absolute clock
/// ("t", reset on each trace-initial transition) plus any number of
/// relative clocks ("c1", "c2", ...) that each measure one operation's
/// duration.
struct ClockId {
    ClockKind kind = ClockKind::Absolute;
    std::uint32_t index = 0;

    static ClockId absolute() { return ClockId{ClockKind::Absolute, 0}; }
    static ClockId relative(std::uint32_t n) { return ClockId{ClockKind::Relative, n}; }

    bool is_absolute() const { return kind == ClockKind::Absolute; }

    std::string name() const {
        return is_absolute() ? "t" : "c" + std::to_string(index);
    }

    friend bool operator==(const ClockId& a, const ClockId& b) {
        return a.kind == b.kind && a.index == b.index;
    }
    friend bool operator!=(const ClockId& a, const ClockId& b) { return !(a == b); }
    friend bool operator<(const ClockId& a, const ClockId& b) {
        if (a.kind != b.kind) return a.kind == ClockKind::Absolute;
        return a.index < b.index;
    }
};

/// Closed interval guard on one clock.
struct Interval {
    Ratio lo;
    Ratio hi;

    bool contains(std::uint64_t value) const {
        return lo.compare_u64(value) <= 0 && hi.compare_u64(value) >= 0;
    }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
};

/// One observation's conjunction of clock equalities, e.g. {t=30, c6=11}.
/// A transition carries a list of such groups; the transition fires when
/// any one group is fully satisfied. Keeping observations grouped (rather
/// than pooling all equalities per clock) is what makes state merging only
/// ever enlarge the accepted language.
using EqualityGroup = std::vector<std::pair<ClockId, std::uint64_t>>;

using StateId = std::uint32_t;

struct Transition {
    StateId source = 0;
    StateId target = 0;
    std::string operation;
    EventType type = EventType::Begin;
    std::vector<EqualityGroup> groups;     // disjunctive alternatives, multiset
    std::map<ClockId, Interval> intervals; // conjunctive, at most one per clock
    std::set<ClockId> resets;

    void canonicalize();

    friend bool operator==(const Transition& a, const Transition& b) {
        return a.source == b.source && a.target == b.target &&
               a.operation == b.operation && a.type == b.type &&
               a.groups == b.groups && a.intervals == b.intervals &&
               a.resets == b.resets;
    }
};

struct TimedAutomaton {
    std::uint32_t num_states = 1;
    StateId initial = 0;
    std::set<ClockId> clocks{ClockId::absolute()};
    std::set<std::string> alphabet;
    std::vector<Transition> transitions;

    /// Sorts transitions by (source, operation, type, target) and
    /// canonicalizes each transition's guard groups and resets.
    void canonicalize();

    /// Outgoing transition indices per state, in canonical order.
    std::vector<std::vector<std::size_t>> adjacency() const;

    friend bool operator==(const TimedAutomaton& a, const TimedAutomaton& b) {
        return a.num_states == b.num_states && a.initial == b.initial &&
               a.clocks == b.clocks && a.alphabet == b.alphabet &&
               a.transitions == b.transitions;
    }
};

/// Diagnostic for a rejected trace: the longest event prefix any path
/// consumed, the state it stalled in, and what blocked progress there
/// (taken from the lexicographically-first blocked path).
struct FirstFailure {
    std::size_t events_consumed = 0;
    StateId state = 0;
    std::string detail;
};

struct AcceptResult {
    bool accepted = false;
    std::optional<FirstFailure> failure;
};

/// Runs the trace against the automaton. The trace is normalized before
/// matching. Acceptance = some transition path consumes every event with
/// all guards satisfied; guards on clocks never reset along the path are
/// ignored, and guards on the absolute clock are ignored entirely when
/// check_absolute is false. There is no final-state requirement.
AcceptResult accepts(const TimedAutomaton& automaton, const TimedTrace& trace,
                     bool check_absolute = true);

/// Per-clock multiset of equality samples accumulated on a transition,
/// pooled across guard groups. This is the guard-generation input.
std::map<ClockId, std::vector<std::uint64_t>> pooled_samples(const Transition& tr);

/// Deterministic Graphviz rendering.
std::string to_dot(const TimedAutomaton& automaton);

/// Versioned line-oriented text format (see README for the grammar).
std::string serialize_model(const TimedAutomaton& automaton);
TimedAutomaton parse_model(const std::string& text);

} // namespace tkt
