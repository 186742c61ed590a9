#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tkt {

enum class EventType : std::uint8_t { Begin, End };

inline char event_type_char(EventType t) { return t == EventType::Begin ? 'B' : 'E'; }

/// One begin-or-end event of an operation, stamped with an opaque
/// non-negative time (milliseconds by convention).
struct TimedEvent {
    EventType type = EventType::Begin;
    std::string operation;
    std::uint64_t timestamp = 0;

    friend bool operator==(const TimedEvent& a, const TimedEvent& b) {
        return a.type == b.type && a.operation == b.operation && a.timestamp == b.timestamp;
    }
};

/// An ordered sequence of timed events plus the begin/end pairing.
/// pairing[i] is the index of event i's partner; parse_trace resolves it
/// with a per-label stack (an End closes the most recent open Begin with
/// the same label).
struct TimedTrace {
    std::vector<TimedEvent> events;
    std::vector<std::size_t> pairing;

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }

    friend bool operator==(const TimedTrace& a, const TimedTrace& b) {
        return a.events == b.events && a.pairing == b.pairing;
    }
};

struct ParseError : std::runtime_error {
    ParseError(std::size_t line_number, const std::string& message)
        : std::runtime_error("line " + std::to_string(line_number) + ": " + message),
          line(line_number) {}
    std::size_t line;
};

enum class ViolationKind : std::uint8_t { TimeDecrease, PairingViolation, NestingViolation };

/// A well-formedness defect. Violations are data, not errors: validate()
/// reports them all instead of throwing.
struct Violation {
    ViolationKind kind;
    std::size_t index;

    std::string describe() const;

    friend bool operator==(const Violation& a, const Violation& b) {
        return a.kind == b.kind && a.index == b.index;
    }
};

/// Parses a single trace. Errors on syntax problems, bad timestamps,
/// unmatched begins/ends, and empty input. Does not reject time decreases
/// or nesting violations; those are validate()'s job.
TimedTrace parse_trace(const std::string& text);

/// Parses a corpus file: traces separated by one blank line, '#' comments.
std::vector<TimedTrace> parse_corpus(const std::string& text);

/// Checks the three well-formedness properties: non-decreasing time,
/// begin/end pairing, proper nesting. Empty result means well-formed.
std::vector<Violation> validate(const TimedTrace& trace);

inline bool is_well_formed(const TimedTrace& trace) { return validate(trace).empty(); }

/// Shifts timestamps so the first event is at 0, preserving differences.
/// Idempotent; no-op on an empty trace.
TimedTrace normalize(const TimedTrace& trace);

std::string serialize_trace(const TimedTrace& trace);
std::string serialize_corpus(const std::vector<TimedTrace>& traces);

std::size_t total_events(const std::vector<TimedTrace>& traces);

} // namespace tkt
