#include "tkt/trace.hpp"

#include <charconv>
#include <unordered_map>

namespace tkt {

namespace {

bool is_label_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '$';
}

bool valid_label(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!is_label_char(c)) return false;
    return true;
}

struct RawLine {
    std::size_t number;
    std::string text;
};

// One event line: "<B|E> <operation> <timestamp>", single spaces, no slack.
TimedEvent parse_event_line(const RawLine& line) {
    const std::string& s = line.text;
    if (s.size() < 5 || (s[0] != 'B' && s[0] != 'E') || s[1] != ' ')
        throw ParseError(line.number, "expected '<B|E> <operation> <timestamp>'");
    const auto second_space = s.find(' ', 2);
    if (second_space == std::string::npos || second_space == 2)
        throw ParseError(line.number, "expected '<B|E> <operation> <timestamp>'");
    const std::string op = s.substr(2, second_space - 2);
    if (!valid_label(op))
        throw ParseError(line.number, "bad operation label '" + op + "'");
    const std::string ts = s.substr(second_space + 1);
    if (ts.empty())
        throw ParseError(line.number, "missing timestamp");
    if (ts[0] == '-')
        throw ParseError(line.number, "negative timestamp '" + ts + "'");
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), value);
    if (ec == std::errc::result_out_of_range)
        throw ParseError(line.number, "timestamp out of range '" + ts + "'");
    if (ec != std::errc() || ptr != ts.data() + ts.size())
        throw ParseError(line.number, "non-integer timestamp '" + ts + "'");
    TimedEvent ev;
    ev.type = s[0] == 'B' ? EventType::Begin : EventType::End;
    ev.operation = op;
    ev.timestamp = value;
    return ev;
}

TimedTrace finish_trace(const std::vector<RawLine>& lines) {
    TimedTrace trace;
    trace.events.reserve(lines.size());
    trace.pairing.assign(lines.size(), 0);
    std::unordered_map<std::string, std::vector<std::size_t>> open;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        TimedEvent ev = parse_event_line(lines[i]);
        if (ev.type == EventType::Begin) {
            open[ev.operation].push_back(i);
        } else {
            auto it = open.find(ev.operation);
            if (it == open.end() || it->second.empty())
                throw ParseError(lines[i].number, "unmatched End for '" + ev.operation + "'");
            const std::size_t begin_index = it->second.back();
            it->second.pop_back();
            trace.pairing[begin_index] = i;
            trace.pairing[i] = begin_index;
        }
        trace.events.push_back(std::move(ev));
    }
    for (const auto& [op, stack] : open) {
        if (!stack.empty())
            throw ParseError(lines[stack.back()].number, "unmatched Begin for '" + op + "'");
    }
    return trace;
}

} // namespace

std::string Violation::describe() const {
    switch (kind) {
        case ViolationKind::TimeDecrease:
            return "time decreases at index " + std::to_string(index);
        case ViolationKind::PairingViolation:
            return "broken begin/end pairing at index " + std::to_string(index);
        case ViolationKind::NestingViolation:
            return "nesting violated at index " + std::to_string(index);
    }
    return "unknown violation";
}

std::vector<TimedTrace> parse_corpus(const std::string& text) {
    std::vector<TimedTrace> traces;
    std::vector<RawLine> current;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string line =
            text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        ++line_number;
        const bool last = nl == std::string::npos;
        pos = last ? text.size() + 1 : nl + 1;

        if (!line.empty() && line[0] == '#') continue;
        if (line.empty()) {
            if (!current.empty()) {
                traces.push_back(finish_trace(current));
                current.clear();
            }
            if (last) break;
            continue;
        }
        current.push_back(RawLine{line_number, line});
        if (last) break;
    }
    if (!current.empty()) traces.push_back(finish_trace(current));
    return traces;
}

TimedTrace parse_trace(const std::string& text) {
    auto traces = parse_corpus(text);
    if (traces.empty()) throw ParseError(1, "empty trace");
    if (traces.size() > 1) throw ParseError(1, "expected a single trace, found " +
                                               std::to_string(traces.size()));
    return traces.front();
}

std::vector<Violation> validate(const TimedTrace& trace) {
    std::vector<Violation> out;
    const auto& ev = trace.events;
    const std::size_t n = ev.size();

    for (std::size_t i = 1; i < n; ++i)
        if (ev[i].timestamp < ev[i - 1].timestamp)
            out.push_back({ViolationKind::TimeDecrease, i});

    std::vector<bool> pair_ok(n, false);
    if (trace.pairing.size() != n) {
        for (std::size_t i = 0; i < n; ++i)
            out.push_back({ViolationKind::PairingViolation, i});
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = trace.pairing[i];
            const bool ok = j < n && j != i && trace.pairing[j] == i &&
                            ev[i].operation == ev[j].operation &&
                            ev[i].type != ev[j].type &&
                            (i < j ? ev[i].type == EventType::Begin
                                   : ev[i].type == EventType::End);
            pair_ok[i] = ok;
            if (!ok) out.push_back({ViolationKind::PairingViolation, i});
        }
    }

    // Nesting: an End must close the most recently opened interval.
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (!pair_ok[i]) continue;
        if (ev[i].type == EventType::Begin) {
            stack.push_back(i);
        } else {
            const std::size_t partner = trace.pairing[i];
            if (!stack.empty() && stack.back() == partner) {
                stack.pop_back();
            } else {
                out.push_back({ViolationKind::NestingViolation, i});
                for (auto it = stack.begin(); it != stack.end(); ++it) {
                    if (*it == partner) { stack.erase(it); break; }
                }
            }
        }
    }
    return out;
}

TimedTrace normalize(const TimedTrace& trace) {
    if (trace.empty()) return trace;
    const std::uint64_t base = trace.events.front().timestamp;
    TimedTrace out = trace;
    for (auto& ev : out.events) ev.timestamp -= base;
    return out;
}

std::string serialize_trace(const TimedTrace& trace) {
    std::string out;
    for (const auto& ev : trace.events) {
        out += event_type_char(ev.type);
        out += ' ';
        out += ev.operation;
        out += ' ';
        out += std::to_string(ev.timestamp);
        out += '\n';
    }
    return out;
}

std::string serialize_corpus(const std::vector<TimedTrace>& traces) {
    std::string out;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (i > 0) out += '\n';
        out += serialize_trace(traces[i]);
    }
    return out;
}

std::size_t total_events(const std::vector<TimedTrace>& traces) {
    std::size_t n = 0;
    for (const auto& t : traces) n += t.size();
    return n;
}

} // namespace tkt
