#include "tkt/automaton.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tkt {

void Transition::canonicalize() {
    for (auto& group : groups)
        std::sort(group.begin(), group.end());
    std::sort(groups.begin(), groups.end());
}

void TimedAutomaton::canonicalize() {
    for (auto& tr : transitions) tr.canonicalize();
    std::sort(transitions.begin(), transitions.end(),
              [](const Transition& a, const Transition& b) {
                  if (a.source != b.source) return a.source < b.source;
                  if (a.operation != b.operation) return a.operation < b.operation;
                  if (a.type != b.type) return a.type < b.type;
                  if (a.target != b.target) return a.target < b.target;
                  return false;
              });
}

std::vector<std::vector<std::size_t>> TimedAutomaton::adjacency() const {
    std::vector<std::vector<std::size_t>> adj(num_states);
    for (std::size_t i = 0; i < transitions.size(); ++i)
        adj[transitions[i].source].push_back(i);
    return adj;
}

std::map<ClockId, std::vector<std::uint64_t>> pooled_samples(const Transition& tr) {
    std::map<ClockId, std::vector<std::uint64_t>> pooled;
    for (const auto& group : tr.groups)
        for (const auto& [clock, value] : group)
            pooled[clock].push_back(value);
    for (auto& [clock, values] : pooled)
        std::sort(values.begin(), values.end());
    return pooled;
}

namespace {

struct SearchState {
    std::size_t event = 0;
    StateId state = 0;
    std::vector<std::pair<ClockId, std::uint64_t>> reset_times; // sorted

    friend bool operator<(const SearchState& a, const SearchState& b) {
        if (a.event != b.event) return a.event < b.event;
        if (a.state != b.state) return a.state < b.state;
        return a.reset_times < b.reset_times;
    }
};

class Acceptor {
public:
    Acceptor(const TimedAutomaton& automaton, const TimedTrace& trace, bool check_absolute)
        : automaton_(automaton), trace_(trace), check_absolute_(check_absolute),
          adjacency_(automaton.adjacency()) {}

    AcceptResult run() {
        SearchState start;
        start.state = automaton_.initial;
        best_failure_.events_consumed = 0;
        best_failure_.state = automaton_.initial;
        best_failure_.detail = describe_block(automaton_.initial, 0, start.reset_times);
        if (dfs(start)) return AcceptResult{true, std::nullopt};
        return AcceptResult{false, best_failure_};
    }

private:
    std::optional<std::uint64_t> clock_value(
        const std::vector<std::pair<ClockId, std::uint64_t>>& reset_times,
        const ClockId& clock, std::uint64_t now) const {
        for (const auto& [c, at] : reset_times)
            if (c == clock) return now - at;
        return std::nullopt; // never reset: guard ignored
    }

    bool guard_applies(const ClockId& clock) const {
        return check_absolute_ || !clock.is_absolute();
    }

    // Evaluates a transition's guards; on failure returns a description of
    // the first violated constraint (canonical clock order).
    bool guards_hold(const Transition& tr,
                     const std::vector<std::pair<ClockId, std::uint64_t>>& reset_times,
                     std::uint64_t now, std::string* why) const {
        for (const auto& [clock, interval] : tr.intervals) {
            if (!guard_applies(clock)) continue;
            const auto value = clock_value(reset_times, clock, now);
            if (!value) continue;
            if (!interval.contains(*value)) {
                if (why)
                    *why = "guard on " + clock.name() + ": value " + std::to_string(*value) +
                           " outside [" + interval.lo.to_decimal() + ", " +
                           interval.hi.to_decimal() + "]";
                return false;
            }
        }
        if (!tr.groups.empty()) {
            for (const auto& group : tr.groups) {
                bool ok = true;
                for (const auto& [clock, expected] : group) {
                    if (!guard_applies(clock)) continue;
                    const auto value = clock_value(reset_times, clock, now);
                    if (!value) continue;
                    if (*value != expected) { ok = false; break; }
                }
                if (ok) return true;
            }
            if (why) *why = "no equality guard group satisfied";
            return false;
        }
        return true;
    }

    std::string describe_block(StateId state, std::size_t event_index,
                               const std::vector<std::pair<ClockId, std::uint64_t>>& reset_times) const {
        if (event_index >= trace_.size()) return "";
        const TimedEvent& ev = trace_.events[event_index];
        const std::string label =
            std::string(1, event_type_char(ev.type)) + " " + ev.operation;
        std::string first_guard_failure;
        bool found_labelled = false;
        for (std::size_t idx : adjacency_[state]) {
            const Transition& tr = automaton_.transitions[idx];
            if (tr.operation != ev.operation || tr.type != ev.type) continue;
            found_labelled = true;
            std::string why;
            if (!guards_hold(tr, reset_times, ev.timestamp, &why) && first_guard_failure.empty())
                first_guard_failure = why + " (transition " + label + ")";
        }
        if (!found_labelled)
            return "no matching transition for " + label + " from state " + std::to_string(state);
        return first_guard_failure;
    }

    bool dfs(const SearchState& current) {
        if (current.event == trace_.size()) return true;
        if (!visited_.insert(current).second) return false;

        const TimedEvent& ev = trace_.events[current.event];
        bool progressed = false;
        for (std::size_t idx : adjacency_[current.state]) {
            const Transition& tr = automaton_.transitions[idx];
            if (tr.operation != ev.operation || tr.type != ev.type) continue;
            if (!guards_hold(tr, current.reset_times, ev.timestamp, nullptr)) continue;
            progressed = true;
            SearchState next;
            next.event = current.event + 1;
            next.state = tr.target;
            next.reset_times = current.reset_times;
            for (const ClockId& c : tr.resets) {
                bool replaced = false;
                for (auto& [rc, at] : next.reset_times)
                    if (rc == c) { at = ev.timestamp; replaced = true; break; }
                if (!replaced) next.reset_times.emplace_back(c, ev.timestamp);
            }
            std::sort(next.reset_times.begin(), next.reset_times.end());
            if (dfs(next)) return true;
        }
        if (!progressed && current.event >= best_failure_.events_consumed) {
            // Strictly deeper failures replace the record; at equal depth the
            // first (lexicographically earliest) path wins.
            if (current.event > best_failure_.events_consumed ||
                best_failure_.detail.empty()) {
                best_failure_.events_consumed = current.event;
                best_failure_.state = current.state;
                best_failure_.detail = describe_block(current.state, current.event,
                                                      current.reset_times);
            }
        }
        return false;
    }

    const TimedAutomaton& automaton_;
    const TimedTrace& trace_;
    bool check_absolute_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::set<SearchState> visited_;
    FirstFailure best_failure_;
};

} // namespace

AcceptResult accepts(const TimedAutomaton& automaton, const TimedTrace& trace,
                     bool check_absolute) {
    if (trace.empty())
        throw std::invalid_argument("accepts: empty trace");
    const TimedTrace normalized = normalize(trace);
    Acceptor acceptor(automaton, normalized, check_absolute);
    return acceptor.run();
}

namespace {

std::string render_group(const EqualityGroup& group) {
    std::string out;
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (i > 0) out += " \xE2\x88\xA7 "; // ∧
        out += group[i].first.name() + "=" + std::to_string(group[i].second);
    }
    return out;
}

} // namespace

std::string to_dot(const TimedAutomaton& automaton) {
    TimedAutomaton canon = automaton;
    canon.canonicalize();
    std::ostringstream out;
    out << "digraph timed_automaton {\n";
    out << "  rankdir=LR;\n";
    out << "  __start [shape=point];\n";
    for (StateId s = 0; s < canon.num_states; ++s)
        out << "  " << s << " [shape=circle];\n";
    out << "  __start -> " << canon.initial << ";\n";
    for (const Transition& tr : canon.transitions) {
        std::string label = tr.operation + "/" + event_type_char(tr.type);
        for (const auto& [clock, interval] : tr.intervals)
            label += "\\n" + interval.lo.to_decimal() + " \xE2\x89\xA4 " + clock.name() +
                     " \xE2\x89\xA4 " + interval.hi.to_decimal();
        if (!tr.groups.empty()) {
            std::string alts;
            for (std::size_t i = 0; i < tr.groups.size(); ++i) {
                if (i > 0) alts += " \xE2\x88\xA8 "; // ∨
                alts += "[" + render_group(tr.groups[i]) + "]";
            }
            label += "\\n" + alts;
        }
        if (!tr.resets.empty()) {
            std::string rs;
            for (const ClockId& c : tr.resets) {
                if (!rs.empty()) rs += ", ";
                rs += c.name() + " := 0";
            }
            label += "\\n{" + rs + "}";
        }
        out << "  " << tr.source << " -> " << tr.target << " [label=\"" << label << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

namespace {

std::string clock_token(const ClockId& c) { return c.name(); }

ClockId parse_clock_token(const std::string& token, std::size_t line) {
    if (token == "t") return ClockId::absolute();
    if (token.size() >= 2 && token[0] == 'c') {
        std::uint32_t idx = 0;
        for (std::size_t i = 1; i < token.size(); ++i) {
            if (token[i] < '0' || token[i] > '9')
                throw ParseError(line, "bad clock name '" + token + "'");
            idx = idx * 10 + static_cast<std::uint32_t>(token[i] - '0');
        }
        if (idx == 0) throw ParseError(line, "bad clock name '" + token + "'");
        return ClockId::relative(idx);
    }
    throw ParseError(line, "bad clock name '" + token + "'");
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string token;
    while (in >> token) out.push_back(token);
    return out;
}

} // namespace

std::string serialize_model(const TimedAutomaton& automaton) {
    TimedAutomaton canon = automaton;
    canon.canonicalize();
    std::ostringstream out;
    out << "tktmodel v1\n";
    out << "states " << canon.num_states << "\n";
    out << "initial " << canon.initial << "\n";
    for (const ClockId& c : canon.clocks)
        out << "clock " << clock_token(c) << "\n";
    for (const std::string& op : canon.alphabet)
        out << "alpha " << op << "\n";
    for (const Transition& tr : canon.transitions) {
        out << "trans " << tr.source << " " << tr.target << " " << tr.operation << " "
            << event_type_char(tr.type) << "\n";
        if (!tr.resets.empty()) {
            out << "reset";
            for (const ClockId& c : tr.resets) out << " " << clock_token(c);
            out << "\n";
        }
        for (const EqualityGroup& group : tr.groups) {
            out << "group";
            for (const auto& [clock, value] : group)
                out << " " << clock_token(clock) << "=" << value;
            out << "\n";
        }
        for (const auto& [clock, interval] : tr.intervals) {
            out << "interval " << clock_token(clock) << "=[" << interval.lo.to_string()
                << "," << interval.hi.to_string() << "]\n";
        }
    }
    return out.str();
}

TimedAutomaton parse_model(const std::string& text) {
    TimedAutomaton automaton;
    automaton.clocks.clear();
    Transition* current = nullptr;

    std::istringstream in(text);
    std::string line;
    std::size_t line_number = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != "tktmodel v1")
                throw ParseError(line_number, "expected 'tktmodel v1' header");
            saw_header = true;
            continue;
        }
        const auto tokens = split_ws(line);
        const std::string& kw = tokens.front();
        if (kw == "states") {
            if (tokens.size() != 2) throw ParseError(line_number, "states: expected a count");
            automaton.num_states = static_cast<std::uint32_t>(std::stoul(tokens[1]));
        } else if (kw == "initial") {
            if (tokens.size() != 2) throw ParseError(line_number, "initial: expected a state id");
            automaton.initial = static_cast<StateId>(std::stoul(tokens[1]));
        } else if (kw == "clock") {
            if (tokens.size() != 2) throw ParseError(line_number, "clock: expected a name");
            automaton.clocks.insert(parse_clock_token(tokens[1], line_number));
        } else if (kw == "alpha") {
            if (tokens.size() != 2) throw ParseError(line_number, "alpha: expected a label");
            automaton.alphabet.insert(tokens[1]);
        } else if (kw == "trans") {
            if (tokens.size() != 5) throw ParseError(line_number, "trans: expected 'trans SRC DST OP TYPE'");
            Transition tr;
            tr.source = static_cast<StateId>(std::stoul(tokens[1]));
            tr.target = static_cast<StateId>(std::stoul(tokens[2]));
            tr.operation = tokens[3];
            if (tokens[4] == "B") tr.type = EventType::Begin;
            else if (tokens[4] == "E") tr.type = EventType::End;
            else throw ParseError(line_number, "trans: bad event type '" + tokens[4] + "'");
            automaton.transitions.push_back(std::move(tr));
            current = &automaton.transitions.back();
        } else if (kw == "reset") {
            if (!current) throw ParseError(line_number, "reset outside a transition");
            for (std::size_t i = 1; i < tokens.size(); ++i)
                current->resets.insert(parse_clock_token(tokens[i], line_number));
        } else if (kw == "group") {
            if (!current) throw ParseError(line_number, "group outside a transition");
            EqualityGroup group;
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                const auto eq = tokens[i].find('=');
                if (eq == std::string::npos)
                    throw ParseError(line_number, "group: expected clock=value");
                group.emplace_back(parse_clock_token(tokens[i].substr(0, eq), line_number),
                                   std::stoull(tokens[i].substr(eq + 1)));
            }
            current->groups.push_back(std::move(group));
        } else if (kw == "interval") {
            if (!current) throw ParseError(line_number, "interval outside a transition");
            if (tokens.size() != 2) throw ParseError(line_number, "interval: expected clock=[lo,hi]");
            const auto eq = tokens[1].find('=');
            if (eq == std::string::npos || tokens[1].size() < eq + 4 ||
                tokens[1][eq + 1] != '[' || tokens[1].back() != ']')
                throw ParseError(line_number, "interval: expected clock=[lo,hi]");
            const ClockId clock = parse_clock_token(tokens[1].substr(0, eq), line_number);
            const std::string body = tokens[1].substr(eq + 2, tokens[1].size() - eq - 3);
            const auto comma = body.find(',');
            if (comma == std::string::npos)
                throw ParseError(line_number, "interval: expected clock=[lo,hi]");
            Interval interval;
            try {
                interval.lo = Ratio::from_decimal(body.substr(0, comma));
                interval.hi = Ratio::from_decimal(body.substr(comma + 1));
            } catch (const std::exception& e) {
                throw ParseError(line_number, std::string("interval: ") + e.what());
            }
            current->intervals[clock] = interval;
        } else {
            throw ParseError(line_number, "unknown keyword '" + kw + "'");
        }
    }
    if (!saw_header) throw ParseError(1, "expected 'tktmodel v1' header");

    // Referential integrity.
    if (automaton.initial >= automaton.num_states)
        throw ParseError(1, "initial state out of range");
    for (const Transition& tr : automaton.transitions) {
        if (tr.source >= automaton.num_states || tr.target >= automaton.num_states)
            throw ParseError(1, "transition endpoint out of range");
        auto check_clock = [&](const ClockId& c) {
            if (!automaton.clocks.count(c))
                throw ParseError(1, "undeclared clock '" + c.name() + "'");
        };
        for (const ClockId& c : tr.resets) check_clock(c);
        for (const auto& group : tr.groups)
            for (const auto& [c, v] : group) { (void)v; check_clock(c); }
        for (const auto& [c, iv] : tr.intervals) { (void)iv; check_clock(c); }
    }
    automaton.canonicalize();
    return automaton;
}

} // namespace tkt
