#include "tkt/workload.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "tkt/rng.hpp"

namespace tkt {

const OperationSpec& WorkloadSpec::find(const std::string& label) const {
    for (const auto& op : operations)
        if (op.label == label) return op;
    throw std::invalid_argument("workload: undefined operation '" + label + "'");
}

void WorkloadSpec::check() const {
    if (operations.empty())
        throw std::invalid_argument("workload: no operations");
    if (roots.empty())
        throw std::invalid_argument("workload: no roots");
    std::set<std::string> labels;
    for (const auto& op : operations) {
        if (op.label.empty())
            throw std::invalid_argument("workload: empty operation label");
        if (!labels.insert(op.label).second)
            throw std::invalid_argument("workload: duplicate operation '" + op.label + "'");
        if (op.rep_min == 0 || op.rep_min > op.rep_max)
            throw std::invalid_argument("workload: bad repetition range for '" + op.label + "'");
        if (op.duration.kind == DurationDist::Kind::Uniform && op.duration.lo > op.duration.hi)
            throw std::invalid_argument("workload: bad uniform range for '" + op.label + "'");
        if (op.duration.kind == DurationDist::Kind::Normal &&
            (op.duration.stddev < 0 || op.duration.mean < 0))
            throw std::invalid_argument("workload: bad normal parameters for '" + op.label + "'");
    }
    for (const auto& root : roots) find(root);
    for (const auto& op : operations)
        for (const auto& child : op.children) find(child);

    // The nesting graph must be acyclic or generation would not terminate.
    std::map<std::string, int> mark; // 0 new, 1 in progress, 2 done
    auto visit = [&](auto&& self, const std::string& label) -> void {
        int& m = mark[label];
        if (m == 2) return;
        if (m == 1)
            throw std::invalid_argument("workload: cyclic nesting through '" + label + "'");
        m = 1;
        for (const auto& child : find(label).children) self(self, child);
        m = 2;
    };
    for (const auto& op : operations) visit(visit, op.label);
}

namespace {

std::uint64_t draw_duration(const DurationDist& dist, Rng& rng) {
    if (dist.kind == DurationDist::Kind::Uniform)
        return rng.uniform_u64(dist.lo, dist.hi);
    const double x = rng.normal(dist.mean, dist.stddev);
    if (x <= 0) return 0;
    return static_cast<std::uint64_t>(std::llround(x));
}

// Emits one occurrence of `op` starting at `start`; returns the end time.
// Self-time is split around the children: half before, the rest after.
std::uint64_t emit_occurrence(const WorkloadSpec& spec, const OperationSpec& op,
                              std::uint64_t start, Rng& rng,
                              std::vector<TimedEvent>& events) {
    const std::uint64_t self = draw_duration(op.duration, rng);
    events.push_back({EventType::Begin, op.label, start});
    std::uint64_t cursor = start;
    if (!op.children.empty()) {
        cursor += self / 2;
        for (const auto& child_label : op.children) {
            const OperationSpec& child = spec.find(child_label);
            const std::uint64_t reps = rng.uniform_u64(child.rep_min, child.rep_max);
            for (std::uint64_t r = 0; r < reps; ++r)
                cursor = emit_occurrence(spec, child, cursor, rng, events);
        }
        cursor += self - self / 2;
    } else {
        cursor += self;
    }
    events.push_back({EventType::End, op.label, cursor});
    return cursor;
}

void resolve_pairing(TimedTrace& trace) {
    std::map<std::string, std::vector<std::size_t>> open;
    trace.pairing.assign(trace.events.size(), 0);
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        if (trace.events[i].type == EventType::Begin) {
            open[trace.events[i].operation].push_back(i);
        } else {
            auto& stack = open[trace.events[i].operation];
            trace.pairing[stack.back()] = i;
            trace.pairing[i] = stack.back();
            stack.pop_back();
        }
    }
}

} // namespace

std::vector<TimedTrace> generate_corpus(const WorkloadSpec& spec, std::size_t n) {
    if (n == 0) throw std::invalid_argument("generate_corpus: n must be >= 1");
    spec.check();
    Rng rng(spec.seed);
    std::vector<TimedTrace> traces;
    traces.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& root =
            spec.roots[static_cast<std::size_t>(rng.uniform_u64(0, spec.roots.size() - 1))];
        TimedTrace trace;
        emit_occurrence(spec, spec.find(root), 0, rng, trace.events);
        resolve_pairing(trace);
        traces.push_back(std::move(trace));
    }
    return traces;
}

namespace {

using json = nlohmann::json;

DurationDist parse_duration(const json& j, const std::string& label) {
    DurationDist dist;
    if (j.contains("uniform")) {
        const auto& arr = j.at("uniform");
        if (!arr.is_array() || arr.size() != 2)
            throw std::invalid_argument("workload: '" + label + "': uniform wants [lo, hi]");
        dist.kind = DurationDist::Kind::Uniform;
        dist.lo = arr[0].get<std::uint64_t>();
        dist.hi = arr[1].get<std::uint64_t>();
    } else if (j.contains("normal")) {
        const auto& arr = j.at("normal");
        if (!arr.is_array() || arr.size() != 2)
            throw std::invalid_argument("workload: '" + label + "': normal wants [mean, stddev]");
        dist.kind = DurationDist::Kind::Normal;
        dist.mean = arr[0].get<double>();
        dist.stddev = arr[1].get<double>();
    } else {
        throw std::invalid_argument("workload: '" + label + "': duration needs 'uniform' or 'normal'");
    }
    return dist;
}

Ratio parse_factor(const json& j) {
    if (j.is_string()) return Ratio::from_decimal(j.get<std::string>());
    if (j.is_number_integer()) return Ratio(j.get<std::int64_t>());
    if (j.is_number_float()) {
        const double x = j.get<double>();
        return Ratio(static_cast<std::int64_t>(std::llround(x * 1e6)), Ratio::kMicro);
    }
    throw std::invalid_argument("anomaly: factor must be a number or decimal string");
}

} // namespace

WorkloadSpec load_workload(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("workload: bad JSON: ") + e.what());
    }
    WorkloadSpec spec;
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (!j.contains("roots") || !j.at("roots").is_array())
        throw std::invalid_argument("workload: missing 'roots' array");
    for (const auto& r : j.at("roots")) spec.roots.push_back(r.get<std::string>());
    if (!j.contains("operations") || !j.at("operations").is_array())
        throw std::invalid_argument("workload: missing 'operations' array");
    for (const auto& item : j.at("operations")) {
        OperationSpec op;
        op.label = item.at("label").get<std::string>();
        if (item.contains("children"))
            for (const auto& c : item.at("children")) op.children.push_back(c.get<std::string>());
        if (item.contains("repetition")) {
            const auto& rep = item.at("repetition");
            if (!rep.is_array() || rep.size() != 2)
                throw std::invalid_argument("workload: '" + op.label + "': repetition wants [min, max]");
            op.rep_min = rep[0].get<std::uint32_t>();
            op.rep_max = rep[1].get<std::uint32_t>();
        }
        op.duration = parse_duration(item.at("duration"), op.label);
        spec.operations.push_back(std::move(op));
    }
    spec.check();
    return spec;
}

AnomalySpec load_anomaly(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("anomaly: bad JSON: ") + e.what());
    }
    AnomalySpec anomaly;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "overload") {
        anomaly.kind = AnomalySpec::Kind::Overload;
        anomaly.factor = parse_factor(j.at("factor"));
    } else if (kind == "slow_op") {
        anomaly.kind = AnomalySpec::Kind::SlowOp;
        anomaly.factor = parse_factor(j.at("factor"));
        anomaly.label = j.at("label").get<std::string>();
    } else if (kind == "reorder") {
        anomaly.kind = AnomalySpec::Kind::Reorder;
    } else {
        throw std::invalid_argument("anomaly: unknown kind '" + kind + "'");
    }
    if (anomaly.kind != AnomalySpec::Kind::Reorder && anomaly.factor <= Ratio(1))
        throw std::invalid_argument("anomaly: factor must be > 1");
    return anomaly;
}

namespace {

// Occurrence tree of a well-formed trace.
struct Occurrence {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::vector<Occurrence> children;
};

std::vector<Occurrence> build_forest(const TimedTrace& trace) {
    std::vector<Occurrence> roots;
    std::vector<Occurrence*> stack;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        if (trace.events[i].type == EventType::Begin) {
            Occurrence occ;
            occ.begin = i;
            occ.end = trace.pairing[i];
            auto& siblings = stack.empty() ? roots : stack.back()->children;
            siblings.push_back(occ);
            stack.push_back(&siblings.back());
        } else {
            stack.pop_back();
        }
    }
    return roots;
}

std::uint64_t scale_gap(std::uint64_t gap, const Ratio& factor) {
    const __int128 scaled = static_cast<__int128>(gap) * factor.num();
    const __int128 den = factor.den();
    return static_cast<std::uint64_t>((scaled + den / 2) / den); // round half up
}

// Rewrites timestamps bottom-up: the gaps between an occurrence's children
// are its self-time; scaled occurrences have each gap multiplied.
struct Rebuilder {
    const TimedTrace& original;
    const AnomalySpec& anomaly;
    std::vector<std::uint64_t> new_times;

    bool scaled(const std::string& op) const {
        if (anomaly.kind == AnomalySpec::Kind::Overload) return true;
        return anomaly.kind == AnomalySpec::Kind::SlowOp && op == anomaly.label;
    }

    std::uint64_t rebuild(const Occurrence& occ, std::uint64_t start) {
        const auto& events = original.events;
        const bool scale = scaled(events[occ.begin].operation);
        new_times[occ.begin] = start;
        std::uint64_t cursor = start;
        std::size_t prev_end = occ.begin;
        for (const Occurrence& child : occ.children) {
            std::uint64_t gap = events[child.begin].timestamp - events[prev_end].timestamp;
            if (scale) gap = scale_gap(gap, anomaly.factor);
            cursor = rebuild(child, cursor + gap);
            prev_end = child.end;
        }
        std::uint64_t tail = events[occ.end].timestamp - events[prev_end].timestamp;
        if (scale) tail = scale_gap(tail, anomaly.factor);
        cursor += tail;
        new_times[occ.end] = cursor;
        return cursor;
    }
};

void swap_labels(TimedTrace& trace, const Occurrence& a, const Occurrence& b) {
    std::swap(trace.events[a.begin].operation, trace.events[b.begin].operation);
    std::swap(trace.events[a.end].operation, trace.events[b.end].operation);
}

// First pair of adjacent siblings with different labels, pre-order.
bool reorder_first(TimedTrace& trace, const std::vector<Occurrence>& siblings) {
    for (std::size_t i = 0; i + 1 < siblings.size(); ++i) {
        if (trace.events[siblings[i].begin].operation !=
            trace.events[siblings[i + 1].begin].operation) {
            swap_labels(trace, siblings[i], siblings[i + 1]);
            return true;
        }
    }
    for (const Occurrence& occ : siblings)
        if (reorder_first(trace, occ.children)) return true;
    return false;
}

} // namespace

TimedTrace inject_anomaly(const TimedTrace& trace, const AnomalySpec& anomaly) {
    if (!is_well_formed(trace))
        throw std::invalid_argument("inject_anomaly: trace is not well-formed");

    const auto forest = build_forest(trace);

    if (anomaly.kind == AnomalySpec::Kind::Reorder) {
        TimedTrace out = trace;
        if (!reorder_first(out, forest))
            throw std::invalid_argument("inject_anomaly: no reorderable sibling pair");
        return out;
    }

    if (anomaly.kind == AnomalySpec::Kind::SlowOp) {
        bool present = false;
        for (const auto& ev : trace.events)
            if (ev.operation == anomaly.label) { present = true; break; }
        if (!present)
            throw std::invalid_argument("inject_anomaly: operation '" + anomaly.label +
                                        "' not present in trace");
    }

    Rebuilder rebuilder{trace, anomaly, std::vector<std::uint64_t>(trace.size(), 0)};
    // Top-level idle gaps between root occurrences are nobody's self-time;
    // they are preserved as-is.
    std::uint64_t cursor = trace.events.empty() ? 0 : trace.events.front().timestamp;
    std::size_t prev_end_index = 0;
    bool first = true;
    for (const Occurrence& root : forest) {
        if (!first)
            cursor += trace.events[root.begin].timestamp - trace.events[prev_end_index].timestamp;
        cursor = rebuilder.rebuild(root, cursor);
        prev_end_index = root.end;
        first = false;
    }
    TimedTrace out = trace;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.events[i].timestamp = rebuilder.new_times[i];
    return out;
}

} // namespace tkt
