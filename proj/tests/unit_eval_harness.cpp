#include <doctest.h>

#include "tkt/evaluate.hpp"
#include "tkt/miner.hpp"
#include "tkt/workload.hpp"

#include "support.hpp"

using namespace tkt;

namespace {

WorkloadSpec single_op_spec(std::uint64_t lo, std::uint64_t hi, std::uint64_t seed) {
    WorkloadSpec spec;
    OperationSpec op;
    op.label = "f";
    op.duration.kind = DurationDist::Kind::Uniform;
    op.duration.lo = lo;
    op.duration.hi = hi;
    spec.operations.push_back(op);
    spec.roots = {"f"};
    spec.seed = seed;
    return spec;
}

} // namespace

TEST_CASE("a degenerate distribution generates identical traces") {
    const auto traces = generate_corpus(single_op_spec(3, 3, 1), 2);
    REQUIRE(traces.size() == 2);
    for (const TimedTrace& t : traces) CHECK(serialize_trace(t) == "B f 0\nE f 3\n");
}

TEST_CASE("generation is deterministic given the seed") {
    const WorkloadSpec spec = tkt_test::random_workload(5);
    CHECK(serialize_corpus(generate_corpus(spec, 20)) ==
          serialize_corpus(generate_corpus(spec, 20)));

    WorkloadSpec other = spec;
    other.seed ^= 1;
    CHECK(serialize_corpus(generate_corpus(other, 20)) !=
          serialize_corpus(generate_corpus(spec, 20)));
}

TEST_CASE("generated traces are well-formed and nest children properly") {
    WorkloadSpec spec;
    OperationSpec f;
    f.label = "f";
    f.duration = {DurationDist::Kind::Uniform, 4, 8, 0, 0};
    f.children = {"g"};
    OperationSpec g;
    g.label = "g";
    g.duration = {DurationDist::Kind::Uniform, 1, 3, 0, 0};
    g.rep_min = 1;
    g.rep_max = 2;
    spec.operations = {f, g};
    spec.roots = {"f"};
    spec.seed = 9;

    const auto traces = generate_corpus(spec, 50);
    for (const TimedTrace& t : traces) {
        CHECK(validate(t).empty());
        // Every g interval nests inside the f interval.
        REQUIRE(t.events.front().operation == "f");
        const auto f_end = t.events.back().timestamp;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t.events[i].operation == "g") {
                CHECK(t.events[i].timestamp >= t.events.front().timestamp);
                CHECK(t.events[i].timestamp <= f_end);
            }
    }
}

TEST_CASE("every generated trace is well-formed across random workloads") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const WorkloadSpec spec = tkt_test::random_workload(seed);
        for (const TimedTrace& t : generate_corpus(spec, 15))
            CHECK(validate(t).empty());
    }
}

TEST_CASE("workload validation rejects bad specs") {
    WorkloadSpec spec = single_op_spec(3, 3, 1);
    spec.roots = {"nope"};
    CHECK_THROWS_AS(spec.check(), std::invalid_argument);

    WorkloadSpec cyclic = single_op_spec(3, 3, 1);
    cyclic.operations[0].children = {"f"}; // self-cycle
    CHECK_THROWS_AS(cyclic.check(), std::invalid_argument);

    WorkloadSpec bad_range = single_op_spec(5, 2, 1);
    CHECK_THROWS_AS(bad_range.check(), std::invalid_argument);
}

TEST_CASE("workload JSON loading") {
    const char* text = R"({
      "seed": 7,
      "roots": ["root"],
      "operations": [
        {"label": "root", "duration": {"uniform": [5, 10]}, "children": ["leaf"]},
        {"label": "leaf", "duration": {"normal": [6, 1.5]}, "repetition": [1, 3]}
      ]
    })";
    const WorkloadSpec spec = load_workload(text);
    CHECK(spec.seed == 7);
    CHECK(spec.operations.size() == 2);
    CHECK(spec.find("leaf").rep_max == 3);
    CHECK(spec.find("leaf").duration.kind == DurationDist::Kind::Normal);
    CHECK_THROWS_AS(load_workload("{"), std::invalid_argument);
    CHECK_THROWS_AS(load_workload(R"({"roots": ["x"], "operations": []})"),
                    std::invalid_argument);
}

TEST_CASE("overload scales a single-operation trace") {
    const TimedTrace trace = parse_trace("B f 0\nE f 10\n");
    AnomalySpec anomaly;
    anomaly.kind = AnomalySpec::Kind::Overload;
    anomaly.factor = Ratio(3);
    const TimedTrace scaled = inject_anomaly(trace, anomaly);
    CHECK(serialize_trace(scaled) == "B f 0\nE f 30\n");
}

TEST_CASE("anomaly factors at or below one are rejected at load time") {
    CHECK_THROWS_AS(load_anomaly(R"({"kind": "overload", "factor": 1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(load_anomaly(R"({"kind": "overload", "factor": 0.5})"),
                    std::invalid_argument);
    const AnomalySpec ok = load_anomaly(R"({"kind": "overload", "factor": 2.5})");
    CHECK(ok.factor == Ratio(5, 2));
    const AnomalySpec slow = load_anomaly(R"({"kind": "slow_op", "factor": 4, "label": "g"})");
    CHECK(slow.label == "g");
    CHECK(load_anomaly(R"({"kind": "reorder"})").kind == AnomalySpec::Kind::Reorder);
}

TEST_CASE("slow_op grows only the named operation and its enclosing spans") {
    // a = [0, 10], g = [2, 6] (self 4), h = [7, 9] (self 2); a's self-time
    // is 2 + 1 + 1 = 4. With g's self-time x4: g = [2, 18], h = [19, 21],
    // a ends at 22.
    const TimedTrace trace = parse_trace("B a 0\nB g 2\nE g 6\nB h 7\nE h 9\nE a 10\n");
    AnomalySpec anomaly;
    anomaly.kind = AnomalySpec::Kind::SlowOp;
    anomaly.factor = Ratio(4);
    anomaly.label = "g";
    const TimedTrace slowed = inject_anomaly(trace, anomaly);
    CHECK(serialize_trace(slowed) ==
          "B a 0\nB g 2\nE g 18\nB h 19\nE h 21\nE a 22\n");
    CHECK(validate(slowed).empty());

    AnomalySpec missing = anomaly;
    missing.label = "zz";
    CHECK_THROWS_AS(inject_anomaly(trace, missing), std::invalid_argument);
}

TEST_CASE("overload with a fractional factor rounds gaps to nearest") {
    const TimedTrace trace = parse_trace("B a 0\nB g 2\nE g 5\nE a 6\n");
    AnomalySpec anomaly;
    anomaly.kind = AnomalySpec::Kind::Overload;
    anomaly.factor = Ratio(3, 2);
    // Gaps: a-pre 2 -> 3, g-self 3 -> 4.5 -> 5 (rounded up), a-post 1 -> 2 (1.5 up).
    const TimedTrace scaled = inject_anomaly(trace, anomaly);
    CHECK(serialize_trace(scaled) == "B a 0\nB g 3\nE g 8\nE a 10\n");
    CHECK(validate(scaled).empty());
}

TEST_CASE("reorder swaps the first differing sibling labels") {
    const TimedTrace trace = parse_trace("B a 0\nB g 1\nE g 3\nB h 4\nE h 6\nE a 7\n");
    AnomalySpec anomaly;
    anomaly.kind = AnomalySpec::Kind::Reorder;
    const TimedTrace reordered = inject_anomaly(trace, anomaly);
    CHECK(serialize_trace(reordered) ==
          "B a 0\nB h 1\nE h 3\nB g 4\nE g 6\nE a 7\n");
    CHECK(validate(reordered).empty());

    const TimedTrace same_labels = parse_trace("B a 0\nB g 1\nE g 2\nB g 3\nE g 4\nE a 5\n");
    CHECK_THROWS_AS(inject_anomaly(same_labels, anomaly), std::invalid_argument);
}

TEST_CASE("kfold sensitivity is 1.0 on identical traces") {
    std::vector<TimedTrace> valid(10, parse_trace("B f 0\nE f 3\n"));
    EvalOptions options;
    options.folds = 10;
    options.repetitions = 1;
    options.seed = 3;
    const auto rows = kfold_evaluate(valid, {}, {config_from_id("M1")}, options);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].sensitivity == doctest::Approx(1.0));
    CHECK_FALSE(rows[0].has_specificity);
}

TEST_CASE("specificity against the training traces themselves is 0") {
    const auto corpus = generate_corpus(single_op_spec(3, 3, 5), 20);
    EvalOptions options;
    options.folds = 10;
    options.repetitions = 1;
    options.seed = 3;
    const auto rows = kfold_evaluate(corpus, corpus, {config_from_id("M1")}, options);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].specificity == doctest::Approx(0.0));
    CHECK(rows[0].harmonic_mean ==
          doctest::Approx(harmonic_mean(rows[0].sensitivity, rows[0].specificity)));
}

TEST_CASE("kfold rejects too few traces or bad options") {
    std::vector<TimedTrace> five(5, parse_trace("B f 0\nE f 3\n"));
    EvalOptions options;
    options.folds = 10;
    CHECK_THROWS_AS(kfold_evaluate(five, {}, {config_from_id("M1")}, options),
                    std::invalid_argument);
}

TEST_CASE("disabling absolute guards never rejects more traces") {
    const WorkloadSpec spec = tkt_test::random_workload(31);
    const auto corpus = generate_corpus(spec, 30);
    const std::vector<TimedTrace> training(corpus.begin(), corpus.begin() + 20);

    const PolicyConfig with_abs = config_from_id("M1");
    const PolicyConfig without_abs = config_from_id("M2");
    const TimedAutomaton model_abs = mine(training, MinerConfig{2, true}, with_abs);
    const TimedAutomaton model_rel = mine(training, MinerConfig{2, false}, without_abs);
    for (const TimedTrace& t : corpus) {
        if (accepts(model_abs, t, true).accepted)
            CHECK(accepts(model_rel, t, true).accepted);
    }
}

TEST_CASE("subset_study at fraction 1.0 equals kfold_evaluate") {
    const WorkloadSpec spec = tkt_test::random_workload(17);
    auto valid = generate_corpus(spec, 30);
    auto invalid = valid;
    AnomalySpec anomaly;
    anomaly.kind = AnomalySpec::Kind::Overload;
    anomaly.factor = Ratio(3);
    for (auto& t : invalid) t = inject_anomaly(t, anomaly);

    EvalOptions options;
    options.folds = 10;
    options.repetitions = 2;
    options.seed = 12;
    const std::vector<PolicyConfig> configs = {config_from_id("M1"), config_from_id("G1")};

    const auto direct = kfold_evaluate(valid, invalid, configs, options);
    const auto study = subset_study(valid, invalid, configs, {1.0}, 1, options);
    REQUIRE(direct.size() == study.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(direct[i].config_id == study[i].config_id);
        CHECK(direct[i].sensitivity == study[i].sensitivity);
        CHECK(direct[i].specificity == study[i].specificity);
        CHECK(direct[i].mean_states == study[i].mean_states);
    }
}

TEST_CASE("subset_study emits one row per config and fraction") {
    const WorkloadSpec spec = tkt_test::random_workload(23);
    const auto valid = generate_corpus(spec, 40);
    EvalOptions options;
    options.folds = 4;
    options.repetitions = 1;
    options.seed = 5;
    const auto rows = subset_study(valid, {}, {config_from_id("M1"), config_from_id("M2")},
                                   {0.25, 0.5, 1.0}, 2, options);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0].fraction == doctest::Approx(0.25));
    CHECK(rows[2].fraction == doctest::Approx(1.0));

    CHECK_THROWS_AS(subset_study(valid, {}, {config_from_id("M1")}, {0.05}, 1, options),
                    std::invalid_argument); // 2 traces < 4 folds
    CHECK_THROWS_AS(subset_study(valid, {}, {config_from_id("M1")}, {1.5}, 1, options),
                    std::invalid_argument);
}

TEST_CASE("reports are deterministic apart from elapsed time") {
    const WorkloadSpec spec = tkt_test::random_workload(41);
    const auto valid = generate_corpus(spec, 20);
    EvalOptions options;
    options.folds = 5;
    options.repetitions = 2;
    options.seed = 77;
    const auto a = kfold_evaluate(valid, {}, {config_from_id("M1")}, options);
    const auto b = kfold_evaluate(valid, {}, {config_from_id("M1")}, options);

    auto strip_time = [](std::string tsv) {
        std::string out;
        std::size_t pos = 0;
        while (pos < tsv.size()) {
            const auto nl = tsv.find('\n', pos);
            std::string line = tsv.substr(pos, nl - pos);
            out += line.substr(0, line.rfind('\t'));
            out += '\n';
            pos = nl + 1;
        }
        return out;
    };
    CHECK(strip_time(report_tsv(a)) == strip_time(report_tsv(b)));
    CHECK(report_tsv(a).substr(0, report_tsv(a).find('\n'))
              .find("mean_inference_ms") != std::string::npos);
}

TEST_CASE("sensitivity trends upward with the training fraction") {
    // Statistical trend on a corpus with timing variety; allow slack.
    WorkloadSpec spec = single_op_spec(8, 16, 99);
    const auto valid = generate_corpus(spec, 60);
    EvalOptions options;
    options.folds = 5;
    options.repetitions = 1;
    options.seed = 10;
    const auto rows =
        subset_study(valid, {}, {config_from_id("M1")}, {0.2, 1.0}, 3, options);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].sensitivity >= rows[0].sensitivity - 0.05);
}
