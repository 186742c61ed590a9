// tktail: mine timed automata from begin/end execution traces, check
// traces against mined models, and run sensitivity/specificity studies.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tkt/evaluate.hpp"
#include "tkt/miner.hpp"
#include "tkt/workload.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitRejections = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

struct PolicyFlags {
    std::string config_id;
    std::string policy;
    std::string param;
    std::string absolute = "on";

    tkt::PolicyConfig resolve() const {
        if (!config_id.empty()) {
            if (!policy.empty() || !param.empty())
                throw std::invalid_argument("--config excludes --policy/--param");
            return tkt::config_from_id(config_id);
        }
        bool absolute_guards = true;
        if (absolute == "on") absolute_guards = true;
        else if (absolute == "off") absolute_guards = false;
        else throw std::invalid_argument("--absolute wants on|off");
        if (policy.empty()) return tkt::config_from_id("M1");
        if (policy == "minmax") {
            if (param.empty()) throw std::invalid_argument("minmax policy needs --param <epsilon>");
            return tkt::PolicyConfig::min_max(tkt::Ratio::from_decimal(param), absolute_guards);
        }
        if (policy == "gamma") {
            if (param == "0.95")
                return tkt::PolicyConfig::gamma_confidence(tkt::GammaLevel::G95, absolute_guards);
            if (param == "0.99")
                return tkt::PolicyConfig::gamma_confidence(tkt::GammaLevel::G99, absolute_guards);
            throw std::invalid_argument("gamma policy wants --param 0.95 or 0.99");
        }
        throw std::invalid_argument("--policy wants minmax|gamma");
    }
};

std::vector<tkt::TimedTrace> load_corpus(const std::string& path) {
    const auto traces = tkt::parse_corpus(read_file(path));
    if (traces.empty()) throw tkt::ParseError(1, "empty corpus in '" + path + "'");
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto violations = tkt::validate(traces[i]);
        if (!violations.empty())
            throw std::runtime_error("'" + path + "': trace " + std::to_string(i + 1) + ": " +
                                     violations.front().describe());
    }
    return traces;
}

int cmd_mine(const std::string& corpus_path, const PolicyFlags& flags, std::uint32_t k,
             const std::string& model_out, bool dump_stages) {
    tkt::PolicyConfig policy;
    try {
        policy = flags.resolve();
        if (k == 0) throw std::invalid_argument("--k must be >= 1");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    std::vector<tkt::TimedTrace> traces;
    try {
        traces = load_corpus(corpus_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    tkt::MinerConfig miner_config{k, policy.absolute_guards};
    tkt::MiningStats stats;
    tkt::PipelineStages stages;
    const tkt::TimedAutomaton model =
        tkt::mine(traces, miner_config, policy, &stats, dump_stages ? &stages : nullptr);

    try {
        write_file(model_out, tkt::serialize_model(model));
        if (dump_stages) {
            write_file(model_out + ".initial", tkt::serialize_model(stages.initial));
            write_file(model_out + ".merged", tkt::serialize_model(stages.merged));
            write_file(model_out + ".refined", tkt::serialize_model(stages.refined));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    std::printf("traces %zu\nevents %zu\nstates %u\ntransitions %zu\nclocks %zu\nelapsed_ms %.3f\n",
                stats.traces, stats.events, model.num_states, model.transitions.size(),
                model.clocks.size(), stats.elapsed_ms);
    return kExitOk;
}

int cmd_check(const std::string& model_path, const std::string& traces_path,
              bool no_absolute) {
    tkt::TimedAutomaton model;
    try {
        model = tkt::parse_model(read_file(model_path));
    } catch (const std::exception& e) {
        std::cerr << "error: model: " << e.what() << "\n";
        return kExitConfigError;
    }
    std::vector<tkt::TimedTrace> traces;
    try {
        traces = load_corpus(traces_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    bool any_rejected = false;
    for (const tkt::TimedTrace& trace : traces) {
        const auto result = tkt::accepts(model, trace, !no_absolute);
        if (result.accepted) {
            std::cout << "ACCEPT\n";
        } else {
            any_rejected = true;
            std::cout << "REJECT after " << result.failure->events_consumed << " events";
            if (!result.failure->detail.empty()) std::cout << ": " << result.failure->detail;
            std::cout << "\n";
        }
    }
    return any_rejected ? kExitRejections : kExitOk;
}

int cmd_gen(const std::string& spec_path, std::size_t n, std::optional<std::uint64_t> seed,
            const std::string& anomaly_path, const std::string& out_path) {
    try {
        tkt::WorkloadSpec spec = tkt::load_workload(read_file(spec_path));
        if (seed) spec.seed = *seed;
        auto traces = tkt::generate_corpus(spec, n);
        if (!anomaly_path.empty()) {
            const tkt::AnomalySpec anomaly = tkt::load_anomaly(read_file(anomaly_path));
            for (auto& trace : traces) trace = tkt::inject_anomaly(trace, anomaly);
        }
        write_file(out_path, tkt::serialize_corpus(traces));
        std::printf("traces %zu\nevents %zu\n", traces.size(), tkt::total_events(traces));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

int cmd_eval(const std::string& valid_path, const std::string& invalid_path,
             const std::string& configs_csv, const std::string& fractions_csv,
             const tkt::EvalOptions& options, std::uint32_t extraction_reps,
             const std::string& report_out) {
    std::vector<tkt::PolicyConfig> configs;
    std::vector<double> fractions;
    try {
        std::stringstream ids(configs_csv);
        std::string id;
        while (std::getline(ids, id, ','))
            if (!id.empty()) configs.push_back(tkt::config_from_id(id));
        if (configs.empty()) throw std::invalid_argument("--configs is empty");
        std::stringstream fracs(fractions_csv);
        std::string frac;
        while (std::getline(fracs, frac, ','))
            if (!frac.empty()) fractions.push_back(std::stod(frac));
        if (fractions.empty()) fractions.push_back(1.0);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    std::vector<tkt::TimedTrace> valid, invalid;
    try {
        valid = load_corpus(valid_path);
        if (!invalid_path.empty()) invalid = load_corpus(invalid_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    std::vector<tkt::EvalRow> rows;
    try {
        rows = tkt::subset_study(valid, invalid, configs, fractions, extraction_reps, options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        if (!report_out.empty()) write_file(report_out, tkt::report_tsv(rows));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    std::cout << tkt::report_pretty(rows);
    return kExitOk;
}

int cmd_export(const std::string& model_path, const std::string& dot_out) {
    tkt::TimedAutomaton model;
    try {
        model = tkt::parse_model(read_file(model_path));
    } catch (const std::exception& e) {
        std::cerr << "error: model: " << e.what() << "\n";
        return kExitConfigError;
    }
    try {
        write_file(dot_out, tkt::to_dot(model));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"timed-automaton mining from begin/end execution traces"};
    app.require_subcommand(1);

    // mine
    auto* mine = app.add_subcommand("mine", "mine a timed automaton from a trace corpus");
    std::string mine_corpus, mine_out = "model.tkt";
    PolicyFlags mine_flags;
    std::uint32_t mine_k = 2;
    bool mine_dump_stages = false;
    mine->add_option("corpus", mine_corpus, "trace corpus file")->required();
    mine->add_option("-o,--out", mine_out, "model output path");
    mine->add_option("--config", mine_flags.config_id, "configuration id (M1..M16, G1..G4)");
    mine->add_option("--policy", mine_flags.policy, "guard policy: minmax|gamma");
    mine->add_option("--param", mine_flags.param, "policy parameter (epsilon or 0.95/0.99)");
    mine->add_option("--absolute", mine_flags.absolute, "absolute-clock guards: on|off");
    mine->add_option("--k", mine_k, "future length for state merging (default 2)");
    mine->add_flag("--dump-stages", mine_dump_stages,
                   "also write the initial/merged/refined automata");

    // check
    auto* check = app.add_subcommand("check", "check traces against a model");
    std::string check_model, check_traces;
    bool check_no_absolute = false;
    check->add_option("model", check_model, "model file")->required();
    check->add_option("traces", check_traces, "trace corpus file")->required();
    check->add_flag("--no-absolute", check_no_absolute, "ignore absolute-clock guards");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic trace corpus");
    std::string gen_spec, gen_out = "corpus.txt", gen_anomaly;
    std::size_t gen_n = 10;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--spec", gen_spec, "workload spec (JSON)")->required();
    gen->add_option("-n,--count", gen_n, "number of traces");
    gen->add_option("--seed", gen_seed, "seed override");
    gen->add_option("--anomaly", gen_anomaly, "anomaly spec (JSON) applied to every trace");
    gen->add_option("-o,--out", gen_out, "corpus output path");

    // eval
    auto* eval = app.add_subcommand("eval", "k-fold sensitivity/specificity study");
    std::string eval_valid, eval_invalid, eval_configs = "M1", eval_fractions, eval_out;
    tkt::EvalOptions eval_options;
    std::uint32_t eval_extractions = 1;
    eval->add_option("--valid", eval_valid, "valid trace corpus")->required();
    eval->add_option("--invalid", eval_invalid, "invalid trace corpus");
    eval->add_option("--configs", eval_configs, "comma-separated configuration ids");
    eval->add_option("--fractions", eval_fractions, "comma-separated training fractions");
    eval->add_option("--folds", eval_options.folds, "folds (default 10)");
    eval->add_option("--reps", eval_options.repetitions, "fold repetitions (default 5)");
    eval->add_option("--extraction-reps", eval_extractions, "subset draws per fraction");
    eval->add_option("--k", eval_options.k, "future length for state merging");
    eval->add_option("--seed", eval_options.seed, "seed");
    eval->add_option("-o,--out", eval_out, "report TSV output path");

    // export
    auto* exp = app.add_subcommand("export", "export a model as Graphviz DOT");
    std::string export_model, export_out = "model.dot";
    exp->add_option("model", export_model, "model file")->required();
    exp->add_option("-o,--out", export_out, "DOT output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    if (mine->parsed())
        return cmd_mine(mine_corpus, mine_flags, mine_k, mine_out, mine_dump_stages);
    if (check->parsed())
        return cmd_check(check_model, check_traces, check_no_absolute);
    if (gen->parsed())
        return cmd_gen(gen_spec, gen_n, gen_seed, gen_anomaly, gen_out);
    if (eval->parsed())
        return cmd_eval(eval_valid, eval_invalid, eval_configs, eval_fractions, eval_options,
                        eval_extractions, eval_out);
    if (exp->parsed())
        return cmd_export(export_model, export_out);
    return kExitConfigError;
}
