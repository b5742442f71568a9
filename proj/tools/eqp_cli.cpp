// eqp: command-line front end.
//
//   eqp analyze  --config process.json   finite-base / i.i.d. / rotation suite
//   eqp ehk      --config channel.json   single-channel Perron-Frobenius data
//   eqp simulate --name quasiperiodic|haar|iid-decorated-shift
//   eqp examples --name <built-in>
//   eqp list
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error,
// 3 numerical certificate failure.

#include "eqp/io/analyses.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using namespace eqp;
using namespace eqp::io;

struct Flags {
    std::string config;
    std::string out;
    std::string format = "json";
    std::string name;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<std::size_t> horizon;
    std::optional<std::size_t> samples;
    std::optional<double> t;
    std::optional<Index> d;
};

int emit(const std::string& verb, const json& input, const Outcome& out, const Flags& f) {
    const json report = make_report(verb, input, out);
    const std::string text = report.dump(2) + "\n";
    if (f.out.empty()) {
        std::cout << (f.format == "csv" ? out.series.to_csv() : text);
    } else {
        write_file(f.out, text);
        if (f.format == "csv") write_file(f.out + ".csv", out.series.to_csv());
    }
    for (const auto& c : out.checks.checks())
        if (!c.pass)
            std::cerr << "check failed: " << c.name << " = " << c.value << " (required " << c.relation << ' '
                      << c.threshold << ")\n";
    return out.checks.all_pass() ? 0 : 1;
}

ProcessConfig load_config(const Flags& f) {
    if (f.config.empty()) config_error("--config is required");
    ProcessConfig c = parse_config(read_file(f.config));
    if (f.seed) c.seed = *f.seed;
    if (f.tol) {
        if (!(*f.tol > 0.0)) config_error("--tol must be positive");
        c.tolerances.tol = *f.tol;
    }
    if (f.horizon) c.horizon = *f.horizon;
    if (f.samples) c.samples = *f.samples;
    return c;
}

int run_analyze(const Flags& f) {
    const ProcessConfig c = load_config(f);
    const ProcessInstance process = build_process(c);
    return emit("analyze", to_json(c), run_process(process, options_from(c)), f);
}

int run_ehk(const Flags& f) {
    const ProcessConfig c = load_config(f);
    if (c.channels.size() != 1) config_error("ehk: expected exactly one channel");
    KrausChannel ch = [&] {
        try {
            return make_channel(c.channels.front());
        } catch (const Error& e) {
            if (e.is_numerical()) throw;
            config_error(e.what());
        }
    }();
    return emit("ehk", to_json(c), run_ehk(ch, options_from(c)), f);
}

ExampleRequest request_from(const Flags& f) {
    ExampleRequest r;
    r.name = f.name;
    if (f.d) r.d = *f.d;
    if (f.t) r.t = *f.t;
    if (f.horizon) r.horizon = *f.horizon;
    if (f.samples) r.samples = *f.samples;
    if (f.seed) r.seed = *f.seed;
    return r;
}

int run_simulate(const Flags& f) {
    const ExampleRequest r = request_from(f);
    if (r.name != "quasiperiodic" && r.name != "haar" && r.name != "iid-decorated-shift")
        config_error("simulate: --name must be quasiperiodic, haar or iid-decorated-shift");
    return emit("simulate", to_json(r), run_example(r), f);
}

int run_examples(const Flags& f) {
    const ExampleRequest r = request_from(f);
    bool known = false;
    for (const auto& e : example_registry()) known = known || e.name == r.name;
    if (!known) config_error("examples: unknown --name '" + r.name + "' (see `eqp list`)");
    return emit("examples", to_json(r), run_example(r), f);
}

int run_list() {
    json a = json::array();
    for (const auto& e : example_registry())
        a.push_back({{"name", e.name}, {"anchor", e.anchor}, {"description", e.description}});
    std::cout << a.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perron-Frobenius structure of quantum channels and ergodic quantum processes", "eqp"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    Flags f;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", f.out, "report path (default: stdout)");
        sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", f.seed, "random seed");
        sub->add_option("--tol", f.tol, "spectral tolerance");
        sub->add_option("--horizon", f.horizon, "orbit length");
        sub->add_option("--samples", f.samples, "sample count");
    };
    auto* analyze = app.add_subcommand("analyze", "analyse an ergodic quantum process");
    auto* ehk = app.add_subcommand("ehk", "analyse a single channel");
    auto* simulate = app.add_subcommand("simulate", "trajectory experiments on infinite bases");
    auto* examples = app.add_subcommand("examples", "run a built-in example");
    auto* list = app.add_subcommand("list", "list built-in examples");
    (void)list;
    for (auto* sub : {analyze, ehk}) {
        sub->add_option("--config", f.config, "process configuration (JSON)")->required();
        common(sub);
    }
    for (auto* sub : {simulate, examples}) {
        sub->add_option("--name", f.name, "example name")->required();
        sub->add_option("--d", f.d, "dimension");
        sub->add_option("--t", f.t, "rotation number");
        common(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*analyze) return run_analyze(f);
        if (*ehk) return run_ehk(f);
        if (*simulate) return run_simulate(f);
        if (*examples) return run_examples(f);
        return run_list();
    } catch (const Error& e) {
        std::cerr << "eqp: " << e.what() << "\n";
        return e.is_numerical() ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "eqp: " << e.what() << "\n";
        return 2;
    }
}
