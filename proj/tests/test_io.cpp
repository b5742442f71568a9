#include "eqp/io/analyses.hpp"

#include <gtest/gtest.h>

using namespace eqp;
using namespace eqp::io;

namespace {

const char* kCycleConfig = R"({
  "name": "pair",
  "base": {"kind": "cycle", "n": 2},
  "channels": [{"builtin": "cyclic_shift", "dim": 2}, {"builtin": "depolarizing", "dim": 2, "param": 0.5}],
  "assignment": [0, 1],
  "tolerances": {"tol": 1e-9},
  "seed": 4
})";

ErrorKind kind_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InternalInconsistency;
}

} // namespace

TEST(Config, RoundTripIsIdempotent) {
    const json once = to_json(parse_config(kCycleConfig));
    const json twice = to_json(config_from_json(once));
    EXPECT_EQ(once, twice);
    EXPECT_EQ(once.dump(), twice.dump());
}

TEST(Config, ExplicitKrausRoundTrip) {
    ProcessConfig c;
    c.dim = 2;
    c.base.perm = {0};
    ChannelSpec s;
    s.dim = 2;
    s.kraus = {CMat::Identity(2, 2) * cplx(0.0, 1.0)};
    c.channels = {s};
    c.assignment = {0};
    const json j = to_json(c);
    const ProcessConfig back = config_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.channels[0].kraus[0](0, 0), cplx(0.0, 1.0));
}

TEST(Config, ComplexAndMatrixLayout) {
    EXPECT_EQ(to_json(cplx(1.5, -2.0)), json::parse("[1.5, -2.0]"));
    CMat m(2, 2);
    m << 1.0, cplx(0, 1), 2.0, 3.0;
    EXPECT_EQ(to_json(m), json::parse("[[[1,0],[0,1]],[[2,0],[3,0]]]"));
    EXPECT_EQ(matrix_from_json(to_json(m), "m"), m);
}

TEST(Config, UnknownFieldsRejected) {
    EXPECT_EQ(kind_of(R"({"channels": [{"builtin": "identity", "dim": 2}], "colour": 1})"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of(R"({"channels": [{"builtin": "identity", "dim": 2, "lambda": 1}]})"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of(R"({"base": {"kind": "cycle", "n": 1, "extra": 0}, "channels": [{"builtin": "identity", "dim": 2}]})"),
              ErrorKind::ConfigError);
}

TEST(Config, InvalidValuesRejected) {
    EXPECT_EQ(kind_of(R"({"channels": []})"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of(R"({"channels": [{"builtin": "teleport", "dim": 2}]})"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of(R"({"channels": [{"builtin": "identity", "dim": 2}], "tolerances": {"tol": 0}})"), ErrorKind::ConfigError);
    EXPECT_EQ(kind_of(R"({"channels": [{"builtin": "identity", "dim": 2}], "analyses": ["everything"]})"),
              ErrorKind::ConfigError);
    EXPECT_EQ(kind_of(R"({"base": {"kind": "torus"}, "channels": [{"builtin": "identity", "dim": 2}]})"),
              ErrorKind::ConfigError);
}

TEST(Config, MalformedJsonReportsLineAndColumn) {
    try {
        parse_config("{\n  \"channels\": [\n    {\"builtin\": \"identity\", \"dim\": 2},\n  ]\n}\n");
        FAIL() << "expected ConfigError";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << e.what();
    }
}

TEST(Config, ProcessValidationIsAConfigError) {
    // Trace-increasing Kraus list.
    const char* text = R"({"channels": [{"kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]], [[[1,0],[0,0]],[[0,0],[0,0]]]]}]})";
    const ProcessConfig c = parse_config(text);
    try {
        build_process(c);
        FAIL() << "expected ConfigError";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
}

TEST(Config, BuiltinsBuildCptpChannels) {
    for (const auto& name : known_builtins()) {
        ChannelSpec s;
        s.builtin = name;
        s.dim = 2;
        s.param = 0.3;
        EXPECT_TRUE(is_cptp(make_channel(s)).ok()) << name;
    }
}

TEST(Report, DigestIsSha256OfCanonicalDump) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const json a = to_json(parse_config(kCycleConfig));
    const json b = to_json(parse_config(std::string(kCycleConfig) + "\n\n"));
    EXPECT_EQ(digest(a), digest(b));
}

TEST(Report, DeterministicUnderFixedSeed) {
    const ProcessConfig c = parse_config(kCycleConfig);
    const json r1 = make_report("analyze", to_json(c), run_process(build_process(c), options_from(c)));
    const json r2 = make_report("analyze", to_json(c), run_process(build_process(c), options_from(c)));
    EXPECT_EQ(r1.dump(), r2.dump());
    EXPECT_TRUE(r1.at("pass").get<bool>()) << r1.at("checks").dump(1);
}

TEST(Report, CsvSeries) {
    Series s;
    s.columns = {"n", "x"};
    s.rows = {{1, 0.5}, {2, 0.25}};
    EXPECT_EQ(s.to_csv(), "n,x\n1,0.5\n2,0.25\n");
}

TEST(Examples, RegistryHasFiveStableEntries) {
    const auto& r = example_registry();
    ASSERT_EQ(r.size(), 5u);
    const std::vector<std::string> names{"cyclic-shift", "quasiperiodic", "haar", "iid-decorated-shift", "decorated-cycle"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        EXPECT_EQ(r[i].name, names[i]);
        EXPECT_FALSE(r[i].anchor.empty());
    }
    EXPECT_EQ(&example_registry(), &r);
}

TEST(Examples, CyclicShiftD3HasGammaOfOrderThree) {
    ExampleRequest req;
    req.name = "cyclic-shift";
    req.d = 3;
    const Outcome out = run_example(req);
    EXPECT_TRUE(out.checks.all_pass()) << out.checks.to_json().dump(1);
    EXPECT_EQ(out.results.at("m").get<std::size_t>(), 3u);
    EXPECT_EQ(out.results.at("gamma_order").get<std::size_t>(), 3u);
}

TEST(Examples, EveryBuiltinPasses) {
    for (const auto& e : example_registry()) {
        ExampleRequest req;
        req.name = e.name;
        req.horizon = 20000;
        req.samples = 2000;
        const Outcome out = run_example(req);
        EXPECT_TRUE(out.checks.all_pass()) << e.name << ": " << out.checks.to_json().dump(1);
    }
}

TEST(Analyses, IidAndRotationSuites) {
    const char* iid = R"({
      "base": {"kind": "iid", "probs": [0.5, 0.5]},
      "channels": [{"kraus": [[[[0,0],[0,0],[1,0]], [[1,0],[0,0],[0,0]], [[0,0],[1,0],[0,0]]]]},
                   {"kraus": [[[[0,0],[0,0],[1,0]], [[0,1],[0,0],[0,0]], [[0,0],[-1,0],[0,0]]]]}],
      "samples": 500, "seed": 2})";
    const ProcessConfig ci = parse_config(iid);
    const Outcome oi = run_process(build_process(ci), options_from(ci));
    EXPECT_TRUE(oi.checks.all_pass()) << oi.checks.to_json().dump(1);
    EXPECT_EQ(oi.results.at("gamma_order").get<std::size_t>(), 3u);
    EXPECT_EQ(oi.results.at("iid_probe").at("tau_values"), json::array({3}));

    const char* rot = R"({
      "base": {"kind": "rotation", "t": 0.6180339887, "breakpoints": [0, 0.6180339887, 1]},
      "channels": [{"builtin": "dephasing", "dim": 2, "param": 1}, {"builtin": "cyclic_shift", "dim": 2}],
      "horizon": 2000})";
    const ProcessConfig cr = parse_config(rot);
    const Outcome orot = run_process(build_process(cr), options_from(cr));
    EXPECT_TRUE(orot.checks.all_pass()) << orot.checks.to_json().dump(1);
}
