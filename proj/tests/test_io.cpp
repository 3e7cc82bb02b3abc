#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "admm/engine.hpp"
#include "admm/io.hpp"
#include "admm/network.hpp"
#include "admm/problem.hpp"
#include "doctest.h"

using namespace admm;

namespace {

std::vector<TraceRecord> synthetic_trace(bool with_monitor, bool with_gains) {
    std::vector<TraceRecord> trace;
    for (int k = 1; k <= 3; ++k) {
        TraceRecord row;
        row.iteration = 5 * k;
        row.residual = 0.1 / k;
        if (with_monitor && k != 2) row.lyapunov = 3.25 / k;
        row.objective = -1.5 + k;
        row.energy = {0.5 * k, 1e-12 * k};
        if (with_gains) {
            row.gain_rows = {{{0, 0.6}, {1, 0.4}}, {{0, 0.25}, {1, 0.75}}};
        }
        row.wall_seconds = 0.125 * k;
        trace.push_back(std::move(row));
    }
    return trace;
}

bool same_trace(const std::vector<TraceRecord>& a,
                const std::vector<TraceRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].iteration != b[i].iteration) return false;
        if (a[i].residual != b[i].residual) return false;
        if (a[i].lyapunov.has_value() != b[i].lyapunov.has_value())
            return false;
        if (a[i].lyapunov && *a[i].lyapunov != *b[i].lyapunov) return false;
        if (a[i].objective != b[i].objective) return false;
        if (a[i].energy != b[i].energy) return false;
        if (a[i].gain_rows != b[i].gain_rows) return false;
        if (a[i].wall_seconds != b[i].wall_seconds) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("topology documents round-trip and normalize on load") {
    Topology topo = gen_augmented_ring(7, 3, 2);
    Topology back = topology_from_json(topology_to_json(topo));
    CHECK(back.agent_count == topo.agent_count);
    CHECK(back.edges == topo.edges);

    nlohmann::json doc;
    doc["agents"] = 3;
    doc["edges"] = {{1, 0}, {2, 1}, {0, 1}, {0, 2}};
    Topology loaded = topology_from_json(doc);
    CHECK(loaded.edges ==
          std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});

    CHECK_THROWS_AS(topology_from_json(nlohmann::json::object()),
                    std::invalid_argument);
    doc["edges"] = {{0, 1, 2}};
    CHECK_THROWS_AS(topology_from_json(doc), std::invalid_argument);
}

TEST_CASE("problem documents survive a dump/parse cycle bit for bit") {
    CommMatrix S = build_comm_matrix(gen_ring(5));
    for (ObjectiveKind kind :
         {ObjectiveKind::quadratic, ObjectiveKind::logsumexp}) {
        ProblemSpec spec = sample_problem(S, 2, kind, 3);
        const std::string text = problem_to_json(spec).dump();
        ProblemSpec back = problem_from_json(nlohmann::json::parse(text));
        REQUIRE(back.agent_count == spec.agent_count);
        REQUIRE(back.dim == spec.dim);
        for (int i = 0; i < 5; ++i) {
            REQUIRE(back.objectives[i].is_quadratic() ==
                    spec.objectives[i].is_quadratic());
            if (spec.objectives[i].is_quadratic()) {
                CHECK(back.objectives[i].quadratic().Q.cwiseEqual(
                    spec.objectives[i].quadratic().Q).all());
                CHECK(back.objectives[i].quadratic().c.cwiseEqual(
                    spec.objectives[i].quadratic().c).all());
            } else {
                CHECK(back.objectives[i].logsumexp().B.cwiseEqual(
                    spec.objectives[i].logsumexp().B).all());
                CHECK(back.objectives[i].logsumexp().b.cwiseEqual(
                    spec.objectives[i].logsumexp().b).all());
            }
        }
        CHECK(back.constraints.structure == spec.constraints.structure);
        REQUIRE(back.constraints.blocks.size() ==
                spec.constraints.blocks.size());
        for (const auto& [key, block] : spec.constraints.blocks) {
            CHECK(back.constraints.blocks.at(key).cwiseEqual(block).all());
        }
    }

    nlohmann::json doc = problem_to_json(
        sample_problem(S, 1, ObjectiveKind::quadratic, 1));
    doc["objectives"][0]["kind"] = "cubic";
    CHECK_THROWS_AS(problem_from_json(doc), std::invalid_argument);
}

TEST_CASE("an empty config document yields the documented defaults") {
    ExperimentConfig c =
        experiment_config_from_json(nlohmann::json::object());
    CHECK(c.version == 1);
    CHECK(c.problem.kind == "quadratic");
    CHECK(c.problem.dim == 2);
    CHECK(c.topology.shape == "augmented_ring");
    CHECK(c.topology.agents == 5);
    CHECK(c.topology.max_degree == 3);
    CHECK(c.run.mode == Mode::iterative);
    CHECK(c.run.adaptive);
    CHECK(c.run.tol == 1e-4);
    CHECK(c.run.max_iter == 30000);
    CHECK(c.run.alpha == 0.1);
    CHECK(c.run.w == 1.0);
    CHECK(c.run.gamma == 0.005);
    CHECK(c.run.adapt_every == 1);
    CHECK(c.run.threads == 1);
    CHECK(c.run.beta0 == RunConfig::Beta0::uniform);
    CHECK(c.output.format == "csv");
    CHECK_NOTHROW(c.run.validate());
}

TEST_CASE("experiment configs round-trip through their document form") {
    ExperimentConfig c;
    c.problem.kind = "logsumexp";
    c.problem.dim = 4;
    c.problem.seed = 17;
    c.topology.shape = "ring";
    c.topology.agents = 12;
    c.topology.max_degree = 4;
    c.topology.seed = 9;
    c.run.mode = Mode::exact;
    c.run.adaptive = false;
    c.run.tol = 1e-7;
    c.run.max_iter = 1234;
    c.run.alpha = 0.25;
    c.run.w = 2.5;
    c.run.gamma = 0.125;
    c.run.seed = 5;
    c.run.trace_every = 10;
    c.run.trace_gains = true;
    c.run.adapt_every = 3;
    c.run.threads = 2;
    c.run.beta0 = RunConfig::Beta0::random;
    c.run.beta0_min = 0.75;
    c.run.beta0_max = 1.25;
    c.output.trace_path = "a.csv";
    c.output.comparison_path = "b.csv";
    c.output.format = "json";

    ExperimentConfig back =
        experiment_config_from_json(experiment_config_to_json(c));
    CHECK(back.problem.kind == c.problem.kind);
    CHECK(back.problem.dim == c.problem.dim);
    CHECK(back.problem.seed == c.problem.seed);
    CHECK(back.topology.shape == c.topology.shape);
    CHECK(back.topology.agents == c.topology.agents);
    CHECK(back.topology.max_degree == c.topology.max_degree);
    CHECK(back.topology.seed == c.topology.seed);
    CHECK(back.run.mode == c.run.mode);
    CHECK(back.run.adaptive == c.run.adaptive);
    CHECK(back.run.tol == c.run.tol);
    CHECK(back.run.max_iter == c.run.max_iter);
    CHECK(back.run.alpha == c.run.alpha);
    CHECK(back.run.w == c.run.w);
    CHECK(back.run.gamma == c.run.gamma);
    CHECK(back.run.seed == c.run.seed);
    CHECK(back.run.trace_every == c.run.trace_every);
    CHECK(back.run.trace_gains == c.run.trace_gains);
    CHECK(back.run.adapt_every == c.run.adapt_every);
    CHECK(back.run.threads == c.run.threads);
    CHECK(back.run.beta0 == c.run.beta0);
    CHECK(back.run.beta0_min == c.run.beta0_min);
    CHECK(back.run.beta0_max == c.run.beta0_max);
    CHECK(back.output.trace_path == c.output.trace_path);
    CHECK(back.output.comparison_path == c.output.comparison_path);
    CHECK(back.output.format == c.output.format);
}

TEST_CASE("config errors carry the dotted path of the offending field") {
    auto field_of = [](const nlohmann::json& doc) {
        try {
            experiment_config_from_json(doc);
        } catch (const ConfigError& e) {
            return e.field;
        }
        return std::string("<no error>");
    };
    CHECK(field_of({{"run", {{"gamma", 1.5}}}}) == "run.gamma");
    CHECK(field_of({{"run", {{"tol", -1.0}}}}) == "run.tol");
    CHECK(field_of({{"run", {{"alpha", "big"}}}}) == "run.alpha");
    CHECK(field_of({{"run", {{"max_iter", 0}}}}) == "run.max_iter");
    CHECK(field_of({{"run", {{"mode", "magic"}}}}) == "run.mode");
    CHECK(field_of({{"run", {{"beta0", {{"mode", "x"}}}}}}) ==
          "run.beta0.mode");
    CHECK(field_of({{"run", {{"beta0", {{"min", 2.0}, {"max", 1.0}}}}}}) ==
          "run.beta0.min");
    CHECK(field_of({{"problem", {{"kind", "cubic"}}}}) == "problem.kind");
    CHECK(field_of({{"problem", {{"n", 0}}}}) == "problem.n");
    CHECK(field_of({{"topology", {{"shape", "star"}}}}) == "topology.shape");
    CHECK(field_of({{"topology", {{"N", 2}}}}) == "topology.N");
    CHECK(field_of({{"topology", {{"max_degree", 1}}}}) ==
          "topology.max_degree");
    CHECK(field_of({{"output", {{"format", "xml"}}}}) == "output.format");
    CHECK(field_of({{"version", 2}}) == "version");
    CHECK(field_of(nlohmann::json::array()).empty());
}

TEST_CASE("config files load from disk and report open/parse failures") {
    const std::string good = "tmp_io_config_good.json";
    {
        std::ofstream out(good);
        out << R"({"run": {"tol": 0.01, "seed": 42}})";
    }
    ExperimentConfig c = load_experiment_config(good);
    CHECK(c.run.tol == 0.01);
    CHECK(c.run.seed == 42);
    std::remove(good.c_str());

    CHECK_THROWS_AS(load_experiment_config("definitely_missing_file.json"),
                    ConfigError);

    const std::string bad = "tmp_io_config_bad.json";
    {
        std::ofstream out(bad);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_experiment_config(bad), ConfigError);
    std::remove(bad.c_str());
}

TEST_CASE("topology and problem factories honor their configs") {
    TopologyConfig tc;
    tc.shape = "ring";
    tc.agents = 6;
    Topology ring = make_topology(tc);
    CHECK(ring.edges == gen_ring(6).edges);

    tc.shape = "augmented_ring";
    tc.max_degree = 4;
    tc.seed = 11;
    Topology aug = make_topology(tc);
    CHECK(aug.edges == gen_augmented_ring(6, 4, 11).edges);

    CommMatrix S = build_comm_matrix(ring);
    ProblemConfig pc;
    pc.kind = "logsumexp";
    pc.dim = 3;
    pc.seed = 8;
    ProblemSpec spec = make_problem(pc, S);
    CHECK(spec.agent_count == 6);
    CHECK(spec.dim == 3);
    CHECK_FALSE(spec.all_quadratic());
    pc.kind = "quadratic";
    CHECK(make_problem(pc, S).all_quadratic());
}

TEST_CASE("trace csv round-trips every numeric field exactly") {
    for (bool gains : {false, true}) {
        std::vector<TraceRecord> trace = synthetic_trace(true, gains);
        std::stringstream buf;
        write_trace_csv(buf, trace, 2, gains);
        std::vector<TraceRecord> back = read_trace_csv(buf);
        CHECK(same_trace(trace, back));
    }
    // monitor column entirely absent -> still parses, cells stay empty
    std::vector<TraceRecord> trace = synthetic_trace(false, false);
    std::stringstream buf;
    write_trace_csv(buf, trace, 2, false);
    std::vector<TraceRecord> back = read_trace_csv(buf);
    CHECK(same_trace(trace, back));
}

TEST_CASE("trace csv header names the per-agent columns") {
    std::stringstream buf;
    write_trace_csv(buf, {}, 2, true);
    std::string header;
    std::getline(buf, header);
    CHECK(header ==
          "iter,residual,V,p,E_1,E_2,d_1_1,d_1_2,d_2_1,d_2_2,wall_s");
}

TEST_CASE("an engine trace survives the csv cycle") {
    Topology topo = gen_ring(5);
    CommMatrix S = build_comm_matrix(topo);
    ProblemSpec spec = sample_problem(S, 2, ObjectiveKind::quadratic, 4);
    RunConfig rc;
    rc.max_iter = 20;
    rc.tol = 1e-14;
    rc.trace_gains = true;
    Engine eng(spec, S, rc);
    RunResult res = eng.run();
    REQUIRE_FALSE(res.trace.empty());
    std::stringstream buf;
    write_trace_csv(buf, res.trace, 5, true);
    CHECK(same_trace(res.trace, read_trace_csv(buf)));
}

TEST_CASE("trace parser reports the offending line") {
    auto line_of = [](const std::string& text) {
        std::stringstream in(text);
        try {
            read_trace_csv(in);
        } catch (const ParseError& e) {
            return e.line;
        }
        return -1;
    };
    CHECK(line_of("") == 1);
    CHECK(line_of("iter,residual\n") == 1);
    CHECK(line_of("nonsense header line\n") == 1);
    CHECK(line_of("iter,residual,V,p,E_1,wall_s\n1,0.5\n") == 2);
    CHECK(line_of("iter,residual,V,p,E_1,wall_s\n"
                  "1,0.5,,1.0,2.0,0.01\n"
                  "2,abc,,1.0,2.0,0.01\n") == 3);
}

TEST_CASE("trace documents mirror the records") {
    std::vector<TraceRecord> trace = synthetic_trace(true, true);
    nlohmann::json doc = trace_to_json(trace, 2, true);
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 3);
    CHECK(doc[0]["iter"] == 5);
    CHECK(doc[0]["residual"] == 0.1);
    CHECK(doc[0]["V"] == 3.25);
    CHECK(doc[1]["V"].is_null());
    CHECK(doc[0]["E"].size() == 2);
    CHECK(doc[0]["d"][0][0] == nlohmann::json::array({0, 0.6}));
    CHECK(doc[2]["wall_s"] == 0.375);
}

TEST_CASE("comparison tables round-trip through csv") {
    ComparisonTable table;
    ComparisonRow r;
    r.seed = 3;
    r.agents = 10;
    r.topology = "augmented_ring";
    r.fixed_iters = 1138;
    r.adaptive_iters = 573;
    r.ratio = 573.0 / 1138.0;
    r.status_fixed = RunStatus::converged;
    r.status_adaptive = RunStatus::converged;
    table.rows.push_back(r);
    r.seed = 4;
    r.fixed_iters = 30000;
    r.adaptive_iters = 999;
    r.ratio = 999.0 / 30000.0;
    r.status_fixed = RunStatus::iteration_limit;
    r.status_adaptive = RunStatus::diverged;
    table.rows.push_back(r);

    std::stringstream buf;
    write_comparison_csv(buf, table);
    ComparisonTable back = read_comparison_csv(buf);
    REQUIRE(back.rows.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.rows[i].seed == table.rows[i].seed);
        CHECK(back.rows[i].agents == table.rows[i].agents);
        CHECK(back.rows[i].topology == table.rows[i].topology);
        CHECK(back.rows[i].fixed_iters == table.rows[i].fixed_iters);
        CHECK(back.rows[i].adaptive_iters == table.rows[i].adaptive_iters);
        CHECK(back.rows[i].ratio == table.rows[i].ratio);
        CHECK(back.rows[i].status_fixed == table.rows[i].status_fixed);
        CHECK(back.rows[i].status_adaptive == table.rows[i].status_adaptive);
    }
    CHECK(back.any_censored());
}

TEST_CASE("comparison parser flags malformed input") {
    auto line_of = [](const std::string& text) {
        std::stringstream in(text);
        try {
            read_comparison_csv(in);
        } catch (const ParseError& e) {
            return e.line;
        }
        return -1;
    };
    const std::string header =
        "seed,N,topology,fixed_iters,adaptive_iters,ratio,status_fixed,"
        "status_adaptive\n";
    CHECK(line_of("") == 1);
    CHECK(line_of("bad header\n") == 1);
    CHECK(line_of(header + "1,5,ring,10,9\n") == 2);
    CHECK(line_of(header + "1,5,ring,10,9,0.9,converged,sideways\n") == 2);
    CHECK(line_of(header + "1,5,ring,10,9,0.9,converged,converged\n"
                           "2,5,ring,x,9,0.9,converged,converged\n") == 3);
}

TEST_CASE("plot data uses one shape for one series and another for several") {
    std::vector<TraceRecord> trace = synthetic_trace(false, false);
    std::stringstream one;
    write_plotdata(one, {"only"}, {trace});
    std::string line;
    std::getline(one, line);
    CHECK(line == "iter,residual");
    std::getline(one, line);
    CHECK(line == "5,0.1");

    std::stringstream many;
    write_plotdata(many, {"fixed", "adaptive"}, {trace, trace});
    std::getline(many, line);
    CHECK(line == "run,iter,residual");
    std::getline(many, line);
    CHECK(line == "fixed,5,0.1");
    int rows = 1;
    while (std::getline(many, line)) ++rows;
    CHECK(rows == 6);

    std::stringstream bad;
    CHECK_THROWS_AS(write_plotdata(bad, {"a"}, {trace, trace}),
                    std::invalid_argument);
    CHECK_THROWS_AS(write_plotdata(bad, {}, {}), std::invalid_argument);
}
