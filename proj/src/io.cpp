#include "admm/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace admm {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok, int line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError(line, "bad number '" + tok + "'");
    }
    return v;
}

long parse_long(const std::string& tok, int line) {
    long v = 0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError(line, "bad integer '" + tok + "'");
    }
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& doc,
                                 const std::string& what) {
    if (!doc.is_array() || doc.empty()) {
        throw std::invalid_argument(what + ": expected a nested array");
    }
    const std::size_t rows = doc.size();
    if (!doc[0].is_array() || doc[0].empty()) {
        throw std::invalid_argument(what + ": expected a nested array");
    }
    const std::size_t cols = doc[0].size();
    Eigen::MatrixXd M(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!doc[r].is_array() || doc[r].size() != cols) {
            throw std::invalid_argument(what + ": ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (!doc[r][c].is_number()) {
                throw std::invalid_argument(what + ": non-numeric entry");
            }
            M(r, c) = doc[r][c].get<double>();
        }
    }
    return M;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& doc,
                                 const std::string& what) {
    if (!doc.is_array()) {
        throw std::invalid_argument(what + ": expected an array");
    }
    Eigen::VectorXd v(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        if (!doc[i].is_number()) {
            throw std::invalid_argument(what + ": non-numeric entry");
        }
        v(i) = doc[i].get<double>();
    }
    return v;
}

// ---- config field helpers -------------------------------------------------

const nlohmann::json* find_key(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const nlohmann::json& obj, const std::string& section,
                  const char* key, double fallback) {
    const nlohmann::json* v = find_key(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) {
        throw ConfigError(section + "." + key, "expected a number");
    }
    return v->get<double>();
}

long get_integer(const nlohmann::json& obj, const std::string& section,
                 const char* key, long fallback) {
    const nlohmann::json* v = find_key(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
        throw ConfigError(section + "." + key, "expected an integer");
    }
    return v->get<long>();
}

bool get_bool(const nlohmann::json& obj, const std::string& section,
              const char* key, bool fallback) {
    const nlohmann::json* v = find_key(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) {
        throw ConfigError(section + "." + key, "expected a boolean");
    }
    return v->get<bool>();
}

std::string get_string(const nlohmann::json& obj, const std::string& section,
                       const char* key, const std::string& fallback) {
    const nlohmann::json* v = find_key(obj, key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) {
        throw ConfigError(section + "." + key, "expected a string");
    }
    return v->get<std::string>();
}

}  // namespace

ConfigError::ConfigError(std::string field_path, const std::string& message)
    : std::runtime_error(field_path.empty()
                             ? message
                             : field_path + ": " + message),
      field(std::move(field_path)) {}

ParseError::ParseError(int line_number, const std::string& message)
    : std::runtime_error("line " + std::to_string(line_number) + ": " +
                         message),
      line(line_number) {}

nlohmann::json topology_to_json(const Topology& topo) {
    nlohmann::json doc;
    doc["agents"] = topo.agent_count;
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : topo.edges) {
        edges.push_back(nlohmann::json::array({a, b}));
    }
    doc["edges"] = std::move(edges);
    return doc;
}

Topology topology_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("agents") || !doc.contains("edges")) {
        throw std::invalid_argument(
            "topology document: 'agents' and 'edges' required");
    }
    Topology topo;
    topo.agent_count = doc["agents"].get<int>();
    for (const auto& e : doc["edges"]) {
        if (!e.is_array() || e.size() != 2) {
            throw std::invalid_argument("topology document: bad edge entry");
        }
        topo.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    normalize_edges(topo);
    topo.validate();
    return topo;
}

nlohmann::json problem_to_json(const ProblemSpec& spec) {
    nlohmann::json doc;
    doc["agents"] = spec.agent_count;
    doc["dim"] = spec.dim;
    nlohmann::json objs = nlohmann::json::array();
    for (const auto& f : spec.objectives) {
        nlohmann::json o;
        if (f.is_quadratic()) {
            o["kind"] = "quadratic";
            o["Q"] = matrix_to_json(f.quadratic().Q);
            o["c"] = vector_to_json(f.quadratic().c);
        } else {
            o["kind"] = "logsumexp";
            o["B"] = matrix_to_json(f.logsumexp().B);
            o["b"] = vector_to_json(f.logsumexp().b);
        }
        objs.push_back(std::move(o));
    }
    doc["objectives"] = std::move(objs);
    nlohmann::json cs;
    cs["structure"] = spec.constraints.structure ==
                              ConstraintSet::Structure::laplacian_consensus
                          ? "laplacian_consensus"
                          : "custom";
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& [key, block] : spec.constraints.blocks) {
        nlohmann::json b;
        b["row"] = key.first;
        b["col"] = key.second;
        b["A"] = matrix_to_json(block);
        blocks.push_back(std::move(b));
    }
    cs["blocks"] = std::move(blocks);
    doc["constraints"] = std::move(cs);
    return doc;
}

ProblemSpec problem_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw std::invalid_argument("problem document: expected an object");
    }
    ProblemSpec spec;
    spec.agent_count = doc.at("agents").get<int>();
    spec.dim = doc.at("dim").get<int>();
    for (const auto& o : doc.at("objectives")) {
        const std::string kind = o.at("kind").get<std::string>();
        if (kind == "quadratic") {
            QuadraticObjective q;
            q.Q = matrix_from_json(o.at("Q"), "problem document Q");
            q.c = vector_from_json(o.at("c"), "problem document c");
            spec.objectives.emplace_back(std::move(q));
        } else if (kind == "logsumexp") {
            LogSumExpObjective l;
            l.B = matrix_from_json(o.at("B"), "problem document B");
            l.b = vector_from_json(o.at("b"), "problem document b");
            spec.objectives.emplace_back(std::move(l));
        } else {
            throw std::invalid_argument("problem document: unknown kind");
        }
    }
    const auto& cs = doc.at("constraints");
    spec.constraints.agent_count = spec.agent_count;
    spec.constraints.dim = spec.dim;
    spec.constraints.structure =
        cs.at("structure").get<std::string>() == "laplacian_consensus"
            ? ConstraintSet::Structure::laplacian_consensus
            : ConstraintSet::Structure::custom;
    for (const auto& b : cs.at("blocks")) {
        spec.constraints.blocks[{b.at("row").get<int>(),
                                 b.at("col").get<int>()}] =
            matrix_from_json(b.at("A"), "problem document block");
    }
    spec.validate();
    return spec;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("", "config must be a JSON object");
    }
    ExperimentConfig config;
    config.version = static_cast<int>(get_integer(doc, "", "version", 1));
    if (config.version != 1) {
        throw ConfigError("version", "unsupported config version");
    }

    if (const nlohmann::json* p = find_key(doc, "problem")) {
        if (!p->is_object()) throw ConfigError("problem", "expected an object");
        config.problem.kind =
            get_string(*p, "problem", "kind", config.problem.kind);
        if (config.problem.kind != "quadratic" &&
            config.problem.kind != "logsumexp") {
            throw ConfigError("problem.kind",
                              "must be 'quadratic' or 'logsumexp'");
        }
        config.problem.dim = static_cast<int>(
            get_integer(*p, "problem", "n", config.problem.dim));
        if (config.problem.dim < 1) {
            throw ConfigError("problem.n", "must be >= 1");
        }
        config.problem.seed = static_cast<std::uint64_t>(
            get_integer(*p, "problem", "seed",
                        static_cast<long>(config.problem.seed)));
    }

    if (const nlohmann::json* t = find_key(doc, "topology")) {
        if (!t->is_object()) throw ConfigError("topology", "expected an object");
        config.topology.shape =
            get_string(*t, "topology", "shape", config.topology.shape);
        if (config.topology.shape != "ring" &&
            config.topology.shape != "augmented_ring") {
            throw ConfigError("topology.shape",
                              "must be 'ring' or 'augmented_ring'");
        }
        config.topology.agents = static_cast<int>(
            get_integer(*t, "topology", "N", config.topology.agents));
        if (config.topology.agents < 3) {
            throw ConfigError("topology.N", "must be >= 3");
        }
        config.topology.max_degree = static_cast<int>(
            get_integer(*t, "topology", "max_degree",
                        config.topology.max_degree));
        if (config.topology.max_degree < 2) {
            throw ConfigError("topology.max_degree", "must be >= 2");
        }
        config.topology.seed = static_cast<std::uint64_t>(
            get_integer(*t, "topology", "seed",
                        static_cast<long>(config.topology.seed)));
    }

    if (const nlohmann::json* r = find_key(doc, "run")) {
        if (!r->is_object()) throw ConfigError("run", "expected an object");
        RunConfig& run = config.run;
        const std::string mode =
            get_string(*r, "run", "mode", to_string(run.mode));
        try {
            run.mode = mode_from_string(mode);
        } catch (const std::invalid_argument&) {
            throw ConfigError("run.mode", "must be 'iterative' or 'exact'");
        }
        run.adaptive = get_bool(*r, "run", "adaptive", run.adaptive);
        run.tol = get_number(*r, "run", "tol", run.tol);
        if (!(run.tol > 0.0)) throw ConfigError("run.tol", "must be positive");
        run.max_iter = static_cast<int>(
            get_integer(*r, "run", "max_iter", run.max_iter));
        if (run.max_iter < 1) throw ConfigError("run.max_iter", "must be >= 1");
        run.alpha = get_number(*r, "run", "alpha", run.alpha);
        if (!(run.alpha > 0.0 && run.alpha < 1.0)) {
            throw ConfigError("run.alpha", "must lie in (0, 1)");
        }
        run.w = get_number(*r, "run", "w", run.w);
        if (!(run.w > 0.0)) throw ConfigError("run.w", "must be positive");
        run.gamma = get_number(*r, "run", "gamma", run.gamma);
        if (!(run.gamma > 0.0 && run.gamma < 1.0)) {
            throw ConfigError("run.gamma", "must lie in (0, 1)");
        }
        run.seed = static_cast<std::uint64_t>(
            get_integer(*r, "run", "seed", static_cast<long>(run.seed)));
        run.trace_every = static_cast<int>(
            get_integer(*r, "run", "trace_every", run.trace_every));
        if (run.trace_every < 0) {
            throw ConfigError("run.trace_every", "must be >= 0");
        }
        run.trace_gains = get_bool(*r, "run", "trace_gains", run.trace_gains);
        run.adapt_every = static_cast<int>(
            get_integer(*r, "run", "adapt_every", run.adapt_every));
        if (run.adapt_every < 1) {
            throw ConfigError("run.adapt_every", "must be >= 1");
        }
        run.threads =
            static_cast<int>(get_integer(*r, "run", "threads", run.threads));
        if (run.threads < 1) throw ConfigError("run.threads", "must be >= 1");
        if (const nlohmann::json* b = find_key(*r, "beta0")) {
            if (!b->is_object()) {
                throw ConfigError("run.beta0", "expected an object");
            }
            const std::string scheme = get_string(*b, "run.beta0", "mode",
                                                  run.beta0 ==
                                                          RunConfig::Beta0::uniform
                                                      ? "uniform"
                                                      : "random");
            if (scheme == "uniform") {
                run.beta0 = RunConfig::Beta0::uniform;
            } else if (scheme == "random") {
                run.beta0 = RunConfig::Beta0::random;
            } else {
                throw ConfigError("run.beta0.mode",
                                  "must be 'uniform' or 'random'");
            }
            run.beta0_min = get_number(*b, "run.beta0", "min", run.beta0_min);
            run.beta0_max = get_number(*b, "run.beta0", "max", run.beta0_max);
            if (!(run.beta0_min > 0.0 && run.beta0_max >= run.beta0_min)) {
                throw ConfigError("run.beta0.min",
                                  "range must be positive and ordered");
            }
        }
    }

    if (const nlohmann::json* o = find_key(doc, "output")) {
        if (!o->is_object()) throw ConfigError("output", "expected an object");
        config.output.trace_path =
            get_string(*o, "output", "trace_path", config.output.trace_path);
        config.output.comparison_path = get_string(
            *o, "output", "comparison_path", config.output.comparison_path);
        config.output.format =
            get_string(*o, "output", "format", config.output.format);
        if (config.output.format != "csv" && config.output.format != "json") {
            throw ConfigError("output.format", "must be 'csv' or 'json'");
        }
    }
    return config;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& config) {
    nlohmann::json doc;
    doc["version"] = config.version;
    doc["problem"] = {{"kind", config.problem.kind},
                      {"n", config.problem.dim},
                      {"seed", config.problem.seed}};
    doc["topology"] = {{"shape", config.topology.shape},
                       {"N", config.topology.agents},
                       {"max_degree", config.topology.max_degree},
                       {"seed", config.topology.seed}};
    doc["run"] = {
        {"mode", to_string(config.run.mode)},
        {"adaptive", config.run.adaptive},
        {"tol", config.run.tol},
        {"max_iter", config.run.max_iter},
        {"alpha", config.run.alpha},
        {"w", config.run.w},
        {"gamma", config.run.gamma},
        {"seed", config.run.seed},
        {"trace_every", config.run.trace_every},
        {"trace_gains", config.run.trace_gains},
        {"adapt_every", config.run.adapt_every},
        {"threads", config.run.threads},
        {"beta0",
         {{"mode", config.run.beta0 == RunConfig::Beta0::uniform ? "uniform"
                                                                 : "random"},
          {"min", config.run.beta0_min},
          {"max", config.run.beta0_max}}}};
    doc["output"] = {{"trace_path", config.output.trace_path},
                     {"comparison_path", config.output.comparison_path},
                     {"format", config.output.format}};
    return doc;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot open config file '" + path + "'");
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("", std::string("JSON parse failure: ") + e.what());
    }
    return experiment_config_from_json(doc);
}

Topology make_topology(const TopologyConfig& config) {
    if (config.shape == "ring") {
        return gen_ring(config.agents);
    }
    return gen_augmented_ring(config.agents, config.max_degree, config.seed);
}

ProblemSpec make_problem(const ProblemConfig& config, const CommMatrix& S) {
    const ObjectiveKind kind = config.kind == "quadratic"
                                   ? ObjectiveKind::quadratic
                                   : ObjectiveKind::logsumexp;
    return sample_problem(S, config.dim, kind, config.seed);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace,
                     int agent_count, bool with_gains) {
    out << "iter,residual,V,p";
    for (int i = 1; i <= agent_count; ++i) out << ",E_" << i;
    if (with_gains) {
        for (int i = 1; i <= agent_count; ++i) {
            for (int j = 1; j <= agent_count; ++j) {
                out << ",d_" << i << "_" << j;
            }
        }
    }
    out << ",wall_s\n";
    for (const TraceRecord& row : trace) {
        if (static_cast<int>(row.energy.size()) != agent_count) {
            throw std::invalid_argument("trace: energy width mismatch");
        }
        out << row.iteration << ',' << fmt(row.residual) << ',';
        if (row.lyapunov) out << fmt(*row.lyapunov);
        out << ',' << fmt(row.objective);
        for (double e : row.energy) out << ',' << fmt(e);
        if (with_gains) {
            if (static_cast<int>(row.gain_rows.size()) != agent_count) {
                throw std::invalid_argument("trace: no gain rows recorded");
            }
            for (int i = 0; i < agent_count; ++i) {
                std::size_t next = 0;
                for (int j = 0; j < agent_count; ++j) {
                    double d = 0.0;
                    if (next < row.gain_rows[i].size() &&
                        row.gain_rows[i][next].first == j) {
                        d = row.gain_rows[i][next].second;
                        ++next;
                    }
                    out << ',' << fmt(d);
                }
            }
        }
        out << ',' << fmt(row.wall_seconds) << '\n';
    }
}

void write_trace_csv_file(const std::string& path,
                          const std::vector<TraceRecord>& trace,
                          int agent_count, bool with_gains) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_trace_csv(out, trace, agent_count, with_gains);
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing header");
    }
    const std::vector<std::string> header = split_csv(line);
    if (header.size() < 5 || header[0] != "iter" || header[1] != "residual" ||
        header[2] != "V" || header[3] != "p" || header.back() != "wall_s") {
        throw ParseError(1, "unrecognized trace header");
    }
    int agent_count = 0;
    std::size_t col = 4;
    while (col < header.size() &&
           header[col] == "E_" + std::to_string(agent_count + 1)) {
        ++agent_count;
        ++col;
    }
    if (agent_count == 0) {
        throw ParseError(1, "trace header lists no energy columns");
    }
    const bool with_gains = col < header.size() && header[col] == "d_1_1";
    const std::size_t expected =
        5 + agent_count +
        (with_gains ? static_cast<std::size_t>(agent_count) * agent_count : 0);
    if (header.size() != expected) {
        throw ParseError(1, "trace header has unexpected columns");
    }

    std::vector<TraceRecord> trace;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> tok = split_csv(line);
        if (tok.size() != expected) {
            throw ParseError(line_no, "wrong field count");
        }
        TraceRecord row;
        row.iteration = static_cast<int>(parse_long(tok[0], line_no));
        row.residual = parse_double(tok[1], line_no);
        if (!tok[2].empty()) row.lyapunov = parse_double(tok[2], line_no);
        row.objective = parse_double(tok[3], line_no);
        std::size_t p = 4;
        for (int i = 0; i < agent_count; ++i, ++p) {
            row.energy.push_back(parse_double(tok[p], line_no));
        }
        if (with_gains) {
            row.gain_rows.resize(agent_count);
            for (int i = 0; i < agent_count; ++i) {
                for (int j = 0; j < agent_count; ++j, ++p) {
                    const double d = parse_double(tok[p], line_no);
                    if (d != 0.0) row.gain_rows[i].emplace_back(j, d);
                }
            }
        }
        row.wall_seconds = parse_double(tok[p], line_no);
        trace.push_back(std::move(row));
    }
    return trace;
}

std::vector<TraceRecord> read_trace_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open trace file '" + path + "'");
    }
    return read_trace_csv(in);
}

nlohmann::json trace_to_json(const std::vector<TraceRecord>& trace,
                             int agent_count, bool with_gains) {
    nlohmann::json rows = nlohmann::json::array();
    for (const TraceRecord& row : trace) {
        if (static_cast<int>(row.energy.size()) != agent_count) {
            throw std::invalid_argument("trace: energy width mismatch");
        }
        nlohmann::json r;
        r["iter"] = row.iteration;
        r["residual"] = row.residual;
        if (row.lyapunov) {
            r["V"] = *row.lyapunov;
        } else {
            r["V"] = nullptr;
        }
        r["p"] = row.objective;
        r["E"] = row.energy;
        if (with_gains) {
            nlohmann::json gains = nlohmann::json::array();
            for (const auto& gain_row : row.gain_rows) {
                nlohmann::json entries = nlohmann::json::array();
                for (const auto& [j, d] : gain_row) {
                    entries.push_back(nlohmann::json::array({j, d}));
                }
                gains.push_back(std::move(entries));
            }
            r["d"] = std::move(gains);
        }
        r["wall_s"] = row.wall_seconds;
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_trace_json_file(const std::string& path,
                           const std::vector<TraceRecord>& trace,
                           int agent_count, bool with_gains) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << trace_to_json(trace, agent_count, with_gains).dump(2) << '\n';
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table) {
    out << "seed,N,topology,fixed_iters,adaptive_iters,ratio,status_fixed,"
           "status_adaptive\n";
    for (const ComparisonRow& row : table.rows) {
        out << row.seed << ',' << row.agents << ',' << row.topology << ','
            << row.fixed_iters << ',' << row.adaptive_iters << ','
            << fmt(row.ratio) << ',' << to_string(row.status_fixed) << ','
            << to_string(row.status_adaptive) << '\n';
    }
}

void write_comparison_csv_file(const std::string& path,
                               const ComparisonTable& table) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_comparison_csv(out, table);
}

ComparisonTable read_comparison_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(1, "missing header");
    }
    if (split_csv(line) !=
        std::vector<std::string>{"seed", "N", "topology", "fixed_iters",
                                 "adaptive_iters", "ratio", "status_fixed",
                                 "status_adaptive"}) {
        throw ParseError(1, "unrecognized comparison header");
    }
    ComparisonTable table;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> tok = split_csv(line);
        if (tok.size() != 8) {
            throw ParseError(line_no, "wrong field count");
        }
        ComparisonRow row;
        row.seed = static_cast<int>(parse_long(tok[0], line_no));
        row.agents = static_cast<int>(parse_long(tok[1], line_no));
        row.topology = tok[2];
        row.fixed_iters = static_cast<int>(parse_long(tok[3], line_no));
        row.adaptive_iters = static_cast<int>(parse_long(tok[4], line_no));
        row.ratio = parse_double(tok[5], line_no);
        try {
            row.status_fixed = status_from_string(tok[6]);
            row.status_adaptive = status_from_string(tok[7]);
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

ComparisonTable read_comparison_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open table file '" + path + "'");
    }
    return read_comparison_csv(in);
}

void write_plotdata(std::ostream& out, const std::vector<std::string>& labels,
                    const std::vector<std::vector<TraceRecord>>& traces) {
    if (labels.size() != traces.size() || traces.empty()) {
        throw std::invalid_argument("plotdata: one label per trace required");
    }
    if (traces.size() == 1) {
        out << "iter,residual\n";
        for (const TraceRecord& row : traces[0]) {
            out << row.iteration << ',' << fmt(row.residual) << '\n';
        }
        return;
    }
    out << "run,iter,residual\n";
    for (std::size_t t = 0; t < traces.size(); ++t) {
        for (const TraceRecord& row : traces[t]) {
            out << labels[t] << ',' << row.iteration << ','
                << fmt(row.residual) << '\n';
        }
    }
}

void write_plotdata_file(const std::string& path,
                         const std::vector<std::string>& labels,
                         const std::vector<std::vector<TraceRecord>>& traces) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_plotdata(out, labels, traces);
}

}  // namespace admm
