#include "cli.hpp"

#include "lieadj/problems.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

namespace lieadj::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kOracleEps = 1e-5;
constexpr double kOracleLimit = 1e-5;
constexpr int kSymplecticSteps = 50;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- config parsing ----

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown field \"" + key + "\"");
}

Vector read_vector(const json& j, const std::string& field, Eigen::Index expected = -1) {
    if (!j.is_array()) throw ConfigError(field + ": expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(field + ": entry " + std::to_string(i) + " is not a number");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    if (expected >= 0 && v.size() != expected)
        throw ConfigError(field + ": expected " + std::to_string(expected) + " entries, got " +
                          std::to_string(v.size()));
    return v;
}

// n×n matrix, either nested rows or row-major flattened.
Matrix read_matrix(const json& j, const std::string& field, int n) {
    if (j.is_array() && !j.empty() && j[0].is_array()) {
        if (static_cast<int>(j.size()) != n)
            throw ConfigError(field + ": expected " + std::to_string(n) + " rows, got " + std::to_string(j.size()));
        Matrix m(n, n);
        for (int r = 0; r < n; ++r) m.row(r) = read_vector(j[r], field + "[" + std::to_string(r) + "]", n).transpose();
        return m;
    }
    const Vector flat = read_vector(j, field, static_cast<Eigen::Index>(n) * n);
    Matrix m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = flat[r * n + c];
    return m;
}

std::string read_string(const json& j, const std::string& field) {
    if (!j.is_string()) throw ConfigError(field + ": expected a string");
    return j.get<std::string>();
}

double orthogonality_residual(const Matrix& g) {
    if (!g.allFinite()) return std::numeric_limits<double>::infinity();
    return std::max((g.transpose() * g - Matrix::Identity(g.rows(), g.cols())).norm(), std::abs(g.determinant() - 1.0));
}

GroupSpec parse_group(const json& j) {
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "SO3") return GroupSpec::so3();
        if (name == "SE3") return GroupSpec::se3();
        if (name == "SO2") return GroupSpec::so2();
        throw ConfigError("group: unknown group \"" + name + "\" (expected SO3, SE3, SO2 or an inline basis)");
    }
    if (!j.is_object()) throw ConfigError("group: expected a name or an object");
    reject_unknown(j, {"name", "n", "basis", "membership"}, "group");
    if (!j.contains("n") || !j["n"].is_number_integer()) throw ConfigError("group.n: expected an integer");
    const int n = j["n"].get<int>();
    if (n < 1) throw ConfigError("group.n: must be positive");
    if (!j.contains("basis") || !j["basis"].is_array() || j["basis"].empty())
        throw ConfigError("group.basis: expected a non-empty array of flattened matrices");
    std::vector<Matrix> basis;
    for (std::size_t i = 0; i < j["basis"].size(); ++i)
        basis.push_back(read_matrix(j["basis"][i], "group.basis[" + std::to_string(i) + "]", n));
    MembershipTest membership;
    if (j.contains("membership")) {
        const std::string kind = read_string(j["membership"], "group.membership");
        if (kind == "orthogonal")
            membership = orthogonality_residual;
        else if (kind != "default")
            throw ConfigError("group.membership: expected \"orthogonal\" or \"default\"");
    }
    const std::string name = j.contains("name") ? read_string(j["name"], "group.name") : "custom";
    return GroupSpec::custom(name, std::move(basis), membership);
}

const std::set<std::string> kSo3Problems = {"so3_constant", "so3_gradient_like", "so3_controlled", "so3_gain"};

TrivializedVectorField parse_problem(const json& j, const std::optional<GroupSpec>& group, std::string& name) {
    json params = json::object();
    if (j.is_string()) {
        name = j.get<std::string>();
    } else if (j.is_object()) {
        if (!j.contains("name")) throw ConfigError("problem.name: missing");
        name = read_string(j["name"], "problem.name");
        params = j;
        params.erase("name");
    } else {
        throw ConfigError("problem: expected a name or an object");
    }

    // built-in problems fix their group, so "group" may be omitted for them
    std::optional<GroupSpec> implied;
    const auto need_group = [&](const char* expected) -> const GroupSpec& {
        if (!group) {
            if (!expected)
                throw ConfigError("group: missing (problem \"" + name + "\" works on any group, so one must be given)");
            implied = std::string(expected) == "SE3" ? GroupSpec::se3() : GroupSpec::so3();
            return *implied;
        }
        if (expected && group->name() != expected)
            throw ConfigError("problem \"" + name + "\" requires group " + expected + ", got " + group->name());
        return *group;
    };
    const auto param = [&](const char* key) -> const json* { return params.contains(key) ? &params[key] : nullptr; };

    if (kSo3Problems.count(name)) {
        const GroupSpec& spec = need_group("SO3");
        if (name == "so3_constant") {
            reject_unknown(params, {"xi0"}, "problem");
            return param("xi0") ? problems::so3_constant(AlgVec(read_vector(*param("xi0"), "problem.xi0", 3)))
                                : problems::so3_constant();
        }
        if (name == "so3_controlled") {
            reject_unknown(params, {}, "problem");
            return problems::so3_controlled();
        }
        reject_unknown(params, {"A"}, "problem");
        const Matrix a = param("A") ? read_matrix(*param("A"), "problem.A", spec.n()) : problems::default_gradient_matrix();
        return name == "so3_gain" ? problems::so3_gain(a) : problems::so3_gradient_like(a);
    }
    if (name == "se3_screw") {
        need_group("SE3");
        reject_unknown(params, {"twist"}, "problem");
        return param("twist") ? problems::se3_screw(AlgVec(read_vector(*param("twist"), "problem.twist", 6)))
                              : problems::se3_screw();
    }

    const GroupSpec& spec = need_group(nullptr);
    if (name == "zero") {
        reject_unknown(params, {"param_dim"}, "problem");
        int m = 0;
        if (param("param_dim")) {
            if (!param("param_dim")->is_number_integer() || param("param_dim")->get<int>() < 0)
                throw ConfigError("problem.param_dim: expected a non-negative integer");
            m = param("param_dim")->get<int>();
        }
        return problems::zero_field(spec, m);
    }
    if (name == "constant") {
        reject_unknown(params, {"xi0"}, "problem");
        if (!param("xi0")) throw ConfigError("problem.xi0: missing");
        return problems::constant_field(spec, AlgVec(read_vector(*param("xi0"), "problem.xi0", spec.dim())));
    }
    if (name == "projected_linear" || name == "gain") {
        reject_unknown(params, {"A"}, "problem");
        if (!param("A")) throw ConfigError("problem.A: missing");
        auto base = problems::projected_linear_field(spec, read_matrix(*param("A"), "problem.A", spec.n()));
        return name == "gain" ? problems::scalar_gain(base) : base;
    }
    if (name == "velocity_controlled") {
        reject_unknown(params, {}, "problem");
        return problems::velocity_controlled(spec);
    }
    throw ConfigError("problem: unknown problem \"" + name + "\"");
}

GroupElem parse_g0(const json& j, const GroupSpec& spec) {
    if (j.contains("g0") && j.contains("g0_xi")) throw ConfigError("g0 and g0_xi are mutually exclusive");
    GroupElem g0 = spec.identity();
    if (j.contains("g0")) g0 = GroupElem(read_matrix(j["g0"], "g0", spec.n()));
    if (j.contains("g0_xi")) g0 = exp_map(spec, AlgVec(read_vector(j["g0_xi"], "g0_xi", spec.dim())));
    if (!spec.contains(g0))
        throw ConfigError("g0: not a member of " + spec.name() + " (residual " + num(spec.membership_residual(g0.mat)) +
                          ")");
    return g0;
}

CostFunction parse_cost(const json& j, const ProblemConfig& cfg, const Retraction& r) {
    const GroupSpec& spec = cfg.spec();
    if (!j.is_object() || !j.contains("type")) throw ConfigError("cost: expected an object with a \"type\"");
    const std::string type = read_string(j["type"], "cost.type");
    if (type == "linear_trace") {
        reject_unknown(j, {"type", "A"}, "cost");
        if (!j.contains("A")) throw ConfigError("cost.A: missing");
        return problems::linear_trace(spec, read_matrix(j["A"], "cost.A", spec.n()));
    }
    if (type != "frobenius_target") throw ConfigError("cost.type: unknown cost \"" + type + "\"");
    reject_unknown(j, {"type", "target", "target_xi", "reachable_from_xi", "reachable_with_u"}, "cost");
    int sources = 0;
    for (const char* key : {"target", "target_xi", "reachable_from_xi", "reachable_with_u"}) sources += j.contains(key);
    if (sources != 1)
        throw ConfigError("cost: give exactly one of target, target_xi, reachable_from_xi, reachable_with_u");

    Matrix target;
    if (j.contains("target")) {
        target = read_matrix(j["target"], "cost.target", spec.n());
    } else if (j.contains("target_xi")) {
        target = exp_map(spec, AlgVec(read_vector(j["target_xi"], "cost.target_xi", spec.dim()))).mat;
    } else if (j.contains("reachable_from_xi")) {
        // terminal point of the discrete flow from a known start, so the optimum is reachable
        const GroupElem start = exp_map(spec, AlgVec(read_vector(j["reachable_from_xi"], "cost.reachable_from_xi",
                                                                 spec.dim())));
        target = forward_flow(cfg.vf, start, cfg.grid, r, cfg.params()).g.back().mat;
    } else {
        const ParamVec u(read_vector(j["reachable_with_u"], "cost.reachable_with_u", cfg.vf.param_dim));
        target = forward_flow(cfg.vf, cfg.g0, cfg.grid, r, u).g.back().mat;
    }
    return problems::frobenius_target(spec, target);
}

SolverConfig parse_solver(const json& j) {
    if (!j.is_object()) throw ConfigError("solver: expected an object");
    reject_unknown(j, {"tol", "max_iter", "method"}, "solver");
    SolverConfig s;
    if (j.contains("tol")) s.tol = j["tol"].get<double>();
    if (j.contains("max_iter")) s.max_iter = j["max_iter"].get<int>();
    if (j.contains("method")) {
        const std::string m = read_string(j["method"], "solver.method");
        if (m == "automatic") s.method = SolveMethod::automatic;
        else if (m == "newton") s.method = SolveMethod::newton;
        else if (m == "fixed_point") s.method = SolveMethod::fixed_point;
        else throw ConfigError("solver.method: expected automatic, newton or fixed_point");
    }
    s.validate();
    return s;
}

LineSearchConfig parse_linesearch(const json& j) {
    if (!j.is_object()) throw ConfigError("linesearch: expected an object");
    reject_unknown(j, {"gamma0", "shrink", "armijo_c", "max_backtracks", "max_outer_iters", "grad_tol"}, "linesearch");
    LineSearchConfig ls;
    if (j.contains("gamma0")) ls.gamma0 = j["gamma0"].get<double>();
    if (j.contains("shrink")) ls.shrink = j["shrink"].get<double>();
    if (j.contains("armijo_c")) ls.armijo_c = j["armijo_c"].get<double>();
    if (j.contains("max_backtracks")) ls.max_backtracks = j["max_backtracks"].get<int>();
    if (j.contains("max_outer_iters")) ls.max_outer_iters = j["max_outer_iters"].get<int>();
    if (j.contains("grad_tol")) ls.grad_tol = j["grad_tol"].get<double>();
    ls.validate();
    return ls;
}

ProblemConfig parse_config_unchecked(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown(j, {"group", "problem", "retraction", "T", "N", "g0", "g0_xi", "cost", "u0", "solver", "linesearch",
                       "seed"},
                   "config");
    std::optional<GroupSpec> group;
    if (j.contains("group")) group = parse_group(j["group"]);
    if (!j.contains("problem")) throw ConfigError("problem: missing");
    std::string name;
    TrivializedVectorField vf = parse_problem(j["problem"], group, name);
    ProblemConfig cfg{std::move(name), std::move(vf)};

    if (j.contains("retraction")) {
        const std::string kind = read_string(j["retraction"], "retraction");
        if (kind == "exp") cfg.retraction = RetractionKind::exp;
        else if (kind == "cayley") cfg.retraction = RetractionKind::cayley;
        else throw ConfigError("retraction: expected exp or cayley");
    }
    if (!j.contains("T") || !j["T"].is_number()) throw ConfigError("T: expected a number");
    if (!j.contains("N") || !j["N"].is_number_integer()) throw ConfigError("N: expected an integer");
    cfg.grid = TimeGrid::make(j["T"].get<double>(), j["N"].get<int>());
    cfg.g0 = parse_g0(j, cfg.spec());

    if (j.contains("u0")) {
        cfg.u0 = ParamVec(read_vector(j["u0"], "u0", cfg.vf.param_dim));
    } else if (cfg.vf.param_dim > 0) {
        cfg.u0 = ParamVec(Vector::Zero(cfg.vf.param_dim));
    }
    if (j.contains("solver")) cfg.solver = parse_solver(j["solver"]);
    if (j.contains("linesearch")) cfg.linesearch = parse_linesearch(j["linesearch"]);
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("cost")) cfg.cost = parse_cost(j["cost"], cfg, Retraction(cfg.spec(), cfg.retraction));
    return cfg;
}

// ---- output ----

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw ConfigError("cannot write " + path.string());
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<double> flatten(const Matrix& m) {
    std::vector<double> out;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::string> matrix_header(const char* prefix, int n) {
    std::vector<std::string> h;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) h.push_back(std::string(prefix) + "_" + std::to_string(r) + std::to_string(c));
    return h;
}

json describe(const ProblemConfig& cfg) {
    return {{"problem", cfg.problem_name},
            {"group", cfg.spec().name()},
            {"retraction", to_string(cfg.retraction)},
            {"T", cfg.grid.T},
            {"N", cfg.grid.N}};
}

const CostFunction& require_cost(const ProblemConfig& cfg, const char* command) {
    if (!cfg.cost) throw ConfigError(std::string("cost: required by the ") + command + " command");
    return *cfg.cost;
}

fs::path prepare(const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    return out_dir;
}

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}
    Vector vec(Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = dist_(rng_);
        return v;
    }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> dist_{-1.0, 1.0};
};

}  // namespace

ProblemConfig parse_config(const json& j) {
    try {
        return parse_config_unchecked(j);
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::exception& e) {
        // invalid bases, non-members, bad grids
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ProblemConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j);
}

int integrate(const ProblemConfig& cfg, const fs::path& out_dir) {
    const fs::path dir = prepare(out_dir);
    const GroupSpec& spec = cfg.spec();
    const Retraction r(spec, cfg.retraction);
    const Trajectory traj = forward_flow(cfg.vf, cfg.g0, cfg.grid, r, cfg.params());

    std::vector<std::string> header = {"k", "t"};
    for (auto& h : matrix_header("g", spec.n())) header.push_back(h);
    for (int i = 0; i < spec.dim(); ++i) header.push_back("xi_" + std::to_string(i));
    header.push_back("membership_residual");
    Csv csv(dir / "trajectory.csv", header);

    double max_residual = 0.0;
    for (int k = 0; k <= cfg.grid.N; ++k) {
        const double res = spec.membership_residual(traj.g[k].mat);
        max_residual = std::max(max_residual, res);
        std::vector<std::string> row = {std::to_string(k), num(cfg.grid.time(k))};
        for (double v : flatten(traj.g[k].mat)) row.push_back(num(v));
        for (double v : to_std(traj.xi[k].coords)) row.push_back(num(v));
        row.push_back(num(res));
        csv.row(row);
    }

    json summary = describe(cfg);
    summary["command"] = "integrate";
    summary["final_g"] = flatten(traj.g.back().mat);
    summary["max_membership_residual"] = max_residual;
    summary["membership_drift"] =
        std::abs(spec.membership_residual(traj.g.back().mat) - spec.membership_residual(traj.g.front().mat));
    if (cfg.cost) summary["final_cost"] = (*cfg.cost)(traj.g.back());
    write_json(dir / "summary.json", summary);
    return kOk;
}

int sensitivity(const ProblemConfig& cfg, Mode mode, const fs::path& out_dir) {
    const CostFunction& cost = require_cost(cfg, "sensitivity");
    const fs::path dir = prepare(out_dir);
    const Retraction r(cfg.spec(), cfg.retraction);

    SensitivityReport report;
    Vector oracle;
    if (mode == Mode::initial) {
        report = initial_condition_sensitivity(cfg.vf, cost, cfg.g0, cfg.grid, r, cfg.params());
        oracle = oracle::fd_gradient_g0(cfg.vf, cost, cfg.g0, cfg.grid, r, kOracleEps, cfg.params()).coords;
    } else {
        if (cfg.vf.param_dim < 1) throw ConfigError("sensitivity --mode parameter: problem has no parameters");
        report = parameter_sensitivity(cfg.vf, cost, cfg.g0, cfg.params(), cfg.grid, r);
        oracle = oracle::fd_gradient_u(cfg.vf, cost, cfg.g0, cfg.params(), cfg.grid, r, kOracleEps);
    }

    const double scale = std::max(oracle.lpNorm<Eigen::Infinity>(), 1e-10);
    double max_rel = 0.0;
    {
        Csv csv(dir / "gradient.csv", {"component", "algorithm", "oracle", "rel_error"});
        for (Eigen::Index i = 0; i < oracle.size(); ++i) {
            const double rel = std::abs(report.gradient[i] - oracle[i]) / scale;
            max_rel = std::max(max_rel, rel);
            csv.row({std::to_string(i), num(report.gradient[i]), num(oracle[i]), num(rel)});
        }
    }
    {
        Csv csv(dir / "invariant.csv", {"k", "t", "c_k", "drift"});
        for (std::size_t k = 0; k < report.invariant.size(); ++k)
            csv.row({std::to_string(k), num(cfg.grid.time(static_cast<int>(k))), num(report.invariant[k]),
                     num(std::abs(report.invariant[k] - report.invariant[0]))});
    }

    json summary = describe(cfg);
    summary["command"] = "sensitivity";
    summary["mode"] = mode == Mode::initial ? "initial" : "parameter";
    summary["cost"] = cost(report.trajectory.g.back());
    summary["max_rel_error"] = max_rel;
    summary["conservation_drift"] = report.conservation_drift;
    summary["oracle_eps"] = kOracleEps;
    write_json(dir / "summary.json", summary);

    if (max_rel > kOracleLimit) {
        std::cerr << "sensitivity: algorithm and finite-difference oracle disagree (max relative error " << num(max_rel)
                  << ")\n";
        return kOracleDisagreement;
    }
    return kOk;
}

int optimize(const ProblemConfig& cfg, Mode mode, const fs::path& out_dir) {
    const CostFunction& cost = require_cost(cfg, "optimize");
    if (mode == Mode::parameter && cfg.vf.param_dim < 1)
        throw ConfigError("optimize --mode parameter: problem has no parameters");
    const fs::path dir = prepare(out_dir);
    const GroupSpec& spec = cfg.spec();
    const Retraction r(spec, cfg.retraction);

    OptimizationTrace trace;
    std::string failure;
    try {
        trace = mode == Mode::initial
                    ? minimize_initial_condition(cfg.vf, cost, cfg.g0, cfg.grid, r, cfg.linesearch, cfg.params())
                    : minimize_parameters(cfg.vf, cost, cfg.g0, cfg.params(), cfg.grid, r, cfg.linesearch);
    } catch (const LineSearchFailure& e) {
        trace = e.trace();
        failure = e.what();
    }

    {
        Csv csv(dir / "trace.csv", {"iteration", "cost", "grad_norm", "step"});
        for (const auto& it : trace.iterates)
            csv.row({std::to_string(it.iteration), num(it.cost), num(it.grad_norm), num(it.step)});
    }

    json summary = describe(cfg);
    summary["command"] = "optimize";
    summary["mode"] = mode == Mode::initial ? "initial" : "parameter";
    summary["converged"] = failure.empty() && trace.converged;
    summary["iterations"] = trace.iterates.empty() ? 0 : trace.iterates.back().iteration;
    if (!trace.iterates.empty()) {
        summary["initial_cost"] = trace.iterates.front().cost;
        summary["final_cost"] = trace.iterates.back().cost;
        summary["final_grad_norm"] = trace.iterates.back().grad_norm;
    }
    if (const auto* g = std::get_if<GroupElem>(&trace.final_point)) {
        Csv csv(dir / "final_point.csv", matrix_header("g", spec.n()));
        std::vector<std::string> row;
        for (double v : flatten(g->mat)) row.push_back(num(v));
        csv.row(row);
        summary["final_point"] = flatten(g->mat);
        summary["membership_residual"] = spec.membership_residual(g->mat);
    } else {
        const auto& u = std::get<ParamVec>(trace.final_point);
        std::vector<std::string> header;
        std::vector<std::string> row;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            header.push_back("u_" + std::to_string(i));
            row.push_back(num(u.coords[i]));
        }
        Csv csv(dir / "final_point.csv", header);
        csv.row(row);
        summary["final_point"] = to_std(u.coords);
    }
    if (!failure.empty()) summary["error"] = failure;
    write_json(dir / "summary.json", summary);

    if (!failure.empty()) {
        std::cerr << "optimize: " << failure << "\n";
        return kLineSearchFailure;
    }
    return kOk;
}

int audit(const ProblemConfig& cfg, const fs::path& out_dir) {
    const fs::path dir = prepare(out_dir);
    const GroupSpec& spec = cfg.spec();
    const int d = spec.dim();
    const Retraction r(spec, cfg.retraction);
    const ParamVec u = cfg.params();
    const double dt = cfg.grid.dt;
    Sampler sample(cfg.seed);

    struct Row {
        std::string check;
        std::optional<double> drift;
        double threshold = 0.0;
    };
    std::vector<Row> rows;

    // adjoint/variational pair from random boundary data
    Trajectory traj = forward_flow(cfg.vf, cfg.g0, cfg.grid, r, u);
    traj = adjoint_sweep(cfg.vf, std::move(traj), CoVec(sample.vec(d)), r, u);
    traj = variational_sweep(cfg.vf, std::move(traj), AlgVec(sample.vec(d)), r, u);
    const SeriesAudit quadratic = audit_quadratic_invariant(traj, r);
    rows.push_back({"quadratic_invariant", quadratic.drift, 1e-12 * (1.0 + std::abs(quadratic.series.front()))});

    const TrivializedHamiltonian h = adjoint_hamiltonian(cfg.vf, u);
    const AlgVec chi(sample.vec(d));
    try {
        const SeriesAudit noether = audit_noether(h, traj, chi, r);
        rows.push_back({"noether", noether.drift, 1e-12 * (1.0 + std::abs(noether.series.front()))});
    } catch (const NotLeftInvariant&) {
        rows.push_back({"noether", std::nullopt, 1e-12});
    }

    double flip = 0.0;
    for (int k = 1; k <= cfg.grid.N; ++k) {
        const AlgVec step = dt * traj.xi[k];
        const Operator direct = r.dtau_inv(-1.0 * step).transpose();
        const Operator via_ad = spec.Ad_op(r.tau(step)).transpose() * r.dtau_inv(step).transpose();
        flip = std::max(flip, (direct - via_ad).lpNorm<Eigen::Infinity>() / std::max(1.0, direct.lpNorm<Eigen::Infinity>()));
    }
    rows.push_back({"retraction_flip", flip, 1e-10});

    GroupElem g = cfg.g0;
    CoVec m(sample.vec(d));
    AlgVec xi = h.d_mu_h(g, m);
    oracle::Perturbation a{AlgVec(sample.vec(d)), CoVec(sample.vec(d))};
    oracle::Perturbation b{AlgVec(sample.vec(d)), CoVec(sample.vec(d))};
    const int steps = std::min(cfg.grid.N, kSymplecticSteps);
    double omega_max = 0.0;
    double omega_drift = 0.0;
    double truncated_change = 0.0;
    for (int k = 0; k < steps; ++k) {
        const SymplecticAudit s = audit_symplectic_form(h, g, m, xi, a, b, r, dt, cfg.solver);
        omega_max = std::max({omega_max, std::abs(s.omega_k), std::abs(s.omega_next)});
        omega_drift = std::max(omega_drift, std::abs(s.omega_next - s.omega_k));
        truncated_change = std::max(truncated_change, std::abs(s.truncated_next - s.truncated_k));
        g = s.step.g;
        m = s.step.m;
        xi = s.step.xi;
        a = s.next_first;
        b = s.next_second;
    }
    rows.push_back({"symplectic_form", omega_drift, 1e-6 * (1.0 + omega_max)});

    bool failed = false;
    json checks = json::array();
    {
        Csv csv(dir / "audits.csv", {"check", "drift", "threshold", "status"});
        for (const auto& row : rows) {
            std::string status = "n/a";
            if (row.drift) {
                status = *row.drift <= row.threshold ? "pass" : "fail";
                failed = failed || status == "fail";
            }
            csv.row({row.check, row.drift ? num(*row.drift) : "", num(row.threshold), status});
            checks.push_back({{"check", row.check},
                              {"drift", row.drift ? json(*row.drift) : json(nullptr)},
                              {"threshold", row.threshold},
                              {"status", status}});
        }
    }

    json summary = describe(cfg);
    summary["command"] = "audit";
    summary["seed"] = cfg.seed;
    summary["checks"] = checks;
    summary["symplectic_steps"] = steps;
    summary["truncated_form_max_step_change"] = truncated_change;
    write_json(dir / "summary.json", summary);

    if (failed) {
        std::cerr << "audit: at least one check failed, see audits.csv\n";
        return kAuditFailure;
    }
    return kOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adjoint sensitivity analysis for ODEs on matrix Lie groups", "lieadj"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    std::string mode_name = "initial";
    const std::map<std::string, std::string> descriptions = {
        {"integrate", "Integrate the forward flow and write trajectory.csv"},
        {"sensitivity", "Compute the discrete gradient and compare it against finite differences"},
        {"optimize", "Minimize the terminal cost over g0 or over the parameters"},
        {"audit", "Check the conservation laws of the discrete adjoint"},
    };
    for (const auto& [name, description] : descriptions) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("--config", config_path, "JSON problem config")->required();
        sub->add_option("--out", out_dir, "Output directory")->required();
        if (name == "sensitivity" || name == "optimize")
            sub->add_option("--mode", mode_name, "initial or parameter")
                ->check(CLI::IsMember({"initial", "parameter"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const Mode mode = mode_name == "parameter" ? Mode::parameter : Mode::initial;
    try {
        const ProblemConfig cfg = load_config(config_path);
        if (command == "integrate") return integrate(cfg, out_dir);
        if (command == "sensitivity") return sensitivity(cfg, mode, out_dir);
        if (command == "optimize") return optimize(cfg, mode, out_dir);
        return audit(cfg, out_dir);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NoParameters& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace lieadj::cli
