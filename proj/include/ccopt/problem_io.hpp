#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ccopt/acs.hpp"
#include "ccopt/problem.hpp"
#include "ccopt/scenarios_cwh.hpp"
#include "ccopt/validation.hpp"

namespace ccopt {

using nlohmann::json;

/// Parse/validation failure with the JSON path that caused it.
class ProblemParseError : public std::runtime_error {
public:
    explicit ProblemParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A problem plus the run configuration a problem file carries.
struct ProblemBundle {
    Problem problem;
    ACSConfig config;
    std::uint64_t seed = 0;
};

namespace io_detail {

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

inline Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j.front().is_array())
        throw ProblemParseError(where + ": expected a 2-D array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw ProblemParseError(where + ": ragged rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

inline Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array())
        throw ProblemParseError(where + ": expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    return v;
}

inline json dist_to_json(const ScalarDistribution& d) {
    json out;
    out["kind"] = d.kind_name();
    switch (d.kind()) {
    case ScalarDistribution::Kind::gamma:
        out["shape"] = d.param_a();
        out["scale"] = d.param_b();
        break;
    case ScalarDistribution::Kind::beta:
        out["a"] = d.param_a();
        out["b"] = d.param_b();
        break;
    case ScalarDistribution::Kind::gaussian:
        out["mean"] = d.param_a();
        out["std"] = d.param_b();
        break;
    case ScalarDistribution::Kind::deterministic:
        out["value"] = d.param_a();
        break;
    }
    return out;
}

inline ScalarDistribution dist_from_json(const json& j, const std::string& where) {
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "gamma")
            return ScalarDistribution::make_gamma(j.at("shape").get<double>(), j.at("scale").get<double>());
        if (kind == "beta")
            return ScalarDistribution::make_beta(j.at("a").get<double>(), j.at("b").get<double>());
        if (kind == "gaussian")
            return ScalarDistribution::make_gaussian(j.at("mean").get<double>(), j.at("std").get<double>());
        if (kind == "deterministic")
            return ScalarDistribution::make_deterministic(j.at("value").get<double>());
    } catch (const json::exception& e) {
        throw ProblemParseError(where + ": " + e.what());
    }
    throw ProblemParseError(where + ": unknown distribution kind '" + kind + "'");
}

} // namespace io_detail

inline RiskMethod risk_method_from_string(const std::string& s) {
    if (s == "vp") return RiskMethod::vp;
    if (s == "cantelli") return RiskMethod::cantelli;
    throw ProblemParseError("unknown risk method '" + s + "'");
}

inline std::string to_string(RiskMethod m) {
    return m == RiskMethod::vp ? "vp" : "cantelli";
}

inline json problem_to_json(const ProblemBundle& bundle, RiskMethod method = RiskMethod::vp) {
    using namespace io_detail;
    const Problem& p = bundle.problem;
    json j;
    j["schema"] = "ccopt-problem/1";
    j["name"] = p.name;
    j["system"] = {{"A", matrix_to_json(p.system.state_matrix)},
                   {"n", p.system.state_dim},
                   {"m", p.system.input_dim},
                   {"N", p.system.horizon},
                   {"x0", vector_to_json(p.system.initial_state)}};

    json steps = json::array();
    for (int k = 0; k < p.control_spec.steps(); ++k) {
        json cols = json::array();
        for (const auto& col : p.control_spec.columns[static_cast<std::size_t>(k)]) {
            json jc;
            if (col.dist) {
                jc["dist"] = dist_to_json(*col.dist);
                json rows = json::array();
                for (std::size_t r = 0; r < col.row_mask.size(); ++r)
                    if (col.row_mask[r])
                        rows.push_back(r);
                jc["rows"] = std::move(rows);
            } else {
                jc["dist"] = nullptr;
            }
            cols.push_back(std::move(jc));
        }
        steps.push_back({{"template", matrix_to_json(p.control_spec.templates[static_cast<std::size_t>(k)])},
                         {"columns", std::move(cols)}});
    }
    j["uncertainty"] = {{"steps", std::move(steps)}};

    json constraints = json::array();
    for (int k = 0; k < p.polytopes.steps(); ++k)
        constraints.push_back({{"G", matrix_to_json(p.polytopes.g[static_cast<std::size_t>(k)])},
                               {"h", vector_to_json(p.polytopes.h[static_cast<std::size_t>(k)])}});
    j["constraints"] = std::move(constraints);

    j["risk"] = {{"alpha", p.alpha}, {"method", to_string(method)}};
    j["cost"] = {{"type", "quadratic"}};
    j["input_box"] = {{"lower", vector_to_json(p.input_lower)}, {"upper", vector_to_json(p.input_upper)}};
    j["solver"] = {{"max_iterations", bundle.config.max_iterations},
                   {"convergence_tol", bundle.config.convergence_tol},
                   {"subproblem_tol", bundle.config.subproblem_tol}};
    j["seed"] = bundle.seed;
    return j;
}

inline ProblemBundle problem_from_json(const json& j, RiskMethod* method_out = nullptr) {
    using namespace io_detail;
    ProblemBundle bundle;
    Problem& p = bundle.problem;
    try {
        if (j.at("schema").get<std::string>() != "ccopt-problem/1")
            throw ProblemParseError("schema: unsupported problem schema");
        p.name = j.value("name", "unnamed");

        const json& sys = j.at("system");
        p.system.state_matrix = matrix_from_json(sys.at("A"), "system.A");
        p.system.state_dim = sys.at("n").get<int>();
        p.system.input_dim = sys.at("m").get<int>();
        p.system.horizon = sys.at("N").get<int>();
        p.system.initial_state = vector_from_json(sys.at("x0"), "system.x0");

        const json& steps = j.at("uncertainty").at("steps");
        for (std::size_t k = 0; k < steps.size(); ++k) {
            const std::string where = "uncertainty.steps[" + std::to_string(k) + "]";
            p.control_spec.templates.push_back(matrix_from_json(steps[k].at("template"), where + ".template"));
            std::vector<ColumnMultiplier> cols;
            for (std::size_t c = 0; c < steps[k].at("columns").size(); ++c) {
                const json& jc = steps[k].at("columns")[c];
                ColumnMultiplier cm;
                if (!jc.at("dist").is_null()) {
                    cm.dist = dist_from_json(jc.at("dist"), where + ".columns[" + std::to_string(c) + "].dist");
                    cm.row_mask.assign(static_cast<std::size_t>(p.system.state_dim), false);
                    for (const auto& r : jc.at("rows")) {
                        const auto idx = r.get<std::size_t>();
                        if (idx >= cm.row_mask.size())
                            throw ProblemParseError(where + ": row index out of range");
                        cm.row_mask[idx] = true;
                    }
                }
                cols.push_back(std::move(cm));
            }
            p.control_spec.columns.push_back(std::move(cols));
        }

        const json& constraints = j.at("constraints");
        for (std::size_t k = 0; k < constraints.size(); ++k) {
            const std::string where = "constraints[" + std::to_string(k) + "]";
            p.polytopes.g.push_back(matrix_from_json(constraints[k].at("G"), where + ".G"));
            p.polytopes.h.push_back(vector_from_json(constraints[k].at("h"), where + ".h"));
        }

        p.alpha = j.at("risk").at("alpha").get<double>();
        if (method_out)
            *method_out = risk_method_from_string(j.at("risk").at("method").get<std::string>());
        if (j.at("cost").at("type").get<std::string>() != "quadratic")
            throw ProblemParseError("cost.type: only 'quadratic' is supported");
        p.input_lower = vector_from_json(j.at("input_box").at("lower"), "input_box.lower");
        p.input_upper = vector_from_json(j.at("input_box").at("upper"), "input_box.upper");

        if (j.contains("solver")) {
            const json& s = j["solver"];
            bundle.config.max_iterations = s.value("max_iterations", bundle.config.max_iterations);
            bundle.config.convergence_tol = s.value("convergence_tol", bundle.config.convergence_tol);
            bundle.config.subproblem_tol = s.value("subproblem_tol", bundle.config.subproblem_tol);
        }
        bundle.seed = j.value("seed", std::uint64_t{0});
    } catch (const json::exception& e) {
        throw ProblemParseError(std::string("problem file: ") + e.what());
    }

    try {
        p.validate();
    } catch (const std::exception& e) {
        throw ProblemParseError(std::string("problem file: ") + e.what());
    }
    return bundle;
}

/// Resolves a problem reference: a built-in name (`cwh-gamma`, `cwh-beta`) or
/// a path to a problem file.
inline ProblemBundle load_problem(const std::string& ref, RiskMethod* method_out = nullptr) {
    if (ref == "cwh-gamma") {
        ProblemBundle bundle;
        bundle.problem = gamma_case();
        return bundle;
    }
    if (ref == "cwh-beta") {
        ProblemBundle bundle;
        bundle.problem = beta_case();
        return bundle;
    }
    std::ifstream in(ref);
    if (!in)
        throw ProblemParseError("cannot open problem file '" + ref + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ProblemParseError("problem file '" + ref + "': " + e.what());
    }
    return problem_from_json(j, method_out);
}

inline json solution_to_json(const Solution& sol, const std::string& problem_name,
                             const std::string& method, std::uint64_t seed,
                             const ACSConfig& config, double wall_time_s) {
    using namespace io_detail;
    json j;
    j["schema"] = "ccopt-result/1";
    j["problem"] = problem_name;
    j["method"] = method;
    j["seed"] = seed;
    j["config"] = {{"max_iterations", config.max_iterations},
                   {"convergence_tol", config.convergence_tol},
                   {"subproblem_tol", config.subproblem_tol}};
    j["status"] = to_string(sol.status);
    j["cost"] = sol.cost;
    j["iterations"] = sol.iterations;
    j["wall_time_s"] = wall_time_s;
    if (sol.input_seq.size() > 0)
        j["U"] = vector_to_json(sol.input_seq);
    j["lambda"] = sol.allocation.lambda;
    j["per_row_slack"] = sol.per_row_slack;
    j["cost_history"] = sol.cost_history;
    j["diagnostics"] = sol.diagnostics;
    return j;
}

inline json report_to_json(const ValidationReport& report, double alpha) {
    json j;
    j["schema"] = "ccopt-report/1";
    j["n_samples"] = report.n_samples;
    j["seed"] = report.seed;
    j["alpha"] = alpha;
    j["joint_satisfaction"] = report.joint_satisfaction;
    j["per_row_violation"] = report.per_row_violation;
    j["analytic_mean"] = report.analytic_mean;
    j["analytic_std"] = report.analytic_std;
    j["sample_mean"] = report.sample_mean;
    j["sample_std"] = report.sample_std;
    j["cost"] = report.cost;
    if (!report.unimodality.empty()) {
        json verdicts = json::array();
        for (int v : report.unimodality)
            verdicts.push_back(to_string(static_cast<UnimodalityVerdict>(v)));
        j["unimodality"] = std::move(verdicts);
    }
    return j;
}

inline void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

/// Plot-ready expected trajectory: one row per step with E[x(k)].
inline std::string expected_trajectory_csv(const Problem& problem, const Eigen::VectorXd& input_seq) {
    const StackedControlMoments moments = problem.moments();
    const int m = problem.system.input_dim;

    std::ostringstream out;
    out << "k";
    for (int s = 0; s < problem.system.state_dim; ++s)
        out << ",Ex" << s;
    out << "\n";

    Eigen::VectorXd mean = problem.system.initial_state;
    out << 0;
    for (int s = 0; s < problem.system.state_dim; ++s)
        out << "," << mean[s];
    out << "\n";
    for (int k = 1; k <= problem.system.horizon; ++k) {
        mean = problem.system.state_matrix * mean +
               moments.per_step_mean[static_cast<std::size_t>(k - 1)] *
                   input_seq.segment(static_cast<Eigen::Index>(k - 1) * m, m);
        out << k;
        for (int s = 0; s < problem.system.state_dim; ++s)
            out << "," << mean[s];
        out << "\n";
    }
    return out.str();
}

} // namespace ccopt
