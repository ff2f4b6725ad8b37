#include "stabsens/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stabsens::io {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("io: cannot read file '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw ConfigError("io: '" + path + "' is not valid JSON: " + err.what());
  }
  return j;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ConfigError("io: " + what + " must be an array of arrays");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError("io: " + what + " rows have inconsistent lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& cell = row[static_cast<std::size_t>(c)];
      if (!cell.is_number()) {
        throw ConfigError("io: " + what + " holds a non-numeric entry");
      }
      const double v = cell.get<double>();
      if (!std::isfinite(v)) {
        throw ConfigError("io: " + what + " holds a non-finite entry");
      }
      m(r, c) = v;
    }
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

Eigen::MatrixXd load_system_matrix(const std::string& path) {
  const json j = parse_file(path);
  if (j.contains("J")) {
    const Eigen::MatrixXd m = matrix_from_json(j["J"], "J");
    if (m.rows() != m.cols()) throw ConfigError("io: J must be square");
    return m;
  }
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!j.contains(key)) {
      throw ConfigError(
          "io: system file needs either \"J\" or all of \"A\",\"B\",\"C\","
          "\"D\"");
    }
  }
  DescriptorSystem sys;
  sys.A = matrix_from_json(j["A"], "A");
  sys.B = matrix_from_json(j["B"], "B");
  sys.C = matrix_from_json(j["C"], "C");
  sys.D = matrix_from_json(j["D"], "D");
  return reduce(sys);
}

ParametricJacobian load_parametric(const std::string& path) {
  const json j = parse_file(path);
  if (!j.contains("J0") || !j.contains("params") || !j["params"].is_array()) {
    throw ConfigError("io: parametric file needs \"J0\" and \"params\"");
  }
  ParametricJacobian pj;
  pj.J0 = matrix_from_json(j["J0"], "J0");
  for (const auto& p : j["params"]) {
    if (!p.contains("name") || !p.contains("M") || !p.contains("lo") ||
        !p.contains("hi")) {
      throw ConfigError("io: each param needs \"name\", \"M\", \"lo\", \"hi\"");
    }
    JacobianMode mode;
    mode.name = p["name"].get<std::string>();
    mode.coefficient = matrix_from_json(p["M"], "M of " + mode.name);
    mode.lo = p["lo"].get<double>();
    mode.hi = p["hi"].get<double>();
    pj.modes.push_back(std::move(mode));
  }
  pj.d.resize(pj.param_count());
  for (int k = 0; k < pj.param_count(); ++k) {
    pj.d[k] = 0.5 * (pj.modes[k].lo + pj.modes[k].hi);
  }
  pj.validate();
  return pj;
}

Eigen::VectorXd load_vector(const std::string& path) {
  const json j = parse_file(path);
  const json* arr = &j;
  if (j.is_object() && j.contains("x0")) arr = &j["x0"];
  if (!arr->is_array()) {
    throw ConfigError("io: expected a JSON array of reals in '" + path + "'");
  }
  Eigen::VectorXd v(arr->size());
  for (std::size_t i = 0; i < arr->size(); ++i) {
    if (!(*arr)[i].is_number()) {
      throw ConfigError("io: vector entry is not numeric");
    }
    v[static_cast<Eigen::Index>(i)] = (*arr)[i].get<double>();
    if (!std::isfinite(v[static_cast<Eigen::Index>(i)])) {
      throw ConfigError("io: vector entry is not finite");
    }
  }
  return v;
}

std::string certificate_to_json(const StabilityCertificate& cert) {
  json j;
  j["eta"] = cert.eta;
  j["stable"] = cert.stable();
  j["phi_svec"] = vector_to_json(svec(cert.phi).values);
  json ups = json::array();
  for (const auto& block : cert.upsilon) {
    ups.push_back(vector_to_json(svec(block).values));
  }
  j["upsilon_svec"] = std::move(ups);
  j["gap"] = cert.gap;
  j["status"] = to_string(cert.status);
  j["solve_time_s"] = cert.solve_time_s;
  j["n"] = cert.n;
  j["eps"] = cert.eps;
  return j.dump(2);
}

std::string sensitivity_to_json(const SensitivityReport& report) {
  json j;
  j["method"] = to_string(report.method);
  if (report.d_eta_d_J.size() > 0) {
    j["d_eta_d_J"] = matrix_to_json(report.d_eta_d_J);
  }
  if (report.d_eta_d_params.size() > 0) {
    json params;
    for (std::size_t k = 0; k < report.param_names.size(); ++k) {
      params[report.param_names[k]] =
          report.d_eta_d_params[static_cast<Eigen::Index>(k)];
    }
    j["d_eta_d_params"] = std::move(params);
  }
  j["degenerate"] = report.degenerate;
  j["cond_estimate"] = report.cond_estimate;
  j["elapsed_s"] = report.elapsed_s;
  return j.dump(2);
}

std::string lyapunov_to_json(const LyapunovSolution& sol, double xi) {
  json j;
  j["xi"] = xi;
  j["phi"] = matrix_to_json(sol.phi.dense());
  j["positive_definite"] = sol.positive_definite;
  j["stable"] = sol.positive_definite;
  return j.dump(2);
}

std::string trajectory_to_json(const Trajectory& traj, double eta) {
  json j;
  j["eta"] = eta;
  j["times"] = vector_to_json(traj.times);
  j["lyapunov"] = vector_to_json(traj.lyapunov_values);
  j["states"] = matrix_to_json(traj.states);
  j["bound_violations"] = traj.bound_violations;
  return j.dump(2);
}

std::string check_to_json(const StabilityCertificate& cert, double eta_bar,
                          bool satisfied) {
  json j;
  j["eta"] = cert.eta;
  j["eta_bar"] = eta_bar;
  j["satisfied"] = satisfied;
  j["status"] = to_string(cert.status);
  return j.dump(2);
}

std::string bench_to_json(const BenchReport& report) {
  json j;
  j["model"] = {{"n", report.n}, {"params", report.param_names}};
  j["config"] = {{"scenarios", report.config.scenarios},
                 {"seed", report.config.seed},
                 {"fd_steps", report.config.fd_steps},
                 {"eps", report.config.eps},
                 {"tol", report.config.tol},
                 {"eta_bar", report.config.eta_bar},
                 {"exclude_degenerate", report.config.exclude_degenerate},
                 {"parallel", report.config.parallel}};
  j["n_degenerate"] = report.n_degenerate;
  j["n_nonoptimal"] = report.n_nonoptimal;
  j["alpha_excluded"] = report.alpha_excluded;

  json accuracy = json::array();
  for (std::size_t s = 0; s < report.config.fd_steps.size(); ++s) {
    json entry;
    entry["fd_step"] = report.config.fd_steps[s];
    json alpha;
    for (std::size_t k = 0; k < report.param_names.size(); ++k) {
      alpha[report.param_names[k]] =
          report.alpha(static_cast<Eigen::Index>(s),
                       static_cast<Eigen::Index>(k));
    }
    entry["alpha"] = std::move(alpha);
    entry["median_abs_dev"] = report.median_abs_dev[s];
    entry["t_cpu_fd_s"] = report.t_cpu_fd_s[s];
    entry["r_t"] = report.r_t[s];
    accuracy.push_back(std::move(entry));
  }
  j["per_step"] = std::move(accuracy);
  j["t_cpu_analytic_s"] = report.t_cpu_analytic_s;

  json records = json::array();
  for (const ScenarioRecord& rec : report.records) {
    json r;
    r["d"] = vector_to_json(rec.d);
    r["eta"] = rec.eta;
    r["status"] = to_string(rec.status);
    r["degenerate"] = rec.degenerate;
    r["constraint_ok"] = rec.constraint_ok;
    if (rec.analytic.size() > 0) r["analytic"] = vector_to_json(rec.analytic);
    json fd = json::array();
    for (std::size_t s = 0; s < rec.fd_values.size(); ++s) {
      json v = json::array();
      for (Eigen::Index k = 0; k < rec.fd_values[s].size(); ++k) {
        const double x = rec.fd_values[s][k];
        if (std::isfinite(x)) {
          v.push_back(x);
        } else {
          v.push_back(nullptr);
        }
      }
      fd.push_back(std::move(v));
    }
    r["fd"] = std::move(fd);
    r["t_solve_s"] = rec.t_solve_s;
    r["t_analytic_s"] = rec.t_analytic_s;
    r["t_fd_s"] = rec.t_fd_s;
    records.push_back(std::move(r));
  }
  j["scenarios"] = std::move(records);
  return j.dump(2);
}

std::string bench_to_csv(const BenchReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "scenario,status,degenerate,eta,constraint_ok";
  for (const auto& name : report.param_names) out << ",d_" << name;
  for (const auto& name : report.param_names) out << ",analytic_" << name;
  for (double step : report.config.fd_steps) {
    for (const auto& name : report.param_names) {
      out << ",fd" << step << "_" << name;
    }
  }
  out << ",t_solve_s,t_analytic_s";
  for (double step : report.config.fd_steps) out << ",t_fd" << step << "_s";
  out << "\n";

  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const ScenarioRecord& rec = report.records[i];
    out << i << "," << to_string(rec.status) << "," << rec.degenerate << ","
        << rec.eta << "," << rec.constraint_ok;
    for (Eigen::Index k = 0; k < rec.d.size(); ++k) out << "," << rec.d[k];
    for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(
                                     report.param_names.size());
         ++k) {
      out << ",";
      if (rec.analytic.size() > k) out << rec.analytic[k];
    }
    for (const auto& values : rec.fd_values) {
      for (Eigen::Index k = 0; k < values.size(); ++k) {
        out << ",";
        if (std::isfinite(values[k])) out << values[k];
      }
    }
    out << "," << rec.t_solve_s << "," << rec.t_analytic_s;
    for (double t : rec.t_fd_s) out << "," << t;
    out << "\n";
  }
  return out.str();
}

}  // namespace stabsens::io
