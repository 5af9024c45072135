#include "ark/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace ark {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read '" + path + "'");
  return in;
}

nlohmann::json real_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // shortest text that reads back to the same double
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  auto out = open_out(path);
  write_matrix_csv(out, m);
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument,
                    "line " + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::DimensionMismatch, "line " + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::InvalidArgument, "empty matrix file");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

Matrix read_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  return read_matrix_csv(in);
}

Vector read_vector_csv(const std::string& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw Error(ErrorKind::DimensionMismatch, "'" + path + "' is not a single row or column");
}

void write_replications_csv(std::ostream& out, const SimReport& report) {
  out << "rep,fdp,power,n_selected,threshold\n";
  for (const auto& r : report.rows) {
    out << r.rep << ',' << format_real(r.fdp) << ',' << format_real(r.power) << ','
        << r.n_selected << ',' << format_real(r.threshold) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SimReport& report) {
  const SimConfig& c = report.config;
  out << "setting,n,p,q,fdr,power,mcse,reps,failures\n";
  out << to_string(c.setting) << ',' << c.n << ',' << c.p << ',' << format_real(c.q) << ','
      << format_real(report.fdr) << ',' << format_real(report.power) << ','
      << format_real(report.mcse) << ',' << report.successes() << ',' << report.failures.size()
      << '\n';
}

nlohmann::json replications_json(const SimReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"rep", r.rep},
                    {"fdp", r.fdp},
                    {"power", r.power},
                    {"n_selected", r.n_selected},
                    {"threshold", real_json(r.threshold)}});
  }
  return rows;
}

nlohmann::json summary_json(const SimReport& report) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"rep", f.rep}, {"kind", std::string(to_string(f.kind))}, {"message", f.message}});
  }
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [key, value] : config_entries(report.config)) config[key] = value;
  nlohmann::json j = {{"setting", to_string(report.config.setting)},
                      {"n", report.config.n},
                      {"p", report.config.p},
                      {"q", report.config.q},
                      {"fdr", report.fdr},
                      {"power", report.power},
                      {"mcse", report.mcse},
                      {"reps", report.successes()},
                      {"failures", report.failures.size()},
                      {"failure_details", failures},
                      {"max_kkt_residual", report.max_kkt_residual},
                      {"total_fits", report.total_fits},
                      {"wall_seconds", report.wall_seconds},
                      {"config", config}};
  if (report.kfwer_rate) j["kfwer_rate"] = *report.kfwer_rate;
  return j;
}

void write_selection_csv(std::ostream& out, const SelectionOutcome& o, const GroundTruth* truth) {
  out << "rule,q,k,threshold,n_selected,fdp,power,selected\n";
  out << to_string(o.rule) << ',' << format_real(o.q) << ',';
  if (o.rule == SelectionRule::kfwer) out << o.k;
  out << ',' << format_real(o.threshold) << ',' << o.selected.size() << ',';
  if (truth) {
    const Score s = score(o, *truth);
    out << format_real(s.fdp) << ',' << format_real(s.power);
  } else {
    out << ',';
  }
  out << ',';
  for (std::size_t i = 0; i < o.selected.size(); ++i) {
    if (i > 0) out << ' ';
    out << o.selected[i] + 1;
  }
  out << '\n';
}

void write_stats_csv(std::ostream& out, const StatVector& stats) {
  out << "j,w,method\n";
  const std::string method = to_string(stats.method);
  for (Eigen::Index j = 0; j < stats.w.size(); ++j) {
    out << j + 1 << ',' << format_real(stats.w(j)) << ',' << method << '\n';
  }
}

nlohmann::json coupling_report_json(const CouplingReport& r) {
  nlohmann::json j = {{"norm_1_2", r.norm_1_2},
                      {"wasserstein_coupling_estimate_upper_bound", real_json(r.wasserstein_estimate)},
                      {"lemma2_constant", real_json(r.lemma2_constant)}};
  if (r.kl_stats) {
    j["kl_mean"] = r.kl_stats->mean();
  }
  return j;
}

void write_kl_csv(std::ostream& out, const Vector& kl) {
  out << "j,kl\n";
  for (Eigen::Index j = 0; j < kl.size(); ++j) out << j + 1 << ',' << format_real(kl(j)) << '\n';
}

}  // namespace ark
