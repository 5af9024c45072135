#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "ark/diagnostics.hpp"
#include "ark/linalg.hpp"
#include "ark/selection.hpp"
#include "ark/simulation.hpp"
#include "ark/stats.hpp"

namespace ark {

/// Plain comma-separated rows, no header, shortest round-trip decimal form.
void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::string& path, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::string& path);

/// A single row or column CSV read as a vector.
Vector read_vector_csv(const std::string& path);

/// rep,fdp,power,n_selected,threshold
void write_replications_csv(std::ostream& out, const SimReport& report);
/// setting,n,p,q,fdr,power,mcse,reps,failures
void write_summary_csv(std::ostream& out, const SimReport& report);
nlohmann::json replications_json(const SimReport& report);
nlohmann::json summary_json(const SimReport& report);

/// rule,q,k,threshold,n_selected,fdp,power,selected (1-based, space separated).
/// fdp and power are left empty without a ground truth.
void write_selection_csv(std::ostream& out, const SelectionOutcome& outcome,
                         const GroundTruth* truth = nullptr);

/// j,w,method (1-based j)
void write_stats_csv(std::ostream& out, const StatVector& stats);

nlohmann::json coupling_report_json(const CouplingReport& report);
/// j,kl (1-based j)
void write_kl_csv(std::ostream& out, const Vector& kl);

std::string format_real(double v);

}  // namespace ark
