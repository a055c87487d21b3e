#pragma once

#include <string>
#include <vector>

namespace playlab {

// Central finite differences against the analytic gradients, on randomized
// small shapes in double precision. Five probes per tensor; the relative
// error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
struct FdReport {
    std::string op_name;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

std::vector<std::string> fd_check_op_names();

// Throws ConfigError for unknown op names. Default tolerances: 1e-6 for
// linear/pool/relu/dropout/loss, 1e-3 for conv layers and the full pipeline.
FdReport finite_difference_check(const std::string& op_name);
FdReport finite_difference_check(const std::string& op_name, double tolerance);

std::vector<FdReport> run_all_fd_checks();

} // namespace playlab
