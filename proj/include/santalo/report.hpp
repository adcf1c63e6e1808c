#ifndef SANTALO_REPORT_HPP
#define SANTALO_REPORT_HPP

#include <cmath>
#include <cstdint>
#include <string>

namespace santalo {

/*
 * Outcome of one inequality check.  margin is the slack of the inequality
 * as stated (nonnegative when it holds): rhs - lhs for upper bounds,
 * lhs - rhs for lower bounds.  rel_margin normalizes by the bound side and
 * pass applies the stated relative tolerance to it.
 */
struct InequalityReport {
    std::string id;
    int n = 0;
    std::string subject;
    std::string params;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double rel_margin = 0.0;
    double tol = 0.0;
    bool pass = false;
    std::string grid;
    std::uint64_t seed = 0;
    long millis = 0;
};

inline InequalityReport finish_report(InequalityReport r, double slack, double bound_scale,
                                      double tol_rel) {
    r.margin = slack;
    r.rel_margin = slack / std::max(std::abs(bound_scale), 1e-12);
    r.tol = tol_rel;
    r.pass = r.rel_margin >= -tol_rel;
    return r;
}

}  // namespace santalo

#endif
