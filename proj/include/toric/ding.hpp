#ifndef TORIC_DING_HPP
#define TORIC_DING_HPP

#include <memory>
#include <string>
#include <vector>

#include "toric/fano.hpp"
#include "toric/legendre.hpp"
#include "toric/polytope.hpp"

namespace toric {

enum class StepSchedule { kAdaptive, kDiminishing, kPolyak };

struct DingConfig {
    int grid = 0;              // lattice refinement 1/s; 0 = per-dimension default
    double tol = 1e-5;         // KE residual target, sup norm of the subgradient
    double integration_tol = 1e-7;
    int max_iterations = 6000;
    StepSchedule schedule = StepSchedule::kAdaptive;
    double step0 = 1.0;        // s_k = step0/sqrt(k) for the diminishing schedule
    double polyak_target = 0;  // known optimal value, for calibration runs
    unsigned seed = 0;         // recorded for reproducibility of a run
    bool require_certified = false;
    int diagnostic_iterations = 0; // > 0: allow non-semistable input, trace ascent
    int rows = 0;              // outer quadrature rows for n = 2; 0 = default
};

struct DingResult {
    double f_star = 0;      // converged objective value (-Ding)
    double chi_volume = 0;  // vol * f_star / 2
    double height = 0;      // (n+1)! * chi_volume
    double ke_residual = 0; // sup norm of the final subgradient
    int iterations = 0;
    bool converged = false;
    bool certified = false;
    double integration_error = 0;
    int grid_parameter = 0;       // effective s after vertex snapping
    std::size_t node_count = 0;
    double vol = 0;
    int dim = 0;
    std::vector<double> objective_trace; // accepted iterates
    std::vector<double> intercepts;      // optimal c at the grid nodes
};

// Semi-discrete Ding maximization: decision variables are intercepts at the
// dual grid nodes, the objective is
//   F(c) = -sum_i w_i c~_i / Vol(P) + log int e^{-phi_c} + n log pi,
// with c~ the lower convex envelope of c over the nodes. Its maximum over c
// is 2 vol_chi(KE) / vol; the optimality condition is the discrete
// Monge-Ampere equation mu_phi(Cell_i) = w_i / Vol(P).
class DingSolver {
public:
    DingSolver(const Polytope& p, const DingConfig& cfg);
    ~DingSolver();
    DingSolver(DingSolver&&) noexcept;

    // Spec objective, envelope-projected first term. Throws NotSemistable
    // unless the barycenter vanishes or diagnostics are enabled.
    double objective(const std::vector<double>& c) const;
    // Raw-intercept objective; equals objective() on envelope-feasible c.
    double objective_raw(const std::vector<double>& c) const;
    // mu_phi(Cell_i) - w_i/Vol(P); components sum to zero.
    std::vector<double> subgradient(const std::vector<double>& c) const;
    // Lower convex envelope values of c over the nodes (exact in 1-d,
    // biconjugation-based in 2-d).
    std::vector<double> envelope(const std::vector<double>& c) const;
    // Dense negative Hessian of the objective (row major), for diagnostics.
    std::vector<double> neg_hessian(const std::vector<double>& c) const;
    // int_P of the lower convex envelope of c, integrated against the
    // envelope itself (exact in 1-d, fine biconjugation quadrature in 2-d).
    double dual_integral(const std::vector<double>& c) const;

    DingResult maximize();

    const DualGridFunction& grid() const;
    int grid_parameter() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-call convenience wrapper.
DingResult maximize_ding(const Polytope& p, const DingConfig& cfg = {});

struct BoundCheck {
    std::string name;
    bool passed = false;
    double lhs = 0;
    double rhs = 0;
    double margin = 0;
};

// Compares a converged Ding run against the closed-form bounds: the
// universal chi-volume bound, the KE height sandwich, and the P^n maximum.
std::vector<BoundCheck> verify_bounds(const DingResult& result, const FanoReport& report);

struct LinearEquivalenceExperiment {
    double measured_delta = 0;
    double predicted_delta = 0; // -1/2 log |det A|
    DingResult base;
    DingResult image;
};

// Runs the optimizer on P and on A.P and compares the change in chi/vol
// against the transformation rule.
LinearEquivalenceExperiment linear_equivalence_experiment(const Polytope& p, const RatMat& a,
                                                          const DingConfig& cfg = {});

} // namespace toric

#endif
