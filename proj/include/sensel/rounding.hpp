#pragma once

#include <string>
#include <vector>

#include "sensel/distances.hpp"
#include "sensel/relax.hpp"
#include "sensel/types.hpp"

namespace sensel {

// {x : (x - center)' shape (x - center) <= 1}; `point` marks the degenerate
// no-uncertainty case (the set is just {center}).
struct Ellipsoid {
  VectorXd center;
  MatrixXd shape;
  bool point = false;

  static Ellipsoid at(VectorXd c) { return {std::move(c), MatrixXd(), true}; }
  static Ellipsoid of(VectorXd c, MatrixXd A) {
    return {std::move(c), std::move(A), false};
  }
};

struct QcqpResult {
  double value = 0;
  VectorXd m0, m1;
};

// min (m1 - m0)' metric (m1 - m0) over m0 in e0, m1 in e1; alternating
// metric projections, each solved by a scalar root find on the Lagrange
// multiplier. Returns 0 when the ellipsoids intersect.
QcqpResult qcqp_min_quadratic(const Ellipsoid& e0, const Ellipsoid& e1,
                              const MatrixXd& metric);

// Worst-case criteria over the mean-uncertainty ellipsoids; with both k
// infinite these coincide with kl_distance / chernoff_distance.
double worst_case_kl(const MatrixXd& basis, const GaussianPair& pair,
                     const UncertaintyModel& unc);
double worst_case_kl(const SelectionMatrix& sel, const GaussianPair& pair,
                     const UncertaintyModel& unc);
double worst_case_kl(const SubspaceBasis& basis, const GaussianPair& pair,
                     const UncertaintyModel& unc);

ChernoffResult worst_case_c(const MatrixXd& basis, const GaussianPair& pair,
                            const UncertaintyModel& unc);
ChernoffResult worst_case_c(const SelectionMatrix& sel,
                            const GaussianPair& pair,
                            const UncertaintyModel& unc);
ChernoffResult worst_case_c(const SubspaceBasis& basis,
                            const GaussianPair& pair,
                            const UncertaintyModel& unc);

double worst_case(Criterion criterion, const MatrixXd& basis,
                  const GaussianPair& pair, const UncertaintyModel& unc);

// Projection phase: the p sensors with the largest diag(EE'), ties to the
// lowest index.
SelectionMatrix project_to_selection(const SubspaceBasis& E, int p);

// Refinement phase: p column sweeps over all admissible sensors, freezing
// the best candidate per pass by the worst-case criterion.
SelectionMatrix refine(const SelectionMatrix& start, const GaussianPair& pair,
                       const UncertaintyModel& unc, Criterion criterion);

struct PhaseRecord {
  std::string name;
  double objective = 0;
  double millis = 0;
};

struct PipelineResult {
  SelectionMatrix selection;
  double objective = 0;          // worst-case criterion value
  double stiefel_objective = 0;  // relaxation-phase value
  std::vector<PhaseRecord> phase_trace;
};

// Relaxation -> projection -> refinement pipelines.
PipelineResult r_kl(const ProblemInstance& instance,
                    const SolverParams& params = {});
PipelineResult r_c(const ProblemInstance& instance,
                   const SolverParams& params = {});

}  // namespace sensel
