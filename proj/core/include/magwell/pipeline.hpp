#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "magwell/eigensolver.hpp"
#include "magwell/field.hpp"
#include "magwell/fock.hpp"
#include "magwell/lattice.hpp"

namespace magwell {

struct SolverSettings {
  double tol = 1e-6;
  int max_iter = 5000;
  std::uint64_t seed = 12345;
};

/// Lowest k eigenpairs of the lattice operator (renormalized: Delta_p).
EigResult solve_lattice(const LatticeOperator& op, int k, const SolverSettings& settings,
                        bool renormalized = false);

struct GridLevels {
  int grid = 0;
  std::vector<double> eigenvalues;
  std::vector<double> solver_residuals;
  bool converged = false;
  long matvecs = 0;
  Eigen::MatrixXcd vectors;  ///< filled for the finest grid when requested
};

struct LatticeSpectrum {
  int p = 0;
  std::vector<GridLevels> grids;     ///< ascending grid size
  std::vector<double> extrapolated;  ///< Richardson from the two finest grids
  std::vector<double> extrapolation_error;
};

/// Richardson a^2 extrapolation over grids in doubling ratio. With three or
/// more grids the error estimate is |R_fine - R_coarse| / 15, otherwise
/// |lambda_fine - lambda_coarse| / 3.
LatticeSpectrum lattice_spectrum(const FieldSpec& field, int p, const std::vector<int>& grids,
                                 int k, const SolverSettings& settings,
                                 bool keep_finest_vectors = false);

/// Eigenvalues of diag(nu) + p <u_i, tau u_j> over the first cluster of Delta_p.
std::vector<double> lll_reduce(const LatticeOperator& op, const ClusterPartition& cluster,
                               const EigResult& renormalized_eigs);

/// Fraction of the mass of a grid vector at Euclidean distance >= r from x0.
std::vector<double> localization_profile(const LatticeOperator& op, const Eigen::VectorXcd& u,
                                         const WellData& well, const std::vector<double>& radii);

struct QuasimodeResult {
  double rayleigh_quotient = 0.0;
  double residual_norm = 0.0;
  double points_per_length = 0.0;
};

/// Zeroth-order quasimode chi(Z) u0(sqrt(p) Z) sampled on the lattice, with u0
/// the model eigenvector `coeffs` in `basis`. Throws when the magnetic length
/// (p tau0)^{-1/2} spans fewer than 8 grid points.
QuasimodeResult quasimode_rq(const LatticeOperator& op, const WellData& well,
                             const FockBasis& basis, const Eigen::VectorXcd& coeffs);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;  ///< log c for power fits, constant term otherwise
  double r_squared = 0.0;
};

/// Least squares log|y| = intercept + slope log x.
FitResult power_fit(const std::vector<double>& x, const std::vector<double>& y);
/// Least squares y = intercept + slope x.
FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct InterceptFit {
  double value = 0.0;
  double error_bar = 0.0;  ///< sum_p |dJ/dr_p| * err_p
  std::vector<double> coefficients;
};

/// Fits r(p) = J + c1/p + c2/p^2 and propagates per-point errors into J.
InterceptFit intercept_fit(const std::vector<double>& p, const std::vector<double>& r,
                           const std::vector<double>& err);

struct SweepRecord {
  int p = 0;
  int grid = 0;
  int j = 0;
  double lambda = 0.0;
  double lambda_extrap = 0.0;
  double mu_model = 0.0;
  double residual = 0.0;  ///< lambda_extrap - p tau0 - mu
  double extrap_error = 0.0;
  double solver_residual = 0.0;
  bool flagged = false;  ///< extrapolation error above 10% of |residual|
};

struct LevelFit {
  int j = 0;
  double slope = 0.0;
  double log_c = 0.0;
};

struct SweepReport {
  std::string field_hash;
  std::vector<WellData> wells;
  std::vector<double> j12;  ///< per well
  double j12_defect = 0.0;
  std::vector<double> mu;           ///< ensemble levels including j12
  std::vector<double> mu_no_j12;
  std::vector<int> p_list;
  std::vector<int> grids;
  SolverSettings settings;
  std::vector<LatticeSpectrum> spectra;  ///< one per p
  std::vector<SweepRecord> records;
  std::vector<LevelFit> fits;
  InterceptFit j12_empirical;
};

std::string field_hash(const FieldSpec& field);

struct ModelSettings {
  std::vector<int> cutoffs = kDefaultCutoffs;
  double tolerance = 1e-9;
};

/// Model side: wells, J12 from the ladder calculus, ensemble mu_j.
struct ModelSide {
  std::vector<WellData> wells;
  std::vector<double> j12;  ///< per well
  double j12_defect = 0.0;
  std::vector<EnsembleLevel> levels;
  std::vector<EnsembleLevel> levels_no_j12;
  std::vector<ModelSpectrum> per_well;  ///< with eigenvectors, one per well
};

ModelSide model_side(const FieldSpec& field, int count, const ModelSettings& model = {});

/// Ensemble levels from the three model oracles side by side.
struct ModelTable {
  std::vector<EnsembleLevel> levels;  ///< Fock truncation
  std::vector<double> closed_form;
  std::vector<double> williamson;
  int cutoff = 0;
  double convergence = 0.0;  ///< worst over wells
  double max_disagreement = 0.0;
};

ModelTable model_table(const FieldSpec& field, int count, const ModelSettings& model = {});

SweepReport sweep(const FieldSpec& field, const std::vector<int>& p_list, int j_count,
                  const std::vector<int>& grids, const SolverSettings& settings,
                  const ModelSettings& model = {}, bool keep_finest_vectors = false);

struct GapPoint {
  int p = 0;
  int grid = 0;
  int first_cluster_size = 0;
  double cl_estimate = 0.0;  ///< max |nu| over the first cluster
  double onset = 0.0;        ///< lowest eigenvalue of the second cluster
  bool ok = false;
  std::string status;
};

struct GapReport {
  std::vector<GapPoint> points;
  FitResult onset_fit;  ///< onset = intercept + slope p
  double cl_ratio = 0.0;
};

/// Delta_p spectrum per p on grids[i] with p*d + extra levels.
GapReport gap_track(const FieldSpec& field, const std::vector<int>& p_list,
                    const std::vector<int>& grids, const SolverSettings& settings,
                    int extra = 6, double gap_factor = 10.0);

}  // namespace magwell
