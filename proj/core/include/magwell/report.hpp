#pragma once

#include <string>
#include <vector>

#include "magwell/pipeline.hpp"

namespace magwell {

/// Shortest round-trip text for a double, 17 significant digits, '.' decimal.
std::string format_double(double v);

/// Columns p,grid,j,lambda,lambda_extrap,mu_model,residual,solver_residual.
std::string sweep_csv(const SweepReport& rep);
/// Keys: field_hash, wells, j12, mu, mu_no_j12, records, fits, j12_empirical, settings.
std::string sweep_json(const SweepReport& rep);

/// Header j,mu,cutoff,convergence.
std::string model_csv(const ModelTable& t);
std::string model_json(const ModelTable& t);

std::string wells_csv(const std::vector<WellData>& wells);
std::string wells_json(const std::vector<WellData>& wells);

/// Header j,lambda,solver_residual.
std::string lattice_csv(const EigResult& eig);
std::string lattice_json(const EigResult& eig, int p, int n1, int n2);

}  // namespace magwell
