#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "magwell/field.hpp"

namespace magwell {

enum class GaugeChoice {
  kColumnAccumulate,  ///< U1 = 1 away from the last column
  kRowAccumulate,     ///< U2 = 1 away from the last row
};

/// Gauge-covariant 5-point discretization of the Bochner Laplacian of L^p on
/// an n1 x n2 grid. Site (i, j) sits at (i a1, j a2) with linear index
/// j * n1 + i. Link u1(i, j) connects (i, j) -> (i+1, j) and u2(i, j)
/// connects (i, j) -> (i, j+1); both are parallel transports exp(-i p int A).
class LatticeOperator {
 public:
  LatticeOperator(const FieldSpec& field, int p, int n1, int n2, std::vector<cplx> u1,
                  std::vector<cplx> u2);

  const FieldSpec& field() const { return field_; }
  int p() const { return p_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  double a1() const { return a1_; }
  double a2() const { return a2_; }
  size_t dimension() const { return static_cast<size_t>(n1_) * n2_; }
  size_t index(int i, int j) const { return static_cast<size_t>(j) * n1_ + i; }
  Eigen::Vector2d site(int i, int j) const { return {i * a1_, j * a2_}; }

  const std::vector<cplx>& u1() const { return u1_; }
  const std::vector<cplx>& u2() const { return u2_; }
  const std::vector<double>& tau_samples() const { return tau_; }

  /// Gershgorin bound for the spectrum of the unshifted operator.
  double upper_bound() const { return 4.0 / (a1_ * a1_) + 4.0 / (a2_ * a2_); }
  /// True when the grid is below the warning resolution 8 sqrt(p Bmax) L / 2pi.
  bool under_resolved() const { return under_resolved_; }

  /// out = H v, optionally minus shift(x) v(x) when `shift` is non-empty.
  void apply(std::span<const cplx> v, std::span<cplx> out,
             std::span<const double> shift = {}) const;

 private:
  FieldSpec field_;
  int p_;
  int n1_, n2_;
  double a1_, a2_;
  std::vector<cplx> u1_, u2_;
  std::vector<double> tau_;
  std::vector<double> p_tau_;
  bool under_resolved_ = false;

  friend void renormalized_matvec(const LatticeOperator&, std::span<const cplx>, std::span<cplx>);
};

/// Flux p * int_c B over every cell, exact from the Fourier data; cell (i, j)
/// has lower-left corner at site (i, j).
std::vector<double> plaquette_fluxes(const FieldSpec& field, int p, int n1, int n2);

/// Throws std::invalid_argument("grid under-resolves magnetic length") below
/// the hard floor 2 sqrt(p Bmax) L / 2pi.
LatticeOperator build_links(const FieldSpec& field, int p, int n1, int n2,
                            GaugeChoice gauge = GaugeChoice::kColumnAccumulate);

void matvec(const LatticeOperator& op, std::span<const cplx> v, std::span<cplx> out);
std::vector<cplx> matvec(const LatticeOperator& op, std::span<const cplx> v);

/// Delta_p v = H v - p tau v.
void renormalized_matvec(const LatticeOperator& op, std::span<const cplx> v, std::span<cplx> out);

/// U_mu(x) -> g(x) U_mu(x) conj(g(x + mu)).
LatticeOperator gauge_transform(const LatticeOperator& op, std::span<const cplx> phases);

/// U1(x) U2(x+e1) conj(U1(x+e2)) conj(U2(x)) for every cell.
std::vector<cplx> plaquette_phases(const LatticeOperator& op);

/// Binary link dump: "MAGL", n1, n2, p as little-endian uint32, then u1 and u2
/// as interleaved little-endian float32 (re, im).
void write_links(const LatticeOperator& op, std::ostream& os);

struct LinkDump {
  std::uint32_t n1 = 0, n2 = 0, p = 0;
  std::vector<std::complex<float>> u1, u2;
};
LinkDump read_links(std::istream& is);

}  // namespace magwell
