#include "magwell/lattice.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace magwell {

namespace {

inline cplx unit(double phase) { return {std::cos(phase), std::sin(phase)}; }

double resolution_scale(const FieldSpec& field, int p, double len) {
  return std::sqrt(p * field.b_max()) * len / kTwoPi;
}

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("truncated link dump");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& os, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32(os, v);
}

float get_f32(std::istream& is) {
  const std::uint32_t v = get_u32(is);
  float f;
  std::memcpy(&f, &v, 4);
  return f;
}

}  // namespace

LatticeOperator::LatticeOperator(const FieldSpec& field, int p, int n1, int n2,
                                 std::vector<cplx> u1, std::vector<cplx> u2)
    : field_(field),
      p_(p),
      n1_(n1),
      n2_(n2),
      a1_(field.torus().l1 / n1),
      a2_(field.torus().l2 / n2),
      u1_(std::move(u1)),
      u2_(std::move(u2)) {
  if (n1 < 8 || n2 < 8) throw std::invalid_argument("grid must be at least 8x8");
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (u1_.size() != dimension() || u2_.size() != dimension())
    throw std::invalid_argument("link array size mismatch");
  tau_.resize(dimension());
  p_tau_.resize(dimension());
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      tau_[index(i, j)] = intensity_tau(field, site(i, j));
      p_tau_[index(i, j)] = p * tau_[index(i, j)];
    }
  under_resolved_ = n1 < 8.0 * resolution_scale(field, p, field.torus().l1) ||
                    n2 < 8.0 * resolution_scale(field, p, field.torus().l2);
}

void LatticeOperator::apply(std::span<const cplx> vin, std::span<cplx> vout,
                            std::span<const double> shift) const {
  const size_t dim = dimension();
  if (vin.size() != dim || vout.size() != dim) throw std::invalid_argument("size mismatch");
  if (!shift.empty() && shift.size() != dim) throw std::invalid_argument("size mismatch");
  const double w1 = 1.0 / (a1_ * a1_), w2 = 1.0 / (a2_ * a2_);
  const double c0 = 2.0 * (w1 + w2);
  const double* v = reinterpret_cast<const double*>(vin.data());
  double* out = reinterpret_cast<double*>(vout.data());
  const double* U1 = reinterpret_cast<const double*>(u1_.data());
  const double* U2 = reinterpret_cast<const double*>(u2_.data());
  const double* sh = shift.empty() ? nullptr : shift.data();
  const int n1 = n1_, n2 = n2_;

#pragma omp parallel for schedule(static)
  for (int j = 0; j < n2; ++j) {
    const size_t row = static_cast<size_t>(j) * n1;
    const size_t up = static_cast<size_t>((j + 1) % n2) * n1;
    const size_t dn = static_cast<size_t>((j + n2 - 1) % n2) * n1;
    for (int i = 0; i < n1; ++i) {
      const size_t x = row + i;
      const size_t xr = row + (i + 1 == n1 ? 0 : i + 1);
      const size_t xl = row + (i == 0 ? n1 - 1 : i - 1);
      const size_t xu = up + i, xd = dn + i;
      // Products with conjugated backward links written out by hand; the
      // library complex multiply is far slower here.
      const double f1r = U1[2 * x] * v[2 * xr] - U1[2 * x + 1] * v[2 * xr + 1];
      const double f1i = U1[2 * x] * v[2 * xr + 1] + U1[2 * x + 1] * v[2 * xr];
      const double b1r = U1[2 * xl] * v[2 * xl] + U1[2 * xl + 1] * v[2 * xl + 1];
      const double b1i = U1[2 * xl] * v[2 * xl + 1] - U1[2 * xl + 1] * v[2 * xl];
      const double f2r = U2[2 * x] * v[2 * xu] - U2[2 * x + 1] * v[2 * xu + 1];
      const double f2i = U2[2 * x] * v[2 * xu + 1] + U2[2 * x + 1] * v[2 * xu];
      const double b2r = U2[2 * xd] * v[2 * xd] + U2[2 * xd + 1] * v[2 * xd + 1];
      const double b2i = U2[2 * xd] * v[2 * xd + 1] - U2[2 * xd + 1] * v[2 * xd];
      const double diag = sh ? c0 - sh[x] : c0;
      out[2 * x] = diag * v[2 * x] - w1 * (f1r + b1r) - w2 * (f2r + b2r);
      out[2 * x + 1] = diag * v[2 * x + 1] - w1 * (f1i + b1i) - w2 * (f2i + b2i);
    }
  }
}

std::vector<double> plaquette_fluxes(const FieldSpec& field, int p, int n1, int n2) {
  const double a1 = field.torus().l1 / n1, a2 = field.torus().l2 / n2;
  std::vector<double> phi(static_cast<size_t>(n1) * n2);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      phi[static_cast<size_t>(j) * n1 + i] = p * field.cell_integral(i * a1, j * a2, a1, a2);
  return phi;
}

LatticeOperator build_links(const FieldSpec& field, int p, int n1, int n2, GaugeChoice gauge) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (n1 < 8 || n2 < 8) throw std::invalid_argument("grid must be at least 8x8");
  if (n1 < 2.0 * resolution_scale(field, p, field.torus().l1) ||
      n2 < 2.0 * resolution_scale(field, p, field.torus().l2))
    throw std::invalid_argument("grid under-resolves magnetic length");

  const std::vector<double> phi = plaquette_fluxes(field, p, n1, n2);
  auto flux = [&](int i, int j) { return phi[static_cast<size_t>(j) * n1 + i]; };
  const size_t dim = static_cast<size_t>(n1) * n2;
  std::vector<cplx> u1(dim, 1.0), u2(dim, 1.0);
  auto idx = [&](int i, int j) { return static_cast<size_t>(j) * n1 + i; };

  if (gauge == GaugeChoice::kColumnAccumulate) {
    double twist = 0.0;  // running sum of whole-row fluxes
    for (int j = 0; j < n2; ++j) {
      double s = 0.0;
      for (int i = 0; i < n1; ++i) {
        u2[idx(i, j)] = unit(-s);
        s += flux(i, j);
      }
      u1[idx(n1 - 1, j)] = unit(twist);
      twist += s;
    }
  } else {
    double twist = 0.0;
    for (int i = 0; i < n1; ++i) {
      double s = 0.0;
      for (int j = 0; j < n2; ++j) {
        u1[idx(i, j)] = unit(s);
        s += flux(i, j);
      }
      u2[idx(i, n2 - 1)] = unit(-twist);
      twist += s;
    }
  }
  return LatticeOperator(field, p, n1, n2, std::move(u1), std::move(u2));
}

void matvec(const LatticeOperator& op, std::span<const cplx> v, std::span<cplx> out) {
  op.apply(v, out);
}

std::vector<cplx> matvec(const LatticeOperator& op, std::span<const cplx> v) {
  std::vector<cplx> out(op.dimension());
  op.apply(v, out);
  return out;
}

void renormalized_matvec(const LatticeOperator& op, std::span<const cplx> v, std::span<cplx> out) {
  op.apply(v, out, op.p_tau_);
}

LatticeOperator gauge_transform(const LatticeOperator& op, std::span<const cplx> g) {
  if (g.size() != op.dimension()) throw std::invalid_argument("size mismatch");
  for (const cplx& z : g)
    if (std::abs(std::abs(z) - 1.0) > 1e-12) throw std::invalid_argument("non-unit phases");
  const int n1 = op.n1(), n2 = op.n2();
  std::vector<cplx> u1(op.u1()), u2(op.u2());
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const size_t x = op.index(i, j);
      u1[x] = g[x] * u1[x] * std::conj(g[op.index((i + 1) % n1, j)]);
      u2[x] = g[x] * u2[x] * std::conj(g[op.index(i, (j + 1) % n2)]);
    }
  return LatticeOperator(op.field(), op.p(), n1, n2, std::move(u1), std::move(u2));
}

std::vector<cplx> plaquette_phases(const LatticeOperator& op) {
  const int n1 = op.n1(), n2 = op.n2();
  const auto& u1 = op.u1();
  const auto& u2 = op.u2();
  std::vector<cplx> out(op.dimension());
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const int ip = (i + 1) % n1, jp = (j + 1) % n2;
      out[op.index(i, j)] = u1[op.index(i, j)] * u2[op.index(ip, j)] *
                            std::conj(u1[op.index(i, jp)]) * std::conj(u2[op.index(i, j)]);
    }
  return out;
}

void write_links(const LatticeOperator& op, std::ostream& os) {
  os.write("MAGL", 4);
  put_u32(os, static_cast<std::uint32_t>(op.n1()));
  put_u32(os, static_cast<std::uint32_t>(op.n2()));
  put_u32(os, static_cast<std::uint32_t>(op.p()));
  for (const auto* links : {&op.u1(), &op.u2()})
    for (const cplx& z : *links) {
      put_f32(os, static_cast<float>(z.real()));
      put_f32(os, static_cast<float>(z.imag()));
    }
}

LinkDump read_links(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "MAGL", 4) != 0)
    throw std::runtime_error("not a link dump");
  LinkDump d;
  d.n1 = get_u32(is);
  d.n2 = get_u32(is);
  d.p = get_u32(is);
  const size_t dim = static_cast<size_t>(d.n1) * d.n2;
  for (auto* links : {&d.u1, &d.u2}) {
    links->resize(dim);
    for (auto& z : *links) {
      const float re = get_f32(is);
      const float im = get_f32(is);
      z = {re, im};
    }
  }
  return d;
}

}  // namespace magwell
