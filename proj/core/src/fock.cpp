#include "magwell/fock.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>

namespace magwell {

// ---------------------------------------------------------------- polynomial

ComplexPolynomial ComplexPolynomial::constant(int n, cplx c) {
  ComplexPolynomial p(n);
  p.add_term(MultiIndex(n, 0), MultiIndex(n, 0), c);
  return p;
}

ComplexPolynomial ComplexPolynomial::z(int n, int j) {
  ComplexPolynomial p(n);
  MultiIndex e(n, 0);
  e[j] = 1;
  p.add_term(e, MultiIndex(n, 0), 1.0);
  return p;
}

ComplexPolynomial ComplexPolynomial::zbar(int n, int j) {
  ComplexPolynomial p(n);
  MultiIndex e(n, 0);
  e[j] = 1;
  p.add_term(MultiIndex(n, 0), e, 1.0);
  return p;
}

ComplexPolynomial ComplexPolynomial::real_coordinate(int n, int k) {
  const int j = k / 2;
  if (k % 2 == 0) return (z(n, j) + zbar(n, j)) * cplx(0.5, 0.0);
  return (z(n, j) + zbar(n, j) * cplx(-1.0, 0.0)) * cplx(0.0, -0.5);
}

ComplexPolynomial ComplexPolynomial::quadratic_form(const Eigen::MatrixXd& q) {
  const int dim = static_cast<int>(q.rows());
  if (dim % 2 != 0 || q.cols() != dim) throw std::invalid_argument("quadratic form must be 2n x 2n");
  const int n = dim / 2;
  std::vector<ComplexPolynomial> coords;
  for (int k = 0; k < dim; ++k) coords.push_back(real_coordinate(n, k));
  ComplexPolynomial out(n);
  for (int k = 0; k < dim; ++k)
    for (int l = 0; l < dim; ++l)
      if (q(k, l) != 0.0) out += coords[k] * coords[l] * cplx(q(k, l), 0.0);
  return out;
}

void ComplexPolynomial::add_term(const MultiIndex& zpow, const MultiIndex& zbarpow, cplx c) {
  MultiIndex key(zpow);
  key.insert(key.end(), zbarpow.begin(), zbarpow.end());
  terms_[key] += c;
}

int ComplexPolynomial::degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_) {
    int s = 0;
    for (int e : k) s += e;
    d = std::max(d, s);
  }
  return d;
}

ComplexPolynomial ComplexPolynomial::conj() const {
  ComplexPolynomial out(n_);
  for (const auto& [k, c] : terms_) {
    MultiIndex swapped(k.begin() + n_, k.end());
    swapped.insert(swapped.end(), k.begin(), k.begin() + n_);
    out.terms_[swapped] += std::conj(c);
  }
  return out;
}

bool ComplexPolynomial::is_real(double tol) const {
  const ComplexPolynomial c = conj();
  double scale = 1.0;
  for (const auto& [k, v] : terms_) scale = std::max(scale, std::abs(v));
  for (const auto& [k, v] : terms_) {
    const auto it = c.terms_.find(k);
    const cplx w = it == c.terms_.end() ? cplx{} : it->second;
    if (std::abs(v - w) > tol * scale) return false;
  }
  for (const auto& [k, w] : c.terms_)
    if (!terms_.count(k) && std::abs(w) > tol * scale) return false;
  return true;
}

cplx ComplexPolynomial::evaluate(const std::vector<cplx>& zv) const {
  cplx s = 0.0;
  for (const auto& [k, c] : terms_) {
    cplx t = c;
    for (int j = 0; j < n_; ++j) {
      t *= std::pow(zv[j], k[j]);
      t *= std::pow(std::conj(zv[j]), k[n_ + j]);
    }
    s += t;
  }
  return s;
}

ComplexPolynomial& ComplexPolynomial::operator+=(const ComplexPolynomial& o) {
  for (const auto& [k, c] : o.terms_) terms_[k] += c;
  prune();
  return *this;
}

ComplexPolynomial& ComplexPolynomial::operator*=(cplx s) {
  for (auto& [k, c] : terms_) c *= s;
  prune();
  return *this;
}

ComplexPolynomial operator*(const ComplexPolynomial& a, const ComplexPolynomial& b) {
  ComplexPolynomial out(a.n_);
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) {
      MultiIndex k(ka);
      for (size_t i = 0; i < k.size(); ++i) k[i] += kb[i];
      out.terms_[k] += ca * cb;
    }
  out.prune();
  return out;
}

void ComplexPolynomial::prune() {
  for (auto it = terms_.begin(); it != terms_.end();)
    it = it->second == cplx{} ? terms_.erase(it) : std::next(it);
}

// ---------------------------------------------------------------- LLL basis

double log_gaussian_moment(const std::vector<double>& a, const MultiIndex& m) {
  double s = 0.0;
  for (size_t j = 0; j < a.size(); ++j)
    s += std::log(kPi) + (m[j] + 1) * std::log(2.0 / a[j]) + std::lgamma(m[j] + 1.0);
  return s;
}

cplx bergman_kernel(const std::vector<double>& a, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& zp) {
  const size_t n = a.size();
  if (n == 0 || static_cast<size_t>(z.size()) != 2 * n || static_cast<size_t>(zp.size()) != 2 * n)
    throw std::invalid_argument("invalid spectral data");
  double pref = std::pow(kTwoPi, -static_cast<double>(n));
  cplx expo = 0.0;
  for (size_t j = 0; j < n; ++j) {
    if (!(a[j] > 0.0)) throw std::invalid_argument("invalid spectral data");
    pref *= a[j];
    const cplx zj(z[2 * j], z[2 * j + 1]), wj(zp[2 * j], zp[2 * j + 1]);
    expo += -0.25 * a[j] * (std::norm(zj) + std::norm(wj) - 2.0 * zj * std::conj(wj));
  }
  return pref * std::exp(expo);
}

namespace {

// Multi-indices of length n with |alpha| = total, in lexicographically
// decreasing order (so z_1^total comes first).
void compositions(int n, int total, MultiIndex& cur, int pos, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[pos] = total;
    out.push_back(cur);
    return;
  }
  for (int k = total; k >= 0; --k) {
    cur[pos] = k;
    compositions(n, total - k, cur, pos + 1, out);
  }
}

}  // namespace

FockBasis lll_basis(const std::vector<double>& a, int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("invalid cutoff");
  if (a.empty()) throw std::invalid_argument("invalid spectral data");
  for (double v : a)
    if (!(v > 0.0)) throw std::invalid_argument("invalid spectral data");
  FockBasis basis;
  basis.n = static_cast<int>(a.size());
  basis.a = a;
  basis.cutoff = cutoff;
  MultiIndex cur(basis.n, 0);
  for (int d = 0; d <= cutoff; ++d) compositions(basis.n, d, cur, 0, basis.states);
  for (size_t i = 0; i < basis.states.size(); ++i) {
    basis.log_norms.push_back(log_gaussian_moment(a, basis.states[i]));
    basis.index[basis.states[i]] = static_cast<int>(i);
  }
  return basis;
}

Eigen::MatrixXcd toeplitz_matrix(const FockBasis& basis, const ComplexPolynomial& symbol) {
  if (symbol.n() != basis.n) throw std::invalid_argument("symbol dimension mismatch");
  if (!symbol.is_real()) throw std::invalid_argument("symbol not real");
  const int n = basis.n;
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  MultiIndex mm(n), alpha(n);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const MultiIndex& delta = basis.states[col];
    for (const auto& [key, c] : symbol.terms()) {
      // <z^alpha G, z^beta zbar^gamma z^delta G> is nonzero iff alpha + gamma = beta + delta.
      bool ok = true;
      int total = 0;
      for (int j = 0; j < n; ++j) {
        mm[j] = key[j] + delta[j];
        alpha[j] = mm[j] - key[n + j];
        if (alpha[j] < 0) ok = false;
        total += alpha[j];
      }
      if (!ok || total > basis.cutoff) continue;
      const int row = basis.index.at(alpha);
      const double lv = log_gaussian_moment(basis.a, mm) - 0.5 * basis.log_norms[row] -
                        0.5 * basis.log_norms[col];
      m(row, col) += c * std::exp(lv);
    }
  }
  return m;
}

// ---------------------------------------------------------------- model operator

ModelOperator model_operator(const Eigen::MatrixXd& q, const std::vector<double>& a, double j12,
                             int cutoff) {
  const auto dim = q.rows();
  if (q.cols() != dim || dim != 2 * static_cast<Eigen::Index>(a.size()))
    throw std::invalid_argument("quadratic form does not match spectral data");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (q + q.transpose()));
  if (es.eigenvalues().minCoeff() < 0.0) throw std::invalid_argument("degenerate well");
  ModelOperator op;
  op.q = q;
  op.a = a;
  op.j12 = j12;
  op.symbol = ComplexPolynomial::quadratic_form(q) +
              ComplexPolynomial::constant(static_cast<int>(a.size()), j12);
  op.basis = lll_basis(a, cutoff);
  op.matrix = toeplitz_matrix(op.basis, op.symbol);
  return op;
}

ModelOperator model_operator(const WellData& well, double j12, int cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(well.hess);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw std::invalid_argument("degenerate well");
  if (well.a.size() != 1) throw std::invalid_argument("well must carry one spectral value in 2D");
  return model_operator(Eigen::MatrixXd(well.q), well.a, j12, cutoff);
}

ModelSpectrum model_spectrum(const ModelOperator& op, int count, const std::vector<int>& cutoffs,
                             double tol) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  if (cutoffs.empty()) throw std::invalid_argument("empty cutoff list");
  for (size_t i = 1; i < cutoffs.size(); ++i)
    if (cutoffs[i] <= cutoffs[i - 1]) throw std::invalid_argument("non-monotone cutoff list");

  ModelSpectrum out;
  std::vector<double> prev;
  for (int cutoff : cutoffs) {
    FockBasis basis = lll_basis(op.a, cutoff);
    if (static_cast<int>(basis.dimension()) < count) continue;
    const Eigen::MatrixXcd m = toeplitz_matrix(basis, op.symbol);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    std::vector<double> mu(es.eigenvalues().data(), es.eigenvalues().data() + count);
    if (!prev.empty()) {
      out.convergence = 0.0;
      for (int j = 0; j < count; ++j)
        out.convergence = std::max(out.convergence, std::abs(mu[j] - prev[j]));
    }
    prev = mu;
    out.mu = std::move(mu);
    out.cutoff = cutoff;
    out.vectors = es.eigenvectors().leftCols(count);
    out.basis = std::move(basis);
  }
  if (out.mu.empty()) throw std::runtime_error("increase cutoff");
  if (out.convergence > tol) throw std::runtime_error("increase cutoff");
  return out;
}

double closed_form_n1(const Eigen::Matrix2d& q, double tau0, double j12, int j) {
  if (!(tau0 > 0.0)) throw std::invalid_argument("tau0 must be positive");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(0.5 * (q + q.transpose()));
  const Eigen::Vector2d ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) throw std::invalid_argument("Q not SPD");
  const double d = ev.prod();
  const double a = ev.cwiseSqrt().sum();
  return 2.0 * std::sqrt(d) / tau0 * j + a * a / (2.0 * tau0) + j12;
}

Eigen::VectorXd symplectic_eigenvalues(const Eigen::MatrixXd& m) {
  const auto dim = m.rows();
  if (dim % 2 != 0 || m.cols() != dim) throw std::invalid_argument("not SPD");
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (m + m.transpose()));
  if (llt.info() != Eigen::Success) throw std::invalid_argument("not SPD");
  const auto n = dim / 2;
  Eigen::MatrixXd jstd = Eigen::MatrixXd::Zero(dim, dim);
  jstd.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  jstd.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  Eigen::EigenSolver<Eigen::MatrixXd> es(jstd * m, false);
  std::vector<double> mod;
  for (Eigen::Index i = 0; i < dim; ++i) mod.push_back(std::abs(es.eigenvalues()[i]));
  std::sort(mod.begin(), mod.end());
  Eigen::VectorXd d(n);
  for (Eigen::Index k = 0; k < n; ++k) d[k] = 0.5 * (mod[2 * k] + mod[2 * k + 1]);
  return d;
}

std::vector<double> williamson_quadratic_spectrum(const Eigen::MatrixXd& m, int count) {
  const Eigen::VectorXd d = symplectic_eigenvalues(m);
  const double shift = 0.5 * m.trace();
  const auto n = d.size();
  auto energy = [&](const std::vector<int>& occ) {
    double e = shift;
    for (Eigen::Index k = 0; k < n; ++k) e += d[k] * (2 * occ[k] + 1);
    return e;
  };
  using Item = std::pair<double, std::vector<int>>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::set<std::vector<int>> seen;
  std::vector<int> zero(n, 0);
  heap.push({energy(zero), zero});
  seen.insert(zero);
  std::vector<double> out;
  while (static_cast<int>(out.size()) < count) {
    auto [e, occ] = heap.top();
    heap.pop();
    out.push_back(e);
    for (Eigen::Index k = 0; k < n; ++k) {
      auto next = occ;
      ++next[k];
      if (seen.insert(next).second) heap.push({energy(next), next});
    }
  }
  return out;
}

Eigen::MatrixXd weyl_form_from_well(const Eigen::MatrixXd& q, const std::vector<double>& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  if (q.rows() != 2 * n || q.cols() != 2 * n)
    throw std::invalid_argument("quadratic form does not match spectral data");
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    l(2 * j, j) = 1.0 / std::sqrt(a[j]);
    l(2 * j + 1, n + j) = -1.0 / std::sqrt(a[j]);
  }
  return l.transpose() * q * l;
}

std::vector<EnsembleLevel> ensemble_spectrum(const ModelEnsemble& ensemble, int count,
                                             const std::vector<int>& cutoffs, double tol) {
  if (ensemble.components.empty()) throw std::invalid_argument("empty ensemble");
  std::vector<EnsembleLevel> all;
  for (size_t w = 0; w < ensemble.components.size(); ++w) {
    const ModelSpectrum s = model_spectrum(ensemble.components[w], count, cutoffs, tol);
    for (double mu : s.mu) all.push_back({mu, static_cast<int>(w)});
  }
  std::stable_sort(all.begin(), all.end(), [](const EnsembleLevel& x, const EnsembleLevel& y) {
    if (x.mu != y.mu) return x.mu < y.mu;
    return x.well < y.well;
  });
  all.resize(std::min(all.size(), static_cast<size_t>(count)));
  return all;
}

}  // namespace magwell
