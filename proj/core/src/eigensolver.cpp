#include "magwell/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace magwell {

namespace {

using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Target log-amplification of the lowest wanted Ritz value per filter application.
constexpr double kFilterGain = 8.0;

class Engine {
 public:
  Engine(const ApplyFn& apply, size_t dim, const EigOptions& opts)
      : apply_(apply), n_(static_cast<Eigen::Index>(dim)), opts_(opts), rng_(opts.seed) {
    const int want = opts.k + opts.overshoot;
    mmax_ = opts.max_basis > 0 ? opts.max_basis : want + std::max(24, want / 4);
    mmax_ = static_cast<int>(std::min<Eigen::Index>(mmax_, n_));
    v_.resize(n_, mmax_);
    hv_.resize(n_, mmax_);
    g_ = Mat::Zero(mmax_, mmax_);
    x_.resize(n_, std::min<Eigen::Index>(n_, opts.k + opts.overshoot));
  }

  EigResult run();

 private:
  void matvec(const cplx* in, cplx* out) {
    apply_(std::span<const cplx>(in, static_cast<size_t>(n_)),
           std::span<cplx>(out, static_cast<size_t>(n_)));
    ++matvecs_;
  }

  Vec random_vector() {
    std::normal_distribution<double> nd;
    Vec r(n_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double re = nd(rng_);
      const double im = nd(rng_);
      r[i] = cplx(re, im);
    }
    return r / r.norm();
  }

  // Two passes of classical Gram-Schmidt against locked and basis vectors.
  double orthogonalize(Vec& w) const {
    const double before = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      if (nlocked_ > 0) w.noalias() -= x_.leftCols(nlocked_) * (x_.leftCols(nlocked_).adjoint() * w);
      if (m_ > 0) w.noalias() -= v_.leftCols(m_) * (v_.leftCols(m_).adjoint() * w);
    }
    return before > 0.0 ? w.norm() / before : 0.0;
  }

  void append(Vec w) {
    double ratio = orthogonalize(w);
    for (int attempt = 0; ratio < 1e-13 && attempt < 3; ++attempt) {
      w = random_vector();
      ratio = orthogonalize(w);
    }
    w /= w.norm();
    v_.col(m_) = w;
    matvec(v_.col(m_).data(), hv_.col(m_).data());
    const Vec col = v_.leftCols(m_ + 1).adjoint() * hv_.col(m_);
    g_.block(0, m_, m_ + 1, 1) = col;
    g_.block(m_, 0, 1, m_) = col.head(m_).adjoint();
    g_(m_, m_) = col[m_].real();
    last_ = w;
    ++m_;
  }

  // Chebyshev polynomial of degree deg_ in L = -(H - c)/e applied to v.
  Vec filter(const Vec& v) {
    if (plain_) {
      Vec out(n_);
      matvec(v.data(), out.data());
      return out;
    }
    const double c = 0.5 * (upper_ + cut_), e = 0.5 * (upper_ - cut_);
    Vec t0 = v, t1(n_), hv(n_);
    matvec(t0.data(), hv.data());
    t1 = (c * t0 - hv) / e;
    const double two_c = 2.0 * c / e, two = 2.0 / e;
    for (int d = 2; d <= deg_; ++d) {
      matvec(t1.data(), hv.data());
      t0 = two_c * t1 - two * hv - t0;
      t0.swap(t1);
      const double s = t1.norm();
      if (s > 1e100) {
        t0 /= s;
        t1 /= s;
      }
    }
    return t1;
  }

  void set_degree() {
    const double span = std::max(upper_ - cut_, 1e-300);
    const double delta = std::max((cut_ - lowest_) / span, 1e-12);
    const double growth = std::acosh(1.0 + 2.0 * delta);
    deg_ = static_cast<int>(std::ceil(kFilterGain / growth));
    deg_ = std::clamp(deg_, 1, opts_.max_degree);
  }

  // Replace the basis by the Ritz vectors y (columns) and diagonal G.
  void compress(const Mat& y, const Eigen::VectorXd& theta) {
    const auto keep = y.cols();
    const Mat nv = v_.leftCols(m_) * y;
    const Mat nh = hv_.leftCols(m_) * y;
    v_.leftCols(keep) = nv;
    hv_.leftCols(keep) = nh;
    g_.setZero();
    for (Eigen::Index i = 0; i < keep; ++i) g_(i, i) = theta[i];
    m_ = static_cast<int>(keep);
  }

  // Removes the Ritz directions y.col(0..nl-1) from the basis, one Householder
  // reflection each: O(n m) per direction where a rotation would be O(n m^2).
  // Returns the remaining Ritz vectors in the new coordinates.
  Mat deflate(Mat y, int nl) {
    for (int i = 0; i < nl; ++i) {
      const int m = m_;
      const int last = m - 1;
      const Vec u = y.col(i).head(m);
      const double mag = std::abs(u[last]);
      const cplx alpha = mag > 0.0 ? -u[last] / mag : cplx(-1.0, 0.0);
      Vec w = u;
      w[last] -= alpha;
      w /= w.norm();
      // Reflector R = I - 2 w w^H maps u to alpha e_last; that column is dropped.
      const Vec vw = v_.leftCols(m) * w;
      v_.leftCols(m).noalias() -= 2.0 * vw * w.adjoint();
      const Vec hw = hv_.leftCols(m) * w;
      hv_.leftCols(m).noalias() -= 2.0 * hw * w.adjoint();
      Mat g = g_.topLeftCorner(m, m);
      const Vec gw = g * w;
      g -= 2.0 * gw * w.adjoint();
      const Eigen::RowVectorXcd wg = w.adjoint() * g;
      g -= 2.0 * w * wg;
      g_.topLeftCorner(last, last) = g.topLeftCorner(last, last);
      g_.row(last).setZero();
      g_.col(last).setZero();
      for (Eigen::Index j = i + 1; j < y.cols(); ++j) {
        const Vec yj = y.col(j).head(m);
        y.col(j).head(m) = yj - 2.0 * w * w.dot(yj);
        y(last, j) = 0.0;
      }
      m_ = last;
    }
    return y.block(0, nl, m_, y.cols() - nl);
  }

  void lock(const Vec& x, double lambda) {
    if (nlocked_ == x_.cols()) x_.conservativeResize(Eigen::NoChange, x_.cols() + 8);
    x_.col(nlocked_) = x;
    lambdas_.push_back(lambda);
    ++nlocked_;
  }

  double kth_locked() const {
    std::vector<double> s(lambdas_);
    std::sort(s.begin(), s.end());
    return s[static_cast<size_t>(opts_.k) - 1];
  }

  EigResult finish(bool converged);

  const ApplyFn& apply_;
  Eigen::Index n_;
  EigOptions opts_;
  std::mt19937_64 rng_;
  int mmax_ = 0;
  int m_ = 0;
  Mat v_, hv_, g_, x_;
  int nlocked_ = 0;
  std::vector<double> lambdas_;
  Vec last_;
  long matvecs_ = 0;
  int iterations_ = 0;
  bool plain_ = true;
  double upper_ = 0.0, cut_ = 0.0, lowest_ = 0.0;
  int deg_ = 1;
};

EigResult Engine::run() {
  const int k = opts_.k;
  const double lock_tol = 0.5 * opts_.tol;
  const int warm = static_cast<int>(
      std::min<Eigen::Index>(mmax_ - 1, std::max(20, opts_.k + opts_.overshoot + 4)));

  append(random_vector());
  enum class Phase { kWarm, kMain, kConfirm } phase = Phase::kWarm;
  int confirm_left = 0;
  bool inject = false;

  while (iterations_ < opts_.max_iter) {
    if (m_ == n_ - nlocked_) {
      ++iterations_;  // nothing left to add; Rayleigh-Ritz is exact
    } else if (!(phase == Phase::kWarm && m_ > warm)) {
      Vec w = inject ? random_vector() : filter(last_);
      inject = false;
      append(std::move(w));
      ++iterations_;
      if (phase == Phase::kWarm && m_ <= warm) continue;
    }

    Eigen::SelfAdjointEigenSolver<Mat> es(g_.topLeftCorner(m_, m_));
    Eigen::VectorXd theta = es.eigenvalues();
    Mat y = es.eigenvectors();

    if (phase == Phase::kWarm) {
      if (opts_.upper_bound > 0.0) {
        upper_ = opts_.upper_bound;
      } else {
        const Vec r = hv_.leftCols(m_) * y.col(m_ - 1) - theta[m_ - 1] * (v_.leftCols(m_) * y.col(m_ - 1));
        upper_ = theta[m_ - 1] + r.norm() + 1e-3 * (theta[m_ - 1] - theta[0]);
      }
      plain_ = false;
      cut_ = upper_;
      phase = Phase::kMain;
    }

    // Lock converged Ritz pairs from the bottom, keeping one vector in the basis.
    int nl = 0;
    std::vector<Vec> fresh;
    std::vector<double> lambdas;
    while (nl < m_ - 1) {
      const Vec x = v_.leftCols(m_) * y.col(nl);
      Vec r = hv_.leftCols(m_) * y.col(nl) - theta[nl] * x;
      // Residual within the complement of the locked set. Locked vectors carry
      // small components of the ones still searched for, which would otherwise
      // put a floor of order lock_tol under this residual; the final
      // Rayleigh-Ritz over the locked set removes that coupling.
      if (nlocked_ > 0) r -= x_.leftCols(nlocked_) * (x_.leftCols(nlocked_).adjoint() * r);
      const double rn = r.norm();
      if (rn <= lock_tol) {
        fresh.push_back(x);
        lambdas.push_back(theta[nl]);
        ++nl;
        continue;
      }
      // Near the rounding floor the residual is dominated by top-of-spectrum
      // noise picked up in orthogonalization; one filter pass removes it.
      if (plain_ || rn > 100.0 * opts_.tol) break;
      Vec xp = filter(x);
      for (int pass = 0; pass < 2; ++pass)
        if (nlocked_ > 0) xp -= x_.leftCols(nlocked_) * (x_.leftCols(nlocked_).adjoint() * xp);
      xp /= xp.norm();
      Vec hxp(n_);
      matvec(xp.data(), hxp.data());
      const double rq = xp.dot(hxp).real();
      if ((hxp - rq * xp).norm() > lock_tol) break;
      fresh.push_back(xp);
      lambdas.push_back(rq);
      ++nl;
    }
    if (nl == m_ - 1 && m_ == n_ - nlocked_) {
      // Whole space exhausted; the last Ritz pair is exact too.
      fresh.push_back(v_.leftCols(m_) * y.col(nl));
      lambdas.push_back(theta[nl]);
      ++nl;
    }
    for (int i = 0; i < nl; ++i) lock(fresh[i], lambdas[i]);
    if (nl > 0) {
      if (nl == m_) {
        m_ = 0;
        break;
      }
      y = deflate(std::move(y), nl);
      theta = theta.tail(m_).eval();
    }
    // Next expansion filters the lowest unconverged Ritz vector.
    if (m_ > 0) last_ = v_.leftCols(m_) * y.col(0);

    if (nlocked_ >= k) {
      // A Ritz value below the k-th locked one means a missing eigenvalue.
      const double kth = kth_locked();
      const double margin = std::max(opts_.tol, 1e-12 * std::abs(kth));
      const bool pending = m_ > 0 && theta[0] < kth - margin;
      if (phase == Phase::kMain && !pending) {
        phase = Phase::kConfirm;
        confirm_left = opts_.confirm_steps;
        inject = true;
      } else if (phase == Phase::kConfirm) {
        if (pending) {
          phase = Phase::kMain;
        } else if (--confirm_left <= 0) {
          break;
        }
      }
    } else if (phase == Phase::kConfirm) {
      phase = Phase::kMain;
    }

    // Move the filter cut down to the Ritz value that bounds the wanted set.
    const int idx = std::clamp(std::max(k - nlocked_, 1) + opts_.overshoot - 1, 1, m_ - 1);
    if (m_ >= 2) {
      lowest_ = theta[0];
      if (theta[idx] < cut_) cut_ = theta[idx];
      set_degree();
    }

    if (m_ == mmax_) {
      const int keep = std::clamp(std::max(k - nlocked_, 0) + opts_.overshoot, 1, mmax_ - 4);
      compress(y.leftCols(keep), theta.head(keep));
    }
  }

  return finish(nlocked_ >= k);
}

EigResult Engine::finish(bool converged) {
  const int k = opts_.k;
  // Top up with unconverged Ritz pairs when fewer than k were locked.
  if (nlocked_ < k && m_ > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(g_.topLeftCorner(m_, m_));
    for (int i = 0; i < m_ && nlocked_ < k; ++i)
      lock(v_.leftCols(m_) * es.eigenvectors().col(i), es.eigenvalues()[i]);
  }
  // Rayleigh-Ritz over the locked set. Vectors lock at projected residual
  // tol/2, so rotated pairs can reach sqrt(k) tol/2; a few filtered passes
  // over the whole block bring them back under tol.
  const int count = std::min(k, nlocked_);
  Mat x = x_.leftCols(nlocked_);
  Mat hx(n_, nlocked_);
  Eigen::VectorXd lambda;
  std::vector<double> res(static_cast<size_t>(count));
  for (int pass = 0;; ++pass) {
    for (int i = 0; i < nlocked_; ++i) matvec(x.col(i).data(), hx.col(i).data());
    Mat g = x.adjoint() * hx;
    g = 0.5 * (g + g.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    x = (x * es.eigenvectors()).eval();
    hx = (hx * es.eigenvectors()).eval();
    lambda = es.eigenvalues();
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
      res[static_cast<size_t>(i)] = (hx.col(i) - lambda[i] * x.col(i)).norm();
      worst = std::max(worst, res[static_cast<size_t>(i)]);
    }
    if (worst <= opts_.tol || plain_ || pass == 3) break;
    for (int i = 0; i < nlocked_; ++i) x.col(i) = filter(x.col(i));
    Eigen::HouseholderQR<Mat> qr(x);
    x = qr.householderQ() * Mat::Identity(n_, nlocked_);
  }

  EigResult out;
  out.seed = opts_.seed;
  out.iterations = iterations_;
  out.eigenvectors = x.leftCols(count);
  bool all_ok = converged;
  for (int i = 0; i < count; ++i) {
    out.eigenvalues.push_back(lambda[i]);
    out.residual_norms.push_back(res[static_cast<size_t>(i)]);
    all_ok = all_ok && res[static_cast<size_t>(i)] <= opts_.tol;
  }
  out.matvecs = matvecs_;
  out.converged = all_ok && count == k;
  out.status = out.converged ? "converged" : "unconverged";
  return out;
}

}  // namespace

Eigen::MatrixXcd dense_matrix(const ApplyFn& apply, size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  Mat m(n, n);
  Vec e = Vec::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(std::span<const cplx>(e.data(), dim), std::span<cplx>(m.col(j).data(), dim));
    e[j] = 0.0;
  }
  return m;
}

EigResult dense_eigenpairs(const Eigen::MatrixXcd& m, int k) {
  if (k < 1 || k > m.rows()) throw std::invalid_argument("k out of range");
  const Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver failed");
  EigResult out;
  out.eigenvectors = es.eigenvectors().leftCols(k);
  for (int i = 0; i < k; ++i) {
    out.eigenvalues.push_back(es.eigenvalues()[i]);
    out.residual_norms.push_back(
        (h * out.eigenvectors.col(i) - es.eigenvalues()[i] * out.eigenvectors.col(i)).norm());
  }
  out.converged = true;
  out.status = "dense";
  return out;
}

EigResult lowest_eigenpairs(const ApplyFn& apply, size_t dim, const EigOptions& opts) {
  if (opts.k < 1 || static_cast<size_t>(opts.k) >= dim) throw std::invalid_argument("k out of range");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (dim <= opts.dense_threshold) {
    EigResult r = dense_eigenpairs(dense_matrix(apply, dim), opts.k);
    r.seed = opts.seed;
    r.matvecs = static_cast<long>(dim);
    return r;
  }
  Engine engine(apply, dim, opts);
  return engine.run();
}

EigResult lowest_eigenpairs(const ApplyFn& apply, size_t dim, int k, double tol, int max_iter,
                            std::uint64_t seed) {
  EigOptions opts;
  opts.k = k;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.seed = seed;
  return lowest_eigenpairs(apply, dim, opts);
}

ClusterPartition cluster_detect(const std::vector<double>& eigs, double gap_factor) {
  if (eigs.size() < 2) throw std::invalid_argument("need at least 2 eigenvalues");
  for (size_t i = 1; i < eigs.size(); ++i)
    if (eigs[i] < eigs[i - 1]) throw std::invalid_argument("eigenvalues not ascending");
  std::vector<double> gaps(eigs.size() - 1);
  for (size_t i = 0; i + 1 < eigs.size(); ++i) gaps[i] = eigs[i + 1] - eigs[i];
  std::vector<double> sorted(gaps);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double scale = std::max(median, 1e-3 * (eigs.back() - eigs.front()));

  ClusterPartition cp;
  cp.threshold = gap_factor * scale;
  int begin = 0;
  for (size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] > cp.threshold) {
      cp.ranges.emplace_back(begin, static_cast<int>(i) + 1);
      cp.gaps.push_back(gaps[i]);
      begin = static_cast<int>(i) + 1;
    }
  }
  cp.ranges.emplace_back(begin, static_cast<int>(eigs.size()));
  return cp;
}

}  // namespace magwell
