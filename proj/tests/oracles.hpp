#pragma once

// Reference solutions computed without the library's integrator.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

/// Poisson probabilities by the recursion P_n = P_{n-1} mu / n.
inline std::vector<double> poisson(double mu, std::size_t n_max) {
  std::vector<double> p(n_max + 1);
  p[0] = std::exp(-mu);
  for (std::size_t n = 1; n <= n_max; ++n) p[n] = p[n - 1] * mu / static_cast<double>(n);
  return p;
}

/// Closed dot-cavity block (sigma00, sigma11, Re sigma01, Im sigma01).
inline Eigen::Matrix4d cavity_block(double w, double gamma1, double gamma_d, double eps10) {
  const double k = (gamma1 + gamma_d) / 2.0;
  Eigen::Matrix4d m;
  m << 0, 0, 0, -2 * w,
       0, -gamma1, 0, 2 * w,
       0, 0, -k, -eps10,
       w, -w, eps10, -k;
  return m;
}

inline double cavity_survival(double w, double gamma1, double gamma_d, double eps10, double t) {
  const Eigen::Matrix4d m = cavity_block(w, gamma1, gamma_d, eps10) * t;
  const Eigen::Matrix4d e = m.exp();
  return e(0, 0);
}

/// Slowest decay rate of the dot-cavity block (smallest -Re lambda).
inline double cavity_slowest_rate(double w, double gamma1, double gamma_d, double eps10) {
  const Eigen::EigenSolver<Eigen::Matrix4d> es(cavity_block(w, gamma1, gamma_d, eps10));
  double slowest = INFINITY;
  for (int i = 0; i < 4; ++i) slowest = std::min(slowest, -es.eigenvalues()[i].real());
  return slowest;
}

/// |b0(t)|^2 for one dot level coupled to discrete levels, by exact
/// diagonalisation of the single-particle Hamiltonian.
class DotSpectrum {
 public:
  DotSpectrum(double e0, const std::vector<double>& energies, const std::vector<double>& couplings) {
    const auto n = static_cast<Eigen::Index>(energies.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n + 1, n + 1);
    h(0, 0) = e0;
    for (Eigen::Index a = 0; a < n; ++a) {
      h(a + 1, a + 1) = energies[static_cast<std::size_t>(a)];
      h(0, a + 1) = h(a + 1, 0) = couplings[static_cast<std::size_t>(a)];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    eigenvalues_ = es.eigenvalues();
    weights_ = es.eigenvectors().row(0).array().square();
    vectors_ = es.eigenvectors();
  }

  double survival(double t) const {
    std::complex<double> b0 = 0.0;
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
      b0 += weights_(k) * std::polar(1.0, -eigenvalues_(k) * t);
    }
    return std::norm(b0);
  }

  /// |b_a(t)|^2 for continuum level a.
  double occupation(std::size_t a, double t) const {
    std::complex<double> b = 0.0;
    const auto row = static_cast<Eigen::Index>(a + 1);
    for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
      b += vectors_(row, k) * vectors_(0, k) * std::polar(1.0, -eigenvalues_(k) * t);
    }
    return std::norm(b);
  }

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd vectors_;
};

}  // namespace oracle
