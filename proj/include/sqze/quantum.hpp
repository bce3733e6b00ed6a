// Copyright 2026 The sqze Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// States, Hermitian generators and the single-interval survival probability
//
//   q(mu) = |<psi0| exp(-i H mu) |psi0>|^2
//
// together with the energy moments that enter the short-time expansion of q.
// The post-measurement state is never materialized: for a pure initial state
// and the rank-1 projector |psi0><psi0| it is psi0 again, so the survival
// probability is the only quantity that carries information.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>

#include "sqze/error.hpp"
#include "sqze/intervals.hpp"

namespace sqze {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using UnitaryMatrix = Eigen::MatrixXcd;

inline constexpr double kStateNormTolerance = 1e-12;
inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kReconstructionTolerance = 1e-10;

/// Normalized pure state of dimension >= 2.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() < 2) {
      throw ValidationError("StateVector: dimension must be at least 2");
    }
    if (!amplitudes_.allFinite()) {
      throw ValidationError("StateVector: amplitudes must be finite");
    }
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kStateNormTolerance) {
      throw ValidationError("StateVector: L2 norm must equal 1 (got " + std::to_string(norm) + ")");
    }
  }

  /// Rescales `amplitudes` to unit norm. Rejects the zero vector.
  static StateVector normalized(ComplexVector amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw ValidationError("StateVector: cannot normalize a zero or non-finite vector");
    }
    amplitudes /= norm;
    return StateVector(std::move(amplitudes));
  }

  static StateVector basis(Eigen::Index dimension, Eigen::Index index) {
    if (index < 0 || index >= dimension) {
      throw ValidationError("StateVector: basis index out of range");
    }
    ComplexVector v = ComplexVector::Zero(dimension);
    v(index) = 1.0;
    return StateVector(std::move(v));
  }

  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  Eigen::Index dimension() const noexcept { return amplitudes_.size(); }

 private:
  ComplexVector amplitudes_;
};

/// Hermitian matrix in rad/s with its spectral decomposition cached at
/// construction. The stored matrix is the Hermitian part (A + A^dagger) / 2 of
/// the input once the input has passed the Hermiticity check.
class HermitianOperator {
 public:
  explicit HermitianOperator(const ComplexMatrix& matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1) {
      throw ValidationError("HermitianOperator: matrix must be square and non-empty");
    }
    if (!matrix.allFinite()) {
      throw ValidationError("HermitianOperator: entries must be finite");
    }
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    const double asymmetry = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    if (asymmetry > kHermiticityTolerance * scale) {
      throw ValidationError("HermitianOperator: matrix is not Hermitian (max |A - A^dagger| = " +
                            std::to_string(asymmetry) + ")");
    }
    matrix_ = 0.5 * (matrix + matrix.adjoint());

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_);
    if (solver.info() != Eigen::Success) {
      throw ValidationError("HermitianOperator: eigendecomposition failed");
    }
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();

    const ComplexMatrix rebuilt =
        eigenvectors_ * eigenvalues_.cast<Complex>().asDiagonal() * eigenvectors_.adjoint();
    if ((rebuilt - matrix_).cwiseAbs().maxCoeff() > kReconstructionTolerance * scale) {
      throw ValidationError("HermitianOperator: spectral reconstruction out of tolerance");
    }
  }

  static HermitianOperator zero(Eigen::Index dimension) {
    return HermitianOperator(ComplexMatrix::Zero(dimension, dimension));
  }

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const RealVector& eigenvalues() const noexcept { return eigenvalues_; }
  const ComplexMatrix& eigenvectors() const noexcept { return eigenvectors_; }
  Eigen::Index dimension() const noexcept { return matrix_.rows(); }

 private:
  ComplexMatrix matrix_;
  RealVector eigenvalues_;
  ComplexMatrix eigenvectors_;
};

/// Energy moments of H in the initial state: mean <H>, variance
/// <(H - <H>)^2> and the fourth central moment <(H - <H>)^4>, which the
/// short-time expansion calls the kurtosis of the Hamiltonian.
struct HamiltonianMoments {
  double mean = 0.0;
  double variance = 0.0;
  double kurtosis = 0.0;
};

/// Resonant two-level drive `delta_h * sigma_x` (rad/s). In a basis state its
/// energy standard deviation is exactly `delta_h`, and q(mu) = cos^2(delta_h mu).
inline HermitianOperator rabi_hamiltonian(double delta_h) {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 1) = delta_h;
  h(1, 0) = delta_h;
  return HermitianOperator(h);
}

namespace detail {

inline void require_duration(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw ValidationError("interval duration must be finite and >= 0");
  }
}

inline void require_same_dimension(const HermitianOperator& h, const StateVector& psi) {
  if (h.dimension() != psi.dimension()) {
    throw ValidationError("Hamiltonian and state dimensions differ");
  }
}

}  // namespace detail

/// U = V diag(exp(-i lambda_k mu)) V^dagger.
inline UnitaryMatrix propagate(const HermitianOperator& h, double mu) {
  detail::require_duration(mu);
  ComplexVector phases(h.dimension());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, -h.eigenvalues()(k) * mu);
  }
  return h.eigenvectors() * phases.asDiagonal() * h.eigenvectors().adjoint();
}

/// <psi0| U(mu) |psi0>, evaluated in the eigenbasis without forming U.
inline Complex survival_amplitude(const HermitianOperator& h, const StateVector& psi0, double mu) {
  detail::require_duration(mu);
  detail::require_same_dimension(h, psi0);
  const ComplexVector c = h.eigenvectors().adjoint() * psi0.amplitudes();
  Complex amplitude{0.0, 0.0};
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    amplitude += std::norm(c(k)) * std::polar(1.0, -h.eigenvalues()(k) * mu);
  }
  return amplitude;
}

namespace detail {

/// |amplitude|^2 with amplitudes below rounding resolution read as an exact node.
inline double squared_amplitude(const HermitianOperator& h, const StateVector& psi0, double mu) {
  const Complex a = survival_amplitude(h, psi0, mu);
  if (std::abs(a) <= 4.0 * std::numeric_limits<double>::epsilon()) return 0.0;
  return std::clamp(std::norm(a), 0.0, 1.0);
}

}  // namespace detail

/// 1 - q(mu) written as 4 sum_{k<l} w_k w_l sin^2((E_k - E_l) mu / 2) over the
/// eigenbasis weights w_k. Free of the cancellation in 1 - |amplitude|^2 for
/// short intervals.
inline double survival_leakage(const HermitianOperator& h, const StateVector& psi0, double mu) {
  detail::require_duration(mu);
  detail::require_same_dimension(h, psi0);
  const ComplexVector c = h.eigenvectors().adjoint() * psi0.amplitudes();
  const RealVector& e = h.eigenvalues();
  double total = 0.0;
  double leak = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double wk = std::norm(c(k));
    total += wk;
    for (Eigen::Index l = k + 1; l < c.size(); ++l) {
      const double s = std::sin(0.5 * (e(k) - e(l)) * mu);
      leak += wk * std::norm(c(l)) * s * s;
    }
  }
  return std::clamp(4.0 * leak / (total * total), 0.0, 1.0);
}

/// q(mu) = |<psi0| e^{-i H mu} |psi0>|^2, from the leakage when q > 1/2 and
/// from the amplitude otherwise, so that both ends keep full relative accuracy.
inline double survival_q(const HermitianOperator& h, const StateVector& psi0, double mu) {
  const double leak = survival_leakage(h, psi0, mu);
  return leak < 0.5 ? 1.0 - leak : detail::squared_amplitude(h, psi0, mu);
}

/// ln q(mu); -inf at an exact node.
inline double log_survival_q(const HermitianOperator& h, const StateVector& psi0, double mu) {
  const double leak = survival_leakage(h, psi0, mu);
  if (leak < 0.5) return std::log1p(-leak);
  const double q = detail::squared_amplitude(h, psi0, mu);
  return q > 0.0 ? std::log(q) : -std::numeric_limits<double>::infinity();
}

/// Sum of ln q(mu_j); -inf as soon as one factor vanishes.
inline double log_sequence_survival(const HermitianOperator& h, const StateVector& psi0,
                                    std::span<const double> intervals) {
  double log_p = 0.0;
  for (double mu : intervals) {
    const double log_q = log_survival_q(h, psi0, mu);
    if (log_q == -std::numeric_limits<double>::infinity()) return log_q;
    log_p += log_q;
  }
  return log_p;
}

/// P({mu_j}) = prod_j q(mu_j), accumulated in log space. An empty sequence
/// has survival probability 1.
inline double sequence_survival(const HermitianOperator& h, const StateVector& psi0,
                                std::span<const double> intervals) {
  return std::exp(log_sequence_survival(h, psi0, intervals));
}

inline double sequence_survival(const HermitianOperator& h, const StateVector& psi0,
                                const MeasurementSequence& sequence) {
  return sequence_survival(h, psi0, std::span<const double>(sequence.intervals()));
}

inline HamiltonianMoments hamiltonian_moments(const HermitianOperator& h, const StateVector& psi0) {
  detail::require_same_dimension(h, psi0);
  const ComplexVector& psi = psi0.amplitudes();
  HamiltonianMoments moments;
  moments.mean = psi.dot(h.matrix() * psi).real();
  // Central moments from the shifted generator: <(H - <H>)^2> = |(H - <H>) psi|^2
  // and <(H - <H>)^4> = |(H - <H>)^2 psi|^2, both manifestly non-negative.
  const ComplexMatrix shifted =
      h.matrix() - moments.mean * ComplexMatrix::Identity(h.dimension(), h.dimension());
  const ComplexVector once = shifted * psi;
  const ComplexVector twice = shifted * once;
  moments.variance = once.squaredNorm();
  moments.kurtosis = twice.squaredNorm();
  return moments;
}

}  // namespace sqze
