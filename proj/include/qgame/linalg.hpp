#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "qgame/real_map.hpp"
#include "qgame/tolerances.hpp"

namespace qgame {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Normalized state on a finite-dimensional Hilbert space.
class StateVector {
 public:
  explicit StateVector(Vector amplitudes);

  int dim() const { return static_cast<int>(v_.size()); }
  const Vector& vec() const { return v_; }
  Complex amplitude(int i) const { return v_(i); }

  static StateVector basis(int dim, int index);
  static StateVector uniform(int dim);
  // Normalizes and wraps; rejects (near-)zero vectors.
  static StateVector normalized(const Vector& v);

 private:
  Vector v_;
};

// Distinct eigenvalues ascending, with orthonormal eigenbases and projectors.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<Matrix> bases;       // dim x multiplicity, orthonormal columns
  std::vector<Matrix> projectors;  // bases[k] * bases[k]^dag

  int dim() const { return bases.empty() ? 0 : static_cast<int>(bases[0].rows()); }
  int multiplicity(std::size_t k) const { return static_cast<int>(bases[k].cols()); }
  std::size_t count() const { return eigenvalues.size(); }
};

class HermitianOperator {
 public:
  explicit HermitianOperator(Matrix entries);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }

  static HermitianOperator diagonal(const std::vector<double>& values);

 private:
  Matrix m_;
};

// dim_out x dim_in matrix with U^dag U = identity; dim_out >= dim_in.
class Isometry {
 public:
  explicit Isometry(Matrix entries);

  int dim_in() const { return static_cast<int>(m_.cols()); }
  int dim_out() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }

  StateVector apply(const StateVector& psi) const;
  static Isometry identity(int dim);

 private:
  Matrix m_;
};

// Eigendecomposition with eigenvalue clustering: raw eigenvalues whose adjacent
// gap is <= cluster_tol merge into one (mean value, combined eigenbasis).
// Default cluster_tol is 1e-9 * max|eigenvalue|.
SpectralDecomposition spectral_decompose(const HermitianOperator& x,
                                         std::optional<double> cluster_tol = {});

// f(X) = sum f(x) P_X(x). Throws DomainError when f lacks an eigenvalue.
HermitianOperator apply_function(const HermitianOperator& x, const RealMap& f);
HermitianOperator apply_function(const HermitianOperator& x,
                                 const std::function<double(double)>& f);

// U X U^dag on the codomain space.
HermitianOperator conjugate(const HermitianOperator& x, const Isometry& u);

}  // namespace qgame
