#include "qgame/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "qgame/errors.hpp"

namespace qgame {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw ValidationError("NonFinite", std::string(what) + " has NaN/Inf");
}

// Rotate a column so its largest-magnitude entry is real positive. Makes
// eigenbases of exact diagonal inputs come out as plain basis vectors.
void fix_phase(Eigen::Ref<Vector> col) {
  int arg = 0;
  double best = 0.0;
  for (int i = 0; i < col.size(); ++i) {
    const double a = std::abs(col(i));
    if (a > best + 1e-12) {
      best = a;
      arg = i;
    }
  }
  if (best == 0.0) return;
  col *= std::conj(col(arg)) / best;
}

}  // namespace

StateVector::StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
  if (v_.size() < 1) throw ValidationError("BadDimension", "state needs dim >= 1");
  require_finite(v_, "state");
  const double norm2 = v_.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTol)
    throw ValidationError("NotNormalized",
                          "sum |a_i|^2 = " + std::to_string(norm2) +
                              " deviates from 1 beyond NORM_TOL 1e-9");
}

StateVector StateVector::basis(int dim, int index) {
  if (index < 0 || index >= dim)
    throw ValidationError("IndexOutOfRange", "basis index outside [0, dim)");
  Vector v = Vector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::uniform(int dim) {
  if (dim < 1) throw ValidationError("BadDimension", "state needs dim >= 1");
  Vector v = Vector::Constant(dim, Complex(1.0 / std::sqrt(double(dim)), 0.0));
  return StateVector(std::move(v));
}

StateVector StateVector::normalized(const Vector& v) {
  const double n = v.norm();
  if (n < 1e-12) throw ValidationError("BadValue", "cannot normalize a zero vector");
  return StateVector(v / n);
}

HermitianOperator::HermitianOperator(Matrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw ValidationError("BadDimension", "observable must be square, dim >= 1");
  require_finite(m_, "observable");
  const double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kHermTol)
    throw ValidationError("NotHermitian",
                          "max |A - A^dag| entry = " + std::to_string(dev) +
                              " exceeds HERM_TOL 1e-9");
}

HermitianOperator HermitianOperator::diagonal(const std::vector<double>& values) {
  Matrix m = Matrix::Zero(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return HermitianOperator(std::move(m));
}

Isometry::Isometry(Matrix entries) : m_(std::move(entries)) {
  if (m_.cols() < 1 || m_.rows() < m_.cols())
    throw ValidationError("BadDimension", "isometry needs dim_out >= dim_in >= 1");
  require_finite(m_, "isometry");
  const Matrix gram = m_.adjoint() * m_;
  const double dev = (gram - Matrix::Identity(m_.cols(), m_.cols())).cwiseAbs().maxCoeff();
  if (dev > kIsometryTol)
    throw ValidationError("NotIsometry",
                          "max |U^dag U - I| entry = " + std::to_string(dev));
}

StateVector Isometry::apply(const StateVector& psi) const {
  if (psi.dim() != dim_in())
    throw ValidationError("DimMismatch", "isometry domain does not match state");
  return StateVector(m_ * psi.vec());
}

Isometry Isometry::identity(int dim) { return Isometry(Matrix::Identity(dim, dim)); }

SpectralDecomposition spectral_decompose(const HermitianOperator& x,
                                         std::optional<double> cluster_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x.mat());
  if (solver.info() != Eigen::Success)
    throw Error("EigensolverFailure", "self-adjoint eigendecomposition did not converge");
  const Eigen::VectorXd raw = solver.eigenvalues();  // ascending
  Matrix vecs = solver.eigenvectors();
  for (int i = 0; i < vecs.cols(); ++i) fix_phase(vecs.col(i));

  const double tol = cluster_tol.value_or(1e-9 * raw.cwiseAbs().maxCoeff());

  SpectralDecomposition out;
  const int n = static_cast<int>(raw.size());
  int start = 0;
  while (start < n) {
    int end = start + 1;
    while (end < n && raw(end) - raw(end - 1) <= tol) ++end;
    const int mult = end - start;
    out.eigenvalues.push_back(raw.segment(start, mult).mean());
    Matrix basis = vecs.middleCols(start, mult);
    out.projectors.push_back(basis * basis.adjoint());
    out.bases.push_back(std::move(basis));
    start = end;
  }
  return out;
}

HermitianOperator apply_function(const HermitianOperator& x, const RealMap& f) {
  const SpectralDecomposition spec = spectral_decompose(x);
  Matrix out = Matrix::Zero(x.dim(), x.dim());
  for (std::size_t k = 0; k < spec.count(); ++k)
    out += f.at(spec.eigenvalues[k], kPayoffTol, "DomainError") * spec.projectors[k];
  return HermitianOperator(std::move(out));
}

HermitianOperator apply_function(const HermitianOperator& x,
                                 const std::function<double(double)>& f) {
  const SpectralDecomposition spec = spectral_decompose(x);
  return apply_function(x, RealMap::tabulate(spec.eigenvalues, f));
}

HermitianOperator conjugate(const HermitianOperator& x, const Isometry& u) {
  if (u.dim_in() != x.dim())
    throw ValidationError("DimMismatch", "isometry domain does not match observable");
  return HermitianOperator(u.mat() * x.mat() * u.mat().adjoint());
}

}  // namespace qgame
