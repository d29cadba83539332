#include <cmath>
#include <complex>

#include "doctest.h"
#include "qgame/linalg.hpp"
#include "support/oracles.hpp"

using namespace qgame;
using testsupport::thrown_code;

namespace {
Vector vec2(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("state vectors enforce normalization") {
  CHECK_NOTHROW(StateVector(vec2(std::sqrt(0.3), std::sqrt(0.7))));
  CHECK(thrown_code([] { StateVector(vec2(1.0, 1.0)); }) == "NotNormalized");
  CHECK_THROWS_AS(StateVector(vec2(0.5, 0.5)), ValidationError);
  CHECK(thrown_code([] { StateVector(Vector::Zero(0)); }) == "BadDimension");
  CHECK(thrown_code([] {
          StateVector(vec2(std::nan(""), 1.0));
        }) == "NonFinite");
}

TEST_CASE("state vector constructors") {
  const StateVector e1 = StateVector::basis(3, 1);
  CHECK(e1.amplitude(1) == Complex(1.0));
  CHECK(e1.amplitude(0) == Complex(0.0));
  CHECK(thrown_code([] { StateVector::basis(3, 3); }) == "IndexOutOfRange");

  const StateVector u = StateVector::uniform(4);
  CHECK(std::abs(u.amplitude(2)) == doctest::Approx(0.5).epsilon(1e-12));

  const StateVector n = StateVector::normalized(vec2(3.0, 4.0));
  CHECK(std::abs(n.amplitude(0)) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(std::abs(n.amplitude(1)) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(thrown_code([] { StateVector::normalized(vec2(0.0, 0.0)); }) == "BadValue");
}

TEST_CASE("hermitian operators reject non-hermitian input") {
  Matrix m(2, 2);
  m << Complex(1.0), Complex(0.0, 1.0), Complex(0.0, 1.0), Complex(2.0);
  CHECK(thrown_code([&] { HermitianOperator{m}; }) == "NotHermitian");
  m(1, 0) = Complex(0.0, -1.0);
  CHECK_NOTHROW(HermitianOperator{m});

  const HermitianOperator d = HermitianOperator::diagonal({2.0, -1.0});
  CHECK(d.mat()(0, 0).real() == 2.0);
  CHECK(d.mat()(1, 1).real() == -1.0);
  CHECK(d.mat()(0, 1) == Complex(0.0));
}

TEST_CASE("spectral decomposition orders and clusters eigenvalues") {
  const HermitianOperator x = HermitianOperator::diagonal({3.0, 1.0, 1.0});
  const SpectralDecomposition s = spectral_decompose(x);
  REQUIRE(s.count() == 2);
  CHECK(s.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(s.multiplicity(0) == 2);
  CHECK(s.multiplicity(1) == 1);

  // Projectors: idempotent, orthogonal, resolve the identity.
  Matrix sum = Matrix::Zero(3, 3);
  for (const Matrix& p : s.projectors) {
    CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);
    sum += p;
  }
  CHECK((sum - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.projectors[0] * s.projectors[1]).cwiseAbs().maxCoeff() < 1e-12);

  // Near-degenerate values merge into one cluster at the mean.
  const SpectralDecomposition c =
      spectral_decompose(HermitianOperator::diagonal({1.0, 1.0 + 1e-12, 2.0}));
  REQUIRE(c.count() == 2);
  CHECK(c.multiplicity(0) == 2);
  CHECK(c.eigenvalues[0] == doctest::Approx(1.0 + 5e-13).epsilon(1e-9));
}

TEST_CASE("spectral decomposition of a rotated operator") {
  Matrix g = Matrix::Identity(3, 3);
  const double c = std::cos(0.9), s = std::sin(0.9);
  g(0, 0) = c;
  g(0, 1) = -s;
  g(1, 0) = s;
  g(1, 1) = c;
  const Matrix rotated =
      g * HermitianOperator::diagonal({1.0, 2.0, 5.0}).mat() * g.adjoint();
  const SpectralDecomposition d = spectral_decompose(HermitianOperator(rotated));
  REQUIRE(d.count() == 3);
  CHECK(d.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d.eigenvalues[2] == doctest::Approx(5.0).epsilon(1e-10));
  for (std::size_t k = 0; k < d.count(); ++k) {
    const Matrix& b = d.bases[k];
    CHECK((b.adjoint() * b - Matrix::Identity(b.cols(), b.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((rotated * b - d.eigenvalues[k] * b).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("apply_function maps the spectrum") {
  const HermitianOperator x = HermitianOperator::diagonal({1.0, 2.0, 2.0});
  const HermitianOperator sq =
      apply_function(x, [](double v) { return v * v; });
  CHECK(sq.mat()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sq.mat()(1, 1).real() == doctest::Approx(4.0).epsilon(1e-12));

  const RealMap partial({{1.0, 10.0}});  // missing eigenvalue 2
  CHECK(thrown_code([&] { apply_function(x, partial); }) == "DomainError");
}

TEST_CASE("isometries validate their defining relation") {
  CHECK_NOTHROW(Isometry::identity(3));
  Matrix bad(2, 2);
  bad << Complex(1.0), Complex(1.0), Complex(0.0), Complex(1.0);
  CHECK(thrown_code([&] { Isometry{bad}; }) == "NotIsometry");

  Matrix wide(2, 3);
  wide.setZero();
  CHECK(thrown_code([&] { Isometry{wide}; }) == "BadDimension");

  // Column embedding: 2 -> 3, preserves norms.
  Matrix emb(3, 2);
  emb.setZero();
  emb(0, 0) = 1.0;
  emb(2, 1) = 1.0;
  const Isometry u(emb);
  const StateVector img = u.apply(StateVector(vec2(std::sqrt(0.3), std::sqrt(0.7))));
  CHECK(img.dim() == 3);
  CHECK(std::norm(img.amplitude(0)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::norm(img.amplitude(2)) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(thrown_code([&] { u.apply(StateVector::uniform(3)); }) == "DimMismatch");
}

TEST_CASE("conjugation carries operators across isometries") {
  Matrix emb(3, 2);
  emb.setZero();
  emb(1, 0) = 1.0;
  emb(2, 1) = 1.0;
  const HermitianOperator x = HermitianOperator::diagonal({4.0, 9.0});
  const HermitianOperator y = conjugate(x, Isometry(emb));
  CHECK(y.dim() == 3);
  CHECK(y.mat()(1, 1).real() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(y.mat()(2, 2).real() == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(y.mat()(0, 0) == Complex(0.0));
  CHECK(thrown_code([&] {
          conjugate(HermitianOperator::diagonal({1.0, 2.0, 3.0}), Isometry(emb));
        }) == "DimMismatch");
}
