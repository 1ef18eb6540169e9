#include "ncstein/opcore.hpp"

#include "doctest.h"

#include <cmath>

using namespace ncstein;

namespace {

Operator diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<Complex>().asDiagonal();
}

// |x| from the SVD x = U S V*, so |x| = V S V*.
Operator abs_via_svd(const Operator& x) {
  Eigen::JacobiSVD<Operator> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.singularValues().cast<Complex>().asDiagonal() *
         svd.matrixV().adjoint();
}

double schatten_via_svd(const Operator& x, double p) {
  const Eigen::VectorXd s = Eigen::JacobiSVD<Operator>(x).singularValues();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc / static_cast<double>(x.rows()), 1.0 / p);
}

}  // namespace

TEST_CASE("exponent parsing and conjugates") {
  CHECK(conjugate_exponent(Exponent(2.0)) == Exponent(2.0));
  CHECK(conjugate_exponent(Exponent(1.0)).is_inf());
  CHECK(conjugate_exponent(Exponent::infinity()) == Exponent(1.0));
  CHECK(conjugate_exponent(Exponent(3.0)).value() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(Exponent(0.5), Rejection);
  CHECK_THROWS_AS(Exponent(std::nan("")), Rejection);
  CHECK(Exponent::parse("inf").is_inf());
  CHECK(Exponent::parse("2.5").value() == 2.5);
  CHECK(Exponent::infinity().str() == "inf");
  CHECK_THROWS_AS(Exponent::parse("two"), Rejection);
}

TEST_CASE("trace is normalized and cyclic") {
  CHECK(trace(identity(5)) == 1.0);
  auto rng = make_rng(1);
  const Operator a = random_gaussian(4, rng);
  const Operator b = random_gaussian(4, rng);
  CHECK(std::abs(trace_complex(a * b) - trace_complex(b * a)) < 1e-12);
}

TEST_CASE("hermitian_eig") {
  const HermitianEig id = hermitian_eig(identity(3));
  CHECK((id.eigenvalues - Eigen::Vector3d::Ones()).norm() < 1e-15);

  const HermitianEig d = hermitian_eig(diag({-4.0, 3.0}));
  CHECK(d.eigenvalues(0) == doctest::Approx(-4.0));
  CHECK(d.eigenvalues(1) == doctest::Approx(3.0));

  auto rng = make_rng(7);
  const Operator h = random_hermitian(5, rng);
  const HermitianEig e = hermitian_eig(h);
  const Operator rebuilt =
      e.transition * e.eigenvalues.cast<Complex>().asDiagonal() * e.transition.adjoint();
  CHECK(operator_norm(rebuilt - h) <= 1e-10 * std::max(1.0, operator_norm(h)));
  CHECK(operator_norm(e.transition.adjoint() * e.transition - identity(5)) < 1e-10);
  for (Eigen::Index i = 1; i < e.eigenvalues.size(); ++i) {
    CHECK(e.eigenvalues(i - 1) <= e.eigenvalues(i));
  }

  Operator bad = h;
  bad(0, 1) += 1.0;
  CHECK_THROWS_AS(hermitian_eig(bad), Rejection);
  CHECK_THROWS_AS(hermitian_eig(Operator::Zero(2, 3)), Rejection);
}

TEST_CASE("abs_op") {
  CHECK(operator_norm(abs_op(-identity(3)) - identity(3)) < 1e-14);
  CHECK(operator_norm(abs_op(diag({3.0, -4.0})) - diag({3.0, 4.0})) < 1e-14);
  auto rng = make_rng(2);
  for (int t = 0; t < 10; ++t) {
    const Operator x = random_gaussian(4, rng);
    CHECK(operator_norm(abs_op(x) - abs_via_svd(x)) < 1e-10);
  }
}

TEST_CASE("psd_power") {
  CHECK(operator_norm(psd_power(identity(3), 0.37) - identity(3)) < 1e-14);
  CHECK(operator_norm(psd_power(diag({4.0, 9.0}), 0.5) - diag({2.0, 3.0})) < 1e-14);
  auto rng = make_rng(3);
  const Operator a = random_psd(5, rng);
  CHECK(operator_norm(psd_power(a, 2.0) - a * a) < 1e-10 * operator_norm(a * a));
  const Operator r = psd_power(a, 0.5);
  CHECK(operator_norm(r * r - a) < 1e-10 * operator_norm(a));
  CHECK(psd_trace_power(a, 3.0) == doctest::Approx(trace(a * a * a)).epsilon(1e-10));
  CHECK_THROWS_AS(psd_power(diag({1.0, -1.0}), 0.5), Rejection);
  CHECK_THROWS_AS(psd_power(a, 0.0), Rejection);
}

TEST_CASE("schatten_norm") {
  for (double p : {1.0, 2.0, 3.0}) CHECK(schatten_norm(identity(4), Exponent(p)) == doctest::Approx(1.0));
  CHECK(schatten_norm(identity(4), Exponent::infinity()) == doctest::Approx(1.0));
  CHECK(schatten_norm(diag({2.0, 0.0}), Exponent(1.0)) == doctest::Approx(1.0));

  auto rng = make_rng(4);
  const Operator x = random_gaussian(5, rng);
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    CHECK(schatten_norm(x, Exponent(p)) == doctest::Approx(schatten_via_svd(x, p)).epsilon(1e-12));
  }
  CHECK(schatten_norm(x, Exponent(2.0)) ==
        doctest::Approx(x.norm() / std::sqrt(5.0)).epsilon(1e-12));
  double prev = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 8.0}) {
    const double v = schatten_norm(x, Exponent(p));
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  CHECK(schatten_norm(x, Exponent::infinity()) >= prev - 1e-12);
  // Hoelder: |tau(xy)| <= ||x||_3 ||y||_{3/2}.
  const Operator y = random_gaussian(5, rng);
  CHECK(std::abs(trace_complex(x * y)) <=
        schatten_norm(x, Exponent(3.0)) * schatten_norm(y, Exponent(1.5)) + 1e-12);
}

TEST_CASE("psd helpers") {
  CHECK(is_psd(diag({0.0, 1.0})));
  CHECK_FALSE(is_psd(diag({-1e-3, 1.0})));
  const Operator p = psd_pinv_sqrt(diag({4.0, 0.0}));
  CHECK(operator_norm(p - diag({0.5, 0.0})) < 1e-14);
}

TEST_CASE("seeded generators") {
  auto r1 = make_rng(9, 2);
  auto r2 = make_rng(9, 2);
  CHECK(random_gaussian(3, r1) == random_gaussian(3, r2));
  auto r3 = make_rng(9, 3);
  auto r4 = make_rng(9, 2);
  CHECK(random_gaussian(3, r3) != random_gaussian(3, r4));

  auto rng = make_rng(5);
  const Operator u = random_unitary(6, rng);
  CHECK(operator_norm(u.adjoint() * u - identity(6)) < 1e-12);
  CHECK(is_psd(random_psd(4, rng)));

  const OperatorSequence fam = random_projection_family(6, 3, 2, rng);
  REQUIRE(fam.size() == 3);
  for (std::size_t i = 0; i < fam.size(); ++i) {
    CHECK(operator_norm(fam[i] * fam[i] - fam[i]) < 1e-12);
    CHECK(trace(fam[i]) == doctest::Approx(2.0 / 6.0));
    for (std::size_t j = i + 1; j < fam.size(); ++j) CHECK(operator_norm(fam[i] * fam[j]) < 1e-12);
  }
  CHECK_THROWS_AS(random_projection_family(4, 3, 2, rng), Rejection);
}

TEST_CASE("validation") {
  Operator x = identity(2);
  x(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate_operator(x), Rejection);
  CHECK_THROWS_AS(validate_operator(Operator(0, 0)), Rejection);
  CHECK_THROWS_AS(require_same_dim(identity(2), identity(3)), Rejection);
}
