#include "ncstein/expectation.hpp"
#include "ncstein/sampling.hpp"

#include "doctest.h"

using namespace ncstein;

namespace {

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Normalized partial trace over the trailing factor of dimension `drop`,
// written entrywise from the definition, then tensored back with identity.
Operator partial_trace_oracle(const Operator& x, int keep, int drop) {
  Operator reduced = Operator::Zero(keep, keep);
  for (int i = 0; i < keep; ++i)
    for (int j = 0; j < keep; ++j)
      for (int k = 0; k < drop; ++k) reduced(i, j) += x(i * drop + k, j * drop + k);
  return kron(reduced / static_cast<double>(drop), identity(drop));
}

}  // namespace

TEST_CASE("pinching onto singleton blocks") {
  Operator x(2, 2);
  x << 1, 5, 5, 9;
  const Operator e = cond_exp(x, SubalgebraSpec(Pinching{{1, 1}}));
  Operator expected(2, 2);
  expected << 1, 0, 0, 9;
  CHECK(e == expected);
  CHECK(trace(e) == trace(x));
  CHECK(trace(x) == 5.0);
}

TEST_CASE("tensor factor is the normalized partial trace") {
  auto rng = make_rng(11);
  const Operator a = random_gaussian(2, rng);
  const Operator b = random_gaussian(2, rng);
  const SubalgebraSpec spec(TensorFactor{{2, 2}, 1});
  const Operator e = cond_exp(kron(a, b), spec);
  CHECK(operator_norm(e - trace_complex(b) * kron(a, identity(2))) < 1e-14);

  const SubalgebraSpec spec3(TensorFactor{{2, 3, 2}, 2});
  const Operator x = random_gaussian(12, rng);
  CHECK(operator_norm(cond_exp(x, spec3) - partial_trace_oracle(x, 6, 2)) < 1e-13);

  const SubalgebraSpec scalars(TensorFactor{{2, 2}, 0});
  CHECK(operator_norm(cond_exp(x.topLeftCorner(4, 4), scalars) -
                      trace_complex(x.topLeftCorner(4, 4)) * identity(4)) < 1e-14);
}

TEST_CASE("classical cells average blocks within a cell") {
  const SubalgebraSpec spec(ClassicalCells{{0, 0, 1}, 2});
  auto rng = make_rng(12);
  const Operator x = random_gaussian(6, rng);
  const Operator e = cond_exp(x, spec);
  const Operator avg = (x.block(0, 0, 2, 2) + x.block(2, 2, 2, 2)) / 2.0;
  CHECK(operator_norm(e.block(0, 0, 2, 2) - avg) < 1e-15);
  CHECK(operator_norm(e.block(2, 2, 2, 2) - avg) < 1e-15);
  CHECK(operator_norm(e.block(4, 4, 2, 2) - x.block(4, 4, 2, 2)) < 1e-15);
  CHECK(e.block(0, 2, 2, 2).isZero(0.0));
}

TEST_CASE("spec validation and dimension checks") {
  CHECK_THROWS_AS(SubalgebraSpec(Pinching{{}}), Rejection);
  CHECK_THROWS_AS(SubalgebraSpec(Pinching{{2, 0}}), Rejection);
  CHECK_THROWS_AS(SubalgebraSpec(TensorFactor{{2, 2}, 3}), Rejection);
  CHECK_THROWS_AS(cond_exp(identity(3), SubalgebraSpec(Pinching{{2, 2}})), Rejection);
  CHECK(SubalgebraSpec::full(3).dim() == 3);
}

TEST_CASE("axiom residuals") {
  const SubalgebraSpec diag(Pinching{{1, 1}});
  Operator n = Operator::Zero(2, 2);
  n(0, 1) = 1.0;
  CHECK(cond_exp(n, diag).isZero(0.0));

  const AxiomResiduals t = axiom_residuals(SubalgebraSpec(TensorFactor{{2, 2}, 1}), 50, 3);
  CHECK(t.max_residual() <= 1e-10);
  CHECK(t.contractivity_by_p.size() == kContractivityExponents.size());
  const AxiomResiduals p = axiom_residuals(SubalgebraSpec(Pinching{{1, 2, 1}}), 50, 3);
  CHECK(p.max_residual() <= 1e-10);
  const AxiomResiduals c = axiom_residuals(SubalgebraSpec(ClassicalCells{{0, 1, 0}, 2}), 50, 3);
  CHECK(c.max_residual() <= 1e-10);

  // x already in the subalgebra is fixed.
  auto rng = make_rng(4);
  const Operator x = cond_exp(random_gaussian(4, rng), SubalgebraSpec(Pinching{{2, 2}}));
  CHECK(cond_exp(x, SubalgebraSpec(Pinching{{2, 2}})) == x);
}

TEST_CASE("dyadic filtration levels") {
  const Filtration f = make_filtration(FiltrationKind::kDyadicPinching, 4);
  REQUIRE(f.size() == 3);
  CHECK(std::get<Pinching>(f.level(0).variant()).block_sizes == std::vector<int>{1, 1, 1, 1});
  CHECK(std::get<Pinching>(f.level(1).variant()).block_sizes == std::vector<int>{2, 2});
  CHECK(std::get<Pinching>(f.level(2).variant()).block_sizes == std::vector<int>{4});
  CHECK_THROWS_AS(make_filtration(FiltrationKind::kDyadicPinching, 6), Rejection);
  CHECK_THROWS_AS(f.level(3), Rejection);
  CHECK(tower_residual(f, 20, 1) <= 1e-12);
}

TEST_CASE("tensor and corner filtrations") {
  const Filtration t = make_filtration(FiltrationKind::kTensor, 0, {2, 2});
  REQUIRE(t.size() == 3);
  auto rng = make_rng(5);
  const Operator x = random_gaussian(4, rng);
  CHECK(operator_norm(t.expect(0, x) - trace_complex(x) * identity(4)) < 1e-14);
  CHECK(t.expect(2, x) == x);
  CHECK(tower_residual(t, 20, 1) <= 1e-12);
  CHECK_THROWS_AS(make_filtration(FiltrationKind::kTensor, 5, {2, 2}), Rejection);

  const Filtration c = make_filtration(FiltrationKind::kCorner, 4);
  REQUIRE(c.size() == 4);
  const Operator e1 = c.expect(1, x);
  CHECK(e1.topLeftCorner(2, 2) == x.topLeftCorner(2, 2));
  CHECK(e1(2, 2) == x(2, 2));
  CHECK(e1(0, 3) == Complex(0.0));
  CHECK(tower_residual(c, 20, 1) <= 1e-12);
  CHECK(parse_filtration_kind("dyadic-pinching") == FiltrationKind::kDyadicPinching);
  CHECK_THROWS_AS(parse_filtration_kind("haar"), Rejection);
}

TEST_CASE("filtrations must increase") {
  std::vector<SubalgebraSpec> levels{SubalgebraSpec(Pinching{{2, 2}}), SubalgebraSpec(Pinching{{1, 1, 1, 1}})};
  CHECK_THROWS_AS(Filtration{levels}, Rejection);
  CHECK(is_subalgebra_of(SubalgebraSpec(Pinching{{1, 1, 2}}), SubalgebraSpec(Pinching{{2, 2}})));
  CHECK_FALSE(is_subalgebra_of(SubalgebraSpec(Pinching{{1, 2, 1}}), SubalgebraSpec(Pinching{{2, 2}})));
}

TEST_CASE("adaptedness") {
  const Filtration f = make_filtration(FiltrationKind::kDyadicPinching, 4);
  const Operator d = Eigen::Vector4d(1, 2, 3, 4).cast<Complex>().asDiagonal();
  CHECK(is_adapted({d, d, d}, f, 0).adapted);

  Operator x = d;
  x(0, 1) = 0.25;
  const AdaptedCheck bad = is_adapted({x}, f, 0);
  CHECK_FALSE(bad.adapted);
  CHECK(bad.residual == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(is_adapted({x}, f, 1).adapted);  // (0,1) lies in a 2x2 block of level 1

  auto rng = make_rng(6);
  const OperatorSequence seq{random_gaussian(4, rng), random_gaussian(4, rng)};
  for (int lag : {0, 1}) {
    const OperatorSequence y = project_adapted(seq, f, lag);
    const AdaptedCheck check = is_adapted(y, f, lag);
    CHECK(check.adapted);
    CHECK(check.residual <= 1e-10);
    const OperatorSequence yy = project_adapted(y, f, lag);
    for (std::size_t k = 0; k < y.size(); ++k) CHECK(operator_norm(yy[k] - y[k]) <= 1e-12);
  }
  const OperatorSequence zero(2, Operator::Zero(4, 4));
  for (const Operator& z : project_adapted(zero, f, 0)) CHECK(z.isZero(0.0));
  CHECK_THROWS_AS(is_adapted({d, d, d}, f, 1), Rejection);
  CHECK_THROWS_AS(is_adapted({d}, f, 2), Rejection);
}

TEST_CASE("sample dispatcher") {
  const Operator h = std::get<Operator>(sample(SampleKind::kHermitian, 3, 1));
  CHECK(operator_norm(h - h.adjoint()) == 0.0);
  CHECK(std::get<Operator>(sample(SampleKind::kPsd, 3, 1)) ==
        std::get<Operator>(sample(SampleKind::kPsd, 3, 1)));
  const Operator u = std::get<Operator>(sample(SampleKind::kUnitary, 3, 2));
  CHECK(operator_norm(u.adjoint() * u - identity(3)) < 1e-12);
  SampleParams fam;
  fam.count = 2;
  CHECK(std::get<OperatorSequence>(sample(SampleKind::kProjectionFamily, 4, 3, fam)).size() == 2);

  SampleParams ap;
  ap.count = 2;
  ap.lag = 1;
  ap.filtration = make_filtration(FiltrationKind::kDyadicPinching, 4);
  const auto seq = std::get<OperatorSequence>(sample(SampleKind::kAdaptedPositive, 4, 3, ap));
  CHECK(is_adapted(seq, *ap.filtration, 1).adapted);
  CHECK_THROWS_AS(sample(SampleKind::kAdaptedPositive, 4, 3, {}), Rejection);
  CHECK_THROWS_AS(parse_sample_kind("wishart"), Rejection);
}
