#include <doctest.h>

#include <cmath>
#include <numeric>

#include "chase/core/bytes.hpp"
#include "chase/core/gradcheck.hpp"
#include "chase/core/ops.hpp"
#include "chase/disc/mmd.hpp"
#include "chase/train/gradcheck_suite.hpp"
#include "support.hpp"

using namespace chase;
using testing::random_tensor;

namespace {

Value leaf(Shape s, std::initializer_list<double> v) { return Value(TensorXd(std::move(s), v), true); }

}  // namespace

TEST_CASE("tensor keeps shape and data consistent") {
  TensorXd t({2, 3});
  CHECK(t.size() == 6);
  CHECK(t.rank() == 2);
  CHECK_THROWS_AS(TensorXd(Shape{2, 0}), DimensionError);
  CHECK_THROWS_AS(TensorXd(Shape{2, 2}, {1.0, 2.0, 3.0}), DimensionError);
  TensorXd m({2, 2}, {1, 2, 3, 4});
  CHECK(m({1, 0}) == 3);
  CHECK_THROWS_AS(m({2, 0}), IndexError);
  CHECK_THROWS_AS(m.matrix(3, 1), DimensionError);
  CHECK(m.reshaped({4})[3] == 4);
}

TEST_CASE("ops reject non-finite results") {
  CHECK_THROWS_AS(chase::exp(Value(TensorXd({1}, {1000.0}))), NumericalError);
}

TEST_CASE("matmul") {
  SUBCASE("identity") {
    Value i2 = leaf({2, 2}, {1, 0, 0, 1});
    Value a = leaf({2, 2}, {1, 2, 3, 4});
    CHECK(matmul(i2, a).tensor() == a.tensor());
  }
  SUBCASE("row times column") {
    CHECK(matmul(leaf({1, 2}, {1, 2}), leaf({2, 1}, {3, 4})).item() == 11.0);
  }
  SUBCASE("shape mismatch names both shapes") {
    try {
      matmul(Value(TensorXd({2, 3})), Value(TensorXd({2, 3})));
      FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("(2, 3)") != std::string::npos);
    }
  }
  SUBCASE("gradient of sum(A B) against finite differences") {
    std::mt19937_64 rng(1);
    const TensorXd a = random_tensor({3, 3}, rng), b = random_tensor({3, 3}, rng);
    const Value bv(b);
    const TensorXd ga = testing::analytic_grad([&](const Value& x) { return sum(matmul(x, bv)); }, a);
    const TensorXd gn = testing::numeric_grad([&](const TensorXd& x) { return sum(matmul(Value(x), bv)).item(); }, a);
    CHECK(testing::max_rel_diff(ga, gn) < 1e-6);
    // Closed form: d/dA sum(AB) = 1 B^T, i.e. row sums of B in every row.
    for (Index i = 0; i < 3; ++i)
      for (Index k = 0; k < 3; ++k) CHECK(ga({i, k}) == doctest::Approx(b.matrix().row(k).sum()).epsilon(1e-12));
  }
}

TEST_CASE("softmax") {
  SUBCASE("symmetric input") {
    const auto y = softmax(leaf({2}, {0, 0}), 0).tensor();
    CHECK(y[0] == 0.5);
    CHECK(y[1] == 0.5);
  }
  SUBCASE("[0, ln 3]") {
    const auto y = softmax(leaf({2}, {0, std::log(3.0)}), 0).tensor();
    CHECK(y[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("shift invariance") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 50; ++rep) {
      const TensorXd x = random_tensor({3, 5}, rng, -5, 5);
      const double c = std::uniform_real_distribution<double>(-100, 100)(rng);
      TensorXd xc = x;
      xc.data() += c;
      const auto a = softmax(Value(x), 1).tensor(), b = softmax(Value(xc), 1).tensor();
      CHECK((a.data() - b.data()).abs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("simplex outputs on 1000 random inputs up to magnitude 1e3") {
    // exp underflows to exactly 0 once two entries differ by more than ~745,
    // so strict positivity is asserted only where it is representable.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mag(0.0, 3.0);
    for (int rep = 0; rep < 1000; ++rep) {
      const double m = std::pow(10.0, mag(rng));
      const TensorXd x = random_tensor({6}, rng, -m, m);
      const auto y = softmax(Value(x), 0).tensor();
      CHECK(std::abs(y.data().sum() - 1.0) < 1e-9);
      CHECK((y.data() >= 0.0).all());
      CHECK((y.data() <= 1.0).all());
      if (x.data().maxCoeff() - x.data().minCoeff() < 700.0) CHECK((y.data() > 0.0).all());
    }
  }
  SUBCASE("gradient") {
    std::mt19937_64 rng(4);
    const TensorXd x = random_tensor({2, 4}, rng, -2, 2), w = random_tensor({2, 4}, rng);
    const Value wv(w);
    auto f = [&](const Value& v) { return sum(mul(softmax(v, 1), wv)); };
    const auto gn = testing::numeric_grad([&](const TensorXd& t) { return f(Value(t)).item(); }, x);
    CHECK(testing::max_rel_diff(testing::analytic_grad(f, x), gn) < 1e-6);
  }
}

TEST_CASE("elementwise ops and broadcasting") {
  CHECK(relu(leaf({3}, {-1, 0, 2})).tensor() == TensorXd({3}, {0, 0, 2}));
  CHECK(sub(leaf({2}, {1, 2}), leaf({2}, {1, 1})).tensor() == TensorXd({2}, {0, 1}));
  CHECK(add(leaf({2, 2}, {1, 2, 3, 4}), leaf({2}, {10, 20})).tensor() == TensorXd({2, 2}, {11, 22, 13, 24}));
  CHECK(mul(leaf({2, 1}, {2, 3}), leaf({1, 2}, {1, 10})).tensor() == TensorXd({2, 2}, {2, 20, 3, 30}));
  CHECK(scale(leaf({2}, {1, -2}), 3.0).tensor() == TensorXd({2}, {3, -6}));
  CHECK_THROWS_AS(add(Value(TensorXd({2, 3})), Value(TensorXd({2}))), DimensionError);

  SUBCASE("relu gradient is the indicator of x > 0, 0 at the kink") {
    Value x = leaf({4}, {-1.5, 0.0, 0.5, 2.0});
    backward(sum(relu(x)));
    CHECK(x.grad() == TensorXd({4}, {0, 0, 1, 1}));
  }
  SUBCASE("broadcast backward reduces over stretched axes") {
    Value a = leaf({2, 3}, {1, 2, 3, 4, 5, 6});
    Value b = leaf({3}, {1, 1, 1});
    backward(sum(mul(a, b)));
    CHECK(b.grad() == TensorXd({3}, {5, 7, 9}));
  }
}

TEST_CASE("segment_mean_pool") {
  SUBCASE("single segment is the per-channel mean") {
    std::mt19937_64 rng(5);
    const TensorXd x = random_tensor({3, 4, 5, 2}, rng);
    const auto y = segment_mean_pool(Value(x), SegmentSpec{}).tensor();
    REQUIRE(y.shape() == Shape{3, 1, 1, 1});
    for (Index c = 0; c < 3; ++c) CHECK(y[c] == doctest::Approx(x.data().segment(c * 40, 40).mean()).epsilon(1e-14));
  }
  SUBCASE("[2, 4] -> [3]") {
    CHECK(segment_mean_pool(leaf({1, 2, 1, 1}, {2, 4}), SegmentSpec{}).item() == 3.0);
  }
  SUBCASE("[1, 2, 3, 4] with two time segments") {
    const auto y = segment_mean_pool(leaf({1, 4, 1, 1}, {1, 2, 3, 4}), SegmentSpec{2, 1, 1}).tensor();
    CHECK(y == TensorXd({1, 2, 1, 1}, {1.5, 3.5}));
  }
  SUBCASE("non-divisible segments are a configuration error") {
    CHECK_THROWS_AS(segment_mean_pool(Value(TensorXd({1, 3, 1, 1})), SegmentSpec{2, 1, 1}), ConfigError);
  }
  SUBCASE("gradient mass is conserved") {
    std::mt19937_64 rng(6);
    Value x(random_tensor({2, 4, 6, 2}, rng), true);
    const TensorXd w = random_tensor({2, 2, 3, 1}, rng);
    const Value y = segment_mean_pool(x, SegmentSpec{2, 3, 1});
    backward(sum(mul(y, Value(w))));
    CHECK(x.grad().data().sum() == doctest::Approx(w.data().sum()).epsilon(1e-12));
  }
  SUBCASE("broadcast is the layout inverse") {
    std::mt19937_64 rng(7);
    const TensorXd x = random_tensor({2, 2, 3, 1}, rng);
    const auto up = segment_broadcast(Value(x), 2, 2, 2);
    CHECK(up.shape() == Shape{2, 4, 6, 2});
    const auto back = segment_mean_pool(up, SegmentSpec{2, 3, 1}).tensor();
    CHECK(back.shape() == x.shape());
    CHECK((back.data() - x.data()).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("cross_entropy") {
  CHECK(cross_entropy(leaf({1, 4}, {0.3, 0.3, 0.3, 0.3}), std::vector<int>{2}).item() ==
        doctest::Approx(std::log(4.0)).epsilon(1e-15));
  // log(1 + e^-20) evaluated without cancellation.
  const double expected = std::log1p(std::exp(-20.0));
  CHECK(cross_entropy(leaf({1, 2}, {10, -10}), std::vector<int>{0}).item() == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(2.0611536900435727e-09).epsilon(1e-12));
  CHECK_THROWS_AS(cross_entropy(leaf({1, 2}, {0, 0}), std::vector<int>{2}), IndexError);
  CHECK_THROWS_AS(cross_entropy(leaf({1, 2}, {0, 0}), std::vector<int>{-1}), IndexError);

  std::mt19937_64 rng(8);
  const TensorXd x = random_tensor({2, 3}, rng, -2, 2);
  const std::vector<int> labels{2, 0};
  auto f = [&](const Value& v) { return cross_entropy(v, labels); };
  const auto gn = testing::numeric_grad([&](const TensorXd& t) { return f(Value(t)).item(); }, x);
  CHECK(testing::max_rel_diff(testing::analytic_grad(f, x), gn) < 1e-6);
}

TEST_CASE("backward") {
  SUBCASE("identity") {
    Value x = leaf({}, {3.0});
    backward(x);
    CHECK(x.grad().item() == 1.0);
  }
  SUBCASE("sum of squares") {
    Value x = leaf({2}, {1, 2});
    backward(sum(mul(x, x)));
    CHECK(x.grad() == TensorXd({2}, {2, 4}));
  }
  SUBCASE("diamond graph accumulates both paths") {
    Value a = leaf({}, {1.5});
    Value x = Value(TensorXd({}, {4.0}));
    backward(add(mul(a, x), mul(a, x)));
    CHECK(a.grad().item() == 8.0);
  }
  SUBCASE("non-scalar root is a usage error") {
    CHECK_THROWS_AS(backward(leaf({2}, {1, 2})), UsageError);
  }
  SUBCASE("repeat after zero_grad is bit-identical") {
    std::mt19937_64 rng(9);
    Value x(random_tensor({4, 3}, rng), true);
    const Value w(random_tensor({3, 2}, rng));
    const Value y = sum(softmax(matmul(x, w), 1) * softmax(matmul(x, w), 0));
    backward(y);
    const TensorXd first = x.grad();
    x.zero_grad();
    backward(y);
    CHECK(x.grad() == first);
  }
  SUBCASE("grad() before backward is a usage error") {
    CHECK_THROWS_AS(leaf({1}, {1}).grad(), UsageError);
  }
}

TEST_CASE("grad_check") {
  SUBCASE("sum is exact on dyadic inputs") {
    const TensorXd x({2, 3}, {1, -2, 3, 0.5, 4, -1});
    const auto r = grad_check([](const Value& v) { return sum(v); }, x, std::ldexp(1.0, -10));
    CHECK(r.max_rel_error == 0.0);
    CHECK(r.passed);
  }
  SUBCASE("MMD^2 on random 8-point sets") {
    std::mt19937_64 rng(10);
    const TensorXd a = random_tensor({8, 2}, rng), b = random_tensor({8, 2}, rng, 0, 2);
    const double h = disc::median_bandwidth(a, b);
    const auto r = grad_check([&](const Value& v) { return disc::mmd_sq(v, Value(b), h); }, a, 1e-5);
    CHECK(r.max_rel_error < 1e-4);
  }
  SUBCASE("full objective on a 2-sample batch") {
    for (const auto& e : train::run_gradcheck_suite()) {
      if (e.name.rfind("total_loss", 0) == 0) {
        INFO(e.name);
        CHECK(e.report.max_rel_error < 1e-4);
      }
    }
  }
  SUBCASE("a broken backward rule is caught") {
    const auto r = grad_check([](const Value& v) { return sum(gradient_fault(mul(v, v), 1.5)); }, TensorXd({2}, {1, 2}));
    CHECK_FALSE(r.passed);
  }
  SUBCASE("eps must be positive") {
    CHECK_THROWS_AS(grad_check([](const Value& v) { return sum(v); }, TensorXd({1}), 0.0), UsageError);
  }
}

TEST_CASE("autodiff_jacobian of a linear map is the matrix") {
  const TensorXd m({2, 3}, {1, 2, 3, 4, 5, 6});
  const auto jac = autodiff_jacobian(
      [&](const Value& x) { return reshape(matmul(Value(m), reshape(x, {3, 1})), {2}); }, TensorXd({3}, {1, 1, 1}));
  CHECK(jac == m.matrix());
}

TEST_CASE("byte reader reports the failing offset") {
  bytes::Writer w;
  w.u32(7);
  w.u16(1);
  bytes::Reader r(w.buffer());
  CHECK(r.u32() == 7);
  try {
    r.u32();
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 4);
  }
}
