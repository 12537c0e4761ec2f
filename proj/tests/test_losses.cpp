#include <doctest.h>

#include <cmath>

#include "polar/losses.hpp"
#include "polar/prng.hpp"
#include "oracles.hpp"
#include "synth.hpp"

using namespace polar;
using namespace polar::testing;

TEST_CASE("compute_pos_weights") {
  auto matrix_with_positives = [](std::size_t n, std::size_t n_pos) {
    std::vector<std::string> ids;
    std::vector<std::uint8_t> values;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(make_id(Lang::eng, i));
      values.push_back(i < n_pos ? 1 : 0);
    }
    return LabelMatrix(Subtask::detect, std::move(ids), std::move(values));
  };

  SUBCASE("balanced label -> w = 1") {
    auto w = compute_pos_weights(matrix_with_positives(10000, 5000));
    CHECK(w.w[0] == doctest::Approx(1.0));
  }
  SUBCASE("no positives -> clamp, w = N_neg") {
    auto w = compute_pos_weights(matrix_with_positives(100, 0));
    CHECK(w.w[0] == doctest::Approx(100.0));
  }
  SUBCASE("positive rate 0.1075 on 10000 rows -> 8925/1075") {
    auto w = compute_pos_weights(matrix_with_positives(10000, 1075));
    CHECK(w.w[0] == doctest::Approx(8.302325581395349).epsilon(1e-12));
  }
  SUBCASE("weights from concatenated splits equal weights from pooled counts") {
    // counts are additive, so concatenation and pooling agree
    Rng rng(7);
    LabelMatrix a = random_labels(Subtask::type, 137, rng, 0.23);
    LabelMatrix b = random_labels(Subtask::type, 211, rng, 0.61, Lang::deu);
    std::vector<std::string> ids = a.ids();
    ids.insert(ids.end(), b.ids().begin(), b.ids().end());
    std::vector<std::uint8_t> values;
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < a.cols(); ++c) values.push_back(a.at(r, c));
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) values.push_back(b.at(r, c));
    LabelMatrix merged(Subtask::type, std::move(ids), std::move(values));

    auto merged_w = compute_pos_weights(merged);
    for (std::size_t l = 0; l < merged.cols(); ++l) {
      const double n_pos = static_cast<double>(a.positives(l) + b.positives(l));
      const double n_neg = static_cast<double>(a.rows() + b.rows()) - n_pos;
      CHECK(merged_w.w[l] == doctest::Approx(n_neg / std::max(n_pos, 1.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sigmoid") {
  CHECK(sigmoid(0.0) == doctest::Approx(0.5));
  CHECK(sigmoid(1.0) == doctest::Approx(0.7310585786300049).epsilon(1e-15));
  CHECK(sigmoid(40.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sigmoid(-40.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::isfinite(sigmoid(700.0)));
  CHECK(std::isfinite(sigmoid(-700.0)));
  // monotone on a coarse grid
  double prev = -1.0;
  for (double z = -30.0; z <= 30.0; z += 0.5) {
    const double s = sigmoid(z);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("wbce values") {
  SUBCASE("y=1, z=0, w=1 -> -log(0.5)") {
    CHECK(wbce(1, 0.0, 1.0).loss == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  }
  SUBCASE("positive branch is linear in w") {
    CHECK(wbce(1, 0.0, 2.0).loss == doctest::Approx(1.3862943611198906).epsilon(1e-15));
  }
  SUBCASE("weight is inert on the negative branch") {
    CHECK(wbce(0, 0.0, 7.0).loss == doctest::Approx(0.6931471805599453).epsilon(1e-15));
    CHECK(wbce(0, 1.3, 7.0).loss == doctest::Approx(wbce(0, 1.3, 1.0).loss));
  }
  SUBCASE("loss is non-negative and saturates to zero at the true label") {
    CHECK(wbce(1, 40.0, 3.0).loss == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(wbce(0, -40.0, 3.0).loss == doctest::Approx(0.0).epsilon(1e-15));
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
      const double z = (static_cast<double>(bounded(rng, 2000001)) - 1000000.0) / 100000.0;
      const double w = static_cast<double>(bounded(rng, 500)) / 100.0;
      CHECK(wbce(0, z, w).loss >= 0.0);
      CHECK(wbce(1, z, w).loss >= 0.0);
    }
  }
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(42);
  auto random_z = [&](int i) {
    // mix of moderate and saturated logits
    switch (i % 8) {
      case 6: return (i % 16 < 8) ? 30.0 : -30.0;
      case 7: return (i % 16 < 8) ? 10.0 : -10.0;
      default:
        return (static_cast<double>(bounded(rng, 2000001)) - 1000000.0) / 200000.0;  // [-5,5]
    }
  };

  SUBCASE("wbce gradient, including spec spot check at (y=1, z=0.3, w=3)") {
    const auto spot = wbce(1, 0.3, 3.0);
    const double fd = central_difference([](double z) { return wbce(1, z, 3.0).loss; }, 0.3);
    CHECK(grad_rel_err(spot.dloss_dz, fd) < 1e-5);

    for (int i = 0; i < 2000; ++i) {
      const int y = static_cast<int>(bounded(rng, 2));
      const double z = random_z(i);
      const double w = static_cast<double>(bounded(rng, 1000)) / 100.0;
      const auto lv = wbce(y, z, w);
      const double numeric =
          central_difference([&](double zz) { return wbce(y, zz, w).loss; }, z);
      CHECK(grad_rel_err(lv.dloss_dz, numeric) < 1e-5);
    }
  }

  SUBCASE("focal gradient, including spec spot check at (y=0, z=-0.7, gamma=2)") {
    const auto spot = focal(0, -0.7, 2.0);
    const double fd = central_difference([](double z) { return focal(0, z, 2.0).loss; }, -0.7);
    CHECK(grad_rel_err(spot.dloss_dz, fd) < 1e-5);

    for (int i = 0; i < 2000; ++i) {
      const int y = static_cast<int>(bounded(rng, 2));
      const double z = random_z(i);
      const double gamma = static_cast<double>(bounded(rng, 400)) / 100.0;
      const auto lv = focal(y, z, gamma);
      const double numeric =
          central_difference([&](double zz) { return focal(y, zz, gamma).loss; }, z);
      CHECK(grad_rel_err(lv.dloss_dz, numeric) < 1e-5);
    }
  }
}

TEST_CASE("focal reductions and tail behavior") {
  Rng rng(5);
  SUBCASE("gamma=0 equals unweighted bce within 1e-12") {
    for (int i = 0; i < 10000; ++i) {
      const int y = static_cast<int>(bounded(rng, 2));
      const double z = (static_cast<double>(bounded(rng, 2000001)) - 1000000.0) / 33333.0;
      const auto f = focal(y, z, 0.0);
      const auto b = bce(y, z);
      CHECK(std::abs(f.loss - b.loss) < 1e-12);
      CHECK(std::abs(f.dloss_dz - b.dloss_dz) < 1e-12);
    }
  }
  SUBCASE("wbce with w=1 equals bce within 1e-12") {
    for (int i = 0; i < 10000; ++i) {
      const int y = static_cast<int>(bounded(rng, 2));
      const double z = (static_cast<double>(bounded(rng, 2000001)) - 1000000.0) / 33333.0;
      const auto a = wbce(y, z, 1.0);
      const auto b = bce(y, z);
      CHECK(std::abs(a.loss - b.loss) < 1e-12);
      CHECK(std::abs(a.dloss_dz - b.dloss_dz) < 1e-12);
    }
  }
  SUBCASE("easy positives are damped faster than bce") {
    for (double z : {2.0, 4.0, 8.0}) {
      CHECK(focal(1, z, 2.0).loss < bce(1, z).loss);
    }
    // ratio shrinks as confidence grows
    const double r1 = focal(1, 2.0, 2.0).loss / bce(1, 2.0).loss;
    const double r2 = focal(1, 6.0, 2.0).loss / bce(1, 6.0).loss;
    CHECK(r2 < r1);
  }
}

TEST_CASE("batch_loss") {
  SUBCASE("all logits zero, balanced gold, bce -> mean -log(0.5)") {
    LabelMatrix gold(Subtask::type, {"eng_00000001", "eng_00000002"},
                     {1, 0, 1, 0, 1, 0, 1, 0, 1, 0});
    MatrixD logits(2, 5, 0.0);
    const auto out = batch_loss(gold, logits, LossConfig{});
    CHECK(out.mean_loss == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  }

  SUBCASE("single element reduces to the scalar op") {
    LabelMatrix gold(Subtask::detect, {"eng_00000001"}, {1});
    MatrixD logits(1, 1, 0.7);
    const auto out = batch_loss(gold, logits, LossConfig{});
    const auto scalar = bce(1, 0.7);
    CHECK(out.mean_loss == doctest::Approx(scalar.loss).epsilon(1e-15));
    CHECK(out.grad.at(0, 0) == doctest::Approx(scalar.dloss_dz).epsilon(1e-15));
  }

  SUBCASE("random 5x3-style case matches the element-wise oracle") {
    Rng rng(9);
    LabelMatrix gold = random_labels(Subtask::type, 5, rng, 0.4);
    MatrixD logits(5, 5);
    for (double& v : logits.data) {
      v = (static_cast<double>(bounded(rng, 2000001)) - 1000000.0) / 250000.0;
    }
    LossConfig cfg;
    cfg.kind = LossKind::wbce;
    cfg.weights = compute_pos_weights(gold);

    const auto out = batch_loss(gold, logits, cfg);
    double oracle_sum = 0.0;
    const double n = 25.0;
    for (std::size_t r = 0; r < 5; ++r) {
      for (std::size_t c = 0; c < 5; ++c) {
        const auto lv = wbce(gold.at(r, c), logits.at(r, c), cfg.weights->w[c]);
        oracle_sum += lv.loss;
        CHECK(out.grad.at(r, c) == doctest::Approx(lv.dloss_dz / n).epsilon(1e-12));
      }
    }
    CHECK(out.mean_loss == doctest::Approx(oracle_sum / n).epsilon(1e-12));
  }

  SUBCASE("shape mismatch throws") {
    LabelMatrix gold(Subtask::type, {"eng_00000001"}, {1, 0, 0, 0, 0});
    MatrixD logits(2, 5, 0.0);
    CHECK_THROWS_AS(batch_loss(gold, logits, LossConfig{}), Error);
  }

  SUBCASE("wbce without weights is rejected") {
    LabelMatrix gold(Subtask::detect, {"eng_00000001"}, {1});
    MatrixD logits(1, 1, 0.0);
    LossConfig cfg;
    cfg.kind = LossKind::wbce;
    CHECK_THROWS_AS(batch_loss(gold, logits, cfg), Error);
  }
}
