#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "admm/gains.hpp"
#include "doctest.h"

using namespace admm;

namespace {

GainRow uniform_row(int owner, std::vector<int> nbrs, double gamma = 0.5) {
    std::vector<double> beta(nbrs.size(), 1.0);
    return GainRow(owner, std::move(nbrs), beta, gamma);
}

}  // namespace

TEST_CASE("uniform raw weights normalize to equal shares") {
    GainRow row = uniform_row(1, {0, 1, 2});
    for (int j : {0, 1, 2})
        CHECK(row.d(j) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(row.sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("raw weights 2,1,1 normalize to a half and two quarters") {
    GainRow row(0, {0, 1, 2}, {2.0, 1.0, 1.0}, 0.5);
    CHECK(row.d(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(row.d(1) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(row.d(2) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("entries off the neighborhood read as zero") {
    GainRow row = uniform_row(0, {0, 2, 5});
    CHECK(row.d(1) == 0.0);
    CHECK(row.d(4) == 0.0);
    CHECK(row.d(7) == 0.0);
}

TEST_CASE("construction rejects nonpositive raw weights and bad gamma") {
    CHECK_THROWS_AS(GainRow(0, {0, 1}, {1.0, 0.0}, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(GainRow(0, {0, 1}, {1.0, -2.0}, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(GainRow(0, {0, 1}, {1.0, 1.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(GainRow(0, {0, 1}, {1.0, 1.0}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(GainRow(0, {}, {}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(GainRow(0, {0, 1}, {1.0}, 0.5), std::invalid_argument);
}

TEST_CASE("positive h moves gamma times the small entry to the large one") {
    GainRow row(0, {0, 1, 2}, {0.4, 0.4, 0.2}, 0.5);
    // d = (0.4, 0.4, 0.2)
    AdaptationDecision dec = row.adapt(0, 2, 1.0);
    CHECK(dec.epsilon == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(row.d(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(row.d(2) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(row.d(1) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(row.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("negative h moves gamma times the large entry back") {
    GainRow row(0, {0, 1, 2}, {0.4, 0.4, 0.2}, 0.5);
    AdaptationDecision dec = row.adapt(0, 2, -1.0);
    CHECK(dec.epsilon == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(row.d(0) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(row.d(2) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(row.sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero h or coincident extremes leave the row untouched") {
    GainRow row(0, {0, 1, 2}, {0.4, 0.4, 0.2}, 0.5);
    AdaptationDecision dec = row.adapt(0, 2, 0.0);
    CHECK(dec.epsilon == 0.0);
    CHECK(row.d(0) == doctest::Approx(0.4));
    CHECK(row.d(2) == doctest::Approx(0.2));

    dec = row.adapt(1, 1, 5.0);
    CHECK(dec.epsilon == 0.0);
    CHECK(row.d(1) == doctest::Approx(0.4));
}

TEST_CASE("adaptation rejects indices off the neighborhood") {
    GainRow row = uniform_row(0, {0, 1, 2});
    CHECK_THROWS_AS(row.adapt(3, 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(row.adapt(0, 9, -1.0), std::invalid_argument);
}

TEST_CASE("adaptation changes at most two entries and keeps the sum") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<int> nbrs = {0, 1, 3, 4, 6};
    GainRow row(1, nbrs, {1.0, 2.0, 0.5, 1.5, 3.0}, 0.3);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> before(nbrs.size());
        for (std::size_t p = 0; p < nbrs.size(); ++p) before[p] = row.d(nbrs[p]);
        const int l = nbrs[rng() % nbrs.size()];
        const int m = nbrs[rng() % nbrs.size()];
        row.adapt(l, m, u(rng));
        int changed = 0;
        for (std::size_t p = 0; p < nbrs.size(); ++p)
            if (row.d(nbrs[p]) != before[p]) ++changed;
        CHECK(changed <= 2);
        CHECK(std::abs(row.sum() - 1.0) <= 1e-12);
        for (int j : nbrs) CHECK(row.d(j) > 0.0);
    }
}

TEST_CASE("repeated losses shrink geometrically but never hit zero") {
    const double gamma = 0.25;
    GainRow row(0, {0, 1, 2}, {1.0, 1.0, 1.0}, gamma);
    const double d0 = row.d(2);
    for (int k = 1; k <= 60; ++k) {
        row.adapt(0, 2, 1.0);  // entry 2 keeps losing
        CHECK(row.d(2) == doctest::Approx(d0 * std::pow(1.0 - gamma, k))
                              .epsilon(1e-12));
        CHECK(row.d(2) > 0.0);
    }
}

TEST_CASE("extremal selection follows the largest and smallest products") {
    Eigen::VectorXd grad(1), x(1);
    grad << 1.0;
    x << 0.0;
    std::map<int, Eigen::VectorXd> z;
    z[1] = Eigen::VectorXd::Constant(1, -0.5);  // product 0.5
    z[2] = Eigen::VectorXd::Constant(1, 0.3);   // product -0.3
    z[3] = Eigen::VectorXd::Constant(1, -0.1);  // product 0.1
    auto [l, m] = select_extremal_neighbors(grad, x, z);
    CHECK(l == 1);
    CHECK(m == 2);
}

TEST_CASE("ties resolve to the smallest index") {
    Eigen::VectorXd grad = Eigen::VectorXd::Ones(2);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    std::map<int, Eigen::VectorXd> z;
    z[2] = Eigen::VectorXd::Zero(2);
    z[4] = Eigen::VectorXd::Zero(2);
    z[7] = Eigen::VectorXd::Zero(2);
    auto [l, m] = select_extremal_neighbors(grad, x, z);
    CHECK(l == 2);
    CHECK(m == 2);
}

TEST_CASE("zero gradient makes every product zero and the picks coincide") {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
    std::map<int, Eigen::VectorXd> z;
    z[3] = Eigen::VectorXd::Constant(2, 5.0);
    z[5] = Eigen::VectorXd::Constant(2, -1.0);
    auto [l, m] = select_extremal_neighbors(grad, x, z);
    CHECK(l == 3);
    CHECK(m == 3);
}

TEST_CASE("extremal selection rejects an empty estimate map") {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(1);
    std::map<int, Eigen::VectorXd> empty;
    CHECK_THROWS_AS(select_extremal_neighbors(v, v, empty),
                    std::invalid_argument);
}

TEST_CASE("extremal selection matches a brute-force scan") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const int count = 1 + static_cast<int>(rng() % 6);
        Eigen::VectorXd grad = Eigen::VectorXd::NullaryExpr(
            n, [&](Eigen::Index) { return u(rng); });
        Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(
            n, [&](Eigen::Index) { return u(rng); });
        std::map<int, Eigen::VectorXd> z;
        for (int c = 0; c < count; ++c)
            z[static_cast<int>(rng() % 10)] = Eigen::VectorXd::NullaryExpr(
                n, [&](Eigen::Index) { return u(rng); });
        double best_hi = -std::numeric_limits<double>::infinity();
        double best_lo = std::numeric_limits<double>::infinity();
        int want_l = -1, want_m = -1;
        for (const auto& [j, zj] : z) {
            const double p = grad.dot(x - zj);
            if (p > best_hi) best_hi = p, want_l = j;
            if (p < best_lo) best_lo = p, want_m = j;
        }
        auto [l, m] = select_extremal_neighbors(grad, x, z);
        CHECK(l == want_l);
        CHECK(m == want_m);
    }
}

TEST_CASE("h is twice alpha times the residue inner product") {
    Eigen::VectorXd xt(2), zl(2), zm(2);
    xt << 1, 0;
    zl << 0, 0;
    zm << 2, 5;
    // z_m - z_l = (2,5); h = 2 * 0.1 * (1,0).(2,5) = 0.4
    CHECK(compute_h(xt, zl, zm, 0.1) == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("h vanishes for equal residues or a zero x residue") {
    Eigen::VectorXd v(2);
    v << 3, -1;
    CHECK(compute_h(v, v, v, 0.1) == 0.0);
    CHECK(compute_h(Eigen::VectorXd::Zero(2), v, 2 * v, 0.3) == 0.0);
}

TEST_CASE("h rejects mismatched dimensions") {
    CHECK_THROWS_AS(compute_h(Eigen::VectorXd::Zero(2),
                              Eigen::VectorXd::Zero(3),
                              Eigen::VectorXd::Zero(2), 0.1),
                    std::invalid_argument);
}
