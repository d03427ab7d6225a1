#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "g2l/errors.hpp"
#include "g2l/features.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace g2l;

namespace {

FeatureVector fv(std::string id, std::vector<double> v) { return {std::move(id), std::move(v)}; }

Dataset make_dataset(std::string name, std::vector<std::vector<double>> rows) {
    Dataset ds;
    ds.name = std::move(name);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ds.vectors.push_back(fv(ds.name + "_" + std::to_string(i), std::move(rows[i])));
    }
    return ds;
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace

TEST_CASE("metric closed forms") {
    CHECK(distance(fv("a", {0, 0}), fv("b", {3, 4}), Metric::euclidean) == doctest::Approx(5.0));
    CHECK(distance(fv("a", {0, 0}), fv("b", {3, 4}), Metric::cityblock) == doctest::Approx(7.0));
    CHECK(distance(fv("a", {1, 0}), fv("b", {0, 1}), Metric::sqrt_js) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("metric errors") {
    CHECK_THROWS_AS(distance(fv("a", {1}), fv("b", {1, 2}), Metric::euclidean), validation_error);
    CHECK_THROWS_AS(distance(fv("a", {-1, 2}), fv("b", {1, 0}), Metric::sqrt_js), validation_error);
    CHECK_THROWS_AS(distance(fv("a", {0, 0}), fv("b", {1, 0}), Metric::sqrt_js), validation_error);
    CHECK_THROWS_AS(parse_metric("chebyshev"), validation_error);
}

TEST_CASE("metric parse/name round trip") {
    for (Metric m : {Metric::euclidean, Metric::cityblock, Metric::sqrt_js}) {
        CHECK(parse_metric(metric_name(m)) == m);
    }
}

TEST_CASE("metric axioms on random inputs") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(6), b(6), c(6);
        for (std::size_t i = 0; i < 6; ++i) {
            a[i] = unit(rng);
            b[i] = unit(rng);
            c[i] = unit(rng);
        }
        for (Metric m : {Metric::euclidean, Metric::cityblock, Metric::sqrt_js}) {
            const double ab = distance(fv("a", a), fv("b", b), m);
            const double ba = distance(fv("b", b), fv("a", a), m);
            CHECK(ab == ba);
            CHECK(ab >= 0.0);
            CHECK(distance(fv("a", a), fv("a", a), m) == 0.0);
        }
        // Triangle inequality for the two norms.
        for (Metric m : {Metric::euclidean, Metric::cityblock}) {
            const double ab = distance(fv("a", a), fv("b", b), m);
            const double bc = distance(fv("b", b), fv("c", c), m);
            const double ac = distance(fv("a", a), fv("c", c), m);
            CHECK(ac <= ab + bc + 1e-9);
        }
        CHECK(distance(fv("a", a), fv("b", b), Metric::sqrt_js) <= 1.0);
    }
}

TEST_CASE("probability vector validation") {
    CHECK_NOTHROW(ProbabilityVector({0.25, 0.75}));
    CHECK_THROWS_AS(ProbabilityVector({0.5, 0.6}), validation_error);
    CHECK_THROWS_AS(ProbabilityVector({1.5, -0.5}), validation_error);
    CHECK_THROWS_AS(ProbabilityVector::normalize({0.0, 0.0}), validation_error);
    CHECK_THROWS_AS(ProbabilityVector::normalize({-1.0, 2.0}), validation_error);
    const auto p = ProbabilityVector::normalize({2.0, 6.0});
    CHECK(p.components()[0] == doctest::Approx(0.25));
}

TEST_CASE("kl divergence") {
    const ProbabilityVector p({1.0, 0.0});
    const ProbabilityVector q({0.5, 0.5});
    SUBCASE("identity") {
        CHECK(kl_divergence(q, q, 1e-10) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("one bit for a revealed fair coin") {
        CHECK(kl_divergence(p, q, 1e-10) == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("asymmetry") {
        const ProbabilityVector r({0.9, 0.1});
        CHECK(kl_divergence(r, q, 1e-10) != kl_divergence(q, r, 1e-10));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(kl_divergence(p, ProbabilityVector({1.0}), 1e-10), validation_error);
        CHECK_THROWS_AS(kl_divergence(p, q, 0.0), validation_error);
        CHECK_THROWS_AS(kl_divergence(p, q, -1.0), validation_error);
    }
    SUBCASE("nonnegative on random smoothed pairs") {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> a(5), b(5);
            for (std::size_t i = 0; i < 5; ++i) {
                a[i] = unit(rng) + 1e-6;
                b[i] = unit(rng) + 1e-6;
            }
            const auto pa = ProbabilityVector::normalize(a);
            const auto pb = ProbabilityVector::normalize(b);
            CHECK(kl_divergence(pa, pb, 1e-10) >= -1e-12);
        }
    }
}

TEST_CASE("aggregate_mean") {
    SUBCASE("full mean") {
        const auto rep = aggregate_mean(make_dataset("pair", {{0, 0}, {2, 2}}), 1.0, 0);
        CHECK(rep.vector.components == std::vector<double>{1.0, 1.0});
        CHECK(rep.qualified_name == "pair");
        CHECK(rep.rep_index == 0);
    }
    SUBCASE("single vector is its own mean under any fraction") {
        const auto rep = aggregate_mean(make_dataset("one", {{5}}), 0.37, 123);
        CHECK(rep.vector.components == std::vector<double>{5.0});
    }
    SUBCASE("quarter sample stays near the full mean") {
        std::mt19937_64 rng(2024);
        auto gauss = [&rng] {
            double u1;
            do { u1 = static_cast<double>(rng() >> 11) * 0x1.0p-53; } while (u1 <= 0.0);
            const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        };
        std::vector<std::vector<double>> rows(1000, std::vector<double>(8));
        for (auto& row : rows) {
            for (double& v : row) v = gauss();
        }
        const auto ds = make_dataset("normals", std::move(rows));
        const auto full = aggregate_mean(ds, 1.0, 0).vector.components; // oracle
        const auto sampled = aggregate_mean(ds, 0.25, 7).vector.components;
        for (std::size_t c = 0; c < 8; ++c) {
            CHECK(std::fabs(sampled[c] - full[c]) < 0.15);
        }
    }
    SUBCASE("deterministic for a fixed seed") {
        const auto ds = make_dataset("d", {{1, 2}, {3, 4}, {5, 6}, {7, 8}});
        const auto a = aggregate_mean(ds, 0.5, 42).vector.components;
        const auto b = aggregate_mean(ds, 0.5, 42).vector.components;
        CHECK(a == b);
    }
    SUBCASE("full mean is row-order invariant") {
        std::mt19937_64 rng(5);
        std::vector<std::vector<double>> rows(64, std::vector<double>(4));
        for (auto& row : rows) {
            for (double& v : row) v = 100.0 * unit(rng) - 50.0;
        }
        auto ds = make_dataset("perm", rows);
        const auto base = aggregate_mean(ds, 1.0, 0).vector.components;
        std::shuffle(ds.vectors.begin(), ds.vectors.end(), rng);
        const auto shuffled = aggregate_mean(ds, 1.0, 0).vector.components;
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(shuffled[c] == doctest::Approx(base[c]).epsilon(1e-12));
        }
    }
    SUBCASE("errors") {
        Dataset empty;
        empty.name = "empty";
        CHECK_THROWS_AS(aggregate_mean(empty, 1.0, 0), validation_error);
        CHECK_THROWS_AS(aggregate_mean(make_dataset("x", {{1}}), 0.0, 0), validation_error);
        CHECK_THROWS_AS(aggregate_mean(make_dataset("x", {{1}}), 1.5, 0), validation_error);
    }
}

TEST_CASE("aggregate_kmeans") {
    std::mt19937_64 rng(77);
    auto blob = [&](double cx, double cy, std::size_t count) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < count; ++i) {
            rows.push_back({cx + 0.5 * (unit(rng) - 0.5), cy + 0.5 * (unit(rng) - 0.5)});
        }
        return rows;
    };

    SUBCASE("two separated blobs") {
        auto rows = blob(0, 0, 60);
        auto far_rows = blob(10, 10, 40);
        rows.insert(rows.end(), far_rows.begin(), far_rows.end());
        const auto ds = make_dataset("src", rows);
        const auto reps = aggregate_kmeans(ds, 2, 11);
        REQUIRE(reps.size() == 2);
        // Ordered by descending cluster size: 60-point blob first.
        CHECK(reps[0].qualified_name == "src_0");
        CHECK(reps[1].qualified_name == "src_1");
        // Oracle: the per-blob empirical means.
        std::vector<double> near_mean{0, 0}, far_mean{0, 0};
        for (std::size_t i = 0; i < 60; ++i) {
            near_mean[0] += rows[i][0] / 60;
            near_mean[1] += rows[i][1] / 60;
        }
        for (std::size_t i = 60; i < 100; ++i) {
            far_mean[0] += rows[i][0] / 40;
            far_mean[1] += rows[i][1] / 40;
        }
        CHECK(reps[0].vector.components[0] == doctest::Approx(near_mean[0]).epsilon(1e-9));
        CHECK(reps[0].vector.components[1] == doctest::Approx(near_mean[1]).epsilon(1e-9));
        CHECK(reps[1].vector.components[0] == doctest::Approx(far_mean[0]).epsilon(1e-9));
        CHECK(reps[1].vector.components[1] == doctest::Approx(far_mean[1]).epsilon(1e-9));
        // And each centroid lands within 0.2 of its blob's true center.
        CHECK(std::hypot(reps[0].vector.components[0], reps[0].vector.components[1]) < 0.2);
        CHECK(std::hypot(reps[1].vector.components[0] - 10, reps[1].vector.components[1] - 10) < 0.2);
    }
    SUBCASE("k = 1 reduces to the full mean and keeps the bare name") {
        const auto ds = make_dataset("solo", {{0, 0}, {2, 2}, {4, 4}});
        const auto reps = aggregate_kmeans(ds, 1, 3);
        REQUIRE(reps.size() == 1);
        CHECK(reps[0].qualified_name == "solo");
        CHECK(reps[0].vector.components[0] == doctest::Approx(2.0));
        CHECK(reps[0].vector.components[1] == doctest::Approx(2.0));
    }
    SUBCASE("k = count makes every vector a centroid") {
        const auto ds = make_dataset("all", {{0, 0}, {5, 0}, {0, 5}});
        const auto reps = aggregate_kmeans(ds, 3, 9);
        REQUIRE(reps.size() == 3);
        std::vector<std::vector<double>> centroids;
        for (const auto& rep : reps) centroids.push_back(rep.vector.components);
        std::sort(centroids.begin(), centroids.end());
        CHECK(centroids == std::vector<std::vector<double>>{{0, 0}, {0, 5}, {5, 0}});
    }
    SUBCASE("errors") {
        const auto ds = make_dataset("e", {{1}, {2}});
        CHECK_THROWS_AS(aggregate_kmeans(ds, 0, 0), validation_error);
        CHECK_THROWS_AS(aggregate_kmeans(ds, 3, 0), validation_error);
    }
    SUBCASE("deterministic for a fixed seed") {
        auto rows = blob(0, 0, 30);
        auto far_rows = blob(6, 6, 30);
        rows.insert(rows.end(), far_rows.begin(), far_rows.end());
        const auto ds = make_dataset("det", rows);
        const auto a = aggregate_kmeans(ds, 4, 5);
        const auto b = aggregate_kmeans(ds, 4, 5);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].vector.components == b[i].vector.components);
            CHECK(a[i].qualified_name == b[i].qualified_name);
        }
    }
}

TEST_CASE("dataset_divergence") {
    const auto x = make_dataset("x", {{1, 0, 0}, {0.8, 0.2, 0}});
    SUBCASE("self divergence is zero") {
        CHECK(dataset_divergence(x, x, 1.0, 0, 1e-10) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("disjoint dominant components diverge strongly") {
        const auto y = make_dataset("y", {{0, 0, 1}, {0, 0.1, 0.9}});
        CHECK(dataset_divergence(x, y, 1.0, 0, 1e-10) > 0.5);
    }
    SUBCASE("negative components are clamped with a warning") {
        const auto neg = make_dataset("neg", {{1.0, -0.5, 0.5}});
        std::vector<std::string> warnings;
        const double v = dataset_divergence(neg, x, 1.0, 0, 1e-10, &warnings);
        CHECK(v >= 0.0);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("neg") != std::string::npos);
    }
    SUBCASE("all-zero mean after clamping") {
        const auto zero = make_dataset("zero", {{-1.0, -2.0}});
        const auto other = make_dataset("o", {{1.0, 1.0}});
        CHECK_THROWS_AS(dataset_divergence(zero, other, 1.0, 0, 1e-10), validation_error);
    }
}

TEST_CASE("entropy_bits") {
    CHECK(entropy_bits({10}) == doctest::Approx(0.0));
    CHECK(entropy_bits({3, 3, 3, 3}) == doctest::Approx(2.0));
    CHECK(entropy_bits({2, 1, 1}) == doctest::Approx(1.5));
    CHECK_THROWS_AS(entropy_bits({}), validation_error);
    // Bounded by log2 of the support size, equality iff uniform.
    CHECK(entropy_bits({5, 4, 1}) < std::log2(3.0));
    CHECK(entropy_bits({4, 4, 4}) == doctest::Approx(std::log2(3.0)));
}

TEST_CASE("dataset validation") {
    auto ragged = make_dataset("r", {{1, 2}, {1, 2, 3}});
    CHECK_THROWS_AS(ragged.validate(), validation_error);
    auto ok = make_dataset("ok", {{1, 2}, {3, 4}});
    CHECK_NOTHROW(ok.validate());
}

TEST_CASE("anchor set validation") {
    AnchorSet anchors;
    anchors.metric = Metric::euclidean;
    anchors.representatives.push_back({"a", 0, "a", fv("a", {1, 2})});
    CHECK_THROWS_AS(anchors.validate(), validation_error); // needs >= 2
    anchors.representatives.push_back({"a", 0, "a2", fv("a2", {2, 3})});
    CHECK_THROWS_AS(anchors.validate(), validation_error); // duplicate (source, rep)
    anchors.representatives[1].rep_index = 1;
    CHECK_NOTHROW(anchors.validate());
    anchors.representatives.push_back({"b", 0, "b", fv("b", {1})});
    CHECK_THROWS_AS(anchors.validate(), validation_error); // ragged dimensionality
}
