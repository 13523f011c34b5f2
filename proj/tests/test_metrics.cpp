#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tomo/metrics.hpp"
#include "tomo/rng.hpp"

using namespace tomo;

namespace {

ImageGrid random_image(int n, uint64_t seed) {
    ImageGrid img(n);
    rng::Stream rnd = rng::seed_stream(seed);
    for (double& v : img.values)
        v = rnd.next_unit();
    return img;
}

ImageGrid random_binary(int n, uint64_t seed, double p_one) {
    ImageGrid img(n);
    rng::Stream rnd = rng::seed_stream(seed);
    for (double& v : img.values)
        v = rnd.next_unit() < p_one ? 1.0 : 0.0;
    return img;
}

ReconSet make_set(std::vector<ImageGrid> images) {
    ReconSet s;
    int label = 0;
    for (auto& img : images)
        s.members.emplace_back("m" + std::to_string(label++), std::move(img));
    return s;
}

} // namespace

TEST_CASE("pixelwise_std") {
    SUBCASE("identical members give a zero map") {
        const ImageGrid img = random_image(8, 1);
        const ImageGrid sigma = pixelwise_std(make_set({img, img, img}));
        for (double v : sigma.values)
            CHECK(v <= 1e-15); // (a+a+a)/3 rounds, so allow fp dust
    }
    SUBCASE("two members 0 and 2 give sigma = 1") {
        ImageGrid a(4), b(4);
        b.at(2, 3) = 2.0;
        const ImageGrid sigma = pixelwise_std(make_set({a, b}));
        CHECK(sigma.at(2, 3) == doctest::Approx(1.0)); // population divisor
        CHECK(sigma.at(0, 0) == 0.0);
    }
    SUBCASE("matches a naive two-pass loop on five random images") {
        std::vector<ImageGrid> imgs;
        for (uint64_t s = 0; s < 5; ++s)
            imgs.push_back(random_image(16, 10 + s));
        const ReconSet set = make_set(imgs);
        const ImageGrid sigma = pixelwise_std(set);
        for (int i = 0; i < 16; ++i) {
            for (int j = 0; j < 16; ++j) {
                double mean = 0.0;
                for (const auto& img : imgs)
                    mean += img.at(i, j);
                mean /= 5.0;
                double var = 0.0;
                for (const auto& img : imgs)
                    var += (img.at(i, j) - mean) * (img.at(i, j) - mean);
                var /= 5.0;
                CHECK(std::fabs(sigma.at(i, j) - std::sqrt(var)) <= 1e-12);
            }
        }
    }
    SUBCASE("needs at least two members") {
        CHECK_THROWS_AS(pixelwise_std(make_set({ImageGrid(4)})), std::invalid_argument);
    }
    SUBCASE("invariant under permutation and common offsets") {
        const ImageGrid a = random_image(8, 3), b = random_image(8, 4),
                        c = random_image(8, 5);
        const ImageGrid s1 = pixelwise_std(make_set({a, b, c}));
        const ImageGrid s2 = pixelwise_std(make_set({c, a, b}));
        for (size_t i = 0; i < s1.values.size(); ++i)
            CHECK(std::fabs(s1.values[i] - s2.values[i]) <= 1e-15);
        ImageGrid a2 = a, b2 = b, c2 = c;
        for (auto* img : {&a2, &b2, &c2})
            for (double& v : img->values)
                v += 5.0;
        const ImageGrid s3 = pixelwise_std(make_set({a2, b2, c2}));
        for (size_t i = 0; i < s1.values.size(); ++i)
            CHECK(std::fabs(s1.values[i] - s3.values[i]) <= 1e-12);
    }
}

TEST_CASE("mean_std") {
    CHECK(mean_std(ImageGrid(7)) == 0.0);
    ImageGrid c(5);
    for (double& v : c.values)
        v = 3.25;
    CHECK(mean_std(c) == doctest::Approx(3.25));
    const ImageGrid r = random_image(9, 2);
    double sum = 0.0;
    for (double v : r.values)
        sum += v;
    CHECK(mean_std(r) == doctest::Approx(sum / 81.0).epsilon(1e-14));
}

TEST_CASE("rmse") {
    const ImageGrid gt = random_image(12, 6);
    CHECK(rmse(gt, gt) == 0.0);
    ImageGrid shifted = gt;
    for (double& v : shifted.values)
        v += 1.0;
    CHECK(rmse(shifted, gt) == doctest::Approx(1.0).epsilon(1e-14));
    const ImageGrid other = random_image(12, 7);
    double acc = 0.0;
    for (size_t i = 0; i < gt.values.size(); ++i)
        acc += (other.values[i] - gt.values[i]) * (other.values[i] - gt.values[i]);
    CHECK(rmse(other, gt) == doctest::Approx(std::sqrt(acc / 144.0)).epsilon(1e-14));
    CHECK_THROWS_AS(rmse(ImageGrid(3), ImageGrid(4)), std::invalid_argument);
}

TEST_CASE("squared_bias") {
    const ImageGrid gt = random_image(10, 8);
    SUBCASE("members equal to gt give zero") {
        auto [map, mean] = squared_bias(make_set({gt, gt}), gt);
        CHECK(mean == 0.0);
        for (double v : map.values)
            CHECK(v == 0.0);
    }
    SUBCASE("symmetric perturbations cancel") {
        ImageGrid up = gt, down = gt;
        for (size_t i = 0; i < gt.values.size(); ++i) {
            up.values[i] += 1.0;
            down.values[i] -= 1.0;
        }
        auto [map, mean] = squared_bias(make_set({up, down}), gt);
        CHECK(mean <= 1e-28);
    }
    SUBCASE("matches the direct oracle") {
        const ImageGrid a = random_image(10, 9), b = random_image(10, 10);
        auto [map, mean] = squared_bias(make_set({a, b}), gt);
        double acc = 0.0;
        for (size_t i = 0; i < gt.values.size(); ++i) {
            const double m = 0.5 * (a.values[i] + b.values[i]) - gt.values[i];
            CHECK(std::fabs(map.values[i] - m * m) <= 1e-14);
            acc += m * m;
        }
        CHECK(mean == doctest::Approx(acc / 100.0).epsilon(1e-12));
    }
    SUBCASE("rmse^2 equals mean squared bias for singleton sets") {
        const ImageGrid r = random_image(10, 11);
        auto [map, mean] = squared_bias(make_set({r}), gt);
        const double e = rmse(r, gt);
        CHECK(std::fabs(e * e - mean) <= 1e-12);
    }
}

TEST_CASE("otsu threshold") {
    SUBCASE("perfectly bimodal image") {
        ImageGrid img(8);
        for (size_t i = 0; i < img.values.size(); ++i)
            img.values[i] = i % 2 == 0 ? 0.0 : 1.0;
        const double t = otsu_threshold(img);
        CHECK(t > 0.0);
        CHECK(t < 1.0);
        const ImageGrid seg = binarize(img, t);
        CHECK(seg.values == img.values);
    }
    SUBCASE("constant image is degenerate") {
        ImageGrid img(4);
        CHECK_THROWS_AS(otsu_threshold(img), numerical_error);
    }
    SUBCASE("affine intensity maps move the threshold consistently") {
        const ImageGrid img = random_binary(16, 3, 0.3);
        ImageGrid noisy = img;
        rng::Stream rnd = rng::seed_stream(4);
        for (double& v : noisy.values)
            v += 0.1 * rnd.next_unit();
        const double t = otsu_threshold(noisy);
        const double a = 2.5, b = -1.0;
        ImageGrid mapped = noisy;
        for (double& v : mapped.values)
            v = a * v + b;
        const double t2 = otsu_threshold(mapped);
        const double bin_width = a * 1.1 / 256.0; // one bin of the mapped range
        CHECK(std::fabs(t2 - (a * t + b)) <= bin_width + 1e-12);
    }
}

TEST_CASE("f1 and jaccard") {
    SUBCASE("identical nonempty segmentations score 1") {
        const ImageGrid seg = random_binary(8, 5, 0.4);
        auto [f1, jac] = f1_jaccard(seg, seg);
        CHECK(f1 == 1.0);
        CHECK(jac == 1.0);
    }
    SUBCASE("disjoint nonempty sets score 0") {
        ImageGrid a(4), b(4);
        a.at(0, 0) = 1.0;
        b.at(3, 3) = 1.0;
        auto [f1, jac] = f1_jaccard(a, b);
        CHECK(f1 == 0.0);
        CHECK(jac == 0.0);
    }
    SUBCASE("both empty scores 1 by convention") {
        auto [f1, jac] = f1_jaccard(ImageGrid(4), ImageGrid(4));
        CHECK(f1 == 1.0);
        CHECK(jac == 1.0);
    }
    SUBCASE("F1 = 2J/(1+J) identity on random pairs") {
        for (uint64_t s = 0; s < 20; ++s) {
            const ImageGrid a = random_binary(12, 100 + s, 0.35);
            const ImageGrid b = random_binary(12, 200 + s, 0.5);
            auto [f1, jac] = f1_jaccard(a, b);
            CHECK(std::fabs(f1 - 2.0 * jac / (1.0 + jac)) <= 1e-12);
        }
    }
    SUBCASE("non-binary input is rejected") {
        ImageGrid bad(2);
        bad.at(0, 0) = 0.5;
        CHECK_THROWS_AS(f1_jaccard(bad, ImageGrid(2)), std::invalid_argument);
    }
}

TEST_CASE("std_histogram") {
    SUBCASE("zero map lands in bin 0") {
        const Histogram h = std_histogram(ImageGrid(8), 10);
        CHECK(h.counts[0] == 64);
        for (size_t b = 1; b < h.counts.size(); ++b)
            CHECK(h.counts[b] == 0);
    }
    SUBCASE("counts always sum to the pixel count") {
        const ImageGrid img = random_image(16, 12);
        const Histogram h = std_histogram(img, 7);
        long total = 0;
        for (long c : h.counts)
            total += c;
        CHECK(total == 256);
    }
    SUBCASE("matches direct counting") {
        ImageGrid img(4);
        const double vals[16] = {0.0, 0.1, 0.2, 0.3, 0.35, 0.5, 0.55, 0.7,
                                 0.75, 0.8, 0.85, 0.9, 0.95, 1.0, 1.0, 0.25};
        for (int i = 0; i < 16; ++i)
            img.values[static_cast<size_t>(i)] = vals[i];
        const Histogram h = std_histogram(img, 4);
        // bins over [0,1]: [0,.25) [.25,.5) [.5,.75) [.75,1]
        CHECK(h.counts[0] == 3);
        CHECK(h.counts[1] == 3);
        CHECK(h.counts[2] == 3);
        CHECK(h.counts[3] == 7);
    }
}

TEST_CASE("replacing a member by the set mean cannot increase mean_std") {
    std::vector<ImageGrid> imgs;
    for (uint64_t s = 0; s < 4; ++s)
        imgs.push_back(random_image(12, 40 + s));
    const ReconSet set = make_set(imgs);
    const double before = mean_std(pixelwise_std(set));

    ImageGrid mean_img(12);
    for (size_t i = 0; i < mean_img.values.size(); ++i) {
        double m = 0.0;
        for (const auto& img : imgs)
            m += img.values[i];
        mean_img.values[i] = m / 4.0;
    }
    std::vector<ImageGrid> replaced = imgs;
    replaced[0] = mean_img;
    const double after = mean_std(pixelwise_std(make_set(replaced)));
    CHECK(after <= before + 1e-12);
}
