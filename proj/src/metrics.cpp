#include "tomo/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace tomo {

void ReconSet::check_uniform(int min_members) const {
    if (size() < min_members)
        throw std::invalid_argument("reconstruction set needs at least " +
                                    std::to_string(min_members) + " members");
    for (const auto& [label, img] : members)
        if (img.n != members.front().second.n)
            throw std::invalid_argument("reconstruction set members differ in size");
}

int Histogram::mode_bin() const {
    int best = 0;
    for (int b = 1; b < static_cast<int>(counts.size()); ++b)
        if (counts[static_cast<size_t>(b)] > counts[static_cast<size_t>(best)])
            best = b;
    return best;
}

ImageGrid pixelwise_std(const ReconSet& s) {
    s.check_uniform(2);
    const int n = s.image(0).n;
    const double inv = 1.0 / s.size();
    ImageGrid out(n);
    const size_t total = out.values.size();
#pragma omp parallel for schedule(static)
    for (long p = 0; p < static_cast<long>(total); ++p) {
        double mean = 0.0;
        for (int m = 0; m < s.size(); ++m)
            mean += s.image(m).values[static_cast<size_t>(p)];
        mean *= inv;
        double var = 0.0;
        for (int m = 0; m < s.size(); ++m) {
            const double d = s.image(m).values[static_cast<size_t>(p)] - mean;
            var += d * d;
        }
        out.values[static_cast<size_t>(p)] = std::sqrt(var * inv);
    }
    return out;
}

double mean_std(const ImageGrid& sigma_map) {
    double acc = 0.0;
    for (double v : sigma_map.values)
        acc += v;
    return acc / static_cast<double>(sigma_map.values.size());
}

double rmse(const ImageGrid& r, const ImageGrid& gt) {
    if (r.n != gt.n)
        throw std::invalid_argument("rmse: size mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < r.values.size(); ++i) {
        const double d = r.values[i] - gt.values[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(r.values.size()));
}

std::pair<ImageGrid, double> squared_bias(const ReconSet& s, const ImageGrid& gt) {
    s.check_uniform(1);
    if (s.image(0).n != gt.n)
        throw std::invalid_argument("squared_bias: size mismatch");
    ImageGrid map(gt.n);
    const double inv = 1.0 / s.size();
    double total = 0.0;
    for (size_t p = 0; p < map.values.size(); ++p) {
        double mean = 0.0;
        for (int m = 0; m < s.size(); ++m)
            mean += s.image(m).values[p];
        mean *= inv;
        const double d = mean - gt.values[p];
        map.values[p] = d * d;
        total += d * d;
    }
    return {std::move(map), total / static_cast<double>(gt.values.size())};
}

double otsu_threshold(const ImageGrid& r) {
    const auto [lo_it, hi_it] = std::minmax_element(r.values.begin(), r.values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo))
        throw numerical_error("otsu_threshold: constant image");
    constexpr int kBins = 256;
    const double width = (hi - lo) / kBins;
    std::vector<long> counts(kBins, 0);
    for (double v : r.values) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, kBins - 1);
        ++counts[static_cast<size_t>(b)];
    }
    const double total = static_cast<double>(r.values.size());
    // cumulative moments over bin centers
    double sum_all = 0.0;
    for (int b = 0; b < kBins; ++b)
        sum_all += counts[static_cast<size_t>(b)] * (b + 0.5);
    double w0 = 0.0, sum0 = 0.0;
    double best_var = -1.0;
    int best_bin = 0;
    for (int b = 0; b < kBins - 1; ++b) {
        w0 += counts[static_cast<size_t>(b)];
        sum0 += counts[static_cast<size_t>(b)] * (b + 0.5);
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0)
            continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_bin = b;
        }
    }
    return lo + (best_bin + 0.5) * width;
}

std::pair<double, double> f1_jaccard(const ImageGrid& seg, const ImageGrid& gt) {
    if (seg.n != gt.n)
        throw std::invalid_argument("f1_jaccard: size mismatch");
    long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < seg.values.size(); ++i) {
        const double a = seg.values[i], b = gt.values[i];
        if ((a != 0.0 && a != 1.0) || (b != 0.0 && b != 1.0))
            throw std::invalid_argument("f1_jaccard: inputs must be {0,1}-valued");
        if (a == 1.0 && b == 1.0) ++tp;
        else if (a == 1.0) ++fp;
        else if (b == 1.0) ++fn;
    }
    if (tp + fp + fn == 0)
        return {1.0, 1.0}; // both empty: maximally similar
    const double f1 = tp / (tp + 0.5 * (fp + fn));
    const double jac = static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
    return {f1, jac};
}

Histogram std_histogram(const ImageGrid& sigma_map, int n_bins) {
    if (n_bins < 1)
        throw std::invalid_argument("std_histogram: n_bins must be >= 1");
    const double max_v = *std::max_element(sigma_map.values.begin(), sigma_map.values.end());
    const double span = max_v > 0.0 ? max_v : 1.0;
    Histogram h;
    h.bin_edges.resize(static_cast<size_t>(n_bins) + 1);
    for (int b = 0; b <= n_bins; ++b)
        h.bin_edges[static_cast<size_t>(b)] = span * b / n_bins;
    h.counts.assign(static_cast<size_t>(n_bins), 0);
    for (double v : sigma_map.values) {
        int b = static_cast<int>(v / span * n_bins);
        b = std::clamp(b, 0, n_bins - 1); // last bin closed
        ++h.counts[static_cast<size_t>(b)];
    }
    return h;
}

ImageGrid binarize(const ImageGrid& r, double threshold) {
    ImageGrid out(r.n);
    for (size_t i = 0; i < r.values.size(); ++i)
        out.values[i] = r.values[i] > threshold ? 1.0 : 0.0;
    return out;
}

} // namespace tomo
