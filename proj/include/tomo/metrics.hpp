#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tomo/core.hpp"

namespace tomo {

/// A labelled set of reconstructions of the same data, all the same size.
struct ReconSet {
    std::vector<std::pair<std::string, ImageGrid>> members;

    int size() const { return static_cast<int>(members.size()); }
    const ImageGrid& image(int i) const { return members[static_cast<size_t>(i)].second; }
    void check_uniform(int min_members) const;
};

struct Histogram {
    std::vector<double> bin_edges; // n_bins + 1, uniform
    std::vector<long> counts;

    int mode_bin() const;
};

// Population standard deviation per pixel (divisor = member count).
ImageGrid pixelwise_std(const ReconSet& s);

double mean_std(const ImageGrid& sigma_map);

double rmse(const ImageGrid& r, const ImageGrid& gt);

// Pixel map (mean(set) - gt)^2 and its mean over the slice.
std::pair<ImageGrid, double> squared_bias(const ReconSet& s, const ImageGrid& gt);

// Center of the 256-bin histogram bin (over [min,max]) that maximizes the
// inter-class intensity variance; ties break toward the lower bin. Throws on
// constant images.
double otsu_threshold(const ImageGrid& r);

// (F1, Jaccard) of two strictly {0,1}-valued images; both empty -> (1,1).
std::pair<double, double> f1_jaccard(const ImageGrid& seg, const ImageGrid& gt);

// Uniform bins over [0, max(map)], half-open except the last (closed).
Histogram std_histogram(const ImageGrid& sigma_map, int n_bins);

// seg = (r > threshold), as a {0,1} image
ImageGrid binarize(const ImageGrid& r, double threshold);

} // namespace tomo
