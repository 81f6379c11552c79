#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "segmentation.hpp"

namespace procfeed {

/// Relative frequencies of the distinct character n-grams of one passage.
/// Grams are kept sorted so two profiles can be merged in a fixed order.
class NGramProfile {
public:
    NGramProfile() = default;

    static NGramProfile from_text(std::string_view text, int n) {
        if (text.empty()) throw Error(ErrorCode::EmptyPassage, "cannot profile an empty passage");
        std::map<std::string, std::size_t> counts;
        std::size_t total = 0;
        for (auto& g : char_ngrams(text, n)) {
            ++counts[std::move(g)];
            ++total;
        }
        NGramProfile p;
        p.gram_count_ = total;
        p.weights_.reserve(counts.size());
        for (auto& [gram, count] : counts) {
            const double x = static_cast<double>(count) / static_cast<double>(total);
            p.weights_.emplace_back(gram, x);
            p.sum_squares_ += x * x;
        }
        return p;
    }

    const std::vector<std::pair<std::string, double>>& weights() const { return weights_; }
    std::size_t distinct_grams() const { return weights_.size(); }
    std::size_t gram_count() const { return gram_count_; }
    double sum_squares() const { return sum_squares_; }

    double weight(std::string_view gram) const {
        auto it = std::lower_bound(weights_.begin(), weights_.end(), gram,
                                   [](const auto& e, std::string_view g) { return e.first < g; });
        return it != weights_.end() && it->first == gram ? it->second : 0.0;
    }

private:
    std::vector<std::pair<std::string, double>> weights_;
    std::size_t gram_count_ = 0;
    double sum_squares_ = 0.0;
};

inline NGramProfile build_profile(const Passage& p, int n) { return NGramProfile::from_text(p.text, n); }

/// Normalized dot product of two n-gram profiles, in [0, 1].
inline double similarity(const NGramProfile& p, const NGramProfile& q) {
    const auto& a = p.weights();
    const auto& b = q.weights();
    // Shared grams are visited in sorted order from either side, so the sum
    // is bitwise identical for (p, q) and (q, p).
    double dot = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        const int c = a[i].first.compare(b[j].first);
        if (c < 0) {
            ++i;
        } else if (c > 0) {
            ++j;
        } else {
            dot += a[i].second * b[j].second;
            ++i;
            ++j;
        }
    }
    const double norm = std::sqrt(p.sum_squares() * q.sum_squares());
    if (norm == 0.0) return 0.0;
    return dot / norm;
}

inline double similarity(std::string_view p, std::string_view q, int n) {
    return similarity(NGramProfile::from_text(p, n), NGramProfile::from_text(q, n));
}

} // namespace procfeed
