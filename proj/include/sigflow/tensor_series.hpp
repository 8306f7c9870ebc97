#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sigflow {

// Multi-index over the alphabet {0, ..., alphabet-1}; empty word = level 0.
using Word = std::vector<int>;

std::size_t level_size(int alphabet, int level);    // alphabet^level
std::size_t level_offset(int alphabet, int level);  // sum of smaller level sizes
std::size_t series_size(int alphabet, int order);

// Level-major flat index: level offset plus the base-`alphabet` value of the
// letters. Bijective per order; throws on letters outside the alphabet.
std::size_t word_index(int alphabet, const Word& w);
Word word_from_index(int alphabet, std::size_t index);

std::string word_string(const Word& w);
Word parse_word(const std::string& s);

// Element of the tensor algebra truncated at `order`, over an alphabet of
// d+1 letters. Dense storage, one contiguous array, levels in order.
class TruncatedTensorSeries {
public:
    TruncatedTensorSeries(int alphabet, int order);

    // Algebra unit (1, 0, ..., 0) -- the signature of a constant path.
    static TruncatedTensorSeries unit(int alphabet, int order);

    int alphabet() const { return alphabet_; }
    int order() const { return order_; }
    std::size_t size() const { return coeffs_.size(); }

    double coeff(const Word& w) const { return coeffs_[word_index(alphabet_, w)]; }
    double& coeff(const Word& w) { return coeffs_[word_index(alphabet_, w)]; }

    std::span<const double> level(int k) const;
    std::span<double> level(int k);

    const std::vector<double>& data() const { return coeffs_; }
    std::vector<double>& data() { return coeffs_; }

    bool operator==(const TruncatedTensorSeries&) const = default;

private:
    int alphabet_;
    int order_;
    std::vector<double> coeffs_;
};

// Signature of one linear segment with increment `delta`: the word i_1...i_k
// gets (1/k!) * prod_l delta[i_l], i.e. the tensor exponential of delta.
TruncatedTensorSeries segment_signature(const Eigen::VectorXd& delta, int order);

// Tensor-algebra product truncated at the common order: level n of the result
// collects a_k (x) b_{n-k} over all splits. Concatenation of paths maps to
// this product on signatures.
TruncatedTensorSeries chen_product(const TruncatedTensorSeries& a, const TruncatedTensorSeries& b);

// Level k scaled by lambda^k; matches the signature of the dilated path.
TruncatedTensorSeries dilate_signature(const TruncatedTensorSeries& s, double lambda);

// All interleavings of a and b keeping each word's internal order, with
// multiplicity; binomial(|a|+|b|, |a|) words in total.
std::vector<Word> shuffle_product(const Word& a, const Word& b);

}  // namespace sigflow
