#include "sigflow/tensor_series.hpp"

#include <stdexcept>

namespace sigflow {

std::size_t level_size(int alphabet, int level) {
    std::size_t n = 1;
    for (int k = 0; k < level; ++k) n *= static_cast<std::size_t>(alphabet);
    return n;
}

std::size_t level_offset(int alphabet, int level) {
    std::size_t off = 0, sz = 1;
    for (int k = 0; k < level; ++k) {
        off += sz;
        sz *= static_cast<std::size_t>(alphabet);
    }
    return off;
}

std::size_t series_size(int alphabet, int order) {
    return level_offset(alphabet, order + 1);
}

std::size_t word_index(int alphabet, const Word& w) {
    std::size_t value = 0;
    for (int letter : w) {
        if (letter < 0 || letter >= alphabet)
            throw std::out_of_range("word_index: letter outside alphabet");
        value = value * static_cast<std::size_t>(alphabet) + static_cast<std::size_t>(letter);
    }
    return level_offset(alphabet, static_cast<int>(w.size())) + value;
}

Word word_from_index(int alphabet, std::size_t index) {
    int level = 0;
    while (index >= level_size(alphabet, level)) {
        index -= level_size(alphabet, level);
        ++level;
    }
    Word w(static_cast<std::size_t>(level));
    for (int k = level - 1; k >= 0; --k) {
        w[static_cast<std::size_t>(k)] = static_cast<int>(index % static_cast<std::size_t>(alphabet));
        index /= static_cast<std::size_t>(alphabet);
    }
    return w;
}

std::string word_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (int letter : w) {
        if (letter < 0 || letter > 9) throw std::out_of_range("word_string: letter not a digit");
        s.push_back(static_cast<char>('0' + letter));
    }
    return s;
}

Word parse_word(const std::string& s) {
    Word w;
    w.reserve(s.size());
    for (char c : s) {
        if (c < '0' || c > '9') throw std::invalid_argument("parse_word: letter not a digit");
        w.push_back(c - '0');
    }
    return w;
}

TruncatedTensorSeries::TruncatedTensorSeries(int alphabet, int order)
    : alphabet_(alphabet), order_(order) {
    if (alphabet < 1) throw std::invalid_argument("TruncatedTensorSeries: alphabet must be >= 1");
    if (order < 0) throw std::invalid_argument("TruncatedTensorSeries: order must be >= 0");
    coeffs_.assign(series_size(alphabet, order), 0.0);
}

TruncatedTensorSeries TruncatedTensorSeries::unit(int alphabet, int order) {
    TruncatedTensorSeries s(alphabet, order);
    s.coeffs_[0] = 1.0;
    return s;
}

std::span<const double> TruncatedTensorSeries::level(int k) const {
    return {coeffs_.data() + level_offset(alphabet_, k), level_size(alphabet_, k)};
}

std::span<double> TruncatedTensorSeries::level(int k) {
    return {coeffs_.data() + level_offset(alphabet_, k), level_size(alphabet_, k)};
}

TruncatedTensorSeries segment_signature(const Eigen::VectorXd& delta, int order) {
    const int alphabet = static_cast<int>(delta.size());
    TruncatedTensorSeries s(alphabet, order);
    s.level(0)[0] = 1.0;
    // level k = level k-1 (x) delta / k, i.e. the tensor exponential of delta
    for (int k = 1; k <= order; ++k) {
        auto prev = s.level(k - 1);
        auto cur = s.level(k);
        const double inv_k = 1.0 / static_cast<double>(k);
        for (std::size_t u = 0; u < prev.size(); ++u) {
            const double base = prev[u] * inv_k;
            for (int c = 0; c < alphabet; ++c)
                cur[u * static_cast<std::size_t>(alphabet) + static_cast<std::size_t>(c)] =
                    base * delta[c];
        }
    }
    return s;
}

TruncatedTensorSeries chen_product(const TruncatedTensorSeries& a, const TruncatedTensorSeries& b) {
    if (a.alphabet() != b.alphabet() || a.order() != b.order())
        throw std::invalid_argument("chen_product: alphabet/order mismatch");
    const int alphabet = a.alphabet();
    const int order = a.order();
    TruncatedTensorSeries c(alphabet, order);
    for (int n = 0; n <= order; ++n) {
        auto out = c.level(n);
        for (int k = 0; k <= n; ++k) {
            auto la = a.level(k);
            auto lb = b.level(n - k);
            // word uv sits at u * |alphabet|^{n-k} + v within level n
            for (std::size_t u = 0; u < la.size(); ++u) {
                const double au = la[u];
                if (au == 0.0) continue;
                double* dst = out.data() + u * lb.size();
                for (std::size_t v = 0; v < lb.size(); ++v) dst[v] += au * lb[v];
            }
        }
    }
    return c;
}

TruncatedTensorSeries dilate_signature(const TruncatedTensorSeries& s, double lambda) {
    TruncatedTensorSeries out(s.alphabet(), s.order());
    double scale = 1.0;
    for (int k = 0; k <= s.order(); ++k) {
        auto src = s.level(k);
        auto dst = out.level(k);
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = scale * src[i];
        scale *= lambda;
    }
    return out;
}

std::vector<Word> shuffle_product(const Word& a, const Word& b) {
    if (a.empty()) return {b};
    if (b.empty()) return {a};
    std::vector<Word> out;
    Word head_a(a.begin() + 1, a.end());
    for (auto& w : shuffle_product(head_a, b)) {
        Word v;
        v.reserve(w.size() + 1);
        v.push_back(a.front());
        v.insert(v.end(), w.begin(), w.end());
        out.push_back(std::move(v));
    }
    Word head_b(b.begin() + 1, b.end());
    for (auto& w : shuffle_product(a, head_b)) {
        Word v;
        v.reserve(w.size() + 1);
        v.push_back(b.front());
        v.insert(v.end(), w.begin(), w.end());
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace sigflow
